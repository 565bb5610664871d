//! Combinatorial cascade types between generators of adjacent degree, their
//! index identities and budget inequalities, and the exhaustive search that
//! sorts every surviving type into Cases 0–3.
//!
//! Levels are listed bottom-up: level i runs from multiplicity k_{i-1} to k_i.
//! For a cascade descending into W the plane in class B sits below level 1
//! and fixes k_0 = B•Σ.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::grading::{enumerate_generators, grade_reeb, Generator, GeneratorKind, GradingError};
use crate::pearl::{multiplicity_balance, PearlError};
use crate::setup::{format_rational, int, lattice_box, rational_to_i64, FibreFlag, SetupDescriptor, SetupError};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CascadeError {
    #[error("bounds must be positive (k_max = {k_max}, class_bound = {class_bound})")]
    InvalidBounds { k_max: u32, class_bound: i64 },
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error(transparent)]
    Pearl(#[from] PearlError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Augmentation {
    pub class_b: Vec<i64>,
    /// Multiplicity of the Reeb orbit at the puncture.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    /// Class of the projection to Σ.
    pub class_a: Vec<i64>,
    pub augmentations: Vec<Augmentation>,
}

impl Level {
    pub fn is_constant(&self) -> bool {
        self.class_a.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Interior to interior: a flow line of −f_W.
    Morse,
    YtoY,
    WtoY,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    Case0,
    Case1,
    Case2,
    Case3,
    /// Passes every check but matches none of the four shapes.
    Unclassified,
    Infeasible { reason: String },
}

impl CaseLabel {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, CaseLabel::Infeasible { .. })
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::Case0 => f.write_str("Case0"),
            CaseLabel::Case1 => f.write_str("Case1"),
            CaseLabel::Case2 => f.write_str("Case2"),
            CaseLabel::Case3 => f.write_str("Case3"),
            CaseLabel::Unclassified => f.write_str("Unclassified"),
            CaseLabel::Infeasible { reason } => write!(f, "Infeasible ({reason})"),
        }
    }
}

/// The non-negative terms on the right of the index inequality.
///
/// Y to Y: 1 ≥ (i(p̃) − i(q̃) + 1) + N₁ + k + (k − N₀) + Σ|γ_j|₀.
/// W to Y: 0 ≥ i(p̃) + N₁ + k + (k + 1 − N₀) + Σ|γ_j|₀.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BudgetTerms {
    pub fibre: i64,
    pub n0: u32,
    pub n1: u32,
    pub k: u32,
    pub slack: i64,
    pub reeb_indices: Vec<Rational>,
    pub total: Rational,
    pub bound: i64,
}

impl BudgetTerms {
    pub fn within_bound(&self) -> bool {
        self.total <= int(self.bound)
    }
}

/// A cascade configuration before it is judged.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CascadeSpec {
    pub target: Generator,
    pub source: Generator,
    pub levels: Vec<Level>,
    /// k_0 < … < k_N, empty for interior-to-interior flows.
    pub multiplicities: Vec<u32>,
    pub sphere_b: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CascadeType {
    pub target: Generator,
    pub source: Generator,
    pub levels: Vec<Level>,
    pub multiplicities: Vec<u32>,
    pub sphere_b: Option<Vec<i64>>,
    pub identity: Rational,
    pub budget: BudgetTerms,
    pub case: CaseLabel,
}

impl CascadeType {
    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn shape(&self) -> Shape {
        shape_of(&self.target, &self.source).unwrap_or(Shape::YtoY)
    }

    pub fn aug_count(&self) -> usize {
        self.levels.iter().map(|l| l.augmentations.len()).sum()
    }

    fn sort_key(&self) -> (&Generator, &Generator, usize, &[u32], &[Level], &Option<Vec<i64>>) {
        (
            &self.target,
            &self.source,
            self.levels.len(),
            &self.multiplicities,
            &self.levels,
            &self.sphere_b,
        )
    }
}

impl Ord for CascadeType {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for CascadeType {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn shape_of(target: &Generator, source: &Generator) -> Option<Shape> {
    match (target.is_orbit(), source.is_orbit()) {
        (true, true) => Some(Shape::YtoY),
        (true, false) => Some(Shape::WtoY),
        (false, false) => Some(Shape::Morse),
        (false, true) => None,
    }
}

fn fibre_flag(g: &Generator) -> Option<FibreFlag> {
    match &g.kind {
        GeneratorKind::Orbit { point, .. } => Some(point.fibre_flag),
        GeneratorKind::Interior { .. } => None,
    }
}

fn base_index(g: &Generator) -> i64 {
    match &g.kind {
        GeneratorKind::Orbit { point, .. } => point.base.morse_index as i64,
        GeneratorKind::Interior { point } => point.morse_index as i64,
    }
}

fn fibre_index(g: &Generator) -> i64 {
    fibre_flag(g).map_or(0, |f| f.fibre_index() as i64)
}

fn total_class_a(setup: &SetupDescriptor, levels: &[Level]) -> Vec<i64> {
    let mut a = vec![0; setup.lattice_sigma.rank()];
    for l in levels {
        for (t, c) in a.iter_mut().zip(&l.class_a) {
            *t += c;
        }
    }
    a
}

fn reeb_sum(setup: &SetupDescriptor, levels: &[Level]) -> Result<(u32, Rational), CascadeError> {
    let mut count = 0;
    let mut sum = Rational::zero();
    for aug in levels.iter().flat_map(|l| &l.augmentations) {
        count += 1;
        sum += grade_reeb(setup, aug.multiplicity)?;
    }
    Ok((count, sum))
}

/// i(p̃) + M(p) − i(q̃) − M(q) + 2⟨c₁(TΣ), A⟩ + 2k + Σ|γ_j|₀.
pub fn index_identity_yy(setup: &SetupDescriptor, cascade: &CascadeSpec) -> Result<Rational, CascadeError> {
    let a = total_class_a(setup, &cascade.levels);
    let (k, gammas) = reeb_sum(setup, &cascade.levels)?;
    let fixed = fibre_index(&cascade.target) + base_index(&cascade.target)
        - fibre_index(&cascade.source)
        - base_index(&cascade.source)
        + 2 * setup.lattice_sigma.c1_of(&a)?
        + 2 * k as i64;
    Ok(int(fixed) + gammas)
}

/// i(p̃) + M(p) + 1 − 2n + M(x) + 2⟨c₁(TΣ), A⟩ + 2⟨c₁(TX), B⟩ − 2B•Σ + 2k + Σ|γ_j|₀.
pub fn index_identity_wy(setup: &SetupDescriptor, cascade: &CascadeSpec) -> Result<Rational, CascadeError> {
    let a = total_class_a(setup, &cascade.levels);
    let (k, gammas) = reeb_sum(setup, &cascade.levels)?;
    let zero_b = vec![0; setup.lattice_x.rank()];
    let b = cascade.sphere_b.as_ref().unwrap_or(&zero_b);
    let fixed = fibre_index(&cascade.target) + base_index(&cascade.target) + 1
        - 2 * setup.n as i64
        + base_index(&cascade.source)
        + 2 * setup.lattice_sigma.c1_of(&a)?
        + 2 * setup.lattice_x.c1_of(b)?
        - 2 * setup.lattice_x.sigma_dot(b)?
        + 2 * k as i64;
    Ok(int(fixed) + gammas)
}

fn budget_terms(setup: &SetupDescriptor, spec: &CascadeSpec, shape: Shape) -> Result<BudgetTerms, CascadeError> {
    let n0 = spec.levels.iter().filter(|l| l.is_constant()).count() as u32;
    let n1 = spec.levels.len() as u32 - n0;
    let mut reeb = Vec::new();
    for aug in spec.levels.iter().flat_map(|l| &l.augmentations) {
        reeb.push(if aug.multiplicity == 0 {
            int(-2)
        } else {
            grade_reeb(setup, aug.multiplicity)?
        });
    }
    let k = reeb.len() as u32;
    let (fibre, slack, bound) = match shape {
        Shape::YtoY => (
            fibre_index(&spec.target) - fibre_index(&spec.source) + 1,
            k as i64 - n0 as i64,
            1,
        ),
        Shape::WtoY => (fibre_index(&spec.target), k as i64 + 1 - n0 as i64, 0),
        Shape::Morse => (0, 0, 1),
    };
    let total = reeb.iter().fold(int(fibre + n1 as i64 + k as i64 + slack), |acc, g| acc + g);
    Ok(BudgetTerms {
        fibre,
        n0,
        n1,
        k,
        slack,
        reeb_indices: reeb,
        total,
        bound,
    })
}

fn structural_failure(setup: &SetupDescriptor, spec: &CascadeSpec, shape: Shape) -> Result<Option<String>, CascadeError> {
    let gap = &spec.target.grading - &spec.source.grading;
    if gap != int(1) {
        return Ok(Some(format!("degree difference is {}, not 1", format_rational(&gap))));
    }
    if shape == Shape::Morse {
        if !spec.levels.is_empty() || spec.sphere_b.is_some() || !spec.multiplicities.is_empty() {
            return Ok(Some("interior flow lines carry no levels".into()));
        }
        return Ok(None);
    }
    let n = spec.levels.len();
    if spec.multiplicities.len() != n + 1 {
        return Ok(Some(format!("{} multiplicities for {n} levels", spec.multiplicities.len())));
    }
    let k_plus = spec.target.multiplicity().unwrap_or(0);
    if spec.multiplicities[n] != k_plus {
        return Ok(Some("top multiplicity differs from the target".into()));
    }
    match shape {
        Shape::YtoY => {
            if spec.sphere_b.is_some() {
                return Ok(Some("a cascade between orbits has no plane in W".into()));
            }
            if spec.multiplicities[0] != spec.source.multiplicity().unwrap_or(0) {
                return Ok(Some("bottom multiplicity differs from the source".into()));
            }
        }
        Shape::WtoY => {
            if n == 0 {
                return Ok(Some("a cascade into W needs N >= 1".into()));
            }
            let Some(b) = &spec.sphere_b else {
                return Ok(Some("a cascade into W needs a plane class B".into()));
            };
            if !setup.lattice_x.omega_of(b)?.is_positive() {
                return Ok(Some("the plane in W has omega(B) <= 0".into()));
            }
            if setup.lattice_x.sigma_dot(b)? != spec.multiplicities[0] as i64 {
                return Ok(Some("k_0 differs from B.Sigma".into()));
            }
        }
        Shape::Morse => unreachable!(),
    }
    if spec.multiplicities.contains(&0) {
        return Ok(Some("multiplicities must be positive".into()));
    }
    for (i, level) in spec.levels.iter().enumerate() {
        let label = i + 1;
        if !level.is_constant() && !setup.lattice_sigma.omega_of(&level.class_a)?.is_positive() {
            return Ok(Some(format!("level {label} has omega(A) <= 0")));
        }
        let first_in_w = shape == Shape::WtoY && i == 0;
        if level.is_constant() && level.augmentations.is_empty() && !first_in_w {
            return Ok(Some(format!("level {label} is constant without augmentation")));
        }
        for aug in &level.augmentations {
            if !setup.lattice_x.omega_of(&aug.class_b)?.is_positive() {
                return Ok(Some(format!("augmentation on level {label} has omega(B) <= 0")));
            }
            if setup.lattice_x.sigma_dot(&aug.class_b)? != aug.multiplicity as i64 {
                return Ok(Some(format!("augmentation on level {label} has multiplicity != B.Sigma")));
            }
        }
        let mults: Vec<u32> = level.augmentations.iter().map(|a| a.multiplicity).collect();
        let (lo, hi) = (spec.multiplicities[i], spec.multiplicities[i + 1]);
        if !multiplicity_balance(setup, &level.class_a, hi, lo, &mults)? {
            return Ok(Some(format!("multiplicity balance fails on level {label}")));
        }
    }
    Ok(None)
}

/// Evaluates the identity and budget of a configuration and labels it.
pub fn classify(setup: &SetupDescriptor, spec: CascadeSpec) -> Result<CascadeType, CascadeError> {
    let Some(shape) = shape_of(&spec.target, &spec.source) else {
        let budget = BudgetTerms {
            fibre: 0,
            n0: 0,
            n1: 0,
            k: 0,
            slack: 0,
            reeb_indices: vec![],
            total: Rational::zero(),
            bound: 1,
        };
        return Ok(finish(spec, Rational::zero(), budget, CaseLabel::Infeasible {
            reason: "no cascade runs from an orbit down to an interior point".into(),
        }));
    };
    let identity = match shape {
        Shape::YtoY => index_identity_yy(setup, &spec)?,
        Shape::WtoY => index_identity_wy(setup, &spec)?,
        Shape::Morse => &spec.target.grading - &spec.source.grading,
    };
    let budget = budget_terms(setup, &spec, shape)?;
    let infeasible = |reason: String| CaseLabel::Infeasible { reason };

    let case = if let Some(reason) = structural_failure(setup, &spec, shape)? {
        infeasible(reason)
    } else if identity != int(1) {
        infeasible(format!("index identity gives {}, not 1", format_rational(&identity)))
    } else if !budget.within_bound() {
        infeasible(format!(
            "index budget {} exceeds {}",
            format_rational(&budget.total),
            budget.bound
        ))
    } else if shape == Shape::YtoY
        && total_class_a(setup, &spec.levels).iter().all(|&c| c == 0)
        && !spec.levels.is_empty()
        && !same_base(&spec.target, &spec.source)
        && base_index(&spec.target) <= base_index(&spec.source)
    {
        infeasible("constant projection needs p = q or M(p) > M(q)".into())
    } else {
        let n = spec.levels.len();
        match shape {
            Shape::Morse => CaseLabel::Case0,
            Shape::YtoY if n == 0 => CaseLabel::Case0,
            Shape::YtoY if n == 1 && budget.n1 == 1 && budget.k == 0 => CaseLabel::Case1,
            Shape::YtoY if n == 1 && budget.n0 == 1 && budget.k == 1 => CaseLabel::Case2,
            Shape::WtoY if n == 1 && budget.n0 == 1 && budget.k == 0 => CaseLabel::Case3,
            _ => CaseLabel::Unclassified,
        }
    };
    Ok(finish(spec, identity, budget, case))
}

fn same_base(a: &Generator, b: &Generator) -> bool {
    match (&a.kind, &b.kind) {
        (GeneratorKind::Orbit { point: p, .. }, GeneratorKind::Orbit { point: q, .. }) => p.base == q.base,
        _ => false,
    }
}

fn finish(spec: CascadeSpec, identity: Rational, budget: BudgetTerms, case: CaseLabel) -> CascadeType {
    CascadeType {
        target: spec.target,
        source: spec.source,
        levels: spec.levels,
        multiplicities: spec.multiplicities,
        sphere_b: spec.sphere_b,
        identity,
        budget,
        case,
    }
}

/// Whether partial configurations are cut once their budget is spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    Budget,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completeness {
    /// The coefficient box holds every class the multiplicity bound allows.
    Complete,
    /// Some class allowed by the multiplicity bound lies outside the box.
    BoundTooSmall { lattice: &'static str, needed: i64 },
    /// Rank at least two: classes differing by ω-null directions are only
    /// searched inside the box.
    BoxLimited { lattice: &'static str },
}

impl fmt::Display for Completeness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completeness::Complete => f.write_str("complete"),
            Completeness::BoundTooSmall { lattice, needed } => {
                write!(f, "BoundTooSmall: {lattice} needs class bound {needed}")
            }
            Completeness::BoxLimited { lattice } => {
                write!(f, "box-limited: {lattice} has rank >= 2")
            }
        }
    }
}

fn completeness(setup: &SetupDescriptor, k_max: u32, class_bound: i64) -> Vec<Completeness> {
    let mut out = Vec::new();
    for (name, lattice) in [("lattice_sigma", &setup.lattice_sigma), ("lattice_x", &setup.lattice_x)] {
        match lattice.rank() {
            0 => {}
            1 => {
                let w = (&setup.k_const * &lattice.omega[0]).abs();
                if w.is_zero() {
                    continue;
                }
                // largest c with K ω(c·g) ≤ k_max
                let needed = (int(k_max as i64) / w).floor();
                let needed = rational_to_i64(&needed).unwrap_or(i64::MAX);
                if needed > class_bound {
                    out.push(Completeness::BoundTooSmall { lattice: name, needed });
                }
            }
            _ => out.push(Completeness::BoxLimited { lattice: name }),
        }
    }
    if out.is_empty() {
        out.push(Completeness::Complete);
    }
    out
}

#[derive(Debug, Clone)]
struct SigmaClass {
    class: Vec<i64>,
    k_omega: u32,
}

#[derive(Debug, Clone)]
struct XClass {
    class: Vec<i64>,
    dot: u32,
    reeb: Rational,
}

#[derive(Debug, Clone)]
struct LevelOption {
    level: Level,
    /// Contribution N₁ + 2k − N₀ + Σ|γ| of this level to the budget.
    budget: Rational,
}

struct Search<'a> {
    setup: &'a SetupDescriptor,
    pruning: Pruning,
    sigma: Vec<SigmaClass>,
    xs: Vec<XClass>,
}

impl<'a> Search<'a> {
    fn new(setup: &'a SetupDescriptor, class_bound: i64, pruning: Pruning) -> Result<Self, CascadeError> {
        let mut sigma = Vec::new();
        for a in lattice_box(setup.lattice_sigma.rank(), class_bound) {
            let w = setup.lattice_sigma.omega_of(&a)?;
            if !w.is_positive() {
                continue;
            }
            if let Some(kw) = rational_to_i64(&(&setup.k_const * w)) {
                sigma.push(SigmaClass {
                    class: a,
                    k_omega: kw as u32,
                });
            }
        }
        let mut xs = Vec::new();
        for b in lattice_box(setup.lattice_x.rank(), class_bound) {
            if !setup.lattice_x.omega_of(&b)?.is_positive() {
                continue;
            }
            let dot = setup.lattice_x.sigma_dot(&b)?;
            if dot <= 0 {
                continue;
            }
            xs.push(XClass {
                class: b,
                dot: dot as u32,
                reeb: grade_reeb(setup, dot as u32)?,
            });
        }
        Ok(Search {
            setup,
            pruning,
            sigma,
            xs,
        })
    }

    /// Augmentation multisets with total multiplicity `r`, using classes from
    /// index `from` on so that each multiset appears once.
    fn aug_multisets(&self, r: u32, from: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if r == 0 {
            out.push(prefix.clone());
            return;
        }
        for j in from..self.xs.len() {
            if self.xs[j].dot <= r {
                prefix.push(j);
                self.aug_multisets(r - self.xs[j].dot, j, prefix, out);
                prefix.pop();
            }
        }
    }

    fn level_options(&self, d: u32, allow_bare_constant: bool) -> Vec<LevelOption> {
        let zero_a = vec![0; self.setup.lattice_sigma.rank()];
        let mut out = Vec::new();
        let mut choices: Vec<(Vec<i64>, u32)> = vec![(zero_a, 0)];
        choices.extend(self.sigma.iter().map(|s| (s.class.clone(), s.k_omega)));
        for (a, kw) in choices {
            if kw > d {
                continue;
            }
            let constant = kw == 0;
            let mut sets = Vec::new();
            self.aug_multisets(d - kw, 0, &mut Vec::new(), &mut sets);
            for set in sets {
                if constant && set.is_empty() && !allow_bare_constant {
                    continue;
                }
                let mut budget = int(if constant { -1 } else { 1 } + 2 * set.len() as i64);
                let mut augs = Vec::with_capacity(set.len());
                for &j in &set {
                    budget += &self.xs[j].reeb;
                    augs.push(Augmentation {
                        class_b: self.xs[j].class.clone(),
                        multiplicity: self.xs[j].dot,
                    });
                }
                augs.sort();
                out.push(LevelOption {
                    level: Level {
                        class_a: a.clone(),
                        augmentations: augs,
                    },
                    budget,
                });
            }
        }
        out
    }

    /// Extends a bottom-up partial configuration level by level.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        parts: &[u32],
        first_bare_allowed: bool,
        partial: Rational,
        bound: &Rational,
        levels: &mut Vec<Level>,
        cache: &mut HashMap<(u32, bool), Vec<LevelOption>>,
        out: &mut Vec<Vec<Level>>,
    ) {
        let depth = levels.len();
        if depth == parts.len() {
            out.push(levels.clone());
            return;
        }
        let bare = first_bare_allowed && depth == 0;
        let options = cache
            .entry((parts[depth], bare))
            .or_insert_with(|| self.level_options(parts[depth], bare))
            .clone();
        for opt in options {
            let next = &partial + &opt.budget;
            if self.pruning == Pruning::Budget && &next > bound {
                continue;
            }
            levels.push(opt.level);
            self.extend(parts, first_bare_allowed, next, bound, levels, cache, out);
            levels.pop();
        }
    }

    fn yy(&self, target: &Generator, source: &Generator) -> Result<Vec<CascadeType>, CascadeError> {
        let (kp, km) = (target.multiplicity().unwrap(), source.multiplicity().unwrap());
        let fibre = fibre_index(target) - fibre_index(source) + 1;
        let mut out = Vec::new();
        if self.pruning == Pruning::Budget && fibre > 1 {
            return Ok(out);
        }
        let mut candidates: Vec<(Vec<Level>, Vec<u32>)> = Vec::new();
        if kp == km {
            candidates.push((vec![], vec![km]));
        }
        if kp > km {
            let d = kp - km;
            let mut cache = HashMap::new();
            for n in 1..=d {
                for parts in compositions(d, n as usize, false) {
                    let mut found = Vec::new();
                    self.extend(&parts, false, int(fibre), &int(1), &mut Vec::new(), &mut cache, &mut found);
                    for levels in found {
                        candidates.push((levels, running(km, &parts)));
                    }
                }
            }
        }
        for (levels, multiplicities) in candidates {
            let t = classify(
                self.setup,
                CascadeSpec {
                    target: target.clone(),
                    source: source.clone(),
                    levels,
                    multiplicities,
                    sphere_b: None,
                },
            )?;
            if t.case.is_feasible() {
                out.push(t);
            }
        }
        Ok(out)
    }

    fn wy(&self, target: &Generator, source: &Generator) -> Result<Vec<CascadeType>, CascadeError> {
        let kp = target.multiplicity().unwrap();
        let fibre = fibre_index(target);
        let mut out = Vec::new();
        // the first level may contribute −1
        if self.pruning == Pruning::Budget && fibre + 1 - 1 > 0 {
            return Ok(out);
        }
        let mut cache = HashMap::new();
        for b in &self.xs {
            if b.dot > kp {
                continue;
            }
            let d = kp - b.dot;
            for n in 1..=d + 1 {
                for parts in compositions(d, n as usize, true) {
                    let mut found = Vec::new();
                    self.extend(&parts, true, int(fibre + 1), &int(0), &mut Vec::new(), &mut cache, &mut found);
                    for levels in found {
                        let t = classify(
                            self.setup,
                            CascadeSpec {
                                target: target.clone(),
                                source: source.clone(),
                                levels,
                                multiplicities: running(b.dot, &parts),
                                sphere_b: Some(b.class.clone()),
                            },
                        )?;
                        if t.case.is_feasible() {
                            out.push(t);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn morse(&self, target: &Generator, source: &Generator) -> Result<Vec<CascadeType>, CascadeError> {
        let t = classify(
            self.setup,
            CascadeSpec {
                target: target.clone(),
                source: source.clone(),
                levels: vec![],
                multiplicities: vec![],
                sphere_b: None,
            },
        )?;
        Ok(if t.case.is_feasible() { vec![t] } else { vec![] })
    }

    fn contributions(&self, target: &Generator, sources: &[Generator]) -> Result<Vec<CascadeType>, CascadeError> {
        let mut out = Vec::new();
        for source in sources {
            if &target.grading - &source.grading != int(1) {
                continue;
            }
            let found = match shape_of(target, source) {
                Some(Shape::YtoY) => self.yy(target, source)?,
                Some(Shape::WtoY) => self.wy(target, source)?,
                Some(Shape::Morse) => self.morse(target, source)?,
                None => vec![],
            };
            out.extend(found);
        }
        out.sort();
        Ok(out)
    }
}

/// Compositions of `total` into `n` ordered parts, all positive except that
/// the first may vanish when `first_may_vanish` is set.
fn compositions(total: u32, n: usize, first_may_vanish: bool) -> Vec<Vec<u32>> {
    fn go(total: u32, n: usize, min_first: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let rest_min = (n - 1) as u32;
        if total < min_first + rest_min {
            return;
        }
        for first in min_first..=total - rest_min {
            prefix.push(first);
            go(total - first, n - 1, 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, n, if first_may_vanish { 0 } else { 1 }, &mut Vec::new(), &mut out);
    out
}

fn running(start: u32, parts: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(parts.len() + 1);
    out.push(start);
    let mut k = start;
    for p in parts {
        k += p;
        out.push(k);
    }
    out
}

/// Feasible cascade types into one target, with how far the search reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub target: Generator,
    pub cascades: Vec<CascadeType>,
    pub completeness: Vec<Completeness>,
}

fn check_bounds(k_max: u32, class_bound: i64) -> Result<(), CascadeError> {
    if k_max == 0 || class_bound <= 0 {
        return Err(CascadeError::InvalidBounds { k_max, class_bound });
    }
    Ok(())
}

pub fn enumerate_contributions(
    setup: &SetupDescriptor,
    target: &Generator,
    k_max: u32,
    class_bound: i64,
) -> Result<Enumeration, CascadeError> {
    enumerate_contributions_with(setup, target, k_max, class_bound, Pruning::Budget)
}

pub fn enumerate_contributions_with(
    setup: &SetupDescriptor,
    target: &Generator,
    k_max: u32,
    class_bound: i64,
    pruning: Pruning,
) -> Result<Enumeration, CascadeError> {
    check_bounds(k_max, class_bound)?;
    let search = Search::new(setup, class_bound, pruning)?;
    let sources = enumerate_generators(setup, k_max)?;
    let cascades = search.contributions(target, &sources)?;
    Ok(Enumeration {
        target: target.clone(),
        cascades,
        completeness: completeness(setup, k_max, class_bound),
    })
}

/// The full catalog over every generator with k ≤ k_max, targets in parallel.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub cascades: Vec<CascadeType>,
    pub completeness: Vec<Completeness>,
}

pub fn enumerate_all(
    setup: &SetupDescriptor,
    k_max: u32,
    class_bound: i64,
    pruning: Pruning,
) -> Result<Catalog, CascadeError> {
    check_bounds(k_max, class_bound)?;
    let search = Search::new(setup, class_bound, pruning)?;
    let generators = enumerate_generators(setup, k_max)?;
    let per_target: Vec<Vec<CascadeType>> = generators
        .par_iter()
        .map(|t| search.contributions(t, &generators))
        .collect::<Result<_, _>>()?;
    let mut cascades: Vec<CascadeType> = per_target.into_iter().flatten().collect();
    cascades.sort();
    Ok(Catalog {
        cascades,
        completeness: completeness(setup, k_max, class_bound),
    })
}

/// Checks one feasible type against the structural constraints of its case
/// and the budget invariants; returns every violated constraint.
pub fn check_structure(setup: &SetupDescriptor, t: &CascadeType) -> Vec<String> {
    let mut bad = Vec::new();
    let mut need = |ok: bool, what: &str| {
        if !ok {
            bad.push(what.to_string());
        }
    };
    need(&t.target.grading - &t.source.grading == int(1), "degree difference is 1");
    need(t.identity == int(1), "index identity equals 1");
    let b = &t.budget;
    let target_check = fibre_flag(&t.target) == Some(FibreFlag::Check);
    let source_hat = fibre_flag(&t.source) == Some(FibreFlag::Hat);
    match t.shape() {
        Shape::YtoY => {
            need(b.k <= 1, "k <= 1");
            need(b.n1 <= 1, "N1 <= 1");
            need(b.n0 <= b.k, "N0 <= k");
            need(t.n() <= 1, "N <= 1");
        }
        Shape::WtoY => {
            need(b.n1 == 0, "N1 = 0");
            need(b.n0 == 1, "N0 = 1");
            need(b.k == 0, "k = 0");
            need(target_check, "target is a check generator");
        }
        Shape::Morse => need(t.n() == 0, "interior flow has no levels"),
    }
    let kp = t.target.multiplicity().unwrap_or(0) as i64;
    let km = t.source.multiplicity().unwrap_or(0) as i64;
    match &t.case {
        CaseLabel::Case0 => {
            need(t.n() == 0, "Case0: N = 0");
            need(kp == km, "Case0: equal multiplicities");
        }
        CaseLabel::Case1 => {
            need(t.n() == 1 && b.k == 0 && b.n1 == 1, "Case1: N = 1, k = 0, nonconstant");
            need(target_check && source_hat, "Case1: ends p-check and q-hat");
            if let Ok(w) = setup.lattice_sigma.omega_of(&t.levels[0].class_a) {
                need(int(kp - km) == &setup.k_const * w, "Case1: k+ - k- = K omega(A)");
            }
        }
        CaseLabel::Case2 => {
            need(t.n() == 1 && b.n0 == 1 && b.k == 1, "Case2: N = 1, N0 = 1, k = 1");
            need(target_check && source_hat, "Case2: ends p-check and p-hat");
            need(same_base(&t.target, &t.source), "Case2: q = p");
            need(b.reeb_indices.iter().all(|g| g.is_zero()), "Case2: augmentation plane has index 0");
            need(
                setup.tau_sigma() * int(kp - km) / &setup.k_const == int(1),
                "Case2: (tau_X - K)(k+ - k-)/K = 1",
            );
        }
        CaseLabel::Case3 => {
            need(t.n() == 1 && t.levels[0].is_constant(), "Case3: two levels, A = 0");
            need(target_check && !t.source.is_orbit(), "Case3: ends p-check and x");
            need(t.multiplicities.first() == t.multiplicities.last(), "Case3: plane caps the target orbit");
        }
        CaseLabel::Unclassified => need(false, "matches one of Cases 0-3"),
        CaseLabel::Infeasible { .. } => need(false, "feasible"),
    }
    bad
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub k_max: u32,
    pub class_bound: i64,
    pub catalog: Vec<CascadeType>,
    pub case_counts: BTreeMap<String, usize>,
    /// Human-readable descriptions of every violated constraint.
    pub counterexamples: Vec<String>,
    /// Budget pruning lost nothing relative to the exhaustive search.
    pub pruning_sound: bool,
    pub completeness: Vec<Completeness>,
}

impl CertificationReport {
    pub fn certified(&self) -> bool {
        self.counterexamples.is_empty() && self.pruning_sound
    }

    pub fn verdict(&self) -> String {
        if self.certified() {
            let cases: Vec<&str> = self.case_counts.keys().map(String::as_str).collect();
            format!("certified: all feasible types in {{{}}}", cases.join(","))
        } else {
            format!("not certified: {} counterexample(s)", self.counterexamples.len().max(1))
        }
    }
}

/// Runs the exhaustive search over every generator and checks each feasible
/// type against its case's structural constraints and the budget invariants.
pub fn certify_classification(
    setup: &SetupDescriptor,
    k_max: u32,
    class_bound: i64,
) -> Result<CertificationReport, CascadeError> {
    let exhaustive = enumerate_all(setup, k_max, class_bound, Pruning::Exhaustive)?;
    let pruned = enumerate_all(setup, k_max, class_bound, Pruning::Budget)?;
    let mut counts = BTreeMap::new();
    let mut counterexamples = Vec::new();
    for t in &exhaustive.cascades {
        *counts.entry(t.case.to_string()).or_insert(0) += 1;
        for what in check_structure(setup, t) {
            counterexamples.push(format!("{} <- {}: violates {what}", t.target.name(), t.source.name()));
        }
    }
    Ok(CertificationReport {
        k_max,
        class_bound,
        pruning_sound: exhaustive.cascades == pruned.cascades,
        catalog: exhaustive.cascades,
        case_counts: counts,
        counterexamples,
        completeness: exhaustive.completeness,
    })
}

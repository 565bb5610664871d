//! Geometric input data: the monotone triple, homology lattices with their
//! pairing functionals, and Morse data on the divisor and the filling.
//!
//! Homology is modelled as a free lattice in a fixed generator basis. Only
//! the pairings with ω, c₁ and the divisor enter any formula downstream, so
//! torsion is never represented.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetupError {
    #[error("cannot read setup file: {0}")]
    Io(String),
    #[error("malformed setup: {0}")]
    Parse(String),
    #[error("invalid setup: {0}")]
    Validation(String),
    #[error("class has {got} coefficients but the lattice has rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice carries no {0} functional")]
    MissingFunctional(Functional),
    #[error("unknown critical point `{0}`")]
    UnknownCriticalPoint(String),
}

/// Which pairing to evaluate on a lattice vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    Omega,
    C1,
    SigmaIntersection,
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Functional::Omega => "omega",
            Functional::C1 => "c1",
            Functional::SigmaIntersection => "sigma_intersection",
        })
    }
}

/// A finite free model of H₂ with its pairing functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyLattice {
    pub generator_names: Vec<String>,
    pub omega: Vec<Rational>,
    pub c1: Vec<i64>,
    /// Intersection number with the divisor; only meaningful on X.
    pub sigma_intersection: Option<Vec<i64>>,
}

impl HomologyLattice {
    pub fn empty(with_intersection: bool) -> Self {
        HomologyLattice {
            generator_names: Vec::new(),
            omega: Vec::new(),
            c1: Vec::new(),
            sigma_intersection: with_intersection.then(Vec::new),
        }
    }

    pub fn rank(&self) -> usize {
        self.generator_names.len()
    }

    pub fn pair(&self, cls: &[i64], functional: Functional) -> Result<Rational, SetupError> {
        pair(self, cls, functional)
    }

    pub fn omega_of(&self, cls: &[i64]) -> Result<Rational, SetupError> {
        pair(self, cls, Functional::Omega)
    }

    /// ⟨c₁, cls⟩, integral because c₁ is an integer functional.
    pub fn c1_of(&self, cls: &[i64]) -> Result<i64, SetupError> {
        self.check_len(cls)?;
        Ok(dot(&self.c1, cls))
    }

    /// cls • Σ.
    pub fn sigma_dot(&self, cls: &[i64]) -> Result<i64, SetupError> {
        self.check_len(cls)?;
        let s = self
            .sigma_intersection
            .as_ref()
            .ok_or(SetupError::MissingFunctional(Functional::SigmaIntersection))?;
        Ok(dot(s, cls))
    }

    fn check_len(&self, cls: &[i64]) -> Result<(), SetupError> {
        if cls.len() != self.rank() {
            return Err(SetupError::DimensionMismatch {
                expected: self.rank(),
                got: cls.len(),
            });
        }
        Ok(())
    }
}

fn dot(f: &[i64], cls: &[i64]) -> i64 {
    f.iter().zip(cls).map(|(a, b)| a * b).sum()
}

/// Evaluates ω, c₁ or •Σ on an integer class, exactly.
pub fn pair(
    lattice: &HomologyLattice,
    cls: &[i64],
    functional: Functional,
) -> Result<Rational, SetupError> {
    lattice.check_len(cls)?;
    match functional {
        Functional::Omega => Ok(lattice
            .omega
            .iter()
            .zip(cls)
            .map(|(w, &c)| w * Rational::from_integer(BigInt::from(c)))
            .fold(Rational::zero(), |acc, v| acc + v)),
        Functional::C1 => Ok(int(lattice.c1_of(cls)?)),
        Functional::SigmaIntersection => Ok(int(lattice.sigma_dot(cls)?)),
    }
}

pub(crate) fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ambient {
    Sigma,
    W,
}

/// A critical point of f_Σ or f_W.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalPoint {
    pub name: String,
    pub morse_index: u32,
    pub ambient: Ambient,
}

impl CriticalPoint {
    pub fn new(name: impl Into<String>, morse_index: u32, ambient: Ambient) -> Self {
        CriticalPoint {
            name: name.into(),
            morse_index,
            ambient,
        }
    }
}

/// Fibrewise minimum (check) or maximum (hat) of f_Y over a point of Σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FibreFlag {
    Check,
    Hat,
}

impl FibreFlag {
    /// The fibrewise index i(p̃).
    pub fn fibre_index(self) -> u32 {
        match self {
            FibreFlag::Check => 0,
            FibreFlag::Hat => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FibreFlag::Check => "check",
            FibreFlag::Hat => "hat",
        }
    }
}

/// A critical point of f_Y sitting over a critical point of f_Σ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiftedCriticalPoint {
    pub base: CriticalPoint,
    pub fibre_flag: FibreFlag,
}

impl LiftedCriticalPoint {
    pub fn new(base: CriticalPoint, fibre_flag: FibreFlag) -> Self {
        LiftedCriticalPoint { base, fibre_flag }
    }

    /// M̃(p̃) = M(p) + i(p̃).
    pub fn lifted_index(&self) -> u32 {
        self.base.morse_index + self.fibre_flag.fibre_index()
    }

    pub fn name(&self) -> String {
        format!("{}.{}", self.base.name, self.fibre_flag.label())
    }
}

/// The validated geometric input.
#[derive(Debug, Clone, PartialEq)]
pub struct SetupDescriptor {
    pub name: Option<String>,
    /// Complex dimension of X.
    pub n: u32,
    pub tau_x: Rational,
    pub k_const: Rational,
    /// Minimal Reeb period.
    pub t0: Rational,
    pub lattice_sigma: HomologyLattice,
    pub lattice_x: HomologyLattice,
    pub morse_sigma: Vec<CriticalPoint>,
    pub morse_w: Vec<CriticalPoint>,
    pub min_chern_sigma: Option<u64>,
    /// Declares that every X-class comes from a class on Σ.
    pub x_classes_from_sigma: bool,
}

impl SetupDescriptor {
    pub fn from_json_str(text: &str) -> Result<Self, SetupError> {
        let raw: RawSetup =
            serde_json::from_str(text).map_err(|e| SetupError::Parse(e.to_string()))?;
        let setup = raw.into_setup()?;
        setup.validate()?;
        Ok(setup)
    }

    /// Checks every invariant, reporting the first one violated.
    pub fn validate(&self) -> Result<(), SetupError> {
        let fail = |msg: String| Err(SetupError::Validation(msg));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if !self.k_const.is_positive() {
            return fail("K must be positive".into());
        }
        if self.tau_x <= self.k_const {
            return fail("tau_X <= K".into());
        }
        if !self.t0.is_positive() {
            return fail("T0 must be positive".into());
        }
        for (label, lattice) in [("lattice_sigma", &self.lattice_sigma), ("lattice_x", &self.lattice_x)] {
            let r = lattice.rank();
            if lattice.omega.len() != r || lattice.c1.len() != r {
                return fail(format!("{label}: functional lengths differ from rank {r}"));
            }
            if let Some(s) = &lattice.sigma_intersection {
                if s.len() != r {
                    return fail(format!("{label}: sigma_intersection length differs from rank {r}"));
                }
            }
            let mut seen = HashSet::new();
            for g in &lattice.generator_names {
                if !seen.insert(g) {
                    return fail(format!("{label}: duplicate generator `{g}`"));
                }
            }
        }
        if self.lattice_sigma.sigma_intersection.is_some() {
            return fail("lattice_sigma must not carry sigma_intersection".into());
        }
        let Some(dots) = &self.lattice_x.sigma_intersection else {
            return fail("lattice_x requires sigma_intersection".into());
        };
        for (i, g) in self.lattice_x.generator_names.iter().enumerate() {
            let w = &self.lattice_x.omega[i];
            if int(dots[i]) != &self.k_const * w {
                return fail(format!("B.Sigma != K*omega(B) on generator `{g}`"));
            }
            if int(self.lattice_x.c1[i]) != &self.tau_x * w {
                return fail(format!("c1(TX) != tau_X*omega on generator `{g}`"));
            }
        }
        let tau_sigma = self.tau_sigma();
        for (i, g) in self.lattice_sigma.generator_names.iter().enumerate() {
            if int(self.lattice_sigma.c1[i]) != &tau_sigma * &self.lattice_sigma.omega[i] {
                return fail(format!("c1(TSigma) != (tau_X - K)*omega on generator `{g}`"));
            }
        }
        let mut names = HashSet::new();
        for p in self.morse_sigma.iter().chain(&self.morse_w) {
            if !names.insert(p.name.as_str()) {
                return fail(format!("duplicate critical point name `{}`", p.name));
            }
            if p.name.contains('.') {
                return fail(format!("critical point name `{}` must not contain '.'", p.name));
            }
        }
        for p in &self.morse_sigma {
            if p.ambient != Ambient::Sigma || p.morse_index > 2 * self.n - 2 {
                return fail(format!(
                    "Morse index of `{}` outside [0, 2n-2] on Sigma",
                    p.name
                ));
            }
        }
        for x in &self.morse_w {
            if x.ambient != Ambient::W || x.morse_index > 2 * self.n {
                return fail(format!("Morse index of `{}` outside [0, 2n] on W", x.name));
            }
        }
        if self.min_chern_sigma == Some(0) {
            return fail("min_chern_sigma must be positive".into());
        }
        if self.x_classes_from_sigma {
            if let Some(m) = self.effective_min_chern_sigma() {
                // c1(TΣ) of the preimage equals (tau_X - K) * omega(B)
                for (i, g) in self.lattice_x.generator_names.iter().enumerate() {
                    let v = &tau_sigma * &self.lattice_x.omega[i];
                    let divisible = v.is_integer() && v.to_integer().is_multiple_of(&BigInt::from(m));
                    if !divisible {
                        return fail(format!(
                            "x_classes_from_sigma: (tau_X - K)*omega on `{g}` is not a multiple of the minimal Chern number {m}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// τ_Σ = τ_X − K.
    pub fn tau_sigma(&self) -> Rational {
        &self.tau_x - &self.k_const
    }

    /// 2(τ_X − K)/K, the coefficient of k in orbit gradings.
    pub fn grading_slope(&self) -> Rational {
        int(2) * self.tau_sigma() / &self.k_const
    }

    /// The minimal Chern number of Σ: the declared value, else the gcd of c₁
    /// over the Σ generators. `None` stands for "infinite" (c₁ vanishes).
    pub fn effective_min_chern_sigma(&self) -> Option<u64> {
        if self.min_chern_sigma.is_some() {
            return self.min_chern_sigma;
        }
        let g = self
            .lattice_sigma
            .c1
            .iter()
            .fold(0i64, |acc, &c| acc.gcd(&c));
        (g != 0).then(|| g.unsigned_abs())
    }

    pub fn sigma_point(&self, name: &str) -> Result<&CriticalPoint, SetupError> {
        self.morse_sigma
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| SetupError::UnknownCriticalPoint(name.to_string()))
    }

    pub fn w_point(&self, name: &str) -> Result<&CriticalPoint, SetupError> {
        self.morse_w
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| SetupError::UnknownCriticalPoint(name.to_string()))
    }

    /// Both lifts of every critical point of f_Σ.
    pub fn lifted_points(&self) -> Vec<LiftedCriticalPoint> {
        self.morse_sigma
            .iter()
            .flat_map(|p| {
                [FibreFlag::Check, FibreFlag::Hat]
                    .into_iter()
                    .map(|f| LiftedCriticalPoint::new(p.clone(), f))
            })
            .collect()
    }
}

/// Every integer vector with coefficients in [-bound, bound], in lexicographic order.
pub fn lattice_box(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(rank)];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-bound..=bound).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Reads and validates a setup file.
pub fn load_setup(path: impl AsRef<Path>) -> Result<SetupDescriptor, SetupError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| SetupError::Io(format!("{}: {e}", path.display())))?;
    SetupDescriptor::from_json_str(&text)
}

/// Parses `"p/q"`, `"p"` or an integer JSON value.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let q: Rational = t.parse().ok()?;
    Some(q)
}

/// `p/q` with `q` omitted when it is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn rational_to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn resolve(&self, field: &str) -> Result<Rational, SetupError> {
        match self {
            RawRational::Int(v) => Ok(int(*v)),
            RawRational::Text(s) => parse_rational(s)
                .ok_or_else(|| SetupError::Parse(format!("{field}: `{s}` is not a rational"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    #[serde(default)]
    generators: Vec<String>,
    #[serde(default)]
    omega: Vec<RawRational>,
    #[serde(default)]
    c1: Vec<i64>,
    #[serde(default)]
    sigma_intersection: Option<Vec<i64>>,
}

impl RawLattice {
    fn resolve(self, label: &str) -> Result<HomologyLattice, SetupError> {
        let omega = self
            .omega
            .iter()
            .map(|w| w.resolve(&format!("{label}.omega")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomologyLattice {
            generator_names: self.generators,
            omega,
            c1: self.c1,
            sigma_intersection: self.sigma_intersection,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: String,
    index: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    #[serde(default)]
    name: Option<String>,
    n: u32,
    tau_x: RawRational,
    k_const: RawRational,
    t0: RawRational,
    lattice_sigma: RawLattice,
    lattice_x: RawLattice,
    morse_sigma: Vec<RawPoint>,
    morse_w: Vec<RawPoint>,
    #[serde(default)]
    min_chern_sigma: Option<u64>,
    #[serde(default)]
    x_classes_from_sigma: bool,
}

impl RawSetup {
    fn into_setup(self) -> Result<SetupDescriptor, SetupError> {
        let points = |raw: Vec<RawPoint>, ambient| {
            raw.into_iter()
                .map(|p| CriticalPoint::new(p.name, p.index, ambient))
                .collect()
        };
        Ok(SetupDescriptor {
            name: self.name,
            n: self.n,
            tau_x: self.tau_x.resolve("tau_x")?,
            k_const: self.k_const.resolve("k_const")?,
            t0: self.t0.resolve("t0")?,
            lattice_sigma: self.lattice_sigma.resolve("lattice_sigma")?,
            lattice_x: self.lattice_x.resolve("lattice_x")?,
            morse_sigma: points(self.morse_sigma, Ambient::Sigma),
            morse_w: points(self.morse_w, Ambient::W),
            min_chern_sigma: self.min_chern_sigma,
            x_classes_from_sigma: self.x_classes_from_sigma,
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// X = CP², Σ a line: c₁(TCP²) = 3H, c₁(TCP¹) = 2[pt]·[CP¹] = 2.
    pub const CP2: &str = r#"{
        "name": "cp2",
        "n": 2, "tau_x": 3, "k_const": 1, "t0": 1,
        "lattice_sigma": {"generators": ["L"], "omega": [1], "c1": [2]},
        "lattice_x": {"generators": ["H"], "omega": [1], "c1": [3], "sigma_intersection": [1]},
        "morse_sigma": [{"name": "m", "index": 0}, {"name": "M", "index": 2}],
        "morse_w": [{"name": "x0", "index": 0}],
        "x_classes_from_sigma": true
    }"#;

    /// τ_X = 2, K = 1, where index-zero augmentation planes exist.
    pub const TAU2: &str = r#"{
        "name": "tau2",
        "n": 2, "tau_x": 2, "k_const": 1, "t0": 1,
        "lattice_sigma": {"generators": ["S"], "omega": [2], "c1": [2]},
        "lattice_x": {"generators": ["B"], "omega": [1], "c1": [2], "sigma_intersection": [1]},
        "morse_sigma": [{"name": "m", "index": 0}, {"name": "M", "index": 2}],
        "morse_w": [{"name": "x0", "index": 0}]
    }"#;

    /// Rank-two X-lattice with two classes of the same area.
    pub const CP2_RANK2: &str = r#"{
        "n": 2, "tau_x": 3, "k_const": 1, "t0": 1,
        "lattice_sigma": {"generators": ["L"], "omega": [1], "c1": [2]},
        "lattice_x": {"generators": ["H", "T"], "omega": [1, 0], "c1": [3, 0], "sigma_intersection": [1, 0]},
        "morse_sigma": [{"name": "m", "index": 0}, {"name": "M", "index": 2}],
        "morse_w": [{"name": "x0", "index": 0}]
    }"#;

    pub const RANK0: &str = r#"{
        "n": 2, "tau_x": 3, "k_const": 1, "t0": 1,
        "lattice_sigma": {},
        "lattice_x": {"sigma_intersection": []},
        "morse_sigma": [{"name": "m", "index": 0}],
        "morse_w": [{"name": "x0", "index": 0}]
    }"#;

    pub fn cp2() -> SetupDescriptor {
        SetupDescriptor::from_json_str(CP2).unwrap()
    }

    pub fn tau2() -> SetupDescriptor {
        SetupDescriptor::from_json_str(TAU2).unwrap()
    }
}

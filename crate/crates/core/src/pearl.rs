//! Dimension formulas for chains of pearls and for cascade moduli spaces,
//! the multiplicity balance along a level, and augmentation-plane indices.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::grading::{Generator, GeneratorKind};
use crate::setup::{
    format_rational, int, lattice_box, rational_to_i64, Ambient, CriticalPoint, SetupDescriptor,
    SetupError,
};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PearlError {
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("degree difference {0} is not an integer")]
    NonIntegerDegreeDifference(String),
    #[error("class has omega = {0} <= 0")]
    NonPositiveArea(String),
    #[error("class is not divisible by the covering degree {0}")]
    NotAMultiple(u32),
    #[error(transparent)]
    Setup(#[from] SetupError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PearlVariant {
    /// A chain of pearls in Σ from q to p.
    InSigma { q: CriticalPoint, p: CriticalPoint },
    /// A chain of pearls in Σ preceded by a sphere of class B in X through
    /// the descending manifold of x.
    WithSphereInX {
        x: CriticalPoint,
        p: CriticalPoint,
        b: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PearlChainSpec {
    pub variant: PearlVariant,
    /// One Σ-class per sphere.
    pub classes_a: Vec<Vec<i64>>,
    /// Number of augmentation marked points.
    pub aug_count_k: u32,
    /// Empty for plain marked points, else one X-class per marked point.
    pub aug_classes: Vec<Vec<i64>>,
}

/// A dimension together with the terms that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub formula: &'static str,
    pub terms: Vec<(String, i64)>,
    pub value: i64,
}

impl Dimension {
    fn from_terms(formula: &'static str, terms: Vec<(String, i64)>) -> Self {
        let value = terms.iter().map(|(_, v)| v).sum();
        Dimension {
            formula,
            terms,
            value,
        }
    }
}

fn expect_ambient(p: &CriticalPoint, ambient: Ambient, setup: &SetupDescriptor) -> Result<(), PearlError> {
    let list = match ambient {
        Ambient::Sigma => &setup.morse_sigma,
        Ambient::W => &setup.morse_w,
    };
    if p.ambient != ambient || !list.contains(p) {
        return Err(PearlError::VariantMismatch(format!(
            "`{}` is not a critical point on {}",
            p.name,
            match ambient {
                Ambient::Sigma => "Sigma",
                Ambient::W => "W",
            }
        )));
    }
    Ok(())
}

/// Σ 2⟨c₁(TX), B_j⟩ − 2 B_j•Σ over the augmentation classes.
fn augmentation_sum(setup: &SetupDescriptor, classes: &[Vec<i64>]) -> Result<i64, PearlError> {
    let mut total = 0;
    for b in classes {
        total += 2 * setup.lattice_x.c1_of(b)? - 2 * setup.lattice_x.sigma_dot(b)?;
    }
    Ok(total)
}

/// Dimension of a moduli space of simple chains of pearls, in whichever of
/// the four forms the spec selects.
pub fn pearl_dimension(setup: &SetupDescriptor, spec: &PearlChainSpec) -> Result<Dimension, PearlError> {
    let n_spheres = spec.classes_a.len() as i64;
    let mut c1_a = 0;
    for a in &spec.classes_a {
        c1_a += 2 * setup.lattice_sigma.c1_of(a)?;
    }
    let augmented = !spec.aug_classes.is_empty();
    if augmented && spec.aug_classes.len() != spec.aug_count_k as usize {
        return Err(PearlError::VariantMismatch(format!(
            "{} augmentation classes for k = {}",
            spec.aug_classes.len(),
            spec.aug_count_k
        )));
    }
    let marked = if augmented {
        ("sum(2c1(B_j) - 2B_j.Sigma)".to_string(), augmentation_sum(setup, &spec.aug_classes)?)
    } else {
        ("2k".to_string(), 2 * spec.aug_count_k as i64)
    };
    match &spec.variant {
        PearlVariant::InSigma { q, p } => {
            expect_ambient(q, Ambient::Sigma, setup)?;
            expect_ambient(p, Ambient::Sigma, setup)?;
            let formula = if augmented {
                "augmented chain of pearls in Sigma"
            } else {
                "chain of pearls in Sigma"
            };
            Ok(Dimension::from_terms(
                formula,
                vec![
                    ("M(p)".into(), p.morse_index as i64),
                    ("sum 2c1(A_i)".into(), c1_a),
                    ("-M(q)".into(), -(q.morse_index as i64)),
                    ("N-1".into(), n_spheres - 1),
                    marked,
                ],
            ))
        }
        PearlVariant::WithSphereInX { x, p, b } => {
            expect_ambient(x, Ambient::W, setup)?;
            expect_ambient(p, Ambient::Sigma, setup)?;
            if b.iter().all(|&c| c == 0) {
                return Err(PearlError::VariantMismatch("the sphere in X needs B != 0".into()));
            }
            if n_spheres == 0 {
                return Err(PearlError::VariantMismatch("a chain with a sphere in X needs N >= 1".into()));
            }
            let sphere = 2 * (setup.lattice_x.c1_of(b)? - setup.lattice_x.sigma_dot(b)?);
            let formula = if augmented {
                "augmented chain of pearls with a sphere in X"
            } else {
                "chain of pearls with a sphere in X"
            };
            Ok(Dimension::from_terms(
                formula,
                vec![
                    ("M(p)".into(), p.morse_index as i64),
                    ("sum 2c1(A_i)".into(), c1_a),
                    ("2(c1(B) - B.Sigma)".into(), sphere),
                    ("M(x)".into(), x.morse_index as i64),
                    ("-2(n-1)".into(), -2 * (setup.n as i64 - 1)),
                    ("N-1".into(), n_spheres - 1),
                    marked,
                ],
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeKind {
    ZeroCascades,
    YtoY { n: u32 },
    WtoY { n: u32 },
}

fn integer_gap(upper: &Generator, lower: &Generator) -> Result<i64, PearlError> {
    let gap = &upper.grading - &lower.grading;
    rational_to_i64(&gap).ok_or_else(|| PearlError::NonIntegerDegreeDifference(format_rational(&gap)))
}

/// Dimension of the cascade moduli space between `lower` and `upper`.
pub fn cascade_dimension(
    kind: CascadeKind,
    upper: &Generator,
    lower: &Generator,
) -> Result<Dimension, PearlError> {
    let gap = integer_gap(upper, lower)?;
    match kind {
        CascadeKind::ZeroCascades => {
            match (&upper.kind, &lower.kind) {
                (GeneratorKind::Orbit { k: a, .. }, GeneratorKind::Orbit { k: b, .. }) if a == b => {}
                (GeneratorKind::Interior { .. }, GeneratorKind::Interior { .. }) => {}
                _ => {
                    return Err(PearlError::VariantMismatch(
                        "zero-level cascades join generators of one multiplicity".into(),
                    ))
                }
            }
            Ok(Dimension::from_terms("N = 0", vec![("|y| - |x|".into(), gap)]))
        }
        CascadeKind::YtoY { n } => {
            if !upper.is_orbit() || !lower.is_orbit() || n == 0 {
                return Err(PearlError::VariantMismatch("Y-to-Y cascades need two orbits and N >= 1".into()));
            }
            Ok(Dimension::from_terms(
                "Y to Y",
                vec![("|y| - |x|".into(), gap), ("N-1".into(), n as i64 - 1)],
            ))
        }
        CascadeKind::WtoY { n } => {
            if !upper.is_orbit() || lower.is_orbit() || n == 0 {
                return Err(PearlError::VariantMismatch(
                    "W-to-Y cascades go from an interior point to an orbit with N >= 1".into(),
                ));
            }
            Ok(Dimension::from_terms(
                "W to Y",
                vec![("|y| - |x|".into(), gap), ("N".into(), n as i64)],
            ))
        }
    }
}

/// k₊ − k₋ − Σ k_j = K ω(A).
pub fn multiplicity_balance(
    setup: &SetupDescriptor,
    a: &[i64],
    k_plus: u32,
    k_minus: u32,
    aug_multiplicities: &[u32],
) -> Result<bool, PearlError> {
    let omega = setup.lattice_sigma.omega_of(a)?;
    let lhs = k_plus as i64 - k_minus as i64 - aug_multiplicities.iter().map(|&m| m as i64).sum::<i64>();
    Ok(int(lhs) == &setup.k_const * omega)
}

/// Fredholm index 2(⟨c₁(TX), B⟩ − B•Σ − 1) of a plane in class B, which is
/// the m-fold cover of a simple plane.
pub fn augmentation_index(setup: &SetupDescriptor, b: &[i64], covering_m: u32) -> Result<i64, PearlError> {
    let omega = setup.lattice_x.omega_of(b)?;
    if !omega.is_positive() {
        return Err(PearlError::NonPositiveArea(format_rational(&omega)));
    }
    if covering_m == 0 || b.iter().any(|&c| c % covering_m as i64 != 0) {
        return Err(PearlError::NotAMultiple(covering_m));
    }
    let index = 2 * (setup.lattice_x.c1_of(b)? - setup.lattice_x.sigma_dot(b)? - 1);
    debug_assert!(index >= 0 && index >= 2 * (covering_m as i64 - 1));
    Ok(index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChernGateReport {
    /// Minimal Chern number of Σ is at least 2 and X-classes come from Σ.
    pub hypotheses_hold: bool,
    pub classes_checked: usize,
    /// Classes with 0 < ω(B) ≤ bound whose plane would be rigid.
    pub rigid_classes: Vec<Vec<i64>>,
}

impl ChernGateReport {
    /// The gate passes unless its hypotheses hold and a rigid class exists.
    pub fn passes(&self) -> bool {
        !self.hypotheses_hold || self.rigid_classes.is_empty()
    }
}

/// Scans X-classes in the coefficient box [−coeff_bound, coeff_bound] with
/// 0 < ω(B) ≤ omega_bound for index-zero augmentation planes.
pub fn chern_gate(
    setup: &SetupDescriptor,
    omega_bound: &Rational,
    coeff_bound: i64,
) -> Result<ChernGateReport, PearlError> {
    let hypotheses_hold = setup.x_classes_from_sigma
        && setup.effective_min_chern_sigma().is_none_or(|m| m >= 2);
    let mut checked = 0;
    let mut rigid = Vec::new();
    for b in lattice_box(setup.lattice_x.rank(), coeff_bound) {
        let omega = setup.lattice_x.omega_of(&b)?;
        if !omega.is_positive() || &omega > omega_bound {
            continue;
        }
        checked += 1;
        if augmentation_index(setup, &b, 1)?.is_zero() {
            rigid.push(b);
        }
    }
    Ok(ChernGateReport {
        hypotheses_hold,
        classes_checked: checked,
        rigid_classes: rigid,
    })
}

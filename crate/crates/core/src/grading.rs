//! Generators of the split chain complex and their exact rational gradings.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::setup::{
    format_rational, int, Ambient, CriticalPoint, FibreFlag, LiftedCriticalPoint, SetupDescriptor,
    SetupError,
};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GradingError {
    #[error("unknown critical point `{0}`")]
    UnknownCriticalPoint(String),
    #[error("multiplicity k must be at least 1")]
    ZeroMultiplicity,
    #[error("cap class meets the divisor {got} times, expected k = {expected}")]
    CapMismatch { expected: u32, got: i64 },
    #[error("cannot parse generator name `{0}` (expected <x>, <p>.check_<k> or <p>.hat_<k>)")]
    BadGeneratorName(String),
    #[error(transparent)]
    Setup(#[from] SetupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// A critical point of f_Y on the k-th orbit family.
    Orbit { point: LiftedCriticalPoint, k: u32 },
    /// A critical point of f_W.
    Interior { point: CriticalPoint },
}

impl GeneratorKind {
    pub fn orbit(base: CriticalPoint, flag: FibreFlag, k: u32) -> Self {
        GeneratorKind::Orbit {
            point: LiftedCriticalPoint::new(base, flag),
            k,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GeneratorKind::Orbit { point, k } => format!("{}_{k}", point.name()),
            GeneratorKind::Interior { point } => point.name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub grading: Rational,
}

impl Generator {
    pub fn name(&self) -> String {
        self.kind.name()
    }

    pub fn is_orbit(&self) -> bool {
        matches!(self.kind, GeneratorKind::Orbit { .. })
    }

    pub fn multiplicity(&self) -> Option<u32> {
        match &self.kind {
            GeneratorKind::Orbit { k, .. } => Some(*k),
            GeneratorKind::Interior { .. } => None,
        }
    }

    /// M̃ for orbit generators, M for interior ones.
    pub fn morse_index(&self) -> u32 {
        match &self.kind {
            GeneratorKind::Orbit { point, .. } => point.lifted_index(),
            GeneratorKind::Interior { point } => point.morse_index,
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            GeneratorKind::Orbit { .. } => "orbit",
            GeneratorKind::Interior { .. } => "interior",
        }
    }

    fn sort_key(&self) -> (&Rational, u8, String, u32) {
        match &self.kind {
            GeneratorKind::Interior { point } => (&self.grading, 0, point.name.clone(), 0),
            GeneratorKind::Orbit { point, k } => (&self.grading, 1, point.name(), *k),
        }
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (deg {})", self.name(), format_rational(&self.grading))
    }
}

fn check_point(setup: &SetupDescriptor, point: &CriticalPoint) -> Result<(), GradingError> {
    let list = match point.ambient {
        Ambient::Sigma => &setup.morse_sigma,
        Ambient::W => &setup.morse_w,
    };
    if list.iter().any(|p| p == point) {
        Ok(())
    } else {
        Err(GradingError::UnknownCriticalPoint(point.name.clone()))
    }
}

/// |p̃_k| = M̃(p̃) + 1 − n + 2((τ_X − K)/K)k and |x| = n − M(x).
pub fn grade(setup: &SetupDescriptor, kind: &GeneratorKind) -> Result<Rational, GradingError> {
    match kind {
        GeneratorKind::Orbit { point, k } => {
            check_point(setup, &point.base)?;
            if point.base.ambient != Ambient::Sigma {
                return Err(GradingError::UnknownCriticalPoint(point.base.name.clone()));
            }
            if *k == 0 {
                return Err(GradingError::ZeroMultiplicity);
            }
            Ok(constant_cz(setup, point) + setup.grading_slope() * int(*k as i64))
        }
        GeneratorKind::Interior { point } => {
            check_point(setup, point)?;
            Ok(int(setup.n as i64 - point.morse_index as i64))
        }
    }
}

/// CZ₀(p̃_k) = M̃(p̃) + 1 − n, the index in the constant trivialization.
pub fn constant_cz(setup: &SetupDescriptor, point: &LiftedCriticalPoint) -> Rational {
    int(point.lifted_index() as i64 + 1 - setup.n as i64)
}

pub fn generator(setup: &SetupDescriptor, kind: GeneratorKind) -> Result<Generator, GradingError> {
    let grading = grade(setup, &kind)?;
    Ok(Generator { kind, grading })
}

/// |γ|₀ = −2 + 2((τ_X − K)/K)k for the k-fold fibre.
pub fn grade_reeb(setup: &SetupDescriptor, k: u32) -> Result<Rational, GradingError> {
    if k == 0 {
        return Err(GradingError::ZeroMultiplicity);
    }
    Ok(int(-2) + setup.grading_slope() * int(k as i64))
}

/// CZ in the trivialization induced by a capping sphere B with B•Σ = k.
pub fn cz_cap(
    setup: &SetupDescriptor,
    p_tilde: &LiftedCriticalPoint,
    k: u32,
    b: &[i64],
) -> Result<Rational, GradingError> {
    let dot = setup.lattice_x.sigma_dot(b)?;
    if k == 0 {
        return Err(GradingError::ZeroMultiplicity);
    }
    if dot != k as i64 {
        return Err(GradingError::CapMismatch { expected: k, got: dot });
    }
    let c1 = setup.lattice_x.c1_of(b)?;
    Ok(constant_cz(setup, p_tilde) - int(2 * k as i64) + int(2 * c1))
}

/// Every interior generator and every orbit generator with k ≤ k_max, sorted.
pub fn enumerate_generators(
    setup: &SetupDescriptor,
    k_max: u32,
) -> Result<Vec<Generator>, GradingError> {
    if k_max == 0 {
        return Err(GradingError::ZeroMultiplicity);
    }
    let mut out = Vec::new();
    for x in &setup.morse_w {
        out.push(generator(setup, GeneratorKind::Interior { point: x.clone() })?);
    }
    for k in 1..=k_max {
        for lift in setup.lifted_points() {
            out.push(generator(setup, GeneratorKind::Orbit { point: lift, k })?);
        }
    }
    out.sort();
    Ok(out)
}

/// Resolves `x`, `p.check_k` or `p.hat_k` against the setup.
pub fn parse_generator(setup: &SetupDescriptor, name: &str) -> Result<Generator, GradingError> {
    let bad = || GradingError::BadGeneratorName(name.to_string());
    if let Some((base, rest)) = name.split_once('.') {
        let (flag, k) = rest.split_once('_').ok_or_else(bad)?;
        let flag = match flag {
            "check" => FibreFlag::Check,
            "hat" => FibreFlag::Hat,
            _ => return Err(bad()),
        };
        let k: u32 = k.parse().map_err(|_| bad())?;
        let point = setup
            .sigma_point(base)
            .map_err(|_| GradingError::UnknownCriticalPoint(base.to_string()))?
            .clone();
        generator(setup, GeneratorKind::orbit(point, flag, k))
    } else {
        let point = setup
            .w_point(name)
            .map_err(|_| GradingError::UnknownCriticalPoint(name.to_string()))?
            .clone();
        generator(setup, GeneratorKind::Interior { point })
    }
}

/// The fractional part of a grading, in [0, 1).
pub fn coset_label(grading: &Rational) -> Rational {
    grading - grading.floor()
}

/// Whether the differential may connect the two generators at all.
pub fn integer_gap(a: &Generator, b: &Generator) -> bool {
    (&a.grading - &b.grading).is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setup::fixtures::*;
    use proptest::prelude::*;

    fn orbit(setup: &SetupDescriptor, base: &str, flag: FibreFlag, k: u32) -> GeneratorKind {
        GeneratorKind::orbit(setup.sigma_point(base).unwrap().clone(), flag, k)
    }

    #[test]
    fn cp2_gradings() {
        let s = cp2();
        assert_eq!(grade(&s, &orbit(&s, "m", FibreFlag::Check, 1)).unwrap(), int(3));
        assert_eq!(grade(&s, &orbit(&s, "M", FibreFlag::Hat, 2)).unwrap(), int(10));
        let x0 = GeneratorKind::Interior {
            point: s.w_point("x0").unwrap().clone(),
        };
        assert_eq!(grade(&s, &x0).unwrap(), int(2));
        let ghost = GeneratorKind::Interior {
            point: CriticalPoint::new("ghost", 0, Ambient::W),
        };
        assert_eq!(
            grade(&s, &ghost),
            Err(GradingError::UnknownCriticalPoint("ghost".into()))
        );
    }

    #[test]
    fn reeb_gradings() {
        let s = cp2();
        assert_eq!(grade_reeb(&s, 1).unwrap(), int(2));
        let t = SetupDescriptor::from_json_str(TAU2).unwrap();
        assert_eq!(grade_reeb(&t, 1).unwrap(), int(0));
        for k in 1..10 {
            let check = grade(&s, &orbit(&s, "m", FibreFlag::Check, k)).unwrap();
            assert_eq!(grade_reeb(&s, k).unwrap(), check - int(1));
        }
    }

    #[test]
    fn capping_index() {
        let s = cp2();
        let m = LiftedCriticalPoint::new(s.sigma_point("m").unwrap().clone(), FibreFlag::Check);
        assert_eq!(cz_cap(&s, &m, 1, &[1]).unwrap(), int(3));
        assert_eq!(
            cz_cap(&s, &m, 1, &[2]),
            Err(GradingError::CapMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn cap_independence_on_rank_two() {
        let s = SetupDescriptor::from_json_str(CP2_RANK2).unwrap();
        let m = LiftedCriticalPoint::new(s.sigma_point("M").unwrap().clone(), FibreFlag::Hat);
        for k in 1..4u32 {
            let base = cz_cap(&s, &m, k, &[k as i64, 0]).unwrap();
            for t in -3..=3 {
                assert_eq!(cz_cap(&s, &m, k, &[k as i64, t]).unwrap(), base);
            }
            let g = grade(&s, &GeneratorKind::Orbit { point: m.clone(), k }).unwrap();
            assert_eq!(base, g);
        }
    }

    #[test]
    fn generator_table() {
        let text = CP2.replace(", {\"name\": \"M\", \"index\": 2}", "");
        let s = SetupDescriptor::from_json_str(&text).unwrap();
        let gens = enumerate_generators(&s, 1).unwrap();
        let names: Vec<(String, Rational)> = gens.iter().map(|g| (g.name(), g.grading.clone())).collect();
        assert_eq!(
            names,
            vec![
                ("x0".to_string(), int(2)),
                ("m.check_1".to_string(), int(3)),
                ("m.hat_1".to_string(), int(4)),
            ]
        );
        assert_eq!(enumerate_generators(&s, 0), Err(GradingError::ZeroMultiplicity));
        let full = enumerate_generators(&cp2(), 3).unwrap();
        assert_eq!(full.len(), 1 + 2 * 2 * 3);
    }

    #[test]
    fn names_round_trip() {
        let s = cp2();
        for g in enumerate_generators(&s, 3).unwrap() {
            assert_eq!(parse_generator(&s, &g.name()).unwrap(), g);
        }
        assert!(matches!(
            parse_generator(&s, "m.top_1"),
            Err(GradingError::BadGeneratorName(_))
        ));
        assert!(matches!(
            parse_generator(&s, "q.hat_1"),
            Err(GradingError::UnknownCriticalPoint(_))
        ));
    }

    #[test]
    fn fractional_cosets() {
        let s = SetupDescriptor::from_json_str(
            r#"{
                "n": 2, "tau_x": 2, "k_const": "3/2", "t0": 1,
                "lattice_sigma": {"generators": ["L"], "omega": [2], "c1": [1]},
                "lattice_x": {"generators": ["H"], "omega": [2], "c1": [4], "sigma_intersection": [3]},
                "morse_sigma": [{"name": "m", "index": 0}],
                "morse_w": [{"name": "x0", "index": 0}]
            }"#,
        )
        .unwrap();
        let third = |p: i64| Rational::new(p.into(), 3.into());
        assert_eq!(s.grading_slope(), third(2));
        let gens = enumerate_generators(&s, 3).unwrap();
        let find = |n: &str| gens.iter().find(|g| g.name() == n).unwrap();
        assert_eq!(find("m.check_1").grading, third(-1));
        assert!(!integer_gap(find("m.check_1"), find("x0")));
        assert!(integer_gap(find("m.check_3"), find("x0")));
        assert_eq!(coset_label(&find("m.check_1").grading), third(2));
        assert_eq!(coset_label(&find("m.hat_2").grading), third(1));
    }

    proptest! {
        #[test]
        fn constant_trivialization_split(k in 1u32..40) {
            let s = cp2();
            for lift in s.lifted_points() {
                let g = grade(&s, &GeneratorKind::Orbit { point: lift.clone(), k }).unwrap();
                prop_assert_eq!(g - constant_cz(&s, &lift), s.grading_slope() * int(k as i64));
            }
        }
    }
}

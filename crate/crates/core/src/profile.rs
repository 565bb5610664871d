//! Radial Hamiltonian profiles h(ρ), orbit levels and Hamiltonian actions.
//!
//! This is the one floating-point corner of the crate. Roots are located by
//! bisection run down to adjacent floats, which is well inside the 1e-12
//! absolute tolerance the downstream checks use.

use std::fmt;
use std::sync::Arc;

use evalexpr::{ContextWithMutableVariables, HashMapContext, Node, Value};
use num_traits::Float;
use thiserror::Error;

/// h vanishes on ρ ≤ 2.
pub const DOMAIN_FLOOR: f64 = 2.0;

/// Upper end of the admissibility sampling grid.
pub const SAMPLE_CEILING: f64 = 1_048_576.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("h' stays below {target} up to rho = 2^64 (no bracket for k = {k})")]
    NoBracket { k: u32, target: f64 },
    #[error("h' decreases between rho = {lo} and rho = {hi}")]
    NonMonotone { lo: f64, hi: f64 },
    #[error("multiplicity k must be at least 1")]
    ZeroMultiplicity,
    #[error("T0 must be positive and finite")]
    InvalidPeriod,
    #[error("power profile exponent must be at least 2, got {0}")]
    InvalidExponent(f64),
    #[error("bad profile expression: {0}")]
    Expression(String),
    #[error("unknown profile `{0}` (expected quadratic, power:<p> or expr:<h>;<h'>;<h''>)")]
    UnknownProfile(String),
}

/// A radial profile together with its first two derivatives.
pub trait Profile<F: Float>: Send + Sync {
    fn h(&self, rho: F) -> F;
    fn h_prime(&self, rho: F) -> F;
    fn h_double_prime(&self, rho: F) -> F;

    fn describe(&self) -> String {
        "custom".to_string()
    }
}

impl<F: Float, P: Profile<F> + ?Sized> Profile<F> for Box<P> {
    fn h(&self, rho: F) -> F {
        (**self).h(rho)
    }
    fn h_prime(&self, rho: F) -> F {
        (**self).h_prime(rho)
    }
    fn h_double_prime(&self, rho: F) -> F {
        (**self).h_double_prime(rho)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

fn floor<F: Float>() -> F {
    F::from(DOMAIN_FLOOR).unwrap()
}

/// h(ρ) = (ρ − 2)^p on ρ > 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile<F> {
    exponent: F,
}

impl<F: Float> PowerProfile<F> {
    pub fn new(exponent: F) -> Result<Self, ProfileError> {
        if !(exponent >= F::from(2).unwrap()) || !exponent.is_finite() {
            return Err(ProfileError::InvalidExponent(exponent.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(PowerProfile { exponent })
    }

    pub fn quadratic() -> Self {
        PowerProfile {
            exponent: F::from(2).unwrap(),
        }
    }

    pub fn exponent(&self) -> F {
        self.exponent
    }
}

impl<F: Float + Send + Sync> Profile<F> for PowerProfile<F> {
    fn h(&self, rho: F) -> F {
        if rho <= floor() {
            return F::zero();
        }
        (rho - floor()).powf(self.exponent)
    }

    fn h_prime(&self, rho: F) -> F {
        if rho <= floor() {
            return F::zero();
        }
        self.exponent * (rho - floor()).powf(self.exponent - F::one())
    }

    fn h_double_prime(&self, rho: F) -> F {
        if rho <= floor() {
            return F::zero();
        }
        let p = self.exponent;
        p * (p - F::one()) * (rho - floor()).powf(p - F::from(2).unwrap())
    }

    fn describe(&self) -> String {
        let p = self.exponent.to_f64().unwrap_or(f64::NAN);
        if p == 2.0 {
            "quadratic".to_string()
        } else {
            format!("power:{p}")
        }
    }
}

type Evaluator<F> = Arc<dyn Fn(F) -> F + Send + Sync>;

/// A profile given by three closures, evaluated on the whole line.
#[derive(Clone)]
pub struct FnProfile<F> {
    name: String,
    h: Evaluator<F>,
    h_prime: Evaluator<F>,
    h_double_prime: Evaluator<F>,
}

impl<F> FnProfile<F> {
    pub fn new(
        name: impl Into<String>,
        h: impl Fn(F) -> F + Send + Sync + 'static,
        h_prime: impl Fn(F) -> F + Send + Sync + 'static,
        h_double_prime: impl Fn(F) -> F + Send + Sync + 'static,
    ) -> Self {
        FnProfile {
            name: name.into(),
            h: Arc::new(h),
            h_prime: Arc::new(h_prime),
            h_double_prime: Arc::new(h_double_prime),
        }
    }
}

impl<F> fmt::Debug for FnProfile<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnProfile").field("name", &self.name).finish()
    }
}

impl<F: Float> Profile<F> for FnProfile<F> {
    fn h(&self, rho: F) -> F {
        (self.h)(rho)
    }
    fn h_prime(&self, rho: F) -> F {
        (self.h_prime)(rho)
    }
    fn h_double_prime(&self, rho: F) -> F {
        (self.h_double_prime)(rho)
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// A profile parsed from three expressions in the variable `rho`.
///
/// The expressions describe ρ > 2; the profile is identically zero below.
#[derive(Debug, Clone)]
pub struct ExprProfile {
    source: [String; 3],
    nodes: [Node; 3],
}

impl ExprProfile {
    pub fn parse(h: &str, h_prime: &str, h_double_prime: &str) -> Result<Self, ProfileError> {
        let build = |s: &str| {
            evalexpr::build_operator_tree(s).map_err(|e| ProfileError::Expression(format!("`{s}`: {e}")))
        };
        let profile = ExprProfile {
            source: [h.to_string(), h_prime.to_string(), h_double_prime.to_string()],
            nodes: [build(h)?, build(h_prime)?, build(h_double_prime)?],
        };
        for node in &profile.nodes {
            profile
                .try_eval(node, 3.0)
                .map_err(ProfileError::Expression)?;
        }
        Ok(profile)
    }

    fn try_eval(&self, node: &Node, rho: f64) -> Result<f64, String> {
        let mut ctx = HashMapContext::new();
        ctx.set_value("rho".into(), Value::Float(rho))
            .map_err(|e| e.to_string())?;
        node.eval_number_with_context(&ctx).map_err(|e| e.to_string())
    }

    fn eval(&self, which: usize, rho: f64) -> f64 {
        if rho <= DOMAIN_FLOOR {
            return 0.0;
        }
        self.try_eval(&self.nodes[which], rho).unwrap_or(f64::NAN)
    }
}

impl Profile<f64> for ExprProfile {
    fn h(&self, rho: f64) -> f64 {
        self.eval(0, rho)
    }
    fn h_prime(&self, rho: f64) -> f64 {
        self.eval(1, rho)
    }
    fn h_double_prime(&self, rho: f64) -> f64 {
        self.eval(2, rho)
    }
    fn describe(&self) -> String {
        format!("expr:{};{};{}", self.source[0], self.source[1], self.source[2])
    }
}

/// Parses `quadratic`, `power:<p>` or `expr:<h>;<h'>;<h''>`.
pub fn parse_profile(spec: &str) -> Result<Box<dyn Profile<f64>>, ProfileError> {
    let spec = spec.trim();
    if spec == "quadratic" {
        return Ok(Box::new(PowerProfile::<f64>::quadratic()));
    }
    if let Some(p) = spec.strip_prefix("power:") {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| ProfileError::UnknownProfile(spec.to_string()))?;
        return Ok(Box::new(PowerProfile::new(p)?));
    }
    if let Some(body) = spec.strip_prefix("expr:") {
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 3 {
            return Err(ProfileError::Expression(
                "expected three expressions separated by ';'".to_string(),
            ));
        }
        return Ok(Box::new(ExprProfile::parse(parts[0], parts[1], parts[2])?));
    }
    Err(ProfileError::UnknownProfile(spec.to_string()))
}

/// The Morse–Bott family of k-fold orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitLevel<F> {
    pub k: u32,
    /// log of `rho_k`.
    pub b_k: F,
    pub rho_k: F,
    pub action: F,
    /// The constant C = h''(ρ_k)·ρ_k of the vertical asymptotic operator.
    pub vertical_c: F,
}

/// Solves h'(ρ) = k·T0 on ρ > 2 and evaluates the action there.
pub fn orbit_level<F: Float, P: Profile<F> + ?Sized>(
    profile: &P,
    k: u32,
    t0: F,
) -> Result<OrbitLevel<F>, ProfileError> {
    if k == 0 {
        return Err(ProfileError::ZeroMultiplicity);
    }
    if !(t0 > F::zero()) || !t0.is_finite() {
        return Err(ProfileError::InvalidPeriod);
    }
    let target = F::from(k).unwrap() * t0;
    let two = F::from(2).unwrap();
    let ceiling = two.powi(64);
    let to64 = |v: F| v.to_f64().unwrap_or(f64::NAN);

    let mut lo = floor::<F>();
    let mut lo_val = profile.h_prime(lo);
    let mut hi = lo * two;
    loop {
        let v = profile.h_prime(hi);
        if v < lo_val {
            return Err(ProfileError::NonMonotone { lo: to64(lo), hi: to64(hi) });
        }
        if v >= target {
            break;
        }
        lo = hi;
        lo_val = v;
        hi = hi * two;
        if hi > ceiling {
            return Err(ProfileError::NoBracket { k, target: to64(target) });
        }
    }

    for _ in 0..4096 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if profile.h_prime(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = if (profile.h_prime(lo) - target).abs() <= (profile.h_prime(hi) - target).abs() {
        lo
    } else {
        hi
    };

    Ok(OrbitLevel {
        k,
        b_k: rho.ln(),
        rho_k: rho,
        action: rho * profile.h_prime(rho) - profile.h(rho),
        vertical_c: profile.h_double_prime(rho) * rho,
    })
}

/// Which admissibility condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    FlatBelowFloor,
    PositiveSlope,
    PositiveCurvature,
    SlopeMatchesFiniteDifference,
    CurvatureMatchesFiniteDifference,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::FlatBelowFloor => "h(rho) != 0 for rho <= 2",
            Condition::PositiveSlope => "h' > 0 fails",
            Condition::PositiveCurvature => "h'' > 0 fails",
            Condition::SlopeMatchesFiniteDifference => "h' disagrees with finite difference of h",
            Condition::CurvatureMatchesFiniteDifference => {
                "h'' disagrees with finite difference of h'"
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub samples: usize,
    pub violation: Option<Violation>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => f.write_str("admissible"),
            Some(v) => write!(f, "{} (at rho = {})", v.condition, v.rho),
        }
    }
}

/// Samples the flat part on [0, 2] and the convex part on a geometric grid
/// of offsets reaching 2^20, stopping at the first failed condition.
pub fn check_admissible<F: Float, P: Profile<F> + ?Sized>(
    profile: &P,
    samples: usize,
) -> AdmissibilityReport {
    let samples = samples.max(2);
    let report = |violation| AdmissibilityReport { samples, violation };
    let fail = |condition, rho: F| {
        report(Some(Violation {
            condition,
            rho: rho.to_f64().unwrap_or(f64::NAN),
        }))
    };
    let f = |v: f64| F::from(v).unwrap();
    let eps = F::epsilon();

    for i in 0..samples {
        let rho = f(DOMAIN_FLOOR * i as f64 / (samples - 1) as f64);
        if profile.h(rho).abs() > eps {
            return fail(Condition::FlatBelowFloor, rho);
        }
    }

    let rel_tol = f(1e-6).max(f(10.0) * eps.sqrt());
    let d_min = 1e-3f64;
    let d_max = SAMPLE_CEILING - DOMAIN_FLOOR;
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let d = f(d_min * (d_max / d_min).powf(t));
        let rho = floor::<F>() + d;
        let hp = profile.h_prime(rho);
        let hpp = profile.h_double_prime(rho);
        if !(hp > F::zero()) {
            return fail(Condition::PositiveSlope, rho);
        }
        if !(hpp > F::zero()) {
            return fail(Condition::PositiveCurvature, rho);
        }
        let step = eps.cbrt() * d;
        let fd1 = (profile.h(rho + step) - profile.h(rho - step)) / (f(2.0) * step);
        if (fd1 - hp).abs() > rel_tol * hp.abs() {
            return fail(Condition::SlopeMatchesFiniteDifference, rho);
        }
        let fd2 = (profile.h_prime(rho + step) - profile.h_prime(rho - step)) / (f(2.0) * step);
        if (fd2 - hpp).abs() > rel_tol * hpp.abs().max(hp.abs() / rho) {
            return fail(Condition::CurvatureMatchesFiniteDifference, rho);
        }
    }
    report(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_levels() {
        let q = PowerProfile::<f64>::quadratic();
        let l1 = orbit_level(&q, 1, 1.0).unwrap();
        assert!((l1.rho_k - 2.5).abs() < 1e-12);
        assert!((l1.action - 2.25).abs() < 1e-12);
        assert!((l1.vertical_c - 5.0).abs() < 1e-12);
        let l2 = orbit_level(&q, 2, 1.0).unwrap();
        assert!((l2.rho_k - 3.0).abs() < 1e-12);
        assert!((l2.action - 5.0).abs() < 1e-12);
        assert!((l2.b_k - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn f32_levels() {
        let q = PowerProfile::<f32>::quadratic();
        let l1 = orbit_level(&q, 1, 1.0f32).unwrap();
        assert!((l1.rho_k - 2.5).abs() < 1e-6);
    }

    #[test]
    fn admissibility_reports() {
        let q = PowerProfile::<f64>::quadratic();
        assert_eq!(check_admissible(&q, 200).to_string(), "admissible");
        let cubic = PowerProfile::<f64>::new(3.0).unwrap();
        assert!(check_admissible(&cubic, 200).is_admissible());

        let linear = FnProfile::new("rho", |r: f64| r, |_| 1.0, |_| 0.0);
        let rep = check_admissible(&linear, 50);
        assert_eq!(rep.violation.unwrap().condition, Condition::FlatBelowFloor);
        assert!(rep.to_string().starts_with("h(rho) != 0 for rho <= 2"));

        let log = FnProfile::new(
            "log",
            |r: f64| if r > 2.0 { (r - 1.0).ln() } else { 0.0 },
            |r: f64| if r > 2.0 { 1.0 / (r - 1.0) } else { 0.0 },
            |r: f64| if r > 2.0 { -1.0 / ((r - 1.0) * (r - 1.0)) } else { 0.0 },
        );
        let rep = check_admissible(&log, 50);
        assert_eq!(rep.violation.unwrap().condition, Condition::PositiveCurvature);
    }

    #[test]
    fn wrong_derivative_is_caught() {
        let bad = FnProfile::new(
            "bad",
            |r: f64| if r > 2.0 { (r - 2.0).powi(2) } else { 0.0 },
            |r: f64| if r > 2.0 { 3.0 * (r - 2.0) } else { 0.0 },
            |r: f64| if r > 2.0 { 3.0 } else { 0.0 },
        );
        let rep = check_admissible(&bad, 20);
        assert_eq!(
            rep.violation.unwrap().condition,
            Condition::SlopeMatchesFiniteDifference
        );
    }

    #[test]
    fn bounded_slope_has_no_bracket() {
        let sat = FnProfile::new(
            "sat",
            |r: f64| if r > 2.0 { r - 2.0 - (r - 2.0).ln_1p() } else { 0.0 },
            |r: f64| if r > 2.0 { 1.0 - 1.0 / (r - 1.0) } else { 0.0 },
            |r: f64| if r > 2.0 { 1.0 / ((r - 1.0) * (r - 1.0)) } else { 0.0 },
        );
        assert!(matches!(
            orbit_level(&sat, 2, 1.0),
            Err(ProfileError::NoBracket { k: 2, .. })
        ));
        assert!(orbit_level(&sat, 1, 0.5).is_ok());
    }

    #[test]
    fn decreasing_slope_is_non_monotone() {
        let dec = FnProfile::new("dec", |_r: f64| 0.0, |r: f64| 1.0 / r, |_| 0.0);
        assert!(matches!(
            orbit_level(&dec, 1, 10.0),
            Err(ProfileError::NonMonotone { .. })
        ));
    }

    #[test]
    fn parse_profiles() {
        let e = parse_profile("expr:(rho-2)^2;2*(rho-2);2").unwrap();
        let q = parse_profile("quadratic").unwrap();
        for r in [1.0, 2.5, 7.0, 100.0] {
            assert_eq!(e.h(r), q.h(r));
            assert_eq!(e.h_prime(r), q.h_prime(r));
        }
        assert!(check_admissible(&e, 100).is_admissible());
        assert_eq!(parse_profile("power:3").unwrap().describe(), "power:3");
        assert!(matches!(parse_profile("power:1.5"), Err(ProfileError::InvalidExponent(_))));
        assert!(matches!(parse_profile("cubic"), Err(ProfileError::UnknownProfile(_))));
        assert!(matches!(parse_profile("expr:rho;1"), Err(ProfileError::Expression(_))));
        assert!(matches!(parse_profile("expr:rho+;1;0"), Err(ProfileError::Expression(_))));
    }

    proptest! {
        #[test]
        fn levels_are_monotone_and_graphical(p in 2.0f64..6.0, t0 in 0.1f64..5.0, k in 1u32..30) {
            let prof = PowerProfile::new(p).unwrap();
            let a = orbit_level(&prof, k, t0).unwrap();
            let b = orbit_level(&prof, k + 1, t0).unwrap();
            prop_assert!(b.rho_k > a.rho_k);
            prop_assert!(b.action > a.action);
            prop_assert!(a.action > 0.0 && a.vertical_c > 0.0);
            let target = k as f64 * t0;
            prop_assert!((prof.h_prime(a.rho_k) - target).abs() <= 1e-11 * target.max(1.0));
            let intercept = prof.h(a.rho_k) - a.rho_k * prof.h_prime(a.rho_k);
            prop_assert!((a.action + intercept).abs() <= 1e-9 * a.action.max(1.0));
        }
    }
}

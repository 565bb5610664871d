//! Spectra, eigenvector windings and perturbed Conley–Zehnder indices of the
//! two asymptotic operator families that occur at the ends of split cylinders.
//!
//! `ComplexLinear { rank }` is −i d/dt on ℂ^rank. `VerticalC { c }` is
//! −J d/dt − S with S = diag(C, 0): the real direction is damped by C and the
//! imaginary direction spans the kernel of the constant mode.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("window [{0}, {1}] is empty or not finite")]
    InvalidWindow(f64, f64),
    #[error("vertical operator needs C >= 0, got {0}")]
    NegativeC(f64),
    #[error("complex-linear operator needs rank >= 1")]
    ZeroRank,
    #[error("Fourier cutoff must be at least 4, got {0}")]
    CutoffTooSmall(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticOperator {
    ComplexLinear { rank: u32 },
    VerticalC { c: f64 },
}

impl AsymptoticOperator {
    pub fn complex_linear(rank: u32) -> Result<Self, SpectrumError> {
        if rank == 0 {
            return Err(SpectrumError::ZeroRank);
        }
        Ok(AsymptoticOperator::ComplexLinear { rank })
    }

    pub fn vertical(c: f64) -> Result<Self, SpectrumError> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(SpectrumError::NegativeC(c));
        }
        Ok(AsymptoticOperator::VerticalC { c })
    }

    /// Complex rank of the bundle the operator acts on.
    pub fn rank(&self) -> u32 {
        match self {
            AsymptoticOperator::ComplexLinear { rank } => *rank,
            AsymptoticOperator::VerticalC { .. } => 1,
        }
    }

    /// Real dimension of the kernel.
    pub fn kernel_dim(&self) -> u32 {
        match *self {
            AsymptoticOperator::ComplexLinear { rank } => 2 * rank,
            AsymptoticOperator::VerticalC { c } if c > 0.0 => 1,
            AsymptoticOperator::VerticalC { .. } => 2,
        }
    }
}

impl fmt::Display for AsymptoticOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymptoticOperator::ComplexLinear { rank } => write!(f, "-i d/dt on C^{rank}"),
            AsymptoticOperator::VerticalC { c } => write!(f, "A_C with C = {c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub eigenvalue: f64,
    pub fourier_mode: i64,
    pub multiplicity: u32,
    pub winding: i64,
}

/// Symbolic ±δ with δ below the spectral gap at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationSide {
    PlusSmall,
    MinusSmall,
}

impl PerturbationSide {
    pub fn opposite(self) -> Self {
        match self {
            PerturbationSide::PlusSmall => PerturbationSide::MinusSmall,
            PerturbationSide::MinusSmall => PerturbationSide::PlusSmall,
        }
    }
}

fn winding_for(eigenvalue: f64, mode: i64) -> i64 {
    if eigenvalue >= 0.0 {
        mode.abs()
    } else {
        -mode.abs()
    }
}

fn vertical_pair(c: f64, k: i64) -> (f64, f64) {
    let root = (c * c + 16.0 * PI * PI * (k * k) as f64).sqrt();
    (0.5 * (-c - root), 0.5 * (-c + root))
}

/// Closed-form eigenvalues in `[lambda_min, lambda_max]`, ascending.
pub fn spectrum_window(
    op: AsymptoticOperator,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<Vec<SpectralPoint>, SpectrumError> {
    if !(lambda_min < lambda_max) || !lambda_min.is_finite() || !lambda_max.is_finite() {
        return Err(SpectrumError::InvalidWindow(lambda_min, lambda_max));
    }
    let inside = |l: f64| l >= lambda_min && l <= lambda_max;
    let mut out = Vec::new();
    let mut push = |eigenvalue: f64, mode: i64, multiplicity: u32| {
        if inside(eigenvalue) {
            out.push(SpectralPoint {
                eigenvalue,
                fourier_mode: mode,
                multiplicity,
                winding: winding_for(eigenvalue, mode),
            });
        }
    };
    match op {
        AsymptoticOperator::ComplexLinear { rank } => {
            let first = (lambda_min / (2.0 * PI)).ceil() as i64;
            let last = (lambda_max / (2.0 * PI)).floor() as i64;
            for k in first..=last {
                push(2.0 * PI * k as f64, k, 2 * rank);
            }
        }
        AsymptoticOperator::VerticalC { c } => {
            if c > 0.0 {
                push(-c, 0, 1);
                push(0.0, 0, 1);
            } else {
                push(0.0, 0, 2);
            }
            let mut k = 1i64;
            loop {
                let (lo, hi) = vertical_pair(c, k);
                if lo < lambda_min && hi > lambda_max {
                    break;
                }
                push(lo, k, 2);
                push(hi, k, 2);
                k += 1;
            }
        }
    }
    out.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    Ok(out)
}

/// The eigenvalues straddling the shifted zero of a rank-one piece: for
/// A + δ the kernel counts as negative-side-adjacent from above, for A − δ
/// from below.
pub fn straddling_pair(
    op: AsymptoticOperator,
    side: PerturbationSide,
) -> (SpectralPoint, SpectralPoint) {
    let piece = match op {
        AsymptoticOperator::ComplexLinear { .. } => AsymptoticOperator::ComplexLinear { rank: 1 },
        v => v,
    };
    let reach = match piece {
        AsymptoticOperator::VerticalC { c } => {
            let (lo, hi) = vertical_pair(c, 1);
            lo.abs().max(hi) + 1.0
        }
        AsymptoticOperator::ComplexLinear { .. } => 2.0 * PI + 1.0,
    };
    let points = spectrum_window(piece, -reach, reach).expect("window is valid");
    let (neg, pos): (Vec<_>, Vec<_>) = points.into_iter().partition(|p| match side {
        PerturbationSide::PlusSmall => p.eigenvalue < 0.0,
        PerturbationSide::MinusSmall => p.eigenvalue <= 0.0,
    });
    (
        *neg.last().expect("spectrum is unbounded below"),
        *pos.first().expect("spectrum is unbounded above"),
    )
}

/// CZ(A ± δ) via the winding rule, summed over rank-one pieces.
pub fn cz_perturbed(op: AsymptoticOperator, side: PerturbationSide) -> i64 {
    let (lower, upper) = straddling_pair(op, side);
    let rank_one = lower.winding + upper.winding;
    match op {
        AsymptoticOperator::ComplexLinear { rank } => rank as i64 * rank_one,
        AsymptoticOperator::VerticalC { .. } => rank_one,
    }
}

/// CZ of the pair (operator, Morse function on the orbit family).
pub fn cz_with_critical(op: AsymptoticOperator, morse_index: u32) -> i64 {
    cz_perturbed(op, PerturbationSide::PlusSmall) + morse_index as i64
}

const CLUSTER_TOL: f64 = 1e-8;

/// Eigenvalues of the operator restricted to Fourier modes 0..=cutoff,
/// computed by a dense symmetric eigensolver. Modes and windings are read
/// off the eigenvectors, not assumed.
pub fn discretize_spectrum(
    op: AsymptoticOperator,
    fourier_cutoff: u32,
) -> Result<Vec<SpectralPoint>, SpectrumError> {
    if fourier_cutoff < 4 {
        return Err(SpectrumError::CutoffTooSmall(fourier_cutoff));
    }
    let (m, s) = match op {
        AsymptoticOperator::ComplexLinear { rank } => (rank as usize, [0.0, 0.0]),
        AsymptoticOperator::VerticalC { c } => (1, [c, 0.0]),
    };
    let kmax = fourier_cutoff as usize;
    // real coordinates: mode 0 uses a (2m); mode k >= 1 uses (a_k, b_k) (4m)
    let dim = 2 * m + 4 * m * kmax;
    let offset = |k: usize| if k == 0 { 0 } else { 2 * m + 4 * m * (k - 1) };
    let mut mat = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..m {
        for r in 0..2 {
            mat[(2 * j + r, 2 * j + r)] = -s[r];
        }
    }
    // J = [[0, -1], [1, 0]] in each complex factor
    for k in 1..=kmax {
        let w = 2.0 * PI * k as f64;
        let o = offset(k);
        for j in 0..m {
            let a = o + 2 * j;
            let b = o + 2 * m + 2 * j;
            for r in 0..2 {
                mat[(a + r, a + r)] = -s[r];
                mat[(b + r, b + r)] = -s[r];
            }
            // a' gets -wJ b, b' gets wJ a
            mat[(a, b + 1)] = w;
            mat[(a + 1, b)] = -w;
            mat[(b, a + 1)] = -w;
            mat[(b + 1, a)] = w;
        }
    }
    let eig = SymmetricEigen::new(mat);

    let mut raw: Vec<(f64, i64, i64)> = (0..dim)
        .map(|i| {
            let v = eig.eigenvectors.column(i);
            let (mode, _) = (0..=kmax)
                .map(|k| {
                    let width = if k == 0 { 2 * m } else { 4 * m };
                    let o = offset(k);
                    let weight: f64 = (o..o + width).map(|r| v[r] * v[r]).sum();
                    (k, weight)
                })
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let winding = if mode == 0 {
                0
            } else {
                let o = offset(mode);
                let (j, _) = (0..m)
                    .map(|j| {
                        let idx = [o + 2 * j, o + 2 * j + 1, o + 2 * m + 2 * j, o + 2 * m + 2 * j + 1];
                        (j, idx.iter().map(|&r| v[r] * v[r]).sum::<f64>())
                    })
                    .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
                let a = [v[o + 2 * j], v[o + 2 * j + 1]];
                let b = [v[o + 2 * m + 2 * j], v[o + 2 * m + 2 * j + 1]];
                sampled_winding(a, b, mode)
            };
            (eig.eigenvalues[i], mode as i64, winding)
        })
        .collect();
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut out: Vec<SpectralPoint> = Vec::new();
    for (value, mode, winding) in raw {
        match out.last_mut() {
            Some(last)
                if (value - last.eigenvalue).abs() <= CLUSTER_TOL * value.abs().max(1.0)
                    && last.fourier_mode == mode =>
            {
                last.multiplicity += 1;
            }
            _ => out.push(SpectralPoint {
                eigenvalue: value,
                fourier_mode: mode,
                multiplicity: 1,
                winding,
            }),
        }
    }
    Ok(out)
}

/// Winding number of t ↦ a cos(2πkt) + b sin(2πkt) around the origin.
fn sampled_winding(a: [f64; 2], b: [f64; 2], k: usize) -> i64 {
    let n = 16 * k.max(1);
    let point = |i: usize| {
        let t = 2.0 * PI * k as f64 * i as f64 / n as f64;
        (a[0] * t.cos() + b[0] * t.sin(), a[1] * t.cos() + b[1] * t.sin())
    };
    let mut total = 0.0;
    let mut prev = point(0);
    for i in 1..=n {
        let cur = point(i);
        let cross = prev.0 * cur.1 - prev.1 * cur.0;
        let dot = prev.0 * cur.0 + prev.1 * cur.1;
        total += cross.atan2(dot);
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use PerturbationSide::*;

    fn vc(c: f64) -> AsymptoticOperator {
        AsymptoticOperator::vertical(c).unwrap()
    }

    #[test]
    fn table_one_window() {
        let pts = spectrum_window(vc(0.0), -7.0, 7.0).unwrap();
        let summary: Vec<(i64, u32)> = pts.iter().map(|p| (p.winding, p.multiplicity)).collect();
        assert_eq!(summary, vec![(-1, 2), (0, 2), (1, 2)]);
        assert!((pts[0].eigenvalue + 2.0 * PI).abs() < 1e-15);
        assert!((pts[2].eigenvalue - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn table_two_window() {
        let pts = spectrum_window(vc(5.0), -6.0, 7.0).unwrap();
        let outer_lo = 0.5 * (-5.0 - (25.0 + 16.0 * PI * PI).sqrt());
        assert!(outer_lo < -6.0);
        let got: Vec<(f64, u32, i64)> = pts.iter().map(|p| (p.eigenvalue, p.multiplicity, p.winding)).collect();
        let outer_hi = 0.5 * (-5.0 + (25.0 + 16.0 * PI * PI).sqrt());
        assert_eq!(got, vec![(-5.0, 1, 0), (0.0, 1, 0), (outer_hi, 2, 1)]);
    }

    #[test]
    fn complex_linear_kernel() {
        let op = AsymptoticOperator::complex_linear(3).unwrap();
        let pts = spectrum_window(op, -1.0, 1.0).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].eigenvalue, pts[0].multiplicity, pts[0].winding), (0.0, 6, 0));
    }

    #[test]
    fn perturbed_cz_values() {
        assert_eq!(cz_perturbed(vc(5.0), PlusSmall), 0);
        assert_eq!(cz_perturbed(vc(0.0), PlusSmall), -1);
        assert_eq!(cz_perturbed(vc(0.0), MinusSmall), 1);
        assert_eq!(cz_perturbed(vc(1e-9), MinusSmall), 1);
        for n in 1..=6 {
            let op = AsymptoticOperator::complex_linear(n).unwrap();
            assert_eq!(cz_perturbed(op, PlusSmall), -(n as i64));
            assert_eq!(cz_perturbed(op, MinusSmall), n as i64);
        }
        assert_eq!(cz_with_critical(vc(3.0), 0), 0);
        assert_eq!(cz_with_critical(AsymptoticOperator::complex_linear(2).unwrap(), 3), 1);
        assert_eq!(cz_with_critical(vc(0.0), 1), 0);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(AsymptoticOperator::vertical(-1.0), Err(SpectrumError::NegativeC(-1.0)));
        assert_eq!(AsymptoticOperator::complex_linear(0), Err(SpectrumError::ZeroRank));
        assert!(spectrum_window(vc(1.0), 2.0, 1.0).is_err());
        assert!(spectrum_window(vc(1.0), 0.5, 0.6).unwrap().is_empty());
        assert_eq!(discretize_spectrum(vc(1.0), 3), Err(SpectrumError::CutoffTooSmall(3)));
    }

    #[test]
    fn discretized_complex_linear() {
        let op = AsymptoticOperator::complex_linear(1).unwrap();
        let pts = discretize_spectrum(op, 8).unwrap();
        assert_eq!(pts.len(), 17);
        for (i, p) in pts.iter().enumerate() {
            let k = i as i64 - 8;
            assert!((p.eigenvalue - 2.0 * PI * k as f64).abs() < 1e-9);
            assert_eq!(p.multiplicity, 2);
            assert_eq!(p.winding, k);
        }
    }

    #[test]
    fn discretized_vertical_matches_closed_form() {
        for c in [0.0, 5.0] {
            let disc: Vec<_> = discretize_spectrum(vc(c), 64)
                .unwrap()
                .into_iter()
                .filter(|p| p.eigenvalue.abs() <= 20.0)
                .collect();
            let exact = spectrum_window(vc(c), -20.0, 20.0).unwrap();
            assert_eq!(disc.len(), exact.len());
            for (d, e) in disc.iter().zip(&exact) {
                assert!((d.eigenvalue - e.eigenvalue).abs() < 1e-9);
                assert_eq!((d.multiplicity, d.winding), (e.multiplicity, e.winding));
            }
        }
    }

    #[test]
    fn crossing_and_monotone_winding() {
        for op in [vc(0.0), vc(2.5), AsymptoticOperator::complex_linear(4).unwrap()] {
            let jump = cz_perturbed(op, MinusSmall) - cz_perturbed(op, PlusSmall);
            assert_eq!(jump, op.kernel_dim() as i64);
            let pts = spectrum_window(op, -100.0, 100.0).unwrap();
            assert!(pts.windows(2).all(|w| w[0].winding <= w[1].winding));
        }
    }
}

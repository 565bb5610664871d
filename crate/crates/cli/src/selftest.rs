//! Randomized consistency checks run by `cascadix selftest`.

use cascadix::fredholm::{
    glue, index_morse_bott, Decoration, Puncture, PunctureSign, PuncturedProblem, Weight,
};
use cascadix::linalg::{Matrix, Sign};
use cascadix::orientation::{fibre_sum_orientation, LinearMapSpec, OrientedSpace};
use cascadix::profile::{orbit_level, PowerProfile, Profile};
use cascadix::snf::invariant_factors;
use cascadix::spectrum::{discretize_spectrum, spectrum_window, AsymptoticOperator};
use cascadix::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = (&'static str, Result<String, String>);

pub fn run(seed: u64, count: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        ("spectrum vs Fourier truncation", spectrum(&mut rng, count.min(10))),
        ("index additivity under gluing", gluing(&mut rng, count)),
        ("fibre-sum orientation reversal", orientation(&mut rng, count)),
        ("invariant factors vs rank", snf(&mut rng, count)),
        ("orbit levels solve h'(rho) = k T0", levels(&mut rng, count)),
    ]
}

fn spectrum(rng: &mut ChaCha8Rng, count: usize) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..count.max(1) {
        let c = rng.gen_range(0.0..20.0);
        let op = AsymptoticOperator::vertical(c).map_err(|e| e.to_string())?;
        let exact = spectrum_window(op, -7.0, 7.0).map_err(|e| e.to_string())?;
        let approx = discretize_spectrum(op, 12).map_err(|e| e.to_string())?;
        for p in &exact {
            let d = approx
                .iter()
                .filter(|a| a.multiplicity == p.multiplicity && a.winding == p.winding)
                .map(|a| (a.eigenvalue - p.eigenvalue).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        if worst > 1e-8 {
            return Err(format!("C = {c}: discrepancy {worst:e}"));
        }
    }
    Ok(format!("max error {worst:.1e}"))
}

fn random_operator(rng: &mut ChaCha8Rng) -> AsymptoticOperator {
    if rng.gen_bool(0.5) {
        AsymptoticOperator::ComplexLinear { rank: 1 }
    } else {
        AsymptoticOperator::VerticalC {
            c: rng.gen_range(1..10) as f64,
        }
    }
}

fn random_puncture(rng: &mut ChaCha8Rng, sign: PunctureSign, op: AsymptoticOperator) -> Puncture {
    let decoration = match rng.gen_range(0..3) {
        0 => Decoration::Weighted(Weight::Decay),
        1 => Decoration::Weighted(Weight::Growth),
        _ => Decoration::KernelSubspace {
            dim: rng.gen_range(0..=op.kernel_dim()),
        },
    };
    Puncture::new(sign, op, decoration)
}

fn random_problem(rng: &mut ChaCha8Rng, first: Puncture, min_extra: usize) -> Result<PuncturedProblem, String> {
    let mut punctures = vec![first];
    for _ in 0..rng.gen_range(min_extra..3) {
        let sign = if rng.gen_bool(0.5) {
            PunctureSign::Positive
        } else {
            PunctureSign::Negative
        };
        let op = random_operator(rng);
        punctures.push(random_puncture(rng, sign, op));
    }
    PuncturedProblem::new(1, rng.gen_range(-2..3), punctures).map_err(|e| e.to_string())
}

fn gluing(rng: &mut ChaCha8Rng, count: usize) -> Result<String, String> {
    for _ in 0..count {
        let op = random_operator(rng);
        let neg = random_puncture(rng, PunctureSign::Negative, op);
        let dim = op.kernel_dim() - neg.equivalent_subspace_dim();
        let pos = Puncture::new(PunctureSign::Positive, op, Decoration::KernelSubspace { dim });
        let upper = random_problem(rng, neg, 1)?;
        let lower = random_problem(rng, pos, 0)?;
        let glued = glue(&upper, 0, &lower, 0).map_err(|e| e.to_string())?;
        let (a, b, g) = (index_morse_bott(&upper), index_morse_bott(&lower), index_morse_bott(&glued));
        if g != a + b {
            return Err(format!("{a} + {b} != {g}"));
        }
    }
    Ok(format!("{count} gluings"))
}

fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect()).collect()
}

fn rational_map(rows: &[Vec<i64>], cols: usize) -> LinearMapSpec<Rational> {
    LinearMapSpec {
        matrix: Matrix::from_i64_rows(rows, cols).expect("rectangular"),
    }
}

fn orientation(rng: &mut ChaCha8Rng, count: usize) -> Result<String, String> {
    let mut done = 0;
    let mut attempts = 0;
    while done < count && attempts < 20 * count.max(1) {
        attempts += 1;
        let (a, b) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let c = rng.gen_range(0..=a + b);
        let f1 = int_matrix(rng, c, a);
        let f2 = int_matrix(rng, c, b);
        let v1 = OrientedSpace::<Rational>::standard(a, Sign::Plus);
        let v2 = OrientedSpace::<Rational>::standard(b, Sign::Plus);
        let w = OrientedSpace::<Rational>::standard(c, Sign::Plus);
        let (m1, m2) = (rational_map(&f1, a), rational_map(&f2, b));
        let Ok(k) = fibre_sum_orientation(&v1, &v2, &w, &m1, &m2) else {
            continue;
        };
        let flip = |other: Result<OrientedSpace<Rational>, _>, what: &str| -> Result<(), String> {
            let other = other.map_err(|e: cascadix::orientation::OrientationError| e.to_string())?;
            match other.compare(&k).map_err(|e| e.to_string())? {
                Sign::Minus => Ok(()),
                Sign::Plus => Err(format!("reversing {what} kept the sign ({a}, {b}, {c})")),
            }
        };
        flip(fibre_sum_orientation(&v1.reversed(), &v2, &w, &m1, &m2), "V1")?;
        flip(fibre_sum_orientation(&v1, &v2.reversed(), &w, &m1, &m2), "V2")?;
        flip(fibre_sum_orientation(&v1, &v2, &w.reversed(), &m1, &m2), "W")?;
        done += 1;
    }
    Ok(format!("{done} surjective triples"))
}

fn snf(rng: &mut ChaCha8Rng, count: usize) -> Result<String, String> {
    for _ in 0..count {
        let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let m = int_matrix(rng, r, c);
        let factors = invariant_factors(&m);
        let rank = Matrix::<Rational>::from_i64_rows(&m, c).expect("rectangular").rank();
        if factors.len() != rank {
            return Err(format!("{} factors, rank {rank}: {m:?}", factors.len()));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) || factors.iter().any(|&d| d <= 0) {
            return Err(format!("not a divisor chain: {factors:?}"));
        }
    }
    Ok(format!("{count} matrices"))
}

fn levels(rng: &mut ChaCha8Rng, count: usize) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let p = rng.gen_range(2.0..5.0);
        let t0 = rng.gen_range(0.5..5.0);
        let k = rng.gen_range(1..6);
        let profile = PowerProfile::new(p).map_err(|e| e.to_string())?;
        let lvl = orbit_level(&profile, k, t0).map_err(|e| e.to_string())?;
        let target = k as f64 * t0;
        let err = (profile.h_prime(lvl.rho_k) - target).abs() / target;
        worst = worst.max(err);
        if err > 1e-9 {
            return Err(format!("p = {p}, T0 = {t0}, k = {k}: relative error {err:e}"));
        }
    }
    Ok(format!("max relative error {worst:.1e}"))
}

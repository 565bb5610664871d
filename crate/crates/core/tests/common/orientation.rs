#![allow(dead_code)]

use cascadix::linalg::{Matrix, Sign};
use cascadix::orientation::{fibre_sum_orientation, LinearMapSpec, OrientationError, OrientedSpace};
use cascadix::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix<S: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<S> {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| S::from_int(rng.gen_range(-3..=3))).collect())
        .collect();
    Matrix::from_rows(data, cols).unwrap()
}

pub fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// An invertible basis of ℝ^d with determinant of the requested sign.
pub fn random_basis<S: Scalar>(rng: &mut ChaCha8Rng, d: usize, want: Option<Sign>) -> Matrix<S> {
    loop {
        let mut m: Matrix<S> = random_matrix(rng, d, d);
        match m.det_sign() {
            None => continue,
            Some(s) => {
                if want.is_some_and(|w| w != s) && d > 0 {
                    for i in 0..d {
                        m[(i, 0)] = -m[(i, 0)].clone();
                    }
                }
                return m;
            }
        }
    }
}

fn map<S: Scalar>(m: Matrix<S>) -> LinearMapSpec<S> {
    LinearMapSpec { matrix: m }
}

struct Triple<S> {
    v: [OrientedSpace<S>; 3],
    w12: OrientedSpace<S>,
    w23: OrientedSpace<S>,
    f1: Matrix<S>,
    g2: Matrix<S>,
    f2: Matrix<S>,
    g3: Matrix<S>,
}

fn random_triple<S: Scalar>(rng: &mut ChaCha8Rng) -> Triple<S> {
    let d: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=4)).collect();
    let w12 = rng.gen_range(0..=(d[0] + d[1]).min(4));
    let w23 = rng.gen_range(0..=(d[1] + d[2]).min(4));
    let space = |rng: &mut ChaCha8Rng, n: usize| {
        let b = random_basis(rng, n, None);
        OrientedSpace::new(b, random_sign(rng)).unwrap()
    };
    Triple {
        v: [space(rng, d[0]), space(rng, d[1]), space(rng, d[2])],
        w12: space(rng, w12),
        w23: space(rng, w23),
        f1: random_matrix(rng, w12, d[0]),
        g2: random_matrix(rng, w12, d[1]),
        f2: random_matrix(rng, w23, d[1]),
        g3: random_matrix(rng, w23, d[2]),
    }
}

fn zero_pad<S: Scalar>(m: &Matrix<S>, left: usize, right: usize) -> Matrix<S> {
    let l: Matrix<S> = Matrix::zeros(m.nrows(), left);
    let r: Matrix<S> = Matrix::zeros(m.nrows(), right);
    l.hstack(m).unwrap().hstack(&r).unwrap()
}

/// Both bracketings of the iterated fibre sum.
fn bracketings<S: Scalar>(t: &Triple<S>) -> Result<(OrientedSpace<S>, OrientedSpace<S>), OrientationError> {
    let [v1, v2, v3] = &t.v;
    let (a1, a3) = (v1.ambient_dim(), v3.ambient_dim());
    let k12 = fibre_sum_orientation(v1, v2, &t.w12, &map(t.f1.clone()), &map(t.g2.clone()))?;
    let left = fibre_sum_orientation(
        &k12,
        v3,
        &t.w23,
        &map(zero_pad(&t.f2, a1, 0)),
        &map(t.g3.clone()),
    )?;
    let k23 = fibre_sum_orientation(v2, v3, &t.w23, &map(t.f2.clone()), &map(t.g3.clone()))?;
    let right = fibre_sum_orientation(
        v1,
        &k23,
        &t.w12,
        &map(t.f1.clone()),
        &map(zero_pad(&t.g2, 0, a3)),
    )?;
    Ok((left, right))
}

/// Checks `count` surjective triples; returns how many were drawn.
pub fn associativity<S: Scalar>(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut tried = 0;
    while passed < count {
        tried += 1;
        if tried > 100 * count {
            return Err("too few surjective instances".into());
        }
        let t = random_triple::<S>(&mut rng);
        let Ok((left, right)) = bracketings(&t) else { continue };
        match left.compare(&right) {
            Ok(Sign::Plus) => passed += 1,
            other => return Err(format!("instance {passed}: bracketings give {other:?}")),
        }
    }
    Ok(tried)
}


fn pair_instances<S: Scalar>(
    seed: u64,
    count: usize,
    mut check: impl FnMut(&mut ChaCha8Rng, &Triple<S>, &OrientedSpace<S>) -> Result<(), String>,
) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < count {
        let t = random_triple::<S>(&mut rng);
        let Ok(k) = fibre_sum_orientation(&t.v[0], &t.v[1], &t.w12, &map(t.f1.clone()), &map(t.g2.clone())) else {
            continue;
        };
        check(&mut rng, &t, &k).map_err(|e| format!("instance {done}: {e}"))?;
        done += 1;
    }
    Ok(())
}

/// Positive-determinant change of basis. Floats get a diagonally dominant
/// matrix so that rounding stays far below the comparison tolerance.
fn positive_change<S: Scalar>(rng: &mut ChaCha8Rng, d: usize, dominant: bool) -> Matrix<S> {
    if !dominant {
        return random_basis(rng, d, Some(Sign::Plus));
    }
    let mut m: Matrix<S> = random_matrix(rng, d, d);
    for i in 0..d {
        m[(i, i)] = m[(i, i)].clone() + S::from_int(13);
    }
    m
}

pub fn basis_independence<S: Scalar>(seed: u64, count: usize, dominant: bool) -> Result<(), String> {
    pair_instances::<S>(seed, count, |rng, t, k| {
        let rebase = |rng: &mut ChaCha8Rng, v: &OrientedSpace<S>| {
            let p = positive_change::<S>(rng, v.dim(), dominant);
            OrientedSpace::new(v.basis.matmul(&p).unwrap(), v.sign).unwrap()
        };
        let (v1, v2, w) = (rebase(rng, &t.v[0]), rebase(rng, &t.v[1]), rebase(rng, &t.w12));
        let k2 = fibre_sum_orientation(&v1, &v2, &w, &map(t.f1.clone()), &map(t.g2.clone())).map_err(|e| e.to_string())?;
        match k.compare(&k2) {
            Ok(Sign::Plus) => Ok(()),
            other => Err(format!("rebased output compares as {other:?}")),
        }
    })
}

pub fn reversal<S: Scalar>(seed: u64, count: usize) -> Result<(), String> {
    pair_instances::<S>(seed, count, |_, t, k| {
        let (f1, g2) = (map(t.f1.clone()), map(t.g2.clone()));
        let (v1, v2, w) = (&t.v[0], &t.v[1], &t.w12);
        for (which, flipped) in [
            ("V1", fibre_sum_orientation(&v1.reversed(), v2, w, &f1, &g2)),
            ("V2", fibre_sum_orientation(v1, &v2.reversed(), w, &f1, &g2)),
            ("W", fibre_sum_orientation(v1, v2, &w.reversed(), &f1, &g2)),
        ] {
            let flipped = flipped.map_err(|e| e.to_string())?;
            if k.compare(&flipped) != Ok(Sign::Minus) {
                return Err(format!("reversing {which} did not flip the output"));
            }
        }
        Ok(())
    })
}

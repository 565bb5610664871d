//! Orientations of finite-dimensional subspaces, quotients and fibre sums,
//! computed through determinant signs.
//!
//! A space is a span of columns in some ambient coordinate space together
//! with a sign relative to those columns. Linear maps act on ambient
//! coordinates.

use thiserror::Error;

use crate::linalg::{complete_basis, Matrix, Sign};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrientationError {
    #[error("basis columns are linearly dependent")]
    DependentBasis,
    #[error("sub basis does not lie in the total space or is dependent")]
    NotASubspace,
    #[error("f1 - f2 has rank {rank} but the target has dimension {target_dim}")]
    NotSurjective { rank: usize, target_dim: usize },
    #[error("map image leaves the target space")]
    MapOutsideTarget,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("the two spaces are different subspaces")]
    DifferentSubspaces,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrientedSpace<S> {
    /// Columns in ambient coordinates; `ambient × dim`.
    pub basis: Matrix<S>,
    pub sign: Sign,
}

impl<S: Scalar> OrientedSpace<S> {
    pub fn new(basis: Matrix<S>, sign: Sign) -> Result<Self, OrientationError> {
        if basis.rank() != basis.ncols() {
            return Err(OrientationError::DependentBasis);
        }
        Ok(OrientedSpace { basis, sign })
    }

    /// ℝ^d with its standard basis.
    pub fn standard(dim: usize, sign: Sign) -> Self {
        OrientedSpace {
            basis: Matrix::identity(dim),
            sign,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn reversed(&self) -> Self {
        OrientedSpace {
            basis: self.basis.clone(),
            sign: -self.sign,
        }
    }

    /// Coordinates of the columns of `vectors` in this basis.
    fn coordinates(&self, vectors: &Matrix<S>) -> Option<Matrix<S>> {
        let c = self.basis.solve(vectors)?;
        // solve zeroes free variables; confirm the columns really lie in the span
        let back = self.basis.matmul(&c)?;
        let mut scale = S::one();
        for m in [&self.basis, vectors, &c] {
            for col in m.columns() {
                for v in col {
                    if v.abs() > scale {
                        scale = v.abs();
                    }
                }
            }
        }
        let close = (0..back.nrows()).all(|i| {
            (0..back.ncols()).all(|j| ((back[(i, j)].clone() - vectors[(i, j)].clone()) / scale.clone()).is_negligible())
        });
        close.then_some(c)
    }

    /// Sign of `other` relative to `self` when both orient the same subspace.
    pub fn compare(&self, other: &OrientedSpace<S>) -> Result<Sign, OrientationError> {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return Err(OrientationError::DifferentSubspaces);
        }
        let c = self
            .coordinates(&other.basis)
            .ok_or(OrientationError::DifferentSubspaces)?;
        let s = c.det_sign().ok_or(OrientationError::DifferentSubspaces)?;
        Ok(self.sign * other.sign * s)
    }

    /// Product orientation on the direct sum, `self` first.
    pub fn direct_sum(&self, other: &OrientedSpace<S>) -> Self {
        OrientedSpace {
            basis: self.basis.block_diag(&other.basis),
            sign: self.sign * other.sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapSpec<S> {
    /// `ambient(target) × ambient(source)`.
    pub matrix: Matrix<S>,
}

/// Orients a complement representative of `sub` inside `total` so that the
/// sub basis followed by the complement basis carries the sign of `total`.
pub fn quotient_orientation<S: Scalar>(
    total: &OrientedSpace<S>,
    sub: &OrientedSpace<S>,
) -> Result<OrientedSpace<S>, OrientationError> {
    if total.ambient_dim() != sub.ambient_dim() || sub.dim() > total.dim() {
        return Err(OrientationError::NotASubspace);
    }
    let c_sub = total
        .coordinates(&sub.basis)
        .ok_or(OrientationError::NotASubspace)?;
    let c_rest = complete_basis(&c_sub).ok_or(OrientationError::NotASubspace)?;
    let joined = c_sub.hstack(&c_rest).ok_or(OrientationError::NotASubspace)?;
    let det = joined.det_sign().ok_or(OrientationError::NotASubspace)?;
    let rep = total.basis.matmul(&c_rest).ok_or(OrientationError::NotASubspace)?;
    Ok(OrientedSpace {
        basis: rep,
        sign: total.sign * sub.sign * det,
    })
}

/// Orients ker(f1 − f2) ⊂ V1 ⊕ V2 so that the isomorphism
/// (V1 ⊕ V2)/ker → W induced by f1 − f2 changes orientation by
/// (−1)^{dim V2 · dim W}, the quotient being oriented by
/// [`quotient_orientation`].
pub fn fibre_sum_orientation<S: Scalar>(
    v1: &OrientedSpace<S>,
    v2: &OrientedSpace<S>,
    w: &OrientedSpace<S>,
    f1: &LinearMapSpec<S>,
    f2: &LinearMapSpec<S>,
) -> Result<OrientedSpace<S>, OrientationError> {
    for (name, f, v) in [("f1", f1, v1), ("f2", f2, v2)] {
        if f.matrix.ncols() != v.ambient_dim() || f.matrix.nrows() != w.ambient_dim() {
            return Err(OrientationError::DimensionMismatch(format!(
                "{name} is {}x{}, expected {}x{}",
                f.matrix.nrows(),
                f.matrix.ncols(),
                w.ambient_dim(),
                v.ambient_dim()
            )));
        }
    }
    let u = v1.direct_sum(v2);
    let l = f1
        .matrix
        .hstack(&f2.matrix.scale(&-S::one()))
        .expect("row counts agree");
    let image = l.matmul(&u.basis).expect("shapes agree");
    let m = w.coordinates(&image).ok_or(OrientationError::MapOutsideTarget)?;
    let rank = m.rank();
    if rank < w.dim() {
        return Err(OrientationError::NotSurjective {
            rank,
            target_dim: w.dim(),
        });
    }
    let k = m.kernel_basis();
    let s = complete_basis(&k).expect("kernel basis is independent");
    let eps = Sign::parity(v2.dim() * w.dim());
    let to_w = m.matmul(&s).expect("shapes agree").det_sign().expect("complement maps isomorphically");
    let sigma_q = eps * w.sign * to_w;
    let split = k.hstack(&s).expect("shapes agree").det_sign().expect("kernel and complement span");
    Ok(OrientedSpace {
        basis: u.basis.matmul(&k).expect("shapes agree"),
        sign: sigma_q * u.sign * split,
    })
}

//! Riemann–Roch index calculus on punctured spheres with weighted or
//! kernel-decorated asymptotics.
//!
//! A positive weight at a puncture always means exponential decay there.
//! Callers speak in terms of [`Weight::Decay`] and [`Weight::Growth`]; the
//! translation to shifted operators happens only in [`weighted_cz`].

use std::fmt;

use thiserror::Error;

use crate::spectrum::{cz_perturbed, AsymptoticOperator, PerturbationSide};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FredholmError {
    #[error("a punctured problem needs at least one puncture")]
    NoPunctures,
    #[error("bundle rank must be positive")]
    ZeroRank,
    #[error("puncture {index}: operator has rank {operator_rank}, bundle has rank {bundle_rank}")]
    RankMismatch {
        index: usize,
        operator_rank: u32,
        bundle_rank: u32,
    },
    #[error("puncture {index}: subspace of dimension {dim} exceeds kernel dimension {kernel}")]
    SubspaceTooLarge { index: usize, dim: u32, kernel: u32 },
    #[error("puncture {index} carries a kernel subspace; the weighted formula needs weights everywhere")]
    NotWeighted { index: usize },
    #[error("puncture mismatch: {0}")]
    PunctureMismatch(String),
    #[error("cannot glue: {0}")]
    NotGluable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PunctureSign {
    Positive,
    Negative,
}

impl fmt::Display for PunctureSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PunctureSign::Positive => "+",
            PunctureSign::Negative => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    Decay,
    Growth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decoration {
    Weighted(Weight),
    /// Sections may converge to a vector in a subspace V of the kernel.
    KernelSubspace { dim: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Puncture {
    pub sign: PunctureSign,
    pub operator: AsymptoticOperator,
    pub decoration: Decoration,
}

impl Puncture {
    pub fn new(sign: PunctureSign, operator: AsymptoticOperator, decoration: Decoration) -> Self {
        Puncture {
            sign,
            operator,
            decoration,
        }
    }

    /// The dimension of V that reproduces this decoration's index.
    pub fn equivalent_subspace_dim(&self) -> u32 {
        let ker = self.operator.kernel_dim();
        match (self.decoration, self.sign) {
            (Decoration::KernelSubspace { dim }, _) => dim,
            (Decoration::Weighted(Weight::Decay), _) => 0,
            (Decoration::Weighted(Weight::Growth), _) => ker,
        }
    }
}

/// A Cauchy–Riemann problem on a genus-zero punctured domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PuncturedProblem {
    rank: u32,
    rel_c1: i64,
    punctures: Vec<Puncture>,
}

impl PuncturedProblem {
    pub fn new(rank: u32, rel_c1: i64, punctures: Vec<Puncture>) -> Result<Self, FredholmError> {
        if rank == 0 {
            return Err(FredholmError::ZeroRank);
        }
        if punctures.is_empty() {
            return Err(FredholmError::NoPunctures);
        }
        for (index, p) in punctures.iter().enumerate() {
            if p.operator.rank() != rank {
                return Err(FredholmError::RankMismatch {
                    index,
                    operator_rank: p.operator.rank(),
                    bundle_rank: rank,
                });
            }
            if let Decoration::KernelSubspace { dim } = p.decoration {
                let kernel = p.operator.kernel_dim();
                if dim > kernel {
                    return Err(FredholmError::SubspaceTooLarge { index, dim, kernel });
                }
            }
        }
        Ok(PuncturedProblem {
            rank,
            rel_c1,
            punctures,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn rel_c1(&self) -> i64 {
        self.rel_c1
    }

    pub fn punctures(&self) -> &[Puncture] {
        &self.punctures
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - self.punctures.len() as i64
    }

    fn signs(&self) -> Vec<PunctureSign> {
        self.punctures.iter().map(|p| p.sign).collect()
    }
}

/// CZ of the shifted operator a weight selects, before the sign of the
/// puncture is applied.
pub fn weighted_cz(sign: PunctureSign, operator: AsymptoticOperator, weight: Weight) -> i64 {
    use PerturbationSide::*;
    let side = match (sign, weight) {
        (PunctureSign::Positive, Weight::Decay) => PlusSmall,
        (PunctureSign::Positive, Weight::Growth) => MinusSmall,
        (PunctureSign::Negative, Weight::Decay) => MinusSmall,
        (PunctureSign::Negative, Weight::Growth) => PlusSmall,
    };
    cz_perturbed(operator, side)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PunctureTerm {
    pub sign: PunctureSign,
    pub operator: AsymptoticOperator,
    pub decoration: Decoration,
    /// CZ of the perturbed operator entering the formula.
    pub cz: i64,
    /// dim V at positive punctures, codim V at negative ones, zero if weighted.
    pub correction: i64,
    pub contribution: i64,
}

/// The formula with every term spelled out.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexBreakdown {
    pub rank: u32,
    pub euler_characteristic: i64,
    pub rel_c1: i64,
    pub terms: Vec<PunctureTerm>,
    pub total: i64,
}

fn assemble(problem: &PuncturedProblem, terms: Vec<PunctureTerm>) -> IndexBreakdown {
    let chi = problem.euler_characteristic();
    let total = problem.rank as i64 * chi
        + 2 * problem.rel_c1
        + terms.iter().map(|t| t.contribution).sum::<i64>();
    IndexBreakdown {
        rank: problem.rank,
        euler_characteristic: chi,
        rel_c1: problem.rel_c1,
        terms,
        total,
    }
}

pub fn weighted_breakdown(problem: &PuncturedProblem) -> Result<IndexBreakdown, FredholmError> {
    let mut terms = Vec::with_capacity(problem.punctures.len());
    for (index, p) in problem.punctures.iter().enumerate() {
        let Decoration::Weighted(w) = p.decoration else {
            return Err(FredholmError::NotWeighted { index });
        };
        let cz = weighted_cz(p.sign, p.operator, w);
        let contribution = match p.sign {
            PunctureSign::Positive => cz,
            PunctureSign::Negative => -cz,
        };
        terms.push(PunctureTerm {
            sign: p.sign,
            operator: p.operator,
            decoration: p.decoration,
            cz,
            correction: 0,
            contribution,
        });
    }
    Ok(assemble(problem, terms))
}

pub fn morse_bott_breakdown(problem: &PuncturedProblem) -> IndexBreakdown {
    let terms = problem
        .punctures
        .iter()
        .map(|p| {
            let cz = cz_perturbed(p.operator, PerturbationSide::PlusSmall);
            let dim_v = p.equivalent_subspace_dim() as i64;
            let ker = p.operator.kernel_dim() as i64;
            let (correction, contribution) = match p.sign {
                PunctureSign::Positive => (dim_v, cz + dim_v),
                PunctureSign::Negative => (ker - dim_v, -(cz + ker - dim_v)),
            };
            PunctureTerm {
                sign: p.sign,
                operator: p.operator,
                decoration: p.decoration,
                cz,
                correction,
                contribution,
            }
        })
        .collect();
    assemble(problem, terms)
}

/// n·χ + 2c₁ + Σ₊ CZ(A ± δ) − Σ₋ CZ(A ∓ δ), the sign of δ set by the weight.
pub fn index_weighted(problem: &PuncturedProblem) -> Result<i64, FredholmError> {
    Ok(weighted_breakdown(problem)?.total)
}

/// n·χ + 2c₁ + Σ₊ (CZ(A + δ) + dim V) − Σ₋ (CZ(A + δ) + codim V).
///
/// Weighted punctures enter through their equivalent subspace: decay is
/// V = 0 and growth is V = ker A, at either sign.
pub fn index_morse_bott(problem: &PuncturedProblem) -> i64 {
    morse_bott_breakdown(problem).total
}

/// Index of the linearized Floer operator of a split cylinder: the two
/// diagonal blocks, plus two for every puncture beyond the two cylinder ends,
/// since those punctures move freely in the domain.
pub fn split_floer_index(
    vertical: &PuncturedProblem,
    horizontal: &PuncturedProblem,
) -> Result<i64, FredholmError> {
    if vertical.signs() != horizontal.signs() {
        return Err(FredholmError::PunctureMismatch(format!(
            "vertical has {} punctures, horizontal has {} (or their signs differ)",
            vertical.punctures.len(),
            horizontal.punctures.len()
        )));
    }
    let moving = vertical.punctures.len().saturating_sub(2) as i64;
    Ok(index_morse_bott(vertical) + index_morse_bott(horizontal) + 2 * moving)
}

/// Asymptotic end of a cylinder in ℝ × Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum End {
    /// Hamiltonian orbit at level b, with C = h''(e^b)e^b.
    Hamiltonian { c: f64 },
    /// Reeb orbit at ±∞.
    Reeb,
}

fn end_operator(end: End) -> AsymptoticOperator {
    match end {
        End::Hamiltonian { c } => AsymptoticOperator::VerticalC { c },
        End::Reeb => AsymptoticOperator::ComplexLinear { rank: 1 },
    }
}

fn assert_positive_c(end: End) -> Result<(), FredholmError> {
    match end {
        End::Hamiltonian { c } if !(c > 0.0) => Err(FredholmError::PunctureMismatch(format!(
            "Hamiltonian end needs C > 0, got {c}"
        ))),
        _ => Ok(()),
    }
}

/// The ℂ-block of a cylinder with `augmentations` interior negative Reeb
/// punctures. `morse_bott` selects V = iℝ at Hamiltonian ends and V = ℂ at
/// Reeb ends; otherwise every puncture decays.
pub fn vertical_problem(
    plus: End,
    minus: End,
    augmentations: usize,
    morse_bott: bool,
) -> Result<PuncturedProblem, FredholmError> {
    assert_positive_c(plus)?;
    assert_positive_c(minus)?;
    let decoration = |end: End| {
        if !morse_bott {
            return Decoration::Weighted(Weight::Decay);
        }
        match end {
            End::Hamiltonian { .. } => Decoration::KernelSubspace { dim: 1 },
            End::Reeb => Decoration::KernelSubspace { dim: 2 },
        }
    };
    let mut punctures = vec![
        Puncture::new(PunctureSign::Positive, end_operator(plus), decoration(plus)),
        Puncture::new(PunctureSign::Negative, end_operator(minus), decoration(minus)),
    ];
    for _ in 0..augmentations {
        punctures.push(Puncture::new(
            PunctureSign::Negative,
            end_operator(End::Reeb),
            decoration(End::Reeb),
        ));
    }
    PuncturedProblem::new(1, 0, punctures)
}

/// The T Σ-block: −i d/dt on ℂ^{n−1} at every puncture with full-kernel
/// decorations, and relative Chern number ⟨c₁(TΣ), A⟩.
pub fn horizontal_problem(
    n: u32,
    c1_sigma: i64,
    augmentations: usize,
) -> Result<PuncturedProblem, FredholmError> {
    if n < 2 {
        return Err(FredholmError::ZeroRank);
    }
    let op = AsymptoticOperator::ComplexLinear { rank: n - 1 };
    let full = Decoration::KernelSubspace { dim: 2 * (n - 1) };
    let mut punctures = vec![
        Puncture::new(PunctureSign::Positive, op, full),
        Puncture::new(PunctureSign::Negative, op, full),
    ];
    for _ in 0..augmentations {
        punctures.push(Puncture::new(PunctureSign::Negative, op, full));
    }
    PuncturedProblem::new(n - 1, c1_sigma, punctures)
}

/// Glues a negative puncture of `upper` to a positive puncture of `lower`.
/// The pair must share the operator and carry complementary subspaces.
pub fn glue(
    upper: &PuncturedProblem,
    upper_negative: usize,
    lower: &PuncturedProblem,
    lower_positive: usize,
) -> Result<PuncturedProblem, FredholmError> {
    let a = upper
        .punctures
        .get(upper_negative)
        .ok_or_else(|| FredholmError::NotGluable("no such puncture on the upper problem".into()))?;
    let b = lower
        .punctures
        .get(lower_positive)
        .ok_or_else(|| FredholmError::NotGluable("no such puncture on the lower problem".into()))?;
    if a.sign != PunctureSign::Negative || b.sign != PunctureSign::Positive {
        return Err(FredholmError::NotGluable(
            "need a negative puncture above and a positive one below".into(),
        ));
    }
    if a.operator != b.operator || upper.rank != lower.rank {
        return Err(FredholmError::NotGluable("asymptotic operators differ".into()));
    }
    if a.equivalent_subspace_dim() + b.equivalent_subspace_dim() != a.operator.kernel_dim() {
        return Err(FredholmError::NotGluable(
            "decorations are not complementary".into(),
        ));
    }
    let punctures = upper
        .punctures
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != upper_negative)
        .map(|(_, p)| *p)
        .chain(
            lower
                .punctures
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != lower_positive)
                .map(|(_, p)| *p),
        )
        .collect();
    PuncturedProblem::new(upper.rank, upper.rel_c1 + lower.rel_c1, punctures)
}

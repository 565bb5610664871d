//! Input files for `index`, `dim`, `orient` and `enumerate --evaluate`.

use cascadix::cascade::{Augmentation, CascadeSpec, Level};
use cascadix::fredholm::{Decoration, Puncture, PunctureSign, PuncturedProblem, Weight};
use cascadix::grading::parse_generator;
use cascadix::linalg::{Matrix, Sign};
use cascadix::orientation::{LinearMapSpec, OrientedSpace};
use cascadix::pearl::{CascadeKind, PearlChainSpec, PearlVariant};
use cascadix::setup::{parse_rational, SetupDescriptor};
use cascadix::spectrum::AsymptoticOperator;
use cascadix::{Error, Rational};
use serde::Deserialize;
use serde_json::Value;

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorFile {
    Vertical(f64),
    ComplexLinear(u32),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DecorationFile {
    Decay,
    Growth,
    Subspace(u32),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PunctureFile {
    pub sign: String,
    pub operator: OperatorFile,
    pub decoration: DecorationFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub rank: u32,
    #[serde(default)]
    pub rel_c1: i64,
    pub punctures: Vec<PunctureFile>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum IndexFile {
    Split { vertical: ProblemFile, horizontal: ProblemFile },
    Single(ProblemFile),
}

impl ProblemFile {
    pub fn build(&self) -> Result<PuncturedProblem, Error> {
        let mut punctures = Vec::new();
        for p in &self.punctures {
            let sign = match p.sign.as_str() {
                "+" | "positive" => PunctureSign::Positive,
                "-" | "negative" => PunctureSign::Negative,
                other => {
                    return Err(Error::Fredholm(cascadix::fredholm::FredholmError::PunctureMismatch(
                        format!("unknown puncture sign `{other}`"),
                    )))
                }
            };
            let operator = match p.operator {
                OperatorFile::Vertical(c) => AsymptoticOperator::vertical(c)?,
                OperatorFile::ComplexLinear(n) => AsymptoticOperator::complex_linear(n)?,
            };
            let decoration = match p.decoration {
                DecorationFile::Decay => Decoration::Weighted(Weight::Decay),
                DecorationFile::Growth => Decoration::Weighted(Weight::Growth),
                DecorationFile::Subspace(dim) => Decoration::KernelSubspace { dim },
            };
            punctures.push(Puncture::new(sign, operator, decoration));
        }
        Ok(PuncturedProblem::new(self.rank, self.rel_c1, punctures)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DimFile {
    PearlInSigma {
        q: String,
        p: String,
        classes_a: Vec<Vec<i64>>,
        #[serde(default)]
        aug_count: u32,
        #[serde(default)]
        aug_classes: Vec<Vec<i64>>,
    },
    PearlWithSphere {
        x: String,
        p: String,
        b: Vec<i64>,
        classes_a: Vec<Vec<i64>>,
        #[serde(default)]
        aug_count: u32,
        #[serde(default)]
        aug_classes: Vec<Vec<i64>>,
    },
    Cascade {
        kind: String,
        #[serde(default)]
        n: u32,
        upper: String,
        lower: String,
    },
}

pub enum DimRequest {
    Pearl(PearlChainSpec),
    Cascade {
        kind: CascadeKind,
        upper: String,
        lower: String,
    },
}

impl DimFile {
    pub fn build(self, setup: &SetupDescriptor) -> Result<DimRequest, String> {
        let sigma = |name: &str| setup.sigma_point(name).cloned().map_err(|e| e.to_string());
        Ok(match self {
            DimFile::PearlInSigma {
                q,
                p,
                classes_a,
                aug_count,
                aug_classes,
            } => DimRequest::Pearl(PearlChainSpec {
                variant: PearlVariant::InSigma {
                    q: sigma(&q)?,
                    p: sigma(&p)?,
                },
                classes_a,
                aug_count_k: aug_count,
                aug_classes,
            }),
            DimFile::PearlWithSphere {
                x,
                p,
                b,
                classes_a,
                aug_count,
                aug_classes,
            } => DimRequest::Pearl(PearlChainSpec {
                variant: PearlVariant::WithSphereInX {
                    x: setup.w_point(&x).cloned().map_err(|e| e.to_string())?,
                    p: sigma(&p)?,
                    b,
                },
                classes_a,
                aug_count_k: aug_count,
                aug_classes,
            }),
            DimFile::Cascade { kind, n, upper, lower } => {
                let kind = match kind.as_str() {
                    "zero" => CascadeKind::ZeroCascades,
                    "y_to_y" => CascadeKind::YtoY { n },
                    "w_to_y" => CascadeKind::WtoY { n },
                    other => return Err(format!("unknown cascade kind `{other}` (zero, y_to_y, w_to_y)")),
                };
                DimRequest::Cascade { kind, upper, lower }
            }
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationFile {
    pub class_b: Vec<i64>,
    pub multiplicity: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelFile {
    pub class_a: Vec<i64>,
    #[serde(default)]
    pub augmentations: Vec<AugmentationFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeFile {
    pub target: String,
    pub source: String,
    #[serde(default)]
    pub levels: Vec<LevelFile>,
    #[serde(default)]
    pub multiplicities: Vec<u32>,
    #[serde(default)]
    pub sphere_b: Option<Vec<i64>>,
}

impl CascadeFile {
    pub fn build(self, setup: &SetupDescriptor) -> Result<CascadeSpec, Error> {
        Ok(CascadeSpec {
            target: parse_generator(setup, &self.target)?,
            source: parse_generator(setup, &self.source)?,
            levels: self
                .levels
                .into_iter()
                .map(|l| Level {
                    class_a: l.class_a,
                    augmentations: l
                        .augmentations
                        .into_iter()
                        .map(|a| Augmentation {
                            class_b: a.class_b,
                            multiplicity: a.multiplicity,
                        })
                        .collect(),
                })
                .collect(),
            multiplicities: self.multiplicities,
            sphere_b: self.sphere_b,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    /// Column vectors in ambient coordinates.
    pub basis: Vec<Vec<Value>>,
    #[serde(default)]
    pub ambient: Option<usize>,
    pub sign: i64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrientFile {
    FibreSum {
        v1: SpaceFile,
        v2: SpaceFile,
        w: SpaceFile,
        /// Rows of the matrix in ambient coordinates.
        f1: Vec<Vec<Value>>,
        f2: Vec<Vec<Value>>,
    },
    Quotient {
        total: SpaceFile,
        sub: SpaceFile,
    },
}

fn entry(v: &Value) -> Result<Rational, String> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        Value::String(s) => parse_rational(s).ok_or_else(|| format!("bad rational `{s}`")),
        other => Err(format!("matrix entries must be integers or \"p/q\" strings, got {other}")),
    }
}

fn entries(rows: &[Vec<Value>]) -> Result<Vec<Vec<Rational>>, String> {
    rows.iter().map(|r| r.iter().map(entry).collect()).collect()
}

impl SpaceFile {
    pub fn build(&self) -> Result<OrientedSpace<Rational>, String> {
        let cols = entries(&self.basis)?;
        let ambient = match (self.ambient, cols.first()) {
            (Some(a), _) => a,
            (None, Some(c)) => c.len(),
            (None, None) => 0,
        };
        let basis = Matrix::from_columns(&cols, ambient).ok_or("basis columns have unequal lengths")?;
        let sign = Sign::from_i64(self.sign).ok_or("sign must be 1 or -1")?;
        OrientedSpace::new(basis, sign).map_err(|e| e.to_string())
    }
}

pub fn map_matrix(rows: &[Vec<Value>], target: usize, source: usize) -> Result<LinearMapSpec<Rational>, String> {
    let rows = entries(rows)?;
    if rows.len() != target {
        return Err(format!("map has {} rows, the target ambient dimension is {target}", rows.len()));
    }
    let matrix = Matrix::from_rows(rows, source)
        .ok_or_else(|| format!("map rows must have {source} entries"))?;
    Ok(LinearMapSpec { matrix })
}

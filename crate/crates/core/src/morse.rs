//! Signed Morse complexes: boundary matrices from flow counts, the ∂² check
//! and integral homology. Signs follow `docs/signs.md`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::invariant_factors;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed Morse data: {0}")]
    Parse(String),
    #[error("duplicate critical point `{0}`")]
    DuplicatePoint(String),
    #[error("flow mentions unknown critical point `{0}`")]
    UnknownPoint(String),
    #[error("flow {from} -> {to} drops the index by {drop}, not 1")]
    IndexDrop { from: String, to: String, drop: i64 },
    #[error("boundary squared is nonzero: coefficient {value} of {to} in d^2({from})")]
    BoundarySquaredNonzero { from: String, to: String, value: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorsePoint {
    pub name: String,
    pub index: u32,
}

/// Signed count of flow lines of the negative gradient from `from` down to
/// `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flow {
    pub from: String,
    pub to: String,
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseData {
    #[serde(default)]
    pub name: Option<String>,
    pub points: Vec<MorsePoint>,
    #[serde(default)]
    pub flows: Vec<Flow>,
}

/// Data on Y lifted from a base complex on Σ. The generator set is fixed by
/// the base; the vertical counts among lifted generators are input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftedMorseData {
    #[serde(default)]
    pub name: Option<String>,
    pub base: MorseData,
    #[serde(default)]
    pub vertical_counts: Vec<Flow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MorseFile {
    Lifted(LiftedMorseData),
    Plain(MorseData),
}

impl MorseFile {
    /// The complex to compute with: the lift itself for lifted data.
    pub fn complex(&self) -> MorseData {
        match self {
            MorseFile::Plain(d) => d.clone(),
            MorseFile::Lifted(l) => l.to_morse_data(),
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            MorseFile::Plain(d) => d.name.as_deref(),
            MorseFile::Lifted(l) => l.name.as_deref(),
        }
    }
}

pub fn parse_morse_file(text: &str) -> Result<MorseFile, MorseError> {
    serde_json::from_str(text).map_err(|e| MorseError::Parse(e.to_string()))
}

pub fn load_morse_file(path: impl AsRef<Path>) -> Result<MorseFile, MorseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| MorseError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_morse_file(&text)
}

/// p̌ with index M(p) and p̂ with index M(p) + 1 for every base point.
///
/// Orientations: π_Σ maps the unstable manifold of p̌ and the stable
/// manifold of p̂ orientation-preservingly onto those of p.
pub fn lift_generators(base: &MorseData) -> Vec<MorsePoint> {
    base.points
        .iter()
        .flat_map(|p| {
            [
                MorsePoint {
                    name: format!("{}.check", p.name),
                    index: p.index,
                },
                MorsePoint {
                    name: format!("{}.hat", p.name),
                    index: p.index + 1,
                },
            ]
        })
        .collect()
}

impl LiftedMorseData {
    pub fn to_morse_data(&self) -> MorseData {
        MorseData {
            name: self.name.clone(),
            points: lift_generators(&self.base),
            flows: self.vertical_counts.clone(),
        }
    }
}

/// Graded boundary matrices. `boundary[d]` has one row per generator of
/// degree d − 1 and one column per generator of degree d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    pub generators: BTreeMap<u32, Vec<String>>,
    pub boundary: BTreeMap<u32, Vec<Vec<i64>>>,
}

impl ChainComplex {
    pub fn rank_in(&self, d: u32) -> usize {
        self.generators.get(&d).map_or(0, Vec::len)
    }

    pub fn max_degree(&self) -> u32 {
        self.generators.keys().next_back().copied().unwrap_or(0)
    }

    /// Alternating count of generators.
    pub fn euler_characteristic(&self) -> i64 {
        self.generators
            .iter()
            .map(|(&d, g)| if d % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
            .sum()
    }
}

/// Builds the boundary matrices and verifies ∂² = 0.
pub fn differential(data: &MorseData) -> Result<ChainComplex, MorseError> {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut generators: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for p in &data.points {
        if index.insert(&p.name, p.index).is_some() {
            return Err(MorseError::DuplicatePoint(p.name.clone()));
        }
        generators.entry(p.index).or_default().push(p.name.clone());
    }
    let position = |d: u32, name: &str| generators[&d].iter().position(|g| g == name).unwrap();

    let mut boundary: BTreeMap<u32, Vec<Vec<i64>>> = BTreeMap::new();
    for (&d, gens) in &generators {
        if d == 0 {
            continue;
        }
        let below = generators.get(&(d - 1)).map_or(0, Vec::len);
        boundary.insert(d, vec![vec![0; gens.len()]; below]);
    }
    for f in &data.flows {
        let &hi = index.get(f.from.as_str()).ok_or_else(|| MorseError::UnknownPoint(f.from.clone()))?;
        let &lo = index.get(f.to.as_str()).ok_or_else(|| MorseError::UnknownPoint(f.to.clone()))?;
        if hi as i64 - lo as i64 != 1 {
            return Err(MorseError::IndexDrop {
                from: f.from.clone(),
                to: f.to.clone(),
                drop: hi as i64 - lo as i64,
            });
        }
        let m = boundary.get_mut(&hi).unwrap();
        m[position(lo, &f.to)][position(hi, &f.from)] += f.count;
    }

    for (&d, upper) in &boundary {
        if d < 2 {
            continue;
        }
        let Some(lower) = boundary.get(&(d - 1)) else { continue };
        for (i, row) in lower.iter().enumerate() {
            for j in 0..generators[&d].len() {
                let v: i64 = row.iter().enumerate().map(|(k, &a)| a * upper[k][j]).sum();
                if v != 0 {
                    return Err(MorseError::BoundarySquaredNonzero {
                        from: generators[&d][j].clone(),
                        to: generators[&(d - 2)][i].clone(),
                        value: v,
                    });
                }
            }
        }
    }
    Ok(ChainComplex { generators, boundary })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyGroup {
    pub degree: u32,
    pub betti: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<i64>,
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.betti > 0 {
            parts.push(if self.betti == 1 { "Z".to_string() } else { format!("Z^{}", self.betti) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Integral homology in degrees 0..=max index.
pub fn homology(data: &MorseData) -> Result<Vec<HomologyGroup>, MorseError> {
    Ok(complex_homology(&differential(data)?))
}

pub fn complex_homology(c: &ChainComplex) -> Vec<HomologyGroup> {
    let factors: BTreeMap<u32, Vec<i64>> = c
        .boundary
        .iter()
        .map(|(&d, m)| (d, invariant_factors(m)))
        .collect();
    let rank = |d: u32| factors.get(&d).map_or(0, Vec::len);
    if c.generators.is_empty() {
        return vec![];
    }
    (0..=c.max_degree())
        .map(|d| HomologyGroup {
            degree: d,
            betti: c.rank_in(d) - rank(d) - rank(d + 1),
            torsion: factors
                .get(&(d + 1))
                .map(|f| f.iter().copied().filter(|&x| x > 1).collect())
                .unwrap_or_default(),
        })
        .collect()
}

pub fn betti_numbers(groups: &[HomologyGroup]) -> Vec<usize> {
    groups.iter().map(|g| g.betti).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(name: &str, index: u32) -> MorsePoint {
        MorsePoint {
            name: name.into(),
            index,
        }
    }

    fn flow(from: &str, to: &str, count: i64) -> Flow {
        Flow {
            from: from.into(),
            to: to.into(),
            count,
        }
    }

    fn sphere() -> MorseData {
        MorseData {
            name: None,
            points: vec![pt("m", 0), pt("M", 2)],
            flows: vec![],
        }
    }

    #[test]
    fn circle_cancels() {
        let d = MorseData {
            name: None,
            points: vec![pt("m", 0), pt("M", 1)],
            flows: vec![flow("M", "m", 1), flow("M", "m", -1)],
        };
        let c = differential(&d).unwrap();
        assert_eq!(c.boundary[&1], vec![vec![0]]);
        assert_eq!(betti_numbers(&homology(&d).unwrap()), vec![1, 1]);
    }

    #[test]
    fn interval_collapses() {
        let d = MorseData {
            name: None,
            points: vec![pt("m", 0), pt("M", 1)],
            flows: vec![flow("M", "m", -1)],
        };
        let h = homology(&d).unwrap();
        assert_eq!(betti_numbers(&h), vec![0, 0]);
    }

    #[test]
    fn lifts_double() {
        let lift = lift_generators(&sphere());
        let idx: Vec<u32> = lift.iter().map(|p| p.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert!(lift_generators(&MorseData::default()).is_empty());
    }

    #[test]
    fn hopf_and_lens() {
        for (c, betti, torsion) in [(1, vec![1, 0, 0, 1], vec![]), (3, vec![1, 0, 0, 1], vec![3])] {
            let d = LiftedMorseData {
                name: None,
                base: sphere(),
                vertical_counts: vec![flow("M.check", "m.hat", c)],
            }
            .to_morse_data();
            let h = homology(&d).unwrap();
            assert_eq!(betti_numbers(&h), betti);
            assert_eq!(h[1].torsion, torsion);
        }
    }

    #[test]
    fn rejects_bad_data() {
        let mut d = sphere();
        d.flows.push(flow("M", "m", 1));
        assert!(matches!(differential(&d), Err(MorseError::IndexDrop { drop: 2, .. })));
        let d = MorseData {
            name: None,
            points: vec![pt("a", 0), pt("b", 1), pt("c", 2)],
            flows: vec![flow("c", "b", 1), flow("b", "a", 1)],
        };
        assert_eq!(
            differential(&d),
            Err(MorseError::BoundarySquaredNonzero {
                from: "c".into(),
                to: "a".into(),
                value: 1
            })
        );
        let d = MorseData {
            name: None,
            points: vec![pt("a", 0), pt("a", 1)],
            flows: vec![],
        };
        assert_eq!(differential(&d), Err(MorseError::DuplicatePoint("a".into())));
    }

    #[test]
    fn parses_both_shapes() {
        let plain = r#"{"points":[{"name":"m","index":0}]}"#;
        assert!(matches!(parse_morse_file(plain).unwrap(), MorseFile::Plain(_)));
        let lifted = r#"{"base":{"points":[{"name":"m","index":0}]},"vertical_counts":[]}"#;
        let f = parse_morse_file(lifted).unwrap();
        assert_eq!(f.complex().points.len(), 2);
    }
}

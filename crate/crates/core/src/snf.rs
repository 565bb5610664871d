//! Smith normal form of small integer matrices.

use num_integer::Integer;

/// Nonzero invariant factors d₁ | d₂ | … of `rows` (all positive).
///
/// Entries are widened to `i128`; the matrices met here are tiny.
pub fn invariant_factors(rows: &[Vec<i64>]) -> Vec<i64> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let nr = m.len();
    let nc = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry in the remaining block
        let pivot = (t..nr)
            .flat_map(|i| (t..nc).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..nr {
                let q = Integer::div_floor(&m[i][t], &m[t][t]);
                if q != 0 {
                    for j in t..nc {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..nc {
                let q = Integer::div_floor(&m[t][j], &m[t][t]);
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                // the pivot must divide the rest of the block
                let bad = (t + 1..nr)
                    .flat_map(|i| (t + 1..nc).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % m[t][t] != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..nc {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of row t / column t to the pivot
            let best = (t..nr)
                .map(|i| (i, t))
                .chain((t..nc).map(|j| (t, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].abs())
                .expect("pivot is nonzero");
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].abs() as i64);
        t += 1;
    }
    diag
}

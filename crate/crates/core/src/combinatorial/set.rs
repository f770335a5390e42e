use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experts::LinearOracle;

/// A binary vector of dimension `d`, stored as its sorted support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    d: usize,
    ones: Vec<usize>,
}

impl Vertex {
    pub fn new(d: usize, mut ones: Vec<usize>) -> Result<Self> {
        ones.sort_unstable();
        if ones.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("vertex", "repeated coordinate"));
        }
        if ones.last().is_some_and(|&j| j >= d) {
            return Err(Error::param("vertex", format!("coordinate outside 0..{d}")));
        }
        Ok(Vertex { d, ones })
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Vertex {
            d: bits.len(),
            ones: bits.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.ones.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.ones
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.d];
        for &j in &self.ones {
            bits[j] = true;
        }
        bits
    }

    pub fn dot(&self, scores: &[f64]) -> f64 {
        self.ones.iter().map(|&j| scores[j]).sum()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.to_bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Indicator of the `m` smallest scores, ties to the lowest index.
pub fn topm_oracle(scores: &[f64], m: usize) -> Vertex {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // stable sort keeps lower indices first among equal scores
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ones = order[..m.min(scores.len())].to_vec();
    ones.sort_unstable();
    Vertex {
        d: scores.len(),
        ones,
    }
}

/// Exact minimiser over an explicit list, ties to the earliest entry.
pub fn brute_force_oracle<'a>(vertices: &'a [Vertex], scores: &[f64]) -> Result<&'a Vertex> {
    let mut best: Option<(&Vertex, f64)> = None;
    for v in vertices {
        let s = v.dot(scores);
        if best.is_none_or(|(_, b)| s < b) {
            best = Some((v, s));
        }
    }
    best.map(|(v, _)| v)
        .ok_or_else(|| Error::param("decision set", "vertex list is empty"))
}

/// A decision set of `m`-sparse vertices in `{0,1}^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecisionSet {
    /// Every vertex with exactly `m` ones.
    TopM { d: usize, m: usize },
    /// An explicit list, searched by enumeration.
    Explicit {
        d: usize,
        m: usize,
        vertices: Vec<Vertex>,
    },
}

impl DecisionSet {
    pub fn top_m(d: usize, m: usize) -> Result<Self> {
        if m == 0 || m > d {
            return Err(Error::param("m", format!("must lie in 1..={d}, got {m}")));
        }
        Ok(DecisionSet::TopM { d, m })
    }

    pub fn explicit(vertices: Vec<Vertex>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::param("decision set", "vertex list is empty"))?;
        let (d, m) = (first.dim(), first.weight());
        if m == 0 {
            return Err(Error::param("m", "vertices must have at least one 1"));
        }
        for v in &vertices {
            if v.dim() != d || v.weight() != m {
                return Err(Error::param(
                    "decision set",
                    format!("vertex {v} does not have dimension {d} and {m} ones"),
                ));
            }
        }
        Ok(DecisionSet::Explicit { d, m, vertices })
    }

    pub fn d(&self) -> usize {
        match self {
            DecisionSet::TopM { d, .. } | DecisionSet::Explicit { d, .. } => *d,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            DecisionSet::TopM { m, .. } | DecisionSet::Explicit { m, .. } => *m,
        }
    }

    /// All vertices, in lexicographic order of their supports for the top-`m`
    /// family and in list order otherwise.
    pub fn enumerate(&self) -> Vec<Vertex> {
        match self {
            DecisionSet::Explicit { vertices, .. } => vertices.clone(),
            DecisionSet::TopM { d, m } => {
                let mut out = Vec::new();
                let mut combo: Vec<usize> = (0..*m).collect();
                loop {
                    out.push(Vertex {
                        d: *d,
                        ones: combo.clone(),
                    });
                    // advance to the next combination in lexicographic order
                    let Some(i) = (0..*m).rev().find(|&i| combo[i] < d - m + i) else {
                        break;
                    };
                    combo[i] += 1;
                    for j in i + 1..*m {
                        combo[j] = combo[j - 1] + 1;
                    }
                }
                out
            }
        }
    }
}

impl LinearOracle for DecisionSet {
    type Action = Vertex;

    fn dim(&self) -> usize {
        self.d()
    }

    fn argmin(&self, scores: &[f64]) -> Vertex {
        match self {
            DecisionSet::TopM { m, .. } => topm_oracle(scores, *m),
            DecisionSet::Explicit { vertices, .. } => brute_force_oracle(vertices, scores)
                .expect("explicit sets are nonempty by construction")
                .clone(),
        }
    }

    fn value(&self, action: &Vertex, scores: &[f64]) -> f64 {
        action.dot(scores)
    }

    fn all_actions(&self) -> Option<Vec<Vertex>> {
        Some(self.enumerate())
    }
}

/// Reads one vertex per line, each line `d` characters from `{0, 1}`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_vertices(text: &str) -> Result<DecisionSet> {
    let mut vertices = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bits = line
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "line {}: unexpected character `{other}` in vertex",
                    k + 1
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        vertices.push(Vertex::from_bits(&bits));
    }
    DecisionSet::explicit(vertices)
}

pub fn write_vertices(set: &DecisionSet) -> String {
    let mut out = String::new();
    for v in set.enumerate() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

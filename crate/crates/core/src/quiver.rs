//! Finite multidigraphs with named arrows and their exchange matrices.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

impl Arrow {
    pub fn new(id: impl Into<String>, source: usize, target: usize) -> Self {
        Arrow {
            id: id.into(),
            source,
            target,
        }
    }
}

/// A quiver on vertices `0..n`. Parallel arrows are kept individually.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawQuiver")]
pub struct Quiver {
    n: usize,
    arrows: Vec<Arrow>,
}

#[derive(Deserialize)]
struct RawQuiver {
    n: usize,
    arrows: Vec<Arrow>,
}

impl TryFrom<RawQuiver> for Quiver {
    type Error = Error;

    fn try_from(raw: RawQuiver) -> Result<Self> {
        Quiver::new(raw.n, raw.arrows)
    }
}

impl Quiver {
    /// Validates vertex ranges and id uniqueness. Loops are accepted here and
    /// rejected by the operations that cannot handle them.
    pub fn new(n: usize, arrows: Vec<Arrow>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(arrows.len());
        for a in &arrows {
            for v in [a.source, a.target] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if !seen.insert(a.id.as_str()) {
                return Err(Error::InvalidQuiver(format!("duplicate arrow id {:?}", a.id)));
            }
        }
        Ok(Quiver { n, arrows })
    }

    /// Builds a quiver from `(source, target)` pairs, naming arrows `a0, a1, ...`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let arrows = edges
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| Arrow::new(format!("a{i}"), s, t))
            .collect();
        Quiver::new(n, arrows)
    }

    pub fn empty(n: usize) -> Self {
        Quiver {
            n,
            arrows: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    pub fn has_loops(&self) -> bool {
        self.arrows.iter().any(|a| a.source == a.target)
    }

    pub fn check_vertex(&self, k: usize) -> Result<()> {
        if k >= self.n {
            Err(Error::VertexOutOfRange { vertex: k, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn arrows_into(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.target == v)
            .map(|(i, _)| i)
    }

    pub fn arrows_out_of(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.source == v)
            .map(|(i, _)| i)
    }

    /// `m[i][j]` = number of arrows `i -> j`.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0u32; self.n]; self.n];
        for a in &self.arrows {
            m[a.source][a.target] += 1;
        }
        m
    }

    /// True when some pair of vertices carries arrows in both directions.
    pub fn has_two_cycles(&self) -> bool {
        self.two_cycle().is_some()
    }

    pub fn two_cycle(&self) -> Option<(usize, usize)> {
        let m = self.adjacency();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if m[i][j] > 0 && m[j][i] > 0 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Relabels vertices by `perm` (vertex `v` becomes `perm[v]`); arrow ids are kept.
    pub fn relabel(&self, perm: &[usize]) -> Quiver {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow::new(a.id.clone(), perm[a.source], perm[a.target]))
            .collect();
        Quiver { n: self.n, arrows }
    }

    /// The quiver with every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow::new(a.id.clone(), a.target, a.source))
            .collect();
        Quiver { n: self.n, arrows }
    }

    pub fn exchange_matrix(&self) -> Result<ExchangeMatrix> {
        exchange_matrix(self)
    }

    /// Full subquiver on `k`, the targets of arrows leaving `k` and the sources
    /// of arrows entering `k`. The centre is vertex 0 of the result.
    pub fn neighborhood(&self, k: usize) -> Result<Neighborhood> {
        self.check_vertex(k)?;
        let mut others = BTreeSet::new();
        for a in &self.arrows {
            if a.source == k && a.target != k {
                others.insert(a.target);
            }
            if a.target == k && a.source != k {
                others.insert(a.source);
            }
        }
        let mut vertices = vec![k];
        vertices.extend(others);
        let local = |v: usize| vertices.iter().position(|&w| w == v);
        let arrows = self
            .arrows
            .iter()
            .filter_map(|a| {
                Some(Arrow::new(a.id.clone(), local(a.source)?, local(a.target)?))
            })
            .collect();
        let quiver = Quiver {
            n: vertices.len(),
            arrows,
        };
        Ok(Neighborhood { quiver, vertices })
    }

    /// Graphviz rendering: one node per vertex, one edge per arrow labelled by id.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph quiver {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v} [label=\"{v}\"];");
        }
        for a in &self.arrows {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                a.source,
                a.target,
                a.id.replace('"', "\\\"")
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    pub quiver: Quiver,
    /// Original vertex of each local vertex; `vertices[0]` is the centre.
    pub vertices: Vec<usize>,
}

/// Skew-symmetric integer matrix `b[i][j] = #(i -> j) - #(j -> i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    b: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn from_rows(b: Vec<Vec<i64>>) -> Result<Self> {
        let n = b.len();
        for (i, row) in b.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidQuiver("exchange matrix is not square".into()));
            }
            for j in 0..n {
                if b[i][j] != -b[j][i] {
                    return Err(Error::InvalidQuiver(format!(
                        "exchange matrix not skew-symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(ExchangeMatrix { b })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.b[i][j]
    }

    pub fn mutate(&self, k: usize) -> Result<ExchangeMatrix> {
        mutate_matrix(self, k)
    }

    /// The 2-acyclic quiver with this exchange matrix, arrows named `a0, a1, ...`
    /// in row-major order.
    pub fn to_quiver(&self) -> Quiver {
        let mut edges = Vec::new();
        for i in 0..self.n() {
            for j in 0..self.n() {
                for _ in 0..self.b[i][j].max(0) {
                    edges.push((i, j));
                }
            }
        }
        Quiver::from_edges(self.n(), &edges).expect("indices are in range")
    }
}

pub fn exchange_matrix(q: &Quiver) -> Result<ExchangeMatrix> {
    let mut b = vec![vec![0i64; q.n]; q.n];
    for a in &q.arrows {
        if a.source == a.target {
            return Err(Error::LoopAtVertex(a.source));
        }
        b[a.source][a.target] += 1;
        b[a.target][a.source] -= 1;
    }
    Ok(ExchangeMatrix { b })
}

/// Fomin-Zelevinsky mutation of an exchange matrix at `k`.
pub fn mutate_matrix(m: &ExchangeMatrix, k: usize) -> Result<ExchangeMatrix> {
    let n = m.n();
    if k >= n {
        return Err(Error::VertexOutOfRange { vertex: k, n });
    }
    let b = &m.b;
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + b[i][k].signum() * (b[i][k] * b[k][j]).max(0)
            };
        }
    }
    Ok(ExchangeMatrix { b: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize) -> Quiver {
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Quiver::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn kronecker_exchange_matrix() {
        let q = Quiver::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(q.exchange_matrix().unwrap().rows(), &[vec![0, 2], vec![-2, 0]]);
    }

    #[test]
    fn empty_and_linear_exchange_matrices() {
        let b = Quiver::empty(3).exchange_matrix().unwrap();
        assert!(b.rows().iter().flatten().all(|&x| x == 0));
        let b = linear(3).exchange_matrix().unwrap();
        assert_eq!(b.rows(), &[vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]);
    }

    #[test]
    fn loops_are_rejected() {
        let q = Quiver::from_edges(2, &[(1, 1)]).unwrap();
        assert_eq!(q.exchange_matrix(), Err(Error::LoopAtVertex(1)));
    }

    #[test]
    fn invalid_quivers_are_rejected() {
        assert!(matches!(
            Quiver::from_edges(2, &[(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
        let dup = vec![Arrow::new("x", 0, 1), Arrow::new("x", 1, 0)];
        assert!(matches!(Quiver::new(2, dup), Err(Error::InvalidQuiver(_))));
    }

    /// Entry-by-entry application of the mutation rule, written out by hand.
    fn mutate_by_cases(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
        let n = b.len();
        let mut out = b.to_vec();
        for i in 0..n {
            for j in 0..n {
                if i == k || j == k {
                    out[i][j] = -b[i][j];
                } else if b[i][k] > 0 && b[k][j] > 0 {
                    out[i][j] = b[i][j] + b[i][k] * b[k][j];
                } else if b[i][k] < 0 && b[k][j] < 0 {
                    out[i][j] = b[i][j] - b[i][k] * b[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn linear_a3_mutated_at_middle_is_a_cycle() {
        let b = linear(3).exchange_matrix().unwrap();
        let m = b.mutate(1).unwrap();
        let expected = vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]];
        assert_eq!(m.rows(), expected.as_slice());
        assert_eq!(mutate_by_cases(b.rows(), 1), expected);
    }

    #[test]
    fn kronecker_mutation_flips_signs() {
        let b = ExchangeMatrix::from_rows(vec![vec![0, 2], vec![-2, 0]]).unwrap();
        assert_eq!(b.mutate(0).unwrap().rows(), &[vec![0, -2], vec![2, 0]]);
        assert!(b.mutate(2).is_err());
    }

    #[test]
    fn neighborhoods() {
        let n = Quiver::empty(3).neighborhood(1).unwrap();
        assert_eq!(n.quiver.n(), 1);
        assert_eq!(n.quiver.arrow_count(), 0);

        let n = linear(3).neighborhood(1).unwrap();
        assert_eq!(n.vertices, vec![1, 0, 2]);
        let edges: Vec<_> = n.quiver.arrows().iter().map(|a| (a.source, a.target)).collect();
        assert_eq!(edges, vec![(1, 0), (0, 2)]);

        let cycle = Quiver::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let n = cycle.neighborhood(2).unwrap();
        assert_eq!(n.quiver.n(), 3);
        assert_eq!(n.quiver.arrow_count(), 3);
    }

    #[test]
    fn dot_output_lists_every_arrow() {
        let dot = linear(3).to_dot();
        assert!(dot.contains("0 -> 1 [label=\"a0\"]"));
        assert!(dot.contains("1 -> 2 [label=\"a1\"]"));
    }

    #[test]
    fn json_round_trip_validates() {
        let q = linear(3);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"n":3,"arrows":[{"id":"a0","source":0,"target":1},{"id":"a1","source":1,"target":2}]}"#);
        let back: Quiver = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Quiver>(r#"{"n":1,"arrows":[{"id":"a","source":0,"target":3}]}"#).is_err());
    }
}

//! Canonical labeling of multidigraphs by partition refinement and
//! individualization with automorphism pruning.
//!
//! The canonical form is the lexicographically smallest adjacency matrix
//! among the leaves of the search tree. Since refinement only uses
//! label-independent data, isomorphic quivers reach the same minimum.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::quiver::Quiver;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    /// `[n, m[0][0], m[0][1], ...]` with multiplicities saturated at 255.
    pub bytes: Vec<u8>,
    /// `perm[v]` is the canonical position of vertex `v`.
    pub perm: Vec<usize>,
}

/// Result of a full canonical search: the key plus generators of the
/// automorphism group, expressed on the original labels.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub key: CanonicalKey,
    pub automorphisms: Vec<Vec<usize>>,
}

pub fn canonicalize(q: &Quiver) -> CanonicalKey {
    canonical_search(&adjacency_bytes(q)).key
}

pub fn canonical_search(adj: &[Vec<u8>]) -> Canonical {
    let n = adj.len();
    let mut search = Search {
        adj,
        n,
        best: None,
        automorphisms: Vec::new(),
    };
    let initial = refine(adj, vec![(0..n).collect()]);
    let mut prefix = Vec::new();
    search.descend(initial, &mut prefix);
    let (matrix, perm) = search.best.expect("search visits at least one leaf");
    let mut bytes = Vec::with_capacity(1 + n * n);
    bytes.push(n.min(255) as u8);
    bytes.extend(matrix);
    Canonical {
        key: CanonicalKey { bytes, perm },
        automorphisms: search.automorphisms,
    }
}

pub fn is_isomorphic(q1: &Quiver, q2: &Quiver) -> bool {
    q1.n() == q2.n()
        && q1.arrow_count() == q2.arrow_count()
        && canonicalize(q1).bytes == canonicalize(q2).bytes
}

pub(crate) fn adjacency_bytes(q: &Quiver) -> Vec<Vec<u8>> {
    q.adjacency()
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.min(255) as u8).collect())
        .collect()
}

type Partition = Vec<Vec<usize>>;

struct Search<'a> {
    adj: &'a [Vec<u8>],
    n: usize,
    best: Option<(Vec<u8>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, partition: Partition, prefix: &mut Vec<usize>) {
        let Some(cell_idx) = partition.iter().position(|c| c.len() > 1) else {
            self.leaf(&partition);
            return;
        };
        let cell = partition[cell_idx].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.equivalent_to_explored(v, &explored, prefix) {
                continue;
            }
            explored.push(v);
            let mut next = partition.clone();
            let rest: Vec<usize> = cell.iter().copied().filter(|&w| w != v).collect();
            next.splice(cell_idx..=cell_idx, [vec![v], rest]);
            let next = refine(self.adj, next);
            prefix.push(v);
            self.descend(next, prefix);
            prefix.pop();
        }
    }

    /// Orbit test under the automorphisms found so far that fix `prefix`.
    fn equivalent_to_explored(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        let gens: Vec<&Vec<usize>> = self
            .automorphisms
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for g in gens {
            for (x, &gx) in g.iter().enumerate() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, gx));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == root)
    }

    fn leaf(&mut self, partition: &Partition) {
        let mut perm = vec![0usize; self.n];
        for (pos, cell) in partition.iter().enumerate() {
            perm[cell[0]] = pos;
        }
        let mut inv = vec![0usize; self.n];
        for (v, &p) in perm.iter().enumerate() {
            inv[p] = v;
        }
        let mut matrix = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                matrix.push(self.adj[inv[i]][inv[j]]);
            }
        }
        match &self.best {
            None => self.best = Some((matrix, perm)),
            Some((best, best_perm)) => match matrix.cmp(best) {
                std::cmp::Ordering::Less => self.best = Some((matrix, perm)),
                std::cmp::Ordering::Equal => {
                    // best_perm^{-1} . perm maps this leaf's labeling onto the best one.
                    let mut best_inv = vec![0usize; self.n];
                    for (v, &p) in best_perm.iter().enumerate() {
                        best_inv[p] = v;
                    }
                    let auto: Vec<usize> = (0..self.n).map(|v| best_inv[perm[v]]).collect();
                    if auto.iter().enumerate().any(|(i, &x)| i != x) {
                        self.automorphisms.push(auto);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }
}

/// Iterated degree-profile refinement: each cell is split by the multiset of
/// multiplicities to and from every cell, sub-cells ordered by that profile.
fn refine(adj: &[Vec<u8>], mut partition: Partition) -> Partition {
    loop {
        let mut changed = false;
        let mut next: Partition = Vec::with_capacity(partition.len());
        for cell in &partition {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut groups: BTreeMap<Vec<(Vec<u8>, Vec<u8>)>, Vec<usize>> = BTreeMap::new();
            for &v in cell {
                let profile: Vec<(Vec<u8>, Vec<u8>)> = partition
                    .iter()
                    .map(|other| {
                        let mut out: Vec<u8> = other.iter().map(|&u| adj[v][u]).collect();
                        let mut inn: Vec<u8> = other.iter().map(|&u| adj[u][v]).collect();
                        out.sort_unstable();
                        inn.sort_unstable();
                        (out, inn)
                    })
                    .collect();
                groups.entry(profile).or_default().push(v);
            }
            if groups.len() > 1 {
                changed = true;
            }
            next.extend(groups.into_values());
        }
        partition = next;
        if !changed {
            return partition;
        }
    }
}

/// All elements of the group generated by `gens`, or `None` past `cap` elements.
pub fn group_elements(n: usize, gens: &[Vec<usize>], cap: usize) -> Option<Vec<Vec<usize>>> {
    let identity: Vec<usize> = (0..n).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity.clone()]);
    let mut out = vec![identity];
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let gh: Vec<usize> = (0..n).map(|v| h[g[v]]).collect();
            if seen.insert(gh.clone()) {
                if out.len() >= cap {
                    return None;
                }
                out.push(gh.clone());
                queue.push_back(gh);
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Exhaustive isomorphism test over all vertex bijections.
    fn brute_force_isomorphic(a: &Quiver, b: &Quiver) -> bool {
        if a.n() != b.n() {
            return false;
        }
        let (ma, mb) = (a.adjacency(), b.adjacency());
        permutations(a.n()).into_iter().any(|p| {
            (0..a.n()).all(|i| (0..a.n()).all(|j| ma[i][j] == mb[p[i]][p[j]]))
        })
    }

    fn quiver_strategy(max_n: usize) -> impl Strategy<Value = Quiver> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..(2 * n + 2)).prop_map(move |edges| {
                let edges: Vec<_> = edges.into_iter().filter(|(s, t)| s != t).collect();
                Quiver::from_edges(n, &edges).unwrap()
            })
        })
    }

    fn cycle3() -> Quiver {
        Quiver::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn renamed_and_relabeled_copies_share_keys() {
        let q = Quiver::from_edges(4, &[(0, 1), (0, 1), (1, 2), (2, 0), (2, 3), (3, 1), (0, 3)])
            .unwrap();
        let relabeled = q.relabel(&[2, 0, 3, 1]);
        assert_eq!(canonicalize(&q).bytes, canonicalize(&relabeled).bytes);
        assert!(is_isomorphic(&q, &relabeled));
    }

    #[test]
    fn unique_source_quiver_differs_from_its_opposite() {
        // 0 is the unique source with two out-arrows; in the opposite it is a sink.
        let q = Quiver::from_edges(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let op = q.opposite();
        assert!(!brute_force_isomorphic(&q, &op));
        assert_ne!(canonicalize(&q).bytes, canonicalize(&op).bytes);
    }

    #[test]
    fn different_arrow_counts_are_not_isomorphic() {
        let linear = Quiver::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let dense = Quiver::from_edges(4, &[(0, 1), (0, 1), (1, 2), (2, 0), (2, 3), (3, 1), (0, 3)])
            .unwrap();
        assert!(!is_isomorphic(&linear, &dense));
    }

    #[test]
    fn highly_symmetric_inputs_finish() {
        let empty = Quiver::empty(16);
        let c = canonical_search(&adjacency_bytes(&empty));
        assert_eq!(c.key.bytes.len(), 1 + 256);
        let elems = group_elements(3, &canonical_search(&adjacency_bytes(&cycle3())).automorphisms, 100)
            .unwrap();
        assert_eq!(elems.len(), 3);
    }

    #[test]
    fn perm_realizes_the_canonical_matrix() {
        let q = Quiver::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 0)]).unwrap();
        let key = canonicalize(&q);
        let r = q.relabel(&key.perm);
        let flat: Vec<u8> = r.adjacency().into_iter().flatten().map(|x| x as u8).collect();
        assert_eq!(&key.bytes[1..], flat.as_slice());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn key_is_invariant_under_relabeling(q in quiver_strategy(8), seed in any::<u64>()) {
            let mut perm: Vec<usize> = (0..q.n()).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(canonicalize(&q).bytes, canonicalize(&q.relabel(&perm)).bytes);
        }

        #[test]
        fn agrees_with_exhaustive_search(a in quiver_strategy(6), b in quiver_strategy(6)) {
            prop_assert_eq!(is_isomorphic(&a, &b), brute_force_isomorphic(&a, &b));
        }

        #[test]
        fn agrees_with_exhaustive_search_on_relabels(a in quiver_strategy(6), k in 0usize..720) {
            let perms = permutations(a.n());
            let b = a.relabel(&perms[k % perms.len()]);
            prop_assert!(is_isomorphic(&a, &b));
        }
    }
}

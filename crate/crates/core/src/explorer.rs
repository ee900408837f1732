//! Mutation classes: breadth-first enumeration up to isomorphism, the
//! mutation graph, node invariants and the derived-equivalence verdicts.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::CanonicalKey;
use crate::error::{Error, Result};
use crate::gentle::{self, AagInvariant, GentlePresentation};
use crate::jacobian::{self, Side};
use crate::potential::{mutate_qp, qp_key, KeyMode, QpJson, QP};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerateConfig {
    pub key_mode: KeyMode,
    pub node_cap: usize,
    /// Stop after this many BFS levels (`None` for the full closure).
    pub max_depth: Option<usize>,
    /// Worker threads (`None` for the rayon default).
    pub threads: Option<usize>,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        EnumerateConfig {
            key_mode: KeyMode::Quiver,
            node_cap: 10_000,
            max_depth: None,
            threads: None,
        }
    }
}

/// Which invariant bundle to attach to the nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantKind {
    /// Thread invariants and path-counting Cartan matrix (surface QPs).
    Gentle,
    /// Gröbner-basis Cartan matrix, Coxeter polynomial, tilting checks.
    Jacobian,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NodeInvariants {
    pub n: usize,
    pub e: usize,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aag: Option<Vec<[usize; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cartan_det: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coxeter: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_vertices: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_minus: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_plus: Option<Vec<bool>>,
    /// Set when the invariants could not be computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ClassNode {
    pub key: CanonicalKey,
    /// Canonically relabeled representative.
    pub qp: QP,
    pub depth: usize,
    pub invariants: NodeInvariants,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub from: usize,
    pub vertex: usize,
    pub to: usize,
}

/// The enumerated part of a mutation class.
#[derive(Clone, Debug)]
pub struct MutationClass {
    pub key_mode: KeyMode,
    pub nodes: Vec<ClassNode>,
    pub edges: Vec<Edge>,
    /// Index of the seed in `nodes`.
    pub seed: usize,
    /// True when the BFS closed without hitting the node cap or depth limit.
    pub complete: bool,
    /// Distinct structural keys among all QPs produced by the run.
    pub structural_keys_seen: usize,
    pub invariant_kind: Option<InvariantKind>,
}

fn run_in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

type Mutant = (usize, usize, Result<(QP, CanonicalKey, Vec<u8>)>);

/// Breadth-first closure of `seed` under mutation at every vertex.
pub fn enumerate_class(seed: &QP, cfg: &EnumerateConfig) -> Result<MutationClass> {
    if !seed.is_reduced() {
        return Err(Error::NotReduced);
    }
    run_in_pool(cfg.threads, || enumerate_inner(seed, cfg))?
}

fn canonical_node(qp: &QP, mode: KeyMode) -> (QP, CanonicalKey, Vec<u8>) {
    let (canon, _) = qp.canonical_form();
    let key = qp_key(&canon, mode);
    let structural = if mode == KeyMode::Structural {
        key.bytes.clone()
    } else {
        qp_key(&canon, KeyMode::Structural).bytes
    };
    (canon, key, structural)
}

fn enumerate_inner(seed: &QP, cfg: &EnumerateConfig) -> Result<MutationClass> {
    let (canon, key, structural) = canonical_node(seed, cfg.key_mode);
    let mut index: HashMap<Vec<u8>, usize> = HashMap::from([(key.bytes.clone(), 0)]);
    let mut structural_seen: HashSet<Vec<u8>> = HashSet::from([structural]);
    let mut nodes = vec![ClassNode {
        key,
        qp: canon,
        depth: 0,
        invariants: NodeInvariants::default(),
    }];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut complete = true;
    let mut depth = 0;
    while !frontier.is_empty() {
        if cfg.max_depth.is_some_and(|d| depth >= d) {
            complete = false;
            break;
        }
        let tasks: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&i| (0..nodes[i].qp.n()).map(move |k| (i, k)))
            .collect();
        let mutants: Vec<Mutant> = tasks
            .par_iter()
            .map(|&(i, k)| {
                let r = mutate_qp(&nodes[i].qp, k).map(|m| canonical_node(&m, cfg.key_mode));
                (i, k, r)
            })
            .collect();
        depth += 1;
        let mut next = Vec::new();
        for (i, k, r) in mutants {
            let (qp, key, structural) = r.map_err(|e| Error::Enumeration {
                node: i,
                vertex: k,
                source: Box::new(e),
            })?;
            structural_seen.insert(structural);
            let target = match index.get(&key.bytes) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= cfg.node_cap {
                        complete = false;
                        continue;
                    }
                    let j = nodes.len();
                    index.insert(key.bytes.clone(), j);
                    nodes.push(ClassNode {
                        key,
                        qp,
                        depth,
                        invariants: NodeInvariants::default(),
                    });
                    next.push(j);
                    j
                }
            };
            edges.push(Edge {
                from: i,
                vertex: k,
                to: target,
            });
        }
        frontier = next;
    }

    // Canonical order: sort nodes by key.
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].key.bytes.cmp(&nodes[b].key.bytes));
    let mut new_id = vec![0; nodes.len()];
    for (pos, &old) in order.iter().enumerate() {
        new_id[old] = pos;
    }
    let mut slots: Vec<Option<ClassNode>> = nodes.into_iter().map(Some).collect();
    let nodes: Vec<ClassNode> = order.iter().map(|&o| slots[o].take().expect("each node once")).collect();
    let mut edges: Vec<Edge> = edges
        .into_iter()
        .map(|e| Edge {
            from: new_id[e.from],
            vertex: e.vertex,
            to: new_id[e.to],
        })
        .collect();
    edges.sort();
    let mut class = MutationClass {
        key_mode: cfg.key_mode,
        nodes,
        edges,
        seed: new_id[0],
        complete,
        structural_keys_seen: structural_seen.len(),
        invariant_kind: None,
    };
    for node in class.nodes.iter_mut() {
        let q = node.qp.quiver();
        node.invariants.n = q.n();
        node.invariants.e = q.arrow_count();
        node.invariants.t = node.qp.triangle_count();
    }
    Ok(class)
}

impl MutationClass {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Edges `a -> b` with no edge `b -> a`. Vertex labels are not compared
    /// since each node numbers its vertices canonically.
    pub fn asymmetric_edges(&self) -> Vec<Edge> {
        let set: HashSet<(usize, usize)> = self.edges.iter().map(|e| (e.from, e.to)).collect();
        self.edges
            .iter()
            .filter(|e| !set.contains(&(e.to, e.from)))
            .copied()
            .collect()
    }

    /// Nodes reachable from the seed along edges.
    pub fn reachable_from_seed(&self) -> usize {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.seed];
        seen[self.seed] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    pub fn is_connected(&self) -> bool {
        self.reachable_from_seed() == self.nodes.len()
    }

    pub fn key_set(&self) -> BTreeSet<Vec<u8>> {
        self.nodes.iter().map(|n| n.key.bytes.clone()).collect()
    }

    /// Attaches invariants to every node, in parallel.
    pub fn compute_invariants(&mut self, kind: InvariantKind, threads: Option<usize>) -> Result<()> {
        let results: Vec<NodeInvariants> = run_in_pool(threads, || {
            self.nodes
                .par_iter()
                .map(|node| node_invariants(&node.qp, kind))
                .collect()
        })?;
        for (node, inv) in self.nodes.iter_mut().zip(results) {
            node.invariants = inv;
        }
        self.invariant_kind = Some(kind);
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph mutation_class {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{:016x}\"];", key_hash(&node.key.bytes));
        }
        for e in &self.edges {
            if e.from <= e.to {
                let _ = writeln!(s, "  n{} -- n{} [label=\"{}\"];", e.from, e.to, e.vertex);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// FNV-1a hash of a canonical key, used as a short node label.
pub fn key_hash(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn node_invariants(qp: &QP, kind: InvariantKind) -> NodeInvariants {
    let mut inv = NodeInvariants {
        n: qp.n(),
        e: qp.arrow_count(),
        t: qp.triangle_count(),
        ..NodeInvariants::default()
    };
    let result = match kind {
        InvariantKind::Gentle => gentle::gentle_report(qp).map(|r| {
            inv.aag = Some(r.aag);
            inv.cartan_det = Some(r.cartan_det);
            inv.good_vertices = Some(r.good_vertices);
            inv.mu_minus = Some(r.mu_minus);
            inv.mu_plus = Some(r.mu_plus);
        }),
        InvariantKind::Jacobian => jacobian::jacobian_report(qp).map(|r| {
            inv.cartan_det = Some(r.cartan_det);
            inv.coxeter = (!r.coxeter.is_empty()).then_some(r.coxeter);
            inv.mu_minus = Some(r.tilting_minus);
            inv.mu_plus = Some(r.tilting_plus);
        }),
    };
    if let Err(e) = result {
        inv.error = Some(e.to_string());
    }
    inv
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Verified { reason: String },
    Refuted { witness: String },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Verified { .. } => "verified",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub delta1: Verdict,
    pub delta2: Verdict,
    pub delta3: Verdict,
    pub delta4: Verdict,
    pub good_edges: usize,
    pub non_good_edges: Vec<Edge>,
    pub uncertified_edges: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeStatus {
    Good,
    NotGood,
    Unknown,
}

fn edge_status(class: &MutationClass, e: &Edge) -> EdgeStatus {
    let a = &class.nodes[e.from].invariants;
    let b = &class.nodes[e.to].invariants;
    match class.invariant_kind {
        Some(InvariantKind::Gentle) => match &a.good_vertices {
            Some(g) if g[e.vertex] => EdgeStatus::Good,
            Some(_) => EdgeStatus::NotGood,
            None => EdgeStatus::Unknown,
        },
        Some(InvariantKind::Jacobian) => {
            if a.cartan_det.is_none() || b.cartan_det.is_none() {
                return EdgeStatus::Unknown;
            }
            if a.cartan_det != b.cartan_det || a.coxeter != b.coxeter {
                return EdgeStatus::NotGood;
            }
            let tilting = a.mu_minus.as_ref().is_some_and(|m| m[e.vertex])
                || a.mu_plus.as_ref().is_some_and(|p| p[e.vertex]);
            if tilting {
                EdgeStatus::Good
            } else {
                EdgeStatus::Unknown
            }
        }
        None => EdgeStatus::Unknown,
    }
}

/// The four conditions for the enumerated class. Invariants must have been
/// computed with [`MutationClass::compute_invariants`].
pub fn delta_report(class: &MutationClass) -> DeltaReport {
    let seed = &class.nodes[class.seed].invariants;
    let delta1 = match (&seed.error, seed.cartan_det) {
        (None, Some(_)) => Verdict::Verified {
            reason: "the seed's algebra has a finite basis".into(),
        },
        (Some(e), _) if e.contains("infinite-dimensional") => Verdict::Refuted { witness: e.clone() },
        (Some(e), _) => Verdict::Inconclusive { reason: e.clone() },
        (None, None) => Verdict::Inconclusive {
            reason: "invariants not computed".into(),
        },
    };

    let mut good = 0;
    let mut unknown = 0;
    let mut bad = Vec::new();
    for e in &class.edges {
        match edge_status(class, e) {
            EdgeStatus::Good => good += 1,
            EdgeStatus::NotGood => bad.push(*e),
            EdgeStatus::Unknown => unknown += 1,
        }
    }

    // Invariant witnesses against derived equivalence.
    let mut witness = None;
    for (i, node) in class.nodes.iter().enumerate() {
        let inv = &node.invariants;
        if inv.cartan_det.is_some() && inv.cartan_det != seed.cartan_det && seed.cartan_det.is_some() {
            witness = Some(format!(
                "nodes {} and {i} have Cartan determinants {} and {}",
                class.seed,
                seed.cartan_det.unwrap_or_default(),
                inv.cartan_det.unwrap_or_default()
            ));
            break;
        }
        if inv.aag.is_some() && seed.aag.is_some() && inv.aag != seed.aag {
            witness = Some(format!(
                "nodes {} and {i} have AAG invariants {} and {}",
                class.seed,
                render_aag(seed.aag.as_deref().unwrap_or_default()),
                render_aag(inv.aag.as_deref().unwrap_or_default())
            ));
            break;
        }
    }
    let all_good = unknown == 0 && bad.is_empty() && !class.edges.is_empty();
    let good_reason = match class.invariant_kind {
        Some(InvariantKind::Jacobian) => format!(
            "all {good} mutation edges carry a two-term tilting complex and matching Cartan determinant and Coxeter polynomial"
        ),
        _ => format!("all {good} mutation edges are good"),
    };
    let delta2 = if let Some(w) = witness {
        Verdict::Refuted { witness: w }
    } else if all_good && class.complete {
        Verdict::Verified {
            reason: good_reason.clone(),
        }
    } else {
        Verdict::Inconclusive {
            reason: format!(
                "{} non-good and {unknown} uncertified edges; invariants agree",
                bad.len()
            ),
        }
    };
    let delta3 = if let Some(e) = bad.first() {
        Verdict::Refuted {
            witness: format!("mutation of node {} at vertex {} is not good", e.from, e.vertex),
        }
    } else if unknown == 0 && class.complete {
        Verdict::Verified { reason: good_reason }
    } else {
        Verdict::Inconclusive {
            reason: format!("{unknown} edges could not be certified"),
        }
    };
    let delta4 = if class.complete {
        Verdict::Verified {
            reason: format!("the class closes with {} members", class.size()),
        }
    } else {
        Verdict::Inconclusive {
            reason: "enumeration stopped at the node cap or depth limit".into(),
        }
    };
    DeltaReport {
        delta1,
        delta2,
        delta3,
        delta4,
        good_edges: good,
        non_good_edges: bad,
        uncertified_edges: unknown,
    }
}

pub fn render_aag(rows: &[[usize; 3]]) -> String {
    AagInvariant(rows.iter().map(|r| ((r[0], r[1]), r[2])).collect()).to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disjointness {
    pub disjoint: bool,
    pub shared_keys: usize,
    /// True when no AAG invariant occurs in both classes.
    pub aag_separates: bool,
}

pub fn disjointness_check(a: &MutationClass, b: &MutationClass) -> Disjointness {
    let ka = a.key_set();
    let kb = b.key_set();
    let shared = ka.intersection(&kb).count();
    let aag_of = |c: &MutationClass| -> Option<BTreeSet<Vec<[usize; 3]>>> {
        c.nodes.iter().map(|n| n.invariants.aag.clone()).collect()
    };
    let aag_separates = match (aag_of(a), aag_of(b)) {
        (Some(x), Some(y)) => x.is_disjoint(&y),
        _ => false,
    };
    Disjointness {
        disjoint: shared == 0,
        shared_keys: shared,
        aag_separates,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeJson {
    pub id: usize,
    pub key: String,
    pub depth: usize,
    #[serde(flatten)]
    pub invariants: NodeInvariants,
    pub qp: QpJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassStats {
    pub size: usize,
    pub structural_keys_seen: usize,
    pub complete: bool,
    pub edges: usize,
    pub good_edges: usize,
    pub non_good_edges: usize,
    pub uncertified_edges: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MutationClassReport {
    pub key_mode: KeyMode,
    pub seed: usize,
    pub stats: ClassStats,
    pub verdicts: DeltaReport,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<[usize; 3]>,
}

pub fn class_report(class: &MutationClass) -> MutationClassReport {
    let verdicts = delta_report(class);
    MutationClassReport {
        key_mode: class.key_mode,
        seed: class.seed,
        stats: ClassStats {
            size: class.size(),
            structural_keys_seen: class.structural_keys_seen,
            complete: class.complete,
            edges: class.edges.len(),
            good_edges: verdicts.good_edges,
            non_good_edges: verdicts.non_good_edges.len(),
            uncertified_edges: verdicts.uncertified_edges,
        },
        nodes: class
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeJson {
                id,
                key: format!("{:016x}", key_hash(&n.key.bytes)),
                depth: n.depth,
                invariants: n.invariants.clone(),
                qp: n.qp.to_json(),
            })
            .collect(),
        edges: class.edges.iter().map(|e| [e.from, e.vertex, e.to]).collect(),
        verdicts,
    }
}

/// Whether `T^-` or `T^+` is tilting at `k` for the Jacobian algebra.
pub fn tilting_at(qp: &QP, k: usize) -> Result<(bool, bool)> {
    let basis = jacobian::jacobian_basis(qp)?;
    Ok((
        jacobian::tilting_defined(&basis, Side::Minus, k)?,
        jacobian::tilting_defined(&basis, Side::Plus, k)?,
    ))
}

/// Gentle presentation check used to pick the invariant kind.
pub fn is_surface_like(qp: &QP) -> bool {
    GentlePresentation::from_qp(qp).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_disc_fan, build_surface_qp, build_x6, SurfaceParams};

    fn surface(g: usize, b: usize) -> QP {
        build_surface_qp(SurfaceParams::new(g, b).unwrap()).unwrap()
    }

    fn class_of(qp: &QP) -> MutationClass {
        enumerate_class(qp, &EnumerateConfig::default()).unwrap()
    }

    #[test]
    fn small_surface_classes() {
        assert_eq!(class_of(&surface(0, 2)).size(), 1);
        assert_eq!(class_of(&surface(1, 1)).size(), 1);
        let c = class_of(&surface(0, 3));
        assert_eq!(c.size(), 6);
        assert!(c.complete && c.is_connected());
        assert!(c.asymmetric_edges().is_empty());
        assert_eq!(c.edges.len(), 6 * 6);
    }

    #[test]
    fn x6_class_has_five_members() {
        let mut c = class_of(&build_x6());
        assert_eq!(c.size(), 5);
        c.compute_invariants(InvariantKind::Jacobian, None).unwrap();
        for node in &c.nodes {
            assert_eq!(node.invariants.cartan_det, Some(4));
        }
    }

    #[test]
    fn a3_disc_refutes_delta2() {
        let mut c = class_of(&build_disc_fan(6).unwrap());
        c.compute_invariants(InvariantKind::Gentle, None).unwrap();
        let dets: BTreeSet<_> = c.nodes.iter().map(|n| n.invariants.cartan_det.unwrap()).collect();
        assert_eq!(dets, BTreeSet::from([1, 2]));
        let r = delta_report(&c);
        assert!(r.delta2.is_refuted());
        assert!(r.delta3.is_refuted());
        assert!(r.delta4.is_verified());
    }

    #[test]
    fn threads_do_not_change_the_result() {
        let seed = surface(1, 2);
        let one = enumerate_class(&seed, &EnumerateConfig { threads: Some(1), ..Default::default() }).unwrap();
        let four = enumerate_class(&seed, &EnumerateConfig { threads: Some(4), ..Default::default() }).unwrap();
        assert_eq!(one.size(), 56);
        assert_eq!(one.key_set(), four.key_set());
        assert_eq!(one.edges, four.edges);
        assert_eq!(one.to_dot(), four.to_dot());
    }

    #[test]
    fn node_cap_and_depth_limit_mark_incomplete() {
        let seed = surface(1, 2);
        let capped = enumerate_class(&seed, &EnumerateConfig { node_cap: 5, ..Default::default() }).unwrap();
        assert_eq!(capped.size(), 5);
        assert!(!capped.complete);
        let shallow = enumerate_class(&seed, &EnumerateConfig { max_depth: Some(1), ..Default::default() }).unwrap();
        assert!(!shallow.complete);
        assert!(shallow.nodes.iter().all(|n| n.depth <= 1));
    }

    #[test]
    fn dot_lists_each_edge_once() {
        let c = class_of(&surface(0, 3));
        let dot = c.to_dot();
        assert!(dot.starts_with("graph"));
        let lines = dot.lines().filter(|l| l.contains(" -- ")).count();
        assert_eq!(lines, c.edges.iter().filter(|e| e.from <= e.to).count());
    }
}

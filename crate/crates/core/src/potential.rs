//! Potentials, quivers with potentials and their mutation.
//!
//! Paths compose left to right: a word `[a, b]` means `a` followed by `b`,
//! so `target(a) == source(b)`. Words store arrow indices into the owning
//! quiver; arrow ids only matter for serialization and traces.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::canon::{adjacency_bytes, canonical_search, group_elements, CanonicalKey};
use crate::error::{Error, Result};
use crate::quiver::{Arrow, Quiver};

pub type Coeff = BigRational;

/// Linear combination of (non-cyclic) paths, keyed by arrow-index words.
pub type PathComb = BTreeMap<Vec<usize>, Coeff>;

pub fn coeff(n: i64) -> Coeff {
    BigRational::from_integer(n.into())
}

/// A cyclic word stored in its lexicographically minimal rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<usize>);

impl CyclicWord {
    pub fn new(word: Vec<usize>) -> Self {
        CyclicWord(min_rotation(&word))
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0.contains(&a)
    }

    /// Rotation starting at the first occurrence of `a`.
    fn rotated_to(&self, a: usize) -> Option<Vec<usize>> {
        let p = self.0.iter().position(|&x| x == a)?;
        Some(rotate(&self.0, p))
    }
}

fn rotate(w: &[usize], p: usize) -> Vec<usize> {
    w[p..].iter().chain(&w[..p]).copied().collect()
}

fn min_rotation(w: &[usize]) -> Vec<usize> {
    (0..w.len().max(1))
        .map(|p| if w.is_empty() { Vec::new() } else { rotate(w, p) })
        .min()
        .unwrap_or_default()
}

/// Finite rational combination of cyclic words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Potential {
    terms: BTreeMap<CyclicWord, Coeff>,
}

impl Potential {
    pub fn zero() -> Self {
        Potential::default()
    }

    pub fn terms(&self) -> &BTreeMap<CyclicWord, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Vec<usize>, c: Coeff) {
        if c.is_zero() || word.is_empty() {
            return;
        }
        let key = CyclicWord::new(word);
        let entry = self.terms.entry(key.clone()).or_insert_with(Coeff::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, word: &[usize]) -> Coeff {
        self.terms
            .get(&CyclicWord::new(word.to_vec()))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(CyclicWord::len).max().unwrap_or(0)
    }

    fn truncated(&self, cap: usize) -> Potential {
        Potential {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= cap)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Cyclic derivative with respect to arrow `a`:
    /// `d_a(a_1...a_m) = sum over a_t == a of a_{t+1}...a_m a_1...a_{t-1}`.
    pub fn cyclic_derivative(&self, a: usize) -> PathComb {
        let mut out = PathComb::new();
        for (w, c) in &self.terms {
            let letters = w.letters();
            for (t, &x) in letters.iter().enumerate() {
                if x != a {
                    continue;
                }
                let rest: Vec<usize> = letters[t + 1..].iter().chain(&letters[..t]).copied().collect();
                accumulate(&mut out, rest, c.clone());
            }
        }
        out
    }

    /// Applies the algebra map sending each letter in `subst` to its image
    /// (letters not in `subst` are fixed), dropping words longer than `cap`.
    fn substitute(&self, subst: &HashMap<usize, PathComb>, cap: usize) -> Potential {
        let mut out = Potential::zero();
        for (w, c) in &self.terms {
            if !w.letters().iter().any(|x| subst.contains_key(x)) {
                out.add_term(w.letters().to_vec(), c.clone());
                continue;
            }
            let mut partial: Vec<(Vec<usize>, Coeff)> = vec![(Vec::new(), c.clone())];
            for &x in w.letters() {
                let mut next = Vec::with_capacity(partial.len());
                match subst.get(&x) {
                    None => {
                        for (mut p, pc) in partial {
                            if p.len() < cap {
                                p.push(x);
                                next.push((p, pc));
                            }
                        }
                    }
                    Some(image) => {
                        for (p, pc) in &partial {
                            for (iw, ic) in image {
                                if p.len() + iw.len() > cap {
                                    continue;
                                }
                                let mut q = p.clone();
                                q.extend_from_slice(iw);
                                next.push((q, pc * ic));
                            }
                        }
                    }
                }
                partial = next;
            }
            for (p, pc) in partial {
                out.add_term(p, pc);
            }
        }
        out
    }
}

fn accumulate(comb: &mut PathComb, word: Vec<usize>, c: Coeff) {
    if c.is_zero() {
        return;
    }
    let entry = comb.entry(word.clone()).or_insert_with(Coeff::zero);
    *entry += c;
    if entry.is_zero() {
        comb.remove(&word);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyMode {
    Quiver,
    Structural,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionConfig {
    pub degree_cap: usize,
    pub stabilization_margin: usize,
}

impl ReductionConfig {
    /// Defaults for a premutated quiver with `arrow_count` arrows.
    pub fn for_arrow_count(arrow_count: usize) -> Self {
        ReductionConfig {
            degree_cap: (2 * arrow_count).max(3),
            stabilization_margin: 2,
        }
    }
}

/// One step of the reduction, for `--trace` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Substitution {
    pub arrow: String,
    /// `(coeff, word)` pairs of the image, as arrow ids.
    pub image: Vec<(String, Vec<String>)>,
}

/// A quiver together with a potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QP {
    quiver: Quiver,
    potential: Potential,
    reduced: bool,
}

impl QP {
    pub fn new(quiver: Quiver, potential: Potential) -> Result<Self> {
        for (w, c) in potential.terms() {
            if c.is_zero() {
                return Err(Error::InvalidPotential("zero coefficient".into()));
            }
            let letters = w.letters();
            if letters.len() < 2 {
                return Err(Error::InvalidPotential("terms of length < 2 are not allowed".into()));
            }
            for (t, &x) in letters.iter().enumerate() {
                let Some(a) = quiver.arrows().get(x) else {
                    return Err(Error::InvalidPotential(format!("arrow index {x} out of range")));
                };
                let next = &quiver.arrows()[letters[(t + 1) % letters.len()]];
                if a.target != next.source {
                    return Err(Error::InvalidPotential(format!(
                        "term is not a closed path at arrow {:?}",
                        a.id
                    )));
                }
            }
        }
        let reduced = !quiver.has_two_cycles() && potential.terms().keys().all(|w| w.len() > 2);
        Ok(QP {
            quiver,
            potential,
            reduced,
        })
    }

    /// Builds a QP from arrow ids: each term is `(coeff, [id, ...])`.
    pub fn from_ids(quiver: Quiver, terms: &[(Coeff, Vec<&str>)]) -> Result<Self> {
        let mut potential = Potential::zero();
        for (c, ids) in terms {
            let word = ids
                .iter()
                .map(|id| {
                    quiver
                        .arrow_index(id)
                        .ok_or_else(|| Error::InvalidPotential(format!("unknown arrow {id:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            potential.add_term(word, c.clone());
        }
        QP::new(quiver, potential)
    }

    pub fn with_zero_potential(quiver: Quiver) -> Result<Self> {
        QP::new(quiver, Potential::zero())
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn n(&self) -> usize {
        self.quiver.n()
    }

    pub fn arrow_count(&self) -> usize {
        self.quiver.arrow_count()
    }

    pub fn word_ids(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&x| self.quiver.arrows()[x].id.clone()).collect()
    }

    /// Number of length-3 terms in the potential.
    pub fn triangle_count(&self) -> usize {
        self.potential.terms().keys().filter(|w| w.len() == 3).count()
    }

    pub fn cyclic_derivative(&self, arrow_id: &str) -> PathComb {
        match self.quiver.arrow_index(arrow_id) {
            Some(a) => self.potential.cyclic_derivative(a),
            None => PathComb::new(),
        }
    }

    /// Relabels vertices by `perm` and renames arrows `a0, a1, ...` sorted by
    /// (source, target) in the new labels.
    pub fn relabeled(&self, perm: &[usize]) -> QP {
        let arrows = self.quiver.arrows();
        let mut order: Vec<usize> = (0..arrows.len()).collect();
        order.sort_by_key(|&i| (perm[arrows[i].source], perm[arrows[i].target], i));
        let mut new_index = vec![0usize; arrows.len()];
        let mut new_arrows = Vec::with_capacity(arrows.len());
        for (pos, &old) in order.iter().enumerate() {
            new_index[old] = pos;
            let a = &arrows[old];
            new_arrows.push(Arrow::new(format!("a{pos}"), perm[a.source], perm[a.target]));
        }
        let quiver = Quiver::new(self.n(), new_arrows).expect("relabeling preserves validity");
        let mut potential = Potential::zero();
        for (w, c) in self.potential.terms() {
            potential.add_term(w.letters().iter().map(|&x| new_index[x]).collect(), c.clone());
        }
        QP {
            quiver,
            potential,
            reduced: self.reduced,
        }
    }

    /// Canonical representative: vertices in canonical order, arrows renamed.
    pub fn canonical_form(&self) -> (QP, CanonicalKey) {
        let key = crate::canon::canonicalize(&self.quiver);
        (self.relabeled(&key.perm), key)
    }

    pub fn key(&self, mode: KeyMode) -> CanonicalKey {
        qp_key(self, mode)
    }

    pub fn to_json(&self) -> QpJson {
        QpJson::from(self)
    }
}

pub fn triangle_count(qp: &QP) -> usize {
    qp.triangle_count()
}

/// DWZ premutation at `k`: arrows through `k` are reversed, a composite
/// `[a.b]` is added for each pair `a: i -> k`, `b: k -> j`, passages `a b`
/// in the potential are replaced by the composite, and the cycles
/// `[a.b] b* a*` are added.
pub fn premutate(qp: &QP, k: usize) -> Result<QP> {
    let q = qp.quiver();
    q.check_vertex(k)?;
    if q.arrows().iter().any(|a| a.source == k && a.target == k) {
        return Err(Error::LoopAtVertex(k));
    }
    if !qp.is_reduced() {
        return Err(Error::NotReduced);
    }
    let arrows = q.arrows();
    let mut taken: HashSet<String> = HashSet::new();
    let mut fresh = |base: String| {
        let mut id = base;
        while taken.contains(&id) {
            id.push('\'');
        }
        taken.insert(id.clone());
        id
    };
    let mut new_arrows = Vec::new();
    let mut old_to_new = vec![usize::MAX; arrows.len()];
    for (i, a) in arrows.iter().enumerate() {
        if a.source != k && a.target != k {
            old_to_new[i] = new_arrows.len();
            new_arrows.push(Arrow::new(fresh(a.id.clone()), a.source, a.target));
        }
    }
    let incoming: Vec<usize> = q.arrows_into(k).collect();
    let outgoing: Vec<usize> = q.arrows_out_of(k).collect();
    let mut star = vec![usize::MAX; arrows.len()];
    for &i in incoming.iter().chain(&outgoing) {
        let a = &arrows[i];
        star[i] = new_arrows.len();
        new_arrows.push(Arrow::new(fresh(format!("{}*", a.id)), a.target, a.source));
    }
    let mut composite: HashMap<(usize, usize), usize> = HashMap::new();
    for &a in &incoming {
        for &b in &outgoing {
            composite.insert((a, b), new_arrows.len());
            new_arrows.push(Arrow::new(
                fresh(format!("[{}.{}]", arrows[a].id, arrows[b].id)),
                arrows[a].source,
                arrows[b].target,
            ));
        }
    }
    let mut potential = Potential::zero();
    for (w, c) in qp.potential().terms() {
        let letters = w.letters();
        let start = letters
            .iter()
            .position(|&x| arrows[x].source != k)
            .expect("a cycle without loops leaves k");
        let word = rotate(letters, start);
        let mut out = Vec::with_capacity(word.len());
        let mut t = 0;
        while t < word.len() {
            let x = word[t];
            if arrows[x].target == k {
                let y = word[t + 1];
                out.push(composite[&(x, y)]);
                t += 2;
            } else {
                out.push(old_to_new[x]);
                t += 1;
            }
        }
        potential.add_term(out, c.clone());
    }
    for &a in &incoming {
        for &b in &outgoing {
            potential.add_term(vec![composite[&(a, b)], star[b], star[a]], Coeff::one());
        }
    }
    let quiver = Quiver::new(q.n(), new_arrows)?;
    QP::new(quiver, potential)
}

/// Splits off the trivial part of the potential: every length-2 term is
/// removed together with its two arrows after the right-equivalence that
/// clears all other occurrences of those arrows (up to `degree_cap`).
pub fn reduce(qp: &QP, cfg: &ReductionConfig) -> Result<QP> {
    reduce_traced(qp, cfg).map(|(r, _)| r)
}

pub fn reduce_traced(qp: &QP, cfg: &ReductionConfig) -> Result<(QP, Vec<Substitution>)> {
    let cap = cfg.degree_cap;
    if qp.potential().max_degree() > cap {
        return Err(Error::InvalidParams(format!(
            "degree cap {cap} is below the longest term ({})",
            qp.potential().max_degree()
        )));
    }
    let arrows = qp.quiver().arrows();
    let mut w = qp.potential().clone();
    let mut deleted: HashSet<usize> = HashSet::new();
    let mut trace = Vec::new();
    let record = |trace: &mut Vec<Substitution>, subst: &HashMap<usize, PathComb>| {
        let mut keys: Vec<_> = subst.keys().copied().collect();
        keys.sort_unstable();
        for x in keys {
            trace.push(Substitution {
                arrow: arrows[x].id.clone(),
                image: subst[&x]
                    .iter()
                    .map(|(word, c)| {
                        (c.to_string(), word.iter().map(|&y| arrows[y].id.clone()).collect())
                    })
                    .collect(),
            });
        }
    };

    loop {
        let Some((quad, c)) = w
            .terms()
            .iter()
            .find(|(t, _)| t.len() == 2)
            .map(|(t, c)| (t.letters().to_vec(), c.clone()))
        else {
            break;
        };
        let (u, v) = (quad[0], quad[1]);

        // Linear change of arrows until u and v occur in no other quadratic term.
        loop {
            let other = w.terms().iter().find_map(|(t, oc)| {
                if t.len() != 2 || t.letters() == [u, v] {
                    return None;
                }
                let l = t.letters();
                if l.contains(&u) {
                    let partner = if l[0] == u { l[1] } else { l[0] };
                    Some((v, partner, oc.clone()))
                } else if l.contains(&v) {
                    let partner = if l[0] == v { l[1] } else { l[0] };
                    Some((u, partner, oc.clone()))
                } else {
                    None
                }
            });
            let Some((target, partner, oc)) = other else { break };
            let mut image = PathComb::new();
            image.insert(vec![target], Coeff::one());
            accumulate(&mut image, vec![partner], -(oc / &c));
            let subst = HashMap::from([(target, image)]);
            record(&mut trace, &subst);
            w = w.substitute(&subst, cap);
        }

        // Nonlinear part: u -> u - V/c, v -> v - U/c, where the other terms
        // containing u are written u.U and those containing only v as V.v.
        let mut iterations = 0;
        loop {
            let mut big_u = PathComb::new();
            let mut big_v = PathComb::new();
            for (t, tc) in w.terms() {
                if t.letters() == [u, v] {
                    continue;
                }
                if let Some(r) = t.rotated_to(u) {
                    accumulate(&mut big_u, r[1..].to_vec(), tc.clone());
                } else if let Some(r) = t.rotated_to(v) {
                    // rotation starting at v; move v to the end
                    let mut r = r;
                    r.rotate_left(1);
                    accumulate(&mut big_v, r[..r.len() - 1].to_vec(), tc.clone());
                }
            }
            if big_u.is_empty() && big_v.is_empty() {
                break;
            }
            iterations += 1;
            if iterations > cap + 1 {
                return Err(Error::CapExceeded(cap));
            }
            let inv = c.recip();
            let mut image_u = PathComb::from([(vec![u], Coeff::one())]);
            for (p, pc) in big_v {
                accumulate(&mut image_u, p, -(pc * &inv));
            }
            let mut image_v = PathComb::from([(vec![v], Coeff::one())]);
            for (p, pc) in big_u {
                accumulate(&mut image_v, p, -(pc * &inv));
            }
            let subst = HashMap::from([(u, image_u), (v, image_v)]);
            record(&mut trace, &subst);
            w = w.substitute(&subst, cap);
        }
        let mut rest = Potential::zero();
        for (t, tc) in w.terms() {
            if t.letters() == [u, v] {
                continue;
            }
            if t.contains(u) || t.contains(v) {
                return Err(Error::Internal("eliminated arrow survives reduction".into()));
            }
            rest.add_term(t.letters().to_vec(), tc.clone());
        }
        w = rest;
        deleted.insert(u);
        deleted.insert(v);
    }

    let mut new_index = vec![usize::MAX; arrows.len()];
    let mut kept = Vec::new();
    for (i, a) in arrows.iter().enumerate() {
        if !deleted.contains(&i) {
            new_index[i] = kept.len();
            kept.push(a.clone());
        }
    }
    let quiver = Quiver::new(qp.n(), kept)?;
    if let Some((i, j)) = quiver.two_cycle() {
        return Err(Error::DegeneratePotential(i, j));
    }
    let mut potential = Potential::zero();
    for (t, tc) in w.terms() {
        potential.add_term(t.letters().iter().map(|&x| new_index[x]).collect(), tc.clone());
    }
    Ok((QP::new(quiver, potential)?, trace))
}

/// Reduces with `cfg` and again with the cap raised by the margin; the two
/// results must agree on all terms up to the original cap.
pub fn reduce_checked(qp: &QP, cfg: &ReductionConfig) -> Result<QP> {
    let first = reduce(qp, cfg)?;
    let wider = ReductionConfig {
        degree_cap: cfg.degree_cap + cfg.stabilization_margin,
        ..cfg.clone()
    };
    let second = reduce(qp, &wider)?;
    if first.quiver != second.quiver
        || first.potential != second.potential.truncated(cfg.degree_cap)
    {
        return Err(Error::CapExceeded(cfg.degree_cap));
    }
    Ok(first)
}

/// Full QP mutation: premutation followed by reduction with default caps.
pub fn mutate_qp(qp: &QP, k: usize) -> Result<QP> {
    let pre = premutate(qp, k)?;
    let cfg = ReductionConfig::for_arrow_count(pre.arrow_count());
    reduce(&pre, &cfg)
}

pub fn mutate_qp_traced(qp: &QP, k: usize) -> Result<(QP, QP, Vec<Substitution>)> {
    let pre = premutate(qp, k)?;
    let cfg = ReductionConfig::for_arrow_count(pre.arrow_count());
    let (out, trace) = reduce_traced(&pre, &cfg)?;
    Ok((pre, out, trace))
}

/// Largest automorphism group enumerated for structural keys; bigger groups
/// fall back to orbit representatives.
const AUTOMORPHISM_GROUP_CAP: usize = 20_000;

/// Canonical key of a QP. In structural mode the quiver key is extended by
/// the set of term degrees and the set of vertex cycles carrying terms of
/// lowest degree, minimized over the automorphisms of the canonical quiver.
/// Higher terms are left out: they are only determined up to the relations
/// coming from the lower ones.
pub fn qp_key(qp: &QP, mode: KeyMode) -> CanonicalKey {
    let adj = adjacency_bytes(qp.quiver());
    let search = canonical_search(&adj);
    let mut key = search.key;
    if mode == KeyMode::Quiver {
        return key;
    }
    let n = qp.n();
    let arrows = qp.quiver().arrows();
    let lowest = qp.potential().terms().keys().map(CyclicWord::len).min().unwrap_or(0);
    let degrees: BTreeSet<usize> = qp.potential().terms().keys().map(CyclicWord::len).collect();
    let cycles: Vec<Vec<usize>> = qp
        .potential()
        .terms()
        .keys()
        .filter(|w| w.len() == lowest)
        .map(|w| w.letters().iter().map(|&x| arrows[x].source).collect())
        .collect();
    let describe = |relabel: &dyn Fn(usize) -> usize| -> Vec<Vec<usize>> {
        let mut d: Vec<Vec<usize>> = cycles
            .iter()
            .map(|c| {
                let mapped: Vec<usize> = c.iter().map(|&v| relabel(v)).collect();
                let mut rep = vec![mapped.len()];
                rep.extend(min_rotation(&mapped));
                rep
            })
            .collect();
        d.sort();
        d.dedup();
        d
    };
    let perm = key.perm.clone();
    let descriptor = match group_elements(n, &search.automorphisms, AUTOMORPHISM_GROUP_CAP) {
        Some(group) => group
            .iter()
            .map(|g| describe(&|v| perm[g[v]]))
            .min()
            .expect("group contains the identity"),
        None => {
            let mut orbit_min: Vec<usize> = perm.clone();
            for g in &search.automorphisms {
                for v in 0..n {
                    let m = orbit_min[v].min(orbit_min[g[v]]);
                    orbit_min[v] = m;
                    orbit_min[g[v]] = m;
                }
            }
            describe(&|v| orbit_min[v])
        }
    };
    key.bytes.push(0xff);
    for d in degrees {
        key.bytes.extend_from_slice(&(d as u16).to_le_bytes());
    }
    key.bytes.push(0xff);
    for term in descriptor {
        for x in term {
            key.bytes.extend_from_slice(&(x as u16).to_le_bytes());
        }
        key.bytes.push(0xfe);
    }
    key
}

/// Interchange format: the quiver object plus a `potential` array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpJson {
    pub n: usize,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub potential: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub cycle: Vec<String>,
}

impl From<&QP> for QpJson {
    fn from(qp: &QP) -> Self {
        let mut potential: Vec<TermJson> = qp
            .potential()
            .terms()
            .iter()
            .map(|(w, c)| {
                let ids = qp.word_ids(w.letters());
                let best = (0..ids.len()).map(|p| rotate_ids(&ids, p)).min().unwrap_or_default();
                TermJson {
                    coeff: c.to_string(),
                    cycle: best,
                }
            })
            .collect();
        potential.sort_by(|a, b| (a.cycle.len(), &a.cycle).cmp(&(b.cycle.len(), &b.cycle)));
        QpJson {
            n: qp.n(),
            arrows: qp.quiver().arrows().to_vec(),
            potential,
        }
    }
}

fn rotate_ids(ids: &[String], p: usize) -> Vec<String> {
    ids[p..].iter().chain(&ids[..p]).cloned().collect()
}

impl TryFrom<QpJson> for QP {
    type Error = Error;

    fn try_from(j: QpJson) -> Result<Self> {
        let quiver = Quiver::new(j.n, j.arrows)?;
        let mut terms = Vec::with_capacity(j.potential.len());
        for t in &j.potential {
            if t.coeff.contains('.') || t.coeff.contains('e') {
                return Err(Error::Parse(format!("coefficient {:?} must be an exact p/q string", t.coeff)));
            }
            let c: Coeff = t
                .coeff
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {:?}", t.coeff)))?;
            terms.push((c, t.cycle.iter().map(String::as_str).collect::<Vec<_>>()));
        }
        QP::from_ids(quiver, &terms)
    }
}

impl QP {
    pub fn from_json_str(s: &str) -> Result<QP> {
        let j: QpJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        QP::try_from(j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("QP JSON serializes")
    }
}

/// Sign of a coefficient, used by tests on triangle potentials.
pub fn is_unit(c: &Coeff) -> bool {
    c.abs().is_one()
}

//! Jacobian algebras of quivers with potential: bases, Cartan matrices,
//! Coxeter polynomials and two-term tilting complexes.
//!
//! Right modules `P_i = e_i A` are used throughout, so `Hom(P_x, P_y)` is
//! spanned by the paths from `y` to `x`, and composing `psi` after `phi`
//! is the product `psi * phi`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::potential::{Coeff, QP};
use crate::quiver::Quiver;

/// Completion cap tried first; doubled on failure up to [`MAX_CAP`].
pub const DEFAULT_CAP: usize = 24;
pub const MAX_CAP: usize = 96;
const MAX_BASIS: usize = 200_000;
const MAX_RULES: usize = 200_000;

/// A path as an arrow-index word, ordered by length, then lexicographically.
/// The leading monomial of a relation is its smallest one, which makes the
/// rewriting compatible with the adic completion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Mono(Vec<usize>);

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Poly = BTreeMap<Mono, Coeff>;

fn add_to(p: &mut Poly, m: Vec<usize>, c: Coeff) {
    if c.is_zero() {
        return;
    }
    let key = Mono(m);
    match p.get_mut(&key) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                p.remove(&key);
            }
        }
        None => {
            p.insert(key, c);
        }
    }
}

/// Generators of the Jacobian ideal: one relation per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteSystem {
    quiver: Quiver,
    relations: Vec<BTreeMap<Vec<usize>, Coeff>>,
}

impl RewriteSystem {
    pub fn new(quiver: Quiver, relations: Vec<BTreeMap<Vec<usize>, Coeff>>) -> Self {
        RewriteSystem { quiver, relations }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn relations(&self) -> &[BTreeMap<Vec<usize>, Coeff>] {
        &self.relations
    }

    pub fn max_degree(&self) -> usize {
        self.relations.iter().flat_map(|r| r.keys()).map(Vec::len).max().unwrap_or(0)
    }
}

/// Cyclic derivatives of the potential with respect to every arrow.
pub fn jacobian_relations(qp: &QP) -> RewriteSystem {
    let relations = (0..qp.arrow_count())
        .map(|a| qp.potential().cyclic_derivative(a))
        .filter(|d| !d.is_empty())
        .collect();
    RewriteSystem::new(qp.quiver().clone(), relations)
}

#[derive(Clone, Debug)]
struct Rule {
    lead: Vec<usize>,
    /// `lead = -tail` modulo the ideal; every tail monomial is larger.
    tail: Poly,
}

/// Completed rewriting system in the path algebra truncated at `cap`.
#[derive(Clone, Debug)]
struct Groebner {
    cap: usize,
    rules: Vec<Option<Rule>>,
    leads: HashMap<Vec<usize>, usize>,
    lead_lengths: Vec<usize>,
}

impl Groebner {
    fn find(&self, w: &[usize]) -> Option<(usize, usize)> {
        for &l in &self.lead_lengths {
            if l > w.len() {
                break;
            }
            for start in 0..=w.len() - l {
                if let Some(&r) = self.leads.get(&w[start..start + l]) {
                    return Some((start, r));
                }
            }
        }
        None
    }

    fn reduce(&self, mut f: Poly) -> Poly {
        let mut out = Poly::new();
        while let Some((m, c)) = f.pop_first() {
            if m.0.len() >= self.cap {
                continue;
            }
            match self.find(&m.0) {
                None => {
                    out.insert(m, c);
                }
                Some((start, r)) => {
                    let rule = self.rules[r].as_ref().expect("live rule");
                    let end = start + rule.lead.len();
                    for (t, tc) in &rule.tail {
                        let len = m.0.len() - rule.lead.len() + t.0.len();
                        if len >= self.cap {
                            continue;
                        }
                        let mut w = Vec::with_capacity(len);
                        w.extend_from_slice(&m.0[..start]);
                        w.extend_from_slice(&t.0);
                        w.extend_from_slice(&m.0[end..]);
                        add_to(&mut f, w, -(&c * tc));
                    }
                }
            }
        }
        out
    }

    fn insert(&mut self, lead: Vec<usize>, tail: Poly) -> usize {
        let i = self.rules.len();
        self.leads.insert(lead.clone(), i);
        if let Err(pos) = self.lead_lengths.binary_search(&lead.len()) {
            self.lead_lengths.insert(pos, lead.len());
        }
        self.rules.push(Some(Rule { lead, tail }));
        i
    }

    fn remove(&mut self, i: usize) -> Rule {
        let rule = self.rules[i].take().expect("live rule");
        self.leads.remove(&rule.lead);
        rule
    }

    fn complete(relations: &[Poly], cap: usize) -> Result<Groebner> {
        let mut g = Groebner {
            cap,
            rules: Vec::new(),
            leads: HashMap::new(),
            lead_lengths: Vec::new(),
        };
        let mut queue: VecDeque<Poly> = relations.iter().cloned().collect();
        while let Some(p) = queue.pop_front() {
            let mut r = g.reduce(p);
            let Some((lead, lc)) = r.pop_first() else { continue };
            let inv = lc.recip();
            let tail: Poly = r.into_iter().map(|(m, c)| (m, c * &inv)).collect();
            let lead = lead.0;
            // rules whose lead contains the new lead are re-reduced later
            let contained: Vec<usize> = g
                .leads
                .iter()
                .filter(|(l, _)| contains(l, &lead))
                .map(|(_, &i)| i)
                .collect();
            for i in contained {
                let old = g.remove(i);
                let mut poly = old.tail;
                add_to(&mut poly, old.lead, Coeff::one());
                queue.push_back(poly);
            }
            let new = g.insert(lead, tail);
            if g.leads.len() > MAX_RULES {
                return Err(Error::DimensionNotResolved(cap));
            }
            let live: Vec<usize> = g.leads.values().copied().collect();
            for other in live {
                queue.extend(g.overlaps(new, other));
                if other != new {
                    queue.extend(g.overlaps(other, new));
                }
            }
        }
        g.rules.retain(Option::is_some);
        g.leads = g
            .rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.as_ref().expect("retained").lead.clone(), i))
            .collect();
        Ok(g)
    }

    /// S-polynomials for a suffix of `lead(a)` equal to a prefix of `lead(b)`.
    fn overlaps(&self, a: usize, b: usize) -> Vec<Poly> {
        let ra = self.rules[a].as_ref().expect("live rule");
        let rb = self.rules[b].as_ref().expect("live rule");
        let (la, lb) = (&ra.lead, &rb.lead);
        let mut out = Vec::new();
        for k in 1..la.len().min(lb.len()) {
            if la[la.len() - k..] != lb[..k] || la.len() + lb.len() - k >= self.cap {
                continue;
            }
            // (lead_a + tail_a) * right - left * (lead_b + tail_b)
            let right = &lb[k..];
            let left = &la[..la.len() - k];
            let mut s = Poly::new();
            for (m, c) in &ra.tail {
                let mut w = m.0.clone();
                w.extend_from_slice(right);
                add_to(&mut s, w, c.clone());
            }
            for (m, c) in &rb.tail {
                let mut w = left.to_vec();
                w.extend_from_slice(&m.0);
                add_to(&mut s, w, -c.clone());
            }
            out.push(s);
        }
        out
    }
}

fn contains(hay: &[usize], needle: &[usize]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// One basis path of the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasisPath {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

/// Normal-form paths of a finite-dimensional Jacobian algebra.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    n: usize,
    paths: Vec<BasisPath>,
    index: HashMap<(usize, Vec<usize>), usize>,
    /// Smallest `d` with the radical power `R^d` zero.
    loewy_length: usize,
    groebner: Groebner,
    quiver: Quiver,
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[BasisPath] {
        &self.paths
    }

    pub fn loewy_length(&self) -> usize {
        self.loewy_length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Basis paths from `i` to `j`.
    pub fn paths_between(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.paths.len())
            .filter(|&p| self.paths[p].source == i && self.paths[p].target == j)
            .collect()
    }

    fn trivial(&self, v: usize) -> usize {
        self.index[&(v, Vec::new())]
    }

    /// Normal form of an arbitrary path (as an arrow word starting at `v`).
    pub fn normal_form(&self, v: usize, word: &[usize]) -> Vec<(usize, Coeff)> {
        if word.is_empty() {
            return vec![(self.trivial(v), Coeff::one())];
        }
        let mut p = Poly::new();
        p.insert(Mono(word.to_vec()), Coeff::one());
        let src = self.quiver.arrows()[word[0]].source;
        self.groebner
            .reduce(p)
            .into_iter()
            .map(|(m, c)| (self.index[&(src, m.0)], c))
            .collect()
    }

    /// Product of two basis elements.
    pub fn multiply(&self, x: usize, y: usize) -> Vec<(usize, Coeff)> {
        let (px, py) = (&self.paths[x], &self.paths[y]);
        if px.target != py.source {
            return Vec::new();
        }
        let mut w = px.arrows.clone();
        w.extend_from_slice(&py.arrows);
        self.normal_form(px.source, &w)
    }

    fn multiply_elements(&self, a: &[(usize, Coeff)], b: &[(usize, Coeff)]) -> BTreeMap<usize, Coeff> {
        let mut out = BTreeMap::new();
        for (x, cx) in a {
            for (y, cy) in b {
                for (z, cz) in self.multiply(*x, *y) {
                    let e = out.entry(z).or_insert_with(Coeff::zero);
                    *e += cx * cy * cz;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

/// Completes the rewriting system and enumerates the normal paths,
/// doubling the cap until the algebra is seen to be finite-dimensional.
pub fn groebner_basis(rs: &RewriteSystem, cap: usize) -> Result<AlgebraBasis> {
    let mut cap = cap.max(rs.max_degree() + 1);
    loop {
        match basis_at_cap(rs, cap) {
            Err(Error::DimensionNotResolved(_)) if cap < MAX_CAP => cap = (cap * 2).min(MAX_CAP),
            other => return other,
        }
    }
}

/// A single completion attempt at a fixed cap.
pub fn basis_at_cap(rs: &RewriteSystem, cap: usize) -> Result<AlgebraBasis> {
    if cap <= rs.max_degree() {
        return Err(Error::InvalidParams(format!(
            "cap {cap} must exceed the relation degree {}",
            rs.max_degree()
        )));
    }
    let relations: Vec<Poly> = rs
        .relations
        .iter()
        .map(|r| r.iter().map(|(w, c)| (Mono(w.clone()), c.clone())).collect())
        .collect();
    let groebner = Groebner::complete(&relations, cap)?;
    let q = &rs.quiver;
    let arrows = q.arrows();
    let mut paths: Vec<BasisPath> = (0..q.n())
        .map(|v| BasisPath {
            source: v,
            target: v,
            arrows: Vec::new(),
        })
        .collect();
    let mut level: Vec<BasisPath> = Vec::new();
    for (a, arrow) in arrows.iter().enumerate() {
        if groebner.find(&[a]).is_none() {
            level.push(BasisPath {
                source: arrow.source,
                target: arrow.target,
                arrows: vec![a],
            });
        }
    }
    let mut degree = 1;
    while !level.is_empty() {
        if degree + 1 >= cap {
            return Err(Error::DimensionNotResolved(cap));
        }
        let mut next = Vec::new();
        for p in &level {
            for b in q.arrows_out_of(p.target) {
                let mut w = p.arrows.clone();
                w.push(b);
                // only suffixes can newly match a leading monomial
                let suffix_hit = (0..w.len()).any(|s| groebner.leads.contains_key(&w[s..]));
                if !suffix_hit {
                    next.push(BasisPath {
                        source: p.source,
                        target: arrows[b].target,
                        arrows: w,
                    });
                }
            }
        }
        paths.append(&mut level);
        if paths.len() + next.len() > MAX_BASIS {
            return Err(Error::DimensionNotResolved(cap));
        }
        level = next;
        degree += 1;
    }
    let index = paths
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.source, p.arrows.clone()), i))
        .collect();
    Ok(AlgebraBasis {
        n: q.n(),
        paths,
        index,
        loewy_length: degree,
        groebner,
        quiver: q.clone(),
    })
}

/// Basis of the Jacobian algebra of `qp` with the default cap schedule.
pub fn jacobian_basis(qp: &QP) -> Result<AlgebraBasis> {
    groebner_basis(&jacobian_relations(qp), DEFAULT_CAP)
}

/// `C[i][j]` = number of basis paths from `i` to `j`.
pub fn cartan(basis: &AlgebraBasis) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; basis.n]; basis.n];
    for p in &basis.paths {
        c[p.source][p.target] += 1;
    }
    c
}

pub fn cartan_det(c: &[Vec<i64>]) -> BigInt {
    linalg::det(c)
}

/// Characteristic polynomial of `-C^{-T} C`, coefficients from the
/// constant term upward.
pub fn coxeter_polynomial(c: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = c.len();
    let cr = linalg::to_rational(c);
    let ct: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| cr[j][i].clone()).collect()).collect();
    let ct_inv = linalg::inverse(&ct).ok_or(Error::CoxeterUndefined)?;
    let phi: Vec<Vec<BigRational>> = linalg::mul(&ct_inv, &cr)
        .into_iter()
        .map(|r| r.into_iter().map(|x| -x).collect())
        .collect();
    linalg::charpoly(&phi)
        .into_iter()
        .map(|x| {
            if !x.is_integer() {
                return Err(Error::Internal(format!("non-integral Coxeter coefficient {x}")));
            }
            x.to_integer()
                .to_i64()
                .ok_or_else(|| Error::Internal("Coxeter coefficient overflow".into()))
        })
        .collect()
}

/// Human-readable polynomial, highest degree first.
pub fn format_polynomial(coeffs: &[i64]) -> String {
    let mut parts = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        let body = match (d, mag) {
            (0, m) => m.to_string(),
            (1, 1) => "x".into(),
            (1, m) => format!("{m}x"),
            (_, 1) => format!("x^{d}"),
            (_, m) => format!("{m}x^{d}"),
        };
        let sign = if c < 0 { "-" } else { "+" };
        if parts.is_empty() {
            parts.push(if c < 0 { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{sign} {body}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// `dim Hom(P_i, P_j)`, the number of basis paths from `j` to `i`.
pub fn hom_dim(basis: &AlgebraBasis, i: usize, j: usize) -> usize {
    basis.paths.iter().filter(|p| p.source == j && p.target == i).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

/// A complex `X^lower -> X^upper` of projectives `P_v` in two consecutive
/// degrees, listed by vertex, with differential entries `d[r][c]` in
/// `Hom(P_{lower[c]}, P_{upper[r]})`.
///
/// `T^-_k` has `P_k` in degree -1 and the arrows ending at `k` give
/// `P_k -> P_j`; `T^+_k` has `P_k` in degree 1 and the arrows starting at
/// `k` give `P_j -> P_k`. The other `P_i` sit in degree 0 in both.
#[derive(Clone, Debug)]
pub struct TwoTermComplex {
    pub side: Side,
    pub vertex: usize,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub d: Vec<Vec<Vec<(usize, Coeff)>>>,
}

impl TwoTermComplex {
    pub fn new(basis: &AlgebraBasis, side: Side, k: usize) -> Result<Self> {
        let q = &basis.quiver;
        q.check_vertex(k)?;
        if q.arrows().iter().any(|a| a.source == k && a.target == k) {
            return Err(Error::LoopAtVertex(k));
        }
        let arrows = q.arrows();
        let others = (0..q.n()).filter(|&i| i != k);
        Ok(match side {
            Side::Minus => {
                let ins: Vec<usize> = q.arrows_into(k).collect();
                let mut upper: Vec<usize> = ins.iter().map(|&a| arrows[a].source).collect();
                let mut d: Vec<Vec<Vec<(usize, Coeff)>>> =
                    ins.iter().map(|&a| vec![basis.normal_form(arrows[a].source, &[a])]).collect();
                for i in others {
                    upper.push(i);
                    d.push(vec![Vec::new()]);
                }
                TwoTermComplex {
                    side,
                    vertex: k,
                    lower: vec![k],
                    upper,
                    d,
                }
            }
            Side::Plus => {
                let outs: Vec<usize> = q.arrows_out_of(k).collect();
                let mut lower: Vec<usize> = outs.iter().map(|&a| arrows[a].target).collect();
                let mut row: Vec<Vec<(usize, Coeff)>> = outs.iter().map(|&a| basis.normal_form(k, &[a])).collect();
                for i in others {
                    lower.push(i);
                    row.push(Vec::new());
                }
                TwoTermComplex {
                    side,
                    vertex: k,
                    lower,
                    upper: vec![k],
                    d: vec![row],
                }
            }
        })
    }
}

/// Coordinates for `Hom(sum P_{from}, sum P_{to})`: entry `(r, c)` ranges
/// over the basis paths from `to[r]` to `from[c]`.
struct HomSpace {
    coords: Vec<(usize, usize, usize)>,
    lookup: HashMap<(usize, usize, usize), usize>,
}

impl HomSpace {
    fn new(basis: &AlgebraBasis, from: &[usize], to: &[usize]) -> Self {
        let mut coords = Vec::new();
        for (r, &y) in to.iter().enumerate() {
            for (c, &x) in from.iter().enumerate() {
                for p in basis.paths_between(y, x) {
                    coords.push((r, c, p));
                }
            }
        }
        let lookup = coords.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        HomSpace { coords, lookup }
    }

    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn vector(&self, entries: &BTreeMap<(usize, usize), BTreeMap<usize, Coeff>>) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.dim()];
        for (&(r, c), elem) in entries {
            for (&p, x) in elem {
                v[self.lookup[&(r, c, p)]] += x;
            }
        }
        v
    }
}

/// `Hom(T, T[1]) = 0` and `Hom(T, T[-1]) = 0` in the homotopy category.
pub fn is_tilting(basis: &AlgebraBasis, t: &TwoTermComplex) -> bool {
    let (x1, x0) = (&t.lower, &t.upper);
    let unit = |p: usize| vec![(p, Coeff::one())];

    // Hom(T, T[1]): every f: lower -> upper is h0 d + d h1.
    let target = HomSpace::new(basis, x1, x0);
    let mut images = Vec::new();
    let h0 = HomSpace::new(basis, x0, x0);
    for &(r, m, p) in &h0.coords {
        // (h0 d)[r][c] = e_p * d[m][c]
        let mut entries = BTreeMap::new();
        for c in 0..x1.len() {
            let prod = basis.multiply_elements(&unit(p), &t.d[m][c]);
            if !prod.is_empty() {
                entries.insert((r, c), prod);
            }
        }
        images.push(target.vector(&entries));
    }
    let h1 = HomSpace::new(basis, x1, x1);
    for &(m, c, p) in &h1.coords {
        // (d h1)[r][c] = d[r][m] * e_p
        let mut entries = BTreeMap::new();
        for r in 0..x0.len() {
            let prod = basis.multiply_elements(&t.d[r][m], &unit(p));
            if !prod.is_empty() {
                entries.insert((r, c), prod);
            }
        }
        images.push(target.vector(&entries));
    }
    if target.dim() > 0 && (images.is_empty() || linalg::rank(images) < target.dim()) {
        return false;
    }

    // Hom(T, T[-1]): f: upper -> lower with d f = 0 and f d = 0 must vanish.
    let domain = HomSpace::new(basis, x0, x1);
    if domain.dim() == 0 {
        return true;
    }
    let left = HomSpace::new(basis, x0, x0);
    let right = HomSpace::new(basis, x1, x1);
    let columns: Vec<Vec<BigRational>> = domain
        .coords
        .iter()
        .map(|&(m, c, p)| {
            // (d f)[r][c] = d[r][m] * e_p ; (f d)[m][c'] = e_p * d[c][c']
            let mut df = BTreeMap::new();
            for r in 0..x0.len() {
                let prod = basis.multiply_elements(&t.d[r][m], &unit(p));
                if !prod.is_empty() {
                    df.insert((r, c), prod);
                }
            }
            let mut fd = BTreeMap::new();
            for c2 in 0..x1.len() {
                let prod = basis.multiply_elements(&unit(p), &t.d[c][c2]);
                if !prod.is_empty() {
                    fd.insert((m, c2), prod);
                }
            }
            let mut v = left.vector(&df);
            v.extend(right.vector(&fd));
            v
        })
        .collect();
    linalg::rank(columns) == domain.dim()
}

pub fn tilting_defined(basis: &AlgebraBasis, side: Side, k: usize) -> Result<bool> {
    Ok(is_tilting(basis, &TwoTermComplex::new(basis, side, k)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub dim: usize,
    pub cartan: Vec<Vec<i64>>,
    pub cartan_det: i64,
    pub coxeter: Vec<i64>,
    pub tilting_minus: Vec<bool>,
    pub tilting_plus: Vec<bool>,
}

pub fn jacobian_report(qp: &QP) -> Result<JacobianReport> {
    let basis = jacobian_basis(qp)?;
    let c = cartan(&basis);
    let det = cartan_det(&c)
        .to_i64()
        .ok_or_else(|| Error::Internal("Cartan determinant exceeds 64 bits".into()))?;
    let coxeter = if det == 0 { Vec::new() } else { coxeter_polynomial(&c)? };
    let n = qp.n();
    Ok(JacobianReport {
        dim: basis.dim(),
        cartan: c,
        cartan_det: det,
        coxeter,
        tilting_minus: (0..n).map(|k| tilting_defined(&basis, Side::Minus, k)).collect::<Result<_>>()?,
        tilting_plus: (0..n).map(|k| tilting_defined(&basis, Side::Plus, k)).collect::<Result<_>>()?,
    })
}

/// Determinant and Coxeter polynomial, the pair compared across mutations.
pub fn derived_invariants(qp: &QP) -> Result<(BigInt, Option<Vec<i64>>)> {
    let basis = jacobian_basis(qp)?;
    let c = cartan(&basis);
    let det = cartan_det(&c);
    let cox = if det.is_zero() { None } else { Some(coxeter_polynomial(&c)?) };
    Ok((det, cox))
}

//! Constructors for the explicit quiver-with-potential families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{coeff, Potential, QP};
use crate::quiver::{Arrow, Quiver};

/// Genus `g` and number of boundary components `b` of a marked surface
/// with one marked point on each boundary component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub g: usize,
    pub b: usize,
}

impl SurfaceParams {
    pub fn new(g: usize, b: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidParams("at least one boundary component is required".into()));
        }
        if (g, b) == (0, 1) {
            return Err(Error::InvalidParams("the disc (0,1) is excluded".into()));
        }
        Ok(SurfaceParams { g, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarParams {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl StarParams {
    pub fn new(p: usize, q: usize, r: usize) -> Result<Self> {
        if p < 2 || q < 2 || r < 2 {
            return Err(Error::InvalidParams(format!("p, q, r must be >= 2, got ({p},{q},{r})")));
        }
        Ok(StarParams { p, q, r })
    }
}

/// `(n, e, t)`: vertices, arrows and triangles of the surface quivers.
pub fn predicted_counts(sp: SurfaceParams) -> (usize, usize, usize) {
    let (g, b) = (sp.g as i64, sp.b as i64);
    let n = 6 * (g - 1) + 4 * b;
    let e = 12 * (g - 1) + 7 * b;
    let t = 4 * (g - 1) + 2 * b;
    (n as usize, e as usize, t as usize)
}

/// Incremental builder keeping arrows and triangle terms together.
struct Builder {
    n: usize,
    arrows: Vec<Arrow>,
    triangles: Vec<[usize; 3]>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            n: 0,
            arrows: Vec::new(),
            triangles: Vec::new(),
        }
    }

    fn vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn arrow(&mut self, s: usize, t: usize) -> usize {
        let i = self.arrows.len();
        self.arrows.push(Arrow::new(format!("a{i}"), s, t));
        i
    }

    /// Oriented triangle `x -> y -> z -> x` with its potential term.
    fn triangle(&mut self, x: usize, y: usize, z: usize) {
        let a = self.arrow(x, y);
        let b = self.arrow(y, z);
        let c = self.arrow(z, x);
        self.triangles.push([a, b, c]);
    }

    /// Replaces the single arrow `x -> y` of a surface with boundary by a
    /// ladder of `m` segments, each contributing two oriented triangles.
    fn ladder(&mut self, x: usize, y: usize, m: usize) {
        let (mut top, mut bottom) = (x, y);
        for _ in 0..m {
            let t = self.vertex();
            let mid = self.vertex();
            let low = self.vertex();
            let b = self.vertex();
            // (top, mid, t) and (low, bottom, b)
            self.triangle(top, mid, t);
            self.arrow(mid, low);
            self.triangle(low, bottom, b);
            top = t;
            bottom = b;
        }
        self.arrow(top, bottom);
    }

    fn finish(self) -> Result<QP> {
        let quiver = Quiver::new(self.n, self.arrows)?;
        let mut potential = Potential::zero();
        for t in self.triangles {
            potential.add_term(t.to_vec(), coeff(1));
        }
        QP::new(quiver, potential)
    }
}

/// Surface quiver with potential for `(g, b)`.
///
/// For `g >= 1` the closed surface is cut along the fan triangulation of its
/// fundamental `4g`-gon, one diagonal being doubled into a pair `x, y`
/// joined by an arrow `x -> y`; further boundary components replace that
/// arrow by a ladder. For `g = 0` the sphere with `b` holes is a ladder
/// between `x` and `y` together with an extra arrow `x -> y`.
pub fn build_surface_qp(sp: SurfaceParams) -> Result<QP> {
    let sp = SurfaceParams::new(sp.g, sp.b)?;
    let mut bld = Builder::new();
    if sp.g == 0 {
        let x = bld.vertex();
        let y = bld.vertex();
        bld.ladder(x, y, sp.b - 2);
        bld.arrow(x, y);
        return bld.finish();
    }
    let g = sp.g;
    let sides = 4 * g;
    // Edge classes of the polygon word a1 b1 a1^-1 b1^-1 ...
    let classes: Vec<usize> = (0..2 * g).map(|_| bld.vertex()).collect();
    let edge = |i: usize| classes[2 * (i / 4) + (i % 2)];
    // Diagonals from polygon vertex 0 to vertex i, 2 <= i <= 4g - 2.
    let mut diagonal = vec![usize::MAX; sides];
    for (i, d) in diagonal.iter_mut().enumerate().take(sides - 1).skip(2) {
        if i != 2 * g {
            *d = bld.vertex();
        }
    }
    let x = bld.vertex();
    let y = bld.vertex();
    for i in 1..=sides - 2 {
        let left = match i {
            1 => edge(0),
            _ if i == 2 * g => y,
            _ => diagonal[i],
        };
        let right = match i + 1 {
            j if j == sides - 1 => edge(sides - 1),
            j if j == 2 * g => x,
            j => diagonal[j],
        };
        bld.triangle(left, edge(i), right);
    }
    bld.ladder(x, y, sp.b - 1);
    bld.finish()
}

/// Hub vertices `a = 0`, `b = 1`, then the arms of lengths `p-1`, `q-1`,
/// `r-1` in that order.
pub fn build_pqr(sp: StarParams) -> Result<QP> {
    let sp = StarParams::new(sp.p, sp.q, sp.r)?;
    let n = 2 + (sp.p - 1) + (sp.q - 1) + (sp.r - 1);
    let mut arrows = vec![Arrow::new("eps", 1, 0), Arrow::new("eta", 1, 0)];
    let mut start = 2;
    for (name, len) in [("alpha", sp.p), ("beta", sp.q), ("gamma", sp.r)] {
        arrows.push(Arrow::new(format!("{name}1"), 0, start));
        arrows.push(Arrow::new(format!("{name}2"), start, 1));
        for j in 0..len - 2 {
            arrows.push(Arrow::new(format!("{name}_arm{}", j + 1), start + j, start + j + 1));
        }
        start += len - 1;
    }
    let quiver = Quiver::new(n, arrows)?;
    QP::from_ids(
        quiver,
        &[
            (coeff(1), vec!["eps", "alpha1", "alpha2"]),
            (coeff(1), vec!["eps", "beta1", "beta2"]),
            (coeff(1), vec!["eta", "alpha1", "alpha2"]),
            (coeff(1), vec!["eta", "gamma1", "gamma2"]),
        ],
    )
}

/// Index of the vertex labeled `label` (1-based) on the arm of `arm`
/// (0 = p, 1 = q, 2 = r) in [`build_pqr`].
pub fn pqr_arm_vertex(sp: StarParams, arm: usize, label: usize) -> Result<usize> {
    let lens = [sp.p - 1, sp.q - 1, sp.r - 1];
    if arm > 2 || label == 0 || label > lens[arm] {
        return Err(Error::InvalidParams(format!("no vertex {label} on arm {arm}")));
    }
    Ok(2 + lens[..arm].iter().sum::<usize>() + label - 1)
}

/// The exceptional quiver `X6` with potential
/// `a1 b1 g1 + a2 b2 g2 + a1 e1 g1 a2 e2 g2`.
pub fn build_x6() -> QP {
    // T = 0, C = 1, L1 = 2, L2 = 3, R1 = 4, R2 = 5
    let quiver = Quiver::new(
        6,
        vec![
            Arrow::new("top", 0, 1),
            Arrow::new("alpha1", 1, 2),
            Arrow::new("alpha2", 1, 4),
            Arrow::new("beta1", 2, 3),
            Arrow::new("epsilon1", 2, 3),
            Arrow::new("beta2", 4, 5),
            Arrow::new("epsilon2", 4, 5),
            Arrow::new("gamma1", 3, 1),
            Arrow::new("gamma2", 5, 1),
        ],
    )
    .expect("X6 is a valid quiver");
    QP::from_ids(
        quiver,
        &[
            (coeff(1), vec!["alpha1", "beta1", "gamma1"]),
            (coeff(1), vec!["alpha2", "beta2", "gamma2"]),
            (
                coeff(1),
                vec!["alpha1", "epsilon1", "gamma1", "alpha2", "epsilon2", "gamma2"],
            ),
        ],
    )
    .expect("X6 potential is valid")
}

/// Fan triangulation of a disc with `m` marked points: linear `A_{m-3}`.
pub fn build_disc_fan(m: usize) -> Result<QP> {
    if m < 4 {
        return Err(Error::InvalidParams(format!("a disc needs at least 4 marked points, got {m}")));
    }
    let n = m - 3;
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    QP::with_zero_potential(Quiver::from_edges(n, &edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::potential::mutate_qp;

    fn sp(g: usize, b: usize) -> SurfaceParams {
        SurfaceParams::new(g, b).unwrap()
    }

    fn named(names: &[&str], edges: &[(&str, &str)]) -> Quiver {
        let idx = |s: &str| names.iter().position(|&x| x == s).unwrap();
        let e: Vec<_> = edges.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
        Quiver::from_edges(names.len(), &e).unwrap()
    }

    #[test]
    fn predicted_counts_match_table() {
        assert_eq!(predicted_counts(sp(1, 1)), (4, 7, 2));
        assert_eq!(predicted_counts(sp(0, 4)), (10, 16, 4));
        assert_eq!(predicted_counts(sp(1, 3)), (12, 21, 6));
        for g in 0..4 {
            for b in 1..5 {
                if (g, b) == (0, 1) {
                    continue;
                }
                let (n, e, t) = predicted_counts(sp(g, b));
                assert_eq!(2 * n, 3 * t + 2 * b);
                assert_eq!(e, 3 * t + b);
            }
        }
    }

    #[test]
    fn surface_builders_match_counts() {
        for g in 0..=3 {
            for b in 1..=4 {
                if (g, b) == (0, 1) {
                    continue;
                }
                let qp = build_surface_qp(sp(g, b)).unwrap();
                let (n, e, t) = predicted_counts(sp(g, b));
                assert_eq!((qp.n(), qp.arrow_count(), qp.triangle_count()), (n, e, t), "({g},{b})");
                assert!(qp.is_reduced());
                assert!(!qp.quiver().has_loops());
                let mut used = std::collections::HashSet::new();
                for w in qp.potential().terms().keys() {
                    for &a in w.letters() {
                        assert!(used.insert(a), "triangles share an arrow in ({g},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn disc_is_rejected() {
        assert!(SurfaceParams::new(0, 1).is_err());
        assert!(build_surface_qp(SurfaceParams { g: 0, b: 1 }).is_err());
        assert!(SurfaceParams::new(2, 0).is_err());
    }

    #[test]
    fn sphere_with_two_holes_is_kronecker() {
        let qp = build_surface_qp(sp(0, 2)).unwrap();
        assert_eq!(qp.n(), 2);
        assert_eq!(qp.arrow_count(), 2);
        assert!(qp.quiver().arrows().iter().all(|a| (a.source, a.target) == (0, 1)));
        assert!(qp.potential().is_zero());
    }

    #[test]
    fn torus_with_one_hole_matches_panel() {
        let panel = named(
            &["P", "M", "S", "L"],
            &[("P", "M"), ("P", "S"), ("L", "P"), ("L", "S"), ("M", "L"), ("M", "L"), ("S", "M")],
        );
        let qp = build_surface_qp(sp(1, 1)).unwrap();
        assert!(is_isomorphic(qp.quiver(), &panel));
        for k in 0..4 {
            let m = mutate_qp(&qp, k).unwrap();
            assert!(is_isomorphic(m.quiver(), &panel), "vertex {k}");
        }
    }

    #[test]
    fn sphere_with_three_holes_matches_panel() {
        let panel = named(
            &["A", "B", "C", "D", "E", "F"],
            &[
                ("A", "E"),
                ("A", "C"),
                ("B", "A"),
                ("B", "F"),
                ("C", "D"),
                ("C", "B"),
                ("D", "E"),
                ("E", "F"),
                ("F", "D"),
            ],
        );
        let qp = build_surface_qp(sp(0, 3)).unwrap();
        assert!(is_isomorphic(qp.quiver(), &panel));
    }

    #[test]
    fn genus_two_matches_panel() {
        let panel = named(
            &["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"],
            &[
                ("a", "c"),
                ("a", "e"),
                ("b", "a"),
                ("b", "e"),
                ("c", "b"),
                ("c", "b"),
                ("d", "a"),
                ("d", "i"),
                ("e", "d"),
                ("e", "c"),
                ("f", "h"),
                ("f", "j"),
                ("g", "f"),
                ("g", "j"),
                ("h", "g"),
                ("h", "g"),
                ("i", "f"),
                ("j", "i"),
                ("j", "h"),
            ],
        );
        let qp = build_surface_qp(sp(2, 1)).unwrap();
        assert_eq!((qp.n(), qp.arrow_count(), qp.triangle_count()), (10, 19, 6));
        assert!(is_isomorphic(qp.quiver(), &panel));
    }

    #[test]
    fn builders_are_deterministic() {
        assert_eq!(
            build_surface_qp(sp(2, 2)).unwrap().to_json_string(),
            build_surface_qp(sp(2, 2)).unwrap().to_json_string()
        );
        assert_eq!(build_x6().to_json_string(), build_x6().to_json_string());
    }

    #[test]
    fn star_quivers() {
        let qp = build_pqr(StarParams::new(3, 3, 3).unwrap()).unwrap();
        assert_eq!(qp.n(), 8);
        assert_eq!(qp.potential().len(), 4);
        let small = build_pqr(StarParams::new(2, 2, 2).unwrap()).unwrap();
        assert_eq!(small.n(), 5);
        assert_eq!(small.arrow_count(), 8);
        let e7 = build_pqr(StarParams::new(2, 4, 4).unwrap()).unwrap();
        assert_eq!(e7.n(), 9);
        assert!(StarParams::new(1, 3, 3).is_err());
        let d = qp.cyclic_derivative("alpha1");
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn star_mutation_creates_a_triangle_on_the_long_arm() {
        let params = StarParams::new(2, 2, 4).unwrap();
        let qp = build_pqr(params).unwrap();
        let k = pqr_arm_vertex(params, 2, 2).unwrap();
        let m = mutate_qp(&qp, k).unwrap();
        assert_eq!(m.potential().len(), 5);
        let r1 = pqr_arm_vertex(params, 2, 1).unwrap();
        let r3 = pqr_arm_vertex(params, 2, 3).unwrap();
        let has = |s: usize, t: usize| m.quiver().arrows().iter().any(|a| a.source == s && a.target == t);
        assert!(has(r1, r3) && has(r3, k) && has(k, r1));
        assert!(pqr_arm_vertex(params, 2, 4).is_err());
    }

    #[test]
    fn x6_shape() {
        let qp = build_x6();
        assert_eq!((qp.n(), qp.arrow_count(), qp.triangle_count()), (6, 9, 2));
        assert_eq!(qp.potential().max_degree(), 6);
    }

    #[test]
    fn disc_fans() {
        assert_eq!(build_disc_fan(4).unwrap().n(), 1);
        assert_eq!(build_disc_fan(5).unwrap().quiver().arrows(), &[Arrow::new("a0", 0, 1)]);
        assert_eq!(build_disc_fan(6).unwrap().arrow_count(), 2);
        assert!(build_disc_fan(3).is_err());
    }
}

//! A simple drawing of `K_n` whose edges all pass through `2n - 3` collinear blockers.
//!
//! Vertex `v_i` sits at `(i, 0)`. Edge `v_i v_j` (`i < j`) is an upper semicircle from
//! `(i, 0)` to the pivot `(-i-j, 0)` followed by a lower semicircle from the pivot to
//! `(j, 0)`. Both circles are centred on the x-axis with rational centre and squared radius,
//! so every intersection is computed exactly: the radical axis gives a rational `x`, and
//! `y^2` is rational with an exact sign.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{int, rational_str, rational_to_f64, RationalPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Upper,
    Lower,
}

impl Half {
    fn sign(self) -> i8 {
        match self {
            Half::Upper => 1,
            Half::Lower => -1,
        }
    }
}

/// A closed semicircle centred on the x-axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub center: RationalPoint,
    #[serde(with = "rational_str")]
    pub radius_squared: BigRational,
    pub half: Half,
}

impl Arc {
    /// The semicircle on the diameter from `(a, 0)` to `(b, 0)`.
    pub fn on_diameter(a: &BigRational, b: &BigRational, half: Half) -> Self {
        let c = (a + b) / int(2);
        let r = (a - b) / int(2);
        Arc {
            center: RationalPoint::new(c, int(0)),
            radius_squared: &r * &r,
            half,
        }
    }

    /// Exact membership, endpoints included.
    pub fn contains(&self, p: &RationalPoint) -> bool {
        let d = p.sub(&self.center);
        if d.dot(&d) != self.radius_squared {
            return false;
        }
        let s = if p.y.is_zero() { 0 } else if p.y.is_positive() { 1 } else { -1 };
        s == 0 || s == self.half.sign()
    }

    fn radius_f64(&self) -> f64 {
        rational_to_f64(&self.radius_squared).sqrt()
    }

    fn sample(&self, from_x: f64, samples: usize) -> Vec<[f64; 2]> {
        let (cx, _) = self.center.to_f64();
        let r = self.radius_f64();
        let start = ((from_x - cx) / r).clamp(-1.0, 1.0).acos();
        let end = std::f64::consts::PI - start;
        (0..=samples)
            .map(|k| {
                let t = start + (end - start) * k as f64 / samples as f64;
                let y = r * t.sin() * self.half.sign() as f64;
                [cx + r * t.cos(), y]
            })
            .collect()
    }
}

/// A point `(x, sign * sqrt(y_squared))`, exact even when `y` is irrational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AlgebraicPoint {
    #[serde(with = "rational_str")]
    pub x: BigRational,
    #[serde(with = "rational_str")]
    pub y_squared: BigRational,
    pub sign: i8,
}

impl AlgebraicPoint {
    fn on_axis(x: BigRational) -> Self {
        AlgebraicPoint {
            x,
            y_squared: int(0),
            sign: 0,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum ArcMeet {
    Points(Vec<AlgebraicPoint>),
    /// The arcs share a sub-arc.
    Infinite,
}

fn arc_intersection(a: &Arc, b: &Arc) -> ArcMeet {
    let (ca, cb) = (&a.center.x, &b.center.x);
    if ca == cb {
        if a.radius_squared == b.radius_squared && a.half == b.half {
            return ArcMeet::Infinite;
        }
        if a.radius_squared == b.radius_squared {
            // Opposite halves of one circle meet at the diameter's ends.
            let r = sqrt_rational(&a.radius_squared).expect("diameter endpoints are rational");
            return ArcMeet::Points(vec![
                AlgebraicPoint::on_axis(ca - &r),
                AlgebraicPoint::on_axis(ca + &r),
            ]);
        }
        return ArcMeet::Points(vec![]);
    }
    // Radical axis: (x - ca)^2 - ra^2 = (x - cb)^2 - rb^2.
    let x = (&a.radius_squared - &b.radius_squared + cb * cb - ca * ca) / (int(2) * (cb - ca));
    let dx = &x - ca;
    let y2 = &a.radius_squared - &dx * &dx;
    if y2.is_negative() {
        ArcMeet::Points(vec![])
    } else if y2.is_zero() {
        ArcMeet::Points(vec![AlgebraicPoint::on_axis(x)])
    } else if a.half == b.half {
        ArcMeet::Points(vec![AlgebraicPoint {
            x,
            y_squared: y2,
            sign: a.half.sign(),
        }])
    } else {
        ArcMeet::Points(vec![])
    }
}

fn sqrt_rational(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcEdge {
    /// 1-based vertex labels, `i < j`.
    pub i: usize,
    pub j: usize,
    pub pivot: RationalPoint,
    /// Upper arc from `v_i` to the pivot, then lower arc from the pivot to `v_j`.
    pub arcs: [Arc; 2],
}

impl ArcEdge {
    pub fn contains(&self, p: &RationalPoint) -> bool {
        self.arcs.iter().any(|a| a.contains(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDrawing {
    pub n: usize,
    pub vertices: Vec<RationalPoint>,
    /// In lexicographic `(i, j)` order.
    pub edges: Vec<ArcEdge>,
    pub blockers: Vec<RationalPoint>,
}

impl ArcDrawing {
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.iter().position(|e| (e.i, e.j) == (i.min(j), i.max(j)))
    }
}

pub fn construct_kn_arc_drawing(n: usize) -> Result<ArcDrawing> {
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let vertices = (1..=n as i64).map(|i| RationalPoint::from_ints(i, 0)).collect();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..=n {
        for j in (i + 1)..=n {
            let (xi, xj) = (int(i as i64), int(j as i64));
            let p = -(&xi + &xj);
            edges.push(ArcEdge {
                i,
                j,
                pivot: RationalPoint::new(p.clone(), int(0)),
                arcs: [
                    Arc::on_diameter(&p, &xi, Half::Upper),
                    Arc::on_diameter(&p, &xj, Half::Lower),
                ],
            });
        }
    }
    let blockers = (3..=(2 * n as i64 - 1))
        .map(|k| RationalPoint::from_ints(-k, 0))
        .collect();
    Ok(ArcDrawing {
        n,
        vertices,
        edges,
        blockers,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingReport {
    pub passed: bool,
    /// `(i, j)` of edges whose pivot is not among the blockers.
    pub uncovered_edges: Vec<(usize, usize)>,
    /// `(i, j, blocker index)` for blockers inside an edge other than its pivot.
    pub stray_blockers: Vec<(usize, usize, usize)>,
    /// `(i, j, vertex label)` for vertices inside an edge.
    pub vertices_inside: Vec<(usize, usize, usize)>,
    pub blockers_on_vertices: Vec<usize>,
}

pub fn verify_drawing_blocking(d: &ArcDrawing) -> BlockingReport {
    let mut uncovered_edges = Vec::new();
    let mut stray_blockers = Vec::new();
    let mut vertices_inside = Vec::new();
    for e in &d.edges {
        let (vi, vj) = (&d.vertices[e.i - 1], &d.vertices[e.j - 1]);
        let inside = |p: &RationalPoint| p != vi && p != vj && e.contains(p);
        let mut hit_pivot = false;
        for (k, b) in d.blockers.iter().enumerate() {
            if inside(b) {
                if *b == e.pivot {
                    hit_pivot = true;
                } else {
                    stray_blockers.push((e.i, e.j, k));
                }
            }
        }
        if !hit_pivot {
            uncovered_edges.push((e.i, e.j));
        }
        for (v, x) in d.vertices.iter().enumerate() {
            if inside(x) {
                vertices_inside.push((e.i, e.j, v + 1));
            }
        }
    }
    let blockers_on_vertices: Vec<usize> = d
        .blockers
        .iter()
        .enumerate()
        .filter(|(_, b)| d.vertices.contains(b))
        .map(|(k, _)| k)
        .collect();
    BlockingReport {
        passed: uncovered_edges.is_empty()
            && stray_blockers.is_empty()
            && vertices_inside.is_empty()
            && blockers_on_vertices.is_empty(),
        uncovered_edges,
        stray_blockers,
        vertices_inside,
        blockers_on_vertices,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairViolation {
    pub first: (usize, usize),
    pub second: (usize, usize),
    /// Common points, shared endpoints included; `None` if the curves overlap.
    pub common_points: Option<usize>,
    /// The curves touch without crossing at some common interior point.
    pub touching: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub n: usize,
    pub pairs_checked: usize,
    pub max_pairwise_intersections: usize,
    pub violating_pairs: Vec<PairViolation>,
    pub realization: String,
    pub certified: bool,
}

/// Which curve is nearer the common point's circle centres just above and below a shared
/// pivot. Both curves pass through the pivot vertically; the curve on the smaller circle is
/// inside. They cross iff the inside curve changes from one side of the axis to the other.
fn crosses_at_shared_pivot(e: &ArcEdge, f: &ArcEdge) -> bool {
    let upper = e.arcs[0].radius_squared.cmp(&f.arcs[0].radius_squared);
    let lower = e.arcs[1].radius_squared.cmp(&f.arcs[1].radius_squared);
    upper != std::cmp::Ordering::Equal && lower != std::cmp::Ordering::Equal && upper != lower
}

fn pair_check(d: &ArcDrawing, e: &ArcEdge, f: &ArcEdge) -> (Option<usize>, bool) {
    let mut common: BTreeSet<AlgebraicPoint> = BTreeSet::new();
    for a in &e.arcs {
        for b in &f.arcs {
            match arc_intersection(a, b) {
                ArcMeet::Infinite => return (None, false),
                ArcMeet::Points(ps) => common.extend(ps),
            }
        }
    }
    let mut touching = false;
    for p in &common {
        if p.sign != 0 {
            // Off the axis both circles meet transversally.
            continue;
        }
        let is_endpoint_of = |g: &ArcEdge| {
            d.vertices[g.i - 1].x == p.x || d.vertices[g.j - 1].x == p.x
        };
        if is_endpoint_of(e) || is_endpoint_of(f) {
            continue;
        }
        if e.pivot.x == p.x && f.pivot.x == p.x {
            touching |= !crosses_at_shared_pivot(e, f);
        } else {
            touching = true;
        }
    }
    (Some(common.len()), touching)
}

/// Exact count of common points for every pair of edges.
pub fn verify_simplicity(d: &ArcDrawing) -> SimplicityReport {
    let m = d.edges.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| ((a + 1)..m).map(move |b| (a, b))).collect();
    let results: Vec<(usize, usize, Option<usize>, bool)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (c, t) = pair_check(d, &d.edges[a], &d.edges[b]);
            (a, b, c, t)
        })
        .collect();
    let mut max = 0;
    let mut violating_pairs = Vec::new();
    for (a, b, c, touching) in results {
        let count = c.unwrap_or(usize::MAX);
        max = max.max(count);
        if count > 1 || touching {
            violating_pairs.push(PairViolation {
                first: (d.edges[a].i, d.edges[a].j),
                second: (d.edges[b].i, d.edges[b].j),
                common_points: c,
                touching,
            });
        }
    }
    SimplicityReport {
        n: d.n,
        pairs_checked: pairs.len(),
        max_pairwise_intersections: max,
        certified: violating_pairs.is_empty(),
        violating_pairs,
        realization: "semicircles".to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialBound {
    /// `n - 1`.
    pub stated: usize,
    /// `ceil(C(n, 2) / floor(n / 2))`: a blocker on a line meets at most `floor(n/2)` edges.
    pub ceiling: usize,
}

pub fn trivial_blocker_lower_bound(n: usize) -> Result<TrivialBound> {
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let pairs = n * (n - 1) / 2;
    Ok(TrivialBound {
        stated: n - 1,
        ceiling: pairs.div_ceil(n / 2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedEdge {
    pub i: usize,
    pub j: usize,
    pub pivot: RationalPoint,
    pub arcs: Vec<Arc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawingExport {
    pub n: usize,
    pub vertices: Vec<RationalPoint>,
    pub blockers: Vec<RationalPoint>,
    pub edges: Vec<ExportedEdge>,
    pub blocking: BlockingReport,
    pub simplicity: SimplicityReport,
}

/// The drawing together with both verification reports; `samples` points per arc are
/// added as polylines when given.
pub fn export(d: &ArcDrawing, samples: Option<usize>) -> DrawingExport {
    let edges = d
        .edges
        .iter()
        .map(|e| ExportedEdge {
            i: e.i,
            j: e.j,
            pivot: e.pivot.clone(),
            arcs: e.arcs.to_vec(),
            polyline: samples.filter(|&s| s > 0).map(|s| {
                let mut line = e.arcs[0].sample(e.i as f64, s);
                let pivot = rational_to_f64(&e.pivot.x);
                line.extend(e.arcs[1].sample(pivot, s).into_iter().skip(1));
                line
            }),
        })
        .collect();
    DrawingExport {
        n: d.n,
        vertices: d.vertices.clone(),
        blockers: d.blockers.clone(),
        edges,
        blocking: verify_drawing_blocking(d),
        simplicity: verify_simplicity(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;

    fn half(v: i64) -> BigRational {
        rat(v, 2)
    }

    #[test]
    fn construction_counts() {
        let d = construct_kn_arc_drawing(2).unwrap();
        assert_eq!(d.edges.len(), 1);
        assert_eq!(d.blockers, vec![RationalPoint::from_ints(-3, 0)]);
        let d = construct_kn_arc_drawing(7).unwrap();
        assert_eq!((d.edges.len(), d.blockers.len()), (21, 11));
        let d = construct_kn_arc_drawing(10).unwrap();
        assert_eq!((d.edges.len(), d.blockers.len()), (45, 17));
        assert!(construct_kn_arc_drawing(1).is_err());
    }

    #[test]
    fn arcs_are_the_stated_semicircles() {
        let d = construct_kn_arc_drawing(3).unwrap();
        let e = &d.edges[d.edge_index(1, 2).unwrap()];
        assert_eq!(e.arcs[0].center, RationalPoint::new(half(-2), int(0)));
        assert_eq!(e.arcs[0].radius_squared, rat(4, 1));
        assert_eq!(e.arcs[1].center, RationalPoint::new(half(-1), int(0)));
        assert_eq!(e.arcs[1].radius_squared, rat(25, 4));
        for p in [(1, 0), (-3, 0), (2, 0)] {
            assert!(e.contains(&RationalPoint::from_ints(p.0, p.1)));
        }
        assert!(e.contains(&RationalPoint::from_ints(-1, 2)));
        assert!(!e.contains(&RationalPoint::from_ints(-1, -2)));
    }

    #[test]
    fn pivots_cover_every_blocker() {
        for n in 2..=12 {
            let d = construct_kn_arc_drawing(n).unwrap();
            let pivots: BTreeSet<_> = d.edges.iter().map(|e| e.pivot.clone()).collect();
            let blockers: BTreeSet<_> = d.blockers.iter().cloned().collect();
            assert_eq!(pivots, blockers);
            assert_eq!(d.blockers.len(), 2 * n - 3);
        }
        let d = construct_kn_arc_drawing(4).unwrap();
        let a = &d.edges[d.edge_index(1, 4).unwrap()];
        let b = &d.edges[d.edge_index(2, 3).unwrap()];
        assert_eq!(a.pivot, b.pivot);
    }

    #[test]
    fn blocking_verification() {
        for n in 2..=12 {
            let r = verify_drawing_blocking(&construct_kn_arc_drawing(n).unwrap());
            assert!(r.passed, "n={n}: {r:?}");
        }
        let mut d = construct_kn_arc_drawing(4).unwrap();
        d.blockers.retain(|b| *b != RationalPoint::from_ints(-3, 0));
        let r = verify_drawing_blocking(&d);
        assert!(!r.passed);
        assert_eq!(r.uncovered_edges, vec![(1, 2)]);
        let mut d = construct_kn_arc_drawing(3).unwrap();
        d.blockers.push(RationalPoint::from_ints(2, 0));
        assert_eq!(verify_drawing_blocking(&d).blockers_on_vertices, vec![3]);
    }

    #[test]
    fn circle_algebra() {
        // Unit circles centred at 0 and 1 meet at (1/2, +-sqrt(3)/2).
        let a = Arc {
            center: RationalPoint::origin(),
            radius_squared: int(1),
            half: Half::Upper,
        };
        let mut b = Arc {
            center: RationalPoint::from_ints(1, 0),
            radius_squared: int(1),
            half: Half::Upper,
        };
        assert_eq!(
            arc_intersection(&a, &b),
            ArcMeet::Points(vec![AlgebraicPoint {
                x: rat(1, 2),
                y_squared: rat(3, 4),
                sign: 1
            }])
        );
        b.half = Half::Lower;
        assert_eq!(arc_intersection(&a, &b), ArcMeet::Points(vec![]));
        b.center = RationalPoint::from_ints(2, 0);
        assert_eq!(
            arc_intersection(&a, &b),
            ArcMeet::Points(vec![AlgebraicPoint::on_axis(int(1))])
        );
        assert_eq!(arc_intersection(&a, &a.clone()), ArcMeet::Infinite);
    }

    #[test]
    fn small_simplicity_by_hand() {
        let d = construct_kn_arc_drawing(3).unwrap();
        let r = verify_simplicity(&d);
        assert_eq!(r.pairs_checked, 3);
        assert_eq!(r.max_pairwise_intersections, 1);
        assert!(r.certified);
        // Adjacent edges meet only at their shared endpoint.
        let e12 = &d.edges[d.edge_index(1, 2).unwrap()];
        let e13 = &d.edges[d.edge_index(1, 3).unwrap()];
        assert_eq!(pair_check(&d, e12, e13), (Some(1), false));
    }

    #[test]
    fn shared_pivot_is_a_crossing() {
        let d = construct_kn_arc_drawing(4).unwrap();
        let a = &d.edges[d.edge_index(1, 4).unwrap()];
        let b = &d.edges[d.edge_index(2, 3).unwrap()];
        assert!(crosses_at_shared_pivot(a, b));
        assert_eq!(pair_check(&d, a, b), (Some(1), false));
    }

    #[test]
    fn simplicity_up_to_twenty() {
        for n in 2..=20 {
            let r = verify_simplicity(&construct_kn_arc_drawing(n).unwrap());
            assert!(r.certified, "n={n}: {:?}", r.violating_pairs.first());
            assert!(r.max_pairwise_intersections <= 1);
        }
    }

    #[test]
    fn tampered_arc_is_flagged() {
        let mut d = construct_kn_arc_drawing(4).unwrap();
        // Swap the halves of one edge so it doubles back over its neighbours.
        let k = d.edge_index(1, 2).unwrap();
        d.edges[k].arcs[0].half = Half::Lower;
        d.edges[k].arcs[1].half = Half::Upper;
        let r = verify_simplicity(&d);
        assert!(!r.certified);
    }

    #[test]
    fn trivial_bounds() {
        assert_eq!(trivial_blocker_lower_bound(4).unwrap(), TrivialBound { stated: 3, ceiling: 3 });
        assert_eq!(trivial_blocker_lower_bound(7).unwrap(), TrivialBound { stated: 6, ceiling: 7 });
        assert_eq!(trivial_blocker_lower_bound(2).unwrap(), TrivialBound { stated: 1, ceiling: 1 });
        for n in 2..50 {
            let t = trivial_blocker_lower_bound(n).unwrap();
            assert!(t.ceiling >= t.stated);
        }
    }

    #[test]
    fn export_shapes() {
        let d = construct_kn_arc_drawing(3).unwrap();
        let ex = export(&d, Some(8));
        let line = ex.edges[0].polyline.as_ref().unwrap();
        assert_eq!(line.len(), 17);
        assert!((line[0][0] - 1.0).abs() < 1e-9 && line[0][1].abs() < 1e-9);
        assert!((line[8][0] + 3.0).abs() < 1e-9);
        assert!((line[16][0] - 2.0).abs() < 1e-9);
        assert!(line[4][1] > 0.0 && line[12][1] < 0.0);
        let v = serde_json::to_value(&ex).unwrap();
        assert_eq!(v["edges"][0]["arcs"][0]["half"], "upper");
        assert_eq!(v["edges"][0]["arcs"][0]["radius_squared"], "4/1");
        assert!(export(&d, None).edges[0].polyline.is_none());
    }
}

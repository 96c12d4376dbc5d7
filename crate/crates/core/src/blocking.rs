//! Blocking sets.
//!
//! A blocking instance is a list of open segments over a vertex list. Blocking it is a
//! hitting-set problem over the plane, made finite by [`candidate_blockers`]: an optimal
//! blocking set only needs
//!
//! * intersection points of two or more segments, and
//! * one representative for each stretch of a segment that no crossing segment touches
//!   (the midpoint of that stretch, or a nearby rational point if the midpoint happens to
//!   be an intersection point).
//!
//! [`solve`] then runs an exact branch-and-bound over those candidates.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geom::{
    convex_hull_size, int, intersect_unchecked, max_collinear, parameter_on, rat,
    strictly_between, PointSet, RationalPoint, SegmentIntersection,
};
use crate::graph::{Budget, Ticker};
use crate::midpoints::midpoint_set;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Every pair of a point set; collinear overlaps are allowed.
    AllPairs,
    /// Edges of a geometric drawing; overlapping edges are rejected.
    DrawingEdges,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub point: RationalPoint,
    /// Sorted indices of the segments whose interior contains `point`.
    pub covers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingInstance {
    pub vertices: Vec<RationalPoint>,
    pub segments: Vec<(usize, usize)>,
    pub candidates: Vec<Candidate>,
    pub origin: Origin,
}

impl BlockingInstance {
    /// All `C(n, 2)` pairs of `p`, including pairs with other points of `p` between them:
    /// blockers must avoid `p`, so such pairs still need a blocker of their own.
    pub fn all_pairs(p: &PointSet) -> Result<Self> {
        let n = p.len();
        let segments: Vec<_> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        candidate_blockers(p.points(), &segments, Origin::AllPairs)
    }

    pub fn drawing(vertices: &[RationalPoint], edges: &[(usize, usize)]) -> Result<Self> {
        candidate_blockers(vertices, edges, Origin::DrawingEdges)
    }

    pub fn segment_points(&self, s: usize) -> (&RationalPoint, &RationalPoint) {
        let (a, b) = self.segments[s];
        (&self.vertices[a], &self.vertices[b])
    }

    /// Recheck every coverage set against the definition. Returns a description of the
    /// first violation.
    pub fn verify_candidates(&self) -> std::result::Result<(), String> {
        let vertices: HashSet<&RationalPoint> = self.vertices.iter().collect();
        for (ci, c) in self.candidates.iter().enumerate() {
            if vertices.contains(&c.point) {
                return Err(format!("candidate {ci} at {} is a vertex", c.point));
            }
            let actual: Vec<usize> = (0..self.segments.len())
                .filter(|&s| {
                    let (a, b) = self.segment_points(s);
                    strictly_between(&c.point, a, b)
                })
                .collect();
            if actual != c.covers {
                return Err(format!(
                    "candidate {ci} at {} claims {:?} but lies on {:?}",
                    c.point, c.covers, actual
                ));
            }
        }
        Ok(())
    }
}

fn validate_segments(vertices: &[RationalPoint], segments: &[(usize, usize)]) -> Result<()> {
    let mut seen = HashSet::new();
    for (si, &(a, b)) in segments.iter().enumerate() {
        if a >= vertices.len() || b >= vertices.len() {
            return Err(Error::Invalid(format!("segment {si} references a missing vertex")));
        }
        if vertices[a] == vertices[b] {
            return Err(Error::DegenerateSegment(vertices[a].clone()));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::Invalid(format!("segment {si} is listed twice")));
        }
    }
    let mut uniq = HashSet::new();
    for (i, v) in vertices.iter().enumerate() {
        if !uniq.insert(v) {
            let first = vertices.iter().position(|w| w == v).unwrap();
            return Err(Error::DuplicatePoint {
                point: v.clone(),
                first,
                second: i,
            });
        }
    }
    Ok(())
}

/// Rational parameters tried, in order, for a private representative inside a stretch:
/// 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...
fn representative_params() -> impl Iterator<Item = BigRational> {
    std::iter::once(rat(1, 2)).chain((3i64..).flat_map(|d| (1..d).map(move |k| rat(k, d))))
}

/// Build the finite candidate space for the given segments.
///
/// Candidates are (a) all intersection points of two or more open segments, sorted, and
/// (b) per segment, one representative for every stretch between consecutive vertices
/// lying on it (a single stretch in general position), chosen to avoid the segment's
/// intersection points. Coverage sets are exact.
pub fn candidate_blockers(
    vertices: &[RationalPoint],
    segments: &[(usize, usize)],
    origin: Origin,
) -> Result<BlockingInstance> {
    validate_segments(vertices, segments)?;
    let m = segments.len();
    let vertex_set: HashSet<&RationalPoint> = vertices.iter().collect();
    let seg = |s: usize| (&vertices[segments[s].0], &vertices[segments[s].1]);

    if origin == Origin::DrawingEdges {
        for (s, &(a, b)) in segments.iter().enumerate() {
            for (v, x) in vertices.iter().enumerate() {
                if v != a && v != b && strictly_between(x, &vertices[a], &vertices[b]) {
                    return Err(Error::VertexOnSegment { vertex: v, segment: s });
                }
            }
        }
    }

    let mut crossings: BTreeMap<RationalPoint, BTreeSet<usize>> = BTreeMap::new();
    let mut on_segment: Vec<HashSet<RationalPoint>> = vec![HashSet::new(); m];
    for s in 0..m {
        let (a1, b1) = seg(s);
        for t in (s + 1)..m {
            let (a2, b2) = seg(t);
            match intersect_unchecked(a1, b1, a2, b2) {
                SegmentIntersection::Point(x) => {
                    if vertex_set.contains(&x) {
                        continue;
                    }
                    on_segment[s].insert(x.clone());
                    on_segment[t].insert(x.clone());
                    let e = crossings.entry(x).or_default();
                    e.insert(s);
                    e.insert(t);
                }
                SegmentIntersection::Overlap if origin == Origin::DrawingEdges => {
                    return Err(Error::OverlappingSegments(s, t));
                }
                _ => {}
            }
        }
    }

    let mut candidates: Vec<Candidate> = crossings
        .iter()
        .map(|(x, segs)| Candidate {
            point: x.clone(),
            covers: segs.iter().copied().collect(),
        })
        .collect();

    let mut private_seen: HashSet<RationalPoint> = HashSet::new();
    for s in 0..m {
        let (a, b) = seg(s);
        // Parameters of the vertices on this segment, endpoints included.
        let mut stops: Vec<BigRational> = vec![int(0), int(1)];
        for x in vertices {
            if strictly_between(x, a, b) {
                stops.push(parameter_on(x, a, b));
            }
        }
        stops.sort();
        for w in stops.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let rep = representative_params()
                .map(|q| a.lerp(b, &(lo + (hi - lo) * q)))
                .find(|x| !on_segment[s].contains(x))
                .expect("finitely many intersection points on a segment");
            if !private_seen.insert(rep.clone()) {
                continue;
            }
            let covers: Vec<usize> = (0..m)
                .filter(|&t| {
                    let (c, d) = seg(t);
                    strictly_between(&rep, c, d)
                })
                .collect();
            candidates.push(Candidate { point: rep, covers });
        }
    }

    Ok(BlockingInstance {
        vertices: vertices.to_vec(),
        segments: segments.to_vec(),
        candidates,
        origin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingSet {
    pub points: Vec<RationalPoint>,
    /// `(segment, index into points)`, first blocker on each segment.
    pub covers: Vec<(usize, usize)>,
    pub optimal: bool,
    /// Proven lower bound on the minimum; equals `points.len()` when optimal.
    pub lower_bound: usize,
}

impl BlockingSet {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

/// Serialized blocking report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingReport {
    pub size: usize,
    pub optimal: bool,
    pub lower_bound: usize,
    pub blockers: Vec<RationalPoint>,
    pub covers: Vec<(usize, usize)>,
    pub segments: Vec<(usize, usize)>,
    pub origin: Origin,
    pub note: String,
}

impl BlockingReport {
    pub fn new(inst: &BlockingInstance, b: &BlockingSet) -> Self {
        let note = match inst.origin {
            Origin::AllPairs => "all C(n,2) pairs are segments, including pairs with points of the set between them; blockers avoid the set",
            Origin::DrawingEdges => "segments are the listed drawing edges",
        };
        BlockingReport {
            size: b.size(),
            optimal: b.optimal,
            lower_bound: b.lower_bound,
            blockers: b.points.clone(),
            covers: b.covers.clone(),
            segments: inst.segments.clone(),
            origin: inst.origin,
            note: note.to_string(),
        }
    }
}

struct HittingSet {
    cand_cov: Vec<BitSet>,
    seg_cands: Vec<BitSet>,
}

impl HittingSet {
    fn new(inst: &BlockingInstance) -> Self {
        let m = inst.segments.len();
        let k = inst.candidates.len();
        let cand_cov: Vec<BitSet> = inst
            .candidates
            .iter()
            .map(|c| {
                let mut b = BitSet::new(m);
                c.covers.iter().for_each(|&s| b.insert(s));
                b
            })
            .collect();
        let mut seg_cands = vec![BitSet::new(k); m];
        for (ci, c) in inst.candidates.iter().enumerate() {
            for &s in &c.covers {
                seg_cands[s].insert(ci);
            }
        }
        HittingSet { cand_cov, seg_cands }
    }

    /// Candidates not dominated by another (strict superset, or equal and earlier).
    fn undominated(&self) -> BitSet {
        let k = self.cand_cov.len();
        let mut keep = BitSet::full(k);
        for c in 0..k {
            for d in 0..k {
                if c == d || !keep.contains(d) {
                    continue;
                }
                let sub = self.cand_cov[c].is_subset(&self.cand_cov[d]);
                if sub && (d < c || !self.cand_cov[d].is_subset(&self.cand_cov[c])) {
                    keep.remove(c);
                    break;
                }
            }
        }
        keep
    }

    /// Segments that pairwise share no allowed candidate each need their own blocker.
    fn packing_bound(&self, uncovered: &BitSet, allowed: &BitSet) -> usize {
        let mut order: Vec<(usize, usize)> = uncovered
            .iter()
            .map(|s| (self.seg_cands[s].intersection_count(allowed), s))
            .collect();
        order.sort_unstable();
        let mut used = BitSet::new(allowed.capacity());
        let mut count = 0;
        for (_, s) in order {
            let mut cs = self.seg_cands[s].clone();
            cs.intersect_with(allowed);
            if !cs.intersects(&used) {
                count += 1;
                for c in cs.iter() {
                    used.insert(c);
                }
            }
        }
        count
    }

    fn greedy(&self, uncovered: &BitSet, allowed: &BitSet) -> Vec<usize> {
        let mut unc = uncovered.clone();
        let mut out = Vec::new();
        while !unc.is_empty() {
            let best = allowed
                .iter()
                .max_by_key(|&c| (self.cand_cov[c].intersection_count(&unc), std::cmp::Reverse(c)))
                .expect("every segment has a candidate");
            out.push(best);
            unc.difference_with(&self.cand_cov[best]);
        }
        out
    }

    fn search(
        &self,
        uncovered: &BitSet,
        allowed: &BitSet,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        ticker: &mut Ticker,
    ) {
        if ticker.tick() {
            return;
        }
        if uncovered.is_empty() {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.packing_bound(uncovered, allowed) >= best.len() {
            return;
        }
        // Branch on the segment with the fewest remaining candidates.
        let (count, s) = uncovered
            .iter()
            .map(|s| (self.seg_cands[s].intersection_count(allowed), s))
            .min()
            .unwrap();
        if count == 0 {
            return;
        }
        let mut options: Vec<usize> = self.seg_cands[s].iter().filter(|&c| allowed.contains(c)).collect();
        options.sort_by_key(|&c| (std::cmp::Reverse(self.cand_cov[c].intersection_count(uncovered)), c));
        let mut local = allowed.clone();
        for c in options {
            let mut next = uncovered.clone();
            next.difference_with(&self.cand_cov[c]);
            chosen.push(c);
            self.search(&next, &local, chosen, best, ticker);
            chosen.pop();
            // Later siblings exclude c: any solution using c was covered by this branch.
            local.remove(c);
            if ticker.out_of_time {
                return;
            }
        }
    }
}

/// Minimum-cardinality hitting set over the instance's candidates.
pub fn solve(inst: &BlockingInstance, budget: Budget) -> BlockingSet {
    let m = inst.segments.len();
    let hs = HittingSet::new(inst);
    let allowed = hs.undominated();
    let all = BitSet::full(m);
    let root_bound = hs.packing_bound(&all, &allowed);
    let mut best = hs.greedy(&all, &allowed);
    let mut ticker = Ticker::new(budget);
    if best.len() > root_bound {
        hs.search(&all, &allowed, &mut Vec::new(), &mut best, &mut ticker);
    }
    best.sort_unstable();
    let optimal = !ticker.out_of_time;
    let points: Vec<RationalPoint> = best.iter().map(|&c| inst.candidates[c].point.clone()).collect();
    let covers = (0..m)
        .map(|s| {
            let bi = best.iter().position(|&c| hs.cand_cov[c].contains(s)).expect("feasible");
            (s, bi)
        })
        .collect();
    BlockingSet {
        lower_bound: if optimal { points.len() } else { root_bound },
        points,
        covers,
        optimal,
    }
}

/// `b(P)` with a witness, over all pairs of `p`.
pub fn min_blocking_set(p: &PointSet, budget: Budget) -> Result<BlockingSet> {
    Ok(solve(&BlockingInstance::all_pairs(p)?, budget))
}

/// Minimum blocking set of a geometric drawing given by vertices and edges.
pub fn min_blocking_set_drawing(
    vertices: &[RationalPoint],
    edges: &[(usize, usize)],
    budget: Budget,
) -> Result<BlockingSet> {
    Ok(solve(&BlockingInstance::drawing(vertices, edges)?, budget))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCertificate {
    pub blocks: bool,
    /// A pair with no blocker on its open segment.
    pub uncovered: Option<(usize, usize)>,
    /// `(blocker index, point index)` of a blocker that coincides with a point of the set.
    pub collision: Option<(usize, usize)>,
}

/// Does `b` block every pair of `p`?
pub fn is_blocking_set(p: &PointSet, b: &[RationalPoint]) -> BlockingCertificate {
    let pts = p.points();
    for (bi, x) in b.iter().enumerate() {
        if let Some(pi) = pts.iter().position(|q| q == x) {
            return BlockingCertificate {
                blocks: false,
                uncovered: None,
                collision: Some((bi, pi)),
            };
        }
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if !b.iter().any(|x| strictly_between(x, &pts[i], &pts[j])) {
                return BlockingCertificate {
                    blocks: false,
                    uncovered: Some((i, j)),
                    collision: None,
                };
            }
        }
    }
    BlockingCertificate {
        blocks: true,
        uncovered: None,
        collision: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawingBlockCheck {
    pub blocks: bool,
    pub uncovered_edges: Vec<usize>,
    /// Blockers that coincide with a vertex.
    pub blockers_on_vertices: Vec<usize>,
}

/// Does every edge contain a blocker, with no blocker on a vertex?
pub fn verify_drawing_blockers(
    vertices: &[RationalPoint],
    edges: &[(usize, usize)],
    blockers: &[RationalPoint],
) -> DrawingBlockCheck {
    let vs: HashSet<&RationalPoint> = vertices.iter().collect();
    let blockers_on_vertices: Vec<usize> = blockers
        .iter()
        .enumerate()
        .filter(|(_, b)| vs.contains(b))
        .map(|(i, _)| i)
        .collect();
    let uncovered_edges: Vec<usize> = edges
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| {
            !blockers
                .iter()
                .any(|x| strictly_between(x, &vertices[a], &vertices[b]))
        })
        .map(|(i, _)| i)
        .collect();
    DrawingBlockCheck {
        blocks: uncovered_edges.is_empty() && blockers_on_vertices.is_empty(),
        uncovered_edges,
        blockers_on_vertices,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationBound {
    pub n: usize,
    pub hull_size: usize,
    /// `3n - 3 - t`: edges of any triangulation, each needing its own blocker.
    pub bound: usize,
    /// `2n - 3`, the hull-free corollary.
    pub corollary: usize,
}

pub fn triangulation_lower_bound(p: &PointSet) -> Result<TriangulationBound> {
    if p.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: p.len(),
        });
    }
    p.require_general_position()?;
    let n = p.len();
    let t = convex_hull_size(p)?;
    Ok(TriangulationBound {
        n,
        hull_size: t,
        bound: 3 * n - 3 - t,
        corollary: 2 * n - 3,
    })
}

/// All pairwise midpoints, verified to block `p`. Its size is `m(P)`.
pub fn midpoint_blocking_set(p: &PointSet) -> Result<BlockingSet> {
    p.require_general_position()?;
    let mids: Vec<RationalPoint> = midpoint_set(p)?.into_iter().collect();
    let cert = is_blocking_set(p, &mids);
    if let Some((_, pi)) = cert.collision {
        // A midpoint on a point of the set means three collinear points.
        return Err(Error::Invalid(format!("midpoint coincides with point {pi}")));
    }
    debug_assert!(cert.blocks);
    let pts = p.points();
    let mut covers = Vec::new();
    let mut s = 0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let bi = mids.binary_search(&pts[i].midpoint(&pts[j])).expect("midpoint present");
            covers.push((s, bi));
            s += 1;
        }
    }
    let lower_bound = if p.len() >= 3 {
        triangulation_lower_bound(p)?.bound
    } else {
        1
    };
    Ok(BlockingSet {
        points: mids,
        covers,
        optimal: false,
        lower_bound,
    })
}

/// A bipartite geometric drawing of `K_{n,n}` with its stated blockers. Vertices are
/// `v_1..v_n` followed by `w_1..w_n`; edge `(i, n + j)` joins `v_i` and `w_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDrawing {
    pub n: usize,
    pub vertices: Vec<RationalPoint>,
    pub edges: Vec<(usize, usize)>,
    pub blockers: Vec<RationalPoint>,
    /// Index into `blockers` of the stated blocker of each edge.
    pub designated: Vec<usize>,
}

impl BipartiteDrawing {
    pub fn verify(&self) -> DrawingBlockCheck {
        verify_drawing_blockers(&self.vertices, &self.edges, &self.blockers)
    }

    /// Each edge contains its designated blocker.
    pub fn designated_ok(&self) -> bool {
        self.edges.iter().zip(&self.designated).all(|(&(a, b), &k)| {
            strictly_between(&self.blockers[k], &self.vertices[a], &self.vertices[b])
        })
    }

    pub fn vertices_general_position(&self) -> bool {
        PointSet::new("v", self.vertices.clone())
            .map(|p| p.is_general_position())
            .unwrap_or(false)
    }
}

fn complete_bipartite_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).map(move |j| (i, n + j))).collect()
}

/// `v_i = (2i, 0)`, `w_j = (2j, 2)`, blockers `(k, 1)` for `k` in `[2, 2n]`; edge `v_i w_j`
/// passes through `(i + j, 1)`.
pub fn construct_knn_grid(n: usize) -> Result<BipartiteDrawing> {
    if n == 0 {
        return Err(Error::Invalid("K_{n,n} needs n >= 1".into()));
    }
    let ni = n as i64;
    let mut vertices: Vec<RationalPoint> = (1..=ni).map(|i| RationalPoint::from_ints(2 * i, 0)).collect();
    vertices.extend((1..=ni).map(|j| RationalPoint::from_ints(2 * j, 2)));
    let blockers = (2..=2 * ni).map(|k| RationalPoint::from_ints(k, 1)).collect();
    let edges = complete_bipartite_edges(n);
    // (i + j) with i, j >= 1 maps to blocker index i + j - 2 (0-based i, j: i + j).
    let designated = edges.iter().map(|&(i, wj)| i + (wj - n)).collect();
    Ok(BipartiteDrawing {
        n,
        vertices,
        edges,
        blockers,
        designated,
    })
}

/// `v_i = (-2^i, 4^i)`, `w_j = (2^j, 4^j)` on the parabola `y = x^2`; edge `v_i w_j` passes
/// through `(0, 2^(i+j))`.
pub fn construct_knn_parabola(n: usize) -> Result<BipartiteDrawing> {
    if n == 0 {
        return Err(Error::Invalid("K_{n,n} needs n >= 1".into()));
    }
    let s: Vec<u64> = (1..=n as u32).map(|i| 1u64 << i).collect();
    let d = product_drawing(&s);
    Ok(d.drawing)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSetDrawing {
    pub drawing: BipartiteDrawing,
    /// Sorted `S . S`; the blockers are `(0, p)` for `p` in this set.
    pub product_set: Vec<u128>,
}

fn product_drawing(s: &[u64]) -> ProductSetDrawing {
    use num_bigint::BigInt;
    let n = s.len();
    let big = |v: u64| BigInt::from(v);
    let mut vertices: Vec<RationalPoint> = s
        .iter()
        .map(|&v| RationalPoint::from_bigints(-big(v), big(v) * big(v)))
        .collect();
    vertices.extend(s.iter().map(|&v| RationalPoint::from_bigints(big(v), big(v) * big(v))));
    let products: BTreeSet<u128> = s
        .iter()
        .flat_map(|&a| s.iter().map(move |&b| a as u128 * b as u128))
        .collect();
    let product_set: Vec<u128> = products.into_iter().collect();
    let blockers = product_set
        .iter()
        .map(|&p| RationalPoint::from_bigints(BigInt::from(0), BigInt::from(p)))
        .collect();
    let edges = complete_bipartite_edges(n);
    let designated = edges
        .iter()
        .map(|&(i, wj)| {
            let p = s[i] as u128 * s[wj - n] as u128;
            product_set.binary_search(&p).unwrap()
        })
        .collect();
    ProductSetDrawing {
        drawing: BipartiteDrawing {
            n,
            vertices,
            edges,
            blockers,
            designated,
        },
        product_set,
    }
}

/// `K_{n,n}` on opposite sides of `y = x^2` at abscissae `-s_i` and `s_j`, blocked on the
/// y-axis at `(0, s_i s_j)`. Edges `v_i w_i` are included, so squares belong to the
/// blocker set.
pub fn product_set_drawing(s: &[u64]) -> Result<ProductSetDrawing> {
    crate::midpoints::product_set(s)?;
    if s.is_empty() {
        return Err(Error::Invalid("product-set drawing needs a non-empty S".into()));
    }
    Ok(product_drawing(s))
}

/// Where the survey's point sets come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurveySource {
    /// Every `n`-subset of the `width x height` integer grid.
    GridSubsets {
        width: i64,
        height: i64,
        #[serde(default)]
        dedupe_symmetry: bool,
    },
    /// Seeded random integer sets with no `l` collinear points.
    Random { count: usize, bound: i64, seed: u64 },
    Explicit { sets: Vec<PointSet> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub name: String,
    pub points: Vec<RationalPoint>,
    pub n: usize,
    pub max_collinear: usize,
    /// `3n - 3 - t` for general-position sets.
    pub triangulation_bound: Option<usize>,
    pub b_lower: usize,
    pub b_upper: usize,
    pub optimal: bool,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub n: usize,
    pub l: usize,
    pub rows: Vec<SurveyRow>,
    /// Smallest and largest `b(P)` upper bounds seen, and the smallest `m(P)`.
    pub b_min: Option<usize>,
    pub b_max: Option<usize>,
    pub m_min: Option<usize>,
}

/// Translation- and D4-invariant key of an integer point set.
pub(crate) fn symmetry_key(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let maps: [fn((i64, i64)) -> (i64, i64); 8] = [
        |(x, y)| (x, y),
        |(x, y)| (-x, y),
        |(x, y)| (x, -y),
        |(x, y)| (-x, -y),
        |(x, y)| (y, x),
        |(x, y)| (-y, x),
        |(x, y)| (y, -x),
        |(x, y)| (-y, -x),
    ];
    maps.iter()
        .map(|f| {
            let mut v: Vec<(i64, i64)> = pts.iter().map(|&p| f(p)).collect();
            let mx = v.iter().map(|p| p.0).min().unwrap_or(0);
            let my = v.iter().map(|p| p.1).min().unwrap_or(0);
            v.iter_mut().for_each(|p| *p = (p.0 - mx, p.1 - my));
            v.sort_unstable();
            v
        })
        .min()
        .unwrap_or_default()
}

pub(crate) fn grid_subsets(width: i64, height: i64, n: usize, l: usize, dedupe: bool) -> Vec<PointSet> {
    let grid: Vec<(i64, i64)> = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).collect();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut idx: Vec<usize> = (0..n).collect();
    if n > grid.len() || n == 0 {
        return out;
    }
    loop {
        let coords: Vec<(i64, i64)> = idx.iter().map(|&i| grid[i]).collect();
        let p = PointSet::from_ints(format!("grid{width}x{height}-{idx:?}"), &coords).expect("distinct");
        let admitted = max_collinear(&p).map(|mc| mc < l).unwrap_or(false);
        if admitted && (!dedupe || seen.insert(symmetry_key(&coords))) {
            out.push(p);
        }
        // Next combination in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < grid.len() - n + i {
                break;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Survey `b(P)` and `m(P)` over `n`-point sets with no `l` collinear points.
pub fn bounded_collinearity_survey(
    n: usize,
    l: usize,
    source: &SurveySource,
    budget_ms: Option<u64>,
) -> Result<SurveyReport> {
    use rayon::prelude::*;
    if l < 3 {
        return Err(Error::Invalid(format!("survey needs l >= 3, got {l}")));
    }
    let sets: Vec<PointSet> = match source {
        SurveySource::GridSubsets {
            width,
            height,
            dedupe_symmetry,
        } => grid_subsets(*width, *height, n, l, *dedupe_symmetry),
        SurveySource::Random { count, bound, seed } => (0..*count)
            .map(|i| crate::generate::random_no_l_collinear(n, *bound, seed.wrapping_add(i as u64), l))
            .collect::<Result<Vec<_>>>()?,
        SurveySource::Explicit { sets } => sets
            .iter()
            .filter(|p| p.len() == n && max_collinear(p).map(|mc| mc < l).unwrap_or(false))
            .cloned()
            .collect(),
    };
    let rows = sets
        .par_iter()
        .map(|p| -> Result<SurveyRow> {
            let b = min_blocking_set(p, Budget::from_option(budget_ms))?;
            let tri = if p.is_general_position() && p.len() >= 3 {
                Some(triangulation_lower_bound(p)?.bound)
            } else {
                None
            };
            Ok(SurveyRow {
                name: p.name().to_string(),
                points: p.points().to_vec(),
                n: p.len(),
                max_collinear: max_collinear(p)?,
                triangulation_bound: tri,
                b_lower: b.lower_bound.max(tri.unwrap_or(0)),
                b_upper: b.size(),
                optimal: b.optimal,
                m: midpoint_set(p)?.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurveyReport {
        n,
        l,
        b_min: rows.iter().map(|r| r.b_upper).min(),
        b_max: rows.iter().map(|r| r.b_upper).max(),
        m_min: rows.iter().map(|r| r.m).min(),
        rows,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: i64, y: i64) -> RationalPoint {
        RationalPoint::from_ints(x, y)
    }

    fn triangle() -> PointSet {
        PointSet::from_ints("tri", &[(0, 0), (2, 0), (0, 2)]).unwrap()
    }

    fn square() -> PointSet {
        PointSet::from_ints("sq", &[(0, 0), (2, 0), (2, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn is_blocking_examples() {
        let tri = triangle();
        let mids = vec![pt(1, 0), pt(0, 1), pt(1, 1)];
        assert!(is_blocking_set(&tri, &mids).blocks);
        let cert = is_blocking_set(&tri, &mids[..2]);
        assert!(!cert.blocks);
        assert_eq!(cert.uncovered, Some((1, 2)));
        let sq = square();
        let b = vec![pt(1, 1), pt(1, 0), pt(0, 1), pt(2, 1), pt(1, 2)];
        assert!(is_blocking_set(&sq, &b).blocks);
        let bad = vec![pt(0, 0)];
        assert_eq!(is_blocking_set(&sq, &bad).collision, Some((0, 0)));
    }

    #[test]
    fn candidates_square() {
        let inst = BlockingInstance::all_pairs(&square()).unwrap();
        inst.verify_candidates().unwrap();
        // Diagonals are segments (0,2) and (1,3): indices 1 and 4.
        let multi: Vec<_> = inst.candidates.iter().filter(|c| c.covers.len() >= 2).collect();
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].point, pt(1, 1));
        assert_eq!(multi[0].covers, vec![1, 4]);
        // One private candidate per segment; the diagonals' midpoints are taken by the
        // centre, so theirs moved to 1/3.
        assert_eq!(inst.candidates.len(), 1 + 6);
        let diag_private = inst.candidates.iter().find(|c| c.covers == vec![1]).unwrap();
        assert_eq!(diag_private.point, RationalPoint::new(rat(2, 3), rat(2, 3)));
    }

    #[test]
    fn candidates_triangle_and_knn() {
        let inst = BlockingInstance::all_pairs(&triangle()).unwrap();
        assert_eq!(inst.candidates.len(), 3);
        assert!(inst.candidates.iter().all(|c| c.covers.len() == 1));

        let d = construct_knn_grid(2).unwrap();
        let inst = BlockingInstance::drawing(&d.vertices, &d.edges).unwrap();
        inst.verify_candidates().unwrap();
        let c = inst.candidates.iter().find(|c| c.point == pt(3, 1)).unwrap();
        assert_eq!(c.covers.len(), 2);
    }

    #[test]
    fn drawing_overlaps_rejected() {
        let v = vec![pt(0, 0), pt(4, 0), pt(1, 0), pt(2, 0)];
        assert!(matches!(
            BlockingInstance::drawing(&v, &[(0, 1), (2, 3)]),
            Err(Error::OverlappingSegments(0, 1)) | Err(Error::VertexOnSegment { .. })
        ));
        let v = vec![pt(0, 0), pt(4, 0), pt(1, 1), pt(5, 1), pt(2, 0)];
        assert!(matches!(
            BlockingInstance::drawing(&v, &[(0, 1), (2, 3)]),
            Err(Error::VertexOnSegment { vertex: 4, segment: 0 })
        ));
        let v = vec![pt(0, 0), pt(4, 0), pt(1, 0), pt(6, 0)];
        assert!(matches!(
            BlockingInstance::drawing(&v[..], &[(0, 1), (3, 2)]),
            Err(Error::VertexOnSegment { .. })
        ));
        let v = vec![pt(0, 0), pt(4, 0), pt(2, 0), pt(6, 0)];
        let e = BlockingInstance::drawing(&v, &[(0, 1), (2, 3)]);
        assert!(e.is_err());
    }

    #[test]
    fn named_minimum_values() {
        let b = min_blocking_set(&triangle(), Budget::unlimited()).unwrap();
        assert_eq!(b.size(), 3);
        assert!(b.optimal);
        let b = min_blocking_set(&square(), Budget::unlimited()).unwrap();
        assert_eq!(b.size(), 5);
        assert!(is_blocking_set(&square(), &b.points).blocks);
        for p in [triangle(), square()] {
            let inst = BlockingInstance::all_pairs(&p).unwrap();
            assert_eq!(oracle::brute_min_blocking(&inst), solve(&inst, Budget::unlimited()).size());
        }
    }

    #[test]
    fn collinear_sets_need_n_minus_one() {
        for n in 2..7 {
            let coords: Vec<_> = (0..n).map(|i| (i as i64, 0)).collect();
            let p = PointSet::from_ints("line", &coords).unwrap();
            let b = min_blocking_set(&p, Budget::unlimited()).unwrap();
            assert_eq!(b.size(), n - 1);
            assert!(is_blocking_set(&p, &b.points).blocks);
        }
    }

    #[test]
    fn triangulation_bound_examples() {
        assert_eq!(triangulation_lower_bound(&triangle()).unwrap().bound, 3);
        assert_eq!(triangulation_lower_bound(&square()).unwrap().bound, 5);
        let p = PointSet::from_ints("ti", &[(0, 0), (6, 0), (0, 6), (1, 1)]).unwrap();
        let tb = triangulation_lower_bound(&p).unwrap();
        assert_eq!((tb.bound, tb.corollary), (6, 5));
        let grid = PointSet::from_ints("g", &[(0, 0), (1, 0), (2, 0), (0, 1)]).unwrap();
        assert!(matches!(
            triangulation_lower_bound(&grid),
            Err(Error::NotGeneralPosition(..))
        ));
    }

    #[test]
    fn midpoint_blocking_examples() {
        let b = midpoint_blocking_set(&triangle()).unwrap();
        assert_eq!(b.points, vec![pt(0, 1), pt(1, 0), pt(1, 1)]);
        let b = midpoint_blocking_set(&square()).unwrap();
        assert_eq!(b.size(), 5);
        assert!(is_blocking_set(&square(), &b.points).blocks);
        let col = PointSet::from_ints("c", &[(0, 0), (1, 0), (2, 0)]).unwrap();
        assert!(midpoint_blocking_set(&col).is_err());
    }

    #[test]
    fn knn_grid_construction() {
        let d = construct_knn_grid(1).unwrap();
        assert_eq!(d.edges.len(), 1);
        assert_eq!(d.blockers, vec![pt(2, 1)]);
        let d = construct_knn_grid(2).unwrap();
        assert_eq!(d.edges.len(), 4);
        assert_eq!(d.blockers, vec![pt(2, 1), pt(3, 1), pt(4, 1)]);
        let d = construct_knn_grid(7).unwrap();
        assert_eq!((d.edges.len(), d.blockers.len()), (49, 13));
        assert!(d.verify().blocks);
        assert!(d.designated_ok());
    }

    #[test]
    fn knn_parabola_construction() {
        let d = construct_knn_parabola(1).unwrap();
        assert_eq!(d.vertices, vec![pt(-2, 4), pt(2, 4)]);
        assert_eq!(d.blockers, vec![pt(0, 4)]);
        let d = construct_knn_parabola(3).unwrap();
        assert_eq!((d.edges.len(), d.blockers.len()), (9, 5));
        assert!(d.verify().blocks);
        assert!(d.designated_ok());
        for n in 1..=8 {
            assert!(construct_knn_parabola(n).unwrap().vertices_general_position());
        }
    }

    #[test]
    fn product_set_drawing_examples() {
        let d = product_set_drawing(&[2, 4, 8]).unwrap();
        assert_eq!(d.product_set.len(), 5);
        assert!(d.drawing.verify().blocks);
        let d = product_set_drawing(&[1, 2, 3]).unwrap();
        assert_eq!(d.product_set, vec![1, 2, 3, 4, 6, 9]);
        assert!(d.drawing.verify().blocks);
        assert!(d.drawing.designated_ok());
        assert!(product_set_drawing(&[]).is_err());
    }

    #[test]
    fn bipartite_minimum_matches_oracle() {
        for n in 1..=3 {
            for d in [construct_knn_grid(n).unwrap(), construct_knn_parabola(n).unwrap()] {
                let inst = BlockingInstance::drawing(&d.vertices, &d.edges).unwrap();
                inst.verify_candidates().unwrap();
                let b = solve(&inst, Budget::unlimited());
                assert_eq!(b.size(), oracle::brute_min_blocking(&inst));
                assert!(b.size() <= 2 * n - 1);
                assert!(verify_drawing_blockers(&d.vertices, &d.edges, &b.points).blocks);
            }
        }
    }

    #[test]
    fn survey_examples() {
        let s = SurveySource::Explicit {
            sets: vec![triangle()],
        };
        let r = bounded_collinearity_survey(3, 3, &s, None).unwrap();
        assert_eq!(r.b_min, Some(3));
        let s = SurveySource::Explicit {
            sets: vec![square()],
        };
        let r = bounded_collinearity_survey(4, 3, &s, None).unwrap();
        assert_eq!(r.rows[0].b_upper, 5);
        let g3: Vec<(i64, i64)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).collect();
        let grid = PointSet::from_ints("grid3", &g3).unwrap();
        let s = SurveySource::Explicit {
            sets: vec![grid.clone()],
        };
        assert!(bounded_collinearity_survey(9, 3, &s, None).unwrap().rows.is_empty());
        let r = bounded_collinearity_survey(9, 4, &s, None).unwrap();
        assert_eq!(r.rows.len(), 1);
        let row = &r.rows[0];
        assert!(row.optimal);
        assert_eq!(row.max_collinear, 3);
        let b = min_blocking_set(&grid, Budget::unlimited()).unwrap();
        assert!(is_blocking_set(&grid, &b.points).blocks);
        assert_eq!(row.b_upper, b.size());

        let s = SurveySource::GridSubsets {
            width: 3,
            height: 3,
            dedupe_symmetry: true,
        };
        let r = bounded_collinearity_survey(3, 3, &s, None).unwrap();
        assert!(r.rows.iter().all(|row| row.b_upper == 3));
        let all = grid_subsets(3, 3, 3, 3, false);
        assert_eq!(all.len(), 84 - 8);
        assert!(r.rows.len() < all.len());
    }

    fn arb_general_position() -> impl Strategy<Value = PointSet> {
        proptest::collection::btree_set((0i64..6, 0i64..6), 3..6)
            .prop_map(|s| {
                let v: Vec<_> = s.into_iter().collect();
                PointSet::from_ints("arb", &v).unwrap()
            })
            .prop_filter("general position", |p| p.is_general_position())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn solver_properties(p in arb_general_position()) {
            let inst = BlockingInstance::all_pairs(&p).unwrap();
            prop_assert!(inst.verify_candidates().is_ok());
            let b = solve(&inst, Budget::unlimited());
            prop_assert!(b.optimal);
            prop_assert!(is_blocking_set(&p, &b.points).blocks);
            let tri = triangulation_lower_bound(&p).unwrap();
            prop_assert!(b.size() >= tri.bound);
            prop_assert!(tri.bound >= tri.corollary);
            prop_assert!(b.size() <= midpoint_set(&p).unwrap().len());
            prop_assert_eq!(b.size(), oracle::brute_min_blocking(&inst));
        }
    }
}

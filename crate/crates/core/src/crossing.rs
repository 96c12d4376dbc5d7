//! Crossing graphs, partitions into crossing families, chord-diagram covers, and the
//! concurrency census of regular polygon diagonals.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::blocking::BlockingSet;
use crate::error::{Error, Result};
use crate::geom::{hull_vertices, intersect_unchecked, rat, PointSet, SegmentIntersection};
use crate::graph::{min_colouring, Budget, Graph};

/// Segments are the `C(n, 2)` pairs in lexicographic order; an edge joins two segments
/// whose open interiors meet in a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingGraph {
    pub segments: Vec<(usize, usize)>,
    pub graph: Graph,
}

impl CrossingGraph {
    pub fn m(&self) -> usize {
        self.segments.len()
    }

    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }
}

pub(crate) fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect()
}

pub fn crossing_graph(p: &PointSet) -> Result<CrossingGraph> {
    p.require_general_position()?;
    let segments = all_pairs(p.len());
    let m = segments.len();
    let mut graph = Graph::new(m);
    let pts = p.points();
    for s in 0..m {
        let (a, b) = segments[s];
        for t in (s + 1)..m {
            let (c, d) = segments[t];
            if let SegmentIntersection::Point(_) = intersect_unchecked(&pts[a], &pts[b], &pts[c], &pts[d]) {
                graph.add_edge(s, t);
            }
        }
    }
    Ok(CrossingGraph { segments, graph })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingFamilyPartition {
    pub classes: Vec<Vec<usize>>,
    pub exact: bool,
}

impl CrossingFamilyPartition {
    pub fn size(&self) -> usize {
        self.classes.len()
    }
}

/// Cover `g`'s vertices by the fewest cliques: a minimum colouring of the complement.
fn clique_cover(g: &Graph, budget: Budget) -> CrossingFamilyPartition {
    let c = min_colouring(&g.complement(), budget);
    let mut classes = vec![Vec::new(); c.colours_used];
    for (v, &col) in c.colours.iter().enumerate() {
        classes[col - 1].push(v);
    }
    classes.retain(|c| !c.is_empty());
    CrossingFamilyPartition {
        classes,
        exact: c.exact,
    }
}

pub fn crossing_family_partition(p: &PointSet, budget: Budget) -> Result<CrossingFamilyPartition> {
    let cg = crossing_graph(p)?;
    Ok(clique_cover(&cg.graph, budget))
}

/// Every segment appears once and every class is pairwise crossing.
pub fn check_partition(g: &Graph, part: &CrossingFamilyPartition) -> std::result::Result<(), String> {
    let mut seen = vec![false; g.n()];
    for (ci, class) in part.classes.iter().enumerate() {
        for &s in class {
            if s >= g.n() || std::mem::replace(&mut seen[s], true) {
                return Err(format!("segment {s} repeated or out of range in class {ci}"));
            }
        }
        for (x, &s) in class.iter().enumerate() {
            for &t in &class[x + 1..] {
                if !g.has_edge(s, t) {
                    return Err(format!("segments {s} and {t} in class {ci} do not cross"));
                }
            }
        }
    }
    match seen.iter().position(|&b| !b) {
        Some(s) => Err(format!("segment {s} is in no class")),
        None => Ok(()),
    }
}

/// `ceil(C(n, 2) / floor(n / 2))`: a crossing family uses each point at most once.
pub fn partition_lower_bound(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    (n * (n - 1) / 2).div_ceil(n / 2)
}

/// Do chords `(a, b)` and `(c, d)` of a cycle interleave?
pub fn chords_interleave(x: (usize, usize), y: (usize, usize)) -> bool {
    let (a, b) = (x.0.min(x.1), x.0.max(x.1));
    let inside = |v: usize| a < v && v < b;
    let ends = [y.0, y.1];
    if ends.iter().any(|&v| v == a || v == b) {
        return false;
    }
    inside(y.0) != inside(y.1)
}

/// Clique cover of the interleaving graph of `chords` on an `n`-cycle.
pub fn circle_graph_cover(
    n: usize,
    chords: &[(usize, usize)],
    budget: Budget,
) -> Result<CrossingFamilyPartition> {
    for (i, &(a, b)) in chords.iter().enumerate() {
        if a == b || a >= n || b >= n {
            return Err(Error::Invalid(format!("chord {i} = ({a}, {b}) is not a chord of an {n}-cycle")));
        }
    }
    let mut g = Graph::new(chords.len());
    for i in 0..chords.len() {
        for j in (i + 1)..chords.len() {
            if chords_interleave(chords[i], chords[j]) {
                g.add_edge(i, j);
            }
        }
    }
    Ok(clique_cover(&g, budget))
}

/// For a set in convex position, the `C(n, 2)` segments as chords of the hull cycle, in the
/// same order as [`crossing_graph`]'s segments.
pub fn convex_chords(p: &PointSet) -> Result<Vec<(usize, usize)>> {
    let hull = hull_vertices(p)?;
    if hull.len() != p.len() {
        return Err(Error::Invalid(format!(
            "{} of {} points are hull vertices; not in convex position",
            hull.len(),
            p.len()
        )));
    }
    let mut pos = vec![0; p.len()];
    for (k, &v) in hull.iter().enumerate() {
        pos[v] = k;
    }
    Ok(all_pairs(p.len()).into_iter().map(|(a, b)| (pos[a], pos[b])).collect())
}

/// Group the segments of `p` by the blocker that covers them. Segments through one
/// interior point pairwise cross, so this is a crossing-family partition with at most
/// `|B|` classes.
pub fn partition_from_blocking(p: &PointSet, b: &BlockingSet) -> Result<CrossingFamilyPartition> {
    p.require_general_position()?;
    let mut by_blocker: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(s, k) in &b.covers {
        by_blocker.entry(k).or_default().push(s);
    }
    Ok(CrossingFamilyPartition {
        classes: by_blocker.into_values().collect(),
        exact: false,
    })
}

// Regular polygon census. Coordinates are irrational, so this section never produces
// RationalPoints: intersections are located in f64 and coincidences are decided exactly
// in the cyclotomic ring Z[x] / Phi_2n, where x stands for exp(i pi / n).

type Poly = Vec<i128>;

fn poly_trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Quotient and remainder of `a` by the monic `m`.
fn poly_divmod(a: &Poly, m: &Poly) -> (Poly, Poly) {
    let mut r = poly_trim(a.clone());
    let dm = m.len() - 1;
    if r.len() <= dm {
        return (vec![], r);
    }
    let mut q = vec![0i128; r.len() - dm];
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        q[shift] = lead;
        for (k, &c) in m.iter().enumerate() {
            r[shift + k] -= lead * c;
        }
        r = poly_trim(r);
    }
    (q, r)
}

fn cyclotomic(m: usize) -> Poly {
    // x^m - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![0i128; m + 1];
    p[0] = -1;
    p[m] = 1;
    for d in (1..m).filter(|d| m % d == 0) {
        let (q, r) = poly_divmod(&p, &cyclotomic(d));
        debug_assert!(r.is_empty());
        p = q;
    }
    p
}

/// Exact arithmetic on products of chord lengths of the regular `n`-gon.
struct ChordRing {
    n: usize,
    phi: Poly,
}

impl ChordRing {
    fn new(n: usize) -> Self {
        ChordRing {
            n,
            phi: cyclotomic(2 * n),
        }
    }

    /// `x^shift * prod (x^(2k) - 1)` reduced modulo `x^(2n) - 1`.
    fn product(&self, shift: usize, gaps: &[usize]) -> Poly {
        let m = 2 * self.n;
        let mut p = vec![0i128; m];
        p[shift % m] = 1;
        for &k in gaps {
            let mut next = vec![0i128; m];
            for (e, &c) in p.iter().enumerate() {
                if c != 0 {
                    next[(e + 2 * k) % m] += c;
                    next[e] -= c;
                }
            }
            p = next;
        }
        p
    }

    /// Do the main diagonals of the inscribed hexagon with the given cyclic gaps meet in a
    /// point? They do iff the alternating products of side lengths agree.
    fn hexagon_concurrent(&self, gaps: [usize; 6]) -> bool {
        let odd = [gaps[0], gaps[2], gaps[4]];
        let even = [gaps[1], gaps[3], gaps[5]];
        let lhs = self.product(even.iter().sum(), &odd);
        let rhs = self.product(odd.iter().sum(), &even);
        let diff: Poly = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        poly_divmod(&diff, &self.phi).1.is_empty()
    }

    /// Exact concurrency of three pairwise-crossing chords.
    fn concurrent(&self, chords: [(usize, usize); 3]) -> bool {
        let mut ends: Vec<usize> = chords.iter().flat_map(|&(a, b)| [a, b]).collect();
        ends.sort_unstable();
        ends.dedup();
        let crossing = chords_interleave(chords[0], chords[1])
            && chords_interleave(chords[0], chords[2])
            && chords_interleave(chords[1], chords[2]);
        if ends.len() != 6 || !crossing {
            return false;
        }
        let mut gaps = [0; 6];
        for k in 0..6 {
            gaps[k] = if k < 5 { ends[k + 1] - ends[k] } else { self.n - ends[5] + ends[0] };
        }
        self.hexagon_concurrent(gaps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgonCensus {
    pub n: usize,
    /// Chords through the centre: `n / 2` diameters for even `n`, else 0.
    pub center_multiplicity: usize,
    pub max_multiplicity_excluding_center: usize,
    /// Distinct interior intersection points, centre included.
    pub interior_points: usize,
    /// Number of interior points, excluding the centre, through exactly `k` chords.
    pub multiplicity_histogram: BTreeMap<usize, usize>,
    pub certified: bool,
    /// Clusters whose separation from a neighbour fell below the certification margin.
    pub ambiguous: Vec<Vec<(usize, usize)>>,
}

fn vertex(n: usize, k: usize) -> (f64, f64) {
    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    (t.cos(), t.sin())
}

fn f64_intersection(n: usize, s: (usize, usize), t: (usize, usize)) -> (f64, f64) {
    let (p, q) = (vertex(n, s.0), vertex(n, s.1));
    let (r, u) = (vertex(n, t.0), vertex(n, t.1));
    let d1 = (q.0 - p.0, q.1 - p.1);
    let d2 = (u.0 - r.0, u.1 - r.1);
    let den = d1.0 * d2.1 - d1.1 * d2.0;
    let w = (r.0 - p.0, r.1 - p.1);
    let a = (w.0 * d2.1 - w.1 * d2.0) / den;
    (p.0 + a * d1.0, p.1 + a * d1.1)
}

/// Points closer than this are treated as coincidence candidates.
const MERGE: f64 = 1e-9;
/// Distinct points must be at least this far apart for the census to be certified; far
/// above the f64 error of a single intersection for the polygon sizes in question.
const SEPARATION: f64 = 1e-7;

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Largest number of diagonals of the regular `n`-gon through one interior point.
pub fn regular_ngon_multiplicity(n: usize, budget: Budget) -> Result<NgonCensus> {
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    let ring = ChordRing::new(n);
    let chords = all_pairs(n);
    let mut crossings: Vec<((usize, usize), (f64, f64))> = Vec::new();
    for s in 0..chords.len() {
        for t in (s + 1)..chords.len() {
            if chords_interleave(chords[s], chords[t]) {
                crossings.push(((s, t), f64_intersection(n, chords[s], chords[t])));
            }
        }
    }
    crossings.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));

    // Candidate clusters: union points within MERGE; track the closest pair that was not
    // merged so that separation can be certified.
    let k = crossings.len();
    let mut parent: Vec<usize> = (0..k).collect();
    let mut tightest_gap = f64::INFINITY;
    let mut near_pairs = Vec::new();
    for i in 0..k {
        let (xi, yi) = crossings[i].1;
        for j in (i + 1)..k {
            let (xj, yj) = crossings[j].1;
            if xj - xi > SEPARATION {
                break;
            }
            let d = (xi - xj).hypot(yi - yj);
            if d < MERGE {
                union(&mut parent, i, j);
            } else if d < SEPARATION {
                near_pairs.push((i, j));
                tightest_gap = tightest_gap.min(d);
            }
        }
    }

    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        clusters.entry(r).or_default().push(i);
    }

    let mut certified = near_pairs.is_empty();
    let mut center_multiplicity = 0;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut interior_points = 0;
    let mut ambiguous = Vec::new();
    let is_diameter = |c: (usize, usize)| 2 * (c.1 - c.0) == n;
    for members in clusters.values() {
        if budget.exhausted() {
            certified = false;
            break;
        }
        // Exact split of the cluster: two crossings coincide iff their chords are
        // concurrent.
        let pairs: Vec<(usize, usize)> = members.iter().map(|&i| crossings[i].0).collect();
        let mut sub: Vec<usize> = (0..pairs.len()).collect();
        for a in 0..pairs.len() {
            for b in (a + 1)..pairs.len() {
                let (s, t) = pairs[a];
                let others: BTreeSet<usize> = [pairs[b].0, pairs[b].1]
                    .into_iter()
                    .filter(|&c| c != s && c != t)
                    .collect();
                let same = others
                    .iter()
                    .all(|&u| ring.concurrent([chords[s], chords[t], chords[u]]));
                if same {
                    union(&mut sub, a, b);
                }
            }
        }
        let mut points: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (a, &(s, t)) in pairs.iter().enumerate() {
            let r = find(&mut sub, a);
            let e = points.entry(r).or_default();
            e.insert(s);
            e.insert(t);
        }
        if points.len() > 1 {
            // Distinct points closer than MERGE: the float filter cannot separate them.
            certified = false;
            ambiguous.push(pairs.iter().copied().collect());
        }
        for through in points.values() {
            interior_points += 1;
            let mult = through.len();
            if through.iter().all(|&c| is_diameter(chords[c])) && mult >= 2 {
                center_multiplicity = mult;
            } else {
                *histogram.entry(mult).or_default() += 1;
            }
        }
    }
    for &(i, j) in &near_pairs {
        ambiguous.push(vec![crossings[i].0, crossings[j].0]);
    }
    if !near_pairs.is_empty() {
        log::warn!("n={n}: distinct crossings only {tightest_gap:e} apart");
    }
    Ok(NgonCensus {
        n,
        center_multiplicity,
        max_multiplicity_excluding_center: histogram.keys().next_back().copied().unwrap_or(0),
        interior_points,
        multiplicity_histogram: histogram,
        certified,
        ambiguous,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexFloor {
    pub n: usize,
    #[serde(with = "crate::geom::rational_str")]
    pub quadratic: BigRational,
    pub quadratic_f64: f64,
    pub n_ln_n: f64,
}

/// `n^2 / 14` and `n ln n` at `n`, without the unstated lower-order terms.
pub fn blocker_count_floor_convex(n: usize) -> Result<ConvexFloor> {
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let q = rat((n * n) as i64, 14);
    let nf = n as f64;
    Ok(ConvexFloor {
        n,
        quadratic_f64: nf * nf / 14.0,
        quadratic: q,
        n_ln_n: nf * nf.ln(),
    })
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Minimum clique cover by trying every assignment into `k` classes for growing `k`.
    pub fn brute_clique_cover(g: &Graph) -> usize {
        let m = g.n();
        if m == 0 {
            return 0;
        }
        fn place(g: &Graph, v: usize, k: usize, classes: &mut Vec<Vec<usize>>) -> bool {
            if v == g.n() {
                return true;
            }
            for c in 0..k {
                if c > classes.len() {
                    break;
                }
                if c == classes.len() {
                    classes.push(vec![v]);
                    if place(g, v + 1, k, classes) {
                        return true;
                    }
                    classes.pop();
                } else if classes[c].iter().all(|&u| g.has_edge(u, v)) {
                    classes[c].push(v);
                    if place(g, v + 1, k, classes) {
                        return true;
                    }
                    classes[c].pop();
                }
            }
            false
        }
        (1..=m).find(|&k| place(g, 0, k, &mut Vec::new())).unwrap()
    }
}

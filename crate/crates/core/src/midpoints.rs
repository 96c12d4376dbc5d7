//! Midpoint, sum-set and product-set arithmetic, d-dimensional progressions, and a seeded
//! search for general-position sets with few midpoints.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{PointSet, RationalPoint};

/// Midpoints of distinct pairs, deduplicated. `m(P)` is the length.
pub fn midpoint_set(p: &PointSet) -> Result<BTreeSet<RationalPoint>> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: p.len(),
        });
    }
    let pts = p.points();
    let mut out = BTreeSet::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            out.insert(a.midpoint(b));
        }
    }
    Ok(out)
}

/// `{x + y : x, y in P}`, doubles included.
pub fn sum_set(p: &PointSet) -> BTreeSet<RationalPoint> {
    let pts = p.points();
    let mut out = BTreeSet::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i..] {
            out.insert(a.add(b));
        }
    }
    out
}

fn validate_positive_distinct(s: &[u64]) -> Result<()> {
    let mut seen = HashSet::new();
    for &v in s {
        if v == 0 {
            return Err(Error::Invalid("product-set entries must be positive".into()));
        }
        if !seen.insert(v) {
            return Err(Error::Invalid(format!("duplicate entry {v} in product-set input")));
        }
    }
    Ok(())
}

/// `{ab : a, b in S}`, squares included.
pub fn product_set(s: &[u64]) -> Result<BTreeSet<u128>> {
    validate_positive_distinct(s)?;
    let mut out = BTreeSet::new();
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[i..] {
            out.insert(a as u128 * b as u128);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n: usize,
    pub midpoints: usize,
    pub sum_set: usize,
    /// `m(P) <= |P+P| <= m(P) + |P|`.
    pub holds: bool,
}

pub fn sandwich(p: &PointSet) -> Result<SandwichReport> {
    let m = midpoint_set(p)?.len();
    let s = sum_set(p).len();
    Ok(SandwichReport {
        n: p.len(),
        midpoints: m,
        sum_set: s,
        holds: m <= s && s <= m + p.len(),
    })
}

/// `{v0 + x_1 v_1 + ... + x_d v_d : x_i in [1, n_i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub v0: RationalPoint,
    pub generators: Vec<RationalPoint>,
    pub extents: Vec<u64>,
}

impl Progression {
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    pub fn nominal_size(&self) -> u128 {
        self.extents.iter().map(|&e| e as u128).product()
    }

    fn validate(&self) -> Result<()> {
        if self.generators.len() != self.extents.len() {
            return Err(Error::Invalid(format!(
                "progression has {} generators but {} extents",
                self.generators.len(),
                self.extents.len()
            )));
        }
        if self.extents.contains(&0) {
            return Err(Error::Invalid("progression extents must be positive".into()));
        }
        Ok(())
    }

    fn enumerate(&self) -> Vec<RationalPoint> {
        let mut out = vec![self.v0.clone()];
        for (v, &e) in self.generators.iter().zip(&self.extents) {
            out = out
                .iter()
                .flat_map(|base| {
                    (1..=e).map(move |x| base.add(&v.scale(&crate::geom::int(x as i64))))
                })
                .collect();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressionPoints {
    pub points: PointSet,
    /// Index tuples that landed on an already generated point.
    pub collisions: usize,
}

pub fn progression_points(g: &Progression) -> Result<ProgressionPoints> {
    g.validate()?;
    if g.dimension() == 0 {
        return Err(Error::Invalid("progression needs at least one generator".into()));
    }
    let raw = g.enumerate();
    let total = raw.len();
    let mut seen = HashSet::with_capacity(total);
    let unique: Vec<RationalPoint> = raw.into_iter().filter(|p| seen.insert(p.clone())).collect();
    let collisions = total - unique.len();
    Ok(ProgressionPoints {
        points: PointSet::new(format!("progression-d{}", g.dimension()), unique)?,
        collisions,
    })
}

/// Membership only; finding a covering progression is a different problem.
pub fn contains_all(g: &Progression, p: &PointSet) -> Result<bool> {
    g.validate()?;
    let generated: HashSet<RationalPoint> = g.enumerate().into_iter().collect();
    Ok(p.points().iter().all(|x| generated.contains(x)))
}

/// Reference values `0.8 C(n,2)` and `0.9 C(n,2)` for midpoint counts of convex sets.
pub fn convex_midpoint_fractions(n: usize) -> (f64, f64) {
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    (0.8 * pairs, 0.9 * pairs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStrategy {
    /// Random integer start sets improved by single-point moves.
    RandomRestart,
    /// Greedy growth inside a random 3-dimensional integer progression.
    ProjectedGrid,
}

impl std::str::FromStr for SearchStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-restart" => Ok(SearchStrategy::RandomRestart),
            "projected-grid" => Ok(SearchStrategy::ProjectedGrid),
            _ => Err(Error::Invalid(format!("unknown search strategy {s:?}"))),
        }
    }
}

impl std::fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchStrategy::RandomRestart => "random-restart",
            SearchStrategy::ProjectedGrid => "projected-grid",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    /// Reject sets with `l` collinear points.
    pub l: usize,
    pub strategy: SearchStrategy,
    pub seed: u64,
    pub restarts: usize,
    /// Local moves per restart; unused by the projected-grid strategy.
    pub iterations: usize,
    /// Coordinates are drawn from `[0, bound)`; 0 means `10 n^2`.
    pub bound: i64,
}

impl SearchConfig {
    pub fn new(n: usize, l: usize, strategy: SearchStrategy, seed: u64) -> Self {
        SearchConfig {
            n,
            l,
            strategy,
            seed,
            restarts: 8,
            iterations: 2000,
            bound: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub points: PointSet,
    pub m: usize,
    pub m_over_n: f64,
    /// `n (ln n)^(1/3)`, the shape of the known asymptotic lower bound without its constant.
    pub growth_reference: f64,
}

pub(crate) type IPoint = (i64, i64);

fn int_collinear(a: IPoint, b: IPoint, c: IPoint) -> bool {
    (b.0 - a.0) * (c.1 - a.1) == (b.1 - a.1) * (c.0 - a.0)
}

/// Would adding `x` to `pts` create `l` collinear points?
pub(crate) fn creates_line(pts: &[IPoint], x: IPoint, l: usize) -> bool {
    if pts.contains(&x) {
        return true;
    }
    for (i, &a) in pts.iter().enumerate() {
        let on = 2 + pts
            .iter()
            .enumerate()
            .filter(|&(j, &b)| j != i && int_collinear(x, a, b))
            .count();
        if on >= l {
            return true;
        }
    }
    false
}

fn int_midpoints(pts: &[IPoint]) -> usize {
    let mut s = HashSet::with_capacity(pts.len() * pts.len() / 2);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            s.insert((a.0 + b.0, a.1 + b.1));
        }
    }
    s.len()
}

fn random_start(rng: &mut ChaCha8Rng, n: usize, l: usize, bound: i64) -> Option<Vec<IPoint>> {
    let mut pts = Vec::with_capacity(n);
    let mut attempts = 0;
    while pts.len() < n {
        attempts += 1;
        if attempts > 1000 * n {
            return None;
        }
        let x = (rng.random_range(0..bound), rng.random_range(0..bound));
        if !creates_line(&pts, x, l) {
            pts.push(x);
        }
    }
    Some(pts)
}

fn local_search(rng: &mut ChaCha8Rng, cfg: &SearchConfig, bound: i64) -> Option<(usize, Vec<IPoint>)> {
    let mut pts = random_start(rng, cfg.n, cfg.l, bound)?;
    let mut m = int_midpoints(&pts);
    for _ in 0..cfg.iterations {
        let idx = rng.random_range(0..pts.len());
        let rest: Vec<IPoint> = pts.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, &p)| p).collect();
        // Half of the moves complete a parallelogram, which tends to merge midpoints.
        let x = if rest.len() >= 3 && rng.random_bool(0.5) {
            let a = rest[rng.random_range(0..rest.len())];
            let b = rest[rng.random_range(0..rest.len())];
            let c = rest[rng.random_range(0..rest.len())];
            (a.0 + b.0 - c.0, a.1 + b.1 - c.1)
        } else {
            (rng.random_range(0..bound), rng.random_range(0..bound))
        };
        let inside = (0..bound).contains(&x.0) && (0..bound).contains(&x.1);
        if !inside || creates_line(&rest, x, cfg.l) {
            continue;
        }
        let mut cand = rest;
        cand.push(x);
        let cm = int_midpoints(&cand);
        if cm <= m {
            m = cm;
            pts = cand;
        }
    }
    pts.sort_unstable();
    Some((m, pts))
}

fn projected_grid(rng: &mut ChaCha8Rng, cfg: &SearchConfig) -> Option<(usize, Vec<IPoint>)> {
    let side = ((cfg.n as f64).cbrt().ceil() as i64 + 2).max(3);
    let gens: Vec<IPoint> = (0..3)
        .map(|_| (rng.random_range(-7..8), rng.random_range(-7..8)))
        .collect();
    let mut pool: Vec<IPoint> = Vec::new();
    for a in 1..=side {
        for b in 1..=side {
            for c in 1..=side {
                let p = (
                    a * gens[0].0 + b * gens[1].0 + c * gens[2].0,
                    a * gens[0].1 + b * gens[1].1 + c * gens[2].1,
                );
                if !pool.contains(&p) {
                    pool.push(p);
                }
            }
        }
    }
    if pool.len() < cfg.n {
        return None;
    }
    let mut pts = vec![pool[rng.random_range(0..pool.len())]];
    while pts.len() < cfg.n {
        let mut best: Option<(usize, u64, IPoint)> = None;
        for &x in &pool {
            if creates_line(&pts, x, cfg.l) {
                continue;
            }
            let mut cand = pts.clone();
            cand.push(x);
            let key = (int_midpoints(&cand), rng.random::<u64>());
            if best.is_none_or(|(m, t, _)| (key.0, key.1) < (m, t)) {
                best = Some((key.0, key.1, x));
            }
        }
        pts.push(best?.2);
    }
    pts.sort_unstable();
    Some((int_midpoints(&pts), pts))
}

/// Seeded search for `n` points with no `l` collinear and few midpoints. Restarts run in
/// parallel with per-restart seeds; the winner is the smallest `(m, sorted points)`.
pub fn low_midpoint_search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.l < 3 {
        return Err(Error::Invalid(format!("midpoint search needs l >= 3, got {}", cfg.l)));
    }
    if cfg.n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: cfg.n });
    }
    let bound = if cfg.bound > 0 {
        cfg.bound
    } else {
        (10 * cfg.n * cfg.n) as i64
    };
    let best = (0..cfg.restarts.max(1))
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            match cfg.strategy {
                SearchStrategy::RandomRestart => local_search(&mut rng, cfg, bound),
                SearchStrategy::ProjectedGrid => projected_grid(&mut rng, cfg),
            }
        })
        .min()
        .ok_or_else(|| Error::Infeasible {
            attempts: cfg.restarts,
            reason: format!("no restart produced {} points without {} collinear", cfg.n, cfg.l),
        })?;
    let (m, pts) = best;
    let coords: Vec<(i64, i64)> = pts;
    let points = PointSet::from_ints(
        format!("low-midpoint-{}-n{}-l{}-seed{}", cfg.strategy, cfg.n, cfg.l, cfg.seed),
        &coords,
    )?;
    let n = cfg.n as f64;
    Ok(SearchResult {
        m,
        m_over_n: m as f64 / n,
        growth_reference: n * n.ln().cbrt(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{int, max_collinear};
    use proptest::prelude::*;

    fn square() -> PointSet {
        PointSet::from_ints("sq", &[(0, 0), (2, 0), (2, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn midpoint_examples() {
        let two = PointSet::from_ints("two", &[(0, 0), (4, 2)]).unwrap();
        assert_eq!(midpoint_set(&two).unwrap().len(), 1);
        assert_eq!(midpoint_set(&square()).unwrap().len(), 5);
        let line = PointSet::from_ints("line", &[(0, 0), (1, 0), (2, 0), (3, 0)]).unwrap();
        let mids: Vec<_> = midpoint_set(&line).unwrap().into_iter().map(|p| p.x).collect();
        assert_eq!(
            mids,
            vec![
                crate::geom::rat(1, 2),
                int(1),
                crate::geom::rat(3, 2),
                int(2),
                crate::geom::rat(5, 2)
            ]
        );
        let one = PointSet::from_ints("one", &[(0, 0)]).unwrap();
        assert!(midpoint_set(&one).is_err());
    }

    #[test]
    fn sum_set_examples() {
        let two = PointSet::from_ints("two", &[(0, 0), (4, 2)]).unwrap();
        assert_eq!(sum_set(&two).len(), 3);
        assert_eq!(sum_set(&square()).len(), 9);
    }

    #[test]
    fn product_set_examples() {
        let s: Vec<u128> = product_set(&[1, 2, 3]).unwrap().into_iter().collect();
        assert_eq!(s, vec![1, 2, 3, 4, 6, 9]);
        for n in 1..=20u32 {
            let geo: Vec<u64> = (1..=n).map(|i| 1u64 << i).collect();
            assert_eq!(product_set(&geo).unwrap().len(), 2 * n as usize - 1);
        }
        let first_ten: Vec<u64> = (1..=10).collect();
        // Brute-force count over the full multiplication table.
        let brute: BTreeSet<u64> = (1..=10u64).flat_map(|a| (1..=10u64).map(move |b| a * b)).collect();
        assert_eq!(brute.len(), 42);
        assert_eq!(product_set(&first_ten).unwrap().len(), 42);
        assert!(product_set(&[2, 2]).is_err());
        assert!(product_set(&[0, 1]).is_err());
    }

    #[test]
    fn progression_examples() {
        let o = RationalPoint::origin();
        let e1 = RationalPoint::from_ints(1, 0);
        let e2 = RationalPoint::from_ints(0, 1);
        let line = Progression {
            v0: o.clone(),
            generators: vec![e1.clone()],
            extents: vec![4],
        };
        let pts = progression_points(&line).unwrap();
        assert_eq!(pts.points.len(), 4);
        assert_eq!(max_collinear(&pts.points).unwrap(), 4);

        let grid = Progression {
            v0: o.clone(),
            generators: vec![e1.clone(), e2.clone()],
            extents: vec![3, 3],
        };
        let g = progression_points(&grid).unwrap();
        assert_eq!(g.points.len(), 9);
        assert_eq!(g.collisions, 0);

        // x1 + 2 x2 over {1,2}^2 is {3, 4, 5, 6}: no collision for these generators.
        let dup = Progression {
            v0: o.clone(),
            generators: vec![e1.clone(), RationalPoint::from_ints(2, 0)],
            extents: vec![2, 2],
        };
        let brute: BTreeSet<i64> = (1..=2).flat_map(|a| (1..=2).map(move |b| a + 2 * b)).collect();
        let d = progression_points(&dup).unwrap();
        assert_eq!(d.points.len(), brute.len());
        assert_eq!(d.collisions, 0);

        // Collisions do occur for a generator that is a multiple of another.
        let col = Progression {
            v0: o,
            generators: vec![e1.clone(), e1.clone()],
            extents: vec![2, 2],
        };
        let c = progression_points(&col).unwrap();
        assert_eq!(c.points.len(), 3);
        assert_eq!(c.collisions, 1);
    }

    #[test]
    fn contains_all_examples() {
        let o = RationalPoint::origin();
        let e1 = RationalPoint::from_ints(1, 0);
        let e2 = RationalPoint::from_ints(0, 1);
        let grid = Progression {
            v0: RationalPoint::from_ints(-1, -1),
            generators: vec![e1.clone(), e2],
            extents: vec![3, 3],
        };
        let g3: Vec<(i64, i64)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).collect();
        assert!(contains_all(&grid, &PointSet::from_ints("g", &g3).unwrap()).unwrap());
        let tri = PointSet::from_ints("t", &[(0, 0), (1, 0), (0, 1)]).unwrap();
        let xaxis = Progression {
            v0: o,
            generators: vec![e1],
            extents: vec![5],
        };
        assert!(!contains_all(&xaxis, &tri).unwrap());
    }

    #[test]
    fn parabola_vertices_not_in_any_line_progression() {
        let bundle = crate::blocking::construct_knn_parabola(2).unwrap();
        let p = PointSet::new("knn-par-2", bundle.vertices.clone()).unwrap();
        let pts = p.points();
        // Every 1-d progression containing two of the points has step (q - p) / k for
        // some k; try all such steps and all offsets that keep `p` in range.
        for a in pts {
            for b in pts {
                if a == b {
                    continue;
                }
                for k in 1..8i64 {
                    let step = b.sub(a).scale(&crate::geom::rat(1, k));
                    for t in 1..=8i64 {
                        for extent in 1..=8u64 {
                            let g = Progression {
                                v0: a.sub(&step.scale(&int(t))),
                                generators: vec![step.clone()],
                                extents: vec![extent],
                            };
                            assert!(!contains_all(&g, &p).unwrap());
                        }
                    }
                }
            }
        }
    }

    /// Exhaustive minimum midpoint count over general-position subsets of the 5x5 grid.
    fn brute_min_midpoints(n: usize) -> usize {
        let grid: Vec<IPoint> = (0..5).flat_map(|y| (0..5).map(move |x| (x, y))).collect();
        let mut best = usize::MAX;
        let mut chosen = Vec::new();
        fn rec(grid: &[IPoint], start: usize, n: usize, chosen: &mut Vec<IPoint>, best: &mut usize) {
            if chosen.len() == n {
                *best = (*best).min(int_midpoints(chosen));
                return;
            }
            for i in start..grid.len() {
                if creates_line(chosen, grid[i], 3) {
                    continue;
                }
                chosen.push(grid[i]);
                rec(grid, i + 1, n, chosen, best);
                chosen.pop();
            }
        }
        rec(&grid, 0, n, &mut chosen, &mut best);
        best
    }

    #[test]
    fn search_small_cases() {
        for strategy in [SearchStrategy::RandomRestart, SearchStrategy::ProjectedGrid] {
            let r = low_midpoint_search(&SearchConfig::new(3, 3, strategy, 1)).unwrap();
            assert_eq!(r.m, 3);
            assert_eq!(brute_min_midpoints(3), 3);
            let r = low_midpoint_search(&SearchConfig::new(4, 3, strategy, 1)).unwrap();
            let oracle = brute_min_midpoints(4);
            assert_eq!(oracle, 5);
            assert!(r.m >= oracle);
            assert_eq!(r.m, 5, "{strategy}");
            assert!(r.points.is_general_position());
            assert_eq!(midpoint_set(&r.points).unwrap().len(), r.m);
        }
    }

    #[test]
    fn search_is_reproducible() {
        let cfg = SearchConfig::new(8, 3, SearchStrategy::RandomRestart, 42);
        let a = low_midpoint_search(&cfg).unwrap();
        let b = low_midpoint_search(&cfg).unwrap();
        assert_eq!(a.points, b.points);
        assert!(a.points.is_general_position());
        assert!(a.m >= 8);
        assert!(low_midpoint_search(&SearchConfig::new(8, 2, SearchStrategy::RandomRestart, 1)).is_err());
    }

    fn arb_points() -> impl Strategy<Value = PointSet> {
        proptest::collection::btree_set((-4i64..5, -4i64..5), 2..9).prop_map(|s| {
            let v: Vec<_> = s.into_iter().collect();
            PointSet::from_ints("arb", &v).unwrap()
        })
    }

    /// Brute force: is the set an arithmetic progression on a line?
    fn is_line_ap(p: &PointSet) -> bool {
        let mut pts = p.points().to_vec();
        pts.sort();
        let step = pts[1].sub(&pts[0]);
        pts.windows(2).all(|w| w[1].sub(&w[0]) == step)
    }

    proptest! {
        #[test]
        fn sum_set_sandwich(p in arb_points()) {
            let r = sandwich(&p).unwrap();
            prop_assert!(r.holds);
            prop_assert!(r.sum_set >= 2 * p.len() - 1);
            if p.len() <= 6 {
                prop_assert_eq!(r.sum_set == 2 * p.len() - 1, is_line_ap(&p));
            }
            if p.is_general_position() {
                let mids = midpoint_set(&p).unwrap();
                prop_assert!(p.points().iter().all(|x| !mids.contains(x)));
            }
        }

        #[test]
        fn progression_size_bound(ext in proptest::collection::vec(1u64..4, 1..4),
                                  gens in proptest::collection::vec((-2i64..3, -2i64..3), 3)) {
            let g = Progression {
                v0: RationalPoint::origin(),
                generators: gens[..ext.len()].iter().map(|&(x, y)| RationalPoint::from_ints(x, y)).collect(),
                extents: ext,
            };
            let pts = progression_points(&g).unwrap();
            prop_assert!(pts.points.len() as u128 <= g.nominal_size());
            prop_assert_eq!(pts.points.len() + pts.collisions, g.nominal_size() as usize);
            prop_assert!(contains_all(&g, &pts.points).unwrap());
        }
    }
}

//! Point-set and drawing generators.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocking::{construct_knn_grid, construct_knn_parabola, grid_subsets, BipartiteDrawing};
use crate::drawings::{construct_kn_arc_drawing, verify_drawing_blocking, verify_simplicity, ArcDrawing};
use crate::error::{Error, Result};
use crate::geom::{hull_vertices, max_collinear, PointSet};
use crate::midpoints::{creates_line, progression_points, IPoint, Progression};

/// `n` distinct integer points in `[0, bound)^2` with no `l` collinear, drawn with a
/// seeded ChaCha stream. Candidates that would complete a forbidden line are resampled.
/// A non-positive `bound` means `10 n^2`.
pub fn random_no_l_collinear(n: usize, bound: i64, seed: u64, l: usize) -> Result<PointSet> {
    if l < 3 {
        return Err(Error::Invalid(format!("l must be at least 3, got {l}")));
    }
    let bound = if bound > 0 { bound } else { (10 * n * n).max(4) as i64 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<IPoint> = Vec::with_capacity(n);
    let mut resampled = 0usize;
    let limit = 1000 * n.max(1);
    while pts.len() < n {
        if resampled > limit {
            return Err(Error::Infeasible {
                attempts: resampled,
                reason: format!("{n} points with no {l} collinear in a {bound}x{bound} box"),
            });
        }
        let x = (rng.random_range(0..bound), rng.random_range(0..bound));
        if creates_line(&pts, x, l) {
            resampled += 1;
        } else {
            pts.push(x);
        }
    }
    log::info!("random set n={n} bound={bound} seed={seed}: {resampled} resamples");
    let p = PointSet::from_ints(format!("random-n{n}-b{bound}-s{seed}"), &pts)?;
    // Checked again with the exact predicates rather than trusted from the sampler.
    let mc = max_collinear(&p)?;
    if mc >= l {
        return Err(Error::Invalid(format!("generator produced {mc} collinear points")));
    }
    Ok(p)
}

/// `(2^i, 4^i)` for `i` in `[1, n]`: convex position on `y = x^2`.
pub fn convex_parabola(n: usize) -> Result<PointSet> {
    if n == 0 || n > 31 {
        return Err(Error::Invalid(format!("convex_parabola needs 1 <= n <= 31, got {n}")));
    }
    let c: Vec<(i64, i64)> = (1..=n as u32).map(|i| (1i64 << i, 1i64 << (2 * i))).collect();
    PointSet::from_ints(format!("convex-parabola-{n}"), &c)
}

pub fn grid(w: i64, h: i64) -> Result<PointSet> {
    if w <= 0 || h <= 0 {
        return Err(Error::Invalid(format!("grid dimensions must be positive, got {w}x{h}")));
    }
    let c: Vec<(i64, i64)> = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).collect();
    PointSet::from_ints(format!("grid-{w}x{h}"), &c)
}

/// The regular `n`-gon: float vertices for plotting and census work, plus an integer proxy
/// (vertices scaled and rounded) for exact solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularNgon {
    pub n: usize,
    pub vertices: Vec<[f64; 2]>,
    pub scale: i64,
    pub proxy: PointSet,
}

pub fn regular_ngon(n: usize) -> Result<RegularNgon> {
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let vertices: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    // Grow the scale until rounding keeps convex and general position.
    let mut scale = 1000;
    loop {
        let c: Vec<(i64, i64)> = vertices
            .iter()
            .map(|v| ((v[0] * scale as f64).round() as i64, (v[1] * scale as f64).round() as i64))
            .collect();
        if let Ok(p) = PointSet::from_ints(format!("regular-{n}-gon-x{scale}"), &c) {
            if p.is_general_position() && hull_vertices(&p).map(|h| h.len() == n).unwrap_or(false) {
                return Ok(RegularNgon {
                    n,
                    vertices,
                    scale,
                    proxy: p,
                });
            }
        }
        if scale > 1_000_000_000 {
            return Err(Error::Infeasible {
                attempts: 7,
                reason: format!("no integer proxy for the regular {n}-gon"),
            });
        }
        scale *= 10;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Grid { w: i64, h: i64 },
    /// Every `n`-subset of the `w x h` grid that passes the filters.
    GridSubsets { w: i64, h: i64, n: usize },
    ConvexParabola { n: usize },
    KnnGrid { n: usize },
    KnnParabola { n: usize },
    RegularNgon { n: usize },
    RandomGeneralPosition {
        n: usize,
        #[serde(default)]
        bound: i64,
        seed: u64,
    },
    Progression { progression: Progression },
    ArcDrawing { n: usize },
    Explicit { set: PointSet },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filters {
    /// Reject point sets with more than this many collinear points.
    #[serde(default)]
    pub max_collinear: Option<usize>,
    #[serde(default)]
    pub dedupe_symmetry: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    #[serde(default)]
    pub filters: Filters,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        GeneratorSpec {
            kind,
            filters: Filters::default(),
        }
    }
}

impl From<GeneratorKind> for GeneratorSpec {
    fn from(kind: GeneratorKind) -> Self {
        GeneratorSpec::new(kind)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Generated {
    PointSet { set: PointSet },
    Corpus { sets: Vec<PointSet> },
    Bipartite { drawing: BipartiteDrawing },
    Arc { drawing: ArcDrawing },
    Ngon { ngon: RegularNgon },
}

impl Generated {
    /// The point set that point-set tasks run on: the set itself, a drawing's vertices, or
    /// the n-gon's integer proxy.
    pub fn point_set(&self) -> Result<PointSet> {
        match self {
            Generated::PointSet { set } => Ok(set.clone()),
            Generated::Bipartite { drawing } => PointSet::new("drawing-vertices", drawing.vertices.clone()),
            Generated::Arc { drawing } => PointSet::new("arc-vertices", drawing.vertices.clone()),
            Generated::Ngon { ngon } => Ok(ngon.proxy.clone()),
            Generated::Corpus { .. } => Err(Error::Invalid("a corpus holds many point sets".into())),
        }
    }

    pub fn point_sets(&self) -> Result<Vec<PointSet>> {
        match self {
            Generated::Corpus { sets } => Ok(sets.clone()),
            _ => Ok(vec![self.point_set()?]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("generated bundles serialize")
    }
}

fn apply_filters(p: PointSet, f: &Filters) -> Result<PointSet> {
    if let Some(bound) = f.max_collinear {
        let mc = max_collinear(&p)?;
        if mc > bound {
            return Err(Error::Invalid(format!(
                "{} has {mc} collinear points, above the filter bound {bound}",
                p.name()
            )));
        }
    }
    Ok(p)
}

/// Deterministic for a fixed spec. Construction bundles are verified before they are
/// returned.
pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    let f = &spec.filters;
    let set = |p: PointSet| -> Result<Generated> { Ok(Generated::PointSet { set: apply_filters(p, f)? }) };
    match &spec.kind {
        GeneratorKind::Grid { w, h } => set(grid(*w, *h)?),
        GeneratorKind::GridSubsets { w, h, n } => {
            let l = f.max_collinear.map(|m| m + 1).unwrap_or(usize::MAX);
            Ok(Generated::Corpus {
                sets: grid_subsets(*w, *h, *n, l, f.dedupe_symmetry),
            })
        }
        GeneratorKind::ConvexParabola { n } => set(convex_parabola(*n)?),
        GeneratorKind::KnnGrid { n } => bipartite(construct_knn_grid(*n)?),
        GeneratorKind::KnnParabola { n } => bipartite(construct_knn_parabola(*n)?),
        GeneratorKind::RegularNgon { n } => Ok(Generated::Ngon { ngon: regular_ngon(*n)? }),
        GeneratorKind::RandomGeneralPosition { n, bound, seed } => {
            let p = random_no_l_collinear(*n, *bound, *seed, 3)?;
            if max_collinear(&p)? > 2 && p.len() > 2 {
                return Err(Error::Invalid("random set is not in general position".into()));
            }
            set(p)
        }
        GeneratorKind::Progression { progression } => {
            let g = progression_points(progression)?;
            log::info!("progression: {} points, {} collisions", g.points.len(), g.collisions);
            set(g.points)
        }
        GeneratorKind::ArcDrawing { n } => {
            let d = construct_kn_arc_drawing(*n)?;
            let b = verify_drawing_blocking(&d);
            let s = verify_simplicity(&d);
            if !b.passed || !s.certified {
                return Err(Error::Invalid(format!("arc drawing for n={n} failed its own verification")));
            }
            Ok(Generated::Arc { drawing: d })
        }
        GeneratorKind::Explicit { set: p } => set(p.clone()),
        GeneratorKind::File { path } => {
            let text = std::fs::read_to_string(path)?;
            set(PointSet::from_json(&text)?)
        }
    }
}

fn bipartite(d: BipartiteDrawing) -> Result<Generated> {
    if !d.verify().blocks || !d.designated_ok() {
        return Err(Error::Invalid(format!("K_{{{0},{0}}} drawing failed its own verification", d.n)));
    }
    Ok(Generated::Bipartite { drawing: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{is_convex_position, RationalPoint};
    use proptest::prelude::*;

    #[test]
    fn named_generators() {
        let g = generate(&GeneratorKind::Grid { w: 3, h: 3 }.into()).unwrap();
        assert_eq!(g.point_set().unwrap().len(), 9);
        let p = convex_parabola(4).unwrap();
        assert_eq!(p.points()[0], RationalPoint::from_ints(2, 4));
        assert_eq!(p.points()[3], RationalPoint::from_ints(16, 256));
        assert!(p.is_general_position() && is_convex_position(&p));
        match generate(&GeneratorKind::KnnGrid { n: 2 }.into()).unwrap() {
            Generated::Bipartite { drawing } => {
                assert_eq!(drawing.blockers.len(), 3);
                assert_eq!(drawing.edges.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(generate(&GeneratorKind::Grid { w: 0, h: 3 }.into()).is_err());
    }

    #[test]
    fn ngon_proxy() {
        for n in [3, 7, 12, 30] {
            let g = regular_ngon(n).unwrap();
            assert!(g.proxy.is_general_position());
            assert!(is_convex_position(&g.proxy));
        }
    }

    #[test]
    fn filters() {
        let mut spec = GeneratorSpec::new(GeneratorKind::Grid { w: 3, h: 3 });
        spec.filters.max_collinear = Some(2);
        assert!(generate(&spec).is_err());
        let mut spec = GeneratorSpec::new(GeneratorKind::GridSubsets { w: 3, h: 3, n: 4 });
        spec.filters.max_collinear = Some(2);
        let all = generate(&spec).unwrap().point_sets().unwrap();
        spec.filters.dedupe_symmetry = true;
        let reduced = generate(&spec).unwrap().point_sets().unwrap();
        assert!(reduced.len() < all.len());
        assert!(all.iter().all(|p| p.is_general_position()));
    }

    #[test]
    fn random_is_deterministic_and_infeasible_is_reported() {
        let a = random_no_l_collinear(12, 0, 9, 3).unwrap();
        let b = random_no_l_collinear(12, 0, 9, 3).unwrap();
        assert_eq!(a, b);
        assert!(matches!(random_no_l_collinear(5, 2, 1, 3), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn spec_json_shape() {
        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"kind":"random_general_position","n":6,"seed":3}"#).unwrap();
        assert_eq!(
            spec.kind,
            GeneratorKind::RandomGeneralPosition {
                n: 6,
                bound: 0,
                seed: 3
            }
        );
        let back = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&back).unwrap(), spec);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn random_sets_are_in_general_position(n in 3usize..15, seed in any::<u64>()) {
            let spec = GeneratorSpec::new(GeneratorKind::RandomGeneralPosition { n, bound: 0, seed });
            let p = generate(&spec).unwrap().point_set().unwrap();
            prop_assert_eq!(p.len(), n);
            prop_assert_eq!(max_collinear(&p).unwrap(), 2);
        }
    }
}

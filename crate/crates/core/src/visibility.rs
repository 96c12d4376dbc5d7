//! Visibility graphs and the Ramsey-type checks run on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{max_collinear, parameter_on, strictly_between, LineRecord, PointSet};
use crate::graph::{self, Budget, CliqueResult, Graph};

/// Graph on point indices; `i ~ j` iff no point of the source set lies strictly between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisibilityGraph {
    pub graph: Graph,
    pub source: String,
}

impl VisibilityGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }

    pub fn is_visible(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }
}

/// Two points are visible iff they are consecutive along the line they determine.
pub fn visibility_graph(p: &PointSet) -> Result<VisibilityGraph> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: p.len(),
        });
    }
    let pts = p.points();
    let mut g = Graph::new(p.len());
    for line in p.lines() {
        let a = &pts[line.members[0]];
        let b = &pts[line.members[1]];
        let mut along: Vec<_> = line
            .members
            .iter()
            .map(|&m| (parameter_on(&pts[m], a, b), m))
            .collect();
        along.sort();
        for w in along.windows(2) {
            g.add_edge(w[0].1, w[1].1);
        }
    }
    Ok(VisibilityGraph {
        graph: g,
        source: p.name().to_string(),
    })
}

/// Diameter of the visibility graph. A disconnected graph is impossible for two or more
/// points, so it is reported as an error and logged.
pub fn diameter(g: &VisibilityGraph) -> Result<usize> {
    g.graph.diameter().ok_or_else(|| {
        let components = g.graph.component_count();
        log::error!(
            "visibility graph of {:?} is disconnected ({components} components)",
            g.source
        );
        Error::Disconnected { components }
    })
}

pub fn clique_number(g: &VisibilityGraph, budget: Budget) -> CliqueResult {
    graph::max_clique(&g.graph, budget)
}

/// Colour assignment; colour ids are in `[1, k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub k: usize,
    pub colours: Vec<usize>,
}

impl Colouring {
    pub fn new(k: usize, colours: Vec<usize>) -> Result<Self> {
        for (index, &colour) in colours.iter().enumerate() {
            if colour == 0 || colour > k {
                return Err(Error::ColourOutOfRange { index, colour, k });
            }
        }
        Ok(Colouring { k, colours })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Colouring = serde_json::from_str(s)?;
        Colouring::new(raw.k, raw.colours)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.colours.len() != n {
            return Err(Error::ColouringLength {
                expected: n,
                got: self.colours.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChromaticResult {
    /// Best colour count found; the chromatic number when `exact`.
    pub chi: usize,
    pub lower_bound: usize,
    pub colouring: Colouring,
    pub exact: bool,
}

pub fn chromatic_number(g: &VisibilityGraph, budget: Budget) -> ChromaticResult {
    let r = graph::min_colouring(&g.graph, budget);
    ChromaticResult {
        chi: r.colours_used,
        lower_bound: r.lower_bound,
        colouring: Colouring {
            k: r.colours_used,
            colours: r.colours,
        },
        exact: r.exact,
    }
}

/// Edge count of the Turán graph `T(n, k)`.
pub fn turan_edges(n: u64, k: u64) -> u64 {
    assert!(n >= 1 && k >= 1, "turan_edges needs n >= 1 and k >= 1");
    let (q, r) = (n / k, n % k);
    let pairs = |m: u64| m * m.saturating_sub(1) / 2;
    // r parts of size q + 1, k - r parts of size q.
    pairs(n) - r * pairs(q + 1) - (k - r) * pairs(q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    LineFound { line: LineRecord },
    CliqueFound { clique: Vec<usize> },
    /// No line of `l` points and no `k`-clique.
    Neither { max_collinear: usize, clique_number: usize },
    /// Budget ran out before the clique search could rule out a `k`-clique.
    Inconclusive { max_collinear: usize, best_clique: usize },
}

/// Decide which disjunct of the big-line-big-clique dichotomy holds for `p`, preferring a
/// line witness.
pub fn big_line_big_clique_check(
    p: &PointSet,
    k: usize,
    l: usize,
    budget: Budget,
) -> Result<Verdict> {
    if k < 2 || l < 3 {
        return Err(Error::Invalid(format!(
            "big-line-big-clique check needs k >= 2 and l >= 3, got k={k}, l={l}"
        )));
    }
    let mc = max_collinear(p)?;
    if let Some(line) = p.lines().iter().find(|line| line.len() >= l) {
        return Ok(Verdict::LineFound { line: line.clone() });
    }
    let vg = visibility_graph(p)?;
    let cl = clique_number(&vg, budget);
    if cl.size >= k {
        return Ok(Verdict::CliqueFound {
            clique: cl.witness[..k].to_vec(),
        });
    }
    if !cl.exact {
        return Ok(Verdict::Inconclusive {
            max_collinear: mc,
            best_clique: cl.size,
        });
    }
    log::info!(
        "{:?}: no {l} collinear points and no {k}-clique (omega = {})",
        p.name(),
        cl.size
    );
    Ok(Verdict::Neither {
        max_collinear: mc,
        clique_number: cl.size,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposition1Report {
    pub n: usize,
    pub k: usize,
    pub proper: bool,
    /// Visible pairs that share a colour.
    pub violations: Vec<(usize, usize)>,
    pub max_collinear: usize,
    pub no_l_collinear: bool,
    pub largest_class_colour: usize,
    pub largest_class: Vec<usize>,
    pub largest_class_size: usize,
    /// `ceil(n / k)`.
    pub s_lower: usize,
    pub meets_lower: bool,
    /// Every pair of the largest class has a point of the rest of the set strictly between.
    pub is_blocked: bool,
    pub unblocked_pairs: Vec<(usize, usize)>,
}

impl Proposition1Report {
    /// Properness, pigeonhole size and blocking all hold.
    pub fn certified(&self) -> bool {
        self.proper && self.meets_lower && self.is_blocked
    }
}

/// Executable form of the colouring-to-blocking reduction: take the largest colour class
/// `S` of a colouring of the visibility graph and check that `P \ S` blocks `S`.
pub fn proposition1_check(p: &PointSet, c: &Colouring, l: usize) -> Result<Proposition1Report> {
    let n = p.len();
    c.check_len(n)?;
    let vg = visibility_graph(p)?;
    let violations: Vec<_> = vg
        .edges()
        .into_iter()
        .filter(|&(a, b)| c.colours[a] == c.colours[b])
        .collect();

    let mut sizes = vec![0usize; c.k + 1];
    for &col in &c.colours {
        sizes[col] += 1;
    }
    // Largest class, lowest colour id on ties.
    let colour = (1..=c.k).max_by_key(|&col| (sizes[col], std::cmp::Reverse(col))).unwrap_or(1);
    let class: Vec<usize> = (0..n).filter(|&i| c.colours[i] == colour).collect();
    let pts = p.points();
    let others: Vec<usize> = (0..n).filter(|&i| c.colours[i] != colour).collect();
    let mut unblocked = Vec::new();
    for (ai, &a) in class.iter().enumerate() {
        for &b in &class[ai + 1..] {
            if !others.iter().any(|&o| strictly_between(&pts[o], &pts[a], &pts[b])) {
                unblocked.push((a, b));
            }
        }
    }
    let mc = max_collinear(p)?;
    let s_lower = n.div_ceil(c.k.max(1));
    Ok(Proposition1Report {
        n,
        k: c.k,
        proper: violations.is_empty(),
        violations,
        max_collinear: mc,
        no_l_collinear: mc < l,
        largest_class_colour: colour,
        largest_class_size: class.len(),
        largest_class: class.clone(),
        s_lower,
        meets_lower: class.len() >= s_lower,
        is_blocked: unblocked.is_empty(),
        unblocked_pairs: unblocked,
    })
}

/// A line determined by `p` whose members all share one colour.
pub fn monochromatic_line_check(p: &PointSet, c: &Colouring) -> Result<Option<LineRecord>> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: p.len(),
        });
    }
    c.check_len(p.len())?;
    Ok(p
        .lines()
        .iter()
        .find(|line| {
            let first = c.colours[line.members[0]];
            line.members.iter().all(|&m| c.colours[m] == first)
        })
        .cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::RationalPoint;
    use crate::graph::oracle;
    use proptest::prelude::*;

    fn grid3() -> PointSet {
        let coords: Vec<(i64, i64)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).collect();
        PointSet::from_ints("grid3", &coords).unwrap()
    }

    fn collinear3() -> PointSet {
        PointSet::from_ints("col", &[(0, 0), (1, 0), (2, 0)]).unwrap()
    }

    fn triangle() -> PointSet {
        PointSet::from_ints("tri", &[(0, 0), (1, 0), (0, 1)]).unwrap()
    }

    /// Pairwise definition: visible iff nothing on the open segment.
    fn brute_visibility(p: &PointSet) -> Vec<(usize, usize)> {
        let pts = p.points();
        let n = pts.len();
        let mut e = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if !(0..n).any(|k| strictly_between(&pts[k], &pts[a], &pts[b])) {
                    e.push((a, b));
                }
            }
        }
        e
    }

    #[test]
    fn visibility_examples() {
        let g = visibility_graph(&collinear3()).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(diameter(&g).unwrap(), 2);
        assert_eq!(clique_number(&g, Budget::unlimited()).size, 2);
        assert_eq!(chromatic_number(&g, Budget::unlimited()).chi, 2);

        let g = visibility_graph(&triangle()).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(diameter(&g).unwrap(), 1);
        assert_eq!(clique_number(&g, Budget::unlimited()).size, 3);
        assert_eq!(chromatic_number(&g, Budget::unlimited()).chi, 3);
    }

    #[test]
    fn grid_visibility_matches_oracles() {
        let p = grid3();
        let g = visibility_graph(&p).unwrap();
        assert_eq!(g.edges(), brute_visibility(&p));
        assert_eq!(g.edge_count(), 28);
        assert_eq!(diameter(&g).unwrap(), 2);
        let omega = clique_number(&g, Budget::unlimited());
        let chi = chromatic_number(&g, Budget::unlimited());
        assert_eq!(omega.size, oracle::brute_clique_number(&g.graph));
        assert_eq!(chi.chi, oracle::brute_chromatic_number(&g.graph));
        assert!(omega.size <= chi.chi);
    }

    #[test]
    fn too_few_points() {
        let single = PointSet::from_ints("s", &[(0, 0)]).unwrap();
        assert!(matches!(visibility_graph(&single), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn turan_examples() {
        assert_eq!(turan_edges(4, 2), 4);
        assert_eq!(turan_edges(5, 2), 6);
        assert_eq!(turan_edges(9, 4), 30);
        assert_eq!(turan_edges(3, 5), 3);
    }

    #[test]
    fn turan_matches_direct_construction() {
        for n in 1..15u64 {
            for k in 1..8u64 {
                // Assign vertex v to part v mod k and count cross-part pairs.
                let direct = (0..n)
                    .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
                    .filter(|&(a, b)| a % k != b % k)
                    .count() as u64;
                assert_eq!(turan_edges(n, k), direct, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn big_line_big_clique_examples() {
        let b = Budget::unlimited();
        assert!(matches!(
            big_line_big_clique_check(&grid3(), 3, 3, b).unwrap(),
            Verdict::LineFound { .. }
        ));
        assert_eq!(
            big_line_big_clique_check(&triangle(), 3, 3, b).unwrap(),
            Verdict::CliqueFound {
                clique: vec![0, 1, 2]
            }
        );
        let parabola =
            PointSet::from_ints("par", &[(-2, 4), (-1, 1), (0, 0), (1, 1), (2, 4)]).unwrap();
        assert_eq!(
            big_line_big_clique_check(&parabola, 6, 3, b).unwrap(),
            Verdict::Neither {
                max_collinear: 2,
                clique_number: 5
            }
        );
        assert!(big_line_big_clique_check(&parabola, 1, 3, b).is_err());
    }

    #[test]
    fn proposition1_examples() {
        let c = Colouring::new(2, vec![1, 2, 1]).unwrap();
        let r = proposition1_check(&collinear3(), &c, 4).unwrap();
        assert!(r.proper);
        assert_eq!(r.largest_class, vec![0, 2]);
        assert!(r.is_blocked);
        assert!(r.certified());

        let c = Colouring::new(2, vec![1, 1, 2]).unwrap();
        let r = proposition1_check(&triangle(), &c, 3).unwrap();
        assert!(!r.proper);
        assert_eq!(r.violations, vec![(0, 1)]);

        let p = grid3();
        let chi = chromatic_number(&visibility_graph(&p).unwrap(), Budget::unlimited());
        let r = proposition1_check(&p, &chi.colouring, 4).unwrap();
        assert!(r.certified());
        assert!(r.no_l_collinear);
    }

    #[test]
    fn colouring_validation() {
        assert!(Colouring::new(2, vec![1, 3]).is_err());
        assert!(Colouring::new(2, vec![0]).is_err());
        let c = Colouring::from_json(r#"{"k": 2, "colours": [1, 2, 1]}"#).unwrap();
        assert_eq!(c.colours, vec![1, 2, 1]);
        assert!(monochromatic_line_check(&triangle(), &c).is_ok());
        assert!(matches!(
            monochromatic_line_check(&grid3(), &c),
            Err(Error::ColouringLength { .. })
        ));
    }

    #[test]
    fn monochromatic_examples() {
        let tri = triangle();
        for mask in 0..8u32 {
            let colours = (0..3).map(|i| 1 + ((mask >> i) & 1) as usize).collect();
            let c = Colouring::new(2, colours).unwrap();
            assert!(monochromatic_line_check(&tri, &c).unwrap().is_some());
        }
        let c = Colouring::new(2, vec![1, 2, 1]).unwrap();
        assert!(monochromatic_line_check(&collinear3(), &c).unwrap().is_none());
    }

    fn arb_points() -> impl Strategy<Value = PointSet> {
        proptest::collection::btree_set((0i64..5, 0i64..5), 3..9).prop_map(|s| {
            let v: Vec<_> = s.into_iter().collect();
            PointSet::from_ints("arb", &v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn visibility_matches_definition(p in arb_points()) {
            let g = visibility_graph(&p).unwrap();
            prop_assert_eq!(g.edges(), brute_visibility(&p));
            if !p.is_collinear() {
                prop_assert!(diameter(&g).unwrap() <= 2);
            }
        }

        /// Deleting a point only removes blockers, so visibility among survivors grows.
        #[test]
        fn removal_is_monotone(p in arb_points(), drop in 0usize..9) {
            let drop = drop % p.len();
            let g = visibility_graph(&p).unwrap();
            let keep: Vec<usize> = (0..p.len()).filter(|&i| i != drop).collect();
            let sub = p.subset("sub", &keep);
            let h = visibility_graph(&sub).unwrap();
            for (a, b) in g.edges() {
                if a == drop || b == drop { continue; }
                let ia = keep.iter().position(|&x| x == a).unwrap();
                let ib = keep.iter().position(|&x| x == b).unwrap();
                prop_assert!(h.is_visible(ia, ib));
            }
        }
    }

    #[test]
    fn lone_pair_is_visible() {
        let p = PointSet::new(
            "pair",
            vec![RationalPoint::from_ints(0, 0), RationalPoint::from_ints(5, 7)],
        )
        .unwrap();
        assert_eq!(visibility_graph(&p).unwrap().edges(), vec![(0, 1)]);
    }
}

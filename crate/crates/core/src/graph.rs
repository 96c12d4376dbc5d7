//! Simple undirected graphs plus the exact solvers shared by the visibility and crossing
//! modules: maximum clique and minimum colouring by branch-and-bound.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;

/// Wall-clock limit for a search. Exhaustion degrades results to labelled bounds.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    pub fn millis(ms: u64) -> Self {
        Budget {
            deadline: Some(Instant::now() + Duration::from_millis(ms)),
        }
    }

    pub fn from_option(ms: Option<u64>) -> Self {
        ms.map_or_else(Budget::unlimited, Budget::millis)
    }

    pub fn exhausted(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Polls the budget every few thousand search nodes.
pub(crate) struct Ticker {
    budget: Budget,
    nodes: u64,
    pub(crate) out_of_time: bool,
}

impl Ticker {
    pub(crate) fn new(budget: Budget) -> Self {
        Ticker {
            budget,
            nodes: 0,
            out_of_time: false,
        }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % 4096 == 0 && self.budget.exhausted() {
            self.out_of_time = true;
        }
        self.out_of_time
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BitSet::new(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbours(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|a| self.adj[a].iter().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in (a + 1)..n {
                if !self.has_edge(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for w in self.adj[v].iter() {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n()];
        let mut count = 0;
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            count += 1;
            for (v, d) in self.bfs(s).into_iter().enumerate() {
                if d.is_some() {
                    seen[v] = true;
                }
            }
        }
        count
    }

    /// `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n() {
            for d in self.bfs(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    pub fn is_proper_colouring(&self, colours: &[usize]) -> bool {
        self.edges().iter().all(|&(a, b)| colours[a] != colours[b])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueResult {
    pub size: usize,
    pub witness: Vec<usize>,
    pub exact: bool,
}

/// Maximum clique by branch-and-bound with a greedy-colouring bound. Candidates are
/// expanded lowest index first, so the witness is deterministic.
pub fn max_clique(g: &Graph, budget: Budget) -> CliqueResult {
    let n = g.n();
    let mut best = Vec::new();
    let mut ticker = Ticker::new(budget);
    let mut clique = Vec::new();
    clique_expand(g, &mut clique, BitSet::full(n), &mut best, &mut ticker);
    best.sort_unstable();
    CliqueResult {
        size: best.len(),
        witness: best,
        exact: !ticker.out_of_time,
    }
}

fn colour_bound(g: &Graph, cands: &BitSet) -> Vec<(usize, usize)> {
    // Greedy colour classes over candidates in index order; returns (vertex, colour) sorted
    // by ascending colour.
    let mut remaining = cands.clone();
    let mut order = Vec::with_capacity(cands.count());
    let mut colour = 0;
    while !remaining.is_empty() {
        colour += 1;
        let mut avail = remaining.clone();
        while let Some(v) = avail.first() {
            avail.remove(v);
            avail.difference_with(g.neighbours(v));
            remaining.remove(v);
            order.push((v, colour));
        }
    }
    order
}

fn clique_expand(
    g: &Graph,
    clique: &mut Vec<usize>,
    mut cands: BitSet,
    best: &mut Vec<usize>,
    ticker: &mut Ticker,
) {
    if ticker.tick() {
        return;
    }
    if cands.is_empty() {
        if clique.len() > best.len() {
            *best = clique.clone();
        }
        return;
    }
    let order = colour_bound(g, &cands);
    for &(v, c) in order.iter().rev() {
        if clique.len() + c <= best.len() {
            return;
        }
        clique.push(v);
        let mut next = cands.clone();
        next.intersect_with(g.neighbours(v));
        clique_expand(g, clique, next, best, ticker);
        clique.pop();
        cands.remove(v);
        if ticker.out_of_time {
            return;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringResult {
    /// Number of colours used by `colours`.
    pub colours_used: usize,
    /// Colour ids in `[1, colours_used]`, one per vertex.
    pub colours: Vec<usize>,
    /// Proven lower bound on the chromatic number.
    pub lower_bound: usize,
    pub exact: bool,
}

struct DsaturState<'a> {
    g: &'a Graph,
    colour: Vec<usize>,
    // nbr[v][c] = number of coloured neighbours of v with colour c.
    nbr: Vec<Vec<u32>>,
    sat: Vec<usize>,
    uncoloured_deg: Vec<usize>,
}

impl<'a> DsaturState<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.n();
        DsaturState {
            g,
            colour: vec![0; n],
            nbr: vec![vec![0; n + 2]; n],
            sat: vec![0; n],
            uncoloured_deg: (0..n).map(|v| g.degree(v)).collect(),
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&v| self.colour[v] == 0)
            .min_by_key(|&v| (std::cmp::Reverse(self.sat[v]), std::cmp::Reverse(self.uncoloured_deg[v]), v))
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.colour[v] = c;
        for w in self.g.neighbours(v).iter() {
            if self.nbr[w][c] == 0 {
                self.sat[w] += 1;
            }
            self.nbr[w][c] += 1;
            self.uncoloured_deg[w] -= 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colour[v];
        self.colour[v] = 0;
        for w in self.g.neighbours(v).iter() {
            self.nbr[w][c] -= 1;
            if self.nbr[w][c] == 0 {
                self.sat[w] -= 1;
            }
            self.uncoloured_deg[w] += 1;
        }
    }
}

fn dsatur_greedy(g: &Graph) -> Vec<usize> {
    let mut st = DsaturState::new(g);
    while let Some(v) = st.pick() {
        let c = (1..).find(|&c| st.nbr[v][c] == 0).unwrap();
        st.assign(v, c);
    }
    st.colour
}

/// Minimum colouring by DSATUR branch-and-bound, seeded with the DSATUR greedy upper bound
/// and a maximum-clique lower bound.
pub fn min_colouring(g: &Graph, budget: Budget) -> ColouringResult {
    let n = g.n();
    if n == 0 {
        return ColouringResult {
            colours_used: 0,
            colours: Vec::new(),
            lower_bound: 0,
            exact: true,
        };
    }
    let clique = max_clique(g, budget);
    let lower = clique.size;
    let mut best = dsatur_greedy(g);
    let mut best_k = *best.iter().max().unwrap();
    let mut ticker = Ticker::new(budget);
    if best_k > lower {
        let mut st = DsaturState::new(g);
        // Pre-colour the clique: any optimal colouring can be renamed to agree on it.
        for (i, &v) in clique.witness.iter().enumerate() {
            st.assign(v, i + 1);
        }
        colour_search(&mut st, lower, lower, &mut best, &mut best_k, &mut ticker);
    }
    let exact = clique.exact && !ticker.out_of_time;
    ColouringResult {
        colours_used: best_k,
        colours: best,
        lower_bound: if exact { best_k } else { lower },
        exact,
    }
}

fn colour_search(
    st: &mut DsaturState,
    used: usize,
    lower: usize,
    best: &mut Vec<usize>,
    best_k: &mut usize,
    ticker: &mut Ticker,
) {
    if ticker.tick() || used >= *best_k {
        return;
    }
    let Some(v) = st.pick() else {
        *best_k = used;
        *best = st.colour.clone();
        return;
    };
    let limit = (used + 1).min(*best_k - 1);
    for c in 1..=limit {
        if st.nbr[v][c] != 0 {
            continue;
        }
        st.assign(v, c);
        colour_search(st, used.max(c), lower, best, best_k, ticker);
        st.unassign(v);
        if *best_k <= lower || ticker.out_of_time || *best_k <= used {
            return;
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    #[test]
    fn small_graphs() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(max_clique(&k3, Budget::unlimited()).size, 3);
        assert_eq!(min_colouring(&k3, Budget::unlimited()).colours_used, 3);
        assert_eq!(k3.diameter(), Some(1));

        let c5 = cycle(5);
        let col = min_colouring(&c5, Budget::unlimited());
        assert_eq!(col.colours_used, 3);
        assert!(col.exact);
        assert!(c5.is_proper_colouring(&col.colours));
        assert_eq!(max_clique(&c5, Budget::unlimited()).size, 2);
        assert_eq!(c5.diameter(), Some(2));

        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(split.diameter(), None);
        assert_eq!(split.component_count(), 2);
        assert_eq!(Graph::new(0).edge_count(), 0);
    }

    #[test]
    fn complement_of_cycle() {
        let c = cycle(6).complement();
        assert_eq!(c.edge_count(), 15 - 6);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..11).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut g = Graph::new(n);
                let mut it = bits.into_iter();
                for a in 0..n {
                    for b in (a + 1)..n {
                        if it.next().unwrap() {
                            g.add_edge(a, b);
                        }
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn solvers_match_brute_force(g in arb_graph()) {
            let cl = max_clique(&g, Budget::unlimited());
            prop_assert!(cl.exact);
            prop_assert!(g.is_clique(&cl.witness));
            prop_assert_eq!(cl.size, oracle::brute_clique_number(&g));
            let col = min_colouring(&g, Budget::unlimited());
            prop_assert!(col.exact);
            prop_assert!(g.is_proper_colouring(&col.colours));
            prop_assert_eq!(col.colours.iter().copied().max().unwrap_or(0), col.colours_used);
            prop_assert_eq!(col.colours_used, oracle::brute_chromatic_number(&g));
            prop_assert!(cl.size <= col.colours_used);
        }
    }
}

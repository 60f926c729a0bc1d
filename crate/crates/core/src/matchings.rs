//! Perfect matchings of [pk] relative to the size-p block partition, the
//! multigraphs obtained by gluing each block to a vertex, connectivity, and
//! isomorphism classes with multiplicities.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::next_permutation;

/// A perfect matching of `[pk]` with block structure `(p, k)`: block `v`
/// holds positions `{(v-1)p + 1, ..., vp}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    p: usize,
    k: usize,
    pairs: Vec<(u32, u32)>,
}

impl Matching {
    /// Validates that `pairs` is a perfect matching of `[pk]` (pairs written
    /// in any order).
    pub fn from_pairs(p: usize, k: usize, pairs: Vec<(u32, u32)>) -> Option<Self> {
        let n = p * k;
        if pairs.len() * 2 != n {
            return None;
        }
        let mut seen = vec![false; n + 1];
        let mut canonical: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo == 0 || hi as usize > n || lo == hi {
                return None;
            }
            if seen[lo as usize] || seen[hi as usize] {
                return None;
            }
            seen[lo as usize] = true;
            seen[hi as usize] = true;
            canonical.push((lo, hi));
        }
        canonical.sort_unstable();
        Some(Matching { p, k, pairs: canonical })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Pairs `(a, b)` with `a < b`, sorted by first element.
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }
}

/// One glued edge: the two vertices (blocks) it joins, plus the slot within
/// each block (1..=p) the original matched positions occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub endpoints: (u32, u32),
    pub slots: (u32, u32),
}

/// The p-regular multigraph `G(mu)` on `k` vertices (1-based); self-loops
/// count twice toward degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl ContractionGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Degree of each vertex (index 0 holds vertex 1).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertex_count];
        for e in &self.edges {
            deg[e.endpoints.0 as usize - 1] += 1;
            deg[e.endpoints.1 as usize - 1] += 1;
        }
        deg
    }

    /// Edge endpoints only, sorted — the labeled-graph key used for
    /// isomorphism bucketing.
    pub fn endpoint_multiset(&self) -> Vec<(u32, u32)> {
        let mut eps: Vec<_> = self.edges.iter().map(|e| e.endpoints).collect();
        eps.sort_unstable();
        eps
    }
}

/// Glues the blocks of a matching into its multigraph.
pub fn build_multigraph(mu: &Matching) -> ContractionGraph {
    let p = mu.p as u32;
    let mut edges: Vec<Edge> = mu
        .pairs
        .iter()
        .map(|&(a, b)| {
            let (va, sa) = ((a - 1) / p + 1, (a - 1) % p + 1);
            let (vb, sb) = ((b - 1) / p + 1, (b - 1) % p + 1);
            if va <= vb {
                Edge { endpoints: (va, vb), slots: (sa, sb) }
            } else {
                Edge { endpoints: (vb, va), slots: (sb, sa) }
            }
        })
        .collect();
    edges.sort_unstable_by_key(|e| (e.endpoints, e.slots));
    ContractionGraph { vertex_count: mu.k, edges }
}

/// True iff the multigraph is connected (the empty graph counts as
/// connected).
pub fn is_connected(g: &ContractionGraph) -> bool {
    let k = g.vertex_count;
    if k <= 1 {
        return true;
    }
    let mut adjacency = vec![Vec::new(); k];
    for e in &g.edges {
        let (v, w) = (e.endpoints.0 as usize - 1, e.endpoints.1 as usize - 1);
        if v != w {
            adjacency[v].push(w);
            adjacency[w].push(v);
        }
    }
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == k
}

/// Lazily enumerates every perfect matching of `[pk]` in canonical order:
/// the smallest unpaired position is paired with each larger unpaired
/// position in turn, recursively. Yields one empty matching for `k = 0` and
/// nothing when `pk` is odd.
pub fn enumerate_matchings(p: usize, k: usize) -> Matchings {
    let n = p * k;
    assert!(n <= 64, "matchings of [{n}] exceed the supported ground-set size");
    Matchings { p, k, n: n as u32, frames: Vec::new(), state: IterState::Fresh }
}

/// As [`enumerate_matchings`], restricted to matchings whose glued graph is
/// connected.
pub fn enumerate_connected(p: usize, k: usize) -> impl Iterator<Item = Matching> {
    enumerate_matchings(p, k).filter(|mu| is_connected(&build_multigraph(mu)))
}

#[derive(Debug)]
enum IterState {
    Fresh,
    Running,
    Done,
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    /// Availability mask on entry to this recursion level (bit i = position
    /// i + 1 unpaired).
    avail: u64,
    first: u32,
    second: u32,
}

/// Backtracking iterator over perfect matchings; see [`enumerate_matchings`].
#[derive(Debug)]
pub struct Matchings {
    p: usize,
    k: usize,
    n: u32,
    frames: Vec<Frame>,
    state: IterState,
}

impl Matchings {
    fn emit(&self) -> Matching {
        Matching {
            p: self.p,
            k: self.k,
            pairs: self.frames.iter().map(|f| (f.first + 1, f.second + 1)).collect(),
        }
    }

    /// Greedily completes the partial matching given the remaining
    /// availability mask, always pairing lowest-with-next-lowest.
    fn extend(&mut self, mut avail: u64) {
        while avail != 0 {
            let first = avail.trailing_zeros();
            let rest = avail & !(1u64 << first);
            debug_assert!(rest != 0, "odd number of unpaired positions");
            let second = rest.trailing_zeros();
            self.frames.push(Frame { avail, first, second });
            avail = rest & !(1u64 << second);
        }
    }
}

impl Iterator for Matchings {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        match self.state {
            IterState::Done => None,
            IterState::Fresh => {
                if self.n % 2 == 1 {
                    self.state = IterState::Done;
                    return None;
                }
                self.state = IterState::Running;
                if self.n == 0 {
                    self.state = IterState::Done;
                    return Some(self.emit());
                }
                let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
                self.extend(full);
                Some(self.emit())
            }
            IterState::Running => {
                while let Some(top) = self.frames.pop() {
                    let rest = top.avail & !(1u64 << top.first);
                    // Candidates strictly above the current second choice.
                    let higher = rest & (u64::MAX << top.second).wrapping_shl(1);
                    if higher != 0 {
                        let second = higher.trailing_zeros();
                        self.frames.push(Frame { second, ..top });
                        self.extend(rest & !(1u64 << second));
                        return Some(self.emit());
                    }
                }
                self.state = IterState::Done;
                None
            }
        }
    }
}

/// An isomorphism class of glued multigraphs: a concrete representative (the
/// first enumerated), the lexicographically minimal relabeled edge list
/// identifying the class, and how many matchings land in it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoClass {
    pub representative: ContractionGraph,
    pub canonical_edges: Vec<(u32, u32)>,
    pub multiplicity: u64,
}

/// Partitions the (optionally connectivity-filtered) matchings of `(p, k)`
/// into multigraph-isomorphism classes, ordered by canonical edge list.
/// Isomorphism is tested by brute force over all `k!` vertex relabelings,
/// after first bucketing matchings by their labeled edge multiset.
pub fn isomorphism_classes(p: usize, k: usize, connected_only: bool) -> Vec<IsoClass> {
    assert!(k >= 1, "isomorphism classes need at least one vertex");
    let mut labeled: HashMap<Vec<(u32, u32)>, (ContractionGraph, u64)> = HashMap::new();
    let mut labeled_order: Vec<Vec<(u32, u32)>> = Vec::new();
    for mu in enumerate_matchings(p, k) {
        let g = build_multigraph(&mu);
        if connected_only && !is_connected(&g) {
            continue;
        }
        let key = g.endpoint_multiset();
        match labeled.get_mut(&key) {
            Some((_, count)) => *count += 1,
            None => {
                labeled_order.push(key.clone());
                labeled.insert(key, (g, 1));
            }
        }
    }

    let mut classes: Vec<IsoClass> = Vec::new();
    let mut canonical_index: HashMap<Vec<(u32, u32)>, usize> = HashMap::new();
    for key in labeled_order {
        let (graph, count) = labeled.remove(&key).unwrap();
        let canon = canonical_edge_list(&key, k);
        match canonical_index.get(&canon) {
            Some(&i) => classes[i].multiplicity += count,
            None => {
                canonical_index.insert(canon.clone(), classes.len());
                classes.push(IsoClass {
                    representative: graph,
                    canonical_edges: canon,
                    multiplicity: count,
                });
            }
        }
    }
    classes.sort_by(|a, b| a.canonical_edges.cmp(&b.canonical_edges));
    classes
}

/// Lexicographically minimal endpoint multiset over all vertex relabelings.
fn canonical_edge_list(endpoints: &[(u32, u32)], k: usize) -> Vec<(u32, u32)> {
    let mut perm: Vec<u32> = (0..k as u32).collect();
    let mut best: Option<Vec<(u32, u32)>> = None;
    loop {
        let mut relabeled: Vec<(u32, u32)> = endpoints
            .iter()
            .map(|&(v, w)| {
                let (a, b) = (perm[v as usize - 1] + 1, perm[w as usize - 1] + 1);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        relabeled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabeled < *b) {
            best = Some(relabeled);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::double_factorial;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    #[test]
    fn smallest_cases() {
        let ms: Vec<_> = enumerate_matchings(2, 1).collect();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].pairs(), &[(1, 2)]);

        assert_eq!(enumerate_matchings(3, 2).count(), 15);
        assert_eq!(enumerate_matchings(3, 4).count(), 10395);
        assert_eq!(enumerate_matchings(3, 1).count(), 0);
        assert_eq!(enumerate_matchings(3, 0).count(), 1);
        assert_eq!(enumerate_matchings(3, 0).next().unwrap().pairs(), &[]);
    }

    #[test]
    fn enumeration_is_canonical_and_duplicate_free() {
        let ms: Vec<_> = enumerate_matchings(2, 3).collect();
        assert_eq!(ms.len(), 15);
        // First element of each pair is the smallest position not yet used.
        assert_eq!(ms[0].pairs(), &[(1, 2), (3, 4), (5, 6)]);
        assert_eq!(ms[14].pairs(), &[(1, 6), (2, 5), (3, 4)]);
        let mut sorted = ms.clone();
        sorted.sort_by(|a, b| a.pairs().cmp(b.pairs()));
        sorted.dedup();
        assert_eq!(sorted.len(), 15);
        // Canonical order is lexicographic on the pair list.
        for w in ms.windows(2) {
            assert!(w[0].pairs() < w[1].pairs());
        }
    }

    #[test]
    fn gluing_examples() {
        let cycle = Matching::from_pairs(2, 2, vec![(1, 3), (2, 4)]).unwrap();
        let g = build_multigraph(&cycle);
        assert_eq!(g.endpoint_multiset(), vec![(1, 2), (1, 2)]);
        assert!(is_connected(&g));

        let loops = Matching::from_pairs(2, 2, vec![(1, 2), (3, 4)]).unwrap();
        let g = build_multigraph(&loops);
        assert_eq!(g.endpoint_multiset(), vec![(1, 1), (2, 2)]);
        assert!(!is_connected(&g));

        let mixed = Matching::from_pairs(3, 2, vec![(1, 4), (2, 3), (5, 6)]).unwrap();
        let g = build_multigraph(&mixed);
        assert_eq!(g.endpoint_multiset(), vec![(1, 1), (1, 2), (2, 2)]);
        assert!(is_connected(&g));
        assert_eq!(g.degrees(), vec![3, 3]);
    }

    #[test]
    fn single_vertex_is_connected() {
        let mu = Matching::from_pairs(4, 1, vec![(1, 2), (3, 4)]).unwrap();
        let g = build_multigraph(&mu);
        assert_eq!(g.endpoint_multiset(), vec![(1, 1), (1, 1)]);
        assert!(is_connected(&g));
    }

    #[test]
    fn from_pairs_rejects_invalid() {
        assert!(Matching::from_pairs(2, 2, vec![(1, 2)]).is_none());
        assert!(Matching::from_pairs(2, 2, vec![(1, 2), (2, 3)]).is_none());
        assert!(Matching::from_pairs(2, 2, vec![(1, 1), (2, 3)]).is_none());
        assert!(Matching::from_pairs(2, 2, vec![(1, 2), (3, 5)]).is_none());
    }

    #[test]
    fn connected_filter_counts() {
        assert_eq!(enumerate_connected(3, 2).count(), 15);
        assert_eq!(enumerate_connected(2, 2).count(), 2);
        assert_eq!(enumerate_connected(2, 1).count(), 1);
        // p=1: every edge joins two distinct degree-1 vertices, so k >= 4 is
        // always disconnected.
        assert_eq!(enumerate_connected(1, 4).count(), 0);
    }

    #[test]
    fn class_examples() {
        let classes = isomorphism_classes(2, 4, true);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].multiplicity, 48);
        assert_eq!(classes[0].canonical_edges, vec![(1, 2), (1, 3), (2, 4), (3, 4)]);

        let classes = isomorphism_classes(2, 2, false);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].canonical_edges, vec![(1, 1), (2, 2)]);
        assert_eq!(classes[0].multiplicity, 1);
        assert_eq!(classes[1].canonical_edges, vec![(1, 2), (1, 2)]);
        assert_eq!(classes[1].multiplicity, 2);

        let classes = isomorphism_classes(3, 2, true);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].canonical_edges, vec![(1, 1), (1, 2), (2, 2)]);
        assert_eq!(classes[0].multiplicity, 9);
        assert_eq!(classes[1].canonical_edges, vec![(1, 2), (1, 2), (1, 2)]);
        assert_eq!(classes[1].multiplicity, 6);
    }

    #[test]
    fn count_law_small() {
        for p in 1..=5usize {
            for k in 0..=5usize {
                if p * k > 10 {
                    continue;
                }
                let got = enumerate_matchings(p, k).count();
                let expected = if k == 0 {
                    BigInt::from(1)
                } else if (p * k) % 2 == 1 {
                    BigInt::from(0)
                } else {
                    double_factorial((p * k) as i64 - 1)
                };
                assert_eq!(BigInt::from(got), expected, "count mismatch at p={p} k={k}");
            }
        }
    }

    #[test]
    fn cycle_law_p2() {
        for k in 2..=6usize {
            let classes = isomorphism_classes(2, k, true);
            assert_eq!(classes.len(), 1, "k={k}");
            let expected = (1u64 << (k - 1)) * (1..k as u64).product::<u64>();
            assert_eq!(classes[0].multiplicity, expected, "k={k}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_degree_and_slot_law(p in 1usize..=4, k in 1usize..=4) {
            prop_assume!((p * k) % 2 == 0);
            for mu in enumerate_matchings(p, k).take(200) {
                let g = build_multigraph(&mu);
                prop_assert!(g.degrees().iter().all(|&d| d == p));
                // Every (vertex, slot) cell is used exactly once.
                let mut cells = Vec::new();
                for e in g.edges() {
                    cells.push((e.endpoints.0, e.slots.0));
                    cells.push((e.endpoints.1, e.slots.1));
                }
                cells.sort_unstable();
                cells.dedup();
                prop_assert_eq!(cells.len(), p * k);
            }
        }

        #[test]
        fn prop_multiplicity_law(p in 1usize..=3, k in 1usize..=4) {
            prop_assume!((p * k) % 2 == 0);
            for connected_only in [false, true] {
                let classes = isomorphism_classes(p, k, connected_only);
                let total: u64 = classes.iter().map(|c| c.multiplicity).sum();
                let direct = if connected_only {
                    enumerate_connected(p, k).count() as u64
                } else {
                    enumerate_matchings(p, k).count() as u64
                };
                prop_assert_eq!(total, direct);
            }
        }
    }
}

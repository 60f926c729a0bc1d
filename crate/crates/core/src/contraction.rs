//! Tensor-network evaluation of the invariant polynomials: contract a glued
//! multigraph against a symmetric tensor, exactly or in floating point.
//!
//! Contraction works over sparse factors. Each vertex starts as a factor
//! over its non-loop incident edges (loops are traced immediately, which is
//! possible because every nonzero of the tensor is stored explicitly);
//! vertices are then merged pairwise following a greedy plan, summing over
//! the edges the merged pair shares.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::combinatorics::for_each_distinct_permutation;
use crate::error::{Error, Result};
use crate::matchings::{isomorphism_classes, ContractionGraph};
use crate::rational::{to_f64, Rational};
use crate::tensor::SymmetricTensor;

/// One pairwise merge: the two current group labels joined (each group is
/// labeled by its smallest original vertex) and the number of edges left
/// open between the merged group and the rest of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeStep {
    pub left: u32,
    pub right: u32,
    pub open_after: usize,
}

/// Vertex-merge schedule produced by [`plan_contraction`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionPlan {
    pub steps: Vec<MergeStep>,
}

/// Greedy schedule: repeatedly merge the pair of current groups sharing the
/// most edges, breaking ties toward the lexicographically smallest label
/// pair. Executing the plan reproduces brute-force edge-label summation.
pub fn plan_contraction(g: &ContractionGraph) -> ContractionPlan {
    let k = g.vertex_count();
    let mut group: Vec<u32> = (1..=k as u32).collect();
    let mut alive: BTreeSet<u32> = group.iter().copied().collect();
    let mut steps = Vec::new();

    let group_of = |group: &[u32], v: u32| group[v as usize - 1];
    while alive.len() > 1 {
        let labels: Vec<u32> = alive.iter().copied().collect();
        let mut best: Option<(usize, u32, u32)> = None;
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                let shared = g
                    .edges()
                    .iter()
                    .filter(|e| {
                        let (ga, gb) =
                            (group_of(&group, e.endpoints.0), group_of(&group, e.endpoints.1));
                        (ga, gb) == (a, b) || (ga, gb) == (b, a)
                    })
                    .count();
                if best.is_none_or(|(s, _, _)| shared > s) {
                    best = Some((shared, a, b));
                }
            }
        }
        let (_, left, right) = best.unwrap();
        for gl in group.iter_mut() {
            if *gl == right {
                *gl = left;
            }
        }
        alive.remove(&right);
        let open_after = g
            .edges()
            .iter()
            .filter(|e| {
                let (ga, gb) = (group_of(&group, e.endpoints.0), group_of(&group, e.endpoints.1));
                (ga == left) != (gb == left)
            })
            .count();
        steps.push(MergeStep { left, right, open_after });
    }
    ContractionPlan { steps }
}

/// Scalar domain a network can be contracted over.
trait ContractionValue: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
}

impl ContractionValue for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as num_traits::One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl ContractionValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Sparse factor over an ordered list of open edge ids: keys assign one
/// label in `1..=N` per open edge.
struct Factor<S> {
    open: Vec<usize>,
    terms: HashMap<Vec<u32>, S>,
}

fn vertex_factor<S: ContractionValue>(
    t: &SymmetricTensor,
    g: &ContractionGraph,
    v: u32,
    conv: &impl Fn(&Rational) -> S,
) -> Factor<S> {
    let mut loops = 0usize;
    let mut open = Vec::new();
    for (eid, e) in g.edges().iter().enumerate() {
        let (a, b) = e.endpoints;
        if a == v && b == v {
            loops += 1;
        } else if a == v || b == v {
            open.push(eid);
        }
    }
    let d = open.len();
    let mut terms: HashMap<Vec<u32>, S> = HashMap::new();
    for (index, value) in t.entries() {
        let s = conv(value);
        for_each_distinct_permutation(index, |perm| {
            // Slots d.., taken in adjacent pairs, carry the loop labels.
            for i in 0..loops {
                if perm[d + 2 * i] != perm[d + 2 * i + 1] {
                    return;
                }
            }
            terms
                .entry(perm[..d].to_vec())
                .and_modify(|acc| acc.add_assign_ref(&s))
                .or_insert_with(|| s.clone());
        });
    }
    terms.retain(|_, v| !v.is_zero());
    Factor { open, terms }
}

fn merge_factors<S: ContractionValue>(a: Factor<S>, b: Factor<S>) -> Factor<S> {
    let shared: Vec<usize> = a.open.iter().copied().filter(|e| b.open.contains(e)).collect();
    let positions =
        |open: &[usize], of: &[usize]| -> Vec<usize> {
            of.iter().map(|e| open.iter().position(|x| x == e).unwrap()).collect()
        };
    let a_shared = positions(&a.open, &shared);
    let b_shared = positions(&b.open, &shared);
    let a_keep: Vec<usize> = (0..a.open.len()).filter(|i| !a_shared.contains(i)).collect();
    let b_keep: Vec<usize> = (0..b.open.len()).filter(|i| !b_shared.contains(i)).collect();

    let mut buckets: HashMap<Vec<u32>, Vec<(Vec<u32>, S)>> = HashMap::new();
    for (key, val) in b.terms {
        let proj: Vec<u32> = b_shared.iter().map(|&i| key[i]).collect();
        let rest: Vec<u32> = b_keep.iter().map(|&i| key[i]).collect();
        buckets.entry(proj).or_default().push((rest, val));
    }

    let mut terms: HashMap<Vec<u32>, S> = HashMap::new();
    for (key, val) in a.terms {
        let proj: Vec<u32> = a_shared.iter().map(|&i| key[i]).collect();
        let Some(bucket) = buckets.get(&proj) else { continue };
        let rest_a: Vec<u32> = a_keep.iter().map(|&i| key[i]).collect();
        for (rest_b, val_b) in bucket {
            let mut merged = rest_a.clone();
            merged.extend_from_slice(rest_b);
            let prod = val.mul_ref(val_b);
            terms
                .entry(merged)
                .and_modify(|acc| acc.add_assign_ref(&prod))
                .or_insert(prod);
        }
    }
    terms.retain(|_, v| !v.is_zero());

    let mut open: Vec<usize> = a_keep.iter().map(|&i| a.open[i]).collect();
    open.extend(b_keep.iter().map(|&i| b.open[i]));
    Factor { open, terms }
}

fn contract_generic<S: ContractionValue>(
    t: &SymmetricTensor,
    g: &ContractionGraph,
    conv: &impl Fn(&Rational) -> S,
) -> Result<S> {
    for degree in g.degrees() {
        if degree != t.order() {
            return Err(Error::DegreeMismatch { degree, order: t.order() });
        }
    }
    if g.vertex_count() == 0 {
        return Ok(S::one());
    }
    let plan = plan_contraction(g);
    let mut factors: HashMap<u32, Factor<S>> = (1..=g.vertex_count() as u32)
        .map(|v| (v, vertex_factor(t, g, v, conv)))
        .collect();
    for step in &plan.steps {
        let a = factors.remove(&step.left).unwrap();
        let b = factors.remove(&step.right).unwrap();
        factors.insert(step.left, merge_factors(a, b));
    }
    let last = factors.into_values().next().unwrap();
    debug_assert!(last.open.is_empty());
    Ok(last.terms.get(&Vec::new()).cloned().unwrap_or_else(S::zero))
}

/// Exact value of the invariant `M_mu(T)` attached to the glued graph:
/// the sum over all edge labelings of the product of tensor entries read at
/// each vertex.
pub fn contract_network(t: &SymmetricTensor, g: &ContractionGraph) -> Result<Rational> {
    contract_generic(t, g, &Rational::clone)
}

/// Floating-point contraction (same algorithm over `f64`).
pub fn contract_network_f64(t: &SymmetricTensor, g: &ContractionGraph) -> Result<f64> {
    contract_generic(t, g, &to_f64)
}

fn invariant_generic<S: ContractionValue>(
    t: &SymmetricTensor,
    k: usize,
    connected_only: bool,
    conv: &(impl Fn(&Rational) -> S + Sync),
    mult: &(impl Fn(u64) -> S + Sync),
) -> Result<S> {
    let p = t.order();
    if (p * k) % 2 == 1 {
        return Ok(S::zero());
    }
    let classes = isomorphism_classes(p, k, connected_only);
    let values: Vec<(u64, S)> = classes
        .par_iter()
        .map(|class| {
            contract_generic(t, &class.representative, conv).map(|v| (class.multiplicity, v))
        })
        .collect::<Result<_>>()?;
    // Deterministic reduction in canonical class order.
    let mut total = S::zero();
    for (multiplicity, value) in values {
        total.add_assign_ref(&mult(multiplicity).mul_ref(&value));
    }
    Ok(total)
}

fn rational_mult(m: u64) -> Rational {
    Rational::from_integer(m.into())
}

/// `M_k(T)`: the invariant summed over all matchings, evaluated per
/// isomorphism class. `M_0 = 1`; odd `p*k` gives zero.
pub fn invariant_m_k(t: &SymmetricTensor, k: usize) -> Result<Rational> {
    if k == 0 {
        return Ok(Rational::from_integer(1.into()));
    }
    invariant_generic(t, k, false, &Rational::clone, &rational_mult)
}

pub fn invariant_m_k_f64(t: &SymmetricTensor, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    invariant_generic(t, k, false, &to_f64, &(|m: u64| m as f64))
}

/// `M_k^conn(T)`: the sum restricted to matchings with connected glued
/// graph; equals the k-th cumulant of the Gaussian scalar `<T, g^(x)p>`.
pub fn invariant_m_k_conn(t: &SymmetricTensor, k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidInput("connected invariants are indexed from k = 1".into()));
    }
    invariant_generic(t, k, true, &Rational::clone, &rational_mult)
}

pub fn invariant_m_k_conn_f64(t: &SymmetricTensor, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("connected invariants are indexed from k = 1".into()));
    }
    invariant_generic(t, k, true, &to_f64, &(|m: u64| m as f64))
}

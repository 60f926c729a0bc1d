//! Shared helpers for the integration suites: seeded random inputs, an
//! independent brute-force invariant oracle, and a dense complex
//! matrix-resolvent oracle. Everything here is deliberately written from
//! first principles so it cannot share bugs with the library code it checks.
//!
//! Compiled once per test target, so not every helper is used everywhere.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resolvent_core::{int, rat, to_f64, Rational, SymmetricTensor};

/// A small random rational with numerator in `[-bound, bound]` and
/// denominator in `[1, bound]`.
pub fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    rat(rng.random_range(-bound..=bound), rng.random_range(1..=bound))
}

/// A random sparse symmetric tensor: `terms` random sorted multi-indices
/// (duplicates collapse) with small rational values.
pub fn random_tensor(rng: &mut ChaCha8Rng, p: usize, n: u32, terms: usize) -> SymmetricTensor {
    let mut entries = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut index: Vec<u32> = (0..p).map(|_| rng.random_range(1..=n)).collect();
        index.sort_unstable();
        entries.push((index, random_rational(rng, 6)));
    }
    entries.sort();
    entries.dedup_by(|a, b| a.0 == b.0);
    SymmetricTensor::from_entries(p, n, entries).expect("indices are in range by construction")
}

/// A random symmetric matrix as an order-2 `SymmetricTensor`, with every
/// upper-triangle entry filled (dense).
pub fn random_matrix(rng: &mut ChaCha8Rng, n: u32) -> SymmetricTensor {
    let mut entries = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            entries.push((vec![i, j], random_rational(rng, 6)));
        }
    }
    SymmetricTensor::from_entries(2, n, entries).expect("upper triangle is duplicate-free")
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Brute-force invariants: enumerate matchings by plain recursion, evaluate
// each matching tensor by an odometer over all index assignments, and test
// connectivity with union-find. No bitmasks, no iso classes, no factor
// merging — an independent third route beside the contraction and Wick
// backends.
// ---------------------------------------------------------------------------

fn all_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn recurse(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = free.remove(0);
        for pos in 0..free.len() {
            let b = free.remove(pos);
            acc.push((a, b));
            recurse(free, acc, out);
            acc.pop();
            free.insert(pos, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    if n % 2 == 1 {
        return out;
    }
    recurse(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

fn find(parent: &mut Vec<usize>, v: usize) -> usize {
    if parent[v] != v {
        let root = find(parent, parent[v]);
        parent[v] = root;
    }
    parent[v]
}

fn matching_is_connected(p: usize, k: usize, pairs: &[(usize, usize)]) -> bool {
    if k <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..k).collect();
    for &(a, b) in pairs {
        let (va, vb) = ((a - 1) / p, (b - 1) / p);
        let (ra, rb) = (find(&mut parent, va), find(&mut parent, vb));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (1..k).all(|v| find(&mut parent, v) == root)
}

/// `<T^(x)k, w(mu)>` by direct summation: assign every pair an index value
/// in `1..=N` (odometer), read off the k per-vertex entries, multiply.
fn matching_value(t: &SymmetricTensor, p: usize, k: usize, pairs: &[(usize, usize)]) -> Rational {
    let n = t.dimension() as usize;
    let mut pair_of_position = vec![0usize; p * k + 1];
    for (e, &(a, b)) in pairs.iter().enumerate() {
        pair_of_position[a] = e;
        pair_of_position[b] = e;
    }
    let mut assignment = vec![1u32; pairs.len()];
    let mut total = int(0);
    loop {
        let mut product = int(1);
        let mut zero = false;
        for v in 0..k {
            let index: Vec<u32> =
                (1..=p).map(|s| assignment[pair_of_position[v * p + s]]).collect();
            let entry = t.get(&index).expect("indices are in range");
            if entry == int(0) {
                zero = true;
                break;
            }
            product *= entry;
        }
        if !zero {
            total += product;
        }
        // Odometer step over the N^(pk/2) assignments.
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                return total;
            }
            if (assignment[pos] as usize) < n {
                assignment[pos] += 1;
                break;
            }
            assignment[pos] = 1;
            pos += 1;
        }
    }
}

/// Brute-force `M_k(T)` (all matchings) or `M_k^conn(T)` (connected only).
pub fn brute_force_invariant(t: &SymmetricTensor, k: usize, connected_only: bool) -> Rational {
    let p = t.order();
    let mut total = int(0);
    for pairs in all_matchings(p * k) {
        if connected_only && !matching_is_connected(p, k, &pairs) {
            continue;
        }
        total += matching_value(t, p, k, &pairs);
    }
    total
}

// ---------------------------------------------------------------------------
// Dense complex matrix-resolvent oracle: (1/N) Tr((zI - X)^{-1}) by Gaussian
// elimination on the full inverse, in floating point.
// ---------------------------------------------------------------------------

/// `(1/N) Tr((zI - X)^{-1})` for an order-2 tensor `X`.
pub fn matrix_resolvent_trace(x: &SymmetricTensor, z: Complex64) -> Complex64 {
    assert_eq!(x.order(), 2, "the resolvent-trace oracle needs a matrix");
    let n = x.dimension() as usize;
    // Build A = zI - X and an identity block, then reduce [A | I] to [I | A^{-1}].
    let mut a = vec![vec![Complex64::new(0.0, 0.0); 2 * n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().take(n).enumerate() {
            let x_ij = to_f64(&x.get(&[(i + 1) as u32, (j + 1) as u32]).unwrap());
            *cell = if i == j { z - x_ij } else { -Complex64::new(x_ij, 0.0) };
        }
        row[n + i] = Complex64::new(1.0, 0.0);
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))
            .unwrap();
        a.swap(col, pivot_row);
        let pivot = a[col][col];
        for cell in a[col].iter_mut() {
            *cell /= pivot;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for j in 0..2 * n {
                let delta = factor * a[col][j];
                a[row][j] -= delta;
            }
        }
    }
    let trace: Complex64 = (0..n).map(|i| a[i][n + i]).sum();
    trace / n as f64
}

/// Frobenius norm of an order-2 tensor, in floating point.
pub fn frobenius_norm(x: &SymmetricTensor) -> f64 {
    let n = x.dimension();
    let mut sum = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            sum += to_f64(&x.get(&[i, j]).unwrap()).powi(2);
        }
    }
    sum.sqrt()
}

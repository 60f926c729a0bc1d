//! Small enumeration helpers shared by the tensor, contraction, and
//! Gaussian-moment modules.

use num_bigint::BigInt;

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n as u64).map(BigInt::from).product()
}

/// Number of distinct arrangements of a sorted multi-index:
/// `p! / (m_1! m_2! ...)` over the multiplicities of repeated components.
pub(crate) fn permutation_count(sorted: &[u32]) -> BigInt {
    let mut count = factorial(sorted.len());
    let mut run = 1usize;
    for i in 1..=sorted.len() {
        if i < sorted.len() && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            count /= factorial(run);
            run = 1;
        }
    }
    count
}

/// Advances `a` to its lexicographic successor; false once `a` is the last
/// (descending) arrangement.
pub(crate) fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Calls `f` once per distinct arrangement of `sorted` (which must be
/// ascending), in lexicographic order.
pub(crate) fn for_each_distinct_permutation(sorted: &[u32], mut f: impl FnMut(&[u32])) {
    let mut work = sorted.to_vec();
    loop {
        f(&work);
        if !next_permutation(&mut work) {
            break;
        }
    }
}

/// Ascending multi-indices (i_1 <= ... <= i_p, components in 1..=n) in
/// lexicographic order; the empty index when p = 0.
pub(crate) fn sorted_multi_indices(dimension: u32, order: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; order];
    fn rec(dimension: u32, order: usize, pos: usize, low: u32, current: &mut [u32], out: &mut Vec<Vec<u32>>) {
        if pos == order {
            out.push(current.to_vec());
            return;
        }
        for i in low..=dimension {
            current[pos] = i;
            rec(dimension, order, pos + 1, i, current, out);
        }
    }
    rec(dimension, order, 0, 1, &mut current, &mut out);
    out
}

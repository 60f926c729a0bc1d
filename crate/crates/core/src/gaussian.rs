//! Wick/Isserlis oracle: exact moments and cumulants of polynomials in
//! i.i.d. standard Gaussian variables, and the set-partition
//! moment-cumulant transforms.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::combinatorics::permutation_count;
use crate::error::{Error, Result};
use crate::rational::{double_factorial, Rational};
use crate::tensor::SymmetricTensor;

/// Default bound on intermediate term counts when expanding powers.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Sparse multivariate polynomial in standard Gaussian variables
/// `g_1, ..., g_n`, keyed by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianPolynomial {
    variables: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl GaussianPolynomial {
    pub fn zero(variables: usize) -> Self {
        GaussianPolynomial { variables, terms: BTreeMap::new() }
    }

    pub fn constant(variables: usize, value: Rational) -> Self {
        GaussianPolynomial::zero(variables).with_term(vec![0; variables], value).unwrap()
    }

    /// Adds `coeff * g^exponents` to the polynomial (merging with any
    /// existing term; zero results are dropped).
    pub fn with_term(mut self, exponents: Vec<u32>, coeff: Rational) -> Result<Self> {
        if exponents.len() != self.variables {
            return Err(Error::InvalidInput(format!(
                "exponent vector length {} does not match {} variables",
                exponents.len(),
                self.variables
            )));
        }
        let entry = self.terms.entry(exponents).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            // Re-borrow to remove; find the key via retain.
            self.terms.retain(|_, v| !v.is_zero());
        }
        Ok(self)
    }

    /// Univariate polynomial in `g_1` from `(exponent, coefficient)` pairs.
    pub fn univariate(terms: &[(u32, Rational)]) -> Self {
        let mut q = GaussianPolynomial::zero(1);
        for (e, c) in terms {
            q = q.with_term(vec![*e], c.clone()).unwrap();
        }
        q
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.variables != other.variables {
            return Err(Error::InvalidInput(format!(
                "cannot add polynomials in {} and {} variables",
                self.variables, other.variables
            )));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rational::zero);
            *entry += c;
        }
        terms.retain(|_, v| !v.is_zero());
        Ok(GaussianPolynomial { variables: self.variables, terms })
    }

    pub fn mul(&self, other: &Self, term_cap: usize) -> Result<Self> {
        if self.variables != other.variables {
            return Err(Error::InvalidInput(format!(
                "cannot multiply polynomials in {} and {} variables",
                self.variables, other.variables
            )));
        }
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e).or_insert_with(Rational::zero);
                *entry += ca * cb;
                if terms.len() > term_cap {
                    return Err(Error::TermCapExceeded { terms: terms.len(), cap: term_cap });
                }
            }
        }
        terms.retain(|_, v| !v.is_zero());
        Ok(GaussianPolynomial { variables: self.variables, terms })
    }

    /// `self^k` by repeated multiplication, guarded by `term_cap`.
    pub fn pow(&self, k: usize, term_cap: usize) -> Result<Self> {
        let mut out = GaussianPolynomial::constant(self.variables, Rational::one());
        for _ in 0..k {
            out = out.mul(self, term_cap)?;
        }
        Ok(out)
    }
}

/// The scalar `<T, g^(x)p>` as a polynomial: every stored sorted entry
/// contributes its value once per distinct arrangement of its index.
pub fn tensor_to_polynomial(t: &SymmetricTensor) -> GaussianPolynomial {
    let n = t.dimension() as usize;
    let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for (index, value) in t.entries() {
        let mut exponents = vec![0u32; n];
        for &i in index {
            exponents[i as usize - 1] += 1;
        }
        let coeff = value * Rational::from_integer(permutation_count(index));
        let entry = terms.entry(exponents).or_insert_with(Rational::zero);
        *entry += coeff;
    }
    terms.retain(|_, v| !v.is_zero());
    GaussianPolynomial { variables: n, terms }
}

/// `E[g_1^{e_1} ... g_n^{e_n}]` for independent standard Gaussians:
/// the product of `(e_i - 1)!!` when every exponent is even, else zero.
pub fn gaussian_monomial_moment(exponents: &[u32]) -> Rational {
    if exponents.iter().any(|e| e % 2 == 1) {
        return Rational::zero();
    }
    let mut prod = num_bigint::BigInt::from(1);
    for &e in exponents {
        if e > 0 {
            prod *= double_factorial(i64::from(e) - 1);
        }
    }
    Rational::from_integer(prod)
}

/// Exact `E[q(g)^k]` by expanding the power and applying Wick's formula
/// per monomial.
pub fn poly_moment(q: &GaussianPolynomial, k: usize) -> Result<Rational> {
    poly_moment_with_cap(q, k, DEFAULT_TERM_CAP)
}

pub fn poly_moment_with_cap(q: &GaussianPolynomial, k: usize, term_cap: usize) -> Result<Rational> {
    let power = q.pow(k, term_cap)?;
    let mut total = Rational::zero();
    for (e, c) in power.terms() {
        let m = gaussian_monomial_moment(e);
        if !m.is_zero() {
            total += c * m;
        }
    }
    Ok(total)
}

/// A partition of `{1, ..., k}` into nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }
}

/// All `Bell(k)` set partitions of `[k]`, in restricted-growth-string order.
pub fn enumerate_set_partitions(k: usize) -> Vec<SetPartition> {
    assert!(k >= 1, "set partitions are enumerated for k >= 1");
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    fn rec(pos: usize, max_used: usize, labels: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        if pos == labels.len() {
            let block_count = max_used + 1;
            let mut blocks = vec![Vec::new(); block_count];
            for (i, &b) in labels.iter().enumerate() {
                blocks[b].push(i + 1);
            }
            out.push(SetPartition { blocks });
            return;
        }
        for b in 0..=max_used + 1 {
            labels[pos] = b;
            rec(pos + 1, max_used.max(b), labels, out);
        }
    }
    // Element 1 always opens block 0.
    rec(1, 0, &mut labels, &mut out);
    out
}

/// Inverts the set-partition relation `m_k = sum over partitions of the
/// product of kappa over block sizes`; input is `m_1..m_K`, output
/// `kappa_1..kappa_K`.
pub fn moments_to_cumulants(moments: &[Rational]) -> Vec<Rational> {
    let mut kappa: Vec<Rational> = Vec::with_capacity(moments.len());
    for (k0, m_k) in moments.iter().enumerate() {
        let k = k0 + 1;
        let mut lower = Rational::zero();
        for part in enumerate_set_partitions(k) {
            if part.blocks().len() == 1 {
                continue;
            }
            let mut prod = Rational::one();
            for size in part.block_sizes() {
                prod *= &kappa[size - 1];
            }
            lower += prod;
        }
        kappa.push(m_k - lower);
    }
    kappa
}

/// Forward set-partition relation; exact inverse of
/// [`moments_to_cumulants`]. Input `kappa_1..kappa_K`, output `m_1..m_K`.
pub fn cumulants_to_moments(cumulants: &[Rational]) -> Vec<Rational> {
    let mut moments: Vec<Rational> = Vec::with_capacity(cumulants.len());
    for k in 1..=cumulants.len() {
        let mut m_k = Rational::zero();
        for part in enumerate_set_partitions(k) {
            let mut prod = Rational::one();
            for size in part.block_sizes() {
                prod *= &cumulants[size - 1];
            }
            m_k += prod;
        }
        moments.push(m_k);
    }
    moments
}

/// Exact `kappa_k(q(g))` via moments `1..k` and the partition inversion.
pub fn poly_cumulant(q: &GaussianPolynomial, k: usize) -> Result<Rational> {
    poly_cumulant_with_cap(q, k, DEFAULT_TERM_CAP)
}

pub fn poly_cumulant_with_cap(q: &GaussianPolynomial, k: usize, term_cap: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidInput("cumulants are indexed from 1".into()));
    }
    let moments: Vec<Rational> = (1..=k)
        .map(|j| poly_moment_with_cap(q, j, term_cap))
        .collect::<Result<_>>()?;
    Ok(moments_to_cumulants(&moments).pop().unwrap())
}

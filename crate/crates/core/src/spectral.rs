//! Normalized resolvent-series coefficients, the matrix-case recovery
//! check, and the Hamburger moment-sequence feasibility test with exact
//! Hankel positive-semidefiniteness certificates.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::contraction::{invariant_m_k_conn, invariant_m_k_conn_f64};
use crate::error::{Error, Result};
use crate::gaussian::{moments_to_cumulants, poly_moment, tensor_to_polynomial};
use crate::rational::{rational_serde, to_f64, Rational};
use crate::tensor::SymmetricTensor;

/// Which engine produces the connected invariants behind the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Per-class tensor-network contraction (the definition).
    Contraction,
    /// Gaussian cumulants of `<T, g^(x)p>` via Wick expansion (the oracle).
    Wick,
}

/// Coefficient storage: exact rationals (as `"a/b"` strings in JSON) or
/// floating point (as JSON numbers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientValues {
    Exact(#[serde(with = "rational_serde::vec")] Vec<Rational>),
    Float(Vec<f64>),
}

/// The sequence `alpha_0..alpha_K` with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub values: CoefficientValues,
    /// Tensor order p behind the sequence (0 when unknown, e.g. file input).
    pub order: usize,
    /// Ambient dimension N (0 when unknown).
    pub dimension: u32,
    pub source: String,
}

impl MomentSequence {
    pub fn from_exact(values: Vec<Rational>, order: usize, dimension: u32, source: &str) -> Self {
        MomentSequence {
            values: CoefficientValues::Exact(values),
            order,
            dimension,
            source: source.to_string(),
        }
    }

    /// Number of coefficients minus one (the truncation order K).
    pub fn k_max(&self) -> usize {
        match &self.values {
            CoefficientValues::Exact(v) => v.len().saturating_sub(1),
            CoefficientValues::Float(v) => v.len().saturating_sub(1),
        }
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        match &self.values {
            CoefficientValues::Exact(v) => Some(v),
            CoefficientValues::Float(_) => None,
        }
    }

    pub fn float_values(&self) -> Vec<f64> {
        match &self.values {
            CoefficientValues::Exact(v) => v.iter().map(to_f64).collect(),
            CoefficientValues::Float(v) => v.clone(),
        }
    }
}

/// `N * p^(k-1) * (k-1)!` — the normalization dividing the k-th connected
/// invariant.
fn normalizer(order: usize, dimension: u32, k: usize) -> Rational {
    let mut denom = num_bigint::BigInt::from(dimension);
    for _ in 1..k {
        denom *= order as u64;
    }
    for j in 1..k {
        denom *= j as u64;
    }
    Rational::from_integer(denom)
}

/// The exact connected cumulants `kappa_1..kappa_K` of `<T, g^(x)p>` via the
/// requested backend.
pub fn connected_invariants(t: &SymmetricTensor, k_max: usize, backend: Backend) -> Result<Vec<Rational>> {
    match backend {
        Backend::Contraction => (1..=k_max).map(|k| invariant_m_k_conn(t, k)).collect(),
        Backend::Wick => {
            let q = tensor_to_polynomial(t);
            let moments: Vec<Rational> =
                (1..=k_max).map(|k| poly_moment(&q, k)).collect::<Result<_>>()?;
            Ok(moments_to_cumulants(&moments))
        }
    }
}

/// `alpha_0 = 1`, `alpha_k = M_k^conn(T) / (N p^(k-1) (k-1)!)` for
/// `1 <= k <= k_max`, exactly.
pub fn normalized_coefficients(
    t: &SymmetricTensor,
    k_max: usize,
    backend: Backend,
) -> Result<MomentSequence> {
    if k_max == 0 {
        return Err(Error::InvalidInput("coefficient truncation order must be >= 1".into()));
    }
    let kappa = connected_invariants(t, k_max, backend)?;
    let mut values = vec![Rational::one()];
    for (k0, kap) in kappa.into_iter().enumerate() {
        values.push(kap / normalizer(t.order(), t.dimension(), k0 + 1));
    }
    Ok(MomentSequence::from_exact(
        values,
        t.order(),
        t.dimension(),
        match backend {
            Backend::Contraction => "tensor:contraction",
            Backend::Wick => "tensor:wick",
        },
    ))
}

/// Floating-point variant using the float contraction path.
pub fn normalized_coefficients_f64(t: &SymmetricTensor, k_max: usize) -> Result<MomentSequence> {
    if k_max == 0 {
        return Err(Error::InvalidInput("coefficient truncation order must be >= 1".into()));
    }
    let mut values = vec![1.0f64];
    for k in 1..=k_max {
        let kappa = invariant_m_k_conn_f64(t, k)?;
        values.push(kappa / to_f64(&normalizer(t.order(), t.dimension(), k)));
    }
    Ok(MomentSequence {
        values: CoefficientValues::Float(values),
        order: t.order(),
        dimension: t.dimension(),
        source: "tensor:contraction-float".to_string(),
    })
}

/// Outcome of comparing `alpha_k` with `Tr(X^k)/N` for a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecoveryReport {
    pub passed: bool,
    /// `alpha_0..alpha_K` from the tensorial route.
    #[serde(with = "rational_serde::vec")]
    pub coefficients: Vec<Rational>,
    /// `Tr(X^k)/N` for `k = 0..K`.
    #[serde(with = "rational_serde::vec")]
    pub trace_moments: Vec<Rational>,
    /// Indices k where the two disagree (empty iff passed).
    pub discrepancies: Vec<usize>,
}

/// Checks that the tensorial coefficients of an order-2 tensor recover the
/// normalized power-sum traces exactly.
pub fn matrix_recovery_check(x: &SymmetricTensor, k_max: usize) -> Result<MatrixRecoveryReport> {
    if x.order() != 2 {
        return Err(Error::NotAMatrix { order: x.order() });
    }
    let seq = normalized_coefficients(x, k_max, Backend::Contraction)?;
    let coefficients = seq.exact_values().unwrap().to_vec();
    let n = Rational::from_integer(x.dimension().into());
    let mut trace_moments = Vec::with_capacity(k_max + 1);
    let mut discrepancies = Vec::new();
    for k in 0..=k_max {
        let tm = x.matrix_power_trace(k)? / &n;
        if tm != coefficients[k] {
            discrepancies.push(k);
        }
        trace_moments.push(tm);
    }
    Ok(MatrixRecoveryReport {
        passed: discrepancies.is_empty(),
        coefficients,
        trace_moments,
        discrepancies,
    })
}

/// Feasibility verdict for the truncated Hamburger moment problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Necessary conditions hold at this truncation (not an existence proof).
    MomentSequencePossible,
    NotAMomentSequence,
}

/// Why a sequence was rejected; reproducible from the input alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `alpha_index < 0` at an even index.
    EvenNegative {
        index: usize,
        #[serde(with = "rational_serde")]
        value: Rational,
    },
    /// The Hankel matrix `H_order = [alpha_{i+j}]` has a principal minor
    /// (rows/columns `indices`) with negative determinant.
    HankelMinor {
        order: usize,
        indices: Vec<usize>,
        #[serde(with = "rational_serde")]
        determinant: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProblemReport {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
}

/// Exact determinant by fraction Gaussian elimination with row pivoting.
fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut sign = 1i64;
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot_row != col {
            m.swap(pivot_row, col);
            sign = -sign;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pivot;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[row][c] -= sub;
            }
        }
    }
    if sign < 0 {
        -det
    } else {
        det
    }
}

fn submatrix(h: &[Vec<Rational>], indices: &[usize]) -> Vec<Vec<Rational>> {
    indices
        .iter()
        .map(|&r| indices.iter().map(|&c| h[r][c].clone()).collect())
        .collect()
}

/// Exact PSD test: Sylvester's criterion on leading minors, falling back to
/// all principal minors when a leading minor vanishes (semidefinite
/// boundary). Returns the first violating principal minor, if any.
fn psd_violation(h: &[Vec<Rational>]) -> Option<(Vec<usize>, Rational)> {
    let n = h.len();
    for size in 1..=n {
        let indices: Vec<usize> = (0..size).collect();
        let d = determinant(submatrix(h, &indices));
        if d.is_negative() {
            return Some((indices, d));
        }
        if d.is_zero() {
            // Sylvester is inconclusive on the semidefinite boundary; a
            // symmetric matrix is PSD iff every principal minor is >= 0.
            for size in 1..=n {
                for indices in combinations(n, size) {
                    let d = determinant(submatrix(h, &indices));
                    if d.is_negative() {
                        return Some((indices, d));
                    }
                }
            }
            return None;
        }
    }
    None
}

/// Size-`size` subsets of `{0..n-1}` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    'outer: loop {
        out.push(idx.clone());
        let mut i = size;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if idx[i] < n - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
    }
    out
}

/// Decides whether `alpha_0..alpha_K` passes the necessary conditions for a
/// Hamburger moment sequence: a negative even-index entry rejects
/// immediately; otherwise every Hankel matrix `H_m` with `2m <= K` must be
/// positive semidefinite, tested exactly.
pub fn check_moment_sequence(seq: &MomentSequence) -> Result<MomentProblemReport> {
    let Some(values) = seq.exact_values() else {
        return Err(Error::ExactValuesRequired);
    };
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !values[0].is_positive() {
        return Err(Error::NonPositiveLeadingMoment { leading: crate::rational::format_rational(&values[0]) });
    }
    let k_max = values.len() - 1;
    for index in (2..=k_max).step_by(2) {
        if values[index].is_negative() {
            return Ok(MomentProblemReport {
                verdict: Verdict::NotAMomentSequence,
                certificate: Some(Certificate::EvenNegative {
                    index,
                    value: values[index].clone(),
                }),
            });
        }
    }
    for m in 1..=k_max / 2 {
        let h: Vec<Vec<Rational>> = (0..=m)
            .map(|i| (0..=m).map(|j| values[i + j].clone()).collect())
            .collect();
        if let Some((indices, det)) = psd_violation(&h) {
            return Ok(MomentProblemReport {
                verdict: Verdict::NotAMomentSequence,
                certificate: Some(Certificate::HankelMinor { order: m, indices, determinant: det }),
            });
        }
    }
    Ok(MomentProblemReport { verdict: Verdict::MomentSequencePossible, certificate: None })
}

/// Truncated Laurent series `1/z + sum alpha_k z^(-k-1)`, evaluated off the
/// real axis in floating point.
#[derive(Debug, Clone)]
pub struct ResolventSeries {
    /// `alpha_1..alpha_K` as floats.
    coefficients: Vec<f64>,
}

impl ResolventSeries {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Err(Error::RealEvaluationPoint);
        }
        let inv = z.inv();
        let mut acc = Complex64::new(0.0, 0.0);
        // Horner from the tail: alpha_K, ..., alpha_1, then 1.
        for alpha in self.coefficients.iter().rev() {
            acc = (acc + alpha) * inv;
        }
        Ok((acc + 1.0) * inv)
    }
}

/// Builds the truncated series from the exact coefficients of `T`.
pub fn truncated_resolvent_series(t: &SymmetricTensor, k_max: usize) -> Result<ResolventSeries> {
    let seq = normalized_coefficients(t, k_max, Backend::Contraction)?;
    let values = seq.float_values();
    Ok(ResolventSeries { coefficients: values[1..].to_vec() })
}

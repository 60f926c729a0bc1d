//! The explicit cubic tensor family whose fourth normalized coefficient
//! turns negative, the closed form for the fourth cumulant, and the
//! minimal-parameter search.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian::{poly_cumulant, tensor_to_polynomial, GaussianPolynomial};
use crate::rational::{int, rat, Rational};
use crate::tensor::SymmetricTensor;

/// Construction data for the family: parameter `n`, ambient dimension
/// `n + 1` (kept separate on purpose — conflating them silently corrupts
/// the coefficient normalization).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub parameter: u32,
    pub ambient_dimension: u32,
    #[serde(with = "crate::rational::rational_serde")]
    pub cubic_coefficient: Rational,
    #[serde(with = "crate::rational::rational_serde")]
    pub coupling_coefficient: Rational,
}

pub fn counterexample_spec(parameter: u32) -> CounterexampleSpec {
    assert!(parameter >= 1);
    CounterexampleSpec {
        parameter,
        ambient_dimension: parameter + 1,
        cubic_coefficient: rat(-1, 10),
        coupling_coefficient: rat(1, 3 * i64::from(parameter)),
    }
}

/// The order-3 tensor in dimension `n + 1` with entry `(1,1,1) = -1/10` and
/// entries `(1,i,i) = 1/(3n)` for `i = 2..=n+1`; its Gaussian scalar is
/// `g_1 ((1/n) sum_{i>=2} g_i^2) - (1/10) g_1^3`.
pub fn build_counterexample_tensor(parameter: u32) -> SymmetricTensor {
    let spec = counterexample_spec(parameter);
    let mut entries = vec![(vec![1, 1, 1], spec.cubic_coefficient.clone())];
    for i in 2..=spec.ambient_dimension {
        entries.push((vec![1, i, i], spec.coupling_coefficient.clone()));
    }
    SymmetricTensor::from_entries(3, spec.ambient_dimension, entries).unwrap()
}

/// Closed form `-87/250 + 6/n + 72/n^2 + 144/n^3` for the fourth cumulant
/// of the family's Gaussian scalar.
pub fn f_closed_form(parameter: u32) -> Rational {
    let n = int(i64::from(parameter));
    rat(-87, 250) + int(6) / &n + int(72) / (&n * &n) + int(144) / (&n * &n * &n)
}

/// Engine used to evaluate the fourth cumulant independently of the closed
/// form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kappa4Backend {
    /// Wick expansion of the 27-term polynomial (cheap for any parameter).
    Wick,
    /// Per-class tensor-network contraction; cost grows with the parameter,
    /// though sparse storage keeps even n = 26 affordable.
    Contraction,
}

/// Exact `kappa_4` of `<T^(n), g^(x)3>` via the chosen backend; equals
/// [`f_closed_form`] for every parameter.
pub fn kappa4_of_counterexample(parameter: u32, backend: Kappa4Backend) -> Result<Rational> {
    let t = build_counterexample_tensor(parameter);
    match backend {
        Kappa4Backend::Wick => poly_cumulant(&tensor_to_polynomial(&t), 4),
        Kappa4Backend::Contraction => crate::contraction::invariant_m_k_conn(&t, 4),
    }
}

/// Smallest parameter `n <= search_bound` with `f(n) < 0`. Also confirms
/// the sign stays negative from the answer through the bound (the closed
/// form is strictly decreasing, so a sign flip would indicate a computation
/// bug).
pub fn minimal_negative_parameter(search_bound: u32) -> Option<u32> {
    let first = (1..=search_bound).find(|&n| f_closed_form(n).is_negative())?;
    for n in first..=search_bound {
        assert!(
            f_closed_form(n).is_negative(),
            "sign pattern violated at n = {n}: the closed form must stay negative"
        );
    }
    Some(first)
}

/// `kappa_4(a g_1^2 + b g_1 + c)`, evaluated by the Wick oracle and checked
/// against the closed form `48 (a^4 + a^2 b^2)` — nonnegative for every
/// rational `(a, b, c)`, which is why no quadratic scalar can exhibit the
/// negativity of the cubic family.
pub fn kappa4_quadratic_family(a: &Rational, b: &Rational, c: &Rational) -> Rational {
    let q = GaussianPolynomial::univariate(&[
        (2, a.clone()),
        (1, b.clone()),
        (0, c.clone()),
    ]);
    let kappa = poly_cumulant(&q, 4).expect("a three-term quadratic stays far below the term cap");
    let a2 = a * a;
    let expected = int(48) * (&a2 * &a2 + a2 * (b * b));
    assert_eq!(kappa, expected, "Wick kappa_4 deviates from 48(a^4 + a^2 b^2)");
    kappa
}

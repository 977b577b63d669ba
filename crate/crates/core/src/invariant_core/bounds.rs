//! Iteration budgets and the robust AM-GM inequality behind them.

use serde::Serialize;

use crate::error::{Error, Result};

/// `ceil(C · n (b + ln n) / ε)`, the matrix and operator scaling budget.
pub fn matrix_budget(n: usize, b: u64, epsilon: f64, constant: f64) -> u64 {
    let n_f = n.max(1) as f64;
    ceil_budget(constant * n_f * (b as f64 + n_f.ln()) / epsilon)
}

/// Same formula as [`matrix_budget`]; kept separate so call sites name their flavor.
pub fn operator_budget(n: usize, b: u64, epsilon: f64, constant: f64) -> u64 {
    matrix_budget(n, b, epsilon, constant)
}

/// `ceil(C · d (b + ln(m n_1 ⋯ n_d)) / (ℓ ε))` with `ℓ = min n_i`.
pub fn tensor_budget(m: usize, shape: &[usize], b: u64, epsilon: f64, constant: f64) -> u64 {
    let d = shape.len().max(1) as f64;
    let ell = shape.iter().copied().min().unwrap_or(1).max(1) as f64;
    let log_size =
        (m.max(1) as f64).ln() + shape.iter().map(|&n| (n.max(1) as f64).ln()).sum::<f64>();
    ceil_budget(constant * d * (b as f64 + log_size) / (ell * epsilon))
}

fn ceil_budget(x: f64) -> u64 {
    if !x.is_finite() || x >= u64::MAX as f64 {
        u64::MAX
    } else {
        (x.ceil() as u64).max(1)
    }
}

/// Parameters of the potential-function analysis for one run.
///
/// `eps_tilde` is the target for the unit-norm distance ds̃.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisBound {
    pub u: f64,
    pub ell: usize,
    pub b: u64,
    pub eps_prime: f64,
    pub eps_double_prime: f64,
    pub n_prime: usize,
    pub k: u32,
}

impl AnalysisBound {
    /// Matching-monomial potential: coefficients 1, degree n.
    pub fn matrix(n: usize, b: u64, eps_tilde: f64) -> Self {
        let nf = n as f64;
        Self {
            u: 1.0,
            ell: n,
            b,
            eps_prime: nf * nf * eps_tilde / 2.0,
            eps_double_prime: nf * eps_tilde,
            n_prime: n,
            k: 1,
        }
    }

    /// Left-right determinant potential with block size `block`: `|P(A)| ≤ n^{nk/2} ‖A‖^{nk}`.
    pub fn operator(n: usize, block: usize, b: u64, eps_tilde: f64) -> Self {
        let nf = n as f64;
        Self {
            u: nf.sqrt(),
            ell: n * block.max(1),
            b,
            eps_prime: nf * nf * eps_tilde / 2.0,
            eps_double_prime: nf * eps_tilde,
            n_prime: n,
            k: 2,
        }
    }

    /// Tensor scaling: `n'` is the smallest local dimension.
    pub fn tensor(m: usize, shape: &[usize], b: u64, eps_tilde: f64) -> Self {
        let d = shape.len() as f64;
        let n_min = shape.iter().copied().min().unwrap_or(1);
        let nf = n_min as f64;
        let size = m as f64 * shape.iter().map(|&n| n as f64).product::<f64>();
        Self {
            u: size.max(1.0),
            ell: n_min,
            b,
            eps_prime: nf * nf * eps_tilde / d,
            eps_double_prime: nf * eps_tilde / d,
            n_prime: n_min,
            k: 2,
        }
    }

    /// `ceil(C · (ln U + b) / ε″)`.
    pub fn unified_budget(&self, constant: f64) -> u64 {
        ceil_budget(constant * (self.u.ln() + self.b as f64) / self.eps_double_prime)
    }

    /// Smallest factor by which the potential must grow in a step whose
    /// normalized deviation exceeds ε′.
    pub fn min_progress_log(&self) -> f64 {
        self.eps_prime.min(1.0) / (12.0 * self.n_prime as f64)
    }
}

/// Returns `∏ x_i` after checking `Σ x_i = n` and `δ = Σ (x_i − 1)² ≤ 1`.
///
/// The product never exceeds `exp(−δ/6)`.
pub fn robust_amgm_bound(x: &[f64], delta: f64) -> Result<f64> {
    let n = x.len() as f64;
    let sum: f64 = x.iter().sum();
    if (sum - n).abs() > 1e-10 {
        return Err(Error::PreconditionViolated(format!(
            "Σx = {sum}, expected {n}"
        )));
    }
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::PreconditionViolated(
            "entries must be positive".into(),
        ));
    }
    let actual: f64 = x.iter().map(|&v| (v - 1.0) * (v - 1.0)).sum();
    if (actual - delta).abs() > 1e-10 {
        return Err(Error::PreconditionViolated(format!(
            "δ = {delta} but Σ(x−1)² = {actual}"
        )));
    }
    if delta > 1.0 {
        return Err(Error::PreconditionViolated(format!(
            "δ = {delta} exceeds 1"
        )));
    }
    Ok(x.iter().product())
}

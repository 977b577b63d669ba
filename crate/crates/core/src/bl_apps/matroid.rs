//! Membership in the intersection polytope of two linear matroids.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::report::ScalingOptions;

use super::datum::BLDatum;
use super::feasibility::bl_feasibility_check_seeded;
use super::scale::{bl_scale, BLScaling, BLStatus};

pub const MAX_MATROID_ELEMENTS: usize = 16;
pub const MAX_MATROID_RANK: usize = 8;
/// Padding vectors have integer entries in `[−PAD_ENTRY_BOUND, PAD_ENTRY_BOUND]`.
pub const PAD_ENTRY_BOUND: i64 = 1 << 16;

/// Two linear matroids on the same ground set `{1, …, m}`, represented by
/// vectors `v_i` and `w_i` in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatroidPair {
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
}

impl MatroidPair {
    pub fn new(v: Vec<Vec<f64>>, w: Vec<Vec<f64>>) -> Result<Self> {
        if v.len() != w.len() || v.is_empty() {
            return Err(Error::Shape(format!(
                "{} vectors v but {} vectors w",
                v.len(),
                w.len()
            )));
        }
        let n = v[0].len();
        if n == 0 || v.iter().chain(&w).any(|u| u.len() != n) {
            return Err(Error::Shape(
                "all vectors must share a positive dimension".into(),
            ));
        }
        if v.iter().chain(&w).flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidEntry("non-finite vector entry".into()));
        }
        Ok(Self { v, w })
    }

    pub fn m(&self) -> usize {
        self.v.len()
    }

    pub fn n(&self) -> usize {
        self.v[0].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    InPolytope,
    OutOfPolytope,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatroidMembership {
    pub verdict: Membership,
    pub reason: String,
    pub scaling: Option<BLScaling>,
}

/// Block `[[0, vᵀ], [wᵀ, 0]]` acting on `ℝⁿ ⊕ ℝⁿ`.
fn block(v: &[f64], w: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut top = vec![0.0; 2 * n];
    let mut bottom = vec![0.0; 2 * n];
    top[n..].copy_from_slice(v);
    bottom[..n].copy_from_slice(w);
    vec![top, bottom]
}

fn out(reason: String) -> MatroidMembership {
    MatroidMembership {
        verdict: Membership::OutOfPolytope,
        reason,
        scaling: None,
    }
}

/// Decides whether `x` lies in the convex hull of the indicator vectors of
/// common independent sets.
///
/// The ground set is padded with `n` generic elements of weight
/// `(n − Σx)/n` each, so that the question becomes feasibility of a BL datum
/// with `Σ p_i = n`. Coordinate bounds and the BL necessary conditions give
/// certified `OutOfPolytope`; convergence of [`bl_scale`] gives `InPolytope`;
/// anything else is `Undetermined`.
pub fn matroid_intersection_membership(
    pair: &MatroidPair,
    x: &[Rational],
    opts: &ScalingOptions,
) -> Result<MatroidMembership> {
    let (m, n) = (pair.m(), pair.n());
    if m > MAX_MATROID_ELEMENTS || n > MAX_MATROID_RANK {
        return Err(Error::SizeLimit(format!(
            "m = {m}, n = {n} exceed {MAX_MATROID_ELEMENTS}, {MAX_MATROID_RANK}"
        )));
    }
    if x.len() != m {
        return Err(Error::Shape(format!(
            "point has {} coordinates for {m} elements",
            x.len()
        )));
    }
    let one = Rational::from_integer(1.into());
    let n_rat = Rational::from_integer(n.into());
    for (i, xi) in x.iter().enumerate() {
        if xi.is_negative() {
            return Ok(out(format!("x_{} = {xi} is negative", i + 1)));
        }
        if xi > &one {
            return Ok(out(format!("x_{} = {xi} exceeds 1", i + 1)));
        }
        let is_loop = pair.v[i].iter().all(|&t| t == 0.0) || pair.w[i].iter().all(|&t| t == 0.0);
        if is_loop && !xi.is_zero() {
            return Ok(out(format!(
                "element {} is a loop but x_{} = {xi}",
                i + 1,
                i + 1
            )));
        }
    }
    let total: Rational = x.iter().sum();
    if total > n_rat {
        return Ok(out(format!("Σ x = {total} exceeds the rank bound {n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut generic = || -> Vec<f64> {
        (0..n)
            .map(|_| rng.gen_range(-PAD_ENTRY_BOUND..=PAD_ENTRY_BOUND) as f64)
            .collect()
    };
    let pad_weight = (&n_rat - &total) / &n_rat;
    let mut maps: Vec<Vec<Vec<f64>>> = (0..m).map(|i| block(&pair.v[i], &pair.w[i])).collect();
    let mut p: Vec<Rational> = x.to_vec();
    for _ in 0..n {
        let (a, b) = (generic(), generic());
        maps.push(block(&a, &b));
        p.push(pad_weight.clone());
    }
    let datum = BLDatum::new(2 * n, maps, p)?;

    let check = bl_feasibility_check_seeded(&datum, opts.seed);
    if check.is_infeasible() {
        return Ok(out(check.reason()));
    }
    let scaling = bl_scale(&datum, &opts.clone().without_potential())?;
    let (verdict, reason) = match scaling.status {
        BLStatus::Converged => (
            Membership::InPolytope,
            "the padded BL datum scales to geometric position".to_string(),
        ),
        BLStatus::BudgetExhausted => (
            Membership::Undetermined,
            "scaling budget exhausted".to_string(),
        ),
        BLStatus::Infeasible => (
            Membership::Undetermined,
            scaling
                .reason
                .clone()
                .unwrap_or_else(|| "scaling stalled".into()),
        ),
    };
    Ok(MatroidMembership {
        verdict,
        reason,
        scaling: Some(scaling),
    })
}

//! Tensor scaling under `SL(n_1) × ⋯ × SL(n_d)` and its template adapter.

use crate::error::{Error, Result};
use crate::invariant_core::bounds::{tensor_budget, AnalysisBound};
use crate::invariant_core::potential::{PotentialTracker, PotentialWitness};
use crate::invariant_core::template::{run_template, ScalingAdapter, StepRecord, TemplateStatus};
use crate::numerics::rational::{bit_length, from_f64};
use crate::numerics::{inv_sqrt_psd, is_near_singular, ComplexMatrix, HermitianPsd, TensorTuple};
use crate::report::{Certificate, Scalers, ScalingOptions, ScalingReport, Side, Status, TraceRow};

/// Scalers whose condition number exceeds this are flagged in the report notes.
pub const MAX_LOCAL_CONDITION: f64 = 1e12;
/// Relative slack when re-checking a converged run from the input and its scalers.
pub const REPRODUCTION_SLACK: f64 = 1e-6;

/// Quantum marginals `ρ_i = flat_i(A) flat_i(A)†`, one per axis.
pub fn marginals(a: &TensorTuple) -> Vec<HermitianPsd> {
    (0..a.order())
        .map(|i| HermitianPsd::from_trusted(a.flatten(i).gram_left()))
        .collect()
}

/// `Σ_i ‖ρ_i/tr ρ_i − I/n_i‖_F²`, which is `Σ_i ‖ρ_i − I/n_i‖_F²` at unit norm.
pub fn ds_tensor(a: &TensorTuple) -> f64 {
    marginals(a).iter().map(marginal_deviation).sum()
}

fn marginal_deviation(rho: &HermitianPsd) -> f64 {
    let n = rho.dim();
    let tr = rho.matrix().trace().re;
    let rho = if tr > 0.0 {
        rho.matrix().scale_real(1.0 / tr)
    } else {
        rho.matrix().clone()
    };
    (&rho - &ComplexMatrix::identity(n).scale_real(1.0 / n as f64)).frobenius_norm_sq()
}

/// Maximum bit length over the exact rationalization of every entry.
pub fn tensor_bit_complexity(a: &TensorTuple) -> u64 {
    a.as_slice()
        .iter()
        .flat_map(|z| [z.re, z.im])
        .filter_map(|x| from_f64(x).ok())
        .map(|r| bit_length(&r))
        .max()
        .unwrap_or(1)
        .max(1)
}

/// Unit-norm iterate `Ã = (g_1 ⊗ ⋯ ⊗ g_d)·A₀` with `A₀ = A / ‖A‖`.
#[derive(Debug, Clone)]
pub struct TensorAdapter {
    t: TensorTuple,
    /// Unit-norm directions of the local scalers; `g_i = exp(log_scale_i)·dir_i`.
    g: Vec<ComplexMatrix>,
    log_scale: Vec<f64>,
    log_det: Vec<f64>,
    input_norm: f64,
}

impl TensorAdapter {
    pub fn new(a: &TensorTuple) -> Self {
        let norm = a.norm_sq().sqrt();
        Self {
            t: a.scale_real(if norm > 0.0 { 1.0 / norm } else { 1.0 }),
            g: a.shape()
                .iter()
                .map(|&n| ComplexMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt()))
                .collect(),
            log_scale: a.shape().iter().map(|&n| 0.5 * (n as f64).ln()).collect(),
            log_det: vec![0.0; a.order()],
            input_norm: norm,
        }
    }

    pub fn iterate(&self) -> &TensorTuple {
        &self.t
    }

    /// `(g_1, …, g_d)` with `(⊗ g_i)·A` equal to the unit-norm iterate.
    pub fn public_scalers(&self) -> Vec<ComplexMatrix> {
        self.g
            .iter()
            .zip(&self.log_scale)
            .enumerate()
            .map(|(i, (g, &l))| {
                let l = if i == 0 { l - self.input_norm.ln() } else { l };
                g.scale_real(l.exp())
            })
            .collect()
    }

    /// Largest condition number among the local scalers.
    pub fn scaler_condition(&self) -> f64 {
        self.g
            .iter()
            .map(ComplexMatrix::condition_number)
            .fold(0.0, f64::max)
    }

    fn push_scaler(&mut self, axis: usize, h: &ComplexMatrix) {
        let g = h * &self.g[axis];
        let norm = g.frobenius_norm();
        self.g[axis] = g.scale_real(1.0 / norm);
        self.log_scale[axis] += norm.ln();
    }

    fn deviations(&self) -> Vec<f64> {
        marginals(&self.t).iter().map(marginal_deviation).collect()
    }
}

impl ScalingAdapter for TensorAdapter {
    fn trivial_check(&self) -> Option<String> {
        marginals(&self.t)
            .iter()
            .position(is_near_singular)
            .map(|i| format!("marginal on axis {} is singular", i + 1))
    }

    fn ds_tilde(&self) -> f64 {
        self.deviations().iter().sum()
    }

    fn normalize(&mut self, _eps_tilde: f64) -> Result<StepRecord> {
        let devs = self.deviations();
        let axis = (0..devs.len())
            .max_by(|&i, &j| devs[i].total_cmp(&devs[j]))
            .ok_or_else(|| Error::Internal("tensor without axes".into()))?;
        let n = self.t.shape()[axis];
        let rho = HermitianPsd::from_trusted(self.t.flatten(axis).gram_left().scale_real(n as f64));
        let eig = rho.eigen();
        let h = inv_sqrt_psd(&rho, None)?;
        let log_det_h = -0.5 * eig.values.iter().map(|l| l.ln()).sum::<f64>();
        self.t = self.t.apply_axis(axis, &h);
        self.push_scaler(axis, &h);
        self.log_det[axis] += log_det_h;
        Ok(StepRecord {
            side: Side::Axis(axis),
            delta: eig.values.iter().map(|l| (l - 1.0) * (l - 1.0)).sum(),
            log_det_h,
            n_prime: n,
        })
    }

    fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 && norm != 1.0 {
            self.t = self.t.scale_real(1.0 / norm);
            self.log_scale[0] -= norm.ln();
            self.log_det[0] -= self.t.shape()[0] as f64 * norm.ln();
        }
    }

    fn norm(&self) -> f64 {
        self.t.norm_sq().sqrt()
    }

    fn log_potential(&self, _witness: &PotentialWitness) -> Option<f64> {
        None
    }

    fn log_capacity(&self) -> f64 {
        let scale: f64 = self
            .log_det
            .iter()
            .zip(self.t.shape())
            .map(|(l, &n)| 2.0 / n as f64 * l)
            .sum();
        2.0 * self.norm().ln() - scale
    }

    fn health(&self) -> Option<String> {
        let finite = self
            .t
            .as_slice()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite());
        (!finite).then(|| "non-finite entries in the iterate".to_string())
    }
}

/// [`tensor_scale`] with the bit complexity of exactly-specified entries.
pub fn tensor_scale_with_bits(
    a: &TensorTuple,
    b: u64,
    opts: &ScalingOptions,
) -> Result<ScalingReport> {
    opts.validate()?;
    let budget = opts
        .budget_override
        .unwrap_or_else(|| tensor_budget(a.m(), a.shape(), b, opts.epsilon, opts.budget_constant));
    let unified_budget = AnalysisBound::tensor(a.m(), a.shape(), b, opts.epsilon)
        .unified_budget(opts.budget_constant);
    let mut adapter = TensorAdapter::new(a);
    let mut tracker =
        PotentialTracker::disabled(opts.track_potential.then(|| {
            "potential unavailable: no invariant witness is sampled for tensors".to_string()
        }));
    let template = run_template(&mut adapter, opts.epsilon, budget, &mut tracker)?;
    let mut notes: Vec<String> = tracker.note.iter().cloned().collect();
    let (mut status, certificate) = match &template.status {
        TemplateStatus::Converged => (Status::Converged, Certificate::None),
        TemplateStatus::TrivialFailure(reason) => {
            notes.push(reason.clone());
            (
                Status::NotScalable,
                Certificate::TrivialCheck {
                    reason: reason.clone(),
                },
            )
        }
        TemplateStatus::BudgetExhausted => (Status::Undetermined, Certificate::None),
        TemplateStatus::Aborted(reason) => {
            notes.push(reason.clone());
            (Status::Undetermined, Certificate::None)
        }
    };
    let trivial_failure = matches!(template.status, TemplateStatus::TrivialFailure(_));
    let worst_cond = adapter.scaler_condition();
    if !trivial_failure {
        notes.push(format!("max cond(g_i) = {worst_cond:.3e}"));
    }
    let ill_conditioned = !trivial_failure && !(worst_cond <= MAX_LOCAL_CONDITION);
    if ill_conditioned && status == Status::Converged {
        status = Status::Undetermined;
        notes.push(
            "convergence reached only through ill-conditioned scalers and may be an artifact of rounding".into(),
        );
    }
    let scalers = adapter.public_scalers();
    let scalers_finite = scalers
        .iter()
        .flat_map(ComplexMatrix::as_slice)
        .all(|z| z.re.is_finite() && z.im.is_finite());
    if !trivial_failure && !scalers_finite {
        notes.push("local scalers overflow double precision and are omitted".into());
    }
    if status == Status::Converged && scalers_finite {
        let reproduced = ds_tensor(&a.apply_local(&scalers));
        if !(reproduced <= opts.epsilon * (1.0 + REPRODUCTION_SLACK)) {
            status = Status::Undetermined;
            notes.push(format!(
                "the returned scalers give ds = {reproduced:.3e} > ε; the iterate drifted through rounding"
            ));
        }
    }
    let final_ds = if trivial_failure {
        ds_tensor(&adapter.t)
    } else {
        template.final_ds_tilde()
    };
    Ok(ScalingReport {
        status,
        scalers: if trivial_failure || !scalers_finite {
            Scalers::None
        } else {
            Scalers::Local { factors: scalers }
        },
        iterations: template.iterations,
        epsilon: opts.epsilon,
        final_ds,
        trace: if template.trace.is_empty() {
            vec![TraceRow {
                iter: 0,
                ds: final_ds,
                potential: None,
                side: Side::Start,
                norm: a.norm_sq().sqrt(),
            }]
        } else {
            template.trace.clone()
        },
        certificate,
        bit_complexity: b,
        budget,
        unified_budget,
        capacity_estimate: (!template.log_capacity.is_empty())
            .then(|| template.min_log_capacity().exp()),
        potential_available: false,
        notes,
    })
}

/// Normalizes the marginal furthest from `I/n_i` until
/// `Σ ‖ρ_i − I/n_i‖² ≤ ε` on the unit-norm iterate.
///
/// A singular marginal yields `NotScalable`; running out of iterations
/// yields `Undetermined`, since non-convergence does not prove membership
/// in the null cone.
pub fn tensor_scale(a: &TensorTuple, opts: &ScalingOptions) -> Result<ScalingReport> {
    tensor_scale_with_bits(a, tensor_bit_complexity(a), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn ghz() -> TensorTuple {
        TensorTuple::from_support(vec![2, 2, 2], &[vec![0, 0, 0], vec![1, 1, 1]]).unwrap()
    }

    #[test]
    fn ghz_is_already_scaled() {
        let a = ghz().scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!(ds_tensor(&a) < 1e-30);
        let r = tensor_scale(&ghz(), &ScalingOptions::new(1e-9)).unwrap();
        assert_eq!((r.status, r.iterations), (Status::Converged, 0));
    }

    #[test]
    fn product_state_fails_trivially() {
        let a = TensorTuple::product_state(&[
            vec![c(1.0), c(0.0)],
            vec![c(1.0), c(0.0)],
            vec![c(1.0), c(0.0)],
        ])
        .unwrap();
        let r = tensor_scale(&a, &ScalingOptions::new(1e-6)).unwrap();
        assert_eq!(r.status, Status::NotScalable);
        assert!(matches!(r.certificate, Certificate::TrivialCheck { .. }));
    }

    #[test]
    fn w_state_is_undetermined() {
        let w = TensorTuple::from_support(
            vec![2, 2, 2],
            &[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]],
        )
        .unwrap();
        let r = tensor_scale(&w, &ScalingOptions::new(1e-3).with_budget(200)).unwrap();
        assert_eq!(r.status, Status::Undetermined);
        assert!(r.final_ds > 1e-3);
    }

    #[test]
    fn scalers_reproduce_iterate() {
        let data: Vec<Complex64> = (0..8).map(|k| c(1.0 + (k * k % 5) as f64)).collect();
        let a = TensorTuple::new(1, vec![2, 2, 2], data).unwrap();
        let r = tensor_scale(&a, &ScalingOptions::new(1e-10)).unwrap();
        assert_eq!(r.status, Status::Converged, "{:?}", r.notes);
        let Scalers::Local { factors } = &r.scalers else {
            panic!()
        };
        let scaled = a.apply_local(factors);
        assert!(
            (scaled.norm_sq() - 1.0).abs() < 1e-9,
            "{} {:?}",
            scaled.norm_sq(),
            r.notes
        );
        assert!(ds_tensor(&scaled) <= 1e-10 * 1.0001);
    }
}

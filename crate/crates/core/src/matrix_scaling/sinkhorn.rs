//! Sinkhorn scaling and its template adapter.

use crate::error::{Error, Result};
use crate::invariant_core::bounds::{matrix_budget, AnalysisBound};
use crate::invariant_core::potential::{log_matching_monomial, PotentialTracker, PotentialWitness};
use crate::invariant_core::template::{run_template, ScalingAdapter, StepRecord, TemplateStatus};
use crate::report::{Certificate, Scalers, ScalingOptions, ScalingReport, Side, Status, TraceRow};

use super::matching::is_scalable;
use super::nonneg::{col_sums, ds_rows, row_sums, NonNegMatrix};

/// Unit-sum iterate `Ã = X A₀ Y` with `A₀ = A / ΣA`, tracked together with `ln X`, `ln Y`.
#[derive(Debug, Clone)]
pub struct MatrixAdapter {
    a: Vec<Vec<f64>>,
    log_row: Vec<f64>,
    log_col: Vec<f64>,
    input_total: f64,
}

impl MatrixAdapter {
    pub fn new(a: &NonNegMatrix) -> Self {
        let total: f64 = a.rows().iter().flatten().sum();
        let n = a.n();
        let scale = if total > 0.0 { 1.0 / total } else { 1.0 };
        Self {
            a: a.rows()
                .iter()
                .map(|r| r.iter().map(|x| x * scale).collect())
                .collect(),
            log_row: vec![0.0; n],
            log_col: vec![0.0; n],
            input_total: total,
        }
    }

    /// Row-normalized start: the iterate is rescaled so that each row sums to `1/n`.
    pub fn row_normalized(a: &NonNegMatrix) -> Self {
        let mut s = Self::new(a);
        if s.trivial_check().is_none() {
            s.apply_row_step();
        }
        s
    }

    fn n(&self) -> usize {
        self.a.len()
    }

    pub fn iterate(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// Public iterate `n·Ã`.
    pub fn public_iterate(&self) -> Vec<Vec<f64>> {
        let n = self.n() as f64;
        self.a
            .iter()
            .map(|r| r.iter().map(|x| x * n).collect())
            .collect()
    }

    /// Diagonal scalers `(B, C)` with `B A C` equal to the public iterate.
    pub fn public_scalers(&self) -> (Vec<f64>, Vec<f64>) {
        let shift = (self.n() as f64 / self.input_total).ln();
        (
            self.log_row.iter().map(|l| (l + shift).exp()).collect(),
            self.log_col.iter().map(|l| l.exp()).collect(),
        )
    }

    fn deviation(sums: &[f64]) -> f64 {
        let target = 1.0 / sums.len() as f64;
        sums.iter().map(|s| (s - target) * (s - target)).sum()
    }

    fn apply_row_step(&mut self) -> StepRecord {
        let n = self.n() as f64;
        let sums = row_sums(&self.a);
        let mut delta = 0.0;
        let mut log_det = 0.0;
        for ((row, s), lr) in self.a.iter_mut().zip(&sums).zip(self.log_row.iter_mut()) {
            let x = n * s;
            delta += (x - 1.0) * (x - 1.0);
            log_det -= x.ln();
            for v in row.iter_mut() {
                *v /= x;
            }
            *lr -= x.ln();
        }
        StepRecord {
            side: Side::Row,
            delta,
            log_det_h: log_det,
            n_prime: self.n(),
        }
    }

    fn apply_col_step(&mut self) -> StepRecord {
        let n = self.n() as f64;
        let sums = col_sums(&self.a);
        let mut delta = 0.0;
        let mut log_det = 0.0;
        for (j, s) in sums.iter().enumerate() {
            let x = n * s;
            delta += (x - 1.0) * (x - 1.0);
            log_det -= x.ln();
            for row in self.a.iter_mut() {
                row[j] /= x;
            }
            self.log_col[j] -= x.ln();
        }
        StepRecord {
            side: Side::Column,
            delta,
            log_det_h: log_det,
            n_prime: self.n(),
        }
    }
}

impl ScalingAdapter for MatrixAdapter {
    fn trivial_check(&self) -> Option<String> {
        if let Some(i) = row_sums(&self.a).iter().position(|&s| s <= 0.0) {
            return Some(format!("row {} is zero", i + 1));
        }
        if let Some(j) = col_sums(&self.a).iter().position(|&s| s <= 0.0) {
            return Some(format!("column {} is zero", j + 1));
        }
        None
    }

    fn ds_tilde(&self) -> f64 {
        Self::deviation(&row_sums(&self.a)) + Self::deviation(&col_sums(&self.a))
    }

    fn normalize(&mut self, eps_tilde: f64) -> Result<StepRecord> {
        if Self::deviation(&row_sums(&self.a)) > eps_tilde / 2.0 {
            Ok(self.apply_row_step())
        } else {
            Ok(self.apply_col_step())
        }
    }

    fn renormalize(&mut self) {
        let total: f64 = self.a.iter().flatten().sum();
        if total > 0.0 && total != 1.0 {
            for row in self.a.iter_mut() {
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
            for lr in self.log_row.iter_mut() {
                *lr -= total.ln();
            }
        }
    }

    fn norm(&self) -> f64 {
        self.a.iter().flatten().sum()
    }

    fn log_potential(&self, witness: &PotentialWitness) -> Option<f64> {
        match witness {
            PotentialWitness::Matching(sigma) => Some(log_matching_monomial(sigma, &self.a)),
            _ => None,
        }
    }

    fn log_capacity(&self) -> f64 {
        let n = self.n() as f64;
        let total: f64 = self.a.iter().flatten().sum();
        total.ln() - (self.log_row.iter().sum::<f64>() + self.log_col.iter().sum::<f64>()) / n
    }
}

pub(crate) struct SinkhornRun {
    pub report: ScalingReport,
}

pub(crate) fn sinkhorn_with(
    a: &NonNegMatrix,
    opts: &ScalingOptions,
    mut adapter: MatrixAdapter,
) -> Result<SinkhornRun> {
    opts.validate()?;
    let n = a.n();
    let nf = n as f64;
    let b = a.bit_complexity();
    let eps_tilde = opts.epsilon / (nf * nf);
    let theorem_budget = matrix_budget(n, b, opts.epsilon, opts.budget_constant);
    let budget = opts.budget_override.unwrap_or(theorem_budget);
    let unified_budget =
        AnalysisBound::matrix(n, b, eps_tilde).unified_budget(opts.budget_constant);

    let (has_matching, matching) = is_scalable(a);
    let mut notes = Vec::new();
    let mut tracker = match (opts.track_potential, matching.permutation()) {
        (true, Some(sigma)) => PotentialTracker::new(PotentialWitness::Matching(sigma.to_vec())),
        (true, None) => PotentialTracker::disabled(Some(
            "potential unavailable: no perfect matching".to_string(),
        )),
        (false, _) => PotentialTracker::disabled(None),
    };
    let template = run_template(&mut adapter, eps_tilde, budget, &mut tracker)?;
    if let Some(note) = &tracker.note {
        notes.push(note.clone());
    }

    let n2 = nf * nf;
    let trace: Vec<TraceRow> = template
        .trace
        .iter()
        .map(|r| TraceRow {
            ds: r.ds * n2,
            ..r.clone()
        })
        .collect();
    let final_ds = ds_rows(&adapter.public_iterate());
    let (row, col) = adapter.public_scalers();
    let (status, certificate) = match &template.status {
        TemplateStatus::Converged => (Status::Converged, Certificate::None),
        TemplateStatus::TrivialFailure(reason) => {
            notes.push(reason.clone());
            (Status::NotScalable, Certificate::Matching(matching.clone()))
        }
        TemplateStatus::BudgetExhausted if opts.budget_override.is_some() => (
            Status::BudgetExhausted,
            Certificate::Matching(matching.clone()),
        ),
        TemplateStatus::BudgetExhausted if has_matching => {
            notes.push(
                "iteration budget exhausted although the support has a perfect matching".into(),
            );
            (
                Status::BudgetExhausted,
                Certificate::Matching(matching.clone()),
            )
        }
        TemplateStatus::BudgetExhausted => {
            (Status::NotScalable, Certificate::Matching(matching.clone()))
        }
        TemplateStatus::Aborted(reason) => {
            notes.push(reason.clone());
            (Status::BudgetExhausted, Certificate::None)
        }
    };
    let scalers = if matches!(template.status, TemplateStatus::TrivialFailure(_)) {
        Scalers::None
    } else {
        Scalers::Diagonal { row, col }
    };
    let report = ScalingReport {
        status,
        scalers,
        iterations: template.iterations,
        epsilon: opts.epsilon,
        final_ds: if matches!(template.status, TemplateStatus::TrivialFailure(_)) {
            ds_rows(a.rows())
        } else {
            final_ds
        },
        trace: if trace.is_empty() {
            vec![TraceRow {
                iter: 0,
                ds: ds_rows(a.rows()),
                potential: None,
                side: Side::Start,
                norm: a.rows().iter().flatten().sum::<f64>() / nf,
            }]
        } else {
            trace
        },
        certificate,
        bit_complexity: b,
        budget,
        unified_budget,
        capacity_estimate: (!template.log_capacity.is_empty())
            .then(|| template.min_log_capacity().exp()),
        potential_available: tracker.is_enabled(),
        notes,
    };
    Ok(SinkhornRun { report })
}

/// Alternating row/column normalization until `ds(BAC) ≤ ε`.
///
/// A zero row or column, or exhausting the theorem budget on a support
/// without a perfect matching, yields `NotScalable` with a Hall violator.
pub fn sinkhorn(a: &NonNegMatrix, opts: &ScalingOptions) -> Result<ScalingReport> {
    Ok(sinkhorn_with(a, opts, MatrixAdapter::new(a))?.report)
}

/// Scaling-based scalability test: starts from the row-normalized matrix and
/// runs to `ε = 1/(n+1)`, below which a normalized iterate certifies scalability.
pub fn sinkhorn_decides_scalable(
    a: &NonNegMatrix,
    opts: &ScalingOptions,
) -> Result<(bool, ScalingReport)> {
    let n = a.n() as f64;
    let opts = ScalingOptions {
        epsilon: 1.0 / (n + 1.0),
        ..opts.clone()
    };
    let run = sinkhorn_with(a, &opts, MatrixAdapter::row_normalized(a))?;
    Ok((run.report.converged(), run.report))
}

/// Scales rows to sum `r` and columns to sum `c` until
/// `Σ(row_i − r_i)² + Σ(col_j − c_j)² ≤ ε`.
pub fn sinkhorn_rc(
    a: &NonNegMatrix,
    r: &[f64],
    c: &[f64],
    opts: &ScalingOptions,
) -> Result<ScalingReport> {
    opts.validate()?;
    let n = a.n();
    if r.len() != n || c.len() != n {
        return Err(Error::Shape(format!("marginals must have length {n}")));
    }
    if r.iter().chain(c).any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositiveMarginal);
    }
    let (rt, ct): (f64, f64) = (r.iter().sum(), c.iter().sum());
    if (rt - ct).abs() > 1e-12 * rt.abs().max(ct.abs()).max(1.0) {
        return Err(Error::MarginalMismatch {
            row_total: rt,
            col_total: ct,
        });
    }
    let b = a.bit_complexity();
    let budget = opts
        .budget_override
        .unwrap_or_else(|| matrix_budget(n, b, opts.epsilon, opts.budget_constant));
    let unified_budget = AnalysisBound::matrix(n, b, opts.epsilon / (n * n) as f64)
        .unified_budget(opts.budget_constant);

    let mut m: Vec<Vec<f64>> = a.rows().to_vec();
    let mut row_scale = vec![1.0; n];
    let mut col_scale = vec![1.0; n];
    let dev = |s: &[f64], t: &[f64]| s.iter().zip(t).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let dist = |m: &[Vec<f64>]| dev(&row_sums(m), r) + dev(&col_sums(m), c);
    let total = |m: &[Vec<f64>]| m.iter().flatten().sum::<f64>();

    let base = ScalingReport {
        status: Status::Converged,
        scalers: Scalers::None,
        iterations: 0,
        epsilon: opts.epsilon,
        final_ds: dist(&m),
        trace: vec![TraceRow {
            iter: 0,
            ds: dist(&m),
            potential: None,
            side: Side::Start,
            norm: total(&m),
        }],
        certificate: Certificate::None,
        bit_complexity: b,
        budget,
        unified_budget,
        capacity_estimate: None,
        potential_available: false,
        notes: Vec::new(),
    };
    let rs = row_sums(&m);
    let cs = col_sums(&m);
    if rs.iter().chain(&cs).any(|&s| s <= 0.0) {
        let (_, cert) = is_scalable(a);
        return Ok(ScalingReport {
            status: Status::NotScalable,
            certificate: Certificate::Matching(cert),
            notes: vec!["zero row or column".into()],
            ..base
        });
    }

    let mut report = base;
    let mut d = dist(&m);
    while d > opts.epsilon {
        if report.iterations as u64 >= budget {
            report.status = Status::BudgetExhausted;
            let (ok, cert) = is_scalable(a);
            if !ok {
                report.certificate = Certificate::Matching(cert);
            }
            break;
        }
        let side = if dev(&row_sums(&m), r) > opts.epsilon / 2.0 {
            for (i, s) in row_sums(&m).iter().enumerate() {
                let f = r[i] / s;
                row_scale[i] *= f;
                m[i].iter_mut().for_each(|v| *v *= f);
            }
            Side::Row
        } else {
            for (j, s) in col_sums(&m).iter().enumerate() {
                let f = c[j] / s;
                col_scale[j] *= f;
                m.iter_mut().for_each(|row| row[j] *= f);
            }
            Side::Column
        };
        report.iterations += 1;
        d = dist(&m);
        report.trace.push(TraceRow {
            iter: report.iterations,
            ds: d,
            potential: None,
            side,
            norm: total(&m),
        });
    }
    report.final_ds = d;
    report.scalers = Scalers::Diagonal {
        row: row_scale,
        col: col_scale,
    };
    Ok(report)
}

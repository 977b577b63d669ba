//! One function per subcommand; each returns the JSON report and the exit code.

use scalekit::bl_apps::{
    bl_feasibility_check_seeded, bl_scale, forster_scale, matroid_intersection_membership,
    BLFeasibility, BLStatus, Membership,
};
use scalekit::invariant_core::{torus_nullcone, TorusVector, WeightSystem};
use scalekit::matrix_scaling::{is_scalable, permanent_approx, sinkhorn};
use scalekit::numerics::permanent_exact;
use scalekit::numerics::rational::to_f64;
use scalekit::operator_scaling::{gurvits_scale, is_dim_nondecreasing};
use scalekit::tensor_scaling::{deficiency_check, tensor_scale_with_bits};
use scalekit::{Error, ScalingOptions, ScalingReport, TraceRow};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{
    BLInput, Document, ForsterInput, MatrixInput, MatroidInput, TensorInput, TorusInput, TupleInput,
};

/// Largest dimension for which the exact permanent is reported next to the interval.
pub const EXACT_PERMANENT_LIMIT: usize = 12;

pub struct Outcome {
    pub json: Value,
    pub exit_code: u8,
    pub trace: Option<Vec<TraceRow>>,
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Schema(format!("unserializable report: {e}")))
}

fn scaling_outcome(command: &str, report: ScalingReport) -> Result<Outcome, CliError> {
    let mut json = to_value(&report)?;
    json["command"] = json!(command);
    Ok(Outcome {
        json,
        exit_code: report.status.exit_code() as u8,
        trace: Some(report.trace),
    })
}

fn plain(json: Value, exit_code: u8) -> Outcome {
    Outcome {
        json,
        exit_code,
        trace: None,
    }
}

pub fn scale_matrix(doc: &Document, opts: &ScalingOptions) -> Result<Outcome, CliError> {
    let a = doc.parse::<MatrixInput>()?.build()?;
    scaling_outcome("scale-matrix", sinkhorn(&a, opts)?)
}

pub fn scale_operator(doc: &Document, opts: &ScalingOptions) -> Result<Outcome, CliError> {
    let a = doc.parse::<TupleInput>()?.build()?;
    scaling_outcome("scale-operator", gurvits_scale(&a, opts)?)
}

pub fn scale_tensor(doc: &Document, opts: &ScalingOptions) -> Result<Outcome, CliError> {
    let (t, bits) = doc.parse::<TensorInput>()?.build()?;
    scaling_outcome("scale-tensor", tensor_scale_with_bits(&t, bits, opts)?)
}

pub fn nullcone(doc: &Document, flavor: &str, opts: &ScalingOptions) -> Result<Outcome, CliError> {
    let (in_null_cone, mut json) = match flavor {
        "torus" => {
            let (ws, v) = doc.parse::<TorusInput>()?.build()?;
            let verdict = torus_nullcone(&ws, &v)?;
            (verdict.in_null_cone(), json!({ "certificate": to_value(&verdict)? }))
        }
        "matrix-support" => {
            let a = doc.parse::<MatrixInput>()?.build()?;
            let (has_matching, matching) = is_scalable(&a);
            let ws = WeightSystem::matrix_support(a.n(), a.n(), &a.support())?;
            let verdict = torus_nullcone(&ws, &TorusVector::full(ws.m()))?;
            (
                !has_matching,
                json!({ "matching": to_value(&matching)?, "certificate": to_value(&verdict)? }),
            )
        }
        "tensor-support" => {
            let (t, _) = doc.parse::<TensorInput>()?.build()?;
            let verdict = deficiency_check(t.shape(), &t.support(0.0))?;
            (verdict.is_deficient(), json!({ "certificate": to_value(&verdict)? }))
        }
        "operator" => {
            let a = doc.parse::<TupleInput>()?.build()?;
            let d = is_dim_nondecreasing(&a, opts)?;
            (
                !d.nondecreasing,
                json!({
                    "witness": to_value(&d.witness)?,
                    "scaling_status": to_value(&d.report.status)?,
                    "iterations": d.report.iterations,
                    "final_ds": d.report.final_ds,
                }),
            )
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown nullcone flavor {other:?} (expected torus, matrix-support, tensor-support or operator)"
            )))
        }
    };
    json["command"] = json!("nullcone");
    json["flavor"] = json!(flavor);
    json["in_null_cone"] = json!(in_null_cone);
    json["status"] = json!("ok");
    Ok(plain(json, 0))
}

pub fn permanent(doc: &Document, opts: &ScalingOptions) -> Result<Outcome, CliError> {
    let a = doc.parse::<MatrixInput>()?.build()?;
    let exact = if a.n() <= EXACT_PERMANENT_LIMIT {
        let p = permanent_exact(&a)?;
        json!({ "value": p.to_string(), "approx": to_f64(&p) })
    } else {
        Value::Null
    };
    let (status, interval, code) = match permanent_approx(&a, opts) {
        Ok(iv) => ("converged", to_value(&iv)?, 0),
        Err(Error::NotScalable(reason)) => {
            let (has_matching, _) = is_scalable(&a);
            let (status, code) = if has_matching {
                ("budget-exhausted", 3)
            } else {
                ("not-scalable", 2)
            };
            (status, json!({ "reason": reason }), code)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(plain(
        json!({
            "command": "permanent",
            "status": status,
            "interval": interval,
            "exact": exact,
        }),
        code,
    ))
}

pub fn bl(doc: &Document, flavor: &str, opts: &ScalingOptions) -> Result<Outcome, CliError> {
    let (status, code, mut json) = match flavor {
        "feasibility" => {
            let datum = doc.parse::<BLInput>()?.build()?;
            let check = bl_feasibility_check_seeded(&datum, opts.seed);
            feasibility_json(&check)?
        }
        "scale" => {
            let datum = doc.parse::<BLInput>()?.build()?;
            let check = bl_feasibility_check_seeded(&datum, opts.seed);
            if check.is_infeasible() {
                feasibility_json(&check)?
            } else {
                let sc = bl_scale(&datum, opts)?;
                let (status, code) = match sc.status {
                    BLStatus::Converged => ("converged", 0),
                    BLStatus::BudgetExhausted => ("budget-exhausted", 3),
                    BLStatus::Infeasible => ("not-scalable", 2),
                };
                (status, code, json!({ "scaling": to_value(&sc)? }))
            }
        }
        "forster" => {
            let vectors = doc.parse::<ForsterInput>()?.build()?;
            let f = forster_scale(&vectors, opts)?;
            let (status, code) = if f.converged {
                ("converged", 0)
            } else {
                ("budget-exhausted", 3)
            };
            (status, code, json!({ "forster": to_value(&f)? }))
        }
        "matroid" => {
            let (pair, x) = doc.parse::<MatroidInput>()?.build()?;
            let res = matroid_intersection_membership(&pair, &x, opts)?;
            let (status, code) = match res.verdict {
                Membership::InPolytope => ("converged", 0),
                Membership::OutOfPolytope => ("not-scalable", 2),
                Membership::Undetermined => ("undetermined", 3),
            };
            (status, code, json!({ "membership": to_value(&res)? }))
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown bl flavor {other:?} (expected feasibility, scale, forster or matroid)"
            )))
        }
    };
    json["command"] = json!("bl");
    json["flavor"] = json!(flavor);
    json["status"] = json!(status);
    Ok(plain(json, code))
}

/// Condition 1 is `n = Σ p_i n_i`; condition 2 is the subspace inequality.
fn feasibility_json(check: &BLFeasibility) -> Result<(&'static str, u8, Value), CliError> {
    let condition = match check {
        BLFeasibility::DimensionMismatch { .. } => Some(1),
        BLFeasibility::SubspaceViolation { .. } => Some(2),
        BLFeasibility::PassedNecessary { .. } => None,
    };
    let reason = match condition {
        Some(c) => format!("condition {c} fails: {}", check.reason()),
        None => check.reason(),
    };
    let (status, code) = if condition.is_some() {
        ("not-scalable", 2)
    } else {
        ("passed-necessary", 0)
    };
    Ok((
        status,
        code,
        json!({
            "feasibility": to_value(check)?,
            "condition": condition,
            "reason": reason,
        }),
    ))
}

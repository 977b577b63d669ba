//! Alternating scaling of a Brascamp-Lieb datum to geometric position.

use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::invariant_core::bounds::operator_budget;
use crate::numerics::{inv_sqrt_psd, ComplexMatrix, HermitianPsd, Rational};
use crate::report::ScalingOptions;

use super::datum::{geometricity, isotropy_matrix, BLDatum, GeometricityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BLStatus {
    Converged,
    BudgetExhausted,
    Infeasible,
}

/// Result of [`bl_scale`]: `B'_i = C_i B_i A` is within `ε` of geometric when converged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BLScaling {
    pub status: BLStatus,
    pub a: Vec<Vec<f64>>,
    /// One normalizer per map; maps with `p_i = 0` keep the identity.
    pub c: Vec<Vec<Vec<f64>>>,
    pub iterations: usize,
    pub budget: u64,
    pub residuals: GeometricityReport,
    /// `|det A| ∏ |det C_i|^{p_i}`, the value of the BL constant if the scaled datum were exactly geometric.
    pub constant_estimate: Option<f64>,
    /// Largest residual after each sweep; entry 0 describes the input.
    pub trace: Vec<f64>,
    pub reason: Option<String>,
}

fn to_real(m: &ComplexMatrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| z.re).collect())
        .collect()
}

fn worst(r: &GeometricityReport) -> f64 {
    r.projection_residuals
        .iter()
        .copied()
        .fold(r.isotropy_residual, f64::max)
}

/// Alternates the isotropy step `A ← A (Σ p_i B'_iᵀB'_i)^{-1/2}` with
/// projection steps `C_i ← (B'_i B'_iᵀ)^{-1/2} C_i` (ascending `i`) until
/// every residual is at most `ε`.
///
/// Maps with `p_i = 0` are dropped. A dimension mismatch or a singular
/// normalizer yields `Infeasible`.
pub fn bl_scale(datum: &BLDatum, opts: &ScalingOptions) -> Result<BLScaling> {
    opts.validate()?;
    let eps = opts.epsilon;
    let n = datum.n;
    let (active, keep) = datum.positive_part();
    let p = active.p_f64();
    let budget = opts
        .budget_override
        .unwrap_or_else(|| operator_budget(n, datum.bit_complexity(), eps, opts.budget_constant));

    let mut a = ComplexMatrix::identity(n);
    let mut c: Vec<ComplexMatrix> = datum
        .dims()
        .iter()
        .map(|&k| ComplexMatrix::identity(k))
        .collect();
    let mut maps = active.matrices();
    let mut report = geometricity(&maps, &p, n, eps);
    let mut out = BLScaling {
        status: BLStatus::Converged,
        a: Vec::new(),
        c: Vec::new(),
        iterations: 0,
        budget,
        trace: vec![worst(&report)],
        residuals: report.clone(),
        constant_estimate: None,
        reason: None,
    };
    let finish =
        |mut out: BLScaling, a: &ComplexMatrix, c: &[ComplexMatrix], report: GeometricityReport| {
            out.a = to_real(a);
            out.c = c.iter().map(to_real).collect();
            out.residuals = report;
            if out.status != BLStatus::Infeasible {
                let log: f64 = a.log_abs_det()
                    + keep
                        .iter()
                        .zip(&p)
                        .map(|(&i, pi)| pi * c[i].log_abs_det())
                        .sum::<f64>();
                out.constant_estimate = log.is_finite().then(|| log.exp());
            }
            out
        };

    if active.weighted_dimension() != Rational::from_integer(n.into())
        || active.p.iter().all(Zero::is_zero)
    {
        out.status = BLStatus::Infeasible;
        out.reason = Some(format!(
            "Σ p_i n_i = {} differs from n = {n}",
            datum.weighted_dimension()
        ));
        return Ok(finish(out, &a, &c, report));
    }

    while !report.geometric {
        if out.iterations as u64 >= budget {
            out.status = BLStatus::BudgetExhausted;
            return Ok(finish(out, &a, &c, report));
        }
        let iso = HermitianPsd::from_trusted(isotropy_matrix(&maps, &p, n));
        let h = match inv_sqrt_psd(&iso, None) {
            Ok(h) => h,
            Err(e) => {
                out.status = BLStatus::Infeasible;
                out.reason = Some(format!("Σ p_i B_iᵀB_i is singular: {e}"));
                return Ok(finish(out, &a, &c, report));
            }
        };
        a = &a * &h;
        maps = maps.iter().map(|b| b * &h).collect();
        for (slot, &orig) in keep.iter().enumerate() {
            let g = HermitianPsd::from_trusted(maps[slot].gram_left());
            let h = match inv_sqrt_psd(&g, None) {
                Ok(h) => h,
                Err(e) => {
                    out.status = BLStatus::Infeasible;
                    out.reason = Some(format!("B_{} B_{}ᵀ is singular: {e}", orig + 1, orig + 1));
                    return Ok(finish(out, &a, &c, report));
                }
            };
            maps[slot] = &h * &maps[slot];
            c[orig] = &h * &c[orig];
        }
        out.iterations += 1;
        report = geometricity(&maps, &p, n, eps);
        out.trace.push(worst(&report));
    }
    Ok(finish(out, &a, &c, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    fn apply(datum: &BLDatum, s: &BLScaling, i: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_real_rows(&s.a).unwrap();
        let c = ComplexMatrix::from_real_rows(&s.c[i]).unwrap();
        &(&c * &ComplexMatrix::from_real_rows(&datum.maps[i]).unwrap()) * &a
    }

    #[test]
    fn geometric_datum_takes_no_steps() {
        let d = BLDatum::new(
            2,
            vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]],
            vec![rat(1), rat(1)],
        )
        .unwrap();
        let s = bl_scale(&d, &ScalingOptions::new(1e-9)).unwrap();
        assert_eq!((s.status, s.iterations), (BLStatus::Converged, 0));
        assert_eq!(s.constant_estimate, Some(1.0));
    }

    #[test]
    fn diagonal_datum_normalizes_in_closed_form() {
        let d = BLDatum::new(
            2,
            vec![vec![vec![2.0, 0.0]], vec![vec![0.0, 3.0]]],
            vec![rat(1), rat(1)],
        )
        .unwrap();
        let s = bl_scale(&d, &ScalingOptions::new(1e-9)).unwrap();
        assert_eq!(s.status, BLStatus::Converged);
        let b1 = apply(&d, &s, 0);
        let b2 = apply(&d, &s, 1);
        assert!((b1[(0, 0)].norm() - 1.0).abs() < 1e-9 && b1[(0, 1)].norm() < 1e-9);
        assert!((b2[(0, 1)].norm() - 1.0).abs() < 1e-9 && b2[(0, 0)].norm() < 1e-9);
        // BL constant of (2x, 3y) with p = (1, 1) is 1/6.
        assert!((s.constant_estimate.unwrap() - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_map_is_infeasible() {
        let d = BLDatum::new(
            2,
            vec![vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]]],
            vec![rat(1), rat(1)],
        )
        .unwrap();
        let s = bl_scale(&d, &ScalingOptions::new(1e-9)).unwrap();
        assert_eq!(s.status, BLStatus::Infeasible);
        assert!(s.reason.unwrap().contains("singular"));
    }

    #[test]
    fn zero_exponent_maps_are_dropped() {
        let d = BLDatum::new(
            2,
            vec![
                vec![vec![1.0, 0.0]],
                vec![vec![0.0, 1.0]],
                vec![vec![1.0, 1.0]],
            ],
            vec![rat(1), rat(1), rat(0)],
        )
        .unwrap();
        let s = bl_scale(&d, &ScalingOptions::new(1e-9)).unwrap();
        assert_eq!(s.status, BLStatus::Converged);
        assert_eq!(s.c[2], vec![vec![1.0]]);
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use scalekit::bl_apps::{forster_scale, matroid_intersection_membership, MatroidPair, Membership};
use scalekit::invariant_core::moment::{
    left_right_moment_map, matrix_moment_map, torus_moment_map,
};
use scalekit::invariant_core::{
    robust_amgm_bound, torus_nullcone, verify_subgroup, verify_torus_witness,
};
use scalekit::invariant_core::{NullConeVerdict, TorusVector, WeightSystem};
use scalekit::matrix_scaling::{
    permanent_approx, sinkhorn, sinkhorn_decides_scalable, NonNegMatrix,
};
use scalekit::numerics::{kron, permanent_exact, ComplexMatrix, TensorTuple};
use scalekit::operator_scaling::{detpoly_oracle, gurvits_scale, MatrixTuple};
use scalekit::tensor_scaling::deficiency_check;
use scalekit::tensor_scaling::tensor_scale;
use scalekit::{Certificate, ScalingOptions, Status};

type Outcome = Result<String, String>;

/// A converged run and the iteration bound recomputed from its theorem formula.
struct Run {
    label: &'static str,
    iterations: u64,
    bound: u64,
}

fn lib<T>(r: scalekit::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn support_3x3(mask: u32) -> Vec<Vec<bool>> {
    (0..3)
        .map(|i| (0..3).map(|j| mask >> (3 * i + j) & 1 == 1).collect())
        .collect()
}

fn criterion_1(runs: &mut Vec<Run>) -> Outcome {
    let mut mismatches = Vec::new();
    let mut scalable = 0;
    for mask in 0u32..512 {
        let support = support_3x3(mask);
        let rows: Vec<Vec<i64>> = support
            .iter()
            .map(|r| r.iter().map(|&s| s as i64).collect())
            .collect();
        let a = lib(NonNegMatrix::from_i64_rows(&rows))?;
        let (decided, report) = lib(sinkhorn_decides_scalable(&a, &ScalingOptions::default()))?;
        if decided != brute_force_perfect_matching(&support) {
            mismatches.push(mask);
        }
        if decided {
            scalable += 1;
            runs.push(Run {
                label: "sinkhorn 3x3 support",
                iterations: report.iterations as u64,
                bound: matrix_theorem_budget(3, 1, 0.25),
            });
        }
    }
    check(mismatches.is_empty(), || {
        format!("disagreement on masks {mismatches:?}")
    })?;
    Ok(format!("512/512 supports agree ({scalable} scalable)"))
}

fn criterion_2(runs: &mut Vec<Run>) -> Outcome {
    let mut r = rng(2);
    let eps = 1e-6;
    let mut max_iter = 0;
    for t in 0..100 {
        let rows: Vec<Vec<BigRational>> = (0..10)
            .map(|_| {
                (0..10)
                    .map(|_| {
                        BigRational::new(
                            r.gen_range(1i64..=65535).into(),
                            r.gen_range(1i64..=65535).into(),
                        )
                    })
                    .collect()
            })
            .collect();
        let b = rows.iter().flatten().map(rat_bits).max().unwrap();
        check(b <= 16, || format!("instance {t}: b = {b}"))?;
        let a = lib(NonNegMatrix::from_rationals(rows))?;
        let rep = lib(sinkhorn(&a, &ScalingOptions::new(eps)))?;
        let bound = matrix_theorem_budget(10, b, eps);
        check(rep.converged() && rep.final_ds <= eps, || {
            format!("instance {t}: status {:?}, ds {}", rep.status, rep.final_ds)
        })?;
        check(rep.iterations as u64 <= bound, || {
            format!("instance {t}: {} > {bound}", rep.iterations)
        })?;
        let pot = rep.potential_trace();
        check(
            rep.potential_available && pot.len() == rep.trace.len(),
            || format!("instance {t}: potential not tracked"),
        )?;
        check(pot.windows(2).all(|w| w[1] > w[0]), || {
            format!("instance {t}: potential not increasing")
        })?;
        max_iter = max_iter.max(rep.iterations);
        runs.push(Run {
            label: "sinkhorn 10x10 random",
            iterations: rep.iterations as u64,
            bound,
        });
    }
    Ok(format!(
        "100/100 converged to ds <= 1e-6, max {max_iter} iterations, potential strictly increasing"
    ))
}

fn criterion_3(runs: &mut Vec<Run>) -> Outcome {
    let mut r = rng(3);
    let eps = 1e-8;
    let mut worst_ratio: f64 = 0.0;
    for t in 0..25 {
        let n = 4 + t % 5;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| r.gen_range(1..=9)).collect())
            .collect();
        let a = lib(NonNegMatrix::from_i64_rows(&rows))?;
        let interval = lib(permanent_approx(&a, &ScalingOptions::new(eps)))?;
        let exact = lib(permanent_exact(&a))?.to_f64().unwrap();
        let naive = naive_permanent(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| x as f64).collect())
                .collect::<Vec<_>>(),
        );
        check((exact - naive).abs() <= 1e-12 * naive, || {
            format!("instance {t}: exact {exact} vs naive {naive}")
        })?;
        check(interval.lo <= exact && exact <= interval.hi, || {
            format!(
                "instance {t}: {exact} outside [{}, {}]",
                interval.lo, interval.hi
            )
        })?;
        let ratio = interval.hi / interval.lo;
        let cap = (n as f64).exp() * 1.01;
        check(ratio <= cap, || {
            format!("instance {t}: hi/lo = {ratio} > {cap}")
        })?;
        worst_ratio = worst_ratio.max(ratio / (n as f64).exp());
        runs.push(Run {
            label: "permanent sinkhorn",
            iterations: interval.iterations as u64,
            bound: matrix_theorem_budget(n, 4, eps),
        });
    }
    Ok(format!(
        "25/25 sandwiched, max (hi/lo)/e^n = {worst_ratio:.4}"
    ))
}

fn tuple_bits(a: &MatrixTuple) -> u64 {
    a.matrices()
        .iter()
        .flat_map(|m| m.as_slice())
        .map(|z| int_bits(z.re as i64))
        .max()
        .unwrap()
}

fn criterion_4(runs: &mut Vec<Run>) -> Outcome {
    let mut r = rng(4);
    let mut cases: Vec<(&'static str, MatrixTuple, bool)> =
        vec![("cross product", cross_product_tuple(), true)];
    for _ in 0..50 {
        cases.push(("random m=3 n=4", random_int_tuple(&mut r, 3, 4, 3), true));
    }
    cases.push(("shrunk 3x3", shrunk_tuple(), false));
    for _ in 0..10 {
        cases.push(("planted shrunk", planted_shrunk_tuple(&mut r, 3, 4), false));
    }
    let mut converged_count = 0;
    for (i, (label, a, expected)) in cases.iter().enumerate() {
        let n = a.n();
        let eps = 1.0 / (n as f64 + 1.0);
        let rep = lib(gurvits_scale(a, &ScalingOptions::new(eps)))?;
        let converged = rep.converged();
        check(converged == *expected, || {
            format!("case {i} ({label}): status {:?}", rep.status)
        })?;
        let oracle = lib(detpoly_oracle(a, n - 1, 50, 4000 + i as u64))?;
        check(oracle.is_nonzero() == converged, || {
            format!("case {i} ({label}): scaling {converged}, detpoly {oracle:?}")
        })?;
        if converged {
            converged_count += 1;
            runs.push(Run {
                label: "gurvits decision",
                iterations: rep.iterations as u64,
                bound: matrix_theorem_budget(n, tuple_bits(a), eps),
            });
        }
    }
    Ok(format!(
        "61/61 verdicts as expected and matching detpoly ({converged_count} converged)"
    ))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.gen_range(1..=4);
        let k = r.gen_range(1..=3);
        let m = r.gen_range(1..=3);
        let a: Vec<ComplexMatrix> = (0..m).map(|_| complex_matrix(&mut r, n, n)).collect();
        let d: Vec<ComplexMatrix> = (0..m).map(|_| complex_matrix(&mut r, k, k)).collect();
        let b = complex_matrix(&mut r, n, n);
        let c = complex_matrix(&mut r, n, n);
        let block = |mats: &[ComplexMatrix]| {
            d.iter()
                .zip(mats)
                .map(|(di, ai)| kron(di, ai))
                .reduce(|s, t| &s + &t)
                .unwrap()
        };
        let scaled: Vec<ComplexMatrix> = a.iter().map(|ai| &(&b * ai) * &c).collect();
        let lhs = block(&scaled).det();
        let rhs = (b.det() * c.det()).powi(k as i32) * block(&a).det();
        let rel = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    check(worst <= 1e-8, || format!("max relative error {worst:e}"))?;
    Ok(format!(
        "100/100 within 1e-8, max relative error {worst:.2e}"
    ))
}

fn basis_tensor(shape: Vec<usize>, entries: &[usize]) -> TensorTuple {
    let len: usize = shape.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    for &e in entries {
        data[e] = Complex64::new(1.0, 0.0);
    }
    TensorTuple::new(1, shape, data).unwrap()
}

fn criterion_6(runs: &mut Vec<Run>) -> Outcome {
    let ghz = basis_tensor(vec![2, 2, 2], &[0, 7]);
    let rep = lib(tensor_scale(&ghz, &ScalingOptions::new(1e-9)))?;
    check(rep.converged() && rep.final_ds == 0.0, || {
        format!("GHZ: status {:?}, ds {:e}", rep.status, rep.final_ds)
    })?;
    runs.push(Run {
        label: "tensor GHZ",
        iterations: rep.iterations as u64,
        bound: tensor_theorem_budget(1, &[2, 2, 2], 1, 1e-9),
    });

    let product = basis_tensor(vec![2, 2, 2], &[0]);
    let rep = lib(tensor_scale(&product, &ScalingOptions::new(1e-9)))?;
    check(
        rep.status == Status::NotScalable
            && matches!(rep.certificate, Certificate::TrivialCheck { .. }),
        || format!("product: status {:?}", rep.status),
    )?;

    let support = vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]];
    let verdict = lib(deficiency_check(&[2, 2, 2], &support))?;
    let cert = verdict
        .certificate()
        .ok_or("W: no deficiency certificate")?;
    let expected = vec![vec![int_rat(1), int_rat(-1)]; 3];
    check(cert.a == expected, || {
        format!("W: certificate {:?}", cert.a)
    })?;
    let sums_zero = cert
        .a
        .iter()
        .all(|row| row.iter().sum::<BigRational>().is_zero());
    let positive = support.iter().all(|s| {
        s.iter()
            .zip(&cert.a)
            .map(|(&j, row)| &row[j])
            .sum::<BigRational>()
            .is_positive()
    });
    check(
        sums_zero && positive && cert.verify(&[2, 2, 2], &support),
        || "W: certificate fails".into(),
    )?;

    let w = basis_tensor(vec![2, 2, 2], &[1, 2, 4]);
    let rep = lib(tensor_scale(
        &w,
        &ScalingOptions::new(1e-6).with_budget(10_000),
    ))?;
    let min_ds = rep.ds_trace().into_iter().fold(f64::INFINITY, f64::min);
    check(rep.iterations == 10_000, || {
        format!(
            "W: stopped after {} iterations ({:?}; {:?})",
            rep.iterations, rep.status, rep.notes
        )
    })?;
    check(min_ds >= 0.01, || format!("W: ds dropped to {min_ds}"))?;
    Ok(format!(
        "GHZ ds = 0 in {} iterations; product NotScalable; W certificate verified, min ds {min_ds:.4} over 10^4 iterations",
        runs.last().unwrap().iterations
    ))
}

fn criterion_7(runs: &mut Vec<Run>) -> Outcome {
    let mut deficient = 0;
    for mask in 0u32..512 {
        let support = support_3x3(mask);
        let tuples: Vec<Vec<usize>> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| support[i][j])
            .map(|(i, j)| vec![i, j])
            .collect();
        let d = lib(deficiency_check(&[3, 3], &tuples))?.is_deficient();
        check(d != brute_force_perfect_matching(&support), || {
            format!("support mask {mask}: deficient {d}")
        })?;
        deficient += d as usize;
    }

    let mut r = rng(7);
    let mut instances = Vec::new();
    for _ in 0..40 {
        let m = r.gen_range(2..=3);
        let n = r.gen_range(2..=4);
        instances.push(random_int_tuple(&mut r, m, n, 2));
    }
    for _ in 0..10 {
        instances.push(planted_shrunk_tuple(&mut r, 3, 4));
    }
    let mut scalable = 0;
    for (i, a) in instances.iter().enumerate() {
        let n = a.n();
        let eps = 1.0 / (n as f64 + 1.0);
        let op = lib(gurvits_scale(a, &ScalingOptions::new(eps)))?;
        let eps_t = eps / (n * n) as f64;
        let t = tuple_to_tensor(a);
        let ten = lib(tensor_scale(&t, &ScalingOptions::new(eps_t)))?;
        check(op.converged() == ten.converged(), || {
            format!(
                "instance {i}: operator {:?}, tensor {:?}",
                op.status, ten.status
            )
        })?;
        if ten.converged() {
            scalable += 1;
            runs.push(Run {
                label: "tensor d=2",
                iterations: ten.iterations as u64,
                bound: tensor_theorem_budget(a.m(), &[n, n], tuple_bits(a), eps_t),
            });
            runs.push(Run {
                label: "gurvits d=2",
                iterations: op.iterations as u64,
                bound: matrix_theorem_budget(n, tuple_bits(a), eps),
            });
        }
    }
    Ok(format!(
        "512/512 supports agree ({deficient} deficient); 50/50 d=2 verdicts agree ({scalable} scalable)"
    ))
}

fn unit_vec(v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn zero_sum<R: Rng>(r: &mut R, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.into_iter().map(|x| x - mean).collect()
}

fn central_difference(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1e-4;
    (f(h) - f(-h)) / (2.0 * h)
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let tol = 1e-5;
    let mut worst = [0.0f64; 3];

    for _ in 0..50 {
        let n = r.gen_range(1..=4);
        let m = r.gen_range(1..=6);
        let omegas: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| r.gen_range(-2..=2)).collect())
            .collect();
        let ws = lib(WeightSystem::new(n, omegas.clone()))?;
        let coeffs: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let scale = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v = TorusVector::new(coeffs.iter().map(|z| z / scale).collect());
        let b = unit_vec((0..n).map(|_| r.gen_range(-1.0..1.0)).collect());
        let mu = torus_moment_map(&ws, &v);
        let exact: f64 = mu.iter().zip(&b).map(|(x, y)| x * y).sum();
        let fd = central_difference(|s| {
            omegas
                .iter()
                .zip(&v.coefficients)
                .map(|(w, z)| {
                    let pair: f64 = w.iter().zip(&b).map(|(&wk, bk)| wk as f64 * bk).sum();
                    z.norm_sqr() * (2.0 * s * pair).exp()
                })
                .sum()
        });
        worst[0] = worst[0].max((fd - exact).abs());
    }

    for _ in 0..50 {
        let n = r.gen_range(2..=5);
        let raw: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| r.gen_range(0.01..1.0)).collect())
            .collect();
        let total: f64 = raw.iter().flatten().sum();
        let a: Vec<Vec<f64>> = raw
            .iter()
            .map(|row| row.iter().map(|x| x / total).collect())
            .collect();
        let dir = unit_vec([zero_sum(&mut r, n), zero_sum(&mut r, n)].concat());
        let (x, y) = dir.split_at(n);
        let (pr, pc) = matrix_moment_map(&a);
        let exact: f64 = pr
            .iter()
            .zip(x)
            .chain(pc.iter().zip(y))
            .map(|(p, d)| p * d)
            .sum();
        let fd = central_difference(|s| {
            a.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, aij)| aij * (2.0 * s * (x[i] + y[j])).exp())
                        .sum::<f64>()
                })
                .sum()
        });
        worst[1] = worst[1].max((fd - exact).abs());
    }

    for _ in 0..50 {
        let n = r.gen_range(2..=4);
        let m = r.gen_range(1..=3);
        let raw: Vec<ComplexMatrix> = (0..m).map(|_| complex_matrix(&mut r, n, n)).collect();
        let norm = raw
            .iter()
            .map(|a| a.frobenius_norm_sq())
            .sum::<f64>()
            .sqrt();
        let mats: Vec<ComplexMatrix> = raw.iter().map(|a| a.scale_real(1.0 / norm)).collect();
        let x = traceless_hermitian(&mut r, n).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let y = traceless_hermitian(&mut r, n).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let (p1, p2) = left_right_moment_map(&mats);
        let exact = (&p1 * &x).trace().re + (&p2 * &y).trace().re;
        let fd = central_difference(|s| {
            let bl = expm_taylor(&x.scale_real(s));
            let br = expm_taylor(&y.scale_real(s)).transpose();
            mats.iter()
                .map(|a| (&(&bl * a) * &br).frobenius_norm_sq())
                .sum()
        });
        worst[2] = worst[2].max((fd - exact).abs());
    }

    check(worst.iter().all(|&w| w <= tol), || {
        format!("max errors torus/matrix/left-right = {worst:?}")
    })?;
    Ok(format!(
        "150/150 within 1e-5 (max error torus {:.1e}, matrix {:.1e}, left-right {:.1e})",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let (mut feasible, mut infeasible) = (0, 0);
    for t in 0..500 {
        let n = r.gen_range(1..=4);
        let m = r.gen_range(1..=6);
        let omegas: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| r.gen_range(-3..=3)).collect())
            .collect();
        let ws = lib(WeightSystem::new(n, omegas.clone()))?;
        let v = TorusVector::full(m);
        let origin_inside = origin_in_convex_hull(&omegas, n);
        match lib(torus_nullcone(&ws, &v))? {
            NullConeVerdict::InNullCone { subgroup, .. } => {
                let a = subgroup.flat();
                let strict = omegas
                    .iter()
                    .all(|w| w.iter().zip(&a).map(|(x, y)| x * y).sum::<i64>() > 0);
                check(strict && verify_subgroup(&ws, &v, &subgroup), || {
                    format!("system {t}: bad LP certificate")
                })?;
                check(!origin_inside, || {
                    format!("system {t}: certificate and convex witness both exist")
                })?;
                feasible += 1;
            }
            NullConeVerdict::NotInNullCone { witness } => {
                let nonneg = witness.lambda.iter().all(|l| !l.is_negative());
                let sums_to_one = witness.lambda.iter().sum::<BigRational>().is_one();
                let balanced = (0..n).all(|k| {
                    witness
                        .lambda
                        .iter()
                        .zip(&omegas)
                        .map(|(l, w)| l * int_rat(w[k]))
                        .sum::<BigRational>()
                        .is_zero()
                });
                check(
                    nonneg && sums_to_one && balanced && verify_torus_witness(&ws, &v, &witness),
                    || format!("system {t}: bad convex witness"),
                )?;
                check(origin_inside, || {
                    format!("system {t}: witness returned but the oracle finds none")
                })?;
                infeasible += 1;
            }
        }
    }
    Ok(format!("500/500 exclusive and verified ({feasible} strict certificates, {infeasible} convex witnesses)"))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let mut tightest = f64::INFINITY;
    let mut done = 0;
    while done < 1000 {
        let n = r.gen_range(1..=8);
        let u = zero_sum(&mut r, n);
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let radius = r.gen_range(0.0f64..1.0).sqrt();
        let x: Vec<f64> = if norm < 1e-12 {
            vec![1.0; n]
        } else {
            u.iter().map(|ui| 1.0 + radius * ui / norm).collect()
        };
        if x.iter().any(|&xi| xi <= 0.0) {
            continue;
        }
        let delta: f64 = x.iter().map(|xi| (xi - 1.0) * (xi - 1.0)).sum();
        let prod = lib(robust_amgm_bound(&x, delta))?;
        let direct: f64 = x.iter().product();
        check((prod - direct).abs() <= 1e-14 * direct, || {
            format!("sample {done}: product mismatch")
        })?;
        let bound = (-delta / 6.0).exp();
        check(prod <= bound * (1.0 + 1e-12), || {
            format!("sample {done}: {prod} > exp(-{delta}/6) = {bound}")
        })?;
        tightest = tightest.min(bound - prod);
        done += 1;
    }
    let ones = lib(robust_amgm_bound(&[1.0; 5], 0.0))?;
    check(ones == 1.0 && (-0.0f64 / 6.0).exp() == 1.0, || {
        format!("x = 1: product {ones}")
    })?;
    Ok(format!(
        "1000/1000 satisfy the bound (min slack {tightest:.2e}); x = 1 gives 1 = 1"
    ))
}

fn forster_residual(vectors: &[Vec<f64>], a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let m = vectors.len() as f64;
    let mut s = vec![vec![0.0; n]; n];
    for v in vectors {
        let av: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
            .collect();
        let norm: f64 = av.iter().map(|x| x * x).sum();
        for i in 0..n {
            for j in 0..n {
                s[i][j] += n as f64 / m * av[i] * av[j] / norm;
            }
        }
    }
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (s[i][j] - if i == j { 1.0 } else { 0.0 }).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn matroid_instances() -> Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let e = |n: usize, i: usize| -> Vec<f64> { (0..n).map(|k| (k == i) as i64 as f64).collect() };
    let mut r = rng(1111);
    let mut random = |m: usize, n: usize, b: i64| -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| (0..n).map(|_| r.gen_range(-b..=b) as f64).collect())
            .collect()
    };
    let (v4, w4) = (random(4, 2, 2), random(4, 2, 2));
    let (v5, w5) = (random(5, 3, 1), random(5, 3, 1));
    vec![
        (vec![e(2, 0), e(2, 1)], vec![e(2, 0), e(2, 1)]),
        (
            vec![e(2, 0), e(2, 0), e(2, 1)],
            vec![e(2, 0), e(2, 1), e(2, 1)],
        ),
        (
            vec![e(2, 0), vec![0.0, 0.0], e(2, 1)],
            vec![e(2, 0), e(2, 1), vec![1.0, 1.0]],
        ),
        (v4, w4),
        (v5, w5),
    ]
}

fn criterion_11(runs: &mut Vec<Run>) -> Outcome {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let config = vec![vec![1.0, 0.0], vec![s, s], vec![0.0, 1.0], vec![-s, s]];
    let f = lib(forster_scale(&config, &ScalingOptions::new(1e-9)))?;
    let identity = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    check(f.converged && f.residual <= 1e-9 && f.a == identity, || {
        format!(
            "45-degree configuration: residual {}, A = {:?}",
            f.residual, f.a
        )
    })?;
    check(forster_residual(&config, &identity) <= 1e-9, || {
        "45-degree configuration is not isotropic".into()
    })?;

    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let vectors = loop {
            let vs: Vec<Vec<f64>> = (0..5)
                .map(|_| vec![r.gen_range(-9..=9) as f64, r.gen_range(-9..=9) as f64])
                .collect();
            let independent = (0..5)
                .all(|i| (i + 1..5).all(|j| vs[i][0] * vs[j][1] - vs[i][1] * vs[j][0] != 0.0));
            if independent {
                break vs;
            }
        };
        let b = vectors
            .iter()
            .flatten()
            .map(|&x| int_bits(x as i64))
            .max()
            .unwrap();
        let f = lib(forster_scale(&vectors, &ScalingOptions::new(1e-6)))?;
        let resid = forster_residual(&vectors, &f.a);
        check(f.converged && resid <= 1e-6, || {
            format!("instance {t}: residual {resid}")
        })?;
        worst = worst.max(resid);
        runs.push(Run {
            label: "forster",
            iterations: f.iterations as u64,
            bound: matrix_theorem_budget(2, b, 1e-6),
        });
    }

    // Boundary vertices converge like 1/t, so a moderate tolerance keeps this fast.
    let opts = ScalingOptions::new(1e-4);
    let mut vertices = 0;
    for (k, (v, w)) in matroid_instances().into_iter().enumerate() {
        let m = v.len();
        let n = v[0].len();
        let hull = common_independent_sets(&v, &w);
        let entry_bits = v
            .iter()
            .chain(&w)
            .flatten()
            .map(|&x| int_bits(x as i64))
            .max()
            .unwrap();
        let pair = lib(MatroidPair::new(v, w))?;
        for mask in 0u32..1 << m {
            let x: Vec<BigRational> = (0..m).map(|i| int_rat((mask >> i & 1) as i64)).collect();
            let expected = in_hull(&hull, &x);
            let got = lib(matroid_intersection_membership(&pair, &x, &opts))?;
            let agrees = match got.verdict {
                Membership::InPolytope => expected,
                Membership::OutOfPolytope => !expected,
                Membership::Undetermined => false,
            };
            check(agrees, || {
                format!(
                    "matroid {k}, x = {x:?}: {:?} ({}), hull says {expected}",
                    got.verdict, got.reason
                )
            })?;
            if let Some(sc) = got
                .scaling
                .filter(|_| got.verdict == Membership::InPolytope)
            {
                let total = mask.count_ones() as i64;
                let pad = BigRational::new((n as i64 - total).into(), (n as i64).into());
                let b = entry_bits.max(rat_bits(&pad));
                runs.push(Run {
                    label: "matroid bl_scale",
                    iterations: sc.iterations as u64,
                    bound: matrix_theorem_budget(2 * n, b, opts.epsilon),
                });
            }
            vertices += 1;
        }
    }
    Ok(format!(
        "45-degree fixed point accepted; 20/20 Forster runs (max residual {worst:.1e}); {vertices}/{vertices} matroid vertices agree"
    ))
}

fn criterion_12(runs: &[Run]) -> Outcome {
    let over: Vec<String> = runs
        .iter()
        .filter(|r| r.iterations > r.bound)
        .map(|r| format!("{}: {} > {}", r.label, r.iterations, r.bound))
        .collect();
    check(over.is_empty(), || over.join("; "))?;
    let tightest = runs
        .iter()
        .map(|r| r.iterations as f64 / r.bound as f64)
        .fold(0.0f64, f64::max);
    Ok(format!(
        "{} converged runs within their bounds (max iterations/bound {tightest:.2e})",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let mut runs = Vec::new();
    let mut failures = 0;
    let mut report = |id: usize,
                      name: &str,
                      limit: Option<f64>,
                      outcome: &mut dyn FnMut(&mut Vec<Run>) -> Outcome| {
        let start = Instant::now();
        let mut result = outcome(&mut runs);
        let secs = start.elapsed().as_secs_f64();
        if let (Ok(_), Some(max)) = (&result, limit) {
            if secs > max {
                result = Err(format!("runtime {secs:.1}s exceeds {max}s"));
            }
        }
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        if result.is_err() {
            failures += 1;
        }
        println!("[{tag}] {id:>2} {name}: {detail} ({secs:.2}s)");
    };
    report(
        1,
        "matrix decision exhaustiveness",
        Some(10.0),
        &mut criterion_1,
    );
    report(2, "sinkhorn convergence", None, &mut criterion_2);
    report(3, "permanent sandwich", Some(60.0), &mut criterion_3);
    report(4, "operator decisions", None, &mut criterion_4);
    report(5, "invariance identity", None, &mut |_| criterion_5());
    report(6, "tensor fixtures", Some(10.0), &mut criterion_6);
    report(7, "d = 2 consistency", None, &mut criterion_7);
    report(8, "moment-map gradients", None, &mut |_| criterion_8());
    report(9, "Farkas exclusivity", None, &mut |_| criterion_9());
    report(10, "robust AM-GM", None, &mut |_| criterion_10());
    report(11, "BL and Forster", None, &mut criterion_11);
    report(12, "iteration-bound consistency", None, &mut |runs| {
        criterion_12(runs)
    });
    println!("{} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

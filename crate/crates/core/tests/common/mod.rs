//! Instance generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scalekit::numerics::{find_feasible_point, ComplexMatrix};
use scalekit::operator_scaling::MatrixTuple;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn int_matrix<R: Rng>(rng: &mut R, n: usize, bound: i64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-bound..=bound) as f64))
}

pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

/// `(E_11, E_12, E_23)`: maps span{e1, e2} into span{e1}.
pub fn shrunk_tuple() -> MatrixTuple {
    MatrixTuple::new(vec![unit(3, 0, 0), unit(3, 0, 1), unit(3, 1, 2)]).unwrap()
}

/// Cross-product tuple `A_i v = e_i × v`.
pub fn cross_product_tuple() -> MatrixTuple {
    MatrixTuple::from_real(&[
        vec![
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, -1.0],
            vec![0.0, 1.0, 0.0],
        ],
        vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ],
        vec![
            vec![0.0, -1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ],
    ])
    .unwrap()
}

pub fn random_int_tuple<R: Rng>(rng: &mut R, m: usize, n: usize, bound: i64) -> MatrixTuple {
    MatrixTuple::new((0..m).map(|_| int_matrix(rng, n, bound)).collect()).unwrap()
}

fn invertible_int<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let p = int_matrix(rng, n, 3);
        if p.det().norm() >= 1.0 {
            return p;
        }
    }
}

/// `P Ã_i Q` where every `Ã_i` maps the first `n − 1` coordinates into the first `n − 2`.
pub fn planted_shrunk_tuple<R: Rng>(rng: &mut R, m: usize, n: usize) -> MatrixTuple {
    let p = invertible_int(rng, n);
    let q = invertible_int(rng, n);
    let mats = (0..m)
        .map(|_| {
            let mut a = int_matrix(rng, n, 4);
            for i in n - 2..n {
                for j in 0..n - 1 {
                    a[(i, j)] = c(0.0);
                }
            }
            &(&p * &a) * &q
        })
        .collect();
    MatrixTuple::new(mats).unwrap()
}

pub fn tuple_to_tensor(a: &MatrixTuple) -> scalekit::numerics::TensorTuple {
    let n = a.n();
    let data = a
        .matrices()
        .iter()
        .flat_map(|m| m.as_slice().to_vec())
        .collect();
    scalekit::numerics::TensorTuple::new(a.m(), vec![n, n], data).unwrap()
}

/// Perfect matching by trying every permutation.
pub fn brute_force_perfect_matching(support: &[Vec<bool>]) -> bool {
    let n = support.len();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(k: usize, perm: &mut Vec<usize>, s: &[Vec<bool>]) -> bool {
        if k == perm.len() {
            return true;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if s[k][perm[k]] && rec(k + 1, perm, s) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    rec(0, &mut perm, support)
}

/// Permanent by summing over all permutations.
pub fn naive_permanent(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    fn rec(k: usize, perm: &mut Vec<usize>, a: &[Vec<f64>], prod: f64, total: &mut f64) {
        if k == perm.len() {
            *total += prod;
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(k + 1, perm, a, prod * a[k][perm[k]], total);
            perm.swap(k, i);
        }
    }
    rec(0, &mut perm, a, 1.0, &mut total);
    total
}

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Exact rank over the rationals of the given vectors.
pub fn exact_rank(vectors: &[Vec<f64>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| rational(x)).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &rows[rank][col];
                for k in col..cols {
                    let v = &f * &rows[rank][k];
                    rows[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Indicator vectors of the sets independent in both linear matroids.
pub fn common_independent_sets(v: &[Vec<f64>], w: &[Vec<f64>]) -> Vec<Vec<bool>> {
    let m = v.len();
    (0u32..1 << m)
        .map(|mask| (0..m).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|set| {
            let pick = |vs: &[Vec<f64>]| -> Vec<Vec<f64>> {
                vs.iter()
                    .zip(set)
                    .filter(|(_, &s)| s)
                    .map(|(x, _)| x.clone())
                    .collect()
            };
            let k = set.iter().filter(|&&s| s).count();
            exact_rank(&pick(v)) == k && exact_rank(&pick(w)) == k
        })
        .collect()
}

/// Exact membership of `x` in the convex hull of the given 0/1 points.
pub fn in_hull(points: &[Vec<bool>], x: &[BigRational]) -> bool {
    let k = points.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, xi) in x.iter().enumerate() {
        a.push(
            points
                .iter()
                .map(|p| {
                    if p[i] {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect(),
        );
        b.push(xi.clone());
    }
    a.push(vec![BigRational::one(); k]);
    b.push(BigRational::one());
    find_feasible_point(&a, &b, k).is_some()
}

pub fn int_rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `ceil(C · n (b + ln n) / ε)`.
pub fn matrix_theorem_budget(n: usize, b: u64, eps: f64) -> u64 {
    let n = n as f64;
    (10.0 * n * (b as f64 + n.ln()) / eps).ceil() as u64
}

/// `ceil(C · d (b + ln(m ∏ n_i)) / (min n_i · ε))`.
pub fn tensor_theorem_budget(m: usize, shape: &[usize], b: u64, eps: f64) -> u64 {
    let d = shape.len() as f64;
    let ell = *shape.iter().min().unwrap() as f64;
    let size = m as f64 * shape.iter().product::<usize>() as f64;
    (10.0 * d * (b as f64 + size.ln()) / (ell * eps)).ceil() as u64
}

/// Whether `0 = Σ λ_j ω_j` for some probability vector `λ`.
pub fn origin_in_convex_hull(omegas: &[Vec<i64>], n: usize) -> bool {
    let m = omegas.len();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|k| omegas.iter().map(|w| int_rat(w[k])).collect())
        .collect();
    let mut b = vec![BigRational::zero(); n];
    a.push(vec![BigRational::one(); m]);
    b.push(BigRational::one());
    find_feasible_point(&a, &b, m).is_some()
}

/// Bit length of an integer, at least 1.
pub fn int_bits(x: i64) -> u64 {
    u64::from(64 - x.unsigned_abs().leading_zeros()).max(1)
}

/// Bit length of a rational: the larger of numerator and denominator.
pub fn rat_bits(r: &BigRational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

/// `exp(X)` by a truncated Taylor series; accurate for `‖X‖ ≲ 1`.
pub fn expm_taylor(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    let mut term = ComplexMatrix::identity(n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = (&term * x).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    sum
}

/// Random traceless Hermitian matrix with unit Frobenius norm.
pub fn traceless_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n);
    let h = (&g + &g.adjoint()).scale_real(0.5);
    let shift = ComplexMatrix::identity(n).scale_real(h.trace().re / n as f64);
    let h = &h - &shift;
    let norm = h.frobenius_norm();
    if norm == 0.0 {
        h
    } else {
        h.scale_real(1.0 / norm)
    }
}

//! Null cone of torus actions: exact Hilbert-Mumford certificates and their Farkas duals.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::rational::{primitive_integer_vector, ser, Rational};
use crate::numerics::{lp_strict_feasible, LpCertificate, StrictFeasibility, StrictSystem};

/// Largest torus dimension accepted by [`torus_nullcone`].
pub const MAX_TORUS_DIM: usize = 64;
/// Largest weight count accepted by [`torus_nullcone`].
pub const MAX_WEIGHTS: usize = 4096;

/// A block of consecutive torus coordinates; `zero_sum` restricts it to determinant one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusFactor {
    pub offset: usize,
    pub len: usize,
    pub zero_sum: bool,
}

/// Weights `ω^(1), …, ω^(m) ∈ ℤⁿ` of a diagonal torus action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightSystem {
    pub n: usize,
    pub omegas: Vec<Vec<i64>>,
    pub factors: Vec<TorusFactor>,
}

impl WeightSystem {
    /// A single unrestricted factor `(ℂ*)ⁿ`.
    pub fn new(n: usize, omegas: Vec<Vec<i64>>) -> Result<Self> {
        Self::with_factors(
            n,
            omegas,
            vec![TorusFactor {
                offset: 0,
                len: n,
                zero_sum: false,
            }],
        )
    }

    pub fn with_factors(
        n: usize,
        omegas: Vec<Vec<i64>>,
        factors: Vec<TorusFactor>,
    ) -> Result<Self> {
        if let Some(bad) = omegas.iter().find(|w| w.len() != n) {
            return Err(Error::Shape(format!(
                "weight of length {} in a rank-{n} torus",
                bad.len()
            )));
        }
        let mut next = 0;
        for f in &factors {
            if f.offset != next {
                return Err(Error::Shape(
                    "torus factors must tile the coordinates in order".into(),
                ));
            }
            next += f.len;
        }
        if next != n {
            return Err(Error::Shape(format!(
                "torus factors cover {next} of {n} coordinates"
            )));
        }
        Ok(Self { n, omegas, factors })
    }

    /// Weights `e_{j_1} ⊕ … ⊕ e_{j_d}` of the determinant-one diagonal torus
    /// acting on tensors of the given shape, one per support tuple.
    pub fn tensor_support(shape: &[usize], support: &[Vec<usize>]) -> Result<Self> {
        let n: usize = shape.iter().sum();
        let mut factors = Vec::with_capacity(shape.len());
        let mut offset = 0;
        for &len in shape {
            factors.push(TorusFactor {
                offset,
                len,
                zero_sum: true,
            });
            offset += len;
        }
        let mut omegas = Vec::with_capacity(support.len());
        for s in support {
            if s.len() != shape.len() || s.iter().zip(shape).any(|(&j, &nj)| j >= nj) {
                return Err(Error::Shape(format!(
                    "support tuple {s:?} outside shape {shape:?}"
                )));
            }
            let mut w = vec![0i64; n];
            for (f, &j) in factors.iter().zip(s) {
                w[f.offset + j] = 1;
            }
            omegas.push(w);
        }
        Self::with_factors(n, omegas, factors)
    }

    /// Weights `e_i ⊕ e_j` for the left-right diagonal action on an `r × c` support.
    pub fn matrix_support(rows: usize, cols: usize, support: &[(usize, usize)]) -> Result<Self> {
        let tuples: Vec<Vec<usize>> = support.iter().map(|&(i, j)| vec![i, j]).collect();
        Self::tensor_support(&[rows, cols], &tuples)
    }

    pub fn m(&self) -> usize {
        self.omegas.len()
    }

    fn equality_rows(&self) -> Vec<Vec<Rational>> {
        self.factors
            .iter()
            .filter(|f| f.zero_sum)
            .map(|f| {
                (0..self.n)
                    .map(|k| {
                        if k >= f.offset && k < f.offset + f.len {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Vector `v = Σ v_j e_j` in the weight basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusVector {
    pub coefficients: Vec<Complex64>,
}

impl TorusVector {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }

    /// All coefficients equal to one.
    pub fn full(m: usize) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0); m])
    }

    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Integer one-parameter subgroup `t ↦ diag(t^{a_1}, …, t^{a_n})`, split by factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneParamSubgroup {
    pub exponents: Vec<Vec<i64>>,
    pub zero_sum: Vec<bool>,
}

impl OneParamSubgroup {
    pub fn flat(&self) -> Vec<i64> {
        self.exponents.iter().flatten().copied().collect()
    }

    /// `⟨a, ω⟩`.
    pub fn pairing(&self, omega: &[i64]) -> i64 {
        self.flat().iter().zip(omega).map(|(a, w)| a * w).sum()
    }

    /// `‖λ(t)·v‖² = Σ |v_j|² t^{2⟨a, ω_j⟩}`.
    pub fn norm_sq_along(&self, ws: &WeightSystem, v: &TorusVector, t: f64) -> f64 {
        ws.omegas
            .iter()
            .zip(&v.coefficients)
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .map(|(w, z)| z.norm_sqr() * t.powf(2.0 * self.pairing(w) as f64))
            .sum()
    }
}

/// Convex combination of the supported weights lying in the span of the
/// zero-sum factor indicators: `Σ λ_j ω_j + Σ_f z_f 1_f = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusWitness {
    #[serde(serialize_with = "ser::vec")]
    pub lambda: Vec<Rational>,
    #[serde(serialize_with = "ser::vec")]
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NullConeVerdict {
    InNullCone {
        subgroup: OneParamSubgroup,
        certificate: LpCertificate,
    },
    NotInNullCone {
        witness: TorusWitness,
    },
}

impl NullConeVerdict {
    pub fn in_null_cone(&self) -> bool {
        matches!(self, NullConeVerdict::InNullCone { .. })
    }
}

/// Decides whether `v` lies in the null cone of the torus action.
///
/// `v` is in the null cone iff some `a` (zero-sum on flagged factors) has
/// `⟨a, ω_j⟩ > 0` on the whole support; otherwise the origin is a convex
/// combination of the supported weights modulo the factor indicators.
pub fn torus_nullcone(ws: &WeightSystem, v: &TorusVector) -> Result<NullConeVerdict> {
    if v.coefficients.len() != ws.m() {
        return Err(Error::Shape(format!(
            "vector has {} coefficients for {} weights",
            v.coefficients.len(),
            ws.m()
        )));
    }
    if ws.n > MAX_TORUS_DIM || ws.m() > MAX_WEIGHTS {
        return Err(Error::SizeLimit(format!(
            "torus rank {} with {} weights exceeds {MAX_TORUS_DIM}/{MAX_WEIGHTS}",
            ws.n,
            ws.m()
        )));
    }
    let support = v.support();
    let strict: Vec<Vec<Rational>> = support
        .iter()
        .map(|&j| {
            ws.omegas[j]
                .iter()
                .map(|&w| Rational::from_integer(w.into()))
                .collect()
        })
        .collect();
    let system = StrictSystem::new(ws.n, strict, ws.equality_rows())?;
    match lp_strict_feasible(&system)? {
        StrictFeasibility::Feasible(cert) => {
            let ints = primitive_integer_vector(&cert.variables);
            let flat: Vec<i64> = ints
                .iter()
                .map(|x| {
                    x.to_i64()
                        .ok_or_else(|| Error::Internal("exponent overflow".into()))
                })
                .collect::<Result<_>>()?;
            let subgroup = OneParamSubgroup {
                exponents: ws
                    .factors
                    .iter()
                    .map(|f| flat[f.offset..f.offset + f.len].to_vec())
                    .collect(),
                zero_sum: ws.factors.iter().map(|f| f.zero_sum).collect(),
            };
            Ok(NullConeVerdict::InNullCone {
                subgroup,
                certificate: cert,
            })
        }
        StrictFeasibility::Infeasible(w) => {
            let mut lambda = vec![Rational::zero(); ws.m()];
            for (&j, wj) in support.iter().zip(w.weights) {
                lambda[j] = wj;
            }
            Ok(NullConeVerdict::NotInNullCone {
                witness: TorusWitness {
                    lambda,
                    multipliers: w.multipliers,
                },
            })
        }
    }
}

/// Exact check of an in-null-cone certificate.
pub fn verify_subgroup(ws: &WeightSystem, v: &TorusVector, g: &OneParamSubgroup) -> bool {
    if g.exponents.len() != ws.factors.len() {
        return false;
    }
    for (f, (exps, &zs)) in ws.factors.iter().zip(g.exponents.iter().zip(&g.zero_sum)) {
        if exps.len() != f.len || zs != f.zero_sum {
            return false;
        }
        if f.zero_sum && exps.iter().sum::<i64>() != 0 {
            return false;
        }
    }
    v.support().iter().all(|&j| g.pairing(&ws.omegas[j]) > 0)
}

/// Exact check of a not-in-null-cone witness.
pub fn verify_torus_witness(ws: &WeightSystem, v: &TorusVector, w: &TorusWitness) -> bool {
    if w.lambda.len() != ws.m() {
        return false;
    }
    let zero_sum: Vec<&TorusFactor> = ws.factors.iter().filter(|f| f.zero_sum).collect();
    if w.multipliers.len() != zero_sum.len() {
        return false;
    }
    let support = v.support();
    let mut total = Rational::zero();
    for (j, l) in w.lambda.iter().enumerate() {
        if l.is_negative() || (!l.is_zero() && !support.contains(&j)) {
            return false;
        }
        total += l;
    }
    if total != Rational::one() {
        return false;
    }
    (0..ws.n).all(|k| {
        let mut s: Rational = ws
            .omegas
            .iter()
            .zip(&w.lambda)
            .fold(Rational::zero(), |acc, (om, l)| {
                acc + l * Rational::from_integer(BigInt::from(om[k]))
            });
        for (f, z) in zero_sum.iter().zip(&w.multipliers) {
            if k >= f.offset && k < f.offset + f.len {
                s += z;
            }
        }
        s.is_zero()
    })
}

//! Exact-rational simplex and the strict-feasibility engine built on it.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{ser, Rational};
use crate::error::{Error, Result};

/// Largest variable count accepted by [`lp_strict_feasible`].
pub const MAX_LP_VARIABLES: usize = 64;
/// Largest constraint count accepted by [`lp_strict_feasible`].
pub const MAX_LP_CONSTRAINTS: usize = 4096;

/// Result of `maximize cᵀx subject to Ax = b, x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, col: usize, obj: &mut [Rational]) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !obj[col].is_zero() {
            let f = obj[col].clone();
            for (v, pv) in obj.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Reduced-cost row `c_B B⁻¹A − c` with the objective value in the last slot.
    fn objective_row(&self, c: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = (0..=self.ncols)
            .map(|j| {
                if j < self.ncols {
                    -c[j].clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                if !v.is_zero() {
                    *o += &c[b] * v;
                }
            }
        }
        obj
    }

    /// Primal simplex with Bland's rule; `false` means unbounded.
    fn optimize(&mut self, c: &[Rational]) -> (bool, Vec<Rational>) {
        let mut obj = self.objective_row(c);
        loop {
            let Some(col) = (0..self.ncols).find(|&j| obj[j].is_negative()) else {
                return (true, obj);
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col, &mut obj),
                None => return (false, obj),
            }
        }
    }
}

/// Two-phase exact simplex for `maximize cᵀx subject to Ax = b, x ≥ 0`.
pub fn solve_standard_form(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "rhs length mismatch");
    assert!(a.iter().all(|r| r.len() == n), "constraint width mismatch");

    // Phase 1: artificial variable per row after flipping rows to b ≥ 0.
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|k| {
            if k == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        r.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(r);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols,
    };
    let phase1_cost: Vec<Rational> = (0..ncols)
        .map(|j| {
            if j >= n {
                -Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let (_, obj) = tab.optimize(&phase1_cost);
    if obj[ncols].is_negative() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                let mut dummy = vec![Rational::zero(); ncols + 1];
                tab.pivot(i, col, &mut dummy);
            } else {
                tab.rows.remove(i);
                tab.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    for row in tab.rows.iter_mut() {
        let rhs = row[ncols].clone();
        row.truncate(n);
        row.push(rhs);
    }
    tab.ncols = n;

    let (bounded, obj) = tab.optimize(c);
    if !bounded {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        x[bcol] = tab.rhs(i).clone();
    }
    LpOutcome::Optimal {
        x,
        value: obj[n].clone(),
    }
}

/// Returns a point of `{x ≥ 0 : Ax = b}` if one exists.
pub fn find_feasible_point(
    a: &[Vec<Rational>],
    b: &[Rational],
    num_vars: usize,
) -> Option<Vec<Rational>> {
    match solve_standard_form(a, b, &vec![Rational::zero(); num_vars]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Homogeneous system `⟨l_j, x⟩ > 0` for every strict row, `⟨e_k, x⟩ = 0` for every equality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictSystem {
    pub num_vars: usize,
    #[serde(serialize_with = "ser::vec_vec")]
    pub strict: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser::vec_vec")]
    pub equalities: Vec<Vec<Rational>>,
}

/// Solution `x ∈ [−1, 1]ⁿ` of a strict system with `min_j ⟨l_j, x⟩ ≥ margin > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpCertificate {
    #[serde(serialize_with = "ser::vec")]
    pub variables: Vec<Rational>,
    #[serde(serialize_with = "ser::one")]
    pub margin: Rational,
}

/// Alternative-system witness: `y ≥ 0`, `Σy = 1`, `Σ y_j l_j + Σ z_k e_k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexWitness {
    #[serde(serialize_with = "ser::vec")]
    pub weights: Vec<Rational>,
    #[serde(serialize_with = "ser::vec")]
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrictFeasibility {
    Feasible(LpCertificate),
    Infeasible(ConvexWitness),
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

impl StrictSystem {
    pub fn new(
        num_vars: usize,
        strict: Vec<Vec<Rational>>,
        equalities: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if strict
            .iter()
            .chain(&equalities)
            .any(|r| r.len() != num_vars)
        {
            return Err(Error::Shape(format!(
                "every constraint row needs {num_vars} coefficients"
            )));
        }
        Ok(Self {
            num_vars,
            strict,
            equalities,
        })
    }

    /// Exact check of a feasibility certificate.
    pub fn verify_certificate(&self, cert: &LpCertificate) -> bool {
        cert.variables.len() == self.num_vars
            && cert.margin.is_positive()
            && self
                .equalities
                .iter()
                .all(|e| dot(e, &cert.variables).is_zero())
            && self
                .strict
                .iter()
                .all(|l| dot(l, &cert.variables) >= cert.margin)
    }

    /// Exact check of an infeasibility witness.
    pub fn verify_witness(&self, w: &ConvexWitness) -> bool {
        if w.weights.len() != self.strict.len() || w.multipliers.len() != self.equalities.len() {
            return false;
        }
        if w.weights.iter().any(Signed::is_negative) {
            return false;
        }
        if w.weights.iter().fold(Rational::zero(), |a, b| a + b) != Rational::one() {
            return false;
        }
        (0..self.num_vars).all(|k| {
            let s = self
                .strict
                .iter()
                .zip(&w.weights)
                .chain(self.equalities.iter().zip(&w.multipliers))
                .fold(Rational::zero(), |acc, (row, c)| acc + &row[k] * c);
            s.is_zero()
        })
    }
}

/// Decides `Lx > 0, Ex = 0` exactly.
///
/// The feasible branch maximizes `t` subject to `Lx ≥ t·1`, `Ex = 0`,
/// `−1 ≤ x ≤ 1`. When the optimum is `t* = 0`, the alternative system is
/// solved for a convex combination of the strict rows lying in the span of
/// the equality rows.
pub fn lp_strict_feasible(sys: &StrictSystem) -> Result<StrictFeasibility> {
    let n = sys.num_vars;
    let ns = sys.strict.len();
    let ne = sys.equalities.len();
    if n > MAX_LP_VARIABLES {
        return Err(Error::SizeLimit(format!(
            "{n} variables exceed the limit {MAX_LP_VARIABLES}"
        )));
    }
    if ns + ne > MAX_LP_CONSTRAINTS {
        return Err(Error::SizeLimit(format!(
            "{} constraints exceed the limit {MAX_LP_CONSTRAINTS}",
            ns + ne
        )));
    }
    if ns == 0 {
        return Ok(StrictFeasibility::Feasible(LpCertificate {
            variables: vec![Rational::zero(); n],
            margin: Rational::one(),
        }));
    }

    // Columns: u (n) with x = u − 1, s (n) bound slacks, t, w (ns) surplus.
    let ncols = 2 * n + 1 + ns;
    let t_col = 2 * n;
    let mut a = Vec::with_capacity(ns + ne + n);
    let mut b = Vec::with_capacity(ns + ne + n);
    for (j, l) in sys.strict.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        row[..n].clone_from_slice(l);
        row[t_col] = -Rational::one();
        row[t_col + 1 + j] = -Rational::one();
        b.push(l.iter().fold(Rational::zero(), |acc, v| acc + v));
        a.push(row);
    }
    for e in &sys.equalities {
        let mut row = vec![Rational::zero(); ncols];
        row[..n].clone_from_slice(e);
        b.push(e.iter().fold(Rational::zero(), |acc, v| acc + v));
        a.push(row);
    }
    for k in 0..n {
        let mut row = vec![Rational::zero(); ncols];
        row[k] = Rational::one();
        row[n + k] = Rational::one();
        b.push(Rational::from_integer(2.into()));
        a.push(row);
    }
    let mut c = vec![Rational::zero(); ncols];
    c[t_col] = Rational::one();

    match solve_standard_form(&a, &b, &c) {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            let variables = x[..n].iter().map(|u| u - Rational::one()).collect();
            Ok(StrictFeasibility::Feasible(LpCertificate {
                variables,
                margin: value,
            }))
        }
        LpOutcome::Optimal { .. } => alternative_witness(sys).map(StrictFeasibility::Infeasible),
        LpOutcome::Infeasible | LpOutcome::Unbounded => Err(Error::Internal(
            "bounded strict-feasibility LP must have an optimum".into(),
        )),
    }
}

fn alternative_witness(sys: &StrictSystem) -> Result<ConvexWitness> {
    let n = sys.num_vars;
    let ns = sys.strict.len();
    let ne = sys.equalities.len();
    // Columns: y (ns), z⁺ (ne), z⁻ (ne).
    let ncols = ns + 2 * ne;
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut row = vec![Rational::zero(); ncols];
        for (j, l) in sys.strict.iter().enumerate() {
            row[j] = l[k].clone();
        }
        for (e, eq) in sys.equalities.iter().enumerate() {
            row[ns + e] = eq[k].clone();
            row[ns + ne + e] = -eq[k].clone();
        }
        a.push(row);
        b.push(Rational::zero());
    }
    let mut sum_row = vec![Rational::zero(); ncols];
    for v in sum_row.iter_mut().take(ns) {
        *v = Rational::one();
    }
    a.push(sum_row);
    b.push(Rational::one());

    let x = find_feasible_point(&a, &b, ncols).ok_or_else(|| {
        Error::Internal("neither the strict system nor its alternative is feasible".into())
    })?;
    let weights = x[..ns].to_vec();
    let multipliers = (0..ne).map(|e| &x[ns + e] - &x[ns + ne + e]).collect();
    Ok(ConvexWitness {
        weights,
        multipliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{rat, rat_frac};

    fn rows(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn simple_lp() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = rows(&[&[1, 2, 1, 0], &[3, 1, 0, 1]]);
        let b = vec![rat(4), rat(6)];
        let c = vec![rat(1), rat(1), rat(0), rat(0)];
        match solve_standard_form(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, rat_frac(14, 5));
                assert_eq!(x[0], rat_frac(8, 5));
                assert_eq!(x[1], rat_frac(6, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = rows(&[&[1, 1]]);
        assert_eq!(
            solve_standard_form(&a, &[rat(-1)], &[rat(0), rat(0)]),
            LpOutcome::Infeasible
        );
        let a = rows(&[&[1, -1]]);
        assert_eq!(
            solve_standard_form(&a, &[rat(0)], &[rat(1), rat(0)]),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn redundant_rows() {
        let a = rows(&[&[1, 1], &[2, 2]]);
        let b = vec![rat(1), rat(2)];
        match solve_standard_form(&a, &b, &[rat(1), rat(0)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn contradictory_pair() {
        let sys = StrictSystem::new(1, rows(&[&[1], &[-1]]), vec![]).unwrap();
        match lp_strict_feasible(&sys).unwrap() {
            StrictFeasibility::Infeasible(w) => {
                assert!(sys.verify_witness(&w));
                assert_eq!(w.weights, vec![rat_frac(1, 2), rat_frac(1, 2)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_sum_row() {
        let sys = StrictSystem::new(2, rows(&[&[1, 1]]), vec![]).unwrap();
        match lp_strict_feasible(&sys).unwrap() {
            StrictFeasibility::Feasible(c) => {
                assert!(sys.verify_certificate(&c));
                assert_eq!(c.margin, rat(2));
                assert_eq!(c.variables, vec![rat(1), rat(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn farkas_triangle() {
        let sys = StrictSystem::new(2, rows(&[&[2, -1], &[-1, 2], &[-1, -1]]), vec![]).unwrap();
        match lp_strict_feasible(&sys).unwrap() {
            StrictFeasibility::Infeasible(w) => {
                assert!(sys.verify_witness(&w));
                assert_eq!(w.weights, vec![rat_frac(1, 3); 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equalities_block_feasibility() {
        // x1 > 0 with x1 = 0 forced.
        let sys = StrictSystem::new(2, rows(&[&[1, 0]]), rows(&[&[1, 0]])).unwrap();
        match lp_strict_feasible(&sys).unwrap() {
            StrictFeasibility::Infeasible(w) => assert!(sys.verify_witness(&w)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn size_limits() {
        let sys = StrictSystem::new(65, vec![vec![rat(1); 65]], vec![]).unwrap();
        assert!(matches!(lp_strict_feasible(&sys), Err(Error::SizeLimit(_))));
    }
}

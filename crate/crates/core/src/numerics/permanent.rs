//! Exact permanents by Ryser's inclusion-exclusion formula.

use num_traits::Zero;

use super::rational::Rational;
use crate::error::{Error, Result};
use crate::matrix_scaling::NonNegMatrix;

/// Largest dimension accepted by the exact permanent.
pub const MAX_PERMANENT_DIM: usize = 12;

/// Exact permanent of a non-negative matrix.
pub fn permanent_exact(a: &NonNegMatrix) -> Result<Rational> {
    permanent_rational(a.exact_rows())
}

/// Ryser's formula over exact rationals, with Gray-code row-sum updates.
pub fn permanent_rational(rows: &[Vec<Rational>]) -> Result<Rational> {
    let n = rows.len();
    if n > MAX_PERMANENT_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_PERMANENT_DIM,
        });
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("permanent needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(Rational::from_integer(1.into()));
    }
    let mut sums = vec![Rational::zero(); n];
    let mut total = Rational::zero();
    let mut in_set = vec![false; n];
    let mut prev_gray = 0usize;
    for k in 1usize..(1 << n) {
        let gray = k ^ (k >> 1);
        let col = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        let adding = !in_set[col];
        in_set[col] = adding;
        for (s, row) in sums.iter_mut().zip(rows) {
            if adding {
                *s += &row[col];
            } else {
                *s -= &row[col];
            }
        }
        let prod = sums
            .iter()
            .fold(Rational::from_integer(1.into()), |acc, s| acc * s);
        let size = gray.count_ones() as usize;
        if (n - size).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// Ryser's formula in floating point (no size check beyond `usize` width).
pub fn permanent_f64(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for mask in 1usize..(1 << n) {
        let prod: f64 = rows
            .iter()
            .map(|row| {
                (0..n)
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| row[j])
                    .sum::<f64>()
            })
            .product();
        let size = mask.count_ones() as usize;
        if (n - size).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{rat, rat_frac};

    fn naive(rows: &[Vec<Rational>]) -> Rational {
        fn go(rows: &[Vec<Rational>], i: usize, used: &mut Vec<bool>) -> Rational {
            if i == rows.len() {
                return rat(1);
            }
            let mut s = rat(0);
            for j in 0..rows.len() {
                if !used[j] {
                    used[j] = true;
                    s += &rows[i][j] * go(rows, i + 1, used);
                    used[j] = false;
                }
            }
            s
        }
        go(rows, 0, &mut vec![false; rows.len()])
    }

    #[test]
    fn small_examples() {
        let id: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| rat((i == j) as i64)).collect())
            .collect();
        assert_eq!(permanent_rational(&id).unwrap(), rat(1));
        let m = vec![vec![rat(1), rat(2)], vec![rat(3), rat(4)]];
        assert_eq!(permanent_rational(&m).unwrap(), rat(10));
        let ones = vec![vec![rat(1); 4]; 4];
        assert_eq!(permanent_rational(&ones).unwrap(), rat(24));
    }

    #[test]
    fn ryser_matches_naive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=5 {
            for _ in 0..10 {
                let rows: Vec<Vec<Rational>> = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| rat_frac(rng.gen_range(0..20), rng.gen_range(1..7)))
                            .collect()
                    })
                    .collect();
                assert_eq!(permanent_rational(&rows).unwrap(), naive(&rows));
            }
        }
    }

    #[test]
    fn too_large() {
        let rows = vec![vec![rat(1); 13]; 13];
        assert!(matches!(
            permanent_rational(&rows),
            Err(Error::DimensionTooLarge { n: 13, max: 12 })
        ));
    }

    #[test]
    fn float_version() {
        assert!((permanent_f64(&[vec![1.0, 2.0], vec![3.0, 4.0]]) - 10.0).abs() < 1e-12);
    }
}

//! Dense Gaussian elimination over an ordered field.
//!
//! Works for `f32`/`f64` (pivot threshold relative to the row scale) and for
//! exact rationals, where only an exact zero is a negligible pivot.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

/// Ordered field usable by [`solve`].
pub trait LinearField: Clone + PartialOrd + Num + Neg<Output = Self> + Debug {
    fn abs_val(&self) -> Self;
    /// True when `self` should be treated as zero relative to `scale`.
    fn negligible(&self, scale: &Self) -> bool;
}

macro_rules! float_field {
    ($t:ty) => {
        impl LinearField for $t {
            fn abs_val(&self) -> Self {
                self.abs()
            }
            fn negligible(&self, scale: &Self) -> bool {
                self.abs() <= <$t>::EPSILON * 64.0 * scale.abs().max(1.0)
            }
        }
    };
}
float_field!(f32);
float_field!(f64);

impl LinearField for Ratio<i64> {
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn negligible(&self, _scale: &Self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl LinearField for BigRational {
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn negligible(&self, _scale: &Self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Exact rational from a pair of integers.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Solves the square system `a · x = b` by partial pivoting; `None` when the
/// matrix is singular to working precision.
pub fn solve<F: LinearField>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return None;
    }
    let scale = a
        .iter()
        .flatten()
        .map(LinearField::abs_val)
        .fold(F::zero(), |m, v| if v > m { v } else { m });
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs_val() > a[piv][col].abs_val() {
                piv = r;
            }
        }
        if a[piv][col].negligible(&scale) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col].clone() / a[col][col].clone();
            if factor.is_zero() {
                continue;
            }
            let pivot_row = a[col].clone();
            for (dst, src) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst = dst.clone() - factor.clone() * src.clone();
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    let mut x = vec![F::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

/// Minimum-norm solution of the underdetermined system `rows · x = rhs`
/// (rows linearly independent), via the normal equations `A Aᵀ y = rhs`.
pub fn least_norm<F: LinearField + Copy>(rows: &[Vec<F>], rhs: &[F]) -> Option<Vec<F>> {
    let k = rows.len();
    if k == 0 {
        return None;
    }
    let n = rows[0].len();
    let gram: Vec<Vec<F>> = (0..k)
        .map(|i| (0..k).map(|j| (0..n).fold(F::zero(), |s, t| s + rows[i][t] * rows[j][t])).collect())
        .collect();
    let y = solve(gram, rhs.to_vec())?;
    Some((0..n).map(|t| (0..k).fold(F::zero(), |s, i| s + rows[i][t] * y[i])).collect())
}

/// Subsets of `0..n` of size at most `max_size`, by cardinality then
/// lexicographically.
pub fn subsets_by_size(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max_size.min(n) {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            out.push(comb.clone());
            let mut i = size;
            while i > 0 && comb[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_float_system() {
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 2.0]], vec![1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn solves_exactly_over_rationals() {
        let a = vec![vec![rational(2, 1), rational(1, 1)], vec![rational(1, 1), rational(2, 1)]];
        let x = solve(a, vec![rational(1, 1), rational(1, 1)]).unwrap();
        assert_eq!(x, vec![rational(1, 3), rational(1, 3)]);
        let small: Vec<Vec<Ratio<i64>>> = vec![vec![Ratio::new(1, 2), Ratio::new(1, 1)], vec![Ratio::new(1, 1), Ratio::new(2, 1)]];
        assert!(solve(small, vec![Ratio::new(1, 1), Ratio::new(1, 1)]).is_none());
    }

    #[test]
    fn singular_is_none() {
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn least_norm_projects_origin() {
        let x = least_norm(&[vec![1.0, 1.0]], &[2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subset_order() {
        let s = subsets_by_size(3, 3);
        assert_eq!(s.len(), 8);
        assert_eq!(s[0], Vec::<usize>::new());
        assert_eq!(s[1], vec![0]);
        assert_eq!(s[4], vec![0, 1]);
        assert_eq!(s[6], vec![1, 2]);
        assert_eq!(s[7], vec![0, 1, 2]);
    }
}

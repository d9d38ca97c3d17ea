//! Extended reals `ℝ ∪ {−∞, +∞}` with the two addition conventions used by
//! conjugation (`sub_lower`) and by the gap functional (`add_upper`).

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A value in `ℝ ∪ {−∞, +∞}`.
///
/// The total order is `−∞ < finite < +∞`. Finite payloads are never NaN and
/// never infinite: [`ExtReal::from_float`] maps IEEE infinities onto the two
/// infinite variants and rejects NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> ExtReal<T> {
    /// Converts a float, mapping `±inf` to the infinite variants.
    pub fn from_float(v: T) -> Result<Self> {
        if v.is_nan() {
            Err(Error::Domain("NaN value".into()))
        } else if v.is_infinite() {
            Ok(if v > T::zero() { ExtReal::PosInf } else { ExtReal::NegInf })
        } else {
            Ok(ExtReal::Finite(v))
        }
    }

    /// Like [`from_float`](Self::from_float) but tags the error with context.
    pub fn checked(v: T, what: &str) -> Result<Self> {
        Self::from_float(v).map_err(|_| Error::Domain(what.to_string()))
    }

    pub fn finite(v: T) -> Self {
        Self::from_float(v).expect("finite value must not be NaN")
    }

    pub fn zero() -> Self {
        ExtReal::Finite(T::zero())
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn as_finite(self) -> Option<T> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// IEEE image: infinities become `±inf`.
    pub fn to_float(self) -> T {
        match self {
            ExtReal::NegInf => T::neg_infinity(),
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => T::infinity(),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.to_float().to_f64_lossy()
    }

    /// Addition where `+∞` dominates, so `(+∞) + (−∞) = +∞`.
    pub fn add_upper(self, other: Self) -> Self {
        match (self, other) {
            (ExtReal::PosInf, _) | (_, ExtReal::PosInf) => ExtReal::PosInf,
            (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => ExtReal::NegInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => finite_or_overflow(a + b),
        }
    }

    /// Subtraction where a `+∞` subtrahend wins, so `(+∞) − (+∞) = −∞`.
    ///
    /// Inside a supremum this discards points outside the effective domain of
    /// the subtracted function.
    pub fn sub_lower(self, other: Self) -> Self {
        match (self, other) {
            (_, ExtReal::PosInf) => ExtReal::NegInf,
            (ExtReal::NegInf, _) => ExtReal::NegInf,
            (_, ExtReal::NegInf) => ExtReal::PosInf,
            (ExtReal::PosInf, ExtReal::Finite(_)) => ExtReal::PosInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => finite_or_overflow(a - b),
        }
    }

    /// Absolute difference, `0` when both are the same infinity and `+∞` when
    /// exactly one side is infinite.
    pub fn distance(self, other: Self) -> T {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
            (a, b) if a == b => T::zero(),
            _ => T::infinity(),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

// Overflow of a finite sum lands on the matching infinity.
fn finite_or_overflow<T: Scalar>(v: T) -> ExtReal<T> {
    if v.is_infinite() {
        if v > T::zero() {
            ExtReal::PosInf
        } else {
            ExtReal::NegInf
        }
    } else {
        ExtReal::Finite(v)
    }
}

impl<T: Scalar> std::ops::Neg for ExtReal<T> {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

/// Free-function form of [`ExtReal::add_upper`].
pub fn ext_add_upper<T: Scalar>(a: ExtReal<T>, b: ExtReal<T>) -> ExtReal<T> {
    a.add_upper(b)
}

/// Free-function form of [`ExtReal::sub_lower`].
pub fn ext_sub_lower<T: Scalar>(a: ExtReal<T>, b: ExtReal<T>) -> ExtReal<T> {
    a.sub_lower(b)
}

impl<T: Scalar> Eq for ExtReal<T> {}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for ExtReal<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
        }
    }
}

impl<T: Scalar> From<T> for ExtReal<T> {
    fn from(v: T) -> Self {
        ExtReal::finite(v)
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

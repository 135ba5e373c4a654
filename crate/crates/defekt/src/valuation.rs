//! Valuation values and precision caps shared by all series-like domains.

use std::fmt;

use crate::scalars::Rational;

/// Result of taking the valuation of a truncated object. A truncated zero has
/// an unknown valuation that is at least the stated precision; the exact zero
/// has infinite valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Exact(Rational),
    AtLeast(Rational),
    Infinite,
}

impl Valuation {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Valuation::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// A certified lower bound: the value itself, the precision bound, or
    /// None meaning "+infinity" (no finite bound needed).
    pub fn lower_bound(&self) -> Option<&Rational> {
        match self {
            Valuation::Exact(q) | Valuation::AtLeast(q) => Some(q),
            Valuation::Infinite => None,
        }
    }

    /// Whether the valuation is certified to be >= the given bound.
    pub fn known_at_least(&self, bound: &Rational) -> bool {
        match self.lower_bound() {
            None => true,
            Some(q) => q >= bound,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(q) => write!(f, "{q}"),
            Valuation::AtLeast(q) => write!(f, ">= {q}"),
            Valuation::Infinite => write!(f, "infinite"),
        }
    }
}

/// Truncation cap of a series-like value: terms at or beyond the cap are not
/// stored. `Infinite` marks an exact value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Precision {
    Finite(Rational),
    Infinite,
}

impl Precision {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Precision::Finite(q) => Some(q),
            Precision::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Precision::Infinite)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Shift the cap by a rational offset; an infinite cap stays infinite.
    pub fn shifted(&self, offset: &Rational) -> Self {
        match self {
            Precision::Finite(q) => Precision::Finite(q + offset),
            Precision::Infinite => Precision::Infinite,
        }
    }

    /// Whether an exponent lies strictly below the cap (i.e. is representable).
    pub fn admits(&self, exponent: &Rational) -> bool {
        match self {
            Precision::Finite(q) => exponent < q,
            Precision::Infinite => true,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Finite(q) => write!(f, "{q}"),
            Precision::Infinite => write!(f, "exact"),
        }
    }
}

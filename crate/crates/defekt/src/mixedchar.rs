//! Exact digit arithmetic in totally ramified p-adic extensions.
//!
//! Elements are base-p expansions `sum of d * p^e` with digits d in [1, p-1]
//! and exponents in the lattice (1/p^k) * Z for some depth k. Because p^(1/p^k)
//! is itself a power of p, arithmetic needs no minimal-polynomial reduction:
//! p copies of p^e carry to a single p^(e+1). Sums and products of
//! nonnegative-digit values normalize exactly; negation and subtraction have
//! infinite expansions (the -1 tail) and therefore truncate at a cap, the
//! working precision. The default working precision is 2 and can be raised by
//! the caller through the `*_at` variants.
//!
//! A root of X^p - X - 1/p generates an immediate extension of these fields
//! and admits no finite digit expansion; only its partial sums and their
//! residuals are computed here, which is all the valuation bookkeeping needs.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalars::{Prime, PrimeFieldElt, Rational};
use crate::valuation::{Precision, Valuation};

/// Default truncation cap for operations that force an infinite expansion.
pub fn default_working_precision() -> Rational {
    Rational::integer(2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamifiedPadic {
    prime: Prime,
    /// Exponent lattice is (1/p^depth) * Z.
    depth: u32,
    /// Strictly ascending exponents, digits in [1, p-1], all below `precision`.
    digits: Vec<(Rational, u32)>,
    precision: Precision,
}

impl RamifiedPadic {
    pub fn zero(prime: Prime) -> Self {
        RamifiedPadic {
            prime,
            depth: 0,
            digits: Vec::new(),
            precision: Precision::Infinite,
        }
    }

    pub fn zero_to_precision(prime: Prime, cap: Rational) -> Self {
        RamifiedPadic {
            prime,
            depth: 0,
            digits: Vec::new(),
            precision: Precision::Finite(cap),
        }
    }

    pub fn one(prime: Prime) -> Self {
        RamifiedPadic {
            prime,
            depth: 0,
            digits: vec![(Rational::zero(), 1)],
            precision: Precision::Infinite,
        }
    }

    /// `d * p^e` with digit d in [1, p-1] and exponent denominator a power
    /// of p (which fixes the depth).
    pub fn monomial(prime: Prime, digit: u32, exponent: Rational) -> Result<Self> {
        if digit == 0 || digit as u64 >= prime.get() {
            return Err(Error::Precondition(format!(
                "digit {digit} outside [1, {})",
                prime.get()
            )));
        }
        let depth = lattice_depth(prime, &exponent)?;
        Ok(RamifiedPadic {
            prime,
            depth,
            digits: vec![(exponent, digit)],
            precision: Precision::Infinite,
        })
    }

    /// Digit expansion of a rational, exact when it terminates below `cap`
    /// and truncated at `cap` otherwise (negative numbers and most
    /// denominators have the infinite tail).
    pub fn from_rational(prime: Prime, value: &Rational, cap: &Rational) -> Result<Self> {
        if value.is_zero() {
            return Ok(Self::zero(prime));
        }
        let p = BigInt::from(prime.get());
        let mut digits: Vec<(Rational, u32)> = Vec::new();
        let mut x = value.clone();
        let mut truncated = false;
        while !x.is_zero() {
            let v = x.padic_valuation(&prime).expect("nonzero");
            let e = Rational::integer(v);
            if &e >= cap {
                truncated = true;
                break;
            }
            let unit_num = x.numer() / p.pow(v.max(0) as u32);
            let unit_den = x.denom() / p.pow((-v).max(0) as u32);
            let den_elt =
                PrimeFieldElt::new(prime, unit_den.mod_floor(&p).to_i64().expect("fits"));
            let num_elt =
                PrimeFieldElt::new(prime, unit_num.mod_floor(&p).to_i64().expect("fits"));
            let digit = num_elt.mul(den_elt.inv()?)?.value() as u32;
            debug_assert!(digit >= 1);
            digits.push((e, digit));
            let term = Rational::integer(digit as i64)
                * Rational::integer(prime.get() as i64).pow(v as i32)?;
            x = x - term;
        }
        Ok(RamifiedPadic {
            prime,
            depth: 0,
            digits,
            precision: if truncated {
                Precision::Finite(cap.clone())
            } else {
                Precision::Infinite
            },
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn digits(&self) -> &[(Rational, u32)] {
        &self.digits
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn is_exact_zero(&self) -> bool {
        self.digits.is_empty() && self.precision.is_infinite()
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.digits.is_empty() && !self.precision.is_infinite()
    }

    pub fn valuation(&self) -> Valuation {
        match self.digits.first() {
            Some((e, _)) => Valuation::Exact(e.clone()),
            None => match &self.precision {
                Precision::Infinite => Valuation::Infinite,
                Precision::Finite(q) => Valuation::AtLeast(q.clone()),
            },
        }
    }

    fn check_prime(&self, rhs: &Self) -> Result<()> {
        if self.prime != rhs.prime {
            return Err(Error::CharacteristicMismatch {
                left: self.prime.get(),
                right: rhs.prime.get(),
            });
        }
        Ok(())
    }

    fn rebuild(prime: Prime, map: BTreeMap<Rational, BigInt>, cap: Precision) -> Result<Self> {
        let digits = normalize_digits(prime, map, &cap)?;
        // depth is canonical: the coarsest lattice containing the support
        let depth = digits
            .iter()
            .map(|(e, _)| lattice_depth(prime, e).expect("lattice exponent"))
            .max()
            .unwrap_or(0);
        Ok(RamifiedPadic {
            prime,
            depth,
            digits,
            precision: cap,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        let cap = self.precision.clone().min(rhs.precision.clone());
        let mut map: BTreeMap<Rational, BigInt> = BTreeMap::new();
        for (e, d) in self.digits.iter().chain(rhs.digits.iter()) {
            *map.entry(e.clone()).or_insert_with(BigInt::zero) += *d as i64;
        }
        Self::rebuild(self.prime, map, cap)
    }

    /// Subtraction truncates when the digit expansion of the difference is
    /// infinite: at the shared cap when one input is inexact, at the default
    /// working precision otherwise.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.sub_or_cap(rhs, &default_working_precision())
    }

    /// Like [`sub`](Self::sub) with an explicit fallback cap for the case
    /// where both inputs are exact but the difference has an infinite
    /// expansion.
    pub fn sub_or_cap(&self, rhs: &Self, fallback: &Rational) -> Result<Self> {
        let cap = self.precision.clone().min(rhs.precision.clone());
        match self.sub_at(rhs, &cap) {
            Err(Error::InsufficientPrecision(_)) if cap.is_infinite() => {
                self.sub_at(rhs, &Precision::Finite(fallback.clone()))
            }
            other => other,
        }
    }

    pub fn sub_at(&self, rhs: &Self, cap: &Precision) -> Result<Self> {
        self.check_prime(rhs)?;
        let cap = cap
            .clone()
            .min(self.precision.clone().min(rhs.precision.clone()));
        let mut map: BTreeMap<Rational, BigInt> = BTreeMap::new();
        for (e, d) in &self.digits {
            *map.entry(e.clone()).or_insert_with(BigInt::zero) += *d as i64;
        }
        for (e, d) in &rhs.digits {
            *map.entry(e.clone()).or_insert_with(BigInt::zero) -= *d as i64;
        }
        Self::rebuild(self.prime, map, cap)
    }

    pub fn neg_at(&self, cap: &Precision) -> Result<Self> {
        Self::zero(self.prime).sub_at(self, cap)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        if self.is_zero_to_precision() || rhs.is_zero_to_precision() {
            return Err(Error::IndeterminateValuation);
        }
        let va = self.digits[0].0.clone();
        let vb = rhs.digits[0].0.clone();
        let cap = rhs.precision.shifted(&va).min(self.precision.shifted(&vb));
        let mut map: BTreeMap<Rational, BigInt> = BTreeMap::new();
        for (ea, da) in &self.digits {
            for (eb, db) in &rhs.digits {
                let e = ea + eb;
                *map.entry(e).or_insert_with(BigInt::zero) +=
                    BigInt::from(*da as u64 * *db as u64);
            }
        }
        Self::rebuild(self.prime, map, cap)
    }

    /// p-th power by repeated multiplication (exact on exact inputs).
    pub fn pow_residue_char(&self) -> Result<Self> {
        let mut acc = Self::one(self.prime);
        for _ in 0..self.prime.get() {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse to absolute precision `out_prec`, by Newton
    /// iteration x <- x(2 - ax) seeded with the inverted leading digit.
    pub fn invert(&self, out_prec: &Rational) -> Result<Self> {
        let (g, d) = match self.digits.first() {
            Some((g, d)) => (g.clone(), *d),
            None => {
                return Err(if self.is_exact_zero() {
                    Error::DivisionByZero
                } else {
                    Error::IndeterminateValuation
                });
            }
        };
        let d_inv = PrimeFieldElt::new(self.prime, d as i64).inv()?.value() as u32;
        let mut x = RamifiedPadic::monomial(self.prime, d_inv, -&g)?;
        let res_cap = Precision::Finite(out_prec + &g);
        let x_cap = Precision::Finite(out_prec.clone());
        let two = Self::from_rational(self.prime, &Rational::integer(2), &(out_prec + &g + &g))?;
        for _ in 0..64 {
            let ax = self.mul(&x)?;
            let residual = Self::one(self.prime).sub_at(&ax, &res_cap)?;
            if !residual.valuation().is_exact() {
                return Ok(x);
            }
            let upd = two.sub_at(&ax, &res_cap)?;
            x = x.mul(&upd)?;
            let keep = x_cap.clone().min(x.precision.clone());
            x.digits.retain(|(e, _)| keep.admits(e));
            x.precision = keep;
        }
        Err(Error::HenselStagnation {
            achieved: x.precision.to_string(),
        })
    }

    /// Equality after truncating both sides to the shared cap.
    pub fn eq_to_shared_precision(&self, rhs: &Self) -> bool {
        let cap = self.precision.clone().min(rhs.precision.clone());
        let clip = |s: &RamifiedPadic| -> Vec<(Rational, u32)> {
            s.digits
                .iter()
                .filter(|(e, _)| cap.admits(e))
                .cloned()
                .collect()
        };
        self.prime == rhs.prime && clip(self) == clip(rhs)
    }
}

impl fmt::Display for RamifiedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (e, d) in &self.digits {
            parts.push(format!("{d}*p^({e})"));
        }
        if let Precision::Finite(q) = &self.precision {
            parts.push(format!("O(p^({q}))"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Depth of the exponent in the (1/p^k) * Z lattice; errors when the reduced
/// denominator is not a power of p.
fn lattice_depth(prime: Prime, exponent: &Rational) -> Result<u32> {
    let p = BigInt::from(prime.get());
    let mut den = exponent.denom().clone();
    let mut k = 0u32;
    while den > BigInt::from(1) {
        let (q, r) = den.div_rem(&p);
        if !r.is_zero() {
            return Err(Error::Precondition(format!(
                "exponent {exponent} is not in a (1/{}^k) lattice",
                prime.get()
            )));
        }
        den = q;
        k += 1;
    }
    Ok(k)
}

/// Resolve carries ascending: at each exponent e the coefficient c splits as
/// c = q*p + r with r in [0, p); r stays, q moves to e + 1. Coefficients at
/// or beyond the cap are dropped. With an infinite cap a leftover negative
/// carry never terminates (the -1 tail), which is reported as
/// `InsufficientPrecision` so the caller can retry with a finite cap.
fn normalize_digits(
    prime: Prime,
    mut map: BTreeMap<Rational, BigInt>,
    cap: &Precision,
) -> Result<Vec<(Rational, u32)>> {
    let p = BigInt::from(prime.get());
    let mut out: Vec<(Rational, u32)> = Vec::new();
    while let Some((e, c)) = map.pop_first() {
        if c.is_zero() {
            continue;
        }
        if !cap.admits(&e) {
            continue;
        }
        let (q, r) = c.div_mod_floor(&p);
        if !r.is_zero() {
            out.push((e.clone(), r.to_u32().expect("digit fits")));
        }
        if !q.is_zero() {
            if q.is_negative() && cap.is_infinite() && map.is_empty() {
                return Err(Error::InsufficientPrecision(
                    "negative tail requires a finite cap".into(),
                ));
            }
            let up = &e + &Rational::one();
            if cap.admits(&up) {
                *map.entry(up).or_insert_with(BigInt::zero) += q;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiAdditivityReport {
    pub holds: bool,
    pub witness_valuation: String,
}

/// Check the mixed-characteristic congruence (sum c_i)^p = sum c_i^p modulo
/// the valuation ring, valid whenever every v(c_i) >= -1/p.
pub fn quasi_additivity_check(items: &[RamifiedPadic]) -> Result<QuasiAdditivityReport> {
    let first = items
        .first()
        .ok_or_else(|| Error::Precondition("empty element list".into()))?;
    let prime = first.prime();
    let bound = -Rational::one() / Rational::integer(prime.get() as i64);
    for c in items {
        c.check_prime(first)?;
        if !c.valuation().known_at_least(&bound) {
            return Err(Error::Precondition(format!(
                "element of valuation {} violates v >= -1/p",
                c.valuation()
            )));
        }
    }
    let mut sum = RamifiedPadic::zero(prime);
    for c in items {
        sum = sum.add(c)?;
    }
    let lhs = sum.pow_residue_char()?;
    let mut rhs = RamifiedPadic::zero(prime);
    for c in items {
        rhs = rhs.add(&c.pow_residue_char()?)?;
    }
    let cap = Precision::Finite(default_working_precision());
    let diff = lhs.sub_at(&rhs, &cap)?;
    let witness = diff.valuation();
    let holds = witness.known_at_least(&Rational::zero());
    Ok(QuasiAdditivityReport {
        holds,
        witness_valuation: witness.to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub level: u32,
    pub valuation: Rational,
}

/// Residual of the k-th partial sum of the radical tower against the
/// polynomial X^p - X - 1/p: computes s_k = theta_k^p - theta_k - 1/p for
/// theta_k = sum of p^(-1/p^i), i = 1..=k, and returns its exact valuation
/// (expected -1/p^k).
pub fn radical_tower_residual(
    prime: Prime,
    k: u32,
    cap: Option<Rational>,
) -> Result<ResidualReport> {
    if k < 1 {
        return Err(Error::ParamOutOfRange("depth k must be >= 1".into()));
    }
    let cap = cap.unwrap_or_else(default_working_precision);
    if !cap.is_positive() {
        return Err(Error::ParamOutOfRange(
            "working precision must be positive".into(),
        ));
    }
    let p = prime.get() as i64;
    let mut theta = RamifiedPadic::zero(prime);
    for i in 1..=k {
        let exp = -Rational::one() / Rational::integer(p.pow(i));
        theta = theta.add(&RamifiedPadic::monomial(prime, 1, exp)?)?;
    }
    let lhs = theta.pow_residue_char()?;
    let one_over_p = RamifiedPadic::monomial(prime, 1, -Rational::one())?;
    let cap = Precision::Finite(cap);
    let s = lhs.sub_at(&theta, &cap)?.sub_at(&one_over_p, &cap)?;
    match s.valuation() {
        Valuation::Exact(v) => Ok(ResidualReport {
            level: k,
            valuation: v,
        }),
        other => Err(Error::InsufficientPrecision(format!(
            "residual valuation only known as {other}; raise the working precision"
        ))),
    }
}

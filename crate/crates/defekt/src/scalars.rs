//! Exact scalars: arbitrary-precision rationals and prime-field elements.
//!
//! `Rational` is a thin wrapper over a reduced big-integer fraction with
//! positive denominator; it houses every value-group element and exponent in
//! the crate. `PrimeFieldElt` is an element of F_p for a trial-division
//! validated prime p. Both are immutable and all operations are pure.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A prime number, validated by trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exact rational number in canonical form: reduced, positive denominator,
/// zero represented as 0/1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.pow(exp)))
    }

    /// p-adic valuation of a nonzero rational: the exponent of p in
    /// numerator minus denominator. Returns None for zero.
    pub fn padic_valuation(&self, p: &Prime) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let p_big = BigInt::from(p.get());
        let count = |mut n: BigInt| -> i64 {
            let mut c = 0;
            while (&n % &p_big).is_zero() {
                n /= &p_big;
                c += 1;
            }
            c
        };
        Some(count(self.numer().abs()) - count(self.denom().clone()))
    }

    /// Generator of the cyclic subgroup of the rationals spanned by the two
    /// arguments (the rational gcd); zero arguments are absorbed.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.abs();
        }
        if other.is_zero() {
            return self.abs();
        }
        let n = (self.numer() * other.denom()).gcd(&(other.numer() * self.denom()));
        let d = self.denom() * other.denom();
        Rational(BigRational::new(n, d))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn cmp_val(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse {
            offset: 0,
            message: format!("invalid rational literal {s:?}"),
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::Parse {
                        offset: 0,
                        message: "zero denominator".into(),
                    });
                }
                Ok(Rational(BigRational::new(n, d)))
            }
            None => {
                let n = BigInt::from_str(s).map_err(|_| bad())?;
                Ok(Rational(BigRational::from_integer(n)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// An element of the prime field F_p, stored as its canonical representative
/// in [0, p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeFieldElt {
    prime: Prime,
    value: u64,
}

impl PrimeFieldElt {
    pub fn new(prime: Prime, value: i64) -> Self {
        let p = prime.get() as i64;
        let v = value.rem_euclid(p) as u64;
        PrimeFieldElt { prime, value: v }
    }

    /// Image of a rational a/b in F_p; fails when p divides b.
    pub fn from_rational(prime: Prime, r: &Rational) -> Result<Self> {
        let p = BigInt::from(prime.get());
        let n = r.numer().mod_floor(&p).to_u64().expect("residue fits");
        let d = r.denom().mod_floor(&p).to_u64().expect("residue fits");
        let den = PrimeFieldElt {
            prime,
            value: d,
        };
        let num = PrimeFieldElt { prime, value: n };
        num.mul(den.inv()?)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
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

    pub fn add(self, rhs: Self) -> Result<Self> {
        self.check_prime(&rhs)?;
        let p = self.prime.get() as u128;
        let v = (self.value as u128 + rhs.value as u128) % p;
        Ok(PrimeFieldElt {
            prime: self.prime,
            value: v as u64,
        })
    }

    pub fn sub(self, rhs: Self) -> Result<Self> {
        self.add(rhs.neg())
    }

    pub fn neg(self) -> Self {
        let p = self.prime.get();
        PrimeFieldElt {
            prime: self.prime,
            value: if self.value == 0 { 0 } else { p - self.value },
        }
    }

    pub fn mul(self, rhs: Self) -> Result<Self> {
        self.check_prime(&rhs)?;
        let p = self.prime.get() as u128;
        let v = (self.value as u128 * rhs.value as u128) % p;
        Ok(PrimeFieldElt {
            prime: self.prime,
            value: v as u64,
        })
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        // Fermat: a^(p-2) inverts a for prime p.
        self.pow(self.prime.get() as i64 - 2)
    }

    pub fn div(self, rhs: Self) -> Result<Self> {
        self.check_prime(&rhs)?;
        self.mul(rhs.inv()?)
    }

    pub fn pow(self, exp: i64) -> Result<Self> {
        if exp < 0 {
            return self.inv()?.pow(-exp);
        }
        let p = self.prime.get() as u128;
        let mut base = self.value as u128;
        let mut e = exp as u64;
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Ok(PrimeFieldElt {
            prime: self.prime,
            value: acc as u64,
        })
    }
}

impl fmt::Display for PrimeFieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

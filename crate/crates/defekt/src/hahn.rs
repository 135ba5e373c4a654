//! Truncated generalized power series over F_p with rational exponents.
//!
//! A value is a finite ascending list of terms `c * t^g` (coefficients in
//! F_p, exponents exact rationals) together with a precision cap: terms at or
//! beyond the cap are unknown and never stored. The empty series with
//! infinite cap is the exact zero; the empty series with a finite cap is
//! "zero to precision", whose valuation is only known to be at least the cap.
//!
//! Precision calculus (the contract of this module; callers rely on it):
//! - `add`: cap = min of the input caps.
//! - `mul`: cap = min(v(a) + prec(b), v(b) + prec(a)); infinite only when
//!   both factors are exact. A factor that is zero to finite precision has
//!   unknown valuation and would make the product cap ill-defined, so it is
//!   rejected with [`Error::IndeterminateValuation`] rather than guessed.
//!   The exact zero annihilates regardless of the other factor.
//! - `inv`: the result carries the requested output cap, clipped to
//!   prec(a) - 2 v(a), the best an inexact input can support.
//! - `frobenius` / `pth_root` scale exponents and the cap by p and 1/p.
//!
//! Exponents are kept as exact rationals with no common-denominator
//! normalization; supports with unbounded exponent denominators are the whole
//! point of the radical and Artin-Schreier towers built on top.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{Prime, PrimeFieldElt, Rational};
use crate::valuation::{Precision, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HahnSeries {
    prime: Prime,
    /// Strictly ascending exponents, nonzero coefficients, all below `precision`.
    terms: Vec<(Rational, PrimeFieldElt)>,
    precision: Precision,
}

impl HahnSeries {
    /// The exact zero series.
    pub fn zero(prime: Prime) -> Self {
        HahnSeries {
            prime,
            terms: Vec::new(),
            precision: Precision::Infinite,
        }
    }

    /// A series known to vanish below the given cap only.
    pub fn zero_to_precision(prime: Prime, cap: Rational) -> Self {
        HahnSeries {
            prime,
            terms: Vec::new(),
            precision: Precision::Finite(cap),
        }
    }

    pub fn one(prime: Prime) -> Self {
        Self::monomial(prime, 1, Rational::zero())
    }

    /// `c * t^g` for an integer coefficient (reduced mod p).
    pub fn monomial(prime: Prime, coeff: i64, exponent: Rational) -> Self {
        let c = PrimeFieldElt::new(prime, coeff);
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(exponent, c)]
        };
        HahnSeries {
            prime,
            terms,
            precision: Precision::Infinite,
        }
    }

    /// The constant image of a rational in F_p; fails when p divides the
    /// denominator.
    pub fn constant_from_rational(prime: Prime, value: &Rational) -> Result<Self> {
        let c = PrimeFieldElt::from_rational(prime, value)?;
        Ok(HahnSeries {
            prime,
            terms: if c.is_zero() {
                Vec::new()
            } else {
                vec![(Rational::zero(), c)]
            },
            precision: Precision::Infinite,
        })
    }

    /// Build a series from arbitrary (exponent, coefficient) pairs:
    /// duplicates are merged mod p, zero coefficients dropped, terms at or
    /// beyond the cap discarded.
    pub fn from_terms(
        prime: Prime,
        pairs: impl IntoIterator<Item = (Rational, i64)>,
        precision: Precision,
    ) -> Self {
        let mut map: BTreeMap<Rational, i64> = BTreeMap::new();
        for (g, c) in pairs {
            *map.entry(g).or_insert(0) += c;
        }
        let terms = map
            .into_iter()
            .filter(|(g, _)| precision.admits(g))
            .map(|(g, c)| (g, PrimeFieldElt::new(prime, c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        HahnSeries {
            prime,
            terms,
            precision,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn terms(&self) -> &[(Rational, PrimeFieldElt)] {
        &self.terms
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_infinite()
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.terms.is_empty() && !self.precision.is_infinite()
    }

    pub fn leading(&self) -> Option<&(Rational, PrimeFieldElt)> {
        self.terms.first()
    }

    /// Minimum-support valuation: the least exponent of the support, infinite
    /// for the exact zero, and a lower bound only for a truncated zero.
    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some((g, _)) => Valuation::Exact(g.clone()),
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

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        let precision = self.precision.clone().min(rhs.precision.clone());
        let mut map: BTreeMap<Rational, PrimeFieldElt> = BTreeMap::new();
        for (g, c) in self.terms.iter().chain(rhs.terms.iter()) {
            match map.get_mut(g) {
                Some(acc) => *acc = acc.add(*c)?,
                None => {
                    map.insert(g.clone(), *c);
                }
            }
        }
        let terms = map
            .into_iter()
            .filter(|(g, c)| !c.is_zero() && precision.admits(g))
            .collect();
        Ok(HahnSeries {
            prime: self.prime,
            terms,
            precision,
        })
    }

    pub fn neg(&self) -> Self {
        HahnSeries {
            prime: self.prime,
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect(),
            precision: self.precision.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return Ok(HahnSeries::zero(self.prime));
        }
        if self.is_zero_to_precision() || rhs.is_zero_to_precision() {
            return Err(Error::IndeterminateValuation);
        }
        let va = self.leading().map(|(g, _)| g.clone()).expect("nonempty");
        let vb = rhs.leading().map(|(g, _)| g.clone()).expect("nonempty");
        let precision = rhs
            .precision
            .shifted(&va)
            .min(self.precision.shifted(&vb));
        let mut map: BTreeMap<Rational, PrimeFieldElt> = BTreeMap::new();
        for (ga, ca) in &self.terms {
            for (gb, cb) in &rhs.terms {
                let g = ga + gb;
                if !precision.admits(&g) {
                    continue;
                }
                let prod = ca.mul(*cb)?;
                match map.get_mut(&g) {
                    Some(acc) => *acc = acc.add(prod)?,
                    None => {
                        map.insert(g, prod);
                    }
                }
            }
        }
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(HahnSeries {
            prime: self.prime,
            terms,
            precision,
        })
    }

    /// Multiplicative inverse, computed by factoring out the leading term and
    /// summing the geometric series of the tail. The result is exact for
    /// monomial inputs and carries precision `out_prec` (clipped to what the
    /// input precision supports) otherwise.
    pub fn inv(&self, out_prec: &Rational) -> Result<Self> {
        let (g, c) = match self.leading() {
            Some((g, c)) => (g.clone(), *c),
            None => {
                return Err(if self.is_exact_zero() {
                    Error::DivisionByZero
                } else {
                    Error::IndeterminateValuation
                });
            }
        };
        let c_inv = c.inv()?;
        let lead_inv = {
            let mut s = HahnSeries::monomial(self.prime, 0, Rational::zero());
            s.terms = vec![(-&g, c_inv)];
            s
        };
        if self.terms.len() == 1 && self.precision.is_infinite() {
            return Ok(lead_inv);
        }
        // u = tail / (c t^g); v(u) > 0.
        let mut u_terms = Vec::new();
        for (gi, ci) in &self.terms[1..] {
            u_terms.push((gi - &g, ci.mul(c_inv)?));
        }
        let u_prec = self.precision.shifted(&-&g);
        // Best achievable output cap: prec(a) - 2 v(a).
        let out = match &self.precision {
            Precision::Finite(p) => out_prec.clone().min(p - &g - &g),
            Precision::Infinite => out_prec.clone(),
        };
        let rel = &out + &g; // relative cap for the geometric series
        let u = HahnSeries {
            prime: self.prime,
            terms: u_terms,
            precision: u_prec.min(Precision::Finite(rel.clone())),
        };
        let mut geom = HahnSeries::one(self.prime);
        let mut power = HahnSeries::one(self.prime);
        let neg_u = u.neg();
        loop {
            if neg_u.terms.is_empty() {
                break;
            }
            power = power.mul(&neg_u)?;
            if let Some(p) = power.precision.finite() {
                if p <= &rel && power.terms.is_empty() {
                    break;
                }
            }
            if power.terms.is_empty() {
                break;
            }
            if !Precision::Finite(rel.clone()).admits(&power.terms[0].0) {
                break;
            }
            let mut clipped = power.clone();
            clipped.precision = clipped.precision.min(Precision::Finite(rel.clone()));
            clipped.terms.retain(|(g, _)| clipped.precision.admits(g));
            geom = geom.add(&clipped)?;
        }
        geom.precision = Precision::Finite(rel);
        geom.terms.retain(|(g, _)| geom.precision.admits(g));
        lead_inv.mul(&geom)
    }

    /// Drop terms at or beyond the new cap. Raising the cap is an error.
    pub fn truncate(&self, new_prec: &Rational) -> Result<Self> {
        if let Precision::Finite(cur) = &self.precision {
            if new_prec > cur {
                return Err(Error::PrecisionIncrease {
                    from: cur.to_string(),
                    to: new_prec.to_string(),
                });
            }
        }
        let precision = Precision::Finite(new_prec.clone());
        Ok(HahnSeries {
            prime: self.prime,
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| precision.admits(g))
                .cloned()
                .collect(),
            precision,
        })
    }

    /// The p-th power map: coefficients are fixed (Fermat), exponents and the
    /// cap scale by p. Exact on every input.
    pub fn frobenius(&self) -> Self {
        let p = Rational::integer(self.prime.get() as i64);
        HahnSeries {
            prime: self.prime,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g * &p, *c))
                .collect(),
            precision: match &self.precision {
                Precision::Finite(q) => Precision::Finite(q * &p),
                Precision::Infinite => Precision::Infinite,
            },
        }
    }

    /// Exact inverse of [`frobenius`](Self::frobenius): exponents and the cap
    /// divide by p. Total over F_p coefficients.
    pub fn pth_root(&self) -> Self {
        let p = Rational::integer(self.prime.get() as i64);
        HahnSeries {
            prime: self.prime,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g / &p, *c))
                .collect(),
            precision: match &self.precision {
                Precision::Finite(q) => Precision::Finite(q / &p),
                Precision::Infinite => Precision::Infinite,
            },
        }
    }

    /// Equality after truncating both sides to the shared (minimum) cap.
    pub fn eq_to_shared_precision(&self, rhs: &Self) -> bool {
        let cap = self.precision.clone().min(rhs.precision.clone());
        let clip = |s: &HahnSeries| -> Vec<(Rational, PrimeFieldElt)> {
            s.terms
                .iter()
                .filter(|(g, _)| cap.admits(g))
                .cloned()
                .collect()
        };
        self.prime == rhs.prime && clip(self) == clip(rhs)
    }

    fn fmt_exponent(q: &Rational) -> String {
        if q.is_integer() && !q.is_negative() {
            format!("{q}")
        } else {
            format!("({q})")
        }
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (g, c) in &self.terms {
            let part = if g.is_zero() {
                format!("{c}")
            } else {
                let var = if g == &Rational::one() {
                    "t".to_string()
                } else {
                    format!("t^{}", Self::fmt_exponent(g))
                };
                if c.value() == 1 {
                    var
                } else {
                    format!("{c}*{var}")
                }
            };
            parts.push(part);
        }
        if let Precision::Finite(q) = &self.precision {
            parts.push(format!("O(t^{})", Self::fmt_exponent(q)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

//! Polynomials over valued coefficient domains: Newton polygons, Newton/Hensel
//! root lifting, and the degree-p transformations between Artin-Schreier
//! shapes.
//!
//! The classical root-lifting hypothesis is v(f(b)) > 0 together with
//! v(f'(b)) = 0; the refined variant v(f(b)) > 2 v(f'(b)) accepted here is an
//! extension of that simple-root form. Under the classical hypothesis the
//! returned root satisfies v(b - a) > 0; under the refined one only
//! v(b - a) > v(f'(b)) is guaranteed.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hahn::HahnSeries;
use crate::mixedchar::RamifiedPadic;
use crate::scalars::{Prime, Rational};
use crate::valuation::{Precision, Valuation};

/// A field element carrying a valuation, precision-aware arithmetic, and a
/// residue characteristic. Implemented by the three coefficient domains:
/// truncated series over F_p, ramified p-adics, and rationals with the p-adic
/// valuation.
pub trait ValuedField: Clone + PartialEq + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Result<Self>;
    fn sub(&self, rhs: &Self) -> Result<Self>;
    fn mul(&self, rhs: &Self) -> Result<Self>;
    /// Product that tolerates zero-to-precision factors: where strict
    /// multiplication refuses an indeterminate valuation, this returns a
    /// zero-to-precision value at the certified bound
    /// lower(v(x)) + lower(v(y)).
    fn mul_loose(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }
    /// Multiplication by a small nonnegative integer.
    fn mul_nat(&self, n: u64) -> Result<Self>;
    /// Multiplicative inverse; `out_prec` bounds the absolute precision of
    /// the result where the domain needs a cap (an infinite request on a
    /// value whose inverse has no finite expansion is an error).
    fn invert(&self, out_prec: &Precision) -> Result<Self>;
    fn valuation(&self) -> Valuation;
    fn is_exact_zero(&self) -> bool;
    /// x^p for the residue characteristic p.
    fn pow_residue_char(&self) -> Result<Self>;
    fn residue_char(&self) -> u64;
    /// Field characteristic: p for the series domain, 0 for the others.
    fn characteristic(&self) -> u64;
}

impl ValuedField for HahnSeries {
    fn zero_like(&self) -> Self {
        HahnSeries::zero(self.prime())
    }

    fn one_like(&self) -> Self {
        HahnSeries::one(self.prime())
    }

    fn add(&self, rhs: &Self) -> Result<Self> {
        HahnSeries::add(self, rhs)
    }

    fn sub(&self, rhs: &Self) -> Result<Self> {
        HahnSeries::sub(self, rhs)
    }

    fn mul(&self, rhs: &Self) -> Result<Self> {
        HahnSeries::mul(self, rhs)
    }

    fn mul_loose(&self, rhs: &Self) -> Result<Self> {
        match HahnSeries::mul(self, rhs) {
            Err(Error::IndeterminateValuation) => {
                let bound = match (self.valuation().lower_bound(), rhs.valuation().lower_bound())
                {
                    (Some(a), Some(b)) => a + b,
                    _ => unreachable!("exact zeros multiply strictly"),
                };
                Ok(HahnSeries::zero_to_precision(self.prime(), bound))
            }
            other => other,
        }
    }

    fn mul_nat(&self, n: u64) -> Result<Self> {
        let c = HahnSeries::monomial(
            self.prime(),
            (n % self.prime().get()) as i64,
            Rational::zero(),
        );
        HahnSeries::mul(&c, self)
    }

    fn invert(&self, out_prec: &Precision) -> Result<Self> {
        match out_prec {
            Precision::Finite(q) => self.inv(q),
            Precision::Infinite => {
                if self.terms().len() == 1 && self.precision().is_infinite() {
                    self.inv(&Rational::zero())
                } else {
                    Err(Error::InsufficientPrecision(
                        "inverse of a non-monomial series needs a finite output cap".into(),
                    ))
                }
            }
        }
    }

    fn valuation(&self) -> Valuation {
        HahnSeries::valuation(self)
    }

    fn is_exact_zero(&self) -> bool {
        HahnSeries::is_exact_zero(self)
    }

    fn pow_residue_char(&self) -> Result<Self> {
        Ok(self.frobenius())
    }

    fn residue_char(&self) -> u64 {
        self.prime().get()
    }

    fn characteristic(&self) -> u64 {
        self.prime().get()
    }
}

impl ValuedField for RamifiedPadic {
    fn zero_like(&self) -> Self {
        RamifiedPadic::zero(self.prime())
    }

    fn one_like(&self) -> Self {
        RamifiedPadic::one(self.prime())
    }

    fn add(&self, rhs: &Self) -> Result<Self> {
        RamifiedPadic::add(self, rhs)
    }

    fn sub(&self, rhs: &Self) -> Result<Self> {
        RamifiedPadic::sub(self, rhs)
    }

    fn mul(&self, rhs: &Self) -> Result<Self> {
        RamifiedPadic::mul(self, rhs)
    }

    fn mul_loose(&self, rhs: &Self) -> Result<Self> {
        match RamifiedPadic::mul(self, rhs) {
            Err(Error::IndeterminateValuation) => {
                let bound = match (self.valuation().lower_bound(), rhs.valuation().lower_bound())
                {
                    (Some(a), Some(b)) => a + b,
                    _ => unreachable!("exact zeros multiply strictly"),
                };
                Ok(RamifiedPadic::zero_to_precision(self.prime(), bound))
            }
            other => other,
        }
    }

    fn mul_nat(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Ok(RamifiedPadic::zero(self.prime()));
        }
        let c = RamifiedPadic::from_rational(
            self.prime(),
            &Rational::integer(n as i64),
            &crate::mixedchar::default_working_precision(),
        )?;
        RamifiedPadic::mul(&c, self)
    }

    fn invert(&self, out_prec: &Precision) -> Result<Self> {
        match out_prec {
            Precision::Finite(q) => RamifiedPadic::invert(self, q),
            Precision::Infinite => {
                RamifiedPadic::invert(self, &crate::mixedchar::default_working_precision())
            }
        }
    }

    fn valuation(&self) -> Valuation {
        RamifiedPadic::valuation(self)
    }

    fn is_exact_zero(&self) -> bool {
        RamifiedPadic::is_exact_zero(self)
    }

    fn pow_residue_char(&self) -> Result<Self> {
        RamifiedPadic::pow_residue_char(self)
    }

    fn residue_char(&self) -> u64 {
        self.prime().get()
    }

    fn characteristic(&self) -> u64 {
        0
    }
}

/// A rational number viewed inside (Q, v_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalWithVp {
    prime: Prime,
    value: Rational,
}

impl RationalWithVp {
    pub fn new(prime: Prime, value: Rational) -> Self {
        RationalWithVp { prime, value }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }
}

impl fmt::Display for RationalWithVp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl ValuedField for RationalWithVp {
    fn zero_like(&self) -> Self {
        RationalWithVp::new(self.prime, Rational::zero())
    }

    fn one_like(&self) -> Self {
        RationalWithVp::new(self.prime, Rational::one())
    }

    fn add(&self, rhs: &Self) -> Result<Self> {
        Ok(RationalWithVp::new(self.prime, &self.value + &rhs.value))
    }

    fn sub(&self, rhs: &Self) -> Result<Self> {
        Ok(RationalWithVp::new(self.prime, &self.value - &rhs.value))
    }

    fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(RationalWithVp::new(self.prime, &self.value * &rhs.value))
    }

    fn mul_nat(&self, n: u64) -> Result<Self> {
        Ok(RationalWithVp::new(
            self.prime,
            &self.value * &Rational::integer(n as i64),
        ))
    }

    fn invert(&self, _out_prec: &Precision) -> Result<Self> {
        Ok(RationalWithVp::new(self.prime, self.value.recip()?))
    }

    fn valuation(&self) -> Valuation {
        match self.value.padic_valuation(&self.prime) {
            Some(v) => Valuation::Exact(Rational::integer(v)),
            None => Valuation::Infinite,
        }
    }

    fn is_exact_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn pow_residue_char(&self) -> Result<Self> {
        let mut acc = self.one_like();
        for _ in 0..self.prime.get() {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn residue_char(&self) -> u64 {
        self.prime.get()
    }

    fn characteristic(&self) -> u64 {
        0
    }
}

/// Dense polynomial over a valued coefficient domain. The leading coefficient
/// must have exact (known) valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuedPoly<K: ValuedField> {
    coeffs: Vec<K>,
}

impl<K: ValuedField> ValuedPoly<K> {
    pub fn new(mut coeffs: Vec<K>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().map(K::is_exact_zero).unwrap_or(false) {
            coeffs.pop();
        }
        let lead = coeffs
            .last()
            .ok_or_else(|| Error::Precondition("empty coefficient list".into()))?;
        if !lead.valuation().is_exact() {
            return Err(Error::Precondition(
                "leading coefficient must be nonzero with exact valuation".into(),
            ));
        }
        Ok(ValuedPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&K> {
        self.coeffs.get(i)
    }

    pub fn eval(&self, x: &K) -> Result<K> {
        eval_coeffs(&self.coeffs, x)
    }

    pub fn derivative_coeffs(&self) -> Result<Vec<K>> {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.mul_nat(i as u64)?);
        }
        Ok(out)
    }

    pub fn derivative(&self) -> Result<Self> {
        let coeffs = self.derivative_coeffs()?;
        if coeffs.iter().all(K::is_exact_zero) {
            return Err(Error::Precondition("derivative vanishes identically".into()));
        }
        ValuedPoly::new(coeffs)
    }

    pub fn scalar_mul(&self, c: &K) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.mul(c))
            .collect::<Result<Vec<_>>>()?;
        ValuedPoly::new(coeffs)
    }

    /// f(bX): coefficient i picks up a factor b^i.
    pub fn scale_argument(&self, b: &K) -> Result<Self> {
        let mut power = b.one_like();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(b)?;
            }
            coeffs.push(c.mul(&power)?);
        }
        ValuedPoly::new(coeffs)
    }
}

fn eval_coeffs<K: ValuedField>(coeffs: &[K], x: &K) -> Result<K> {
    let mut acc = match coeffs.last() {
        Some(c) => c.clone(),
        None => return Ok(x.zero_like()),
    };
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(x).or_else(|e| match e {
            // an exactly-zero accumulator annihilates regardless of x
            Error::IndeterminateValuation if acc.is_exact_zero() => Ok(acc.zero_like()),
            other => Err(other),
        })?;
        acc = acc.add(c)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonSegment {
    pub slope: Rational,
    pub multiplicity: usize,
    /// Root valuation certified by this segment (the negated slope).
    pub root_valuation: Rational,
}

/// Lower convex hull of the points (i, v(c_i)) over the support of a
/// polynomial. Each segment of slope -m with horizontal span `multiplicity`
/// certifies exactly that many roots of valuation m in the algebraic closure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Rational)>,
    pub segments: Vec<PolygonSegment>,
}

impl NewtonPolygon {
    /// Build from explicit (index, valuation) points; collinear points merge
    /// into a single segment.
    pub fn from_points(points: &[(usize, Rational)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("no finite-valuation points".into()));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        let mut hull: Vec<(usize, Rational)> = Vec::new();
        for pt in pts {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                // pop b unless it turns strictly upward (left turn) at b
                let lhs = (&b.1 - &a.1) * Rational::integer((pt.0 - a.0) as i64);
                let rhs = (&pt.1 - &a.1) * Rational::integer((b.0 - a.0) as i64);
                if lhs < rhs {
                    break;
                }
                hull.pop();
            }
            hull.push(pt);
        }
        let segments = hull
            .windows(2)
            .map(|w| {
                let run = w[1].0 - w[0].0;
                let slope = (&w[1].1 - &w[0].1) / Rational::integer(run as i64);
                PolygonSegment {
                    root_valuation: -&slope,
                    slope,
                    multiplicity: run,
                }
            })
            .collect();
        Ok(NewtonPolygon {
            vertices: hull,
            segments,
        })
    }

    /// Certified root valuations with multiplicities, in increasing slope
    /// order.
    pub fn root_valuations(&self) -> Vec<(Rational, usize)> {
        self.segments
            .iter()
            .map(|s| (s.root_valuation.clone(), s.multiplicity))
            .collect()
    }

    pub fn certifies(&self, valuation: &Rational) -> bool {
        self.segments.iter().any(|s| &s.root_valuation == valuation)
    }
}

pub fn newton_polygon<K: ValuedField>(f: &ValuedPoly<K>) -> Result<NewtonPolygon> {
    let mut points = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        match c.valuation() {
            Valuation::Exact(v) => points.push((i, v)),
            Valuation::Infinite => {}
            Valuation::AtLeast(_) => return Err(Error::IndeterminateValuation),
        }
    }
    NewtonPolygon::from_points(&points)
}

#[derive(Debug, Clone)]
pub struct HenselRoot<K: ValuedField> {
    pub root: K,
    pub residual_valuation: Valuation,
}

/// Newton iteration x <- x - f(x)/f'(x) from the start value `b`.
///
/// Requires the classical hypothesis v(f(b)) > 0, v(f'(b)) = 0 or the refined
/// one v(f(b)) > 2 v(f'(b)). Iterates until the residual valuation is
/// certified to be at least `target_prec` + v(f'(b)) (so the root is pinned
/// to precision `target_prec`), the residual becomes exactly zero, or the
/// certified gain stalls.
pub fn hensel_lift<K: ValuedField>(
    f: &ValuedPoly<K>,
    b: &K,
    target_prec: &Rational,
) -> Result<HenselRoot<K>> {
    if f.degree() < 1 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let deriv = f.derivative_coeffs()?;
    let fb = f.eval(b)?;
    let dfb = eval_coeffs(&deriv, b)?;
    let w = match dfb.valuation() {
        Valuation::Exact(w) => w,
        Valuation::Infinite => {
            return Err(Error::HenselHypothesis(
                "derivative vanishes at the start value".into(),
            ))
        }
        Valuation::AtLeast(_) => {
            return Err(Error::HenselHypothesis(
                "derivative valuation at the start value is indeterminate".into(),
            ))
        }
    };
    let two_w = &w + &w;
    match fb.valuation() {
        Valuation::Infinite => {
            return Ok(HenselRoot {
                root: b.clone(),
                residual_valuation: Valuation::Infinite,
            })
        }
        Valuation::Exact(v0) | Valuation::AtLeast(v0) => {
            let classical = w.is_zero() && v0 > Rational::zero();
            let refined = v0 > two_w;
            if !classical && !refined {
                return Err(Error::HenselHypothesis(format!(
                    "need v(f(b)) > 0 = v(f'(b)) or v(f(b)) > 2 v(f'(b)); got v(f(b)) {} and v(f'(b)) = {}",
                    fb.valuation(),
                    w
                )));
            }
        }
    }

    let goal = target_prec + &w;
    // Working cap for the divisions: evaluating a degree-d polynomial at a
    // value of negative valuation costs up to d * |v(x)| of precision, so pad
    // the requested target accordingly.
    let vb_abs = b
        .valuation()
        .lower_bound()
        .map(|q| q.abs())
        .unwrap_or_else(Rational::zero);
    let slack = Rational::integer(f.degree() as i64) * (vb_abs + Rational::one())
        + w.abs()
        + Rational::one();
    let work = Precision::Finite(target_prec + &slack);
    let mut x = b.clone();
    let mut last_gain: Option<Rational> = None;
    for _ in 0..64 {
        let fx = f.eval(&x)?;
        match fx.valuation() {
            Valuation::Infinite => {
                return Ok(HenselRoot {
                    root: x,
                    residual_valuation: Valuation::Infinite,
                })
            }
            Valuation::AtLeast(q) => {
                if q >= goal {
                    return Ok(HenselRoot {
                        root: x,
                        residual_valuation: Valuation::AtLeast(q),
                    });
                }
                return Err(Error::HenselStagnation {
                    achieved: (&q - &w).to_string(),
                });
            }
            Valuation::Exact(q) => {
                if q >= goal {
                    return Ok(HenselRoot {
                        root: x,
                        residual_valuation: Valuation::Exact(q),
                    });
                }
                if let Some(prev) = &last_gain {
                    if &q <= prev {
                        return Err(Error::HenselStagnation {
                            achieved: (prev - &w).to_string(),
                        });
                    }
                }
                last_gain = Some(q);
            }
        }
        let dfx = eval_coeffs(&deriv, &x)?;
        let step = fx.mul(&dfx.invert(&work)?)?;
        x = x.sub(&step)?;
    }
    Err(Error::HenselStagnation {
        achieved: last_gain
            .map(|q| (&q - &w).to_string())
            .unwrap_or_else(|| "none".into()),
    })
}

/// Artin-Schreier translation: if a root of X^p - X - a generates the
/// extension, the same extension is generated by a root of
/// X^p - X - (a - c^p + c). Characteristic-p domains only.
pub fn artin_schreier_translate<K: ValuedField>(a: &K, c: &K) -> Result<K> {
    if a.characteristic() == 0 {
        return Err(Error::DomainMismatch(
            "Artin-Schreier translation needs a characteristic-p domain".into(),
        ));
    }
    a.sub(&c.pow_residue_char()?)?.add(c)
}

/// Scale transform on the degree-p shape X^p - d X - a: substituting X = bY
/// and dividing by b^p yields Y^p - (d / b^(p-1)) Y - a/b^p. With
/// d = b^(p-1) the result is the Artin-Schreier polynomial Y^p - Y - a/b^p,
/// and a root of the input corresponds to (root)/b of the output. Scaling
/// with 1/b inverts the transform.
pub fn artin_schreier_scale<K: ValuedField>(f: &ValuedPoly<K>, b: &K) -> Result<ValuedPoly<K>> {
    if !b.valuation().is_exact() {
        return Err(if b.is_exact_zero() {
            Error::DivisionByZero
        } else {
            Error::IndeterminateValuation
        });
    }
    let p = b.residue_char() as usize;
    if f.degree() != p {
        return Err(Error::ShapeMismatch(format!(
            "degree {} but the residue characteristic is {p}",
            f.degree()
        )));
    }
    let one = b.one_like();
    if !f.coeff(p).unwrap().sub(&one)?.is_exact_zero() {
        return Err(Error::ShapeMismatch("polynomial is not monic".into()));
    }
    for i in 2..p {
        if !f.coeff(i).unwrap().is_exact_zero() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient of X^{i} must vanish"
            )));
        }
    }
    let mut b_pm1 = one.clone();
    for _ in 0..p - 1 {
        b_pm1 = b_pm1.mul(b)?;
    }
    let b_p = b_pm1.mul(b)?;
    let new_constant = f.coeff(0).unwrap().mul(&b_p.invert(&Precision::Infinite)?)?;
    let new_linear = f
        .coeff(1)
        .unwrap()
        .mul(&b_pm1.invert(&Precision::Infinite)?)?;
    let mut coeffs = vec![new_constant, new_linear];
    for _ in 2..p {
        coeffs.push(b.zero_like());
    }
    coeffs.push(one);
    ValuedPoly::new(coeffs)
}

/// (1/divisor) * f(alpha + beta X) over the rationals.
pub fn subst_affine(
    f: &ValuedPoly<RationalWithVp>,
    alpha: &Rational,
    beta: &Rational,
    divisor: &Rational,
) -> Result<ValuedPoly<RationalWithVp>> {
    if beta.is_zero() || divisor.is_zero() {
        return Err(Error::Precondition(
            "affine substitution needs beta != 0 and divisor != 0".into(),
        ));
    }
    let prime = f.coeff(0).expect("nonempty").prime();
    // Horner over polynomials: acc(X) <- acc(X) * (alpha + beta X) + c_i
    let mut acc: Vec<Rational> = Vec::new();
    for c in f.coeffs().iter().rev() {
        let mut next = vec![Rational::zero(); acc.len() + 1];
        for (j, a) in acc.iter().enumerate() {
            next[j] = &next[j] + &(a * alpha);
            next[j + 1] = &next[j + 1] + &(a * beta);
        }
        if next.is_empty() {
            next.push(Rational::zero());
        }
        next[0] = &next[0] + c.value();
        acc = next;
    }
    let coeffs = acc
        .into_iter()
        .map(|q| RationalWithVp::new(prime, q.checked_div(divisor).expect("divisor nonzero")))
        .collect::<Vec<_>>();
    ValuedPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::Precision;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn t(prime: Prime) -> HahnSeries {
        HahnSeries::monomial(prime, 1, Rational::one())
    }

    fn hpoly(_prime: Prime, coeffs: Vec<HahnSeries>) -> ValuedPoly<HahnSeries> {
        ValuedPoly::new(coeffs).unwrap()
    }

    /// X^p - X - c over the series field.
    fn artin_schreier_poly(prime: Prime, c: HahnSeries) -> ValuedPoly<HahnSeries> {
        let pr = prime.get() as usize;
        let mut coeffs = vec![c.neg(), HahnSeries::monomial(prime, -1, Rational::zero())];
        for _ in 2..pr {
            coeffs.push(HahnSeries::zero(prime));
        }
        coeffs.push(HahnSeries::one(prime));
        hpoly(prime, coeffs)
    }

    #[test]
    fn polygon_artin_schreier_shape() {
        let p3 = p(3);
        let f = artin_schreier_poly(p3, HahnSeries::monomial(p3, 1, r(-1, 1)));
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.root_valuations(), vec![(r(-1, 3), 3)]);
    }

    #[test]
    fn polygon_unit_roots() {
        let p3 = p(3);
        // X^2 - (1+t): both roots are units
        let one_plus_t = HahnSeries::one(p3).add(&t(p3)).unwrap();
        let f = hpoly(
            p3,
            vec![one_plus_t.neg(), HahnSeries::zero(p3), HahnSeries::one(p3)],
        );
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.root_valuations(), vec![(r(0, 1), 2)]);
    }

    #[test]
    fn polygon_two_slopes_matches_quadratic_oracle() {
        let p5 = p(5);
        // tX^2 + X + t
        let f = hpoly(p5, vec![t(p5), HahnSeries::one(p5), t(p5)]);
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.root_valuations(), vec![(r(1, 1), 1), (r(-1, 1), 1)]);

        // Quadratic-formula oracle in Laurent series: the roots are
        // (-1 +/- sqrt(1 - 4t^2)) / (2t); expand the square root by the
        // binomial series to a few terms and read off the valuations.
        let half = PrimeFieldEltExt::inv2(p5);
        let mut sqrt = HahnSeries::one(p5);
        let four_t2 = HahnSeries::monomial(p5, 4, r(2, 1));
        // sqrt(1+u) with u = -4t^2: 1 + u/2 - u^2/8 + ...
        let u = four_t2.neg();
        let u2 = u.mul(&u).unwrap();
        sqrt = sqrt.add(&u.mul(&half).unwrap()).unwrap();
        let eighth = PrimeFieldEltExt::inv_int(p5, 8);
        sqrt = sqrt.sub(&u2.mul(&eighth).unwrap()).unwrap();
        let two_t = HahnSeries::monomial(p5, 2, r(1, 1));
        let inv_2t = two_t.inv(&r(8, 1)).unwrap();
        let minus_one = HahnSeries::monomial(p5, -1, r(0, 1));
        let r_plus = minus_one.add(&sqrt).unwrap().mul(&inv_2t).unwrap();
        let r_minus = minus_one.sub(&sqrt).unwrap().mul(&inv_2t).unwrap();
        assert_eq!(r_plus.valuation(), Valuation::Exact(r(1, 1)));
        assert_eq!(r_minus.valuation(), Valuation::Exact(r(-1, 1)));
        // and the oracle roots satisfy the equation to working precision
        for root in [r_plus, r_minus] {
            let val = f.eval(&root).unwrap();
            assert!(val.valuation().known_at_least(&r(3, 1)));
        }
    }

    struct PrimeFieldEltExt;
    impl PrimeFieldEltExt {
        fn inv2(prime: Prime) -> HahnSeries {
            Self::inv_int(prime, 2)
        }
        fn inv_int(prime: Prime, n: i64) -> HahnSeries {
            HahnSeries::constant_from_rational(prime, &Rational::new(1, n).unwrap()).unwrap()
        }
    }

    #[test]
    fn polygon_rejects_indeterminate_coefficients() {
        let p2 = p(2);
        let f = ValuedPoly::new(vec![
            HahnSeries::zero_to_precision(p2, r(1, 1)),
            HahnSeries::one(p2),
        ])
        .unwrap();
        assert_eq!(newton_polygon(&f), Err(Error::IndeterminateValuation));
    }

    #[test]
    fn polygon_invariance_under_scaling() {
        let p3 = p(3);
        let f = artin_schreier_poly(p3, HahnSeries::monomial(p3, 1, r(-1, 1)));
        let np = newton_polygon(&f).unwrap();
        // multiply all coefficients by a nonzero constant: slopes unchanged
        let c = HahnSeries::monomial(p3, 2, r(0, 1));
        let fc = f.scalar_mul(&c).unwrap();
        assert_eq!(newton_polygon(&fc).unwrap().segments, np.segments);
        // X -> bX shifts every slope by v(b)
        let b = t(p3);
        let fb = f.scale_argument(&b).unwrap();
        let shifted = newton_polygon(&fb).unwrap();
        for (s, s2) in np.segments.iter().zip(shifted.segments.iter()) {
            assert_eq!(&s2.slope, &(&s.slope + &r(1, 1)));
            assert_eq!(s2.multiplicity, s.multiplicity);
        }
    }

    #[test]
    fn hensel_square_root_matches_binomial_oracle() {
        let p3 = p(3);
        let one_plus_t = HahnSeries::one(p3).add(&t(p3)).unwrap();
        let f = hpoly(
            p3,
            vec![one_plus_t.neg(), HahnSeries::zero(p3), HahnSeries::one(p3)],
        );
        let start = HahnSeries::one(p3);
        let lifted = hensel_lift(&f, &start, &r(8, 1)).unwrap();

        // Independent binomial oracle: (1+t)^(1/2) = sum C(1/2, n) t^n,
        // coefficients reduced mod 3.
        let mut oracle_terms = Vec::new();
        let mut coeff = Rational::one();
        for n in 0..8i64 {
            if n > 0 {
                // C(1/2, n) = C(1/2, n-1) * (1/2 - (n-1)) / n
                coeff = coeff * (r(1, 2) - Rational::integer(n - 1));
                coeff = coeff.checked_div(&Rational::integer(n)).unwrap();
            }
            oracle_terms.push((Rational::integer(n), coeff.clone()));
        }
        let mut oracle = HahnSeries::zero_to_precision(p3, r(8, 1));
        for (e, c) in oracle_terms {
            let elt = HahnSeries::constant_from_rational(p3, &c).unwrap();
            let term = elt.mul(&HahnSeries::monomial(p3, 1, e)).unwrap();
            oracle = oracle.add(&term).unwrap();
        }
        assert!(lifted.root.eq_to_shared_precision(&oracle));
        // leading terms: 1 + 2t + t^2 + ...
        assert_eq!(lifted.root.terms()[0].0, r(0, 1));
        assert_eq!(lifted.root.terms()[1], (r(1, 1), crate::scalars::PrimeFieldElt::new(p3, 2)));
        assert_eq!(lifted.root.terms()[2], (r(2, 1), crate::scalars::PrimeFieldElt::new(p3, 1)));
    }

    #[test]
    fn hensel_splits_positive_valuation_artin_schreier() {
        for pr in [2u64, 3, 5] {
            let prime = p(pr);
            let f = artin_schreier_poly(prime, t(prime));
            let lifted = hensel_lift(&f, &HahnSeries::zero(prime), &r(6, 1)).unwrap();
            let v = lifted.root.valuation();
            assert_eq!(v, Valuation::Exact(r(1, 1)));
            let np = newton_polygon(&f).unwrap();
            assert!(np.certifies(&r(1, 1)));
        }
    }

    #[test]
    fn hensel_rejects_vanishing_derivative() {
        let p2 = p(2);
        let one_plus_t = HahnSeries::one(p2).add(&t(p2)).unwrap();
        // X^2 - (1+t) in characteristic 2: f' = 2X = 0
        let f = hpoly(
            p2,
            vec![one_plus_t.neg(), HahnSeries::zero(p2), HahnSeries::one(p2)],
        );
        assert!(matches!(
            hensel_lift(&f, &HahnSeries::one(p2), &r(4, 1)),
            Err(Error::HenselHypothesis(_))
        ));
    }

    #[test]
    fn hensel_rejects_bad_hypothesis() {
        let p3 = p(3);
        // X^2 - t at b = 1: f(1) = 1 - t is a unit, not in the maximal ideal
        let f = hpoly(
            p3,
            vec![t(p3).neg(), HahnSeries::zero(p3), HahnSeries::one(p3)],
        );
        assert!(matches!(
            hensel_lift(&f, &HahnSeries::one(p3), &r(4, 1)),
            Err(Error::HenselHypothesis(_))
        ));
    }

    #[test]
    fn translate_examples() {
        let p2 = p(2);
        let a = HahnSeries::monomial(p2, 1, r(-1, 1));
        // c = 0 leaves a unchanged
        assert_eq!(
            artin_schreier_translate(&a, &HahnSeries::zero(p2)).unwrap(),
            a
        );
        // a = c^p - c collapses to zero
        let c = t(p2);
        let cpc = c.frobenius().sub(&c).unwrap();
        assert!(artin_schreier_translate(&cpc, &c).unwrap().is_exact_zero());
        // 1/t translated by t over F_2: 1/t - t^2 + t = 1/t + t^2 + t mod 2
        let got = artin_schreier_translate(&a, &c).unwrap();
        let expect = HahnSeries::from_terms(
            p2,
            [(r(-1, 1), 1), (r(1, 1), 1), (r(2, 1), 1)],
            Precision::Infinite,
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn translate_is_an_action() {
        let p3 = p(3);
        let a = HahnSeries::monomial(p3, 1, r(-1, 1));
        let c1 = t(p3);
        let c2 = HahnSeries::monomial(p3, 2, r(2, 1));
        let seq = artin_schreier_translate(&artin_schreier_translate(&a, &c1).unwrap(), &c2)
            .unwrap();
        let joint = artin_schreier_translate(&a, &c1.add(&c2).unwrap()).unwrap();
        assert_eq!(seq, joint);
    }

    #[test]
    fn translate_rejects_char_zero() {
        let p2 = p(2);
        let a = RationalWithVp::new(p2, r(1, 2));
        assert!(matches!(
            artin_schreier_translate(&a, &a),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn scale_examples() {
        let p3 = p(3);
        // b with b^(p-1) = t, i.e. b = t^(1/2) for p = 3
        let b = HahnSeries::monomial(p3, 1, r(1, 2));
        // f = X^3 - tX - 1
        let f = hpoly(
            p3,
            vec![
                HahnSeries::monomial(p3, -1, r(0, 1)),
                t(p3).neg(),
                HahnSeries::zero(p3),
                HahnSeries::one(p3),
            ],
        );
        let g = artin_schreier_scale(&f, &b).unwrap();
        // expect X^3 - X - 1/b^3 = X^3 - X - t^(-3/2)
        assert_eq!(
            g.coeff(0).unwrap(),
            &HahnSeries::monomial(p3, -1, r(-3, 2))
        );
        assert_eq!(
            g.coeff(1).unwrap(),
            &HahnSeries::monomial(p3, -1, r(0, 1))
        );
        assert!(g.coeff(2).unwrap().is_exact_zero());

        // b = 1 leaves the polynomial unchanged
        let f_as = artin_schreier_poly(p3, HahnSeries::monomial(p3, 1, r(-1, 1)));
        let same = artin_schreier_scale(&f_as, &HahnSeries::one(p3)).unwrap();
        assert_eq!(same, f_as);
    }

    #[test]
    fn scale_involution() {
        let p3 = p(3);
        let b = HahnSeries::monomial(p3, 1, r(1, 2));
        let f = hpoly(
            p3,
            vec![
                HahnSeries::monomial(p3, -1, r(0, 1)),
                t(p3).neg(),
                HahnSeries::zero(p3),
                HahnSeries::one(p3),
            ],
        );
        let g = artin_schreier_scale(&f, &b).unwrap();
        let back = artin_schreier_scale(&g, &b.inv(&r(0, 1)).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn scale_shape_errors() {
        let p3 = p(3);
        // X^3 + X^2 + 1: the middle coefficient breaks the degree-p shape
        let f = hpoly(
            p3,
            vec![
                HahnSeries::one(p3),
                HahnSeries::zero(p3),
                HahnSeries::one(p3),
                HahnSeries::one(p3),
            ],
        );
        let b = t(p3);
        assert!(matches!(
            artin_schreier_scale(&f, &b),
            Err(Error::ShapeMismatch(_))
        ));
        // wrong degree
        let quad = hpoly(p3, vec![HahnSeries::one(p3), HahnSeries::one(p3)]);
        assert!(matches!(
            artin_schreier_scale(&quad, &b),
            Err(Error::ShapeMismatch(_))
        ));
        let ok_shape = f_as_shape(p3);
        let zb = HahnSeries::zero(p3);
        assert!(matches!(
            artin_schreier_scale(&ok_shape, &zb),
            Err(Error::DivisionByZero)
        ));
        let z2p = HahnSeries::zero_to_precision(p3, r(2, 1));
        assert!(matches!(
            artin_schreier_scale(&ok_shape, &z2p),
            Err(Error::IndeterminateValuation)
        ));
    }

    fn f_as_shape(prime: Prime) -> ValuedPoly<HahnSeries> {
        let mut coeffs = vec![
            HahnSeries::monomial(prime, -1, r(-1, 1)),
            HahnSeries::monomial(prime, -1, r(0, 1)),
        ];
        for _ in 2..prime.get() as usize {
            coeffs.push(HahnSeries::zero(prime));
        }
        coeffs.push(HahnSeries::one(prime));
        ValuedPoly::new(coeffs).unwrap()
    }

    #[test]
    fn subst_affine_examples() {
        let p2 = p(2);
        let rp = |q: Rational| RationalWithVp::new(p2, q);
        // Y^2 - 3, Y = 1 - 2X, divide by 4: X^2 - X - 1/2
        let f = ValuedPoly::new(vec![rp(r(-3, 1)), rp(r(0, 1)), rp(r(1, 1))]).unwrap();
        let g = subst_affine(&f, &r(1, 1), &r(-2, 1), &r(4, 1)).unwrap();
        assert_eq!(
            g.coeffs().iter().map(|c| c.value().clone()).collect::<Vec<_>>(),
            vec![r(-1, 2), r(-1, 1), r(1, 1)]
        );
        // Y^2 + 1 gives X^2 - X + 1/2
        let f2 = ValuedPoly::new(vec![rp(r(1, 1)), rp(r(0, 1)), rp(r(1, 1))]).unwrap();
        let g2 = subst_affine(&f2, &r(1, 1), &r(-2, 1), &r(4, 1)).unwrap();
        assert_eq!(
            g2.coeffs().iter().map(|c| c.value().clone()).collect::<Vec<_>>(),
            vec![r(1, 2), r(-1, 1), r(1, 1)]
        );
        // identity substitution
        let id = subst_affine(&f, &r(0, 1), &r(1, 1), &r(1, 1)).unwrap();
        assert_eq!(id, f);
        assert!(subst_affine(&f, &r(0, 1), &r(0, 1), &r(1, 1)).is_err());
    }

    #[test]
    fn eval_examples() {
        let p3 = p(3);
        // X^2 - 1 at 1
        let f = hpoly(
            p3,
            vec![
                HahnSeries::monomial(p3, -1, r(0, 1)),
                HahnSeries::zero(p3),
                HahnSeries::one(p3),
            ],
        );
        assert!(f.eval(&HahnSeries::one(p3)).unwrap().is_exact_zero());

        // telescoping: eval(X^p - X - 1/t, theta_k) = -t^(-1/p^k)
        for pr in [2u64, 3] {
            let prime = p(pr);
            let f = artin_schreier_poly(prime, HahnSeries::monomial(prime, 1, r(-1, 1)));
            for k in 1..=3u32 {
                let mut theta = HahnSeries::zero(prime);
                for i in 1..=k {
                    theta = theta
                        .add(&HahnSeries::monomial(
                            prime,
                            1,
                            -Rational::one() / Rational::integer((pr as i64).pow(i)),
                        ))
                        .unwrap();
                }
                let got = f.eval(&theta).unwrap();
                let expect = HahnSeries::monomial(
                    prime,
                    -1,
                    -Rational::one() / Rational::integer((pr as i64).pow(k)),
                );
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn lifted_roots_match_polygon_certificates() {
        let p3 = p(3);
        let one_plus_t = HahnSeries::one(p3).add(&t(p3)).unwrap();
        let f = hpoly(
            p3,
            vec![one_plus_t.neg(), HahnSeries::zero(p3), HahnSeries::one(p3)],
        );
        let lifted = hensel_lift(&f, &HahnSeries::one(p3), &r(6, 1)).unwrap();
        let np = newton_polygon(&f).unwrap();
        let v = lifted.root.valuation().exact().unwrap().clone();
        assert!(np.certifies(&v));
    }
}

//! Explicit chains of degree-p, value-ramified extension steps over a valued
//! base field, with exact element arithmetic and defect bookkeeping.
//!
//! Every accepted step is totally value-ramified: the generator valuation
//! must be certified by the Newton polygon of the step's minimal polynomial,
//! and its multiples 0, g, ..., (p-1)g must lie in pairwise distinct cosets
//! of the current value group while pg falls back in. Under that coset
//! condition the valuation of a tower element is the plain minimum of
//! v(coefficient) + j * g over the generator powers: no cancellation across
//! cosets is possible, so the formula is exact. Residue-inert steps are
//! rejected; every tower built here keeps the prime residue field.
//!
//! Degree-p extensions with defect have e = f = 1 and admit no finite
//! generator representation in this model; they are analyzed through
//! [`DefectReport`] and the cut machinery instead of being added as steps.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hahn::HahnSeries;
use crate::poly::{NewtonPolygon, ValuedField};
use crate::scalars::{Prime, Rational};
use crate::valuation::{Precision, Valuation};

/// Cyclic subgroup of the rationals, kept as its positive generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueGroup {
    generator: Rational,
}

impl ValueGroup {
    pub fn new(generator: Rational) -> Result<Self> {
        if generator.is_zero() {
            return Err(Error::Precondition("trivial value group".into()));
        }
        Ok(ValueGroup {
            generator: generator.abs(),
        })
    }

    pub fn integers() -> Self {
        ValueGroup {
            generator: Rational::one(),
        }
    }

    /// Smallest cyclic group containing all the given values.
    pub fn generated_by(values: &[Rational]) -> Result<Self> {
        let mut g = Rational::zero();
        for v in values {
            g = g.gcd(v);
        }
        ValueGroup::new(g)
    }

    pub fn generator(&self) -> &Rational {
        &self.generator
    }

    pub fn contains(&self, q: &Rational) -> bool {
        (q / &self.generator).is_integer()
    }

    /// Index (self : sub) when sub is a subgroup of self.
    pub fn index_of(&self, sub: &ValueGroup) -> Result<u64> {
        let ratio = &sub.generator / &self.generator;
        if !ratio.is_integer() {
            return Err(Error::GroupMismatch);
        }
        ratio
            .numer()
            .try_into()
            .map_err(|_| Error::ParamOutOfRange("index does not fit in u64".into()))
    }

    /// The group generated by self and one extra element.
    pub fn join(&self, q: &Rational) -> Result<Self> {
        ValueGroup::new(self.generator.gcd(q))
    }
}

impl fmt::Display for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})Z", self.generator)
    }
}

/// Element of a tower: a base-field value, or a coefficient vector over the
/// previous level in the powers 1, a_k, ..., a_k^(p-1) of that level's
/// generator.
#[derive(Debug, Clone, PartialEq)]
pub enum TowerElement<K> {
    Base(K),
    Ext(Vec<TowerElement<K>>),
}

impl<K> TowerElement<K> {
    pub fn level(&self) -> usize {
        match self {
            TowerElement::Base(_) => 0,
            TowerElement::Ext(v) => 1 + v[0].level(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TowerStep<K: ValuedField> {
    /// Monic minimal polynomial of degree p, coefficients one level down.
    minpoly: Vec<TowerElement<K>>,
    gen_val: Rational,
}

impl<K: ValuedField> TowerStep<K> {
    pub fn generator_valuation(&self) -> &Rational {
        &self.gen_val
    }
}

/// A chain of accepted degree-p steps over a valued base field.
#[derive(Debug, Clone)]
pub struct Tower<K: ValuedField> {
    prime: Prime,
    base_zero: K,
    working_precision: Rational,
    base_group: ValueGroup,
    steps: Vec<TowerStep<K>>,
}

impl Tower<HahnSeries> {
    /// Tower over F_p((t)) with its t-adic value group.
    pub fn over_laurent_series(prime: Prime, working_precision: Rational) -> Self {
        Tower {
            prime,
            base_zero: HahnSeries::zero(prime),
            working_precision,
            base_group: ValueGroup::integers(),
            steps: Vec::new(),
        }
    }
}

impl<K: ValuedField> Tower<K> {
    pub fn new(
        base_zero: K,
        base_group: ValueGroup,
        working_precision: Rational,
    ) -> Result<Self> {
        let prime = Prime::new(base_zero.residue_char())?;
        Ok(Tower {
            prime,
            base_zero,
            working_precision,
            base_group,
            steps: Vec::new(),
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn levels(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[TowerStep<K>] {
        &self.steps
    }

    /// Value group after the first `level` steps.
    pub fn group_at(&self, level: usize) -> Result<ValueGroup> {
        let mut g = self.base_group.clone();
        for step in &self.steps[..level] {
            g = g.join(&step.gen_val)?;
        }
        Ok(g)
    }

    pub fn zero_at(&self, level: usize) -> TowerElement<K> {
        if level == 0 {
            TowerElement::Base(self.base_zero.clone())
        } else {
            let p = self.prime.get() as usize;
            TowerElement::Ext(vec![self.zero_at(level - 1); p])
        }
    }

    pub fn from_base(&self, value: K, level: usize) -> TowerElement<K> {
        self.lift(&TowerElement::Base(value), level)
    }

    pub fn one_at(&self, level: usize) -> TowerElement<K> {
        self.from_base(self.base_zero.one_like(), level)
    }

    /// The generator adjoined at step `step` (1-based), as an element of any
    /// level >= step.
    pub fn generator(&self, step: usize, level: usize) -> Result<TowerElement<K>> {
        if step == 0 || step > self.steps.len() || level < step || level > self.steps.len() {
            return Err(Error::ParamOutOfRange(format!(
                "generator {step} at level {level} outside tower of height {}",
                self.steps.len()
            )));
        }
        let p = self.prime.get() as usize;
        let mut coeffs = vec![self.zero_at(step - 1); p];
        coeffs[1] = self.one_at(step - 1);
        Ok(self.lift(&TowerElement::Ext(coeffs), level))
    }

    /// Embed an element into a higher level as the constant coefficient.
    pub fn lift(&self, x: &TowerElement<K>, level: usize) -> TowerElement<K> {
        let cur = x.level();
        assert!(cur <= level, "cannot lower a tower element");
        let mut out = x.clone();
        for l in cur..level {
            let p = self.prime.get() as usize;
            let mut coeffs = vec![self.zero_at(l); p];
            coeffs[0] = out;
            out = TowerElement::Ext(coeffs);
        }
        out
    }

    fn match_levels(
        &self,
        x: &TowerElement<K>,
        y: &TowerElement<K>,
    ) -> (TowerElement<K>, TowerElement<K>) {
        let lvl = x.level().max(y.level());
        (self.lift(x, lvl), self.lift(y, lvl))
    }

    pub fn add(&self, x: &TowerElement<K>, y: &TowerElement<K>) -> Result<TowerElement<K>> {
        let (x, y) = self.match_levels(x, y);
        self.add_same(&x, &y)
    }

    fn add_same(&self, x: &TowerElement<K>, y: &TowerElement<K>) -> Result<TowerElement<K>> {
        match (x, y) {
            (TowerElement::Base(a), TowerElement::Base(b)) => Ok(TowerElement::Base(a.add(b)?)),
            (TowerElement::Ext(a), TowerElement::Ext(b)) => {
                let coeffs = a
                    .iter()
                    .zip(b.iter())
                    .map(|(u, v)| self.add_same(u, v))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TowerElement::Ext(coeffs))
            }
            _ => unreachable!("levels matched"),
        }
    }

    pub fn neg(&self, x: &TowerElement<K>) -> Result<TowerElement<K>> {
        match x {
            TowerElement::Base(a) => Ok(TowerElement::Base(a.zero_like().sub(a)?)),
            TowerElement::Ext(v) => {
                let coeffs = v.iter().map(|u| self.neg(u)).collect::<Result<Vec<_>>>()?;
                Ok(TowerElement::Ext(coeffs))
            }
        }
    }

    pub fn sub(&self, x: &TowerElement<K>, y: &TowerElement<K>) -> Result<TowerElement<K>> {
        self.add(x, &self.neg(y)?)
    }

    pub fn mul(&self, x: &TowerElement<K>, y: &TowerElement<K>) -> Result<TowerElement<K>> {
        let (x, y) = self.match_levels(x, y);
        self.mul_same(&x, &y)
    }

    fn mul_same(&self, x: &TowerElement<K>, y: &TowerElement<K>) -> Result<TowerElement<K>> {
        match (x, y) {
            // the loose product keeps truncated zeros flowing through
            // reduction and elimination as certified bounds
            (TowerElement::Base(a), TowerElement::Base(b)) => {
                Ok(TowerElement::Base(a.mul_loose(b)?))
            }
            (TowerElement::Ext(a), TowerElement::Ext(b)) => {
                let level = x.level();
                let p = self.prime.get() as usize;
                let mut conv = vec![self.zero_at(level - 1); 2 * p - 1];
                for (i, u) in a.iter().enumerate() {
                    for (j, v) in b.iter().enumerate() {
                        let prod = self.mul_same(u, v)?;
                        conv[i + j] = self.add_same(&conv[i + j], &prod)?;
                    }
                }
                let reduced = self.reduce(conv, level)?;
                Ok(TowerElement::Ext(reduced))
            }
            _ => unreachable!("levels matched"),
        }
    }

    /// Remainder of a coefficient vector modulo the monic minimal polynomial
    /// of the given level.
    fn reduce(
        &self,
        mut coeffs: Vec<TowerElement<K>>,
        level: usize,
    ) -> Result<Vec<TowerElement<K>>> {
        let p = self.prime.get() as usize;
        let minpoly = self.steps[level - 1].minpoly.clone();
        while coeffs.len() > p {
            let top = coeffs.pop().expect("nonempty");
            let deg = coeffs.len(); // top was the coefficient of X^deg
            if self.is_exact_zero(&top) {
                continue;
            }
            // X^deg = X^(deg-p) * (X^p - minpoly(X)) reduction step:
            // subtract top * minpoly shifted by deg - p.
            for (j, m) in minpoly.iter().enumerate().take(p) {
                let prod = self.mul_same(&top, m)?;
                let idx = deg - p + j;
                coeffs[idx] = self.sub(&coeffs[idx], &prod)?;
            }
        }
        Ok(coeffs)
    }

    pub fn is_exact_zero(&self, x: &TowerElement<K>) -> bool {
        match x {
            TowerElement::Base(a) => a.is_exact_zero(),
            TowerElement::Ext(v) => v.iter().all(|u| self.is_exact_zero(u)),
        }
    }

    /// Valuation by the exact coset formula
    /// v(sum c_j a^j) = min over j of v(c_j) + j * v(a).
    pub fn valuation(&self, x: &TowerElement<K>) -> Valuation {
        match x {
            TowerElement::Base(a) => a.valuation(),
            TowerElement::Ext(v) => {
                let gen_val = &self.steps[x.level() - 1].gen_val;
                let mut best_exact: Option<Rational> = None;
                let mut best_bound: Option<Rational> = None;
                for (j, c) in v.iter().enumerate() {
                    let shift = gen_val * &Rational::integer(j as i64);
                    match self.valuation(c) {
                        Valuation::Exact(q) => {
                            let q = q + shift;
                            if best_exact.as_ref().map(|b| &q < b).unwrap_or(true) {
                                best_exact = Some(q);
                            }
                        }
                        Valuation::AtLeast(q) => {
                            let q = q + shift;
                            if best_bound.as_ref().map(|b| &q < b).unwrap_or(true) {
                                best_bound = Some(q);
                            }
                        }
                        Valuation::Infinite => {}
                    }
                }
                match (best_exact, best_bound) {
                    (Some(e), Some(b)) => {
                        if e < b {
                            Valuation::Exact(e)
                        } else {
                            Valuation::AtLeast(b)
                        }
                    }
                    (Some(e), None) => Valuation::Exact(e),
                    (None, Some(b)) => Valuation::AtLeast(b),
                    (None, None) => Valuation::Infinite,
                }
            }
        }
    }

    /// Multiplicative inverse, by solving the p x p linear system for the
    /// multiplication-by-x map over the previous level.
    pub fn invert(&self, x: &TowerElement<K>) -> Result<TowerElement<K>> {
        match x {
            TowerElement::Base(a) => {
                let prec = Precision::Finite(self.working_precision.clone());
                Ok(TowerElement::Base(a.invert(&prec)?))
            }
            TowerElement::Ext(_) => {
                let level = x.level();
                let p = self.prime.get() as usize;
                // columns: x * a^j reduced to coefficient vectors
                let mut columns = Vec::with_capacity(p);
                let mut power = self.one_at(level);
                for j in 0..p {
                    if j > 0 {
                        let gen = self.generator(level, level)?;
                        power = self.mul_same(&power, &gen)?;
                    }
                    let prod = self.mul_same(x, &power)?;
                    let TowerElement::Ext(col) = prod else {
                        unreachable!("level >= 1")
                    };
                    columns.push(col);
                }
                // solve M y = e_0 over the level-(p-1) field
                let mut rhs = vec![self.zero_at(level - 1); p];
                rhs[0] = self.one_at(level - 1);
                let solution = self.solve_linear(columns, rhs, level - 1)?;
                Ok(TowerElement::Ext(solution))
            }
        }
    }

    /// Gaussian elimination on column vectors over the recursive field at
    /// `coeff_level`.
    fn solve_linear(
        &self,
        columns: Vec<Vec<TowerElement<K>>>,
        mut rhs: Vec<TowerElement<K>>,
        coeff_level: usize,
    ) -> Result<Vec<TowerElement<K>>> {
        let n = columns.len();
        // rows[i][j] = entry i of column j
        let mut rows: Vec<Vec<TowerElement<K>>> = (0..n)
            .map(|i| (0..n).map(|j| columns[j][i].clone()).collect())
            .collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
        let mut used_rows = vec![false; n];
        for col in 0..n {
            // choose a pivot row with certified nonzero entry
            let mut pivot_row = None;
            let mut saw_unknown = false;
            for (ri, row) in rows.iter().enumerate() {
                if used_rows[ri] {
                    continue;
                }
                match self.valuation(&row[col]) {
                    Valuation::Exact(_) => {
                        pivot_row = Some(ri);
                        break;
                    }
                    Valuation::AtLeast(_) => saw_unknown = true,
                    Valuation::Infinite => {}
                }
            }
            let Some(ri) = pivot_row else {
                if saw_unknown {
                    return Err(Error::InsufficientPrecision(
                        "pivot entry is zero to working precision".into(),
                    ));
                }
                return Err(Error::DivisionByZero);
            };
            used_rows[ri] = true;
            pivot_of_col[col] = Some(ri);
            let inv = self.invert(&rows[ri][col])?;
            // normalize the pivot row
            for c in 0..n {
                rows[ri][c] = self.mul_same(&rows[ri][c], &inv)?;
            }
            rhs[ri] = self.mul_same(&rhs[ri], &inv)?;
            // eliminate the column elsewhere; entries that vanish to the
            // working precision count as zero here
            for r in 0..n {
                if r == ri || !self.valuation(&rows[r][col]).is_exact() {
                    continue;
                }
                let factor = rows[r][col].clone();
                for c in 0..n {
                    let sub = self.mul_same(&factor, &rows[ri][c])?;
                    rows[r][c] = self.sub(&rows[r][c], &sub)?;
                }
                let sub = self.mul_same(&factor, &rhs[ri])?;
                rhs[r] = self.sub(&rhs[r], &sub)?;
            }
        }
        let mut out = vec![self.zero_at(coeff_level); n];
        for (col, ri) in pivot_of_col.iter().enumerate() {
            let ri = ri.expect("all columns pivoted");
            out[col] = rhs[ri].clone();
        }
        Ok(out)
    }

    /// Append a degree-p step. The polygon of the minimal polynomial must
    /// certify a root of the declared generator valuation, and the step must
    /// be totally value-ramified: j * gen_val stays outside the current value
    /// group for 0 < j < p while p * gen_val falls inside.
    pub fn extend(
        &self,
        minpoly: Vec<TowerElement<K>>,
        gen_val: Rational,
    ) -> Result<Tower<K>> {
        let p = self.prime.get() as usize;
        if minpoly.len() != p + 1 {
            return Err(Error::ShapeMismatch(format!(
                "minimal polynomial must have degree {p}"
            )));
        }
        let level = self.steps.len();
        let minpoly: Vec<TowerElement<K>> =
            minpoly.iter().map(|c| self.lift(c, level)).collect();
        let lead = self.sub(&minpoly[p], &self.one_at(level))?;
        if !self.is_exact_zero(&lead) {
            return Err(Error::ShapeMismatch(
                "minimal polynomial must be monic".into(),
            ));
        }
        // polygon certification of the declared generator valuation
        let mut points = Vec::new();
        for (i, c) in minpoly.iter().enumerate() {
            match self.valuation(c) {
                Valuation::Exact(v) => points.push((i, v)),
                Valuation::Infinite => {}
                Valuation::AtLeast(_) => return Err(Error::IndeterminateValuation),
            }
        }
        let polygon = NewtonPolygon::from_points(&points)?;
        if !polygon.certifies(&gen_val) {
            return Err(Error::PolygonDoesNotCertify(gen_val.to_string()));
        }
        // coset distinctness
        let group = self.group_at(level)?;
        for j in 1..p {
            let multiple = &gen_val * &Rational::integer(j as i64);
            if group.contains(&multiple) {
                return Err(Error::CosetCollision(format!(
                    "{j} * {gen_val} = {multiple}"
                )));
            }
        }
        let p_fold = &gen_val * &Rational::integer(p as i64);
        if !group.contains(&p_fold) {
            return Err(Error::Precondition(format!(
                "p * gen_val = {p_fold} must lie in the current value group {group}"
            )));
        }
        let mut steps = self.steps.clone();
        steps.push(TowerStep { minpoly, gen_val });
        Ok(Tower {
            prime: self.prime,
            base_zero: self.base_zero.clone(),
            working_precision: self.working_precision.clone(),
            base_group: self.base_group.clone(),
            steps,
        })
    }
}

/// Outcome of the exact tower-identity check for an Artin-Schreier tower
/// whose first step adjoins a root of X^p - X - c0 and whose later steps
/// adjoin roots of X^p - X + a_(i-1).
#[derive(Debug, Clone, Serialize)]
pub struct TowerIdentityReport {
    pub level: usize,
    pub identity_holds: bool,
    pub generator_valuation: Rational,
    /// Implied distance of the limit generator from the k-th partial sum.
    pub implied_distance: Rational,
}

/// Verify, in exact tower arithmetic, that the partial sums
/// eta_k = a_1 + ... + a_k of the tower over F_p((t)) built on
/// X^p - X - 1/t satisfy eta_k^p - 1/t = a_k (so
/// (eta - eta_k)^p = -a_k for the limit generator eta), which pins
/// v(eta - eta_k) = v(a_k)/p = -1/p^(k+1).
pub fn as_tower_identity_check(
    tower: &Tower<HahnSeries>,
    k: usize,
) -> Result<TowerIdentityReport> {
    if k < 1 || k > tower.levels() {
        return Err(Error::ParamOutOfRange(format!(
            "level {k} outside tower of height {}",
            tower.levels()
        )));
    }
    let p = tower.prime().get();
    let mut eta = tower.zero_at(k);
    for i in 1..=k {
        eta = tower.add(&eta, &tower.generator(i, k)?)?;
    }
    let mut eta_p = tower.one_at(k);
    for _ in 0..p {
        eta_p = tower.mul(&eta_p, &eta)?;
    }
    let one_over_t = tower.from_base(
        HahnSeries::monomial(tower.prime(), 1, -Rational::one()),
        k,
    );
    let lhs = tower.sub(&eta_p, &one_over_t)?;
    let a_k = tower.generator(k, k)?;
    let diff = tower.sub(&lhs, &a_k)?;
    let identity_holds = tower.is_exact_zero(&diff);
    let gen_val = match tower.valuation(&a_k) {
        Valuation::Exact(v) => v,
        other => {
            return Err(Error::Precondition(format!(
                "generator valuation must be exact, got {other}"
            )))
        }
    };
    let implied = &gen_val / &Rational::integer(p as i64);
    Ok(TowerIdentityReport {
        level: k,
        identity_holds,
        generator_valuation: gen_val,
        implied_distance: implied,
    })
}

/// The (n, e, f, g, d) record of a finite extension of valued fields:
/// degree, ramification index, inertia degree, number of valuation
/// extensions, and the defect d = n / (e f g), which must be a power of the
/// residue characteristic exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub n: u64,
    pub e: u64,
    pub f: u64,
    pub g: u64,
    pub d: u64,
}

pub fn defect_report(prime: Prime, n: u64, e: u64, f: u64, g: u64) -> Result<DefectReport> {
    let efg = e
        .checked_mul(f)
        .and_then(|x| x.checked_mul(g))
        .ok_or_else(|| Error::ParamOutOfRange("e*f*g overflows".into()))?;
    if efg == 0 || n == 0 {
        return Err(Error::ParamOutOfRange("degrees must be positive".into()));
    }
    if n % efg != 0 {
        return Err(Error::Precondition(format!(
            "e*f*g = {efg} does not divide n = {n}"
        )));
    }
    let d = n / efg;
    if !is_power_of(d, prime.get()) {
        return Err(Error::Precondition(format!(
            "defect {d} is not a power of the characteristic exponent {prime}"
        )));
    }
    // fundamental inequality in the g-fold-equal reading: n >= g * e * f
    debug_assert!(n >= efg);
    Ok(DefectReport { n, e, f, g, d })
}

fn is_power_of(mut d: u64, p: u64) -> bool {
    if d == 0 {
        return false;
    }
    while d % p == 0 {
        d /= p;
    }
    d == 1
}

/// Product formula for the defect along a chain K < L < M with a unique
/// valuation extension: d(M|K) = d(M|L) * d(L|K).
pub fn defect_product_check(prime: Prime, d_mk: u64, d_ml: u64, d_lk: u64) -> Result<bool> {
    for d in [d_mk, d_ml, d_lk] {
        if !is_power_of(d, prime.get()) {
            return Err(Error::Precondition(format!(
                "{d} is not a power of {prime}"
            )));
        }
    }
    Ok(d_mk == d_ml * d_lk)
}

/// On-disk description of a tower: a base field plus one minimal-polynomial
/// source and declared generator valuation per step. Step polynomials may
/// reference earlier generators as `a1`, `a2`, ...; the expression parser
/// and builder live in the cli module.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct TowerDescription {
    pub base: TowerBaseDescription,
    pub steps: Vec<TowerStepDescription>,
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct TowerBaseDescription {
    pub prime: u64,
    pub working_precision: Rational,
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct TowerStepDescription {
    pub minpoly: String,
    pub gen_val: Rational,
}

/// The canonical Artin-Schreier tower over F_p((t)): first step
/// X^p - X - 1/t, later steps X^p - X + a_(i-1), with v(a_i) = -1/p^i.
pub fn build_as_tower(
    prime: Prime,
    levels: usize,
    working_precision: Rational,
) -> Result<Tower<HahnSeries>> {
    build_as_tower_with_constant(
        prime,
        levels,
        working_precision,
        HahnSeries::monomial(prime, 1, -Rational::one()),
    )
}

/// Tower builder with a configurable first-step constant; the catalog uses
/// 1/t, negative controls feed a perturbed constant.
pub fn build_as_tower_with_constant(
    prime: Prime,
    levels: usize,
    working_precision: Rational,
    first_constant: HahnSeries,
) -> Result<Tower<HahnSeries>> {
    let p = prime.get() as usize;
    let mut tower = Tower::over_laurent_series(prime, working_precision);
    for i in 1..=levels {
        let level = i - 1;
        let mut coeffs = vec![tower.zero_at(level); p + 1];
        if i == 1 {
            // X^p - X - c0
            coeffs[0] = tower.from_base(
                HahnSeries::zero(prime).sub(&first_constant)?,
                level,
            );
        } else {
            // X^p - X + a_(i-1)
            coeffs[0] = tower.generator(i - 1, level)?;
        }
        coeffs[1] = TowerElement::Base(HahnSeries::monomial(prime, -1, Rational::zero()));
        coeffs[1] = tower.lift(&coeffs[1], level);
        coeffs[p] = tower.one_at(level);
        let gen_val = -Rational::one()
            / Rational::integer((prime.get() as i64).pow(i as u32));
        tower = tower.extend(coeffs, gen_val)?;
    }
    Ok(tower)
}

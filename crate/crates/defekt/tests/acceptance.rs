//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (run with `-- --nocapture` to see them). Tolerances are zero
//! unless stated: the arithmetic is exact.

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand::rngs::StdRng;
use rand_chacha::ChaCha8Rng;

use defekt::catalog::{self, RunParams};
use defekt::cli;
use defekt::cuts::{
    classify_as_defect, cut_add, is_idempotent, Cut, CutKind, DefectClass, DenseGroup,
};
use defekt::error::Error;
use defekt::hahn::HahnSeries;
use defekt::mixedchar::{quasi_additivity_check, radical_tower_residual, RamifiedPadic};
use defekt::poly::{
    artin_schreier_scale, artin_schreier_translate, hensel_lift, newton_polygon, subst_affine,
    RationalWithVp, ValuedPoly,
};
use defekt::scalars::{Prime, PrimeFieldElt, Rational};
use defekt::towers::{as_tower_identity_check, build_as_tower, defect_report};
use defekt::valuation::{Precision, Valuation};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn neg_p_pow(p: u64, k: u32) -> Rational {
    -Rational::one() / Rational::integer((p as i64).pow(k))
}

fn theta_partial(pr: Prime, k: u32) -> HahnSeries {
    let mut acc = HahnSeries::zero(pr);
    for i in 1..=k {
        acc = acc
            .add(&HahnSeries::monomial(pr, 1, neg_p_pow(pr.get(), i)))
            .unwrap();
    }
    acc
}

/// X^p - X - c over the series field.
fn artin_schreier_poly(pr: Prime, c: &HahnSeries) -> ValuedPoly<HahnSeries> {
    let p = pr.get() as usize;
    let mut coeffs = vec![c.neg(), HahnSeries::monomial(pr, -1, Rational::zero())];
    for _ in 2..p {
        coeffs.push(HahnSeries::zero(pr));
    }
    coeffs.push(HahnSeries::one(pr));
    ValuedPoly::new(coeffs).unwrap()
}

fn assert_within(elapsed: Duration, budget_ms: u64, what: &str) {
    assert!(
        elapsed <= Duration::from_millis(budget_ms),
        "{what} took {elapsed:?}, budget {budget_ms} ms"
    );
}

#[test]
fn criterion_01_abhyankar_residual_identity() {
    let t0 = Instant::now();
    for p in [2u64, 3, 5] {
        let pr = prime(p);
        let one_over_t = HahnSeries::monomial(pr, 1, -Rational::one());
        for k in 1..=6u32 {
            let theta = theta_partial(pr, k);
            let residual = theta
                .frobenius()
                .sub(&theta)
                .unwrap()
                .sub(&one_over_t)
                .unwrap();
            let expect = HahnSeries::monomial(pr, -1, neg_p_pow(p, k));
            assert_eq!(residual, expect, "p={p} k={k}: residual is a single term");
            let gap = theta_partial(pr, k + 1).sub(&theta).unwrap();
            assert_eq!(
                gap.valuation(),
                Valuation::Exact(neg_p_pow(p, k + 1)),
                "p={p} k={k}: v(theta_(k+1) - theta_k)"
            );
        }
    }
    let elapsed = t0.elapsed();
    assert_within(elapsed, 1000, "criterion 1");
    println!(
        "acceptance 01 PASS: residuals theta_k^p - theta_k - 1/t = -t^(-1/p^k) exact, \
         p in {{2,3,5}}, k <= 6 ({elapsed:?})"
    );
}

#[test]
fn criterion_02_as_tower_identity() {
    let t0 = Instant::now();
    for p in [2u64, 3] {
        let tower = build_as_tower(prime(p), 4, Rational::integer(16)).unwrap();
        for k in 1..=4usize {
            let rep = as_tower_identity_check(&tower, k).unwrap();
            assert!(rep.identity_holds, "p={p} k={k}");
            assert_eq!(rep.generator_valuation, neg_p_pow(p, k as u32));
            assert_eq!(rep.implied_distance, neg_p_pow(p, k as u32 + 1));
        }
    }
    let elapsed = t0.elapsed();
    assert_within(elapsed, 5000, "criterion 2");
    println!(
        "acceptance 02 PASS: tower identity eta_k^p - 1/t = a_k exact (so \
         (eta - eta_k)^p = -a_k), p in {{2,3}}, k <= 4 ({elapsed:?})"
    );
}

#[test]
fn criterion_03_transform_chain() {
    let t0 = Instant::now();
    for p in [2u64, 3, 5] {
        let pr = prime(p);
        let vb = rat(1, p as i64 - 1);
        let b = HahnSeries::monomial(pr, 1, vb.clone());
        // b^(p-1) = t exactly
        let mut bp = HahnSeries::one(pr);
        for _ in 0..p - 1 {
            bp = bp.mul(&b).unwrap();
        }
        assert_eq!(bp, HahnSeries::monomial(pr, 1, Rational::one()));
        assert_eq!(b.valuation(), Valuation::Exact(vb.clone()));

        // X^p - tX - 1  --scale-->  X^p - X - 1/b^p  --translate-->  X^p - X - 1/b
        let t = HahnSeries::monomial(pr, 1, Rational::one());
        let mut coeffs = vec![HahnSeries::monomial(pr, -1, Rational::zero()), t.neg()];
        for _ in 2..p as usize {
            coeffs.push(HahnSeries::zero(pr));
        }
        coeffs.push(HahnSeries::one(pr));
        let f = ValuedPoly::new(coeffs).unwrap();
        let scaled = artin_schreier_scale(&f, &b).unwrap();
        let expect_const = HahnSeries::monomial(pr, -1, -(Rational::integer(p as i64) * &vb));
        assert_eq!(scaled.coeff(0).unwrap(), &expect_const, "p={p}: -1/b^p");
        assert_eq!(
            scaled.coeff(1).unwrap(),
            &HahnSeries::monomial(pr, -1, Rational::zero()),
            "p={p}: linear term -1"
        );
        let c = b.inv(&Rational::zero()).unwrap();
        let a = scaled.coeff(0).unwrap().neg();
        let translated = artin_schreier_translate(&a, &c).unwrap();
        assert_eq!(
            translated,
            HahnSeries::monomial(pr, 1, -&vb),
            "p={p}: constant becomes 1/b"
        );
    }
    let elapsed = t0.elapsed();
    assert_within(elapsed, 1000, "criterion 3");
    println!(
        "acceptance 03 PASS: X^p - tX - 1 maps to X^p - X - 1/b exactly with \
         v(b) = 1/(p-1) ({elapsed:?})"
    );
}

#[test]
fn criterion_04_sqrt_substitutions() {
    let pr = prime(2);
    let rp = |q: Rational| RationalWithVp::new(pr, q);
    let quad =
        |c: Rational| ValuedPoly::new(vec![rp(c), rp(Rational::zero()), rp(Rational::one())]);
    let g3 = subst_affine(
        &quad(Rational::integer(-3)).unwrap(),
        &Rational::one(),
        &Rational::integer(-2),
        &Rational::integer(4),
    )
    .unwrap();
    let coeffs: Vec<Rational> = g3.coeffs().iter().map(|c| c.value().clone()).collect();
    assert_eq!(coeffs, vec![rat(-1, 2), rat(-1, 1), rat(1, 1)]);

    let gi = subst_affine(
        &quad(Rational::integer(1)).unwrap(),
        &Rational::one(),
        &Rational::integer(-2),
        &Rational::integer(4),
    )
    .unwrap();
    let coeffs: Vec<Rational> = gi.coeffs().iter().map(|c| c.value().clone()).collect();
    assert_eq!(coeffs, vec![rat(1, 2), rat(-1, 1), rat(1, 1)]);
    println!(
        "acceptance 04 PASS: Y^2 - 3 and Y^2 + 1 reproduce X^2 - X - 1/2 and \
         X^2 - X + 1/2 exactly"
    );
}

#[test]
fn criterion_05_quasi_additivity() {
    let t0 = Instant::now();
    for p in [2u64, 3, 5] {
        let pr = prime(p);
        let mut rng = ChaCha8Rng::seed_from_u64(50 + p);
        for trial in 0..200 {
            let n = rng.random_range(2..=5usize);
            let mut items = Vec::with_capacity(n);
            for _ in 0..n {
                let digit = rng.random_range(1..p as u32);
                let denom = (p as i64).pow(rng.random_range(0..=2));
                let lo = -denom / p as i64;
                let num = rng.random_range(lo..2 * denom);
                items.push(RamifiedPadic::monomial(pr, digit, rat(num, denom)).unwrap());
            }
            let rep = quasi_additivity_check(&items).unwrap();
            assert!(rep.holds, "p={p} trial={trial}: witness {}", rep.witness_valuation);
        }
    }
    let elapsed = t0.elapsed();
    assert_within(elapsed, 10_000, "criterion 5");
    println!(
        "acceptance 05 PASS: (sum c_i)^p - sum c_i^p has valuation >= 0 in 200 \
         randomized trials for each p in {{2,3,5}} ({elapsed:?})"
    );
}

#[test]
fn criterion_06_qp_tower_residuals() {
    let t0 = Instant::now();
    for p in [2u64, 3] {
        for k in 1..=4u32 {
            let rep = radical_tower_residual(prime(p), k, None).unwrap();
            assert_eq!(rep.valuation, neg_p_pow(p, k), "p={p} k={k}");
        }
    }
    let elapsed = t0.elapsed();
    assert_within(elapsed, 5000, "criterion 6");
    println!(
        "acceptance 06 PASS: v(theta_k^p - theta_k - 1/p) = -1/p^k exact, \
         p in {{2,3}}, k <= 4 ({elapsed:?})"
    );
}

#[test]
fn criterion_07_polygon_hensel_agreement() {
    // catalog polynomial set: polygons certify the documented valuations and
    // every lift lands on a certified slope
    for p in [2u64, 3, 5] {
        let pr = prime(p);
        let one_over_t = HahnSeries::monomial(pr, 1, -Rational::one());
        let f = artin_schreier_poly(pr, &one_over_t);
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.root_valuations(), vec![(neg_p_pow(p, 1), p as usize)]);

        // X^p - X - t: residue-split case, lift from 0
        let f = artin_schreier_poly(pr, &HahnSeries::monomial(pr, 1, Rational::one()));
        let np = newton_polygon(&f).unwrap();
        let lift = hensel_lift(&f, &HahnSeries::zero(pr), &Rational::integer(6)).unwrap();
        let v = lift.root.valuation().exact().unwrap().clone();
        assert!(np.certifies(&v), "p={p}: lifted valuation {v} certified");

        // X^p - tX - 1: all roots are units
        let t = HahnSeries::monomial(pr, 1, Rational::one());
        let mut coeffs = vec![HahnSeries::monomial(pr, -1, Rational::zero()), t.neg()];
        for _ in 2..p as usize {
            coeffs.push(HahnSeries::zero(pr));
        }
        coeffs.push(HahnSeries::one(pr));
        let np = newton_polygon(&ValuedPoly::new(coeffs).unwrap()).unwrap();
        assert_eq!(np.root_valuations(), vec![(Rational::zero(), p as usize)]);
    }
    for p in [3u64, 5] {
        // X^2 - (1+t): unit square root, classical lift at 1
        let pr = prime(p);
        let one_plus_t = HahnSeries::one(pr)
            .add(&HahnSeries::monomial(pr, 1, Rational::one()))
            .unwrap();
        let f = ValuedPoly::new(vec![
            one_plus_t.neg(),
            HahnSeries::zero(pr),
            HahnSeries::one(pr),
        ])
        .unwrap();
        let np = newton_polygon(&f).unwrap();
        let lift = hensel_lift(&f, &HahnSeries::one(pr), &Rational::integer(6)).unwrap();
        let v = lift.root.valuation().exact().unwrap().clone();
        assert!(np.certifies(&v));
        assert_eq!(np.root_valuations(), vec![(Rational::zero(), 2)]);
    }
    {
        // tX^2 + X + t over F_5
        let pr = prime(5);
        let t = HahnSeries::monomial(pr, 1, Rational::one());
        let f = ValuedPoly::new(vec![t.clone(), HahnSeries::one(pr), t]).unwrap();
        let np = newton_polygon(&f).unwrap();
        assert_eq!(
            np.root_valuations(),
            vec![(Rational::one(), 1), (rat(-1, 1), 1)]
        );
    }
    for p in [2u64, 3] {
        // X^p - X - 1/p over the ramified p-adic domain
        let pr = prime(p);
        let cap = Rational::integer(2);
        let c0 = RamifiedPadic::from_rational(pr, &rat(-1, p as i64), &cap).unwrap();
        let c1 = RamifiedPadic::from_rational(pr, &Rational::integer(-1), &cap).unwrap();
        let mut coeffs = vec![c0, c1];
        for _ in 2..p as usize {
            coeffs.push(RamifiedPadic::zero(pr));
        }
        coeffs.push(RamifiedPadic::one(pr));
        let np = newton_polygon(&ValuedPoly::new(coeffs).unwrap()).unwrap();
        assert_eq!(np.root_valuations(), vec![(neg_p_pow(p, 1), p as usize)]);
    }
    {
        // X^2 - X - 1/2 and X^2 - X + 1/2 over (Q, v_2)
        let pr = prime(2);
        for c in [rat(-1, 2), rat(1, 2)] {
            let f = ValuedPoly::new(vec![
                RationalWithVp::new(pr, c),
                RationalWithVp::new(pr, Rational::integer(-1)),
                RationalWithVp::new(pr, Rational::one()),
            ])
            .unwrap();
            let np = newton_polygon(&f).unwrap();
            assert_eq!(np.root_valuations(), vec![(rat(-1, 2), 2)]);
        }
    }

    // 100 random product polynomials of degree <= 5 with exact-valuation
    // coefficients: polygon = multiset of root valuations; a perturbed start
    // lifts back to a certified valuation.
    let mut rng = StdRng::seed_from_u64(777);
    let mut lifted = 0u32;
    for trial in 0..100 {
        let p = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let pr = prime(p);
        let deg = rng.random_range(2..=5usize);
        // distinct monomial roots c * t^q
        let mut roots: Vec<(i64, Rational)> = Vec::new();
        while roots.len() < deg {
            let c = rng.random_range(1..p as i64);
            let q = rat(rng.random_range(-4i64..5), rng.random_range(1i64..4));
            if !roots.iter().any(|(c0, q0)| *c0 == c && q0 == &q) {
                roots.push((c, q));
            }
        }
        let mut f = ValuedPoly::new(vec![HahnSeries::one(pr)]).unwrap();
        for (c, q) in &roots {
            let root = HahnSeries::monomial(pr, *c, q.clone());
            let linear = ValuedPoly::new(vec![root.neg(), HahnSeries::one(pr)]).unwrap();
            // multiply the accumulating product by (X - root)
            let mut coeffs = vec![HahnSeries::zero(pr); f.degree() + 2];
            for (i, a) in f.coeffs().iter().enumerate() {
                for (j, b) in linear.coeffs().iter().enumerate() {
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    let prod = a.mul(b).unwrap();
                    coeffs[i + j] = coeffs[i + j].add(&prod).unwrap();
                }
            }
            f = ValuedPoly::new(coeffs).unwrap();
        }
        let np = newton_polygon(&f).unwrap();
        // multiset of certified valuations == multiset of root valuations
        let mut expect: Vec<Rational> = roots.iter().map(|(_, q)| q.clone()).collect();
        expect.sort_by(|a, b| b.cmp_val(a));
        let mut got: Vec<Rational> = Vec::new();
        for (v, m) in np.root_valuations() {
            for _ in 0..m {
                got.push(v.clone());
            }
        }
        assert_eq!(got, expect, "trial {trial}: polygon valuations");

        // lift a perturbed start back to the first root
        let (c0, q0) = &roots[0];
        let sep: Rational = roots[1..]
            .iter()
            .map(|(_, qi)| q0.clone().min(qi.clone()))
            .fold(Rational::zero(), |acc, v| acc + v);
        let delta_exp = sep.clone().max(Rational::zero()) + Rational::integer(3) + q0.abs();
        let start = HahnSeries::monomial(pr, *c0, q0.clone())
            .add(&HahnSeries::monomial(pr, 1, delta_exp.clone()))
            .unwrap();
        let target = &delta_exp + &Rational::integer(2);
        if let Ok(lift) = hensel_lift(&f, &start, &target) {
            let v = lift.root.valuation().exact().unwrap().clone();
            assert!(np.certifies(&v), "trial {trial}: lifted valuation {v}");
            assert_eq!(&v, q0, "trial {trial}: lift stays on the nearest root");
            lifted += 1;
        } else {
            panic!("trial {trial}: refined hypothesis should hold by construction");
        }
    }
    assert_eq!(lifted, 100);
    println!(
        "acceptance 07 PASS: polygon certificates match root multisets and every \
         lifted root valuation is certified (catalog set + 100 random polynomials)"
    );
}

#[test]
fn criterion_08_hensel_vs_binomial_oracle() {
    let pr = prime(3);
    let one_plus_t = HahnSeries::one(pr)
        .add(&HahnSeries::monomial(pr, 1, Rational::one()))
        .unwrap();
    let f = ValuedPoly::new(vec![
        one_plus_t.neg(),
        HahnSeries::zero(pr),
        HahnSeries::one(pr),
    ])
    .unwrap();
    let lift = hensel_lift(&f, &HahnSeries::one(pr), &Rational::integer(8)).unwrap();

    // independent oracle: (1+t)^(1/2) by exact rational binomial coefficients
    let mut oracle = HahnSeries::zero_to_precision(pr, Rational::integer(8));
    let mut coeff = Rational::one();
    for n in 0..8i64 {
        if n > 0 {
            coeff = coeff * (rat(1, 2) - Rational::integer(n - 1));
            coeff = coeff.checked_div(&Rational::integer(n)).unwrap();
        }
        let c = HahnSeries::constant_from_rational(pr, &coeff).unwrap();
        let term = c
            .mul(&HahnSeries::monomial(pr, 1, Rational::integer(n)))
            .unwrap();
        oracle = oracle.add(&term).unwrap();
    }
    assert!(
        lift.root.eq_to_shared_precision(&oracle),
        "root {} vs oracle {}",
        lift.root,
        oracle
    );
    // the shared precision really is t^8
    assert!(lift.root.precision() >= &Precision::Finite(Rational::integer(8)));
    println!(
        "acceptance 08 PASS: lifted square root of 1 + t matches the binomial \
         oracle term-exactly through t^8"
    );
}

#[test]
fn criterion_09_defect_bookkeeping() {
    // every catalog defect record obeys n = d e f g with d a p-power
    for info in catalog::list_examples() {
        let params = RunParams {
            prime: 2,
            depth: 3,
            precision: None,
            seed: 0,
        };
        let rep = catalog::run_example(info.id, &params).unwrap();
        assert!(rep.passed, "{} must pass", info.id);
        if let Some(d) = &rep.defect_report {
            assert_eq!(d.n, d.d * d.e * d.f * d.g, "{}", info.id);
            let mut q = d.d;
            while q % 2 == 0 {
                q /= 2;
            }
            assert_eq!(q, 1, "{}: defect is a 2-power", info.id);
        }
    }
    // product formula on the composed tower of the lifting example is part of
    // that entry's checks; assert the negative control separately
    assert!(matches!(
        defect_report(prime(2), 6, 2, 1, 1),
        Err(Error::Precondition(_))
    ));
    println!(
        "acceptance 09 PASS: all catalog defect records satisfy n = d*e*f*g with \
         d a p-power; (6,2,1,1) at p = 2 is rejected"
    );
}

#[test]
fn criterion_10_cut_suite() {
    let group = DenseGroup::p_fractions(prime(2), Rational::one()).unwrap();
    let lt = |q: Rational| Cut::new(CutKind::LessThan(q), group.clone());
    let le = |q: Rational| Cut::new(CutKind::LessOrEqual(q), group.clone());

    // exhaustive idempotency scan over the documented bounds
    let bounds = [
        rat(-2, 1),
        rat(-1, 1),
        rat(-1, 2),
        rat(0, 1),
        rat(1, 2),
        rat(1, 1),
        rat(2, 1),
    ];
    let mut idempotent = Vec::new();
    for b in &bounds {
        if is_idempotent(&lt(b.clone())) {
            idempotent.push(format!("lt:{b}"));
        }
        if is_idempotent(&le(b.clone())) {
            idempotent.push(format!("le:{b}"));
        }
    }
    if is_idempotent(&Cut::new(CutKind::Empty, group.clone())) {
        idempotent.push("empty".into());
    }
    if is_idempotent(&Cut::new(CutKind::All, group.clone())) {
        idempotent.push("all".into());
    }
    idempotent.sort();
    assert_eq!(idempotent, vec!["all", "empty", "le:0", "lt:0"]);

    assert_eq!(
        classify_as_defect(&lt(Rational::zero())).unwrap(),
        DefectClass::Independent
    );
    for q in [rat(-1, 2), rat(-1, 8), rat(-3, 1)] {
        assert_eq!(
            classify_as_defect(&lt(q)).unwrap(),
            DefectClass::Dependent
        );
    }
    assert!(matches!(
        classify_as_defect(&le(Rational::zero())),
        Err(Error::Precondition(_))
    ));

    for q in [rat(-1, 2), rat(3, 4), rat(2, 1)] {
        let sum = cut_add(&lt(q.clone()), &lt(q.clone())).unwrap();
        assert_eq!(sum, lt(&q + &q));
    }
    println!(
        "acceptance 10 PASS: exactly four idempotent cuts; lt:0 independent, \
         lt:q<0 dependent, le:0 rejected; lt:q + lt:q = lt:2q"
    );
}

#[test]
fn criterion_11_algebra_property_suite() {
    let mut rng = StdRng::seed_from_u64(1111);

    // series domain: 1000 trials of ring axioms at shared precision
    for _ in 0..1000 {
        let p = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let pr = prime(p);
        let mk = |rng: &mut StdRng, lead: i64| {
            let mut s = HahnSeries::monomial(pr, 1, rat(lead, 2));
            for _ in 0..rng.random_range(0..3usize) {
                let c = rng.random_range(1..p as i64);
                let e = rat(rng.random_range(lead + 1..12), 2);
                s = s.add(&HahnSeries::monomial(pr, c, e)).unwrap();
            }
            if rng.random_bool(0.5) {
                s.truncate(&Rational::integer(9)).unwrap()
            } else {
                s
            }
        };
        // distinct leading exponents keep every intermediate valuation exact
        let a = mk(&mut rng, -2);
        let b = mk(&mut rng, 0);
        let c = mk(&mut rng, 1);
        let ab_c = a.add(&b).unwrap().add(&c).unwrap();
        let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
        assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        let abc1 = a.mul(&b).unwrap().mul(&c).unwrap();
        let abc2 = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert_eq!(abc1, abc2);
        assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        assert!(lhs.eq_to_shared_precision(&rhs), "distributivity");
        // valuation arithmetic
        let va = a.valuation().exact().unwrap().clone();
        let vb = b.valuation().exact().unwrap().clone();
        assert_eq!(
            a.mul(&b).unwrap().valuation(),
            Valuation::Exact(&va + &vb)
        );
        // Frobenius round trip and homomorphism are exact
        assert_eq!(a.frobenius().pth_root(), a);
        assert_eq!(
            a.add(&b).unwrap().frobenius(),
            a.frobenius().add(&b.frobenius()).unwrap()
        );
        assert_eq!(
            a.mul(&b).unwrap().frobenius(),
            a.frobenius().mul(&b.frobenius()).unwrap()
        );
    }

    // p-adic digit domain: 1000 trials on exact nonnegative-digit values
    for _ in 0..1000 {
        let p = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let pr = prime(p);
        let mk = |rng: &mut StdRng| {
            let mut x = RamifiedPadic::zero(pr);
            for _ in 0..rng.random_range(1..3usize) {
                let d = rng.random_range(1..p as u32);
                let den = (p as i64).pow(rng.random_range(0..2));
                let e = rat(rng.random_range(-2i64..4), den);
                x = x.add(&RamifiedPadic::monomial(pr, d, e).unwrap()).unwrap();
            }
            x
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let c = mk(&mut rng);
        assert_eq!(
            a.add(&b).unwrap().add(&c).unwrap(),
            a.add(&b.add(&c).unwrap()).unwrap()
        );
        assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    // tower domain: 1000 trials at two levels over F_2((t)) and F_3((t))
    for p in [2u64, 3] {
        let tower = build_as_tower(prime(p), 2, Rational::integer(12)).unwrap();
        for _ in 0..500 {
            let mk = |rng: &mut StdRng| {
                let mut x = tower.zero_at(2);
                for i in 1..=2usize {
                    if rng.random_bool(0.8) {
                        let c = rng.random_range(0..p as i64);
                        let e = rat(rng.random_range(-1i64..2), 1);
                        let base = HahnSeries::monomial(tower.prime(), c, e);
                        let term = tower
                            .mul(&tower.from_base(base, 2), &tower.generator(i, 2).unwrap())
                            .unwrap();
                        x = tower.add(&x, &term).unwrap();
                    }
                }
                x
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let c = mk(&mut rng);
            let lhs = tower.add(&tower.add(&a, &b).unwrap(), &c).unwrap();
            let rhs = tower.add(&a, &tower.add(&b, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let lhs = tower.mul(&tower.mul(&a, &b).unwrap(), &c).unwrap();
            let rhs = tower.mul(&a, &tower.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(tower.mul(&a, &b).unwrap(), tower.mul(&b, &a).unwrap());
            let lhs = tower.mul(&a, &tower.add(&b, &c).unwrap()).unwrap();
            let rhs = tower
                .add(&tower.mul(&a, &b).unwrap(), &tower.mul(&a, &c).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
    println!(
        "acceptance 11 PASS: 1000 ring-axiom trials per domain (series, p-adic, \
         tower) with zero failures; Frobenius round trips exact"
    );
}

#[test]
fn criterion_12_cli_contract() {
    use std::process::Command;
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_defekt"))
            .args(args)
            .env_remove("DEFEKT_PREC_DEFAULT")
            .output()
            .expect("binary runs")
    };

    // golden-file JSON equality
    let cases: [(&[&str], &str); 4] = [
        (
            &["example", "abhyankar", "-p", "2", "-k", "5", "--json"],
            include_str!("golden/example_abhyankar.json"),
        ),
        (
            &["example", "transform", "-p", "3", "-k", "3", "--json"],
            include_str!("golden/example_transform.json"),
        ),
        (
            &["np", "-p", "3", "--json", "X^3 - X - inv(t)"],
            include_str!("golden/np_artin_schreier.json"),
        ),
        (
            &["classify", "-p", "2", "--json", "lt:0"],
            include_str!("golden/classify_lt0.json"),
        ),
    ];
    for (args, golden) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            golden,
            "golden mismatch for {args:?}"
        );
    }

    // parse round trip on 500 generated expressions
    let mut rng = StdRng::seed_from_u64(12);
    let mut count = 0;
    while count < 500 {
        let e = random_expr(&mut rng, 4, count % 3 == 0);
        let printed = e.to_string();
        let reparsed = cli::parse(&printed).expect("printed expressions reparse");
        assert_eq!(reparsed, e, "roundtrip mismatch for {printed:?}");
        count += 1;
    }

    // exit-code contract
    assert_eq!(run(&["classify", "lt:0"]).status.code(), Some(0));
    assert_eq!(run(&["classify", "le:0"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "banana"]).status.code(), Some(2));
    assert_eq!(run(&["example", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["eval", "-p", "2", "t + p^(1)"]).status.code(),
        Some(1)
    );
    println!(
        "acceptance 12 PASS: golden JSON equality, 500 print/parse round trips, \
         exit-code contract"
    );
}

fn random_expr(rng: &mut StdRng, depth: u32, padic: bool) -> cli::Expr {
    use cli::{BinOp, Expr, Func};
    if depth == 0 {
        match rng.random_range(0..3) {
            0 => Expr::Rational(rat(rng.random_range(-9i64..10), rng.random_range(1i64..8))),
            1 => {
                let q = rat(rng.random_range(-8i64..9), rng.random_range(1i64..5));
                if padic {
                    Expr::PPow(q)
                } else {
                    Expr::TPow(q)
                }
            }
            _ => {
                if padic {
                    Expr::PPow(Rational::one())
                } else {
                    Expr::X
                }
            }
        }
    } else {
        match rng.random_range(0..4) {
            0 => Expr::Binary(
                match rng.random_range(0..3) {
                    0 => BinOp::Add,
                    1 => BinOp::Sub,
                    _ => BinOp::Mul,
                },
                Box::new(random_expr(rng, depth - 1, padic)),
                Box::new(random_expr(rng, depth - 1, padic)),
            ),
            1 => Expr::Call(
                match rng.random_range(0..5) {
                    0 => Func::Val,
                    1 => Func::Inv,
                    2 => Func::Frob,
                    3 => Func::Proot,
                    _ => Func::Neg,
                },
                Box::new(random_expr(rng, depth - 1, padic)),
            ),
            2 => Expr::IntPow(
                Box::new(random_expr(rng, depth - 1, padic)),
                rng.random_range(-3i64..6),
            ),
            _ => random_expr(rng, depth - 1, padic),
        }
    }
}

// keep the scalars imports honest: the suite touches them via the oracles
#[allow(dead_code)]
fn _uses(e: PrimeFieldElt) -> u64 {
    e.value()
}

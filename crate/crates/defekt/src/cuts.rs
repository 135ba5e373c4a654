//! Cuts (initial segments) of dense archimedean value groups, cut addition,
//! idempotency, and the dependent/independent classification of degree-p
//! defect extensions by the shape of their distance set.
//!
//! Only dense subgroups of the rationals are admitted; over a discrete group
//! every finite separable extension is defectless and the classifier is
//! vacuous. Cofinality of finite evidence in a cut is reported as
//! "consistent with", never as proved: no finite list can certify it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{Prime, Rational};

/// A dense subgroup of the rationals: either Z[1/p] scaled by a nonzero
/// rational, or all of Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenseGroup {
    PFractions { prime: Prime, unit: Rational },
    Rationals,
}

impl DenseGroup {
    /// Z[1/p] * unit; rejects unit = 0 (the trivial group is not dense).
    pub fn p_fractions(prime: Prime, unit: Rational) -> Result<Self> {
        if unit.is_zero() {
            return Err(Error::Precondition(
                "unit must be nonzero; the trivial group is not dense".into(),
            ));
        }
        Ok(DenseGroup::PFractions { prime, unit })
    }

    pub fn rationals() -> Self {
        DenseGroup::Rationals
    }

    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            DenseGroup::Rationals => true,
            DenseGroup::PFractions { prime, unit } => {
                let scaled = q / unit;
                let p = BigInt::from(prime.get());
                let mut den = scaled.denom().clone();
                while den.mod_floor(&p).is_zero() {
                    den /= &p;
                }
                den == BigInt::from(1)
            }
        }
    }
}

impl fmt::Display for DenseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenseGroup::PFractions { prime, unit } => write!(f, "Z[1/{prime}]*({unit})"),
            DenseGroup::Rationals => write!(f, "Q"),
        }
    }
}

/// Shape of an initial segment; the bound of `LessThan`/`LessOrEqual` need
/// not lie in the group (the left set is always read inside the group).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutKind {
    Empty,
    LessThan(Rational),
    LessOrEqual(Rational),
    All,
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutKind::Empty => write!(f, "empty"),
            CutKind::LessThan(q) => write!(f, "lt:{q}"),
            CutKind::LessOrEqual(q) => write!(f, "le:{q}"),
            CutKind::All => write!(f, "all"),
        }
    }
}

impl FromStr for CutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "empty" => Ok(CutKind::Empty),
            "all" => Ok(CutKind::All),
            _ => {
                if let Some(rest) = s.strip_prefix("lt:") {
                    Ok(CutKind::LessThan(rest.parse()?))
                } else if let Some(rest) = s.strip_prefix("le:") {
                    Ok(CutKind::LessOrEqual(rest.parse()?))
                } else {
                    Err(Error::Parse {
                        offset: 0,
                        message: format!(
                            "expected cut literal (empty | lt:q | le:q | all), got {s:?}"
                        ),
                    })
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub kind: CutKind,
    pub group: DenseGroup,
}

impl Cut {
    pub fn new(kind: CutKind, group: DenseGroup) -> Self {
        Cut { kind, group }
    }

    /// Membership of a group element in the left set.
    pub fn left_contains(&self, q: &Rational) -> bool {
        if !self.group.contains(q) {
            return false;
        }
        match &self.kind {
            CutKind::Empty => false,
            CutKind::LessThan(b) => q < b,
            CutKind::LessOrEqual(b) => q <= b,
            CutKind::All => true,
        }
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// Setwise sum of two initial segments of the same dense group.
pub fn cut_add(a: &Cut, b: &Cut) -> Result<Cut> {
    if a.group != b.group {
        return Err(Error::GroupMismatch);
    }
    let kind = match (&a.kind, &b.kind) {
        // no summands on one side: the sum is empty
        (CutKind::Empty, _) | (_, CutKind::Empty) => CutKind::Empty,
        (CutKind::All, _) | (_, CutKind::All) => CutKind::All,
        (CutKind::LessThan(x), CutKind::LessThan(y)) => CutKind::LessThan(x + y),
        (CutKind::LessThan(x), CutKind::LessOrEqual(y)) => CutKind::LessThan(x + y),
        (CutKind::LessOrEqual(x), CutKind::LessThan(y)) => CutKind::LessThan(x + y),
        (CutKind::LessOrEqual(x), CutKind::LessOrEqual(y)) => CutKind::LessOrEqual(x + y),
    };
    Ok(Cut::new(kind, a.group.clone()))
}

/// Whether the cut is additively idempotent. In a dense archimedean group
/// exactly four cuts are: empty, lt:0, le:0 and all.
pub fn is_idempotent(c: &Cut) -> bool {
    match cut_add(c, c) {
        Ok(sum) => sum == *c,
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DefectClass {
    Independent,
    Dependent,
}

impl fmt::Display for DefectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefectClass::Independent => write!(f, "Independent"),
            DefectClass::Dependent => write!(f, "Dependent"),
        }
    }
}

/// Classify the distance set of a degree-p defect generator. Preconditions
/// follow the inertia-field argument: the set is nonempty, proper, and
/// entirely negative (a start value with v >= 0 would split the polynomial
/// in the absolute inertia field, contradicting the defect). A cut passing
/// those gates is Independent exactly when it is additively idempotent,
/// which in a dense archimedean group pins it to lt:0.
pub fn classify_as_defect(c: &Cut) -> Result<DefectClass> {
    match &c.kind {
        CutKind::Empty => {
            return Err(Error::Precondition(
                "distance set is empty; a defect generator always has distances".into(),
            ))
        }
        CutKind::All => {
            return Err(Error::Precondition(
                "distance set is the whole group: the generator lies in the completion"
                    .into(),
            ))
        }
        CutKind::LessThan(b) => {
            if b > &Rational::zero() {
                return Err(Error::Precondition(format!(
                    "left set reaches {b} > 0, but distance sets of degree-p defect generators are negative"
                )));
            }
        }
        CutKind::LessOrEqual(b) => {
            if b >= &Rational::zero() {
                return Err(Error::Precondition(format!(
                    "left set contains {b} >= 0, but distance sets of degree-p defect generators are negative"
                )));
            }
        }
    }
    Ok(if is_idempotent(c) {
        DefectClass::Independent
    } else {
        DefectClass::Dependent
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub label: String,
    pub distance: Rational,
}

/// A claimed distance set together with finitely many computed distances
/// supporting it.
#[derive(Debug, Clone)]
pub struct DistanceEvidence {
    pub items: Vec<EvidenceItem>,
    pub claimed: Cut,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvidenceReport {
    pub items: usize,
    pub strictly_increasing: bool,
    pub within_cut: bool,
    pub cofinality: String,
}

/// Validate evidence: at least two strictly increasing distances, all inside
/// the claimed cut's left set. For a bounded claim the report states
/// consistency with cofinality only.
pub fn evidence_check(ev: &DistanceEvidence) -> Result<EvidenceReport> {
    if ev.items.len() < 2 {
        return Err(Error::Precondition(
            "need at least two distances as evidence".into(),
        ));
    }
    for w in ev.items.windows(2) {
        if w[1].distance <= w[0].distance {
            return Err(Error::Precondition(format!(
                "distances not strictly increasing: {} ({}) then {} ({})",
                w[0].distance, w[0].label, w[1].distance, w[1].label
            )));
        }
    }
    for item in &ev.items {
        if !ev.claimed.left_contains(&item.distance) {
            return Err(Error::Precondition(format!(
                "distance {} ({}) lies outside the claimed cut {}",
                item.distance, item.label, ev.claimed
            )));
        }
    }
    let cofinality = match &ev.claimed.kind {
        CutKind::LessThan(b) => format!(
            "consistent with cofinality toward {b} on the tested range; finite evidence cannot prove cofinality"
        ),
        CutKind::LessOrEqual(b) => format!("bounded evidence below {b}"),
        CutKind::All => "unbounded claim; evidence consistent".to_string(),
        CutKind::Empty => unreachable!("nonempty evidence inside an empty cut"),
    };
    Ok(EvidenceReport {
        items: ev.items.len(),
        strictly_increasing: true,
        within_cut: true,
        cofinality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand::rngs::StdRng;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn group2() -> DenseGroup {
        DenseGroup::p_fractions(p(2), Rational::one()).unwrap()
    }

    fn lt(q: Rational) -> Cut {
        Cut::new(CutKind::LessThan(q), group2())
    }

    fn le(q: Rational) -> Cut {
        Cut::new(CutKind::LessOrEqual(q), group2())
    }

    #[test]
    fn group_membership() {
        let g = group2();
        assert!(g.contains(&r(-3, 8)));
        assert!(g.contains(&r(5, 1)));
        assert!(!g.contains(&r(1, 3)));
        assert!(DenseGroup::rationals().contains(&r(1, 3)));
        assert!(DenseGroup::p_fractions(p(2), Rational::zero()).is_err());
    }

    #[test]
    fn cut_add_table() {
        let zero = lt(r(0, 1));
        assert_eq!(cut_add(&zero, &zero).unwrap(), zero);
        let q = lt(r(3, 4));
        assert_eq!(cut_add(&q, &q).unwrap(), lt(r(3, 2)));
        let empty = Cut::new(CutKind::Empty, group2());
        let all = Cut::new(CutKind::All, group2());
        assert_eq!(cut_add(&empty, &all).unwrap().kind, CutKind::Empty);
        assert_eq!(cut_add(&all, &q).unwrap().kind, CutKind::All);
        assert_eq!(
            cut_add(&le(r(1, 2)), &le(r(1, 4))).unwrap(),
            le(r(3, 4))
        );
        assert_eq!(
            cut_add(&lt(r(1, 2)), &le(r(1, 4))).unwrap(),
            lt(r(3, 4))
        );
        let other_group = Cut::new(CutKind::All, DenseGroup::rationals());
        assert_eq!(cut_add(&all, &other_group), Err(Error::GroupMismatch));
    }

    #[test]
    fn exactly_four_idempotent_cuts() {
        let bounds = [r(-2, 1), r(-1, 1), r(-1, 2), r(0, 1), r(1, 2), r(1, 1), r(2, 1)];
        let mut found = Vec::new();
        for b in &bounds {
            if is_idempotent(&lt(b.clone())) {
                found.push(format!("lt:{b}"));
            }
            if is_idempotent(&le(b.clone())) {
                found.push(format!("le:{b}"));
            }
        }
        if is_idempotent(&Cut::new(CutKind::Empty, group2())) {
            found.push("empty".into());
        }
        if is_idempotent(&Cut::new(CutKind::All, group2())) {
            found.push("all".into());
        }
        found.sort();
        assert_eq!(found, vec!["all", "empty", "le:0", "lt:0"]);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_as_defect(&lt(r(0, 1))).unwrap(),
            DefectClass::Independent
        );
        assert_eq!(
            classify_as_defect(&lt(r(-1, 2))).unwrap(),
            DefectClass::Dependent
        );
        assert_eq!(
            classify_as_defect(&le(r(-1, 2))).unwrap(),
            DefectClass::Dependent
        );
        assert!(matches!(
            classify_as_defect(&le(r(0, 1))),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            classify_as_defect(&lt(r(1, 2))),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            classify_as_defect(&Cut::new(CutKind::Empty, group2())),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            classify_as_defect(&Cut::new(CutKind::All, group2())),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dependent_for_all_tested_negative_bounds() {
        for n in 1..=8i64 {
            let q = Rational::new(-1, 1 << n).unwrap();
            assert_eq!(classify_as_defect(&lt(q)).unwrap(), DefectClass::Dependent);
        }
    }

    #[test]
    fn evidence_examples() {
        let ev = DistanceEvidence {
            items: vec![
                EvidenceItem {
                    label: "k=1".into(),
                    distance: r(-1, 4),
                },
                EvidenceItem {
                    label: "k=2".into(),
                    distance: r(-1, 8),
                },
                EvidenceItem {
                    label: "k=3".into(),
                    distance: r(-1, 16),
                },
            ],
            claimed: lt(r(0, 1)),
        };
        let rep = evidence_check(&ev).unwrap();
        assert!(rep.strictly_increasing && rep.within_cut);
        assert!(rep.cofinality.contains("consistent with cofinality"));

        let flat = DistanceEvidence {
            items: vec![
                EvidenceItem {
                    label: "a".into(),
                    distance: r(-1, 4),
                },
                EvidenceItem {
                    label: "b".into(),
                    distance: r(-1, 4),
                },
            ],
            claimed: lt(r(0, 1)),
        };
        assert!(matches!(
            evidence_check(&flat),
            Err(Error::Precondition(_))
        ));

        let outside = DistanceEvidence {
            items: vec![
                EvidenceItem {
                    label: "a".into(),
                    distance: r(-1, 4),
                },
                EvidenceItem {
                    label: "b".into(),
                    distance: r(1, 8),
                },
            ],
            claimed: lt(r(0, 1)),
        };
        assert!(matches!(
            evidence_check(&outside),
            Err(Error::Precondition(_))
        ));

        // distances must also lie in the group itself
        let off_lattice = DistanceEvidence {
            items: vec![
                EvidenceItem {
                    label: "a".into(),
                    distance: r(-1, 3),
                },
                EvidenceItem {
                    label: "b".into(),
                    distance: r(-1, 6),
                },
            ],
            claimed: lt(r(0, 1)),
        };
        assert!(evidence_check(&off_lattice).is_err());
    }

    #[test]
    fn cut_literal_roundtrip() {
        for s in ["empty", "lt:0", "le:-1/2", "all", "lt:-3/8"] {
            let kind: CutKind = s.parse().unwrap();
            assert_eq!(kind.to_string(), s);
        }
        assert!("gt:1".parse::<CutKind>().is_err());
        assert!("lt:x".parse::<CutKind>().is_err());
    }

    #[test]
    fn cut_add_is_commutative_and_associative() {
        let mut rng = StdRng::seed_from_u64(3);
        let kinds = |rng: &mut StdRng| -> Cut {
            match rng.random_range(0..4) {
                0 => Cut::new(CutKind::Empty, group2()),
                1 => Cut::new(CutKind::All, group2()),
                2 => lt(Rational::new(rng.random_range(-8i64..8), 1 << rng.random_range(0..4))
                    .unwrap()),
                _ => le(Rational::new(rng.random_range(-8i64..8), 1 << rng.random_range(0..4))
                    .unwrap()),
            }
        };
        for _ in 0..200 {
            let a = kinds(&mut rng);
            let b = kinds(&mut rng);
            let c = kinds(&mut rng);
            assert_eq!(cut_add(&a, &b).unwrap(), cut_add(&b, &a).unwrap());
            let left = cut_add(&cut_add(&a, &b).unwrap(), &c).unwrap();
            let right = cut_add(&a, &cut_add(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }
}

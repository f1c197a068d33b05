//! Linearly ordered Abelian groups as one tagged value domain: exact
//! rationals, lexicographic tuples, and finite-support Hahn series. Provides
//! the absolute value, structural Archimedean comparison, the natural
//! covaluation, the two canonical distance tables they generate, and the
//! constructive embedding of lexicographic values into a Hahn group.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::hahn::{Exp, ExpDomain, HahnSeries};
use crate::order::FiniteOrderedSet;
use crate::rat::Rat;
use crate::space::{Flavor, MetricTable, PointSpace, TableDomain, Value};

/// The kind of group a value lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueDomain {
    Rational,
    /// Tuples of exact rationals of the given rank, ordered lexicographically
    /// with coordinate 0 most significant.
    Lex(usize),
    Hahn(ExpDomain),
}

impl fmt::Display for ValueDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueDomain::Rational => write!(f, "rational"),
            ValueDomain::Lex(rank) => write!(f, "lex(rank {rank})"),
            ValueDomain::Hahn(_) => write!(f, "hahn"),
        }
    }
}

/// A value in one of the supported ordered Abelian groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElement {
    Rational(Rat),
    Lex(Vec<Rat>),
    Hahn(HahnSeries),
}

impl GroupElement {
    pub fn domain(&self) -> ValueDomain {
        match self {
            GroupElement::Rational(_) => ValueDomain::Rational,
            GroupElement::Lex(coords) => ValueDomain::Lex(coords.len()),
            GroupElement::Hahn(s) => ValueDomain::Hahn(s.exp_domain().clone()),
        }
    }

    pub fn zero(domain: &ValueDomain) -> GroupElement {
        match domain {
            ValueDomain::Rational => GroupElement::Rational(Rat::zero()),
            ValueDomain::Lex(rank) => GroupElement::Lex(vec![Rat::zero(); *rank]),
            ValueDomain::Hahn(exp) => GroupElement::Hahn(HahnSeries::zero(exp.clone())),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GroupElement::Rational(r) => r.is_zero(),
            GroupElement::Lex(coords) => coords.iter().all(Rat::is_zero),
            GroupElement::Hahn(s) => s.is_zero(),
        }
    }

    fn check_same_domain(&self, other: &GroupElement) -> Result<()> {
        if self.domain() != other.domain() {
            return Err(Error::DomainMismatch(format!(
                "{} vs {}",
                self.domain(),
                other.domain()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same_domain(other)?;
        Ok(match (self, other) {
            (GroupElement::Rational(a), GroupElement::Rational(b)) => GroupElement::Rational(a + b),
            (GroupElement::Lex(a), GroupElement::Lex(b)) => {
                GroupElement::Lex(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Hahn(a), GroupElement::Hahn(b)) => GroupElement::Hahn(a.add(b)?),
            _ => unreachable!("domains already matched"),
        })
    }

    pub fn neg(&self) -> GroupElement {
        match self {
            GroupElement::Rational(a) => GroupElement::Rational(-a),
            GroupElement::Lex(a) => GroupElement::Lex(a.iter().map(|x| -x).collect()),
            GroupElement::Hahn(a) => GroupElement::Hahn(a.neg()),
        }
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.add(&other.neg())
    }

    /// Total order of the group: rational order, lexicographic first
    /// difference, or leading-term comparison of series.
    pub fn try_cmp(&self, other: &GroupElement) -> Result<Ordering> {
        self.check_same_domain(other)?;
        Ok(match (self, other) {
            (GroupElement::Rational(a), GroupElement::Rational(b)) => a.cmp(b),
            (GroupElement::Lex(a), GroupElement::Lex(b)) => a.cmp(b),
            (GroupElement::Hahn(a), GroupElement::Hahn(b)) => a.try_cmp(b)?,
            _ => unreachable!("domains already matched"),
        })
    }

    pub fn is_positive(&self) -> bool {
        match self {
            GroupElement::Rational(a) => a.is_positive(),
            GroupElement::Lex(a) => a
                .iter()
                .find(|c| !c.is_zero())
                .map(|c| c.is_positive())
                .unwrap_or(false),
            GroupElement::Hahn(a) => a.is_positive(),
        }
    }

    /// `x` if `x >= 0`, otherwise `-x`.
    pub fn abs(&self) -> GroupElement {
        if self.is_positive() || self.is_zero() {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Integer multiple `n * x`.
    pub fn multiple(&self, n: i64) -> GroupElement {
        let factor = Rat::from_int(n);
        match self {
            GroupElement::Rational(a) => GroupElement::Rational(a * &factor),
            GroupElement::Lex(a) => GroupElement::Lex(a.iter().map(|c| c * &factor).collect()),
            GroupElement::Hahn(s) => GroupElement::Hahn(s.scalar_mul(&factor)),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Rational(r) => write!(f, "{r}"),
            GroupElement::Lex(coords) => {
                let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Hahn(s) => write!(f, "{s}"),
        }
    }
}

/// Outcome of an Archimedean comparison of two positive elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArchOrder {
    /// Every integer multiple of the left stays below the right.
    MuchLess,
    /// Mutual integer-multiple bounds exist.
    Equivalent,
    MuchGreater,
}

/// An Archimedean equivalence class, identified by its leading position:
/// the single class of the rationals, a leading coordinate index for
/// lexicographic values, or the maximal support exponent of a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArchClass {
    Rational,
    LexCoord(usize),
    HahnExp(Exp),
}

impl ArchClass {
    pub fn try_cmp(&self, other: &ArchClass) -> Result<Ordering> {
        match (self, other) {
            (ArchClass::Rational, ArchClass::Rational) => Ok(Ordering::Equal),
            // a larger coordinate index is less significant, hence a smaller class
            (ArchClass::LexCoord(a), ArchClass::LexCoord(b)) => Ok(b.cmp(a)),
            (ArchClass::HahnExp(a), ArchClass::HahnExp(b)) => Ok(a.cmp(b)),
            _ => Err(Error::DomainMismatch(
                "Archimedean classes from different groups".into(),
            )),
        }
    }
}

impl fmt::Display for ArchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArchClass::Rational => write!(f, "[1]"),
            ArchClass::LexCoord(i) => write!(f, "[coord {i}]"),
            ArchClass::HahnExp(e) => write!(f, "[t^[{e}]]"),
        }
    }
}

/// The class set extended by a bottom: the covaluation sends zero to the
/// bottom and everything else to the class of its absolute value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Covaluation {
    Bottom,
    Class(ArchClass),
}

impl Covaluation {
    pub fn try_cmp(&self, other: &Covaluation) -> Result<Ordering> {
        match (self, other) {
            (Covaluation::Bottom, Covaluation::Bottom) => Ok(Ordering::Equal),
            (Covaluation::Bottom, _) => Ok(Ordering::Less),
            (_, Covaluation::Bottom) => Ok(Ordering::Greater),
            (Covaluation::Class(a), Covaluation::Class(b)) => a.try_cmp(b),
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Covaluation::Bottom)
    }
}

impl fmt::Display for Covaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Covaluation::Bottom => write!(f, "bot"),
            Covaluation::Class(c) => write!(f, "{c}"),
        }
    }
}

/// Structural Archimedean comparison of two strictly positive elements.
/// Decided by leading positions; the definitional for-all-multiples
/// quantifier is covered by the bounded-multiple oracle in the tests.
pub fn arch_cmp(x: &GroupElement, y: &GroupElement) -> Result<ArchOrder> {
    if !x.is_positive() {
        return Err(Error::Nonpositive(format!("{x}")));
    }
    if !y.is_positive() {
        return Err(Error::Nonpositive(format!("{y}")));
    }
    x.check_same_domain(y)?;
    let cx = class_of_positive(x);
    let cy = class_of_positive(y);
    Ok(match cx.try_cmp(&cy)? {
        Ordering::Less => ArchOrder::MuchLess,
        Ordering::Equal => ArchOrder::Equivalent,
        Ordering::Greater => ArchOrder::MuchGreater,
    })
}

fn class_of_positive(x: &GroupElement) -> ArchClass {
    match x {
        GroupElement::Rational(_) => ArchClass::Rational,
        GroupElement::Lex(coords) => {
            let lead = coords
                .iter()
                .position(|c| !c.is_zero())
                .expect("positive element has a nonzero coordinate");
            ArchClass::LexCoord(lead)
        }
        GroupElement::Hahn(s) => {
            let (e, _) = s.leading().expect("positive series has a leading term");
            ArchClass::HahnExp(e.clone())
        }
    }
}

/// The natural covaluation: bottom at zero, otherwise the Archimedean class
/// of the absolute value.
pub fn covaluation(x: &GroupElement) -> Covaluation {
    if x.is_zero() {
        Covaluation::Bottom
    } else {
        Covaluation::Class(class_of_positive(&x.abs()))
    }
}

fn check_distinct_points(points: &[GroupElement]) -> Result<ValueDomain> {
    if points.is_empty() {
        return Err(Error::Empty("no points given".into()));
    }
    let domain = points[0].domain();
    for p in points {
        if p.domain() != domain {
            return Err(Error::DomainMismatch("points from different groups".into()));
        }
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            if p == q {
                return Err(Error::Duplicate(format!("point {p} appears twice")));
            }
        }
    }
    Ok(domain)
}

fn point_space(points: &[GroupElement]) -> Result<PointSpace> {
    let labels = points.iter().map(|p| p.to_string()).collect();
    PointSpace::new(labels, Vec::new())
}

/// The difference metric `(x, y) -> abs(x - y)`: a group-valued metric on
/// any finite family of distinct points.
pub fn difference_metric(points: &[GroupElement]) -> Result<MetricTable> {
    let domain = check_distinct_points(points)?;
    let space = point_space(points)?;
    let n = points.len();
    let mut rows = Vec::with_capacity(n);
    for x in points {
        let mut row = Vec::with_capacity(n);
        for y in points {
            row.push(Value::Group(x.sub(y)?.abs()));
        }
        rows.push(row);
    }
    MetricTable::new(space, TableDomain::Group(domain), Flavor::Metric, rows)
}

/// The class-difference ultrametric `(x, y) -> covaluation(x - y)`: a
/// bottomed-class-valued ultrametric on any finite family of distinct points.
pub fn class_difference_ultrametric(points: &[GroupElement]) -> Result<MetricTable> {
    let domain = check_distinct_points(points)?;
    let space = point_space(points)?;
    let n = points.len();
    let mut rows = Vec::with_capacity(n);
    for x in points {
        let mut row = Vec::with_capacity(n);
        for y in points {
            row.push(Value::Class(covaluation(&x.sub(y)?)));
        }
        rows.push(row);
    }
    MetricTable::new(
        space,
        TableDomain::Classes(domain),
        Flavor::Ultrametric,
        rows,
    )
}

/// The coordinate labels used when a lexicographic value is written as a
/// series: ascending order `c(n-1) < ... < c1 < c0`, so coordinate 0 carries
/// the largest exponent.
pub fn lex_exponent_set(rank: usize) -> FiniteOrderedSet {
    let labels = (0..rank).rev().map(|i| format!("c{i}")).collect();
    FiniteOrderedSet::new(labels).expect("coordinate labels are distinct")
}

/// Constructive order- and group-embedding of a lexicographic value into the
/// Hahn group over its coordinate index set.
pub fn lex_to_hahn(x: &GroupElement) -> Result<HahnSeries> {
    let coords = match x {
        GroupElement::Lex(coords) => coords,
        _ => {
            return Err(Error::DomainMismatch(format!(
                "expected a lex value, got {}",
                x.domain()
            )))
        }
    };
    let set = lex_exponent_set(coords.len());
    let mut terms = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        if !c.is_zero() {
            let label = format!("c{i}");
            let pos = set.position(&label).expect("coordinate label exists");
            terms.push((Exp::Label { pos, label }, c.clone()));
        }
    }
    HahnSeries::from_terms(ExpDomain::Finite(set), terms)
}

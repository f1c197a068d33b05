//! Finite-support Hahn groups over an ordered exponent structure, and Hahn
//! fields when the exponents themselves form a group.
//!
//! A series is a finite list of `(exponent, coefficient)` terms with strictly
//! descending exponents and nonzero rational coefficients; the empty list is
//! zero. Ordering compares the coefficients at the maximal exponent where the
//! two series differ. When the exponent structure carries an addition
//! (integers, lexicographic tuples, or series again), convolution turns the
//! group into a field; supports stay finite under every operation used here.
//!
//! Nested structures (a field over a group over a finite ordered set) are
//! expressed by one recursive exponent descriptor so the structural
//! embeddings compose across levels.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::order::{BottomedOrderedSet, FiniteOrderedSet, Label};
use crate::rat::Rat;

/// Describes where exponents live.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExpDomain {
    /// A finite ordered set of labels. Order only: no exponent addition, so
    /// series over it form a group but not a field.
    Finite(FiniteOrderedSet),
    /// Integer exponents.
    Int,
    /// Lexicographic tuples of rationals of a fixed rank.
    Lex(usize),
    /// Exponents are themselves series over an inner domain; this is the
    /// field-over-a-Hahn-group case.
    Group(Box<ExpDomain>),
}

impl ExpDomain {
    pub fn is_group(&self) -> bool {
        !matches!(self, ExpDomain::Finite(_))
    }
}

/// One exponent value. `Label` stores its position in the owning finite
/// ordered set so comparisons need no outside context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exp {
    Label { pos: usize, label: Label },
    Int(i64),
    Lex(Vec<Rat>),
    Series(HahnSeries),
}

impl Exp {
    fn kind(&self) -> u8 {
        match self {
            Exp::Label { .. } => 0,
            Exp::Int(_) => 1,
            Exp::Lex(_) => 2,
            Exp::Series(_) => 3,
        }
    }

    pub fn try_add(&self, other: &Exp) -> Result<Exp> {
        match (self, other) {
            (Exp::Int(a), Exp::Int(b)) => a
                .checked_add(*b)
                .map(Exp::Int)
                .ok_or_else(|| Error::Internal("integer exponent overflow".into())),
            (Exp::Lex(a), Exp::Lex(b)) if a.len() == b.len() => {
                Ok(Exp::Lex(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (Exp::Series(a), Exp::Series(b)) => Ok(Exp::Series(a.add(b)?)),
            (Exp::Label { .. }, _) | (_, Exp::Label { .. }) => Err(Error::ExponentsNotGroup),
            _ => Err(Error::DomainMismatch("exponent kinds differ".into())),
        }
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exp::Label { pos: a, .. }, Exp::Label { pos: b, .. }) => a.cmp(b),
            (Exp::Int(a), Exp::Int(b)) => a.cmp(b),
            (Exp::Lex(a), Exp::Lex(b)) => a.cmp(b),
            (Exp::Series(a), Exp::Series(b)) => a.cmp_same_domain(b),
            _ => self.kind().cmp(&other.kind()),
        }
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exp::Label { label, .. } => write!(f, "{label}"),
            Exp::Int(n) => write!(f, "{n}"),
            Exp::Lex(coords) => {
                let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Exp::Series(s) => write!(f, "{s}"),
        }
    }
}

/// A finite-support Hahn series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HahnSeries {
    exp_domain: ExpDomain,
    /// Strictly descending exponents with nonzero coefficients.
    terms: Vec<(Exp, Rat)>,
}

impl HahnSeries {
    pub fn zero(exp_domain: ExpDomain) -> Self {
        HahnSeries {
            exp_domain,
            terms: Vec::new(),
        }
    }

    /// Canonicalizes arbitrary terms: merges equal exponents, drops zero
    /// coefficients, sorts descending.
    pub fn from_terms(exp_domain: ExpDomain, terms: Vec<(Exp, Rat)>) -> Result<Self> {
        let mut merged: BTreeMap<Exp, Rat> = BTreeMap::new();
        for (e, c) in terms {
            check_exp_in_domain(&exp_domain, &e)?;
            let entry = merged.entry(e).or_insert_with(Rat::zero);
            *entry = &*entry + &c;
        }
        let mut out: Vec<(Exp, Rat)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.reverse();
        Ok(HahnSeries {
            exp_domain,
            terms: out,
        })
    }

    /// The series with a single coefficient-1 term, `t^e`.
    pub fn monomial(exp_domain: ExpDomain, e: Exp, coeff: Rat) -> Result<Self> {
        HahnSeries::from_terms(exp_domain, vec![(e, coeff)])
    }

    /// A rational constant in a field (coefficient at the zero exponent).
    pub fn constant(exp_domain: ExpDomain, c: Rat) -> Result<Self> {
        let zero_exp = zero_exponent(&exp_domain)?;
        HahnSeries::from_terms(exp_domain, vec![(zero_exp, c)])
    }

    pub fn exp_domain(&self) -> &ExpDomain {
        &self.exp_domain
    }

    pub fn terms(&self) -> &[(Exp, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal support exponent and its coefficient.
    pub fn leading(&self) -> Option<(&Exp, &Rat)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    fn check_same_domain(&self, other: &HahnSeries) -> Result<()> {
        if self.exp_domain != other.exp_domain {
            return Err(Error::DomainMismatch(
                "series over different exponent structures".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &HahnSeries) -> Result<HahnSeries> {
        self.check_same_domain(other)?;
        let mut merged: BTreeMap<Exp, Rat> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            let entry = merged.entry(e.clone()).or_insert_with(Rat::zero);
            *entry = &*entry + c;
        }
        let mut out: Vec<(Exp, Rat)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.reverse();
        Ok(HahnSeries {
            exp_domain: self.exp_domain.clone(),
            terms: out,
        })
    }

    pub fn neg(&self) -> HahnSeries {
        HahnSeries {
            exp_domain: self.exp_domain.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &HahnSeries) -> Result<HahnSeries> {
        self.add(&other.neg())
    }

    /// Coefficient-wise multiplication by a rational scalar.
    pub fn scalar_mul(&self, s: &Rat) -> HahnSeries {
        if s.is_zero() {
            return HahnSeries::zero(self.exp_domain.clone());
        }
        HahnSeries {
            exp_domain: self.exp_domain.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Convolution product. Requires the exponent structure to be a group.
    pub fn mul(&self, other: &HahnSeries) -> Result<HahnSeries> {
        self.check_same_domain(other)?;
        if !self.exp_domain.is_group() {
            return Err(Error::ExponentsNotGroup);
        }
        let mut merged: BTreeMap<Exp, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.try_add(eb)?;
                let entry = merged.entry(e).or_insert_with(Rat::zero);
                *entry = &*entry + &(ca * cb);
            }
        }
        let mut out: Vec<(Exp, Rat)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.reverse();
        Ok(HahnSeries {
            exp_domain: self.exp_domain.clone(),
            terms: out,
        })
    }

    /// Comparison by the sign of the coefficient difference at the maximal
    /// exponent where the series differ.
    pub fn try_cmp(&self, other: &HahnSeries) -> Result<Ordering> {
        self.check_same_domain(other)?;
        Ok(self.cmp_same_domain(other))
    }

    pub(crate) fn cmp_same_domain(&self, other: &HahnSeries) -> Ordering {
        let mut i = 0;
        let mut j = 0;
        let zero = Rat::zero();
        loop {
            match (self.terms.get(i), other.terms.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, ca)), None) => return ca.cmp(&zero),
                (None, Some((_, cb))) => return zero.cmp(cb),
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Greater => return ca.cmp(&zero),
                    Ordering::Less => return zero.cmp(cb),
                    Ordering::Equal => match ca.cmp(cb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self.leading(), Some((_, c)) if c.is_positive())
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c}*t^[{e}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_exp_in_domain(domain: &ExpDomain, e: &Exp) -> Result<()> {
    match (domain, e) {
        (ExpDomain::Finite(set), Exp::Label { pos, label }) => match set.position(label) {
            Some(p) if p == *pos => Ok(()),
            Some(_) => Err(Error::Internal(format!(
                "exponent {label:?} carries a stale position"
            ))),
            None => Err(Error::UnknownLabel(label.clone())),
        },
        (ExpDomain::Int, Exp::Int(_)) => Ok(()),
        (ExpDomain::Lex(rank), Exp::Lex(coords)) if coords.len() == *rank => Ok(()),
        (ExpDomain::Group(inner), Exp::Series(s)) if s.exp_domain() == inner.as_ref() => Ok(()),
        _ => Err(Error::DomainMismatch(
            "exponent does not belong to the exponent structure".into(),
        )),
    }
}

fn zero_exponent(domain: &ExpDomain) -> Result<Exp> {
    match domain {
        ExpDomain::Finite(_) => Err(Error::ExponentsNotGroup),
        ExpDomain::Int => Ok(Exp::Int(0)),
        ExpDomain::Lex(rank) => Ok(Exp::Lex(vec![Rat::zero(); *rank])),
        ExpDomain::Group(inner) => Ok(Exp::Series(HahnSeries::zero((**inner).clone()))),
    }
}

/// Builds a label exponent in a finite exponent set.
pub fn label_exp(set: &FiniteOrderedSet, label: &str) -> Result<Exp> {
    let pos = set
        .position(label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    Ok(Exp::Label {
        pos,
        label: label.to_string(),
    })
}

/// The indicator embedding of an ordered set into its Hahn group: the label
/// `s` maps to the coefficient-1 series concentrated at `s`. It is positive,
/// strictly isotone, and sends strictly smaller labels to Archimedean-smaller
/// series.
pub fn indicator_series(l: &FiniteOrderedSet, s: &str) -> Result<HahnSeries> {
    let e = label_exp(l, s)?;
    HahnSeries::monomial(ExpDomain::Finite(l.clone()), e, Rat::one())
}

/// The negated indicator over the dual of the positive part of a bottomed
/// set: a coinitial isotone embedding of the positive part into the Hahn
/// group over `(stars)^op`.
pub fn coinitial_series(s: &BottomedOrderedSet, label: &str) -> Result<HahnSeries> {
    if label == s.bottom() {
        return Err(Error::Nonpositive(format!(
            "{label:?} is the bottom; only positive elements embed"
        )));
    }
    if !s.contains(label) {
        return Err(Error::UnknownLabel(label.to_string()));
    }
    let stars = FiniteOrderedSet::new(s.stars().to_vec())?;
    let dual = stars.dual();
    Ok(indicator_series(&dual, label)?.neg())
}

/// The exponent structure of the ambient field of a bottomed set: series
/// whose exponents are themselves series over the dual of the positive part.
pub fn field_domain(s: &BottomedOrderedSet) -> Result<ExpDomain> {
    let stars = FiniteOrderedSet::new(s.stars().to_vec())?;
    Ok(ExpDomain::Group(Box::new(ExpDomain::Finite(stars.dual()))))
}

/// Embeds a bottomed ordered set into its ambient Hahn field: the bottom
/// goes to zero, and each positive label to the indicator of its coinitial
/// image. The embedding is strictly isotone and sends distinct labels to
/// Archimedean-inequivalent positive values, so the image reaches
/// arbitrarily low among the positive field elements generated from it.
pub fn field_image(s: &BottomedOrderedSet, label: &str) -> Result<HahnSeries> {
    let domain = field_domain(s)?;
    if label == s.bottom() {
        return Ok(HahnSeries::zero(domain));
    }
    let w = coinitial_series(s, label)?;
    HahnSeries::monomial(domain, Exp::Series(w), Rat::one())
}

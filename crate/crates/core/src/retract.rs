//! Retractions of finite ultrametric spaces onto their distinguished subset.
//!
//! The main construction picks, for every point, the index-least subset
//! point within a factor-tau window of its nearest distance; the resulting
//! map fixes the subset and moves pairs apart by at most tau^2. All scalar
//! comparisons happen in an ambient field: rationals directly, ordered-set
//! values through their field embedding, lexicographic values through their
//! series embedding, and class values by class (where a rational factor
//! never changes the class).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{lex_to_hahn, GroupElement};
use crate::hahn::field_image;
use crate::order::Label;
use crate::rat::Rat;
use crate::space::{dist_to_set, Flavor, MetricTable, PointSpace, TableDomain, Value};

/// A point map into the distinguished subset that fixes the subset
/// pointwise, together with the Lipschitz scale it was built for. The
/// certificate shape is always `d(r(x), r(y)) <= tau^2 * d(x, y)`; the
/// nonexpansive search returns `tau = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retraction {
    space: PointSpace,
    mapping: Vec<usize>,
    tau: Rat,
}

impl Retraction {
    pub fn new(space: PointSpace, mapping: Vec<usize>, tau: Rat) -> Result<Self> {
        if mapping.len() != space.len() {
            return Err(Error::InvalidTable(
                "retraction mapping does not cover the space".into(),
            ));
        }
        for (i, img) in mapping.iter().enumerate() {
            if !space.in_subset(*img) {
                return Err(Error::InvalidTable(format!(
                    "image of {} is outside the subset",
                    space.points()[i]
                )));
            }
            if space.in_subset(i) && *img != i {
                return Err(Error::InvalidTable(format!(
                    "subset point {} is not fixed",
                    space.points()[i]
                )));
            }
        }
        Ok(Retraction {
            space,
            mapping,
            tau,
        })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn map_index(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn tau(&self) -> &Rat {
        &self.tau
    }

    pub fn as_point_map(&self) -> BTreeMap<Label, Label> {
        self.space
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), self.space.points()[self.mapping[i]].clone()))
            .collect()
    }
}

/// Decides `lhs <= factor * rhs` in the ambient field of the value domain.
pub fn scaled_leq(domain: &TableDomain, lhs: &Value, factor: &Rat, rhs: &Value) -> Result<bool> {
    match (domain, lhs, rhs) {
        (TableDomain::Group(_), Value::Group(a), Value::Group(b)) => match (a, b) {
            (GroupElement::Rational(x), GroupElement::Rational(y)) => Ok(*x <= y * factor),
            (GroupElement::Lex(_), GroupElement::Lex(_)) => {
                let x = lex_to_hahn(a)?;
                let y = lex_to_hahn(b)?;
                Ok(x.try_cmp(&y.scalar_mul(factor))?.is_le())
            }
            (GroupElement::Hahn(x), GroupElement::Hahn(y)) => {
                Ok(x.try_cmp(&y.scalar_mul(factor))?.is_le())
            }
            _ => Err(Error::DomainMismatch("values of different kinds".into())),
        },
        (
            TableDomain::Ordered(s),
            Value::OrdElem { label: la, .. },
            Value::OrdElem { label: lb, .. },
        ) => {
            let x = field_image(s, la)?;
            let y = field_image(s, lb)?;
            Ok(x.try_cmp(&y.scalar_mul(factor))?.is_le())
        }
        // a positive rational factor never moves an Archimedean class
        (TableDomain::Classes(_), Value::Class(a), Value::Class(b)) => Ok(a.try_cmp(b)?.is_le()),
        _ => Err(Error::DomainMismatch(
            "values do not match the domain".into(),
        )),
    }
}

fn require_tau(tau: &Rat) -> Result<()> {
    if *tau <= Rat::one() {
        return Err(Error::TauOutOfRange(tau.to_string()));
    }
    Ok(())
}

fn require_retractable(d: &MetricTable) -> Result<Vec<Label>> {
    if d.flavor() != Flavor::Ultrametric {
        return Err(Error::InvalidTable(
            "retractions are built on ultrametric tables".into(),
        ));
    }
    let a = d.space().subset_labels();
    if a.is_empty() {
        return Err(Error::Empty("the distinguished subset is empty".into()));
    }
    Ok(a)
}

/// The subset points within the tau window of `x`: all `a` with
/// `d(x, a) <= tau * min_b d(x, b)`. Nonempty; equals `{x}` when `x` is in
/// the subset.
pub fn tau_near_set(d: &MetricTable, x: &str, tau: &Rat) -> Result<Vec<Label>> {
    require_tau(tau)?;
    let a = require_retractable(d)?;
    let xi = d.space().index_of(x)?;
    if d.space().in_subset(xi) {
        return Ok(vec![x.to_string()]);
    }
    let rho = dist_to_set(d, x, &a)?;
    let mut out = Vec::new();
    for lab in &a {
        let v = d.between(x, lab)?;
        if scaled_leq(d.domain(), v, tau, &rho)? {
            out.push(lab.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::Internal(
            "tau window excluded the nearest point".into(),
        ));
    }
    Ok(out)
}

/// Checks `d(r(x), r(y)) <= factor * d(x, y)` for every pair; returns the
/// first failing pair, if any.
pub fn lipschitz_witness(
    d: &MetricTable,
    r: &Retraction,
    factor: &Rat,
) -> Result<Option<(Label, Label)>> {
    if r.space() != d.space() {
        return Err(Error::DomainMismatch(
            "retraction built on another space".into(),
        ));
    }
    let n = d.len();
    for i in 0..n {
        for j in 0..n {
            let moved = d.at(r.map_index(i), r.map_index(j));
            if !scaled_leq(d.domain(), moved, factor, d.at(i, j))? {
                return Ok(Some((
                    d.space().points()[i].clone(),
                    d.space().points()[j].clone(),
                )));
            }
        }
    }
    Ok(None)
}

/// Builds the tau-window retraction: every point maps to the index-least
/// member of its tau near set. The returned value carries a verified
/// certificate that no pair moves apart by more than tau^2; a certificate
/// failure is an internal error, never a silent result.
pub fn tau_retraction(d: &MetricTable, tau: &Rat) -> Result<Retraction> {
    require_tau(tau)?;
    require_retractable(d)?;
    let n = d.len();
    let mut mapping = Vec::with_capacity(n);
    for i in 0..n {
        if d.space().in_subset(i) {
            mapping.push(i);
            continue;
        }
        let near = tau_near_set(d, &d.space().points()[i], tau)?;
        let first = d.space().index_of(&near[0])?;
        mapping.push(first);
    }
    let r = Retraction::new(d.space().clone(), mapping, tau.clone())?;
    let tau_sq = tau * tau;
    if let Some((x, y)) = lipschitz_witness(d, &r, &tau_sq)? {
        return Err(Error::Internal(format!(
            "tau^2 certificate failed at ({x}, {y})"
        )));
    }
    Ok(r)
}

/// Joins a table with its pullback along a retraction, making the
/// retraction nonexpansive: `k = h v r*h` satisfies
/// `k(r(x), r(y)) <= k(x, y)` everywhere and keeps h's flavor.
pub fn remetrize_nonexpansive(h: &MetricTable, r: &Retraction) -> Result<MetricTable> {
    if r.space() != h.space() {
        return Err(Error::DomainMismatch(
            "retraction built on another space".into(),
        ));
    }
    let n = h.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(h.at(i, j).max(h.at(r.map_index(i), r.map_index(j)))?);
        }
        rows.push(row);
    }
    let k = MetricTable::new(h.space().clone(), h.domain().clone(), h.flavor(), rows)?;
    if let Some((x, y)) = lipschitz_witness(&k, r, &Rat::one())? {
        return Err(Error::Internal(format!(
            "nonexpansive certificate failed at ({x}, {y})"
        )));
    }
    Ok(k)
}

/// Exhaustive search over all maps of the complement into the subset, in
/// index-lexicographic order, for a retraction that moves no pair apart.
/// Returns the first hit or `None`.
pub fn find_nonexpansive_retraction(d: &MetricTable, bound: usize) -> Result<Option<Retraction>> {
    require_retractable(d)?;
    let n = d.len();
    if n > bound {
        return Err(Error::BoundExceeded { bound, size: n });
    }
    let free: Vec<usize> = (0..n).filter(|i| !d.space().in_subset(*i)).collect();
    let subset = d.space().subset_indices().to_vec();
    let m = free.len();
    let mut choice = vec![0usize; m];
    loop {
        let mut mapping: Vec<usize> = (0..n).collect();
        for (slot, f) in free.iter().enumerate() {
            mapping[*f] = subset[choice[slot]];
        }
        let r = Retraction::new(d.space().clone(), mapping, Rat::one())?;
        if lipschitz_witness(d, &r, &Rat::one())?.is_none() {
            return Ok(Some(r));
        }
        // odometer step
        let mut slot = m;
        loop {
            if slot == 0 {
                return Ok(None);
            }
            slot -= 1;
            choice[slot] += 1;
            if choice[slot] < subset.len() {
                break;
            }
            choice[slot] = 0;
        }
    }
}

/// The pair of points with the extremal movement, for reporting. For
/// rational tables the exact ratio `d(r(x), r(y)) / d(x, y)` is maximized;
/// otherwise the pair with the largest moved distance is returned.
#[derive(Clone, Debug)]
pub struct MovementWitness {
    pub x: Label,
    pub y: Label,
    pub original: Value,
    pub moved: Value,
    pub ratio: Option<Rat>,
}

pub fn movement_witness(d: &MetricTable, r: &Retraction) -> Result<Option<MovementWitness>> {
    let n = d.len();
    let mut best: Option<MovementWitness> = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let original = d.at(i, j).clone();
            let moved = d.at(r.map_index(i), r.map_index(j)).clone();
            let ratio = match (&original, &moved) {
                (
                    Value::Group(GroupElement::Rational(o)),
                    Value::Group(GroupElement::Rational(m)),
                ) => Some(m.div(o)?),
                _ => None,
            };
            let better = match &best {
                None => true,
                Some(b) => match (&ratio, &b.ratio) {
                    (Some(r1), Some(r2)) => r1 > r2,
                    _ => moved.try_cmp(&b.moved)?.is_gt(),
                },
            };
            if better {
                best = Some(MovementWitness {
                    x: d.space().points()[i].clone(),
                    y: d.space().points()[j].clone(),
                    original,
                    moved,
                    ratio,
                });
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ValueDomain;
    use crate::space::{Flavor, PointSpace};

    fn rv(s: &str) -> Value {
        Value::Group(GroupElement::Rational(s.parse().unwrap()))
    }

    fn table(points: &[&str], subset: &[&str], rows: &[&[&str]]) -> MetricTable {
        let space = PointSpace::new(
            points.iter().map(|s| s.to_string()).collect(),
            subset.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        let rows: Vec<Vec<Value>> = rows
            .iter()
            .map(|r| r.iter().map(|s| rv(s)).collect())
            .collect();
        MetricTable::new(
            space,
            TableDomain::Group(ValueDomain::Rational),
            Flavor::Ultrametric,
            rows,
        )
        .unwrap()
    }

    /// The worked three-point space: subset {a, b}, outside point x.
    fn three_point() -> MetricTable {
        table(
            &["a", "b", "x"],
            &["a", "b"],
            &[&["0", "4", "1"], &["4", "0", "4"], &["1", "4", "0"]],
        )
    }

    #[test]
    fn near_set_cases() {
        let d = three_point();
        let tau = Rat::from_int(2);
        assert_eq!(tau_near_set(&d, "a", &tau).unwrap(), vec!["a".to_string()]);
        assert_eq!(tau_near_set(&d, "x", &tau).unwrap(), vec!["a".to_string()]);

        let wide = table(
            &["a", "b", "x"],
            &["a", "b"],
            &[&["0", "2", "1"], &["2", "0", "2"], &["1", "2", "0"]],
        );
        assert_eq!(
            tau_near_set(&wide, "x", &tau).unwrap(),
            vec!["a".to_string(), "b".to_string()]
        );
    }

    #[test]
    fn tau_retraction_on_fixture() {
        let d = three_point();
        let r = tau_retraction(&d, &Rat::from_int(2)).unwrap();
        let xi = d.space().index_of("x").unwrap();
        let ai = d.space().index_of("a").unwrap();
        assert_eq!(r.map_index(xi), ai);
        // d(r(x), r(b)) = 4 <= 16 = tau^2 * d(x, b)
        assert!(lipschitz_witness(&d, &r, &Rat::from_int(4))
            .unwrap()
            .is_none());
    }

    #[test]
    fn identity_and_constant_degenerate_cases() {
        let all = table(&["a", "b"], &["a", "b"], &[&["0", "1"], &["1", "0"]]);
        let r = tau_retraction(&all, &Rat::from_int(2)).unwrap();
        assert_eq!(r.mapping(), &[0, 1]);

        let single = table(
            &["a", "x", "y"],
            &["a"],
            &[&["0", "1", "2"], &["1", "0", "2"], &["2", "2", "0"]],
        );
        let r = tau_retraction(&single, &Rat::from_int(2)).unwrap();
        assert!(r.mapping().iter().all(|i| *i == 0));
    }

    #[test]
    fn tau_must_exceed_one() {
        let d = three_point();
        assert!(matches!(
            tau_retraction(&d, &Rat::one()),
            Err(Error::TauOutOfRange(_))
        ));
    }

    #[test]
    fn near_set_contains_a_nearest_point() {
        let d = three_point();
        let near = tau_near_set(&d, "x", &Rat::from_int(2)).unwrap();
        let a = d.space().subset_labels();
        let rho = dist_to_set(&d, "x", &a).unwrap();
        assert!(near.iter().any(|lab| d.between("x", lab).unwrap() == &rho));
    }

    #[test]
    fn remetrize_fixture() {
        let d = three_point();
        let r = tau_retraction(&d, &Rat::from_int(2)).unwrap();
        let k = remetrize_nonexpansive(&d, &r).unwrap();
        // k(x, b) = max(4, d(a, b)) = 4 and k(a, b) stays 4
        assert_eq!(k.between("x", "b").unwrap(), &rv("4"));
        assert_eq!(k.between("a", "b").unwrap(), &rv("4"));
        // identity retraction keeps the table
        let all = table(&["a", "b"], &["a", "b"], &[&["0", "1"], &["1", "0"]]);
        let id = tau_retraction(&all, &Rat::from_int(2)).unwrap();
        assert_eq!(remetrize_nonexpansive(&all, &id).unwrap(), all);
    }

    #[test]
    fn nonexpansive_search_cases() {
        let all = table(&["a", "b"], &["a", "b"], &[&["0", "1"], &["1", "0"]]);
        let r = find_nonexpansive_retraction(&all, 7).unwrap().unwrap();
        assert_eq!(r.mapping(), &[0, 1]);

        let d = three_point();
        let r = find_nonexpansive_retraction(&d, 7).unwrap().unwrap();
        let xi = d.space().index_of("x").unwrap();
        let ai = d.space().index_of("a").unwrap();
        assert_eq!(r.map_index(xi), ai);

        assert!(matches!(
            find_nonexpansive_retraction(&d, 2),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn movement_witness_reports_max_ratio() {
        let d = three_point();
        let r = tau_retraction(&d, &Rat::from_int(2)).unwrap();
        let w = movement_witness(&d, &r).unwrap().unwrap();
        // the worst stretch is d(r(x), r(b)) / d(x, a) type pairs
        assert!(w.ratio.is_some());
    }

    #[test]
    fn pullback_along_a_retraction_agrees_on_the_subset() {
        use crate::space::pullback;
        let d = three_point();
        let r = tau_retraction(&d, &Rat::from_int(2)).unwrap();
        let back = pullback(d.space().points(), &r.as_point_map(), &d).unwrap();
        for i in d.space().subset_indices() {
            for j in d.space().subset_indices() {
                assert_eq!(back.at(*i, *j), d.at(*i, *j));
            }
        }
    }
}

//! Finite point spaces with distance tables. Tables validate the metric
//! axioms (M0-M4) or ultrametric axioms (U0-U4) on construction; pseudo
//! tables relax only the off-diagonal positivity. The module also houses the
//! distance-to-set primitive, balls, the pairwise-max ultrametric on a
//! bottomed set, isotone value transport, the neighborhood relation between
//! tables, and the distance between ultrametrics themselves.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{covaluation, Covaluation, GroupElement, ValueDomain};
use crate::order::{BottomedOrderedSet, Label};

/// A distance value: a group element (zero is the bottom), a member of a
/// bottomed ordered set, or a bottomed Archimedean class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Group(GroupElement),
    OrdElem { pos: usize, label: Label },
    Class(Covaluation),
}

impl Value {
    pub fn is_bottom(&self) -> bool {
        match self {
            Value::Group(g) => g.is_zero(),
            Value::OrdElem { pos, .. } => *pos == 0,
            Value::Class(c) => c.is_bottom(),
        }
    }

    pub fn try_cmp(&self, other: &Value) -> Result<Ordering> {
        match (self, other) {
            (Value::Group(a), Value::Group(b)) => a.try_cmp(b),
            (Value::OrdElem { pos: a, .. }, Value::OrdElem { pos: b, .. }) => Ok(a.cmp(b)),
            (Value::Class(a), Value::Class(b)) => a.try_cmp(b),
            _ => Err(Error::DomainMismatch("values of different kinds".into())),
        }
    }

    pub fn max(&self, other: &Value) -> Result<Value> {
        Ok(if self.try_cmp(other)?.is_ge() {
            self.clone()
        } else {
            other.clone()
        })
    }

    pub fn min(&self, other: &Value) -> Result<Value> {
        Ok(if self.try_cmp(other)?.is_le() {
            self.clone()
        } else {
            other.clone()
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Group(g) => write!(f, "{g}"),
            Value::OrdElem { label, .. } => write!(f, "{label}"),
            Value::Class(c) => write!(f, "{c}"),
        }
    }
}

/// Where a table's values live.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableDomain {
    Group(ValueDomain),
    Ordered(BottomedOrderedSet),
    /// Bottomed Archimedean classes of the given group.
    Classes(ValueDomain),
}

impl TableDomain {
    pub fn zero_value(&self) -> Value {
        match self {
            TableDomain::Group(vd) => Value::Group(GroupElement::zero(vd)),
            TableDomain::Ordered(s) => Value::OrdElem {
                pos: 0,
                label: s.bottom().clone(),
            },
            TableDomain::Classes(_) => Value::Class(Covaluation::Bottom),
        }
    }

    pub fn check_member(&self, v: &Value) -> Result<()> {
        match (self, v) {
            (TableDomain::Group(vd), Value::Group(g)) => {
                if g.domain() == *vd {
                    Ok(())
                } else {
                    Err(Error::DomainMismatch(format!(
                        "value {g} is not in domain {vd}"
                    )))
                }
            }
            (TableDomain::Ordered(s), Value::OrdElem { pos, label }) => match s.position(label) {
                Some(p) if p == *pos => Ok(()),
                Some(_) => Err(Error::Internal(format!(
                    "{label:?} carries a stale position"
                ))),
                None => Err(Error::UnknownLabel(label.clone())),
            },
            (TableDomain::Classes(_), Value::Class(_)) => Ok(()),
            _ => Err(Error::DomainMismatch(
                "value kind does not match the domain".into(),
            )),
        }
    }

    /// Constructs the value of a member label of an ordered domain.
    pub fn ordered_value(&self, label: &str) -> Result<Value> {
        match self {
            TableDomain::Ordered(s) => {
                let pos = s
                    .position(label)
                    .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
                Ok(Value::OrdElem {
                    pos,
                    label: label.to_string(),
                })
            }
            _ => Err(Error::DomainMismatch("not an ordered domain".into())),
        }
    }

    /// Addition, available only for group domains (used by the triangle
    /// inequality).
    pub fn add_values(&self, a: &Value, b: &Value) -> Result<Value> {
        match (self, a, b) {
            (TableDomain::Group(_), Value::Group(x), Value::Group(y)) => {
                Ok(Value::Group(x.add(y)?))
            }
            _ => Err(Error::DomainMismatch(
                "addition needs a group-valued domain".into(),
            )),
        }
    }

    pub fn is_group(&self) -> bool {
        matches!(self, TableDomain::Group(_))
    }
}

/// A finite set of named points with a distinguished subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpace {
    points: Vec<Label>,
    /// Indices into `points`, ascending.
    subset: Vec<usize>,
}

impl PointSpace {
    pub fn new(points: Vec<Label>, subset_labels: Vec<Label>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &points {
            if !seen.insert(p.clone()) {
                return Err(Error::Duplicate(format!("point {p:?} appears twice")));
            }
        }
        let mut subset = Vec::new();
        for s in &subset_labels {
            let idx = points
                .iter()
                .position(|p| p == s)
                .ok_or_else(|| Error::UnknownLabel(s.clone()))?;
            if subset.contains(&idx) {
                return Err(Error::Duplicate(format!(
                    "subset point {s:?} appears twice"
                )));
            }
            subset.push(idx);
        }
        subset.sort_unstable();
        Ok(PointSpace { points, subset })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Label] {
        &self.points
    }

    pub fn subset_indices(&self) -> &[usize] {
        &self.subset
    }

    pub fn subset_labels(&self) -> Vec<Label> {
        self.subset
            .iter()
            .map(|i| self.points[*i].clone())
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn in_subset(&self, idx: usize) -> bool {
        self.subset.contains(&idx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Metric,
    Ultrametric,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Metric => write!(f, "metric"),
            Flavor::Ultrametric => write!(f, "ultrametric"),
        }
    }
}

/// One violated axiom with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// `M0`..`M4` or `U0`..`U4`.
    pub axiom: String,
    pub witness: Vec<Label>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at ({}): {}",
            self.axiom,
            self.witness.join(","),
            self.detail
        )
    }
}

/// The full list of axiom violations found in a table; empty iff valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn axiom_name(flavor: Flavor, idx: usize) -> String {
    let letter = match flavor {
        Flavor::Metric => 'M',
        Flavor::Ultrametric => 'U',
    };
    format!("{letter}{idx}")
}

/// Checks every axiom of the declared flavor over the raw rows and lists
/// each violation with a witness. Shape and membership problems are errors,
/// not violations. `allow_vanishing` relaxes only the off-diagonal
/// positivity (the pseudo case).
pub fn validate_rows(
    space: &PointSpace,
    domain: &TableDomain,
    flavor: Flavor,
    rows: &[Vec<Value>],
    allow_vanishing: bool,
) -> Result<Report> {
    let n = space.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidTable(format!(
            "table shape does not match the {n} points"
        )));
    }
    for row in rows {
        for v in row {
            domain.check_member(v)?;
        }
    }
    if flavor == Flavor::Metric && !domain.is_group() {
        return Err(Error::InvalidTable(
            "a metric-flavored table needs a group-valued domain".into(),
        ));
    }

    let zero = domain.zero_value();
    let pts = space.points();
    let mut report = Report::default();

    for i in 0..n {
        if rows[i][i] != zero {
            report.violations.push(Violation {
                axiom: axiom_name(flavor, 1),
                witness: vec![pts[i].clone()],
                detail: format!("diagonal entry is {}", rows[i][i]),
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !allow_vanishing && rows[i][j].is_bottom() {
                report.violations.push(Violation {
                    axiom: axiom_name(flavor, 0),
                    witness: vec![pts[i].clone(), pts[j].clone()],
                    detail: "vanishing distance between distinct points".into(),
                });
            }
            if rows[i][j].try_cmp(&zero)?.is_lt() {
                report.violations.push(Violation {
                    axiom: axiom_name(flavor, 2),
                    witness: vec![pts[i].clone(), pts[j].clone()],
                    detail: format!("negative distance {}", rows[i][j]),
                });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rows[i][j] != rows[j][i] {
                report.violations.push(Violation {
                    axiom: axiom_name(flavor, 3),
                    witness: vec![pts[i].clone(), pts[j].clone()],
                    detail: format!("{} vs {}", rows[i][j], rows[j][i]),
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let bound = match flavor {
                    Flavor::Metric => domain.add_values(&rows[i][k], &rows[k][j])?,
                    Flavor::Ultrametric => rows[i][k].max(&rows[k][j])?,
                };
                if rows[i][j].try_cmp(&bound)?.is_gt() {
                    report.violations.push(Violation {
                        axiom: axiom_name(flavor, 4),
                        witness: vec![pts[i].clone(), pts[j].clone(), pts[k].clone()],
                        detail: format!("{} > {}", rows[i][j], bound),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// A validated distance table of a declared flavor. Off-diagonal values are
/// strictly positive; construction fails on any axiom violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricTable {
    space: PointSpace,
    domain: TableDomain,
    flavor: Flavor,
    values: Vec<Value>,
}

impl MetricTable {
    pub fn new(
        space: PointSpace,
        domain: TableDomain,
        flavor: Flavor,
        rows: Vec<Vec<Value>>,
    ) -> Result<Self> {
        let report = validate_rows(&space, &domain, flavor, &rows, false)?;
        if !report.is_clean() {
            return Err(Error::InvalidTable(report.to_string()));
        }
        Ok(MetricTable {
            space,
            domain,
            flavor,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn domain(&self) -> &TableDomain {
        &self.domain
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn at(&self, i: usize, j: usize) -> &Value {
        &self.values[i * self.space.len() + j]
    }

    pub fn between(&self, x: &str, y: &str) -> Result<&Value> {
        Ok(self.at(self.space.index_of(x)?, self.space.index_of(y)?))
    }

    pub fn rows(&self) -> Vec<Vec<Value>> {
        let n = self.space.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }

    /// Distinct values occurring in the table, including the diagonal zero.
    pub fn occurring_values(&self) -> Vec<Value> {
        let mut out: Vec<Value> = Vec::new();
        for v in &self.values {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// The restriction to a sub-family of points, revalidated.
    pub fn restrict(&self, labels: &[Label], subset_labels: Vec<Label>) -> Result<MetricTable> {
        let idx: Vec<usize> = labels
            .iter()
            .map(|l| self.space.index_of(l))
            .collect::<Result<_>>()?;
        let rows = idx
            .iter()
            .map(|i| idx.iter().map(|j| self.at(*i, *j).clone()).collect())
            .collect();
        let space = PointSpace::new(labels.to_vec(), subset_labels)?;
        MetricTable::new(space, self.domain.clone(), self.flavor, rows)
    }
}

/// Like `MetricTable` but off-diagonal values may vanish. Produced by
/// pullbacks and the vanishing construction; never accepted where a genuine
/// table is required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoTable {
    space: PointSpace,
    domain: TableDomain,
    flavor: Flavor,
    values: Vec<Value>,
}

impl PseudoTable {
    pub fn new(
        space: PointSpace,
        domain: TableDomain,
        flavor: Flavor,
        rows: Vec<Vec<Value>>,
    ) -> Result<Self> {
        let report = validate_rows(&space, &domain, flavor, &rows, true)?;
        if !report.is_clean() {
            return Err(Error::InvalidTable(report.to_string()));
        }
        Ok(PseudoTable {
            space,
            domain,
            flavor,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn domain(&self) -> &TableDomain {
        &self.domain
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn at(&self, i: usize, j: usize) -> &Value {
        &self.values[i * self.space.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Value>> {
        let n = self.space.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }
}

fn check_compatible(d: &MetricTable, e: &MetricTable) -> Result<()> {
    if d.space() != e.space() {
        return Err(Error::DomainMismatch("tables over different spaces".into()));
    }
    if d.domain() != e.domain() {
        return Err(Error::DomainMismatch(
            "tables over different value domains".into(),
        ));
    }
    if d.flavor() != e.flavor() {
        return Err(Error::DomainMismatch("tables of different flavors".into()));
    }
    Ok(())
}

/// Pointwise maximum of two tables over the same space, domain and flavor.
pub fn join(d: &MetricTable, e: &MetricTable) -> Result<MetricTable> {
    check_compatible(d, e)?;
    let n = d.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(d.at(i, j).max(e.at(i, j))?);
        }
        rows.push(row);
    }
    MetricTable::new(d.space().clone(), d.domain().clone(), d.flavor(), rows)
}

/// Pullback of a table along a total point map `f : X -> Y`; the result is a
/// pseudo table on `X` (distinct points may collapse).
pub fn pullback(
    x_points: &[Label],
    f: &BTreeMap<Label, Label>,
    d: &MetricTable,
) -> Result<PseudoTable> {
    let image: Vec<usize> = x_points
        .iter()
        .map(|x| {
            let y = f.get(x).ok_or_else(|| Error::NotTotal(x.clone()))?;
            d.space().index_of(y)
        })
        .collect::<Result<_>>()?;
    let n = x_points.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(d.at(image[i], image[j]).clone());
        }
        rows.push(row);
    }
    let space = PointSpace::new(x_points.to_vec(), Vec::new())?;
    PseudoTable::new(space, d.domain().clone(), d.flavor(), rows)
}

/// The least distance from `x` to a nonempty family of points; minima exist
/// because the value set is finite.
pub fn dist_to_set(d: &MetricTable, x: &str, a: &[Label]) -> Result<Value> {
    if a.is_empty() {
        return Err(Error::Empty("distance to the empty set".into()));
    }
    let xi = d.space().index_of(x)?;
    let mut best: Option<Value> = None;
    for lab in a {
        let v = d.at(xi, d.space().index_of(lab)?).clone();
        best = Some(match best {
            None => v,
            Some(b) => b.min(&v)?,
        });
    }
    Ok(best.expect("a is nonempty"))
}

/// `{ y : d(x, y) <= s }`.
pub fn closed_ball(d: &MetricTable, x: &str, s: &Value) -> Result<Vec<Label>> {
    let xi = d.space().index_of(x)?;
    let mut out = Vec::new();
    for (j, p) in d.space().points().iter().enumerate() {
        if d.at(xi, j).try_cmp(s)?.is_le() {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// `{ y : d(x, y) < s }`.
pub fn open_ball(d: &MetricTable, x: &str, s: &Value) -> Result<Vec<Label>> {
    let xi = d.space().index_of(x)?;
    let mut out = Vec::new();
    for (j, p) in d.space().points().iter().enumerate() {
        if d.at(xi, j).try_cmp(s)?.is_lt() {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Exhaustive triple scan of the isosceles property: whenever
/// `d(x, z) < d(y, z)`, the two larger sides agree, `d(y, z) = d(x, y)`.
pub fn check_isosceles(d: &MetricTable) -> Result<bool> {
    isosceles_rows(&d.rows())
}

/// The same scan over raw rows, for data that need not pass any axioms.
pub fn isosceles_rows(rows: &[Vec<Value>]) -> Result<bool> {
    let n = rows.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if rows[x][z].try_cmp(&rows[y][z])?.is_lt() && rows[y][z] != rows[x][y] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The pairwise-max ultrametric on labels of a bottomed ordered set:
/// distance of two distinct members is the larger of the two, the bottom on
/// the diagonal.
pub fn max_ultrametric(s: &BottomedOrderedSet, points: &[Label]) -> Result<MetricTable> {
    let domain = TableDomain::Ordered(s.clone());
    let vals: Vec<Value> = points
        .iter()
        .map(|p| domain.ordered_value(p))
        .collect::<Result<_>>()?;
    let n = points.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            if i == j {
                row.push(domain.zero_value());
            } else {
                row.push(vals[i].max(&vals[j])?);
            }
        }
        rows.push(row);
    }
    let space = PointSpace::new(points.to_vec(), Vec::new())?;
    MetricTable::new(space, domain, Flavor::Ultrametric, rows)
}

/// Is `e` within `eps` of `d`: pointwise `e <= d v eps` and `d <= e v eps`.
/// This is the closed ball of the distance between tables, so a table is
/// always in its own neighborhood.
pub fn in_neighborhood(e: &MetricTable, d: &MetricTable, eps: &Value) -> Result<bool> {
    check_compatible(d, e)?;
    if !eps.try_cmp(&d.domain().zero_value())?.is_gt() {
        return Err(Error::Nonpositive(format!("{eps}")));
    }
    let n = d.len();
    for i in 0..n {
        for j in 0..n {
            let dv = d.at(i, j);
            let ev = e.at(i, j);
            if ev.try_cmp(&dv.max(eps)?)?.is_gt() || dv.try_cmp(&ev.max(eps)?)?.is_gt() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The distance between two ultrametrics, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UdValue {
    Finite(Value),
    Infinity,
}

impl fmt::Display for UdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UdValue::Finite(v) => write!(f, "{v}"),
            UdValue::Infinity => write!(f, "inf"),
        }
    }
}

/// The least `eps` with `d <= e v eps` and `e <= d v eps` pointwise. On a
/// finite space this is attained: zero when the tables agree, otherwise the
/// largest of the two values over the pairs where they differ.
pub fn ud_distance(d: &MetricTable, e: &MetricTable) -> Result<UdValue> {
    check_compatible(d, e)?;
    if d.flavor() != Flavor::Ultrametric {
        return Err(Error::DomainMismatch(
            "the distance between tables is defined for ultrametrics".into(),
        ));
    }
    let n = d.len();
    let mut eps = d.domain().zero_value();
    for i in 0..n {
        for j in 0..n {
            if d.at(i, j) != e.at(i, j) {
                eps = eps.max(&d.at(i, j).max(e.at(i, j))?)?;
            }
        }
    }
    Ok(UdValue::Finite(eps))
}

/// Applies an isotone value map to every entry. The map must be isotone on
/// the occurring values and may send only the bottom to the bottom; the
/// result is validated as an ultrametric in the target domain.
pub fn transport(
    d: &MetricTable,
    target: TableDomain,
    psi: &dyn Fn(&Value) -> Result<Value>,
) -> Result<MetricTable> {
    let occurring = d.occurring_values();
    let mut images: Vec<(Value, Value)> = Vec::new();
    for v in &occurring {
        let img = psi(v)?;
        if img.is_bottom() && !v.is_bottom() {
            return Err(Error::InvalidTable(format!(
                "the map collapses the positive value {v} to the bottom"
            )));
        }
        images.push((v.clone(), img));
    }
    for (v, pv) in &images {
        for (w, pw) in &images {
            if v.try_cmp(w)?.is_le() && !pv.try_cmp(pw)?.is_le() {
                return Err(Error::InvalidTable(format!(
                    "the map is not isotone: {v} <= {w} but {pv} > {pw}"
                )));
            }
        }
    }
    let lookup = |v: &Value| -> Value {
        images
            .iter()
            .find(|(orig, _)| orig == v)
            .map(|(_, img)| img.clone())
            .expect("image computed for every occurring value")
    };
    let n = d.len();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| lookup(d.at(i, j))).collect())
        .collect();
    MetricTable::new(d.space().clone(), target, Flavor::Ultrametric, rows)
}

/// Transport along the natural covaluation: any group-valued metric becomes
/// a class-valued ultrametric.
pub fn covaluation_transport(d: &MetricTable) -> Result<MetricTable> {
    let vd = match d.domain() {
        TableDomain::Group(vd) => vd.clone(),
        _ => {
            return Err(Error::DomainMismatch(
                "covaluation transport needs a group-valued table".into(),
            ))
        }
    };
    let psi = |v: &Value| -> Result<Value> {
        match v {
            Value::Group(g) => Ok(Value::Class(covaluation(g))),
            _ => Err(Error::Internal(
                "group table holds a non-group value".into(),
            )),
        }
    };
    transport(d, TableDomain::Classes(vd), &psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::Rat;

    pub(crate) fn rational_table(
        points: &[&str],
        subset: &[&str],
        flavor: Flavor,
        rows: &[&[&str]],
    ) -> Result<MetricTable> {
        let space = PointSpace::new(
            points.iter().map(|s| s.to_string()).collect(),
            subset.iter().map(|s| s.to_string()).collect(),
        )?;
        let rows: Vec<Vec<Value>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| Value::Group(GroupElement::Rational(s.parse().unwrap())))
                    .collect()
            })
            .collect();
        MetricTable::new(
            space,
            TableDomain::Group(ValueDomain::Rational),
            flavor,
            rows,
        )
    }

    fn rv(s: &str) -> Value {
        Value::Group(GroupElement::Rational(s.parse().unwrap()))
    }

    #[test]
    fn two_point_table_is_both_flavors() {
        let rows: &[&[&str]] = &[&["0", "1"], &["1", "0"]];
        assert!(rational_table(&["p", "q"], &[], Flavor::Metric, rows).is_ok());
        assert!(rational_table(&["p", "q"], &[], Flavor::Ultrametric, rows).is_ok());
    }

    #[test]
    fn strong_triangle_violation_is_reported_with_witness() {
        let space = PointSpace::new(vec!["p0".into(), "p1".into(), "p2".into()], vec![]).unwrap();
        // the difference table of {0, 1, 3}: a metric but not an ultrametric
        let rows: Vec<Vec<Value>> = [["0", "1", "3"], ["1", "0", "2"], ["3", "2", "0"]]
            .iter()
            .map(|r| r.iter().map(|s| rv(s)).collect())
            .collect();
        let domain = TableDomain::Group(ValueDomain::Rational);
        // passes the metric axioms
        let m = validate_rows(&space, &domain, Flavor::Metric, &rows, false).unwrap();
        assert!(m.is_clean());
        // fails the strong triangle at (p0, p2) with witness p1
        let u = validate_rows(&space, &domain, Flavor::Ultrametric, &rows, false).unwrap();
        assert!(!u.is_clean());
        assert!(u.violations.iter().any(|v| v.axiom == "U4"
            && v.witness == vec!["p0".to_string(), "p2".to_string(), "p1".to_string()]));
    }

    #[test]
    fn triangle_violation_is_reported_too() {
        let space = PointSpace::new(vec!["p0".into(), "p1".into(), "p2".into()], vec![]).unwrap();
        // 3 > 1 + 1, so this is not even a metric
        let rows: Vec<Vec<Value>> = [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]]
            .iter()
            .map(|r| r.iter().map(|s| rv(s)).collect())
            .collect();
        let domain = TableDomain::Group(ValueDomain::Rational);
        let m = validate_rows(&space, &domain, Flavor::Metric, &rows, false).unwrap();
        assert!(m.violations.iter().any(|v| v.axiom == "M4"));
    }

    #[test]
    fn asymmetric_table_reports_symmetry() {
        let space = PointSpace::new(vec!["p".into(), "q".into()], vec![]).unwrap();
        let rows = vec![vec![rv("0"), rv("1")], vec![rv("2"), rv("0")]];
        let report = validate_rows(
            &space,
            &TableDomain::Group(ValueDomain::Rational),
            Flavor::Metric,
            &rows,
            false,
        )
        .unwrap();
        assert!(report.violations.iter().any(|v| v.axiom == "M3"));
    }

    #[test]
    fn join_is_idempotent_and_commutes() {
        let rows: &[&[&str]] = &[&["0", "1", "2"], &["1", "0", "2"], &["2", "2", "0"]];
        let d = rational_table(&["a", "b", "c"], &[], Flavor::Ultrametric, rows).unwrap();
        assert_eq!(join(&d, &d).unwrap(), d);
        let rows2: &[&[&str]] = &[&["0", "2", "1"], &["2", "0", "2"], &["1", "2", "0"]];
        let e = rational_table(&["a", "b", "c"], &[], Flavor::Ultrametric, rows2).unwrap();
        assert_eq!(join(&d, &e).unwrap(), join(&e, &d).unwrap());
    }

    #[test]
    fn pullback_cases() {
        let rows: &[&[&str]] = &[&["0", "1"], &["1", "0"]];
        let d = rational_table(&["a", "b"], &[], Flavor::Metric, rows).unwrap();
        let pts: Vec<Label> = vec!["a".into(), "b".into()];
        let id: BTreeMap<Label, Label> = pts.iter().map(|p| (p.clone(), p.clone())).collect();
        let back = pullback(&pts, &id, &d).unwrap();
        assert_eq!(back.rows(), d.rows());

        let constant: BTreeMap<Label, Label> =
            pts.iter().map(|p| (p.clone(), "a".to_string())).collect();
        let zeroed = pullback(&pts, &constant, &d).unwrap();
        assert!(zeroed.rows().iter().flatten().all(Value::is_bottom));

        let partial: BTreeMap<Label, Label> =
            [("a".to_string(), "a".to_string())].into_iter().collect();
        assert!(pullback(&pts, &partial, &d).is_err());
    }

    #[test]
    fn dist_to_set_cases() {
        let rows: &[&[&str]] = &[&["0", "1", "4"], &["1", "0", "4"], &["4", "4", "0"]];
        let d = rational_table(&["x", "a", "b"], &["a", "b"], Flavor::Ultrametric, rows).unwrap();
        let a: Vec<Label> = vec!["a".into(), "b".into()];
        assert_eq!(dist_to_set(&d, "a", &a).unwrap(), rv("0"));
        assert_eq!(dist_to_set(&d, "x", &a).unwrap(), rv("1"));
        assert!(dist_to_set(&d, "x", &[]).is_err());
    }

    #[test]
    fn dist_to_set_is_nonexpansive_under_strong_triangle() {
        let rows: &[&[&str]] = &[
            &["0", "1", "4", "4"],
            &["1", "0", "4", "4"],
            &["4", "4", "0", "2"],
            &["4", "4", "2", "0"],
        ];
        let d = rational_table(
            &["x", "y", "a", "b"],
            &["a", "b"],
            Flavor::Ultrametric,
            rows,
        )
        .unwrap();
        let a = d.space().subset_labels();
        for x in d.space().points() {
            for y in d.space().points() {
                let rx = dist_to_set(&d, x, &a).unwrap();
                let ry = dist_to_set(&d, y, &a).unwrap();
                let dxy = d.between(x, y).unwrap().clone();
                assert!(rx.try_cmp(&dxy.max(&ry).unwrap()).unwrap().is_le());
            }
        }
    }

    #[test]
    fn ball_cases() {
        let rows: &[&[&str]] = &[&["0", "1", "2"], &["1", "0", "2"], &["2", "2", "0"]];
        let d = rational_table(&["a", "b", "c"], &[], Flavor::Ultrametric, rows).unwrap();
        assert_eq!(
            closed_ball(&d, "a", &rv("0")).unwrap(),
            vec!["a".to_string()]
        );
        assert_eq!(closed_ball(&d, "a", &rv("2")).unwrap().len(), 3);
        assert_eq!(open_ball(&d, "a", &rv("1")).unwrap(), vec!["a".to_string()]);
        assert_eq!(open_ball(&d, "a", &rv("2")).unwrap().len(), 2);
        // ball centering: any member is a center
        for y in closed_ball(&d, "a", &rv("1")).unwrap() {
            assert_eq!(
                closed_ball(&d, "a", &rv("1")).unwrap(),
                closed_ball(&d, &y, &rv("1")).unwrap()
            );
        }
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<MetricTable>();
        assert_send_sync::<PseudoTable>();
        assert_send_sync::<Value>();
        assert_send_sync::<TableDomain>();
        assert_send_sync::<PointSpace>();
        assert_send_sync::<crate::group::GroupElement>();
        assert_send_sync::<crate::hahn::HahnSeries>();
        assert_send_sync::<crate::order::BottomedOrderedSet>();
    }

    #[test]
    fn isosceles_scan() {
        let rows: &[&[&str]] = &[&["0", "1", "2"], &["1", "0", "2"], &["2", "2", "0"]];
        let u = rational_table(&["a", "b", "c"], &[], Flavor::Ultrametric, rows).unwrap();
        assert!(check_isosceles(&u).unwrap());

        // treated as raw data, the witness triple (p0, p2, p1) breaks it:
        // d(p1, p2) = 1 < 3 = d(p0, p2) but d(p0, p1) = 1 != 3
        let raw: Vec<Vec<Value>> = [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]]
            .iter()
            .map(|r| r.iter().map(|s| rv(s)).collect())
            .collect();
        assert!(!isosceles_rows(&raw).unwrap());

        let rows: &[&[&str]] = &[&["0", "5"], &["5", "0"]];
        let two = rational_table(&["a", "b"], &[], Flavor::Ultrametric, rows).unwrap();
        assert!(check_isosceles(&two).unwrap());
    }

    #[test]
    fn max_ultrametric_cases() {
        let s = BottomedOrderedSet::from_strs(&["0", "1", "2"]);
        let t = max_ultrametric(&s, &["1".to_string(), "2".to_string()]).unwrap();
        assert_eq!(t.between("1", "2").unwrap().to_string(), "2");
        assert!(t.between("1", "1").unwrap().is_bottom());
        assert!(matches!(
            max_ultrametric(&s, &["1".to_string(), "1".to_string()]),
            Err(Error::Duplicate(_))
        ));
    }

    #[test]
    fn neighborhood_cases() {
        let d = rational_table(
            &["p", "q"],
            &[],
            Flavor::Ultrametric,
            &[&["0", "3"], &["3", "0"]],
        )
        .unwrap();
        let e = rational_table(
            &["p", "q"],
            &[],
            Flavor::Ultrametric,
            &[&["0", "1"], &["1", "0"]],
        )
        .unwrap();
        assert!(in_neighborhood(&d, &d, &rv("1/2")).unwrap());
        assert!(!in_neighborhood(&e, &d, &rv("2")).unwrap());
        assert!(in_neighborhood(&e, &d, &rv("4")).unwrap());
        assert!(in_neighborhood(&e, &d, &rv("0")).is_err());
    }

    #[test]
    fn ud_distance_cases() {
        let d = rational_table(
            &["p", "q"],
            &[],
            Flavor::Ultrametric,
            &[&["0", "3"], &["3", "0"]],
        )
        .unwrap();
        let e = rational_table(
            &["p", "q"],
            &[],
            Flavor::Ultrametric,
            &[&["0", "1"], &["1", "0"]],
        )
        .unwrap();
        assert_eq!(ud_distance(&d, &d).unwrap(), UdValue::Finite(rv("0")));
        // scan over candidate eps in the value set: 3 is the least that works
        assert_eq!(ud_distance(&d, &e).unwrap(), UdValue::Finite(rv("3")));
    }

    #[test]
    fn transport_cases() {
        let d = rational_table(
            &["p", "q"],
            &[],
            Flavor::Ultrametric,
            &[&["0", "3"], &["3", "0"]],
        )
        .unwrap();
        let identity = |v: &Value| -> Result<Value> { Ok(v.clone()) };
        let same = transport(&d, d.domain().clone(), &identity).unwrap();
        assert_eq!(same.rows(), d.rows());

        let halve = |v: &Value| -> Result<Value> {
            match v {
                Value::Group(GroupElement::Rational(r)) => Ok(Value::Group(
                    GroupElement::Rational(r * &Rat::new(1, 2).unwrap()),
                )),
                _ => unreachable!(),
            }
        };
        let halved = transport(&d, d.domain().clone(), &halve).unwrap();
        assert_eq!(halved.between("p", "q").unwrap(), &rv("3/2"));

        let collapse = |v: &Value| -> Result<Value> {
            let _ = v;
            Ok(rv("0"))
        };
        assert!(transport(&d, d.domain().clone(), &collapse).is_err());
    }

    #[test]
    fn covaluation_transport_of_difference_metric() {
        use crate::group::difference_metric;
        let pts: Vec<GroupElement> = [0i64, 1, 3]
            .iter()
            .map(|n| GroupElement::Rational(Rat::from_int(*n)))
            .collect();
        let d = difference_metric(&pts).unwrap();
        let u = covaluation_transport(&d).unwrap();
        assert_eq!(u.flavor(), Flavor::Ultrametric);
    }
}

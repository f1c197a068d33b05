//! Simultaneous extension of metrics and ultrametrics from a distinguished
//! subset to the whole space.
//!
//! The pipeline rounds the input distances strictly down a gauge chain,
//! lifts the rounded table over a fixed base ultrametric along a retraction,
//! and glues the input back on top of the part of the lift that vanishes on
//! the subset. The resulting operator restricts to the identity on the
//! subset, preserves the flavor of its input, commutes with pointwise
//! maxima, is monotone, and (for rational ultrametrics) embeds isometrically
//! with respect to the distance between tables.
//!
//! For rational and ordered-set values the same computation can be carried
//! out inside the ambient Hahn field, where every distinct value occupies
//! its own Archimedean class; `crosscheck_embedding` runs both routes and
//! demands exact agreement.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::group::{covaluation, GroupElement, ValueDomain};
use crate::hahn::{field_domain, field_image};
use crate::order::{BottomedOrderedSet, Label};
use crate::rat::Rat;
use crate::retract::{tau_retraction, Retraction};
use crate::space::{dist_to_set, Flavor, MetricTable, PointSpace, PseudoTable, TableDomain, Value};

/// A strictly descending chain of positive values used to round distances
/// strictly downward. Group-valued chains beyond the rationals must descend
/// in Archimedean classes, because their rounding compares classes; rational
/// and ordered-set chains compare values directly (their distinct values sit
/// in distinct classes of the ambient field).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeChain {
    domain: TableDomain,
    values: Vec<Value>,
}

impl GaugeChain {
    pub fn new(domain: TableDomain, values: Vec<Value>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty(
                "a gauge chain needs at least one entry".into(),
            ));
        }
        let zero = domain.zero_value();
        for v in &values {
            domain.check_member(v)?;
            if !v.try_cmp(&zero)?.is_gt() {
                return Err(Error::Nonpositive(v.to_string()));
            }
        }
        for w in values.windows(2) {
            if !w[0].try_cmp(&w[1])?.is_gt() {
                return Err(Error::InvalidTable(format!(
                    "chain is not strictly descending at {} .. {}",
                    w[0], w[1]
                )));
            }
        }
        if uses_class_comparison(&domain) {
            for w in values.windows(2) {
                let ca = chain_key(&domain, &w[0])?;
                let cb = chain_key(&domain, &w[1])?;
                if !ca.try_cmp(&cb)?.is_gt() {
                    return Err(Error::InvalidTable(format!(
                        "chain entries {} and {} share an Archimedean class",
                        w[0], w[1]
                    )));
                }
            }
        }
        Ok(GaugeChain { domain, values })
    }

    pub fn rational(values: Vec<Rat>) -> Result<Self> {
        GaugeChain::new(
            TableDomain::Group(ValueDomain::Rational),
            values
                .into_iter()
                .map(|r| Value::Group(GroupElement::Rational(r)))
                .collect(),
        )
    }

    pub fn domain(&self) -> &TableDomain {
        &self.domain
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn top(&self) -> &Value {
        &self.values[0]
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.values.contains(v)
    }

    /// Rounds a value strictly downward: the bottom maps to the bottom, and
    /// a positive value maps to the first chain entry strictly below it
    /// (comparing classes for class-graded domains). A positive value with
    /// no chain entry below it is rejected: the chain is not characteristic
    /// for that input.
    pub fn round_down(&self, v: &Value) -> Result<Value> {
        self.domain.check_member(v)?;
        if v.is_bottom() {
            return Ok(self.domain.zero_value());
        }
        if uses_class_comparison(&self.domain) {
            let key = chain_key(&self.domain, v)?;
            for entry in &self.values {
                if chain_key(&self.domain, entry)?.try_cmp(&key)?.is_lt() {
                    return Ok(entry.clone());
                }
            }
        } else {
            for entry in &self.values {
                if entry.try_cmp(v)?.is_lt() {
                    return Ok(entry.clone());
                }
            }
        }
        Err(Error::NotCharacteristic(v.to_string()))
    }
}

fn uses_class_comparison(domain: &TableDomain) -> bool {
    matches!(
        domain,
        TableDomain::Group(ValueDomain::Lex(_)) | TableDomain::Group(ValueDomain::Hahn(_))
    )
}

fn chain_key(domain: &TableDomain, v: &Value) -> Result<Value> {
    match (domain, v) {
        (TableDomain::Group(_), Value::Group(g)) => Ok(Value::Class(covaluation(g))),
        (TableDomain::Classes(_), Value::Class(_)) => Ok(v.clone()),
        _ => Err(Error::DomainMismatch(
            "value does not match the chain domain".into(),
        )),
    }
}

/// The pseudo-ultrametric that agrees with `h` far from the subset and
/// vanishes on it: each entry is capped by the larger of the two distances
/// to the subset. Restricted to the complement it is a genuine ultrametric.
pub fn vanishing_part(h: &MetricTable) -> Result<PseudoTable> {
    if h.flavor() != Flavor::Ultrametric {
        return Err(Error::InvalidTable(
            "the base table must be an ultrametric".into(),
        ));
    }
    let a = h.space().subset_labels();
    if a.is_empty() {
        return Err(Error::Empty("the distinguished subset is empty".into()));
    }
    let n = h.len();
    let rho: Vec<Value> = h
        .space()
        .points()
        .iter()
        .map(|p| dist_to_set(h, p, &a))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(h.at(i, j).min(&rho[i].max(&rho[j])?)?);
        }
        rows.push(row);
    }
    PseudoTable::new(
        h.space().clone(),
        h.domain().clone(),
        Flavor::Ultrametric,
        rows,
    )
}

fn subset_positions(x: &MetricTable, on_subset: &MetricTable) -> Result<Vec<usize>> {
    let a = x.space().subset_labels();
    if a.is_empty() {
        return Err(Error::Empty("the distinguished subset is empty".into()));
    }
    if on_subset.space().points() != a.as_slice() {
        return Err(Error::DomainMismatch(
            "the subset table must list exactly the subset points, in ambient order".into(),
        ));
    }
    if on_subset.domain() != x.domain() {
        return Err(Error::DomainMismatch(
            "subset table over a different value domain".into(),
        ));
    }
    Ok(x.space().subset_indices().to_vec())
}

fn image_position(subset_indices: &[usize], img: usize) -> Result<usize> {
    subset_indices
        .iter()
        .position(|i| *i == img)
        .ok_or_else(|| Error::Internal("retraction image outside the subset".into()))
}

/// Glues a table on the subset onto the whole space: the pullback of `d`
/// along the retraction joined with the vanishing part of the base. The
/// result keeps `d`'s flavor and restricts to `d` on the subset.
pub fn glue(base: &MetricTable, r: &Retraction, d: &MetricTable) -> Result<MetricTable> {
    if r.space() != base.space() {
        return Err(Error::DomainMismatch(
            "retraction built on another space".into(),
        ));
    }
    let subset_indices = subset_positions(base, d)?;
    let theta = vanishing_part(base)?;
    let n = base.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let pi = image_position(&subset_indices, r.map_index(i))?;
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let pj = image_position(&subset_indices, r.map_index(j))?;
            row.push(d.at(pi, pj).max(theta.at(i, j))?);
        }
        rows.push(row);
    }
    MetricTable::new(
        base.space().clone(),
        base.domain().clone(),
        d.flavor(),
        rows,
    )
}

/// Lifts an ultrametric on the subset over the base: the pullback along the
/// retraction joined with the base itself. Always at least the base.
pub fn lift(base: &MetricTable, r: &Retraction, k: &MetricTable) -> Result<MetricTable> {
    if base.flavor() != Flavor::Ultrametric || k.flavor() != Flavor::Ultrametric {
        return Err(Error::InvalidTable(
            "lift combines ultrametric tables".into(),
        ));
    }
    if r.space() != base.space() {
        return Err(Error::DomainMismatch(
            "retraction built on another space".into(),
        ));
    }
    let subset_indices = subset_positions(base, k)?;
    let n = base.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let pi = image_position(&subset_indices, r.map_index(i))?;
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let pj = image_position(&subset_indices, r.map_index(j))?;
            row.push(k.at(pi, pj).max(base.at(i, j))?);
        }
        rows.push(row);
    }
    MetricTable::new(
        base.space().clone(),
        base.domain().clone(),
        Flavor::Ultrametric,
        rows,
    )
}

/// The audited result of one extension run: the inputs, every intermediate
/// table, and the certificates checked on the way out.
#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub d: MetricTable,
    pub h: MetricTable,
    pub retraction: Retraction,
    pub chain: GaugeChain,
    /// The chain-rounded copy of `d` on the subset.
    pub rounded: MetricTable,
    /// The rounded table lifted over `h` to the whole space.
    pub lifted: MetricTable,
    /// The vanishing part of the lifted base.
    pub vanishing: PseudoTable,
    pub output: MetricTable,
    pub restriction_ok: bool,
    pub flavor_ok: bool,
}

fn check_extension_inputs(
    d: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
) -> Result<()> {
    if h.flavor() != Flavor::Ultrametric {
        return Err(Error::InvalidTable(
            "the base table must be an ultrametric".into(),
        ));
    }
    if chain.domain() != h.domain() {
        return Err(Error::DomainMismatch(
            "chain over a different value domain".into(),
        ));
    }
    if r.space() != h.space() {
        return Err(Error::DomainMismatch(
            "retraction built on another space".into(),
        ));
    }
    for v in h.occurring_values() {
        if !v.is_bottom() && !chain.contains(&v) {
            return Err(Error::InvalidTable(format!(
                "base value {v} lies outside the gauge chain"
            )));
        }
    }
    subset_positions(h, d)?;
    Ok(())
}

/// The full extension operator: round the subset table down the chain, lift
/// it over the base along the retraction, and glue the original table on
/// top. Restricts exactly to the input on the subset and keeps its flavor.
///
/// The join law `extend(d v e) = extend(d) v extend(e)` additionally needs
/// the retraction to send every point to a nearest subset point of the
/// base, which is what `extension_retraction` constructs.
pub fn extend_metric(
    d: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
) -> Result<ExtensionReport> {
    check_extension_inputs(d, h, r, chain)?;
    let a = h.space().subset_labels();
    let m = a.len();
    let mut k_rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            row.push(chain.round_down(d.at(i, j))?);
        }
        k_rows.push(row);
    }
    let rounded = MetricTable::new(
        d.space().clone(),
        d.domain().clone(),
        Flavor::Ultrametric,
        k_rows,
    )
    .map_err(|e| match e {
        Error::InvalidTable(msg) => Error::InvalidTable(format!(
            "the rounded table is not an ultrametric (the input is not graded by the chain): {msg}"
        )),
        other => other,
    })?;
    let lifted = lift(h, r, &rounded)?;
    let vanishing = vanishing_part(&lifted)?;
    let output = glue(&lifted, r, d)?;

    let mut restriction_ok = true;
    let subset_indices = h.space().subset_indices();
    for (pi, i) in subset_indices.iter().enumerate() {
        for (pj, j) in subset_indices.iter().enumerate() {
            if output.at(*i, *j) != d.at(pi, pj) {
                restriction_ok = false;
            }
        }
    }
    if !restriction_ok {
        return Err(Error::Internal(
            "extension failed to restrict to its input on the subset".into(),
        ));
    }
    let flavor_ok = output.flavor() == d.flavor();
    Ok(ExtensionReport {
        d: d.clone(),
        h: h.clone(),
        retraction: r.clone(),
        chain: chain.clone(),
        rounded,
        lifted,
        vanishing,
        output,
        restriction_ok,
        flavor_ok,
    })
}

/// The rational-ultrametric specialization, computed directly in rational
/// arithmetic. When a value set is supplied, every input value and chain
/// entry must belong to it, and the output values are certified to stay
/// inside it.
pub fn extend_ultrametric(
    d: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
    value_set: Option<&BTreeSet<Rat>>,
) -> Result<ExtensionReport> {
    if d.domain() != &TableDomain::Group(ValueDomain::Rational) {
        return Err(Error::DomainMismatch(
            "the ultrametric extensor works on rational tables".into(),
        ));
    }
    if d.flavor() != Flavor::Ultrametric {
        return Err(Error::InvalidTable("expected an ultrametric input".into()));
    }
    if let Some(s) = value_set {
        if !s.contains(&Rat::zero()) {
            return Err(Error::InvalidTable(
                "the value set must contain zero".into(),
            ));
        }
        let members = |t: &MetricTable| -> Result<()> {
            for v in t.occurring_values() {
                let r = rational_of(&v)?;
                if !s.contains(r) {
                    return Err(Error::DomainMismatch(format!(
                        "value {r} outside the value set"
                    )));
                }
            }
            Ok(())
        };
        members(d)?;
        members(h)?;
        for v in chain.values() {
            let r = rational_of(v)?;
            if !s.contains(r) {
                return Err(Error::DomainMismatch(format!(
                    "chain entry {r} outside the value set"
                )));
            }
        }
    }
    let report = extend_metric(d, h, r, chain)?;
    if let Some(s) = value_set {
        for v in report.output.occurring_values() {
            let r = rational_of(&v)?;
            if !s.contains(r) {
                return Err(Error::Internal(format!(
                    "output value {r} escaped the value set"
                )));
            }
        }
    }
    Ok(report)
}

fn rational_of(v: &Value) -> Result<&Rat> {
    match v {
        Value::Group(GroupElement::Rational(r)) => Ok(r),
        _ => Err(Error::DomainMismatch(format!(
            "{v} is not a rational value"
        ))),
    }
}

/// Builds the retraction the extension pipeline needs: the tau-window
/// retraction of the base, computed where every distinct base value has its
/// own Archimedean class. There the window collapses to the exact nearest
/// points, so the result is the index-least nearest-point map; rational
/// bases are routed through their field embedding to get the same effect.
pub fn extension_retraction(h: &MetricTable, tau: &Rat) -> Result<Retraction> {
    match h.domain() {
        TableDomain::Group(ValueDomain::Rational) => {
            let values: BTreeSet<Rat> = h
                .occurring_values()
                .iter()
                .map(|v| rational_of(v).cloned())
                .collect::<Result<_>>()?;
            let (s_ord, embed) = rational_field_embedding(&values)?;
            let _ = s_ord;
            let h_emb = embed_rational_table(h, &embed)?;
            let r = tau_retraction(&h_emb, tau)?;
            Retraction::new(h.space().clone(), r.mapping().to_vec(), tau.clone())
        }
        _ => tau_retraction(h, tau),
    }
}

/// A constant base: the top chain value between any two distinct points.
/// Always a valid chain-valued ultrametric.
pub fn constant_base(space: &PointSpace, chain: &GaugeChain) -> Result<MetricTable> {
    let n = space.len();
    let zero = chain.domain().zero_value();
    let top = chain.top().clone();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { zero.clone() } else { top.clone() })
                .collect()
        })
        .collect();
    MetricTable::new(
        space.clone(),
        chain.domain().clone(),
        Flavor::Ultrametric,
        rows,
    )
}

/// Synthesizes a rational chain from the positive values of the given
/// tables: the values themselves in descending order plus one extra entry,
/// half the least value, so every occurring value rounds strictly down.
pub fn auto_chain(tables: &[&MetricTable]) -> Result<GaugeChain> {
    let mut values: BTreeSet<Rat> = BTreeSet::new();
    for t in tables {
        if t.domain() != &TableDomain::Group(ValueDomain::Rational) {
            return Err(Error::DomainMismatch(
                "automatic chains are synthesized for rational tables only".into(),
            ));
        }
        for v in t.occurring_values() {
            let r = rational_of(&v)?;
            if r.is_positive() {
                values.insert(r.clone());
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Empty(
            "no positive values to build a chain from".into(),
        ));
    }
    let least = values.iter().next().expect("nonempty").clone();
    let mut chain: Vec<Rat> = values.into_iter().rev().collect();
    chain.push(least.half());
    GaugeChain::rational(chain)
}

/// Exact witness that two extensions violate the join law, if any.
pub fn join_law_witness(
    d1: &MetricTable,
    d2: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
) -> Result<Option<(Label, Label)>> {
    let joined = crate::space::join(d1, d2)?;
    let lhs = extend_metric(&joined, h, r, chain)?.output;
    let rhs = crate::space::join(
        &extend_metric(d1, h, r, chain)?.output,
        &extend_metric(d2, h, r, chain)?.output,
    )?;
    let n = lhs.len();
    for i in 0..n {
        for j in 0..n {
            if lhs.at(i, j) != rhs.at(i, j) {
                return Ok(Some((
                    lhs.space().points()[i].clone(),
                    lhs.space().points()[j].clone(),
                )));
            }
        }
    }
    Ok(None)
}

/// Exact witness against monotonicity: requires `d1 <= d2` pointwise and
/// reports a pair where the extensions compare the wrong way.
pub fn monotonicity_witness(
    d1: &MetricTable,
    d2: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
) -> Result<Option<(Label, Label)>> {
    let m = d1.len();
    for i in 0..m {
        for j in 0..m {
            if d1.at(i, j).try_cmp(d2.at(i, j))?.is_gt() {
                return Err(Error::InvalidTable(
                    "monotonicity check needs d1 <= d2 pointwise".into(),
                ));
            }
        }
    }
    let out1 = extend_metric(d1, h, r, chain)?.output;
    let out2 = extend_metric(d2, h, r, chain)?.output;
    let n = out1.len();
    for i in 0..n {
        for j in 0..n {
            if out1.at(i, j).try_cmp(out2.at(i, j))?.is_gt() {
                return Ok(Some((
                    out1.space().points()[i].clone(),
                    out1.space().points()[j].clone(),
                )));
            }
        }
    }
    Ok(None)
}

/// The distances between two inputs and between their extensions; equal for
/// rational ultrametrics sharing base, retraction and chain.
pub fn isometry_certificate(
    d1: &MetricTable,
    d2: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
) -> Result<(crate::space::UdValue, crate::space::UdValue)> {
    let u1 = extend_ultrametric(d1, h, r, chain, None)?.output;
    let u2 = extend_ultrametric(d2, h, r, chain, None)?.output;
    Ok((
        crate::space::ud_distance(d1, d2)?,
        crate::space::ud_distance(&u1, &u2)?,
    ))
}

/// Forward and backward dictionaries of a field embedding of finitely many
/// values. Lookups scan linearly; value sets are small.
#[derive(Clone, Debug)]
pub struct ValueEmbedding {
    pairs: Vec<(Value, Value)>,
    target: TableDomain,
}

impl ValueEmbedding {
    pub fn target(&self) -> &TableDomain {
        &self.target
    }

    pub fn forward(&self, v: &Value) -> Result<Value> {
        self.pairs
            .iter()
            .find(|(orig, _)| orig == v)
            .map(|(_, img)| img.clone())
            .ok_or_else(|| Error::UnknownLabel(format!("{v} has no embedded image")))
    }

    pub fn backward(&self, v: &Value) -> Result<Value> {
        self.pairs
            .iter()
            .find(|(_, img)| img == v)
            .map(|(orig, _)| orig.clone())
            .ok_or_else(|| Error::UnknownLabel(format!("{v} is not in the embedded image")))
    }
}

/// Embeds a finite set of nonnegative rationals into the ambient Hahn field
/// of the bottomed ordered set they form: zero to the zero series, every
/// positive value to a positive field element in its own Archimedean class,
/// order preserved.
pub fn rational_field_embedding(
    values: &BTreeSet<Rat>,
) -> Result<(BottomedOrderedSet, ValueEmbedding)> {
    for v in values {
        if v.is_negative() {
            return Err(Error::Nonpositive(v.to_string()));
        }
    }
    let mut all = values.clone();
    all.insert(Rat::zero());
    let labels: Vec<Label> = all.iter().map(|r| r.to_string()).collect();
    let s_ord = BottomedOrderedSet::from_elements(labels)?;
    let target = TableDomain::Group(ValueDomain::Hahn(field_domain(&s_ord)?));
    let mut pairs = Vec::new();
    for r in &all {
        let img = field_image(&s_ord, &r.to_string())?;
        pairs.push((
            Value::Group(GroupElement::Rational(r.clone())),
            Value::Group(GroupElement::Hahn(img)),
        ));
    }
    Ok((s_ord, ValueEmbedding { pairs, target }))
}

fn embed_rational_table(t: &MetricTable, embed: &ValueEmbedding) -> Result<MetricTable> {
    let n = t.len();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| embed.forward(t.at(i, j)))
                .collect::<Result<Vec<Value>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MetricTable::new(t.space().clone(), embed.target().clone(), t.flavor(), rows)
}

/// The outcome of running the direct rational pipeline against the pipeline
/// carried out inside the ambient Hahn field.
#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub equal: bool,
    /// On mismatch: the pair plus the two conflicting values, printed.
    pub witness: Option<(Label, Label, String, String)>,
}

/// Runs the extension once directly in rational arithmetic and once with
/// every value, chain entry and base entry embedded into the ambient Hahn
/// field (where rounding compares Archimedean classes), maps the field
/// result back, and demands exact equality.
pub fn crosscheck_embedding(
    d: &MetricTable,
    h: &MetricTable,
    r: &Retraction,
    chain: &GaugeChain,
) -> Result<CrosscheckReport> {
    let direct = extend_ultrametric(d, h, r, chain, None)?;

    let mut values: BTreeSet<Rat> = BTreeSet::new();
    for t in [d, h] {
        for v in t.occurring_values() {
            values.insert(rational_of(&v)?.clone());
        }
    }
    for v in chain.values() {
        values.insert(rational_of(v)?.clone());
    }
    let (_, embed) = rational_field_embedding(&values)?;
    let d_emb = embed_rational_table(d, &embed)?;
    let h_emb = embed_rational_table(h, &embed)?;
    let chain_emb = GaugeChain::new(
        embed.target().clone(),
        chain
            .values()
            .iter()
            .map(|v| embed.forward(v))
            .collect::<Result<_>>()?,
    )?;
    let embedded = extend_metric(&d_emb, &h_emb, r, &chain_emb)?;

    let n = direct.output.len();
    for i in 0..n {
        for j in 0..n {
            let back = embed.backward(embedded.output.at(i, j))?;
            if &back != direct.output.at(i, j) {
                return Ok(CrosscheckReport {
                    equal: false,
                    witness: Some((
                        direct.output.space().points()[i].clone(),
                        direct.output.space().points()[j].clone(),
                        direct.output.at(i, j).to_string(),
                        back.to_string(),
                    )),
                });
            }
        }
    }
    Ok(CrosscheckReport {
        equal: true,
        witness: None,
    })
}

//! JSON codecs for the external file formats: value domains, distance
//! values, space files, extension requests, and audit reports. Emission is
//! canonical (keys sorted, rationals in lowest terms), so equal values
//! serialize byte-identically.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::extend::{ExtensionReport, GaugeChain};
use crate::group::{ArchClass, Covaluation, GroupElement, ValueDomain};
use crate::hahn::{label_exp, Exp, ExpDomain, HahnSeries};
use crate::order::{BottomedOrderedSet, FiniteOrderedSet, Label};
use crate::rat::Rat;
use crate::retract::Retraction;
use crate::space::{Flavor, MetricTable, PointSpace, PseudoTable, TableDomain, Value};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn as_str<'a>(j: &'a Json, what: &str) -> Result<&'a str> {
    j.as_str()
        .ok_or_else(|| parse_err(format!("{what}: expected a string")))
}

fn as_array<'a>(j: &'a Json, what: &str) -> Result<&'a Vec<Json>> {
    j.as_array()
        .ok_or_else(|| parse_err(format!("{what}: expected an array")))
}

fn as_object<'a>(j: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    j.as_object()
        .ok_or_else(|| parse_err(format!("{what}: expected an object")))
}

fn field<'a>(m: &'a Map<String, Json>, key: &str) -> Result<&'a Json> {
    m.get(key)
        .ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn rat_from_json(j: &Json) -> Result<Rat> {
    Rat::from_str(as_str(j, "rational")?)
}

fn string_list(j: &Json, what: &str) -> Result<Vec<Label>> {
    as_array(j, what)?
        .iter()
        .map(|s| Ok(as_str(s, what)?.to_string()))
        .collect()
}

// ---------------------------------------------------------------- domains

pub fn exp_domain_to_json(d: &ExpDomain) -> Json {
    match d {
        ExpDomain::Finite(set) => json!({"kind": "finite", "labels": set.elements()}),
        ExpDomain::Int => json!({"kind": "int"}),
        ExpDomain::Lex(rank) => json!({"kind": "lex", "rank": rank}),
        ExpDomain::Group(inner) => json!({"kind": "group", "of": exp_domain_to_json(inner)}),
    }
}

pub fn exp_domain_from_json(j: &Json) -> Result<ExpDomain> {
    let m = as_object(j, "exponent structure")?;
    match as_str(field(m, "kind")?, "kind")? {
        "finite" => Ok(ExpDomain::Finite(FiniteOrderedSet::new(string_list(
            field(m, "labels")?,
            "labels",
        )?)?)),
        "int" => Ok(ExpDomain::Int),
        "lex" => {
            let rank = field(m, "rank")?
                .as_u64()
                .ok_or_else(|| parse_err("lex rank must be a positive integer"))?;
            if rank == 0 {
                return Err(parse_err("lex rank must be at least 1"));
            }
            Ok(ExpDomain::Lex(rank as usize))
        }
        "group" => Ok(ExpDomain::Group(Box::new(exp_domain_from_json(field(
            m, "of",
        )?)?))),
        other => Err(parse_err(format!("unknown exponent kind {other:?}"))),
    }
}

pub fn domain_to_json(d: &TableDomain) -> Json {
    match d {
        TableDomain::Group(ValueDomain::Rational) => json!({"kind": "rational"}),
        TableDomain::Group(ValueDomain::Lex(rank)) => json!({"kind": "lex", "rank": rank}),
        TableDomain::Group(ValueDomain::Hahn(e)) => {
            json!({"kind": "hahn", "exponents": exp_domain_to_json(e)})
        }
        TableDomain::Ordered(s) => json!({"kind": "ordered", "labels": s.elements()}),
        TableDomain::Classes(vd) => {
            json!({"kind": "classes", "group": domain_to_json(&TableDomain::Group(vd.clone()))})
        }
    }
}

pub fn domain_from_json(j: &Json) -> Result<TableDomain> {
    let m = as_object(j, "domain")?;
    match as_str(field(m, "kind")?, "kind")? {
        "rational" => Ok(TableDomain::Group(ValueDomain::Rational)),
        "lex" => {
            let rank = field(m, "rank")?
                .as_u64()
                .ok_or_else(|| parse_err("lex rank must be a positive integer"))?;
            if rank == 0 {
                return Err(parse_err("lex rank must be at least 1"));
            }
            Ok(TableDomain::Group(ValueDomain::Lex(rank as usize)))
        }
        "hahn" => Ok(TableDomain::Group(ValueDomain::Hahn(exp_domain_from_json(
            field(m, "exponents")?,
        )?))),
        "ordered" => Ok(TableDomain::Ordered(BottomedOrderedSet::from_elements(
            string_list(field(m, "labels")?, "labels")?,
        )?)),
        "classes" => match domain_from_json(field(m, "group")?)? {
            TableDomain::Group(vd) => Ok(TableDomain::Classes(vd)),
            _ => Err(parse_err("classes must be over a group domain")),
        },
        other => Err(parse_err(format!("unknown domain kind {other:?}"))),
    }
}

// ----------------------------------------------------------------- values

fn exp_to_json(e: &Exp) -> Json {
    match e {
        Exp::Label { label, .. } => json!(label),
        Exp::Int(n) => json!(n),
        Exp::Lex(coords) => Json::Array(coords.iter().map(|c| json!(c.to_string())).collect()),
        Exp::Series(s) => series_terms_to_json(s),
    }
}

fn exp_from_json(domain: &ExpDomain, j: &Json) -> Result<Exp> {
    match domain {
        ExpDomain::Finite(set) => label_exp(set, as_str(j, "exponent label")?),
        ExpDomain::Int => j
            .as_i64()
            .map(Exp::Int)
            .ok_or_else(|| parse_err("integer exponent expected")),
        ExpDomain::Lex(rank) => {
            let arr = as_array(j, "lex exponent")?;
            if arr.len() != *rank {
                return Err(parse_err(format!("lex exponent needs rank {rank}")));
            }
            Ok(Exp::Lex(
                arr.iter().map(rat_from_json).collect::<Result<_>>()?,
            ))
        }
        ExpDomain::Group(inner) => Ok(Exp::Series(series_from_json(inner, j)?)),
    }
}

fn series_terms_to_json(s: &HahnSeries) -> Json {
    Json::Array(
        s.terms()
            .iter()
            .map(|(e, c)| json!([exp_to_json(e), c.to_string()]))
            .collect(),
    )
}

fn series_from_json(exp_domain: &ExpDomain, j: &Json) -> Result<HahnSeries> {
    let arr = as_array(j, "series")?;
    let mut terms = Vec::with_capacity(arr.len());
    for item in arr {
        let pair = as_array(item, "series term")?;
        if pair.len() != 2 {
            return Err(parse_err("series term must be [exponent, coefficient]"));
        }
        terms.push((
            exp_from_json(exp_domain, &pair[0])?,
            rat_from_json(&pair[1])?,
        ));
    }
    HahnSeries::from_terms(exp_domain.clone(), terms)
}

fn class_to_json(c: &Covaluation) -> Json {
    match c {
        Covaluation::Bottom => json!({"bottom": true}),
        Covaluation::Class(ArchClass::Rational) => json!({"class": "unit"}),
        Covaluation::Class(ArchClass::LexCoord(i)) => json!({"class": {"coord": i}}),
        Covaluation::Class(ArchClass::HahnExp(e)) => json!({"class": {"exponent": exp_to_json(e)}}),
    }
}

fn class_from_json(vd: &ValueDomain, j: &Json) -> Result<Covaluation> {
    let m = as_object(j, "class value")?;
    if m.get("bottom").and_then(Json::as_bool) == Some(true) {
        return Ok(Covaluation::Bottom);
    }
    let c = field(m, "class")?;
    match vd {
        ValueDomain::Rational => {
            if as_str(c, "class")? == "unit" {
                Ok(Covaluation::Class(ArchClass::Rational))
            } else {
                Err(parse_err("rational class must be \"unit\""))
            }
        }
        ValueDomain::Lex(rank) => {
            let i = field(as_object(c, "class")?, "coord")?
                .as_u64()
                .ok_or_else(|| parse_err("coord must be an integer"))? as usize;
            if i >= *rank {
                return Err(parse_err("coordinate index out of rank"));
            }
            Ok(Covaluation::Class(ArchClass::LexCoord(i)))
        }
        ValueDomain::Hahn(exp) => {
            let e = exp_from_json(exp, field(as_object(c, "class")?, "exponent")?)?;
            Ok(Covaluation::Class(ArchClass::HahnExp(e)))
        }
    }
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Group(GroupElement::Rational(r)) => json!(r.to_string()),
        Value::Group(GroupElement::Lex(coords)) => {
            Json::Array(coords.iter().map(|c| json!(c.to_string())).collect())
        }
        Value::Group(GroupElement::Hahn(s)) => series_terms_to_json(s),
        Value::OrdElem { label, .. } => json!(label),
        Value::Class(c) => class_to_json(c),
    }
}

pub fn value_from_json(domain: &TableDomain, j: &Json) -> Result<Value> {
    match domain {
        TableDomain::Group(ValueDomain::Rational) => {
            Ok(Value::Group(GroupElement::Rational(rat_from_json(j)?)))
        }
        TableDomain::Group(ValueDomain::Lex(rank)) => {
            let arr = as_array(j, "lex value")?;
            if arr.len() != *rank {
                return Err(parse_err(format!("lex value needs rank {rank}")));
            }
            Ok(Value::Group(GroupElement::Lex(
                arr.iter().map(rat_from_json).collect::<Result<_>>()?,
            )))
        }
        TableDomain::Group(ValueDomain::Hahn(exp)) => {
            Ok(Value::Group(GroupElement::Hahn(series_from_json(exp, j)?)))
        }
        TableDomain::Ordered(_) => domain.ordered_value(as_str(j, "ordered value")?),
        TableDomain::Classes(vd) => Ok(Value::Class(class_from_json(vd, j)?)),
    }
}

// ------------------------------------------------------------ space files

fn rows_to_json(rows: &[Vec<Value>]) -> Json {
    Json::Array(
        rows.iter()
            .map(|r| Json::Array(r.iter().map(value_to_json).collect()))
            .collect(),
    )
}

fn rows_from_json(domain: &TableDomain, j: &Json) -> Result<Vec<Vec<Value>>> {
    as_array(j, "table")?
        .iter()
        .map(|row| {
            as_array(row, "table row")?
                .iter()
                .map(|v| value_from_json(domain, v))
                .collect()
        })
        .collect()
}

fn flavor_from_json(j: &Json) -> Result<Flavor> {
    match as_str(j, "flavor")? {
        "metric" => Ok(Flavor::Metric),
        "ultrametric" => Ok(Flavor::Ultrametric),
        other => Err(parse_err(format!("unknown flavor {other:?}"))),
    }
}

/// Raw parts of a space file: parsed but not yet axiom-checked, so a caller
/// can report every violation rather than the first.
pub struct SpaceFileParts {
    pub space: PointSpace,
    pub domain: TableDomain,
    pub flavor: Flavor,
    pub rows: Vec<Vec<Value>>,
}

pub fn space_file_parts(j: &Json) -> Result<SpaceFileParts> {
    let m = as_object(j, "space file")?;
    let points = string_list(field(m, "points")?, "points")?;
    let subset = string_list(field(m, "subset")?, "subset")?;
    let space = PointSpace::new(points, subset)?;
    let domain = domain_from_json(field(m, "domain")?)?;
    let flavor = flavor_from_json(field(m, "flavor")?)?;
    let rows = rows_from_json(&domain, field(m, "table")?)?;
    Ok(SpaceFileParts {
        space,
        domain,
        flavor,
        rows,
    })
}

pub fn table_from_json(j: &Json) -> Result<MetricTable> {
    let parts = space_file_parts(j)?;
    MetricTable::new(parts.space, parts.domain, parts.flavor, parts.rows)
}

pub fn table_to_json(t: &MetricTable) -> Json {
    json!({
        "points": t.space().points(),
        "subset": t.space().subset_labels(),
        "domain": domain_to_json(t.domain()),
        "flavor": t.flavor().to_string(),
        "table": rows_to_json(&t.rows()),
    })
}

pub fn pseudo_rows_to_json(t: &PseudoTable) -> Json {
    rows_to_json(&t.rows())
}

// ------------------------------------------------------- requests/reports

pub enum RetractionSpec {
    Tau(Rat),
    Map(BTreeMap<Label, Label>),
}

pub enum ChainSpec {
    Auto,
    Values(Vec<Json>),
}

/// An extension request: the ambient space, the value domain, the base
/// table (or a constant default), the retraction (a tau to build one, or an
/// explicit map), the chain (explicit or auto), and the input table on the
/// subset.
pub struct ExtendRequest {
    pub space: PointSpace,
    pub domain: TableDomain,
    pub flavor: Flavor,
    pub h_rows: Option<Vec<Vec<Value>>>,
    pub d_rows: Vec<Vec<Value>>,
    pub retraction: RetractionSpec,
    pub chain: ChainSpec,
}

pub fn extend_request_from_json(j: &Json) -> Result<ExtendRequest> {
    let m = as_object(j, "extension request")?;
    let sp = as_object(field(m, "space")?, "space")?;
    let points = string_list(field(sp, "points")?, "points")?;
    let subset = string_list(field(sp, "subset")?, "subset")?;
    let space = PointSpace::new(points, subset)?;
    let domain = match m.get("domain") {
        Some(d) => domain_from_json(d)?,
        None => TableDomain::Group(ValueDomain::Rational),
    };
    let flavor = match m.get("flavor") {
        Some(f) => flavor_from_json(f)?,
        None => Flavor::Ultrametric,
    };
    let h_rows = match m.get("h") {
        Some(h) => Some(rows_from_json(&domain, h)?),
        None => None,
    };
    let d_rows = rows_from_json(&domain, field(m, "d_on_A")?)?;
    let retraction = {
        let r = as_object(field(m, "retraction")?, "retraction")?;
        if let Some(tau) = r.get("tau") {
            RetractionSpec::Tau(rat_from_json(tau)?)
        } else if let Some(map) = r.get("map") {
            let mm = as_object(map, "retraction map")?;
            let mut out = BTreeMap::new();
            for (k, v) in mm {
                out.insert(k.clone(), as_str(v, "retraction image")?.to_string());
            }
            RetractionSpec::Map(out)
        } else {
            return Err(parse_err("retraction needs a \"tau\" or a \"map\""));
        }
    };
    let chain = match field(m, "chain")? {
        Json::String(s) if s == "auto" => ChainSpec::Auto,
        Json::Array(vals) => ChainSpec::Values(vals.clone()),
        _ => return Err(parse_err("chain must be \"auto\" or a list of values")),
    };
    Ok(ExtendRequest {
        space,
        domain,
        flavor,
        h_rows,
        d_rows,
        retraction,
        chain,
    })
}

pub fn chain_to_json(c: &GaugeChain) -> Json {
    Json::Array(c.values().iter().map(value_to_json).collect())
}

pub fn chain_values_from_json(domain: &TableDomain, vals: &[Json]) -> Result<GaugeChain> {
    GaugeChain::new(
        domain.clone(),
        vals.iter()
            .map(|v| value_from_json(domain, v))
            .collect::<Result<_>>()?,
    )
}

pub fn retraction_to_json(r: &Retraction) -> Json {
    let map: BTreeMap<Label, Label> = r.as_point_map();
    json!({
        "mapping": map,
        "tau": r.tau().to_string(),
    })
}

pub fn report_to_json(rep: &ExtensionReport) -> Json {
    json!({
        "input": table_to_json(&rep.d),
        "base": table_to_json(&rep.h),
        "retraction": retraction_to_json(&rep.retraction),
        "chain": chain_to_json(&rep.chain),
        "rounded": table_to_json(&rep.rounded),
        "lifted": table_to_json(&rep.lifted),
        "vanishing": pseudo_rows_to_json(&rep.vanishing),
        "output": table_to_json(&rep.output),
        "certificates": {
            "restriction": rep.restriction_ok,
            "flavor": rep.flavor_ok,
        },
    })
}

/// Canonical text rendering: pretty JSON with a trailing newline, keys in
/// sorted order. Equal values render byte-identically.
pub fn to_canonical_string(j: &Json) -> String {
    let mut s = serde_json::to_string_pretty(j).expect("serialization cannot fail");
    s.push('\n');
    s
}

//! Command-line front end over the exact-arithmetic kernel: space-file
//! validation, tau-window retraction, the extension pipeline, the distance
//! between ultrametrics, seeded instance generation, and the rational/field
//! cross-check.
//!
//! Exit codes: 0 on success, 1 for domain errors (axiom violations, bad
//! preconditions, a cross-check mismatch), 2 for I/O or parse problems.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use ultramet_core::error::Error;
use ultramet_core::extend::{
    auto_chain, constant_base, crosscheck_embedding, extend_metric, extension_retraction,
};
use ultramet_core::gen;
use ultramet_core::json as codec;
use ultramet_core::rat::Rat;
use ultramet_core::retract::{
    find_nonexpansive_retraction, movement_witness, tau_retraction, Retraction,
};
use ultramet_core::space::{ud_distance, validate_rows, Flavor, MetricTable, PointSpace};

#[derive(Parser)]
#[command(
    name = "ultramet",
    about = "Exact metrics and ultrametrics valued in ordered Abelian groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file against the axioms of its declared flavor.
    Validate { file: PathBuf },
    /// Build the tau-window retraction onto the subset, with its tau^2
    /// certificate and the extremal-movement witness. Spaces within the
    /// brute-force bound also get the index-least nonexpansive retraction,
    /// found by exhaustive search.
    Retract {
        file: PathBuf,
        /// Lipschitz scale, a rational greater than 1.
        #[arg(long, default_value = "2")]
        tau: String,
        /// Brute-force cap for the nonexpansive search.
        #[arg(long, default_value_t = 7)]
        bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the extension pipeline described by a request file.
    Extend {
        file: PathBuf,
        /// Override the request's chain: comma-separated values or "auto".
        #[arg(long)]
        chain: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The least eps with each table within eps of the other.
    Ud { first: PathBuf, second: PathBuf },
    /// Generate a random dyadic ultrametric space file. The seed fully
    /// determines the output.
    Gen {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate random instances and demand exact agreement between the
    /// rational pipeline and the field-embedded pipeline.
    Crosscheck {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value = "2")]
        tau: String,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure {
            code: 2,
            msg: e.to_string(),
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    })
}

fn emit(out: &Option<PathBuf>, j: &serde_json::Value) -> Result<(), Failure> {
    let text = codec::to_canonical_string(j);
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_tau(s: &str) -> Result<Rat, Failure> {
    Ok(s.parse::<Rat>()?)
}

fn cmd_validate(file: &Path) -> Result<u8, Failure> {
    let parts = codec::space_file_parts(&read_json(file)?)?;
    let report = validate_rows(
        &parts.space,
        &parts.domain,
        parts.flavor,
        &parts.rows,
        false,
    )?;
    if report.is_clean() {
        println!("valid {}", parts.flavor);
        Ok(0)
    } else {
        for v in &report.violations {
            println!("{v}");
        }
        Ok(1)
    }
}

fn cmd_retract(file: &Path, tau: &str, bound: usize, out: &Option<PathBuf>) -> Result<u8, Failure> {
    let table = codec::table_from_json(&read_json(file)?)?;
    let tau = parse_tau(tau)?;
    let r = tau_retraction(&table, &tau)?;
    let tau_sq = &tau * &tau;
    let witness = movement_witness(&table, &r)?;
    let mut j = codec::retraction_to_json(&r);
    let obj = j.as_object_mut().expect("object");
    obj.insert("tau_squared".into(), json!(tau_sq.to_string()));
    obj.insert("certificate".into(), json!("passed"));
    if let Some(w) = witness {
        obj.insert(
            "witness".into(),
            json!({
                "pair": [w.x, w.y],
                "original": w.original.to_string(),
                "moved": w.moved.to_string(),
                "ratio": w.ratio.map(|r| r.to_string()),
            }),
        );
    }
    if table.len() <= bound {
        let found = find_nonexpansive_retraction(&table, bound)?
            .expect("a finite ultrametric space always admits one");
        obj.insert(
            "nonexpansive_mapping".into(),
            serde_json::to_value(found.as_point_map()).expect("string map"),
        );
    }
    emit(out, &j)?;
    Ok(0)
}

fn build_retraction(spec: codec::RetractionSpec, h: &MetricTable) -> Result<Retraction, Failure> {
    match spec {
        codec::RetractionSpec::Tau(tau) => Ok(extension_retraction(h, &tau)?),
        codec::RetractionSpec::Map(map) => {
            let space = h.space().clone();
            let mut mapping = Vec::with_capacity(space.len());
            for p in space.points() {
                let img = map.get(p).ok_or(Error::NotTotal(p.clone()))?;
                mapping.push(space.index_of(img)?);
            }
            Ok(Retraction::new(space, mapping, Rat::one())?)
        }
    }
}

fn cmd_extend(
    file: &Path,
    chain_flag: &Option<String>,
    out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let req = codec::extend_request_from_json(&read_json(file)?)?;
    let d_space = PointSpace::new(req.space.subset_labels(), Vec::new())?;
    let d = MetricTable::new(d_space, req.domain.clone(), req.flavor, req.d_rows)?;
    let h = match req.h_rows {
        Some(rows) => Some(MetricTable::new(
            req.space.clone(),
            req.domain.clone(),
            Flavor::Ultrametric,
            rows,
        )?),
        None => None,
    };
    // a --chain flag overrides the request's chain
    let chain_spec = match chain_flag {
        None => req.chain,
        Some(s) if s == "auto" => codec::ChainSpec::Auto,
        Some(s) => codec::ChainSpec::Values(
            s.split(',')
                .map(|v| serde_json::Value::from(v.trim()))
                .collect(),
        ),
    };
    let chain = match chain_spec {
        codec::ChainSpec::Values(vals) => codec::chain_values_from_json(&req.domain, &vals)?,
        codec::ChainSpec::Auto => match &h {
            Some(h) => auto_chain(&[&d, h])?,
            None => auto_chain(&[&d])?,
        },
    };
    let h = match h {
        Some(h) => h,
        None => constant_base(&req.space, &chain)?,
    };
    let r = build_retraction(req.retraction, &h)?;
    let report = extend_metric(&d, &h, &r, &chain)?;
    emit(out, &codec::report_to_json(&report))?;
    Ok(0)
}

fn cmd_ud(first: &Path, second: &Path) -> Result<u8, Failure> {
    let a = codec::table_from_json(&read_json(first)?)?;
    let b = codec::table_from_json(&read_json(second)?)?;
    let dist = ud_distance(&a, &b)?;
    println!("{dist}");
    Ok(0)
}

fn cmd_gen(points: usize, depth: u32, seed: u64, out: &Option<PathBuf>) -> Result<u8, Failure> {
    if points == 0 {
        return Err(Error::Empty("a space needs at least one point".into()).into());
    }
    let mut rng = gen::seeded_rng(seed);
    let table = gen::random_space(&mut rng, points, depth)?;
    emit(out, &codec::table_to_json(&table))?;
    Ok(0)
}

fn cmd_crosscheck(seed: u64, count: usize, tau: &str) -> Result<u8, Failure> {
    let tau = parse_tau(tau)?;
    let mut rng = gen::seeded_rng(seed);
    let mut ok = 0usize;
    for i in 0..count {
        let (h, d, chain) = gen::random_extension_instance(&mut rng, 7)?;
        let r = extension_retraction(&h, &tau)?;
        let rep = crosscheck_embedding(&d, &h, &r, &chain)?;
        if rep.equal {
            ok += 1;
        } else {
            let (x, y, direct, embedded) = rep.witness.expect("mismatch carries a witness");
            println!("{ok}/{count} equal");
            println!("instance {i}: mismatch at ({x}, {y}): direct {direct}, embedded {embedded}");
            return Ok(1);
        }
    }
    println!("{ok}/{count} equal");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Retract {
            file,
            tau,
            bound,
            out,
        } => cmd_retract(&file, &tau, bound, &out),
        Command::Extend { file, chain, out } => cmd_extend(&file, &chain, &out),
        Command::Ud { first, second } => cmd_ud(&first, &second),
        Command::Gen {
            points,
            depth,
            seed,
            out,
        } => cmd_gen(points, depth, seed, &out),
        Command::Crosscheck { seed, count, tau } => cmd_crosscheck(seed, count, &tau),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

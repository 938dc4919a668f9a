//! `newton-poly`: polyhedron distance, adaptedness, and decay pair for
//! polynomial phases given as plain-text support files.

use anyhow::{bail, Context, Result};
use serde::Serialize;
use std::path::Path;

use crate::config::{self, NewtonPolyConfig};
use crate::report::{self, Csv, CsvCell};
use crate::run::{Deadline, Outcome};

/// Runs the subcommand.
pub fn run(config_path: &Path) -> Result<Outcome> {
    let cfg: NewtonPolyConfig = config::load(config_path)?;
    let deadline = Deadline::new(cfg.limits.max_seconds);
    if cfg.input.files.is_empty() {
        bail!("input.files must list at least one polynomial file");
    }
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));

    let dir = report::prepare_dir(&cfg.output.dir)?;
    report::write_manifest(&dir, "newton-poly", &cfg)?;

    let mut table = Csv::new(&["file", "terms", "newton_distance", "adapted", "beta", "p"]);
    let mut rows = Vec::new();

    for file in &cfg.input.files {
        deadline.check("polyhedron analysis")?;
        let path = if file.is_absolute() {
            file.clone()
        } else {
            base.join(file)
        };
        let support = parse_polynomial(&path)
            .with_context(|| format!("reading polynomial {}", path.display()))?;

        let distance = fnls_core::newton::newton_distance(&support)
            .map_err(|e| anyhow::anyhow!("{}: distance: {e}", path.display()))?;
        let adapted = fnls_core::newton::adapted_check(&support)
            .map_err(|e| anyhow::anyhow!("{}: adaptedness: {e}", path.display()))?;
        let (beta, p) = fnls_core::newton::decay_pair(&support)
            .map_err(|e| anyhow::anyhow!("{}: decay pair: {e}", path.display()))?;

        let adapted_str = match adapted {
            fnls_core::newton::Adapted::Yes => "yes",
            fnls_core::newton::Adapted::No => "no",
            fnls_core::newton::Adapted::Unknown => "unknown",
        };
        let name = file.display().to_string();
        table.row(&[
            CsvCell::Text(name.clone()),
            CsvCell::Int(support.len() as i64),
            CsvCell::Text(distance.to_string()),
            CsvCell::Text(adapted_str.to_string()),
            CsvCell::Text(beta.to_string()),
            CsvCell::Text(p.to_string()),
        ]);
        println!(
            "newton-poly: {name} distance {distance} adapted {adapted_str} decay ({beta}, {p})"
        );
        rows.push(FileRow {
            file: name,
            terms: support.len(),
            newton_distance: distance.to_string(),
            newton_distance_f64: distance.to_f64(),
            adapted: adapted_str.to_string(),
            beta: beta.to_string(),
            beta_f64: beta.to_f64(),
            p: p.to_string(),
            p_f64: p.to_f64(),
        });
    }
    table.save(&dir, "newton.csv")?;

    let summary = Summary {
        config: cfg.clone(),
        files: rows,
    };
    report::write_json(&dir, "summary.json", &summary)?;
    Ok(Outcome::Pass)
}

/// Parses a polynomial support file: one `coeff gamma1 gamma2` triple per
/// line, whitespace-separated; `#` starts a comment; coefficients are
/// integers or `num/den` rationals.
fn parse_polynomial(path: &Path) -> Result<fnls_core::newton::TaylorSupport2D> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coeff_text = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {}: missing coefficient", lineno + 1))?;
        let coeff = fnls_core::rat::parse_rat(coeff_text)
            .map_err(|e| anyhow::anyhow!("line {}: coefficient: {e}", lineno + 1))?;
        let g1: u32 = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {}: missing exponent", lineno + 1))?
            .parse()
            .with_context(|| format!("line {}: first exponent", lineno + 1))?;
        let g2: u32 = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {}: missing second exponent", lineno + 1))?
            .parse()
            .with_context(|| format!("line {}: second exponent", lineno + 1))?;
        if parts.next().is_some() {
            bail!("line {}: expected exactly three fields", lineno + 1);
        }
        entries.push(((g1, g2), coeff));
    }
    fnls_core::newton::TaylorSupport2D::new(&entries).map_err(|e| anyhow::anyhow!("{e}"))
}

#[derive(Serialize)]
struct FileRow {
    file: String,
    terms: usize,
    newton_distance: String,
    newton_distance_f64: f64,
    adapted: String,
    beta: String,
    beta_f64: f64,
    p: String,
    p_f64: f64,
}

#[derive(Serialize)]
struct Summary {
    config: config::NewtonPolyConfig,
    files: Vec<FileRow>,
}

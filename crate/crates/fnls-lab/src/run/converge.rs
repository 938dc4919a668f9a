//! `converge`: h-refinement rate experiment against a certified reference.

use anyhow::Result;
use serde::Serialize;
use std::path::Path;

use crate::config::{self, ConvergeConfig};
use crate::report::{self, Csv, CsvCell};
use crate::run::{check_memory, grid_bytes, Deadline, Outcome};

/// Runs the subcommand.
pub fn run(config_path: &Path) -> Result<Outcome> {
    let cfg: ConvergeConfig = config::load(config_path)?;
    let deadline = Deadline::new(cfg.limits.max_seconds);

    let plan = cfg.to_plan();
    fnls_core::converge::validate_plan(&plan).map_err(|e| anyhow::anyhow!("plan: {e}"))?;
    // The reference grid dominates; the experiment holds the reference
    // snapshots for every sample time plus working copies.
    let copies = 4 + cfg.experiment.sample_times.len() as u64;
    check_memory(
        grid_bytes(cfg.experiment.reference_m, cfg.experiment.dim, copies),
        cfg.limits.mem_cap_bytes(),
        "reference grid",
    )?;

    let dir = report::prepare_dir(&cfg.output.dir)?;
    report::write_manifest(&dir, "converge", &cfg)?;

    deadline.check("rate experiment")?;
    let rep =
        fnls_core::converge::run_rate_experiment(&plan).map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut table = Csv::new(&["h", "t", "error", "reference_gap"]);
    for cell in &rep.cells {
        table.row(&[
            CsvCell::Float(cell.h),
            CsvCell::Float(cell.t),
            CsvCell::Float(cell.error),
            CsvCell::Float(cell.reference_gap),
        ]);
    }
    table.save(&dir, "rate.csv")?;

    let verdict = match rep.verdict {
        fnls_core::converge::RateVerdict::Pass => "pass",
        fnls_core::converge::RateVerdict::Fail => "fail",
        fnls_core::converge::RateVerdict::Inconclusive => "inconclusive",
    };
    let summary = Summary {
        config: cfg.clone(),
        theorem_exponent: rep.theorem_exponent,
        slope_threshold: rep.slope_threshold,
        regime_certified: rep.regime_certified,
        worst_reference_gap: rep.worst_reference_gap,
        monotone: rep.monotone,
        fits: rep
            .fits
            .iter()
            .map(|f| FitRow {
                t: f.t,
                slope: f.slope,
                stderr: f.stderr,
                stability: f.stability,
            })
            .collect(),
        verdict: verdict.to_string(),
    };
    report::write_json(&dir, "summary.json", &summary)?;

    for f in &summary.fits {
        println!(
            "converge: t={} slope={:.4} (threshold {:.4}, stability {:.4})",
            f.t, f.slope, rep.slope_threshold, f.stability
        );
    }
    println!("converge: verdict {verdict}");
    Ok(match rep.verdict {
        fnls_core::converge::RateVerdict::Pass => Outcome::Pass,
        fnls_core::converge::RateVerdict::Fail => Outcome::Fail,
        fnls_core::converge::RateVerdict::Inconclusive => Outcome::Inconclusive,
    })
}

#[derive(Serialize)]
struct FitRow {
    t: f64,
    slope: f64,
    stderr: f64,
    stability: f64,
}

#[derive(Serialize)]
struct Summary {
    config: config::ConvergeConfig,
    theorem_exponent: f64,
    slope_threshold: f64,
    regime_certified: bool,
    worst_reference_gap: f64,
    monotone: bool,
    fits: Vec<FitRow>,
    verdict: String,
}

//! `kernel-decay`: certified sup sweep of the dispersive kernel bound.

use anyhow::Result;
use serde::Serialize;
use std::path::Path;

use crate::config::{self, KernelDecayConfig};
use crate::report::{self, Csv, CsvCell};
use crate::run::{Deadline, Outcome};

/// Runs the subcommand.
pub fn run(config_path: &Path) -> Result<Outcome> {
    let cfg: KernelDecayConfig = config::load(config_path)?;
    let deadline = Deadline::new(cfg.limits.max_seconds);

    let dir = report::prepare_dir(&cfg.output.dir)?;
    report::write_manifest(&dir, "kernel-decay", &cfg)?;

    let mut table = Csv::new(&["alpha", "h", "N", "t", "sup_value", "bound_ratio"]);
    let mut slices = Vec::new();
    let mut worst = Outcome::Pass;

    for &alpha in &cfg.sweep.alphas {
        for &h in &cfg.sweep.hs {
            deadline.check(&format!("slice alpha={alpha} h={h}"))?;
            let req = fnls_core::decay::DecayRequest {
                alpha,
                h,
                n_scales: cfg.sweep.n_scales.clone(),
                t_samples: cfg.sweep.t_samples.clone(),
                mem_cap_bytes: cfg.limits.mem_cap_bytes(),
            };
            let rep = fnls_core::decay::decay_suite(&req)
                .map_err(|e| anyhow::anyhow!("slice alpha={alpha} h={h}: {e}"))?;

            for row in &rep.rows {
                table.row(&[
                    CsvCell::Float(alpha),
                    CsvCell::Float(h),
                    CsvCell::Float(row.n_scale),
                    CsvCell::Float(row.t),
                    CsvCell::opt(row.sup_value),
                    CsvCell::opt(row.bound_ratio),
                ]);
            }

            let verdict = verdict_str(&rep.verdict);
            println!(
                "kernel-decay: alpha={alpha} h={h} ratio spread [{:.4}, {:.4}] \
                 grid check {:.4} under-resolved {} → {verdict}",
                rep.min_ratio, rep.max_ratio, rep.grid_check, rep.under_resolved
            );
            worst = combine(worst, outcome_of(&rep.verdict));
            slices.push(SliceSummary {
                alpha,
                h,
                max_ratio: rep.max_ratio,
                min_ratio: rep.min_ratio,
                grid_check: rep.grid_check,
                under_resolved: rep.under_resolved,
                sup_growth_warnings: rep.sup_growth_warnings,
                spread_bound: rep.spread_bound,
                verdict: verdict.to_string(),
            });
        }
    }
    table.save(&dir, "decay.csv")?;

    let summary = Summary {
        config: cfg.clone(),
        slices,
        verdict: match worst {
            Outcome::Pass => "pass",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Fail => "fail",
        }
        .to_string(),
    };
    report::write_json(&dir, "summary.json", &summary)?;
    println!("kernel-decay: verdict {}", summary.verdict);
    Ok(worst)
}

fn verdict_str(v: &fnls_core::decay::DecayVerdict) -> &'static str {
    match v {
        fnls_core::decay::DecayVerdict::Pass => "pass",
        fnls_core::decay::DecayVerdict::Inconclusive => "inconclusive",
        fnls_core::decay::DecayVerdict::Fail => "fail",
    }
}

fn outcome_of(v: &fnls_core::decay::DecayVerdict) -> Outcome {
    match v {
        fnls_core::decay::DecayVerdict::Pass => Outcome::Pass,
        fnls_core::decay::DecayVerdict::Inconclusive => Outcome::Inconclusive,
        fnls_core::decay::DecayVerdict::Fail => Outcome::Fail,
    }
}

fn combine(a: Outcome, b: Outcome) -> Outcome {
    use Outcome::*;
    match (a, b) {
        (Fail, _) | (_, Fail) => Fail,
        (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
        _ => Pass,
    }
}

#[derive(Serialize)]
struct SliceSummary {
    alpha: f64,
    h: f64,
    max_ratio: f64,
    min_ratio: f64,
    grid_check: f64,
    under_resolved: usize,
    sup_growth_warnings: usize,
    spread_bound: f64,
    verdict: String,
}

#[derive(Serialize)]
struct Summary {
    config: config::KernelDecayConfig,
    slices: Vec<SliceSummary>,
    verdict: String,
}

//! `strichartz`: mesh-uniformity of the space-time estimate across an
//! h-refinement ladder at fixed physical box.

use anyhow::Result;
use serde::Serialize;
use std::path::Path;

use crate::config::{self, StrichartzConfig};
use crate::report::{self, Csv, CsvCell};
use crate::run::{check_memory, grid_bytes, Deadline, Outcome};

/// Runs the subcommand.
pub fn run(config_path: &Path) -> Result<Outcome> {
    let cfg: StrichartzConfig = config::load(config_path)?;
    let deadline = Deadline::new(cfg.limits.max_seconds);

    let q = cfg.estimate.q.value()?;
    let pair = fnls_core::strichartz::AdmissiblePair::new(q, cfg.estimate.r)
        .map_err(|e| anyhow::anyhow!("exponent pair: {e}"))?;
    let window = fnls_core::strichartz::TimeWindow {
        t_end: cfg.estimate.t_end,
        steps: cfg.estimate.steps,
    };

    let grids = cfg.ladder.grids()?;
    if let Some(finest) = grids.last() {
        // Transform + field + two spectral scratch buffers per evaluation.
        check_memory(
            grid_bytes(finest.points_per_axis(), finest.dim(), 6),
            cfg.limits.mem_cap_bytes(),
            "finest ladder grid",
        )?;
    }

    let dir = report::prepare_dir(&cfg.output.dir)?;
    report::write_manifest(&dir, "strichartz", &cfg)?;

    let mut fields = Vec::with_capacity(grids.len());
    for grid in &grids {
        deadline.check("initial data assembly")?;
        fields.push(cfg.data.build(*grid)?);
    }

    deadline.check("estimate evaluation")?;
    let rep = fnls_core::strichartz::strichartz_suite(
        &fields,
        cfg.estimate.alpha,
        pair,
        window,
        cfg.estimate.growth_tolerance,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut table = Csv::new(&[
        "h",
        "q",
        "r",
        "weight_exponent",
        "left",
        "right",
        "ratio",
        "quad_check",
    ]);
    let s = pair.weight_exponent(cfg.estimate.alpha);
    for sample in &rep.samples {
        table.row(&[
            CsvCell::Float(sample.h),
            CsvCell::Float(pair.q()),
            CsvCell::Float(pair.r()),
            CsvCell::Float(s),
            CsvCell::Float(sample.left),
            CsvCell::Float(sample.right),
            CsvCell::Float(sample.ratio),
            CsvCell::Float(sample.quad_check),
        ]);
    }
    table.save(&dir, "strichartz.csv")?;

    let ratios: Vec<f64> = rep.samples.iter().map(|s| s.ratio).collect();
    let max_ratio = ratios.iter().cloned().fold(0.0f64, f64::max);
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let summary = Summary {
        config: cfg.clone(),
        weight_exponent: s,
        ratios,
        ratio_spread: max_ratio / min_ratio,
        worst_quad_check: rep.worst_quad_check,
        growth_tolerance: rep.growth_tolerance,
        uniform: rep.uniform,
        verdict: if rep.uniform { "pass" } else { "fail" }.to_string(),
    };
    report::write_json(&dir, "summary.json", &summary)?;

    println!(
        "strichartz: q={} r={} ratios {:?} spread {:.4} quad check {:.3e} → {}",
        pair.q(),
        pair.r(),
        summary.ratios,
        summary.ratio_spread,
        summary.worst_quad_check,
        summary.verdict
    );
    Ok(if rep.uniform {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

#[derive(Serialize)]
struct Summary {
    config: config::StrichartzConfig,
    weight_exponent: f64,
    ratios: Vec<f64>,
    ratio_spread: f64,
    worst_quad_check: f64,
    growth_tolerance: f64,
    uniform: bool,
    verdict: String,
}

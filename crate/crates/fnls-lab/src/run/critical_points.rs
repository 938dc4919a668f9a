//! `critical-points`: stationary-set sweep of the group-velocity equation
//! plus optional oscillatory-integral decay fits.

use anyhow::Result;
use serde::Serialize;
use std::path::Path;

use crate::config::{self, CriticalPointsConfig};
use crate::report::{self, Csv, CsvCell};
use crate::run::{Deadline, Outcome, SplitMix64};

/// Stationary sets on the torus are finite; more points than this is a bug
/// signal, not geometry (orbit counting caps the root count at eight).
const MAX_POINTS_PER_VELOCITY: usize = 8;

/// Runs the subcommand.
pub fn run(config_path: &Path) -> Result<Outcome> {
    let cfg: CriticalPointsConfig = config::load(config_path)?;
    let deadline = Deadline::new(cfg.limits.max_seconds);

    let dir = report::prepare_dir(&cfg.output.dir)?;
    report::write_manifest(&dir, "critical-points", &cfg)?;

    let sweep = &cfg.sweep;
    let vmax = fnls_core::osc::gradient_sup_bound(sweep.alpha)
        .map_err(|e| anyhow::anyhow!("gradient bound: {e}"))?;

    let mut velocities: Vec<[f64; 3]> = sweep.velocities.clone();
    let mut rng = SplitMix64::new(sweep.seed);
    for _ in 0..sweep.random_count {
        velocities.push([
            rng.next_symmetric(vmax),
            rng.next_symmetric(vmax),
            rng.next_symmetric(vmax),
        ]);
    }
    if velocities.is_empty() && cfg.fits.is_empty() {
        anyhow::bail!("nothing to do: no velocities and no fits configured");
    }

    let mut table = Csv::new(&[
        "v1",
        "v2",
        "v3",
        "xi1",
        "xi2",
        "xi3",
        "grad_residual",
        "det",
        "class",
        "beta",
        "p",
    ]);
    let mut rows = Vec::new();
    let mut max_points = 0usize;
    let mut out_of_range = 0usize;
    let mut nothing_found = 0usize;

    for (i, v) in velocities.iter().enumerate() {
        if i % 50 == 0 {
            deadline.check("velocity sweep")?;
        }
        let search = fnls_core::osc::critical_points(v, sweep.alpha)
            .map_err(|e| anyhow::anyhow!("velocity {v:?}: {e}"))?;
        if !search.velocity_in_range {
            out_of_range += 1;
        }
        if search.no_roots_found {
            nothing_found += 1;
        }
        max_points = max_points.max(search.points.len());
        for rec in &search.points {
            let (beta, p) = rec.predicted_exponent;
            table.row(&[
                CsvCell::Float(v[0]),
                CsvCell::Float(v[1]),
                CsvCell::Float(v[2]),
                CsvCell::Float(rec.xi[0]),
                CsvCell::Float(rec.xi[1]),
                CsvCell::Float(rec.xi[2]),
                CsvCell::Float(rec.grad_residual),
                CsvCell::Float(rec.det),
                CsvCell::Text(class_name(rec.class).to_string()),
                CsvCell::Float(beta),
                CsvCell::Float(p),
            ]);
        }
        rows.push(VelocityRow {
            v: *v,
            in_range: search.velocity_in_range,
            points: search.points.len(),
            no_roots_found: search.no_roots_found,
        });
    }
    table.save(&dir, "critical_points.csv")?;

    let r_alpha = if sweep.compute_r_alpha {
        deadline.check("degeneracy radius")?;
        Some(fnls_core::osc::r_alpha(sweep.alpha).map_err(|e| anyhow::anyhow!("radius: {e}"))?)
    } else {
        None
    };

    // Decay fits.
    let mut fit_table = Csv::new(&["label", "tau", "abs_value"]);
    let mut fit_rows = Vec::new();
    let mut any_fit_failed = false;
    for spec in &cfg.fits {
        deadline.check(&format!("fit {}", spec.label))?;
        let fit = run_fit(spec, &mut fit_table)?;
        println!(
            "critical-points: fit {} class {} beta_hat {:.4} (bound {:.4}) → {}",
            spec.label,
            fit.class,
            fit.beta_hat,
            fit.predicted_beta + 0.1,
            if fit.accepted { "pass" } else { "fail" }
        );
        any_fit_failed |= !fit.accepted;
        fit_rows.push(fit);
    }
    if !cfg.fits.is_empty() {
        fit_table.save(&dir, "fits.csv")?;
    }

    let count_ok = max_points <= MAX_POINTS_PER_VELOCITY;
    let verdict = if !count_ok || any_fit_failed {
        Outcome::Fail
    } else {
        Outcome::Pass
    };
    let summary = Summary {
        config: cfg.clone(),
        gradient_sup_bound: vmax,
        r_alpha,
        velocities_swept: velocities.len(),
        out_of_range,
        nothing_found,
        max_points_per_velocity: max_points,
        max_points_bound: MAX_POINTS_PER_VELOCITY,
        velocities: rows,
        fits: fit_rows,
        verdict: match verdict {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        }
        .to_string(),
    };
    report::write_json(&dir, "summary.json", &summary)?;
    println!(
        "critical-points: {} velocities, max {} points, verdict {}",
        velocities.len(),
        max_points,
        summary.verdict
    );
    Ok(verdict)
}

fn run_fit(spec: &config::FitSpec, table: &mut Csv) -> Result<FitRow> {
    let alpha = spec.alpha;
    let center = spec.center;
    let v = fnls_core::osc::grad_omega(&center, alpha)
        .map_err(|e| anyhow::anyhow!("fit {}: center gradient: {e}", spec.label))?;
    let phase = fnls_core::osc::Phase::new(alpha, v)
        .map_err(|e| anyhow::anyhow!("fit {}: {e}", spec.label))?;
    let bump = fnls_core::osc::RadialBump::new(center, spec.r_in, spec.r_out)
        .map_err(|e| anyhow::anyhow!("fit {}: {e}", spec.label))?;
    let class = fnls_core::osc::classify(&center, alpha)
        .map_err(|e| anyhow::anyhow!("fit {}: {e}", spec.label))?;

    let mut samples = Vec::with_capacity(spec.taus.len());
    for &tau in &spec.taus {
        let value = fnls_core::osc::osc_integral(&phase, &bump, tau)
            .map_err(|e| anyhow::anyhow!("fit {} at tau={tau}: {e}", spec.label))?;
        table.row(&[
            CsvCell::Text(spec.label.clone()),
            CsvCell::Float(tau),
            CsvCell::Float(value.norm()),
        ]);
        samples.push(fnls_core::osc::OscIntegralSample {
            tau,
            value,
            zeta_label: spec.label.clone(),
        });
    }
    let fit = fnls_core::osc::fit_decay_exponent(&samples)
        .map_err(|e| anyhow::anyhow!("fit {}: {e}", spec.label))?;
    let (beta, _) = class.predicted_exponent();
    Ok(FitRow {
        label: spec.label.clone(),
        class: class_name(class).to_string(),
        beta_hat: fit.beta_hat,
        stderr: fit.stderr,
        used: fit.used,
        excluded: fit.excluded,
        predicted_beta: beta,
        accepted: class.accepts(fit.beta_hat),
    })
}

fn class_name(class: fnls_core::osc::PointClass) -> &'static str {
    match class {
        fnls_core::osc::PointClass::Nondegenerate => "nondegenerate",
        fnls_core::osc::PointClass::Gamma1 => "gamma1",
        fnls_core::osc::PointClass::Gamma2 => "gamma2",
        fnls_core::osc::PointClass::Gamma3 => "gamma3",
    }
}

#[derive(Serialize)]
struct VelocityRow {
    v: [f64; 3],
    in_range: bool,
    points: usize,
    no_roots_found: bool,
}

#[derive(Serialize)]
struct FitRow {
    label: String,
    class: String,
    beta_hat: f64,
    stderr: f64,
    used: usize,
    excluded: usize,
    predicted_beta: f64,
    accepted: bool,
}

#[derive(Serialize)]
struct Summary {
    config: config::CriticalPointsConfig,
    gradient_sup_bound: f64,
    r_alpha: Option<f64>,
    velocities_swept: usize,
    out_of_range: usize,
    nothing_found: usize,
    max_points_per_velocity: usize,
    max_points_bound: usize,
    velocities: Vec<VelocityRow>,
    fits: Vec<FitRow>,
    verdict: String,
}

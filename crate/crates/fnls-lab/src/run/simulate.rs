//! `simulate`: integrate one trajectory, record invariants, optionally dump
//! field snapshots.

use anyhow::{bail, Context, Result};
use serde::Serialize;
use std::path::Path;

use crate::config::{self, SimulateConfig};
use crate::report::{self, Csv, CsvCell};
use crate::run::{check_memory, grid_bytes, Deadline, Outcome};

/// Runs the subcommand.
pub fn run(config_path: &Path) -> Result<Outcome> {
    let cfg: SimulateConfig = config::load(config_path)?;
    let deadline = Deadline::new(cfg.limits.max_seconds);

    let grid = cfg.grid.to_core()?;
    // Stepper + transform + field + snapshot + scratch.
    check_memory(
        grid_bytes(cfg.grid.m, cfg.grid.dim, 8),
        cfg.limits.mem_cap_bytes(),
        "trajectory grid",
    )?;
    if !(cfg.time.dt > 0.0 && cfg.time.dt.is_finite()) {
        bail!("dt must be positive and finite, got {}", cfg.time.dt);
    }
    if cfg.time.sample_times.is_empty() {
        bail!("sample_times must be non-empty");
    }

    let dir = report::prepare_dir(&cfg.output.dir)?;
    report::write_manifest(&dir, "simulate", &cfg)?;

    let problem = cfg.problem.to_core();
    problem
        .validate()
        .map_err(|e| anyhow::anyhow!("problem: {e}"))?;
    let u0 = cfg.data.build(grid)?;

    let mass0 = fnls_core::solver::mass(&u0);
    let energy0 = fnls_core::solver::energy(&u0, problem)
        .map_err(|e| anyhow::anyhow!("energy: {e}"))?;

    deadline.check("time integration")?;
    let snapshots =
        fnls_core::solver::evolve_sampled(&u0, problem, cfg.time.dt, &cfg.time.sample_times)
            .map_err(|e| anyhow::anyhow!("evolution: {e}"))?;

    let mut table = Csv::new(&["t", "mass", "energy"]);
    table.row(&[
        CsvCell::Float(0.0),
        CsvCell::Float(mass0),
        CsvCell::Float(energy0),
    ]);

    let mut series = vec![InvariantSample {
        t: 0.0,
        mass: mass0,
        energy: energy0,
    }];
    for (k, (t, u)) in cfg.time.sample_times.iter().zip(&snapshots).enumerate() {
        deadline.check("snapshot bookkeeping")?;
        let m = fnls_core::solver::mass(u);
        let e = fnls_core::solver::energy(u, problem)
            .map_err(|e| anyhow::anyhow!("energy at t={t}: {e}"))?;
        table.row(&[CsvCell::Float(*t), CsvCell::Float(m), CsvCell::Float(e)]);
        series.push(InvariantSample {
            t: *t,
            mass: m,
            energy: e,
        });
        if cfg.time.dump_fields {
            report::dump_field(&dir, &format!("field_{k:03}"), u)
                .with_context(|| format!("dumping snapshot {k}"))?;
        }
    }
    table.save(&dir, "trajectory.csv")?;

    let mass_drift = series
        .iter()
        .map(|s| (s.mass - mass0).abs() / mass0.max(f64::MIN_POSITIVE))
        .fold(0.0f64, f64::max);
    let energy_scale = energy0.abs().max(1.0);
    let energy_drift = series
        .iter()
        .map(|s| (s.energy - energy0).abs() / energy_scale)
        .fold(0.0f64, f64::max);

    let metadata = Metadata {
        problem: cfg.problem,
        grid: cfg.grid,
        dt: cfg.time.dt,
        sample_times: cfg.time.sample_times.clone(),
        invariants: series,
        diagnostics: Diagnostics {
            max_relative_mass_drift: mass_drift,
            max_relative_energy_drift: energy_drift,
        },
    };
    report::write_json(&dir, "metadata.json", &metadata)?;

    println!(
        "simulate: {} samples, mass drift {:.3e}, energy drift {:.3e}",
        cfg.time.sample_times.len(),
        mass_drift,
        energy_drift
    );
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct InvariantSample {
    t: f64,
    mass: f64,
    energy: f64,
}

#[derive(Serialize)]
struct Diagnostics {
    max_relative_mass_drift: f64,
    max_relative_energy_drift: f64,
}

#[derive(Serialize)]
struct Metadata {
    problem: config::Problem,
    grid: config::GridSpec,
    dt: f64,
    sample_times: Vec<f64>,
    invariants: Vec<InvariantSample>,
    diagnostics: Diagnostics,
}

//! One function per command, each producing a [`Table`].
//!
//! Energies are written in units of `beta`; chemical potentials as
//! `(mu - omega) / beta` and hoppings as `kappa / beta`.

use jch_core::bloch::{sample_band, Sector, UnitCell};
use jch_core::ed::{self, Chain, EdOptions};
use jch_core::meanfield::{self, MfOptions};
use jch_core::phase::{self, Carrier, GapMapOptions, PhaseGrid, PhaseLabel, TipOptions};
use jch_core::{Error, SiteParams};
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::output::{float, Cell, Table};
use crate::{verify, AppError};

/// Tolerance of the doped intersection check, in units of `beta`.
pub const INTERSECTION_TOLERANCE: f64 = 1e-3;

pub fn run(config: &RunConfig) -> Result<(Table, Option<String>), AppError> {
    let table = match config.command {
        Command::Band => band(config)?,
        Command::Phase => phase_map(config)?,
        Command::Mf => mean_field(config)?,
        Command::Ed => finite_chains(config)?,
        Command::Doped => doped(config)?,
        Command::Verify => return Ok(verify_table()),
    };
    Ok((table, None))
}

fn site(config: &RunConfig, delta: f64) -> Result<SiteParams, Error> {
    SiteParams::with_detuning(config.omega, delta, config.beta)
}

/// Absolute chemical potentials of the configured `mu - omega` axis.
fn mu_axis(config: &RunConfig) -> Vec<f64> {
    config.mu_axis.points().iter().map(|m| config.omega + m).collect()
}

fn kappa_axis(config: &RunConfig) -> Vec<f64> {
    config.kappa_axis.points()
}

fn label(l: &PhaseLabel) -> String {
    match l {
        PhaseLabel::Mott(f) => {
            let f: Vec<String> = f.iter().map(u32::to_string).collect();
            format!("mott:{}", f.join("/"))
        }
        PhaseLabel::Superfluid => "superfluid".into(),
        PhaseLabel::Failed(_) => "failed".into(),
    }
}

fn gap_options(config: &RunConfig) -> GapMapOptions {
    GapMapOptions {
        k_points: config.gap_k_points,
        ..GapMapOptions::default()
    }
}

fn band(config: &RunConfig) -> Result<Table, AppError> {
    let b = config.beta;
    let s = site(config, config.delta)?;
    let mu = config.omega + config.mu_minus_omega;
    let mut t = Table::new(&["sector", "n", "k", "branch_index", "energy_over_beta"]);
    for &n in &config.fillings {
        let cell = UnitCell::uniform(s, n, config.kappa, mu)?;
        let sectors: &[Sector] = if n == 0 {
            &[Sector::Particle]
        } else {
            &[Sector::Particle, Sector::Hole]
        };
        for &sector in sectors {
            let band = sample_band(&cell, sector, config.k_points)?;
            for (k, energies) in band.k.iter().zip(&band.energies) {
                for (branch, e) in energies.iter().enumerate() {
                    t.push(vec![
                        sector.name().into(),
                        n.into(),
                        (*k).into(),
                        branch.into(),
                        (e / b).into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

fn push_grid(t: &mut Table, grid: &PhaseGrid, config: &RunConfig, system: Option<&str>) {
    let b = config.beta;
    for (ik, &kappa) in grid.kappa.iter().enumerate() {
        for (im, &mu) in grid.mu.iter().enumerate() {
            let p = grid.get(ik, im);
            let mut row: Vec<Cell> = system.map(Cell::from).into_iter().collect();
            row.extend([
                (kappa / b).into(),
                ((mu - config.omega) / b).into(),
                (p.gap / b).into(),
                label(&p.label).into(),
                p.gaps.map(|g| g.particle / b).into(),
                p.gaps.and_then(|g| g.hole).map(|h| h / b).into(),
            ]);
            if system.is_some() {
                let carrier = match p.gaps {
                    Some(g) if p.is_mott() && g.hole.is_some() => match g.carrier() {
                        Carrier::Particle => "n",
                        Carrier::Hole => "p",
                    },
                    _ => "",
                };
                row.push(carrier.into());
            }
            t.push(row);
        }
    }
}

fn count_failed(grid: &PhaseGrid) -> usize {
    grid.points
        .iter()
        .filter(|p| matches!(p.label, PhaseLabel::Failed(_)))
        .count()
}

fn phase_map(config: &RunConfig) -> Result<Table, AppError> {
    let b = config.beta;
    let s = site(config, config.delta)?;
    let grid = phase::gap_map(&[s], &kappa_axis(config), &mu_axis(config), &gap_options(config))?;
    let mut t = Table::new(&[
        "kappa_over_beta",
        "mu_minus_omega_over_beta",
        "gap_over_beta",
        "label",
        "particle_gap_over_beta",
        "hole_gap_over_beta",
    ]);
    let tip_opts = TipOptions {
        k_points: config.gap_k_points,
        ..TipOptions::default()
    };
    for n in 1..=3u32 {
        let tip = phase::lobe_tip(&[s], &[n], &tip_opts)?;
        t.meta(format!("lobe_tip_kappa_over_beta.n{n}"), float(tip / b));
    }
    t.meta("failed_points", count_failed(&grid).to_string());
    push_grid(&mut t, &grid, config, None);
    Ok(t)
}

fn mean_field(config: &RunConfig) -> Result<Table, AppError> {
    let b = config.beta;
    let s = site(config, config.delta)?;
    let opts = MfOptions::default();
    let mus = mu_axis(config);
    let points: Vec<Result<f64, Error>> = mus
        .par_iter()
        .map(|&mu| meanfield::mf_critical_kappa(&s, config.z, mu, config.n_max, &opts))
        .collect();
    let mut t = Table::new(&["mu_minus_omega_over_beta", "kappa_c_over_beta", "status"]);
    for (mu, point) in mus.iter().zip(points) {
        let (kappa, status) = match point {
            Ok(k) => (Some(k / b), "ok".to_string()),
            Err(Error::NoTransition { .. }) => (None, "no_transition".to_string()),
            Err(e) => (None, e.to_string()),
        };
        t.push(vec![((mu - config.omega) / b).into(), kappa.into(), status.into()]);
    }
    Ok(t)
}

fn finite_chains(config: &RunConfig) -> Result<Table, AppError> {
    let b = config.beta;
    let s = site(config, config.delta)?;
    let kappas = kappa_axis(config);
    let opts = EdOptions::default();
    let mut t = Table::new(&[
        "cavities",
        "boundary",
        "kappa_over_beta",
        "mu_lower_minus_omega_over_beta",
        "mu_upper_minus_omega_over_beta",
    ]);
    for m in config.cavities.0..=config.cavities.1 {
        let chain = Chain::uniform(s, m, kappas[0], config.boundary)?;
        let p = ed::plateau_boundaries(&chain, &kappas, config.target, &opts)?;
        for i in 0..p.kappa.len() {
            t.push(vec![
                m.into(),
                config.boundary.name().into(),
                (p.kappa[i] / b).into(),
                ((p.mu_lower[i] - config.omega) / b).into(),
                ((p.mu_upper[i] - config.omega) / b).into(),
            ]);
        }
    }
    Ok(t)
}

/// Tuned, detuned and doped gap maps on a shared grid.
struct DopedMaps {
    tuned: PhaseGrid,
    detuned: PhaseGrid,
    doped: PhaseGrid,
}

fn doped_maps(config: &RunConfig, kappa: &[f64], mu: &[f64]) -> Result<DopedMaps, Error> {
    let s0 = site(config, config.delta0)?;
    let s1 = site(config, config.delta1)?;
    let opts = gap_options(config);
    Ok(DopedMaps {
        tuned: phase::gap_map(&[s0], kappa, mu, &opts)?,
        detuned: phase::gap_map(&[s1], kappa, mu, &opts)?,
        doped: phase::gap_map(&[s0, s1], kappa, mu, &opts)?,
    })
}

fn doped(config: &RunConfig) -> Result<Table, AppError> {
    let b = config.beta;
    let maps = doped_maps(config, &kappa_axis(config), &mu_axis(config))?;
    let mut t = Table::new(&[
        "system",
        "kappa_over_beta",
        "mu_minus_omega_over_beta",
        "gap_over_beta",
        "label",
        "particle_gap_over_beta",
        "hole_gap_over_beta",
        "carrier",
    ]);
    if maps.doped.kappa[0] <= config.intersection_kappa_max {
        let r = phase::intersection_check(
            &maps.tuned,
            &maps.detuned,
            &maps.doped,
            config.intersection_kappa_max,
            INTERSECTION_TOLERANCE * b,
        )?;
        t.meta("intersection_max_deviation_over_beta", float(r.max_deviation / b));
        t.meta("intersection_holds", r.holds.to_string());
        t.meta("intersection_rows_checked", r.rows.len().to_string());
    }
    t.meta("n_type_points", maps.doped.carrier_points(Carrier::Particle).len().to_string());
    t.meta("p_type_points", maps.doped.carrier_points(Carrier::Hole).len().to_string());
    match phase::find_gap_enhancement(&maps.tuned, &maps.detuned, &maps.doped)? {
        Some((p, excess)) => {
            t.meta("enhancement_kappa_over_beta", float(p.kappa / b));
            t.meta("enhancement_mu_minus_omega_over_beta", float((p.mu - config.omega) / b));
            t.meta("enhancement_excess_over_beta", float(excess / b));
        }
        None => t.meta("enhancement", "none"),
    }
    let failed = count_failed(&maps.tuned) + count_failed(&maps.detuned) + count_failed(&maps.doped);
    t.meta("failed_points", failed.to_string());
    push_grid(&mut t, &maps.tuned, config, Some("tuned"));
    push_grid(&mut t, &maps.detuned, config, Some("detuned"));
    push_grid(&mut t, &maps.doped, config, Some("doped"));
    Ok(t)
}

fn verify_table() -> (Table, Option<String>) {
    let checks = verify::run_all();
    // Timings go to stderr only, so the table itself is reproducible.
    let mut t = Table::new(&["criterion", "status", "title", "detail"]);
    for c in &checks {
        eprintln!("{}", c.line());
        t.push(vec![c.id.into(), c.status().into(), c.title.into(), c.detail.clone().into()]);
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
    t.meta("passed", (checks.len() - failed.len()).to_string());
    t.meta("failed", failed.len().to_string());
    let failed = (!failed.is_empty()).then(|| format!("criteria {}", failed.join(", ")));
    (t, failed)
}

//! Subcommands that run numerics or read catalogs.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use accel_moment::astro::{default_catalog, load_catalog, scales_table, write_scales_csv, Constants};
use accel_moment::hamiltonians::{build, HamiltonianSpec, Kind, MuA, Term};
use accel_moment::numgrid::{
    cow_phase, evolve as run_evolution, precession_frequency, realize, symmetry_probe, CowKind, ProbeOptions,
    SpinorState, Trajectory,
};
use num_rational::BigRational;
use serde::Serialize;

use crate::config::{self, Format, RunConfig};
use crate::CliError;

/// Where a subcommand writes its data.
pub struct Sink {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn from_config(cfg: &RunConfig, path: Option<PathBuf>, format: Option<Format>) -> Self {
        let out = cfg.output.as_ref();
        Self {
            path: path.or_else(|| out.and_then(|o| o.path.clone())),
            format: format.or_else(|| out.map(|o| o.format)).unwrap_or_default(),
        }
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.path {
            Some(p) if p != Path::new("-") => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Compute(format!("cannot create {}: {}", p.display(), e)))?,
            )),
            _ => Box::new(BufWriter::new(std::io::stdout().lock())),
        })
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn write_json<T: Serialize>(sink: &Sink, value: &T) -> Result<(), CliError> {
    let mut w = sink.writer()?;
    serde_json::to_writer_pretty(&mut w, value).map_err(compute)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SampleRow {
    t: f64,
    sx: f64,
    sy: f64,
    sz: f64,
    theta: f64,
    phi: Option<f64>,
    norm: f64,
    z_mean: f64,
    energy_erg: f64,
}

/// Closed-form precession rate of the configured spin term, if present.
fn closed_form_rate(cfg: &RunConfig) -> Option<f64> {
    if !cfg.flags().get(Term::Spin) {
        return None;
    }
    let p = cfg.params.p_perp_gcms[0].hypot(cfg.params.p_perp_gcms[1]);
    let c = Constants::C;
    // the gravitational spin coefficient is that of the accelerational one at mu_a = 1
    let one_plus = match cfg.kind() {
        Kind::Gravitational => 2.0,
        _ => (1.0 + cfg.params.mu_a).abs(),
    };
    Some(one_plus * cfg.field_z().abs() * p / (2.0 * cfg.params.m_g * c * c))
}

fn hamiltonian_spec(cfg: &RunConfig) -> HamiltonianSpec {
    match cfg.kind() {
        Kind::Gravitational => HamiltonianSpec::gravitational(cfg.flags()),
        _ => HamiltonianSpec::accelerational(cfg.flags(), MuA::Symbolic),
    }
}

pub fn evolve(cfg: &RunConfig, sink: &Sink, summary: &mut dyn Write) -> Result<Trajectory, CliError> {
    let evo = config::require(&cfg.evolution, "evolution", "evolve").map_err(CliError::from)?;
    let spin = config::require(&cfg.initial_spin, "initial_spin", "evolve").map_err(CliError::from)?;
    let ctx = cfg.context().map_err(compute)?;
    let expr = build(&hamiltonian_spec(cfg)).map_err(compute)?;
    let h = realize(&expr, &ctx).map_err(compute)?;
    let psi = SpinorState::gaussian(ctx.grid, 0.0, ctx.grid.length_cm() / 16.0, spin.theta, spin.phi).map_err(compute)?;
    let traj = run_evolution(&h, &psi, evo.dt_s, evo.steps, evo.method.into()).map_err(compute)?;

    match sink.format {
        Format::Csv => {
            let mut w = sink.writer()?;
            traj.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<SampleRow> = traj
                .samples
                .iter()
                .map(|s| SampleRow {
                    t: s.t,
                    sx: s.spin.sx,
                    sy: s.spin.sy,
                    sz: s.spin.sz,
                    theta: s.spin.theta,
                    phi: s.spin.phi,
                    norm: s.norm,
                    z_mean: s.z_mean,
                    energy_erg: s.energy,
                })
                .collect();
            write_json(sink, &rows)?;
        }
    }

    writeln!(summary, "samples: {}", traj.len())?;
    writeln!(summary, "max norm drift: {:.3e}", traj.max_norm_drift())?;
    writeln!(summary, "max relative energy drift: {:.3e}", traj.max_relative_energy_drift())?;
    if let Some(omega) = closed_form_rate(cfg) {
        writeln!(summary, "closed-form precession rate: {:.10e} rad/s", omega)?;
        match precession_frequency(&traj) {
            Ok(p) => writeln!(summary, "fitted precession rate: {:.10e} rad/s", p.omega())?,
            Err(e) => writeln!(summary, "fitted precession rate: unavailable ({})", e)?,
        }
    }
    Ok(traj)
}

#[derive(Serialize)]
struct MemberRow {
    theta0: f64,
    alpha: f64,
    dtheta_dt_plus: f64,
    dtheta_dt_minus: f64,
    dtheta_dt_mirror: f64,
    dphi_dt: f64,
}

pub fn probe(cfg: &RunConfig, seed: u64, sink: &Sink, summary: &mut dyn Write) -> Result<(), CliError> {
    let section = config::require(&cfg.probe, "probe", "probe").map_err(CliError::from)?;
    let ctx = cfg.context().map_err(compute)?;
    let mu = BigRational::from_float(cfg.params.mu_a)
        .ok_or_else(|| CliError::Compute("mu_a is not finite".into()))?;
    let opts = ProbeOptions {
        members: section.members,
        seed,
        phi0: cfg.initial_spin.as_ref().map_or(0.0, |s| s.phi),
    };
    let report = symmetry_probe(&mu, &section.theta0, &ctx, &opts).map_err(compute)?;
    match sink.format {
        Format::Json => write_json(sink, &report)?,
        Format::Csv => {
            let mut w = sink.writer()?;
            writeln!(w, "theta0,alpha,dtheta_dt_plus,dtheta_dt_minus,dtheta_dt_mirror,dphi_dt")?;
            for e in &report.entries {
                for m in &e.members {
                    let row = MemberRow {
                        theta0: e.theta0,
                        alpha: m.alpha,
                        dtheta_dt_plus: m.dtheta_dt_plus,
                        dtheta_dt_minus: m.dtheta_dt_minus,
                        dtheta_dt_mirror: m.dtheta_dt_mirror,
                        dphi_dt: m.dphi_dt,
                    };
                    writeln!(
                        w,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        row.theta0, row.alpha, row.dtheta_dt_plus, row.dtheta_dt_minus, row.dtheta_dt_mirror, row.dphi_dt
                    )?;
                }
            }
            w.flush()?;
        }
    }
    for e in &report.entries {
        writeln!(
            summary,
            "theta0 {:.6} ({:.2} deg): dtheta/dt {:+.6e}, mirror {:+.6e}, reversed field {:+.6e}, phi drift {:+.6e} +- {:.6e} rad/s",
            e.theta0,
            e.theta0 * 180.0 / PI,
            e.dtheta_dt_plus,
            e.dtheta_dt_mirror,
            e.dtheta_dt_minus,
            e.phi_drift_mean,
            e.phi_drift_std
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CowRow {
    height_difference_cm: f64,
    traversal_time_s: f64,
    phase_gravitational: f64,
    phase_accelerational: f64,
    relative_difference: f64,
}

/// Phases of both Hamiltonians' potential terms with `a = −g`.
pub fn cow(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let section = config::require(&cfg.cow, "cow", "cow").map_err(CliError::from)?;
    let g_z = cfg.params.g_cms2.unwrap_or_else(|| -cfg.params.a_cms2.unwrap_or(0.0));
    let params = cfg.phys_params().with_gravity_z(g_z).with_accel_z(-g_z);
    let mut rows = Vec::with_capacity(section.geometries.len());
    for g in &section.geometries {
        let geo = (*g).into();
        let grav = cow_phase(CowKind::Gravitational, geo, &params).map_err(compute)?;
        let acc = cow_phase(CowKind::Accelerational, geo, &params).map_err(compute)?;
        let scale = grav.abs().max(acc.abs());
        rows.push(CowRow {
            height_difference_cm: g.height_difference_cm,
            traversal_time_s: g.traversal_time_s,
            phase_gravitational: grav,
            phase_accelerational: acc,
            relative_difference: if scale > 0.0 { (grav - acc).abs() / scale } else { 0.0 },
        });
    }
    match sink.format {
        Format::Json => write_json(sink, &rows)?,
        Format::Csv => {
            let mut w = sink.writer()?;
            writeln!(w, "height_difference_cm,traversal_time_s,phase_gravitational,phase_accelerational,relative_difference")?;
            for r in &rows {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    r.height_difference_cm, r.traversal_time_s, r.phase_gravitational, r.phase_accelerational, r.relative_difference
                )?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn scales(catalog: Option<&Path>, one_plus_mu_abs: f64, sink: &Sink) -> Result<(), CliError> {
    if !(one_plus_mu_abs.is_finite() && one_plus_mu_abs > 0.0) {
        return Err(CliError::Usage(format!("--one-plus-mu-a-abs must be positive, got {}", one_plus_mu_abs)));
    }
    let bodies = match catalog {
        Some(p) => load_catalog(p).map_err(|e| CliError::Usage(format!("{}: {}", p.display(), e)))?,
        None => default_catalog(),
    };
    // |1+mu_a| is all the length scale depends on
    let rows = scales_table(&bodies, one_plus_mu_abs - 1.0).map_err(compute)?;
    match sink.format {
        Format::Csv => {
            let mut w = sink.writer()?;
            write_scales_csv(&rows, &mut w).map_err(compute)?;
            w.flush()?;
        }
        Format::Json => write_json(sink, &rows)?,
    }
    Ok(())
}

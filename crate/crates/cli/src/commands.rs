use std::f64::consts::TAU;
use std::path::Path;

use casimir_decoherence::coefficients::{
    asymptotes, coefficient_trace, d2_asymptotic_pv, uniform_times, CoefficientTrace,
};
use casimir_decoherence::entropy::sieve_minimize;
use casimir_decoherence::io::{self, write_json};
use casimir_decoherence::pairs::{
    entangled_state_summary, gamma_from_pairs, gamma_line_integral, interference_decay, pair_run, vacuum_persistence,
    PairDensity,
};
use casimir_decoherence::phasespace::*;
use casimir_decoherence::quadrature::QuadOptions;
use casimir_decoherence::spectral::{log_space, xi_thermal, xi_vacuum, zeta, SpectralTable};
use casimir_decoherence::thermal::{plate_decoherence_time, PlateOptions};
use casimir_decoherence::{Error, PhysicalConfig64};
use rayon::prelude::*;
use serde_json::json;

use crate::config::*;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn csv<F>(out: &Path, name: &str, write: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> io::IoResult<()>,
{
    let mut w = io::create(&out.join(name))?;
    write(&mut w)?;
    Ok(())
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn spectrum(cfg: &SpectrumConfig, out: &Path) -> Result<()> {
    let phys = cfg.physical.validated()?;
    if !(cfg.u_min > 0.0 && cfg.u_max > cfg.u_min) || cfg.points < 2 {
        return Err(config_err("need 0 < u_min < u_max and points >= 2"));
    }
    let us = log_space(cfg.u_min, cfg.u_max, cfg.points);
    let omegas: Vec<f64> = us.iter().map(|u| u * phys.omega_cutoff).collect();
    let table = SpectralTable::build(&phys, &omegas, &cfg.quadrature)?;
    let zetas = us
        .iter()
        .map(|&u| zeta(u))
        .collect::<casimir_decoherence::Result<Vec<f64>>>()?;
    let thermal = omegas
        .par_iter()
        .map(|&w| xi_thermal(w, &phys, &cfg.quadrature).map(|q| q.value))
        .collect::<casimir_decoherence::Result<Vec<f64>>>()?;
    csv(out, "spectrum.csv", |w| io::write_spectrum(w, &table))?;
    csv(out, "zeta.csv", |w| {
        io::write_rows(w, &["u", "zeta"], us.iter().zip(&zetas).map(|(u, z)| vec![*u, *z]))
    })?;
    csv(out, "xi_parts.csv", |w| {
        let rows = omegas
            .iter()
            .zip(&thermal)
            .map(|(&o, &t)| vec![o, xi_vacuum(o, &phys), t]);
        io::write_rows(w, &["omega", "xi_vacuum", "xi_thermal"], rows)
    })?;
    write_json(
        &out.join("spectrum.json"),
        &json!({ "config": cfg, "tail_exponent": table.tail_exponent }),
    )?;
    Ok(())
}

fn trace_sidecar(trace: &CoefficientTrace<f64>) -> serde_json::Value {
    json!({
        "config": trace.config,
        "asymptotic_gamma": trace.asymptotic_gamma,
        "asymptotic_d1": trace.asymptotic_d1,
        "asymptotic_d2": trace.asymptotic_d2,
        "d1_peak": trace.d1_peak,
        "convergence": trace.convergence,
        "issues": trace.issues,
    })
}

pub fn run_trace(
    phys: &PhysicalConfig64,
    t_max: f64,
    steps: usize,
    quad: &QuadOptions,
) -> Result<CoefficientTrace<f64>> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(config_err(format!("t_max must be >= 0, got {t_max}")));
    }
    Ok(coefficient_trace(
        &phys.validated()?,
        &uniform_times(t_max, steps),
        quad,
    )?)
}

pub fn coeffs(cfg: &CoeffsConfig, out: &Path) -> Result<()> {
    let trace = run_trace(&cfg.physical, cfg.t_max, cfg.steps, &cfg.quadrature)?;
    csv(out, "trace.csv", |w| io::write_trace(w, &trace))?;
    let mut side = trace_sidecar(&trace);
    side["run"] = json!(cfg);
    write_json(&out.join("trace.json"), &side)?;
    Ok(())
}

fn schedule(source: &CoefficientSource, phys: &PhysicalConfig64, t_final: f64) -> Result<CoefficientSchedule<f64>> {
    let quad = QuadOptions::default();
    match *source {
        CoefficientSource::Constant { gamma, d1, d2, delta_m } => {
            if ![gamma, d1, d2, delta_m].iter().all(|v| v.is_finite()) || gamma < 0.0 || d1 < 0.0 {
                return Err(config_err("constant coefficients must be finite with gamma, d1 >= 0"));
            }
            Ok(CoefficientSchedule::Constant(Coefficients { gamma, d1, d2, delta_m }))
        }
        CoefficientSource::Asymptotic => {
            let a = asymptotes(phys, &quad)?;
            let d2 = match d2_asymptotic_pv(phys, &quad) {
                Ok(q) => q.value,
                Err(Error::Divergent(m)) => {
                    return Err(config_err(format!(
                        "asymptotic D2 is undefined here ({m}); give constant coefficients"
                    )))
                }
                Err(e) => return Err(e.into()),
            };
            Ok(CoefficientSchedule::Constant(Coefficients {
                gamma: a.gamma,
                d1: a.d1,
                d2,
                delta_m: 0.0,
            }))
        }
        CoefficientSource::Trace { steps } => {
            let trace = coefficient_trace(phys, &uniform_times(t_final, steps.max(1)), &quad)?;
            Ok(CoefficientSchedule::from_trace(&trace, None)?)
        }
    }
}

pub fn evolve(cfg: &EvolveConfig, out: &Path) -> Result<()> {
    let phys = cfg.physical.validated()?;
    if !(cfg.alpha > 0.0 && cfg.periods > 0.0) {
        return Err(config_err("alpha and periods must be positive"));
    }
    let spec = CatStateSpec::momentum_cat(cfg.alpha, cfg.parity);
    let grid = match cfg.grid {
        Some(g) => GridSpec::new(g.nx, g.np, g.x_half, g.p_half)?,
        None => default_grid(&spec, &phys),
    };
    let t_final = cfg.periods * TAU / phys.omega0;
    let sched = schedule(&cfg.coefficients, &phys, t_final)?;
    let cat = cat_wigner(&spec, &grid, &phys)?;
    let mix = cat_wigner(&spec.with_parity(Parity::Mixture), &grid, &phys)?;
    let a = evolve_fokker_planck(&cat, &sched, &phys, t_final, &cfg.solver)?;
    let plain = SolverOptions {
        snapshot_times: Vec::new(),
        ..cfg.solver.clone()
    };
    let b = evolve_fokker_planck(&mix, &sched, &phys, t_final, &plain)?;

    let end = sched.at(t_final);
    let predictors = if end.gamma > 0.0 && end.d1 > 0.0 {
        Some(decoherence_time_predictors(
            &phys,
            end.gamma,
            end.d1,
            cfg.alpha,
            cfg.sphere_radius,
        )?)
    } else {
        None
    };
    let series = coherence_factor(&a, &b, &phys, predictors.as_ref().map(|p| p.from_diffusion))?;
    csv(out, "coherence.csv", |w| io::write_coherence(w, &series))?;
    let mut snaps = Vec::new();
    for (k, s) in a.snapshots.iter().enumerate() {
        let name = format!("snapshot_{k:03}.csv");
        csv(out, &name, |w| io::write_snapshot(w, &s.grid))?;
        snaps.push(json!({ "file": name, "time": s.time }));
    }
    csv(out, "final.csv", |w| io::write_snapshot(w, &a.final_grid))?;
    let mut warnings = a.warnings.clone();
    warnings.extend(b.warnings.iter().cloned());
    if let Some(p) = &predictors {
        warnings.extend(p.warnings.iter().cloned());
    }
    write_json(
        &out.join("evolve.json"),
        &json!({
            "config": cfg,
            "grid": grid,
            "dt": a.dt,
            "t_final": t_final,
            "norm_drift_rate": a.norm_drift_rate(),
            "max_leakage": a.max_leakage,
            "fit_rate": series.fit_rate,
            "fit_residual": series.fit_residual,
            "fit_window": series.window,
            "fit_flagged": series.flagged,
            "predictors": predictors,
            "snapshots": snaps,
            "final_time": a.times.last(),
            "warnings": warnings,
        }),
    )?;
    Ok(())
}

pub fn sieve(cfg: &SieveConfig, out: &Path) -> Result<()> {
    let phys = cfg.physical.validated()?;
    if matches!(cfg.coefficients, CoefficientSource::Trace { .. }) {
        return Err(config_err("the sieve needs constant or asymptotic coefficients"));
    }
    let coeffs = schedule(&cfg.coefficients, &phys, 0.0)?.at(0.0);
    let res = sieve_minimize(&phys, &coeffs, &cfg.options)?;
    csv(out, "sieve.csv", |w| io::write_sieve(w, &res.scan))?;
    write_json(
        &out.join("sieve.json"),
        &json!({
            "config": cfg,
            "coefficients": coeffs,
            "r": res.r,
            "phi": res.phi,
            "var_q": res.var_q,
            "var_p": res.var_p,
            "cov_qp": res.cov_qp,
            "entropy_at_optimum": res.entropy_at_optimum,
        }),
    )?;
    Ok(())
}

pub fn pairs(cfg: &PairsConfig, out: &Path) -> Result<()> {
    let p = cfg.params;
    let density = PairDensity::PerfectMirror { hbar: p.hbar };
    let run = pair_run(&p, &density)?;
    let mut warnings = Vec::new();
    let mut guarded = |r: casimir_decoherence::Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    let gamma = guarded(gamma_from_pairs(&run));
    let decay = guarded(interference_decay(&run));
    let persistence = vacuum_persistence(&run);
    warnings.extend(persistence.warnings.iter().cloned());
    csv(out, "pairs.csv", |w| io::write_pairs(w, &run))?;
    write_json(
        &out.join("pairs.json"),
        &json!({
            "config": cfg,
            "total_probability": run.total_probability,
            "total_probability_error": run.total_probability_error,
            "main_lobe_probability": run.main_lobe_probability,
            "radiated_energy": run.radiated_energy,
            "radiated_energy_error": run.radiated_energy_error,
            "sum_cutoff": run.sum_cutoff,
            "vacuum_persistence": persistence.value,
            "gamma_from_pairs": gamma,
            "gamma_expected": gamma_line_integral(&density, p.omega0, p.mass, p.hbar),
            "interference_decay": decay,
            "entangled_state": entangled_state_summary(&run),
            "warnings": warnings,
        }),
    )?;
    Ok(())
}

pub fn thermal(cfg: &ThermalConfig, out: &Path) -> Result<()> {
    if cfg.temperatures_k.is_empty() {
        return Err(config_err("temperatures_k is empty"));
    }
    let opts = PlateOptions {
        delta_q_m: cfg.delta_q_m,
        mass_kg: cfg.mass_kg,
        omega0_per_s: cfg.omega0_per_s,
    };
    let reports = cfg
        .temperatures_k
        .iter()
        .map(|&t| plate_decoherence_time(t, cfg.area_m2, &opts))
        .collect::<casimir_decoherence::Result<Vec<_>>>()?;
    csv(out, "thermal.csv", |w| io::write_thermal(w, &reports))?;
    write_json(&out.join("thermal.json"), &json!({ "config": cfg, "reports": reports }))?;
    Ok(())
}

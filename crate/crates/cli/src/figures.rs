//! Figure presets. Each writes its data plus a `figure.json` that carries
//! the caption formulas and their values for asymptote overlays.

use std::f64::consts::PI;
use std::path::Path;

use casimir_decoherence::io::{self, write_json};
use casimir_decoherence::quadrature::QuadOptions;
use casimir_decoherence::PhysicalConfig64;
use serde_json::json;

use crate::commands::{self, run_trace};
use crate::config::SpectrumConfig;
use crate::CliError;

fn traces(
    phys: &PhysicalConfig64,
    main: (f64, usize),
    inset: (f64, usize),
    out: &Path,
) -> Result<(f64, f64), CliError> {
    let q = QuadOptions::default();
    let tr = run_trace(phys, main.0, main.1, &q)?;
    let ins = run_trace(phys, inset.0, inset.1, &q)?;
    io::write_trace(io::create(&out.join("trace.csv"))?, &tr)?;
    io::write_trace(io::create(&out.join("trace_inset.csv"))?, &ins)?;
    Ok((tr.asymptotic_gamma, tr.asymptotic_d1))
}

pub fn figure(which: u8, out: &Path) -> Result<(), CliError> {
    let dir = out.join(format!("figure{which}"));
    let spec = match which {
        1 => {
            let phys = PhysicalConfig64::natural(1e4, 0.0)?;
            let (g, d) = traces(&phys, (20.0, 400), (20.0 / phys.omega_cutoff, 200), &dir)?;
            let caption = 1.0 / (12.0 * PI);
            json!({
                "figure": 1,
                "title": "Diffusion and damping coefficients, zero temperature, nearly perfect mirror",
                "config": phys,
                "files": { "trace": "trace.csv", "inset": "trace_inset.csv" },
                "x": { "column": "t", "label": "ω₀t" },
                "overlays": [
                    { "column": "gamma", "formula": "Γ = ħω₀²/12πM", "value": caption, "computed": g },
                    { "column": "d1", "formula": "D₁ = ħ²ω₀/12πM²", "value": caption, "computed": d },
                ],
            })
        }
        2 => {
            let phys = PhysicalConfig64::natural(1e-4, 0.0)?;
            let (g, d) = traces(&phys, (100.0, 2000), (2.0 * PI, 200), &dir)?;
            let om = phys.omega_cutoff;
            let caption = om * om * (1.0 / om).ln() / (2.0 * PI);
            json!({
                "figure": 2,
                "title": "Diffusion and damping coefficients, zero temperature, nearly transparent mirror",
                "config": phys,
                "files": { "trace": "trace.csv", "inset": "trace_inset.csv" },
                "x": { "column": "t", "label": "ω₀t" },
                "overlays": [
                    { "column": "gamma", "formula": "Γ = ħΩ²ln(ω₀/Ω)/2πM", "value": caption, "computed": g },
                    { "column": "d1", "formula": "D₁ = ħ²Ω²ln(ω₀/Ω)/2πM²ω₀", "value": caption, "computed": d },
                ],
            })
        }
        3 => {
            let cfg = SpectrumConfig {
                physical: PhysicalConfig64::natural(1.0, 0.0)?,
                u_min: 1e-2,
                u_max: 1e2,
                points: 512,
                quadrature: QuadOptions::default(),
            };
            commands::spectrum(&cfg, &dir)?;
            json!({
                "figure": 3,
                "title": "Spectral density for zero temperature",
                "config": cfg.physical,
                "files": { "zeta": "zeta.csv", "spectrum": "spectrum.csv" },
                "x": { "column": "u", "label": "ω/Ω", "scale": "log" },
                "curve": { "column": "zeta", "formula": "ζ(u) = ln(1+u²)/2u + arctan(u)/u² − 1/u" },
                "relation": "ξ⁰[ω] = (2/π)ħ²Ω ζ(ω/Ω)",
                "overlays": [
                    { "column": "zeta", "formula": "u/6", "regime": "u ≪ 1" },
                    { "column": "zeta", "formula": "ln(u)/u", "regime": "u ≫ 1" },
                ],
            })
        }
        _ => return Err(CliError::Config(format!("no figure {which}; choose 1, 2 or 3"))),
    };
    write_json(&dir.join("figure.json"), &spec)?;
    Ok(())
}

use casimir_decoherence::coefficients::{coefficient_trace, uniform_times};
use casimir_decoherence::io::*;
use casimir_decoherence::pairs::{pair_run, PairDensity, PairParams};
use casimir_decoherence::phasespace::{GridSpec, WignerGrid};
use casimir_decoherence::quadrature::QuadOptions;
use casimir_decoherence::spectral::{log_space, SpectralTable};
use casimir_decoherence::thermal::{plate_decoherence_time, PlateOptions};
use casimir_decoherence::PhysicalConfig64;

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn spectrum_and_trace_round_trip_bitwise() {
    let cfg = PhysicalConfig64::natural(2.0, 0.3).unwrap();
    let table = SpectralTable::build(&cfg, &log_space(0.05, 20.0, 33), &QuadOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_spectrum(&mut buf, &table).unwrap();
    let t = read_rows(buf.as_slice(), &SPECTRUM_HEADER).unwrap();
    assert_eq!(bits(&t.column("xi").unwrap()), bits(&table.xi_values));
    assert_eq!(bits(&t.column("sigma").unwrap()), bits(&table.sigma_values));

    let vac = PhysicalConfig64::natural(5.0, 0.0).unwrap();
    let tr = coefficient_trace(&vac, &uniform_times(3.0, 12), &QuadOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_trace(&mut buf, &tr).unwrap();
    let t = read_rows(buf.as_slice(), &TRACE_HEADER).unwrap();
    assert_eq!(t.rows.len(), 13);
    assert_eq!(bits(&t.column("d2").unwrap()), bits(&tr.d2));
    assert_eq!(bits(&t.column("delta_m2").unwrap()), bits(&tr.delta_m2));
}

#[test]
fn snapshot_is_long_format_x_major() {
    let spec = GridSpec::new(4, 6, 1.0, 3.0).unwrap();
    let g = WignerGrid::from_fn(spec, |x, p| x + 10.0 * p);
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &g).unwrap();
    let t = read_rows(buf.as_slice(), &SNAPSHOT_HEADER).unwrap();
    assert_eq!(t.rows.len(), 24);
    assert_eq!(t.rows[0], vec![-1.0, -3.0, -31.0]);
    assert_eq!(t.rows[1], vec![-1.0, -2.0, -21.0]);
    assert!(t.rows.iter().all(|r| r[2] == r[0] + 10.0 * r[1]));
}

#[test]
fn pairs_and_thermal_tables() {
    let run = pair_run(
        &PairParams {
            table_points: 7,
            ..PairParams::natural(1e-3, 400.0)
        },
        &PairDensity::PerfectMirror { hbar: 1.0 },
    )
    .unwrap();
    let mut buf = Vec::new();
    write_pairs(&mut buf, &run).unwrap();
    let t = read_rows(buf.as_slice(), &PAIRS_HEADER).unwrap();
    assert_eq!(t.rows.len(), 49);
    assert_eq!(bits(&t.column("prob_density").unwrap()), bits(&run.table));

    let reports: Vec<_> = [50.0, 300.0]
        .iter()
        .map(|&k| plate_decoherence_time(k, 1e-6, &PlateOptions::default()).unwrap())
        .collect();
    let mut buf = Vec::new();
    write_thermal(&mut buf, &reports).unwrap();
    let t = read_rows(buf.as_slice(), &THERMAL_HEADER).unwrap();
    assert!(t.column("gamma_per_s").unwrap().iter().all(|g| g.is_nan()));
    assert_eq!(t.column("T_kelvin").unwrap(), vec![50.0, 300.0]);
}

#[test]
fn json_sidecar_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PhysicalConfig64::natural(3.0, 0.25).unwrap();
    let path = dir.path().join("nested/cfg.json");
    write_json(&path, &cfg).unwrap();
    let back: PhysicalConfig64 = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, cfg);
    let bad = r#"{"mass":1,"omega0":1,"omega_cutoff":1,"temperature":0,"spin":1}"#;
    assert!(serde_json::from_str::<PhysicalConfig64>(bad).is_err());
}

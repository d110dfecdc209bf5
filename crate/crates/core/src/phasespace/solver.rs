use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::real::Real;
use crate::spectral::PhysicalConfig;

use super::grid::{GridSpec, WignerGrid};
use super::moments::{CoefficientSchedule, Coefficients};

/// RK4 stability radius on the negative real axis (rounded down).
const RK4_REAL: f64 = 2.78;
/// RK4 stability radius on the imaginary axis (rounded down).
const RK4_IMAG: f64 = 2.82;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    /// Time step; default is min(period/64, 0.9·stability limit).
    #[serde(default)]
    pub dt: Option<f64>,
    /// Times at which full grid snapshots are stored.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Outer fraction of each axis monitored for leakage.
    #[serde(default = "default_band")]
    pub leakage_band: f64,
    #[serde(default = "default_leak")]
    pub leakage_threshold: f64,
}

fn default_band() -> f64 {
    0.03
}

fn default_leak() -> f64 {
    1e-4
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dt: None,
            snapshot_times: Vec::new(),
            leakage_band: default_band(),
            leakage_threshold: default_leak(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct Snapshot<R> {
    pub time: R,
    pub grid: WignerGrid<R>,
}

/// Output of [`evolve_fokker_planck`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct Trajectory<R> {
    /// Step times, starting at 0.
    pub times: Vec<R>,
    /// W(0, 0) at each step time.
    pub origin: Vec<R>,
    /// ∑W dx dp at each step time.
    pub norm: Vec<R>,
    pub snapshots: Vec<Snapshot<R>>,
    pub final_grid: WignerGrid<R>,
    pub dt: R,
    /// Largest boundary mass seen and when.
    pub max_leakage: (R, R),
    pub warnings: Vec<String>,
}

impl<R: Real> Trajectory<R> {
    /// max |norm(t) − norm(0)| / t over the run.
    pub fn norm_drift_rate(&self) -> R {
        let n0 = self.norm[0];
        self.times
            .iter()
            .zip(&self.norm)
            .skip(1)
            .map(|(&t, &n)| (n - n0).abs() / t)
            .fold(R::zero(), R::max)
    }
}

struct Plans<R: Real> {
    fx: Arc<dyn Fft<R>>,
    ix: Arc<dyn Fft<R>>,
    fp: Arc<dyn Fft<R>>,
    ip: Arc<dyn Fft<R>>,
}

impl<R: Real> Plans<R> {
    fn new(spec: &GridSpec<R>) -> Self {
        let mut pl = FftPlanner::new();
        Self {
            fx: pl.plan_fft_forward(spec.nx),
            ix: pl.plan_fft_inverse(spec.nx),
            fp: pl.plan_fft_forward(spec.np),
            ip: pl.plan_fft_inverse(spec.np),
        }
    }
}

/// Signed angular wavenumber of FFT bin m for period `len`.
fn wavenumber<R: Real>(m: usize, n: usize, len: R) -> R {
    let s = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
    R::of(s) * R::TAU() / len
}

fn transpose<R: Copy + Send + Sync>(src: &[R], rows: usize, cols: usize, dst: &mut [R]) {
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
}

/// Row r of `data` (rows × n) becomes f(y − shift(r)) by Fourier
/// interpolation; the Nyquist bin is kept real.
fn shift_rows<R: Real>(
    data: &mut [R],
    n: usize,
    len: R,
    fwd: &Arc<dyn Fft<R>>,
    inv: &Arc<dyn Fft<R>>,
    shift: impl Fn(usize) -> R + Sync,
) {
    let scale = R::one() / R::of_usize(n);
    data.par_chunks_mut(n).enumerate().for_each_init(
        || vec![Complex::new(R::zero(), R::zero()); n],
        |buf, (r, row)| {
            let s = shift(r);
            if s == R::zero() {
                return;
            }
            for (b, &v) in buf.iter_mut().zip(row.iter()) {
                *b = Complex::new(v, R::zero());
            }
            fwd.process(buf);
            for (m, b) in buf.iter_mut().enumerate() {
                let k = wavenumber(m, n, len);
                if m == n / 2 {
                    *b = *b * (k * s).cos();
                } else {
                    *b = *b * Complex::from_polar(R::one(), -k * s);
                }
            }
            inv.process(buf);
            for (v, b) in row.iter_mut().zip(buf.iter()) {
                *v = b.re * scale;
            }
        },
    );
}

/// Splitting stepper for
/// ∂tW = −(p/M′)∂xW + Mω₀²x∂pW + 2Γ∂x(xW) + D₁∂²xW − D₂∂x∂pW.
struct Stepper<'a, R: Real> {
    spec: GridSpec<R>,
    cfg: &'a PhysicalConfig<R>,
    plans: Plans<R>,
    /// Column-major scratch (index j·nx + i).
    col: Vec<R>,
    col2: Vec<R>,
}

impl<'a, R: Real> Stepper<'a, R> {
    fn new(spec: GridSpec<R>, cfg: &'a PhysicalConfig<R>) -> Self {
        let n = spec.nx * spec.np;
        Self {
            spec,
            cfg,
            plans: Plans::new(&spec),
            col: vec![R::zero(); n],
            col2: vec![R::zero(); n],
        }
    }

    /// W(x, p) → W(x − a·p, p).
    fn shear_x(&mut self, w: &mut [R], a: R) {
        let s = self.spec;
        transpose(w, s.nx, s.np, &mut self.col);
        let lx = R::of(2.0) * s.x_half;
        shift_rows(&mut self.col, s.nx, lx, &self.plans.fx, &self.plans.ix, |j| a * s.p(j));
        transpose(&self.col, s.np, s.nx, w);
    }

    /// W(x, p) → W(x, p − b·x).
    fn shear_p(&self, w: &mut [R], b: R) {
        let s = self.spec;
        let lp = R::of(2.0) * s.p_half;
        shift_rows(w, s.np, lp, &self.plans.fp, &self.plans.ip, |i| b * s.x(i));
    }

    /// Exact Hamiltonian flow over `dt` with mass M′ = M/(1 − ΔM/M),
    /// as three shears.
    fn hamiltonian(&mut self, w: &mut [R], dt: R, delta_m: R) {
        let cfg = self.cfg;
        let m_eff = cfg.mass / (R::one() - delta_m / cfg.mass);
        let nu = cfg.omega0 * (m_eff / cfg.mass).sqrt().recip();
        let (a, b) = if nu == R::zero() {
            (dt / (R::of(2.0) * m_eff), R::zero())
        } else {
            let th = nu * dt;
            ((th / R::of(2.0)).tan() / (m_eff * nu), -m_eff * nu * th.sin())
        };
        self.shear_x(w, a);
        if b != R::zero() {
            self.shear_p(w, b);
        }
        self.shear_x(w, a);
    }

    /// out = 2Γ∂x(xW) + D₁∂²xW − D₂∂x∂pW = ∂x[2ΓxW + D₁∂xW − D₂∂pW].
    fn dissipator(&mut self, w: &[R], c: &Coefficients<R>, out: &mut [R]) {
        let s = self.spec;
        let (nx, np) = (s.nx, s.np);
        // V = 2ΓxW − D₂∂pW in row layout, built in `out`
        out.copy_from_slice(w);
        if c.d2 != R::zero() {
            let lp = R::of(2.0) * s.p_half;
            let (fp, ip) = (&self.plans.fp, &self.plans.ip);
            let scale = R::one() / R::of_usize(np);
            out.par_chunks_mut(np).for_each_init(
                || vec![Complex::new(R::zero(), R::zero()); np],
                |buf, row| {
                    for (b, &v) in buf.iter_mut().zip(row.iter()) {
                        *b = Complex::new(v, R::zero());
                    }
                    fp.process(buf);
                    for (m, b) in buf.iter_mut().enumerate() {
                        let k = if m == np / 2 { R::zero() } else { wavenumber(m, np, lp) };
                        *b = Complex::new(-b.im * k, b.re * k);
                    }
                    ip.process(buf);
                    for (v, b) in row.iter_mut().zip(buf.iter()) {
                        *v = b.re * scale;
                    }
                },
            );
        } else {
            out.iter_mut().for_each(|v| *v = R::zero());
        }
        let two_g = R::of(2.0) * c.gamma;
        out.par_chunks_mut(np)
            .zip(w.par_chunks(np))
            .enumerate()
            .for_each(|(i, (o, wr))| {
                let x = s.x(i);
                for (ov, &wv) in o.iter_mut().zip(wr) {
                    *ov = two_g * x * wv - c.d2 * *ov;
                }
            });
        transpose(out, nx, np, &mut self.col);
        transpose(w, nx, np, &mut self.col2);
        let lx = R::of(2.0) * s.x_half;
        let (fx, ix) = (&self.plans.fx, &self.plans.ix);
        let scale = R::one() / R::of_usize(nx);
        let d1 = c.d1;
        self.col.par_chunks_mut(nx).zip(self.col2.par_chunks(nx)).for_each_init(
            || {
                (
                    vec![Complex::new(R::zero(), R::zero()); nx],
                    vec![Complex::new(R::zero(), R::zero()); nx],
                )
            },
            |(bv, bw), (v, wc)| {
                for m in 0..nx {
                    bv[m] = Complex::new(v[m], R::zero());
                    bw[m] = Complex::new(wc[m], R::zero());
                }
                fx.process(bv);
                fx.process(bw);
                for m in 0..nx {
                    let k = wavenumber(m, nx, lx);
                    let ik_v = if m == nx / 2 {
                        Complex::new(R::zero(), R::zero())
                    } else {
                        Complex::new(-bv[m].im * k, bv[m].re * k)
                    };
                    // ∂x(V + D₁∂xW) → ik·V̂ − D₁k²Ŵ
                    bv[m] = ik_v - bw[m] * (d1 * k * k);
                }
                ix.process(bv);
                for m in 0..nx {
                    v[m] = bv[m].re * scale;
                }
            },
        );
        transpose(&self.col, np, nx, out);
    }

    /// Classical RK4 for the dissipative part over [t, t + h].
    fn dissipate(&mut self, w: &mut [R], t: R, h: R, sched: &CoefficientSchedule<R>) {
        let n = w.len();
        let (c0, cm, c1) = (sched.at(t), sched.at(t + h / R::of(2.0)), sched.at(t + h));
        if [c0, cm, c1]
            .iter()
            .all(|c| c.gamma == R::zero() && c.d1 == R::zero() && c.d2 == R::zero())
        {
            return;
        }
        let mut k = vec![R::zero(); n];
        let mut acc = vec![R::zero(); n];
        let mut stage = vec![R::zero(); n];
        let half = h / R::of(2.0);
        self.dissipator(w, &c0, &mut k);
        axpy_into(&mut acc, &k, R::one(), true);
        axpy(&mut stage, w, &k, half);
        self.dissipator(&stage.clone(), &cm, &mut k);
        axpy_into(&mut acc, &k, R::of(2.0), false);
        axpy(&mut stage, w, &k, half);
        self.dissipator(&stage.clone(), &cm, &mut k);
        axpy_into(&mut acc, &k, R::of(2.0), false);
        axpy(&mut stage, w, &k, h);
        self.dissipator(&stage.clone(), &c1, &mut k);
        axpy_into(&mut acc, &k, R::one(), false);
        let sixth = h / R::of(6.0);
        w.par_iter_mut()
            .zip(acc.par_iter())
            .for_each(|(wv, &a)| *wv = *wv + sixth * a);
    }
}

/// dst = x + s·y.
fn axpy<R: Real>(dst: &mut [R], x: &[R], y: &[R], s: R) {
    dst.par_iter_mut()
        .zip(x.par_iter().zip(y.par_iter()))
        .for_each(|(d, (&a, &b))| *d = a + s * b);
}

/// acc (= or +=) s·k.
fn axpy_into<R: Real>(acc: &mut [R], k: &[R], s: R, reset: bool) {
    acc.par_iter_mut().zip(k.par_iter()).for_each(|(a, &b)| {
        *a = if reset { s * b } else { *a + s * b };
    });
}

/// Largest stable dissipative RK4 step for the grid and the coefficient
/// envelope.
pub fn max_stable_dt<R: Real>(spec: &GridSpec<R>, env: &Coefficients<R>) -> R {
    let kx = R::PI() / spec.dx();
    let kp = R::PI() / spec.dp();
    let real = env.d1.abs() * kx * kx + env.d2.abs() * kx * kp + R::of(2.0) * env.gamma.abs();
    let imag = R::of(2.0) * env.gamma.abs() * spec.x_half * kx;
    let lim_r = if real > R::zero() {
        R::of(RK4_REAL) / real
    } else {
        R::infinity()
    };
    let lim_i = if imag > R::zero() {
        R::of(RK4_IMAG) / imag
    } else {
        R::infinity()
    };
    lim_r.min(lim_i)
}

fn envelope<R: Real>(sched: &CoefficientSchedule<R>) -> Coefficients<R> {
    let list: Vec<Coefficients<R>> = match sched {
        CoefficientSchedule::Constant(c) => vec![*c],
        CoefficientSchedule::Tabulated { values, .. } => values.clone(),
    };
    let mut e = Coefficients::<R>::default();
    for c in list {
        e.gamma = e.gamma.max(c.gamma.abs());
        e.d1 = e.d1.max(c.d1.abs());
        e.d2 = e.d2.max(c.d2.abs());
        e.delta_m = e.delta_m.max(c.delta_m.abs());
    }
    e
}

/// Evolve W from t = 0 to `t_final` (Strang splitting: half dissipative
/// step, exact rotation, half dissipative step).
pub fn evolve_fokker_planck<R: Real>(
    initial: &WignerGrid<R>,
    schedule: &CoefficientSchedule<R>,
    cfg: &PhysicalConfig<R>,
    t_final: R,
    opts: &SolverOptions,
) -> Result<Trajectory<R>> {
    if !(t_final >= R::zero()) || !t_final.is_finite() {
        return Err(invalid("t_final", format!("must be finite and >= 0, got {t_final}")));
    }
    let env = envelope(schedule);
    if !(env.gamma.is_finite() && env.d1.is_finite() && env.d2.is_finite() && env.delta_m.is_finite()) {
        return Err(invalid("coefficients", "must be finite"));
    }
    if env.delta_m >= cfg.mass {
        return Err(invalid("coefficients", "mass correction exceeds the bare mass"));
    }
    let spec = initial.spec;
    let max_dt = max_stable_dt(&spec, &env);
    let dt = match opts.dt {
        Some(d) => {
            let d = R::of(d);
            if !(d > R::zero()) {
                return Err(invalid("dt", "must be > 0"));
            }
            if d > max_dt {
                return Err(Error::CflViolation {
                    dt: d.f64(),
                    max_dt: max_dt.f64(),
                });
            }
            d
        }
        None => {
            let base = if cfg.omega0 > R::zero() {
                R::TAU() / cfg.omega0 / R::of(64.0)
            } else {
                (t_final / R::of(256.0)).max(R::of(1e-6))
            };
            base.min(R::of(0.9) * max_dt)
        }
    };
    let n_steps = if t_final == R::zero() {
        0
    } else {
        (t_final / dt - R::of(1e-9)).ceil().to_usize().unwrap_or(0).max(1)
    };
    let dt = if n_steps > 0 {
        t_final / R::of_usize(n_steps)
    } else {
        dt
    };

    let mut snap_times: Vec<R> = opts.snapshot_times.iter().map(|&t| R::of(t)).collect();
    snap_times.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut next_snap = 0;

    let mut stepper = Stepper::new(spec, cfg);
    let mut w = initial.values.clone();
    let as_grid = |v: &[R]| WignerGrid {
        spec,
        values: v.to_vec(),
    };
    let mut times = vec![R::zero()];
    let mut origin = vec![initial.origin()];
    let mut norm = vec![initial.norm()];
    let mut snapshots = Vec::new();
    let mut warnings = Vec::new();
    let mut max_leak = (initial.boundary_mass(opts.leakage_band), R::zero());
    let mut flagged = false;
    let mut check_leak = |g: &WignerGrid<R>, t: R, warnings: &mut Vec<String>| {
        let leak = g.boundary_mass(opts.leakage_band);
        if leak > max_leak.0 {
            max_leak = (leak, t);
        }
        if !flagged && leak.f64() > opts.leakage_threshold {
            flagged = true;
            let msg = format!(
                "boundary leakage {leak:e} exceeds {:e} at t = {t}",
                opts.leakage_threshold
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    };
    while next_snap < snap_times.len() && snap_times[next_snap] <= R::zero() {
        snapshots.push(Snapshot {
            time: R::zero(),
            grid: initial.clone(),
        });
        next_snap += 1;
    }
    let half = dt / R::of(2.0);
    for step in 0..n_steps {
        let t = R::of_usize(step) * dt;
        stepper.dissipate(&mut w, t, half, schedule);
        let dm = schedule.at(t + half).delta_m;
        stepper.hamiltonian(&mut w, dt, dm);
        stepper.dissipate(&mut w, t + half, half, schedule);
        let t1 = R::of_usize(step + 1) * dt;
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Unsupported(format!("non-finite Wigner values at t = {t1}")));
        }
        let g = as_grid(&w);
        times.push(t1);
        origin.push(g.origin());
        norm.push(g.norm());
        check_leak(&g, t1, &mut warnings);
        // snapshots land on the nearest step
        while next_snap < snap_times.len() && snap_times[next_snap] <= t1 + half {
            snapshots.push(Snapshot {
                time: t1,
                grid: g.clone(),
            });
            next_snap += 1;
        }
    }
    if next_snap < snap_times.len() {
        warnings.push(format!(
            "{} snapshot time(s) beyond t_final ignored",
            snap_times.len() - next_snap
        ));
    }
    Ok(Trajectory {
        times,
        origin,
        norm,
        snapshots,
        final_grid: as_grid(&w),
        dt,
        max_leakage: max_leak,
        warnings,
    })
}

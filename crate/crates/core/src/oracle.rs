//! Brute-force reference: the flat continuum replaced by a finite ladder of
//! levels, evolved directly in the rotating frame.
//!
//! The Hamiltonian is an arrowhead: the bound block A couples through
//! B√ΔE to one 2×2 block K_i = (E_i − E_L)·1 + A per level, and levels do
//! not couple to each other. Linear solves therefore cost O(n).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2, I, ZERO};
use crate::model::{bound_amplitudes, bound_block, continuum_amplitudes, coupling_adjoint, rabi_split, EffectiveSystem};
use crate::params::{InitialState, PhysicalParams};
use crate::roots::brent_min;
use crate::spectra::LongTimeSpectrum;

/// Window half-width as a multiple of the largest physical energy scale.
pub const WINDOW_FACTOR: f64 = 20.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedSystem {
    pub params: PhysicalParams,
    pub n_levels: usize,
    pub half_width: f64,
    pub spacing: f64,
    /// Level energies E_i, symmetric about E_L.
    pub energies: Vec<f64>,
    a: Mat2,
    /// H[c, d_i] = B√ΔE, identical for all levels.
    c_block: Mat2,
}

/// Largest energy scale the window must cover.
pub fn energy_scale(p: &PhysicalParams) -> f64 {
    let split = rabi_split(p);
    p.gamma_a()
        .max(p.direct_rate())
        .max(p.detuning().abs())
        .max(split.delta_xi)
}

pub fn discretize(p: &PhysicalParams, half_width: f64, n_levels: usize) -> Result<DiscretizedSystem> {
    if !p.is_finite() {
        return Err(Error::Domain("parameters must be finite".into()));
    }
    if n_levels < 3 || n_levels % 2 == 0 {
        return Err(Error::Domain(format!("n_levels must be odd and at least 3, got {n_levels}")));
    }
    let needed = WINDOW_FACTOR * energy_scale(p);
    if !(half_width.is_finite() && half_width > 0.0 && half_width >= needed) {
        return Err(Error::WindowTooNarrow(format!(
            "half-width {half_width} below {WINDOW_FACTOR} times the largest energy scale; use W >= {needed}"
        )));
    }
    let spacing = 2.0 * half_width / (n_levels - 1) as f64;
    let mid = (n_levels / 2) as f64;
    let energies = (0..n_levels).map(|i| p.e_l + (i as f64 - mid) * spacing).collect();
    let b = coupling_adjoint(p).adjoint();
    Ok(DiscretizedSystem {
        params: *p,
        n_levels,
        half_width,
        spacing,
        energies,
        a: bound_block(p),
        c_block: b.scale(C64::new(spacing.sqrt(), 0.0)),
    })
}

impl DiscretizedSystem {
    pub fn dim(&self) -> usize {
        2 + 2 * self.n_levels
    }

    /// Discretization revival time 2π/ΔE.
    pub fn revival_time(&self) -> f64 {
        2.0 * PI / self.spacing
    }

    fn level_block(&self, i: usize) -> Mat2 {
        let shift = C64::new(self.energies[i] - self.params.e_l, 0.0);
        self.a + Mat2::identity().scale(shift)
    }

    /// Dense Hamiltonian in the order (c00, c10, d0[..], d1[..]).
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.n_levels;
        let dim = self.dim();
        let mut h = vec![vec![ZERO; dim]; dim];
        let idx = |j: usize, i: usize| 2 + j * n + i;
        for r in 0..2 {
            for c in 0..2 {
                h[r][c] = self.a[(r, c)];
            }
        }
        let cd = self.c_block.adjoint();
        for i in 0..n {
            let k = self.level_block(i);
            for r in 0..2 {
                for c in 0..2 {
                    h[r][idx(c, i)] = self.c_block[(r, c)];
                    h[idx(r, i)][c] = cd[(r, c)];
                    h[idx(r, i)][idx(c, i)] = k[(r, c)];
                }
            }
        }
        h
    }

    pub fn is_hermitian(&self) -> bool {
        let h = self.to_dense();
        (0..h.len()).all(|r| (0..h.len()).all(|c| h[r][c] == h[c][r].conj()))
    }

    /// Golden-rule rate π Σ_i |g_i|² L(E_i) of bound state `channel` decaying
    /// into continuum sector `sector`, with L a normalized Lorentzian of
    /// half-width `width` centred at E_L.
    pub fn golden_rule_rate(&self, channel: usize, sector: usize, width: f64) -> f64 {
        let g2 = self.c_block[(channel, sector)].norm_sqr();
        let e_l = self.params.e_l;
        PI * self
            .energies
            .iter()
            .map(|e| g2 * width / PI / ((e - e_l).powi(2) + width * width))
            .sum::<f64>()
    }

    /// State vector for a bound initial condition with an empty continuum.
    pub fn initial_state(&self, c0: &InitialState) -> Vec<C64> {
        let mut x = vec![ZERO; self.dim()];
        x[0] = c0.c00;
        x[1] = c0.c10;
        x
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let n = self.n_levels;
        let c = Vec2::new(x[0], x[1]);
        let cd = self.c_block.adjoint();
        let top = self.a.mul_vec(&c);
        let mut acc = top;
        let shifted = cd.mul_vec(&c);
        for i in 0..n {
            let d = Vec2::new(x[2 + i], x[2 + n + i]);
            acc = acc + self.c_block.mul_vec(&d);
            let dk = self.level_block(i).mul_vec(&d) + shifted;
            out[2 + i] = dk[0];
            out[2 + n + i] = dk[1];
        }
        out[0] = acc[0];
        out[1] = acc[1];
    }

    /// Solves (H + σ)x = r by eliminating the level blocks.
    fn shifted_solve(&self, sigma: C64, r: &[C64], x: &mut [C64]) -> Result<()> {
        let n = self.n_levels;
        let cd = self.c_block.adjoint();
        let mut schur = self.a + Mat2::identity().scale(sigma);
        let mut rhs = Vec2::new(r[0], r[1]);
        let mut inv = Vec::with_capacity(n);
        for i in 0..n {
            let g = (self.level_block(i) + Mat2::identity().scale(sigma))
                .inverse()
                .ok_or_else(|| Error::Integration("singular level block in implicit step".into()))?;
            let cg = self.c_block * g;
            schur = schur - cg * cd;
            rhs = rhs - cg.mul_vec(&Vec2::new(r[2 + i], r[2 + n + i]));
            inv.push(g);
        }
        let c = schur
            .inverse()
            .ok_or_else(|| Error::Integration("singular Schur complement in implicit step".into()))?
            .mul_vec(&rhs);
        let back = cd.mul_vec(&c);
        for (i, g) in inv.iter().enumerate() {
            let d = g.mul_vec(&(Vec2::new(r[2 + i], r[2 + n + i]) - back));
            x[2 + i] = d[0];
            x[2 + n + i] = d[1];
        }
        x[0] = c[0];
        x[1] = c[1];
        Ok(())
    }

    /// One Padé(2,2) step of exp(−iHh), applied as two unitary factors
    /// (1 + z/ρ)/(1 − z/ρ̄) and (1 + z/ρ̄)/(1 − z/ρ), z = −iHh, ρ = 3 + i√3.
    fn pade_step(&self, x: &[C64], h: f64, out: &mut Vec<C64>) -> Result<()> {
        let rho = C64::new(3.0, 3f64.sqrt());
        let mut y = x.to_vec();
        let mut hy = vec![ZERO; x.len()];
        let mut r = vec![ZERO; x.len()];
        for (num, den) in [(rho, rho.conj()), (rho.conj(), rho)] {
            // (1 + iHh/den) x' = (1 − iHh/num) y
            self.apply(&y, &mut hy);
            let f = I * h / num;
            for k in 0..y.len() {
                r[k] = y[k] - f * hy[k];
            }
            let sigma = den / (I * h);
            for v in r.iter_mut() {
                *v *= sigma;
            }
            self.shifted_solve(sigma, &r, out)?;
            y.copy_from_slice(out);
        }
        Ok(())
    }

    pub fn bound(&self, x: &[C64]) -> Vec2 {
        Vec2::new(x[0], x[1])
    }

    /// Continuum densities |d_j(E_i)|² = |x_{j,i}|²/ΔE.
    pub fn densities(&self, x: &[C64]) -> Vec<[f64; 2]> {
        let n = self.n_levels;
        (0..n)
            .map(|i| [x[2 + i].norm_sqr() / self.spacing, x[2 + n + i].norm_sqr() / self.spacing])
            .collect()
    }

    /// Continuum amplitudes d_j(E_i) = x_{j,i}/√ΔE.
    pub fn amplitudes(&self, x: &[C64], i: usize) -> Vec2 {
        let s = 1.0 / self.spacing.sqrt();
        Vec2::new(x[2 + i] * s, x[2 + self.n_levels + i] * s)
    }

    /// Continuum population with the neighbor in state j.
    pub fn sector_population(&self, x: &[C64], j: usize) -> f64 {
        let n = self.n_levels;
        x[2 + j * n..2 + (j + 1) * n].iter().map(|v| v.norm_sqr()).sum()
    }
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Local error allowed per unit time (step doubling estimate).
    pub tol: f64,
    /// Initial and largest step.
    pub max_step: f64,
    /// Number of uniform sampling intervals on [0, t_final].
    pub samples: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            tol: 1e-7,
            max_step: 0.05,
            samples: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub max_norm_drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

/// Integrates i dx/dt = Hx from x(0) = `x0`, sampling on a uniform grid.
pub fn evolve(sys: &DiscretizedSystem, x0: &[C64], t_final: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::Domain(format!("t_final must be finite and non-negative, got {t_final}")));
    }
    let revival = sys.revival_time();
    if t_final >= revival {
        return Err(Error::RecurrenceTime { t_final, revival });
    }
    if x0.len() != sys.dim() {
        return Err(Error::Domain(format!("state has {} entries, expected {}", x0.len(), sys.dim())));
    }
    if !(opts.tol > 0.0 && opts.max_step > 0.0 && opts.samples > 0) {
        return Err(Error::Domain("evolve options must be positive".into()));
    }
    let n0 = norm(x0);
    let mut x = x0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut t = 0.0;
    let mut h = opts.max_step;
    let mut steps = 0;
    let mut rejected = 0;
    let mut max_drift: f64 = 0.0;
    let (mut full, mut half, mut two) = (Vec::new(), Vec::new(), Vec::new());
    full.resize(x.len(), ZERO);
    half.resize(x.len(), ZERO);
    two.resize(x.len(), ZERO);

    for s in 1..=opts.samples {
        let target = t_final * s as f64 / opts.samples as f64;
        while t < target {
            let step = h.min(target - t);
            sys.pade_step(&x, step, &mut full)?;
            sys.pade_step(&x, 0.5 * step, &mut half)?;
            sys.pade_step(&half, 0.5 * step, &mut two)?;
            let diff: f64 = full.iter().zip(&two).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() / 15.0;
            let allowed = opts.tol * step;
            if diff <= allowed || step < 1e-12 {
                // Richardson-free: keep the two half steps, which stay unitary.
                std::mem::swap(&mut x, &mut two);
                t += step;
                steps += 1;
                max_drift = max_drift.max((norm(&x) - n0).abs());
                if diff > 0.0 {
                    let grow = 0.9 * (allowed / diff).powf(0.25);
                    h = (step * grow.clamp(0.2, 2.0)).min(opts.max_step);
                } else {
                    h = (2.0 * step).min(opts.max_step);
                }
            } else {
                rejected += 1;
                h = step * (0.9 * (allowed / diff).powf(0.25)).clamp(0.1, 0.5);
            }
        }
        t = target;
        times.push(target);
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        max_norm_drift: max_drift,
        steps,
        rejected,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    /// Largest |  |c_j|²(analytic) − |c_j|²(oracle) | over samples and j.
    pub max_err_c: f64,
    /// RMS over levels and j of the density error |d_j(E_i, t)|², at t_final.
    pub rms_err_d: f64,
    /// RMS error of Σ_j|d_j|² against the long-time spectrum, when t_final
    /// reaches 20/min|Im Λ|.
    pub rms_err_spectrum: Option<f64>,
    pub t_final: f64,
    pub n_levels: usize,
    pub max_norm_drift: f64,
}

/// Slowest decay rate among poles that carry weight.
pub fn slowest_decay(sys: &EffectiveSystem, c0: &InitialState) -> f64 {
    sys.pole_terms(c0)
        .iter()
        .filter(|t| t.weight.norm_sqr() > 0.0)
        .map(|t| -t.pole.im)
        .fold(f64::INFINITY, f64::min)
}

/// Runs the oracle on `disc` and scores the analytic solution against it.
pub fn compare(
    disc: &DiscretizedSystem,
    analytic: &EffectiveSystem,
    c0: &InitialState,
    t_final: f64,
    opts: &EvolveOptions,
) -> Result<CompareReport> {
    if disc.params != analytic.params {
        return Err(Error::Domain("oracle and analytic sides use different parameters".into()));
    }
    let traj = evolve(disc, &disc.initial_state(c0), t_final, opts)?;
    compare_trajectory(disc, analytic, c0, &traj)
}

pub fn compare_trajectory(
    disc: &DiscretizedSystem,
    analytic: &EffectiveSystem,
    c0: &InitialState,
    traj: &Trajectory,
) -> Result<CompareReport> {
    let mut max_err_c: f64 = 0.0;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let c = bound_amplitudes(analytic, c0, *t)?;
        for j in 0..2 {
            max_err_c = max_err_c.max((c[j].norm_sqr() - x[j].norm_sqr()).abs());
        }
    }
    let t_final = *traj.times.last().unwrap();
    let x = traj.states.last().unwrap();
    let dens = disc.densities(x);
    let mut sq = 0.0;
    for (i, e) in disc.energies.iter().enumerate() {
        let d = continuum_amplitudes(analytic, c0, *e, t_final)?;
        for j in 0..2 {
            sq += (d[j].norm_sqr() - dens[i][j]).powi(2);
        }
    }
    let rms_err_d = (sq / (2 * disc.n_levels) as f64).sqrt();

    let rate = slowest_decay(analytic, c0);
    let rms_err_spectrum = if rate.is_finite() && rate > 0.0 && t_final >= 20.0 / rate {
        let lt = LongTimeSpectrum::new(analytic, c0)?;
        let sq: f64 = disc
            .energies
            .iter()
            .zip(&dens)
            .map(|(e, d)| (lt.total_intensity(*e) - d[0] - d[1]).powi(2))
            .sum();
        Some((sq / disc.n_levels as f64).sqrt())
    } else {
        None
    };
    Ok(CompareReport {
        max_err_c,
        rms_err_d,
        rms_err_spectrum,
        t_final,
        n_levels: disc.n_levels,
        max_norm_drift: traj.max_norm_drift,
    })
}

/// Per-level densities averaged over [t_start, t_start + period] by the
/// trapezoid rule on the trajectory samples.
pub fn time_average(disc: &DiscretizedSystem, traj: &Trajectory, t_start: f64, period: f64) -> Result<Vec<[f64; 2]>> {
    let t_end = t_start + period;
    let idx: Vec<usize> = (0..traj.times.len())
        .filter(|&k| traj.times[k] >= t_start - 1e-12 && traj.times[k] <= t_end + 1e-12)
        .collect();
    if idx.len() < 3 {
        return Err(Error::Domain("too few samples inside the averaging window".into()));
    }
    let mut acc = vec![[0.0; 2]; disc.n_levels];
    let mut span = 0.0;
    for w in idx.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dt = traj.times[b] - traj.times[a];
        span += dt;
        let (da, db) = (disc.densities(&traj.states[a]), disc.densities(&traj.states[b]));
        for i in 0..disc.n_levels {
            for j in 0..2 {
                acc[i][j] += 0.5 * dt * (da[i][j] + db[i][j]);
            }
        }
    }
    for v in acc.iter_mut() {
        v[0] /= span;
        v[1] /= span;
    }
    Ok(acc)
}

/// Least-squares angular frequency of a + b cos ωt + c sin ωt within
/// [w_lo, w_hi]: a coarse scan followed by Brent minimization.
pub fn fit_frequency(times: &[f64], signal: &[f64], w_lo: f64, w_hi: f64) -> Result<f64> {
    if times.len() != signal.len() || times.len() < 4 {
        return Err(Error::Domain("need at least four matching samples".into()));
    }
    if !(w_lo > 0.0 && w_hi > w_lo) {
        return Err(Error::Domain(format!("bad frequency range [{w_lo}, {w_hi}]")));
    }
    let residual = |w: f64| -> f64 {
        // Normal equations for the basis (1, cos, sin).
        let mut m = [[0.0; 3]; 3];
        let mut v = [0.0; 3];
        for (t, y) in times.iter().zip(signal) {
            let b = [1.0, (w * t).cos(), (w * t).sin()];
            for r in 0..3 {
                v[r] += b[r] * y;
                for c in 0..3 {
                    m[r][c] += b[r] * b[c];
                }
            }
        }
        let coef = match solve3(m, v) {
            Some(c) => c,
            None => return f64::INFINITY,
        };
        times
            .iter()
            .zip(signal)
            .map(|(t, y)| {
                let f = coef[0] + coef[1] * (w * t).cos() + coef[2] * (w * t).sin();
                (y - f).powi(2)
            })
            .sum()
    };
    let n = 400;
    let step = (w_hi - w_lo) / n as f64;
    let (mut best_w, mut best) = (w_lo, f64::INFINITY);
    for i in 0..=n {
        let w = w_lo + step * i as f64;
        let r = residual(w);
        if r < best {
            best = r;
            best_w = w;
        }
    }
    let (w, _) = brent_min(residual, (best_w - step).max(w_lo), (best_w + step).min(w_hi), 1e-10 * w_hi, 200);
    Ok(w)
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    Some(x)
}

//! Long-time photoelectron spectra and their Rabi-oscillating decomposition.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2, ZERO};
use crate::model::{lorentzian_overlap, EffectiveSystem};
use crate::params::{InitialState, NormalizedParams};
use crate::quad;

/// Long-time components d^{ξ₁}(E), d^{ξ₂}(E) with the e^{i(ξ_k−E)t} phase removed.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongTimeAmplitudes {
    pub e: f64,
    pub d_xi1: Vec2,
    pub d_xi2: Vec2,
    pub xi1: f64,
    pub xi2: f64,
}

impl LongTimeAmplitudes {
    /// d^{lt}(E, t) = Σ_k d^{ξ_k}(E) e^{i(ξ_k−E)t}.
    pub fn at_time(&self, t: f64) -> Vec2 {
        let p1 = C64::new(0.0, (self.xi1 - self.e) * t).exp();
        let p2 = C64::new(0.0, (self.xi2 - self.e) * t).exp();
        self.d_xi1.scale(p1) + self.d_xi2.scale(p2)
    }
}

/// Pole representation of the long-time spectrum.
///
/// Because K_k = u_k u_k† is a rank-one projector, each component factorises as
/// d^{ξ_k}_j(E) = (u_k)_j · S_k(E) with S_k(E) = Σ_l s_{kl}/(E − Λ_l − ξ_k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongTimeSpectrum {
    pub xi: [f64; 2],
    pub delta_xi: f64,
    /// Orthonormal eigenvectors of the bound block, u₂ = (−u₁,₁*, u₁,₀*).
    pub u: [Vec2; 2],
    pub s: [[C64; 2]; 2],
    pub poles: [[C64; 2]; 2],
}

impl LongTimeSpectrum {
    pub fn new(sys: &EffectiveSystem, c0: &InitialState) -> Result<Self> {
        let k1 = sys.k1;
        let (c0v, c1v) = (k1.column(0), k1.column(1));
        let col = if c0v.norm_sqr() >= c1v.norm_sqr() { c0v } else { c1v };
        let u1 = col.scale(C64::new(1.0 / col.norm_sqr().sqrt(), 0.0));
        let u2 = Vec2::new(-u1[1].conj(), u1[0].conj());
        let u = [u1, u2];

        let v = sys.p_inv.mul_vec(&c0.as_vec());
        let bp = sys.b_dag * sys.p;
        let mut s = [[ZERO; 2]; 2];
        let mut poles = [[ZERO; 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                let col = bp.column(l);
                let proj = u[k][0].conj() * col[0] + u[k][1].conj() * col[1];
                s[k][l] = proj * v[l];
                poles[k][l] = sys.pole(k, l);
                if s[k][l] != ZERO && poles[k][l].im >= 0.0 {
                    return Err(Error::NoLongTimeLimit(format!(
                        "eigenvalue {} has no decay but carries weight",
                        sys.lambda(l)
                    )));
                }
            }
        }
        Ok(LongTimeSpectrum {
            xi: [sys.xi1, sys.xi2],
            delta_xi: sys.delta_xi,
            u,
            s,
            poles,
        })
    }

    /// S_k(E).
    pub fn scalar(&self, k: usize, e: f64) -> C64 {
        let mut acc = ZERO;
        for l in 0..2 {
            if self.s[k][l] != ZERO {
                acc += self.s[k][l] / (e - self.poles[k][l]);
            }
        }
        acc
    }

    /// d^{ξ_k}_j(E).
    pub fn component(&self, k: usize, j: usize, e: f64) -> C64 {
        self.u[k][j] * self.scalar(k, e)
    }

    /// Weight matrix [D_k]_{jl} = (u_k)_j s_{kl}.
    pub fn weight_matrix(&self, k: usize) -> Mat2 {
        let (u, s) = (self.u[k], self.s[k]);
        Mat2::new(u[0] * s[0], u[0] * s[1], u[1] * s[0], u[1] * s[1])
    }

    pub fn amplitudes(&self, e: f64) -> LongTimeAmplitudes {
        let (s1, s2) = (self.scalar(0, e), self.scalar(1, e));
        LongTimeAmplitudes {
            e,
            d_xi1: self.u[0].scale(s1),
            d_xi2: self.u[1].scale(s2),
            xi1: self.xi[0],
            xi2: self.xi[1],
        }
    }

    /// I^{lt}(E) = |S₁|² + |S₂|² (the eigenvectors are unit vectors).
    pub fn total_intensity(&self, e: f64) -> f64 {
        self.scalar(0, e).norm_sqr() + self.scalar(1, e).norm_sqr()
    }

    fn terms(&self, k: usize) -> Vec<(C64, C64)> {
        (0..2)
            .filter(|&l| self.s[k][l] != ZERO)
            .map(|l| (self.s[k][l], self.poles[k][l]))
            .collect()
    }

    /// ∫I^{lt} dE by residues.
    pub fn analytic_norm(&self) -> f64 {
        (0..2)
            .map(|k| {
                let t = self.terms(k);
                lorentzian_overlap(&t, &t).re
            })
            .sum()
    }

    /// Break points at every weighted pole: centre and a few half-widths out.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::new();
        for k in 0..2 {
            for l in 0..2 {
                if self.s[k][l] == ZERO {
                    continue;
                }
                let z = self.poles[k][l];
                let w = z.im.abs();
                for m in [-30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0] {
                    b.push(z.re + m * w);
                }
            }
        }
        b
    }

    /// ∫I^{lt} dE by adaptive quadrature over the real line.
    pub fn quadrature_norm(&self) -> Result<f64> {
        let reference = self.analytic_norm().abs().max(f64::MIN_POSITIVE);
        let q = quad::integrate_real_line_with_breaks(
            |e| self.total_intensity(e),
            &self.breakpoints(),
            1e-11 * reference,
            1e-11,
        )?;
        Ok(q.value)
    }

    /// ∫ over [e_min, e_max] of I^{lt}, as a fraction of the full integral.
    pub fn window_fraction(&self, e_min: f64, e_max: f64) -> Result<f64> {
        let total = self.analytic_norm();
        if total <= 0.0 {
            return Ok(1.0);
        }
        let mut b: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .filter(|x| *x > e_min && *x < e_max)
            .collect();
        b.push(e_min);
        b.push(e_max);
        b.sort_by(f64::total_cmp);
        b.dedup();
        let mut inside = 0.0;
        for w in b.windows(2) {
            inside += quad::integrate(|e| self.total_intensity(e), w[0], w[1], 1e-12 * total, 1e-10, 2000)?.value;
        }
        Ok(inside / total)
    }
}

pub fn longtime_amplitudes(sys: &EffectiveSystem, c0: &InitialState, e: f64) -> Result<LongTimeAmplitudes> {
    Ok(LongTimeSpectrum::new(sys, c0)?.amplitudes(e))
}

/// Steady, oscillating and phase parts of the conditional spectra at one E.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDecomposition {
    pub i_st: [f64; 2],
    /// Common oscillation magnitude (taken from spectrum 0).
    pub i_osc: f64,
    /// Oscillation magnitudes computed separately for each spectrum.
    pub i_osc_each: [f64; 2],
    pub phi: [f64; 2],
}

fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

pub fn decompose_intensity(lta: &LongTimeAmplitudes) -> PointDecomposition {
    let mut i_st = [0.0; 2];
    let mut i_osc_each = [0.0; 2];
    let mut phi = [0.0; 2];
    for j in 0..2 {
        let (a, b) = (lta.d_xi1[j], lta.d_xi2[j]);
        i_st[j] = a.norm_sqr() + b.norm_sqr();
        i_osc_each[j] = 2.0 * a.norm() * b.norm();
        phi[j] = principal_arg(a * b.conj());
    }
    PointDecomposition {
        i_st,
        i_osc: i_osc_each[0],
        i_osc_each,
        phi,
    }
}

/// Long-time spectrum on an energy grid, normalized to unit area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub grid: Vec<f64>,
    pub i_st0: Vec<f64>,
    pub i_st1: Vec<f64>,
    pub i_osc: Vec<f64>,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub i_lt: Vec<f64>,
    pub delta_xi: f64,
    /// Raw ∫I^{lt}dE that every intensity was divided by.
    pub normalization: f64,
    /// Fraction of the spectrum inside the grid window.
    pub window_fraction: f64,
    /// Set when the window holds less than 99% of the spectrum.
    pub narrow_window: bool,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub const WINDOW_COVERAGE: f64 = 0.99;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
}

fn check_grid(e_min: f64, e_max: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 grid points, got {n}")));
    }
    if !(e_min.is_finite() && e_max.is_finite()) || e_min >= e_max {
        return Err(Error::Domain(format!("invalid energy range [{e_min}, {e_max}]")));
    }
    Ok(())
}

/// Normalization constant checked two ways: residues and quadrature.
pub fn checked_normalization(lt: &LongTimeSpectrum) -> Result<f64> {
    let analytic = lt.analytic_norm();
    if !(analytic > 0.0) {
        return Err(Error::Domain("spectrum vanishes identically (no pump?)".into()));
    }
    let numeric = lt.quadrature_norm()?;
    if ((numeric - analytic) / analytic).abs() > 1e-8 {
        return Err(Error::Integration(format!(
            "residue norm {analytic:e} and quadrature norm {numeric:e} disagree"
        )));
    }
    Ok(analytic)
}

/// Decomposes a long-time spectrum on the given energies, dividing by `norm`.
pub fn decompose_on_grid(lt: &LongTimeSpectrum, grid: Vec<f64>, norm: f64) -> SpectralDecomposition {
    let points: Vec<PointDecomposition> = grid
        .par_iter()
        .map(|&e| decompose_intensity(&lt.amplitudes(e)))
        .collect();
    let r = 1.0 / norm;
    let n = grid.len();
    let mut dec = SpectralDecomposition {
        grid,
        i_st0: Vec::with_capacity(n),
        i_st1: Vec::with_capacity(n),
        i_osc: Vec::with_capacity(n),
        phi0: Vec::with_capacity(n),
        phi1: Vec::with_capacity(n),
        i_lt: Vec::with_capacity(n),
        delta_xi: lt.delta_xi,
        normalization: norm,
        window_fraction: 1.0,
        narrow_window: false,
    };
    for p in points {
        dec.i_st0.push(p.i_st[0] * r);
        dec.i_st1.push(p.i_st[1] * r);
        dec.i_osc.push(p.i_osc * r);
        dec.phi0.push(p.phi[0]);
        dec.phi1.push(p.phi[1]);
        dec.i_lt.push((p.i_st[0] + p.i_st[1]) * r);
    }
    dec
}

/// Normalized long-time decomposition of the neighbor model on a uniform grid.
pub fn spectrum_grid(params: &NormalizedParams, e_min: f64, e_max: f64, n_points: usize) -> Result<SpectralDecomposition> {
    check_grid(e_min, e_max, n_points)?;
    if params.gamma_b != 0.0 || params.q_b != 0.0 {
        return Err(Error::Domain(
            "spectrum_grid evaluates the neighbor model; use the Fano reference for q_b, gamma_b".into(),
        ));
    }
    let sys = EffectiveSystem::new(params.to_physical()?)?;
    let lt = LongTimeSpectrum::new(&sys, &InitialState::ground())?;
    let norm = checked_normalization(&lt)?;
    let mut dec = decompose_on_grid(&lt, linspace(e_min, e_max, n_points), norm);
    dec.window_fraction = lt.window_fraction(e_min, e_max)?;
    dec.narrow_window = dec.window_fraction < WINDOW_COVERAGE;
    Ok(dec)
}

/// Default grid: 2001 points over (E−E_a)/γ ∈ [−10, 10], doubled in width
/// (at fixed spacing) until the window holds 99% of the spectrum.
pub fn default_window(params: &NormalizedParams) -> Result<(f64, f64, usize)> {
    let gamma = if params.gamma_a > 0.0 {
        params.gamma_a
    } else if params.gamma_b > 0.0 {
        params.gamma_b
    } else {
        1.0
    };
    let center = params.e_a;
    let mut half = 10.0 * gamma;
    let mut n = 2001;
    if params.gamma_b != 0.0 || params.q_b != 0.0 {
        return Ok((center - half, center + half, n));
    }
    let sys = EffectiveSystem::new(params.to_physical()?)?;
    let lt = LongTimeSpectrum::new(&sys, &InitialState::ground())?;
    for _ in 0..12 {
        if lt.window_fraction(center - half, center + half)? >= WINDOW_COVERAGE {
            break;
        }
        half *= 2.0;
        n = 2 * n - 1;
    }
    Ok((center - half, center + half, n))
}

/// Conditional intensities I^{lt}_j(E, t) = I^{st}_j + I^{osc} cos(δξ t − φ_j).
pub fn time_resolved_intensity(dec: &SpectralDecomposition, index: usize, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and non-negative, got {t}")));
    }
    if index >= dec.len() {
        return Err(Error::Domain(format!("index {index} outside grid of {} points", dec.len())));
    }
    let w = dec.delta_xi * t;
    let osc = dec.i_osc[index];
    let i0 = dec.i_st0[index] + osc * (w - dec.phi0[index]).cos();
    let i1 = dec.i_st1[index] + osc * (w - dec.phi1[index]).cos();
    Ok((i0.max(0.0), i1.max(0.0)))
}

/// Local maxima above 1% of the global maximum after 3-point smoothing.
pub fn find_peaks(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let mut smooth = vec![0.0; n];
    for i in 0..n {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(n - 1);
        smooth[i] = values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
    }
    let max = smooth.iter().copied().fold(f64::MIN, f64::max);
    let threshold = 0.01 * max;
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if smooth[i] > smooth[i - 1] && smooth[i] >= threshold {
            // Walk over a plateau.
            let mut j = i;
            while j + 1 < n && smooth[j + 1] == smooth[i] {
                j += 1;
            }
            if j + 1 < n && smooth[j + 1] < smooth[i] {
                peaks.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Which model a preset evaluates.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetModel {
    Neighbor,
    Fano,
}

/// What a preset produces.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetKind {
    /// Total spectra for several pump strengths.
    Spectra,
    /// Steady/oscillating decomposition at one pump strength.
    Decomposition,
    /// Dynamical-zero traces versus Ω.
    ZeroSweep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigurePreset {
    pub name: String,
    pub model: PresetModel,
    pub kind: PresetKind,
    /// Parameters with Ω set to the first entry of `omegas`.
    pub params: NormalizedParams,
    pub omegas: Vec<f64>,
    /// Plot window in units of (E − E_a)/γ.
    pub reduced_window: (f64, f64),
    pub n_points: usize,
}

pub const PRESET_NAMES: [&str; 11] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5", "fig6a", "fig6b", "fig6c", "fig7a", "fig7b",
];

impl FigurePreset {
    pub fn variant(&self, omega: f64) -> NormalizedParams {
        self.params.with_omega(omega)
    }

    /// Energy window for this preset.
    pub fn window(&self) -> (f64, f64) {
        let g = match self.model {
            PresetModel::Neighbor => self.params.gamma_a,
            PresetModel::Fano => self.params.gamma_b,
        };
        let c = self.params.e_a;
        (c + g * self.reduced_window.0, c + g * self.reduced_window.1)
    }
}

/// Default Ω grid for zero sweeps: ±[0.001, 4] in steps of 0.02, Ω = 0 excluded.
pub fn default_sweep_omegas() -> Vec<f64> {
    let pos: Vec<f64> = std::iter::once(0.001)
        .chain((1..=200).map(|i| 0.02 * i as f64))
        .collect();
    let mut all: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    all.extend(pos);
    all
}

pub fn figure_preset(name: &str) -> Result<FigurePreset> {
    let key = name.trim().to_ascii_lowercase();
    let neighbor = |q, g, om: &[f64], el| NormalizedParams::neighbor(q, g, om[0], 1.0, el);
    let fano = |q, g, om: &[f64]| NormalizedParams::fano(q, g, om[0], 1.0, 1.0);
    let make = |model, kind, params: NormalizedParams, omegas: &[f64], window| FigurePreset {
        name: key.clone(),
        model,
        kind,
        params,
        omegas: omegas.to_vec(),
        reduced_window: window,
        n_points: 2001,
    };
    use PresetKind::*;
    use PresetModel::*;
    let wide = (-10.0, 10.0);
    let preset = match key.as_str() {
        "fig2a" => make(Fano, Spectra, fano(100.0, 1.0, &[1.0]), &[1.0, 2.0, 4.0], wide),
        "fig2b" => make(Neighbor, Spectra, neighbor(100.0, 1.0, &[1.0], 1.0), &[1.0, 2.0, 4.0], wide),
        "fig3a" => make(Fano, Spectra, fano(1.0, 1.0, &[0.5]), &[0.5, 1.0, 2.0], wide),
        "fig3b" => make(Neighbor, Spectra, neighbor(1.0, 1.0, &[0.5], 1.0), &[0.5, 1.0, 2.0], wide),
        "fig4" => make(Neighbor, Decomposition, neighbor(1.0, 1.0, &[2.0], 0.8), &[2.0], wide),
        "fig5" => make(
            Neighbor,
            Spectra,
            neighbor(100.0, 1e-4, &[5e-5], 1.0),
            &[5e-5, 1e-4, 5e-4],
            wide,
        ),
        "fig6a" | "fig6b" | "fig6c" => {
            let q = match key.as_str() {
                "fig6a" => 0.1,
                "fig6b" => 1.0,
                _ => 3.0,
            };
            let om = default_sweep_omegas();
            make(Neighbor, ZeroSweep, neighbor(q, 1.0, &om, 1.0), &om, (-12.0, 12.0))
        }
        "fig7a" | "fig7b" => {
            let el = if key == "fig7a" { 0.8 } else { 1.1 };
            let om = default_sweep_omegas();
            make(Neighbor, ZeroSweep, neighbor(1.0, 1.0, &om, el), &om, (-12.0, 12.0))
        }
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(preset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::continuum_ground;

    fn fig4() -> EffectiveSystem {
        EffectiveSystem::new(NormalizedParams::neighbor(1.0, 1.0, 2.0, 1.0, 0.8).to_physical().unwrap()).unwrap()
    }

    #[test]
    fn weight_matrices_match_model() {
        let sys = fig4();
        let lt = LongTimeSpectrum::new(&sys, &InitialState::ground()).unwrap();
        for k in 0..2 {
            assert!(lt.weight_matrix(k).max_abs_diff(sys.d(k)) < 1e-14);
        }
    }

    #[test]
    fn long_time_reconstruction() {
        let sys = fig4();
        let lt = LongTimeSpectrum::new(&sys, &InitialState::ground()).unwrap();
        let decay = sys.lambda1.im.abs().min(sys.lambda2.im.abs());
        let t = 50.0 / decay;
        for &e in &[-2.0, 0.2, 0.9, 1.7] {
            let a = lt.amplitudes(e).at_time(t);
            let b = continuum_ground(&sys, e, t);
            assert!(a.max_abs_diff(&b) < 1e-6);
        }
    }

    #[test]
    fn zero_pump_is_dark() {
        let p = NormalizedParams::neighbor(1.0, 1.0, 0.0, 1.0, 0.8).to_physical().unwrap();
        let sys = EffectiveSystem::new(p).unwrap();
        let lt = LongTimeSpectrum::new(&sys, &InitialState::ground()).unwrap();
        for &e in &[-1.0, 0.8, 1.0, 3.0] {
            assert_eq!(lt.total_intensity(e), 0.0);
        }
    }

    #[test]
    fn norms_agree() {
        let sys = fig4();
        let lt = LongTimeSpectrum::new(&sys, &InitialState::ground()).unwrap();
        let a = lt.analytic_norm();
        assert!((a - 1.0).abs() < 1e-12, "{a}");
        assert!((lt.quadrature_norm().unwrap() - a).abs() < 1e-9);
    }

    #[test]
    fn peaks_simple() {
        let x: Vec<f64> = (0..401).map(|i| -4.0 + 0.02 * i as f64).collect();
        let lor = |x: f64, c: f64, w: f64| w * w / ((x - c).powi(2) + w * w);
        let v: Vec<f64> = x.iter().map(|&x| lor(x, -2.0, 0.2) + 2.0 * lor(x, 1.0, 0.3) + 1e-3 * lor(x, 3.0, 0.1)).collect();
        let peaks = find_peaks(&v);
        assert_eq!(peaks.len(), 2);
        assert!((x[peaks[0]] + 2.0).abs() < 0.03 && (x[peaks[1]] - 1.0).abs() < 0.03);
    }

    #[test]
    fn presets() {
        let p = figure_preset("fig4").unwrap();
        assert_eq!((p.params.q_a, p.params.gamma_a, p.params.omega, p.params.e_a, p.params.e_l), (1.0, 1.0, 2.0, 1.0, 0.8));
        let p = figure_preset("fig5").unwrap();
        assert_eq!(p.omegas, vec![5e-5, 1e-4, 5e-4]);
        assert_eq!(p.params.gamma_a, 1e-4);
        let p = figure_preset("fig2a").unwrap();
        assert_eq!((p.params.q_b, p.params.gamma_b), (100.0, 1.0));
        assert!(matches!(figure_preset("fig9"), Err(Error::UnknownPreset(_))));
        for name in PRESET_NAMES {
            assert!(figure_preset(name).is_ok());
        }
    }

    #[test]
    fn sweep_grid_excludes_zero() {
        let om = default_sweep_omegas();
        assert!(om.iter().all(|x| *x != 0.0));
        assert!(om.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*om.last().unwrap(), 4.0);
    }
}

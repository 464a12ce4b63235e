//! Standard Fano model: one auto-ionizing level |1⟩_b coupled by V to a flat
//! continuum, with direct ionization μ from |0⟩_b, pumped at E_L.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{principal_sqrt, Mat2, I, ONE, ZERO};
use crate::model::{eigen_decompose, lorentzian_overlap};
use crate::params::NormalizedParams;
use crate::quad;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanoParams {
    pub e_b: f64,
    pub mu_b: C64,
    pub v: C64,
    pub mu: C64,
    pub alpha: C64,
    pub e_l: f64,
}

impl FanoParams {
    /// Gauge μ = 1, V = √(γ_b/π), μ_b = q_b π V, α_L real with the sign of Ω.
    pub fn from_normalized(p: &NormalizedParams) -> Result<Self> {
        let reference = NormalizedParams::fano(p.q_b, p.gamma_b, p.omega, p.e_b, p.e_l);
        let alpha = reference.pump_amplitude()?;
        let v = (p.gamma_b / PI).sqrt();
        Ok(FanoParams {
            e_b: p.e_b,
            mu_b: C64::new(p.q_b * PI * v, 0.0),
            v: C64::new(v, 0.0),
            mu: ONE,
            alpha: C64::new(alpha, 0.0),
            e_l: p.e_l,
        })
    }

    pub fn gamma_b(&self) -> f64 {
        PI * self.v.norm_sqr()
    }

    /// q_b = μ_b/(πμV*).
    pub fn q_b(&self) -> C64 {
        self.mu_b / (PI * self.mu * self.v.conj())
    }

    pub fn detuning(&self) -> f64 {
        self.e_b - self.e_l
    }

    fn is_finite(&self) -> bool {
        self.e_b.is_finite()
            && self.e_l.is_finite()
            && self.mu_b.is_finite()
            && self.v.is_finite()
            && self.mu.is_finite()
            && self.alpha.is_finite()
    }
}

/// M^F = A^F − iπ B^F B^F†, with A^F = [[0, μ_b*α_L*], [μ_bα_L, ΔE_b]]
/// and B^F† = (μα_L, V).
pub fn fano_effective_matrix(p: &FanoParams) -> Mat2 {
    let w = p.mu_b * p.alpha;
    let a = Mat2::new(ZERO, w.conj(), w, C64::new(p.detuning(), 0.0));
    let row = [p.mu * p.alpha, p.v];
    let bbd = Mat2::new(
        row[0].conj() * row[0],
        row[0].conj() * row[1],
        row[1].conj() * row[0],
        row[1].conj() * row[1],
    );
    a - bbd.scale(I * PI)
}

/// Complex central frequencies Λ^F₁,₂ (upper sign for index 1).
pub fn fano_eigen(p: &FanoParams) -> (C64, C64) {
    let de = p.detuning();
    let direct = PI * (p.mu * p.alpha).norm_sqr();
    let gb = p.gamma_b();
    let mb = p.mu_b - I * PI * p.mu * p.v.conj();
    let mbc = p.mu_b.conj() - I * PI * p.mu.conj() * p.v;
    let centre = C64::new(0.5 * de, -0.5 * direct - 0.5 * gb);
    let inner = C64::new(de, direct - gb);
    let root = principal_sqrt(inner * inner + 4.0 * mb * mbc * p.alpha.norm_sqr());
    (centre - 0.5 * root, centre + 0.5 * root)
}

/// Two-pole long-time amplitude d(E) = Σ_j w_j/(E − E_L − Λ^F_j) for the
/// atom starting in |0⟩_b.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanoAmplitude {
    pub weights: [C64; 2],
    pub poles: [C64; 2],
}

impl FanoAmplitude {
    pub fn new(p: &FanoParams) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::Domain("Fano parameters must be finite".into()));
        }
        let eig = eigen_decompose(&fano_effective_matrix(p))?;
        let row = [p.mu * p.alpha, p.v];
        let mut weights = [ZERO; 2];
        let mut poles = [ZERO; 2];
        for j in 0..2 {
            let col = eig.p.column(j);
            weights[j] = (row[0] * col[0] + row[1] * col[1]) * eig.p_inv[(j, 0)];
            poles[j] = eig.lambda(j) + p.e_l;
            if weights[j] != ZERO && poles[j].im >= 0.0 {
                return Err(Error::NoLongTimeLimit(format!(
                    "Fano eigenvalue {} does not decay",
                    eig.lambda(j)
                )));
            }
        }
        Ok(FanoAmplitude { weights, poles })
    }

    pub fn amplitude(&self, e: f64) -> C64 {
        let mut acc = ZERO;
        for j in 0..2 {
            if self.weights[j] != ZERO {
                acc += self.weights[j] / (e - self.poles[j]);
            }
        }
        acc
    }

    pub fn intensity(&self, e: f64) -> f64 {
        self.amplitude(e).norm_sqr()
    }

    fn terms(&self) -> Vec<(C64, C64)> {
        (0..2)
            .filter(|&j| self.weights[j] != ZERO)
            .map(|j| (self.weights[j], self.poles[j]))
            .collect()
    }

    pub fn analytic_norm(&self) -> f64 {
        let t = self.terms();
        lorentzian_overlap(&t, &t).re
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::new();
        for (_, z) in self.terms() {
            for m in [-30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0] {
                b.push(z.re + m * z.im.abs());
            }
        }
        b
    }

    pub fn quadrature_norm(&self) -> Result<f64> {
        let reference = self.analytic_norm().abs().max(f64::MIN_POSITIVE);
        Ok(quad::integrate_real_line_with_breaks(|e| self.intensity(e), &self.breakpoints(), 1e-11 * reference, 1e-11)?.value)
    }

    /// Largest intensity, located by scanning around the poles and polishing.
    pub fn peak_intensity(&self) -> f64 {
        let mut best = 0.0_f64;
        for (_, z) in self.terms() {
            let w = z.im.abs().max(1e-300);
            let (lo, hi) = (z.re - 5.0 * w, z.re + 5.0 * w);
            let n = 400;
            let mut arg = z.re;
            let mut val = 0.0;
            for i in 0..=n {
                let e = lo + (hi - lo) * i as f64 / n as f64;
                let v = self.intensity(e);
                if v > val {
                    val = v;
                    arg = e;
                }
            }
            let h = (hi - lo) / n as f64;
            let (_, neg) = crate::roots::brent_min(|e| -self.intensity(e), arg - h, arg + h, 1e-14 * w, 200);
            best = best.max(val).max(-neg);
        }
        best
    }
}

/// Normalized Fano spectrum on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanoSpectrum {
    pub grid: Vec<f64>,
    pub i_lt: Vec<f64>,
    pub normalization: f64,
    pub window_fraction: f64,
    pub narrow_window: bool,
}

/// Long-time spectrum |d(E)|² on `grid`, divided by its full-line integral.
pub fn fano_spectrum(p: &FanoParams, grid: &[f64]) -> Result<FanoSpectrum> {
    let amp = FanoAmplitude::new(p)?;
    let norm = amp.analytic_norm();
    if !(norm > 0.0) {
        return Err(Error::NoLongTimeLimit("Fano spectrum vanishes identically".into()));
    }
    let numeric = amp.quadrature_norm()?;
    if ((numeric - norm) / norm).abs() > 1e-8 {
        return Err(Error::Integration(format!(
            "residue norm {norm:e} and quadrature norm {numeric:e} disagree"
        )));
    }
    let i_lt: Vec<f64> = grid.par_iter().map(|&e| amp.intensity(e) / norm).collect();
    let window_fraction = match (grid.first(), grid.last()) {
        (Some(&a), Some(&b)) if b > a => {
            let mut bps: Vec<f64> = amp.breakpoints().into_iter().filter(|x| *x > a && *x < b).collect();
            bps.push(a);
            bps.push(b);
            bps.sort_by(f64::total_cmp);
            let mut inside = 0.0;
            for w in bps.windows(2) {
                inside += quad::integrate(|e| amp.intensity(e), w[0], w[1], 1e-12 * norm, 1e-10, 2000)?.value;
            }
            inside / norm
        }
        _ => 0.0,
    };
    Ok(FanoSpectrum {
        grid: grid.to_vec(),
        i_lt,
        normalization: norm,
        window_fraction,
        narrow_window: window_fraction < crate::spectra::WINDOW_COVERAGE,
    })
}

/// Genuine Fano zero E_F = E_b − γ_b q_b.
pub fn fano_zero(p: &FanoParams) -> Result<f64> {
    let gb = p.gamma_b();
    if gb == 0.0 {
        return Err(Error::NoZero("gamma_b = 0 leaves no interference path".into()));
    }
    let q = p.q_b();
    Ok(p.e_b - gb * q.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: f64, g: f64, om: f64) -> FanoParams {
        FanoParams::from_normalized(&NormalizedParams::fano(q, g, om, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn eigen_matches_matrix() {
        let mut p = params(2.0, 0.7, 1.3);
        p.e_l = 0.6;
        p.mu_b = C64::new(1.1, 0.4);
        let (l1, l2) = fano_eigen(&p);
        let m = fano_effective_matrix(&p);
        assert!(((l1 + l2) - m.trace()).norm() < 1e-13);
        assert!((l1 * l2 - m.det()).norm() < 1e-13);
    }

    #[test]
    fn zero_pump_eigen() {
        let mut p = params(1.0, 1.0, 0.0);
        p.e_l = 0.5;
        let (l1, l2) = fano_eigen(&p);
        let target = C64::new(0.5, -1.0);
        let ok = (l1.norm() < 1e-14 && (l2 - target).norm() < 1e-14)
            || (l2.norm() < 1e-14 && (l1 - target).norm() < 1e-14);
        assert!(ok, "{l1} {l2}");
    }

    #[test]
    fn normalized_and_zero() {
        for &om in &[0.5, 1.0, 2.0] {
            let p = params(1.0, 1.0, om);
            let amp = FanoAmplitude::new(&p).unwrap();
            assert!((amp.analytic_norm() - 1.0).abs() < 1e-12);
            let ef = fano_zero(&p).unwrap();
            assert!(ef.abs() < 1e-15);
            assert!(amp.intensity(ef) < 1e-10 * amp.peak_intensity());
        }
    }

    #[test]
    fn no_zero_without_coupling() {
        let p = params(1.0, 0.0, 0.0);
        assert!(matches!(fano_zero(&p), Err(Error::NoZero(_))));
    }

    #[test]
    fn decoupled_lorentzian() {
        let mut p = params(0.0, 1.0, 1.0);
        p.v = ZERO;
        p.mu_b = ZERO;
        let amp = FanoAmplitude::new(&p).unwrap();
        let g = PI * (p.mu * p.alpha).norm_sqr();
        let musq = (p.mu * p.alpha).norm_sqr();
        for &e in &[0.2, 1.0, 1.7] {
            let expected = musq / ((e - p.e_l).powi(2) + g * g);
            assert!((amp.intensity(e) - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }
}

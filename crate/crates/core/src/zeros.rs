//! Fano-like and dynamical spectral zeros.
//!
//! A dynamical zero of the conditional spectrum j is an energy where
//! |d_j^{ξ₁}(E)| = |d_j^{ξ₂}(E)|, i.e. where I^{st}_j touches I^{osc} and the
//! time-resolved intensity vanishes once per Rabi period.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EffectiveSystem;
use crate::params::{InitialState, NormalizedParams};
use crate::roots::{brent, brent_min, poly_roots, real_poly_roots};
use crate::spectra::LongTimeSpectrum;

/// Position of the weak-pump Fano-like zero in units of (E − E_a)/γ_a.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FanoLikeZero {
    /// Resonant pump: a genuine real zero.
    Real(f64),
    /// Detuned pump: the zero leaves the real axis, so none occurs.
    Complex(C64),
}

impl FanoLikeZero {
    pub fn is_real(&self) -> bool {
        matches!(self, FanoLikeZero::Real(_))
    }

    pub fn value(&self) -> C64 {
        match *self {
            FanoLikeZero::Real(x) => C64::new(x, 0.0),
            FanoLikeZero::Complex(z) => z,
        }
    }
}

fn require_width(params: &NormalizedParams) -> Result<()> {
    params.validate()?;
    if params.gamma_a <= 0.0 {
        return Err(Error::Domain("zero analysis needs gamma_a > 0".into()));
    }
    Ok(())
}

/// Weak-pump Fano-like zero: −q_a at resonance, −q_a − 2δ + iδ/q_a otherwise.
pub fn fano_like_zero(params: &NormalizedParams) -> Result<FanoLikeZero> {
    require_width(params)?;
    let q = params.q_a;
    if q == 0.0 {
        return Err(Error::NoZero("q_a = 0 leaves no indirect ionization path".into()));
    }
    let delta = (params.e_a - params.e_l) / params.gamma_a;
    if delta == 0.0 {
        Ok(FanoLikeZero::Real(-q))
    } else {
        Ok(FanoLikeZero::Complex(C64::new(-q - 2.0 * delta, delta / q)))
    }
}

/// Weak resonant pump: {0, −q_a} plus 1/(4q_a) ± √(1/q_a² − 8)/4 when real.
pub fn weak_resonant_zeros(q_a: f64) -> Result<Vec<f64>> {
    if q_a == 0.0 || !q_a.is_finite() {
        return Err(Error::NoZero(format!("q_a = {q_a} has no dynamical zeros")));
    }
    let mut out = vec![-q_a, 0.0];
    let disc = 1.0 / (q_a * q_a) - 8.0;
    if disc >= 0.0 {
        let r = 0.25 * disc.sqrt();
        let c = 0.25 / q_a;
        out.push(c - r);
        out.push(c + r);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Coefficients (descending, Ē⁵ … Ē⁰) of the weak resonant zero polynomial in
/// Ē = (E − E_L)/γ_a, with p_a = 1/q_a. The constant term is always zero.
pub fn weak_resonant_quintic(p_a: C64) -> [C64; 6] {
    let m2 = p_a.norm_sqr();
    let ip = p_a.im;
    let ip2 = (p_a * p_a).im;
    let re = |x: f64| C64::new(x, 0.0);
    [
        re(m2 * ip),
        re(-2.0 * p_a.re + ip2),
        re(m2 + m2 * ip - 2.0),
        re(ip2),
        re(-1.0),
        re(0.0),
    ]
}

/// Cubic Ē³ + (q − 1/(2q))Ē² + q/2 left after removing the zero root for real q.
pub fn weak_resonant_cubic(q_a: f64) -> [f64; 4] {
    [1.0, q_a - 0.5 / q_a, 0.0, 0.5 * q_a]
}

/// Weak detuned pump, ground-state spectrum: {−q_a, −2ΔE_a/γ_a}.
pub fn weak_offres_zeros_ground(params: &NormalizedParams) -> Result<Vec<f64>> {
    require_width(params)?;
    let delta = (params.e_a - params.e_l) / params.gamma_a;
    let mut out = vec![-params.q_a, -2.0 * delta];
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Quartic for the excited-state spectrum as printed (leading 4q + δ/q²).
pub fn excited_quartic_printed(q: f64, delta: f64) -> [f64; 5] {
    let mut c = excited_quartic(q, delta);
    c[0] = 4.0 * q + delta / (q * q);
    c
}

/// Quartic for the excited-state spectrum in Ē = (E_D − E_L)/γ_a with the
/// leading coefficient 4q − δ/q² that the exact weak-pump condition requires.
pub fn excited_quartic(q: f64, delta: f64) -> [f64; 5] {
    let q2 = q * q;
    let (d, d2, d3) = (delta, delta * delta, delta * delta * delta);
    [
        4.0 * q - d / q2,
        -2.0 + 4.0 * q2 + 2.0 * d2 / q2,
        -((3.0 + 1.0 / q2) * d + 4.0 * q * d2 + d3 / q2),
        2.0 * q2 - 2.0 * q * d,
        q2 * d - 2.0 * q * d2 + d3,
    ]
}

/// Weak detuned pump, excited-state spectrum: real roots of the quartic,
/// returned as (E_D − E_a)/γ_a. Zero, two or four values.
pub fn weak_offres_zeros_excited(params: &NormalizedParams) -> Result<Vec<f64>> {
    require_width(params)?;
    let q = params.q_a;
    if q == 0.0 {
        return Err(Error::NoZero("q_a = 0".into()));
    }
    let delta = (params.e_a - params.e_l) / params.gamma_a;
    if delta == 0.0 {
        return Err(Error::Domain("the detuned expansion assumes E_a != E_L".into()));
    }
    let roots = real_poly_roots(&excited_quartic(q, delta), 1e-7)?;
    Ok(roots.into_iter().map(|x| x - delta).collect())
}

/// Complex roots of the weak resonant quintic (one is exactly zero).
pub fn weak_resonant_quintic_roots(p_a: C64) -> Result<Vec<C64>> {
    poly_roots(&weak_resonant_quintic(p_a))
}

/// Relative balance (|d^{ξ₁}_j| − |d^{ξ₂}_j|)/(|d^{ξ₁}_j| + |d^{ξ₂}_j|).
pub struct ZeroCondition {
    lt: LongTimeSpectrum,
    j: usize,
    w: [f64; 2],
}

impl ZeroCondition {
    pub fn new(lt: LongTimeSpectrum, j: usize) -> Self {
        assert!(j < 2, "spectrum index must be 0 or 1");
        let w = [lt.u[0][j].norm(), lt.u[1][j].norm()];
        ZeroCondition { lt, j, w }
    }

    pub fn spectrum_index(&self) -> usize {
        self.j
    }

    pub fn magnitudes(&self, e: f64) -> (f64, f64) {
        (self.w[0] * self.lt.scalar(0, e).norm(), self.w[1] * self.lt.scalar(1, e).norm())
    }

    /// R(E) = |d^{ξ₁}_j| − |d^{ξ₂}_j|.
    pub fn balance(&self, e: f64) -> f64 {
        let (a, b) = self.magnitudes(e);
        a - b
    }

    pub fn relative(&self, e: f64) -> f64 {
        let (a, b) = self.magnitudes(e);
        let s = a + b;
        if s == 0.0 {
            0.0
        } else {
            (a - b) / s
        }
    }

    /// I^{st}_j − I^{osc} = (|d^{ξ₁}_j| − |d^{ξ₂}_j|)².
    pub fn gap(&self, e: f64) -> f64 {
        self.balance(e).powi(2)
    }

    pub fn spectrum(&self) -> &LongTimeSpectrum {
        &self.lt
    }
}

/// Number of scan points used to bracket dynamical zeros.
pub const SCAN_POINTS: usize = 4001;
/// Refinement tolerance in units of γ_a.
pub const ZERO_XTOL: f64 = 1e-10;
/// Touching threshold for zeros without a sign change.
pub const TANGENTIAL_THRESHOLD: f64 = 1e-9;

/// All dynamical zeros E_D of spectrum j inside [e_min, e_max], ascending.
pub fn find_dynamical_zeros(params: &NormalizedParams, j: usize, e_range: (f64, f64)) -> Result<Vec<f64>> {
    require_width(params)?;
    if j > 1 {
        return Err(Error::Domain(format!("spectrum index must be 0 or 1, got {j}")));
    }
    if params.omega == 0.0 {
        return Err(Error::Domain("dynamical zeros need a nonzero pump".into()));
    }
    let (lo, hi) = e_range;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Domain(format!("empty energy range [{lo}, {hi}]")));
    }
    let sys = EffectiveSystem::new(params.to_physical()?)?;
    let lt = LongTimeSpectrum::new(&sys, &InitialState::ground())?;
    let cond = ZeroCondition::new(lt, j);
    scan_zeros(&cond, lo, hi, params.gamma_a)
}

/// Scan-and-refine on a prepared condition.
pub fn scan_zeros(cond: &ZeroCondition, lo: f64, hi: f64, gamma: f64) -> Result<Vec<f64>> {
    let n = SCAN_POINTS;
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { hi } else { lo + h * i as f64 }).collect();
    let rs: Vec<f64> = xs.iter().map(|&x| cond.relative(x)).collect();
    let xtol = ZERO_XTOL * gamma;
    let mut zeros = Vec::new();

    let refine = |a: f64, b: f64| brent(|x| cond.relative(x), a, b, xtol, 200);

    for i in 0..n - 1 {
        if rs[i] == 0.0 {
            zeros.push(xs[i]);
        } else if rs[i] * rs[i + 1] < 0.0 {
            zeros.push(refine(xs[i], xs[i + 1])?);
        }
    }
    if rs[n - 1] == 0.0 {
        zeros.push(xs[n - 1]);
    }

    // Touching zeros and close pairs that fall between two scan points.
    for i in 1..n - 1 {
        let (a, b, c) = (rs[i - 1].abs(), rs[i].abs(), rs[i + 1].abs());
        if !(b < a && b <= c) || rs[i - 1] * rs[i] <= 0.0 || rs[i] * rs[i + 1] <= 0.0 {
            continue;
        }
        let sign = rs[i].signum();
        let (xm, fm) = brent_min(|x| sign * cond.relative(x), xs[i - 1], xs[i + 1], xtol, 200);
        if fm < 0.0 {
            zeros.push(refine(xs[i - 1], xm)?);
            zeros.push(refine(xm, xs[i + 1])?);
        } else if fm < TANGENTIAL_THRESHOLD {
            zeros.push(xm);
        }
    }
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|x, y| (*x - *y).abs() <= 10.0 * xtol);
    Ok(zeros)
}

/// Default scan window: (E − E_a)/γ_a ∈ [−12, 12], widened to hold every
/// weak-pump closed-form root with a margin of 2γ_a.
pub fn default_zero_range(params: &NormalizedParams, j: usize) -> Result<(f64, f64)> {
    require_width(params)?;
    let mut reduced: Vec<f64> = Vec::new();
    if params.q_a != 0.0 {
        if params.e_a == params.e_l {
            reduced.extend(weak_resonant_zeros(params.q_a)?);
        } else if j == 0 {
            reduced.extend(weak_offres_zeros_ground(params)?);
        } else {
            reduced.extend(weak_offres_zeros_excited(params)?);
        }
    }
    let mut lo: f64 = -12.0;
    let mut hi: f64 = 12.0;
    for r in reduced {
        lo = lo.min(r - 2.0);
        hi = hi.max(r + 2.0);
    }
    Ok((params.energy_from_reduced(lo), params.energy_from_reduced(hi)))
}

/// Exact zero of one long-time component S_k(E) = s₁/(E−z₁) + s₂/(E−z₂),
/// in units of (E − E_a)/γ_a. `None` when the component has a single pole.
pub fn component_zero(params: &NormalizedParams, k: usize) -> Result<Option<C64>> {
    require_width(params)?;
    let sys = EffectiveSystem::new(params.to_physical()?)?;
    let lt = LongTimeSpectrum::new(&sys, &InitialState::ground())?;
    let (s1, s2) = (lt.s[k][0], lt.s[k][1]);
    let (z1, z2) = (lt.poles[k][0], lt.poles[k][1]);
    let sum = s1 + s2;
    if s1 == C64::new(0.0, 0.0) || s2 == C64::new(0.0, 0.0) || sum.norm() == 0.0 {
        return Ok(None);
    }
    let e = (s1 * z2 + s2 * z1) / sum;
    Ok(Some((e - params.e_a) / params.gamma_a))
}

/// Index of the component oscillating at ξ_k → E_L − ΔE_a as the pump vanishes.
pub fn detuned_component(params: &NormalizedParams) -> usize {
    if params.e_a - params.e_l > 0.0 {
        0
    } else {
        1
    }
}

/// Kind of a branch-count change along Ω.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Creation,
    Annihilation,
    /// A single zero entering through the edge of the energy window.
    Entry,
    /// A single zero leaving through the edge of the energy window.
    Exit,
}

/// Pair creation or annihilation located between two Ω samples.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEvent {
    pub omega: f64,
    pub e_d: f64,
    pub kind: EventKind,
    pub spectrum_index: usize,
}

/// One continuous branch of E_D(Ω).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    pub spectrum_index: usize,
    pub omega: Vec<f64>,
    pub e_d: Vec<f64>,
}

impl Branch {
    pub fn omega_interval(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTrace {
    pub spectrum_index: usize,
    /// Every Ω where zeros were computed, ascending (grid plus refinements).
    pub omega: Vec<f64>,
    /// Zero sets at each Ω, ascending in energy.
    pub zeros: Vec<Vec<f64>>,
    pub branches: Vec<Branch>,
    pub events: Vec<PairEvent>,
}

impl ZeroTrace {
    pub fn counts(&self) -> Vec<usize> {
        self.zeros.iter().map(Vec::len).collect()
    }

    /// Run-length encoded zero counts over Ω > 0, skipping runs shorter than
    /// `min_run` samples of the original grid spacing.
    pub fn count_profile(&self, min_width: f64) -> Vec<usize> {
        let mut runs: Vec<(usize, f64, f64)> = Vec::new();
        for (om, z) in self.omega.iter().zip(&self.zeros) {
            if *om <= 0.0 {
                continue;
            }
            match runs.last_mut() {
                Some(r) if r.0 == z.len() => r.2 = *om,
                _ => runs.push((z.len(), *om, *om)),
            }
        }
        let mut profile: Vec<usize> = Vec::new();
        for (c, a, b) in runs {
            if b - a < min_width {
                continue;
            }
            if profile.last() != Some(&c) {
                profile.push(c);
            }
        }
        profile
    }

    pub fn max_count(&self) -> usize {
        self.zeros.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Controls for [`sweep_zero_traces`].
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Smallest Ω step produced by refinement.
    pub min_step: f64,
    /// Largest accepted energy jump between consecutive samples, in γ_a.
    pub max_jump: f64,
    /// Two candidates closer than this (in γ_a) count as a tie.
    pub tie_tolerance: f64,
    /// Energy window; `None` uses [`default_zero_range`].
    pub e_range: Option<(f64, f64)>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            min_step: 1e-5,
            max_jump: 0.1,
            tie_tolerance: 1e-3,
            e_range: None,
        }
    }
}

fn zeros_at(template: &NormalizedParams, omega: f64, j: usize, range: (f64, f64)) -> Result<Vec<f64>> {
    find_dynamical_zeros(&template.with_omega(omega), j, range)
}

/// Greedy nearest-neighbour matching; returns (old index, new index, distance).
fn match_sets(old: &[f64], new: &[f64], gate: f64) -> Vec<(usize, usize, f64)> {
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, a) in old.iter().enumerate() {
        for (k, b) in new.iter().enumerate() {
            let d = (a - b).abs();
            if d <= gate {
                pairs.push((i, k, d));
            }
        }
    }
    pairs.sort_by(|x, y| x.2.total_cmp(&y.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));
    let mut used_old = vec![false; old.len()];
    let mut used_new = vec![false; new.len()];
    let mut out = Vec::new();
    for (i, k, d) in pairs {
        if !used_old[i] && !used_new[k] {
            used_old[i] = true;
            used_new[k] = true;
            out.push((i, k, d));
        }
    }
    out
}

fn needs_refinement(old: &[f64], new: &[f64], gamma: f64, opts: &SweepOptions) -> bool {
    if old.len() != new.len() {
        return true;
    }
    let gate = opts.max_jump * gamma;
    let m = match_sets(old, new, gate);
    if m.len() != old.len() {
        return true;
    }
    // Ambiguity: some old zero has two new candidates within the tie tolerance.
    for (i, _, d) in &m {
        let close = new
            .iter()
            .filter(|b| ((old[*i] - **b).abs() - d).abs() <= opts.tie_tolerance * gamma)
            .count();
        if close > 1 {
            return true;
        }
    }
    false
}

/// Dynamical-zero branches of spectrum j along an ascending Ω grid.
pub fn sweep_zero_traces(
    template: &NormalizedParams,
    omega_grid: &[f64],
    j: usize,
    opts: &SweepOptions,
) -> Result<ZeroTrace> {
    require_width(template)?;
    if omega_grid.is_empty() {
        return Err(Error::Domain("empty omega grid".into()));
    }
    if omega_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("omega grid must be strictly ascending".into()));
    }
    if omega_grid.iter().any(|o| *o == 0.0 || !o.is_finite()) {
        return Err(Error::Domain("omega grid must be finite and exclude 0".into()));
    }
    let range = match opts.e_range {
        Some(r) => r,
        None => default_zero_range(template, j)?,
    };
    let gamma = template.gamma_a;

    let initial: Vec<Vec<f64>> = omega_grid
        .par_iter()
        .map(|&om| zeros_at(template, om, j, range))
        .collect::<Result<_>>()?;
    let mut samples: Vec<(f64, Vec<f64>)> = omega_grid.iter().copied().zip(initial).collect();

    // Refine every interval whose endpoints disagree, in parallel per interval.
    let refined: Vec<Vec<(f64, Vec<f64>)>> = samples
        .par_windows(2)
        .map(|w| refine_interval(template, j, range, gamma, opts, &w[0], &w[1]))
        .collect::<Result<_>>()?;
    let mut all: Vec<(f64, Vec<f64>)> = Vec::with_capacity(samples.len());
    for (i, extra) in refined.into_iter().enumerate() {
        all.push(std::mem::take(&mut samples[i]));
        all.extend(extra);
    }
    all.push(samples.pop().unwrap());

    Ok(assemble(all, j, gamma, opts))
}

fn refine_interval(
    template: &NormalizedParams,
    j: usize,
    range: (f64, f64),
    gamma: f64,
    opts: &SweepOptions,
    left: &(f64, Vec<f64>),
    right: &(f64, Vec<f64>),
) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut out = Vec::new();
    let mut stack = vec![(left.clone(), right.clone())];
    while let Some((a, b)) = stack.pop() {
        if b.0 - a.0 <= opts.min_step || a.0 * b.0 < 0.0 {
            continue;
        }
        if !needs_refinement(&a.1, &b.1, gamma, opts) {
            continue;
        }
        let mid = 0.5 * (a.0 + b.0);
        let z = zeros_at(template, mid, j, range)?;
        let m = (mid, z);
        out.push(m.clone());
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(out)
}

/// Groups sorted energies into adjacent pairs closer than `gate`; the rest stay single.
fn pair_up(sorted: &[f64], gate: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        if i + 1 < sorted.len() && sorted[i + 1] - sorted[i] <= gate {
            out.push(vec![sorted[i], sorted[i + 1]]);
            i += 2;
        } else {
            out.push(vec![sorted[i]]);
            i += 1;
        }
    }
    out
}

fn assemble(samples: Vec<(f64, Vec<f64>)>, j: usize, gamma: f64, opts: &SweepOptions) -> ZeroTrace {
    let gate = opts.max_jump * gamma;
    let mut branches: Vec<Branch> = Vec::new();
    let mut active: Vec<(usize, f64)> = Vec::new(); // (branch index, last E)
    let mut events = Vec::new();
    let mut prev_omega: Option<f64> = None;

    for (om, zs) in &samples {
        let old: Vec<f64> = active.iter().map(|a| a.1).collect();
        let crossing = prev_omega.map_or(false, |p| p * om < 0.0);
        let matches = match_sets(&old, zs, if crossing { f64::INFINITY } else { gate });
        let mut next: Vec<(usize, f64)> = Vec::new();
        let mut taken = vec![false; zs.len()];
        for &(i, k, _) in &matches {
            let b = active[i].0;
            branches[b].omega.push(*om);
            branches[b].e_d.push(zs[k]);
            next.push((b, zs[k]));
            taken[k] = true;
        }
        let mut ended: Vec<f64> = Vec::new();
        for (i, a) in active.iter().enumerate() {
            if !matches.iter().any(|m| m.0 == i) {
                ended.push(a.1);
            }
        }
        let mut born: Vec<f64> = Vec::new();
        for (k, z) in zs.iter().enumerate() {
            if !taken[k] {
                let id = branches.len();
                branches.push(Branch {
                    id,
                    spectrum_index: j,
                    omega: vec![*om],
                    e_d: vec![*z],
                });
                next.push((id, *z));
                born.push(*z);
            }
        }
        if let Some(p) = prev_omega {
            let mid = 0.5 * (p + om);
            let kinds = [
                (&born, EventKind::Creation, EventKind::Entry),
                (&ended, EventKind::Annihilation, EventKind::Exit),
            ];
            for (list, paired, single) in kinds {
                let mut sorted = list.clone();
                sorted.sort_by(f64::total_cmp);
                for chunk in pair_up(&sorted, gate) {
                    let e_d = chunk.iter().sum::<f64>() / chunk.len() as f64;
                    events.push(PairEvent {
                        omega: mid,
                        e_d,
                        kind: if chunk.len() == 2 { paired } else { single },
                        spectrum_index: j,
                    });
                }
            }
        }
        active = next;
        prev_omega = Some(*om);
    }
    let (omega, zeros): (Vec<f64>, Vec<Vec<f64>>) = samples.into_iter().unzip();
    ZeroTrace {
        spectrum_index: j,
        omega,
        zeros,
        branches,
        events,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonant_closed_form() {
        assert_eq!(weak_resonant_zeros(1.0).unwrap(), vec![-1.0, 0.0]);
        let z = weak_resonant_zeros(0.1).unwrap();
        let expected = [-0.1, 0.0, 0.10208, 4.89792];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
        let q = 1.0 / (2.0 * 2f64.sqrt());
        let z = weak_resonant_zeros(q).unwrap();
        assert_eq!(z.len(), 4);
        assert!((z[2] - z[3]).abs() < 1e-7);
        assert!((z[2] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        assert!(weak_resonant_zeros(0.0).is_err());
    }

    #[test]
    fn quintic_has_zero_root_and_collapses() {
        for &q in &[0.1, 0.5, 1.0, 3.0, -2.0] {
            let c = weak_resonant_quintic(C64::new(1.0 / q, 0.0));
            assert_eq!(c[5], C64::new(0.0, 0.0));
            assert_eq!(c[0], C64::new(0.0, 0.0));
            // −2p Ē³ + (p² − 2)Ē² − 1 divided by −2p is the cubic.
            let cubic = weak_resonant_cubic(q);
            let lead = c[1].re;
            for (a, b) in [c[1].re, c[2].re, c[3].re, c[4].re].iter().zip(cubic) {
                assert!((a / lead - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quintic_roots_contain_closed_form() {
        let roots = weak_resonant_quintic_roots(C64::new(10.0, 0.0)).unwrap();
        for z in weak_resonant_zeros(0.1).unwrap() {
            assert!(roots.iter().any(|r| (r - z).norm() < 1e-8), "{z}");
        }
    }

    #[test]
    fn fano_like_positions() {
        let p = NormalizedParams::neighbor(100.0, 1.0, 1e-3, 1.0, 1.0);
        assert_eq!(fano_like_zero(&p).unwrap(), FanoLikeZero::Real(-100.0));
        let p = NormalizedParams::neighbor(1.0, 1.0, 1e-3, 1.2, 1.0);
        match fano_like_zero(&p).unwrap() {
            FanoLikeZero::Complex(z) => {
                assert!((z - C64::new(-1.4, 0.2)).norm() < 1e-12);
            }
            other => panic!("expected complex zero, got {other:?}"),
        }
        let p = NormalizedParams::neighbor(0.0, 1.0, 1e-3, 1.0, 1.0);
        assert!(matches!(fano_like_zero(&p), Err(Error::NoZero(_))));
    }

    #[test]
    fn ground_offres_example() {
        let p = NormalizedParams::neighbor(1.0, 1.0, 1e-3, 1.0, 0.8);
        let z = weak_offres_zeros_ground(&p).unwrap();
        assert!((z[0] + 1.0).abs() < 1e-12 && (z[1] + 0.4).abs() < 1e-12);
    }

    #[test]
    fn printed_quartic_differs_only_in_leading_term() {
        let a = excited_quartic(1.0, 0.2);
        let b = excited_quartic_printed(1.0, 0.2);
        assert_eq!(a[1..], b[1..]);
        assert!((a[0] - 3.8).abs() < 1e-15 && (b[0] - 4.2).abs() < 1e-15);
    }

    #[test]
    fn weak_resonant_numeric() {
        let p = NormalizedParams::neighbor(1.0, 1.0, 1e-3, 1.0, 1.0);
        let range = default_zero_range(&p, 0).unwrap();
        for j in 0..2 {
            let z: Vec<f64> = find_dynamical_zeros(&p, j, range)
                .unwrap()
                .into_iter()
                .map(|e| p.reduced_energy(e))
                .collect();
            assert_eq!(z.len(), 2, "{z:?}");
            assert!((z[0] + 1.0).abs() < 5e-3 && z[1].abs() < 5e-3, "{z:?}");
        }
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let p = NormalizedParams::neighbor(1.0, 1.0, 1.0, 1.0, 1.0);
        let opts = SweepOptions::default();
        assert!(sweep_zero_traces(&p, &[0.5, 0.2], 0, &opts).is_err());
        assert!(sweep_zero_traces(&p, &[-0.1, 0.0, 0.1], 0, &opts).is_err());
    }

    #[test]
    fn match_prefers_nearest() {
        let m = match_sets(&[0.0, 1.0], &[0.95, 0.02], 0.5);
        assert_eq!(m.len(), 2);
        assert!(m.contains(&(0, 1, 0.02)));
    }
}

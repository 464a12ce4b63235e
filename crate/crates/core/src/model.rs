//! Closed-form Laplace solution of the pumped two-atom ionization model.
//!
//! Energies are measured in the frame rotating with the pump, so the bound
//! block reads A = [[0, μ_a*α_L*], [μ_aα_L, ΔE_a]] and the continuum
//! coupling is B† = [[μα_L, J], [0, μα_L]].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{exprel, principal_sqrt, Mat2, Vec2, I, ONE, ZERO};
use crate::params::{InitialState, PhysicalParams};

/// Quasi-energies of the driven neighbor atom.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiSplit {
    pub xi1: f64,
    pub xi2: f64,
    pub delta_xi: f64,
}

pub fn rabi_split(p: &PhysicalParams) -> RabiSplit {
    let de = p.detuning();
    let coupling = (p.mu_a * p.alpha).norm();
    let delta_xi = de.hypot(2.0 * coupling);
    RabiSplit {
        xi1: p.e_l - 0.5 * (de + delta_xi),
        xi2: p.e_l - 0.5 * (de - delta_xi),
        delta_xi,
    }
}

/// Bound-state block A of K(E) = (E − E_L)·1 + A.
pub fn bound_block(p: &PhysicalParams) -> Mat2 {
    let w = p.mu_a * p.alpha;
    Mat2::new(ZERO, w.conj(), w, C64::new(p.detuning(), 0.0))
}

/// Continuum coupling B†, rows indexed by the neighbor state.
pub fn coupling_adjoint(p: &PhysicalParams) -> Mat2 {
    let w = p.mu * p.alpha;
    Mat2::new(w, p.j, ZERO, w)
}

/// Spectral projector K_k of K(E) belonging to the eigenvalue E − ξ_k.
pub fn k_projector(k: usize, p: &PhysicalParams) -> Result<Mat2> {
    assert!(k == 1 || k == 2, "projector index must be 1 or 2");
    let RabiSplit { delta_xi, .. } = rabi_split(p);
    if delta_xi == 0.0 {
        return Err(Error::DegenerateSpectrum(
            "Rabi splitting vanishes (resonant pump with zero coupling)".into(),
        ));
    }
    let de = p.detuning();
    let w = p.mu_a * p.alpha;
    let r = 1.0 / delta_xi;
    let k1 = Mat2::new(
        C64::new(0.5 * (delta_xi - de) * r, 0.0),
        w.conj() * r,
        w * r,
        C64::new(0.5 * (de + delta_xi) * r, 0.0),
    );
    Ok(if k == 1 { k1 } else { Mat2::identity() - k1 })
}

/// M = A − iπBB†.
pub fn effective_matrix(p: &PhysicalParams) -> Mat2 {
    let bd = coupling_adjoint(p);
    let bbd = bd.adjoint() * bd;
    bound_block(p) - bbd.scale(I * PI)
}

/// Eigen-decomposition M = P·diag(Λ₁, Λ₂)·P⁻¹.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigen2 {
    pub lambda1: C64,
    pub lambda2: C64,
    pub p: Mat2,
    pub p_inv: Mat2,
}

impl Eigen2 {
    pub fn lambda(&self, j: usize) -> C64 {
        if j == 0 {
            self.lambda1
        } else {
            self.lambda2
        }
    }

    pub fn reconstruct(&self) -> Mat2 {
        self.p * Mat2::diag(self.lambda1, self.lambda2) * self.p_inv
    }
}

/// Eigenvalues Λ₁,₂ = tr/2 ∓ √((M₁₁−M₂₂)²/4 + M₁₂M₂₁) with the principal root.
///
/// Eigenvector columns are unit-normalized. A scalar matrix gets P = 1;
/// a defective one is an exceptional point.
pub fn eigen_decompose(m: &Mat2) -> Result<Eigen2> {
    if !m.is_finite() {
        return Err(Error::Domain("effective matrix has non-finite entries".into()));
    }
    let half = 0.5 * m.trace();
    let delta = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let s = principal_sqrt(delta * delta + m[(0, 1)] * m[(1, 0)]);
    let scale = m.max_abs();

    if s.norm() <= 1e-10 * scale || s.norm() == 0.0 {
        let off = m[(0, 1)].norm().max(m[(1, 0)].norm());
        if off <= 1e-14 * scale || scale == 0.0 {
            return Ok(Eigen2 {
                lambda1: half,
                lambda2: half,
                p: Mat2::identity(),
                p_inv: Mat2::identity(),
            });
        }
        return Err(Error::ExceptionalPoint(format!(
            "coalescing eigenvalues {half} with off-diagonal coupling {off:e} \
             (discriminant root {:e})",
            s.norm()
        )));
    }

    // Take the larger-magnitude eigenvalue from the sum and recover the
    // smaller one from the determinant to avoid cancellation.
    let (mut l1, mut l2) = (half - s, half + s);
    let det = m.det();
    if l1.norm() > l2.norm() {
        if l1 != ZERO {
            l2 = det / l1;
        }
    } else if l2 != ZERO {
        l1 = det / l2;
    }

    let p = Mat2::from_columns(eigenvector(m, l1), eigenvector(m, l2));
    let p_inv = p.inverse().ok_or_else(|| {
        Error::ExceptionalPoint("eigenvector matrix is numerically singular".into())
    })?;
    Ok(Eigen2 {
        lambda1: l1,
        lambda2: l2,
        p,
        p_inv,
    })
}

fn eigenvector(m: &Mat2, lambda: C64) -> Vec2 {
    let a = Vec2::new(m[(0, 1)], lambda - m[(0, 0)]);
    let b = Vec2::new(lambda - m[(1, 1)], m[(1, 0)]);
    let v = if a.norm_sqr() >= b.norm_sqr() { a } else { b };
    let n = v.norm_sqr().sqrt();
    if n == 0.0 {
        // Only reachable for diagonal M with this eigenvalue on the diagonal.
        if (m[(0, 0)] - lambda).norm() <= (m[(1, 1)] - lambda).norm() {
            Vec2::new(ONE, ZERO)
        } else {
            Vec2::new(ZERO, ONE)
        }
    } else {
        v.scale(C64::new(1.0 / n, 0.0))
    }
}

/// Closed-form weight matrices with their auxiliary quantities.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DMatrices {
    pub d1: Mat2,
    pub d2: Mat2,
    /// ℰ̃ = −ℰ_a − √(ℰ_a² + M_aM_a^c|α_L|²).
    pub etilde: C64,
    /// D = −ℰ̃² − M_aM_a^c|α_L|².
    pub ddenom: C64,
}

/// First-order D_k for a weak pump at resonance (E_a = E_L), in the same sign
/// convention as [`d_matrices`]. Column 0 belongs to the slow pole Λ ≈ 0 and
/// column 1 to the fast pole Λ ≈ −iγ_a; row 1 of D_k is (u_k)₁/(u_k)₀ times
/// row 0, i.e. +μ_a/|μ_a| for k = 0 and −μ_a/|μ_a| for k = 1.
/// Needs μ_a ≠ 0 and γ_a > 0.
pub fn weak_resonant_d(p: &PhysicalParams) -> Result<[Mat2; 2]> {
    let g = p.gamma_a();
    if g <= 0.0 || p.mu_a == ZERO {
        return Err(Error::Domain("weak-pump limit needs gamma_a > 0 and mu_a != 0".into()));
    }
    let x = I * p.j * p.m_a() / g;
    let phase = p.mu_a / p.mu_a.norm();
    let half = p.alpha * 0.5;
    let (slow, fast) = ((p.mu - x) * half, x * half);
    let mut out = [Mat2::zeros(); 2];
    for (k, s) in [(0, 1.0), (1, -1.0)] {
        out[k] = Mat2::new(slow, fast, slow * phase * s, fast * phase * s);
    }
    Ok(out)
}

/// Index of the eigenvalue closest to zero (the slow pole at weak pump).
pub fn slow_pole_index(sys: &EffectiveSystem) -> usize {
    if sys.lambda1.norm() <= sys.lambda2.norm() {
        0
    } else {
        1
    }
}

/// ℰ_a = (ΔE_a − iγ_a)/2.
pub fn cal_e_a(p: &PhysicalParams) -> C64 {
    C64::new(0.5 * p.detuning(), -0.5 * p.gamma_a())
}

/// Explicit element formulas for D₁, D₂.
///
/// The upper-sign variant of the printed element formulas belongs to D₂ and
/// the lower-sign variant to D₁; both carry an extra factor −1 relative to
/// [`EffectiveSystem::weights`] because of the overall sign convention.
pub fn d_matrices(p: &PhysicalParams) -> Result<DMatrices> {
    let RabiSplit { delta_xi, .. } = rabi_split(p);
    if delta_xi == 0.0 {
        return Err(Error::DegenerateSpectrum("Rabi splitting vanishes".into()));
    }
    let ea = cal_e_a(p);
    let (ma, mac) = (p.m_a(), p.m_a_c());
    let alpha = p.alpha;
    let a2 = alpha.norm_sqr();
    let etilde = -ea - principal_sqrt(ea * ea + ma * mac * a2);
    let ddenom = -etilde * etilde - ma * mac * a2;
    let scale = etilde.norm_sqr() + (ma * mac).norm() * a2;
    if ddenom.norm() <= 1e-13 * scale || ddenom == ZERO {
        return Err(Error::DegenerateSpectrum(format!(
            "closed-form denominator D = {ddenom} vanishes"
        )));
    }

    let numerator = |s: f64| -> Mat2 {
        let (mu, mu_a, j, de) = (p.mu, p.mu_a, p.j, p.detuning());
        let e = etilde;
        let plus = C64::new(0.5 * (s * de + delta_xi), 0.0);
        let minus = C64::new(0.5 * (-s * de + delta_xi), 0.0);
        let cross = mu * mu_a.conj() * ma * alpha * a2 * e;
        let alpha_sq = alpha * alpha;
        let d11 = (mu * e * e + j * ma * e) * alpha * plus - s * cross;
        let d12 = (mu * ma * mac * alpha * a2 - j * ma * alpha * e) * plus + s * cross;
        let d21 = -s * mu * mu_a * alpha_sq * e * e - s * j * mu_a * ma * alpha_sq * e
            + mu * ma * alpha_sq * e * minus;
        let d22 = -s * mu * mu_a * ma * mac * alpha_sq * a2 + s * j * mu_a * ma * alpha_sq * e
            - mu * ma * alpha_sq * e * minus;
        Mat2::new(d11, d12, d21, d22)
    };

    let factor = -(delta_xi * ddenom).inv();
    Ok(DMatrices {
        d1: numerator(-1.0).scale(factor),
        d2: numerator(1.0).scale(factor),
        etilde,
        ddenom,
    })
}

/// Every derived quantity of the closed-form solution for one parameter set.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSystem {
    pub params: PhysicalParams,
    pub xi1: f64,
    pub xi2: f64,
    pub delta_xi: f64,
    pub k1: Mat2,
    pub k2: Mat2,
    pub b_dag: Mat2,
    pub m: Mat2,
    pub lambda1: C64,
    pub lambda2: C64,
    pub p: Mat2,
    pub p_inv: Mat2,
    /// Ground-state weights [K_k B† P]_{jl}[P⁻¹]_{l1} from the eigenvector route.
    pub d1: Mat2,
    pub d2: Mat2,
    pub ea_cal: C64,
    pub etilde: C64,
    pub ddenom: C64,
    pub ma: C64,
    pub mac: C64,
    /// K_k B† P, cached for arbitrary initial states.
    kbp: [Mat2; 2],
}

impl EffectiveSystem {
    pub fn new(params: PhysicalParams) -> Result<Self> {
        if !params.is_finite() {
            return Err(Error::Domain("physical parameters must be finite".into()));
        }
        let split = rabi_split(&params);
        let k1 = k_projector(1, &params)?;
        let k2 = Mat2::identity() - k1;
        let b_dag = coupling_adjoint(&params);
        let m = effective_matrix(&params);
        let eig = eigen_decompose(&m)?;
        let kbp = [k1 * b_dag * eig.p, k2 * b_dag * eig.p];
        let ea_cal = cal_e_a(&params);
        let (ma, mac) = (params.m_a(), params.m_a_c());
        let a2 = params.alpha.norm_sqr();
        let etilde = -ea_cal - principal_sqrt(ea_cal * ea_cal + ma * mac * a2);
        let ddenom = -etilde * etilde - ma * mac * a2;
        let mut sys = EffectiveSystem {
            params,
            xi1: split.xi1,
            xi2: split.xi2,
            delta_xi: split.delta_xi,
            k1,
            k2,
            b_dag,
            m,
            lambda1: eig.lambda1,
            lambda2: eig.lambda2,
            p: eig.p,
            p_inv: eig.p_inv,
            d1: Mat2::zeros(),
            d2: Mat2::zeros(),
            ea_cal,
            etilde,
            ddenom,
            ma,
            mac,
            kbp,
        };
        let [d1, d2] = sys.weights(&InitialState::ground());
        sys.d1 = d1;
        sys.d2 = d2;
        Ok(sys)
    }

    pub fn xi(&self, k: usize) -> f64 {
        if k == 0 {
            self.xi1
        } else {
            self.xi2
        }
    }

    pub fn lambda(&self, l: usize) -> C64 {
        if l == 0 {
            self.lambda1
        } else {
            self.lambda2
        }
    }

    /// Complex pole Λ_l + ξ_k of the (k, l) Lorentzian.
    pub fn pole(&self, k: usize, l: usize) -> C64 {
        self.lambda(l) + self.xi(k)
    }

    pub fn d(&self, k: usize) -> &Mat2 {
        if k == 0 {
            &self.d1
        } else {
            &self.d2
        }
    }

    /// Weights W_k with [W_k]_{jl} = [K_k B† P]_{jl}(P⁻¹c(0))_l.
    pub fn weights(&self, c0: &InitialState) -> [Mat2; 2] {
        let v = self.p_inv.mul_vec(&c0.as_vec());
        let w = |kbp: &Mat2| {
            Mat2::new(
                kbp[(0, 0)] * v[0],
                kbp[(0, 1)] * v[1],
                kbp[(1, 0)] * v[0],
                kbp[(1, 1)] * v[1],
            )
        };
        [w(&self.kbp[0]), w(&self.kbp[1])]
    }

    fn weights_for(&self, c0: &InitialState) -> [Mat2; 2] {
        if c0.is_ground() {
            [self.d1, self.d2]
        } else {
            self.weights(c0)
        }
    }

    /// Ordered list of (k, l, pole, weight column) contributing to d_j.
    pub fn pole_terms(&self, c0: &InitialState) -> Vec<PoleTerm> {
        let w = self.weights_for(c0);
        let mut out = Vec::with_capacity(4);
        for (k, wk) in w.iter().enumerate() {
            for l in 0..2 {
                out.push(PoleTerm {
                    k,
                    l,
                    pole: self.pole(k, l),
                    weight: wk.column(l),
                });
            }
        }
        out
    }
}

/// One Lorentzian term: amplitude weight[j]/(E − pole) for spectrum j.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PoleTerm {
    pub k: usize,
    pub l: usize,
    pub pole: C64,
    pub weight: Vec2,
}

/// c(t) = P·diag(e^{−iΛt})·P⁻¹·c(0).
pub fn bound_amplitudes(sys: &EffectiveSystem, c0: &InitialState, t: f64) -> Result<Vec2> {
    check_time(t)?;
    let v = sys.p_inv.mul_vec(&c0.as_vec());
    let evolved = Vec2::new(
        v[0] * (-I * sys.lambda1 * t).exp(),
        v[1] * (-I * sys.lambda2 * t).exp(),
    );
    Ok(sys.p.mul_vec(&evolved))
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// [U_k]_{ll} = i(e^{i(ξ_k−E)t} − e^{−iΛ_l t})/(E − Λ_l − ξ_k), regular at the pole.
fn evolution_factor(e: f64, lambda: C64, xi: f64, t: f64) -> C64 {
    let w = -I * (e - lambda - xi) * t;
    (-I * lambda * t).exp() * t * exprel(w)
}

/// Finite-time continuum amplitudes (d₀(E,t), d₁(E,t)).
///
/// The ground-state initial condition goes through the precomputed D_k;
/// any other initial state goes through K_k B† P U_k P⁻¹ c(0).
pub fn continuum_amplitudes(
    sys: &EffectiveSystem,
    c0: &InitialState,
    e: f64,
    t: f64,
) -> Result<Vec2> {
    check_time(t)?;
    if c0.is_ground() {
        Ok(continuum_ground(sys, e, t))
    } else {
        Ok(continuum_general(sys, c0, e, t))
    }
}

/// d = −i Σ_k D_k u_k.
pub fn continuum_ground(sys: &EffectiveSystem, e: f64, t: f64) -> Vec2 {
    let mut d = Vec2::zeros();
    for k in 0..2 {
        let dk = sys.d(k);
        let u = [
            evolution_factor(e, sys.lambda1, sys.xi(k), t),
            evolution_factor(e, sys.lambda2, sys.xi(k), t),
        ];
        for j in 0..2 {
            d[j] += dk[(j, 0)] * u[0] + dk[(j, 1)] * u[1];
        }
    }
    d.scale(-I)
}

/// d = −i Σ_k K_k B† P U_k P⁻¹ c(0).
pub fn continuum_general(sys: &EffectiveSystem, c0: &InitialState, e: f64, t: f64) -> Vec2 {
    let v = sys.p_inv.mul_vec(&c0.as_vec());
    let mut d = Vec2::zeros();
    for (k, kbp) in sys.kbp.iter().enumerate() {
        let uv = Vec2::new(
            evolution_factor(e, sys.lambda1, sys.xi(k), t) * v[0],
            evolution_factor(e, sys.lambda2, sys.xi(k), t) * v[1],
        );
        d = d + kbp.mul_vec(&uv);
    }
    d.scale(-I)
}

/// Uniform energy grid [e_min, e_max] with `n` points.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub n: usize,
}

impl EnergyGrid {
    pub fn new(e_min: f64, e_max: f64, n: usize) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite()) || e_min >= e_max {
            return Err(Error::Domain(format!("invalid energy range [{e_min}, {e_max}]")));
        }
        if n < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 points, got {n}")));
        }
        Ok(EnergyGrid { e_min, e_max, n })
    }

    /// Grid centred on `center` with half-width `half` and spacing at most `h`.
    pub fn centered(center: f64, half: f64, h: f64) -> Result<Self> {
        let n = (2.0 * half / h).ceil() as usize + 1;
        Self::new(center - half, center + half, n.max(2))
    }

    pub fn step(&self) -> f64 {
        (self.e_max - self.e_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.e_max
        } else {
            self.e_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

/// Tail fraction admitted beyond the grid edges.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Σ|c_j(t)|² + ∫(|d₀|² + |d₁|²)dE on a grid.
///
/// Trapezoid rule on the grid plus the 1/E² and 1/E³ Lorentzian tails beyond
/// each edge. Errors with [`Error::TailBound`] when the first neglected tail
/// term exceeds [`TAIL_TOLERANCE`].
pub fn total_probability(
    sys: &EffectiveSystem,
    c0: &InitialState,
    t: f64,
    grid: &EnergyGrid,
) -> Result<f64> {
    check_time(t)?;
    let bound = bound_amplitudes(sys, c0, t)?.norm_sqr();
    if t == 0.0 {
        return Ok(bound);
    }
    let h = grid.step();
    let mut sum = 0.0;
    for i in 0..grid.n {
        let e = grid.point(i);
        let w = if i == 0 || i + 1 == grid.n { 0.5 } else { 1.0 };
        sum += w * continuum_amplitudes(sys, c0, e, t)?.norm_sqr();
    }
    let interior = sum * h;

    // Far from every pole d_j ≈ Σ a e^{iξt}/(E−z) · e^{−iEt} − Σ a e^{−iΛt}/(E−z).
    let center = 0.5 * (grid.e_min + grid.e_max);
    let terms = sys.pole_terms(c0);
    let mut tail = 0.0;
    let mut neglected = 0.0;
    for j in 0..2 {
        let mut f = [ZERO; 3];
        let mut g = [ZERO; 3];
        for term in &terms {
            let a = term.weight[j];
            let z = term.pole - center;
            let af = a * (I * sys.xi(term.k) * t).exp();
            let ag = a * (-I * sys.lambda(term.l) * t).exp();
            f[0] += af;
            f[1] += af * z;
            f[2] += af * z * z;
            g[0] += ag;
            g[1] += ag * z;
            g[2] += ag * z * z;
        }
        for (sign, width) in [(1.0, grid.e_max - center), (-1.0, center - grid.e_min)] {
            // ∫ |S0/u + S1/u²|² over the outer half-line.
            let smooth = |s: &[C64; 3]| {
                s[0].norm_sqr() / width + sign * (s[0].conj() * s[1]).re / (width * width)
            };
            tail += smooth(&f) + smooth(&g);
            // Oscillating cross term −2Re ∫ e^{−iEt} F G* dE, leading order.
            let edge = center + sign * width;
            let cross = (f[0] * g[0].conj()) * (-I * edge * t).exp() / (I * t * width * width);
            tail -= 2.0 * sign * cross.re;
            let next = (f[1].norm_sqr() + g[1].norm_sqr() + 2.0 * ((f[0] * f[2].conj()).norm() + (g[0] * g[2].conj()).norm()))
                / (3.0 * width.powi(3))
                + 4.0 * (f[0].norm() * g[0].norm() / t + (f[1].norm() * g[0].norm() + f[0].norm() * g[1].norm()))
                    / (t * width.powi(3));
            neglected += next;
        }
    }
    if neglected > TAIL_TOLERANCE {
        let half = 0.5 * (grid.e_max - grid.e_min);
        let factor = (neglected / TAIL_TOLERANCE).cbrt().max(2.0);
        return Err(Error::TailBound {
            estimate: neglected,
            suggested_half_width: half * factor,
        });
    }
    Ok(bound + interior + tail)
}

/// ∫ (Σ_l a_l/(E−z_l))(Σ_m b_m/(E−w_m))* dE over the real line, Im z, Im w < 0.
pub fn lorentzian_overlap(a: &[(C64, C64)], b: &[(C64, C64)]) -> C64 {
    let mut s = ZERO;
    for &(al, zl) in a {
        for &(bm, wm) in b {
            s += al * bm.conj() * 2.0 * PI * I / (wm.conj() - zl);
        }
    }
    s
}

/// Continuum norm ∫(|d₀|²+|d₁|²)dE at time t by contour integration.
pub fn continuum_norm_exact(sys: &EffectiveSystem, c0: &InitialState, t: f64) -> Result<f64> {
    check_time(t)?;
    let terms = sys.pole_terms(c0);
    if terms.iter().any(|tm| tm.pole.im >= 0.0 && tm.weight.norm_sqr() > 0.0) {
        return Err(Error::NoLongTimeLimit("undamped pole carries weight".into()));
    }
    let mut total = 0.0;
    for j in 0..2 {
        let f: Vec<(C64, C64)> = terms
            .iter()
            .filter(|tm| tm.weight[j] != ZERO)
            .map(|tm| (tm.weight[j] * (I * sys.xi(tm.k) * t).exp(), tm.pole))
            .collect();
        let g: Vec<(C64, C64)> = terms
            .iter()
            .filter(|tm| tm.weight[j] != ZERO)
            .map(|tm| (tm.weight[j] * (-I * sys.lambda(tm.l) * t).exp(), tm.pole))
            .collect();
        let ff = lorentzian_overlap(&f, &f).re;
        let gg = lorentzian_overlap(&g, &g).re;
        // ∫ e^{−iEt} F(E) G(E)* dE closes in the lower half plane.
        let mut cross = ZERO;
        for &(a, z) in &f {
            let gz: C64 = g.iter().map(|&(b, w)| b.conj() / (z - w.conj())).sum();
            cross += a * (-I * z * t).exp() * gz;
        }
        cross *= -2.0 * PI * I;
        total += ff + gg - 2.0 * cross.re;
    }
    Ok(total)
}

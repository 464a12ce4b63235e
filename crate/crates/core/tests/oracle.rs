use std::f64::consts::PI;

use ionospec_core::oracle::*;
use ionospec_core::spectra::{decompose_intensity, LongTimeSpectrum};
use ionospec_core::*;

fn decoupled() -> PhysicalParams {
    // μ_a = 0 and J = 0: plain Wigner–Weisskopf decay of |0⟩_b at rate π|α|².
    let alpha = (0.5 / PI).sqrt();
    PhysicalParams {
        e_a: 2.0,
        e_l: 1.0,
        mu: Complex64::new(1.0, 0.0),
        mu_a: Complex64::new(0.0, 0.0),
        j: Complex64::new(0.0, 0.0),
        alpha: Complex64::new(alpha, 0.0),
    }
}

fn generic() -> PhysicalParams {
    NormalizedParams::neighbor(1.0, 1.0, 1.0, 1.0, 1.0).to_physical().unwrap()
}

#[test]
fn golden_rule_rate_from_level_density() {
    let p = generic();
    let d = discretize(&p, 40.0, 2001).unwrap();
    let expected = p.direct_rate();
    let rate = d.golden_rule_rate(0, 0, 0.5);
    assert!((rate / expected - 1.0).abs() < 0.01, "{rate} vs {expected}");
}

#[test]
fn decoupled_sectors() {
    let mut p = decoupled();
    p.alpha = Complex64::new(0.3, 0.1);
    let d = discretize(&p, 40.0, 11).unwrap();
    let h = d.to_dense();
    let n = d.n_levels;
    let first: Vec<usize> = std::iter::once(0).chain(2..2 + n).collect();
    let second: Vec<usize> = std::iter::once(1).chain(2 + n..2 + 2 * n).collect();
    for &r in &first {
        for &c in &second {
            assert_eq!(h[r][c], Complex64::new(0.0, 0.0), "({r}, {c})");
        }
    }
}

#[test]
fn unpumped_ground_state_is_stationary() {
    let mut p = generic();
    p.alpha = Complex64::new(0.0, 0.0);
    let d = discretize(&p, 40.0, 201).unwrap();
    let x0 = d.initial_state(&InitialState::ground());
    let traj = evolve(&d, &x0, 5.0, &EvolveOptions::default()).unwrap();
    for x in &traj.states {
        assert!((x[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(x[1..].iter().all(|v| v.norm() < 1e-14));
    }
}

#[test]
fn norm_drift_bound() {
    let d = discretize(&generic(), 40.0, 401).unwrap();
    let t = 10.0;
    let traj = evolve(&d, &d.initial_state(&InitialState::ground()), t, &EvolveOptions::default()).unwrap();
    assert!(traj.max_norm_drift <= 1e-9 * t, "{}", traj.max_norm_drift);
}

#[test]
fn referee_run_late_times() {
    let p = generic();
    let d = discretize(&p, 40.0, 2001).unwrap();
    let sys = EffectiveSystem::new(p).unwrap();
    let opts = EvolveOptions { tol: 1e-6, samples: 16, ..Default::default() };
    let r = compare(&d, &sys, &InitialState::ground(), 8.0, &opts).unwrap();
    // Samples at multiples of 0.5, past the band-edge transient.
    assert!(r.max_err_c <= 2e-3, "{r:?}");
    assert!(r.rms_err_d <= 2e-3, "{r:?}");
    assert_eq!(r.n_levels, 2001);
}

#[test]
fn decoupled_lorentzian_spectrum() {
    let p = decoupled();
    let d = discretize(&p, 40.0, 2001).unwrap();
    let sys = EffectiveSystem::new(p).unwrap();
    let c0 = InitialState::ground();
    let rate = slowest_decay(&sys, &c0);
    let t = 20.0 / rate;
    let opts = EvolveOptions { tol: 1e-6, samples: 4, ..Default::default() };
    let r = compare(&d, &sys, &c0, t, &opts).unwrap();
    let rms = r.rms_err_spectrum.expect("long enough for the spectrum comparison");
    assert!(rms <= 1e-3, "{r:?}");
}

#[test]
fn spectrum_error_floor() {
    // Below the revival time the level spacing is already converged; what is
    // left is the window truncation, which shrinks as W grows.
    let p = decoupled();
    let sys = EffectiveSystem::new(p).unwrap();
    let c0 = InitialState::ground();
    let t = 20.0 / slowest_decay(&sys, &c0);
    let opts = EvolveOptions { tol: 1e-5, samples: 1, ..Default::default() };
    let rms = |w: f64, n: usize| {
        compare(&discretize(&p, w, n).unwrap(), &sys, &c0, t, &opts)
            .unwrap()
            .rms_err_spectrum
            .unwrap()
    };
    let (coarse, fine) = (rms(40.0, 551), rms(40.0, 1101));
    assert!(coarse >= 1.5 * fine || (coarse - fine).abs() <= 0.01 * coarse, "{coarse} -> {fine}");
    let wide = rms(80.0, 1101);
    assert!(fine >= 1.5 * wide, "{fine} -> {wide}");
}

#[test]
fn late_time_populations() {
    let p = NormalizedParams::neighbor(1.0, 1.0, 1.0, 1.0, 1.0).to_physical().unwrap();
    let sys = EffectiveSystem::new(p).unwrap();
    let d = discretize(&p, 40.0, 2001).unwrap();
    let c0 = InitialState::ground();
    let period = 2.0 * PI / sys.delta_xi;
    let t_final = (20.0 / slowest_decay(&sys, &c0) + period).min(0.6 * d.revival_time());
    let samples = (t_final / 0.02).ceil() as usize;
    let opts = EvolveOptions { tol: 1e-5, samples, ..Default::default() };
    let traj = evolve(&d, &d.initial_state(&c0), t_final, &opts).unwrap();

    // Averaged over one Rabi period, both conditional spectra settle on I^st.
    let lt = LongTimeSpectrum::new(&sys, &c0).unwrap();
    let avg = time_average(&d, &traj, t_final - period, period).unwrap();
    let mut sq_sym = 0.0;
    let mut sq_st = 0.0;
    for (i, e) in d.energies.iter().enumerate() {
        let st = decompose_intensity(&lt.amplitudes(*e)).i_st;
        sq_sym += (avg[i][0] - avg[i][1]).powi(2);
        sq_st += (avg[i][0] - st[0]).powi(2) + (avg[i][1] - st[1]).powi(2);
    }
    let n = d.n_levels as f64;
    assert!((sq_sym / n).sqrt() < 2e-3, "{}", (sq_sym / n).sqrt());
    assert!((sq_st / (2.0 * n)).sqrt() < 2e-3, "{}", (sq_st / (2.0 * n)).sqrt());

    // The sector populations beat at δξ.
    let start = t_final - 4.0 * period;
    let (mut ts, mut ys) = (Vec::new(), Vec::new());
    for (t, x) in traj.times.iter().zip(&traj.states) {
        if *t >= start {
            ts.push(*t);
            ys.push(d.sector_population(x, 0) - d.sector_population(x, 1));
        }
    }
    let w = fit_frequency(&ts, &ys, 0.5 * sys.delta_xi, 1.5 * sys.delta_xi).unwrap();
    assert!((w / sys.delta_xi - 1.0).abs() < 0.01, "{w} vs {}", sys.delta_xi);
}

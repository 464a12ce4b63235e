use ionospec_core::spectra::{figure_preset, LongTimeSpectrum};
use ionospec_core::zeros::*;
use ionospec_core::*;

fn numeric_reduced(p: &NormalizedParams, j: usize) -> Vec<f64> {
    let range = default_zero_range(p, j).unwrap();
    find_dynamical_zeros(p, j, range)
        .unwrap()
        .into_iter()
        .map(|e| p.reduced_energy(e))
        .collect()
}

fn max_mismatch(found: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(found.len(), expected.len(), "{found:?} vs {expected:?}");
    found.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn reported_zeros_satisfy_the_touching_condition() {
    for (q, el, om) in [(1.0, 1.0, 1.0), (3.0, 1.0, 2.25), (1.0, 0.8, 2.0), (0.1, 1.0, 0.2)] {
        let p = NormalizedParams::neighbor(q, 1.0, om, 1.0, el);
        let sys = EffectiveSystem::new(p.to_physical().unwrap()).unwrap();
        let lt = LongTimeSpectrum::new(&sys, &InitialState::ground()).unwrap();
        let cond = ZeroCondition::new(lt.clone(), 0);
        let peak = (0..4001)
            .map(|i| lt.total_intensity(p.energy_from_reduced(-12.0 + 24.0 * i as f64 / 4000.0)))
            .fold(0.0, f64::max);
        for j in 0..2 {
            let cond = ZeroCondition::new(cond.spectrum().clone(), j);
            for e in find_dynamical_zeros(&p, j, default_zero_range(&p, j).unwrap()).unwrap() {
                assert!(cond.gap(e) < 1e-9 * peak, "q={q} E_D={e}: gap {}", cond.gap(e));
            }
        }
    }
}

#[test]
fn resonant_weak_pump_matches_closed_form_with_linear_convergence() {
    for q in [0.1, 0.3, 1.0, 3.0, -2.0] {
        let expected = weak_resonant_zeros(q).unwrap();
        let err = |om: f64| max_mismatch(&numeric_reduced(&NormalizedParams::neighbor(q, 1.0, om, 1.0, 1.0), 0), &expected);
        let (a, b) = (err(1e-2), err(1e-3));
        assert!(b < 5e-3, "q={q}: {b}");
        assert!(b <= 0.2 * a || b < 1e-6, "q={q}: {a} -> {b}");
    }
}

#[test]
fn detuned_weak_pump_ground_spectrum() {
    for (q, el) in [(1.0, 0.8), (2.0, 1.1), (-0.5, 0.7)] {
        let p = NormalizedParams::neighbor(q, 1.0, 1e-3, 1.0, el);
        let expected = weak_offres_zeros_ground(&p).unwrap();
        let found = numeric_reduced(&p, 0);
        let close: Vec<f64> = expected
            .iter()
            .map(|x| found.iter().map(|f| (f - x).abs()).fold(f64::INFINITY, f64::min))
            .collect();
        assert!(close.iter().all(|d| *d < 5e-3), "q={q} E_L={el}: {found:?} vs {expected:?}");
    }
}

#[test]
fn detuned_weak_pump_excited_spectrum() {
    for (q, el) in [(1.0, 0.8), (2.0, 1.1), (1.0, 1.2)] {
        let p = NormalizedParams::neighbor(q, 1.0, 1e-3, 1.0, el);
        let expected = weak_offres_zeros_excited(&p).unwrap();
        let found = numeric_reduced(&p, 1);
        for x in &expected {
            let d = found.iter().map(|f| (f - x).abs()).fold(f64::INFINITY, f64::min);
            assert!(d < 5e-3, "q={q} E_L={el}: {found:?} vs {expected:?}");
        }
        assert_eq!(found.len(), expected.len(), "q={q} E_L={el}: {found:?} vs {expected:?}");
    }
}

#[test]
fn fano_like_zero_comes_with_a_dynamical_zero() {
    for q in [0.1, 1.0, 3.0] {
        let p = NormalizedParams::neighbor(q, 1.0, 1e-3, 1.0, 1.0);
        let ef = match fano_like_zero(&p).unwrap() {
            FanoLikeZero::Real(x) => x,
            other => panic!("resonant zero should be real, got {other:?}"),
        };
        let found = numeric_reduced(&p, 0);
        assert!(found.iter().any(|x| (x - ef).abs() < 5e-3), "q={q}: {found:?}");
    }
}

#[test]
fn detuned_fano_like_zero_leaves_the_real_axis() {
    let p = NormalizedParams::neighbor(1.0, 1.0, 1e-3, 1.2, 1.0);
    let k = detuned_component(&p);
    let exact = component_zero(&p, k).unwrap().unwrap();
    let approx = fano_like_zero(&p).unwrap().value();
    assert!((exact - approx).norm() < 1e-2, "{exact} vs {approx}");
    assert!(exact.im.abs() > 0.1);
}

#[test]
fn omega_parity_and_index_coincidence() {
    let p = NormalizedParams::neighbor(3.0, 1.0, 2.25, 1.0, 1.0);
    let plus = numeric_reduced(&p, 0);
    let minus = numeric_reduced(&p.with_omega(-2.25), 0);
    assert_eq!(plus.len(), minus.len());
    for (a, b) in plus.iter().zip(&minus) {
        assert!((a - b).abs() < 1e-8);
    }
    // At resonance both conditional spectra share their zeros.
    assert_eq!(plus, numeric_reduced(&p, 1));
}

#[test]
fn detuning_splits_zero_sets() {
    let p = NormalizedParams::neighbor(1.0, 1.0, 2.0, 1.0, 0.8);
    let (z0, z1) = (numeric_reduced(&p, 0), numeric_reduced(&p, 1));
    assert!(!z0.is_empty() && !z1.is_empty());
    let nearest = z0
        .iter()
        .map(|a| z1.iter().map(|b| (a - b).abs()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min);
    assert!(nearest > 1e-3 && nearest < 1.0, "{z0:?} vs {z1:?}");
}

#[test]
fn sweep_topologies() {
    let cases = [("fig6a", vec![4, 2, 0]), ("fig6b", vec![2, 0]), ("fig6c", vec![2, 4, 2, 4])];
    for (name, profile) in cases {
        let preset = figure_preset(name).unwrap();
        let trace = sweep_zero_traces(&preset.params, &preset.omegas, 0, &SweepOptions::default()).unwrap();
        assert_eq!(trace.count_profile(0.01), profile, "{name}");
        // Ω ↔ −Ω symmetric zero sets.
        for (om, zs) in trace.omega.iter().zip(&trace.zeros) {
            if let Some(k) = trace.omega.iter().position(|o| *o == -om) {
                assert_eq!(zs.len(), trace.zeros[k].len(), "{name} at {om}");
            }
        }
        for b in &trace.branches {
            for w in b.e_d.windows(2) {
                assert!((w[1] - w[0]).abs() <= 0.1 * preset.params.gamma_a, "{name} branch {}", b.id);
            }
        }
    }
}

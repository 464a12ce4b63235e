//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrates `f` over [a, b] to absolute `abs_tol` or relative `rel_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    intervals.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() {
            return Err(Error::Integration("integrand produced a non-finite value".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature { value, error, evaluations });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::Integration(format!(
                "error estimate {error:e} above tolerance after {max_intervals} subintervals"
            )));
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Integrates over the whole real line via E = c + s·tan θ.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    center: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    let half = std::f64::consts::FRAC_PI_2;
    integrate(
        |theta| {
            let (s, c) = theta.sin_cos();
            if c <= 0.0 {
                return 0.0;
            }
            let e = center + scale * s / c;
            f(e) * scale / (c * c)
        },
        -half,
        half,
        abs_tol,
        rel_tol,
        max_intervals,
    )
}

/// Integrates over the real line split at `breaks`; the outer half-lines
/// use E = b ± s·u/(1−u) with `s` the outermost piece width.
pub fn integrate_real_line_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    let mut b: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    if b.is_empty() {
        return integrate_real_line(f, 0.0, 1.0, abs_tol, rel_tol, 4000);
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1e-300));
    let span = (b[b.len() - 1] - b[0]).max(1e-300);
    let pieces = b.len() + 1;
    let tol = abs_tol / pieces as f64;
    let mut total = Quadrature { value: 0.0, error: 0.0, evaluations: 0 };
    let mut add = |q: Quadrature| {
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    };
    for w in b.windows(2) {
        add(integrate(&mut f, w[0], w[1], tol, rel_tol, 2000)?);
    }
    let (lo, hi) = (b[0], b[b.len() - 1]);
    let s = span;
    add(integrate(
        |u| {
            let r = 1.0 - u;
            if r <= 0.0 {
                0.0
            } else {
                f(hi + s * u / r) * s / (r * r)
            }
        },
        0.0,
        1.0,
        tol,
        rel_tol,
        2000,
    )?);
    add(integrate(
        |u| {
            let r = 1.0 - u;
            if r <= 0.0 {
                0.0
            } else {
                f(lo - s * u / r) * s / (r * r)
            }
        },
        0.0,
        1.0,
        tol,
        rel_tol,
        2000,
    )?);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn narrow_peaks_with_breaks() {
        let (g1, g2) = (1e-6, 0.5);
        let f = |x: f64| g1 / PI / ((x - 3.0).powi(2) + g1 * g1) + g2 / PI / ((x + 1.0).powi(2) + g2 * g2);
        let breaks = [3.0 - 10.0 * g1, 3.0, 3.0 + 10.0 * g1, -1.0 - 5.0 * g2, -1.0, -1.0 + 5.0 * g2];
        let q = integrate_real_line_with_breaks(f, &breaks, 1e-12, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        assert!((q.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn lorentzian_real_line() {
        let g = 0.01;
        let q = integrate_real_line(|x| g / PI / ((x - 0.3).powi(2) + g * g), 0.3, 1.0, 1e-12, 1e-12, 2000)
            .unwrap();
        assert!((q.value - 1.0).abs() < 1e-10);
    }
}

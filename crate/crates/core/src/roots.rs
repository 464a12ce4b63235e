//! Scalar root bracketing, 1-D minimization and polynomial roots.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

/// Brent's method on a sign-changing bracket [a, b].
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!(
            "[{a}, {b}] does not bracket a root (f = {fa:e}, {fb:e})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootFinding(format!("non-finite function value at {b}")));
        }
    }
    Err(Error::RootFinding(format!("no convergence after {max_iter} iterations")))
}

/// Brent minimization on [a, b]. Returns (x_min, f(x_min)).
pub fn brent_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = 1e-12 * x.abs() + 0.5 * xtol;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Evaluates a polynomial with coefficients in descending powers.
pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(ZERO, |acc, &c| acc * x + c)
}

fn poly_eval_deriv(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Drops negligible leading coefficients (|c| < 1e-14·max|c|).
pub fn strip_leading(coeffs: &[C64]) -> Result<&[C64]> {
    let max = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    if max == 0.0 || !max.is_finite() {
        return Err(Error::ZeroPolynomial);
    }
    let first = coeffs
        .iter()
        .position(|c| c.norm() >= 1e-14 * max)
        .ok_or(Error::ZeroPolynomial)?;
    Ok(&coeffs[first..])
}

/// All complex roots of the polynomial with descending-power coefficients.
///
/// Exact zero roots are split off first; the remainder is solved by
/// Aberth–Ehrlich iteration followed by Newton polishing. Every root is
/// checked against |p(r)| ≤ 1e-9·max|c|·max(1,|r|)^deg.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let c = strip_leading(coeffs)?;
    let degree = c.len() - 1;
    if degree == 0 {
        return Err(Error::RootFinding("constant polynomial has no roots".into()));
    }
    let trailing_zeros = c.iter().rev().take_while(|z| **z == ZERO).count();
    let reduced = &c[..c.len() - trailing_zeros];
    let mut roots = vec![ZERO; trailing_zeros];
    let lead = reduced[0];
    let monic: Vec<C64> = reduced.iter().map(|&z| z / lead).collect();
    let n = monic.len() - 1;
    if n > 0 {
        roots.extend(aberth(&monic)?);
    }

    let max = c.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    for r in &roots {
        let bound = 1e-9 * max * r.norm().max(1.0).powi(degree as i32);
        let res = poly_eval(c, *r).norm();
        if !(res <= bound) {
            return Err(Error::RootFinding(format!(
                "root {r} has residual {res:e} above {bound:e}"
            )));
        }
    }
    Ok(roots)
}

fn aberth(monic: &[C64]) -> Result<Vec<C64>> {
    let n = monic.len() - 1;
    if n == 1 {
        return Ok(vec![-monic[1]]);
    }
    // Initial guesses on a circle bounded by the Cauchy radius.
    let radius = 1.0 + monic[1..].iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let r0 = radius.min(
        monic[1..]
            .iter()
            .enumerate()
            .map(|(k, z)| (z.norm() * n as f64).powf(1.0 / (k + 1) as f64))
            .fold(0.0_f64, f64::max)
            .max(1e-3),
    );
    let center = -monic[1] / n as f64;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            center + C64::from_polar(r0, theta)
        })
        .collect();

    let mut converged = false;
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let (p, dp) = poly_eval_deriv(monic, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == ZERO {
                        C64::new(1e300, 0.0)
                    } else {
                        ONE / d
                    }
                })
                .sum();
            let step = ratio / (ONE - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && z.iter().any(|r| !r.is_finite()) {
        return Err(Error::RootFinding("Aberth iteration diverged".into()));
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = poly_eval_deriv(monic, *r);
            if dp == ZERO || p == ZERO {
                break;
            }
            let next = *r - p / dp;
            if poly_eval(monic, next).norm() < p.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Real roots of a polynomial with real descending-power coefficients,
/// sorted ascending. Roots with |Im| ≤ `imag_tol`·max(1,|r|) count as real.
pub fn real_poly_roots(coeffs: &[f64], imag_tol: f64) -> Result<Vec<f64>> {
    let c: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
    let mut out: Vec<f64> = poly_roots(&c)?
        .into_iter()
        .filter(|r| r.im.abs() <= imag_tol * r.norm().max(1.0))
        .map(|r| r.re)
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

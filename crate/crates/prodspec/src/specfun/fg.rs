//! The two ensemble weight functions.
//!
//! `f_m(x, u)` is the polynomial-side factor: an entire double series in
//! (x², xu) generalizing e^{x² - 2xu} (its exact M = 0 value), with the
//! chain offsets entering through ∏_l Γ(ν_l + 2j + k + 1) denominators.
//!
//! `g_m(y, v)` is the source-side weight generalizing the Gaussian
//! e^{-y² + 2yv}. For 1 ≤ M ≤ 3 it is computed by iterated quadrature
//! over the Ginibre radial variables (t = e^λ per factor); for larger M
//! by a single Mellin–Barnes line whose integrand is the raw parabolic
//! cylinder factor times ∏Γ(ν_l + s). Both routes carry their exponents
//! in log form, so `g_m_log` stays finite where the value itself would
//! overflow.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::gamma::{ln_gamma_real, log_gamma};
use crate::specfun::pcf::raw_mellin_log;
use crate::specfun::{EvalResult, NuVector};

const ARG_LIMIT: f64 = 35.0;
/// g decays only stretched-exponentially in y (exponent ~ -(M+1/2)(2y²)^{1/(2M+1)}),
/// so its quadrature cuts track the receding saddle and stay reliable far
/// beyond the f_m series range; 120 is the span cross-checked between routes.
const G_ARG_LIMIT: f64 = 120.0;

/// Polynomial-side weight f_M(x, u), entire in both arguments.
///
/// Preconditions: |x| ≤ 35 and |2xu| ≤ 200 (the series is exact but its
/// largest term grows with |2xu|; beyond 200 the evaluation is refused
/// rather than silently degraded).
pub fn f_m(nus: &NuVector, x: f64, u: Complex64) -> Result<EvalResult> {
    if !x.is_finite() || x.abs() > ARG_LIMIT {
        return Err(Error::Domain(format!("f_m needs |x| ≤ {ARG_LIMIT}, got {x}")));
    }
    let w = -2.0 * x * u;
    if w.norm() > 200.0 {
        return Err(Error::NonConvergence(format!(
            "f_m series rejected: |2xu| = {} > 200",
            w.norm()
        )));
    }
    let m = nus.m();
    if m == 0 {
        let value = (Complex64::new(x * x, 0.0) + w).exp();
        return Ok(EvalResult {
            value,
            abs_error_estimate: 4e-16 * value.norm(),
            terms_or_nodes_used: 1,
        });
    }

    let x2 = x * x;
    // base_j = x^{2j} / (j! ∏_l Γ(ν_l + 2j + 1)), updated by recurrence.
    let mut base = 1.0f64;
    for &nu in nus.values() {
        base /= ln_gamma_real(nu as f64 + 1.0).exp();
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_term = 0.0f64;
    let mut terms = 0usize;
    let mut quiet_rows = 0usize;
    let mut last_tail = 0.0f64;
    for j in 0..2000usize {
        let jf = j as f64;
        let mut t = Complex64::new(base, 0.0);
        let mut row_max = 0.0f64;
        let mut small_run = 0usize;
        for k in 0..10_000usize {
            sum += t;
            terms += 1;
            let tn = t.norm();
            row_max = row_max.max(tn);
            if tn <= 1e-17 * sum.norm().max(1e-300) {
                small_run += 1;
                if small_run >= 3 && k as f64 > w.norm() {
                    last_tail = tn;
                    break;
                }
            } else {
                small_run = 0;
            }
            let kf = k as f64;
            let mut denom = kf + 1.0;
            for &nu in nus.values() {
                denom *= nu as f64 + 2.0 * jf + kf + 1.0;
            }
            t *= w / denom;
        }
        max_term = max_term.max(row_max);
        if row_max <= 1e-17 * sum.norm().max(1e-300) {
            quiet_rows += 1;
            if quiet_rows >= 2 {
                break;
            }
        } else {
            quiet_rows = 0;
        }
        // advance base_j -> base_{j+1}
        let mut denom = jf + 1.0;
        for &nu in nus.values() {
            let a = nu as f64 + 2.0 * jf;
            denom *= (a + 1.0) * (a + 2.0);
        }
        base *= x2 / denom;
    }
    Ok(EvalResult {
        value: sum,
        abs_error_estimate: last_tail + 1.1e-16 * max_term * (terms as f64).sqrt(),
        terms_or_nodes_used: terms,
    })
}

/// Log of f_m; -∞ real part encodes an exact zero of the entire function.
pub(crate) fn f_m_log(nus: &NuVector, x: f64, u: Complex64) -> Result<Complex64> {
    if nus.m() == 0 {
        return Ok(Complex64::new(x * x, 0.0) - 2.0 * x * u);
    }
    let r = f_m(nus, x, u)?;
    if r.value.norm() == 0.0 {
        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
    }
    Ok(r.value.ln())
}

/// Independent contour representation of f_M: an M-fold product of
/// anticlockwise circles |s_l| = r,
///   f_M = (1/2π)^M ∮⋯∮ ∏_l s_l^{-ν_l} e^{s_l} · e^{x²/P² - 2xu/P} dθ,
/// P = ∏ s_l, evaluated by the trapezoid rule (spectrally accurate for
/// periodic integrands). The shared radius is chosen to minimize the
/// magnitude bound x²/r^{2M} + 2|xu|/r^M + M·r: unit circles lose ~15
/// digits already at |x| = |u| = 3, the optimized radius keeps the bound
/// flat. Supported for 1 ≤ M ≤ 3 (cross-validation route).
pub(crate) fn f_m_contour(nus: &NuVector, x: f64, u: Complex64) -> Result<EvalResult> {
    let m = nus.m();
    if m == 0 {
        return f_m(nus, x, u);
    }
    if m > 3 {
        return Err(Error::Domain("f_m contour route supports M ≤ 3".into()));
    }
    let x2 = x * x;
    let xu2 = 2.0 * (x * u).norm();
    let bound = |r: f64| x2 / r.powi(2 * m as i32) + xu2 / r.powi(m as i32) + m as f64 * r;
    // Golden-section search for the radius on [1, 40].
    let (mut a, mut b) = (1.0f64, 40.0f64);
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..70 {
        let c1 = b - g * (b - a);
        let c2 = a + g * (b - a);
        if bound(c1) < bound(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    let r = 0.5 * (a + b);
    if bound(r) > 600.0 {
        return Err(Error::NonConvergence(format!(
            "f_m contour magnitude bound e^{:.0} unmanageable",
            bound(r)
        )));
    }

    let mut prev: Option<Complex64> = None;
    let mut n = 16usize;
    let n_cap = match m {
        1 => 4096,
        2 => 1024,
        _ => 256,
    };
    loop {
        let thetas: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let zs: Vec<Complex64> = thetas
            .iter()
            .map(|&th| Complex64::from_polar(r, th))
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; m];
        'outer: loop {
            let mut p = Complex64::new(1.0, 0.0);
            let mut expo = Complex64::new(0.0, 0.0);
            for (l, &i) in idx.iter().enumerate() {
                let s = zs[i];
                p *= s;
                let nu = nus.values()[l] as f64;
                expo += s - nu * Complex64::new(r.ln(), thetas[i]);
            }
            expo += x2 / (p * p) - 2.0 * x * u / p;
            sum += expo.exp();
            // multi-index increment
            for d in 0..m {
                idx[d] += 1;
                if idx[d] < n {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
        let value = sum / (n as f64).powi(m as i32);
        if let Some(pv) = prev {
            let err = (value - pv).norm();
            if err <= 1e-12 * value.norm().max(1e-300) {
                return Ok(EvalResult {
                    value,
                    abs_error_estimate: err + 1e-16 * bound(r).exp() * 1e-3,
                    terms_or_nodes_used: n.pow(m as u32),
                });
            }
        }
        prev = Some(value);
        n *= 2;
        if n > n_cap {
            return Err(Error::NonConvergence(
                "f_m contour trapezoid did not settle".into(),
            ));
        }
    }
}

/// Source-side weight g_M(y, v) for real y ≠ 0, complex v.
pub fn g_m(nus: &NuVector, y: f64, v: Complex64) -> Result<EvalResult> {
    let (log, rel, nodes) = g_m_log(nus, y, v)?;
    let value = log.exp();
    Ok(EvalResult {
        value,
        abs_error_estimate: value.norm() * (rel + 1e-15),
        terms_or_nodes_used: nodes,
    })
}

/// log g_M(y, v) with a relative error estimate; the resolution of choice
/// for kernel quadratures, which exponentiate only pairwise sums.
/// Routes: closed form (M = 0), iterated radial quadrature (M ≤ 3),
/// Mellin–Barnes line (M ≥ 4).
pub fn g_m_log(nus: &NuVector, y: f64, v: Complex64) -> Result<(Complex64, f64, usize)> {
    if y == 0.0 || !y.is_finite() || y.abs() > G_ARG_LIMIT {
        return Err(Error::Domain(format!(
            "g_m needs real y ≠ 0 with |y| ≤ {G_ARG_LIMIT}, got {y}"
        )));
    }
    match nus.m() {
        0 => Ok((Complex64::new(-y * y, 0.0) + 2.0 * y * v, 2e-16, 1)),
        1..=3 => g_m_quad_log(nus, y, v),
        _ => g_m_mellin_log(nus, y, v),
    }
}

/// Iterated-quadrature route: g_M = ∫(0,∞)^M ∏_l t_l^{ν_l-1} e^{-t_l} ·
/// exp(-y²/P² + 2yv/P) dt, P = ∏ t_l, with t_l = e^{λ_l} per dimension.
/// The integrand vanishes double-exponentially as P → 0 and exponentially
/// as any t_l → ∞, so a fixed box in λ-space with panel doubling and a
/// two-pass max-shift is stable in log form.
fn g_m_quad_log(nus: &NuVector, y: f64, v: Complex64) -> Result<(Complex64, f64, usize)> {
    let m = nus.m();
    debug_assert!((1..=3).contains(&m));
    let y2 = y * y;
    let yv = y * v;
    // The symmetric saddle sits at t_l = t* = (2y²)^{1/(2M+1)}, where the
    // integrand magnitude is ~e^{-(M+1/2)t*}.  Every cut below must clear
    // the integrand relative to THAT scale, not relative to 1, so the
    // smallness budget joins the fixed margins once the saddle recedes.
    let t_star = (2.0 * y2).powf(1.0 / (2 * m + 1) as f64);
    let smallness = (m as f64 + 0.5) * t_star + 2.0 * yv.norm() / t_star.powi(m as i32);
    // The Gaussian factor itself peaks at e^{(Re v)²} (P ≈ y/Re v), and each
    // spectator dimension contributes at most max(0, ν ln ν - ν).
    let c_gauss = if y * v.re > 0.0 { v.re * v.re } else { 0.0 };
    let c_nu: f64 = nus
        .values()
        .iter()
        .map(|&nu| {
            let nu = nu as f64;
            (nu * nu.max(1.0).ln() - nu).max(0.0)
        })
        .sum();
    let budget = smallness + c_gauss + c_nu;
    // Per-dimension upper cut: e^{-t} beats t^{ν-1} beyond 50 + 6ν for O(1)
    // results; otherwise t - ν ln t must additionally absorb the budget.
    let his: Vec<f64> = nus
        .values()
        .iter()
        .map(|&nu| (50.0 + 6.0 * nu as f64).max(36.0 + 6.0 * nu as f64 + budget).ln())
        .collect();
    let hi_max = his.iter().cloned().fold(f64::MIN, f64::max);
    // Product cut: y²/P² - 2|yv|/P past the margin suppresses the Gaussian
    // factor, so Σλ below ln P_min contributes nothing; each dimension gets
    // the slack of the others' upper cuts.
    let margin = 52.0f64.max(36.0 + budget);
    let bmag = 2.0 * yv.norm();
    let qroot = (bmag + (bmag * bmag + 4.0 * margin * y2).sqrt()) / (2.0 * y2);
    let lo_common = -qroot.ln() - (m as f64 - 1.0) * hi_max - 1.0;

    let mut base_panels: usize = match m {
        1 => 8,
        2 => 6,
        _ => 4,
    };
    let max_level = match m {
        1 => 7,
        2 => 4,
        _ => 2,
    };
    let mut prev: Option<(Complex64, f64)> = None; // (I, shift)
    let mut nodes_used = 0usize;
    for level in 0..=max_level {
        let mut grids: Vec<Vec<(f64, f64)>> = Vec::with_capacity(m);
        for l in 0..m {
            let mut g = Vec::new();
            quad::panel_nodes(lo_common, his[l], base_panels, &mut g);
            grids.push(g);
        }
        let ell = |lams: &[f64]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut lam_sum = 0.0;
            for (l, &lam) in lams.iter().enumerate() {
                acc += Complex64::new(nus.values()[l] as f64 * lam - lam.exp(), 0.0);
                lam_sum += lam;
            }
            let pinv = (-lam_sum).exp();
            acc + Complex64::new(-y2 * pinv * pinv, 0.0) + 2.0 * yv * pinv
        };
        // Pass 1: max Re ℓ for the shift; pass 2: shifted sum.
        let mut shift = f64::MIN;
        let mut idx = vec![0usize; m];
        let mut lams = vec![0.0f64; m];
        'scan: loop {
            for d in 0..m {
                lams[d] = grids[d][idx[d]].0;
            }
            shift = shift.max(ell(&lams).re);
            for d in 0..m {
                idx[d] += 1;
                if idx[d] < grids[d].len() {
                    continue 'scan;
                }
                idx[d] = 0;
            }
            break;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        idx.iter_mut().for_each(|i| *i = 0);
        'accum: loop {
            let mut wtot = 1.0f64;
            for d in 0..m {
                let (lam, w) = grids[d][idx[d]];
                lams[d] = lam;
                wtot *= w;
            }
            sum += wtot * (ell(&lams) - shift).exp();
            count += 1;
            for d in 0..m {
                idx[d] += 1;
                if idx[d] < grids[d].len() {
                    continue 'accum;
                }
                idx[d] = 0;
            }
            break;
        }
        nodes_used += count;
        if let Some((ps, pshift)) = prev {
            // Compare the two levels at a common shift.
            let rel = (sum * (shift - pshift).exp() - ps).norm() / sum.norm().max(1e-300);
            if rel <= 1e-12 {
                if sum.norm() == 0.0 {
                    return Err(Error::NonConvergence("g_m quadrature summed to zero".into()));
                }
                return Ok((Complex64::new(shift, 0.0) + sum.ln(), rel, nodes_used));
            }
        }
        prev = Some((sum, shift));
        if level == max_level {
            if let Some((s, sh)) = prev {
                if s.norm() > 0.0 {
                    // Accept with the last inter-level difference as error.
                    return Ok((Complex64::new(sh, 0.0) + s.ln(), 1e-9, nodes_used));
                }
            }
            return Err(Error::NonConvergence("g_m quadrature did not settle".into()));
        }
        base_panels *= 2;
    }
    unreachable!()
}

/// Mellin–Barnes route:
/// g_M(y, v) = (1/2πi) ∫ (√2|y|)^{-s} R(s, w) ∏_l Γ(ν_l + s) ds with
/// w = -√2·sgn(y)·v and R the raw parabolic-cylinder factor. Absolutely
/// convergent for M ≥ 1; abscissa at the saddle scale (2y²)^{1/(2M+1)}.
pub(crate) fn g_m_mellin_log(
    nus: &NuVector,
    y: f64,
    v: Complex64,
) -> Result<(Complex64, f64, usize)> {
    let m = nus.m();
    debug_assert!(m >= 1);
    let w = -std::f64::consts::SQRT_2 * y.signum() * v;
    let lscale = (std::f64::consts::SQRT_2 * y.abs()).ln();
    let c = (2.0 * y * y).powf(1.0 / (2 * m + 1) as f64).max(1.0);
    let rate = 0.5 * m as f64 * PI;
    let t_max = (55.0 + c * lscale.abs()) / (0.9 * rate);

    let mut nodes_inner = 0usize;
    let ell = |t: f64| -> Result<Complex64> {
        let s = Complex64::new(c, t);
        let (raw, _, n) = raw_mellin_log(s, w)?;
        let mut acc = -s * lscale + raw;
        for &nu in nus.values() {
            acc += log_gamma(s + nu as f64)?;
        }
        let _ = n;
        Ok(acc)
    };
    let shift = ell(0.0)?.re;
    let mut fail: Option<Error> = None;
    let mut f = |t: f64| match ell(t) {
        Ok(e) => {
            nodes_inner += 1;
            (e - shift).exp()
        }
        Err(er) => {
            fail = Some(er);
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let r = quad::integrate_breakpoints(&mut f, &[-t_max, 0.0, t_max], 8, 1e-11);
    if let Some(er) = fail {
        return Err(er);
    }
    let r = r?;
    if r.value.norm() == 0.0 {
        return Err(Error::NonConvergence("g_m mellin line summed to zero".into()));
    }
    let val = r.value / (2.0 * PI);
    let rel = r.abs_error_estimate / r.value.norm();
    Ok((
        Complex64::new(shift, 0.0) + val.ln(),
        rel,
        r.terms_or_nodes_used,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_m0_closed_form() {
        let nus = NuVector::new(vec![]);
        let u = Complex64::new(0.4, -1.3);
        let r = f_m(&nus, 1.7, u).unwrap();
        let exact = (Complex64::new(1.7 * 1.7, 0.0) - 2.0 * 1.7 * u).exp();
        assert!((r.value - exact).norm() < 1e-13 * exact.norm());
    }

    #[test]
    fn g_m0_closed_form() {
        let nus = NuVector::new(vec![]);
        let v = Complex64::new(-0.2, 0.9);
        let r = g_m(&nus, 0.8, v).unwrap();
        let exact = (Complex64::new(-0.64, 0.0) + 2.0 * 0.8 * v).exp();
        assert!((r.value - exact).norm() < 1e-13 * exact.norm());
    }

    #[test]
    fn g_quad_and_mellin_agree_m1() {
        let nus = NuVector::new(vec![1]);
        let v = Complex64::new(0.3, -0.6);
        let (a, _, _) = g_m_quad_log(&nus, 1.1, v).unwrap();
        let (b, _, _) = g_m_mellin_log(&nus, 1.1, v).unwrap();
        assert!(
            (a.exp() - b.exp()).norm() < 1e-9 * a.exp().norm(),
            "{} vs {}",
            a.exp(),
            b.exp()
        );
    }
}

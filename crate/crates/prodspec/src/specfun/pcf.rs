//! Parabolic cylinder function U(c, z) through the integral
//!
//!   U(c, z) = e^{-z²/4} / Γ(c + 1/2) · ∫_0^∞ t^{c-1/2} e^{-t²/2 - zt} dt,
//!
//! valid for Re c > -1/2 and all complex z. The integral (the "raw"
//! factor, a Mellin transform of the Gaussian-times-exponential weight)
//! is also the building block of the source-side weight g_M, so it is
//! computed in log form to survive the large exponents that appear there.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::gamma::log_gamma;
use crate::specfun::EvalResult;

/// log ∫_0^∞ t^{s-1} e^{-t²/2 - w t} dt for Re s > 0, any complex w.
///
/// Substituting t = e^λ turns the integrand into exp(ℓ(λ)) with
/// ℓ(λ) = sλ - e^{2λ}/2 - w e^λ, which decays double-exponentially on
/// the right and exponentially (rate Re s) on the left. The real part of
/// ℓ peaks at λ* = ln q, q the positive root of q² + Re(w) q = Re(s);
/// the quadrature window is grown outward from there until the peak is
/// undercut by e^{-48}, and the sum is shifted by ℓ(λ*) so only the log
/// of the result is ever exponentiated.
///
/// Returns (log value, relative error estimate, nodes).
pub(crate) fn raw_mellin_log(s: Complex64, w: Complex64) -> Result<(Complex64, f64, usize)> {
    let sig = s.re;
    if !(sig > 0.0) {
        return Err(Error::Domain(format!("raw mellin factor needs Re s > 0, got {s}")));
    }
    let wr = w.re;
    let q = 0.5 * (-wr + (wr * wr + 4.0 * sig).sqrt());
    let lam_star = q.ln();
    let phi = |lam: f64| sig * lam - 0.5 * (2.0 * lam).exp() - wr * lam.exp();
    let phi_star = phi(lam_star);
    let width = 1.0 / (q * q + sig).sqrt();
    const DROP: f64 = 48.0;

    let mut hi = lam_star + width;
    let mut step = width.max(0.25);
    let mut guard = 0;
    while phi(hi) > phi_star - DROP {
        hi += step;
        step *= 1.3;
        guard += 1;
        if guard > 300 {
            return Err(Error::NonConvergence("raw mellin window (right) did not close".into()));
        }
    }
    let mut lo = lam_star - width;
    step = width.max(0.25);
    guard = 0;
    while phi(lo) > phi_star - DROP {
        lo -= step;
        step *= 1.3;
        guard += 1;
        if guard > 300 {
            return Err(Error::NonConvergence("raw mellin window (left) did not close".into()));
        }
    }

    let mut pts = vec![
        lo,
        lam_star - 3.0 * width,
        lam_star - width,
        lam_star + width,
        lam_star + 3.0 * width,
        hi,
    ];
    pts.retain(|&x| (lo..=hi).contains(&x));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let shift = Complex64::new(phi_star, 0.0);
    let mut f = |lam: f64| {
        let el = lam.exp();
        let e2l = (2.0 * lam).exp();
        let ell = s * lam - 0.5 * e2l - w * el;
        (ell - shift).exp()
    };
    let r = quad::integrate_breakpoints(&mut f, &pts, 2, 5e-14)?;
    if r.value.norm() == 0.0 {
        return Err(Error::NonConvergence("raw mellin factor summed to zero".into()));
    }
    let rel = r.abs_error_estimate / r.value.norm();
    Ok((shift + r.value.ln(), rel, r.terms_or_nodes_used))
}

/// U(c, z) for Re c > -1/2.
pub fn pcf_u(c: Complex64, z: Complex64) -> Result<EvalResult> {
    if !(c.re > -0.5) {
        return Err(Error::Domain(format!("pcf_u needs Re c > -1/2, got c = {c}")));
    }
    let s = c + 0.5;
    let (log_raw, rel, nodes) = raw_mellin_log(s, z)?;
    let log_val = log_raw - z * z * 0.25 - log_gamma(s)?;
    let value = log_val.exp();
    Ok(EvalResult {
        value,
        abs_error_estimate: value.norm() * (rel + 1e-15),
        terms_or_nodes_used: nodes,
    })
}

/// Large-|z| asymptotic series of U(c, z), optimally truncated:
/// the recessive expansion z^{-c-1/2} e^{-z²/4} Σ_s (-1)^s (c+1/2)_{2s}/(s!(2z²)^s)
/// alone for |ph z| < π/2, joined past the Stokes rays by
/// ±i e^{∓iπc} √(2π)/Γ(c+1/2) · z^{c-1/2} e^{z²/4} Σ_s (1/2-c)_{2s}/(s!(2z²)^s).
pub fn pcf_u_asymptotic(c: Complex64, z: Complex64) -> Result<Complex64> {
    // Both components carry the same algebraic series with c ↦ -c:
    // Σ_s (a)_{2s} (±1)^s / (s! (2z²)^s), truncated at the turning term.
    let w = 1.0 / (2.0 * z * z);
    let series = |a0: Complex64, alt: f64| -> Complex64 {
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        let mut last = f64::INFINITY;
        for s in 1..48u32 {
            let sf = s as f64;
            term = term * (a0 + (2.0 * sf - 2.0)) * (a0 + (2.0 * sf - 1.0)) * alt * w / sf;
            let t = term.norm();
            if t >= last {
                break;
            }
            sum += term;
            last = t;
            if t <= 1e-9 * sum.norm() {
                break;
            }
        }
        sum
    };
    let rec = ((-c - 0.5) * z.ln() - z * z * 0.25).exp() * series(c + 0.5, -1.0);
    let ph = z.arg();
    if ph.abs() < 0.5 * PI {
        // Before the Stokes rays the second component's multiplier is zero;
        // its error-function turn-on near |arg z| = π/2 happens while the
        // component is still below ~1e-8 of the total for |z| ≥ 8.
        return Ok(rec);
    }
    // Past the Stokes rays add ±i·e^{∓iπc}·√(2π)/Γ(c+1/2)·e^{z²/4} z^{c-1/2}
    // (sign following sgn arg z), equal in size to the first component on the
    // anti-Stokes rays |arg z| = 3π/4 and dominant beyond them.
    let lg = log_gamma(c + 0.5)?;
    let pm = if ph > 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, pm) * (Complex64::new(0.0, -pm * PI) * c).exp();
    let dom = (0.5 * (2.0 * PI).ln() - lg + (c - 0.5) * z.ln() + z * z * 0.25).exp()
        * series(0.5 - c, 1.0)
        * phase;
    Ok(rec + dom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_factor_at_s1_w0_is_sqrt_half_pi() {
        // ∫_0^∞ e^{-t²/2} dt = √(π/2).
        let (lg, _, _) = raw_mellin_log(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let v = lg.exp();
        assert!((v.re - (PI / 2.0).sqrt()).abs() < 1e-13, "got {v}");
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn u_at_c_half_is_gaussian() {
        // U(1/2, z) = e^{-z²/4}·√(π/2)/Γ(1)·… reduces to e^{-z²/4} times
        // the complementary error function scaling; check against the
        // exact identity U(1/2, z) = e^{z²/4}·√(π/2)·erfc(z/√2) at z = 0:
        // U(1/2, 0) = √(π/2)/Γ(1)·Γ(1/2)/… — simplest closed point:
        // ∫_0^∞ e^{-t²/2} dt/Γ(1) = √(π/2).
        let r = pcf_u(Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((r.value.re - (PI / 2.0).sqrt()).abs() < 1e-13);
    }
}

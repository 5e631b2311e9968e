//! The three Meijer-G functions attached to a Ginibre chain with offsets
//! ν_1..ν_M:
//!
//! - `meijer_g10`: G^{1,0}_{0,M+1}(z | 0; ν_1..ν_M), the entire series
//!   Σ_k (-z)^k / (k! ∏_l Γ(ν_l+1+k)) — the Bessel-type factor on the
//!   polynomial side of the limiting kernels.
//! - `meijer_gm10`: G^{M+1,0}_{0,M+1}(z | 0; ν_1..ν_M), the Mellin–Barnes
//!   line integral with numerator Γ(s)·∏_l Γ(ν_l+s) — the weight-side
//!   factor. Exponentially small as z → +∞.
//! - `meijer_gm0`: G^{M,0}_{0,M+1}(z | ν_1..ν_M; 0), numerator
//!   ∏_l Γ(ν_l+s) over denominator Γ(1-s) — the hard-edge factor. For
//!   M = 1 it reduces to z^{ν/2} J_ν(2√z).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, SeriesAcc};
use crate::specfun::gamma::{ln_gamma_real, log_gamma};
use crate::specfun::{EvalResult, NuVector};

/// G^{1,0}_{0,M+1}(z): entire in z, evaluated by its Taylor series with
/// term recursion and hysteresis stopping.
pub fn meijer_g10(nus: &NuVector, z: Complex64) -> Result<EvalResult> {
    let m = nus.m();
    if m == 0 {
        let value = (-z).exp();
        return Ok(EvalResult {
            value,
            abs_error_estimate: 2e-16 * value.norm(),
            terms_or_nodes_used: 1,
        });
    }
    let mut term = Complex64::new(1.0, 0.0);
    for &nu in nus.values() {
        term /= gamma_int_real(nu as f64 + 1.0);
    }
    let mut acc = SeriesAcc::new();
    for k in 0..10_000u32 {
        if acc.push(term, 1e-17) {
            return Ok(EvalResult {
                value: acc.sum,
                abs_error_estimate: term.norm() + acc.rounding_floor(),
                terms_or_nodes_used: acc.terms,
            });
        }
        let kf = k as f64;
        let mut denom = kf + 1.0;
        for &nu in nus.values() {
            denom *= nu as f64 + 1.0 + kf;
        }
        term *= -z / denom;
    }
    Err(Error::NonConvergence(format!(
        "meijer_g10 series did not converge at z = {z}"
    )))
}

fn gamma_int_real(x: f64) -> f64 {
    ln_gamma_real(x).exp()
}

/// G^{M+1,0}_{0,M+1}(z) for Re z > 0.
pub fn meijer_gm10(nus: &NuVector, z: Complex64) -> Result<EvalResult> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!(
            "meijer_gm10 is exposed for Re z > 0, got {z}"
        )));
    }
    meijer_gm10_analytic(nus, z)
}

/// Analytic continuation of `meijer_gm10` to the sector
/// |arg z| < (M+1)π/2, where the Mellin–Barnes line converges.
pub(crate) fn meijer_gm10_analytic(nus: &NuVector, z: Complex64) -> Result<EvalResult> {
    let m = nus.m();
    if m == 0 {
        // Single gamma factor: the line integral is exactly e^{-z}.
        let value = (-z).exp();
        return Ok(EvalResult {
            value,
            abs_error_estimate: 2e-16 * value.norm(),
            terms_or_nodes_used: 1,
        });
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain("meijer_gm10 at z = 0".into()));
    }
    let order = m as f64 + 1.0;
    let max_rate = 0.5 * order * PI;
    let arg = z.arg();
    if arg.abs() >= max_rate - 1e-9 {
        return Err(Error::Geometry(format!(
            "meijer_gm10 line diverges: |arg z| = {} ≥ {}",
            arg.abs(),
            max_rate
        )));
    }
    // Abscissa at the real saddle |z|^{1/(M+1)} so the t = 0 integrand
    // magnitude matches the value scale (keeps relative accuracy flat in
    // |z| instead of losing ~|z|^{1/(M+1)}·log e digits).
    let c = z.norm().powf(1.0 / order).max(1.0).min(60.0);
    let logz = z.ln();
    let ell = |t: f64| -> Complex64 {
        let s = Complex64::new(c, t);
        let mut acc = -s * logz + log_gamma(s).expect("Re s > 0");
        for &nu in nus.values() {
            acc += log_gamma(s + nu as f64).expect("Re s > 0");
        }
        acc
    };
    let shift = ell(0.0).re;
    let rate = max_rate - arg.abs();
    let mut t_max = (55.0 + c * logz.re.abs()) / rate;
    t_max = t_max.clamp(8.0, 4000.0);
    for _ in 0..12 {
        let tail = (ell(t_max).re - shift).max(ell(-t_max).re - shift);
        if tail < -44.0 {
            break;
        }
        t_max *= 1.5;
    }

    let mut f = |t: f64| (ell(t) - shift).exp();
    let r = if z.im == 0.0 {
        // Real z: integrand is conjugate-symmetric in t.
        let half = quad::integrate_breakpoints(&mut f, &[0.0, t_max / 3.0, t_max], 4, 1e-13)?;
        EvalResult {
            value: 2.0 * Complex64::new(half.value.re, 0.0),
            abs_error_estimate: 2.0 * half.abs_error_estimate,
            terms_or_nodes_used: half.terms_or_nodes_used,
        }
    } else {
        quad::integrate_breakpoints(&mut f, &[-t_max, -t_max / 3.0, t_max / 3.0, t_max], 4, 1e-13)?
    };
    let scale = shift.exp() / (2.0 * PI);
    Ok(EvalResult {
        value: r.value * scale,
        abs_error_estimate: r.abs_error_estimate * scale,
        terms_or_nodes_used: r.terms_or_nodes_used,
    })
}

/// G^{M,0}_{0,M+1}(z) for real z > 0 — the hard-edge factor.
///
/// Small z goes through the residue series over the poles of ∏Γ(ν_l+s)
/// (exact power-and-log expansion at 0, so the z^{ν_min} leading scale is
/// produced without cancellation). Larger z switches to a hairpin
/// -∞-ih → c-ih → c+ih → -∞+ih whose arm height h grows with z so that
/// sinh(πh) outpaces the ~e^{(M+1)z^{1/(M+1)}} integrand bump: on the arms
/// the factor 1/Γ(1-s)·∏Γ(ν_l+s) then decays super-factorially, making
/// the integral absolutely convergent, while the series' alternating
/// terms would peak near that bump and lose the value to rounding. No
/// poles lie between the Mellin line and the hairpin (all sit on the
/// non-positive real axis), so the routes agree exactly.
pub fn meijer_gm0(nus: &NuVector, z: f64) -> Result<EvalResult> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("meijer_gm0 needs real z > 0, got {z}")));
    }
    if z <= 16.0 && nus.m() >= 1 {
        // Past ~16 the alternating residue terms peak near e^{(M+1)z^{1/(M+1)}}
        // and the series' rounding floor overtakes the hairpin's.
        return meijer_gm0_series(nus, z);
    }
    let m = nus.m();
    if m == 0 {
        // Empty numerator: the factor degenerates to e^{-z} (the M = 0
        // hard-edge kernel is assembled from plain exponentials).
        let value = Complex64::new((-z).exp(), 0.0);
        return Ok(EvalResult {
            value,
            abs_error_estimate: 2e-16 * value.norm(),
            terms_or_nodes_used: 1,
        });
    }
    let lnz = z.ln();
    let f = |s: Complex64| -> Complex64 {
        let mut acc = -s * lnz - log_gamma(1.0 - s).expect("off the real axis");
        for &nu in nus.values() {
            acc += log_gamma(s + nu as f64).expect("off the real axis");
        }
        acc.exp()
    };
    // Arm height: along the arms the reflected gammas carry a factor
    // 1/|sin πs| ≤ 1/sinh(πh), while the I-Bessel-like bump they must
    // cancel peaks near e^{(M+1)z^{1/(M+1)}}; keeping sinh(πh) above that
    // bump makes the integrand scale match the value scale (the poles are
    // all real, so any h > 0 encloses them).
    let order = m as f64 + 1.0;
    let h = (order * z.powf(1.0 / order) + 4.0) / PI;
    let c = 1.0;
    let mut l = 12.0f64;
    let mut prev: Option<Complex64> = None;
    let mut nodes = 0usize;
    for _ in 0..8 {
        let mut total = Complex64::new(0.0, 0.0);
        let legs = [
            (Complex64::new(-l, -h), Complex64::new(c, -h)),
            (Complex64::new(c, -h), Complex64::new(c, h)),
            (Complex64::new(c, h), Complex64::new(-l, h)),
        ];
        let mut err_acc = 0.0;
        for (a, b) in legs {
            let d = b - a;
            let base = ((b - a).norm() / 2.0).ceil().max(2.0) as usize;
            let mut g = |t: f64| f(a + t * d) * d;
            let r = quad::integrate_breakpoints(&mut g, &[0.0, 1.0], base, 1e-14)?;
            total += r.value;
            err_acc += r.abs_error_estimate;
            nodes += r.terms_or_nodes_used;
        }
        let value = total / Complex64::new(0.0, 2.0 * PI);
        let arm_tail = f(Complex64::new(-l, h)).norm() + f(Complex64::new(-l, -h)).norm();
        if let Some(p) = prev {
            // The legs carry ~1e-14-relative noise each, so demanding a
            // tighter match between truncation levels would never settle;
            // the err_acc floor also lets oscillation zeros (where the
            // value itself vanishes) terminate at the legs' noise level.
            if (value - p).norm() <= 1e-12 * value.norm().max(1e-300) + 2.0 * err_acc
                && arm_tail <= (1e-16 * value.norm()).max(0.1 * err_acc)
            {
                // Real z makes the arms conjugate, so the value is real;
                // the imaginary residue is quadrature noise.
                return Ok(EvalResult {
                    value: Complex64::new(value.re, 0.0),
                    abs_error_estimate: (value - p).norm() + err_acc + value.im.abs(),
                    terms_or_nodes_used: nodes,
                });
            }
        }
        prev = Some(value);
        l *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "hard-edge hairpin did not settle for z = {z}"
    )))
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// ζ(2)..ζ(10): enough for pole orders (= chains of equal offsets) up to 10.
const ZETAS: [f64; 9] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
];

/// Coefficients c_1..c_deg of ln Γ(a + w) = ln Γ(a) + Σ_r c_r w^r for
/// integer a ≥ 1: c_1 = ψ(a), c_r = (-1)^r (ζ(r) - Σ_{i<a} i^{-r}) / r.
fn ln_gamma_int_series(a: u32, deg: usize, out: &mut [f64]) {
    debug_assert!(a >= 1 && deg < out.len());
    for r in 1..=deg {
        let mut s = if r == 1 { -EULER_GAMMA } else { ZETAS[r - 2] / r as f64 };
        if r % 2 == 1 && r >= 3 {
            s = -s;
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        for i in 1..a {
            s -= sign * (i as f64).powi(-(r as i32)) / r as f64;
        }
        out[r] += s;
    }
}

/// exp of a truncated power series with S[0] = 0: T_0 = 1,
/// k·T_k = Σ_{r=1..k} r·S_r·T_{k-r}.
fn series_exp(s: &[f64], t: &mut [f64]) {
    t[0] = 1.0;
    for k in 1..s.len() {
        let mut acc = 0.0;
        for r in 1..=k {
            acc += r as f64 * s[r] * t[k - r];
        }
        t[k] = acc / k as f64;
    }
}

/// Residue series of the hard-edge factor: Σ_j Res_{s=-j} of
/// z^{-s} ∏_l Γ(ν_l+s) / Γ(1-s). A pole at -j has order μ_j = #{l: ν_l ≤ j},
/// so repeated offsets produce ln z powers; the Laurent coefficient is the
/// w^{μ-1} term of one truncated exp of the summed log-series, using
/// Γ(w-n) = Γ(w+1) / ∏_{i=0..n} (w-i) to reduce every factor to series of
/// ln Γ at positive integer arguments and -ln(1 - w/i).
fn meijer_gm0_series(nus: &NuVector, z: f64) -> Result<EvalResult> {
    let lnz = z.ln();
    let nu_min = *nus.values().iter().min().expect("M ≥ 1");
    let m = nus.m();
    if m > ZETAS.len() {
        return Err(Error::Domain(format!(
            "hard-edge series supports at most {} offsets, got {m}",
            ZETAS.len()
        )));
    }
    let mut s_buf = vec![0.0f64; m];
    let mut t_buf = vec![0.0f64; m];
    let mut acc = SeriesAcc::new();
    for j in nu_min..nu_min + 500 {
        let mu = nus.values().iter().filter(|&&nu| nu <= j).count();
        let deg = mu - 1;
        let s = &mut s_buf[..=deg];
        let t = &mut t_buf[..=deg];
        s.fill(0.0);
        // log-prefactor and sign collect everything of degree 0.
        let mut log_pref = j as f64 * lnz - ln_gamma_real(j as f64 + 1.0);
        let mut sign = 1.0f64;
        if deg >= 1 {
            s[1] -= lnz;
        }
        for &nu in nus.values() {
            if nu <= j {
                let n = j - nu;
                sign *= if n % 2 == 0 { 1.0 } else { -1.0 };
                log_pref -= ln_gamma_real(n as f64 + 1.0);
                ln_gamma_int_series(1, deg, s);
                for r in 1..=deg {
                    // -Σ_i ln(1 - w/i) over i = 1..n
                    let mut h = 0.0;
                    for i in 1..=n {
                        h += (i as f64).powi(-(r as i32));
                    }
                    s[r] += h / r as f64;
                }
            } else {
                log_pref += ln_gamma_real((nu - j) as f64);
                ln_gamma_int_series(nu - j, deg, s);
            }
        }
        // denominator 1/Γ(1+j-w): subtract its series with w → -w.
        let mut den = vec![0.0f64; deg + 1];
        ln_gamma_int_series(j + 1, deg, &mut den);
        for r in 1..=deg {
            let flip = if r % 2 == 0 { 1.0 } else { -1.0 };
            s[r] -= flip * den[r];
        }
        series_exp(s, t);
        let term = Complex64::new(sign * log_pref.exp() * t[deg], 0.0);
        if acc.push(term, 1e-17) {
            return Ok(EvalResult {
                value: acc.sum,
                abs_error_estimate: term.norm() + acc.rounding_floor(),
                terms_or_nodes_used: acc.terms,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "hard-edge residue series did not converge at z = {z}"
    )))
}

/// Precomputed Mellin–Barnes line for batch evaluation of
/// G^{M+1,0}_{0,M+1} at many points: the gamma products along the line
/// are folded into the node weights once, so each evaluation is a single
/// weighted sum of z^{-(c+it_i)}. Intended for kernel quadratures where
/// thousands of G-values share a common argument sector.
pub(crate) struct MellinLine {
    c: f64,
    /// (t_i, GL weight · ∏Γ(ν+c+it_i) / 2π)
    nodes: Vec<(f64, Complex64)>,
}

impl MellinLine {
    /// Build a line valid for |arg z| ≤ max_abs_arg (strictly inside the
    /// convergence sector) and |ln z| up to max_abs_lnz. `density`
    /// multiplies the baseline panel count.
    pub(crate) fn build(
        nus: &NuVector,
        c: f64,
        max_abs_arg: f64,
        max_abs_lnz: f64,
        density: usize,
    ) -> Result<MellinLine> {
        let m = nus.m();
        debug_assert!(m >= 1, "M = 0 weight factor has a closed form");
        let order = m as f64 + 1.0;
        let rate = 0.5 * order * PI - max_abs_arg;
        if rate <= 0.05 {
            return Err(Error::Geometry(format!(
                "mellin line sector too wide: arg bound {max_abs_arg} vs (M+1)π/2"
            )));
        }
        let t_max = ((60.0 + c * max_abs_lnz) / rate).max(10.0);
        // Oscillation budget: z^{-it} at frequency |ln z| plus the gamma
        // phases at ~(M+1)·ln t; six panels per cycle is ample for GL16.
        let freq = max_abs_lnz + order * (1.0 + (1.0 + t_max).ln());
        let panels = ((t_max * freq / (2.0 * PI) * 0.75).ceil() as usize)
            .max(16)
            .saturating_mul(density);
        let mut grid: Vec<(f64, f64)> = Vec::new();
        quad::panel_nodes(-t_max, t_max, panels, &mut grid);
        let mut nodes = Vec::with_capacity(grid.len());
        for &(t, w) in &grid {
            let s = Complex64::new(c, t);
            let mut lg = Complex64::new(0.0, 0.0);
            lg += log_gamma(s).expect("Re s > 0");
            for &nu in nus.values() {
                lg += log_gamma(s + nu as f64).expect("Re s > 0");
            }
            if lg.re < -690.0 {
                continue; // weight underflows; contribution < 1e-300
            }
            nodes.push((t, lg.exp() * (w / (2.0 * PI))));
        }
        Ok(MellinLine { c, nodes })
    }

    /// Evaluate G at z. Arguments with |z| below 1e-8 are clamped to that
    /// radius: G grows only logarithmically at 0 while the kernel
    /// quadratures feeding this evaluator weight such nodes with measure
    /// O(|z|), so the clamp error is O(|z| log^M |z|), far below their
    /// tolerances.
    pub(crate) fn eval(&self, z: Complex64) -> Complex64 {
        let zc = if z.norm() < 1e-8 {
            if z.norm() == 0.0 {
                Complex64::new(1e-8, 0.0)
            } else {
                z * (1e-8 / z.norm())
            }
        } else {
            z
        };
        let logz = zc.ln();
        let mut sum = Complex64::new(0.0, 0.0);
        for &(t, wg) in &self.nodes {
            sum += wg * (-Complex64::new(self.c, t) * logz).exp();
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g10_m0_is_exp() {
        let nus = NuVector::new(vec![]);
        let z = Complex64::new(0.3, -1.1);
        let r = meijer_g10(&nus, z).unwrap();
        assert!((r.value - (-z).exp()).norm() < 1e-15);
    }

    #[test]
    fn hard_edge_m1_matches_scaled_series() {
        // G^{1,0}_{0,2}(z | ν; 0) = z^ν · G^{1,0}_{0,2-series with shifted
        // denominators} — the Bessel identity z^{ν/2} J_ν(2√z) written
        // through the entire series.
        for &nu in &[0u32, 1, 3] {
            let nus = NuVector::new(vec![nu]);
            for &z in &[0.4f64, 1.7, 6.3] {
                let lhs = meijer_gm0(&nus, z).unwrap().value;
                let series = meijer_g10(&nus, Complex64::new(z, 0.0)).unwrap().value;
                let rhs = z.powi(nu as i32) * series;
                assert!(
                    (lhs.re - rhs.re).abs() < 1e-11 * rhs.re.abs().max(1.0),
                    "nu={nu} z={z}: {} vs {}",
                    lhs.re,
                    rhs.re
                );
                assert!(lhs.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn batch_line_matches_single_evaluations() {
        let nus = NuVector::new(vec![2]);
        let line = MellinLine::build(&nus, 1.0, 0.76 * PI, 4.0, 2).unwrap();
        for &(re, im) in &[(0.9, 0.4), (0.2, -0.1), (1.4, 1.4)] {
            let z = Complex64::new(re, im);
            let a = line.eval(z);
            let b = meijer_gm10_analytic(&nus, z).unwrap().value;
            assert!((a - b).norm() < 1e-10 * b.norm().max(1e-10), "z={z}: {a} vs {b}");
        }
    }
}

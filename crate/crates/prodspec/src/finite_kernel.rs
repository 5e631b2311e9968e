//! Finite-n determinantal structure of the Hermitised product ensemble:
//! joint eigenvalue density, moment matrix, and the correlation kernel in
//! its two independent representations.
//!
//! The biorthogonal route pairs the monomials x^{k-1} with the source
//! weights g_M(·, b_ℓ) through the inverse of the moment matrix — exact
//! linear algebra on top of n² weight evaluations, but limited to small n
//! and distinct b. The contour route evaluates the double-contour
//! integral representation directly and has no such restrictions; the
//! two agreeing to 1e-8 on random parameters is the strongest internal
//! consistency check this crate has.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel_engine::{double_contour, EngineSpec};
use crate::quad;
use crate::specfun::fg::{f_m_log, g_m_log};
use crate::specfun::gamma::ln_gamma_real;
use crate::specfun::hermite::hermite_i_scaled;
use crate::specfun::{g_m, NuVector};

/// Ensemble description: size n, chain offsets ν, source eigenvalues b.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    pub n: usize,
    pub nus: NuVector,
    pub b: Vec<f64>,
    distinct: bool,
}

impl EnsembleParams {
    pub fn new(n: usize, nus: NuVector, b: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("ensemble size n must be ≥ 1".into()));
        }
        if b.len() != n {
            return Err(Error::Validation(format!(
                "source eigenvalue count {} does not match n = {n}",
                b.len()
            )));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("source eigenvalues must be finite".into()));
        }
        let scale = b.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
        let mut sorted = b.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let distinct = sorted.windows(2).all(|w| w[1] - w[0] > 1e-12 * scale);
        Ok(EnsembleParams { n, nus, b, distinct })
    }

    /// Whether all source eigenvalues are pairwise distinct (at working
    /// precision). The biorthogonal route requires this; the contour
    /// route does not.
    pub fn distinct(&self) -> bool {
        self.distinct
    }
}

/// Moment matrix b_{k,ℓ} = ∫ y^{k-1} g_M(y, b_ℓ) dy together with its
/// inverse and a 1-norm condition estimate. The entries have the closed
/// form √π · 2^{1-k} · e^{b_ℓ²} · h_{k-1}(b_ℓ) · ∏_m Γ(ν_m + k), with
/// h_m(b) = i^{-m} H_m(ib) (all-positive Hermite recurrence).
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub entries: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub condition_estimate: f64,
}

pub fn moment_matrix(p: &EnsembleParams) -> Result<MomentMatrix> {
    if p.n > 12 {
        return Err(Error::Domain(format!(
            "moment-matrix inversion is limited to n ≤ 12 (got n = {}); use the contour kernel",
            p.n
        )));
    }
    let n = p.n;
    let mut entries = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        let mut gprod = 1.0f64;
        for &nu in p.nus.values() {
            gprod *= ln_gamma_real(nu as f64 + k as f64).exp();
        }
        let pref = PI.sqrt() * 2f64.powi(1 - k as i32) * gprod;
        for (l, &bl) in p.b.iter().enumerate() {
            entries[(k - 1, l)] = pref * (bl * bl).exp() * hermite_i_scaled(k - 1, bl);
        }
    }
    let lu = entries.clone().lu();
    let inverse = lu.try_inverse().ok_or_else(|| {
        Error::IllConditioned("moment matrix is numerically singular (coincident sources?)".into())
    })?;
    let norm1 = |m: &DMatrix<f64>| {
        (0..m.ncols())
            .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    };
    let condition_estimate = norm1(&entries) * norm1(&inverse);
    if !condition_estimate.is_finite() || condition_estimate > 1e12 {
        return Err(Error::IllConditioned(format!(
            "moment matrix condition estimate {condition_estimate:.3e} exceeds 1e12"
        )));
    }
    Ok(MomentMatrix {
        entries,
        inverse,
        condition_estimate,
    })
}

/// A kernel value with its evaluation point and error estimate. Kernel
/// values of this ensemble are real; any imaginary residual of the
/// underlying complex quadrature is folded into the error estimate.
#[derive(Debug, Clone, Copy)]
pub struct KernelEval {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub abs_error_estimate: f64,
}

/// Correlation kernel via biorthogonal inversion:
/// K(x, y) = Σ_{k,ℓ} x^{k-1} (B^{-1})_{ℓ,k} g_M(y, b_ℓ).
/// Needs distinct b, n ≤ 12, y ≠ 0.
pub fn kernel_biortho(p: &EnsembleParams, x: f64, y: f64) -> Result<KernelEval> {
    if !p.distinct {
        return Err(Error::CoincidentSource(
            "biorthogonal kernel needs distinct source eigenvalues".into(),
        ));
    }
    let mm = moment_matrix(p)?;
    let mut gvals = Vec::with_capacity(p.n);
    let mut gerr = 0.0f64;
    for &bl in &p.b {
        let g = g_m(&p.nus, y, Complex64::new(bl, 0.0))?;
        gvals.push(g.value.re);
        gerr += g.abs_error_estimate;
    }
    let mut value = 0.0f64;
    let mut xpow = 1.0f64;
    for k in 0..p.n {
        let mut col = 0.0f64;
        for l in 0..p.n {
            col += mm.inverse[(l, k)] * gvals[l];
        }
        value += xpow * col;
        xpow *= x;
    }
    Ok(KernelEval {
        x,
        y,
        value,
        abs_error_estimate: gerr + 1e-15 * mm.condition_estimate * value.abs().max(1e-300),
    })
}

pub(crate) struct ContourOpts {
    /// Re-offset of the u-line in the rescaled variable (deformation
    /// tests only; 0 is the defining contour).
    pub line_re: f64,
    pub tol: f64,
}

impl Default for ContourOpts {
    fn default() -> Self {
        ContourOpts {
            line_re: 0.0,
            tol: 1e-9,
        }
    }
}

/// Correlation kernel via the double-contour representation
///
///   K_n(x,y) = 1/(2(πi)²) ∫_L du ∮_C dv f_M(x,u) g_M(y,v)
///              e^{u²-v²} ∏_l (u-b_l)/(v-b_l) / (u-v),
///
/// rescaled by u = ŝû with ŝ = √(n/2) so the exponential is e^{n(û²-v̂²)/2}
/// and the poles sit at b̂ = b/ŝ. Works for any n and arbitrary
/// (including coincident) sources; y ≠ 0.
pub fn kernel_contour(p: &EnsembleParams, x: f64, y: f64) -> Result<KernelEval> {
    kernel_contour_opts(p, x, y, &ContourOpts::default())
}

pub(crate) fn kernel_contour_opts(
    p: &EnsembleParams,
    x: f64,
    y: f64,
    opts: &ContourOpts,
) -> Result<KernelEval> {
    let shat = (p.n as f64 / 2.0).sqrt();
    let poles: Vec<f64> = p.b.iter().map(|&b| b / shat).collect();
    // Truncation of the u-line: the integrand magnitude along u = σ + it
    // is bounded by exp(−γt² + 2|x|ŝt)·∏|u − b̂| (the f-factor is entire
    // of exponential type 2|x|ŝ). Extend until the bound drops 40 e-folds
    // under its running peak; the f-series domain |2x·ŝu| ≤ 200 caps the
    // height. Stadium boundaries reach height ≤ 1, so 1.5 always covers
    // the loop crossings.
    let gamma = 0.5 * p.n as f64;
    let xhat = x.abs() * shat;
    let lmag = |t: f64| -> f64 {
        let mut l = -gamma * t * t + 2.0 * xhat * t;
        for &b in &poles {
            l += 0.5 * (t * t + (opts.line_re - b).powi(2)).max(1e-300).ln();
        }
        l
    };
    let cap = if xhat > 0.0 { (98.0 / xhat).max(1.6) } else { f64::INFINITY };
    let mut peak = f64::MIN;
    let mut t = 0.0;
    while t < 1.5 {
        peak = peak.max(lmag(t));
        t += 0.25;
    }
    let mut t_max = 1.5f64;
    loop {
        let here = lmag(t_max);
        peak = peak.max(here);
        if here <= peak - 40.0 || t_max >= cap {
            break;
        }
        t_max += 0.25;
    }
    let t_max = t_max.min(cap);
    let spec = EngineSpec {
        poles: &poles,
        gamma: 0.5 * p.n as f64,
        prefactor: Complex64::new(-shat / (2.0 * PI * PI), 0.0),
        line_re: opts.line_re,
        line_half_height: t_max,
        tol: opts.tol,
    };
    let nus = p.nus.clone();
    let f_log = move |u: Complex64| f_m_log(&nus, x, shat * u);
    let nus2 = p.nus.clone();
    let g_log = move |v: Complex64| g_m_log(&nus2, y, shat * v).map(|t| t.0);
    let (k, err, _nodes) = double_contour(&spec, &f_log, &g_log)?;
    Ok(KernelEval {
        x,
        y,
        value: k.re,
        abs_error_estimate: err + k.im.abs(),
    })
}

/// Joint eigenvalue density at a point (x_1..x_n):
/// p(x) = Δ_n(x) · det[g_M(x_i, b_j)] / Z with
/// Z = n! π^{n/2} e^{Σb²} Δ_n(b) ∏_m ∏_j Γ(ν_m + j).
/// Coincident sources are handled by a deterministic ε-spread plus
/// linear Richardson extrapolation (the density is a smooth symmetric
/// function of b; the spread error is O(ε)).
pub fn joint_pdf(p: &EnsembleParams, xs: &[f64]) -> Result<f64> {
    if xs.len() != p.n {
        return Err(Error::Validation(format!(
            "joint_pdf needs exactly n = {} coordinates, got {}",
            p.n,
            xs.len()
        )));
    }
    if xs.iter().any(|x| *x == 0.0) && p.nus.m() > 0 {
        return Err(Error::Domain(
            "joint density evaluation needs x_i ≠ 0 for M ≥ 1 (weight singularity)".into(),
        ));
    }
    if p.distinct {
        return joint_pdf_distinct(p, xs);
    }
    let scale = p.b.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
    let eps = 1e-6 * scale;
    let spread = |e: f64| -> Result<f64> {
        let mut b2 = p.b.clone();
        // Deterministic centred offsets; enough to separate any ties.
        let n = b2.len();
        for (j, v) in b2.iter_mut().enumerate() {
            *v += e * (j as f64 - 0.5 * (n as f64 - 1.0));
        }
        let p2 = EnsembleParams::new(p.n, p.nus.clone(), b2)?;
        if !p2.distinct {
            return Err(Error::CoincidentSource(
                "source spread failed to separate coincident eigenvalues".into(),
            ));
        }
        joint_pdf_distinct(&p2, xs)
    };
    let p1 = spread(eps)?;
    let p2 = spread(0.5 * eps)?;
    Ok(2.0 * p2 - p1)
}

fn joint_pdf_distinct(p: &EnsembleParams, xs: &[f64]) -> Result<f64> {
    let n = p.n;
    // log |Δ| and sign for both Vandermondes.
    let vdm = |v: &[f64]| -> (f64, f64) {
        let mut ln = 0.0f64;
        let mut sign = 1.0f64;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                let d = v[j] - v[i];
                ln += d.abs().ln();
                if d < 0.0 {
                    sign = -sign;
                }
            }
        }
        (ln, sign)
    };
    let (ln_dx, sign_dx) = vdm(xs);
    let (ln_db, sign_db) = vdm(&p.b);

    let mut gm = DMatrix::<f64>::zeros(n, n);
    for (i, &xi) in xs.iter().enumerate() {
        for (j, &bj) in p.b.iter().enumerate() {
            gm[(i, j)] = g_m(&p.nus, xi, Complex64::new(bj, 0.0))?.value.re;
        }
    }
    let det = gm.lu().determinant();
    let mut ln_z = ln_gamma_real(n as f64 + 1.0) + 0.5 * n as f64 * PI.ln();
    ln_z += p.b.iter().map(|&b| b * b).sum::<f64>();
    ln_z += ln_db;
    for &nu in p.nus.values() {
        for j in 1..=n {
            ln_z += ln_gamma_real(nu as f64 + j as f64);
        }
    }
    let val = sign_dx * det.signum() * (ln_dx + det.abs().max(1e-300).ln() - ln_z).exp() / sign_db;
    Ok(val)
}

/// k-point correlation function det[K(x_i, x_j)] at the given points.
/// Uses the biorthogonal kernel when available (n ≤ 12, distinct b) and
/// the contour kernel otherwise.
pub fn correlation(p: &EnsembleParams, points: &[f64]) -> Result<f64> {
    if points.is_empty() || points.len() > p.n {
        return Err(Error::Validation(format!(
            "correlation order must be 1..=n, got {}",
            points.len()
        )));
    }
    let use_biortho = p.n <= 12 && p.distinct;
    let k = points.len();
    let mut km = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let e = if use_biortho {
                kernel_biortho(p, points[i], points[j])?
            } else {
                kernel_contour(p, points[i], points[j])?
            };
            km[(i, j)] = e.value;
        }
    }
    Ok(km.lu().determinant())
}

/// Quadrature cross-check of one moment-matrix entry:
/// ∫ y^{k-1} g_M(y, b) dy over a window wide enough for the weight's
/// stretched-exponential tail. Exposed for tests and the verify suite.
/// The window is capped at the g_m domain, which resolves the tail fully
/// for M ≤ 1; for larger M the check is tail-limited near 1e-5.
pub fn moment_entry_quadrature(nus: &NuVector, k: usize, b: f64) -> Result<f64> {
    // Tail: |g_M| decays like exp(-c·y^{2/(2M+1)}); step the window out
    // until the integrand at the edge is negligible. 118 stays inside the
    // g_m domain; by then the M ≤ 3 edge is far below the 1e-16 target.
    let mut half = 8.0f64;
    loop {
        let edge = g_m(nus, half, Complex64::new(b, 0.0))?.value.norm() * half.powi(k as i32 - 1);
        let edge_m = g_m(nus, -half, Complex64::new(b, 0.0))?.value.norm() * half.powi(k as i32 - 1);
        if edge.max(edge_m) < 1e-16 || half >= 118.0 {
            break;
        }
        half = (half * 1.6).min(118.0);
    }
    // For small ν the weight behaves like ln(1/|y|) at the origin (the
    // radial integral's t ≈ |y| cutoff), which uniform panel doubling
    // cannot resolve; a geometric window stack on (0, 1] handles each
    // octave of the logarithm spectrally while the outer range doubles
    // as usual.
    let mut prev: Option<Complex64> = None;
    for level in 0..=quad::MAX_DOUBLINGS {
        let mut grid: Vec<(f64, f64)> = Vec::new();
        quad::dyadic_nodes(1.0, 42, 1usize << level, &mut grid);
        let inner = grid.len();
        for i in 0..inner {
            let (x, w) = grid[i];
            grid.push((-x, w));
        }
        quad::panel_nodes(1.0, half, 8usize << level, &mut grid);
        quad::panel_nodes(-half, -1.0, 8usize << level, &mut grid);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_abs = 0.0f64;
        for &(y, w) in &grid {
            let v = g_m(nus, y, Complex64::new(b, 0.0))?.value * y.powi(k as i32 - 1);
            sum += w * v;
            sum_abs += w.abs() * v.norm();
        }
        if let Some(p) = prev {
            let err = (sum - p).norm();
            if err <= 1e-10 * sum.norm().max(1e-300) + 1e-15 * sum_abs {
                return Ok(sum.re);
            }
        }
        prev = Some(sum);
    }
    Err(Error::NonConvergence(
        "moment-entry window refinement did not settle".into(),
    ))
}

//! Limiting kernels at the origin across the source-strength phase
//! transition, the saddle-point phase function behind them, and
//! convergence studies of the scaled finite-n kernel.
//!
//! Three regimes of the two-atom source strength a: below the critical
//! value the local statistics are sine-kernel (after M-dependent
//! rescaling of the density only), at the critical window they are
//! governed by a Pearcey-type kernel dressed with Meijer-G factors and
//! finite-rank spikes, and above it the spikes alone produce a
//! finite-rank kernel. The hard-edge Meijer kernel is included as a
//! contrasting family and as a second exerciser of the G evaluators.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use crate::contour::{self, ContourSpec};
use crate::error::{Error, Result};
use crate::finite_kernel::{kernel_contour, EnsembleParams, KernelEval};
use crate::kernel_engine::{double_contour, EngineSpec};
use crate::quad;
use crate::specfun::fg::{f_m_log, g_m_log};
use crate::specfun::meijer::{meijer_gm10_analytic, MellinLine};
use crate::specfun::{f_m, g_m, meijer_g10, meijer_gm0, NuVector};

/// Critical-window configuration: coupling offset τ (the source strength
/// is 1 − τ/(2√n) away from critical at size n) and the finite-rank
/// spikes with their sign split a_1 ≤ … ≤ a_{p0} < 0 < a_{p0+1} ≤ … ≤ a_p.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalParams {
    pub tau: f64,
    pub spikes: Vec<f64>,
    pub p0: usize,
}

impl CriticalParams {
    pub fn validate(&self) -> Result<()> {
        if !self.tau.is_finite() {
            return Err(Error::Validation("critical offset τ must be finite".into()));
        }
        let p = self.spikes.len();
        if self.p0 > p {
            return Err(Error::Validation(format!(
                "split index p0 = {} exceeds spike count {p}",
                self.p0
            )));
        }
        if self.spikes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("spikes must be sorted ascending".into()));
        }
        for (i, &s) in self.spikes.iter().enumerate() {
            if !s.is_finite() || s == 0.0 {
                return Err(Error::Validation("spikes must be finite and nonzero".into()));
            }
            if i < self.p0 && s >= 0.0 {
                return Err(Error::Validation(format!(
                    "spike {i} must be negative (below split index p0 = {})",
                    self.p0
                )));
            }
            if i >= self.p0 && s <= 0.0 {
                return Err(Error::Validation(format!(
                    "spike {i} must be positive (at or above split index p0 = {})",
                    self.p0
                )));
            }
        }
        Ok(())
    }
}

/// Supercritical configuration: source strength a > 1 and the fixed
/// (unscaled) spike locations.
#[derive(Debug, Clone, PartialEq)]
pub struct SupercriticalParams {
    pub a: f64,
    pub spikes: Vec<f64>,
}

impl SupercriticalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) || !self.a.is_finite() {
            return Err(Error::Validation(format!(
                "supercritical regime needs a > 1, got {}",
                self.a
            )));
        }
        if self.spikes.iter().any(|s| !s.is_finite()) {
            return Err(Error::Validation("spikes must be finite".into()));
        }
        if self.spikes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("spikes must be sorted ascending".into()));
        }
        Ok(())
    }
}

/// Phase-transition regime of the two-atom source.
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeParams {
    /// a ∈ [0, √2/2]; spikes a_l with |a_l| < a + 1.
    Subcritical { a: f64, spikes: Vec<f64> },
    Critical(CriticalParams),
    Supercritical(SupercriticalParams),
}

impl RegimeParams {
    pub fn validate(&self) -> Result<()> {
        self.validate_with_extension(false)
    }

    /// `extended` admits the conjectural range a ∈ (√2/2, 1) for the
    /// subcritical regime (exploratory; excluded from verification).
    pub fn validate_with_extension(&self, extended: bool) -> Result<()> {
        match self {
            RegimeParams::Subcritical { a, spikes } => {
                let hi = if extended { 1.0 } else { SQRT_2 / 2.0 + 1e-12 };
                if !(*a >= 0.0 && *a <= hi) {
                    return Err(Error::Validation(format!(
                        "subcritical strength must lie in [0, {hi:.4}], got {a}"
                    )));
                }
                if spikes.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Validation("spikes must be sorted ascending".into()));
                }
                if spikes.iter().any(|s| !s.is_finite() || s.abs() >= a + 1.0) {
                    return Err(Error::Validation(
                        "subcritical spikes must satisfy |a_l| < a + 1".into(),
                    ));
                }
                Ok(())
            }
            RegimeParams::Critical(cp) => cp.validate(),
            RegimeParams::Supercritical(sp) => sp.validate(),
        }
    }
}

// ---------------------------------------------------------------------------
// Saddle-point machinery.

/// Phase function h(z) = z²/2 + ½ log(a² − z²), principal branch.
pub fn phase_h(z: Complex64, a: f64) -> Result<Complex64> {
    let w = Complex64::new(a * a, 0.0) - z * z;
    if w.norm() == 0.0 {
        return Err(Error::Pole(format!("phase function has poles at ±a (z = {z})")));
    }
    Ok(0.5 * z * z + 0.5 * w.ln())
}

/// h′(z) = z(1 − 1/(a² − z²)).
pub fn phase_h_prime(z: Complex64, a: f64) -> Result<Complex64> {
    let w = Complex64::new(a * a, 0.0) - z * z;
    if w.norm() == 0.0 {
        return Err(Error::Pole(format!("phase function has poles at ±a (z = {z})")));
    }
    Ok(z * (Complex64::new(1.0, 0.0) - 1.0 / w))
}

/// Stationary points of the phase with their orders: {0, ±i√(1−a²)} for
/// 0 < a < 1 (simple; only ±i at a = 0, where the origin merges into the
/// pole), a single third-order point at 0 for a = 1, and {0, ±√(a²−1)}
/// for a > 1.
#[derive(Debug, Clone)]
pub struct SaddleReport {
    pub a: f64,
    pub saddles: Vec<Complex64>,
    pub orders: Vec<u32>,
}

pub fn saddle_analysis(a: f64) -> Result<SaddleReport> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Validation(format!("source strength must be ≥ 0, got {a}")));
    }
    let (saddles, orders) = if a == 0.0 {
        // h'(z) = z + 1/z: the origin stationary point of the a > 0 phase
        // merges into the pole, leaving only ±i.
        (
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)],
            vec![1, 1],
        )
    } else if a < 1.0 {
        let s = (1.0 - a * a).sqrt();
        (
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, -s),
            ],
            vec![1, 1, 1],
        )
    } else if a == 1.0 {
        (vec![Complex64::new(0.0, 0.0)], vec![3])
    } else {
        let s = (a * a - 1.0).sqrt();
        (
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
            vec![1, 1, 1],
        )
    };
    Ok(SaddleReport { a, saddles, orders })
}

/// Outcome of one monotonicity sweep.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub points: usize,
    pub violations: usize,
    /// Most negative margin observed (≥ 0 when the property holds).
    pub worst_margin: f64,
    pub witness: Option<Complex64>,
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub a: f64,
    pub theta0: f64,
    pub checks: Vec<CheckOutcome>,
}

impl MonotonicityReport {
    pub fn total_points(&self) -> usize {
        self.checks.iter().map(|c| c.points).sum()
    }
    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }
}

/// Dense numerical confirmation of the descent properties the contour
/// choices rely on:
/// (i)   a ≤ √2/2: Re h on the lens arcs attains its minimum at the
///       saddle endpoints ±i√(1−a²);
/// (ii)  a ≤ 1: Re h on the imaginary axis is maximal at ±i√(1−a²);
/// (iii) a = 1: t ↦ Re h(t·e^{iθ}) increases along rays, for all t when
///       θ ∈ [π/8, π/4] and up to t_max(θ) = √(2cos2θ − 1/cos2θ) when
///       θ ∈ (π/4, θ₀];
/// (iv)  a = 1: x ↦ Re h(x+iy) increases for x ≥ 1, and |y| ↦ Re h
///       decreases for x ≥ 2.
pub fn contour_monotonicity_check(a: f64, theta0: f64) -> Result<MonotonicityReport> {
    if !(a >= 0.0 && a <= 1.0) {
        return Err(Error::Validation(format!(
            "monotonicity sweep covers 0 ≤ a ≤ 1, got {a}"
        )));
    }
    if !(theta0 > FRAC_PI_4 && theta0 <= contour::theta0_max() + 1e-12) {
        return Err(Error::Validation(format!(
            "ray opening must lie in (π/4, {:.6}], got {theta0}",
            contour::theta0_max()
        )));
    }
    let tol = 1e-10;
    let mut checks = Vec::new();

    let saddle_im = (1.0 - a * a).sqrt();
    let h_saddle = phase_h(Complex64::new(0.0, saddle_im), a)?.re;

    if a <= SQRT_2 / 2.0 + 1e-12 {
        let mut out = CheckOutcome {
            name: "lens-arc-min-at-saddles".into(),
            points: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        };
        for spec in [
            ContourSpec::ArcR { a, delta: 0.0 },
            ContourSpec::ArcL { a, delta: 0.0 },
        ] {
            let path = contour::build(&spec)?;
            for seg in &path.segments {
                for k in 1..1250 {
                    let z = seg.at(k as f64 / 1250.0);
                    let margin = phase_h(z, a)?.re - h_saddle;
                    record(&mut out, margin, z, -tol);
                }
            }
        }
        checks.push(out);
    }

    {
        // Re h(it) − Re h(i√(1−a²)) ≤ 0 on the line.
        let mut out = CheckOutcome {
            name: "line-max-at-saddles".into(),
            points: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        };
        for k in 0..2500 {
            let t = -6.0 + 12.0 * (k as f64 + 0.5) / 2500.0;
            let z = Complex64::new(0.0, t);
            let margin = h_saddle - phase_h(z, a)?.re;
            record(&mut out, margin, z, -tol);
        }
        checks.push(out);
    }

    if a == 1.0 {
        let mut out = CheckOutcome {
            name: "ray-ascent".into(),
            points: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        };
        for j in 0..25 {
            let th = PI / 8.0 + (theta0 - PI / 8.0) * j as f64 / 24.0;
            let c2 = (2.0 * th).cos();
            let t_hi = if th <= FRAC_PI_4 {
                5.0
            } else {
                (2.0 * c2 - 1.0 / c2).sqrt()
            };
            let dir = Complex64::new(th.cos(), th.sin());
            for k in 0..100 {
                let t = t_hi * (k as f64 + 0.5) / 100.0;
                let z = t * dir;
                // d/dt Re h(t e^{iθ}) = Re(e^{iθ} h′).
                let margin = (dir * phase_h_prime(z, 1.0)?).re;
                record(&mut out, margin, z, -tol);
            }
        }
        checks.push(out);

        let mut out = CheckOutcome {
            name: "halfplane-x-ascent".into(),
            points: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        };
        for i in 0..50 {
            let x = 1.0 + 5.0 * i as f64 / 49.0;
            for j in 0..50 {
                let y = -6.0 + 12.0 * (j as f64 + 0.5) / 50.0; // offset grid: avoids y = 0 pole at x = 1
                let z = Complex64::new(x, y);
                let margin = phase_h_prime(z, 1.0)?.re; // ∂x Re h
                record(&mut out, margin, z, -tol);
            }
        }
        checks.push(out);

        let mut out = CheckOutcome {
            name: "halfplane-y-descent".into(),
            points: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        };
        for i in 0..50 {
            let x = 2.0 + 4.0 * i as f64 / 49.0;
            for j in 0..50 {
                let y = -6.0 + 12.0 * (j as f64 + 0.5) / 50.0;
                let z = Complex64::new(x, y);
                // ∂y Re h = −Im h′; moving away from the axis must not increase Re h.
                let d = -phase_h_prime(z, 1.0)?.im;
                let margin = if y > 0.0 { -d } else { d };
                record(&mut out, margin, z, -tol);
            }
        }
        checks.push(out);
    }

    Ok(MonotonicityReport { a, theta0, checks })
}

fn record(out: &mut CheckOutcome, margin: f64, z: Complex64, floor: f64) {
    out.points += 1;
    if margin < out.worst_margin {
        out.worst_margin = margin;
        out.witness = Some(z);
    }
    if margin < floor {
        out.violations += 1;
    }
}

// ---------------------------------------------------------------------------
// Subcritical and hard-edge kernels (single contour integrals).

/// Subcritical (bulk) limit kernel:
/// K(x,y) = (1/2πi) ∫_{C_R} G^{1,0}(−sgn(xy)|x|v) · G^{M+1,0}(|y|v) dv
/// over the right unit half-circle. Reduces to the sine kernel at M = 0.
pub fn kernel_subcritical(nus: &NuVector, x: f64, y: f64) -> Result<KernelEval> {
    if x == 0.0 || y == 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("kernel arguments must be finite and nonzero".into()));
    }
    let path = contour::build(&ContourSpec::RightHalfArc)?;
    let xfac = -(x * y).signum() * x.abs();
    let yfac = y.abs();
    let mut bad: Option<Error> = None;
    let mut f = |v: Complex64| -> Complex64 {
        let g1 = meijer_g10(nus, xfac * v);
        let g2 = meijer_gm10_analytic(nus, yfac * v);
        match (g1, g2) {
            (Ok(a), Ok(b)) => a.value * b.value,
            (e1, e2) => {
                bad = e1.err().or(e2.err());
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let r = contour::integrate(&path, &mut f, 1e-11);
    if let Some(e) = bad {
        return Err(e);
    }
    let r = r?;
    let k = r.value / Complex64::new(0.0, 2.0 * PI);
    Ok(KernelEval {
        x,
        y,
        value: k.re,
        abs_error_estimate: r.abs_error_estimate / (2.0 * PI) + k.im.abs(),
    })
}

/// Hard-edge kernel ∫₀¹ G^{1,0}(xu) G^{M,0}(yu) du for x, y > 0; the
/// second factor drops the leading gamma from the Mellin product.
pub fn kernel_meijer_hard_edge(nus: &NuVector, x: f64, y: f64) -> Result<KernelEval> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::Domain(format!(
            "hard-edge kernel needs x, y > 0 (got {x}, {y})"
        )));
    }
    let path = contour::build(&ContourSpec::UnitInterval)?;
    let mut bad: Option<Error> = None;
    let mut f = |u: Complex64| -> Complex64 {
        let g1 = meijer_g10(nus, x * u);
        let g0 = meijer_gm0(nus, y * u.re);
        match (g1, g0) {
            (Ok(a), Ok(b)) => a.value * b.value,
            (e1, e2) => {
                bad = e1.err().or(e2.err());
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let r = contour::integrate(&path, &mut f, 1e-10);
    if let Some(e) = bad {
        return Err(e);
    }
    let r = r?;
    Ok(KernelEval {
        x,
        y,
        value: r.value.re,
        abs_error_estimate: r.abs_error_estimate + r.value.im.abs(),
    })
}

// ---------------------------------------------------------------------------
// Critical (Pearcey-type) kernel.

/// Dyadic refinement depth for the ray/line node stacks: windows span
/// [R/2^{k+1}, R/2^k]; 46 octaves reach the origin to ~1e-13·R.
const CRIT_DYADIC_LEVELS: usize = 46;

struct CritNodes {
    u: Vec<Complex64>,
    /// u-weights including du = i dt.
    wu: Vec<Complex64>,
    v: Vec<Complex64>,
    /// v-weights including ray direction and traversal sign.
    wv: Vec<Complex64>,
}

/// Node sets for the critical double integral: u on the imaginary axis
/// (symmetric dyadic stacks), v on the four rays of the origin-vertex
/// wedges Σ₊ (e^{iπ/4}∞ → 0 → e^{−iπ/4}∞) and Σ₋ (e^{−3iπ/4}∞ → 0 →
/// e^{3iπ/4}∞). With origin vertices every G-argument −yv keeps
/// |arg| ≤ 3π/4, so the principal branch coincides with the analytic
/// continuation the contours require.
fn crit_nodes(r_trunc: f64, ppw: usize) -> CritNodes {
    let mut dy: Vec<(f64, f64)> = Vec::new();
    quad::dyadic_nodes(r_trunc, CRIT_DYADIC_LEVELS, ppw, &mut dy);
    let mut u = Vec::with_capacity(2 * dy.len());
    let mut wu = Vec::with_capacity(2 * dy.len());
    for &(s, w) in &dy {
        u.push(Complex64::new(0.0, s));
        wu.push(Complex64::new(0.0, w));
        u.push(Complex64::new(0.0, -s));
        wu.push(Complex64::new(0.0, w));
    }
    let rays: [(f64, f64); 4] = [
        (FRAC_PI_4, -1.0),        // Σ₊ incoming upper-right ray
        (-FRAC_PI_4, 1.0),        // Σ₊ outgoing lower-right ray
        (PI - FRAC_PI_4, 1.0),    // Σ₋ outgoing upper-left ray
        (FRAC_PI_4 - PI, -1.0),   // Σ₋ incoming lower-left ray
    ];
    let mut v = Vec::with_capacity(4 * dy.len());
    let mut wv = Vec::with_capacity(4 * dy.len());
    for &(phase, sgn) in &rays {
        let dir = Complex64::new(phase.cos(), phase.sin());
        for &(s, w) in &dy {
            v.push(s * dir);
            wv.push(sgn * w * dir);
        }
    }
    CritNodes { u, wu, v, wv }
}

/// Truncation radius: quartic decay must beat the quadratic/linear/pole
/// growth by e^{−42} at the endpoint.
fn crit_truncation(tau: f64, x: f64, y: f64, p: usize) -> f64 {
    let mxy = x.abs().max(y.abs()).max(1.0);
    let mut r = 4.0f64;
    while r.powi(4) / 4.0 - tau.abs() * r * r / 2.0 - mxy * r - (p as f64) * (r + 1.0).ln() < 42.0
    {
        r += 0.5;
    }
    r
}

/// Evaluate the critical double integral at one refinement level.
/// `g_side(v)` must return G^{M+1,0}(−y·v) (or its specialisation).
fn crit_eval(
    tau: f64,
    spikes: &[f64],
    nodes: &CritNodes,
    f_side: &dyn Fn(Complex64) -> Result<Complex64>,
    g_side: &dyn Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    let nu_n = nodes.u.len();
    let nv_n = nodes.v.len();
    let mut fu = Vec::with_capacity(nu_n);
    for i in 0..nu_n {
        let u = nodes.u[i];
        let mut f = (0.5 * tau * u * u - 0.25 * u * u * u * u).exp() * f_side(u)?;
        for &a in spikes {
            f *= u - a;
        }
        fu.push(f * nodes.wu[i]);
    }
    let mut gv = Vec::with_capacity(nv_n);
    for j in 0..nv_n {
        let v = nodes.v[j];
        let mut g = (-0.5 * tau * v * v + 0.25 * v * v * v * v).exp() * g_side(v);
        for &a in spikes {
            g /= v - a;
        }
        gv.push(g * nodes.wv[j]);
    }
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..nu_n {
        let u = nodes.u[i];
        let f = fu[i];
        if f.norm_sqr() == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..nv_n {
            inner += gv[j] / (u - nodes.v[j]);
        }
        s += f * inner;
    }
    // 1/(2πi)² = −1/(4π²).
    Ok(s * (-1.0 / (4.0 * PI * PI)))
}

fn crit_refine(
    tau: f64,
    spikes: &[f64],
    r_trunc: f64,
    f_side: &dyn Fn(Complex64) -> Result<Complex64>,
    g_side: &dyn Fn(Complex64) -> Complex64,
    x: f64,
    y: f64,
) -> Result<KernelEval> {
    let tol = 1e-8;
    let mut prev: Option<Complex64> = None;
    let mut last_err = f64::INFINITY;
    for &ppw in &[2usize, 3, 5] {
        let nodes = crit_nodes(r_trunc, ppw);
        let k = crit_eval(tau, spikes, &nodes, f_side, g_side)?;
        if let Some(p) = prev {
            last_err = (k - p).norm();
            if last_err <= tol * k.norm().max(1e-300) || ppw == 5 {
                return Ok(KernelEval {
                    x,
                    y,
                    value: k.re,
                    abs_error_estimate: last_err + k.im.abs(),
                });
            }
        }
        prev = Some(k);
    }
    Err(Error::NonConvergence(format!(
        "critical kernel refinement stalled at error {last_err:.2e}"
    )))
}

/// Critical limit kernel
/// K(x,y) = (1/(2πi)²) ∫_{iℝ} du ∫_{Σ₋∪Σ₊} dv
///          e^{τ(u²−v²)/2 − (u⁴−v⁴)/4} G^{1,0}(xu) G^{M+1,0}(−yv)
///          ∏_j (u−a_j)/(v−a_j) / (u−v).
/// Negative spikes sit inside the left wedge opening, positive inside
/// the right one. For M ≥ 1 the G factor is evaluated through a cached
/// Mellin line whose accuracy is self-checked against the direct
/// evaluator before use.
pub fn kernel_critical(nus: &NuVector, reg: &CriticalParams, x: f64, y: f64) -> Result<KernelEval> {
    reg.validate()?;
    if x == 0.0 || y == 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("kernel arguments must be finite and nonzero".into()));
    }
    let r_trunc = crit_truncation(reg.tau, x, y, reg.spikes.len());
    let nus_f = nus.clone();
    let f_side = move |u: Complex64| meijer_g10(&nus_f, x * u).map(|e| e.value);
    if nus.m() == 0 {
        // G^{1,0}_{0,1}(−yv) = e^{yv}.
        let g_side = move |v: Complex64| (y * v).exp();
        return crit_refine(reg.tau, &reg.spikes, r_trunc, &f_side, &g_side, x, y);
    }
    let line = build_checked_line(nus, y.abs() * r_trunc)?;
    let g_side = move |v: Complex64| line.eval(-y * v);
    crit_refine(reg.tau, &reg.spikes, r_trunc, &f_side, &g_side, x, y)
}

/// Build a Mellin line valid on the wedge sectors up to |z| = z_max and
/// verify it against the direct G evaluator at three sector arguments,
/// doubling the node density until they agree to 1e-10.
fn build_checked_line(nus: &NuVector, z_max: f64) -> Result<MellinLine> {
    let c = (0.5 * z_max.powf(1.0 / (nus.m() as f64 + 1.0))).max(1.0);
    let max_lnz = 20.0f64.max((1.0 + z_max).ln() + 2.0);
    let mut density = 1usize;
    for _ in 0..4 {
        let line = MellinLine::build(nus, c, 0.75 * PI + 0.02, max_lnz, density)?;
        let mid = 0.5 * z_max.max(0.2);
        let probes = [
            Complex64::from_polar(mid, 0.75 * PI),
            Complex64::from_polar(0.3 * mid.max(0.05), -0.75 * PI),
            Complex64::new(mid, 0.0),
        ];
        let mut ok = true;
        for z in probes {
            let direct = meijer_gm10_analytic(nus, z)?.value;
            let got = line.eval(z);
            if (got - direct).norm() > 1e-10 * direct.norm().max(1e-300) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(line);
        }
        density *= 2;
    }
    Err(Error::Geometry(
        "mellin line failed its accuracy self-check at maximal density".into(),
    ))
}

/// Classical Pearcey kernel via direct exponential integrands — the
/// M = 0, spikeless critical kernel without the G-function machinery.
/// Dual route for verification.
pub fn kernel_pearcey_direct(tau: f64, x: f64, y: f64) -> Result<KernelEval> {
    if x == 0.0 || y == 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("kernel arguments must be finite and nonzero".into()));
    }
    let r_trunc = crit_truncation(tau, x, y, 0);
    let f_side = move |u: Complex64| Ok((-x * u).exp());
    let g_side = move |v: Complex64| (y * v).exp();
    crit_refine(tau, &[], r_trunc, &f_side, &g_side, x, y)
}

// ---------------------------------------------------------------------------
// Supercritical kernel.

/// Supercritical limit kernel
/// K(x,y) = (1/2(πi)²) ∫_L du ∮_{C_a} dv f_M(x,u) g_M(y,v)
///          e^{(1−1/a²)(u²−v²)} ∏_{l≤p} (u−a_l)/(v−a_l) / (u−v)
/// with the loop enclosing the spikes only. Identically zero at p = 0.
pub fn kernel_supercritical(
    nus: &NuVector,
    reg: &SupercriticalParams,
    x: f64,
    y: f64,
) -> Result<KernelEval> {
    reg.validate()?;
    if x == 0.0 || y == 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("kernel arguments must be finite and nonzero".into()));
    }
    let kappa = 1.0 - 1.0 / (reg.a * reg.a);
    let t_max = reg
        .spikes
        .iter()
        .fold(3.0f64.max((46.0 / kappa).sqrt() + 2.0), |m, &s| {
            m.max(s.abs() + 3.0)
        });
    let spec = EngineSpec {
        poles: &reg.spikes,
        gamma: kappa,
        prefactor: Complex64::new(-1.0 / (2.0 * PI * PI), 0.0),
        line_re: 0.0,
        line_half_height: t_max,
        tol: 1e-9,
    };
    let nus_f = nus.clone();
    let f_log = move |u: Complex64| f_m_log(&nus_f, x, u);
    let nus_g = nus.clone();
    let g_log = move |v: Complex64| g_m_log(&nus_g, y, v).map(|t| t.0);
    let (k, err, _) = double_contour(&spec, &f_log, &g_log)?;
    Ok(KernelEval {
        x,
        y,
        value: k.re,
        abs_error_estimate: err + k.im.abs(),
    })
}

/// Independent residue-sum evaluation of the supercritical kernel: the
/// v-loop collapses onto the spike poles,
/// K = (1/πi) Σ_j g_M(y,a_j) e^{−κa_j²} ∫_{iℝ} f_M(x,u) e^{κu²}
///     ∏_{l≠j} (u−a_l)/(a_j−a_l) du.
/// Used by the verification suite against `kernel_supercritical`.
pub fn kernel_supercritical_residue(
    nus: &NuVector,
    reg: &SupercriticalParams,
    x: f64,
    y: f64,
) -> Result<KernelEval> {
    reg.validate()?;
    if x == 0.0 || y == 0.0 {
        return Err(Error::Domain("kernel arguments must be finite and nonzero".into()));
    }
    let kappa = 1.0 - 1.0 / (reg.a * reg.a);
    let t_max = (46.0 / kappa).sqrt().max(3.0) + 2.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    for (j, &aj) in reg.spikes.iter().enumerate() {
        let gv = g_m(nus, y, Complex64::new(aj, 0.0))?;
        let mut bad: Option<Error> = None;
        let mut f = |t: f64| -> Complex64 {
            let u = Complex64::new(0.0, t);
            match f_m(nus, x, u) {
                Ok(fv) => {
                    let mut val = fv.value * (kappa * u * u).exp();
                    for (l, &al) in reg.spikes.iter().enumerate() {
                        if l != j {
                            val *= (u - al) / (aj - al);
                        }
                    }
                    val
                }
                Err(e) => {
                    bad = Some(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        };
        let i = quad::integrate_breakpoints(&mut f, &[-t_max, 0.0, t_max], 8, 1e-11);
        if let Some(e) = bad {
            return Err(e);
        }
        let i = i?;
        // (1/πi)·(i dt) = dt/π.
        total += gv.value * (-kappa * aj * aj).exp() * i.value / PI;
        err += (gv.abs_error_estimate + i.abs_error_estimate) / PI;
    }
    Ok(KernelEval {
        x,
        y,
        value: total.re,
        abs_error_estimate: err + total.im.abs(),
    })
}

// ---------------------------------------------------------------------------
// Finite-n → limit convergence studies.

#[derive(Debug, Clone, Copy)]
pub struct TransitionRow {
    pub n: usize,
    pub sup_error: f64,
    pub worst_x: f64,
    pub worst_y: f64,
}

/// Source spectrum realizing the regime at size n.
fn regime_source(regime: &RegimeParams, n: usize) -> Result<Vec<f64>> {
    let half = |n_rest: usize, atom: f64, b: &mut Vec<f64>| {
        for _ in 0..n_rest / 2 {
            b.push(atom);
            b.push(-atom);
        }
    };
    let mut b = Vec::with_capacity(n);
    match regime {
        RegimeParams::Subcritical { a, spikes } => {
            let r = spikes.len();
            if r > n || (n - r) % 2 != 0 {
                return Err(Error::Validation(format!(
                    "need n − r even (n = {n}, r = {r})"
                )));
            }
            let s = (n as f64 / 2.0).sqrt();
            b.extend(spikes.iter().map(|&al| s * al));
            half(n - r, s * a, &mut b);
        }
        RegimeParams::Critical(cp) => {
            let p = cp.spikes.len();
            if p > n || (n - p) % 2 != 0 {
                return Err(Error::Validation(format!(
                    "need n − p even (n = {n}, p = {p})"
                )));
            }
            let rn = (n as f64).sqrt();
            if cp.tau >= 2.0 * rn {
                return Err(Error::Validation(format!(
                    "critical offset τ = {} too large for n = {n}",
                    cp.tau
                )));
            }
            let a_n = 1.0 / (1.0 - cp.tau / (2.0 * rn));
            let spike_scale = (n as f64).powf(0.25) / SQRT_2;
            b.extend(cp.spikes.iter().map(|&al| spike_scale * al));
            half(n - p, (n as f64 / 2.0).sqrt() * a_n, &mut b);
        }
        RegimeParams::Supercritical(sp) => {
            let p = sp.spikes.len();
            if p > n {
                return Err(Error::Validation(format!("more spikes than n = {n}")));
            }
            b.extend(sp.spikes.iter().cloned());
            let s = (n as f64 / 2.0).sqrt();
            let rest = n - p;
            if rest % 2 == 1 {
                // Odd remainder: one unpaired bulk atom; its O(1/n)
                // weight washes out of the spike-local limit.
                b.push(s * sp.a);
                half(rest - 1, s * sp.a, &mut b);
            } else {
                half(rest, s * sp.a, &mut b);
            }
        }
    }
    Ok(b)
}

/// Sup-norm distance between the appropriately scaled finite-n kernel
/// and the regime's limit kernel over the grid² argument pairs, per n.
/// Scalings: (i) σ = √(2(1−a²)n), compare σ⁻¹K_n(X/σ, Y/σ);
/// (ii) s = √(2√n), compare s⁻¹K_n(X/s, Y/s); (iii) K_n unscaled.
pub fn transition_convergence(
    nus: &NuVector,
    regime: &RegimeParams,
    ns: &[usize],
    grid: &[f64],
) -> Result<Vec<TransitionRow>> {
    regime.validate()?;
    if grid.is_empty() || grid.iter().any(|&g| g == 0.0 || !g.is_finite()) {
        return Err(Error::Validation(
            "grid must be nonempty with finite nonzero points".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 || n > 400 {
            return Err(Error::Validation(format!("size n = {n} outside 1..=400")));
        }
        let b = regime_source(regime, n)?;
        let params = EnsembleParams::new(n, nus.clone(), b)?;
        let scale = match regime {
            RegimeParams::Subcritical { a, .. } => (2.0 * (1.0 - a * a) * n as f64).sqrt(),
            RegimeParams::Critical(_) => (2.0 * (n as f64).sqrt()).sqrt(),
            RegimeParams::Supercritical(_) => 1.0,
        };
        let mut sup = 0.0f64;
        let mut worst = (grid[0], grid[0]);
        for &gx in grid {
            for &gy in grid {
                let limit = match regime {
                    RegimeParams::Subcritical { .. } => kernel_subcritical(nus, gx, gy)?,
                    RegimeParams::Critical(cp) => kernel_critical(nus, cp, gx, gy)?,
                    RegimeParams::Supercritical(sp) => kernel_supercritical(nus, sp, gx, gy)?,
                };
                let fin = kernel_contour(&params, gx / scale, gy / scale)?;
                let diff = (fin.value / scale - limit.value).abs();
                if diff > sup {
                    sup = diff;
                    worst = (gx, gy);
                }
            }
        }
        rows.push(TransitionRow {
            n,
            sup_error: sup,
            worst_x: worst.0,
            worst_y: worst.1,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn subcritical_m0_is_sine_kernel() {
        let nus = NuVector::new(vec![]);
        for (x, y) in [(0.7, 0.4), (-0.6, 0.9), (1.3, -2.0), (0.5, 0.5)] {
            let k = kernel_subcritical(&nus, x, y).unwrap();
            let sine = if x == y {
                1.0 / PI
            } else {
                ((x - y) as f64).sin() / (PI * (x - y))
            };
            assert_relative_eq!(k.value, sine, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn hard_edge_m0_closed_form() {
        let nus = NuVector::new(vec![]);
        for (x, y) in [(1.0, 1.0), (0.4, 2.3)] {
            let k = kernel_meijer_hard_edge(&nus, x, y).unwrap();
            let expect = (1.0 - (-(x + y) as f64).exp()) / (x + y);
            assert_relative_eq!(k.value, expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn critical_swapped_contour_evaluation_agrees() {
        // Relabeling (u,v) → (v,u) reverses the loop nesting and flips
        // the sign of the Cauchy denominator; re-deriving the double sum
        // in that form must reproduce the kernel, which guards the
        // pairing of ray/line weights with the 1/(u−v) antisymmetry.
        let tau = 0.0;
        let spikes = [-0.6, 0.9];
        let x = 0.5;
        let y = -0.4;
        let r_trunc = crit_truncation(tau, x, y, spikes.len());
        let nodes = crit_nodes(r_trunc, 3);
        let f_side = |u: Complex64| Ok((-x * u).exp());
        let g_side = |v: Complex64| (y * v).exp();
        let k = crit_eval(tau, &spikes, &nodes, &f_side, &g_side).unwrap();

        // Outer loop over the ray set, inner over the line, denominator
        // v − u, overall sign −1.
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..nodes.v.len() {
            let v = nodes.v[j];
            let mut g = (-0.5 * tau * v * v + 0.25 * v.powu(4)).exp() * (y * v).exp();
            for &a in spikes.iter() {
                g /= v - a;
            }
            g *= nodes.wv[j];
            let mut inner = Complex64::new(0.0, 0.0);
            for i in 0..nodes.u.len() {
                let u = nodes.u[i];
                let mut f = (0.5 * tau * u * u - 0.25 * u.powu(4)).exp() * (-x * u).exp();
                for &a in spikes.iter() {
                    f *= u - a;
                }
                inner += f * nodes.wu[i] / (v - u);
            }
            s += g * inner;
        }
        let k_swapped = -s * (-1.0 / (4.0 * PI * PI));
        assert!(
            (k - k_swapped).norm() <= 1e-10 * k.norm(),
            "{k} vs {k_swapped}"
        );
    }

    #[test]
    fn supercritical_large_a_approaches_unit_gaussian_factor() {
        // At a = 10³ the coupling 1 − 1/a² differs from 1 by 1e-6.
        let nus = NuVector::new(vec![0]);
        let reg = SupercriticalParams {
            a: 1000.0,
            spikes: vec![1.5],
        };
        let k = kernel_supercritical(&nus, &reg, 0.8, 0.6).unwrap();
        let spec = EngineSpec {
            poles: &reg.spikes,
            gamma: 1.0,
            prefactor: Complex64::new(-1.0 / (2.0 * PI * PI), 0.0),
            line_re: 0.0,
            line_half_height: (46.0f64).sqrt() + 5.0,
            tol: 1e-9,
        };
        let nus_f = nus.clone();
        let f_log = move |u: Complex64| f_m_log(&nus_f, 0.8, u);
        let nus_g = nus.clone();
        let g_log = move |v: Complex64| g_m_log(&nus_g, 0.6, v).map(|t| t.0);
        let (k1, _, _) = double_contour(&spec, &f_log, &g_log).unwrap();
        assert!((k.value - k1.re).abs() < 1e-4);
    }

    #[test]
    fn supercritical_no_spikes_vanishes() {
        let nus = NuVector::new(vec![0]);
        let reg = SupercriticalParams {
            a: 2.0,
            spikes: vec![],
        };
        let k = kernel_supercritical(&nus, &reg, 0.8, 0.6).unwrap();
        assert_eq!(k.value, 0.0);
    }

    #[test]
    fn phase_taylor_coefficients_near_critical() {
        let tau = 0.8;
        let nf = 64.0f64;
        let a = 1.0 / (1.0 - tau / (2.0 * nf.sqrt()));
        let h0 = phase_h(Complex64::new(0.0, 0.0), a).unwrap();
        let sym = |eps: f64| {
            let hr = phase_h(Complex64::new(eps, 0.0), a).unwrap()
                + phase_h(Complex64::new(-eps, 0.0), a).unwrap()
                - 2.0 * h0;
            let hi = phase_h(Complex64::new(0.0, eps), a).unwrap()
                + phase_h(Complex64::new(0.0, -eps), a).unwrap()
                - 2.0 * h0;
            (hr, hi)
        };
        // c₂ from (S₊ − S_i)/(4ε²) = c₂ + c₆ε⁴, Richardson in ε².
        let c2_at = |eps: f64| {
            let (hr, hi) = sym(eps);
            ((hr - hi) / (4.0 * eps * eps)).re
        };
        let c2 = (16.0 * c2_at(0.025) - c2_at(0.05)) / 15.0;
        let c2_expect = 0.5 * (tau / nf.sqrt() - tau * tau / (4.0 * nf));
        assert!((c2 - c2_expect).abs() < 1e-10, "c2 {c2} vs {c2_expect}");
        // c₄ from (S₊ + S_i)/(4ε⁴) = c₄ + c₈ε⁴, two Richardson levels.
        let c4_at = |eps: f64| {
            let (hr, hi) = sym(eps);
            ((hr + hi) / (4.0 * eps.powi(4))).re
        };
        let r1 = (16.0 * c4_at(0.08) - c4_at(0.16)) / 15.0;
        let r2 = (16.0 * c4_at(0.04) - c4_at(0.08)) / 15.0;
        let c4 = (256.0 * r2 - r1) / 255.0;
        let c4_expect = -0.25 * (1.0 - tau / (2.0 * nf.sqrt())).powi(4);
        assert!((c4 - c4_expect).abs() < 1e-10, "c4 {c4} vs {c4_expect}");
    }

    #[test]
    fn saddles_satisfy_stationarity() {
        for a in [0.0, 0.3, SQRT_2 / 2.0, 1.0, 1.7] {
            let rep = saddle_analysis(a).unwrap();
            for z in &rep.saddles {
                assert!(phase_h_prime(*z, a).unwrap().norm() < 1e-10);
            }
        }
        assert_eq!(saddle_analysis(1.0).unwrap().orders, vec![3]);
        let r = saddle_analysis(0.5).unwrap();
        assert_relative_eq!(r.saddles[1].im, (0.75f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn monotonicity_sweeps_are_clean() {
        let th = 101.0 * PI / 400.0;
        let rep = contour_monotonicity_check(0.5, th).unwrap();
        assert!(rep.total_violations() == 0, "{:?}", rep.checks);
        let rep = contour_monotonicity_check(1.0, th).unwrap();
        assert!(rep.total_violations() == 0, "{:?}", rep.checks);
        // t_max at the default opening reaches past the unit abscissa.
        let c2 = (2.0 * th).cos();
        assert!((2.0 * c2 - 1.0 / c2).sqrt() * th.cos() >= 1.0);
    }
}

//! Global limiting spectral density of the Hermitised product via free
//! probability: the Stieltjes transform g(z) satisfies a sparse
//! polynomial equation of degree 4M+3, solved by root tracking from the
//! 1/z branch at large height; the density follows by Stieltjes
//! inversion. At the special couplings a = 0 and a = 1 the density also
//! has explicit trigonometric parametrisations, and at a = 0 its even
//! moments are Fuss–Catalan numbers — three independent routes that the
//! verification suite plays against each other.

use num_bigint::BigUint;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A sampled density curve (x_i, ρ(x_i)) with its construction recorded.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    pub points: Vec<(f64, f64)>,
    pub provenance: CurveProvenance,
    /// Source coupling the curve belongs to (NaN for histograms of
    /// explicit sources).
    pub a: f64,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveProvenance {
    Parametric,
    StieltjesInversion,
    Histogram,
}

/// The algebraic equation satisfied by the Stieltjes transform g(z) of
/// the limiting density for M product factors and two-atom source
/// coupling a. In monomial form (after clearing the 1/z pole that
/// appears for M = 0):
///
///   z^{4M} g^{4M+3} - 2 z^{2M+1} g^{2M+2} + (1-a²) z^{2M} g^{2M+1}
///   + z² g - z = 0,
///
/// a polynomial of degree 4M+3 in g with five nonzero coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicEq {
    pub m: usize,
    pub a: f64,
}

impl AlgebraicEq {
    pub fn new(m: usize, a: f64) -> Result<AlgebraicEq> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Validation(format!("coupling a must be ≥ 0, got {a}")));
        }
        Ok(AlgebraicEq { m, a })
    }

    pub fn degree(&self) -> usize {
        4 * self.m + 3
    }

    /// Coefficients c[0..=4M+3] (ascending powers of g) at fixed z ≠ 0.
    pub fn coeffs(&self, z: Complex64) -> Vec<Complex64> {
        let m = self.m as i32;
        let mut c = vec![Complex64::new(0.0, 0.0); self.degree() + 1];
        c[4 * self.m + 3] += z.powi(4 * m);
        c[2 * self.m + 2] -= 2.0 * z.powi(2 * m + 1);
        c[2 * self.m + 1] += (1.0 - self.a * self.a) * z.powi(2 * m);
        c[1] += z * z;
        c[0] -= z;
        c
    }

    /// |P(g)| normalised by the coefficient scale, for residual checks.
    pub fn residual(&self, z: Complex64, g: Complex64) -> f64 {
        let c = self.coeffs(z);
        let (p, _) = horner(&c, g);
        let gm = g.norm().max(1.0);
        let scale = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck.norm() * gm.powi(k as i32))
            .fold(1e-300, f64::max);
        p.norm() / scale
    }
}

fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All roots of a complex polynomial by the Aberth–Ehrlich simultaneous
/// iteration, optionally warm-started (the warm start preserves root
/// ordering along a homotopy path).
pub fn aberth_roots(coeffs: &[Complex64], init: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::Validation("leading coefficient vanishes".into()));
    }
    let mut z: Vec<Complex64> = match init {
        Some(v) if v.len() == n => v.to_vec(),
        _ => {
            // Cauchy-style inclusion radius, roots spread on a circle at
            // an angle offset that avoids symmetry locking.
            let mut r = 1.0f64;
            for (k, c) in coeffs.iter().enumerate().take(n) {
                let q = (c.norm() / lead.norm()).powf(1.0 / (n - k) as f64);
                r = r.max(q);
            }
            (0..n)
                .map(|i| {
                    let th = 2.0 * PI * (i as f64 + 0.37) / n as f64;
                    1.3 * r * Complex64::new(th.cos(), th.sin())
                })
                .collect()
        }
    };
    for _ in 0..300 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                Complex64::new(1e-12, 1e-12)
            } else {
                p / dp
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-290 {
                        s += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() < 1e-290 { w } else { w / denom };
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-14 {
            return Ok(z);
        }
    }
    Err(Error::RootTracking(
        "Aberth iteration did not converge in 300 sweeps".into(),
    ))
}

/// Stieltjes transform g(z) of the limiting density, Im z > 0.
///
/// Tracks the physical branch (g ~ 1/z) from height 1000·scale down to z
/// along a geometric path, following one root index through
/// warm-started Aberth solves. A step where the tracked root is no
/// longer unambiguously closest to its predecessor is retried with a
/// finer path; residual and Herglotz (Im g ≤ 0) checks guard the result.
pub fn stieltjes_g(eq: &AlgebraicEq, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!(
            "stieltjes_g needs Im z > 0, got z = {z}"
        )));
    }
    let scale = z.re.abs().max(1.0);
    let mut fac = 0.85f64;
    let mut escalations = 0usize;
    'restart: loop {
        let mut y = 1000.0 * scale;
        let z0 = Complex64::new(z.re, y);
        let mut roots = aberth_roots(&eq.coeffs(z0), None)?;
        let seed = 1.0 / z0;
        let mut k = nearest_index(&roots, seed);
        let mut g = roots[k];
        loop {
            y *= fac;
            let done = y <= z.im;
            let zc = if done { z } else { Complex64::new(z.re, y) };
            let new_roots = aberth_roots(&eq.coeffs(zc), Some(&roots))?;
            let k2 = nearest_index(&new_roots, g);
            let d1 = (new_roots[k2] - g).norm();
            let mut d2 = f64::INFINITY;
            for (j, r) in new_roots.iter().enumerate() {
                if j != k2 {
                    d2 = d2.min((r - g).norm());
                }
            }
            if d1 > 0.45 * d2 {
                escalations += 1;
                if escalations > 6 {
                    return Err(Error::RootTracking(format!(
                        "branch tracking became ambiguous near z = {zc}"
                    )));
                }
                fac = fac.sqrt();
                continue 'restart;
            }
            roots = new_roots;
            k = k2;
            g = roots[k];
            if done {
                let res = eq.residual(z, g);
                if res > 1e-10 {
                    return Err(Error::RootTracking(format!(
                        "tracked root residual {res:.2e} at z = {z}"
                    )));
                }
                if g.im > 1e-10 {
                    return Err(Error::RootTracking(format!(
                        "tracked branch violates Im g ≤ 0 at z = {z} (Im g = {:.2e})",
                        g.im
                    )));
                }
                return Ok(g);
            }
        }
    }
}

fn nearest_index(roots: &[Complex64], target: Complex64) -> usize {
    let mut best = 0usize;
    let mut bd = f64::INFINITY;
    for (j, r) in roots.iter().enumerate() {
        let d = (r - target).norm();
        if d < bd {
            bd = d;
            best = j;
        }
    }
    best
}

/// Density by Stieltjes inversion: ρ(x) = -Im g(x + iε)/π, evaluated at
/// two heights ε and ε/2 and extrapolated linearly to ε = 0.
pub fn density_from_g(m: usize, a: f64, xs: &[f64]) -> Result<DensityCurve> {
    let eq = AlgebraicEq::new(m, a)?;
    let mut points = Vec::with_capacity(xs.len());
    for &x in xs {
        if x == 0.0 {
            return Err(Error::Domain(
                "Stieltjes inversion at x = 0 sits on the potential blow-up point; offset the grid"
                    .into(),
            ));
        }
        let s = x.abs().max(0.05);
        let e1 = 1e-4 * s;
        let r1 = -stieltjes_g(&eq, Complex64::new(x, e1))?.im / PI;
        let r2 = -stieltjes_g(&eq, Complex64::new(x, 0.5 * e1))?.im / PI;
        let mut rho = 2.0 * r2 - r1;
        if rho < 0.0 {
            if rho < -1e-6 {
                return Err(Error::NonConvergence(format!(
                    "negative density {rho:.3e} after extrapolation at x = {x}"
                )));
            }
            rho = 0.0;
        }
        points.push((x, rho));
    }
    Ok(DensityCurve {
        points,
        provenance: CurveProvenance::StieltjesInversion,
        a,
        m,
    })
}

/// Upper parameter limit of the a = 0 parametrisation.
pub fn phi_max_a0(m: usize) -> f64 {
    PI / (2.0 * m as f64 + 2.0)
}

/// Upper parameter limit of the a = 1 parametrisation.
pub fn phi_max_a1(m: usize) -> f64 {
    PI / (4.0 * m as f64 + 3.0)
}

/// Trigonometric parametrisation of the a = 0 density on φ ∈ (0, π/(2M+2)):
/// x²(φ) = sin^{2M+2}((2M+2)φ) / (sin φ · sin^{2M+1}((2M+1)φ)),
/// ρ(φ)  = (1/π) √(sin φ / sin((2M+1)φ)) ·
///         (sin((2M+1)φ)/sin((2M+2)φ))^M · sin φ.
/// φ → 0 is the spectral edge, φ → π/(2M+2) the origin (where the
/// density blows up like |x|^{-1+1/(M+1)} for M ≥ 1). Negative φ give
/// the mirror half x < 0.
pub fn density_parametric_a0(m: usize, phis: &[f64]) -> Result<DensityCurve> {
    let lim = phi_max_a0(m);
    let mf = m as f64;
    let mut points = Vec::with_capacity(phis.len());
    for &phi in phis {
        let ph = phi.abs();
        if !(ph > 0.0 && ph < lim) {
            return Err(Error::Domain(format!(
                "a = 0 parameter must satisfy 0 < |φ| < {lim:.6}, got {phi}"
            )));
        }
        let s1 = ph.sin();
        let s2m1 = ((2.0 * mf + 1.0) * ph).sin();
        let s2m2 = ((2.0 * mf + 2.0) * ph).sin();
        let x2 = s2m2.powi(2 * m as i32 + 2) / (s1 * s2m1.powi(2 * m as i32 + 1));
        let rho = (s1 / s2m1).sqrt() * (s2m1 / s2m2).powi(m as i32) * s1 / PI;
        points.push((phi.signum() * x2.sqrt(), rho));
    }
    Ok(DensityCurve {
        points,
        provenance: CurveProvenance::Parametric,
        a: 0.0,
        m,
    })
}

/// Trigonometric parametrisation of the a = 1 density on φ ∈ (0, π/(4M+3)):
/// x²(φ) = sin^{4M+3}((4M+3)φ) / (sin φ · sin^{4M+2}((4M+2)φ)),
/// ρ(φ)  = (1/π) √(sin φ / sin((4M+3)φ)) ·
///         (sin((4M+2)φ)/sin((4M+3)φ))^{2M-1} · sin 2φ.
/// The origin blow-up steepens to |x|^{-1+4/(4M+3)}.
pub fn density_parametric_a1(m: usize, phis: &[f64]) -> Result<DensityCurve> {
    let lim = phi_max_a1(m);
    let mf = m as f64;
    let mut points = Vec::with_capacity(phis.len());
    for &phi in phis {
        let ph = phi.abs();
        if !(ph > 0.0 && ph < lim) {
            return Err(Error::Domain(format!(
                "a = 1 parameter must satisfy 0 < |φ| < {lim:.6}, got {phi}"
            )));
        }
        let s1 = ph.sin();
        let sa = ((4.0 * mf + 2.0) * ph).sin();
        let sb = ((4.0 * mf + 3.0) * ph).sin();
        let x2 = sb.powi(4 * m as i32 + 3) / (s1 * sa.powi(4 * m as i32 + 2));
        let rho = (s1 / sb).sqrt() * (sa / sb).powi(2 * m as i32 - 1) * (2.0 * ph).sin() / PI;
        points.push((phi.signum() * x2.sqrt(), rho));
    }
    Ok(DensityCurve {
        points,
        provenance: CurveProvenance::Parametric,
        a: 1.0,
        m,
    })
}

/// Fuss–Catalan number FC_p(k) = binom((p+1)k, k) / (pk + 1), exactly.
pub fn fuss_catalan(p: usize, k: usize) -> BigUint {
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..k {
        num *= BigUint::from((p + 1) * k - i);
        den *= BigUint::from(i + 1);
    }
    (num / den) / BigUint::from(p * k + 1)
}

/// Even moment ∫ x^{2k} ρ(x) dx of the a = 0 density, integrated in the
/// φ parameter (where the integrand is bounded up to both endpoints).
/// Equals FC_{2M+1}(k).
pub fn moment_parametric_a0(m: usize, k: usize) -> Result<f64> {
    let lim = phi_max_a0(m);
    let eps = 1e-9;
    let h = 1e-7 * lim;
    let xval = |phi: f64| -> f64 {
        let mf = m as f64;
        let s1 = phi.sin();
        let s2m1 = ((2.0 * mf + 1.0) * phi).sin();
        let s2m2 = ((2.0 * mf + 2.0) * phi).sin();
        (s2m2.powi(2 * m as i32 + 2) / (s1 * s2m1.powi(2 * m as i32 + 1))).sqrt()
    };
    let mut f = |phi: f64| -> Complex64 {
        let curve = density_parametric_a0(m, &[phi]).expect("phi validated by window");
        let (x, rho) = curve.points[0];
        // |dx/dφ| by central difference of the analytic x(φ).
        let dxd = (xval((phi + h).min(lim - 0.5 * eps)) - xval((phi - h).max(0.5 * eps)))
            / (2.0 * h);
        Complex64::new(x.powi(2 * k as i32) * rho * dxd.abs(), 0.0)
    };
    let r = crate::quad::integrate_breakpoints(&mut f, &[eps, 0.5 * lim, lim - eps], 12, 1e-10)?;
    Ok(2.0 * r.value.re)
}

/// Exponent of the density blow-up at the origin:
/// -1 + 1/(M+1) for 0 ≤ a < 1, -1 + 4/(4M+3) at a = 1, and
/// -1 + 2/(2M+1) for a > 1 (where the origin is soft).
pub fn blowup_exponent_theory(m: usize, a: f64) -> f64 {
    let mf = m as f64;
    if a < 1.0 {
        -1.0 + 1.0 / (mf + 1.0)
    } else if a == 1.0 {
        -1.0 + 4.0 / (4.0 * mf + 3.0)
    } else {
        -1.0 + 2.0 / (2.0 * mf + 1.0)
    }
}

/// Least-squares slope of ln ρ against ln |x| over curve points with
/// lo ≤ |x| ≤ hi — the empirical blow-up exponent.
pub fn blowup_exponent(curve: &DensityCurve, lo: f64, hi: f64) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(x, rho) in &curve.points {
        let ax = x.abs();
        if ax >= lo && ax <= hi && rho > 0.0 {
            xs.push(ax.ln());
            ys.push(rho.ln());
        }
    }
    if xs.len() < 8 {
        return Err(Error::Validation(format!(
            "blow-up fit needs ≥ 8 curve points in [{lo}, {hi}], found {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..xs.len() {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::Validation("degenerate abscissas in blow-up fit".into()));
    }
    Ok(sxy / sxx)
}

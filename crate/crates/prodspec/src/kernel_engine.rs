//! Shared evaluator for double-contour kernels of the form
//!
//!   K = pref · ∫_L du ∮_C dv  F(u) G(v) e^{γ(u²-v²)} ∏_l (u-p_l)/(v-p_l) / (u-v),
//!
//! with L a vertical line and C a union of anticlockwise stadiums
//! enclosing the real poles p_l. Both the finite-n kernel (poles =
//! scaled source eigenvalues, γ = n/2) and the supercritical limit
//! kernel (poles = spikes, γ = 1 - 1/a²) are instances.
//!
//! Two non-obvious mechanics live here.
//!
//! *Log-pair summation.* F·e^{γu²}·∏(u-p) and G·e^{-γv²}/∏(v-p) are each
//! wildly over/under-flowing on their own; only per-pair products are
//! bounded. Each side is accumulated as a complex log, shifted by its
//! maximum real part, and exponentiated once per node; the pair sum then
//! multiplies two ≤1-magnitude arrays. If the two maxima together exceed
//! the f64 exponent budget, the evaluation refuses with a Geometry error
//! instead of returning rounded garbage.
//!
//! *Line/loop crossings.* When the line passes through a stadium (poles
//! clustered around 0), the v-residue at v = u contributes
//! -2πi·F(u)G(u) for each u inside, so the deformed evaluation differs
//! from the defining one by a known correction:
//!     K = K_computed + pref·2πi·∫_{inside} F(u)G(u) du,
//! an integral of a mild pole-free integrand (the γ-exponentials and the
//! pole products cancel pairwise at v = u). Crossing points additionally
//! get dyadic panel refinement on both paths: the 1/(u-v) factor is a
//! transversal, absolutely integrable log singularity there.

use num_complex::Complex64;

use crate::contour::{stadium_segments, Segment};
use crate::error::{Error, Result};
use crate::quad;

pub(crate) struct EngineSpec<'a> {
    /// Real poles in the integration variable (already rescaled).
    pub poles: &'a [f64],
    /// Coefficient of the u²/v² exponentials.
    pub gamma: f64,
    /// Overall prefactor (includes any Jacobian of rescaling).
    pub prefactor: Complex64,
    /// Re-offset of the vertical u-line (0 for the defining contour;
    /// nonzero offsets exercise deformation invariance in tests).
    pub line_re: f64,
    /// Half-height of the truncated u-line.
    pub line_half_height: f64,
    pub tol: f64,
}

struct Stadium {
    lo: f64,
    hi: f64,
    r: f64,
}

/// Cluster the sorted poles by gaps below 1.0 and wrap each cluster in a
/// stadium whose radius respects the neighbours:
/// r = min(1, max(0.08, 0.45·nearest-gap)).
fn build_stadiums(poles: &[f64]) -> Vec<Stadium> {
    let mut sorted = poles.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    let mut lo = sorted[0];
    let mut hi = sorted[0];
    for &p in &sorted[1..] {
        if p - hi < 1.0 {
            hi = p;
        } else {
            clusters.push((lo, hi));
            lo = p;
            hi = p;
        }
    }
    clusters.push((lo, hi));
    let mut out = Vec::with_capacity(clusters.len());
    for (i, &(lo, hi)) in clusters.iter().enumerate() {
        let gap_l = if i > 0 { lo - clusters[i - 1].1 } else { f64::INFINITY };
        let gap_r = if i + 1 < clusters.len() {
            clusters[i + 1].0 - hi
        } else {
            f64::INFINITY
        };
        let gap = gap_l.min(gap_r);
        let r = if gap.is_finite() {
            (0.45 * gap).clamp(0.08, 1.0)
        } else {
            1.0
        };
        out.push(Stadium { lo, hi, r });
    }
    out
}

/// Ordinate half-extent of the line's passage through a stadium, if any.
fn crossing_half_height(st: &Stadium, line_re: f64) -> Option<f64> {
    let d0 = if line_re < st.lo {
        st.lo - line_re
    } else if line_re > st.hi {
        line_re - st.hi
    } else {
        0.0
    };
    if d0 < st.r {
        Some((st.r * st.r - d0 * d0).sqrt())
    } else {
        None
    }
}

const DYADIC_LEVELS: usize = 42;

/// Nodes/weights along the u-line (in the ordinate t, u = line_re + it),
/// split at crossing ordinates with dyadic stacks on both sides of each.
fn line_nodes(spec: &EngineSpec, crossings: &[f64], level: usize) -> Vec<(f64, f64)> {
    let t_max = spec.line_half_height;
    let mut cuts: Vec<f64> = vec![-t_max, t_max];
    for &c in crossings {
        for s in [-c, c] {
            if s.abs() < t_max {
                cuts.push(s);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let is_cut = |x: f64| crossings.iter().any(|&c| (x.abs() - c).abs() < 1e-12);
    let per = 1usize << level;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let (cut_a, cut_b) = (is_cut(a), is_cut(b));
        match (cut_a, cut_b) {
            (false, false) => {
                let panels = ((len * 3.0).ceil().max(4.0) as usize) * per;
                quad::panel_nodes(a, b, panels, &mut out);
            }
            (true, false) => {
                let mut stack = Vec::new();
                quad::dyadic_nodes(len, DYADIC_LEVELS, per, &mut stack);
                out.extend(stack.into_iter().map(|(x, w)| (a + x, w)));
            }
            (false, true) => {
                let mut stack = Vec::new();
                quad::dyadic_nodes(len, DYADIC_LEVELS, per, &mut stack);
                out.extend(stack.into_iter().map(|(x, w)| (b - x, w)));
            }
            (true, true) => {
                let half = 0.5 * len;
                let mut stack = Vec::new();
                quad::dyadic_nodes(half, DYADIC_LEVELS, per, &mut stack);
                for &(x, w) in &stack {
                    out.push((a + x, w));
                    out.push((b - x, w));
                }
            }
        }
    }
    out
}

/// Nodes/weights (z, dz-weight) on the stadium boundaries, with dyadic
/// refinement toward every point where the u-line crosses a boundary.
fn loop_nodes(stadiums: &[Stadium], line_re: f64, level: usize) -> Vec<(Complex64, Complex64)> {
    let per = 1usize << level;
    let mut out = Vec::new();
    for st in stadiums {
        let segs = stadium_segments(st.lo, st.hi, st.r);
        for seg in segs {
            // Segment-local parameters where Re z = line_re, if crossing.
            let mut splits: Vec<f64> = vec![0.0, 1.0];
            match seg {
                Segment::Line { a, b } => {
                    let dx = b.re - a.re;
                    if dx.abs() > 1e-14 {
                        let t = (line_re - a.re) / dx;
                        if (1e-9..1.0 - 1e-9).contains(&t) {
                            splits.push(t);
                        }
                    }
                }
                Segment::Arc {
                    center,
                    radius,
                    th0,
                    th1,
                } => {
                    let c = (line_re - center.re) / radius;
                    if c.abs() < 1.0 {
                        for th in [c.acos(), -c.acos()] {
                            // Map the angle into the sweep.
                            for k in [-1.0f64, 0.0, 1.0] {
                                let tth = th + k * 2.0 * std::f64::consts::PI;
                                let t = (tth - th0) / (th1 - th0);
                                if (1e-9..1.0 - 1e-9).contains(&t) {
                                    splits.push(t);
                                }
                            }
                        }
                    }
                }
            }
            splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
            splits.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let interior: Vec<f64> = splits[1..splits.len() - 1].to_vec();
            let is_split = |x: f64| interior.iter().any(|&s| (s - x).abs() < 1e-12);
            let mut grid: Vec<(f64, f64)> = Vec::new();
            for w in splits.windows(2) {
                let (a, b) = (w[0], w[1]);
                let len = b - a;
                match (is_split(a), is_split(b)) {
                    (false, false) => {
                        let panels = ((len * seg.length() * 4.0).ceil().max(4.0) as usize) * per;
                        quad::panel_nodes(a, b, panels, &mut grid);
                    }
                    (true, false) => {
                        let mut stack = Vec::new();
                        quad::dyadic_nodes(len, DYADIC_LEVELS, per, &mut stack);
                        grid.extend(stack.into_iter().map(|(x, w)| (a + x, w)));
                    }
                    (false, true) => {
                        let mut stack = Vec::new();
                        quad::dyadic_nodes(len, DYADIC_LEVELS, per, &mut stack);
                        grid.extend(stack.into_iter().map(|(x, w)| (b - x, w)));
                    }
                    (true, true) => {
                        let half = 0.5 * len;
                        let mut stack = Vec::new();
                        quad::dyadic_nodes(half, DYADIC_LEVELS, per, &mut stack);
                        for &(x, w) in &stack {
                            grid.push((a + x, w));
                            grid.push((b - x, w));
                        }
                    }
                }
            }
            for &(t, w) in &grid {
                out.push((seg.at(t), w * seg.velocity(t)));
            }
        }
    }
    out
}

/// Evaluate the kernel. `f_log(u)`/`g_log(v)` are the complex logs of
/// F/G alone (without the γ-exponentials and pole products, which the
/// engine adds). Returns (value, error estimate, nodes used).
pub(crate) fn double_contour(
    spec: &EngineSpec,
    f_log: &dyn Fn(Complex64) -> Result<Complex64>,
    g_log: &dyn Fn(Complex64) -> Result<Complex64>,
) -> Result<(Complex64, f64, usize)> {
    if spec.poles.is_empty() {
        // No poles: the v-loop encloses nothing and the kernel is 0.
        return Ok((Complex64::new(0.0, 0.0), 0.0, 0));
    }
    let mut stadiums = build_stadiums(spec.poles);
    // A tangent line/stadium contact is numerically degenerate; nudge the
    // radius off the tangency deterministically.
    for st in &mut stadiums {
        let d0 = if spec.line_re < st.lo {
            st.lo - spec.line_re
        } else if spec.line_re > st.hi {
            spec.line_re - st.hi
        } else {
            0.0
        };
        if (d0 - st.r).abs() < 1e-6 * (1.0 + st.r) {
            st.r *= 0.98;
        }
    }
    let crossings: Vec<f64> = stadiums
        .iter()
        .filter_map(|st| crossing_half_height(st, spec.line_re))
        .collect();

    let mut prev: Option<Complex64> = None;
    let mut nodes_total = 0usize;
    for level in 0..4usize {
        let u_grid = line_nodes(spec, &crossings, level);
        let v_grid = loop_nodes(&stadiums, spec.line_re, level);
        nodes_total += u_grid.len() + v_grid.len();

        // Per-node logs with poles and exponentials folded in.
        let mut lfs = Vec::with_capacity(u_grid.len());
        let mut max_f = f64::NEG_INFINITY;
        for &(t, _) in &u_grid {
            let u = Complex64::new(spec.line_re, t);
            let mut lf = f_log(u)? + spec.gamma * u * u;
            for &p in spec.poles {
                lf += (u - p).ln();
            }
            if lf.re.is_finite() {
                max_f = max_f.max(lf.re);
            }
            lfs.push(lf);
        }
        let mut lgs = Vec::with_capacity(v_grid.len());
        let mut max_g = f64::NEG_INFINITY;
        for &(v, _) in &v_grid {
            let mut lg = g_log(v)? - spec.gamma * v * v;
            for &p in spec.poles {
                lg -= (v - p).ln();
            }
            if lg.re.is_finite() {
                max_g = max_g.max(lg.re);
            }
            lgs.push(lg);
        }
        if max_f + max_g > 690.0 {
            return Err(Error::Geometry(format!(
                "log-magnitude budget exceeded ({:.0} + {:.0} > 690): the contour \
                 exponentials cannot be paired within f64 range",
                max_f, max_g
            )));
        }
        let ef: Vec<Complex64> = u_grid
            .iter()
            .zip(&lfs)
            .map(|(&(_, w), &lf)| {
                Complex64::new(0.0, w) * (lf - max_f).exp() // du = i dt
            })
            .collect();
        let eg: Vec<Complex64> = v_grid
            .iter()
            .zip(&lgs)
            .map(|(&(_, wv), &lg)| wv * (lg - max_g).exp())
            .collect();

        let mut s = Complex64::new(0.0, 0.0);
        for (i, &fu) in ef.iter().enumerate() {
            if fu.norm_sqr() == 0.0 {
                continue;
            }
            let u = Complex64::new(spec.line_re, u_grid[i].0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &gv) in eg.iter().enumerate() {
                acc += gv / (u - v_grid[j].0);
            }
            s += fu * acc;
        }
        let mut k = spec.prefactor * (max_f + max_g).exp() * s;

        // Residue correction for every crossed stadium.
        for &tc in &crossings {
            let hi = tc.min(spec.line_half_height);
            let mut bad: Option<Error> = None;
            let mut integrand = |t: f64| -> Complex64 {
                let u = Complex64::new(spec.line_re, t);
                match (f_log(u), g_log(u)) {
                    (Ok(a), Ok(b)) => (a + b).exp(),
                    (Err(e), _) | (_, Err(e)) => {
                        bad = Some(e);
                        Complex64::new(f64::NAN, 0.0)
                    }
                }
            };
            let r = quad::integrate_breakpoints(
                &mut integrand,
                &[-hi, 0.0, hi],
                4 << level,
                spec.tol * 0.1,
            );
            if let Some(e) = bad {
                return Err(e);
            }
            let r = r?;
            // ∫ F G du with du = i dt, times pref·2πi.
            k += spec.prefactor
                * Complex64::new(0.0, 2.0 * std::f64::consts::PI)
                * Complex64::new(0.0, 1.0)
                * r.value;
        }

        if let Some(p) = prev {
            let err = (k - p).norm();
            if err <= spec.tol * k.norm().max(1e-300) {
                return Ok((k, err, nodes_total));
            }
            if level == 3 {
                return Ok((k, err, nodes_total));
            }
        }
        prev = Some(k);
    }
    unreachable!()
}

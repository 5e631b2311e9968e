//! Contour catalog and path integration.
//!
//! Every integration contour used by the kernel formulas is assembled
//! from two primitives (straight segments and circular arcs), each with
//! an analytic parametrization and derivative. `build` validates the
//! geometric preconditions that the saddle-point analysis imposes
//! (opening angles, loop clearances) before any integrand is touched.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self};
use crate::specfun::EvalResult;

/// Default truncation length for the two infinite wedge rays Σ±: the
/// integrands they carry decay like e^{-R⁴/4}, so R = 8 leaves a tail
/// below 1e-440.
pub const SIGMA_TRUNCATION: f64 = 8.0;

/// One smooth piece of a contour, parametrized over t ∈ [0, 1].
#[derive(Debug, Clone, Copy)]
pub enum Segment {
    Line { a: Complex64, b: Complex64 },
    /// z(t) = center + radius·e^{i((1-t)·th0 + t·th1)}; anticlockwise
    /// when th1 > th0.
    Arc {
        center: Complex64,
        radius: f64,
        th0: f64,
        th1: f64,
    },
}

impl Segment {
    pub fn at(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => a + t * (b - a),
            Segment::Arc {
                center,
                radius,
                th0,
                th1,
            } => center + Complex64::from_polar(radius, th0 + t * (th1 - th0)),
        }
    }

    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => b - a,
            Segment::Arc {
                center: _,
                radius,
                th0,
                th1,
            } => {
                let th = th0 + t * (th1 - th0);
                Complex64::new(0.0, th1 - th0) * Complex64::from_polar(radius, th)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => (b - a).norm(),
            Segment::Arc { radius, th0, th1, .. } => radius * (th1 - th0).abs(),
        }
    }
}

/// A concrete integration path: ordered segments plus the truncation
/// extent used for any nominally infinite parts.
#[derive(Debug, Clone)]
pub struct ContourPath {
    pub segments: Vec<Segment>,
    pub truncation_height: f64,
}

/// Declarative contour descriptions. Angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ContourSpec {
    /// The line Re z = 0 from -iT to +iT (the u-side of every
    /// double-contour kernel).
    VerticalLine { t: f64 },
    /// Anticlockwise stadium of the given radius around the convex hull
    /// of the (real) centers — the v-side loop enclosing source points.
    SourceLoop { centers: Vec<f64>, radius: f64 },
    /// Right lens arc through ±i√(1-a²), bulging to x = a+δ+r; with
    /// δ = 0 it passes through a ± 1. Valid for 0 ≤ a < 1, δ ≥ 0.
    ArcR { a: f64, delta: f64 },
    /// Left mirror of `ArcR`.
    ArcL { a: f64, delta: f64 },
    /// Two rays e^{±3iπ/4}·∞ → anchor (left V-wedge boundary), traversed
    /// from the lower-left ray through the vertex to the upper-left.
    SigmaMinus { anchor: f64 },
    /// Two rays anchor → e^{±iπ/4}·∞ (right V-wedge boundary), traversed
    /// from the upper-right ray through the vertex to the lower-right.
    SigmaPlus { anchor: f64 },
    /// Closed anticlockwise wedge loop with vertex notch δ, opening
    /// angle θ₀ and outer abscissa q (steepest-descent companion of
    /// Σ±; needs π/4 < θ₀ ≤ π/2 - arccos((2-√2)/2)/2 and q > 1).
    WedgePlus { delta: f64, theta0: f64, q: f64 },
    WedgeMinus { delta: f64, theta0: f64, q: f64 },
    /// [0, 1] on the real axis (hard-edge kernel).
    UnitInterval,
    /// Unit half-circle from -i to +i through +1 (subcritical kernel).
    RightHalfArc,
}

/// Largest admissible wedge opening: beyond it the quartic phase stops
/// being monotone along the whole ray.
pub fn theta0_max() -> f64 {
    0.5 * PI - 0.5 * ((2.0 - std::f64::consts::SQRT_2) / 2.0).acos()
}

pub fn build(spec: &ContourSpec) -> Result<ContourPath> {
    match spec {
        ContourSpec::VerticalLine { t } => {
            if !(*t > 0.0) || !t.is_finite() {
                return Err(Error::Geometry(format!("vertical line needs T > 0, got {t}")));
            }
            Ok(ContourPath {
                segments: vec![Segment::Line {
                    a: Complex64::new(0.0, -t),
                    b: Complex64::new(0.0, *t),
                }],
                truncation_height: *t,
            })
        }
        ContourSpec::SourceLoop { centers, radius } => {
            if centers.is_empty() {
                return Err(Error::Geometry("source loop needs at least one center".into()));
            }
            if !(*radius > 0.0) || !radius.is_finite() {
                return Err(Error::Geometry(format!("source loop radius must be > 0, got {radius}")));
            }
            if centers.iter().any(|c| !c.is_finite()) {
                return Err(Error::Geometry("source loop centers must be finite".into()));
            }
            let lo = centers.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = centers.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok(ContourPath {
                segments: stadium_segments(lo, hi, *radius),
                truncation_height: *radius,
            })
        }
        ContourSpec::ArcR { a, delta } => {
            let (c, r, s) = lens_arc_params(*a, *delta)?;
            // Vector angles from the center (c, 0) to the endpoints
            // (0, ∓s): start below, sweep anticlockwise through 0.
            let th0 = (-s).atan2(-c);
            let th1 = s.atan2(-c);
            Ok(ContourPath {
                segments: vec![Segment::Arc {
                    center: Complex64::new(c, 0.0),
                    radius: r,
                    th0,
                    th1,
                }],
                truncation_height: s,
            })
        }
        ContourSpec::ArcL { a, delta } => {
            let (c, r, s) = lens_arc_params(*a, *delta)?;
            // Mirror: center (-c, 0), from +i s anticlockwise through the
            // negative real axis to -i s.
            let th0 = s.atan2(c);
            let th1 = (-s).atan2(c) + 2.0 * PI;
            Ok(ContourPath {
                segments: vec![Segment::Arc {
                    center: Complex64::new(-c, 0.0),
                    radius: r,
                    th0,
                    th1,
                }],
                truncation_height: s,
            })
        }
        ContourSpec::SigmaMinus { anchor } => {
            let r = SIGMA_TRUNCATION;
            let v = Complex64::new(*anchor, 0.0);
            Ok(ContourPath {
                segments: vec![
                    Segment::Line {
                        a: v + Complex64::from_polar(r, -0.75 * PI),
                        b: v,
                    },
                    Segment::Line {
                        a: v,
                        b: v + Complex64::from_polar(r, 0.75 * PI),
                    },
                ],
                truncation_height: r,
            })
        }
        ContourSpec::SigmaPlus { anchor } => {
            let r = SIGMA_TRUNCATION;
            let v = Complex64::new(*anchor, 0.0);
            Ok(ContourPath {
                segments: vec![
                    Segment::Line {
                        a: v + Complex64::from_polar(r, 0.25 * PI),
                        b: v,
                    },
                    Segment::Line {
                        a: v,
                        b: v + Complex64::from_polar(r, -0.25 * PI),
                    },
                ],
                truncation_height: r,
            })
        }
        ContourSpec::WedgePlus { delta, theta0, q } => {
            let pts = wedge_vertices(*delta, *theta0, *q)?;
            Ok(ContourPath {
                segments: polyline(&pts, true),
                truncation_height: q * theta0.tan(),
            })
        }
        ContourSpec::WedgeMinus { delta, theta0, q } => {
            let pts: Vec<Complex64> = wedge_vertices(*delta, *theta0, *q)?
                .into_iter()
                .map(|z| -z)
                .collect();
            Ok(ContourPath {
                segments: polyline(&pts, true),
                truncation_height: q * theta0.tan(),
            })
        }
        ContourSpec::UnitInterval => Ok(ContourPath {
            segments: vec![Segment::Line {
                a: Complex64::new(0.0, 0.0),
                b: Complex64::new(1.0, 0.0),
            }],
            truncation_height: 0.0,
        }),
        ContourSpec::RightHalfArc => Ok(ContourPath {
            segments: vec![Segment::Arc {
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
                th0: -0.5 * PI,
                th1: 0.5 * PI,
            }],
            truncation_height: 1.0,
        }),
    }
}

fn lens_arc_params(a: f64, delta: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Geometry(format!("lens arcs need 0 ≤ a < 1, got {a}")));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Geometry(format!("lens arc bulge must be ≥ 0, got {delta}")));
    }
    let s = (1.0 - a * a).sqrt();
    let c = a + delta;
    let r = (c * c + s * s).sqrt();
    Ok((c, r, s))
}

fn wedge_vertices(delta: f64, theta0: f64, q: f64) -> Result<Vec<Complex64>> {
    if !(theta0 > 0.25 * PI && theta0 <= theta0_max() + 1e-12) {
        return Err(Error::Geometry(format!(
            "wedge opening must satisfy π/4 < θ₀ ≤ {:.6}, got {theta0}",
            theta0_max()
        )));
    }
    if !(q > 1.0) {
        return Err(Error::Geometry(format!("wedge outer abscissa needs q > 1, got {q}")));
    }
    if !(delta >= 0.0) || delta * theta0.cos() >= 1.0 {
        return Err(Error::Geometry(format!("wedge notch δ = {delta} out of range")));
    }
    let (s, c) = theta0.sin_cos();
    let tan = s / c;
    Ok(vec![
        Complex64::new(delta * c, delta * s),
        Complex64::new(0.0, 0.0),
        Complex64::new(delta * c, -delta * s),
        Complex64::new(1.0, -tan),
        Complex64::new(q, -tan),
        Complex64::new(q, tan),
        Complex64::new(1.0, tan),
    ])
}

fn polyline(pts: &[Complex64], closed: bool) -> Vec<Segment> {
    let mut segs = Vec::new();
    for w in pts.windows(2) {
        if (w[1] - w[0]).norm() > 1e-15 {
            segs.push(Segment::Line { a: w[0], b: w[1] });
        }
    }
    if closed {
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        if (first - last).norm() > 1e-15 {
            segs.push(Segment::Line { a: last, b: first });
        }
    }
    segs
}

/// Anticlockwise stadium around the real segment [lo, hi] at distance r:
/// bottom edge, right cap, top edge, left cap. Degenerates to a circle
/// when lo == hi.
pub(crate) fn stadium_segments(lo: f64, hi: f64, r: f64) -> Vec<Segment> {
    let mut segs = Vec::new();
    if hi - lo > 1e-15 {
        segs.push(Segment::Line {
            a: Complex64::new(lo, -r),
            b: Complex64::new(hi, -r),
        });
    }
    segs.push(Segment::Arc {
        center: Complex64::new(hi, 0.0),
        radius: r,
        th0: -0.5 * PI,
        th1: 0.5 * PI,
    });
    if hi - lo > 1e-15 {
        segs.push(Segment::Line {
            a: Complex64::new(hi, r),
            b: Complex64::new(lo, r),
        });
    }
    segs.push(Segment::Arc {
        center: Complex64::new(lo, 0.0),
        radius: r,
        th0: 0.5 * PI,
        th1: 1.5 * PI,
    });
    segs
}

/// ∫ f(z) dz along the path: composite GL panels per segment, all panel
/// counts doubled together until the last two levels agree to
/// tol·max(1, |I|). Non-finite integrand values abort with a
/// NonConvergence error naming the offending point.
pub fn integrate(
    path: &ContourPath,
    f: &mut dyn FnMut(Complex64) -> Complex64,
    tol: f64,
) -> Result<EvalResult> {
    let mut prev: Option<Complex64> = None;
    let mut nodes_total = 0usize;
    for level in 0..=quad::MAX_DOUBLINGS {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_abs = 0.0f64;
        let (xs, ws) = quad::gl16();
        for seg in &path.segments {
            let base = (seg.length() / 0.5).ceil().max(2.0) as usize;
            let panels = base << level;
            let h = 1.0 / panels as f64;
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * h;
                for i in 0..16 {
                    let t = mid + 0.5 * h * xs[i];
                    let z = seg.at(t);
                    let v = f(z) * seg.velocity(t);
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::NonConvergence(format!(
                            "non-finite integrand on contour at z = {z}"
                        )));
                    }
                    let w = 0.5 * h * ws[i];
                    sum += w * v;
                    sum_abs += w * v.norm();
                }
            }
            nodes_total += panels * 16;
        }
        if let Some(p) = prev {
            let err = (sum - p).norm();
            if err <= tol * sum.norm().max(1.0) {
                return Ok(EvalResult {
                    value: sum,
                    abs_error_estimate: err + 1.1e-16 * sum_abs,
                    terms_or_nodes_used: nodes_total,
                });
            }
        }
        prev = Some(sum);
    }
    Err(Error::NonConvergence(
        "contour panel doubling stalled before reaching tolerance".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_loop_winds_once() {
        // ∮ dz/(z - c) = 2πi for every enclosed center.
        let path = build(&ContourSpec::SourceLoop {
            centers: vec![-0.4, 1.3],
            radius: 0.7,
        })
        .unwrap();
        for c in [-0.4, 1.3, 0.5] {
            let pole = Complex64::new(c, 0.0);
            let mut f = |z: Complex64| 1.0 / (z - pole);
            let r = integrate(&path, &mut f, 1e-12).unwrap();
            let expect = Complex64::new(0.0, 2.0 * PI);
            assert!((r.value - expect).norm() < 1e-10, "c={c}: {}", r.value);
        }
    }

    #[test]
    fn lens_arcs_meet_at_the_saddles() {
        let a = 0.5;
        let s = (1.0f64 - a * a).sqrt();
        for spec in [ContourSpec::ArcR { a, delta: 0.0 }, ContourSpec::ArcL { a, delta: 0.0 }] {
            let p = build(&spec).unwrap();
            let seg = p.segments[0];
            let ends = [seg.at(0.0), seg.at(1.0)];
            for e in ends {
                assert!(e.re.abs() < 1e-12, "{spec:?}: endpoint {e}");
                assert!((e.im.abs() - s).abs() < 1e-12, "{spec:?}: endpoint {e}");
            }
        }
    }

    #[test]
    fn closed_loops_have_zero_circulation_of_entire_functions() {
        let specs = [
            ContourSpec::WedgePlus {
                delta: 0.1,
                theta0: 101.0 * PI / 400.0,
                q: 2.0,
            },
            ContourSpec::SourceLoop {
                centers: vec![0.0],
                radius: 1.0,
            },
        ];
        for spec in specs {
            let path = build(&spec).unwrap();
            let mut f = |z: Complex64| (z * z - 0.3 * z).exp();
            let r = integrate(&path, &mut f, 1e-12).unwrap();
            assert!(r.value.norm() < 1e-10, "{spec:?}: {}", r.value);
        }
    }

    #[test]
    fn bad_geometry_is_rejected() {
        assert!(build(&ContourSpec::ArcR { a: 1.2, delta: 0.0 }).is_err());
        assert!(build(&ContourSpec::WedgePlus {
            delta: 0.0,
            theta0: 0.2,
            q: 2.0
        })
        .is_err());
        assert!(build(&ContourSpec::WedgePlus {
            delta: 0.0,
            theta0: 101.0 * PI / 400.0,
            q: 0.5
        })
        .is_err());
        assert!(build(&ContourSpec::VerticalLine { t: -1.0 }).is_err());
    }
}

//! Finite-n kernel: frozen anchors, determinantal structure, and the
//! reduction to the Hermite Christoffel–Darboux kernel.

use num_complex::Complex64;
use prodspec::finite_kernel::{
    correlation, joint_pdf, kernel_biortho, kernel_contour, moment_entry_quadrature,
    moment_matrix, EnsembleParams,
};
use prodspec::specfun::hermite;
use prodspec::NuVector;

fn params_n2() -> EnsembleParams {
    EnsembleParams::new(2, NuVector::new(vec![0]), vec![0.3, -0.3]).unwrap()
}

#[test]
fn kernel_anchors_n2() {
    let p = params_n2();
    for (x, y, want) in [
        (0.5, 0.7, 0.301694265704391503),
        (1.1, -0.4, -0.0896090361121114371),
    ] {
        let kb = kernel_biortho(&p, x, y).unwrap();
        let kc = kernel_contour(&p, x, y).unwrap();
        assert!(
            (kb.value - want).abs() / want.abs() < 1e-10,
            "biortho K({x},{y}) = {} vs {want}",
            kb.value
        );
        assert!(
            (kc.value - want).abs() / want.abs() < 1e-8,
            "contour K({x},{y}) = {} vs {want}",
            kc.value
        );
        assert!(kc.abs_error_estimate < 1e-6);
    }
}

#[test]
fn moment_entries_closed_vs_quadrature() {
    let nus = NuVector::new(vec![0]);
    let p = EnsembleParams::new(3, nus.clone(), vec![0.3, 0.0, -0.4]).unwrap();
    let mm = moment_matrix(&p).unwrap();
    for (k, want) in [
        (1usize, 1.93937342271508471),
        (2, 0.581812026814525414),
        (3, 2.28846063880379996),
    ] {
        let closed = mm.entries[(k - 1, 0)];
        let quad = moment_entry_quadrature(&nus, k, 0.3).unwrap();
        assert!(
            (closed - want).abs() / want.abs() < 1e-12,
            "closed entry k={k}: {closed} vs {want}"
        );
        assert!(
            (quad - want).abs() / want.abs() < 1e-8,
            "quadrature entry k={k}: {quad} vs {want}"
        );
    }
}

/// ∫K(x,x)dx = n. The diagonal inherits the weight's ln(1/|x|) kink at
/// the origin (ν = 0), so the grid combines a geometric stack on (0,1]
/// with doubling outer panels, as in the moment cross-check.
#[test]
fn kernel_trace_counts_eigenvalues() {
    let p = params_n2();
    let half = 90.0; // diag ~ exp(-3·x^{2/3}·2^{-2/3}) < 1e-14 past here
    let mut prev: Option<f64> = None;
    for level in 0..6u32 {
        let mut grid: Vec<(f64, f64)> = Vec::new();
        prodspec_test_grid(half, 1usize << level, &mut grid);
        let mut sum = 0.0;
        for &(x, w) in &grid {
            sum += w * kernel_biortho(&p, x, x).unwrap().value;
        }
        if let Some(q) = prev {
            if (sum - q).abs() < 1e-8 {
                assert!((sum - 2.0).abs() < 1e-7, "trace = {sum}");
                return;
            }
        }
        prev = Some(sum);
    }
    panic!("trace quadrature did not settle: {prev:?}");
}

/// Symmetric dyadic-plus-panel grid on [-half, half]: geometric windows
/// on (0,1] resolve the logarithmic origin, uniform panels cover the rest.
fn prodspec_test_grid(half: f64, refine: usize, out: &mut Vec<(f64, f64)>) {
    let gl = gauss_legendre_16();
    let mut push_panel = |a: f64, b: f64, out: &mut Vec<(f64, f64)>| {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for &(t, w) in gl.iter() {
            out.push((c + h * t, h * w));
        }
    };
    // Geometric stack over (0, 1], mirrored.
    let mut hi = 1.0f64;
    for _ in 0..40 {
        let lo = 0.5 * hi;
        for k in 0..refine {
            let a = lo + (hi - lo) * k as f64 / refine as f64;
            let b = lo + (hi - lo) * (k + 1) as f64 / refine as f64;
            push_panel(a, b, out);
            push_panel(-b, -a, out);
        }
        hi = lo;
    }
    // Outer panels.
    let outer = 8 * refine;
    for k in 0..outer {
        let a = 1.0 + (half - 1.0) * k as f64 / outer as f64;
        let b = 1.0 + (half - 1.0) * (k + 1) as f64 / outer as f64;
        push_panel(a, b, out);
        push_panel(-b, -a, out);
    }
}

fn gauss_legendre_16() -> [(f64, f64); 16] {
    // 16-point Gauss-Legendre nodes/weights on [-1, 1].
    let half: [(f64, f64); 8] = [
        (0.09501250983763744019, 0.189450610455068496285),
        (0.28160355077925891323, 0.182603415044923588867),
        (0.45801677765722738634, 0.169156519395002538189),
        (0.61787624440264374845, 0.149595988816576732081),
        (0.75540440835500303390, 0.124628971255533872052),
        (0.86563120238783174388, 0.095158511682492784810),
        (0.94457502307323257608, 0.062253523938647892863),
        (0.98940093499164993260, 0.027152459411754094852),
    ];
    let mut out = [(0.0, 0.0); 16];
    for (i, &(x, w)) in half.iter().enumerate() {
        out[2 * i] = (x, w);
        out[2 * i + 1] = (-x, w);
    }
    out
}

/// Top-order correlation is n!·(joint density): independent
/// normalisations (kernel inversion vs explicit partition function)
/// must reproduce each other.
#[test]
fn joint_density_matches_top_correlation() {
    let p = params_n2();
    for (x1, x2) in [(0.4, 1.1), (-0.8, 0.6), (1.3, 1.9)] {
        let rho = correlation(&p, &[x1, x2]).unwrap();
        let joint = joint_pdf(&p, &[x1, x2]).unwrap();
        assert!(
            (rho - 2.0 * joint).abs() / rho.abs() < 1e-8,
            "({x1},{x2}): rho = {rho}, 2·joint = {}",
            2.0 * joint
        );
    }
}

/// Coincident sources go through the ε-spread path of the joint density
/// and the clustered-pole path of the contour kernel; the two must agree.
#[test]
fn joint_density_coincident_sources() {
    let p = EnsembleParams::new(2, NuVector::new(vec![0]), vec![0.3, 0.3]).unwrap();
    for (x1, x2) in [(0.5, 1.2), (-0.7, 0.4)] {
        let joint = joint_pdf(&p, &[x1, x2]).unwrap();
        let k11 = kernel_contour(&p, x1, x1).unwrap().value;
        let k12 = kernel_contour(&p, x1, x2).unwrap().value;
        let k21 = kernel_contour(&p, x2, x1).unwrap().value;
        let k22 = kernel_contour(&p, x2, x2).unwrap().value;
        let rho = k11 * k22 - k12 * k21;
        assert!(
            (rho - 2.0 * joint).abs() / rho.abs() < 1e-6,
            "({x1},{x2}): rho = {rho}, 2·joint = {}",
            2.0 * joint
        );
    }
}

#[test]
fn diagonal_positive_and_pair_repulsion() {
    let p = params_n2();
    for x in [-2.0, -0.9, 0.4, 1.7] {
        assert!(kernel_biortho(&p, x, x).unwrap().value > 0.0);
    }
    // det of a rank-deficient correlation matrix: coincident points repel.
    let rho = correlation(&p, &[0.8, 0.8]).unwrap();
    assert!(rho.abs() < 1e-12, "coincident-point correlation {rho}");
}

/// M = 0, b = 0 is the GUE with density e^{-y²}: the kernel must match
/// the Hermite Christoffel–Darboux sum with the weight on the y slot.
#[test]
fn gue_reduction_anchor() {
    let p = EnsembleParams::new(4, NuVector::new(vec![]), vec![0.0; 4]).unwrap();
    let cd = |n: usize, x: f64, y: f64| -> f64 {
        let mut s = 0.0;
        let mut norm = std::f64::consts::PI.sqrt();
        for k in 0..n {
            let hx = hermite(k, Complex64::new(x, 0.0)).re;
            let hy = hermite(k, Complex64::new(y, 0.0)).re;
            s += hx * hy / norm;
            norm *= 2.0 * (k as f64 + 1.0);
        }
        (-y * y).exp() * s
    };
    for (x, y) in [(0.5, 0.5), (1.0, -0.5)] {
        let k = kernel_contour(&p, x, y).unwrap();
        assert!(
            (k.value - cd(4, x, y)).abs() < 1e-9,
            "({x},{y}): {} vs {}",
            k.value,
            cd(4, x, y)
        );
    }
}

//! Frozen-value anchors for the special-function layer. Reference
//! values were computed with an independent arbitrary-precision
//! implementation and are written here to 20 significant digits.

use num_complex::Complex64;
use prodspec::specfun::pcf::pcf_u_asymptotic;
use prodspec::specfun::{f_m, g_m, hermite, log_gamma, meijer_g10, meijer_gm0, meijer_gm10, pcf_u};
use prodspec::NuVector;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}

#[test]
fn log_gamma_anchors() {
    for (z, want) in [
        (c(0.5, 3.0), c(-3.79345045043622317, 0.309819271086439166)),
        (c(5.0, -2.0), c(2.74870175613380267, -3.07384341004970079)),
        (c(-3.7, 0.1), c(-1.45096043029881122, -12.6401476463089207)),
        (c(12.3, 45.6), c(-25.505555190755227, 145.613889195193338)),
    ] {
        let got = log_gamma(z).unwrap();
        assert!(rel(got, want) < 1e-13, "log_gamma({z}): {got} vs {want}");
    }
}

#[test]
fn pcf_u_anchors() {
    for (cc, z, want) in [
        (c(1.5, 0.0), c(2.0, 0.0), c(0.0578532879767806686, 0.0)),
        (c(0.7, 0.0), c(-3.0, 0.0), c(31.8940553556797781, 0.0)),
        (c(2.5, 0.0), c(0.5, 1.5), c(-0.23254561778870776, -0.222085189280715191)),
        (c(0.5, 0.0), c(0.0, 10.0), c(1.74059563842000111e-11, -7274771314.71309635)),
    ] {
        let got = pcf_u(cc, z).unwrap();
        assert!(
            rel(got.value, want) < 1e-10,
            "U({cc},{z}): {} vs {want}",
            got.value
        );
        assert!(got.abs_error_estimate <= want.norm() * 1e-8);
    }
}

/// The asymptotic evaluator against exact values at |z| ≥ 8 in every
/// sector: recessive axis, the two Stokes rays, the anti-Stokes ray,
/// the left axis, and interior points of both half-planes.
#[test]
fn pcf_u_asymptotic_sectors() {
    for (cc, z, want) in [
        (c(1.5, 0.0), c(9.0, 0.0), c(1.9125420309992629789e-11, 0.0)),
        (c(0.5, 0.0), c(0.0, 10.0), c(1.7405956384203475786e-11, -7274771314.7130963484)),
        (c(2.0, 0.5), c(-6.0, 6.0), c(67.428195362904648476, 27.520045185185360096)),
        (c(0.7, 0.0), c(-9.0, 0.0), c(2636593030.2307376514, 0.0)),
        (c(1.2, 0.0), c(-7.0, -5.0), c(3063.5853747915507498, -3973.8490091952268166)),
        (c(0.5, 0.0), c(-4.0, 6.9282032302755091741), c(256.54726902681397624, -274.07321565749213175)),
        (c(0.9, -0.3), c(6.0, -7.0), c(-0.96522137112456392666, -1.1265922796830106655)),
    ] {
        let got = pcf_u_asymptotic(cc, z).unwrap();
        assert!(rel(got, want) < 1e-6, "asym U({cc},{z}): rel {}", rel(got, want));
    }
}

#[test]
fn meijer_g10_anchors() {
    for (nus, z, want) in [
        (vec![0], c(1.0, 0.0), c(0.223890779141235668, 0.0)),
        (vec![1], c(1.0, 0.0), c(0.576724807756873387, 0.0)),
        (vec![0, 2], c(1.5, 0.0), c(0.272668352942661066, 0.0)),
        (vec![0, 2], c(-2.3, 0.0), c(0.941322306239444976, 0.0)),
        (vec![0], c(0.5, 2.0), c(-0.259277497408434904, -1.34621659588467772)),
    ] {
        let got = meijer_g10(&NuVector::new(nus.clone()), z).unwrap();
        assert!(
            rel(got.value, want) < 1e-12,
            "g10 nu={nus:?} z={z}: {} vs {want}",
            got.value
        );
    }
}

#[test]
fn meijer_gm10_anchors() {
    for (nus, z, want) in [
        (vec![0], c(1.0, 0.0), c(0.227787745499066871, 0.0)),
        (vec![2], c(0.8, 0.0), c(0.568432325372431398, 0.0)),
        (vec![1, 1], c(2.5, 1.2), c(0.0807315590490228472, -0.0440369579176168708)),
        (vec![0, 1], c(1.0, 0.0), c(0.214116165561399214, 0.0)),
    ] {
        let got = meijer_gm10(&NuVector::new(nus.clone()), z).unwrap();
        assert!(
            rel(got.value, want) < 1e-10,
            "gm10 nu={nus:?} z={z}: {} vs {want}",
            got.value
        );
    }
}

/// Hard-edge factor G^{M,0}_{0,M+1} on (0, ∞): both the small-z residue
/// series (with its log-power cases at repeated offsets) and the large-z
/// contour route, across the ~16 crossover.
#[test]
fn meijer_gm0_anchors() {
    for (nus, z, want) in [
        (vec![1], 0.7, 0.48197299059656146252),
        (vec![1], 1e-6, 9.9999950000008333333e-7),
        (vec![1], 16.5, 1.0169030157227834099),
        (vec![1], 25.0, 0.21736373084430718335),
        (vec![1], 29.0, -0.73485434343184753153),
        (vec![1], 40.0, -0.88555748381377583572),
        (vec![1], 60.0, 1.3026868345549851235),
        (vec![1], 100.0, 0.66833124175850045579),
        (vec![1, 2], 0.9, 0.37290033886796394176),
        (vec![1, 2], 1e-4, 9.9950105548773605299e-5),
        (vec![1, 2], 12.0, -0.20491437452208343081),
        (vec![1, 2], 35.0, 0.035561542448874018075),
        (vec![1, 1], 0.5, 0.30854565003226995518),
        (vec![1, 1], 5.0, -0.058075528743482788216),
        (vec![1, 1], 20.0, -0.011470570359947602461),
        (vec![1, 1], 60.0, 0.0032632735667770603928),
        (vec![0, 0], 0.3, 0.25933712042156834112),
        (vec![1, 1, 2], 0.8, 0.26525270499525514844),
        (vec![0, 1], 2.0, -0.04721800709248051276),
        (vec![0, 1], 50.0, -0.00091635573546754727331),
    ] {
        let nv = NuVector::new(nus.clone());
        let r = meijer_gm0(&nv, z).unwrap();
        let e = (r.value.re - want).abs() / want.abs();
        assert!(e < 1e-11, "gm0 nu={nus:?} z={z}: rel {e:.2e}");
        assert_eq!(r.value.im, 0.0, "real argument must give a real value");
        assert!(r.abs_error_estimate / want.abs() < 1e-9, "estimate too large");
    }
}

/// M = 1 reduction: G^{1,0}_{0,2}(z | ν; 0) = z^{ν/2} J_ν(2√z).
#[test]
fn meijer_gm0_bessel_reduction() {
    // J_1(2) = 0.57672480775687338720, J_0(2) = 0.22389077914123566805
    let j1 = meijer_gm0(&NuVector::new(vec![1]), 1.0).unwrap();
    assert!((j1.value.re - 0.57672480775687338720).abs() < 1e-13);
    let j0 = meijer_gm0(&NuVector::new(vec![0]), 1.0).unwrap();
    assert!((j0.value.re - 0.22389077914123566805).abs() < 1e-13);
}

#[test]
fn f_m_anchors() {
    for (nus, x, u, want) in [
        (vec![0], 1.0, c(0.5, 0.0), c(0.593923998736142931, 0.0)),
        (vec![1, 3], 0.7, c(-1.2, 0.0), c(0.204402509411631364, 0.0)),
        (vec![2], 0.3, c(2.0, 1.0), c(0.324773054449103625, -0.0734924032463432274)),
        (vec![0, 1, 2], 0.5, c(0.8, 0.0), c(0.435296049422874555, 0.0)),
    ] {
        let got = f_m(&NuVector::new(nus.clone()), x, u).unwrap();
        assert!(
            rel(got.value, want) < 1e-12,
            "f nu={nus:?} x={x} u={u}: {} vs {want}",
            got.value
        );
    }
}

#[test]
fn g_m_anchors() {
    for (nus, y, v, want) in [
        (vec![0], 1.0, c(0.0, 0.0), c(0.186928732261528019, 0.0)),
        (vec![0], 1.0, c(0.3, 0.0), c(0.310851244089996494, 0.0)),
        (vec![2], -0.7, c(0.4, 0.25), c(0.518889607472688839, -0.0929910204918908973)),
        (vec![0, 1], 0.6, c(-0.35, 0.0), c(0.230788765781108845, 0.0)),
    ] {
        let got = g_m(&NuVector::new(nus.clone()), y, v).unwrap();
        assert!(
            rel(got.value, want) < 1e-12,
            "g nu={nus:?} y={y} v={v}: {} vs {want}",
            got.value
        );
    }
}

/// Far-tail anchors: the weight decays only stretched-exponentially, so
/// values stay representable far out; the quadrature cuts must track the
/// receding saddle to keep relative accuracy there.
#[test]
fn g_m_far_tail_anchors() {
    for (nus, y, v, want) in [
        (vec![0], 50.0, c(0.3, 0.0), c(1.5073928290749365832e-11, 0.0)),
        (vec![0], 80.0, c(0.3, 0.0), c(1.3824948253848234829e-15, 0.0)),
        (vec![0], 120.0, c(0.3, 0.0), c(3.030719285931849348e-20, 0.0)),
        (vec![2], 60.0, c(0.4, 0.25), c(1.5634243316436370089e-12, 3.8671165273645456087e-10)),
        (vec![0, 1], 40.0, c(-0.35, 0.0), c(3.7354835802790997e-6, 0.0)),
        (vec![0, 1], 80.0, c(-0.35, 0.0), c(5.63780879814786667e-8, 0.0)),
    ] {
        let got = g_m(&NuVector::new(nus.clone()), y, v).unwrap();
        assert!(
            rel(got.value, want) < 1e-11,
            "g tail nu={nus:?} y={y}: rel {:.2e}",
            rel(got.value, want)
        );
    }
}

#[test]
fn hermite_closed_forms() {
    let z = c(0.7, -0.2);
    assert!(rel(hermite(0, z), c(1.0, 0.0)) < 1e-15);
    assert!(rel(hermite(1, z), 2.0 * z) < 1e-15);
    assert!(rel(hermite(3, z), 8.0 * z * z * z - 12.0 * z) < 1e-14);
}

use prodspec::limits::kernel_meijer_hard_edge;
use prodspec::specfun::meijer_gm0;
use prodspec::NuVector;

#[test]
fn gm0_routes_probe() {
    for (nus, z, want) in [
        (vec![1], 0.7, 0.48197299059656146252),
        (vec![1], 1e-6, 9.9999950000008333333e-7),
        (vec![1], 25.0, 0.21736373084430718335),
        (vec![1], 29.0, -0.73485434343184753153),
        (vec![1], 40.0, -0.88555748381377583572),
        (vec![1, 2], 0.9, 0.37290033886796394176),
        (vec![1, 2], 1e-4, 0.000099950105548773605299),
        (vec![1, 2], 12.0, -0.20491437452208343081),
        (vec![1, 1], 0.5, 0.30854565003226995518),
        (vec![1, 1], 5.0, -0.058075528743482788216),
        (vec![0, 0], 0.3, 0.25933712042156834112),
        (vec![1, 1, 2], 0.8, 0.26525270499525514844),
        (vec![0, 1], 2.0, -0.04721800709248051276),
        (vec![1], 16.5, 1.0169030157227834099),
        (vec![1], 60.0, 1.3026868345549851235),
        (vec![1], 100.0, 0.66833124175850045579),
        (vec![1, 1], 20.0, -0.011470570359947602461),
        (vec![1, 1], 60.0, 0.0032632735667770603928),
        (vec![1, 2], 35.0, 0.035561542448874018075),
        (vec![0, 1], 50.0, -0.00091635573546754727331),
    ] {
        let nv = NuVector::new(nus.clone());
        let r = meijer_gm0(&nv, z).unwrap();
        let rel = (r.value.re - want).abs() / want.abs();
        println!(
            "nu={nus:?} z={z:9.1e} got {:+.16e} rel={rel:.2e} est={:.1e} n={}",
            r.value.re, r.abs_error_estimate, r.terms_or_nodes_used
        );
        assert!(rel < 1e-11, "nu={nus:?} z={z}: rel {rel}");
        assert!(r.value.im == 0.0);
    }
    let k = kernel_meijer_hard_edge(&NuVector::new(vec![1]), 1.0, 1.0).unwrap();
    println!("hard edge M1 nu1 (1,1): {:+.16e} est {:.1e}", k.value, k.abs_error_estimate);
    let rel = (k.value - 0.25361521830790639562).abs() / 0.25361521830790639562;
    assert!(rel < 1e-9, "hard edge rel {rel}");
}

#[test]
fn u_asym_probe() {
    use num_complex::Complex64;
    use prodspec::specfun::pcf::pcf_u_asymptotic;
    let cases = [
        (Complex64::new(1.5, 0.0), Complex64::new(9.0, 0.0), Complex64::new(1.9125420309992629789e-11, 0.0)),
        (Complex64::new(0.5, 0.0), Complex64::new(0.0, 10.0), Complex64::new(1.7405956384203475786e-11, -7274771314.7130963484)),
        (Complex64::new(2.0, 0.5), Complex64::new(-6.0, 6.0), Complex64::new(67.428195362904648476, 27.520045185185360096)),
        (Complex64::new(0.7, 0.0), Complex64::new(-9.0, 0.0), Complex64::new(2636593030.2307376514, 0.0)),
        (Complex64::new(1.2, 0.0), Complex64::new(-7.0, -5.0), Complex64::new(3063.5853747915507498, -3973.8490091952268166)),
        (Complex64::new(0.5, 0.0), Complex64::new(-4.0, 6.9282032302755091741), Complex64::new(256.54726902681397624, -274.07321565749213175)),
        (Complex64::new(0.9, -0.3), Complex64::new(6.0, -7.0), Complex64::new(-0.96522137112456392666, -1.1265922796830106655)),
    ];
    for (c, z, want) in cases {
        let got = pcf_u_asymptotic(c, z).unwrap();
        let rel = (got - want).norm() / want.norm();
        println!("c={c} z={z} rel={rel:.3e}");
        assert!(rel < 1e-6, "c={c} z={z} rel={rel:.3e}");
    }
}

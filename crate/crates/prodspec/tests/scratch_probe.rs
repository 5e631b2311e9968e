use num_complex::Complex64;
use prodspec::finite_kernel::{kernel_contour, EnsembleParams};
use prodspec::specfun::hermite;
use prodspec::NuVector;

fn hermite_cd(n: usize, x: f64, y: f64) -> f64 {
    let mut s = 0.0;
    let mut norm = std::f64::consts::PI.sqrt();
    for k in 0..n {
        let hx = hermite(k, Complex64::new(x, 0.0)).re;
        let hy = hermite(k, Complex64::new(y, 0.0)).re;
        s += hx * hy / norm;
        norm *= 2.0 * (k as f64 + 1.0);
    }
    (-y * y).exp() * s
}

#[test]
fn gue_cd_normalization() {
    let p = EnsembleParams::new(6, NuVector::new(vec![]), vec![0.0; 6]).unwrap();
    for (x, y) in [(0.5, 0.5), (1.0, -0.5), (-2.0, 1.5), (0.0, 2.0)] {
        let k = kernel_contour(&p, x, y).unwrap();
        let cd = hermite_cd(6, x, y);
        println!(
            "x={x} y={y}  contour={:+.12e}  cd={:+.12e}  absdiff={:.2e}",
            k.value,
            cd,
            (k.value - cd).abs()
        );
    }
}

#[test]
fn transition_triple() {
    use prodspec::limits::{transition_convergence, CriticalParams, RegimeParams, SupercriticalParams};
    let nus = NuVector::new(vec![0]);
    let grid = [-1.0, 0.5, 1.0];
    for (name, regime) in [
        (
            "super a=2 p=1",
            RegimeParams::Supercritical(SupercriticalParams {
                a: 2.0,
                spikes: vec![1.0],
            }),
        ),
        (
            "crit tau=0",
            RegimeParams::Critical(CriticalParams {
                tau: 0.0,
                spikes: vec![],
                p0: 0,
            }),
        ),
        (
            "sub a=0",
            RegimeParams::Subcritical {
                a: 0.0,
                spikes: vec![],
            },
        ),
    ] {
        for n in [50usize, 100, 200] {
            let t0 = std::time::Instant::now();
            let rows = transition_convergence(&nus, &regime, &[n], &grid).unwrap();
            println!(
                "{name}: n={n} sup={:.4e} at ({:.1},{:.1})  [{:?}]",
                rows[0].sup_error,
                rows[0].worst_x,
                rows[0].worst_y,
                t0.elapsed()
            );
        }
    }
}

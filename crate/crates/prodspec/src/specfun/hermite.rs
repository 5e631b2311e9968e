//! Physicists' Hermite polynomials via the three-term recurrence.

use num_complex::Complex64;

/// H_m(z): H_0 = 1, H_1 = 2z, H_{m+1} = 2z H_m - 2m H_{m-1}.
pub fn hermite(m: usize, z: Complex64) -> Complex64 {
    match m {
        0 => Complex64::new(1.0, 0.0),
        1 => 2.0 * z,
        _ => {
            let mut h0 = Complex64::new(1.0, 0.0);
            let mut h1 = 2.0 * z;
            for k in 1..m {
                let h2 = 2.0 * z * h1 - (2.0 * k as f64) * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    }
}

/// i^{-m} H_m(i b) for real b — real for all m, by the recurrence
/// h_0 = 1, h_1 = 2b, h_{m+1} = 2b h_m + 2m h_{m-1}. These are the
/// Hermite polynomials with all-positive coefficients that appear in the
/// closed form of the source-side moment matrix.
pub fn hermite_i_scaled(m: usize, b: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0 * b,
        _ => {
            let mut h0 = 1.0;
            let mut h1 = 2.0 * b;
            for k in 1..m {
                let h2 = 2.0 * b * h1 + (2.0 * k as f64) * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let z = Complex64::new(0.7, -0.2);
        // H_2 = 4z² - 2, H_3 = 8z³ - 12z.
        assert!((hermite(2, z) - (4.0 * z * z - 2.0)).norm() < 1e-14);
        assert!((hermite(3, z) - (8.0 * z * z * z - 12.0 * z)).norm() < 1e-13);
    }

    #[test]
    fn i_scaled_matches_definition() {
        // i^{-m} H_m(ib) computed through the complex recurrence.
        for m in 0..8 {
            let b = 0.83;
            let lhs = hermite_i_scaled(m, b);
            let i = Complex64::new(0.0, 1.0);
            let rhs = i.powi(-(m as i32)) * hermite(m, i * b);
            assert!((lhs - rhs.re).abs() < 1e-10 * lhs.abs().max(1.0), "m={m}");
            assert!(rhs.im.abs() < 1e-10 * lhs.abs().max(1.0));
        }
    }
}

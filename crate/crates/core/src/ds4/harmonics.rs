//! Scalar hyperspherical harmonics on the unit S³.
//!
//! `Y_{Llm}(χ, θ, φ) = N_{Ll} sin^l χ C^{(l+1)}_{L−l}(cos χ) Y_{lm}(θ, φ)` with
//! `N_{Ll}² = 2^{2l+1} (l!)² (L+1) (L−l)! / (π (L+l+1)!)`, orthonormal under
//! `sin²χ sinθ dχ dθ dφ`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gegenbauer polynomial `C_n^{(α)}(x)` by three-term recurrence.
pub fn gegenbauer(n: usize, alpha: f64, x: f64) -> f64 {
    let mut c0 = 1.0;
    if n == 0 {
        return c0;
    }
    let mut c1 = 2.0 * alpha * x;
    for k in 2..=n {
        let kf = k as f64;
        let c2 = (2.0 * x * (kf + alpha - 1.0) * c1 - (kf + 2.0 * alpha - 2.0) * c0) / kf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Orthonormalized associated Legendre function
/// `√((2l+1)/4π · (l−m)!/(l+m)!) P_l^m(x)` for `m ≥ 0`, Condon–Shortley phase included.
fn normalized_legendre(l: usize, m: usize, x: f64) -> f64 {
    debug_assert!(m <= l);
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_m^m = (−1)^m (2m−1)!! s^m
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    let value = if l == m {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = x * (2 * m + 1) as f64 * pmm;
        for ll in (m + 2)..=l {
            let p2 = ((2 * ll - 1) as f64 * x * p1 - (ll + m - 1) as f64 * p0) / (ll - m) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let ln_norm = 0.5
        * (((2 * l + 1) as f64 / (4.0 * PI)).ln() + ln_factorial(l - m) - ln_factorial(l + m));
    value * ln_norm.exp()
}

/// Complex spherical harmonic `Y_lm(θ, φ)`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| must not exceed l");
    let p = normalized_legendre(l, am, theta.cos());
    let y = Complex64::from_polar(p, am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

/// Radial normalization `N_{Ll}`.
fn radial_norm(big_l: usize, l: usize) -> f64 {
    let ln = (2 * l + 1) as f64 * 2f64.ln() + 2.0 * ln_factorial(l) + ((big_l + 1) as f64).ln()
        + ln_factorial(big_l - l)
        - PI.ln()
        - ln_factorial(big_l + l + 1);
    (0.5 * ln).exp()
}

/// `Y_{Llm}(χ, θ, φ)` for `0 ≤ l ≤ L`, `|m| ≤ l`.
pub fn hyperspherical_harmonic(big_l: usize, l: usize, m: i64, chi: f64, theta: f64, phi: f64) -> Complex64 {
    assert!(l <= big_l, "l must not exceed L");
    let radial = radial_norm(big_l, l)
        * chi.sin().powi(l as i32)
        * gegenbauer(big_l - l, (l + 1) as f64, chi.cos());
    spherical_harmonic(l, m, theta, phi) * radial
}

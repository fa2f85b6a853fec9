//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: integrals use adaptive
//! Simpson quadrature and the Mie root uses its own Bessel functions.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Closed-form long-axis factor of a prolate spheroid with semi-axes `(a, b, b)`.
pub fn prolate_long_factor(a: f64, b: f64) -> f64 {
    let e = (1.0 - (b / a).powi(2)).sqrt();
    (1.0 - e * e) / (e * e) * (((1.0 + e) / (1.0 - e)).ln() / (2.0 * e) - 1.0)
}

/// `Lᵢ = (abc/2) ∫₀^∞ ds / ((s + aᵢ²) √Π(s + aⱼ²))` by adaptive quadrature
/// after mapping `s = t/(1 − t)`.
pub fn depolarization_by_quadrature(axes: [f64; 3]) -> [f64; 3] {
    let p: f64 = axes.iter().product();
    let sq = axes.map(|a| a * a);
    let mut out = [0.0; 3];
    for i in 0..3 {
        let f = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = t / (1.0 - t);
            let jac = 1.0 / ((1.0 - t) * (1.0 - t));
            let root = ((s + sq[0]) * (s + sq[1]) * (s + sq[2])).sqrt();
            jac / ((s + sq[i]) * root)
        };
        out[i] = 0.5 * p * adaptive_simpson(&f, 0.0, 1.0, 1e-13);
    }
    out
}

/// Drude permittivity written out independently of the library.
pub fn drude(omega_p: f64, tau: f64, omega: f64) -> Complex64 {
    Complex64::from(1.0) - omega_p * omega_p / (omega * Complex64::new(omega, 1.0 / tau))
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn riccati_psi(z: Complex64) -> Complex64 {
    z.sin() / z - z.cos()
}

fn riccati_psi_prime(z: Complex64) -> Complex64 {
    z.cos() / z - z.sin() / (z * z) + z.sin()
}

fn riccati_xi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (i * z).exp() * (-1.0 - i / z)
}

fn riccati_xi_prime(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (i * z).exp() * (-i + 1.0 / z + i / (z * z))
}

/// Denominator of the electric dipole Mie coefficient for relative
/// permittivity `eps` at size parameter `x` (nonmagnetic sphere).
fn mie_a1_denominator(eps: Complex64, x: f64) -> Complex64 {
    let m = eps.sqrt();
    let x = Complex64::from(x);
    m * riccati_psi(m * x) * riccati_xi_prime(x) - riccati_xi(x) * riccati_psi_prime(m * x)
}

/// Complex permittivity ratio at which the dipole Mie coefficient has a
/// pole, expressed as `λ = 1/(1 − ε)`. Secant iteration from the Fröhlich value.
pub fn mie_dipole_lambda(x: f64) -> Complex64 {
    let mut e0 = Complex64::new(-2.0, 0.0);
    let mut e1 = Complex64::new(-2.0 - 2.4 * x * x, 0.01 * x * x * x);
    let mut f0 = mie_a1_denominator(e0, x);
    for _ in 0..100 {
        let f1 = mie_a1_denominator(e1, x);
        if f1.norm() < 1e-300 {
            break;
        }
        let e2 = e1 - f1 * (e1 - e0) / (f1 - f0);
        if (e2 - e1).norm() < 1e-15 * e1.norm() {
            e1 = e2;
            break;
        }
        e0 = e1;
        f0 = f1;
        e1 = e2;
    }
    1.0 / (1.0 - e1)
}

/// Modified long-wavelength approximation for a sphere of size parameter `x`:
/// `1/α = 1/α_static − x²/(4πa³) − i x³/(6πa³)`, written as a resonance value of `λ`.
pub fn mlwa_lambda(x: f64) -> Complex64 {
    Complex64::new(1.0 / 3.0 - x * x / 3.0, -2.0 / 9.0 * x * x * x)
}

/// Quasi-static sphere polarizability over `ε₀ε_m`: `4πa³(ε_c − ε_m)/(ε_c + 2ε_m)`.
pub fn clausius_mossotti(a: f64, eps_c: Complex64, eps_m: f64) -> Complex64 {
    4.0 * PI * a.powi(3) * (eps_c - eps_m) / (eps_c + 2.0 * eps_m)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

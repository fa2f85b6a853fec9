//! Low-level quadrature rules shared by the geometry and singular-integral code.
//!
//! Everything here is deterministic: the same order always produces the same
//! nodes in the same sequence, which keeps downstream accumulations
//! reproducible.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ`, uniform in `φ`.
///
/// `n` polar nodes times `2n` azimuthal nodes. Exact for spherical harmonics
/// up to degree `2n - 1`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl SphereRule {
    pub fn new(n: usize) -> Self {
        let (t, wt) = gauss_legendre(n);
        let n_phi = 2 * n;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut directions = Vec::with_capacity(n * n_phi);
        let mut weights = Vec::with_capacity(n * n_phi);
        for (ct, w) in t.iter().zip(&wt) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = (k as f64 + 0.5) * dphi;
                directions.push([st * phi.cos(), st * phi.sin(), *ct]);
                weights.push(w * dphi);
            }
        }
        SphereRule {
            directions,
            weights,
            order: n,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<F: Fn(&[f64; 3]) -> f64>(&self, f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * f(d))
            .sum()
    }
}

/// Periodic trapezoid rule on the unit circle (`n` equispaced angles).
#[derive(Debug, Clone)]
pub struct CircleRule {
    pub directions: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl CircleRule {
    pub fn new(n: usize) -> Self {
        let dt = 2.0 * PI / n as f64;
        let directions = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                [t.cos(), t.sin()]
            })
            .collect();
        CircleRule {
            directions,
            weights: vec![dt; n],
        }
    }

    pub fn integrate<F: Fn(&[f64; 2]) -> f64>(&self, f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * f(d))
            .sum()
    }
}

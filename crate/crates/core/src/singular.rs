//! Zero-mean singular kernels, exclusion-shape corrections, the L dyadic of
//! star domains, and corrected second derivatives of Newtonian potentials.
//!
//! Sign conventions are pinned by two facts that can be checked by hand:
//! the unit ball has `L = I/3` and the static operator maps a constant field
//! `E` on the ball to `E/3`. In 3D the Newtonian kernel is `1/(4π r)`; the 2D
//! kernel has the opposite Laplacian sign, which flips the sign of the log
//! correction in [`l_dyadic`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{radial_profile, surface_quadrature, Ellipsoid, GeometryError, StarDomain};
use crate::quadrature::{gauss_legendre, CircleRule, SphereRule};

/// Polar order of the product rule used for 3D angular integrals.
pub const SPHERE_ORDER: usize = 128;
/// Node count of the periodic trapezoid rule used for 2D angular integrals.
pub const CIRCLE_NODES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularError {
    #[error("dimension must be 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("component index ({i}, {j}) out of range for dimension {dim}")]
    InvalidIndex { dim: usize, i: usize, j: usize },
    #[error("dimension mismatch: kernel is {kernel}D, domain is {domain}D")]
    DimensionMismatch { kernel: usize, domain: usize },
    #[error("wavenumber must have Im k >= 0, got {0}")]
    InvalidWavenumber(Complex64),
    #[error("point is not inside the domain")]
    NotInterior,
    #[error("point is {distance:e} from the boundary, closer than the node spacing {spacing:e}")]
    NearBoundary { distance: f64, spacing: f64 },
    #[error("exclusion of scale {epsilon} leaves the domain along direction {direction:?}")]
    ExclusionNotContained { epsilon: f64, direction: [f64; 3] },
    #[error("exclusion must be a 3D star domain")]
    ExclusionDimension,
    #[error("exclusion scale must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn check_dim(dim: usize) -> Result<(), SingularError> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(SingularError::InvalidDimension(dim))
    }
}

/// Angular part `f_ij(θ)` of the second derivatives of the Newtonian kernel.
///
/// `d = 3`: `−(δ_ij − 3θᵢθⱼ)/(4π)`; `d = 2`: `(δ_ij − 2θᵢθⱼ)/(2π)`.
/// Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularKernel {
    dim: usize,
    i: usize,
    j: usize,
}

impl AngularKernel {
    pub fn new(dim: usize, i: usize, j: usize) -> Result<Self, SingularError> {
        check_dim(dim)?;
        if i >= dim || j >= dim {
            return Err(SingularError::InvalidIndex { dim, i, j });
        }
        Ok(AngularKernel { dim, i, j })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        let delta = if self.i == self.j { 1.0 } else { 0.0 };
        let tt = theta[self.i] * theta[self.j];
        match self.dim {
            2 => (delta - 2.0 * tt) / (2.0 * PI),
            _ => -(delta - 3.0 * tt) / (4.0 * PI),
        }
    }
}

/// Outgoing Helmholtz kernel `e^{ik|x−y|}/(4π|x−y|)` in 3D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel {
    k: Complex64,
}

impl GreenKernel {
    pub fn new(k: Complex64) -> Result<Self, SingularError> {
        if !(k.im >= 0.0) || !k.re.is_finite() {
            return Err(SingularError::InvalidWavenumber(k));
        }
        Ok(GreenKernel { k })
    }

    /// The Laplace kernel `1/(4π|x−y|)`.
    pub fn laplace() -> Self {
        GreenKernel {
            k: Complex64::new(0.0, 0.0),
        }
    }

    pub fn wavenumber(&self) -> Complex64 {
        self.k
    }

    pub fn eval(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> Complex64 {
        let r = (x - y).norm();
        (Complex64::i() * self.k * r).exp() / (4.0 * PI * r)
    }

    /// `∇ₓ` of the Laplace kernel, `(y − x)/(4π r³)`.
    pub fn laplace_gradient(x: &Vector3<f64>, y: &Vector3<f64>) -> Vector3<f64> {
        let d = y - x;
        let r = d.norm();
        d / (4.0 * PI * r * r * r)
    }

    /// Hessian of the Laplace kernel, `f_ij(θ)/r³` with `θ = (x − y)/r`.
    pub fn laplace_hessian(x: &Vector3<f64>, y: &Vector3<f64>) -> Matrix3<f64> {
        let d = x - y;
        let r = d.norm();
        let t = d / r;
        (t * t.transpose() * 3.0 - Matrix3::identity()) / (4.0 * PI * r * r * r)
    }
}

fn integrate_directions<F: Fn(&[f64]) -> f64>(dim: usize, f: F) -> f64 {
    if dim == 2 {
        CircleRule::new(CIRCLE_NODES).integrate(|t| f(t))
    } else {
        SphereRule::new(SPHERE_ORDER).integrate(|t| f(t))
    }
}

/// `∫_{S^{d−1}} f(θ) log β(θ) dθ` for the exclusion profile `β`.
pub fn exclusion_correction(kernel: &AngularKernel, beta: &StarDomain) -> Result<f64, SingularError> {
    if kernel.dim != beta.dim() {
        return Err(SingularError::DimensionMismatch {
            kernel: kernel.dim,
            domain: beta.dim(),
        });
    }
    Ok(integrate_directions(kernel.dim, |t| {
        kernel.eval(t) * radial_profile(beta, t).ln()
    }))
}

/// L dyadic of a star domain about its origin.
///
/// `L_ij = δ_ij/d − σ_d ∫ f_ij log ρ`, with `σ₃ = 1` and `σ₂ = −1`.
pub fn l_dyadic(s: &StarDomain) -> DMatrix<f64> {
    let d = s.dim();
    let sigma = if d == 3 { 1.0 } else { -1.0 };
    let mut l = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let k = AngularKernel::new(d, i, j).expect("indices in range");
            let c = exclusion_correction(&k, s).expect("dimensions agree");
            let v = if i == j { 1.0 / d as f64 } else { 0.0 } - sigma * c;
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    l
}

/// Lower bound on the distance from an interior point to `∂e`.
fn boundary_distance(e: &Ellipsoid, x: &Vector3<f64>) -> f64 {
    let u = e.to_unit_ball(x).norm();
    let a_min = e.semi_axes().iter().copied().fold(f64::INFINITY, f64::min);
    (1.0 - u) * a_min
}

/// Boundary form of the L dyadic at an interior point:
/// `L_ij(x) = ∫_{∂B} ∂_{x_j} G(x, y) ν_i(y) dσ(y)`.
pub fn l_dyadic_boundary(e: &Ellipsoid, x: &Vector3<f64>, n: usize) -> Result<Matrix3<f64>, SingularError> {
    if !e.contains(x) {
        return Err(SingularError::NotInterior);
    }
    let q = surface_quadrature(e, n)?;
    let distance = boundary_distance(e, x);
    let spacing = q.spacing(e);
    if distance <= spacing {
        return Err(SingularError::NearBoundary { distance, spacing });
    }
    let mut l = Matrix3::zeros();
    for ((y, nu), w) in q.nodes.iter().zip(&q.normals).zip(&q.weights) {
        l += nu * GreenKernel::laplace_gradient(x, y).transpose() * *w;
    }
    Ok(l)
}

/// Static operator on a constant field:
/// `T⁰[E](x) = ∫_{∂B} ∇ₓG⁰(x, y) (ν(y)·E) dσ(y)`.
pub fn t0_constant_field(
    e: &Ellipsoid,
    field: &Vector3<f64>,
    x: &Vector3<f64>,
    n: usize,
) -> Result<Vector3<f64>, SingularError> {
    let l = l_dyadic_boundary(e, x, n)?;
    Ok(l.transpose() * field)
}

/// `∂ᵢⱼ ∫_D G(x, y) u(y) dy` at an interior `x`, computed as the integral
/// over `D ∖ (x + ε V*)` in polar coordinates about `x` minus `L_{V*} u(x)`.
///
/// `u` must be Hölder continuous on `D`; this is not checked. The angular
/// rule has polar order `n` and each ray is integrated with `n`
/// Gauss–Legendre nodes in `log t`.
pub fn newtonian_second_derivative<U>(
    domain: &Ellipsoid,
    u: U,
    x: &Vector3<f64>,
    exclusion: &StarDomain,
    epsilon: f64,
    n: usize,
) -> Result<Matrix3<f64>, SingularError>
where
    U: Fn(&Vector3<f64>) -> f64 + Sync,
{
    if exclusion.dim() != 3 {
        return Err(SingularError::ExclusionDimension);
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(SingularError::InvalidEpsilon(epsilon));
    }
    if !domain.contains(x) {
        return Err(SingularError::NotInterior);
    }
    if n < 4 {
        return Err(GeometryError::OrderTooLow { min: 4, got: n }.into());
    }
    let rule = SphereRule::new(n);
    let (s_nodes, s_weights) = gauss_legendre(n);
    let ux = u(x);

    let partials: Vec<Result<Matrix3<f64>, SingularError>> = rule
        .directions
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(dir, w)| {
            let theta = Vector3::from(*dir);
            let r_in = epsilon * radial_profile(exclusion, dir);
            let r_out = domain.ray_exit(x, &theta).ok_or(SingularError::NotInterior)?;
            if r_in >= r_out {
                return Err(SingularError::ExclusionNotContained {
                    epsilon,
                    direction: *dir,
                });
            }
            let (a, b) = (r_in.ln(), r_out.ln());
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            // ∫ u(x + tθ)/t dt = ∫ u(x + e^s θ) ds
            let radial: f64 = s_nodes
                .iter()
                .zip(&s_weights)
                .map(|(s, ws)| ws * half * u(&(x + theta * (mid + half * s).exp())))
                .sum();
            let f = (Matrix3::identity() - theta * theta.transpose() * 3.0) * (-1.0 / (4.0 * PI));
            Ok(f * (w * radial))
        })
        .collect();

    let mut pv = Matrix3::zeros();
    for p in partials {
        pv += p?;
    }
    let l = l_dyadic(exclusion);
    let l3 = Matrix3::from_fn(|i, j| l[(i, j)]);
    Ok(pv - l3 * ux)
}

/// `∫_{S^{d−1}} g(θ) θᵢ dθ` (zero-based `i`).
pub fn sphere_moment<G: Fn(&[f64]) -> f64>(dim: usize, g: G, i: usize) -> Result<f64, SingularError> {
    check_dim(dim)?;
    if i >= dim {
        return Err(SingularError::InvalidIndex { dim, i, j: i });
    }
    Ok(integrate_directions(dim, |t| g(t) * t[i]))
}

//! Reference shapes, star-shaped exclusion volumes and boundary quadrature.
//!
//! A particle is `D = z₀ + δ B`: an [`Ellipsoid`] `B` paired with a
//! [`ParticleScale`]. Pipelines normalize `B` so its largest semi-axis is 1,
//! which puts all size dependence into `δ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::quadrature::{gauss_legendre_interval, SphereRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("semi-axes must be positive and finite, got {0:?}")]
    InvalidSemiAxes([f64; 3]),
    #[error("orientation is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("particle size must be positive, got {0}")]
    InvalidScale(f64),
    #[error("quadrature order must be at least {min}, got {got}")]
    OrderTooLow { min: usize, got: usize },
    #[error("star domain dimension must be 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("invalid star domain: {0}")]
    InvalidStarDomain(String),
}

/// Centered ellipsoid `{ R diag(a) u : |u| ≤ 1 }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    semi_axes: [f64; 3],
    orientation: Matrix3<f64>,
}

impl Ellipsoid {
    pub fn new(semi_axes: [f64; 3]) -> Result<Self, GeometryError> {
        Self::with_orientation(semi_axes, Matrix3::identity())
    }

    pub fn sphere(radius: f64) -> Result<Self, GeometryError> {
        Self::new([radius; 3])
    }

    /// `orientation` columns are the principal axes in the lab frame.
    pub fn with_orientation(
        semi_axes: [f64; 3],
        orientation: Matrix3<f64>,
    ) -> Result<Self, GeometryError> {
        if semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(GeometryError::InvalidSemiAxes(semi_axes));
        }
        let dev = (orientation.transpose() * orientation - Matrix3::identity()).abs().max();
        if !(dev <= 1e-12) {
            return Err(GeometryError::NotOrthonormal(dev));
        }
        Ok(Ellipsoid {
            semi_axes,
            orientation,
        })
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        self.semi_axes
    }

    pub fn orientation(&self) -> &Matrix3<f64> {
        &self.orientation
    }

    /// Principal axis `i` as a lab-frame unit vector.
    pub fn axis(&self, i: usize) -> Vector3<f64> {
        self.orientation.column(i).into_owned()
    }

    pub fn max_semi_axis(&self) -> f64 {
        self.semi_axes.iter().copied().fold(0.0, f64::max)
    }

    /// `R diag(a)`, mapping the unit ball onto the ellipsoid.
    pub fn shape_matrix(&self) -> Matrix3<f64> {
        self.orientation * Matrix3::from_diagonal(&Vector3::from(self.semi_axes))
    }

    pub fn volume(&self) -> f64 {
        4.0 * PI / 3.0 * self.semi_axes.iter().product::<f64>()
    }

    /// Rescaled copy with largest semi-axis 1, and the factor that was divided out.
    pub fn normalized(&self) -> (Ellipsoid, f64) {
        let s = self.max_semi_axis();
        let axes = self.semi_axes.map(|a| a / s);
        (
            Ellipsoid {
                semi_axes: axes,
                orientation: self.orientation,
            },
            s,
        )
    }

    /// Same shape rotated by `rotation` (applied in the lab frame).
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Result<Ellipsoid, GeometryError> {
        Ellipsoid::with_orientation(self.semi_axes, rotation * self.orientation)
    }

    /// Coordinates in the principal frame scaled by the semi-axes; inside iff norm < 1.
    pub fn to_unit_ball(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let local = self.orientation.transpose() * x;
        Vector3::new(
            local[0] / self.semi_axes[0],
            local[1] / self.semi_axes[1],
            local[2] / self.semi_axes[2],
        )
    }

    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        self.to_unit_ball(x).norm_squared() < 1.0
    }

    /// Distance `t > 0` at which the ray `x + t θ` leaves the ellipsoid.
    /// `None` when `x` is not inside.
    pub fn ray_exit(&self, x: &Vector3<f64>, direction: &Vector3<f64>) -> Option<f64> {
        let p = self.to_unit_ball(x);
        let d = self.to_unit_ball(direction);
        let a = d.norm_squared();
        let b = p.dot(&d);
        let c = p.norm_squared() - 1.0;
        if c >= 0.0 || a == 0.0 {
            return None;
        }
        // c < 0 so the roots have opposite signs; take the positive one stably
        let disc = (b * b - a * c).sqrt();
        let t = if b >= 0.0 { -c / (b + disc) } else { (disc - b) / a };
        Some(t)
    }
}

/// Physical scale and placement: `D = z₀ + δ B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleScale {
    delta: f64,
    center: Vector3<f64>,
}

impl ParticleScale {
    pub fn new(delta: f64) -> Result<Self, GeometryError> {
        Self::at(delta, Vector3::zeros())
    }

    pub fn at(delta: f64, center: Vector3<f64>) -> Result<Self, GeometryError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(GeometryError::InvalidScale(delta));
        }
        Ok(ParticleScale { delta, center })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn center(&self) -> &Vector3<f64> {
        &self.center
    }
}

/// Nodes, weights and outward unit normals on `∂B`.
#[derive(Debug, Clone)]
pub struct SurfaceQuadrature {
    pub nodes: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vector3<f64>>,
    pub order: usize,
}

impl SurfaceQuadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ wᵢ νᵢ`, zero for a closed surface.
    pub fn normal_sum(&self) -> Vector3<f64> {
        self.weights
            .iter()
            .zip(&self.normals)
            .fold(Vector3::zeros(), |acc, (w, n)| acc + n * *w)
    }

    /// `Σ wᵢ (xᵢ·νᵢ) / 3`, equal to the enclosed volume.
    pub fn enclosed_volume(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.normals)
            .zip(&self.weights)
            .map(|((x, n), w)| w * x.dot(n))
            .sum::<f64>()
            / 3.0
    }

    /// Largest spacing between neighbouring nodes, estimated from the grid.
    pub fn spacing(&self, e: &Ellipsoid) -> f64 {
        PI * e.max_semi_axis() / self.order as f64
    }
}

pub const MIN_SURFACE_ORDER: usize = 4;

/// Product Gauss–Legendre(cos θ) × uniform(φ) grid on the unit sphere mapped
/// onto `∂B` with the exact area Jacobian `det(A) |A⁻ᵀ u|`.
pub fn surface_quadrature(e: &Ellipsoid, n: usize) -> Result<SurfaceQuadrature, GeometryError> {
    if n < MIN_SURFACE_ORDER {
        return Err(GeometryError::OrderTooLow {
            min: MIN_SURFACE_ORDER,
            got: n,
        });
    }
    let rule = SphereRule::new(n);
    let a = e.shape_matrix();
    let det = e.semi_axes.iter().product::<f64>();
    let inv_axes = Vector3::new(
        1.0 / e.semi_axes[0],
        1.0 / e.semi_axes[1],
        1.0 / e.semi_axes[2],
    );
    let mut nodes = Vec::with_capacity(rule.len());
    let mut weights = Vec::with_capacity(rule.len());
    let mut normals = Vec::with_capacity(rule.len());
    for (u, w) in rule.directions.iter().zip(&rule.weights) {
        let u = Vector3::from(*u);
        let g = e.orientation * u.component_mul(&inv_axes);
        let gn = g.norm();
        nodes.push(a * u);
        normals.push(g / gn);
        weights.push(w * det * gn);
    }
    Ok(SurfaceQuadrature {
        nodes,
        weights,
        normals,
        order: n,
    })
}

/// Volume rule on `B`: Gauss–Legendre in the radius times the sphere rule.
#[derive(Debug, Clone)]
pub struct VolumeQuadrature {
    pub nodes: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

pub fn volume_quadrature(e: &Ellipsoid, n: usize) -> Result<VolumeQuadrature, GeometryError> {
    if n < MIN_SURFACE_ORDER {
        return Err(GeometryError::OrderTooLow {
            min: MIN_SURFACE_ORDER,
            got: n,
        });
    }
    let rule = SphereRule::new(n);
    let (r, wr) = gauss_legendre_interval(n, 0.0, 1.0);
    let a = e.shape_matrix();
    let det = e.semi_axes.iter().product::<f64>();
    let mut nodes = Vec::with_capacity(r.len() * rule.len());
    let mut weights = Vec::with_capacity(r.len() * rule.len());
    for (ri, wi) in r.iter().zip(&wr) {
        for (u, wu) in rule.directions.iter().zip(&rule.weights) {
            nodes.push(a * (Vector3::from(*u) * *ri));
            weights.push(wi * ri * ri * wu * det);
        }
    }
    Ok(VolumeQuadrature { nodes, weights })
}

/// Exact volume and quadrature surface area (order 96).
pub fn measure(e: &Ellipsoid) -> (f64, f64) {
    let area = surface_quadrature(e, 96)
        .map(|q| q.area())
        .expect("order 96 is valid");
    (e.volume(), area)
}

type ProfileFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Radial description `ρ(θ)` of a region star-shaped about the origin.
#[derive(Clone)]
pub enum StarProfile {
    Ball { radius: f64 },
    CenteredEllipse { semi_axes: [f64; 2] },
    CenteredEllipsoid { semi_axes: [f64; 3], orientation: Matrix3<f64> },
    /// Ellipse with unit semi-major axis and the origin at a focus; the far
    /// vertex lies along `+e₁`.
    FocalEllipse { eccentricity: f64 },
    Custom(ProfileFn),
}

impl fmt::Debug for StarProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarProfile::Ball { radius } => write!(f, "Ball {{ radius: {radius} }}"),
            StarProfile::CenteredEllipse { semi_axes } => {
                write!(f, "CenteredEllipse {{ semi_axes: {semi_axes:?} }}")
            }
            StarProfile::CenteredEllipsoid { semi_axes, .. } => {
                write!(f, "CenteredEllipsoid {{ semi_axes: {semi_axes:?} }}")
            }
            StarProfile::FocalEllipse { eccentricity } => {
                write!(f, "FocalEllipse {{ eccentricity: {eccentricity} }}")
            }
            StarProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StarDomain {
    dim: usize,
    profile: StarProfile,
}

impl StarDomain {
    pub fn ball(dim: usize) -> Result<Self, GeometryError> {
        Self::ball_with_radius(dim, 1.0)
    }

    pub fn ball_with_radius(dim: usize, radius: f64) -> Result<Self, GeometryError> {
        check_dim(dim)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidStarDomain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(StarDomain {
            dim,
            profile: StarProfile::Ball { radius },
        })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(GeometryError::InvalidStarDomain(format!(
                "ellipse semi-axes must be positive, got ({a}, {b})"
            )));
        }
        Ok(StarDomain {
            dim: 2,
            profile: StarProfile::CenteredEllipse { semi_axes: [a, b] },
        })
    }

    pub fn ellipsoid(e: &Ellipsoid) -> Self {
        StarDomain {
            dim: 3,
            profile: StarProfile::CenteredEllipsoid {
                semi_axes: e.semi_axes(),
                orientation: *e.orientation(),
            },
        }
    }

    pub fn focal_ellipse(eccentricity: f64) -> Result<Self, GeometryError> {
        if !(0.0..1.0).contains(&eccentricity) {
            return Err(GeometryError::InvalidStarDomain(format!(
                "eccentricity must lie in [0, 1), got {eccentricity}"
            )));
        }
        Ok(StarDomain {
            dim: 2,
            profile: StarProfile::FocalEllipse { eccentricity },
        })
    }

    /// Arbitrary profile. The caller guarantees `ρ` is bounded above and below
    /// by positive constants and piecewise smooth.
    pub fn custom<F>(dim: usize, profile: F) -> Result<Self, GeometryError>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_dim(dim)?;
        Ok(StarDomain {
            dim,
            profile: StarProfile::Custom(Arc::new(profile)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &StarProfile {
        &self.profile
    }

    /// Is the profile invariant under `θ → −θ`?
    pub fn is_centrally_symmetric(&self) -> bool {
        !matches!(
            self.profile,
            StarProfile::FocalEllipse { .. } | StarProfile::Custom(_)
        )
    }
}

fn check_dim(dim: usize) -> Result<(), GeometryError> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(GeometryError::InvalidDimension(dim))
    }
}

/// `ρ(θ)` for a unit direction `θ` of length `s.dim()`.
pub fn radial_profile(s: &StarDomain, theta: &[f64]) -> f64 {
    debug_assert_eq!(theta.len(), s.dim);
    match &s.profile {
        StarProfile::Ball { radius } => *radius,
        StarProfile::CenteredEllipse { semi_axes: [a, b] } => {
            1.0 / ((theta[0] / a).powi(2) + (theta[1] / b).powi(2)).sqrt()
        }
        StarProfile::CenteredEllipsoid {
            semi_axes,
            orientation,
        } => {
            let local = orientation.transpose() * Vector3::new(theta[0], theta[1], theta[2]);
            let q: f64 = (0..3).map(|i| (local[i] / semi_axes[i]).powi(2)).sum();
            1.0 / q.sqrt()
        }
        StarProfile::FocalEllipse { eccentricity: e } => (1.0 - e * e) / (1.0 - e * theta[0]),
        StarProfile::Custom(f) => f(theta),
    }
}

//! Static spectrum of the depolarization dyadic, the finite-size
//! perturbation matrix, and perturbed dipole eigenvalues.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{surface_quadrature, Ellipsoid, GeometryError, SurfaceQuadrature};

/// Smallest accepted surface order for the perturbation matrix.
pub const MIN_PERTURBATION_ORDER: usize = 16;
/// Upper end of the documented validity range of the first-order correction.
pub const MAX_DELTA_K: f64 = 2.0;
/// Below this separation the kernel is replaced by its limit `−iδk/(4π)`.
const COINCIDENT: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("perturbation requires Im δk >= 0, got {0}")]
    NegativeImaginaryWavenumber(Complex64),
    #[error("|δk| = {0} exceeds the validity bound {MAX_DELTA_K}")]
    OutsideValidity(f64),
    #[error("perturbation order must be at least {MIN_PERTURBATION_ORDER}, got {0}")]
    OrderTooLow(usize),
    #[error("axis index must be 0, 1 or 2, got {0}")]
    InvalidAxis(usize),
    #[error("resolvent denominator vanishes at λ = {lambda}")]
    ResonanceSingularity { lambda: Complex64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Depolarization factors `Lᵢ` and the principal axes (columns of `axes`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizationFactors {
    pub factors: [f64; 3],
    pub axes: Matrix3<f64>,
}

impl DepolarizationFactors {
    pub fn axis(&self, i: usize) -> Vector3<f64> {
        self.axes.column(i).into_owned()
    }

    /// `Q diag(L) Qᵀ`.
    pub fn dyadic(&self) -> Matrix3<f64> {
        self.axes * Matrix3::from_diagonal(&Vector3::from(self.factors)) * self.axes.transpose()
    }
}

/// Carlson's symmetric integral `R_F(x, y, z)`.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..100 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let mu = (x + y + z) / 3.0;
        let (dx, dy, dz) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
    }
    let mu = (x + y + z) / 3.0;
    1.0 / mu.sqrt()
}

/// Carlson's symmetric integral `R_D(x, y, z)`.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    for _ in 0..100 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let mu = (x + y + 3.0 * z) / 5.0;
        let (dx, dy, dz) = ((mu - x) / mu, (mu - y) / mu, (mu - z) / mu);
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            let s = 1.0
                + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * dz * ee)
                + dz * (1.0 / 6.0 * ee + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea));
            return 3.0 * sum + fac * s / (mu * mu.sqrt());
        }
    }
    let mu = (x + y + 3.0 * z) / 5.0;
    3.0 * sum + fac / (mu * mu.sqrt())
}

/// `Lᵢ = (a₁a₂a₃/2) ∫₀^∞ ds / ((s + aᵢ²) √Π(s + aⱼ²))`, via `R_D`.
pub fn depolarization_factors(e: &Ellipsoid) -> DepolarizationFactors {
    let a = e.semi_axes();
    let sq = a.map(|v| v * v);
    let p = a[0] * a[1] * a[2];
    let mut factors = [0.0; 3];
    for (i, f) in factors.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        *f = p / 3.0 * carlson_rd(sq[j], sq[k], sq[i]);
    }
    DepolarizationFactors {
        factors,
        axes: *e.orientation(),
    }
}

/// `∬_{∂B×∂B} (G⁰ − G^{δk}) ν νᵀ`, together with the data needed to turn it
/// into an eigenvalue shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationMatrix {
    pub m: Matrix3<Complex64>,
    pub delta_k: Complex64,
    /// `|B|` of the shape the matrix was computed on.
    pub volume: f64,
}

impl PerturbationMatrix {
    pub fn zero(volume: f64) -> Self {
        PerturbationMatrix {
            m: Matrix3::zeros(),
            delta_k: Complex64::new(0.0, 0.0),
            volume,
        }
    }

    /// Eigenvalue shift operator for the given convention: `λ̃ = L − Eᵀ S E`.
    pub fn shift_operator(&self, convention: PerturbationConvention) -> Matrix3<Complex64> {
        match convention {
            PerturbationConvention::Verbatim => self.m,
            PerturbationConvention::Corrected => {
                let tr = self.m.trace();
                (self.m - Matrix3::identity() * tr) / Complex64::from(self.volume)
            }
        }
    }
}

/// How the perturbation matrix enters the eigenvalue shift.
///
/// `Verbatim` uses `λ̃ = L − E·M E` as written. It omits the volume term of
/// the dynamic operator and the `1/|B|` normalization of constant modes, and
/// gives a blue shift for the sphere. `Corrected` restores both:
/// `λ̃ = L − E·(M − tr M·I)E / |B|`, which for the unit sphere expands to
/// `1/3 − (4/15)δk² − (2/9)i δk³`, in agreement with the dipole term of the
/// Mie series and with radiative damping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbationConvention {
    Verbatim,
    #[default]
    Corrected,
}

impl std::str::FromStr for PerturbationConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verbatim" => Ok(PerturbationConvention::Verbatim),
            "corrected" => Ok(PerturbationConvention::Corrected),
            other => Err(format!("unknown convention {other:?} (expected verbatim or corrected)")),
        }
    }
}

impl std::fmt::Display for PerturbationConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PerturbationConvention::Verbatim => "verbatim",
            PerturbationConvention::Corrected => "corrected",
        })
    }
}

fn check_delta_k(delta_k: Complex64) -> Result<(), SpectralError> {
    if !(delta_k.im >= 0.0) || !delta_k.re.is_finite() {
        return Err(SpectralError::NegativeImaginaryWavenumber(delta_k));
    }
    if delta_k.norm() >= MAX_DELTA_K {
        return Err(SpectralError::OutsideValidity(delta_k.norm()));
    }
    Ok(())
}

#[inline]
fn kernel(ik: Complex64, r: f64) -> Complex64 {
    if r < COINCIDENT {
        -ik / (4.0 * PI)
    } else {
        (Complex64::from(1.0) - (ik * r).exp()) / (4.0 * PI * r)
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_modulus(m: &Matrix3<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetrize(m: Matrix3<Complex64>) -> Matrix3<Complex64> {
    (m + m.transpose()) * Complex64::from(0.5)
}

/// Average of `m` over the symmetry group of the ellipsoid.
///
/// Reflections in the principal planes make `M` diagonal in the principal
/// frame, and equal semi-axes make the matching diagonal entries equal. The
/// product grid only respects these up to quadrature error, so the exact
/// structure is imposed here.
pub fn symmetry_average<T>(m: &Matrix3<T>, e: &Ellipsoid) -> Matrix3<T>
where
    T: nalgebra::ComplexField<RealField = f64> + Copy,
{
    let r = e.orientation().map(T::from_real);
    let local = r.transpose() * m * r;
    let a = e.semi_axes();
    let tol = 1e-14 * e.max_semi_axis();
    let mut d = [local[(0, 0)], local[(1, 1)], local[(2, 2)]];
    let mut out = d;
    for i in 0..3 {
        let group: Vec<usize> = (0..3).filter(|j| (a[*j] - a[i]).abs() <= tol).collect();
        let sum = group.iter().fold(T::zero(), |acc, j| acc + d[*j]);
        out[i] = sum / T::from_real(group.len() as f64);
    }
    d = out;
    r * Matrix3::from_diagonal(&Vector3::from(d)) * r.transpose()
}

/// Direct double surface quadrature on a prepared rule, without symmetry
/// averaging.
///
/// Work is split over outer nodes; partial sums are added in node order so
/// the result does not depend on the number of workers.
pub fn perturbation_matrix_raw(q: &SurfaceQuadrature, volume: f64, delta_k: Complex64) -> PerturbationMatrix {
    let ik = Complex64::i() * delta_k;
    let partials: Vec<Matrix3<Complex64>> = (0..q.len())
        .into_par_iter()
        .map(|i| {
            let xi = q.nodes[i];
            let mut s = Vector3::<Complex64>::zeros();
            for j in 0..q.len() {
                let r = (xi - q.nodes[j]).norm();
                let c = kernel(ik, r) * q.weights[j];
                let nj = q.normals[j];
                s[0] += c * nj[0];
                s[1] += c * nj[1];
                s[2] += c * nj[2];
            }
            let ni = q.normals[i].map(Complex64::from) * Complex64::from(q.weights[i]);
            ni * s.transpose()
        })
        .collect();
    let m = partials.into_iter().fold(Matrix3::zeros(), |acc, p| acc + p);
    PerturbationMatrix {
        m: symmetrize(m),
        delta_k,
        volume,
    }
}

/// `M^{δk}_B` by double surface quadrature of `(1 − e^{iδk r})/(4π r)`.
pub fn perturbation_matrix(e: &Ellipsoid, delta_k: Complex64, n: usize) -> Result<PerturbationMatrix, SpectralError> {
    if n < MIN_PERTURBATION_ORDER {
        return Err(SpectralError::OrderTooLow(n));
    }
    check_delta_k(delta_k)?;
    if delta_k == Complex64::new(0.0, 0.0) {
        return Ok(PerturbationMatrix::zero(e.volume()));
    }
    let q = surface_quadrature(e, n)?;
    let mut pm = perturbation_matrix_raw(&q, e.volume(), delta_k);
    pm.m = symmetry_average(&pm.m, e);
    Ok(pm)
}

/// Number of Taylor terms kept by [`PerturbationSeries`].
pub const SERIES_TERMS: usize = 40;
/// Beyond `|δk|·diameter` of this size the series hands over to direct quadrature.
pub const SERIES_RADIUS: f64 = 6.0;

/// Precomputed moments `C_m = ∬ r^m ν νᵀ` for fast evaluation of `M(δk)`
/// at many wavenumbers: `M = −(1/4π) Σ_{n≥1} (iδk)ⁿ/n! · C_{n−1}`.
#[derive(Debug, Clone)]
pub struct PerturbationSeries {
    moments: Vec<Matrix3<f64>>,
    quadrature: SurfaceQuadrature,
    shape: Ellipsoid,
    diameter: f64,
}

impl PerturbationSeries {
    pub fn new(e: &Ellipsoid, n: usize) -> Result<Self, SpectralError> {
        if n < MIN_PERTURBATION_ORDER {
            return Err(SpectralError::OrderTooLow(n));
        }
        let q = surface_quadrature(e, n)?;
        let partials: Vec<Vec<Matrix3<f64>>> = (0..q.len())
            .into_par_iter()
            .map(|i| {
                let xi = q.nodes[i];
                let mut s = vec![Vector3::<f64>::zeros(); SERIES_TERMS];
                for j in 0..q.len() {
                    let r = (xi - q.nodes[j]).norm();
                    let v = q.normals[j] * q.weights[j];
                    let mut p = 1.0;
                    for sm in s.iter_mut() {
                        *sm += v * p;
                        p *= r;
                    }
                }
                let ni = q.normals[i] * q.weights[i];
                s.iter().map(|sm| ni * sm.transpose()).collect()
            })
            .collect();
        let mut moments = vec![Matrix3::zeros(); SERIES_TERMS];
        for p in partials {
            for (m, pm) in moments.iter_mut().zip(p) {
                *m += pm;
            }
        }
        for m in moments.iter_mut() {
            *m = symmetry_average(&((*m + m.transpose()) * 0.5), e);
        }
        Ok(PerturbationSeries {
            moments,
            quadrature: q,
            shape: *e,
            diameter: 2.0 * e.max_semi_axis(),
        })
    }

    pub fn volume(&self) -> f64 {
        self.shape.volume()
    }

    pub fn shape(&self) -> &Ellipsoid {
        &self.shape
    }

    /// `∬ r^m ν νᵀ`.
    pub fn moment(&self, m: usize) -> Option<&Matrix3<f64>> {
        self.moments.get(m)
    }

    pub fn evaluate(&self, delta_k: Complex64) -> Result<PerturbationMatrix, SpectralError> {
        check_delta_k(delta_k)?;
        if delta_k.norm() * self.diameter > SERIES_RADIUS {
            let mut pm = perturbation_matrix_raw(&self.quadrature, self.volume(), delta_k);
            pm.m = symmetry_average(&pm.m, &self.shape);
            return Ok(pm);
        }
        let ik = Complex64::i() * delta_k;
        let mut coeff = Complex64::from(1.0);
        let mut m = Matrix3::<Complex64>::zeros();
        for (n, c) in self.moments.iter().enumerate() {
            coeff *= ik / (n as f64 + 1.0);
            m += c.map(Complex64::from) * coeff;
        }
        Ok(PerturbationMatrix {
            m: m * Complex64::from(-1.0 / (4.0 * PI)),
            delta_k,
            volume: self.volume(),
        })
    }
}

/// Dipole eigenvalue `λ̃ᵢ = Lᵢ − shift` of the size-perturbed operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedEigenvalue {
    pub axis: usize,
    pub lambda: Complex64,
    pub static_factor: f64,
    pub shift: Complex64,
}

pub fn perturbed_eigenvalue(
    dep: &DepolarizationFactors,
    pm: &PerturbationMatrix,
    i: usize,
    convention: PerturbationConvention,
) -> Result<PerturbedEigenvalue, SpectralError> {
    if i > 2 {
        return Err(SpectralError::InvalidAxis(i));
    }
    let e = dep.axis(i).map(Complex64::from);
    let shift = (e.transpose() * pm.shift_operator(convention) * e)[(0, 0)];
    Ok(PerturbedEigenvalue {
        axis: i,
        lambda: Complex64::from(dep.factors[i]) - shift,
        static_factor: dep.factors[i],
        shift,
    })
}

/// All three perturbed eigenvalues.
pub fn perturbed_eigenvalues(
    dep: &DepolarizationFactors,
    pm: &PerturbationMatrix,
    convention: PerturbationConvention,
) -> [PerturbedEigenvalue; 3] {
    [0, 1, 2].map(|i| perturbed_eigenvalue(dep, pm, i, convention).expect("axis in range"))
}

/// `⟨g, φ⟩ / (λ − Lᵢ + shift)`.
pub fn resolvent_projection(
    g_proj: Complex64,
    lambda: Complex64,
    l_i: f64,
    shift: Complex64,
) -> Result<Complex64, SpectralError> {
    let den = lambda - l_i + shift;
    if den == Complex64::new(0.0, 0.0) || !den.is_finite() {
        return Err(SpectralError::ResonanceSingularity { lambda });
    }
    Ok(g_proj / den)
}

/// Constant-mode block of the perturbed operator, `Q diag(L) Qᵀ − S`.
pub fn constant_mode_block(
    dep: &DepolarizationFactors,
    pm: &PerturbationMatrix,
    convention: PerturbationConvention,
) -> Matrix3<Complex64> {
    dep.dyadic().map(Complex64::from) - pm.shift_operator(convention)
}

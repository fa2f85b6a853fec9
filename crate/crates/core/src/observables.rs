//! Polarizabilities, dipole moment, far field, powers and cross sections,
//! and frequency sweeps.
//!
//! SI units throughout: polarizabilities in C·m²/V, dipole moments in C·m,
//! cross sections in m², power in W.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY};
use crate::geometry::{volume_quadrature, Ellipsoid, GeometryError, ParticleScale};
use crate::materials::{lambda_of_omega, Material, MaterialError, Medium};
use crate::spectral::{
    depolarization_factors, perturbed_eigenvalues, DepolarizationFactors, PerturbationConvention,
    PerturbationSeries, PerturbedEigenvalue, SpectralError,
};

/// Denominators smaller than this (relative) are treated as a pole.
const POLE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("polarizability pole on axis {axis}: denominator {distance:e} from zero")]
    Pole { axis: usize, distance: f64 },
    #[error("invalid plane wave: {0}")]
    InvalidWave(String),
    #[error("direction must be a unit vector, got norm {0}")]
    NotUnit(f64),
    #[error("particle size must be positive, got {0}")]
    InvalidSize(f64),
    #[error("frequency grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Incident field `E₀ e^{i k_m d·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    amplitude: Vector3<Complex64>,
    direction: Vector3<f64>,
}

impl PlaneWave {
    pub fn new(amplitude: Vector3<Complex64>, direction: Vector3<f64>) -> Result<Self, ObservableError> {
        let n = direction.norm();
        if !((n - 1.0).abs() < 1e-12) {
            return Err(ObservableError::InvalidWave(format!(
                "direction must be a unit vector, got norm {n}"
            )));
        }
        let a = amplitude.norm();
        if !(a > 0.0 && a.is_finite()) {
            return Err(ObservableError::InvalidWave("amplitude must be nonzero".into()));
        }
        let dot = amplitude.dot(&direction.map(Complex64::from)).norm();
        if dot >= 1e-12 * a {
            return Err(ObservableError::InvalidWave(format!(
                "amplitude is not transverse: |E₀·d| = {dot:e}"
            )));
        }
        Ok(PlaneWave {
            amplitude,
            direction,
        })
    }

    /// Linearly polarized wave of unit amplitude.
    pub fn linear(polarization: Vector3<f64>, direction: Vector3<f64>) -> Result<Self, ObservableError> {
        Self::new(polarization.map(Complex64::from), direction)
    }

    pub fn amplitude(&self) -> &Vector3<Complex64> {
        &self.amplitude
    }

    pub fn direction(&self) -> &Vector3<f64> {
        &self.direction
    }

    pub fn intensity_factor(&self) -> f64 {
        self.amplitude.norm_squared()
    }
}

impl Default for PlaneWave {
    /// `x̂`-polarized, travelling along `ẑ`, 1 V/m.
    fn default() -> Self {
        PlaneWave {
            amplitude: Vector3::<f64>::x().map(Complex64::from),
            direction: Vector3::z(),
        }
    }
}

fn assemble(axes: &Matrix3<f64>, diag: [Complex64; 3]) -> Matrix3<Complex64> {
    let q = axes.map(Complex64::from);
    q * Matrix3::from_diagonal(&Vector3::from(diag)) * q.transpose()
}

fn check_size(delta: f64) -> Result<(), ObservableError> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(ObservableError::InvalidSize(delta))
    }
}

/// `αᵢ = δ³|B| ε₀ ε_m (ε_c − ε_m)/(ε_m + Lᵢ(ε_c − ε_m))`, assembled as
/// `Q diag(αᵢ) Qᵀ`. Equal to `−δ³|B| ε₀ ε_m / (λ − Lᵢ)`.
pub fn static_polarizability(
    eps_c: Complex64,
    eps_m: f64,
    dep: &DepolarizationFactors,
    shape: &Ellipsoid,
    delta: f64,
) -> Result<Matrix3<Complex64>, ObservableError> {
    check_size(delta)?;
    let pref = delta.powi(3) * shape.volume() * VACUUM_PERMITTIVITY * eps_m;
    let contrast = eps_c - eps_m;
    let mut diag = [Complex64::new(0.0, 0.0); 3];
    for (i, d) in diag.iter_mut().enumerate() {
        let den = eps_m + contrast * dep.factors[i];
        if den.norm() <= POLE_TOLERANCE * (eps_m + eps_c.norm()) {
            return Err(ObservableError::Pole {
                axis: i,
                distance: den.norm(),
            });
        }
        *d = pref * contrast / den;
    }
    Ok(assemble(&dep.axes, diag))
}

/// Size-corrected polarizability `M_dyn` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicPolarizability {
    pub matrix: Matrix3<Complex64>,
    pub omega: f64,
    pub eps_c: Complex64,
    pub lambda: Complex64,
    pub eigenvalues: [PerturbedEigenvalue; 3],
    pub delta_k: f64,
}

/// A particle `δ·B` in a host medium with its perturbation data precomputed,
/// for repeated evaluation across frequencies.
#[derive(Debug, Clone)]
pub struct Particle {
    pub material: Material,
    pub medium: Medium,
    /// Normalized reference shape.
    pub shape: Ellipsoid,
    /// Physical length of the largest semi-axis, m.
    pub delta: f64,
    pub depolarization: DepolarizationFactors,
    pub convention: PerturbationConvention,
    series: PerturbationSeries,
}

impl Particle {
    /// `shape` is normalized internally; `delta` scales the normalized shape.
    pub fn new(
        material: Material,
        medium: Medium,
        shape: &Ellipsoid,
        delta: f64,
        order: usize,
        convention: PerturbationConvention,
    ) -> Result<Self, ObservableError> {
        check_size(delta)?;
        let (b, s) = shape.normalized();
        Ok(Particle {
            material,
            medium,
            shape: b,
            delta: delta * s,
            depolarization: depolarization_factors(&b),
            convention,
            series: PerturbationSeries::new(&b, order)?,
        })
    }

    /// `δ k_m(ω)`.
    pub fn delta_k(&self, omega: f64) -> f64 {
        self.delta * self.medium.wavenumber(omega)
    }

    pub fn static_polarizability(&self, omega: f64) -> Result<Matrix3<Complex64>, ObservableError> {
        let eps_c = self.material.permittivity_at(omega)?;
        static_polarizability(
            eps_c,
            self.medium.eps_m(),
            &self.depolarization,
            &self.shape,
            self.delta,
        )
    }

    pub fn dynamic_polarizability(&self, omega: f64) -> Result<DynamicPolarizability, ObservableError> {
        let eps_c = self.material.permittivity_at(omega)?;
        let lambda = lambda_of_omega(eps_c, self.medium.eps_m())?;
        let dk = self.delta_k(omega);
        let pm = self.series.evaluate(Complex64::from(dk))?;
        let eigenvalues = perturbed_eigenvalues(&self.depolarization, &pm, self.convention);
        let pref = -self.delta.powi(3) * self.shape.volume() * VACUUM_PERMITTIVITY * self.medium.eps_m();
        let mut diag = [Complex64::new(0.0, 0.0); 3];
        for (i, d) in diag.iter_mut().enumerate() {
            let den = lambda - eigenvalues[i].lambda;
            if den.norm() <= POLE_TOLERANCE * lambda.norm().max(1.0) {
                return Err(ObservableError::Pole {
                    axis: i,
                    distance: den.norm(),
                });
            }
            *d = pref / den;
        }
        Ok(DynamicPolarizability {
            matrix: assemble(&self.depolarization.axes, diag),
            omega,
            eps_c,
            lambda,
            eigenvalues,
            delta_k: dk,
        })
    }
}

/// One-shot `M_dyn` at `ω`; see [`Particle`] for sweeps.
pub fn dynamic_polarizability(
    material: &Material,
    medium: &Medium,
    shape: &Ellipsoid,
    delta: f64,
    omega: f64,
    order: usize,
    convention: PerturbationConvention,
) -> Result<DynamicPolarizability, ObservableError> {
    Particle::new(material.clone(), *medium, shape, delta, order, convention)?.dynamic_polarizability(omega)
}

/// `(1/|B|) ∫_B e^{i k δ d·x} dx` by volume quadrature of order `n`.
pub fn mean_field_factor(
    shape: &Ellipsoid,
    delta: f64,
    k_m: f64,
    direction: &Vector3<f64>,
    n: usize,
) -> Result<Complex64, ObservableError> {
    let q = volume_quadrature(shape, n)?;
    let kd = k_m * delta;
    let sum = q
        .nodes
        .iter()
        .zip(&q.weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, w)| {
            acc + Complex64::from_polar(*w, kd * direction.dot(x))
        });
    Ok(sum / shape.volume())
}

/// Order of the volume rule used for the mean incident field.
pub const MEAN_FIELD_ORDER: usize = 24;

/// Mean incident field over `D = z₀ + δB`.
pub fn mean_incident_field(
    wave: &PlaneWave,
    shape: &Ellipsoid,
    scale: &ParticleScale,
    k_m: f64,
) -> Result<Vector3<Complex64>, ObservableError> {
    let f = mean_field_factor(shape, scale.delta(), k_m, wave.direction(), MEAN_FIELD_ORDER)?;
    let phase = Complex64::from_polar(1.0, k_m * wave.direction().dot(scale.center()));
    Ok(wave.amplitude() * (f * phase))
}

/// `P = M_dyn · (mean incident field over D)`.
pub fn dipole_moment(
    m_dyn: &Matrix3<Complex64>,
    wave: &PlaneWave,
    shape: &Ellipsoid,
    scale: &ParticleScale,
    omega: f64,
    medium: &Medium,
) -> Result<Vector3<Complex64>, ObservableError> {
    let e = mean_incident_field(wave, shape, scale, medium.wavenumber(omega))?;
    Ok(m_dyn * e)
}

/// Scattering amplitude `(k_m²/4π) P`. No transverse projection is applied.
pub fn far_field_amplitude(
    p: &Vector3<Complex64>,
    k_m: f64,
    direction: &Vector3<f64>,
) -> Result<Vector3<Complex64>, ObservableError> {
    let n = direction.norm();
    if !((n - 1.0).abs() < 1e-12) {
        return Err(ObservableError::NotUnit(n));
    }
    Ok(p * Complex64::from(k_m * k_m / (4.0 * PI)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CrossSections {
    /// Extinction for the given wave, `k Im(E₀*·P)/(ε₀ε_m|E₀|²)`.
    pub extinction: f64,
    /// Radiated power over incident intensity.
    pub scattering: f64,
    /// `extinction − scattering`.
    pub absorption: f64,
    /// `μ₀μ_m n_m ω⁴ |P|² / (12π c₀)`.
    pub radiated_power: f64,
    /// Orientation average `k Im tr(α̂)/3`, `α̂ = M_dyn/(ε₀ε_m)`.
    pub avg_extinction: f64,
    /// Orientation average `(k⁴/6π) ‖α̂‖²_F / 3`.
    pub avg_scattering: f64,
    /// `avg_extinction − avg_scattering`.
    pub avg_absorption: f64,
    /// `(k⁴/6π) |tr α̂|²`, the trace form without the average.
    pub trace_scattering: f64,
}

impl CrossSections {
    /// Same quantities divided by `δ²`.
    pub fn normalized(&self, delta: f64) -> CrossSections {
        let s = 1.0 / (delta * delta);
        CrossSections {
            extinction: self.extinction * s,
            scattering: self.scattering * s,
            absorption: self.absorption * s,
            radiated_power: self.radiated_power,
            avg_extinction: self.avg_extinction * s,
            avg_scattering: self.avg_scattering * s,
            avg_absorption: self.avg_absorption * s,
            trace_scattering: self.trace_scattering * s,
        }
    }
}

/// Powers and cross sections for dipole `p` induced by `wave` with `M_dyn`.
///
/// Extinction uses the incident field at the particle centre `z₀`.
pub fn powers_and_cross_sections(
    p: &Vector3<Complex64>,
    wave: &PlaneWave,
    center: &Vector3<f64>,
    omega: f64,
    medium: &Medium,
    m_dyn: &Matrix3<Complex64>,
) -> CrossSections {
    let k = medium.wavenumber(omega);
    let eps = VACUUM_PERMITTIVITY * medium.eps_m();
    let e0 = wave.amplitude() * Complex64::from_polar(1.0, k * wave.direction().dot(center));
    let e2 = wave.intensity_factor();
    let radiated_power = VACUUM_PERMEABILITY * medium.mu_m() * medium.refractive_index() * omega.powi(4)
        * p.norm_squared()
        / (12.0 * PI * SPEED_OF_LIGHT);
    let intensity = 0.5 * e2 * (eps / (VACUUM_PERMEABILITY * medium.mu_m())).sqrt();
    let extinction = k * e0.dotc(p).im / (eps * e2);
    let scattering = radiated_power / intensity;

    let a = m_dyn / Complex64::from(eps);
    let tr = a.trace();
    let avg_extinction = k * tr.im / 3.0;
    let k4 = k.powi(4) / (6.0 * PI);
    let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let avg_scattering = k4 * frob / 3.0;
    CrossSections {
        extinction,
        scattering,
        absorption: extinction - scattering,
        radiated_power,
        avg_extinction,
        avg_scattering,
        avg_absorption: avg_extinction - avg_scattering,
        trace_scattering: k4 * tr.norm_sqr(),
    }
}

/// One row of a spectrum sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub eps_c: Complex64,
    pub lambda: Complex64,
    pub perturbed: [Complex64; 3],
    pub trace_m_dyn: Complex64,
    pub dipole: Vector3<Complex64>,
    pub cross_sections: CrossSections,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub omega: f64,
    pub result: Result<SpectrumPoint, ObservableError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpectrum {
    pub rows: Vec<SpectrumRow>,
}

impl ObservableSpectrum {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Grid index of the largest value of `key` among successful rows.
    pub fn argmax<F: Fn(&SpectrumPoint) -> f64>(&self, key: F) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if let Ok(p) = &row.result {
                let v = key(p);
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub material: Material,
    pub medium: Medium,
    pub shape: Ellipsoid,
    /// Largest physical semi-axis after normalization scales by this, m.
    pub delta: f64,
    pub center: Vector3<f64>,
    pub omegas: Vec<f64>,
    pub wave: PlaneWave,
    pub order: usize,
    pub convention: PerturbationConvention,
}

/// `n` equispaced frequencies from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + h * i as f64 }).collect()
        }
    }
}

/// Evaluate the observables on every grid frequency. Rows come back in grid
/// order; a failing frequency yields an error row and the sweep continues.
pub fn spectrum_sweep(config: &SweepConfig) -> Result<ObservableSpectrum, ObservableError> {
    if config.omegas.is_empty() {
        return Err(ObservableError::EmptyGrid);
    }
    let particle = Particle::new(
        config.material.clone(),
        config.medium,
        &config.shape,
        config.delta,
        config.order,
        config.convention,
    )?;
    let scale = ParticleScale::at(particle.delta, config.center)?;
    let point = |omega: f64| -> Result<SpectrumPoint, ObservableError> {
        let dynamic = particle.dynamic_polarizability(omega)?;
        let p = dipole_moment(
            &dynamic.matrix,
            &config.wave,
            &particle.shape,
            &scale,
            omega,
            &config.medium,
        )?;
        let cs = powers_and_cross_sections(
            &p,
            &config.wave,
            &config.center,
            omega,
            &config.medium,
            &dynamic.matrix,
        );
        Ok(SpectrumPoint {
            omega,
            eps_c: dynamic.eps_c,
            lambda: dynamic.lambda,
            perturbed: dynamic.eigenvalues.map(|e| e.lambda),
            trace_m_dyn: dynamic.matrix.trace(),
            dipole: p,
            cross_sections: cs,
        })
    };
    let rows = config
        .omegas
        .par_iter()
        .map(|&omega| SpectrumRow {
            omega,
            result: point(omega),
        })
        .collect();
    Ok(ObservableSpectrum { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::DrudeModel;
    use crate::spectral::max_modulus;

    fn drude() -> Material {
        DrudeModel::new(2e15, 1e-14).unwrap().into()
    }

    #[test]
    fn clausius_mossotti() {
        let b = Ellipsoid::sphere(1.0).unwrap();
        let dep = depolarization_factors(&b);
        let a = 12e-9;
        let (eps_c, eps_m) = (Complex64::new(-3.0, 0.4), 1.7);
        let alpha = static_polarizability(eps_c, eps_m, &dep, &b, a).unwrap();
        let cm = 4.0 * PI * a.powi(3) * VACUUM_PERMITTIVITY * eps_m * (eps_c - eps_m) / (eps_c + 2.0 * eps_m);
        for i in 0..3 {
            assert!((alpha[(i, i)] / cm - 1.0).norm() < 1e-13);
        }
        assert!(alpha[(0, 1)].norm() < 1e-13 * cm.norm());
    }

    #[test]
    fn no_contrast_no_response() {
        let b = Ellipsoid::new([1.0, 0.5, 0.2]).unwrap();
        let dep = depolarization_factors(&b);
        let alpha = static_polarizability(Complex64::from(2.0), 2.0, &dep, &b, 1e-8).unwrap();
        assert_eq!(alpha, Matrix3::zeros());
    }

    #[test]
    fn frohlich_pole() {
        let b = Ellipsoid::sphere(1.0).unwrap();
        let dep = depolarization_factors(&b);
        let r = static_polarizability(Complex64::from(-2.0), 1.0, &dep, &b, 1e-8);
        assert!(matches!(r, Err(ObservableError::Pole { axis: 0, .. })));
    }

    #[test]
    fn mean_field_of_sphere() {
        let b = Ellipsoid::sphere(1.0).unwrap();
        let x: f64 = 0.3;
        let f = mean_field_factor(&b, 1.0, x, &Vector3::z(), 24).unwrap();
        let exact = 3.0 * (x.sin() - x * x.cos()) / x.powi(3);
        assert!((f.re - exact).abs() < 1e-12 && f.im.abs() < 1e-14);
        assert!((exact - 0.991_02).abs() < 1e-5);
        let f0 = mean_field_factor(&b, 1.0, 0.0, &Vector3::z(), 8).unwrap();
        assert!((f0 - 1.0).norm() < 1e-14);
    }

    #[test]
    fn far_field_example() {
        let p = Vector3::new(Complex64::from(1e-30), Complex64::from(0.0), Complex64::from(0.0));
        let a = far_field_amplitude(&p, 1e7, &Vector3::x()).unwrap();
        assert!((a[0].re / 7.9577e-18 - 1.0).abs() < 1e-4);
        let a2 = far_field_amplitude(&(p * Complex64::from(2.0)), 1e7, &Vector3::x()).unwrap();
        assert_eq!(a2, a * Complex64::from(2.0));
        assert!(far_field_amplitude(&p, 1e7, &Vector3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn zero_dipole_has_zero_cross_sections() {
        let cs = powers_and_cross_sections(
            &Vector3::zeros(),
            &PlaneWave::default(),
            &Vector3::zeros(),
            2e15,
            &Medium::vacuum(),
            &Matrix3::zeros(),
        );
        assert_eq!(cs, CrossSections::default());
    }

    #[test]
    fn scattering_matches_dipole_formula() {
        // σ_sca = k⁴|α/(ε₀ε_m)|²/(6π) for a linearly polarized field along an axis
        let medium = Medium::new(1.8, 1.2).unwrap();
        let omega = 3e15;
        let k = medium.wavenumber(omega);
        let alpha = Complex64::new(2e-35, 1e-35);
        let p = Vector3::new(alpha, Complex64::from(0.0), Complex64::from(0.0));
        let m = Matrix3::from_diagonal_element(alpha);
        let cs = powers_and_cross_sections(&p, &PlaneWave::default(), &Vector3::zeros(), omega, &medium, &m);
        let a = alpha / (VACUUM_PERMITTIVITY * 1.8);
        let expected = k.powi(4) * a.norm_sqr() / (6.0 * PI);
        assert!((cs.scattering / expected - 1.0).abs() < 1e-6);
        assert!((cs.avg_scattering / expected - 1.0).abs() < 1e-12);
        assert!((cs.extinction / (k * a.im) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wave_validation() {
        assert!(PlaneWave::linear(Vector3::x(), Vector3::x()).is_err());
        assert!(PlaneWave::linear(Vector3::x(), Vector3::new(0.0, 0.0, 2.0)).is_err());
        assert!(PlaneWave::linear(Vector3::zeros(), Vector3::z()).is_err());
        assert!(PlaneWave::linear(Vector3::y(), Vector3::z()).is_ok());
    }

    #[test]
    fn dynamic_reduces_to_static() {
        let b = Ellipsoid::new([1.0, 0.7, 0.5]).unwrap();
        let medium = Medium::dielectric(1.5).unwrap();
        let omega = 3e15;
        let delta = 1e-6 / medium.wavenumber(omega);
        let p = Particle::new(drude(), medium, &b, delta, 16, PerturbationConvention::Corrected).unwrap();
        let dynamic = p.dynamic_polarizability(omega).unwrap().matrix;
        let stat = p.static_polarizability(omega).unwrap();
        assert!(max_modulus(&(dynamic - stat)) < 1e-9 * max_modulus(&stat));
    }

    #[test]
    fn rotation_equivariance() {
        let rot = *nalgebra::Rotation3::from_euler_angles(-0.7, 0.2, 1.3).matrix();
        let b = Ellipsoid::new([1.0, 0.6, 0.3]).unwrap();
        let rb = b.rotated(&rot).unwrap();
        let m = dynamic_polarizability(&drude(), &Medium::vacuum(), &b, 30e-9, 2.5e15, 16, Default::default())
            .unwrap()
            .matrix;
        let rm = dynamic_polarizability(&drude(), &Medium::vacuum(), &rb, 30e-9, 2.5e15, 16, Default::default())
            .unwrap()
            .matrix;
        let r = rot.map(Complex64::from);
        assert!(max_modulus(&(r * m * r.transpose() - rm)) < 1e-10 * max_modulus(&m));
    }

    #[test]
    fn sweep_shapes() {
        let cfg = SweepConfig {
            material: drude(),
            medium: Medium::vacuum(),
            shape: Ellipsoid::new([2.0, 1.0, 1.0]).unwrap(),
            delta: 20e-9,
            center: Vector3::zeros(),
            omegas: vec![1.1e15],
            wave: PlaneWave::default(),
            order: 16,
            convention: Default::default(),
        };
        assert_eq!(spectrum_sweep(&cfg).unwrap().len(), 1);
        let cfg = SweepConfig {
            omegas: linear_grid(5e14, 3e15, 7),
            ..cfg
        };
        let s = spectrum_sweep(&cfg).unwrap();
        assert!(s.rows.windows(2).all(|w| w[0].omega < w[1].omega));
        assert!(s.rows.iter().all(|r| r.result.as_ref().unwrap().cross_sections.extinction > 0.0));
        let cfg = SweepConfig {
            omegas: vec![],
            ..cfg
        };
        assert_eq!(spectrum_sweep(&cfg), Err(ObservableError::EmptyGrid));
    }

    #[test]
    fn failed_rows_do_not_stop_the_sweep() {
        let cfg = SweepConfig {
            material: drude(),
            medium: Medium::vacuum(),
            shape: Ellipsoid::sphere(1.0).unwrap(),
            delta: 20e-9,
            center: Vector3::zeros(),
            omegas: vec![1e15, -1.0, 2e15],
            wave: PlaneWave::default(),
            order: 16,
            convention: Default::default(),
        };
        let s = spectrum_sweep(&cfg).unwrap();
        assert!(s.rows[0].result.is_ok() && s.rows[1].result.is_err() && s.rows[2].result.is_ok());
    }
}

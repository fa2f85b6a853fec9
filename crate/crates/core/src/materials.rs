//! Frequency-dependent permittivity of the particle and the host medium.
//!
//! All permittivities are relative (dimensionless). The resonance function
//! used throughout the crate is
//!
//! ```text
//! λ(ω) = ε_m / (ε_m − ε_c(ω))
//! ```
//!
//! which equals the depolarization factor `L_i` at a quasi-static dipole
//! resonance (the Fröhlich condition `ε_c = −2 ε_m` gives `λ = 1/3` for a
//! sphere). The companion `ε_c/(ε_m − ε_c) = λ − 1` is available through
//! [`lambda_alt`].

use std::io::Read;

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::SPEED_OF_LIGHT;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("angular frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("angular frequency {omega} rad/s outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },
    #[error("ε_c equals ε_m = {0}: resonance function is singular")]
    SingularContrast(f64),
    #[error("invalid Drude parameters: {0}")]
    InvalidDrude(String),
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("line {line}: {message}")]
    Table { line: u64, message: String },
}

/// Single-oscillator Drude metal: `ε(ω) = ε_∞ − ω_p² / (ω (ω + i/τ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeModel {
    plasma_frequency: f64,
    relaxation_time: f64,
    eps_inf: f64,
}

impl DrudeModel {
    pub fn new(plasma_frequency: f64, relaxation_time: f64) -> Result<Self, MaterialError> {
        Self::with_background(plasma_frequency, relaxation_time, 1.0)
    }

    pub fn with_background(
        plasma_frequency: f64,
        relaxation_time: f64,
        eps_inf: f64,
    ) -> Result<Self, MaterialError> {
        if !(plasma_frequency > 0.0 && plasma_frequency.is_finite()) {
            return Err(MaterialError::InvalidDrude(format!(
                "plasma frequency must be positive, got {plasma_frequency}"
            )));
        }
        if !(relaxation_time > 0.0) {
            return Err(MaterialError::InvalidDrude(format!(
                "relaxation time must be positive, got {relaxation_time}"
            )));
        }
        if !(eps_inf >= 1.0 && eps_inf.is_finite()) {
            return Err(MaterialError::InvalidDrude(format!(
                "background permittivity must be >= 1, got {eps_inf}"
            )));
        }
        Ok(DrudeModel {
            plasma_frequency,
            relaxation_time,
            eps_inf,
        })
    }

    pub fn plasma_frequency(&self) -> f64 {
        self.plasma_frequency
    }

    pub fn relaxation_time(&self) -> f64 {
        self.relaxation_time
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }

    fn damping(&self) -> f64 {
        // τ = ∞ is allowed and means a lossless metal
        1.0 / self.relaxation_time
    }

    pub fn permittivity(&self, omega: f64) -> Result<Complex64, MaterialError> {
        check_frequency(omega)?;
        let wp2 = self.plasma_frequency * self.plasma_frequency;
        let denom = Complex64::new(omega * omega, omega * self.damping());
        Ok(Complex64::new(self.eps_inf, 0.0) - wp2 / denom)
    }

    /// `dε/dω = ω_p² (2ω + i/τ) / (ω (ω + i/τ))²`
    pub fn permittivity_derivative(&self, omega: f64) -> Result<Complex64, MaterialError> {
        check_frequency(omega)?;
        let g = self.damping();
        let wp2 = self.plasma_frequency * self.plasma_frequency;
        let q = Complex64::new(omega * omega, omega * g);
        Ok(wp2 * Complex64::new(2.0 * omega, g) / (q * q))
    }
}

/// Sampled permittivity with linear interpolation of the real and imaginary
/// parts in ω.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPermittivity {
    omegas: Vec<f64>,
    values: Vec<Complex64>,
}

impl TabulatedPermittivity {
    pub fn new(samples: Vec<(f64, Complex64)>) -> Result<Self, MaterialError> {
        if samples.len() < 2 {
            return Err(MaterialError::Table {
                line: 0,
                message: format!("need at least 2 samples, got {}", samples.len()),
            });
        }
        for (k, (w, e)) in samples.iter().enumerate() {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(MaterialError::Table {
                    line: k as u64 + 1,
                    message: format!("frequency must be positive and finite, got {w}"),
                });
            }
            if !(e.im > 0.0) {
                return Err(MaterialError::Table {
                    line: k as u64 + 1,
                    message: format!("Im ε must be positive (passive metal), got {}", e.im),
                });
            }
            if k > 0 && *w <= samples[k - 1].0 {
                return Err(MaterialError::Table {
                    line: k as u64 + 1,
                    message: format!(
                        "frequencies must be strictly increasing ({} after {})",
                        w,
                        samples[k - 1].0
                    ),
                });
            }
        }
        let (omegas, values) = samples.into_iter().unzip();
        Ok(TabulatedPermittivity { omegas, values })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omegas[0], *self.omegas.last().unwrap())
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.omegas.iter().copied().zip(self.values.iter().copied())
    }

    pub fn permittivity(&self, omega: f64) -> Result<Complex64, MaterialError> {
        check_frequency(omega)?;
        let (min, max) = self.range();
        if omega < min || omega > max {
            return Err(MaterialError::OutOfRange { omega, min, max });
        }
        let idx = self.omegas.partition_point(|w| *w <= omega);
        if idx == self.omegas.len() {
            return Ok(*self.values.last().unwrap());
        }
        let (w0, w1) = (self.omegas[idx - 1], self.omegas[idx]);
        let t = (omega - w0) / (w1 - w0);
        let (e0, e1) = (self.values[idx - 1], self.values[idx]);
        Ok(Complex64::new(
            e0.re + t * (e1.re - e0.re),
            e0.im + t * (e1.im - e0.im),
        ))
    }

    /// Central difference on the interpolant, one-sided at the table ends.
    pub fn permittivity_derivative(&self, omega: f64) -> Result<Complex64, MaterialError> {
        let (min, max) = self.range();
        let e0 = self.permittivity(omega)?;
        let h = 1e-6 * omega;
        let lo = (omega - h).max(min);
        let hi = (omega + h).min(max);
        if hi <= lo {
            return Ok(Complex64::new(0.0, 0.0) * e0);
        }
        Ok((self.permittivity(hi)? - self.permittivity(lo)?) / (hi - lo))
    }
}

/// Parse the `omega_rad_s,eps_re,eps_im` CSV layout.
pub fn load_tabulated<R: Read>(source: R) -> Result<TabulatedPermittivity, MaterialError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let headers = reader.headers().map_err(|e| MaterialError::Table {
        line: 1,
        message: e.to_string(),
    })?;
    let expected = ["omega_rad_s", "eps_re", "eps_im"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(MaterialError::Table {
            line: 1,
            message: format!(
                "expected header `omega_rad_s,eps_re,eps_im`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut samples: Vec<(f64, Complex64)> = Vec::new();
    let mut lines: Vec<u64> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| MaterialError::Table {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize, name: &str| -> Result<f64, MaterialError> {
            let raw = record.get(i).ok_or_else(|| MaterialError::Table {
                line,
                message: format!("missing column `{name}`"),
            })?;
            raw.parse::<f64>().map_err(|_| MaterialError::Table {
                line,
                message: format!("cannot parse `{raw}` as {name}"),
            })
        };
        let w = field(0, "omega_rad_s")?;
        let re = field(1, "eps_re")?;
        let im = field(2, "eps_im")?;
        if let Some((prev, _)) = samples.last() {
            if w <= *prev {
                return Err(MaterialError::Table {
                    line,
                    message: format!("frequency column not strictly increasing ({w} after {prev})"),
                });
            }
        }
        if !(im > 0.0) {
            return Err(MaterialError::Table {
                line,
                message: format!("Im ε = {im} is not positive"),
            });
        }
        samples.push((w, Complex64::new(re, im)));
        lines.push(line);
    }
    TabulatedPermittivity::new(samples).map_err(|e| match e {
        MaterialError::Table { line, message } if line > 0 => MaterialError::Table {
            line: lines[(line - 1) as usize],
            message,
        },
        other => other,
    })
}

/// Dispersion model of the particle.
#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Drude(DrudeModel),
    Tabulated(TabulatedPermittivity),
}

impl From<DrudeModel> for Material {
    fn from(m: DrudeModel) -> Self {
        Material::Drude(m)
    }
}

impl From<TabulatedPermittivity> for Material {
    fn from(t: TabulatedPermittivity) -> Self {
        Material::Tabulated(t)
    }
}

impl Material {
    pub fn permittivity_at(&self, omega: f64) -> Result<Complex64, MaterialError> {
        match self {
            Material::Drude(d) => d.permittivity(omega),
            Material::Tabulated(t) => t.permittivity(omega),
        }
    }

    pub fn permittivity_derivative(&self, omega: f64) -> Result<Complex64, MaterialError> {
        match self {
            Material::Drude(d) => d.permittivity_derivative(omega),
            Material::Tabulated(t) => t.permittivity_derivative(omega),
        }
    }

    /// Frequencies where the model is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Material::Drude(_) => (0.0, f64::INFINITY),
            Material::Tabulated(t) => t.range(),
        }
    }
}

/// Free-standing alias matching the operation name used across the crate.
pub fn permittivity_at(material: &Material, omega: f64) -> Result<Complex64, MaterialError> {
    material.permittivity_at(omega)
}

/// Host medium. The particle is nonmagnetic, so `μ_c = μ_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    eps_m: f64,
    mu_m: f64,
}

impl Medium {
    pub fn new(eps_m: f64, mu_m: f64) -> Result<Self, MaterialError> {
        if !(eps_m > 0.0 && eps_m.is_finite()) {
            return Err(MaterialError::InvalidMedium(format!(
                "ε_m must be positive, got {eps_m}"
            )));
        }
        if !(mu_m > 0.0 && mu_m.is_finite()) {
            return Err(MaterialError::InvalidMedium(format!(
                "μ_m must be positive, got {mu_m}"
            )));
        }
        Ok(Medium { eps_m, mu_m })
    }

    pub fn vacuum() -> Self {
        Medium {
            eps_m: 1.0,
            mu_m: 1.0,
        }
    }

    pub fn dielectric(eps_m: f64) -> Result<Self, MaterialError> {
        Self::new(eps_m, 1.0)
    }

    pub fn eps_m(&self) -> f64 {
        self.eps_m
    }

    pub fn mu_m(&self) -> f64 {
        self.mu_m
    }

    pub fn refractive_index(&self) -> f64 {
        (self.eps_m * self.mu_m).sqrt()
    }

    /// `k_m = (ω/c₀) √(ε_m μ_m)`, in 1/m.
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega / SPEED_OF_LIGHT * self.refractive_index()
    }

    /// `k_c = (ω/c₀) √(ε_c μ_c)` with the principal square root.
    pub fn particle_wavenumber(&self, omega: f64, eps_c: Complex64) -> Complex64 {
        (eps_c * self.mu_m).sqrt() * (omega / SPEED_OF_LIGHT)
    }
}

fn check_frequency(omega: f64) -> Result<(), MaterialError> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(MaterialError::NonPositiveFrequency(omega))
    }
}

/// `λ = ε_m / (ε_m − ε_c)`.
pub fn lambda_of_omega(eps_c: Complex64, eps_m: f64) -> Result<Complex64, MaterialError> {
    let denom = Complex64::new(eps_m, 0.0) - eps_c;
    if denom.norm() == 0.0 {
        return Err(MaterialError::SingularContrast(eps_m));
    }
    Ok(eps_m / denom)
}

/// `ε_c / (ε_m − ε_c)`, which is `λ − 1`.
pub fn lambda_alt(eps_c: Complex64, eps_m: f64) -> Result<Complex64, MaterialError> {
    lambda_of_omega(eps_c, eps_m).map(|l| l - 1.0)
}

/// λ(ω) for a material in a medium.
pub fn resonance_function(
    material: &Material,
    medium: &Medium,
    omega: f64,
) -> Result<Complex64, MaterialError> {
    lambda_of_omega(material.permittivity_at(omega)?, medium.eps_m())
}

/// `dλ/dω = ε_m ε_c'(ω) / (ε_m − ε_c)²`, in seconds.
pub fn dlambda_domega(
    material: &Material,
    medium: &Medium,
    omega: f64,
) -> Result<Complex64, MaterialError> {
    let eps_c = material.permittivity_at(omega)?;
    let d = material.permittivity_derivative(omega)?;
    let denom = Complex64::new(medium.eps_m(), 0.0) - eps_c;
    if denom.norm() == 0.0 {
        return Err(MaterialError::SingularContrast(medium.eps_m()));
    }
    Ok(medium.eps_m() * d / (denom * denom))
}

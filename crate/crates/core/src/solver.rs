//! Static and size-corrected dipole resonances, and the regime diagnostic.
//!
//! Resonances are found on the real frequency axis by matching
//! `Re λ(ω)` to the (perturbed) eigenvalue. Imaginary parts set the line
//! width and are reported, not matched.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::SPEED_OF_LIGHT;
use crate::geometry::Ellipsoid;
use crate::materials::{dlambda_domega, resonance_function, Material, MaterialError, Medium};
use crate::spectral::{
    depolarization_factors, perturbation_matrix, perturbed_eigenvalue, PerturbationConvention,
    PerturbedEigenvalue, SpectralError,
};

pub const DEFAULT_WINDOW: (f64, f64) = (2e15, 5e15);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid frequency window [{0}, {1}]")]
    InvalidWindow(f64, f64),
    #[error(
        "Re λ(ω) − target does not change sign on [{lo}, {hi}]: values {f_lo} and {f_hi}"
    )]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder stalled with residual {residual:e}")]
    NotConverged { residual: f64 },
    #[error("fixed-point iteration did not converge; iterates {trace:?}")]
    FixedPointDiverged { trace: Vec<f64> },
    #[error("particle size must be non-negative and finite, got {0}")]
    InvalidSize(f64),
    #[error("axis index must be 0, 1 or 2, got {0}")]
    InvalidAxis(usize),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

fn check_window(window: (f64, f64)) -> Result<(), SolverError> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(SolverError::InvalidWindow(lo, hi));
    }
    Ok(())
}

/// Solve `Re λ(ω) = target` on `window`.
///
/// Bisection safeguarded Illinois iteration; stops when the residual is
/// below `1e-12·|target|` or the bracket has collapsed to rounding level.
pub fn match_real_part(
    material: &Material,
    medium: &Medium,
    target: f64,
    window: (f64, f64),
) -> Result<f64, SolverError> {
    check_window(window)?;
    let f = |w: f64| -> Result<f64, SolverError> {
        Ok(resonance_function(material, medium, w)?.re - target)
    };
    let (mut a, mut b) = window;
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(SolverError::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let ftol = 1e-12 * target.abs().max(f64::MIN_POSITIVE);
    let mut side = 0i8;
    let mut best = (a, fa.abs());
    for it in 0..400 {
        // alternate with plain bisection so the bracket always shrinks
        let c = if it % 4 == 3 {
            0.5 * (a + b)
        } else {
            let c = (a * fb - b * fa) / (fb - fa);
            if c > a && c < b {
                c
            } else {
                0.5 * (a + b)
            }
        };
        let fc = f(c)?;
        if fc.abs() < best.1 {
            best = (c, fc.abs());
        }
        if fc.abs() <= ftol || (b - a) <= 4.0 * f64::EPSILON * c {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(SolverError::NotConverged { residual: best.1 })
}

/// `ω₀` with `Re λ(ω₀) = Lᵢ`.
pub fn static_resonance(
    material: &Material,
    medium: &Medium,
    l_i: f64,
    window: (f64, f64),
) -> Result<f64, SolverError> {
    match_real_part(material, medium, l_i, window)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub window: (f64, f64),
    /// Surface quadrature order for the perturbation matrix.
    pub order: usize,
    pub convention: PerturbationConvention,
    /// Iterate `ω ↦ ω₁(ω)` to self-consistency instead of one step.
    pub fixed_point: bool,
    pub fixed_point_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            window: DEFAULT_WINDOW,
            order: 32,
            convention: PerturbationConvention::default(),
            fixed_point: false,
            fixed_point_tolerance: 1e-8,
            max_iterations: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceResult {
    pub axis: usize,
    pub omega0: f64,
    pub omega1: f64,
    pub eigenvalue: PerturbedEigenvalue,
    pub relative_shift: f64,
    /// Number of perturbation steps taken (0 when `δ = 0`).
    pub iterations: usize,
    /// `|Re λ(ω₁) − Re λ̃ᵢ|`.
    pub residual: f64,
}

/// Three-step procedure: static root, perturbation at `ω₀`, corrected root.
///
/// `shape` may be unnormalized; the particle is `δ·shape` after rescaling to
/// unit largest semi-axis, i.e. its largest semi-axis is `δ·max(aᵢ)`.
pub fn size_corrected_resonance(
    material: &Material,
    medium: &Medium,
    shape: &Ellipsoid,
    delta: f64,
    axis: usize,
    options: &SolverOptions,
) -> Result<ResonanceResult, SolverError> {
    if axis > 2 {
        return Err(SolverError::InvalidAxis(axis));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(SolverError::InvalidSize(delta));
    }
    let (b, scale) = shape.normalized();
    let delta = delta * scale;
    let dep = depolarization_factors(&b);
    let l_i = dep.factors[axis];
    let omega0 = static_resonance(material, medium, l_i, options.window)?;

    let step = |omega: f64| -> Result<(f64, PerturbedEigenvalue), SolverError> {
        let dk = Complex64::from(delta * medium.wavenumber(omega));
        let pm = perturbation_matrix(&b, dk, options.order)?;
        let ev = perturbed_eigenvalue(&dep, &pm, axis, options.convention)?;
        let w = match_real_part(material, medium, ev.lambda.re, options.window)?;
        Ok((w, ev))
    };

    let (omega1, eigenvalue, iterations) = if delta == 0.0 {
        let ev = PerturbedEigenvalue {
            axis,
            lambda: Complex64::from(l_i),
            static_factor: l_i,
            shift: Complex64::new(0.0, 0.0),
        };
        (omega0, ev, 0)
    } else if !options.fixed_point {
        let (w, ev) = step(omega0)?;
        (w, ev, 1)
    } else {
        let mut trace = vec![omega0];
        let mut current = omega0;
        let mut done = None;
        for it in 1..=options.max_iterations {
            let (w, ev) = step(current)?;
            trace.push(w);
            let change = (w - current).abs() / current;
            current = w;
            if change < options.fixed_point_tolerance {
                done = Some((w, ev, it));
                break;
            }
        }
        done.ok_or(SolverError::FixedPointDiverged { trace })?
    };

    let residual = (resonance_function(material, medium, omega1)?.re - eigenvalue.lambda.re).abs();
    Ok(ResonanceResult {
        axis,
        omega0,
        omega1,
        eigenvalue,
        relative_shift: (omega1 - omega0) / omega0,
        iterations,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRow {
    pub omega: f64,
    pub dlambda_abs: f64,
    /// `δ n_m / c₀`.
    pub threshold: f64,
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub delta: f64,
    pub speed_of_light: f64,
    pub rows: Vec<RegimeRow>,
}

impl RegimeReport {
    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }

    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }
}

/// Ratio below which the one-step procedure is reported as unreliable.
pub const REGIME_FACTOR: f64 = 10.0;

/// Tabulate `|dλ/dω|` against `δ n_m / c₀` on `points` equispaced
/// frequencies; rows with `|dλ/dω| < 10 δ n_m / c₀` are flagged.
pub fn regime_check(
    material: &Material,
    medium: &Medium,
    delta: f64,
    window: (f64, f64),
    points: usize,
    speed_of_light: f64,
) -> Result<RegimeReport, SolverError> {
    check_window(window)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(SolverError::InvalidSize(delta));
    }
    let threshold = delta * medium.refractive_index() / speed_of_light;
    let omegas: Vec<f64> = if points <= 1 {
        vec![window.0]
    } else {
        let h = (window.1 - window.0) / (points - 1) as f64;
        (0..points).map(|i| window.0 + h * i as f64).collect()
    };
    let mut rows = Vec::with_capacity(omegas.len());
    for omega in omegas {
        let d = dlambda_domega(material, medium, omega)?.norm();
        let ratio = d / threshold;
        rows.push(RegimeRow {
            omega,
            dlambda_abs: d,
            threshold,
            ratio,
            flagged: d < REGIME_FACTOR * threshold,
        });
    }
    Ok(RegimeReport {
        delta,
        speed_of_light,
        rows,
    })
}

/// [`regime_check`] with the exact speed of light.
pub fn regime_check_si(
    material: &Material,
    medium: &Medium,
    delta: f64,
    window: (f64, f64),
    points: usize,
) -> Result<RegimeReport, SolverError> {
    regime_check(material, medium, delta, window, points, SPEED_OF_LIGHT)
}

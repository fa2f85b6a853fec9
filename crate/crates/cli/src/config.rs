//! TOML run configuration.
//!
//! Physical quantities carry their unit in the key name. Relative
//! permittivities, permeabilities and the reference shape are dimensionless
//! and carry no suffix. Parsing never stops at the first problem: every
//! violation found is collected into [`ConfigError`].

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{Matrix3, Rotation3, Vector3};
use plasmonkit_core::materials::{load_tabulated, DrudeModel, Material, Medium};
use plasmonkit_core::observables::PlaneWave;
use plasmonkit_core::solver::SolverOptions;
use plasmonkit_core::{Ellipsoid, PerturbationConvention, StarDomain};
use toml::{Table, Value};

use crate::Command;

/// Every violation found in a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s): {}", self.violations.len(), self.violations.join("; "))
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub enum LDyadicDomain {
    /// Uses the particle shape.
    Particle,
    Ball { dim: usize, radius: f64 },
    Ellipse { semi_axes: [f64; 2] },
    FocalEllipse { eccentricity: f64 },
}

impl LDyadicDomain {
    pub fn build(&self, particle: &Ellipsoid) -> Result<StarDomain, plasmonkit_core::geometry::GeometryError> {
        match self {
            LDyadicDomain::Particle => Ok(StarDomain::ellipsoid(particle)),
            LDyadicDomain::Ball { dim, radius } => StarDomain::ball_with_radius(*dim, *radius),
            LDyadicDomain::Ellipse { semi_axes } => StarDomain::ellipse(semi_axes[0], semi_axes[1]),
            LDyadicDomain::FocalEllipse { eccentricity } => StarDomain::focal_ellipse(*eccentricity),
        }
    }
}

/// Validated configuration for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub output: PathBuf,
    /// Absent only for commands that do not need it.
    pub material: Option<Material>,
    pub medium: Medium,
    /// Reference shape, normalized to unit largest semi-axis downstream.
    /// Absent only for commands that do not need it.
    pub shape: Option<Ellipsoid>,
    pub deltas_m: Vec<f64>,
    pub center_m: Vector3<f64>,
    pub window_rad_s: (f64, f64),
    pub points: usize,
    pub perturbation_order: usize,
    pub solver: SolverOptions,
    pub wave: PlaneWave,
    pub omega_rad_s: Option<f64>,
    pub ldyadic: LDyadicDomain,
    pub speed_of_light_m_s: f64,
}

const SECTIONS: &[&str] = &[
    "material", "medium", "particle", "frequency", "quadrature", "solver", "wave", "perturb", "ldyadic",
    "regime",
];

const DEFAULT_WINDOW: (f64, f64) = (5e14, 5e15);

struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn err(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn section<'a>(&mut self, root: &'a Table, name: &str, allowed: &[&str]) -> Option<&'a Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => {
                for key in t.keys() {
                    if !allowed.contains(&key.as_str()) {
                        self.err(format!("[{name}] unknown key `{key}` (allowed: {})", allowed.join(", ")));
                    }
                }
                Some(t)
            }
            Some(_) => {
                self.err(format!("`{name}` must be a table"));
                None
            }
        }
    }

    fn float(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<f64> {
        let v = t?.get(key)?;
        match as_f64(v) {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(format!("[{sec}] `{key}` must be a finite number"));
                None
            }
        }
    }

    fn positive(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<f64> {
        let x = self.float(t, sec, key)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.err(format!("[{sec}] `{key}` must be positive, got {x}"));
            None
        }
    }

    fn uint(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<usize> {
        match t?.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            _ => {
                self.err(format!("[{sec}] `{key}` must be a non-negative integer"));
                None
            }
        }
    }

    fn boolean(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<bool> {
        match t?.get(key)? {
            Value::Boolean(b) => Some(*b),
            _ => {
                self.err(format!("[{sec}] `{key}` must be true or false"));
                None
            }
        }
    }

    fn string<'a>(&mut self, t: Option<&'a Table>, sec: &str, key: &str) -> Option<&'a str> {
        match t?.get(key)? {
            Value::String(s) => Some(s.as_str()),
            _ => {
                self.err(format!("[{sec}] `{key}` must be a string"));
                None
            }
        }
    }

    fn floats(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<Vec<f64>> {
        let v = t?.get(key)?;
        let list = match v {
            Value::Array(a) => a.iter().map(as_f64).collect::<Option<Vec<f64>>>(),
            other => as_f64(other).map(|x| vec![x]),
        };
        match list {
            Some(l) if l.iter().all(|x| x.is_finite()) => Some(l),
            _ => {
                self.err(format!("[{sec}] `{key}` must be a number or an array of numbers"));
                None
            }
        }
    }

    fn array<const N: usize>(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<[f64; N]> {
        let l = self.floats(t, sec, key)?;
        match <[f64; N]>::try_from(l) {
            Ok(a) => Some(a),
            Err(l) => {
                self.err(format!("[{sec}] `{key}` must have {N} entries, got {}", l.len()));
                None
            }
        }
    }

    /// Report a missing key. Present but invalid keys were reported already.
    fn require<T>(
        &mut self,
        v: Option<T>,
        t: Option<&Table>,
        sec: &str,
        key: &str,
        needed: bool,
        command: Command,
    ) -> Option<T> {
        if v.is_none() && needed && !t.is_some_and(|t| t.contains_key(key)) {
            self.err(format!("[{sec}] `{key}` is required by `{command}`"));
        }
        v
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

impl RunConfig {
    /// Read and validate `path`. Relative table paths resolve against the
    /// directory holding the configuration.
    pub fn load(path: &Path, command: Command, output: PathBuf) -> Result<(RunConfig, Vec<u8>), ConfigError> {
        let bytes = std::fs::read(path).map_err(|e| ConfigError {
            violations: vec![format!("cannot read {}: {e}", path.display())],
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|_| ConfigError {
            violations: vec![format!("{} is not valid UTF-8", path.display())],
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let cfg = RunConfig::parse(text, base, command, output)?;
        Ok((cfg, bytes))
    }

    pub fn parse(text: &str, base: &Path, command: Command, output: PathBuf) -> Result<RunConfig, ConfigError> {
        let root: Table = toml::from_str(text).map_err(|e| ConfigError {
            violations: vec![format!("invalid TOML: {}", e.message())],
        })?;
        let mut r = Reader { errors: Vec::new() };
        for key in root.keys() {
            if !SECTIONS.contains(&key.as_str()) {
                r.err(format!("unknown section `{key}` (allowed: {})", SECTIONS.join(", ")));
            }
        }
        use Command::*;
        let physical = matches!(command, Perturb | Resonance | Spectrum | Regime);

        // material
        let mat = r.section(
            &root,
            "material",
            &["model", "plasma_frequency_rad_s", "relaxation_time_s", "eps_inf", "table_path"],
        );
        let material = match r.string(mat, "material", "model") {
            Some("drude") => {
                let wp = r.positive(mat, "material", "plasma_frequency_rad_s");
                let wp = r.require(wp, mat, "material", "plasma_frequency_rad_s", true, command);
                let tau = r.positive(mat, "material", "relaxation_time_s");
                let tau = r.require(tau, mat, "material", "relaxation_time_s", true, command);
                let inf = r.float(mat, "material", "eps_inf").unwrap_or(1.0);
                match (wp, tau) {
                    (Some(wp), Some(tau)) => match DrudeModel::with_background(wp, tau, inf) {
                        Ok(d) => Some(Material::from(d)),
                        Err(e) => {
                            r.err(format!("[material] {e}"));
                            None
                        }
                    },
                    _ => None,
                }
            }
            Some("table") => match r.string(mat, "material", "table_path") {
                Some(p) => {
                    let full = base.join(p);
                    match File::open(&full).map_err(|e| e.to_string()).and_then(|f| {
                        load_tabulated(std::io::BufReader::new(f)).map_err(|e| e.to_string())
                    }) {
                        Ok(t) => Some(Material::from(t)),
                        Err(e) => {
                            r.err(format!("[material] table {}: {e}", full.display()));
                            None
                        }
                    }
                }
                None => {
                    r.err("[material] `table_path` is required when model = \"table\"".into());
                    None
                }
            },
            Some(other) => {
                r.err(format!("[material] unknown model {other:?} (expected \"drude\" or \"table\")"));
                None
            }
            None => {
                if physical {
                    r.err(format!("[material] `model` is required by `{command}`"));
                }
                None
            }
        };

        // medium
        let med = r.section(&root, "medium", &["eps_m", "mu_m"]);
        let eps_m = r.float(med, "medium", "eps_m").unwrap_or(1.0);
        let mu_m = r.float(med, "medium", "mu_m").unwrap_or(1.0);
        let medium = match Medium::new(eps_m, mu_m) {
            Ok(m) => Some(m),
            Err(e) => {
                r.err(format!("[medium] {e}"));
                None
            }
        };

        // particle
        let par = r.section(&root, "particle", &["semi_axes", "orientation_rad", "delta_m", "center_m"]);
        let axes = r.array::<3>(par, "particle", "semi_axes");
        let axes = r.require(axes, par, "particle", "semi_axes", matches!(command, Depol | Perturb | Resonance | Spectrum), command);
        let euler = r.array::<3>(par, "particle", "orientation_rad").unwrap_or([0.0; 3]);
        let rot: Matrix3<f64> = *Rotation3::from_euler_angles(euler[0], euler[1], euler[2]).matrix();
        let shape = match axes {
            Some(a) => match Ellipsoid::with_orientation(a, rot) {
                Ok(e) => Some(e),
                Err(e) => {
                    r.err(format!("[particle] {e}"));
                    None
                }
            },
            None => None,
        };
        let deltas = r.floats(par, "particle", "delta_m");
        let deltas = r.require(deltas, par, "particle", "delta_m", physical, command);
        if let Some(d) = &deltas {
            if d.is_empty() {
                r.err("[particle] `delta_m` must not be empty".into());
            }
            for x in d.iter().filter(|x| **x < 0.0) {
                r.err(format!("[particle] `delta_m` entries must be non-negative, got {x}"));
            }
            if command == Spectrum && d.contains(&0.0) {
                r.err("[particle] `delta_m` entries must be positive for `spectrum`".into());
            }
        }
        let center = r.array::<3>(par, "particle", "center_m").unwrap_or([0.0; 3]);

        // frequency grid
        let freq = r.section(&root, "frequency", &["window_rad_s", "points"]);
        let window = r.array::<2>(freq, "frequency", "window_rad_s").map(|w| (w[0], w[1]));
        if let Some((lo, hi)) = window {
            if !(lo > 0.0 && hi > lo) {
                r.err(format!("[frequency] `window_rad_s` must satisfy 0 < lo < hi, got [{lo}, {hi}]"));
            }
        }
        let points = r.uint(freq, "frequency", "points");
        let points = r.require(points, freq, "frequency", "points", matches!(command, Spectrum | Regime), command);
        if points == Some(0) {
            r.err("[frequency] `points` must be at least 1".into());
        }

        // quadrature
        let quad = r.section(&root, "quadrature", &["perturbation_order"]);
        let order = r.uint(quad, "quadrature", "perturbation_order").unwrap_or(32);
        if order < plasmonkit_core::spectral::MIN_PERTURBATION_ORDER {
            r.err(format!(
                "[quadrature] `perturbation_order` must be at least {}, got {order}",
                plasmonkit_core::spectral::MIN_PERTURBATION_ORDER
            ));
        }

        // solver
        let sol = r.section(
            &root,
            "solver",
            &["convention", "fixed_point", "fixed_point_tolerance", "max_iterations"],
        );
        let convention = match r.string(sol, "solver", "convention") {
            Some(s) => match PerturbationConvention::from_str(s) {
                Ok(c) => c,
                Err(e) => {
                    r.err(format!("[solver] {e}"));
                    PerturbationConvention::default()
                }
            },
            None => PerturbationConvention::default(),
        };
        let defaults = SolverOptions::default();
        let tol = r.positive(sol, "solver", "fixed_point_tolerance").unwrap_or(defaults.fixed_point_tolerance);
        let max_it = r.uint(sol, "solver", "max_iterations").unwrap_or(defaults.max_iterations);
        let solver = SolverOptions {
            window: window.unwrap_or(DEFAULT_WINDOW),
            order,
            convention,
            fixed_point: r.boolean(sol, "solver", "fixed_point").unwrap_or(false),
            fixed_point_tolerance: tol,
            max_iterations: max_it,
        };

        // incident wave
        let wv = r.section(&root, "wave", &["polarization", "direction"]);
        let pol = r.array::<3>(wv, "wave", "polarization").unwrap_or([1.0, 0.0, 0.0]);
        let dir = r.array::<3>(wv, "wave", "direction").unwrap_or([0.0, 0.0, 1.0]);
        let wave = match PlaneWave::linear(Vector3::from(pol), Vector3::from(dir)) {
            Ok(w) => Some(w),
            Err(e) => {
                r.err(format!("[wave] {e}"));
                None
            }
        };

        // perturb
        let pt = r.section(&root, "perturb", &["omega_rad_s"]);
        let omega = r.positive(pt, "perturb", "omega_rad_s");
        let omega = r.require(omega, pt, "perturb", "omega_rad_s", command == Perturb, command);

        // ldyadic
        let ld = r.section(&root, "ldyadic", &["domain", "dim", "radius", "semi_axes", "eccentricity"]);
        let ldyadic = match r.string(ld, "ldyadic", "domain").unwrap_or("particle") {
            "particle" => Some(LDyadicDomain::Particle),
            "ball" => {
                let dim = r.uint(ld, "ldyadic", "dim").unwrap_or(3);
                let radius = r.positive(ld, "ldyadic", "radius").unwrap_or(1.0);
                Some(LDyadicDomain::Ball { dim, radius })
            }
            "ellipse" => r
                .array::<2>(ld, "ldyadic", "semi_axes")
                .or_else(|| {
                    r.err("[ldyadic] `semi_axes` is required when domain = \"ellipse\"".into());
                    None
                })
                .map(|semi_axes| LDyadicDomain::Ellipse { semi_axes }),
            "focal_ellipse" => r
                .float(ld, "ldyadic", "eccentricity")
                .or_else(|| {
                    r.err("[ldyadic] `eccentricity` is required when domain = \"focal_ellipse\"".into());
                    None
                })
                .map(|eccentricity| LDyadicDomain::FocalEllipse { eccentricity }),
            other => {
                r.err(format!(
                    "[ldyadic] unknown domain {other:?} (expected particle, ball, ellipse or focal_ellipse)"
                ));
                None
            }
        };
        if command == Ldyadic && matches!(ldyadic, Some(LDyadicDomain::Particle)) && shape.is_none() {
            r.require(None::<()>, par, "particle", "semi_axes", true, command);
        }
        if let Some(dom) = &ldyadic {
            if !matches!(dom, LDyadicDomain::Particle) {
                if let Err(e) = dom.build(&Ellipsoid::sphere(1.0).expect("unit sphere")) {
                    r.err(format!("[ldyadic] {e}"));
                }
            }
        }

        // regime
        let rg = r.section(&root, "regime", &["speed_of_light_m_s"]);
        let c0 = r
            .positive(rg, "regime", "speed_of_light_m_s")
            .unwrap_or(plasmonkit_core::constants::SPEED_OF_LIGHT);

        if !r.errors.is_empty() {
            let mut seen = BTreeSet::new();
            r.errors.retain(|e| seen.insert(e.clone()));
            return Err(ConfigError { violations: r.errors });
        }
        Ok(RunConfig {
            command,
            output,
            material,
            medium: medium.expect("validated"),
            shape,
            deltas_m: deltas.unwrap_or_default(),
            center_m: Vector3::from(center),
            window_rad_s: solver.window,
            points: points.unwrap_or(1),
            perturbation_order: order,
            solver,
            wave: wave.expect("validated"),
            omega_rad_s: omega,
            ldyadic: ldyadic.expect("validated"),
            speed_of_light_m_s: c0,
        })
    }
}

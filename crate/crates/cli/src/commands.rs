use num_complex::Complex64;
use plasmonkit_core::observables::{linear_grid, spectrum_sweep, SweepConfig};
use plasmonkit_core::singular::l_dyadic;
use plasmonkit_core::solver::{regime_check, size_corrected_resonance};
use plasmonkit_core::spectral::{depolarization_factors, perturbation_matrix, perturbed_eigenvalues};
use plasmonkit_core::{Ellipsoid, Error};

use crate::config::RunConfig;
use crate::table::{complex, Cell, Table};
use crate::Command;

/// Run `cfg.command` and return its output table.
pub fn execute(cfg: &RunConfig) -> Result<Table, Error> {
    match cfg.command {
        Command::Depol => depol(cfg),
        Command::Ldyadic => ldyadic(cfg),
        Command::Perturb => perturb(cfg),
        Command::Resonance => resonance(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Regime => regime(cfg),
    }
}

fn shape(cfg: &RunConfig) -> &Ellipsoid {
    cfg.shape.as_ref().expect("shape checked during validation")
}

fn material(cfg: &RunConfig) -> &plasmonkit_core::Material {
    cfg.material.as_ref().expect("material checked during validation")
}

fn depol(cfg: &RunConfig) -> Result<Table, Error> {
    let dep = depolarization_factors(shape(cfg));
    let mut t = Table::new(&["axis", "factor", "axis_x", "axis_y", "axis_z"]);
    for i in 0..3 {
        let a = dep.axis(i);
        t.push(vec![i.into(), dep.factors[i].into(), a.x.into(), a.y.into(), a.z.into()]);
    }
    Ok(t)
}

fn ldyadic(cfg: &RunConfig) -> Result<Table, Error> {
    let unit = Ellipsoid::sphere(1.0)?;
    let domain = cfg.ldyadic.build(cfg.shape.as_ref().unwrap_or(&unit))?;
    let l = l_dyadic(&domain);
    let mut t = Table::new(&["i", "j", "value"]);
    for i in 0..l.nrows() {
        for j in 0..l.ncols() {
            t.push(vec![i.into(), j.into(), l[(i, j)].into()]);
        }
    }
    Ok(t)
}

fn perturb(cfg: &RunConfig) -> Result<Table, Error> {
    let omega = cfg.omega_rad_s.expect("omega checked during validation");
    let (b, scale) = shape(cfg).normalized();
    let dep = depolarization_factors(&b);
    let mut cols = vec![
        "delta_m", "omega_rad_s", "delta_k", "axis", "static_factor", "lambda_tilde_re", "lambda_tilde_im",
        "shift_re", "shift_im",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    for j in 0..3 {
        cols.push(format!("m_{j}_re"));
        cols.push(format!("m_{j}_im"));
    }
    let mut t = Table::new(&cols);
    for &delta in &cfg.deltas_m {
        let dk = delta * scale * cfg.medium.wavenumber(omega);
        let pm = perturbation_matrix(&b, Complex64::from(dk), cfg.perturbation_order)?;
        for ev in perturbed_eigenvalues(&dep, &pm, cfg.solver.convention) {
            let mut row: Vec<Cell> = vec![
                delta.into(),
                omega.into(),
                dk.into(),
                ev.axis.into(),
                ev.static_factor.into(),
            ];
            complex(&mut row, ev.lambda);
            complex(&mut row, ev.shift);
            for j in 0..3 {
                complex(&mut row, pm.m[(ev.axis, j)]);
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn resonance(cfg: &RunConfig) -> Result<Table, Error> {
    let mut t = Table::new(&[
        "delta_m",
        "axis",
        "omega0_rad_s",
        "omega1_rad_s",
        "relative_shift",
        "lambda_tilde_re",
        "lambda_tilde_im",
        "iterations",
        "residual",
    ]);
    for &delta in &cfg.deltas_m {
        for axis in 0..3 {
            let r = size_corrected_resonance(material(cfg), &cfg.medium, shape(cfg), delta, axis, &cfg.solver)?;
            let mut row: Vec<Cell> = vec![delta.into(), axis.into(), r.omega0.into(), r.omega1.into()];
            row.push(r.relative_shift.into());
            complex(&mut row, r.eigenvalue.lambda);
            row.push(r.iterations.into());
            row.push(r.residual.into());
            t.push(row);
        }
    }
    Ok(t)
}

/// Spectrum columns. Cross sections appear in m² and divided by `δ²`;
/// `trace_sca` is the trace-squared form kept alongside the averaged one.
pub const SPECTRUM_COLUMNS: &[&str] = &[
    "delta_m",
    "omega_rad_s",
    "status",
    "eps_c_re",
    "eps_c_im",
    "lambda_re",
    "lambda_im",
    "lambda_tilde_0_re",
    "lambda_tilde_0_im",
    "lambda_tilde_1_re",
    "lambda_tilde_1_im",
    "lambda_tilde_2_re",
    "lambda_tilde_2_im",
    "trace_m_dyn_re",
    "trace_m_dyn_im",
    "dipole_abs_c_m",
    "radiated_power_w",
    "ext_m2",
    "sca_m2",
    "abs_m2",
    "avg_ext_m2",
    "avg_sca_m2",
    "avg_abs_derived_m2",
    "trace_sca_m2",
    "q_ext",
    "q_sca",
    "q_abs",
    "q_avg_ext",
    "q_avg_sca",
    "q_avg_abs_derived",
    "q_trace_sca",
];

fn spectrum(cfg: &RunConfig) -> Result<Table, Error> {
    let omegas = linear_grid(cfg.window_rad_s.0, cfg.window_rad_s.1, cfg.points);
    let mut t = Table::new(SPECTRUM_COLUMNS);
    for &delta in &cfg.deltas_m {
        let sweep = spectrum_sweep(&SweepConfig {
            material: material(cfg).clone(),
            medium: cfg.medium,
            shape: *shape(cfg),
            delta,
            center: cfg.center_m,
            omegas: omegas.clone(),
            wave: cfg.wave,
            order: cfg.perturbation_order,
            convention: cfg.solver.convention,
        })?;
        for row in sweep.rows {
            let mut cells: Vec<Cell> = vec![delta.into(), row.omega.into()];
            match row.result {
                Ok(p) => {
                    cells.push("ok".into());
                    complex(&mut cells, p.eps_c);
                    complex(&mut cells, p.lambda);
                    for z in p.perturbed {
                        complex(&mut cells, z);
                    }
                    complex(&mut cells, p.trace_m_dyn);
                    cells.push(p.dipole.norm().into());
                    let cs = p.cross_sections;
                    cells.push(cs.radiated_power.into());
                    for c in [cs, cs.normalized(delta)] {
                        cells.extend(
                            [
                                c.extinction,
                                c.scattering,
                                c.absorption,
                                c.avg_extinction,
                                c.avg_scattering,
                                c.avg_absorption,
                                c.trace_scattering,
                            ]
                            .map(Cell::from),
                        );
                    }
                }
                Err(e) => {
                    cells.push(format!("error: {e}").into());
                    cells.resize(SPECTRUM_COLUMNS.len(), Cell::Empty);
                }
            }
            t.push(cells);
        }
    }
    Ok(t)
}

fn regime(cfg: &RunConfig) -> Result<Table, Error> {
    let mut t = Table::new(&["delta_m", "omega_rad_s", "dlambda_abs_s", "threshold_s", "ratio", "flagged"]);
    for &delta in &cfg.deltas_m {
        let report = regime_check(
            material(cfg),
            &cfg.medium,
            delta,
            cfg.window_rad_s,
            cfg.points,
            cfg.speed_of_light_m_s,
        )?;
        for r in report.rows {
            t.push(vec![
                delta.into(),
                r.omega.into(),
                r.dlambda_abs.into(),
                r.threshold.into(),
                r.ratio.into(),
                r.flagged.into(),
            ]);
        }
    }
    Ok(t)
}

use boostcav::modes::{Cavity1D, Cavity2D, Scheme, SpacetimeMode};
use boostcav::observables::{
    compare_routes, em_plate_energy_per_area, mass_shell_residual, static_m0, sweep, RouteComparison,
};
use boostcav::rect2d::{
    boosted_from_parts, finite_parts_2d, printed_report_from_parts, subtraction_from_grid, Route2D,
};
use boostcav::regsum::{FinitePart, RegConfig, RegMethod};
use boostcav::stress::StressConvention;
use boostcav::verify::{run_checks, VerifyOptions};
use boostcav::Error;
use serde_json::{json, Value};

use crate::args::{reg_base, BoostArgs, ModesArgs, Rect2dArgs, StaticArgs, SweepArgs, VerifyArgs};
use crate::output::{number, Table};

/// Relative disagreement allowed between the three static regulators.
pub const STATIC_AGREEMENT: f64 = 1e-5;

/// A finished command: its table, warnings for stderr and the exit status.
pub struct Report {
    pub table: Table,
    pub warnings: Vec<String>,
    pub failed: bool,
}

impl Report {
    fn ok(table: Table) -> Self {
        Self { table, warnings: Vec::new(), failed: false }
    }
}

fn part_json(fp: &FinitePart) -> Value {
    json!({ "value": number(fp.value), "error": number(fp.error_estimate), "method": fp.method.name() })
}

fn schedule_json(cfg: &RegConfig) -> Value {
    if cfg.method != RegMethod::ExponentialCutoff {
        return json!({ "method": cfg.method.name() });
    }
    json!({
        "method": cfg.method.name(),
        "epsilon_schedule": cfg.epsilon_schedule.iter().map(|e| number(*e)).collect::<Vec<_>>(),
        "divergent_powers": cfg.divergent_powers,
        "analytic_powers": cfg.analytic_powers,
        "truncation_threshold": number(cfg.truncation_threshold),
    })
}

pub fn cmd_static(args: &StaticArgs) -> Result<Report, Error> {
    if args.plates {
        let (energy, derivative) = em_plate_energy_per_area(args.a)?;
        let mut table = Table::new("static", &["a", "energy_per_area", "d_energy_per_area_da"]);
        table.meta("quantity", json!("electromagnetic parallel-plate energy per unit area"));
        table.push(vec![args.a.into(), energy.into(), derivative.into()]);
        return Ok(Report::ok(table));
    }
    let l = args.length;
    let mut cutoff_cfg = args.reg.apply(RegConfig::cutoff_1d());
    cutoff_cfg.method = RegMethod::ExponentialCutoff;
    let zeta = static_m0(l, &RegConfig::zeta())?;
    let cutoff = static_m0(l, &cutoff_cfg)?;
    let abel = static_m0(l, &RegConfig::abel_plana())?;
    let spread = [cutoff.value, abel.value].iter().map(|x| (x / zeta.value - 1.0).abs()).fold(0.0, f64::max);
    let mut table = Table::new(
        "static",
        &[
            "L",
            "m0_zeta",
            "m0_zeta_error",
            "m0_cutoff",
            "m0_cutoff_error",
            "m0_abel_plana",
            "m0_abel_plana_error",
            "max_relative_spread",
            "tolerance",
        ],
    );
    table.meta("cutoff_config", schedule_json(&cutoff_cfg));
    table.meta(
        "cutoff_divergent_coefficients",
        json!(cutoff.fitted_divergent_coeffs.iter().map(|c| number(*c)).collect::<Vec<_>>()),
    );
    table.push(vec![
        l.into(),
        zeta.value.into(),
        zeta.error_estimate.into(),
        cutoff.value.into(),
        cutoff.error_estimate.into(),
        abel.value.into(),
        abel.error_estimate.into(),
        spread.into(),
        STATIC_AGREEMENT.into(),
    ]);
    let failed = spread > STATIC_AGREEMENT;
    let mut report = Report::ok(table);
    report.failed = failed;
    if failed {
        report.warnings.push(format!("regulators disagree: relative spread {spread:e} exceeds {STATIC_AGREEMENT:e}"));
    }
    Ok(report)
}

fn comparison_json(c: &RouteComparison) -> Value {
    json!({
        "energy_difference_over_m0": number(c.energy_difference),
        "momentum_difference_over_m0": number(c.momentum_difference),
        "energy_tolerance": number(c.energy_tolerance),
        "momentum_tolerance": c.momentum_tolerance.map(number).unwrap_or(Value::Null),
        "agrees": c.agrees(),
        "note": c.note,
    })
}

pub fn cmd_boost(args: &BoostArgs) -> Result<Report, Error> {
    let cfg = args.reg.apply(reg_base(args.reg.method));
    let cavity = Cavity1D::new(args.length, args.v)?;
    let m0 = static_m0(args.length, &cfg)?;
    let comparison = compare_routes(args.scheme, &cavity, &cfg)?;
    let mut table = Table::new(
        "boost",
        &["scheme", "route", "L", "v", "E", "P", "error", "shell_residual", "m0", "m0_error", "order_v2_valid"],
    );
    table.meta("regularization", schedule_json(&cfg));
    table.meta("route_comparison", comparison_json(&comparison));
    let valid = !args.scheme.order_v2_only(args.v);
    for em in [comparison.closed_form, comparison.per_mode] {
        table.push(vec![
            args.scheme.name().into(),
            em.route.name().into(),
            args.length.into(),
            args.v.into(),
            em.energy.into(),
            em.momentum.into(),
            em.error.into(),
            mass_shell_residual(&em, m0.value).into(),
            m0.value.into(),
            m0.error_estimate.into(),
            valid.into(),
        ]);
    }
    let mut report = Report::ok(table);
    if !valid {
        report
            .warnings
            .push(format!("{} is an O(v^2) scheme; v = {} is outside its validity range", args.scheme, args.v));
    }
    if args.scheme != Scheme::GalileoLabPrior && !comparison.agrees() {
        report.failed = true;
        report.warnings.push(format!(
            "routes disagree: energy {:e}, momentum {:e} (relative to m0)",
            comparison.energy_difference, comparison.momentum_difference
        ));
    }
    Ok(report)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Report, Error> {
    let cfg = args.reg.apply(reg_base(args.reg.method));
    let result = sweep(args.scheme, args.length, &args.v.0, args.route, &cfg)?;
    let mut table =
        Table::new("sweep", &["v", "E", "P", "shell_residual", "E_point_particle", "P_point_particle", "route"]);
    table.meta("scheme", json!(args.scheme.name()));
    table.meta("L", number(args.length));
    table.meta("regularization", schedule_json(&cfg));
    table.meta("m0", part_json(&result.m0));
    let max_error = result.rows.iter().map(|r| r.error).fold(0.0, f64::max);
    table.meta("max_error", number(max_error));
    table.meta("warnings", json!(result.warnings));
    for row in &result.rows {
        table.push(vec![
            row.velocity.into(),
            row.energy.into(),
            row.momentum.into(),
            row.shell_residual.into(),
            row.point_energy.into(),
            row.point_momentum.into(),
            args.route.name().into(),
        ]);
    }
    Ok(Report { table, warnings: result.warnings, failed: false })
}

pub fn cmd_rect2d(args: &Rect2dArgs) -> Result<Report, Error> {
    let cfg = args.reg.apply(RegConfig::cutoff_2d());
    let cavity = Cavity2D::new(args.a, args.b, 0.0)?;
    let parts = finite_parts_2d(&cavity, &cfg)?;
    let routes: Vec<Route2D> = match args.route {
        Some(r) => vec![r],
        None => Route2D::ALL.to_vec(),
    };
    let mut velocities = args.v.0.clone();
    velocities.sort_by(f64::total_cmp);
    velocities.dedup();

    let mut table = Table::new(
        "rect2d",
        &[
            "a",
            "b",
            "v",
            "route",
            "E_m",
            "E_m_error",
            "E_s",
            "E_s_error",
            "P_s",
            "P_s_error",
            "E_s_over_E_m",
            "P_s_over_E_m",
            "shell_residual",
            "shell_residual_error",
        ],
    );
    table.meta("regularization", schedule_json(&cfg));
    table.meta(
        "finite_parts",
        json!({
            "U": part_json(&parts.u),
            "W": part_json(&parts.w),
            "S_omega": part_json(&parts.s_omega),
            "S_k": part_json(&parts.s_k),
        }),
    );
    let report_v = velocities.iter().copied().find(|v| *v != 0.0).unwrap_or(0.6);
    let printed = printed_report_from_parts(&Cavity2D::new(args.a, args.b, report_v)?, &parts)?;
    table.meta(
        "printed_route_report",
        json!({
            "v": number(report_v),
            "static_gap": number(printed.static_gap),
            "static_gap_error": number(printed.static_gap_error),
            "violates_static_limit": printed.violates_static_limit,
            "printed_E_s": number(printed.printed.energy),
            "printed_P_s": number(printed.printed.momentum),
            "quadrature_E_s": number(printed.quadrature.energy),
            "quadrature_P_s": number(printed.quadrature.momentum),
        }),
    );
    for &v in &velocities {
        for &route in &routes {
            let r = boosted_from_parts(args.a, args.b, v, route, &parts)?;
            table.push(vec![
                args.a.into(),
                args.b.into(),
                v.into(),
                route.name().into(),
                r.e_m.into(),
                r.e_m_error.into(),
                r.energy.into(),
                r.energy_error.into(),
                r.momentum.into(),
                r.momentum_error.into(),
                (r.energy / r.e_m).into(),
                (r.momentum / r.e_m).into(),
                r.shell_residual.into(),
                r.shell_residual_error.into(),
            ]);
        }
    }
    if args.solve_subtraction {
        let sol = subtraction_from_grid(&args.subtraction_grid.0, &parts)?;
        let branches: Vec<Value> = sol
            .branches
            .iter()
            .map(|b| {
                json!({
                    "name": b.name,
                    "shift_U": number(b.shift_u),
                    "shift_W": number(b.shift_w),
                    "max_residual": number(b.max_residual),
                    "relative_residual": number(b.relative_residual),
                    "solves": b.solves,
                })
            })
            .collect();
        table.meta(
            "subtraction",
            json!({
                "velocities": sol.velocities.iter().map(|v| number(*v)).collect::<Vec<_>>(),
                "solution_set": "(U0 + dU)(W0 + dW) = 0",
                "unshifted_relative_residual": number(sol.unshifted_relative_residual),
                "tolerance": number(boostcav::rect2d::SUBTRACTION_TOLERANCE),
                "branches": branches,
            }),
        );
    }
    Ok(Report::ok(table))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report, Error> {
    let convention = match args.inject_fault.as_deref() {
        Some("momentum-sign") => StressConvention::flipped_momentum(),
        _ => StressConvention::default(),
    };
    let results = run_checks(&VerifyOptions { only: args.only.clone(), convention });
    let mut table = Table::new("verify", &["check", "module", "status", "measured", "tolerance", "detail"]);
    let failures: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    table.meta("only", args.only.as_deref().map(Value::from).unwrap_or(Value::Null));
    table.meta("failures", json!(failures));
    for r in &results {
        table.push(vec![
            r.name.into(),
            r.module.into(),
            (if r.passed { "pass" } else { "fail" }).into(),
            r.measured.into(),
            r.tolerance.into(),
            r.detail.clone().into(),
        ]);
    }
    let mut report = Report::ok(table);
    if !failures.is_empty() {
        report.failed = true;
        report.warnings.push(format!("failures: {}", failures.join(",")));
    }
    Ok(report)
}

pub fn cmd_modes(args: &ModesArgs) -> Result<Report, Error> {
    let cavity = Cavity1D::new(args.length, args.v)?;
    let mut table = Table::new(
        "modes",
        &["n", "omega_prime", "omega_lab", "wave_number", "normalization", "t", "x", "re_u", "im_u"],
    );
    table.meta("scheme", json!(args.scheme.name()));
    table.meta("L", number(args.length));
    table.meta("v", number(args.v));
    let (lo, hi) = cavity.walls(args.scheme, args.t);
    table.meta("walls", json!([number(lo), number(hi)]));
    for n in 1..=args.n_max {
        let mode = SpacetimeMode::new(args.scheme, cavity, n)?;
        for j in 1..=args.points {
            let x = lo + (hi - lo) * j as f64 / (args.points + 1) as f64;
            let u = mode.value(args.t, x)?;
            table.push(vec![
                n.into(),
                mode.comoving_frequency().into(),
                mode.lab_frequency().into(),
                mode.wave_number().into(),
                mode.normalization().into(),
                args.t.into(),
                x.into(),
                u.re.into(),
                u.im.into(),
            ]);
        }
    }
    Ok(Report::ok(table))
}

/// Exit status for a library error: 2 for invalid input, 1 for numerical failure.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidLength(_)
        | Error::InvalidVelocity(_)
        | Error::InvalidModeIndex(_)
        | Error::InvalidArgument(_)
        | Error::InvalidConfig(_)
        | Error::Underdetermined { .. }
        | Error::UnsupportedMethod(_)
        | Error::OutsideCavity { .. } => 2,
        Error::QuadratureNotConverged { .. }
        | Error::NotProportional { .. }
        | Error::IllConditioned { .. }
        | Error::TruncationNotConvergent { .. }
        | Error::IntegrationTolerance(_)
        | Error::FitResidual { .. } => 1,
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are computed faithfully and fail for
//! reasons recorded in the README; they are reported as FAIL but do not
//! change the exit status. Any other failure, or a known failure that starts
//! passing, exits with status 1.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use boostcav::modes::{gram_matrix, gram_matrix_with, Cavity1D, Cavity2D, InnerProduct, Scheme};
use boostcav::observables::{boosted_em, closed_form_coefficients, mass_shell_residual, nonrel_fit, static_m0, Route};
use boostcav::rect2d::{
    boosted_from_parts, finite_parts_2d, printed_report_from_parts, subtraction_from_grid, Route2D,
};
use boostcav::regsum::{cutoff_finite_part, RegConfig};
use boostcav::stress::{coefficient_extract, per_mode_em, per_mode_em_2d, per_mode_law_2d};
use boostcav::Result;

const KNOWN_FAILURES: [u32; 2] = [8, 10];

const M0: f64 = -PI / 24.0;
const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1() -> Result<Outcome> {
    let zeta = static_m0(1.0, &RegConfig::zeta())?.value;
    let cutoff = static_m0(1.0, &RegConfig::cutoff_1d())?.value;
    let abel = static_m0(1.0, &RegConfig::abel_plana())?.value;
    let (ez, ec, ea) = (rel(zeta, M0), rel(cutoff, M0), (abel - M0).abs());
    outcome(
        ez == 0.0 && ec <= 1e-6 && ea <= 1e-10,
        format!("m0 = {zeta:.12}; zeta exact; cutoff rel {ec:.2e} (tol 1e-6); abel-plana abs {ea:.2e} (tol 1e-10)"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for v in GRID {
        let em = boosted_em(Scheme::LorentzExact, &Cavity1D::new(1.0, v)?, Route::PerModeNumeric, &RegConfig::zeta())?;
        let g2 = 1.0 / (1.0 - v * v);
        worst = worst.max(rel(em.energy, M0 * (1.0 + v * v) * g2)).max(rel(em.momentum, 2.0 * M0 * v * g2));
    }
    outcome(worst <= 1e-8, format!("max relative deviation {worst:.2e} (tol 1e-8) over v = 0.1..0.9"))
}

fn criterion_3() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for route in Route::ALL {
        for v in GRID {
            let em = boosted_em(Scheme::LorentzExact, &Cavity1D::new(1.0, v)?, route, &RegConfig::zeta())?;
            worst = worst.max(mass_shell_residual(&em, M0).abs() / (M0 * M0));
        }
    }
    outcome(worst <= 1e-10, format!("max |E^2-P^2-m0^2|/m0^2 = {worst:.2e} (tol 1e-10), both routes"))
}

fn criterion_4() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for v in [0.05, 0.1, 0.2] {
        let c = coefficient_extract(Scheme::GalileoComovingPrior, &Cavity1D::new(1.0, v)?, 8, &[0.0, 0.37])?;
        worst = worst.max((c.energy - (1.0 + 0.5 * v * v)).abs()).max((c.momentum - v).abs());
    }
    outcome(worst <= 1e-9, format!("max coefficient deviation {worst:.2e} (tol 1e-9) at v = 0.05, 0.1, 0.2"))
}

fn criterion_5() -> Result<Outcome> {
    let (el, _) = closed_form_coefficients(Scheme::GalileoLabPrior, 0.05);
    let (ec, _) = closed_form_coefficients(Scheme::GalileoComovingPrior, 0.05);
    let ratio = (el - 1.0) / (ec - 1.0);
    let gaps: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&v| {
            let (_, pl) = closed_form_coefficients(Scheme::GalileoLabPrior, v);
            let (_, pc) = closed_form_coefficients(Scheme::GalileoComovingPrior, v);
            (pl / pc - 1.0).abs()
        })
        .collect();
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[2] < 1e-5;
    outcome(
        (3.9..=4.1).contains(&ratio) && shrinking,
        format!("energy-excess ratio {ratio:.6} in [3.9, 4.1]; |P_lab/P_com - 1| = {:.1e}, {:.1e}, {:.1e} at v = 0.1, 0.01, 0.001", gaps[0], gaps[1], gaps[2]),
    )
}

fn criterion_6() -> Result<Outcome> {
    let fit = nonrel_fit(Scheme::LorentzExact, 1.0, 0.2, 6)?;
    let d = [(fit.energy[0] - 1.0).abs(), (fit.energy[2] - 2.0).abs(), (fit.momentum[1] - 2.0).abs()];
    let worst = d.iter().copied().fold(0.0, f64::max);
    outcome(
        worst <= 1e-3,
        format!(
            "E/m0 = {:.6} + {:.6} v^2, P/m0 = {:.6} v (degree 6, 21 samples); max deviation {worst:.2e} (tol 1e-3)",
            fit.energy[0], fit.energy[2], fit.momentum[1]
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for scheme in Scheme::ALL {
        let v = if scheme == Scheme::LorentzExact { 0.9 } else { 0.2 };
        let c = Cavity1D::new(1.0, v)?;
        for n in 1..=5 {
            let values: Vec<_> =
                [0.0, 0.37, 0.7, 5.0].iter().map(|&t| per_mode_em(scheme, &c, n, t)).collect::<Result<_>>()?;
            for em in &values {
                worst = worst
                    .max(rel(em.energy, values[0].energy))
                    .max((em.momentum - values[0].momentum).abs() / values[0].momentum.abs());
            }
        }
    }
    outcome(worst < 1e-9, format!("max relative variation {worst:.2e} (tol 1e-9), n <= 5, all schemes"))
}

fn criterion_8() -> Result<Outcome> {
    let mut l2 = Vec::new();
    let mut kg: f64 = 0.0;
    for scheme in Scheme::ALL {
        let v = if scheme == Scheme::LorentzExact { 0.9 } else { 0.2 };
        let c = Cavity1D::new(1.0, v)?;
        l2.push((scheme, gram_matrix(scheme, &c, 10, 0.0)?.identity_deviation()));
        kg = kg.max(gram_matrix_with(scheme, &c, 10, 0.0, InnerProduct::KleinGordon)?.identity_deviation());
    }
    let worst = l2.iter().map(|x| x.1).fold(0.0, f64::max);
    let parts: Vec<String> = l2.iter().map(|(s, d)| format!("{s} {d:.2e}")).collect();
    outcome(
        worst <= 1e-8,
        format!("L2 Gram deviation: {} (tol 1e-8); conserved-charge Gram deviation {kg:.2e}", parts.join(", ")),
    )
}

fn criterion_9() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for v in [0.0, 0.3, 0.6] {
        let c = Cavity2D::new(1.0, 1.0, v)?;
        for n in 1..=5 {
            for m in 1..=5 {
                let em = per_mode_em_2d(&c, n, m, 0.0)?;
                let (e, p) = per_mode_law_2d(&c, n, m)?;
                worst = worst.max((em.energy - e).abs()).max((em.momentum - p).abs());
            }
        }
    }
    let parts = finite_parts_2d(&Cavity2D::new(1.0, 1.0, 0.0)?, &RegConfig::cutoff_2d())?;
    let report = printed_report_from_parts(&Cavity2D::new(1.0, 1.0, 0.6)?, &parts)?;
    outcome(
        worst <= 1e-9 && report.violates_static_limit,
        format!(
            "per-mode law deviation {worst:.2e} (tol 1e-9); printed route static gap {:.6e} +/- {:.1e} (E_m = {:.6e})",
            report.static_gap, report.static_gap_error, report.printed.e_m
        ),
    )
}

fn criterion_10() -> Result<Outcome> {
    let mut shell = Vec::new();
    let mut ratios = (0.0, 0.0);
    for b in [5.0, 20.0, 50.0] {
        let parts = finite_parts_2d(&Cavity2D::new(1.0, b, 0.0)?, &RegConfig::cutoff_2d())?;
        let r = boosted_from_parts(1.0, b, 0.6, Route2D::QuadratureLaw, &parts)?;
        shell.push(r.shell_residual.abs() / (r.e_m * r.e_m));
        ratios = (r.energy / r.e_m, r.momentum / r.e_m);
    }
    let (re, rp) = ratios;
    let decreasing = shell.windows(2).all(|w| w[1] < w[0]);
    outcome(
        rel(re, 2.125) <= 0.02 && rel(rp, 1.875) <= 0.02 && decreasing,
        format!(
            "b/a = 50: E_s/E_m = {re:.6} (target 2.125 +/- 2%), P_s/E_m = {rp:.6} (target 1.875 +/- 2%); |shell|/E_m^2 at b/a = 5, 20, 50: {:.4}, {:.4}, {:.4}",
            shell[0], shell[1], shell[2]
        ),
    )
}

fn criterion_11() -> Result<Outcome> {
    let parts = finite_parts_2d(&Cavity2D::new(1.0, 1.0, 0.0)?, &RegConfig::cutoff_2d())?;
    let sol = subtraction_from_grid(&[0.2, 0.4, 0.6], &parts)?;
    let worst = sol.branches.iter().map(|b| b.relative_residual).fold(0.0, f64::max);
    let names: Vec<String> = sol.branches.iter().map(|b| format!("{} {:.1e}", b.name, b.relative_residual)).collect();
    outcome(
        worst <= 1e-10,
        format!("unshifted {:.3e}; after shift: {} (tol 1e-10)", sol.unshifted_relative_residual, names.join(", ")),
    )
}

fn criterion_12() -> Result<Outcome> {
    let cfg1 = RegConfig::cutoff_1d();
    let a = cutoff_finite_part(|n| (n as f64, n as f64), &cfg1)?;
    let b = cutoff_finite_part(|n| (n as f64, n as f64), &cfg1.halved())?;
    let mut worst = (a.value - b.value).abs() / a.error_estimate;

    let cfg2 = RegConfig::cutoff_2d();
    let square = Cavity2D::new(1.0, 1.0, 0.0)?;
    let p = finite_parts_2d(&square, &cfg2)?;
    let q = finite_parts_2d(&square, &cfg2.halved())?;
    for (x, y) in [(&p.u, &q.u), (&p.w, &q.w), (&p.s_omega, &q.s_omega), (&p.s_k, &q.s_k)] {
        worst = worst.max((x.value - y.value).abs() / x.error_estimate);
    }

    let finite = cutoff_finite_part(|n| (if n <= 10 { 1.0 } else { 0.0 }, n as f64), &cfg1)?;
    let geometric = cutoff_finite_part(|n| (0.5f64.powi(n as i32), n as f64), &cfg1)?;
    let pass = (finite.value - 10.0).abs().max((geometric.value - 1.0).abs());
    outcome(
        worst < 5.0 && pass <= 1e-10,
        format!("max |shift|/error under halving {worst:.3} (tol 5); pass-through error {pass:.1e} (tol 1e-10)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Result<Outcome>); 12] = [
        (1, "static Casimir energy", criterion_1),
        (2, "Lorentz energy and momentum law", criterion_2),
        (3, "mass-shell identity", criterion_3),
        (4, "Galileo comoving-prior coefficients", criterion_4),
        (5, "Galileo scheme mismatch", criterion_5),
        (6, "non-relativistic fit", criterion_6),
        (7, "time independence", criterion_7),
        (8, "orthonormality", criterion_8),
        (9, "2D per-mode law and printed-route report", criterion_9),
        (10, "2D quasi-1D limit", criterion_10),
        (11, "subtraction solver", criterion_11),
        (12, "regulator robustness", criterion_12),
    ];
    let start = Instant::now();
    let mut unexpected = 0;
    let mut failed = 0;
    for (id, title, run) in criteria {
        let t = Instant::now();
        let result = run().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        let known = KNOWN_FAILURES.contains(&id);
        let status = match (result.passed, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        if !result.passed {
            failed += 1;
        }
        if result.passed == known {
            unexpected += 1;
        }
        println!("{status:<17} criterion {id:>2}: {title}: {} [{:.1}s]", result.detail, t.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {} passed, {failed} failed ({} known), {unexpected} unexpected, {:.1}s",
        12 - failed,
        KNOWN_FAILURES.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

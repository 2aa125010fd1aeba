//! Command dispatch: run the configured pipeline, write artifacts, and map
//! failures onto the documented exit codes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bmeig::error::Error;
use bmeig::field::ScalarField;
use bmeig::geometry::{
    boundary_inclusion_check, is_convex, minkowski_interpolate, rasterize, DeformationParam, Grid,
};
use bmeig::io;
use bmeig::spectral::{assemble, smallest_eigenpair, EigenPair};
use bmeig::supconv::{ibp_check, lipschitz_estimate, semiconvexity_probe, sup_convolve};
use bmeig::tolerances::{CORE_MARGIN_CELLS, IBP_REL_SLACK, JUMP_RATIO_THRESHOLD, LIPSCHITZ_SLACK};
use bmeig::verify::{counterexample_scan, homogeneity_check, verify_bm, verify_logconcavity};

use crate::config::{Command, RunConfig};

/// Exit codes: 0 success, 2 config, 3 solver, 4 assertion failure, 5 io.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ASSERTION: i32 = 4;
pub const EXIT_IO: i32 = 5;

pub struct RunOutcome {
    pub exit_code: i32,
    pub summary: Vec<String>,
}

fn classify(e: &Error) -> i32 {
    match e.root() {
        Error::InvalidShape(_)
        | Error::InvalidParameter(_)
        | Error::DomainEmpty
        | Error::DomainDisconnected { .. }
        | Error::GridMismatch
        | Error::PotentialNotConvex
        | Error::DomainNotConvex
        | Error::PreconditionViolated(_) => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_SOLVER,
    }
}

/// Runs the configured command. Artifacts land in `output_dir`; the summary
/// has one PASS/FAIL line per hard assertion.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let started = Instant::now();
    let out_dir = PathBuf::from(&cfg.output_dir);
    if let Err(e) = fs::create_dir_all(&out_dir) {
        return RunOutcome {
            exit_code: EXIT_IO,
            summary: vec![format!("FAIL: cannot create output directory: {e}")],
        };
    }
    let mut summary = Vec::new();
    let code = match dispatch(cfg, &out_dir, &mut summary) {
        Ok(all_passed) => {
            if all_passed {
                EXIT_OK
            } else {
                EXIT_ASSERTION
            }
        }
        Err(e) => {
            summary.push(format!("FAIL: {e}"));
            classify(&e)
        }
    };
    if let Err(e) = write_manifest(cfg, &out_dir, started.elapsed().as_secs_f64()) {
        summary.push(format!("FAIL: manifest: {e}"));
        return RunOutcome { exit_code: EXIT_IO, summary };
    }
    if let Err(e) = fs::write(out_dir.join("summary.txt"), summary.join("\n") + "\n") {
        summary.push(format!("FAIL: summary: {e}"));
        return RunOutcome { exit_code: EXIT_IO, summary };
    }
    RunOutcome { exit_code: code, summary }
}

fn dispatch(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    match cfg.command {
        Command::Eig => run_eig(cfg, out, summary),
        Command::Minkowski => run_minkowski(cfg, out, summary),
        Command::Supconv => run_supconv(cfg, out, summary),
        Command::VerifyBm => run_verify_bm(cfg, out, summary),
        Command::VerifyLogconcave => run_logconcave(cfg, out, summary),
        Command::Counterexample => run_counterexample(cfg, out, summary),
    }
}

fn grid(cfg: &RunConfig) -> Result<Grid<f64>, Error> {
    Grid::covering(cfg.extent, cfg.h, cfg.margin_cells)
}

fn solve(cfg: &RunConfig, d: &bmeig::Domain64) -> Result<EigenPair<f64>, Error> {
    let op = assemble(d, &cfg.potential.to_spec())?;
    smallest_eigenpair(&op, cfg.solver_tol, cfg.max_iter)
}

fn run_eig(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    let spec = cfg.shape0.as_ref().unwrap().to_spec();
    let g = grid(cfg)?;
    let d = rasterize(&spec, &g)?;
    let e = solve(cfg, &d)?;
    let mut csv = String::from("domain_id,h,lambda,residual,iterations\n");
    writeln!(csv, "{},{},{},{},{}", spec, cfg.h, e.lambda, e.residual, e.iterations).unwrap();
    fs::write(out.join("eig.csv"), csv)?;
    io::write_field_bin(&out.join("u.f64"), &e.u)?;
    io::write_field_pgm(&out.join("u.pgm"), &e.u)?;
    io::write_mask_pgm(&out.join("mask.pgm"), &d)?;
    io::write_field_bin(&out.join("phi.f64"), &ScalarField { grid: g, data: d.phi.clone() })?;
    summary.push(format!(
        "PASS: eigensolver converged (lambda={}, residual={:.3e}, {} iterations)",
        e.lambda, e.residual, e.iterations
    ));
    Ok(true)
}

fn run_minkowski(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    let s0 = cfg.shape0.as_ref().unwrap().to_spec();
    let s1 = cfg.shape1.as_ref().unwrap().to_spec();
    let g = grid(cfg)?;
    let d0 = rasterize(&s0, &g)?;
    let d1 = rasterize(&s1, &g)?;
    let mut csv = String::from("t,inside_cells,area,boundary_inclusion_max\n");
    for (k, &tv) in cfg.t_values.iter().enumerate() {
        let t = DeformationParam::new(tv).map_err(|e| e.at_param(tv))?;
        let dt = minkowski_interpolate(&d0, &d1, t).map_err(|e| e.at_param(tv))?;
        let b = boundary_inclusion_check(&d0, &d1, t).map_err(|e| e.at_param(tv))?;
        writeln!(csv, "{},{},{},{}", tv, dt.cell_count(), dt.area(), b).unwrap();
        io::write_mask_pgm(&out.join(format!("mask_t{k}.pgm")), &dt)?;
        io::write_field_bin(
            &out.join(format!("phi_t{k}.f64")),
            &ScalarField { grid: g, data: dt.phi.clone() },
        )?;
    }
    fs::write(out.join("minkowski.csv"), csv)?;
    summary.push(format!(
        "PASS: interpolants built at {} deformation values (convex operands: {}, {})",
        cfg.t_values.len(),
        is_convex(&d0),
        is_convex(&d1)
    ));
    Ok(true)
}

fn run_supconv(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    let s0 = cfg.shape0.as_ref().unwrap().to_spec();
    let s1 = cfg.shape1.as_ref().unwrap().to_spec();
    let g = grid(cfg)?;
    let d0 = rasterize(&s0, &g)?;
    let d1 = rasterize(&s1, &g)?;
    let e0 = solve(cfg, &d0)?;
    let e1 = solve(cfg, &d1)?;
    let pair_id = format!("{s0}|{s1}");
    let lip_bound = e0.u.discrete_lipschitz().max(e1.u.discrete_lipschitz());
    let mut csv = String::from(
        "pair_id,t,h,lipschitz,lip_bound,lambda_probe,ibp_lhs,ibp_rhs,ibp_flux,flagged_cells\n",
    );
    let mut ok = true;
    for (k, &tv) in cfg.t_values.iter().enumerate() {
        let t = DeformationParam::new(tv).map_err(|e| e.at_param(tv))?;
        let dt = minkowski_interpolate(&d0, &d1, t).map_err(|e| e.at_param(tv))?;
        let f = sup_convolve(&d0, &e0, &d1, &e1, t, &dt).map_err(|e| e.at_param(tv))?;
        let lip = lipschitz_estimate(&f);
        let margin = CORE_MARGIN_CELLS * cfg.h;
        let probe = match semiconvexity_probe(&f, margin) {
            Ok(p) => p.lambda_probe,
            Err(Error::CoreEmpty) => f64::NAN,
            Err(e) => return Err(e.at_param(tv)),
        };
        let ibp = match ibp_check(&f, 4.0 * cfg.h) {
            Ok(r) => Some(r),
            Err(Error::CoreEmpty) => None,
            Err(e) => return Err(e.at_param(tv)),
        };
        let (lhs, rhs, flux) = ibp
            .map(|r| (r.lhs, r.rhs, r.flux_bound))
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            pair_id,
            tv,
            cfg.h,
            lip,
            lip_bound,
            probe,
            lhs,
            rhs,
            flux,
            f.flagged.len()
        )
        .unwrap();
        io::write_field_bin(&out.join(format!("ubar_t{k}.f64")), &f.ubar)?;
        io::write_field_pgm(&out.join(format!("ubar_t{k}.pgm")), &f.ubar)?;
        io::write_vec2_bin(&out.join(format!("argmax_t{k}.bin")), &g, &f.argmax)?;
        if lip > LIPSCHITZ_SLACK * lip_bound {
            ok = false;
            summary.push(format!(
                "FAIL: Lipschitz bound at t={tv}: {lip} > {LIPSCHITZ_SLACK} * {lip_bound}"
            ));
        }
        if let Some(r) = ibp {
            if r.lhs > r.rhs + r.flux_bound + IBP_REL_SLACK * r.lhs {
                ok = false;
                summary.push(format!(
                    "FAIL: integration-by-parts at t={tv}: lhs={} rhs={} flux={}",
                    r.lhs, r.rhs, r.flux_bound
                ));
            }
        }
        let core_flagged = f
            .flagged
            .iter()
            .filter(|&&(i, j)| dt.phi[g.idx(i as usize, j as usize)] <= -margin)
            .count();
        if core_flagged > 0 {
            ok = false;
            summary
                .push(format!("FAIL: {core_flagged} flagged cells inside the core at t={tv}"));
        }
    }
    fs::write(out.join("probes.csv"), csv)?;
    if ok {
        summary.push(format!(
            "PASS: Lipschitz, integration-by-parts and core coverage at {} deformation values",
            cfg.t_values.len()
        ));
    }
    Ok(ok)
}

fn run_verify_bm(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    let s0 = cfg.shape0.as_ref().unwrap().to_spec();
    let s1 = cfg.shape1.as_ref().unwrap().to_spec();
    let g = grid(cfg)?;
    let report = verify_bm(&s0, &s1, &cfg.potential.to_spec(), &cfg.t_values, &g, &cfg.verify_params())?;
    fs::write(out.join("report.csv"), report.to_csv())?;
    let mut ok = report.passed();
    for r in &report.rows {
        if r.flags != "ok" {
            summary.push(format!("FAIL: chain at t={}: {}", r.t, r.flags));
        }
    }
    if ok {
        summary.push(format!(
            "PASS: chain lambda_t <= R(ubar) <= chord + C*h on {} rows",
            report.rows.len()
        ));
    }
    if report.potential_is_zero {
        let hc = homogeneity_check(&report)?;
        if hc.passed {
            summary.push(format!(
                "PASS: inverse-sqrt concavity (worst margin {:.3e})",
                hc.worst_margin
            ));
        } else {
            ok = false;
            summary.push(format!(
                "FAIL: inverse-sqrt concavity (worst margin {:.3e})",
                hc.worst_margin
            ));
        }
    }
    Ok(ok)
}

fn run_logconcave(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    let spec = cfg.shape0.as_ref().unwrap().to_spec();
    let g = grid(cfg)?;
    let report = verify_logconcavity(
        &spec,
        &cfg.potential.to_spec(),
        &g,
        cfg.pair_budget,
        &cfg.verify_params(),
    )?;
    fs::write(out.join("logconcavity.csv"), report.to_csv())?;
    let ok = report.passed();
    summary.push(format!(
        "{}: midpoint log-concavity (worst deficit {:.3e} vs tolerance {:.3e} on {} pairs)",
        if ok { "PASS" } else { "FAIL" },
        report.worst_deficit,
        report.tol,
        report.pair_count
    ));
    Ok(ok)
}

fn run_counterexample(cfg: &RunConfig, out: &Path, summary: &mut Vec<String>) -> Result<bool, Error> {
    let g = grid(cfg)?;
    let (report, jump) = counterexample_scan(
        cfg.counterexample_epsilon,
        cfg.counterexample_rho,
        &cfg.t_values,
        &g,
        &cfg.verify_params(),
    )?;
    fs::write(out.join("report.csv"), report.to_csv())?;
    fs::write(out.join("jump.csv"), jump.to_csv())?;
    let ok = report.passed();
    for r in &report.rows {
        if r.flags != "ok" {
            summary.push(format!("FAIL: chain at t={}: {}", r.t, r.flags));
        }
    }
    if ok {
        summary.push(format!(
            "PASS: chord inequality holds at all {} scanned deformations",
            report.rows.len()
        ));
    }
    summary.push(format!(
        "INFO: max adjacent jump ratio {:.2} at t={:.4} (threshold {}), lambda(1)={}",
        jump.max_jump_ratio, jump.jump_location, JUMP_RATIO_THRESHOLD, jump.lambda1
    ));
    Ok(ok)
}

fn write_manifest(cfg: &RunConfig, out: &Path, wall_time_s: f64) -> std::io::Result<()> {
    let mut doc = toml::value::Table::new();
    doc.insert("version".into(), toml::Value::String(env!("CARGO_PKG_VERSION").into()));
    doc.insert("wall_time_s".into(), toml::Value::Float(wall_time_s));
    let echo = toml::Value::try_from(cfg).expect("config serializes");
    doc.insert("config".into(), echo);
    fs::write(out.join("manifest.toml"), toml::to_string_pretty(&doc).expect("toml"))
}

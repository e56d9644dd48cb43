//! Command dispatch: each command turns a loaded problem into a report.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};
use wdvv_core::algebra::{int, parse_rational, Poly, Rational};
use wdvv_core::exprlang::parse_polynomial;
use wdvv_core::frobenius::{find_unit, verify_frobenius_conditions, Potential};
use wdvv_core::hamop::{
    affinors_from_psi, check_relations, flows_commute_residual, pencil_check, structural_flows, FlatHamOp, HydroFlow,
};
use wdvv_core::hierarchy::{
    build_hierarchy, check_locality, check_potential_involution, functional_involution_residual,
    involution_residual_constant_bracket, involution_wdvv_integrals, level_identities_hold,
};
use wdvv_core::hydrosim::{cfl_advice, conservation_report, functional_value, simulate_flow, FieldState, Grid1D, SimConfig, SimError};
use wdvv_core::realization::{
    default_initial_frame, loop_closure_test, square_loop, verify_fundamental_forms, EmbeddingProblem, GridSpec,
    RealizationError,
};
use wdvv_core::submanifold::{
    codazzi_check, gauss_residual, reduce_potential, ricci_residual, zero_curvature_residual, LaxParams, PsiSystem,
};

use crate::problem::{EmbeddingInput, FlowSource, InputError, Problem};
use crate::report::{self, Check, Report};
use crate::{Command, Common, Outcome, RealizeArgs, Reduction, VerifyCommand};

fn kind_error(command: &str, p: &Problem) -> InputError {
    InputError::Kind {
        command: command.to_string(),
        kind: p.kind(),
    }
}

fn parse_c(r: &Reduction, fallback: Option<&Rational>) -> Result<Rational, InputError> {
    match &r.c {
        Some(text) => parse_rational(text)
            .filter(|c| *c != int(0))
            .ok_or_else(|| InputError::Invalid(format!("--c: expected a nonzero rational, got `{text}`"))),
        None => Ok(fallback.cloned().unwrap_or_else(|| int(1))),
    }
}

fn potential_of<'a>(command: &str, p: &'a Problem) -> Result<&'a Potential, InputError> {
    match p {
        Problem::Potential(pot) => Ok(pot),
        Problem::Embedding(e) => Ok(&e.potential),
        _ => Err(kind_error(command, p)),
    }
}

/// ψ-system of the problem, reducing potentials with the requested `c`.
fn psi_system_of(command: &str, p: &Problem, r: &Reduction) -> Result<PsiSystem, InputError> {
    match p {
        Problem::PsiSystem(s) => {
            if r.c.is_some() {
                return Err(InputError::Invalid("--c only applies to potentials".into()));
            }
            Ok(s.clone())
        }
        Problem::Potential(_) | Problem::Embedding(_) => {
            let fallback = match p {
                Problem::Embedding(e) => e.c.as_ref(),
                _ => None,
            };
            let c = parse_c(r, fallback)?;
            reduce_potential(potential_of(command, p)?, &c).map_err(|e| InputError::Invalid(e.to_string()))
        }
        _ => Err(kind_error(command, p)),
    }
}

fn hamop_of(command: &str, p: &Problem, r: &Reduction) -> Result<FlatHamOp, InputError> {
    match p {
        Problem::HamOp(h) => Ok(h.clone()),
        _ => Ok(affinors_from_psi(&psi_system_of(command, p, r)?)),
    }
}

pub fn run(command: &Command, p: &Problem) -> Result<Outcome, InputError> {
    let report = match command {
        Command::Verify { check } => verify(check, p)?,
        Command::Reduce { reduction, .. } => return reduce(p, reduction).map(Outcome::Document),
        Command::Hierarchy { common, reduction, depth } => hierarchy(common, p, reduction, *depth)?,
        Command::Realize {
            reduction,
            numeric,
            origin,
            spacing,
            count,
            delta,
            csv,
            ..
        } => {
            let grid = GridArgs {
                origin: origin.clone(),
                spacing: *spacing,
                count: *count,
                delta: *delta,
            };
            realize(p, reduction, numeric, &grid, csv.as_deref())?
        }
        Command::LoopTest {
            reduction,
            numeric,
            corner,
            plane,
            side,
            ..
        } => loop_test(p, reduction, numeric, corner.as_deref(), plane.as_deref(), *side)?,
        Command::Simulate {
            flow,
            t_end,
            dt,
            m,
            amplitude,
            tol,
            record_every,
            csv,
            ..
        } => {
            let args = SimArgs {
                flow: *flow,
                t_end: *t_end,
                dt: *dt,
                m: *m,
                amplitude: *amplitude,
                tol: *tol,
                record_every: *record_every,
            };
            simulate(p, &args, csv.as_deref())?
        }
    };
    Ok(Outcome::Report(report))
}

fn verify(check: &VerifyCommand, p: &Problem) -> Result<Report, InputError> {
    let kind = p.kind();
    Ok(match check {
        VerifyCommand::Wdvv(c) => {
            let pot = potential_of("verify wdvv", p)?;
            let mut r = Report::new("verify wdvv", kind);
            r.push(Check::residual("wdvv", &wdvv_core::frobenius::wdvv_residual(pot), c.max_terms));
            r
        }
        VerifyCommand::Frobenius(c) => {
            let pot = potential_of("verify frobenius", p)?;
            let f = verify_frobenius_conditions(pot);
            let mut r = Report::new("verify frobenius", kind);
            r.push(Check::new("invariance", f.invariance));
            r.push(Check::new("commutativity", f.commutativity));
            r.push(Check::new("potentiality", f.potentiality));
            r.push(Check::residual("associativity", &f.wdvv, c.max_terms));
            let unit = find_unit(pot).map(|e| Value::Array(e.iter().map(report::rational).collect()));
            r.data("unit", unit.unwrap_or(Value::Null));
            r
        }
        VerifyCommand::Submanifold { common, reduction } => {
            let s = psi_system_of("verify submanifold", p, reduction)?;
            let mut r = Report::new("verify submanifold", kind);
            r.push(Check::residual("gauss", &gauss_residual(&s), common.max_terms));
            r.push(Check::residual("ricci", &ricci_residual(&s), common.max_terms));
            r.push(Check::new("codazzi", codazzi_check(&s)));
            r
        }
        VerifyCommand::Lax { common, reduction } => {
            let s = psi_system_of("verify lax", p, reduction)?;
            let res = zero_curvature_residual(&s, &LaxParams::symbolic());
            let entries = res.iter().flat_map(|((i, j), m)| {
                let cols = m.cols();
                m.entries()
                    .iter()
                    .enumerate()
                    .map(move |(k, q)| (vec![*i, *j, k / cols, k % cols], q))
            });
            let summary = report::summarize(entries, common.max_terms);
            let zero = res.iter().all(|(_, m)| m.is_zero());
            let mut r = Report::new("verify lax", kind);
            r.push(Check::new("zero-curvature", zero).with("residual", summary));
            r.data("variables", json!({ "lambda": format!("u{}", s.n() + 1), "rho": format!("u{}", s.n() + 2) }));
            r
        }
        VerifyCommand::Hamop { common, reduction } => {
            let h = hamop_of("verify hamop", p, reduction)?;
            let mut r = Report::new("verify hamop", kind);
            for rel in check_relations(&h.to_general()) {
                let mut c = Check::residual(rel.name, &rel.residual, common.max_terms);
                if rel.name.ends_with("-curvature") {
                    c = c.optional();
                }
                r.push(c);
            }
            r
        }
        VerifyCommand::Pencil { common, reduction } => {
            let h = hamop_of("verify pencil", p, reduction)?;
            let mut r = Report::new("verify pencil", kind);
            for rel in pencil_check(&h).relations {
                r.push(Check::residual(rel.name, &rel.residual, common.max_terms));
            }
            r
        }
        VerifyCommand::Locality { common, reduction, h } => {
            let s = psi_system_of("verify locality", p, reduction)?;
            let density = parse_polynomial(h, s.n()).map_err(|e| InputError::Parse {
                pointer: "--h".into(),
                column: e.position + 1,
                message: e.message,
            })?;
            let loc = check_locality(&s, &density);
            let mut r = Report::new("verify locality", kind);
            r.push(Check::residual("locality", &loc.residual, common.max_terms));
            if let Some(ps) = &loc.p_densities {
                r.data("p_densities", report::polys(ps));
            }
            if let Some(f) = &loc.f_density {
                r.data("f_density", report::poly(f));
            }
            r
        }
        VerifyCommand::Involution { common, reduction } => {
            let mut r = Report::new("verify involution", kind);
            match p {
                Problem::Potential(_) | Problem::Embedding(_) if reduction.c.is_none() => {
                    let pot = potential_of("verify involution", p)?;
                    r.push(Check::residual("wdvv-integrals", &involution_wdvv_integrals(pot), common.max_terms));
                    // Only expected when the potential-involution equations hold.
                    r.push(
                        Check::residual("functional-involution", &functional_involution_residual(pot), common.max_terms)
                            .optional(),
                    );
                }
                _ => {
                    let s = psi_system_of("verify involution", p, reduction)?;
                    r.push(Check::residual(
                        "constant-bracket",
                        &involution_residual_constant_bracket(&s),
                        common.max_terms,
                    ));
                }
            }
            r
        }
        VerifyCommand::PotentialInvolution(c) => {
            let pot = potential_of("verify potential-involution", p)?;
            let mut r = Report::new("verify potential-involution", kind);
            r.push(Check::residual("potential-involution", &check_potential_involution(pot), c.max_terms));
            r
        }
    })
}

fn reduce(p: &Problem, reduction: &Reduction) -> Result<String, InputError> {
    let pot = potential_of("reduce", p)?;
    let s = psi_system_of("reduce", p, reduction)?;
    let mut m = Map::new();
    m.insert("kind".into(), json!("psi_system"));
    m.insert("n".into(), json!(pot.n()));
    m.insert("eta".into(), report::rational_matrix(s.eta().entries()));
    m.insert("mu".into(), report::rational_matrix(s.mu().entries()));
    m.insert("psi".into(), report::polys(s.psi()));
    let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("serializes");
    text.push('\n');
    Ok(text)
}

fn hierarchy(common: &Common, p: &Problem, reduction: &Reduction, depth: usize) -> Result<Report, InputError> {
    if depth == 0 {
        return Err(InputError::Invalid("--depth must be at least 1".into()));
    }
    let s = psi_system_of("hierarchy", p, reduction)?;
    let mut r = Report::new("hierarchy", p.kind());
    let levels = match build_hierarchy(&s, depth) {
        Ok(levels) => levels,
        Err(e) => {
            r.push(Check::new("hierarchy", false).with("error", json!(e.to_string())));
            return Ok(r);
        }
    };
    let mut data = Vec::new();
    for level in &levels {
        let (gradient, hessian) = level_identities_hold(&s, level);
        r.push(Check::new(format!("level-{}-gradient", level.s), gradient));
        r.push(Check::new(format!("level-{}-hessian", level.s), hessian));
        let flow: Vec<Value> = level.flow.a.to_rows().iter().map(|row| report::polys(row)).collect();
        data.push(json!({
            "s": level.s,
            "h": report::poly(&level.h),
            "f_lift": report::polys(&level.f_lift),
            "h_next": report::poly(&level.h_next),
            "flow": flow,
        }));
    }
    for pair in levels.windows(2) {
        let res = flows_commute_residual(&pair[0].flow, &pair[1].flow).expect("same dimension");
        r.push(Check::residual(format!("flows-{}-{}-commute", pair[0].s, pair[1].s), &res, common.max_terms));
    }
    r.data("levels", Value::Array(data));
    Ok(r)
}

struct GridArgs {
    origin: Option<Vec<f64>>,
    spacing: Option<f64>,
    count: Option<usize>,
    delta: Option<f64>,
}

fn embedding_of<'a>(command: &str, p: &'a Problem, reduction: &Reduction, numeric: &RealizeArgs) -> Result<(EmbeddingProblem, Option<&'a EmbeddingInput>), InputError> {
    let input = match p {
        Problem::Embedding(e) => Some(e.as_ref()),
        Problem::Potential(_) => None,
        _ => return Err(kind_error(command, p)),
    };
    let pot = potential_of(command, p)?;
    let c = parse_c(reduction, input.and_then(|e| e.c.as_ref()))?;
    let base = numeric
        .base
        .clone()
        .or_else(|| input.and_then(|e| e.base.clone()))
        .unwrap_or_else(|| vec![0.0; pot.n()]);
    let e = default_initial_frame(pot, &c, &base).map_err(input_realization_error)?;
    Ok((e, input))
}

fn input_realization_error(e: RealizationError) -> InputError {
    InputError::Invalid(e.to_string())
}

fn realize(p: &Problem, reduction: &Reduction, numeric: &RealizeArgs, g: &GridArgs, csv: Option<&Path>) -> Result<Report, InputError> {
    let (e, input) = embedding_of("realize", p, reduction, numeric)?;
    let n = e.n();
    let file_grid = input.and_then(|i| i.grid.clone());
    let grid = GridSpec {
        origin: g
            .origin
            .clone()
            .or_else(|| file_grid.as_ref().map(|x| x.origin.clone()))
            .unwrap_or_else(|| e.base().u.clone()),
        spacing: g.spacing.or(file_grid.as_ref().map(|x| x.spacing)).unwrap_or(0.05),
        count: g.count.or(file_grid.as_ref().map(|x| x.count)).unwrap_or(5),
    };
    if grid.count == 0 || !(grid.spacing.is_finite()) {
        return Err(InputError::Invalid("grid needs at least one node and a finite spacing".into()));
    }
    let step = numeric.step.or(input.and_then(|i| i.step)).unwrap_or(0.01);
    let delta = g.delta.or(input.and_then(|i| i.delta)).unwrap_or(1e-4);
    let tol = numeric.tol.or(input.and_then(|i| i.tolerance)).unwrap_or(1e-6);
    if !(step > 0.0 && delta > 0.0) {
        return Err(InputError::Invalid("step and delta must be positive".into()));
    }
    let mut r = Report::new("realize", p.kind());
    r.data("ambient_signature", json!([e.ambient_signature().positive, e.ambient_signature().negative]));
    r.data("c", report::rational(e.c()));
    let sample = match e.sample_grid(&grid, step) {
        Ok(s) => s,
        Err(RealizationError::NonFinite { segment }) => {
            r.push(Check::new("finite", false).with("segment", json!(segment)));
            return Ok(r);
        }
        Err(err) => return Err(input_realization_error(err)),
    };
    let forms = verify_fundamental_forms(&e, &sample, tol, delta);
    for (q, name) in ["gram-tangent", "gram-mixed", "gram-normal", "second-form"].iter().enumerate() {
        r.push(Check::bounded(*name, forms.worst[q], tol));
    }
    r.data("nodes", json!(sample.frames.len()));
    r.data("violations", json!(forms.violations.len()));
    if let Some(path) = csv {
        let mut text = String::new();
        let mut header: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
        header.extend((1..=2 * n).map(|a| format!("r{a}")));
        header.extend((1..=2 * n).map(|a| format!("n{a}")));
        for prefix in ["R", "Nn"] {
            for i in 1..=n {
                header.extend((1..=2 * n).map(|a| format!("{prefix}{i}_{a}")));
            }
        }
        text.push_str(&header.join(","));
        text.push('\n');
        for f in &sample.frames {
            let mut row: Vec<f64> = f.u.clone();
            row.extend_from_slice(f.r());
            row.extend_from_slice(f.n());
            for i in 0..n {
                row.extend_from_slice(f.r_col(i));
            }
            for i in 0..n {
                row.extend_from_slice(f.n_col(i));
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(text, "{}", cells.join(","));
        }
        write_file(path, &text)?;
    }
    Ok(r)
}

fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn loop_test(p: &Problem, reduction: &Reduction, numeric: &RealizeArgs, corner: Option<&[f64]>, plane: Option<&[usize]>, side: Option<f64>) -> Result<Report, InputError> {
    let (e, input) = embedding_of("loop-test", p, reduction, numeric)?;
    let n = e.n();
    let file_loop = input.and_then(|i| i.lp.clone());
    let corner = corner
        .map(<[f64]>::to_vec)
        .or_else(|| file_loop.as_ref().map(|l| l.corner.clone()))
        .unwrap_or_else(|| e.base().u.clone());
    if corner.len() != n {
        return Err(InputError::Invalid(format!("--corner needs {n} coordinates")));
    }
    let plane = match plane {
        Some(&[a, b]) if a >= 1 && b >= 1 && a <= n && b <= n && a != b => (a - 1, b - 1),
        Some(_) => return Err(InputError::Invalid(format!("--plane needs two distinct indices in 1..={n}"))),
        None => file_loop
            .as_ref()
            .map(|l| l.plane)
            .unwrap_or((n.saturating_sub(2), n - 1)),
    };
    if plane.0 == plane.1 {
        return Err(InputError::Invalid("loop plane needs two distinct coordinates".into()));
    }
    let side = side.or(file_loop.as_ref().map(|l| l.side)).unwrap_or(0.1);
    let step = numeric.step.or(input.and_then(|i| i.step)).unwrap_or(1e-3);
    let tol = numeric.tol.unwrap_or(1e-7);
    if !(step > 0.0 && side.is_finite()) {
        return Err(InputError::Invalid("step must be positive and side finite".into()));
    }
    let lp = square_loop(&corner, plane.0, plane.1, side);
    let mut r = Report::new("loop-test", p.kind());
    r.data("plane", json!([plane.0 + 1, plane.1 + 1]));
    r.data("side", report::number(side));
    match loop_closure_test(&e, &lp, step) {
        Ok(dev) => r.push(Check::bounded("loop-closure", dev, tol)),
        Err(RealizationError::NonFinite { segment }) => {
            r.push(Check::new("finite", false).with("segment", json!(segment)));
        }
        Err(err) => return Err(input_realization_error(err)),
    }
    Ok(r)
}

struct SimArgs {
    flow: usize,
    t_end: Option<f64>,
    dt: Option<f64>,
    m: Option<usize>,
    amplitude: Option<f64>,
    tol: f64,
    record_every: usize,
}

fn simulate(p: &Problem, a: &SimArgs, csv: Option<&Path>) -> Result<Report, InputError> {
    let Problem::Simulation(input) = p else {
        return Err(kind_error("simulate", p));
    };
    let n = input.n;
    let (flow, default_densities): (HydroFlow, Vec<Poly>) = match &input.source {
        FlowSource::System(s) => {
            let flows = structural_flows(&affinors_from_psi(s));
            if a.flow == 0 || a.flow > flows.len() {
                return Err(InputError::Invalid(format!("--flow must be in 1..={}", flows.len())));
            }
            let densities = build_hierarchy(s, 2)
                .map(|l| l.iter().map(|x| x.h.clone()).collect())
                .unwrap_or_default();
            (flows[a.flow - 1].clone(), densities)
        }
        FlowSource::Matrix(m) => {
            if a.flow != 1 {
                return Err(InputError::Invalid("--flow must be 1 for an explicit flow matrix".into()));
            }
            let flow = HydroFlow::new(m.clone()).map_err(|e| InputError::Invalid(e.to_string()))?;
            (flow, Vec::new())
        }
    };
    let densities = if input.densities.is_empty() {
        default_densities
    } else {
        input.densities.clone()
    };
    let m = a.m.or(input.m).unwrap_or(256);
    let length = input.length.unwrap_or(2.0 * std::f64::consts::PI);
    let grid = Grid1D::new(m, length).map_err(|e| InputError::Invalid(e.to_string()))?;
    let amplitude = a.amplitude.or(input.amplitude).unwrap_or(0.01);
    let phases = input.phases.clone().unwrap_or_else(|| (0..n).map(|i| i as f64).collect());
    let background = input.background.clone().unwrap_or_else(|| vec![0.0; n]);
    let init = FieldState::sine(&grid, amplitude, &phases, &background);
    let advice = cfl_advice(&flow, &init, &grid);
    let dt = a.dt.or(input.dt).unwrap_or_else(|| advice.min(1e-3));
    let t_end = a.t_end.or(input.t_end).unwrap_or(0.1);
    let mut cfg = SimConfig::new(dt, t_end);
    cfg.record_every = a.record_every.max(1);
    let mut r = Report::new("simulate", p.kind());
    r.data("m", json!(m));
    r.data("dt", report::number(dt));
    r.data("t_end", report::number(t_end));
    r.data("cfl_dt", report::number(advice));
    let traj = match simulate_flow(&flow, &init, &grid, &cfg) {
        Ok(t) => t,
        Err(SimError::BlowUp { time }) => {
            r.push(Check::new("bounded", false).with("time", report::number(time)));
            return Ok(r);
        }
        Err(e) => return Err(InputError::Invalid(e.to_string())),
    };
    r.push(Check::new("bounded", true));
    let drift = conservation_report(&traj, &densities, &grid);
    for (k, d) in drift.iter().enumerate() {
        r.push(Check::bounded(format!("drift-H{}", k + 1), *d, a.tol));
    }
    let initial: Vec<Value> = densities
        .iter()
        .map(|d| report::number(functional_value(d, &init, &grid)))
        .collect();
    r.data("initial_values", Value::Array(initial));
    r.data("densities", report::polys(&densities));
    if let Some(path) = csv {
        let mut text = String::from("time,node");
        for i in 1..=n {
            let _ = write!(text, ",u{i}");
        }
        text.push('\n');
        for state in &traj {
            for (node, u) in state.values.iter().enumerate() {
                let _ = write!(text, "{},{}", state.time, node);
                for v in u {
                    let _ = write!(text, ",{v}");
                }
                text.push('\n');
            }
        }
        write_file(path, &text)?;
    }
    Ok(r)
}

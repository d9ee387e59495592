//! One function per subcommand. Every handler writes a result document even
//! on non-convergence, then reports the exit code.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use robreg::chance::{bound_grid, markov_bound, radius_for_confidence, MomentInfo};
use robreg::coupled::solve_polytope_uncertainty;
use robreg::distribution::{
    consistency_experiment, default_bandwidth, KdeEstimate, UniformLinearGenerator,
};
use robreg::robust::{
    adversarial_perturbation, perturbed_residual, sampled_worst_case, worst_case_residual,
};
use robreg::solvers::{
    regularization_path, solve_dual_norm_reg, solve_weighted_l1, RegressionSolution, SolverOptions,
};
use robreg::sparsity::{incoherence_certificate, verify_zero_support, ZeroSupportStatus};
use robreg::stability::{stability_gap, LabeledSet};
use robreg::{NormKind, NormTag, UncertaintyModel};

use crate::args::*;
use crate::io::{
    emit_json, fmt_f64, parse_matrix, parse_radii, parse_vector, read_instance, read_weights,
    render_csv, write_output, Document,
};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn loss_tag(loss: LossArg) -> NormTag<f64> {
    match loss {
        LossArg::L1 => NormTag::l1(),
        LossArg::L2 => NormTag::l2(),
        LossArg::Linf => NormTag::linf(),
    }
}

fn solver_options(args: &SolverArgs) -> Result<SolverOptions<f64>, CliError> {
    if args.max_iters == 0 || args.tol <= 0.0 {
        return Err(CliError::input("--max-iters must be >= 1 and --tol > 0"));
    }
    Ok(SolverOptions {
        max_iters: args.max_iters,
        rel_tol: args.tol,
        seed: args.seed,
        ..SolverOptions::default()
    })
}

#[derive(Serialize)]
struct FitResult {
    model: String,
    x: Vec<f64>,
    objective: f64,
    iterations: usize,
    converged: bool,
    certificate_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    polytope_multipliers: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct PolytopeSpec {
    t: Vec<Vec<f64>>,
    s: Vec<f64>,
}

pub fn fit(args: FitArgs) -> Result<u8, CliError> {
    let p = read_instance(&args.data)?;
    let loss = loss_tag(args.loss);
    let opts = solver_options(&args.solver)?;
    let chosen = [&args.uncoupled_c, &args.norm_coupled, &args.polytope]
        .iter()
        .filter(|o| o.is_some())
        .count();
    if chosen != 1 {
        return Err(CliError::input(
            "pick exactly one of --uncoupled-c, --norm-coupled, --polytope",
        ));
    }

    let (model, sol, lambda): (String, RegressionSolution<f64>, Option<Vec<f64>>) =
        if let Some(spec) = &args.uncoupled_c {
            let radii = parse_radii(spec, p.m())?;
            let sol = solve_weighted_l1(&p, &radii, &loss, &opts)?;
            (format!("uncoupled({spec})"), sol, None)
        } else if let Some(spec) = &args.norm_coupled {
            let (agg, l) = spec.split_once(',').ok_or_else(|| {
                CliError::input("--norm-coupled expects `aggregator,radius`, e.g. linf,0.5")
            })?;
            let aggregator = match agg.trim() {
                "l1" => NormTag::l1(),
                "l2" => NormTag::l2(),
                "linf" => NormTag::linf(),
                other => return Err(CliError::input(format!("unknown aggregator `{other}`"))),
            };
            let l: f64 = l
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("bad coupling radius in `{spec}`")))?;
            let sol = solve_dual_norm_reg(&p, &loss, &aggregator, l, &opts)?;
            (format!("norm-coupled({spec})"), sol, None)
        } else {
            let path = args.polytope.as_ref().unwrap();
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read {path}: {e}")))?;
            let spec: PolytopeSpec =
                serde_json::from_str(&text).map_err(|e| CliError::input(format!("{path}: {e}")))?;
            let k = spec.t.len();
            let m = spec.t.first().map_or(0, Vec::len);
            if spec.t.iter().any(|r| r.len() != m) {
                return Err(CliError::input(format!("{path}: ragged matrix t")));
            }
            let t = ndarray::Array2::from_shape_vec((k, m), spec.t.into_iter().flatten().collect())
                .map_err(|e| CliError::input(format!("{path}: {e}")))?;
            let s = Array1::from(spec.s);
            // validates nonemptiness of the budget polytope
            let model = UncertaintyModel::polytope(t, s)?;
            let UncertaintyModel::Polytope { t, s } = model else {
                unreachable!()
            };
            let (sol, lam) = solve_polytope_uncertainty(&p, &t, &s, &loss, &opts)?;
            (format!("polytope({path})"), sol, Some(lam.to_vec()))
        };

    let converged = sol.converged;
    let doc = Document {
        version: VERSION,
        command: "fit",
        config: &args,
        result: FitResult {
            model,
            x: sol.x.clone(),
            objective: sol.objective,
            iterations: sol.iterations,
            converged,
            certificate_gap: sol.certificate_gap,
            polytope_multipliers: lambda,
        },
    };
    emit_json(&doc, args.out.as_deref())?;
    Ok(if converged { 0 } else { 2 })
}

pub fn path(args: PathArgs) -> Result<u8, CliError> {
    let p = read_instance(&args.data)?;
    let loss = loss_tag(args.loss);
    let opts = solver_options(&args.solver)?;
    let grid = parse_vector(&args.c_grid, "--c-grid")?;
    let c_vectors: Vec<Array1<f64>> = grid.iter().map(|&c| Array1::from_elem(p.m(), c)).collect();
    let sols = regularization_path(&p, &c_vectors, &loss, &opts)?;

    let mut header = vec![
        "c".to_string(),
        "objective".into(),
        "converged".into(),
        "certificate_gap".into(),
        "iterations".into(),
    ];
    for j in 0..p.m() {
        header.push(format!("x{}", j + 1));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    let mut all_converged = true;
    for (c, sol) in grid.iter().zip(&sols) {
        all_converged &= sol.converged;
        let mut row = vec![
            fmt_f64(*c),
            fmt_f64(sol.objective),
            sol.converged.to_string(),
            fmt_f64(sol.certificate_gap),
            sol.iterations.to_string(),
        ];
        row.extend(sol.x.iter().map(|&v| fmt_f64(v)));
        rows.push(row);
    }
    write_output(&render_csv(&header_refs, &rows), args.out.as_deref())?;
    Ok(if all_converged { 0 } else { 2 })
}

#[derive(Serialize)]
struct WorstcaseResult {
    closed_form: f64,
    sampled_lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_achieved: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_feasible: Option<bool>,
}

pub fn worstcase(args: WorstcaseArgs) -> Result<u8, CliError> {
    let p = read_instance(&args.data)?;
    let x = read_weights(&args.x)?;
    if x.len() != p.m() {
        return Err(CliError::input(format!(
            "{} weights for {} features",
            x.len(),
            p.m()
        )));
    }
    if args.samples == 0 {
        return Err(CliError::input("--samples must be >= 1"));
    }
    let loss = loss_tag(args.loss);
    let radii = parse_radii(&args.uncoupled_c, p.m())?;
    let model = UncertaintyModel::uncoupled(radii)?;
    let closed = worst_case_residual(&p, &x, &model, &loss)?;
    let sampled = sampled_worst_case(&p, &x, &model, &loss, args.samples, args.seed)?;
    let (achieved, feasible) = if matches!(loss.kind(), NormKind::L2) {
        let delta = adversarial_perturbation(&p, &x, &model)?;
        let achieved = perturbed_residual(&p, &x, &delta, &loss)?;
        let feasible = delta.is_member(&model, &loss, 1e-9)?;
        (Some(achieved), Some(feasible))
    } else {
        (None, None)
    };
    let doc = Document {
        version: VERSION,
        command: "worstcase",
        config: &args,
        result: WorstcaseResult {
            closed_form: closed,
            sampled_lower_bound: sampled,
            witness_achieved: achieved,
            witness_feasible: feasible,
        },
    };
    emit_json(&doc, args.out.as_deref())?;
    Ok(0)
}

fn parse_moments(mean: &str, sigma: &str) -> Result<MomentInfo<f64>, CliError> {
    let a = parse_vector(mean, "--mean")?;
    let s = parse_matrix(sigma, "--sigma")?;
    MomentInfo::new(a, s).map_err(CliError::from)
}

#[derive(Serialize)]
struct BoundResult {
    c: f64,
    value: f64,
    probability: f64,
    lambda: f64,
}

pub fn bound(args: BoundArgs) -> Result<u8, CliError> {
    let moments = parse_moments(&args.mean, &args.sigma)?;
    match (&args.c, &args.c_grid) {
        (Some(c), None) => {
            let cert = markov_bound(&moments, *c)?;
            let doc = Document {
                version: VERSION,
                command: "bound",
                config: &args,
                result: BoundResult {
                    c: *c,
                    value: cert.value,
                    probability: cert.probability(),
                    lambda: cert.lambda,
                },
            };
            emit_json(&doc, args.out.as_deref())?;
        }
        (None, Some(grid)) => {
            let cs = parse_vector(grid, "--c-grid")?;
            let certs = bound_grid(&moments, cs.as_slice().unwrap())?;
            let rows: Vec<Vec<String>> = cs
                .iter()
                .zip(&certs)
                .map(|(&c, cert)| {
                    vec![fmt_f64(c), fmt_f64(cert.value), fmt_f64(cert.probability())]
                })
                .collect();
            write_output(
                &render_csv(&["c", "value", "probability"], &rows),
                args.out.as_deref(),
            )?;
        }
        _ => return Err(CliError::input("pick exactly one of --c, --c-grid")),
    }
    Ok(0)
}

#[derive(Serialize)]
struct RadiusResult {
    radius: f64,
    probability_at_radius: f64,
}

pub fn radius(args: RadiusArgs) -> Result<u8, CliError> {
    let moments = parse_moments(&args.mean, &args.sigma)?;
    let r = radius_for_confidence(&moments, args.eta)?;
    let prob = markov_bound(&moments, r)?.probability();
    let doc = Document {
        version: VERSION,
        command: "radius",
        config: &args,
        result: RadiusResult {
            radius: r,
            probability_at_radius: prob,
        },
    };
    emit_json(&doc, args.out.as_deref())?;
    Ok(0)
}

pub fn kde(args: KdeArgs) -> Result<u8, CliError> {
    let p = read_instance(&args.data)?;
    let n = p.n();
    let dim = p.m() + 1;
    let bandwidth = match (&args.bandwidth, &args.bandwidth_schedule) {
        (Some(b), None) => *b,
        (None, Some(s)) if s == "default" => default_bandwidth(n, p.m()),
        (None, Some(other)) => {
            return Err(CliError::input(format!(
                "unknown bandwidth schedule `{other}`"
            )))
        }
        _ => {
            return Err(CliError::input(
                "pick exactly one of --bandwidth, --bandwidth-schedule",
            ))
        }
    };
    if bandwidth <= 0.0 {
        return Err(CliError::input("bandwidth must be positive"));
    }
    if args.grid_points < 2 {
        return Err(CliError::input("--grid-points must be >= 2"));
    }
    let rows_expected = (args.grid_points as f64).powi(dim as i32);
    if rows_expected > 1e5 {
        return Err(CliError::input(format!(
            "grid would have {rows_expected:.0} rows; lower --grid-points (limit 100000)"
        )));
    }
    // samples as rows (b, f1..fm) in feature-target space
    let samples = ndarray::Array2::from_shape_fn((n, dim), |(i, j)| {
        if j == 0 {
            p.targets()[i]
        } else {
            p.matrix()[[i, j - 1]]
        }
    });
    let est = KdeEstimate::new(samples.clone(), bandwidth)?;

    // padded bounding box: every kernel box lies inside, so the mass check is
    // exact
    let mut lo = Array1::zeros(dim);
    let mut hi = Array1::zeros(dim);
    for j in 0..dim {
        let col = samples.column(j);
        let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in col {
            mn = mn.min(v);
            mx = mx.max(v);
        }
        lo[j] = mn - bandwidth;
        hi[j] = mx + bandwidth;
    }
    let normalization = est.mass_in_rect(&lo, &hi)?;

    let mut header = vec!["b".to_string()];
    for j in 1..dim {
        header.push(format!("f{j}"));
    }
    header.push("density".into());
    header.push("normalization".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let gp = args.grid_points;
    let mut rows = Vec::new();
    let mut index = vec![0usize; dim];
    loop {
        let point = Array1::from_shape_fn(dim, |j| {
            lo[j] + (hi[j] - lo[j]) * index[j] as f64 / (gp - 1) as f64
        });
        let density = est.density(&point)?;
        let mut row: Vec<String> = point.iter().map(|&v| fmt_f64(v)).collect();
        row.push(fmt_f64(density));
        row.push(fmt_f64(normalization));
        rows.push(row);
        // odometer increment
        let mut d = dim;
        loop {
            if d == 0 {
                break;
            }
            d -= 1;
            index[d] += 1;
            if index[d] < gp {
                break;
            }
            index[d] = 0;
            if d == 0 {
                d = usize::MAX;
                break;
            }
        }
        if d == usize::MAX {
            break;
        }
    }
    write_output(&render_csv(&header_refs, &rows), args.out.as_deref())?;
    Ok(0)
}

pub fn consistency(args: ConsistencyArgs) -> Result<u8, CliError> {
    let x0 = parse_vector(&args.x0, "--x0")?;
    if args.feature_halfwidth <= 0.0 || args.noise_halfwidth < 0.0 {
        return Err(CliError::input("generator half-widths must be positive"));
    }
    let generator = UniformLinearGenerator {
        true_weights: x0.clone(),
        feature_halfwidth: args.feature_halfwidth,
        noise_halfwidth: args.noise_halfwidth,
    };
    let m = x0.len();
    let (ns, cs): (Vec<usize>, Vec<f64>) = match (&args.schedule, &args.n_list, &args.c_list) {
        (Some(s), None, None) if s == "default" => {
            let ns = vec![50usize, 200, 800, 3200];
            let cs = ns.iter().map(|&n| default_bandwidth(n, m)).collect();
            (ns, cs)
        }
        (Some(other), None, None) => {
            return Err(CliError::input(format!("unknown schedule `{other}`")))
        }
        (None, Some(nl), Some(cl)) => {
            let ns: Result<Vec<usize>, _> =
                nl.split(',').map(|t| t.trim().parse::<usize>()).collect();
            let ns = ns.map_err(|_| CliError::input(format!("bad --n-list `{nl}`")))?;
            let cs = parse_vector(cl, "--c-list")?.to_vec();
            if ns.len() != cs.len() {
                return Err(CliError::input("--n-list and --c-list lengths differ"));
            }
            (ns, cs)
        }
        _ => {
            return Err(CliError::input(
                "pick either --schedule default or both --n-list and --c-list",
            ))
        }
    };
    let opts = solver_options(&args.solver)?;
    let rows = consistency_experiment(&generator, &ns, &cs, &opts, args.solver.seed)?;

    let header = [
        "n",
        "c_n",
        "prediction_error",
        "oracle_error",
        "excess",
        "excess_nonincreasing",
        "fitted_norm",
        "converged",
    ];
    let mut out_rows = Vec::new();
    let mut prev_excess = f64::INFINITY;
    let mut all_converged = true;
    for row in &rows {
        let excess = row.prediction_error - row.oracle_error;
        let trend_ok = excess <= prev_excess;
        prev_excess = excess;
        all_converged &= row.converged;
        out_rows.push(vec![
            row.n.to_string(),
            fmt_f64(row.c_n),
            fmt_f64(row.prediction_error),
            fmt_f64(row.oracle_error),
            fmt_f64(excess),
            trend_ok.to_string(),
            fmt_f64(row.fitted_norm),
            row.converged.to_string(),
        ]);
    }
    write_output(&render_csv(&header, &out_rows), args.out.as_deref())?;
    Ok(if all_converged { 0 } else { 2 })
}

#[derive(Serialize)]
struct SparsityResult {
    support: Vec<usize>,
    radius: f64,
    projection_norms: Vec<(usize, f64)>,
    verdict: bool,
    /// `holds`, `violated`, `indeterminate`, or `not-applicable` when the
    /// certificate fails.
    zero_support: String,
}

pub fn sparsity(args: SparsityArgs) -> Result<u8, CliError> {
    let p = read_instance(&args.data)?;
    let support: Result<Vec<usize>, _> = args
        .support
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect();
    let support =
        support.map_err(|_| CliError::input(format!("bad --support `{}`", args.support)))?;
    let opts = solver_options(&args.solver)?;
    let cert = incoherence_certificate(&p, &support, args.c)?;
    let (zero_support, exit) = if cert.verdict {
        match verify_zero_support(&p, &support, args.c, &opts)? {
            ZeroSupportStatus::Holds => ("holds".to_string(), 0),
            ZeroSupportStatus::Violated => ("violated".to_string(), 0),
            ZeroSupportStatus::Indeterminate => ("indeterminate".to_string(), 2),
        }
    } else {
        ("not-applicable".to_string(), 0)
    };
    let doc = Document {
        version: VERSION,
        command: "sparsity",
        config: &args,
        result: SparsityResult {
            support: cert.support,
            radius: cert.radius,
            projection_norms: cert.projection_norms,
            verdict: cert.verdict,
            zero_support,
        },
    };
    emit_json(&doc, args.out.as_deref())?;
    Ok(exit)
}

#[derive(Serialize)]
struct StabilityResult {
    beta_witness: f64,
    base_point_loss: f64,
    removed_index: usize,
    loss_full: f64,
    loss_leave_out: f64,
    objective_tie_gap: f64,
}

pub fn stability(args: StabilityArgs) -> Result<u8, CliError> {
    let p = read_instance(&args.data)?;
    let z = parse_vector(&args.z_star, "--z-star")?;
    if z.len() != p.m() {
        return Err(CliError::input(format!(
            "--z-star has {} entries for {} features",
            z.len(),
            p.m()
        )));
    }
    let set = LabeledSet::new(p.matrix().clone(), p.targets().clone())?;
    let opts = solver_options(&args.solver)?;
    let report = stability_gap(&set, &z, args.c, &opts).map_err(|e| match e {
        robreg::Error::ConstructionViolated(msg) => CliError::numerical(msg),
        other => CliError::from(other),
    })?;
    let doc = Document {
        version: VERSION,
        command: "stability",
        config: &args,
        result: StabilityResult {
            beta_witness: report.beta_witness,
            base_point_loss: report.base_point_loss,
            removed_index: report.removed_index,
            loss_full: report.loss_full,
            loss_leave_out: report.loss_leave_out,
            objective_tie_gap: report.objective_tie_gap,
        },
    };
    emit_json(&doc, args.out.as_deref())?;
    Ok(0)
}

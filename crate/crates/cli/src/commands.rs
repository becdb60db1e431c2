use std::collections::BTreeMap;
use std::path::Path;

use sagrover_core::runtime::{
    advantage_threshold, calibrate_tq, hybrid_runtime, hybrid_runtime_from_calls, saturation_q, speedup_table,
    RuntimeBreakdown, Saturation,
};
use sagrover_core::synth::RegisterLayout;
use sagrover_core::{
    classical_sa, fix_variables, hybrid_sa, parse_model, random_instance, resource_report, serialize_model,
    synthesize_cost_circuit, Assignment, Backend, CostCircuit, PartialAssignment, QuboModel, ReducedQubo,
    ResourceReport, RuntimeParams, SaConfig, SpeedupRow,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Format, GenArgs, Mode, ModelArgs, ReduceArgs, SolveArgs, SynthArgs, VerifyArgs};
use crate::output::{csv, emit, envelope, hex_digest, read_input, write_file, CliError, CliResult, RunManifest};

/// Saturation search ceiling for `model`.
const SATURATION_Q_MAX: u32 = 64;

fn params_of(cli: &Cli, args: &impl Serialize, extra: Value) -> Value {
    let mut v = serde_json::to_value(args).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut v {
        map.insert("seed".into(), json!(cli.seed));
        map.insert("format".into(), json!(cli.format));
        if let Value::Object(e) = extra {
            map.extend(e);
        }
    }
    v
}

fn load_model(path: &Path) -> CliResult<(QuboModel, String)> {
    let (text, digest) = read_input(path)?;
    Ok((parse_model(&text)?, digest))
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Serialize)]
struct Counters {
    classical_evaluations: u64,
    oracle_calls: u64,
    grover_iterations: u64,
    configurations: u64,
    accepted_moves: u64,
}

#[derive(Debug, Serialize)]
struct ModeledRuntime {
    params: RuntimeParams,
    /// Ideal `2^{q/2}` oracle calls per step.
    ideal: RuntimeBreakdown,
    /// Charged with the oracle calls this run actually made.
    measured: RuntimeBreakdown,
}

#[derive(Debug, Serialize)]
struct SolveResult {
    mode: Mode,
    backend: Backend,
    n: usize,
    q: usize,
    best_assignment: Assignment,
    best_cost: f64,
    counters: Counters,
    modeled_runtime: ModeledRuntime,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost_trace: Option<Vec<f64>>,
}

pub fn solve(cli: &Cli, a: &SolveArgs) -> CliResult<()> {
    let (model, digest) = load_model(&a.model)?;
    let backend: Backend = a.backend.into();
    let q = match a.mode {
        Mode::Classical => 0,
        Mode::Hybrid => a.q,
    };
    let cfg = SaConfig {
        initial_temperature: a.initial_temperature,
        cooling_factor: a.cooling_factor,
        outer_iterations: a.iterations,
        q,
        seed: cli.seed,
        backend,
        call_factor: a.call_factor,
        patience: a.patience,
    };
    let res = match a.mode {
        Mode::Classical => classical_sa(&model, &cfg)?,
        Mode::Hybrid => hybrid_sa(&model, &cfg)?,
    };

    let params = RuntimeParams {
        t_q: calibrate_tq(model.n().max(1))?,
        sa_total: res.configurations as f64,
        normalization: 1.0,
        ..RuntimeParams::default()
    };
    let calls_per_step = match a.mode {
        Mode::Classical => 2f64.powf(q as f64 / 2.0),
        Mode::Hybrid => res.oracle_calls as f64 / cfg.outer_iterations as f64,
    };
    let result = SolveResult {
        mode: a.mode,
        backend,
        n: model.n(),
        q,
        best_assignment: res.best_assignment.clone(),
        best_cost: res.best_cost,
        counters: Counters {
            classical_evaluations: res.classical_evaluations,
            oracle_calls: res.oracle_calls,
            grover_iterations: res.grover_iterations,
            configurations: res.configurations,
            accepted_moves: res.accepted_moves,
        },
        modeled_runtime: ModeledRuntime {
            params,
            ideal: hybrid_runtime(&params, q as u32),
            measured: hybrid_runtime_from_calls(&params, q as u32, calls_per_step),
        },
        cost_trace: a.trace.then(|| res.cost_trace.clone()),
    };

    let body = match cli.format {
        Format::Json => {
            let extra = json!({ "backend": backend.name() });
            let manifest = RunManifest::new("solve", params_of(cli, a, extra), Some(digest));
            envelope(&manifest, &result)?
        }
        Format::Csv => csv(
            &[
                "mode",
                "backend",
                "q",
                "best_assignment",
                "best_cost",
                "classical_evaluations",
                "oracle_calls",
                "grover_iterations",
                "configurations",
                "T_SA",
                "T_hy",
            ],
            [vec![
                format!("{:?}", a.mode).to_lowercase(),
                backend.name().to_owned(),
                q.to_string(),
                res.best_assignment.to_string(),
                fmt_f64(res.best_cost),
                res.classical_evaluations.to_string(),
                res.oracle_calls.to_string(),
                res.grover_iterations.to_string(),
                res.configurations.to_string(),
                fmt_f64(result.modeled_runtime.measured.t_sa),
                fmt_f64(result.modeled_runtime.measured.t_hy),
            ]],
        ),
    };
    emit(cli.output.as_deref(), &body)
}

fn parse_fixes(specs: &[String], n: usize) -> CliResult<BTreeMap<usize, bool>> {
    let mut fixed = BTreeMap::new();
    for s in specs {
        let (i, b) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--fix {s:?}: expected index=value")))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--fix {s:?}: bad index")))?;
        let b = match b.trim() {
            "0" => false,
            "1" => true,
            _ => return Err(CliError::Usage(format!("--fix {s:?}: value must be 0 or 1"))),
        };
        if i >= n {
            return Err(CliError::Usage(format!("--fix {s:?}: index out of range for {n} variables")));
        }
        if fixed.insert(i, b).is_some() {
            return Err(CliError::Usage(format!("--fix: variable {i} fixed twice")));
        }
    }
    Ok(fixed)
}

#[derive(Debug, Serialize)]
struct ReduceResult {
    n: usize,
    q: usize,
    terms_before: usize,
    terms_after: usize,
    /// Reduced index `k` is original variable `index_map[k]`.
    index_map: Vec<usize>,
    folded_offset: f64,
    model: String,
}

pub fn reduce(cli: &Cli, a: &ReduceArgs) -> CliResult<()> {
    let (model, digest) = load_model(&a.model)?;
    let fixed = parse_fixes(&a.fix, model.n())?;
    let reduced = fix_variables(&model, &PartialAssignment::from_fixed(model.n(), fixed)?)?;
    let text = serialize_model(&reduced.model);
    if let Some(path) = &cli.output {
        write_file(path, &text)?;
    }
    let result = ReduceResult {
        n: model.n(),
        q: reduced.q(),
        terms_before: model.num_terms(),
        terms_after: reduced.model.num_terms(),
        index_map: reduced.index_map.clone(),
        folded_offset: reduced.folded_offset,
        model: text,
    };
    let body = match cli.format {
        Format::Json => {
            let manifest = RunManifest::new("reduce", params_of(cli, a, json!({})), Some(digest));
            envelope(&manifest, &result)?
        }
        Format::Csv => csv(
            &["n", "q", "terms_before", "terms_after"],
            [vec![
                result.n.to_string(),
                result.q.to_string(),
                result.terms_before.to_string(),
                result.terms_after.to_string(),
            ]],
        ),
    };
    emit(None, &body)
}

#[derive(Debug, Clone, Serialize)]
struct BasisCheck {
    input: Assignment,
    classical: f64,
    circuit: i64,
    clean: bool,
    pass: bool,
}

fn check_all_inputs(circuit: &CostCircuit, reference: &QuboModel) -> CliResult<Vec<BasisCheck>> {
    let q = circuit.layout.input.len();
    (0..1u64 << q)
        .map(|x| {
            let ev = circuit.evaluate_basis(x)?;
            let classical = reference.evaluate_index(x);
            let clean = ev.clean && (ev.amplitude - 1.0).abs() < 1e-9;
            Ok(BasisCheck {
                input: Assignment::from_index(x, q),
                classical,
                circuit: ev.cost,
                clean,
                pass: clean && ev.cost as f64 == classical,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Verification {
    passed: usize,
    total: usize,
    inputs: Vec<BasisCheck>,
}

impl Verification {
    fn new(inputs: Vec<BasisCheck>) -> Self {
        Verification {
            passed: inputs.iter().filter(|c| c.pass).count(),
            total: inputs.len(),
            inputs,
        }
    }

    fn ok(&self) -> bool {
        self.passed == self.total
    }

    fn first_failure(&self) -> String {
        self.inputs
            .iter()
            .find(|c| !c.pass)
            .map(|c| {
                format!(
                    "input {}: classical {} circuit {} clean {}",
                    c.input, c.classical, c.circuit, c.clean
                )
            })
            .unwrap_or_default()
    }
}

fn verification_csv(v: &Verification) -> String {
    csv(
        &["input", "classical", "circuit", "clean", "pass"],
        v.inputs.iter().map(|c| {
            vec![
                c.input.to_string(),
                fmt_f64(c.classical),
                c.circuit.to_string(),
                c.clean.to_string(),
                c.pass.to_string(),
            ]
        }),
    )
}

#[derive(Debug, Serialize)]
struct SynthResult {
    width: usize,
    signed: bool,
    bounds: (i64, i64),
    layout: RegisterLayout,
    report: ResourceReport,
    circuit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
}

pub fn synth(cli: &Cli, a: &SynthArgs) -> CliResult<()> {
    let (model, digest) = load_model(&a.model)?;
    let reduced = fix_variables(&model, &PartialAssignment::from_fixed(model.n(), BTreeMap::new())?)?;
    let cc = synthesize_cost_circuit(&reduced)?;
    let dump = cc.circuit.dump();
    if let Some(path) = &a.circuit {
        write_file(path, &dump)?;
    }
    let verification = if a.verify {
        Some(Verification::new(check_all_inputs(&cc, &model)?))
    } else {
        None
    };
    let failure = verification.as_ref().filter(|v| !v.ok()).map(|v| v.first_failure());
    let result = SynthResult {
        width: cc.width,
        signed: cc.signed,
        bounds: cc.bounds,
        layout: cc.layout.clone(),
        report: resource_report(&cc),
        circuit: dump,
        verification,
    };
    let body = match cli.format {
        Format::Json => {
            let manifest = RunManifest::new("synth", params_of(cli, a, json!({})), Some(digest));
            envelope(&manifest, &result)?
        }
        Format::Csv => match &result.verification {
            Some(v) => verification_csv(v),
            None => csv(
                &["gate", "count"],
                result
                    .report
                    .gate_counts
                    .iter()
                    .map(|(k, c)| vec![k.clone(), c.to_string()]),
            ),
        },
    };
    emit(cli.output.as_deref(), &body)?;
    match failure {
        Some(f) => Err(CliError::Verification(f)),
        None => Ok(()),
    }
}

const TABLE_HEADER: [&str; 7] = ["q", "T_Q", "T_G", "X_QUBO", "T_SA", "T_hy", "X_SA"];
const PLOT_HEADER: [&str; 7] = ["q", "T_SA", "T_hy", "X_SA", "log10_T_SA", "log10_T_hy", "log10_X_SA"];

fn table_csv(rows: &[SpeedupRow]) -> String {
    csv(
        &TABLE_HEADER,
        rows.iter().map(|r| {
            vec![
                r.q.to_string(),
                fmt_f64(r.t_q),
                fmt_f64(r.t_g),
                fmt_f64(r.x_qubo),
                fmt_f64(r.t_sa),
                fmt_f64(r.t_hy),
                fmt_f64(r.x_sa),
            ]
        }),
    )
}

/// Runtime curves (panel a) and speedup curve (panel b) with log10 columns.
fn plot_csv(rows: &[SpeedupRow]) -> String {
    csv(
        &PLOT_HEADER,
        rows.iter().map(|r| {
            vec![
                r.q.to_string(),
                fmt_f64(r.t_sa),
                fmt_f64(r.t_hy),
                fmt_f64(r.x_sa),
                fmt_f64(r.t_sa.log10()),
                fmt_f64(r.t_hy.log10()),
                fmt_f64(r.x_sa.log10()),
            ]
        }),
    )
}

#[derive(Debug, Serialize)]
struct ModelResult {
    params: RuntimeParams,
    rows: Vec<SpeedupRow>,
    advantage_threshold: u32,
    epsilon: f64,
    saturation: Saturation,
}

pub fn model(cli: &Cli, a: &ModelArgs) -> CliResult<()> {
    let p = RuntimeParams {
        t_q: a.t_q,
        t_det: a.t_det,
        q_oh: a.q_oh,
        sa_total: a.sa_total,
        normalization: a.normalization,
    };
    p.validate()?;
    if a.q_step == 0 || a.q_min > a.q_max {
        return Err(CliError::Usage(format!(
            "empty q range {}..={} step {}",
            a.q_min, a.q_max, a.q_step
        )));
    }
    let qs: Vec<u32> = (a.q_min..=a.q_max).step_by(a.q_step as usize).collect();
    let rows = speedup_table(&p, &qs);
    if let Some(path) = &a.plot_output {
        write_file(path, &plot_csv(&rows))?;
    }
    let result = ModelResult {
        params: p,
        advantage_threshold: advantage_threshold(p.q_oh),
        epsilon: a.epsilon,
        saturation: saturation_q(&p, a.epsilon, SATURATION_Q_MAX),
        rows,
    };
    let body = match cli.format {
        Format::Json => {
            let manifest = RunManifest::new("model", params_of(cli, a, json!({})), None);
            envelope(&manifest, &result)?
        }
        Format::Csv => table_csv(&result.rows),
    };
    emit(cli.output.as_deref(), &body)
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    /// Full 5-bit configuration, variable 0 first.
    configuration: Assignment,
    free: Assignment,
    classical: f64,
    circuit: i64,
    clean: bool,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct VerifyResult {
    fixed: BTreeMap<usize, bool>,
    passed: usize,
    total: usize,
    rows: Vec<VerifyRow>,
    minimum: f64,
    minimizers: Vec<Assignment>,
}

/// `x0 = 0, x3 = 1` on the 5-variable example.
fn verify_subproblem() -> CliResult<(QuboModel, PartialAssignment, ReducedQubo)> {
    let model = QuboModel::five_variable_example();
    let p = PartialAssignment::from_fixed(5, [(0, false), (3, true)].into())?;
    let reduced = fix_variables(&model, &p)?;
    Ok((model, p, reduced))
}

pub fn verify(cli: &Cli, a: &VerifyArgs) -> CliResult<()> {
    let (model, p, reduced) = verify_subproblem()?;
    let mut target = reduced.clone();
    if a.inject_fault {
        target.model.add_quadratic(0, 1, 1.0)?;
    }
    let cc = synthesize_cost_circuit(&target)?;
    let checks = check_all_inputs(&cc, &reduced.model)?;
    let mut rows = Vec::with_capacity(checks.len());
    for c in checks {
        let full = p.merge(&c.input)?;
        let classical = model.evaluate(&full)?;
        rows.push(VerifyRow {
            pass: c.pass && classical == c.classical,
            configuration: full,
            free: c.input,
            classical,
            circuit: c.circuit,
            clean: c.clean,
        });
    }
    let minimum = rows.iter().map(|r| r.classical).fold(f64::INFINITY, f64::min);
    let result = VerifyResult {
        fixed: p.fixed().clone(),
        passed: rows.iter().filter(|r| r.pass).count(),
        total: rows.len(),
        minimizers: rows
            .iter()
            .filter(|r| r.classical == minimum)
            .map(|r| r.free.clone())
            .collect(),
        minimum,
        rows,
    };
    let body = match cli.format {
        Format::Json => {
            let manifest = RunManifest::new("verify", params_of(cli, a, json!({})), None);
            envelope(&manifest, &result)?
        }
        Format::Csv => csv(
            &["configuration", "free", "classical", "circuit", "clean", "pass"],
            result.rows.iter().map(|r| {
                vec![
                    r.configuration.to_string(),
                    r.free.to_string(),
                    fmt_f64(r.classical),
                    r.circuit.to_string(),
                    r.clean.to_string(),
                    r.pass.to_string(),
                ]
            }),
        ),
    };
    emit(cli.output.as_deref(), &body)?;
    match result.rows.iter().find(|r| !r.pass) {
        Some(r) => Err(CliError::Verification(format!(
            "configuration {}: classical {} circuit {}",
            r.configuration, r.classical, r.circuit
        ))),
        None => Ok(()),
    }
}

pub fn gen(cli: &Cli, a: &GenArgs) -> CliResult<()> {
    let model = random_instance(a.n, a.density, a.range, cli.seed)?;
    let text = serialize_model(&model);
    emit(cli.output.as_deref(), &text)?;
    let manifest = RunManifest::new("gen", params_of(cli, a, json!({})), None);
    let note = json!({ "manifest": manifest, "result": { "terms": model.num_terms(), "digest": hex_digest(text.as_bytes()) } });
    eprintln!("{note}");
    Ok(())
}

//! Command-line front end. Every command returns machine output (JSON or
//! CSV) and writes human diagnostics to stderr only.

pub mod experiments;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pauliz::dqc1::{dqc1_partition_complex, gadget_soundness, Circuit, Part, TraceMode};
use pauliz::hamiltonian::{
    diagnostics, parse_hamiltonian, plan_trotter_additive, plan_trotter_multiplicative,
    split_multiplicative_error, HamiltonianDiagnostics,
};
use pauliz::models::{hubbard_jordan_wigner, HubbardSpec};
use pauliz::oracle::{eigenvalues, exact_partition, exact_partition_real, DENSE_CAPACITY};
use pauliz::reduction::{reduce, verify_reduction, HDecompositionInstance, ReductionReport, UDecompositionInstance};
use pauliz::sampler::{trivial_z_max, Sampler};
use pauliz::{Error, InverseTemperature, PauliHamiltonian, PauliString};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "pauliz", version, about = "Partition functions of Pauli-decomposed Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Common {
    /// RNG seed; a random one is drawn and recorded when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for shot sampling; results do not depend on it.
    #[arg(long, global = true, env = "PAULIZ_WORKERS")]
    pub workers: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Estimate Z = tr exp(-βH).
    Estimate(EstimateArgs),
    /// Diagnostics and Trotter step counts over a β × ε grid.
    Plan(PlanArgs),
    /// Dense Z for small instances.
    Exact(ExactArgs),
    /// 100 random instances against the dense oracle.
    ExperimentCorrectness(experiments::CorrectnessArgs),
    /// Hubbard β̃ × Ũ grid of plan sizes and timings.
    ExperimentSweep(experiments::SweepArgs),
    /// Rewrite a Re/Im tr(σU) instance as a Hermitian combination of circuits.
    Reduce(ReduceArgs),
    /// Compare compiled gadgets with dense exponentials.
    GadgetCheck(GadgetArgs),
    /// Re-run the configuration embedded in a JSON report or config sidecar.
    Replay(ReplayArgs),
}

/// Either a Hamiltonian file or a Hubbard lattice.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianSource {
    #[arg(long, conflicts_with_all = ["lx", "ly"])]
    pub hamiltonian: Option<PathBuf>,
    /// Hubbard lattice width (Jordan-Wigner encoded).
    #[arg(long, requires = "ly")]
    pub lx: Option<usize>,
    #[arg(long, requires = "lx")]
    pub ly: Option<usize>,
    /// Hubbard hopping strength.
    #[arg(long = "t", default_value_t = 1.0, allow_hyphen_values = true)]
    pub hopping: f64,
    /// Hubbard onsite interaction.
    #[arg(long = "u", default_value_t = 1.0, allow_hyphen_values = true)]
    pub onsite: f64,
}

impl HamiltonianSource {
    pub fn load(&self) -> Result<PauliHamiltonian, CliError> {
        match (&self.hamiltonian, self.lx, self.ly) {
            (Some(path), _, _) => Ok(parse_hamiltonian(path)?),
            (None, Some(lx), Some(ly)) => Ok(hubbard_jordan_wigner(&HubbardSpec {
                lx,
                ly,
                t: self.hopping,
                u: self.onsite,
            })?),
            _ => Err(CliError::Usage("pass --hamiltonian <path> or --lx/--ly".into())),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZmaxPolicy {
    /// Twice the dense Z; small N only.
    Exact2x,
    /// 2^N e^{|β|Ω}, valid for every instance.
    Trivial,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceModeArg {
    Expectation,
    Measurement,
}

impl From<TraceModeArg> for TraceMode {
    fn from(m: TraceModeArg) -> Self {
        match m {
            TraceModeArg::Expectation => TraceMode::Expectation,
            TraceModeArg::Measurement => TraceMode::Measurement,
        }
    }
}

/// Total relative error when no budget flag is given.
pub const DEFAULT_EPS_M: f64 = 0.098;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub source: HamiltonianSource,
    /// Inverse temperature, `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: InverseTemperature,
    /// Total multiplicative error, split evenly between sampling and Trotter.
    #[arg(long, conflicts_with_all = ["eps_ms", "eps_mt"])]
    pub eps_m: Option<f64>,
    #[arg(long, requires = "eps_mt")]
    pub eps_ms: Option<f64>,
    #[arg(long, requires = "eps_ms")]
    pub eps_mt: Option<f64>,
    /// Additive error; selects additive mode (and is required with --dqc1).
    #[arg(long)]
    pub eps_a: Option<f64>,
    #[arg(long, default_value_t = 0.15)]
    pub delta: f64,
    #[arg(long, conflicts_with = "zmax_policy")]
    pub zmax: Option<f64>,
    #[arg(long, value_enum)]
    pub zmax_policy: Option<ZmaxPolicy>,
    /// Also compute the dense Z (N ≤ 12).
    #[arg(long)]
    pub check_exact: bool,
    /// Simulate the one-clean-qubit algorithm; accepts complex β.
    #[arg(long)]
    pub dqc1: bool,
    #[arg(long, value_enum, default_value_t = TraceModeArg::Expectation)]
    pub trace_mode: TraceModeArg,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PlanArgs {
    #[command(flatten)]
    pub source: HamiltonianSource,
    /// Repeatable; complex values are planned additively.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub beta: Vec<InverseTemperature>,
    /// Trotter error budgets (relative for real β, additive for complex β).
    #[arg(long = "eps-mt", alias = "eps", required = true)]
    pub eps: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ExactArgs {
    #[command(flatten)]
    pub source: HamiltonianSource,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: InverseTemperature,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReduceArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub sigma: PauliString,
    #[arg(long)]
    pub part: Part,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Append a dense check of both trace identities.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GadgetArgs {
    #[arg(long, default_value_t = 4)]
    pub max_qubits: usize,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A JSON report (its `config` field is used) or a `.config.json` sidecar.
    pub report: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// 2 for bad input, 3 for infeasible budgets, 4 for capacity, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::IllegalLetter { .. }
                | Error::EmptyPauli
                | Error::QubitMismatch { .. }
                | Error::Schema(_)
                | Error::InvalidArgument(_) => 2,
                Error::PlanInfeasible { .. }
                | Error::BudgetInfeasible { .. }
                | Error::RoundCapExceeded { .. } => 3,
                Error::Capacity { .. } => 4,
                Error::NonConvergence => 1,
            },
        }
    }
}

/// Machine output of one command: a JSON document and, where the command
/// has a tabular form, CSV text.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Result<Output, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

pub fn run(mut cli: Cli) -> Result<Output, CliError> {
    if let Command::Replay(a) = &cli.command {
        let mut inner = load_config(&a.report)?;
        if matches!(inner.command, Command::Replay(_)) {
            return Err(CliError::Usage("a replay config cannot itself be a replay".into()));
        }
        // Output routing belongs to this invocation; the worker count does
        // not affect results.
        inner.common.out = cli.common.out.take();
        inner.common.format = cli.common.format;
        if cli.common.workers.is_some() {
            inner.common.workers = cli.common.workers;
        }
        return run(inner);
    }
    absolutize_inputs(&mut cli.command)?;
    let seed = *cli.common.seed.get_or_insert_with(rand::random);
    eprintln!("seed {seed}");
    let config = serde_json::to_value(&cli).expect("config serializes");
    let workers = cli.common.workers;
    match &cli.command {
        Command::Estimate(a) => estimate(a, seed, workers, config),
        Command::Plan(a) => plan(a, config),
        Command::Exact(a) => exact(a, config),
        Command::ExperimentCorrectness(a) => experiments::correctness_command(a, seed, workers, config),
        Command::ExperimentSweep(a) => experiments::sweep_command(a, seed, workers, config),
        Command::Reduce(a) => reduce_command(a, config),
        Command::GadgetCheck(a) => gadget_check(a, seed, config),
        Command::Replay(_) => unreachable!("handled above"),
    }
}

/// Input paths are recorded absolute so a saved config replays from any
/// directory.
fn absolutize_inputs(command: &mut Command) -> Result<(), CliError> {
    let path = match command {
        Command::Estimate(EstimateArgs { source, .. })
        | Command::Plan(PlanArgs { source, .. })
        | Command::Exact(ExactArgs { source, .. }) => source.hamiltonian.as_mut(),
        Command::Reduce(a) => Some(&mut a.circuit),
        _ => None,
    };
    if let Some(p) = path {
        *p = std::path::absolute(&*p)?;
    }
    Ok(())
}

/// Reads a run configuration from a report or a bare config file.
pub fn load_config(path: &Path) -> Result<Cli, CliError> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let config = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(config).map_err(|e| CliError::Usage(format!("{}: not a run config: {e}", path.display())))
}

/// Writes the selected format to `--out` or stdout. CSV written to a file
/// gets a `<out>.config.json` sidecar holding the run configuration.
pub fn emit(common: &Common, output: &Output) -> Result<(), CliError> {
    let text = match common.format {
        Format::Json => serde_json::to_string_pretty(&output.json).expect("json serializes") + "\n",
        Format::Csv => output
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage("this command has no CSV form; use --format json".into()))?,
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, text)?;
            if common.format == Format::Csv {
                if let Some(config) = output.json.get("config") {
                    let sidecar = sidecar_path(path);
                    std::fs::write(sidecar, serde_json::to_string_pretty(config).expect("json") + "\n")?;
                }
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

pub(crate) fn csv_field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn resolve_zmax(
    a: &EstimateArgs,
    h: &PauliHamiltonian,
    beta: f64,
) -> Result<(f64, &'static str), CliError> {
    if let Some(z) = a.zmax {
        return Ok((z, "explicit"));
    }
    match a.zmax_policy.unwrap_or(ZmaxPolicy::Trivial) {
        ZmaxPolicy::Exact2x => Ok((2.0 * exact_partition_real(h, beta)?, "exact2x")),
        ZmaxPolicy::Trivial => Ok((trivial_z_max(h, beta), "trivial")),
    }
}

fn complex_json(re: f64, im: f64) -> Value {
    json!({ "re": re, "im": im })
}

fn diagnostics_json(d: &HamiltonianDiagnostics) -> Value {
    serde_json::to_value(d).expect("diagnostics serialize")
}

fn estimate(a: &EstimateArgs, seed: u64, workers: Option<usize>, config: Value) -> Result<Output, CliError> {
    let h = a.source.load()?;
    let d = diagnostics(&h);
    let sampler = Sampler::new(seed, workers)?;
    let beta = a.beta;

    // (estimate, mode, ν, shots, rounds, z_max, details)
    let (est_re, est_im, mode, nu, shots, rounds, z_max, details) = if a.dqc1 {
        let eps_a = a
            .eps_a
            .ok_or_else(|| CliError::Usage("--dqc1 needs --eps-a".into()))?;
        let r = dqc1_partition_complex(&h, beta, eps_a, a.delta, a.trace_mode.into(), &sampler)?;
        let details = serde_json::to_value(&r).expect("report serializes");
        (r.estimate.re, r.estimate.im, "dqc1-additive", r.plan.nu, r.shots_used, 1, None, details)
    } else if !beta.is_real() {
        return Err(CliError::Usage("complex β requires --dqc1".into()));
    } else if let (Some(eps_a), None, None) = (a.eps_a, a.eps_m, a.eps_ms) {
        let half = eps_a / 2.0;
        let plan = plan_trotter_additive(&h, beta, half)?;
        let r = sampler.estimate_additive(&h, &plan, half, a.delta)?;
        let details = serde_json::to_value(&r).expect("report serializes");
        (r.estimate, 0.0, "additive", plan.nu, r.shots_used, r.rounds, None, details)
    } else {
        let (eps_ms, eps_mt) = match (a.eps_ms, a.eps_mt) {
            (Some(s), Some(t)) => (s, t),
            _ => {
                let e = split_multiplicative_error(a.eps_m.unwrap_or(DEFAULT_EPS_M))?;
                (e, e)
            }
        };
        let (z_max, policy) = resolve_zmax(a, &h, beta.re)?;
        eprintln!("Z_max = {z_max} ({policy})");
        let mut r = sampler.estimate_partition_split(&h, beta.re, eps_ms, eps_mt, a.delta, z_max)?;
        if a.eps_ms.is_none() {
            r.budgets.eps_m = Some(a.eps_m.unwrap_or(DEFAULT_EPS_M));
        }
        let details = serde_json::to_value(&r).expect("report serializes");
        (r.estimate, 0.0, "multiplicative", r.plan.nu, r.shots_used, r.rounds, Some((z_max, policy)), details)
    };

    let exact = if a.check_exact {
        if h.num_qubits() <= DENSE_CAPACITY {
            let z = exact_partition(&h, beta)?;
            let err = ((est_re - z.re).powi(2) + (est_im - z.im).powi(2)).sqrt();
            Some((z, err / z.norm()))
        } else {
            eprintln!("--check-exact skipped: {} qubits exceed the dense limit", h.num_qubits());
            None
        }
    } else {
        None
    };
    eprintln!("estimate {est_re} {est_im}i after {shots} shots, {rounds} round(s)");

    let json = json!({
        "config": config,
        "seed": seed,
        "mode": mode,
        "estimate": complex_json(est_re, est_im),
        "nu": nu,
        "omega": d.omega,
        "frak_h": d.frak_h,
        "shots": shots,
        "rounds": rounds,
        "z_max": z_max.map(|z| z.0),
        "z_max_policy": z_max.map(|z| z.1),
        "exact": exact.map(|(z, rel)| json!({ "z": complex_json(z.re, z.im), "relative_error": rel })),
        "diagnostics": diagnostics_json(&d),
        "report": details,
    });
    let csv = format!(
        "estimate_re,estimate_im,nu,omega,frak_h,shots,rounds,seed,Z_exact,rel_error\n{:?},{:?},{},{:?},{:?},{},{},{},{},{}\n",
        est_re,
        est_im,
        nu,
        d.omega,
        d.frak_h,
        shots,
        rounds,
        seed,
        csv_field(exact.map(|e| e.0.re)),
        csv_field(exact.map(|e| e.1)),
    );
    Ok(Output { json, csv: Some(csv) })
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanRow {
    pub beta_re: f64,
    pub beta_im: f64,
    pub eps: f64,
    pub mode: &'static str,
    pub nu: u64,
    pub heuristic: bool,
}

fn plan(a: &PlanArgs, config: Value) -> Result<Output, CliError> {
    let h = a.source.load()?;
    let d = diagnostics(&h);
    let mut rows = Vec::with_capacity(a.beta.len() * a.eps.len());
    for beta in &a.beta {
        for &eps in &a.eps {
            let (mode, p) = if beta.is_real() {
                ("multiplicative", plan_trotter_multiplicative(&h, beta.re, eps)?)
            } else {
                ("additive", plan_trotter_additive(&h, *beta, eps)?)
            };
            rows.push(PlanRow {
                beta_re: beta.re,
                beta_im: beta.im,
                eps,
                mode,
                nu: p.nu,
                heuristic: p.heuristic,
            });
        }
    }
    eprintln!("Ω = {}, ξ = {}, 𝔥 = {}", d.omega, d.xi, d.frak_h);
    let mut csv = String::from("beta_re,beta_im,eps,mode,nu\n");
    for r in &rows {
        csv += &format!("{:?},{:?},{:?},{},{}\n", r.beta_re, r.beta_im, r.eps, r.mode, r.nu);
    }
    Ok(Output {
        json: json!({ "config": config, "diagnostics": diagnostics_json(&d), "rows": rows }),
        csv: Some(csv),
    })
}

fn exact(a: &ExactArgs, config: Value) -> Result<Output, CliError> {
    let h = a.source.load()?;
    let z = exact_partition(&h, a.beta)?;
    let ev = eigenvalues(&h)?;
    let json = json!({
        "config": config,
        "num_qubits": h.num_qubits(),
        "num_terms": h.len(),
        "beta": a.beta,
        "z": complex_json(z.re, z.im),
        "min_eigenvalue": ev.first(),
        "max_eigenvalue": ev.last(),
    });
    let csv = format!("beta_re,beta_im,Z_re,Z_im\n{:?},{:?},{:?},{:?}\n", a.beta.re, a.beta.im, z.re, z.im);
    Ok(Output { json, csv: Some(csv) })
}

#[derive(Serialize)]
struct ReduceOutput<'a> {
    #[serde(flatten)]
    instance: &'a HDecompositionInstance,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<ReductionReport>,
    config: Value,
}

fn reduce_command(a: &ReduceArgs, config: Value) -> Result<Output, CliError> {
    let circuit = Circuit::read(&a.circuit)?;
    let u = UDecompositionInstance::new(circuit, a.sigma.clone(), a.delta, a.part)?;
    let h = reduce(&u);
    let verification = if a.verify {
        let r = verify_reduction(&u)?;
        eprintln!("max discrepancy {:e}", r.max_discrepancy);
        Some(r)
    } else {
        None
    };
    let json = serde_json::to_value(ReduceOutput {
        instance: &h,
        verification,
        config,
    })
    .expect("instance serializes");
    Ok(Output { json, csv: None })
}

/// Max-norm tolerance the gadget check reports against.
pub const GADGET_TOLERANCE: f64 = 1e-10;

fn gadget_check(a: &GadgetArgs, seed: u64, config: Value) -> Result<Output, CliError> {
    let mut rng = pauliz::sampler::stream_rng(experiments::CLI_DOMAIN, seed, 0, 0);
    let r = gadget_soundness(a.max_qubits, a.samples, &mut rng)?;
    let worst = r.max_real_error.max(r.max_imaginary_error).max(r.max_controlled_error);
    let passed = worst < GADGET_TOLERANCE;
    eprintln!("{} strings, worst error {worst:e}", r.strings);
    let csv = format!(
        "max_qubits,strings,samples,max_real_error,max_imaginary_error,max_controlled_error,passed\n{},{},{},{:?},{:?},{:?},{}\n",
        r.max_qubits, r.strings, r.samples_per_string, r.max_real_error, r.max_imaginary_error, r.max_controlled_error, passed
    );
    Ok(Output {
        json: json!({ "config": config, "report": r, "tolerance": GADGET_TOLERANCE, "passed": passed }),
        csv: Some(csv),
    })
}

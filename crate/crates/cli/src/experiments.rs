//! The two numerical experiments, returned as rows so tests can inspect
//! them directly.

use std::time::Instant;

use clap::Args;
use pauliz::hamiltonian::{diagnostics, plan_trotter_multiplicative};
use pauliz::models::{hubbard_jordan_wigner, random_beta, random_hamiltonian, HubbardSpec};
use pauliz::oracle::exact_partition_real;
use pauliz::sampler::{stream_rng, trivial_z_max, Sampler};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{csv_field, CliError, Output};

/// Stream domain for instance generation inside the CLI.
pub const CLI_DOMAIN: u64 = 0x7061_756c_697a_4331;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CorrectnessArgs {
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    #[arg(long, default_value_t = 3)]
    pub max_qubits: usize,
    #[arg(long, default_value_t = 4)]
    pub max_terms: usize,
    #[arg(long, default_value_t = 0.048)]
    pub eps_ms: f64,
    #[arg(long, default_value_t = 0.048)]
    pub eps_mt: f64,
    #[arg(long, default_value_t = 0.15)]
    pub delta: f64,
    /// Rows with |rel_error| at most this count as within tolerance.
    #[arg(long, default_value_t = 0.098)]
    pub tolerance: f64,
}

impl Default for CorrectnessArgs {
    fn default() -> Self {
        CorrectnessArgs {
            instances: 100,
            max_qubits: 3,
            max_terms: 4,
            eps_ms: 0.048,
            eps_mt: 0.048,
            delta: 0.15,
            tolerance: 0.098,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectnessRow {
    pub instance: usize,
    /// Estimator seed for this instance.
    pub seed: u64,
    pub n: usize,
    pub l: usize,
    pub beta: f64,
    pub z_exact: f64,
    pub z_est: f64,
    /// Signed `(Ẑ - Z) / Z`.
    pub rel_error: f64,
}

/// Random instances with `Z_max = 2 Z`. Instance `i` is the `i`-th draw of
/// one stream keyed by `seed`, so rows do not depend on `workers`.
pub fn run_correctness(
    args: &CorrectnessArgs,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<CorrectnessRow>, CliError> {
    let mut rng = stream_rng(CLI_DOMAIN, seed, 1, 0);
    let mut rows = Vec::with_capacity(args.instances);
    for instance in 0..args.instances {
        let h = random_hamiltonian(args.max_qubits, args.max_terms, &mut rng)?;
        let beta = random_beta(&mut rng);
        let est_seed: u64 = rng.random();
        let z = exact_partition_real(&h, beta)?;
        let r = Sampler::new(est_seed, workers)?
            .estimate_partition_split(&h, beta, args.eps_ms, args.eps_mt, args.delta, 2.0 * z)?;
        rows.push(CorrectnessRow {
            instance,
            seed: est_seed,
            n: h.num_qubits(),
            l: h.len(),
            beta,
            z_exact: z,
            z_est: r.estimate,
            rel_error: (r.estimate - z) / z,
        });
    }
    Ok(rows)
}

pub const CORRECTNESS_HEADER: &str = "instance,seed,N,L,beta,Z_exact,Z_est,rel_error";

pub fn correctness_csv(rows: &[CorrectnessRow]) -> String {
    let mut out = String::from(CORRECTNESS_HEADER);
    out.push('\n');
    for r in rows {
        out += &format!(
            "{},{},{},{},{:?},{:?},{:?},{:?}\n",
            r.instance, r.seed, r.n, r.l, r.beta, r.z_exact, r.z_est, r.rel_error
        );
    }
    out
}

pub(crate) fn correctness_command(
    args: &CorrectnessArgs,
    seed: u64,
    workers: Option<usize>,
    config: Value,
) -> Result<Output, CliError> {
    let rows = run_correctness(args, seed, workers)?;
    let within = rows.iter().filter(|r| r.rel_error.abs() <= args.tolerance).count();
    eprintln!("{within}/{} instances within {}", rows.len(), args.tolerance);
    Ok(Output {
        csv: Some(correctness_csv(&rows)),
        json: json!({
            "config": config,
            "within_tolerance": within,
            "beta_distribution": "uniform[0.1, 2]",
            "rows": rows,
        }),
    })
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1)]
    pub lx: usize,
    #[arg(long, default_value_t = 2)]
    pub ly: usize,
    /// Hopping strength; β = β̃ / t and U = Ũ t.
    #[arg(long = "t", default_value_t = 1.0)]
    pub hopping: f64,
    /// Dimensionless inverse temperatures β̃ (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.75, 1.25])]
    pub beta_grid: Vec<f64>,
    /// Dimensionless interactions Ũ (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.75, 1.25])]
    pub u_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.15)]
    pub eps_ms: f64,
    #[arg(long, default_value_t = 0.15)]
    pub eps_mt: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Skip sampling; report plan sizes only.
    #[arg(long)]
    pub plan_only: bool,
}

impl Default for SweepArgs {
    fn default() -> Self {
        SweepArgs {
            lx: 1,
            ly: 2,
            hopping: 1.0,
            beta_grid: vec![0.25, 0.75, 1.25],
            u_grid: vec![0.25, 0.75, 1.25],
            eps_ms: 0.15,
            eps_mt: 0.15,
            delta: 0.2,
            plan_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta_tilde: f64,
    pub u_tilde: f64,
    pub n: usize,
    pub l: usize,
    pub nu: u64,
    pub frak_h: f64,
    pub omega: f64,
    pub shots: Option<u64>,
    pub rounds: Option<u32>,
    pub wall_seconds: Option<f64>,
    pub z_exact: Option<f64>,
    pub z_est: Option<f64>,
}

/// Largest register for which the sweep computes the dense Z; beyond it the
/// eigensolve dominates the run.
pub const SWEEP_EXACT_LIMIT: usize = 10;

/// One row per `(β̃, Ũ)`, β̃ varying fastest. `Z_max` is twice the dense Z
/// up to [`SWEEP_EXACT_LIMIT`] qubits and the trivial bound otherwise.
pub fn run_sweep(args: &SweepArgs, seed: u64, workers: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    if !(args.hopping > 0.0) {
        return Err(CliError::Usage("--t must be positive".into()));
    }
    let mut rows = Vec::with_capacity(args.beta_grid.len() * args.u_grid.len());
    let mut index = 0u64;
    for &u_tilde in &args.u_grid {
        let h = hubbard_jordan_wigner(&HubbardSpec {
            lx: args.lx,
            ly: args.ly,
            t: args.hopping,
            u: u_tilde * args.hopping,
        })?;
        let d = diagnostics(&h);
        for &beta_tilde in &args.beta_grid {
            let beta = beta_tilde / args.hopping;
            let plan = plan_trotter_multiplicative(&h, beta, args.eps_mt)?;
            let z_exact = if h.num_qubits() <= SWEEP_EXACT_LIMIT {
                Some(exact_partition_real(&h, beta)?)
            } else {
                None
            };
            let mut row = SweepRow {
                beta_tilde,
                u_tilde,
                n: h.num_qubits(),
                l: h.len(),
                nu: plan.nu,
                frak_h: d.frak_h,
                omega: d.omega,
                shots: None,
                rounds: None,
                wall_seconds: None,
                z_exact,
                z_est: None,
            };
            if !args.plan_only {
                let z_max = z_exact.map_or_else(|| trivial_z_max(&h, beta), |z| 2.0 * z);
                let sampler = Sampler::new(seed.wrapping_add(index), workers)?;
                let start = Instant::now();
                let r = sampler.estimate_multiplicative(&h, &plan, args.eps_ms, args.delta, z_max)?;
                row.wall_seconds = Some(start.elapsed().as_secs_f64());
                row.shots = Some(r.shots_used);
                row.rounds = Some(r.rounds);
                row.z_est = Some(r.estimate);
            }
            index += 1;
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: &str = "beta_tilde,U_tilde,N,L,nu,frak_h,omega,shots,rounds,wall_seconds,Z_exact,Z_est";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out += &format!(
            "{:?},{:?},{},{},{},{:?},{:?},{},{},{},{},{}\n",
            r.beta_tilde,
            r.u_tilde,
            r.n,
            r.l,
            r.nu,
            r.frak_h,
            r.omega,
            r.shots.map(|s| s.to_string()).unwrap_or_default(),
            r.rounds.map(|s| s.to_string()).unwrap_or_default(),
            csv_field(r.wall_seconds),
            csv_field(r.z_exact),
            csv_field(r.z_est),
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Monotonicity {
    /// ν never decreases as β̃ grows at fixed Ũ.
    pub nu_in_beta: bool,
    /// Ω never decreases as Ũ grows at fixed β̃.
    pub omega_in_u: bool,
}

pub fn sweep_monotonicity(rows: &[SweepRow]) -> Monotonicity {
    let mut nu_in_beta = true;
    let mut omega_in_u = true;
    for a in rows {
        for b in rows {
            if a.u_tilde == b.u_tilde && a.beta_tilde < b.beta_tilde && a.nu > b.nu {
                nu_in_beta = false;
            }
            if a.beta_tilde == b.beta_tilde && a.u_tilde < b.u_tilde && a.omega > b.omega {
                omega_in_u = false;
            }
        }
    }
    Monotonicity { nu_in_beta, omega_in_u }
}

pub(crate) fn sweep_command(
    args: &SweepArgs,
    seed: u64,
    workers: Option<usize>,
    config: Value,
) -> Result<Output, CliError> {
    let rows = run_sweep(args, seed, workers)?;
    let mono = sweep_monotonicity(&rows);
    eprintln!("{} grid points; ν monotone in β̃: {}; Ω monotone in Ũ: {}", rows.len(), mono.nu_in_beta, mono.omega_in_u);
    Ok(Output {
        csv: Some(sweep_csv(&rows)),
        json: json!({ "config": config, "monotonicity": mono, "rows": rows }),
    })
}

//! Acceptance criteria 1–9: one PASS/FAIL line per criterion, non-zero exit
//! if any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use pauliz::dqc1::{dqc1_partition_complex, gadget_soundness, Part, TraceMode};
use pauliz::hamiltonian::plan_trotter_multiplicative;
use pauliz::models::{random_beta, random_circuit, random_hamiltonian};
use pauliz::oracle::{exact_partition, exact_partition_real, exact_trotter, pauli_dense, pauli_exp, DenseOperator};
use pauliz::reduction::{reduce, verify_reduction, UDecompositionInstance};
use pauliz::sampler::{exp_split, PathSampler, Sampler};
use pauliz::{InverseTemperature, PauliHamiltonian, PauliString};
use pauliz_cli::experiments::{run_correctness, run_sweep, sweep_monotonicity, CorrectnessArgs, SweepArgs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Binomial floor `1 - δ - 3 sqrt(δ(1-δ)/n)` on an empirical success rate.
fn coverage_floor(delta: f64, n: usize) -> f64 {
    1.0 - delta - 3.0 * (delta * (1.0 - delta) / n as f64).sqrt()
}

fn c1_correctness() -> Verdict {
    let args = CorrectnessArgs::default();
    let rows = run_correctness(&args, 2024, None).unwrap();
    let within = rows.iter().filter(|r| r.rel_error.abs() <= 0.098).count();
    let finite = rows.iter().all(|r| r.rel_error.is_finite());
    let worst = rows.iter().map(|r| r.rel_error.abs()).fold(0.0, f64::max);
    verdict(
        rows.len() == 100 && finite && within >= 90,
        format!("{within}/100 within 0.098 (need 90), worst |rel| {worst:.4}"),
    )
}

fn c2_trotter_bound() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut held = 0;
    let mut worst_ratio = 0.0f64;
    for i in 0..50 {
        let h = random_hamiltonian(4, 5, &mut rng).unwrap();
        let beta = rng.random_range(0.05..=1.0);
        let eps = if i % 2 == 0 { 0.048 } else { 0.15 };
        let plan = plan_trotter_multiplicative(&h, beta, eps).unwrap();
        let z = exact_partition_real(&h, beta).unwrap();
        let zt = exact_trotter(&h, &plan).unwrap().trace;
        let err = (zt - z).norm();
        worst_ratio = worst_ratio.max(err / (eps * z));
        held += (err <= eps * z) as u32;
    }
    verdict(held == 50, format!("{held}/50 with |Z - Z_T| <= eps_mT Z, worst error/bound {worst_ratio:.3}"))
}

fn c3_exp_split() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let p = PauliString::from_index(n, rng.random_range(1..1u64 << (2 * n)));
        let c: f64 = rng.random_range(-3.0..3.0);
        let lhs = pauli_exp(&p, Complex64::new(c, 0.0));
        let id = DenseOperator::identity(n);
        let pd = pauli_dense(&p);
        let sign = c.signum();
        let closed = id
            .scale(Complex64::new(c.cosh(), 0.0))
            .add(&pd.scale(Complex64::new(sign * c.abs().sinh(), 0.0)));
        let s = exp_split(c);
        let split = id
            .scale(Complex64::new(s.p_identity * s.scale, 0.0))
            .add(&pd.scale(Complex64::new(s.sign as f64 * s.p_pauli * s.scale, 0.0)));
        worst = worst.max(lhs.max_abs_diff(&closed)).max(lhs.max_abs_diff(&split));
    }
    verdict(worst < 1e-12, format!("max-norm error {worst:.2e} over 100 cases (need < 1e-12)"))
}

fn c4_gadgets() -> Verdict {
    let r = gadget_soundness(4, 20, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let worst = r.max_real_error.max(r.max_imaginary_error).max(r.max_controlled_error);
    verdict(
        worst < 1e-10 && r.strings == 3 + 15 + 63 + 255,
        format!("{} strings x 20 parameters, worst max-norm error {worst:.2e} (need < 1e-10)", r.strings),
    )
}

fn c5_unbiased() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sampler = Sampler::new(55, None).unwrap();
    let mut ok = 0;
    let mut worst_z = 0.0f64;
    for i in 0..5 {
        let h = random_hamiltonian(3, 4, &mut rng).unwrap();
        let beta = random_beta(&mut rng);
        let plan = plan_trotter_multiplicative(&h, beta, 0.15).unwrap();
        let target = exact_trotter(&h, &plan).unwrap().trace.re;
        let stats = sampler.mean_of_shots(&h, &plan, i, 1_000_000).unwrap();
        let z = (stats.mean - target).abs() / stats.std_error.max(f64::MIN_POSITIVE);
        worst_z = worst_z.max(if stats.mean == target { 0.0 } else { z });
        ok += (stats.mean == target || z <= 5.0) as u32;
    }
    verdict(ok == 5, format!("{ok}/5 instances within 5 SE of tr(T_R), worst {worst_z:.2} SE"))
}

fn c6_additive_coverage() -> Verdict {
    let h = PauliHamiltonian::from_pairs(2, &[(0.6, "XI"), (-0.3, "ZZ"), (0.45, "IY"), (0.2, "YX")]).unwrap();
    let beta = 1.2;
    let delta = 0.1;
    let plan = plan_trotter_multiplicative(&h, beta, 0.048).unwrap();
    let eps_a = 0.05 * PathSampler::new(&h, &plan).unwrap().shot_bound();
    let zt = exact_trotter(&h, &plan).unwrap().trace.re;
    let runs = 200;
    let within = (0..runs)
        .filter(|&seed| {
            let r = Sampler::new(seed as u64, None).unwrap().estimate_additive(&h, &plan, eps_a, delta).unwrap();
            (r.estimate - zt).abs() <= eps_a
        })
        .count();
    let floor = coverage_floor(delta, runs);
    verdict(
        within as f64 >= floor * runs as f64,
        format!("{within}/{runs} within eps_a = {eps_a:.3} of Z_T (need rate >= {floor:.3})"),
    )
}

fn c7_reduction() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut coefficients_exact = true;
    let half = Complex64::new(0.5, 0.0);
    let (minus_i, plus_i) = (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5));
    for _ in 0..100 {
        let len = rng.random_range(0..30);
        let circuit = random_circuit(2, len, &mut rng).unwrap();
        let sigma = PauliString::from_index(2, rng.random_range(0..16));
        for part in [Part::Re, Part::Im] {
            let u = UDecompositionInstance::new(circuit.clone(), sigma.clone(), 0.05, part).unwrap();
            let r = verify_reduction(&u).unwrap();
            worst = worst.max(r.max_discrepancy);
            let coeffs: Vec<_> = reduce(&u).terms.iter().map(|t| t.coeff).collect();
            let expect = match part {
                Part::Re => vec![half, half],
                Part::Im => vec![minus_i, plus_i],
            };
            coefficients_exact &= coeffs == expect;
        }
    }
    verdict(
        worst < 1e-12 && coefficients_exact,
        format!("max discrepancy {worst:.2e} over 100 circuits x Re/Im, coefficient sets exact: {coefficients_exact}"),
    )
}

fn c8_complex_beta() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let delta = 0.1;
    let runs = 20;
    let mut within = 0;
    for i in 0..runs {
        let h = random_hamiltonian(3, 4, &mut rng).unwrap();
        let modulus: f64 = rng.random_range(0.1..=1.0);
        let angle: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let beta = InverseTemperature::new(modulus * angle.cos(), modulus * angle.sin()).unwrap();
        let n = h.num_qubits() as i32;
        let eps_a = 0.2 * 2f64.powi(n) * (beta.re.abs() * h.omega()).exp();
        let sampler = Sampler::new(800 + i as u64, None).unwrap();
        let r = dqc1_partition_complex(&h, beta, eps_a, delta, TraceMode::Expectation, &sampler).unwrap();
        let z = exact_partition(&h, beta).unwrap();
        within += ((r.estimate - z).norm() <= eps_a) as usize;
    }
    let floor = coverage_floor(delta, runs);
    verdict(
        within as f64 >= floor * runs as f64,
        format!("{within}/{runs} within eps_a of dense Z (need rate >= {floor:.3})"),
    )
}

fn c9_substitutions() -> Verdict {
    let sampled = run_sweep(&SweepArgs::default(), 9, None).unwrap();
    let wide = run_sweep(
        &SweepArgs {
            beta_grid: vec![0.1, 0.5, 1.0, 2.0, 4.0],
            u_grid: vec![0.0, 0.5, 2.0, 8.0],
            plan_only: true,
            ..SweepArgs::default()
        },
        9,
        None,
    )
    .unwrap();
    let (a, b) = (sweep_monotonicity(&sampled), sweep_monotonicity(&wide));
    let estimates_close = sampled
        .iter()
        .all(|r| (r.z_est.unwrap() - r.z_exact.unwrap()).abs() <= 0.3 * r.z_exact.unwrap());
    println!("     not reproduced: asymptotic runtime table (bounds, not measurements)");
    println!("     not reproduced: reference-solver wall-clock ratios (hardware specific)");
    println!("     not reproduced: 26-qubit, 60-term low-weight Hubbard encoding (Jordan-Wigner used instead)");
    verdict(
        a.nu_in_beta && a.omega_in_u && b.nu_in_beta && b.omega_in_u && estimates_close,
        format!(
            "sweep monotone (nu in beta: {}, Omega in U: {}) over {} sampled + {} planned points",
            a.nu_in_beta && b.nu_in_beta,
            a.omega_in_u && b.omega_in_u,
            sampled.len(),
            wide.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("C1 correctness experiment", c1_correctness),
        ("C2 Trotter bound", c2_trotter_bound),
        ("C3 Pauli exponential split", c3_exp_split),
        ("C4 gadget compilation", c4_gadgets),
        ("C5 sampler unbiasedness", c5_unbiased),
        ("C6 additive coverage", c6_additive_coverage),
        ("C7 circuit reduction", c7_reduction),
        ("C8 complex beta via clean qubit", c8_complex_beta),
        ("C9 substitutions and sweep", c9_substitutions),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} [{:.1}s]", v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}

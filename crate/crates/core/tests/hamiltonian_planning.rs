use pauliz::hamiltonian::{
    diagnostics, parse_hamiltonian, plan_trotter_additive, plan_trotter_multiplicative,
    write_hamiltonian,
};
use pauliz::models::{hubbard_jordan_wigner, random_hamiltonian_fixed, HubbardSpec};
use pauliz::oracle::{dense, exact_partition_real, exact_trotter};
use pauliz::{Error, InverseTemperature, PauliHamiltonian, Term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_h(seed: u64, n: usize, l: usize) -> PauliHamiltonian {
    random_hamiltonian_fixed(n, l, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// N_k from dense commutators.
fn brute_force_counts(h: &PauliHamiltonian) -> Vec<usize> {
    let mats: Vec<_> = h.terms().iter().map(|t| pauliz::oracle::pauli_dense(&t.pauli)).collect();
    (0..h.len())
        .map(|k| {
            (0..k)
                .filter(|&z| mats[z].mul(&mats[k]).max_abs_diff(&mats[k].mul(&mats[z])) > 0.0)
                .count()
        })
        .collect()
}

#[test]
fn non_commuting_counts_match_dense_scan() {
    for seed in 0..40 {
        let h = random_h(seed, 3, 4);
        let d = diagnostics(&h);
        assert_eq!(d.non_commuting, brute_force_counts(&h), "seed {seed}");
        let frak: f64 = h.terms().iter().zip(&d.non_commuting).map(|(t, &n)| t.coeff.abs() * n as f64).sum();
        assert!((d.frak_h - frak).abs() < 1e-12);
    }
}

#[test]
fn parse_example_and_length_mismatch() {
    let h = PauliHamiltonian::from_json_str(r#"{"num_qubits":1,"terms":[{"coeff":0.5,"pauli":"Z"}]}"#).unwrap();
    assert_eq!(h.len(), 1);
    assert_eq!(h.terms()[0].coeff, 0.5);
    let bad = PauliHamiltonian::from_json_str(r#"{"num_qubits":3,"terms":[{"coeff":0.5,"pauli":"XY"}]}"#);
    assert!(matches!(bad, Err(Error::Schema(_))));
    let bad = PauliHamiltonian::from_json_str(r#"{"num_qubits":1,"terms":[{"coeff":"x","pauli":"X"}]}"#);
    assert!(matches!(bad, Err(Error::Schema(_))));
    let bad = PauliHamiltonian::from_json_str(r#"{"num_qubits":1}"#);
    assert!(matches!(bad, Err(Error::Schema(_))));
}

#[test]
fn large_hubbard_file_round_trip() {
    let h = hubbard_jordan_wigner(&HubbardSpec { lx: 2, ly: 4, t: 1.0, u: 3.5 }).unwrap();
    assert!(h.len() >= 60);
    let dir = std::env::temp_dir().join(format!("pauliz-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("hubbard.json");
    write_hamiltonian(&h, &path).unwrap();
    assert_eq!(parse_hamiltonian(&path).unwrap(), h);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn additive_plan_with_unit_constant() {
    let h = PauliHamiltonian::from_pairs(1, &[(1.0, "Z")]).unwrap();
    let plan = plan_trotter_additive(&h, InverseTemperature::new(0.0, 1.0).unwrap(), 0.5).unwrap();
    assert_eq!(plan.nu, 4);
    assert!(plan.heuristic);
    assert_eq!(plan.imag_exponents, vec![0.0]);
    assert_eq!(plan.real_angles, vec![-0.25]);
    let zero = PauliHamiltonian::zero(4);
    assert_eq!(plan_trotter_additive(&zero, InverseTemperature::real(3.0), 0.1).unwrap().nu, 1);
    let huge = PauliHamiltonian::from_pairs(1, &[(1000.0, "Z")]).unwrap();
    assert!(matches!(
        plan_trotter_additive(&huge, InverseTemperature::real(1.0), 0.1),
        Err(Error::PlanInfeasible { .. })
    ));
    assert!(plan_trotter_additive(&h, InverseTemperature::real(1.0), 0.0).is_err());
}

#[test]
fn planned_steps_bound_the_relative_error_on_five_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let n = rand::Rng::random_range(&mut rng, 1..=5);
        let l = rand::Rng::random_range(&mut rng, 1..=6);
        let h = random_hamiltonian_fixed(n, l, &mut rng).unwrap();
        let beta = rand::Rng::random_range(&mut rng, 0.0..=1.0);
        for eps in [0.048, 0.15] {
            let plan = plan_trotter_multiplicative(&h, beta, eps).unwrap();
            let z = exact_partition_real(&h, beta).unwrap();
            let zt = exact_trotter(&h, &plan).unwrap().trace.re;
            assert!((z - zt).abs() <= eps * z, "{h:?} β={beta} ε={eps}");
        }
    }
}

proptest! {
    #[test]
    fn step_count_satisfies_its_inequality(seed in 0u64..10_000, beta in -3.0f64..3.0, eps in 0.001f64..2.0) {
        let h = random_h(seed, 3, 5);
        let d = diagnostics(&h);
        let plan = plan_trotter_multiplicative(&h, beta, eps).unwrap();
        prop_assert!(plan.nu >= 1);
        prop_assert!(plan.nu as f64 * eps.ln_1p() >= beta * beta * d.omega * d.frak_h * (1.0 - 1e-12));
        // Σ|c_j|·ν = |β|Ω.
        let total: f64 = plan.imag_exponents.iter().map(|c| c.abs()).sum::<f64>() * plan.nu as f64;
        prop_assert!((total - beta.abs() * d.omega).abs() <= 1e-9 * (1.0 + total));
    }

    #[test]
    fn diagnostics_ignore_coefficient_signs(seed in 0u64..10_000, flips in proptest::collection::vec(any::<bool>(), 5)) {
        let h = random_h(seed, 3, 5);
        let flipped = PauliHamiltonian::new(
            h.num_qubits(),
            h.terms()
                .iter()
                .zip(&flips)
                .map(|(t, &f)| Term { coeff: if f { -t.coeff } else { t.coeff }, pauli: t.pauli.clone() })
                .collect(),
        )
        .unwrap();
        let (a, b) = (diagnostics(&h), diagnostics(&flipped));
        prop_assert_eq!(a.omega, b.omega);
        prop_assert_eq!(a.frak_h, b.frak_h);
        prop_assert_eq!(a.xi, b.xi);
    }

    #[test]
    fn counts_after_permutation_match_dense(seed in 0u64..10_000, rot in 0usize..5) {
        let h = random_h(seed, 3, 5);
        let mut terms = h.terms().to_vec();
        let len = terms.len();
        terms.rotate_left(rot % len);
        let p = PauliHamiltonian::new(h.num_qubits(), terms).unwrap();
        prop_assert_eq!(diagnostics(&p).non_commuting, brute_force_counts(&p));
    }

    #[test]
    fn diagnostics_bounds(seed in 0u64..10_000) {
        let h = random_h(seed, 3, 5);
        let d = diagnostics(&h);
        prop_assert!(d.omega >= d.xi && d.xi >= 0.0);
        for (k, &n) in d.non_commuting.iter().enumerate() {
            prop_assert!(n <= k);
        }
        prop_assert!(d.frak_h <= (h.len().saturating_sub(1)) as f64 * d.omega + 1e-12);
    }

    #[test]
    fn json_round_trip(seed in 0u64..10_000) {
        let h = random_h(seed, 4, 6);
        prop_assert_eq!(PauliHamiltonian::from_json_str(&h.to_json_string()).unwrap(), h.clone());
        prop_assert_eq!(dense(&h).unwrap().hermiticity_defect(), 0.0);
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use pauliz::models::{
    hubbard_jordan_wigner, random_beta, random_hamiltonian, random_hamiltonian_fixed, tfim,
    HubbardSpec, RANDOM_BETA_RANGE,
};
use pauliz::oracle::{dense, eigenvalues, exact_partition_real};
use pauliz::PauliHamiltonian;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Annihilation operator for mode `p` on the Fock space of `n` modes.
/// Mode `p` is bit `n-1-p` of the basis index; the sign counts occupied
/// modes before `p`.
fn annihilate(n: usize, p: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let bit = 1 << (n - 1 - p);
        if x & bit != 0 {
            let before = (0..p).filter(|&k| x & (1 << (n - 1 - k)) != 0).count();
            let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
            m[(x ^ bit, x)] = Complex64::new(sign, 0.0);
        }
    }
    m
}

fn fermionic_hubbard(spec: &HubbardSpec) -> DMatrix<Complex64> {
    let n = spec.num_qubits();
    let a: Vec<_> = (0..n).map(|p| annihilate(n, p)).collect();
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for (i, j) in spec.bonds() {
        for s in 0..2 {
            let (p, q) = (2 * i + s, 2 * j + s);
            let hop = a[p].adjoint() * &a[q];
            h -= (&hop + hop.adjoint()) * Complex64::new(spec.t, 0.0);
        }
    }
    for i in 0..spec.sites() {
        let up = a[2 * i].adjoint() * &a[2 * i];
        let down = a[2 * i + 1].adjoint() * &a[2 * i + 1];
        h += up * down * Complex64::new(spec.u, 0.0);
    }
    h
}

fn expected_term_count(spec: &HubbardSpec) -> usize {
    let bonds = (spec.lx - 1) * spec.ly + spec.lx * (spec.ly - 1);
    let hop = if spec.t != 0.0 { 4 * bonds } else { 0 };
    let site = if spec.u != 0.0 { 3 * spec.sites() + 1 } else { 0 };
    hop + site
}

fn sorted_spectrum(h: &PauliHamiltonian) -> Vec<f64> {
    let mut e = eigenvalues(h).unwrap();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn jordan_wigner_matches_fermionic_operators() {
    for (lx, ly, t, u) in [(1, 1, 1.0, 2.0), (1, 2, 1.0, 4.0), (2, 1, -0.7, 1.3), (1, 3, 0.4, 0.0), (2, 2, 1.0, 3.0)] {
        let spec = HubbardSpec { lx, ly, t, u };
        let h = hubbard_jordan_wigner(&spec).unwrap();
        let diff = (dense(&h).unwrap().into_matrix() - fermionic_hubbard(&spec)).camax();
        assert!(diff < 1e-12, "{spec:?}: {diff}");
        assert_eq!(h.len(), expected_term_count(&spec), "{spec:?}");
    }
}

#[test]
fn term_counts_by_formula() {
    for lx in 1..=3 {
        for ly in 1..=4 {
            if 2 * lx * ly > 24 {
                continue;
            }
            for (t, u) in [(1.0, 1.0), (0.0, 2.0), (1.0, 0.0)] {
                let spec = HubbardSpec { lx, ly, t, u };
                assert_eq!(hubbard_jordan_wigner(&spec).unwrap().len(), expected_term_count(&spec));
            }
        }
    }
    let s = HubbardSpec { lx: 1, ly: 2, t: 1.0, u: 1.0 };
    assert_eq!(expected_term_count(&s), 11);
}

#[test]
fn single_site_partition() {
    for (beta, u) in [(0.5, 2.0), (1.7, -1.0), (0.0, 3.0)] {
        let h = hubbard_jordan_wigner(&HubbardSpec { lx: 1, ly: 1, t: 1.0, u }).unwrap();
        let z = exact_partition_real(&h, beta).unwrap();
        assert!((z - (3.0 + (-beta * u).exp())).abs() < 1e-12);
    }
}

#[test]
fn free_fermion_spectrum_is_symmetric() {
    let h = hubbard_jordan_wigner(&HubbardSpec { lx: 2, ly: 2, t: 1.0, u: 0.0 }).unwrap();
    let e = sorted_spectrum(&h);
    for (a, b) in e.iter().zip(e.iter().rev()) {
        assert!((a + b).abs() < 1e-10);
    }
}

#[test]
fn transposed_lattice_has_the_same_spectrum() {
    for spec in [HubbardSpec { lx: 1, ly: 3, t: 1.0, u: 2.5 }, HubbardSpec { lx: 1, ly: 4, t: 0.5, u: 1.0 }] {
        let (a, b) = (
            sorted_spectrum(&hubbard_jordan_wigner(&spec).unwrap()),
            sorted_spectrum(&hubbard_jordan_wigner(&spec.transposed()).unwrap()),
        );
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9, "{spec:?}");
        }
    }
}

#[test]
fn ising_chain_closed_forms() {
    let beta = 0.8;
    for n in 2..=6 {
        let classical = exact_partition_real(&tfim(n, 1.3, 0.0).unwrap(), beta).unwrap();
        let expect = 2.0 * (2.0 * (beta * 1.3f64).cosh()).powi(n as i32 - 1);
        assert!((classical - expect).abs() < 1e-10 * expect);
        let field = exact_partition_real(&tfim(n, 0.0, 0.6).unwrap(), beta).unwrap();
        let expect = (2.0 * (beta * 0.6f64).cosh()).powi(n as i32);
        assert!((field - expect).abs() < 1e-10 * expect);
    }
}

#[test]
fn random_coefficients_are_centered() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut coeffs = Vec::new();
    let mut betas = Vec::new();
    while coeffs.len() < 10_000 {
        let h = random_hamiltonian(3, 4, &mut rng).unwrap();
        coeffs.extend(h.terms().iter().map(|t| t.coeff));
        betas.push(random_beta(&mut rng));
    }
    let n = coeffs.len() as f64;
    let mean = coeffs.iter().sum::<f64>() / n;
    let var = coeffs.iter().map(|c| c * c).sum::<f64>() / n;
    assert!(mean.abs() < 5.0 * (1.0f64 / 3.0 / n).sqrt(), "{mean}");
    assert!((var - 1.0 / 3.0).abs() < 0.02, "{var}");
    assert!(betas.iter().all(|b| (RANDOM_BETA_RANGE.0..=RANDOM_BETA_RANGE.1).contains(b)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_models_round_trip(seed in any::<u64>(), lx in 1usize..=3, ly in 1usize..=3, t in -2.0f64..2.0, u in -4.0f64..4.0) {
        let h = hubbard_jordan_wigner(&HubbardSpec { lx, ly, t, u }).unwrap();
        prop_assert_eq!(PauliHamiltonian::from_json_str(&h.to_json_string()).unwrap(), h);
        let r = random_hamiltonian_fixed(4, 6, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(PauliHamiltonian::from_json_str(&r.to_json_string()).unwrap(), r);
        let chain = tfim(lx + ly, t, u).unwrap();
        prop_assert_eq!(PauliHamiltonian::from_json_str(&chain.to_json_string()).unwrap(), chain);
    }
}

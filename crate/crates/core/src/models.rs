//! Hamiltonian generators: random small instances, the transverse-field
//! Ising chain and the Fermi-Hubbard model under Jordan-Wigner.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::hamiltonian::{PauliHamiltonian, Term};
use crate::pauli::{Letter, PauliString};

/// Largest Hubbard register (two modes per site).
pub const HUBBARD_CAPACITY: usize = 24;

/// Range of the random inverse temperature.
pub const RANDOM_BETA_RANGE: (f64, f64) = (0.1, 2.0);

/// `N ~ U{1..max_n}`, `L ~ U{1..max_l}` (capped at `4^N - 1`), coefficients
/// `U[-1, 1]`, and distinct strings drawn uniformly from the non-identity
/// Pauli strings on `N` qubits.
pub fn random_hamiltonian<R: Rng + ?Sized>(
    max_n: usize,
    max_l: usize,
    rng: &mut R,
) -> Result<PauliHamiltonian> {
    if max_n == 0 || max_l == 0 {
        return Err(Error::InvalidArgument("qubit and term bounds must be positive".into()));
    }
    if max_n > 31 {
        return Err(Error::InvalidArgument("random instances support at most 31 qubits".into()));
    }
    let n = rng.random_range(1..=max_n);
    let l = rng.random_range(1..=max_l);
    random_hamiltonian_fixed(n, l, rng)
}

/// As [`random_hamiltonian`] with fixed `N` and `L`.
pub fn random_hamiltonian_fixed<R: Rng + ?Sized>(
    n: usize,
    l: usize,
    rng: &mut R,
) -> Result<PauliHamiltonian> {
    if n == 0 || n > 31 {
        return Err(Error::InvalidArgument(format!("unsupported qubit count {n}")));
    }
    let strings = (1u64 << (2 * n)) - 1;
    let l = l.min(strings as usize);
    let mut picked: Vec<u64> = Vec::with_capacity(l);
    let mut terms = Vec::with_capacity(l);
    while terms.len() < l {
        let index = rng.random_range(1..=strings);
        if picked.contains(&index) {
            continue;
        }
        picked.push(index);
        terms.push(Term {
            coeff: rng.random_range(-1.0..=1.0),
            pauli: PauliString::from_index(n, index),
        });
    }
    PauliHamiltonian::new(n, terms)
}

pub fn random_beta<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(RANDOM_BETA_RANGE.0..=RANDOM_BETA_RANGE.1)
}

/// `-J Σ Z_i Z_{i+1} - g Σ X_i` on an open chain; bonds first, then fields.
pub fn tfim(n: usize, j: f64, g: f64) -> Result<PauliHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("an Ising chain needs n ≥ 2, got {n}")));
    }
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        let mut p = PauliString::identity(n);
        p.set(i, Letter::Z);
        p.set(i + 1, Letter::Z);
        terms.push(Term { coeff: -j, pauli: p });
    }
    for i in 0..n {
        terms.push(Term {
            coeff: -g,
            pauli: PauliString::single(n, i, Letter::X),
        });
    }
    PauliHamiltonian::new(n, terms)
}

/// Open-boundary Hubbard lattice. Sites are numbered row-major,
/// `site = y·lx + x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardSpec {
    pub lx: usize,
    pub ly: usize,
    pub t: f64,
    pub u: f64,
}

impl HubbardSpec {
    pub fn sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.sites()
    }

    /// Jordan-Wigner mode of `(site, spin)`: site-major, spin-minor.
    pub fn mode(site: usize, spin: usize) -> usize {
        2 * site + spin
    }

    /// Nearest-neighbour bonds `(i, j)` with `i < j`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.ly {
            for x in 0..self.lx {
                let s = y * self.lx + x;
                if x + 1 < self.lx {
                    out.push((s, s + 1));
                }
                if y + 1 < self.ly {
                    out.push((s, s + self.lx));
                }
            }
        }
        out
    }

    pub fn transposed(&self) -> HubbardSpec {
        HubbardSpec {
            lx: self.ly,
            ly: self.lx,
            ..*self
        }
    }
}

/// `-t Σ_{⟨ij⟩,s} (a†_{is} a_{js} + h.c.) + U Σ_i n_{i↑} n_{i↓}` as Pauli
/// terms. Hopping between modes `p < q` becomes
/// `-t/2 (X_p Z..Z X_q + Y_p Z..Z Y_q)`; each onsite term becomes
/// `U/4 (I - Z_p - Z_q + Z_p Z_q)` with all identity parts merged into one
/// final term. Zero `t` or `U` contributions are omitted.
pub fn hubbard_jordan_wigner(spec: &HubbardSpec) -> Result<PauliHamiltonian> {
    if spec.lx == 0 || spec.ly == 0 {
        return Err(Error::InvalidArgument("lattice dimensions must be positive".into()));
    }
    if !spec.t.is_finite() || !spec.u.is_finite() {
        return Err(Error::InvalidArgument("t and U must be finite".into()));
    }
    let n = spec.num_qubits();
    if n > HUBBARD_CAPACITY {
        return Err(Error::Capacity {
            qubits: n,
            limit: HUBBARD_CAPACITY,
        });
    }
    let mut terms = Vec::new();
    if spec.t != 0.0 {
        for (i, j) in spec.bonds() {
            for spin in 0..2 {
                let p = HubbardSpec::mode(i, spin);
                let q = HubbardSpec::mode(j, spin);
                for end in [Letter::X, Letter::Y] {
                    let mut s = PauliString::identity(n);
                    s.set(p, end);
                    for m in p + 1..q {
                        s.set(m, Letter::Z);
                    }
                    s.set(q, end);
                    terms.push(Term {
                        coeff: -spec.t / 2.0,
                        pauli: s,
                    });
                }
            }
        }
    }
    if spec.u != 0.0 {
        let quarter = spec.u / 4.0;
        for site in 0..spec.sites() {
            let p = HubbardSpec::mode(site, 0);
            let q = HubbardSpec::mode(site, 1);
            terms.push(Term {
                coeff: -quarter,
                pauli: PauliString::single(n, p, Letter::Z),
            });
            terms.push(Term {
                coeff: -quarter,
                pauli: PauliString::single(n, q, Letter::Z),
            });
            let mut zz = PauliString::single(n, p, Letter::Z);
            zz.set(q, Letter::Z);
            terms.push(Term {
                coeff: quarter,
                pauli: zz,
            });
        }
        terms.push(Term {
            coeff: quarter * spec.sites() as f64,
            pauli: PauliString::identity(n),
        });
    }
    PauliHamiltonian::new(n, terms)
}

/// `len` gates drawn uniformly from the full gate set, with uniform qubits
/// and angles in `[-π, π)`. Two-qubit gates need `n ≥ 2`.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
    }
    let kinds = if n >= 2 { 10 } else { 8 };
    let pi = std::f64::consts::PI;
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let other = |rng: &mut R| (q + rng.random_range(1..n)) % n;
        let gate = match rng.random_range(0..kinds) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Sdg(q),
            3 => Gate::X(q),
            4 => Gate::Y(q),
            5 => Gate::Z(q),
            6 => Gate::Rx(q, rng.random_range(-pi..pi)),
            7 => Gate::Rz(q, rng.random_range(-pi..pi)),
            8 => Gate::Cx { control: q, target: other(rng) },
            _ => Gate::Crz { control: q, target: other(rng), angle: rng.random_range(-pi..pi) },
        };
        gates.push(gate);
    }
    Circuit::new(n, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::diagnostics;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tfim_two_sites() {
        let h = tfim(2, 1.5, 0.25).unwrap();
        let got: Vec<(f64, String)> = h.terms().iter().map(|t| (t.coeff, t.pauli.to_string())).collect();
        assert_eq!(
            got,
            vec![(-1.5, "ZZ".into()), (-0.25, "XI".into()), (-0.25, "IX".into())]
        );
        assert!(tfim(1, 1.0, 1.0).is_err());
        assert_eq!(diagnostics(&tfim(5, 1.0, 0.0).unwrap()).frak_h, 0.0);
    }

    #[test]
    fn random_draw_is_reproducible_and_valid() {
        let a = random_hamiltonian(3, 4, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = random_hamiltonian(3, 4, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let h = random_hamiltonian(3, 4, &mut rng).unwrap();
            assert!((1..=3).contains(&h.num_qubits()));
            assert!((1..=4).contains(&h.len()));
            for (i, t) in h.terms().iter().enumerate() {
                assert!(!t.pauli.is_identity());
                assert!((-1.0..=1.0).contains(&t.coeff));
                assert!(h.terms()[..i].iter().all(|u| u.pauli != t.pauli));
            }
        }
    }

    #[test]
    fn single_qubit_draws_are_capped_at_three_terms() {
        let h = random_hamiltonian_fixed(1, 10, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn hubbard_single_site() {
        let h = hubbard_jordan_wigner(&HubbardSpec { lx: 1, ly: 1, t: 1.0, u: 2.0 }).unwrap();
        assert_eq!(h.num_qubits(), 2);
        assert_eq!(h.len(), 4);
        assert_eq!(h.identity_offset(), 0.5);
    }

    #[test]
    fn hubbard_capacity_and_term_count() {
        let h = hubbard_jordan_wigner(&HubbardSpec { lx: 1, ly: 2, t: 1.0, u: 4.0 }).unwrap();
        assert_eq!((h.num_qubits(), h.len()), (4, 11));
        assert_eq!(h.terms()[0].pauli.to_string(), "XZXI");
        assert_eq!(h.terms()[1].pauli.to_string(), "YZYI");
        let big = HubbardSpec { lx: 4, ly: 4, t: 1.0, u: 1.0 };
        assert!(matches!(hubbard_jordan_wigner(&big), Err(Error::Capacity { .. })));
        let no_u = hubbard_jordan_wigner(&HubbardSpec { lx: 2, ly: 2, t: 1.0, u: 0.0 }).unwrap();
        assert_eq!(no_u.len(), 4 * 2 * 2);
    }
}

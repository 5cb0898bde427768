//! Spin-chain Hamiltonians as weighted Pauli-string sums.
//!
//! All chains use open boundary conditions.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigen::lowest_eigenpair;
use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Largest system handled by the exact solver.
pub const MAX_EXACT_QUBITS: usize = 14;
/// Up to this size the exact solver uses a dense eigendecomposition.
pub const DENSE_QUBITS: usize = 8;

/// Residual target for exact eigenpairs.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
/// Gaps below this mark the ground state as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

const LANCZOS_SEED: u64 = 0x5eed_1a2c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// `coefficient * P_0 (x) P_1 (x) ...`, label `i` acting on qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    coefficient: f64,
    paulis: Vec<Pauli>,
    x_mask: usize,
    z_mask: usize,
    // i^{#Y}
    y_phase: C64,
}

impl PauliString {
    pub fn new(coefficient: f64, paulis: Vec<Pauli>) -> Result<Self> {
        if paulis.iter().all(|p| *p == Pauli::I) {
            return Err(Error::validation(
                "identity-only Pauli string; use PauliString::constant",
            ));
        }
        Self::build(coefficient, paulis)
    }

    /// Explicit constant term `c * I`.
    pub fn constant(num_qubits: usize, coefficient: f64) -> Result<Self> {
        Self::build(coefficient, vec![Pauli::I; num_qubits])
    }

    /// String on `num_qubits` with the listed non-identity factors.
    pub fn sparse(num_qubits: usize, coefficient: f64, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut paulis = vec![Pauli::I; num_qubits];
        for &(q, p) in factors {
            if q >= num_qubits {
                return Err(Error::Index {
                    index: q,
                    len: num_qubits,
                });
            }
            paulis[q] = p;
        }
        Self::new(coefficient, paulis)
    }

    fn build(coefficient: f64, paulis: Vec<Pauli>) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::validation("Pauli coefficient must be finite"));
        }
        let (mut x_mask, mut z_mask, mut ny) = (0usize, 0usize, 0u32);
        for (q, p) in paulis.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x_mask |= 1 << q,
                Pauli::Z => z_mask |= 1 << q,
                Pauli::Y => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    ny += 1;
                }
            }
        }
        let y_phase = match ny % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        Ok(Self {
            coefficient,
            paulis,
            x_mask,
            z_mask,
            y_phase,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.paulis
    }

    pub fn is_constant(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// `out += coefficient * P * input`.
    fn accumulate(&self, input: &[C64], out: &mut [C64]) {
        let w = self.y_phase * self.coefficient;
        let (xm, zm) = (self.x_mask, self.z_mask);
        for (x, amp) in input.iter().enumerate() {
            let v = w * amp;
            if (x & zm).count_ones() & 1 == 0 {
                out[x ^ xm] += v;
            } else {
                out[x ^ xm] -= v;
            }
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+} ", self.coefficient)?;
        for p in &self.paulis {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<PauliString>,
}

/// Exact lowest eigenpair with its gap to the next level.
#[derive(Debug, Clone)]
pub struct GroundStateSolution {
    pub energy: f64,
    pub state: StateVector,
    /// `E_1 - E_0`.
    pub gap: f64,
    /// Set when `gap < 1e-10`; the returned vector is then one arbitrary member of the ground manifold.
    pub degenerate: bool,
    pub residual: f64,
}

fn check_chain(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::config(format!("chain needs at least 2 qubits, got {n}")));
    }
    if n > crate::statevector::MAX_QUBITS {
        return Err(Error::config(format!("chain of {n} qubits is too large")));
    }
    Ok(())
}

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

impl Hamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.paulis.len() != num_qubits) {
            return Err(Error::validation(format!(
                "term {t} has length {} but the Hamiltonian acts on {num_qubits} qubits",
                t.paulis.len()
            )));
        }
        Ok(Self { num_qubits, terms })
    }

    /// `-J sum Z_i Z_{i+1} - h_x sum X_i`.
    pub fn tfim(n: usize, j: f64, h_x: f64) -> Result<Self> {
        check_chain(n)?;
        let mut terms = Vec::with_capacity(2 * n - 1);
        for i in 0..n - 1 {
            terms.push(PauliString::sparse(n, -j, &[(i, Pauli::Z), (i + 1, Pauli::Z)])?);
        }
        for i in 0..n {
            terms.push(PauliString::sparse(n, -h_x, &[(i, Pauli::X)])?);
        }
        Self::new(n, terms)
    }

    /// `sum_a J_a S^a_i S^a_{i+1} + h_x sum S^x_i` with `S = sigma / 2`.
    pub fn xyz(n: usize, j_x: f64, j_y: f64, j_z: f64, h_x: f64) -> Result<Self> {
        check_chain(n)?;
        let mut terms = Vec::new();
        for i in 0..n - 1 {
            for (p, jc) in AXES.iter().zip([j_x, j_y, j_z]) {
                terms.push(PauliString::sparse(n, jc / 4.0, &[(i, *p), (i + 1, *p)])?);
            }
        }
        for i in 0..n {
            terms.push(PauliString::sparse(n, h_x / 2.0, &[(i, Pauli::X)])?);
        }
        Self::new(n, terms)
    }

    /// Spin-1 Heisenberg chain `J sum S_i . S_{i+1}` encoded on `2 * n_pairs`
    /// qubits, each spin-1 site carried by the triplet of a qubit pair
    /// `(2i, 2i+1)`. A ferromagnetic intra-pair coupling `-|J_FM| sigma.sigma`
    /// lifts the singlets; in the all-triplet sector the spectrum equals the
    /// spin-1 chain shifted by [`Hamiltonian::spin1_offset`].
    pub fn spin1_heisenberg(n_pairs: usize, j: f64, j_fm_magnitude: f64) -> Result<Self> {
        if n_pairs < 2 {
            return Err(Error::config(format!(
                "spin-1 chain needs at least 2 sites, got {n_pairs}"
            )));
        }
        let n = 2 * n_pairs;
        check_chain(n)?;
        let mut terms = Vec::new();
        for i in 0..n_pairs - 1 {
            let (a, b) = (2 * i, 2 * i + 1);
            let (c, d) = (2 * i + 2, 2 * i + 3);
            for p in AXES {
                for l in [a, b] {
                    for r in [c, d] {
                        terms.push(PauliString::sparse(n, j / 4.0, &[(l, p), (r, p)])?);
                    }
                }
            }
        }
        let fm = -j_fm_magnitude.abs();
        for i in 0..n_pairs {
            for p in AXES {
                terms.push(PauliString::sparse(n, fm, &[(2 * i, p), (2 * i + 1, p)])?);
            }
        }
        Self::new(n, terms)
    }

    /// Energy of the intra-pair coupling when every pair is a triplet.
    pub fn spin1_offset(n_pairs: usize, j_fm_magnitude: f64) -> f64 {
        -(n_pairs as f64) * j_fm_magnitude.abs()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// Raw `out = H * input` on amplitude slices of matching length.
    pub fn apply(&self, input: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for t in &self.terms {
            t.accumulate(input, out);
        }
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::validation(format!(
                "state has {} qubits, Hamiltonian {}",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// `H |psi>`, unnormalized.
    pub fn matvec(&self, state: &StateVector) -> Result<StateVector> {
        self.check_state(state)?;
        let mut out = vec![C64::new(0.0, 0.0); state.dim()];
        self.apply(state.amplitudes(), &mut out);
        StateVector::from_amplitudes(out)
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.check_state(state)?;
        let mut out = vec![C64::new(0.0, 0.0); state.dim()];
        self.apply(state.amplitudes(), &mut out);
        let e = crate::kernels::inner(state.amplitudes(), &out);
        if e.im.abs() > 1e-10 * e.re.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "expectation value has imaginary part {:.3e}",
                e.im
            )));
        }
        Ok(e.re)
    }

    /// Dense `2^N x 2^N` matrix; practical up to about 10 qubits.
    pub fn dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for k in 0..dim {
            e[k] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for (r, v) in col.iter().enumerate() {
                m[(r, k)] = *v;
            }
            e[k] = C64::new(0.0, 0.0);
        }
        m
    }

    /// All eigenvalues, ascending, via dense diagonalization.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        if self.num_qubits > 11 {
            return Err(Error::config("dense spectrum limited to 11 qubits"));
        }
        let mut v: Vec<f64> = SymmetricEigen::new(self.dense()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// Exact ground state: dense below [`DENSE_QUBITS`], deflated Lanczos above.
    pub fn ground_state(&self) -> Result<GroundStateSolution> {
        if self.num_qubits > MAX_EXACT_QUBITS {
            return Err(Error::config(format!(
                "exact diagonalization of {} qubits is intractable (max {MAX_EXACT_QUBITS})",
                self.num_qubits
            )));
        }
        let dim = 1usize << self.num_qubits;
        let (energy, vector, gap) = if self.num_qubits <= DENSE_QUBITS {
            let eig = SymmetricEigen::new(self.dense());
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let e0 = eig.eigenvalues[order[0]];
            let gap = eig.eigenvalues[order[1]] - e0;
            let v: Vec<C64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
            (e0, v, gap)
        } else {
            let op = |x: &[C64], y: &mut [C64]| self.apply(x, y);
            let p0 = lowest_eigenpair(dim, op, &[], LANCZOS_SEED, 0.1 * EIGEN_RESIDUAL_TOL)?;
            let p1 = lowest_eigenpair(
                dim,
                op,
                std::slice::from_ref(&p0.vector),
                LANCZOS_SEED + 1,
                1e-7,
            )?;
            (p0.value, p0.vector, p1.value - p0.value)
        };
        let mut state = StateVector::from_amplitudes(vector)?;
        canonical_phase(&mut state);
        state.normalize()?;
        let residual = self.residual(&state, energy)?;
        if residual > EIGEN_RESIDUAL_TOL {
            return Err(Error::Numerical(format!(
                "ground state residual {residual:.3e} exceeds {EIGEN_RESIDUAL_TOL:.0e}"
            )));
        }
        Ok(GroundStateSolution {
            energy,
            state,
            gap,
            degenerate: gap < DEGENERACY_GAP,
            residual,
        })
    }

    /// `|H psi - E psi|`.
    pub fn residual(&self, state: &StateVector, energy: f64) -> Result<f64> {
        let h = self.matvec(state)?;
        Ok(h
            .amplitudes()
            .iter()
            .zip(state.amplitudes())
            .map(|(a, b)| (a - b * energy).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// Rotate the global phase so the largest amplitude is real and positive.
fn canonical_phase(state: &mut StateVector) {
    let k = state.dominant_index();
    let a = state.amplitudes()[k];
    if a.norm() > 0.0 {
        let ph = a.conj() / a.norm();
        state.amplitudes_mut().iter_mut().for_each(|x| *x *= ph);
    }
}

/// Ground energy of the spin-1 chain `J sum S_i . S_{i+1}` (open), computed
/// directly in the `3^n` spin-1 basis.
pub fn spin1_direct_ed(n_sites: usize, j: f64) -> Result<f64> {
    if !(2..=7).contains(&n_sites) {
        return Err(Error::config(format!(
            "direct spin-1 diagonalization supports 2..=7 sites, got {n_sites}"
        )));
    }
    let dim = 3usize.pow(n_sites as u32);
    // digit d encodes m = 1 - d
    let digit = |x: usize, site: usize| (x / 3usize.pow(site as u32)) % 3;
    let pow3: Vec<usize> = (0..n_sites).map(|s| 3usize.pow(s as u32)).collect();
    let apply = |input: &[C64], out: &mut [C64]| {
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (x, amp) in input.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            for s in 0..n_sites - 1 {
                let (d1, d2) = (digit(x, s), digit(x, s + 1));
                let (m1, m2) = (1.0 - d1 as f64, 1.0 - d2 as f64);
                out[x] += amp * (j * m1 * m2);
                // S+ on site s, S- on site s+1 (and the reverse); each matrix element sqrt(2)
                if d1 > 0 && d2 < 2 {
                    let y = x - pow3[s] + pow3[s + 1];
                    out[y] += amp * j;
                }
                if d1 < 2 && d2 > 0 {
                    let y = x + pow3[s] - pow3[s + 1];
                    out[y] += amp * j;
                }
            }
        }
    };
    if dim <= 243 {
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for k in 0..dim {
            e[k] = C64::new(1.0, 0.0);
            apply(&e, &mut col);
            for (r, v) in col.iter().enumerate() {
                m[(r, k)] = v.re;
            }
            e[k] = C64::new(0.0, 0.0);
        }
        let eig = SymmetricEigen::new(m);
        Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    } else {
        Ok(lowest_eigenpair(dim, apply, &[], LANCZOS_SEED, 1e-10)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_action() {
        let y = PauliString::new(1.0, vec![Pauli::Y]).unwrap();
        let h = Hamiltonian::new(1, vec![y]).unwrap();
        let mut out = vec![C64::new(0.0, 0.0); 2];
        h.apply(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &mut out);
        assert_eq!(out, vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)]);
        h.apply(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], &mut out);
        assert_eq!(out, vec![C64::new(0.0, -1.0), C64::new(0.0, 0.0)]);
    }

    #[test]
    fn term_counts_and_errors() {
        assert_eq!(Hamiltonian::tfim(12, 1.0, 0.73).unwrap().terms().len(), 23);
        assert!(matches!(Hamiltonian::tfim(1, 1.0, 1.0), Err(Error::Config(_))));
        assert!(matches!(Hamiltonian::xyz(1, 1.0, 1.0, 1.0, 0.0), Err(Error::Config(_))));
        assert!(matches!(
            Hamiltonian::spin1_heisenberg(1, 1.0, 10.0),
            Err(Error::Config(_))
        ));
        assert_eq!(
            Hamiltonian::spin1_heisenberg(6, 1.0, 10.0).unwrap().num_qubits(),
            12
        );
        assert!(PauliString::new(1.0, vec![Pauli::I, Pauli::I]).is_err());
        assert!(PauliString::new(f64::NAN, vec![Pauli::X]).is_err());
    }

    #[test]
    fn small_ground_energies() {
        let e = Hamiltonian::tfim(2, 1.0, 1.0).unwrap().ground_state().unwrap();
        assert!((e.energy + 5f64.sqrt()).abs() < 1e-10);

        let s = Hamiltonian::xyz(2, 1.0, 1.0, 1.0, 0.0).unwrap().ground_state().unwrap();
        assert!((s.energy + 0.75).abs() < 1e-12);
        let a = s.state.amplitudes();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(a[0].norm() < 1e-12 && a[3].norm() < 1e-12);
        assert!((a[1] + a[2]).norm() < 1e-12);
        assert!((a[1].norm() - r).abs() < 1e-12);

        let free = Hamiltonian::xyz(2, 0.0, 0.0, 0.0, 1.0).unwrap().ground_state().unwrap();
        assert!((free.energy + 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_ising_is_degenerate() {
        let g = Hamiltonian::tfim(12, 1.0, 0.0).unwrap().ground_state().unwrap();
        assert!((g.energy + 11.0).abs() < 1e-9);
        assert!(g.degenerate);
        assert!(g.residual < EIGEN_RESIDUAL_TOL);
    }

    #[test]
    fn matvec_basics() {
        let h = Hamiltonian::tfim(2, 1.0, 0.0).unwrap();
        let z = StateVector::zero_state(2).unwrap();
        let hz = h.matvec(&z).unwrap();
        assert!((hz.amplitudes()[0] + 1.0).norm() < 1e-15);
        let c = Hamiltonian::new(3, vec![PauliString::constant(3, 2.5).unwrap()]).unwrap();
        let b = StateVector::basis_state(3, 6).unwrap();
        assert!((c.matvec(&b).unwrap().amplitudes()[6] - 2.5).norm() < 1e-15);
        assert!(h.matvec(&b).is_err());
        assert!((Hamiltonian::tfim(2, 1.0, 1.0).unwrap().expectation(&z).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spin1_direct_small() {
        assert!((spin1_direct_ed(2, 1.0).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(spin1_direct_ed(3, 0.0).unwrap(), 0.0);
        assert!(spin1_direct_ed(8, 1.0).is_err());
        assert!(spin1_direct_ed(1, 1.0).is_err());
    }

    #[test]
    fn too_large_for_exact() {
        let h = Hamiltonian::tfim(15, 1.0, 1.0).unwrap();
        assert!(matches!(h.ground_state(), Err(Error::Config(_))));
    }
}

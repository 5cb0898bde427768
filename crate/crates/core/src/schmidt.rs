//! Schmidt decomposition across a bipartition of the qubit register.
//!
//! Qubits `[0, cut)` form the left factor, so the amplitude at index `x`
//! sits at row `x mod 2^cut`, column `x >> cut` of the reshaped matrix.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Singular values at or below this are treated as exact zeros.
pub const CLAMP: f64 = 1e-14;
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    cut: usize,
    values: Vec<f64>,
    left: Vec<StateVector>,
    right: Vec<StateVector>,
}

/// Reshape `state` into the `2^cut x 2^(N-cut)` coefficient matrix.
pub fn coefficient_matrix(state: &StateVector, cut: usize) -> Result<DMatrix<C64>> {
    let n = state.num_qubits();
    if cut == 0 || cut >= n {
        return Err(Error::validation(format!(
            "cut {cut} must lie in [1, {}) for {n} qubits",
            n
        )));
    }
    let rows = 1usize << cut;
    let cols = 1usize << (n - cut);
    // column-major storage matches the little-endian index layout exactly
    Ok(DMatrix::from_column_slice(rows, cols, state.amplitudes()))
}

impl SchmidtDecomposition {
    pub fn new(state: &StateVector, cut: usize) -> Result<Self> {
        let m = coefficient_matrix(state, cut)?;
        let (rows, cols) = m.shape();
        let svd = m.svd(true, true);
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

        let mut values = Vec::with_capacity(order.len());
        let mut left = Vec::with_capacity(order.len());
        let mut right = Vec::with_capacity(order.len());
        for &k in &order {
            let s = svd.singular_values[k];
            values.push(if s <= CLAMP { 0.0 } else { s });
            let l: Vec<C64> = (0..rows).map(|r| u[(r, k)]).collect();
            let rv: Vec<C64> = (0..cols).map(|c| v_t[(k, c)]).collect();
            left.push(StateVector::from_amplitudes(l)?);
            right.push(StateVector::from_amplitudes(rv)?);
        }
        Ok(Self {
            cut,
            values,
            left,
            right,
        })
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    /// Schmidt coefficients, descending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_states(&self) -> &[StateVector] {
        &self.left
    }

    pub fn right_states(&self) -> &[StateVector] {
        &self.right
    }

    /// Number of nonzero coefficients.
    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    /// `sum_{i<=d} lambda_i |l_i>|r_i>`, renormalized.
    pub fn truncate_to_state(&self, d: usize) -> Result<StateVector> {
        let rank = self.rank();
        if d == 0 || d > rank {
            return Err(Error::validation(format!(
                "truncation rank {d} outside [1, {rank}]"
            )));
        }
        let n = self.cut + self.right[0].num_qubits();
        let rows = 1usize << self.cut;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for i in 0..d {
            let lam = self.values[i];
            let l = self.left[i].amplitudes();
            for (c, r) in self.right[i].amplitudes().iter().enumerate() {
                let w = r * lam;
                let col = &mut amps[c * rows..(c + 1) * rows];
                for (a, x) in col.iter_mut().zip(l) {
                    *a += x * w;
                }
            }
        }
        let mut s = StateVector::from_amplitudes(amps)?;
        s.normalize()?;
        Ok(s)
    }

    /// `sum_{i>d} lambda_i^2`. `d` may exceed the rank (the result is then 0).
    pub fn discarded_weight(&self, d: usize) -> Result<f64> {
        if d > self.values.len() {
            return Err(Error::validation(format!(
                "truncation rank {d} exceeds {} Schmidt values",
                self.values.len()
            )));
        }
        // `+ 0.0` folds the -0.0 of an empty sum into +0.0
        Ok(self.values[d..].iter().map(|v| v * v).sum::<f64>().clamp(0.0, 1.0) + 0.0)
    }

    /// `sum_{i<=d} lambda_i^2`.
    pub fn retained_weight(&self, d: usize) -> f64 {
        self.values[..d.min(self.values.len())].iter().map(|v| v * v).sum()
    }
}

/// Number of Schmidt coefficients above `tol`.
pub fn schmidt_rank(state: &StateVector, cut: usize, tol: f64) -> Result<usize> {
    let d = SchmidtDecomposition::new(state, cut)?;
    Ok(d.values().iter().filter(|&&v| v > tol).count())
}

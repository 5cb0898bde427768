//! Dense N-qubit pure states.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels;

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 16;

const UNITARITY_TOL: f64 = 1e-12;

/// Rotation axis. `R_a(theta) = exp(-i theta sigma_a / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        f.write_str(s)
    }
}

/// A validated 2x2 unitary, optionally remembering the rotation it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitGate {
    matrix: [[C64; 2]; 2],
    rotation: Option<(Axis, f64)>,
}

impl SingleQubitGate {
    pub fn rotation(axis: Axis, angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        let z = C64::new(0.0, 0.0);
        let matrix = match axis {
            Axis::X => [
                [C64::new(c, 0.0), C64::new(0.0, -s)],
                [C64::new(0.0, -s), C64::new(c, 0.0)],
            ],
            Axis::Y => [
                [C64::new(c, 0.0), C64::new(-s, 0.0)],
                [C64::new(s, 0.0), C64::new(c, 0.0)],
            ],
            Axis::Z => [[C64::new(c, -s), z], [z, C64::new(c, s)]],
        };
        Self {
            matrix,
            rotation: Some((axis, angle)),
        }
    }

    pub fn rx(angle: f64) -> Self {
        Self::rotation(Axis::X, angle)
    }

    pub fn ry(angle: f64) -> Self {
        Self::rotation(Axis::Y, angle)
    }

    pub fn rz(angle: f64) -> Self {
        Self::rotation(Axis::Z, angle)
    }

    pub fn identity() -> Self {
        Self::rotation(Axis::Z, 0.0)
    }

    /// Wrap an explicit matrix, rejecting anything with `|U^dagger U - I| > 1e-12`.
    pub fn from_matrix(matrix: [[C64; 2]; 2]) -> Result<Self> {
        let gate = Self {
            matrix,
            rotation: None,
        };
        let dev = gate.unitarity_deviation();
        if !dev.is_finite() || dev > UNITARITY_TOL {
            return Err(Error::validation(format!(
                "gate matrix is not unitary (deviation {dev:.3e})"
            )));
        }
        Ok(gate)
    }

    pub fn matrix(&self) -> &[[C64; 2]; 2] {
        &self.matrix
    }

    pub fn as_rotation(&self) -> Option<(Axis, f64)> {
        self.rotation
    }

    /// Max elementwise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// The gate `other * self`, i.e. `self` applied first.
    pub fn then(&self, other: &SingleQubitGate) -> SingleQubitGate {
        let (a, b) = (&other.matrix, &self.matrix);
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SingleQubitGate {
            matrix: out,
            rotation: None,
        }
    }
}

/// Pure state on `num_qubits` qubits, `2^num_qubits` amplitudes, qubit 0 least significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::config(format!(
                "qubit count {num_qubits} outside [{MIN_QUBITS}, {MAX_QUBITS}]"
            )));
        }
        Ok(Self::zero_unchecked(num_qubits))
    }

    pub(crate) fn zero_unchecked(num_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero_state(num_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::validation(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wrap raw amplitudes. Accepts 1 to 16 qubits (module factors may be small);
    /// does not normalize.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::validation(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::config(format!("{num_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        kernels::norm_sqr(&self.amps).sqrt()
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!("cannot normalize state of norm {n}")));
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            Err(Error::Index {
                index: q,
                len: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    pub fn apply_single_qubit(&mut self, qubit: usize, gate: &SingleQubitGate) -> Result<()> {
        self.check_qubit(qubit)?;
        if gate.rotation.is_none() && gate.unitarity_deviation() > UNITARITY_TOL {
            return Err(Error::validation("gate matrix is not unitary"));
        }
        match gate.rotation {
            Some((axis, angle)) => kernels::apply_rotation(&mut self.amps, qubit, axis, angle),
            None => kernels::apply_1q(&mut self.amps, qubit, &gate.matrix),
        }
        Ok(())
    }

    pub fn apply_rotation(&mut self, qubit: usize, axis: Axis, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        kernels::apply_rotation(&mut self.amps, qubit, axis, angle);
        Ok(())
    }

    /// `ZZ(phi) = exp(+i phi/2 Z_a Z_b)`.
    pub fn apply_zz(&mut self, qubit_a: usize, qubit_b: usize, phi: f64) -> Result<()> {
        self.check_qubit(qubit_a)?;
        self.check_qubit(qubit_b)?;
        if qubit_a == qubit_b {
            return Err(Error::validation(format!(
                "ZZ gate needs two distinct qubits, got {qubit_a} twice"
            )));
        }
        kernels::apply_zz(&mut self.amps, qubit_a, qubit_b, phi);
        Ok(())
    }

    /// Pauli X on `qubit`.
    pub fn flip(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let stride = 1usize << qubit;
        for chunk in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
        Ok(())
    }

    fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::validation(format!(
                "state sizes differ: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &StateVector) -> Result<C64> {
        self.check_same_size(other)?;
        Ok(kernels::inner(&self.amps, &other.amps))
    }

    /// `|<self|other>|^2`, clamped into `[0, 1]`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// `self (x) right`, with `self` occupying the low qubits.
    pub fn tensor(&self, right: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + right.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::config(format!("tensor product of {n} qubits too large")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for r in &right.amps {
            amps.extend(self.amps.iter().map(|l| l * r));
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Index of the largest-magnitude amplitude.
    pub fn dominant_index(&self) -> usize {
        self.amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

//! Parameterized gate sequences and adjoint-mode fidelity gradients.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernels;
use crate::statevector::{Axis, StateVector};

/// A parameterized gate. `param` indexes the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// `exp(-i theta sigma_axis / 2)`.
    Rotation { qubit: usize, axis: Axis, param: usize },
    /// `exp(+i phi/2 Z_a Z_b)`.
    Zz { a: usize, b: usize, param: usize },
}

impl Gate {
    pub fn param(&self) -> usize {
        match *self {
            Gate::Rotation { param, .. } | Gate::Zz { param, .. } => param,
        }
    }

    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Rotation { qubit, .. } => (qubit, None),
            Gate::Zz { a, b, .. } => (a, Some(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_params: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            let (a, b) = g.qubits();
            for q in std::iter::once(a).chain(b) {
                if q >= num_qubits {
                    return Err(Error::Index {
                        index: q,
                        len: num_qubits,
                    });
                }
            }
            if b == Some(a) {
                return Err(Error::validation(format!("ZZ gate on repeated qubit {a}")));
            }
            if g.param() >= num_params {
                return Err(Error::validation(format!(
                    "gate parameter {} outside {num_params} parameters",
                    g.param()
                )));
            }
        }
        Ok(Self {
            num_qubits,
            num_params,
            gates,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Apply every gate in order to `amps`.
    pub fn apply(&self, params: &[f64], amps: &mut [C64]) {
        for g in &self.gates {
            match *g {
                Gate::Rotation { qubit, axis, param } => {
                    kernels::apply_rotation(amps, qubit, axis, params[param])
                }
                Gate::Zz { a, b, param } => kernels::apply_zz(amps, a, b, params[param]),
            }
        }
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::validation(format!(
                "expected {} parameters, got {}",
                self.num_params,
                params.len()
            )));
        }
        Ok(())
    }

    /// Circuit output on `|0...0>`.
    pub fn run(&self, params: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let mut s = StateVector::zero_unchecked(self.num_qubits);
        self.apply(params, s.amplitudes_mut());
        Ok(s)
    }

    /// Reverse sweep over several branches at once.
    ///
    /// On entry `kets[b]` is the circuit output on branch `b` and `bras[b]`
    /// the matching adjoint vector; the overlap being differentiated is
    /// `o = sum_b <bras[b]|kets[b]>`, with `conj_o` its conjugate. Adds
    /// `d|o|^2 / d theta` into `grad`. On exit both sets are rewound to the
    /// circuit input.
    pub fn backprop(
        &self,
        params: &[f64],
        kets: &mut [Vec<C64>],
        bras: &mut [Vec<C64>],
        conj_o: C64,
        grad: &mut [f64],
    ) {
        for g in self.gates.iter().rev() {
            let mut d = C64::new(0.0, 0.0);
            match *g {
                Gate::Rotation { qubit, axis, param } => {
                    let theta = params[param];
                    for (k, e) in kets.iter_mut().zip(bras.iter_mut()) {
                        d += kernels::rotation_adjoint_step(k, e, qubit, axis, theta);
                    }
                }
                Gate::Zz { a, b, param } => {
                    let phi = params[param];
                    for (k, e) in kets.iter_mut().zip(bras.iter_mut()) {
                        d += kernels::zz_adjoint_step(k, e, a, b, phi);
                    }
                }
            }
            grad[g.param()] += 2.0 * (conj_o * d).re;
        }
    }

    /// `F = |<target|U(params)|0>|^2` and `dF/dparams` by the adjoint method.
    pub fn fidelity_gradient(&self, params: &[f64], target: &StateVector) -> Result<(f64, Vec<f64>)> {
        if target.num_qubits() != self.num_qubits {
            return Err(Error::validation(format!(
                "target has {} qubits, circuit {}",
                target.num_qubits(),
                self.num_qubits
            )));
        }
        let mut grad = vec![0.0; self.num_params];
        let f = self.fidelity_gradient_into(params, target.amplitudes(), &mut grad)?;
        Ok((f, grad))
    }

    /// As [`Circuit::fidelity_gradient`], writing into a caller-owned buffer.
    pub fn fidelity_gradient_into(
        &self,
        params: &[f64],
        target: &[C64],
        grad: &mut [f64],
    ) -> Result<f64> {
        self.check_params(params)?;
        let psi = self.run(params)?.into_amplitudes();
        let o = kernels::inner(target, &psi);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut kets = [psi];
        let mut bras = [target.to_vec()];
        self.backprop(params, &mut kets, &mut bras, o.conj(), grad);
        Ok(o.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_ry_gradient_closed_form() {
        // F(theta) = sin^2(theta/2) against |1>, dF/dtheta = sin(theta)/2
        let c = Circuit::new(
            1,
            1,
            vec![Gate::Rotation {
                qubit: 0,
                axis: Axis::Y,
                param: 0,
            }],
        )
        .unwrap();
        let one = StateVector::from_amplitudes(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        for theta in [0.3, PI / 2.0, 2.1] {
            let (f, g) = c.fidelity_gradient(&[theta], &one).unwrap();
            assert!((f - (theta / 2.0).sin().powi(2)).abs() < 1e-14);
            assert!((g[0] - theta.sin() / 2.0).abs() < 1e-14);
        }
        let (_, g) = c.fidelity_gradient(&[PI / 2.0], &one).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_gates() {
        let zz = Gate::Zz { a: 1, b: 1, param: 0 };
        assert!(Circuit::new(2, 1, vec![zz]).is_err());
        let far = Gate::Rotation {
            qubit: 2,
            axis: Axis::X,
            param: 0,
        };
        assert!(Circuit::new(2, 1, vec![far]).is_err());
        let ok = Circuit::new(2, 1, vec![Gate::Zz { a: 0, b: 1, param: 0 }]).unwrap();
        assert!(ok.run(&[0.1, 0.2]).is_err());
    }
}

//! Branch-expanded simulation of two-module circuits.
//!
//! `ZZ(phi) = cos(phi/2) I + i sin(phi/2) Z (x) Z`, so a circuit with `k`
//! remote gates produces `sum_b c_b |A_b> (x) |B_b>` over `2^k` branches,
//! each a product of module-local states. Every local block acts on
//! `2^(N/2)` amplitudes instead of `2^N`, and gradients are taken by running
//! the adjoint sweep separately on each module with the other module frozen.

use num_complex::Complex64 as C64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::kernels;
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemoteGate {
    /// Qubit inside the left module.
    pub left_qubit: usize,
    /// Qubit inside the right module, module-local index.
    pub right_qubit: usize,
    pub param: usize,
}

#[derive(Debug, Clone)]
pub struct FactoredStage {
    pub remote: Option<RemoteGate>,
    pub left: Circuit,
    pub right: Circuit,
}

#[derive(Debug, Clone)]
pub struct FactoredCircuit {
    left_qubits: usize,
    right_qubits: usize,
    num_params: usize,
    stages: Vec<FactoredStage>,
}

/// Final branch data after a forward pass. Leaf `b` took the `Z (x) Z`
/// path at remote gate `j` iff bit `(R - 1 - j)` of `b` is set.
struct Leaves {
    coef: Vec<C64>,
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
    remotes: Vec<(usize, f64)>,
}

impl FactoredCircuit {
    pub fn new(left_qubits: usize, right_qubits: usize, num_params: usize, stages: Vec<FactoredStage>) -> Self {
        Self {
            left_qubits,
            right_qubits,
            num_params,
            stages,
        }
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    fn forward(&self, params: &[f64]) -> Leaves {
        let mut left = vec![StateVector::zero_unchecked(self.left_qubits).into_amplitudes()];
        let mut right = vec![StateVector::zero_unchecked(self.right_qubits).into_amplitudes()];
        let mut coef = vec![C64::new(1.0, 0.0)];
        let mut remotes = Vec::new();
        for st in &self.stages {
            if let Some(r) = st.remote {
                let phi = params[r.param];
                let (s, c) = (0.5 * phi).sin_cos();
                remotes.push((r.param, phi));
                let n = coef.len();
                let mut nl = Vec::with_capacity(2 * n);
                let mut nr = Vec::with_capacity(2 * n);
                let mut nc = Vec::with_capacity(2 * n);
                for ((l, rr), k) in left.into_iter().zip(right).zip(coef) {
                    let mut zl = l.clone();
                    let mut zr = rr.clone();
                    kernels::apply_z(&mut zl, r.left_qubit);
                    kernels::apply_z(&mut zr, r.right_qubit);
                    nl.push(l);
                    nr.push(rr);
                    nc.push(k * c);
                    nl.push(zl);
                    nr.push(zr);
                    nc.push(k * C64::new(0.0, s));
                }
                left = nl;
                right = nr;
                coef = nc;
            }
            for l in &mut left {
                st.left.apply(params, l);
            }
            for r in &mut right {
                st.right.apply(params, r);
            }
        }
        Leaves {
            coef,
            left,
            right,
            remotes,
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

    /// Full output state, summed over branches.
    pub fn state(&self, params: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let leaves = self.forward(params);
        let rows = 1usize << self.left_qubits;
        let mut amps = vec![C64::new(0.0, 0.0); rows << self.right_qubits];
        for ((k, l), r) in leaves.coef.iter().zip(&leaves.left).zip(&leaves.right) {
            for (col, rv) in r.iter().enumerate() {
                let w = k * rv;
                for (a, lv) in amps[col * rows..(col + 1) * rows].iter_mut().zip(l) {
                    *a += lv * w;
                }
            }
        }
        StateVector::from_amplitudes(amps)
    }

    /// `F = |<target|psi(params)>|^2`; writes `dF/dparams` into `grad`.
    pub fn fidelity_gradient_into(&self, params: &[f64], target: &StateVector, grad: &mut [f64]) -> Result<f64> {
        self.check_params(params)?;
        if target.num_qubits() != self.left_qubits + self.right_qubits {
            return Err(Error::validation(format!(
                "target has {} qubits, circuit {}",
                target.num_qubits(),
                self.left_qubits + self.right_qubits
            )));
        }
        let t = target.amplitudes();
        let rows = 1usize << self.left_qubits;
        let cols = 1usize << self.right_qubits;
        let leaves = self.forward(params);
        let nb = leaves.coef.len();

        // raw_right[b] = T^T conj(A_b), raw_left[b] = T conj(B_b)
        let mut raw_right = Vec::with_capacity(nb);
        let mut raw_left = Vec::with_capacity(nb);
        for b in 0..nb {
            let a = &leaves.left[b];
            let bv = &leaves.right[b];
            let mut rr = vec![C64::new(0.0, 0.0); cols];
            let mut rl = vec![C64::new(0.0, 0.0); rows];
            for (col, (rrc, bc)) in rr.iter_mut().zip(bv).enumerate() {
                let tc = &t[col * rows..(col + 1) * rows];
                let bc = bc.conj();
                let mut acc = C64::new(0.0, 0.0);
                for ((tv, av), rlv) in tc.iter().zip(a).zip(rl.iter_mut()) {
                    acc += tv * av.conj();
                    *rlv += tv * bc;
                }
                *rrc = acc;
            }
            raw_right.push(rr);
            raw_left.push(rl);
        }
        // s_b = A_b^T conj(T) B_b
        let overlaps: Vec<C64> = raw_right
            .iter()
            .zip(&leaves.right)
            .map(|(g, bv)| kernels::inner(g, bv))
            .collect();
        let o: C64 = overlaps.iter().zip(&leaves.coef).map(|(s, k)| s * k).sum();
        let conj_o = o.conj();

        grad.iter_mut().for_each(|g| *g = 0.0);

        // remote angles, straight from the leaf overlaps
        let nr = leaves.remotes.len();
        for (j, &(param, phi)) in leaves.remotes.iter().enumerate() {
            let (s, c) = (0.5 * phi).sin_cos();
            let d0 = C64::new(-0.5 * s, 0.0);
            let d1 = C64::new(0.0, 0.5 * c);
            let mut d = C64::new(0.0, 0.0);
            for (b, sb) in overlaps.iter().enumerate() {
                let mut k = C64::new(1.0, 0.0);
                for (i, &(_, phi_i)) in leaves.remotes.iter().enumerate() {
                    let bit = (b >> (nr - 1 - i)) & 1;
                    if i == j {
                        k *= if bit == 0 { d0 } else { d1 };
                    } else {
                        let (si, ci) = (0.5 * phi_i).sin_cos();
                        k *= if bit == 0 { C64::new(ci, 0.0) } else { C64::new(0.0, si) };
                    }
                }
                d += k * sb;
            }
            grad[param] += 2.0 * (conj_o * d).re;
        }

        let scale = |raw: Vec<Vec<C64>>| -> Vec<Vec<C64>> {
            raw.into_iter()
                .zip(&leaves.coef)
                .map(|(mut v, k)| {
                    let kc = k.conj();
                    v.iter_mut().for_each(|x| *x *= kc);
                    v
                })
                .collect()
        };
        let left_bras = scale(raw_left);
        let right_bras = scale(raw_right);
        self.sweep(params, leaves.left, left_bras, true, conj_o, grad);
        self.sweep(params, leaves.right, right_bras, false, conj_o, grad);
        Ok(o.norm_sqr())
    }

    /// Adjoint sweep over one module, merging branch pairs at each remote gate.
    fn sweep(
        &self,
        params: &[f64],
        mut kets: Vec<Vec<C64>>,
        mut bras: Vec<Vec<C64>>,
        left: bool,
        conj_o: C64,
        grad: &mut [f64],
    ) {
        for st in self.stages.iter().rev() {
            let block = if left { &st.left } else { &st.right };
            block.backprop(params, &mut kets, &mut bras, conj_o, grad);
            if let Some(r) = st.remote {
                let q = if left { r.left_qubit } else { r.right_qubit };
                let mut pk = Vec::with_capacity(kets.len() / 2);
                let mut pb = Vec::with_capacity(bras.len() / 2);
                let mut ki = kets.into_iter();
                let mut bi = bras.into_iter();
                while let (Some(k0), Some(_k1), Some(mut e0), Some(mut e1)) =
                    (ki.next(), ki.next(), bi.next(), bi.next())
                {
                    kernels::apply_z(&mut e1, q);
                    e0.iter_mut().zip(&e1).for_each(|(a, b)| *a += b);
                    pk.push(k0);
                    pb.push(e0);
                }
                kets = pk;
                bras = pb;
            }
        }
    }
}

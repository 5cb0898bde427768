//! In-place amplitude kernels shared by the full statevector and the
//! per-module branch states of the factored dual-core engine.
//!
//! Amplitudes are indexed little-endian: bit `q` of the index is the
//! computational-basis value of qubit `q`.

use num_complex::Complex64 as C64;

use crate::statevector::Axis;

/// Apply an arbitrary 2x2 matrix to qubit `q`.
pub fn apply_1q(amps: &mut [C64], q: usize, m: &[[C64; 2]; 2]) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = m[0][0] * x0 + m[0][1] * x1;
            *a1 = m[1][0] * x0 + m[1][1] * x1;
        }
    }
}

/// Apply `exp(-i theta sigma_axis / 2)` to qubit `q`.
pub fn apply_rotation(amps: &mut [C64], q: usize, axis: Axis, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let stride = 1usize << q;
    match axis {
        Axis::Y => {
            for chunk in amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c - x1 * s;
                    *a1 = x0 * s + x1 * c;
                }
            }
        }
        Axis::Z => {
            let p0 = C64::new(c, -s);
            let p1 = C64::new(c, s);
            for chunk in amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                lo.iter_mut().for_each(|a| *a *= p0);
                hi.iter_mut().for_each(|a| *a *= p1);
            }
        }
        Axis::X => {
            let ms = C64::new(0.0, -s);
            for chunk in amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c + x1 * ms;
                    *a1 = x0 * ms + x1 * c;
                }
            }
        }
    }
}

/// Apply `exp(+i phi/2 Z_a Z_b)`: phase `e^{+i phi/2}` where bits agree,
/// `e^{-i phi/2}` where they differ.
pub fn apply_zz(amps: &mut [C64], a: usize, b: usize, phi: f64) {
    let (s, c) = (0.5 * phi).sin_cos();
    let same = C64::new(c, s);
    let diff = C64::new(c, -s);
    for (x, amp) in amps.iter_mut().enumerate() {
        if ((x >> a) ^ (x >> b)) & 1 == 0 {
            *amp *= same;
        } else {
            *amp *= diff;
        }
    }
}

/// Apply Pauli Z to qubit `q`.
pub fn apply_z(amps: &mut [C64], q: usize) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(2 * stride) {
        chunk[stride..].iter_mut().for_each(|a| *a = -*a);
    }
}

/// One reverse step of the adjoint method for a rotation gate.
///
/// `ket` and `bra` hold the states just after the gate. Returns
/// `<bra| dG/dtheta |ket_before>` and rewinds both vectors through `G^dagger`.
pub fn rotation_adjoint_step(
    ket: &mut [C64],
    bra: &mut [C64],
    q: usize,
    axis: Axis,
    theta: f64,
) -> C64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let stride = 1usize << q;
    let mut acc = C64::new(0.0, 0.0);
    match axis {
        Axis::Y => {
            // -i/2 sigma_y contributes (conj(e1) a0 - conj(e0) a1) / 2.
            for (kc, bc) in ket
                .chunks_exact_mut(2 * stride)
                .zip(bra.chunks_exact_mut(2 * stride))
            {
                let (k0s, k1s) = kc.split_at_mut(stride);
                let (b0s, b1s) = bc.split_at_mut(stride);
                for i in 0..stride {
                    let (k0, k1) = (k0s[i], k1s[i]);
                    let (e0, e1) = (b0s[i], b1s[i]);
                    acc += e1.conj() * k0 - e0.conj() * k1;
                    k0s[i] = k0 * c + k1 * s;
                    k1s[i] = k1 * c - k0 * s;
                    b0s[i] = e0 * c + e1 * s;
                    b1s[i] = e1 * c - e0 * s;
                }
            }
            acc * 0.5
        }
        Axis::Z => {
            let p0 = C64::new(c, s);
            let p1 = C64::new(c, -s);
            for (kc, bc) in ket
                .chunks_exact_mut(2 * stride)
                .zip(bra.chunks_exact_mut(2 * stride))
            {
                let (k0s, k1s) = kc.split_at_mut(stride);
                let (b0s, b1s) = bc.split_at_mut(stride);
                for i in 0..stride {
                    acc += b0s[i].conj() * k0s[i] - b1s[i].conj() * k1s[i];
                    k0s[i] *= p0;
                    b0s[i] *= p0;
                    k1s[i] *= p1;
                    b1s[i] *= p1;
                }
            }
            acc * C64::new(0.0, -0.5)
        }
        Axis::X => {
            let is = C64::new(0.0, s);
            for (kc, bc) in ket
                .chunks_exact_mut(2 * stride)
                .zip(bra.chunks_exact_mut(2 * stride))
            {
                let (k0s, k1s) = kc.split_at_mut(stride);
                let (b0s, b1s) = bc.split_at_mut(stride);
                for i in 0..stride {
                    let (k0, k1) = (k0s[i], k1s[i]);
                    let (e0, e1) = (b0s[i], b1s[i]);
                    acc += e0.conj() * k1 + e1.conj() * k0;
                    k0s[i] = k0 * c + k1 * is;
                    k1s[i] = k0 * is + k1 * c;
                    b0s[i] = e0 * c + e1 * is;
                    b1s[i] = e0 * is + e1 * c;
                }
            }
            acc * C64::new(0.0, -0.5)
        }
    }
}

/// Reverse step for `ZZ(phi)`; see [`rotation_adjoint_step`].
pub fn zz_adjoint_step(ket: &mut [C64], bra: &mut [C64], a: usize, b: usize, phi: f64) -> C64 {
    let (s, c) = (0.5 * phi).sin_cos();
    let same = C64::new(c, -s);
    let diff = C64::new(c, s);
    let mut acc = C64::new(0.0, 0.0);
    for (x, (k, e)) in ket.iter_mut().zip(bra.iter_mut()).enumerate() {
        let term = e.conj() * *k;
        if ((x >> a) ^ (x >> b)) & 1 == 0 {
            acc += term;
            *k *= same;
            *e *= same;
        } else {
            acc -= term;
            *k *= diff;
            *e *= diff;
        }
    }
    acc * C64::new(0.0, 0.5)
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

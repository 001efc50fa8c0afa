//! Pauli strings and Jordan-Wigner Majoranas.
//!
//! Qubit `k` of an `nq`-qubit register is bit `nq - 1 - k` of the basis
//! index, so the first qubits form the most significant part and a
//! register split `A (x) B` is a plain row-major reshape.

use faer::{c64, Mat};

/// `i^phase X^x Z^z` over bit masks `x`, `z` in index layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pauli {
    pub x: usize,
    pub z: usize,
    pub phase: u8,
}

const PHASES: [c64; 4] = [c64::new(1.0, 0.0), c64::new(0.0, 1.0), c64::new(-1.0, 0.0), c64::new(0.0, -1.0)];

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0, phase: 0 };

    pub fn mul(self, o: Pauli) -> Pauli {
        let sign = 2 * ((self.z & o.x).count_ones() % 2) as u8;
        Pauli { x: self.x ^ o.x, z: self.z ^ o.z, phase: (self.phase + o.phase + sign) % 4 }
    }

    pub fn scale(self, power_of_i: u8) -> Pauli {
        Pauli { phase: (self.phase + power_of_i) % 4, ..self }
    }

    /// `P |b> = c |b'>`.
    pub fn apply(self, b: usize) -> (usize, c64) {
        let sign = 2 * ((self.z & b).count_ones() % 2) as u8;
        (b ^ self.x, PHASES[((self.phase + sign) % 4) as usize])
    }

    pub fn to_dense(self, dim: usize) -> Mat<c64> {
        let mut m = Mat::zeros(dim, dim);
        for b in 0..dim {
            let (a, c) = self.apply(b);
            m[(a, b)] = c;
        }
        m
    }

    pub fn commutes(self, o: Pauli) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 0
    }

    pub fn is_hermitian(self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()) % 2 == 0
    }
}

fn bit(nq: usize, k: usize) -> usize {
    1 << (nq - 1 - k)
}

/// Jordan-Wigner strings `sqrt(2) gamma_j` for `2 nq` Majoranas:
/// `gamma_{2k} ~ Z..Z X_k`, `gamma_{2k+1} ~ Z..Z Y_k`.
pub fn majorana_strings(nq: usize) -> Vec<Pauli> {
    let mut out = Vec::with_capacity(2 * nq);
    let mut zs = 0;
    for k in 0..nq {
        let b = bit(nq, k);
        out.push(Pauli { x: b, z: zs, phase: 0 });
        out.push(Pauli { x: b, z: zs | b, phase: 1 });
        zs |= b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_products() {
        let x = Pauli { x: 1, z: 0, phase: 0 };
        let z = Pauli { x: 0, z: 1, phase: 0 };
        let y = Pauli { x: 1, z: 1, phase: 1 };
        // XZ = -iY
        assert_eq!(x.mul(z), y.scale(3));
        assert!(!x.commutes(z) && x.commutes(x));
        let d = y.to_dense(2);
        assert_eq!(d[(0, 1)], c64::new(0.0, -1.0));
        assert_eq!(d[(1, 0)], c64::new(0.0, 1.0));
        assert!(y.is_hermitian() && !y.scale(1).is_hermitian());
    }

    #[test]
    fn majoranas_anticommute() {
        let s = majorana_strings(3);
        for i in 0..6 {
            assert!(s[i].is_hermitian());
            assert_eq!(s[i].mul(s[i]), Pauli::IDENTITY);
            for j in 0..6 {
                assert_eq!(s[i].commutes(s[j]), i == j);
            }
        }
    }
}

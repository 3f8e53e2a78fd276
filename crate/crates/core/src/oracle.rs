//! Naive dense-matrix reference used to check the DD engine at small sizes.
//!
//! Nothing in here touches the complex table or any DD code: gate matrices
//! are written out entry by entry and products are plain triple loops.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

/// Largest register accepted by [`dense_gate`].
pub const GATE_LIMIT: usize = 12;
/// Largest register accepted by [`dense_product`].
pub const PRODUCT_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> DenseMatrix {
        let dim = 1usize << n;
        DenseMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(n: usize) -> DenseMatrix {
        let mut m = Self::zeros(n);
        for i in 0..m.dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from a row-major entry function.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> DenseMatrix {
        let mut m = Self::zeros(n);
        for r in 0..m.dim {
            for c in 0..m.dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn dagger(&self) -> DenseMatrix {
        let mut m = DenseMatrix {
            dim: self.dim,
            entries: self.entries.clone(),
        };
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(r, c, self.get(c, r).conj());
            }
        }
        m
    }

    pub fn scaled(&self, s: Complex64) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        DenseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let dim = self.dim * other.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = self.get(r / other.dim, c / other.dim)
                    * other.get(r % other.dim, c % other.dim);
            }
        }
        DenseMatrix { dim, entries }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U·U† - I|` over all entries.
    pub fn unitarity_error(&self) -> f64 {
        let p = self * &self.dagger();
        p.max_abs_diff(&DenseMatrix::identity(self.qubits()))
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.entries[k * d..(k + 1) * d];
                for (o, b) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        DenseMatrix {
            dim: d,
            entries: out,
        }
    }
}

fn base_entry(kind: GateKind, row: usize, col: usize) -> Complex64 {
    let c = Complex64::new;
    let i = c(0.0, 1.0);
    let diag = |lo: Complex64, hi: Complex64| match (row, col) {
        (0, 0) => lo,
        (1, 1) => hi,
        _ => c(0.0, 0.0),
    };
    match kind {
        GateKind::X => c((row != col) as u8 as f64, 0.0),
        GateKind::Y => match (row, col) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => c(0.0, 0.0),
        },
        GateKind::Z => diag(c(1.0, 0.0), c(-1.0, 0.0)),
        GateKind::H => {
            let s = if row == 1 && col == 1 { -1.0 } else { 1.0 };
            c(s * FRAC_1_SQRT_2, 0.0)
        }
        GateKind::S => diag(c(1.0, 0.0), i),
        GateKind::Sdg => diag(c(1.0, 0.0), -i),
        GateKind::T => diag(c(1.0, 0.0), (i * std::f64::consts::FRAC_PI_4).exp()),
        GateKind::Tdg => diag(c(1.0, 0.0), (-i * std::f64::consts::FRAC_PI_4).exp()),
        GateKind::Phase(t) => diag(c(1.0, 0.0), (i * t).exp()),
        GateKind::Rz(t) => diag((-i * t / 2.0).exp(), (i * t / 2.0).exp()),
        GateKind::Rx(t) => {
            if row == col {
                c((t / 2.0).cos(), 0.0)
            } else {
                -i * (t / 2.0).sin()
            }
        }
        GateKind::Ry(t) => match (row, col) {
            (0, 1) => c(-(t / 2.0).sin(), 0.0),
            (1, 0) => c((t / 2.0).sin(), 0.0),
            _ => c((t / 2.0).cos(), 0.0),
        },
        GateKind::Swap(_) => unreachable!("swap is handled as a permutation"),
    }
}

#[inline]
fn bit(x: usize, q: usize) -> usize {
    (x >> q) & 1
}

/// Full 2^n×2^n matrix of `g`, computed entry by entry.
pub fn dense_gate(g: &Gate, n: usize) -> Result<DenseMatrix> {
    if n > GATE_LIMIT {
        return Err(Error::DenseLimit {
            n,
            limit: GATE_LIMIT,
        });
    }
    if n == 0 {
        return Err(Error::InvalidQubitCount(0));
    }
    g.check(n)?;
    let t = g.target;
    let controls_on = |x: usize| g.controls.iter().all(|&q| bit(x, q) == 1);
    let m = match g.kind {
        GateKind::Swap(other) => DenseMatrix::from_fn(n, |r, c| {
            let image = if controls_on(c) && bit(c, t) != bit(c, other) {
                c ^ (1 << t) ^ (1 << other)
            } else {
                c
            };
            Complex64::new((r == image) as u8 as f64, 0.0)
        }),
        kind => DenseMatrix::from_fn(n, |r, c| {
            let rest = !(1usize << t);
            if r & rest != c & rest {
                return Complex64::new(0.0, 0.0);
            }
            if controls_on(c) {
                base_entry(kind, bit(r, t), bit(c, t))
            } else {
                Complex64::new((r == c) as u8 as f64, 0.0)
            }
        }),
    };
    Ok(m)
}

/// `U_{m-1} ⋯ U_0` by dense multiplication.
pub fn dense_product(c: &Circuit) -> Result<DenseMatrix> {
    if c.n() > PRODUCT_LIMIT {
        return Err(Error::DenseLimit {
            n: c.n(),
            limit: PRODUCT_LIMIT,
        });
    }
    let mut acc = DenseMatrix::identity(c.n());
    for g in c.gates() {
        acc = &dense_gate(g, c.n())? * &acc;
    }
    Ok(acc)
}

/// Index with its lowest `n` bits reversed.
pub fn bit_reverse(x: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, q| acc | (bit(x, q) << (n - 1 - q)))
}

/// `F[j][k] = e^{2πijk/2^n} / √2^n`.
pub fn dft(n: usize) -> DenseMatrix {
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    DenseMatrix::from_fn(n, |j, k| {
        let phase = 2.0 * std::f64::consts::PI * ((j * k) % dim) as f64 / dim as f64;
        Complex64::from_polar(norm, phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_blocks() {
        let m = dense_gate(&Gate::single(GateKind::H, 0), 3).unwrap();
        let h = FRAC_1_SQRT_2;
        for r in 0..8 {
            for col in 0..8 {
                let expected = if r / 2 != col / 2 {
                    0.0
                } else if r % 2 == 1 && col % 2 == 1 {
                    -h
                } else {
                    h
                };
                assert_eq!(m.get(r, col), c(expected, 0.0), "({r},{col})");
            }
        }
    }

    #[test]
    fn controlled_t_diagonal() {
        let g = Gate::new(GateKind::T, 0, [2]).unwrap();
        let m = dense_gate(&g, 3).unwrap();
        let w = c(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let one = c(1.0, 0.0);
        let diag = [one, one, one, one, one, w, one, w];
        for (r, &d) in diag.iter().enumerate() {
            for col in 0..8 {
                let expected = if r == col { d } else { c(0.0, 0.0) };
                assert!((m.get(r, col) - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn x_squared_is_identity() {
        let x = dense_gate(&Gate::single(GateKind::X, 0), 1).unwrap();
        assert_eq!(&x * &x, DenseMatrix::identity(1));
    }

    #[test]
    fn single_gate_product() {
        let g = Gate::new(GateKind::Ry(0.3), 1, [0]).unwrap();
        let circ = Circuit::from_gates(2, [g.clone()]).unwrap();
        assert_eq!(dense_product(&circ).unwrap(), dense_gate(&g, 2).unwrap());
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let h = Gate::single(GateKind::H, 1);
        let circ = Circuit::from_gates(2, [h.clone(), h]).unwrap();
        let p = dense_product(&circ).unwrap();
        assert!(p.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn swap_permutes() {
        let m = dense_gate(&Gate::single(GateKind::Swap(2), 0), 3).unwrap();
        // |001⟩ -> |100⟩
        assert_eq!(m.get(0b100, 0b001), c(1.0, 0.0));
        assert_eq!(m.get(0b010, 0b010), c(1.0, 0.0));
        assert!(m.unitarity_error() < 1e-15);
    }

    #[test]
    fn limits() {
        let h = Gate::single(GateKind::H, 0);
        assert!(matches!(dense_gate(&h, 13), Err(Error::DenseLimit { .. })));
        let big = Circuit::from_gates(11, [h]).unwrap();
        assert!(matches!(dense_product(&big), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn every_kind_is_unitary() {
        let kinds = [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::Sdg,
            GateKind::T,
            GateKind::Tdg,
            GateKind::Phase(0.7),
            GateKind::Rz(1.1),
            GateKind::Rx(-2.3),
            GateKind::Ry(0.4),
            GateKind::Swap(3),
        ];
        for kind in kinds {
            let g = Gate::new(kind, 1, [0, 2]).unwrap();
            let m = dense_gate(&g, 4).unwrap();
            assert!(m.unitarity_error() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn bit_reversal() {
        assert_eq!(bit_reverse(0b001, 3), 0b100);
        assert_eq!(bit_reverse(0b110, 3), 0b011);
        assert_eq!(bit_reverse(5, 1), 1);
    }
}

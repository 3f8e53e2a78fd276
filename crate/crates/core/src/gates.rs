//! Decision diagrams of individual gates.

use num_complex::Complex64;

use crate::circuit::{Gate, GateKind, Matrix2};
use crate::error::{Error, Result};
use crate::numerics::ComplexRef;
use crate::package::{Edge, Package, MAX_LEVEL};

impl Package {
    /// DD of `g` acting on an `n`-qubit register.
    ///
    /// A controlled gate is assembled as `I + P ⊗ (U - I)`, where `P`
    /// projects every control onto |1⟩.
    pub fn gate_dd(&mut self, g: &Gate, n: usize) -> Result<Edge> {
        if n == 0 || n > MAX_LEVEL + 1 {
            return Err(Error::InvalidQubitCount(n));
        }
        g.check(n)?;
        match g.kind.matrix() {
            Some(u) => self.controlled_dd(u, g.target, &g.controls, n),
            None => {
                let GateKind::Swap(other) = g.kind else {
                    unreachable!("only swap lacks a base matrix")
                };
                let x = GateKind::X.matrix().expect("X has a matrix");
                let ab = self.controlled_dd(x, g.target, &with(&g.controls, other), n)?;
                let ba = self.controlled_dd(x, other, &with(&g.controls, g.target), n)?;
                let half = self.multiply(ab, ba)?;
                self.multiply(ba, half)
            }
        }
    }

    fn controlled_dd(
        &mut self,
        u: Matrix2,
        target: usize,
        controls: &[usize],
        n: usize,
    ) -> Result<Edge> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let ident = [[one, zero], [zero, one]];
        if controls.is_empty() {
            return self.product_chain(n, |q| if q == target { u } else { ident });
        }
        let diff = [[u[0][0] - one, u[0][1]], [u[1][0], u[1][1] - one]];
        let proj = [[zero, zero], [zero, one]];
        let active = self.product_chain(n, |q| {
            if q == target {
                diff
            } else if controls.contains(&q) {
                proj
            } else {
                ident
            }
        })?;
        let id = self.identity(n)?;
        self.add(id, active)
    }

    /// DD of `factor(n-1) ⊗ … ⊗ factor(0)`.
    fn product_chain(&mut self, n: usize, factor: impl Fn(usize) -> Matrix2) -> Result<Edge> {
        let mut e = Edge::ONE;
        for level in 0..n {
            let m = factor(level);
            let mut succ = [Edge::ZERO; 4];
            for (k, s) in succ.iter_mut().enumerate() {
                let w: ComplexRef = self.complex.lookup(m[k >> 1][k & 1])?;
                *s = self.scale(e, w);
            }
            e = self.make_node_unchecked(level, succ);
        }
        Ok(e)
    }
}

fn with(controls: &[usize], extra: usize) -> Vec<usize> {
    let mut v = controls.to_vec();
    v.push(extra);
    v
}

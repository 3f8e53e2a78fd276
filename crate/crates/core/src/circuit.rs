//! Gate and circuit intermediate representation.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A 2×2 matrix in row-major order `[[u00, u01], [u10, u11]]`.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{iθ})`
    Phase(f64),
    Rz(f64),
    Rx(f64),
    Ry(f64),
    /// Exchanges the gate target with the given qubit.
    Swap(usize),
}

impl GateKind {
    pub fn theta(&self) -> Option<f64> {
        match *self {
            GateKind::Phase(t) | GateKind::Rz(t) | GateKind::Rx(t) | GateKind::Ry(t) => Some(t),
            _ => None,
        }
    }

    /// Base matrix of a single-target kind; `None` for [`GateKind::Swap`].
    pub fn matrix(&self) -> Option<Matrix2> {
        let c = Complex64::new;
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let h = c(FRAC_1_SQRT_2, 0.0);
        let m = match *self {
            GateKind::X => [[z, o], [o, z]],
            GateKind::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            GateKind::Z => [[o, z], [z, -o]],
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [[o, z], [z, c(0.0, 1.0)]],
            GateKind::Sdg => [[o, z], [z, c(0.0, -1.0)]],
            GateKind::T => [[o, z], [z, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]],
            GateKind::Tdg => [[o, z], [z, c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)]],
            GateKind::Phase(t) => [[o, z], [z, Complex64::from_polar(1.0, t)]],
            GateKind::Rz(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), z],
                [z, Complex64::from_polar(1.0, t / 2.0)],
            ],
            GateKind::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            GateKind::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            GateKind::Swap(_) => return None,
        };
        Some(m)
    }
}

/// A gate acting on `target` (and the swap partner), applied only when every
/// control qubit is |1⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    /// Sorted, duplicate-free.
    pub controls: Vec<usize>,
}

impl Gate {
    pub fn new(
        kind: GateKind,
        target: usize,
        controls: impl IntoIterator<Item = usize>,
    ) -> Result<Gate> {
        let mut controls: Vec<usize> = controls.into_iter().collect();
        controls.sort_unstable();
        if let Some(w) = controls.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::OverlappingQubits(w[0]));
        }
        let gate = Gate {
            kind,
            target,
            controls,
        };
        let mut seen: Vec<usize> = gate.qubits().collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::OverlappingQubits(w[0]));
        }
        Ok(gate)
    }

    pub fn single(kind: GateKind, target: usize) -> Gate {
        Gate {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    /// Every qubit the gate touches: targets first, then controls.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        let partner = match self.kind {
            GateKind::Swap(q) => Some(q),
            _ => None,
        };
        std::iter::once(self.target)
            .chain(partner)
            .chain(self.controls.iter().copied())
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if let Some(q) = self.qubits().find(|&q| q >= n) {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        let mut qs: Vec<usize> = self.qubits().collect();
        qs.sort_unstable();
        if let Some(w) = qs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::OverlappingQubits(w[0]));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} q{}", self.kind, self.target)?;
        if !self.controls.is_empty() {
            write!(f, " ctrl {:?}", self.controls)?;
        }
        Ok(())
    }
}

/// Ordered gate list over `n` qubits; `gates[0]` is applied first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Circuit> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(0));
        }
        Ok(Circuit {
            n,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::InvalidQubitCount(other.n));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// An initialization block followed by `repetitions` copies of an
/// iteration block.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedCircuit {
    pub init: Circuit,
    pub iteration: Circuit,
    pub repetitions: usize,
}

impl RepeatedCircuit {
    pub fn new(init: Circuit, iteration: Circuit, repetitions: usize) -> Result<RepeatedCircuit> {
        if init.n() != iteration.n() {
            return Err(Error::InvalidQubitCount(iteration.n()));
        }
        if repetitions == 0 {
            return Err(Error::ZeroRepetitions);
        }
        Ok(RepeatedCircuit {
            init,
            iteration,
            repetitions,
        })
    }

    pub fn n(&self) -> usize {
        self.init.n()
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Result<RepeatedCircuit> {
        if repetitions == 0 {
            return Err(Error::ZeroRepetitions);
        }
        self.repetitions = repetitions;
        Ok(self)
    }

    /// Total gate count of the unrolled circuit.
    pub fn gate_count(&self) -> usize {
        self.init.len() + self.repetitions * self.iteration.len()
    }

    pub fn unroll(&self) -> Circuit {
        let mut c = self.init.clone();
        for _ in 0..self.repetitions {
            c.gates.extend_from_slice(&self.iteration.gates);
        }
        c
    }
}

//! Benchmark circuit families.

use std::f64::consts::PI;

use rand::Rng;

use crate::circuit::{Circuit, Gate, GateKind, RepeatedCircuit};
use crate::error::{Error, Result};

/// Quantum Fourier transform on `n` qubits.
///
/// Qubit `j` (starting at 0) receives a Hadamard followed by controlled
/// phases `π/2^(k-j)` from every higher qubit `k`. For `n = 3` this is
/// `H q0, CP(π/2) q1→q0, CP(π/4) q2→q0, H q1, CP(π/2) q2→q1, H q2`.
/// The swap-free circuit equals `F·R` (DFT after bit-reversing the input
/// index); appending the swaps gives `R·F·R`.
pub fn qft(n: usize, with_final_swaps: bool) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    for j in 0..n {
        c.push(Gate::single(GateKind::H, j))?;
        for k in j + 1..n {
            let angle = PI / (1u64 << (k - j).min(63)) as f64;
            c.push(Gate::new(GateKind::Phase(angle), j, [k])?)?;
        }
    }
    if with_final_swaps {
        for i in 0..n / 2 {
            c.push(Gate::single(GateKind::Swap(n - 1 - i), i))?;
        }
    }
    Ok(c)
}

/// Grover iteration count used when none is given: `⌊√N⌋`.
pub fn default_grover_iterations(d: usize) -> usize {
    let n = 1u128 << d;
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r as usize
}

/// Grover search over `N = 2^d` items.
///
/// Data qubits are `q0..q(d-1)`, the flag qubit is `qd`. `marked` is read
/// most significant first, so `marked[0]` is the value of `q(d-1)`.
/// Initialization flips the flag and puts every qubit into superposition;
/// each iteration applies the phase oracle (X-conjugated multi-controlled X
/// onto the flag) and then the diffusion operator on the data qubits.
pub fn grover(d: usize, marked: &str) -> Result<RepeatedCircuit> {
    if d == 0 || d > 62 {
        return Err(Error::InvalidQubitCount(d));
    }
    let bits: Vec<bool> = marked
        .chars()
        .map(|ch| match ch {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect::<Option<_>>()
        .filter(|b: &Vec<bool>| b.len() == d)
        .ok_or_else(|| Error::InvalidMarked {
            marked: marked.to_string(),
            d,
        })?;
    let n = d + 1;
    let flag = d;
    let data = 0..d;

    let mut init = Circuit::new(n)?;
    init.push(Gate::single(GateKind::X, flag))?;
    for q in 0..n {
        init.push(Gate::single(GateKind::H, q))?;
    }

    let mut iteration = Circuit::new(n)?;
    // bit value of data qubit q
    let marked_bit = |q: usize| bits[d - 1 - q];
    let zeros: Vec<usize> = data.clone().filter(|&q| !marked_bit(q)).collect();
    for &q in &zeros {
        iteration.push(Gate::single(GateKind::X, q))?;
    }
    iteration.push(Gate::new(GateKind::X, flag, data.clone())?)?;
    for &q in &zeros {
        iteration.push(Gate::single(GateKind::X, q))?;
    }
    for kind in [GateKind::H, GateKind::X] {
        for q in data.clone() {
            iteration.push(Gate::single(kind, q))?;
        }
    }
    iteration.push(Gate::new(GateKind::Z, 0, 1..d)?)?;
    for kind in [GateKind::X, GateKind::H] {
        for q in data.clone() {
            iteration.push(Gate::single(kind, q))?;
        }
    }

    RepeatedCircuit::new(init, iteration, default_grover_iterations(d))
}

/// Random circuit over every supported gate kind with up to two controls.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    for _ in 0..m {
        let target = rng.gen_range(0..n);
        let angle = rng.gen_range(-PI..PI);
        let mut others: Vec<usize> = (0..n).filter(|&q| q != target).collect();
        let pick = rng.gen_range(0..13);
        let kind = match pick {
            0 => GateKind::X,
            1 => GateKind::Y,
            2 => GateKind::Z,
            3 => GateKind::H,
            4 => GateKind::S,
            5 => GateKind::Sdg,
            6 => GateKind::T,
            7 => GateKind::Tdg,
            8 => GateKind::Phase(angle),
            9 => GateKind::Rz(angle),
            10 => GateKind::Rx(angle),
            11 => GateKind::Ry(angle),
            _ if others.is_empty() => GateKind::H,
            _ => GateKind::Swap(others.swap_remove(rng.gen_range(0..others.len()))),
        };
        let max_controls = others.len().min(2);
        let count = rng.gen_range(0..=max_controls);
        let mut controls = Vec::with_capacity(count);
        for _ in 0..count {
            controls.push(others.swap_remove(rng.gen_range(0..others.len())));
        }
        c.push(Gate::new(kind, target, controls)?)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qft3_matches_reference_listing() {
        let c = qft(3, false).unwrap();
        let expected = vec![
            Gate::single(GateKind::H, 0),
            Gate::new(GateKind::Phase(PI / 2.0), 0, [1]).unwrap(),
            Gate::new(GateKind::Phase(PI / 4.0), 0, [2]).unwrap(),
            Gate::single(GateKind::H, 1),
            Gate::new(GateKind::Phase(PI / 2.0), 1, [2]).unwrap(),
            Gate::single(GateKind::H, 2),
        ];
        assert_eq!(c.gates(), expected.as_slice());
    }

    #[test]
    fn qft_gate_counts() {
        for n in 1..=20 {
            assert_eq!(qft(n, false).unwrap().len(), n * (n + 1) / 2);
            assert_eq!(qft(n, true).unwrap().len(), n * (n + 1) / 2 + n / 2);
        }
        assert_eq!(
            qft(1, false).unwrap().gates(),
            &[Gate::single(GateKind::H, 0)]
        );
        assert!(qft(0, false).is_err());
    }

    #[test]
    fn grover_shape() {
        let g = grover(4, "0000").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.repetitions, 4);
        assert_eq!(g.init.len(), 6);
        assert_eq!(grover(1, "1").unwrap().repetitions, 1);
        assert!(matches!(grover(3, "01"), Err(Error::InvalidMarked { .. })));
        assert!(matches!(grover(2, "0x"), Err(Error::InvalidMarked { .. })));
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(default_grover_iterations(1), 1);
        assert_eq!(default_grover_iterations(2), 2);
        assert_eq!(default_grover_iterations(4), 4);
        assert_eq!(default_grover_iterations(5), 5);
        assert_eq!(default_grover_iterations(14), 128);
    }

    #[test]
    fn random_circuits_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let c = random_circuit(n, 30, &mut rng).unwrap();
            assert_eq!(c.len(), 30);
            assert!(c.gates().iter().all(|g| g.check(n).is_ok()));
        }
    }
}

//! Construction strategies turning a circuit into a single DD.
//!
//! * [`build_sequential`] multiplies gate DDs into one accumulator.
//! * [`build_pairwise`] multiplies consecutive pairs, then pairs of pairs and
//!   so on, evaluated depth-first on a stack.
//! * [`build_repeated`] raises the iteration block to the repetition count
//!   by square-and-multiply.
//!
//! Every returned root edge carries one reference owned by the caller.

use std::time::{Duration, Instant};

use crate::circuit::{Circuit, RepeatedCircuit};
use crate::error::{Error, Result};
use crate::package::{Edge, Package};

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Checked between multiplications.
    pub deadline: Option<Instant>,
}

impl BuildOptions {
    pub fn with_timeout(timeout: Duration) -> Self {
        BuildOptions {
            deadline: Some(Instant::now() + timeout),
        }
    }

    fn check(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

/// One intermediate product. For pairwise builds `level` is the height in
/// the grouping tree (gate pairs are level 1); for sequential builds it is
/// the number of multiplications so far; for repeated builds it counts
/// strategy-level multiplications.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub level: usize,
    pub nodes: usize,
}

#[derive(Clone, Debug, Default)]
pub struct BuildStats {
    /// Multiplications issued by the strategy itself.
    pub multiplications: usize,
    /// Multiplications spent building sub-blocks (repeated strategy only).
    pub inner_multiplications: usize,
    pub peak_nodes: usize,
    pub final_nodes: usize,
    /// Most intermediate DDs held at once.
    pub max_live: usize,
    pub wall_time: Duration,
    pub trace: Vec<Step>,
}

impl BuildStats {
    /// Node counts of the intermediates produced at `level`, in order.
    pub fn nodes_at_level(&self, level: usize) -> Vec<usize> {
        self.trace
            .iter()
            .filter(|s| s.level == level)
            .map(|s| s.nodes)
            .collect()
    }

    pub fn intermediate_nodes(&self) -> Vec<usize> {
        self.trace.iter().map(|s| s.nodes).collect()
    }
}

/// Multiplies `a · b`, releases both operands and takes a reference on the
/// result.
fn consume_product(pkg: &mut Package, a: Edge, b: Edge) -> Result<Edge> {
    let r = pkg.multiply(a, b)?;
    pkg.inc_ref(r);
    pkg.dec_ref(a)?;
    pkg.dec_ref(b)?;
    Ok(r)
}

fn after_multiply(pkg: &mut Package) -> Result<()> {
    pkg.check_node_limit()?;
    pkg.maybe_garbage_collect();
    Ok(())
}

fn gate_ref(pkg: &mut Package, c: &Circuit, i: usize) -> Result<Edge> {
    let e = pkg.gate_dd(&c.gates()[i], c.n())?;
    pkg.inc_ref(e);
    Ok(e)
}

/// `acc ← U_i · acc` for every gate after the first.
pub fn build_sequential(
    pkg: &mut Package,
    c: &Circuit,
    opts: &BuildOptions,
) -> Result<(Edge, BuildStats)> {
    with_deadline(pkg, opts, |pkg| sequential(pkg, c, opts))
}

/// Installs the build deadline on the package, so that a single long
/// multiplication is cut short too, and removes it afterwards.
fn with_deadline<T>(
    pkg: &mut Package,
    opts: &BuildOptions,
    f: impl FnOnce(&mut Package) -> Result<T>,
) -> Result<T> {
    pkg.set_deadline(opts.deadline);
    let r = f(pkg);
    pkg.set_deadline(None);
    r
}

fn sequential(pkg: &mut Package, c: &Circuit, opts: &BuildOptions) -> Result<(Edge, BuildStats)> {
    if c.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let start = Instant::now();
    let mut stats = BuildStats::default();
    let mut acc = gate_ref(pkg, c, 0)?;
    stats.peak_nodes = pkg.node_count(acc);
    stats.max_live = 1;
    for i in 1..c.len() {
        opts.check()?;
        let g = gate_ref(pkg, c, i)?;
        stats.max_live = stats.max_live.max(2);
        acc = consume_product(pkg, g, acc)?;
        stats.multiplications += 1;
        let nodes = pkg.node_count(acc);
        stats.peak_nodes = stats.peak_nodes.max(nodes);
        stats.trace.push(Step { level: i, nodes });
        after_multiply(pkg)?;
    }
    stats.final_nodes = pkg.node_count(acc);
    stats.wall_time = start.elapsed();
    Ok((acc, stats))
}

/// Pairwise grouping: gates `(g0,g1), (g2,g3), …` are multiplied first, then
/// neighbouring pair products, and so on; a trailing element without a
/// partner moves up a level unchanged. Evaluated depth-first, so the stack
/// never holds more than `⌈log₂ m⌉ + 1` intermediates.
pub fn build_pairwise(
    pkg: &mut Package,
    c: &Circuit,
    opts: &BuildOptions,
) -> Result<(Edge, BuildStats)> {
    with_deadline(pkg, opts, |pkg| pairwise(pkg, c, opts))
}

fn pairwise(pkg: &mut Package, c: &Circuit, opts: &BuildOptions) -> Result<(Edge, BuildStats)> {
    if c.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let start = Instant::now();
    let mut stats = BuildStats::default();
    // (edge, level); entries further up the stack cover later gates
    let mut stack: Vec<(Edge, usize)> = Vec::new();

    let merge =
        |pkg: &mut Package, stack: &mut Vec<(Edge, usize)>, stats: &mut BuildStats| -> Result<()> {
            opts.check()?;
            let (later, l1) = stack.pop().expect("two entries");
            let (earlier, l0) = stack.pop().expect("two entries");
            let r = consume_product(pkg, later, earlier)?;
            let level = l0.max(l1) + 1;
            stats.multiplications += 1;
            let nodes = pkg.node_count(r);
            stats.peak_nodes = stats.peak_nodes.max(nodes);
            stats.trace.push(Step { level, nodes });
            stack.push((r, level));
            after_multiply(pkg)
        };

    for i in 0..c.len() {
        opts.check()?;
        let g = gate_ref(pkg, c, i)?;
        let nodes = pkg.node_count(g);
        stats.peak_nodes = stats.peak_nodes.max(nodes);
        stack.push((g, 0));
        stats.max_live = stats.max_live.max(stack.len());
        while stack.len() >= 2 && stack[stack.len() - 1].1 == stack[stack.len() - 2].1 {
            merge(pkg, &mut stack, &mut stats)?;
        }
    }
    while stack.len() >= 2 {
        merge(pkg, &mut stack, &mut stats)?;
    }
    let (root, _) = stack.pop().expect("non-empty circuit");
    stats.final_nodes = pkg.node_count(root);
    stats.wall_time = start.elapsed();
    Ok((root, stats))
}

/// Builds `U_iter^N · U_init`, with both blocks built pairwise and the power
/// computed by square-and-multiply over the bits of `N` (most significant
/// first). Uses `⌊log₂N⌋` squarings, one multiplication per further set
/// bit and one final multiplication with the initialization block.
pub fn build_repeated(
    pkg: &mut Package,
    r: &RepeatedCircuit,
    opts: &BuildOptions,
) -> Result<(Edge, BuildStats)> {
    with_deadline(pkg, opts, |pkg| repeated(pkg, r, opts))
}

fn repeated(
    pkg: &mut Package,
    r: &RepeatedCircuit,
    opts: &BuildOptions,
) -> Result<(Edge, BuildStats)> {
    let n = r.repetitions;
    if n == 0 {
        return Err(Error::ZeroRepetitions);
    }
    let start = Instant::now();
    let (init, init_stats) = pairwise(pkg, &r.init, opts)?;
    let (iter, iter_stats) = pairwise(pkg, &r.iteration, opts)?;

    let mut stats = BuildStats {
        inner_multiplications: init_stats.multiplications + iter_stats.multiplications,
        peak_nodes: init_stats.peak_nodes.max(iter_stats.peak_nodes),
        max_live: 3,
        ..BuildStats::default()
    };
    let record = |pkg: &mut Package, stats: &mut BuildStats, e: Edge| {
        stats.multiplications += 1;
        let nodes = pkg.node_count(e);
        stats.peak_nodes = stats.peak_nodes.max(nodes);
        stats.trace.push(Step {
            level: stats.multiplications,
            nodes,
        });
    };

    let mut power = iter;
    pkg.inc_ref(power);
    let top = usize::BITS - 1 - n.leading_zeros();
    for bit in (0..top).rev() {
        opts.check()?;
        pkg.inc_ref(power);
        power = consume_product(pkg, power, power)?;
        record(pkg, &mut stats, power);
        after_multiply(pkg)?;
        if (n >> bit) & 1 == 1 {
            opts.check()?;
            pkg.inc_ref(iter);
            power = consume_product(pkg, power, iter)?;
            record(pkg, &mut stats, power);
            after_multiply(pkg)?;
        }
    }
    pkg.dec_ref(iter)?;
    opts.check()?;
    let root = consume_product(pkg, power, init)?;
    record(pkg, &mut stats, root);
    after_multiply(pkg)?;

    stats.final_nodes = pkg.node_count(root);
    stats.wall_time = start.elapsed();
    Ok((root, stats))
}

//! The decision-diagram package: node storage, the unique table, reference
//! counting and garbage collection.
//!
//! A 2^n×2^n matrix is split into its four 2^(n-1)×2^(n-1) blocks
//! `[top-left, top-right, bottom-left, bottom-right]`; a node at level `l`
//! stores one edge per block, with the blocks indexed by qubit `l`. Qubit
//! `n-1` is the root level and the most significant bit of row and column
//! indices.

use std::time::Instant;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::numerics::{ComplexRef, ComplexTable, ComplexValue, DEFAULT_TOLERANCE};
use crate::ops::ComputeTables;
use crate::oracle::DenseMatrix;

/// Largest qubit count accepted by [`Package::to_matrix`].
pub const DENSE_LIMIT: usize = 12;

/// Relative slack when comparing squared successor magnitudes.
const PIVOT_SLACK: f64 = 1e-8;

/// Node allocations between two checks of the deadline and node limit
/// inside a running operation.
const POLL_INTERVAL: u32 = 1 << 12;

/// Deepest level a node may sit on.
pub const MAX_LEVEL: usize = 127;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(u32::MAX);

    #[inline]
    pub fn is_terminal(self) -> bool {
        self == Self::TERMINAL
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

/// A weighted pointer to a node. A root edge denotes a whole matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub node: NodeId,
    pub weight: ComplexRef,
}

impl Edge {
    pub const ZERO: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: ComplexRef::ZERO,
    };
    pub const ONE: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: ComplexRef::ONE,
    };

    #[inline]
    pub fn terminal(weight: ComplexRef) -> Edge {
        Edge {
            node: NodeId::TERMINAL,
            weight,
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.weight.is_zero()
    }

    #[inline]
    pub fn is_terminal(self) -> bool {
        self.node.is_terminal()
    }

    /// Same node, weight ONE.
    #[inline]
    pub fn normalized(self) -> Edge {
        Edge {
            node: self.node,
            weight: ComplexRef::ONE,
        }
    }
}

pub(crate) type Successors = [Edge; 4];

/// Edge whose weight has not been entered into the complex table. Used for
/// intermediate results so that rounding to table entries happens only once
/// per stored weight.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Loose {
    pub(crate) node: NodeId,
    pub(crate) w: ComplexValue,
}

impl Loose {
    pub(crate) const ZERO: Loose = Loose {
        node: NodeId::TERMINAL,
        w: Complex64::new(0.0, 0.0),
    };

    #[inline]
    pub(crate) fn is_zero(self) -> bool {
        self.w.re == 0.0 && self.w.im == 0.0
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub(crate) level: u32,
    pub(crate) succ: Successors,
    pub(crate) rc: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct UniqueKey {
    level: u32,
    succ: Successors,
}

#[derive(Clone, Debug)]
pub struct PackageConfig {
    /// Per-coordinate tolerance of the complex table.
    pub tolerance: f64,
    /// log2 of the slot count of each compute table.
    pub compute_table_bits: u32,
    /// Live-node count above which [`Package::maybe_garbage_collect`] runs.
    pub gc_threshold: usize,
    /// Hard cap on stored nodes, checked by the construction strategies.
    pub max_nodes: Option<usize>,
}

impl Default for PackageConfig {
    fn default() -> Self {
        PackageConfig {
            tolerance: DEFAULT_TOLERANCE,
            compute_table_bits: 16,
            gc_threshold: 1 << 20,
            max_nodes: None,
        }
    }
}

/// Counters accumulated over the lifetime of a package.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PackageStats {
    pub nodes_allocated: u64,
    pub peak_unique_nodes: usize,
    pub gc_runs: u64,
    pub nodes_reclaimed: u64,
}

/// One decision-diagram engine instance. Not thread-safe; independent
/// instances may be used from different threads.
#[derive(Debug)]
pub struct Package {
    pub(crate) complex: ComplexTable,
    nodes: Vec<Node>,
    free: Vec<u32>,
    unique: FxHashMap<UniqueKey, NodeId>,
    pub(crate) compute: ComputeTables,
    config: PackageConfig,
    gc_limit: usize,
    stats: PackageStats,
    marks: Vec<u32>,
    epoch: u32,
    deadline: Option<Instant>,
    /// Set when a limit is hit inside an operation; the arithmetic then
    /// unwinds and reports it.
    pub(crate) interrupt: Option<Error>,
    poll_budget: u32,
}

impl Default for Package {
    fn default() -> Self {
        Self::new(PackageConfig::default())
    }
}

impl Package {
    pub fn new(config: PackageConfig) -> Self {
        Package {
            complex: ComplexTable::new(config.tolerance),
            nodes: Vec::new(),
            free: Vec::new(),
            unique: FxHashMap::default(),
            compute: ComputeTables::new(config.compute_table_bits),
            gc_limit: config.gc_threshold,
            config,
            stats: PackageStats::default(),
            marks: Vec::new(),
            epoch: 0,
            deadline: None,
            interrupt: None,
            poll_budget: POLL_INTERVAL,
        }
    }

    pub fn config(&self) -> &PackageConfig {
        &self.config
    }

    pub fn stats(&self) -> PackageStats {
        self.stats
    }

    pub fn complex_table(&self) -> &ComplexTable {
        &self.complex
    }

    pub fn complex_table_mut(&mut self) -> &mut ComplexTable {
        &mut self.complex
    }

    /// Number of nodes currently held by the unique table.
    pub fn unique_size(&self) -> usize {
        self.unique.len()
    }

    #[inline]
    pub(crate) fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    /// Level of the node an edge points to; `None` for terminal edges.
    #[inline]
    pub fn level(&self, e: Edge) -> Option<usize> {
        if e.node.is_terminal() {
            None
        } else {
            Some(self.node(e.node).level as usize)
        }
    }

    /// Qubit count of the matrix an edge denotes (0 for terminals).
    pub fn qubits(&self, e: Edge) -> usize {
        self.level(e).map_or(0, |l| l + 1)
    }

    /// Successor edges of a non-terminal node.
    pub fn successors(&self, id: NodeId) -> Option<[Edge; 4]> {
        (!id.is_terminal()).then(|| self.node(id).succ)
    }

    pub fn weight_value(&self, e: Edge) -> ComplexValue {
        self.complex.value(e.weight)
    }

    /// Edge to the same node with its weight multiplied by `w`.
    #[inline]
    pub(crate) fn scale(&mut self, e: Edge, w: ComplexRef) -> Edge {
        let weight = self.complex.cmul(e.weight, w);
        if weight.is_zero() {
            Edge::ZERO
        } else {
            Edge {
                node: e.node,
                weight,
            }
        }
    }

    /// Builds the canonical edge for a node with the given successors.
    ///
    /// Successor weights are divided by the first one of largest magnitude,
    /// which moves to the returned edge. Each non-zero successor must sit
    /// exactly one level below `level` (or be terminal when `level` is 0).
    pub fn make_node(&mut self, level: usize, succ: [Edge; 4]) -> Result<Edge> {
        if level > MAX_LEVEL {
            return Err(Error::LevelOutOfRange {
                level,
                reason: "exceeds the maximum supported level",
            });
        }
        for e in succ.iter().filter(|e| !e.is_zero()) {
            let ok = match self.level(*e) {
                None => level == 0,
                Some(l) => l + 1 == level,
            };
            if !ok {
                return Err(Error::LevelOutOfRange {
                    level,
                    reason: "successors must sit exactly one level lower",
                });
            }
        }
        Ok(self.make_node_unchecked(level, succ))
    }

    pub(crate) fn make_node_unchecked(&mut self, level: usize, succ: Successors) -> Edge {
        let loose = succ.map(|e| self.loosen(e));
        let r = self.make_node_loose(level, loose);
        self.tighten(r)
    }

    /// Edge with its weight read out of the complex table.
    #[inline]
    pub(crate) fn loosen(&self, e: Edge) -> Loose {
        Loose {
            node: e.node,
            w: self.complex.value(e.weight),
        }
    }

    /// Edge with its weight entered into the complex table.
    #[inline]
    pub(crate) fn tighten(&mut self, e: Loose) -> Edge {
        if self.negligible(e.w) {
            return Edge::ZERO;
        }
        Edge {
            node: e.node,
            weight: self.complex.lookup_finite(e.w),
        }
    }

    #[inline]
    pub(crate) fn negligible(&self, w: ComplexValue) -> bool {
        let eps = self.complex.tolerance();
        w.re.abs() <= eps && w.im.abs() <= eps
    }

    /// Normalizing node constructor on raw weights. Only the normalized
    /// successor weights go through the complex table; the factored-out
    /// weight is returned as computed.
    pub(crate) fn make_node_loose(&mut self, level: usize, succ: [Loose; 4]) -> Loose {
        let mut mags = [0.0f64; 4];
        for (m, e) in mags.iter_mut().zip(&succ) {
            if !self.negligible(e.w) {
                *m = e.w.norm_sqr();
            }
        }
        let max = mags.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return Loose::ZERO;
        }
        let pivot = mags
            .iter()
            .position(|&m| m >= max * (1.0 - PIVOT_SLACK))
            .expect("maximum is attained");
        let factor = succ[pivot].w;
        let mut out = [Edge::ZERO; 4];
        for i in 0..4 {
            if mags[i] == 0.0 {
                continue;
            }
            let weight = if i == pivot {
                ComplexRef::ONE
            } else {
                self.complex.lookup_finite(succ[i].w / factor)
            };
            if !weight.is_zero() {
                out[i] = Edge {
                    node: succ[i].node,
                    weight,
                };
            }
        }
        let key = UniqueKey {
            level: level as u32,
            succ: out,
        };
        let node = match self.unique.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.allocate(Node {
                    level: level as u32,
                    succ: out,
                    rc: 0,
                });
                self.unique.insert(key, id);
                self.stats.nodes_allocated += 1;
                self.stats.peak_unique_nodes = self.stats.peak_unique_nodes.max(self.unique.len());
                self.poll_budget -= 1;
                if self.poll_budget == 0 {
                    self.poll_budget = POLL_INTERVAL;
                    self.poll_limits();
                }
                id
            }
        };
        Loose { node, w: factor }
    }

    fn allocate(&mut self, node: Node) -> NodeId {
        if let Some(slot) = self.free.pop() {
            self.nodes[slot as usize] = node;
            NodeId(slot)
        } else {
            let id = u32::try_from(self.nodes.len())
                .ok()
                .filter(|&i| i != u32::MAX)
                .expect("node arena overflow");
            self.nodes.push(node);
            NodeId(id)
        }
    }

    /// DD of the 2^n×2^n identity: one node per level.
    pub fn identity(&mut self, n: usize) -> Result<Edge> {
        if n == 0 || n > MAX_LEVEL + 1 {
            return Err(Error::InvalidQubitCount(n));
        }
        let mut e = Edge::ONE;
        for level in 0..n {
            e = self.make_node_unchecked(level, [e, Edge::ZERO, Edge::ZERO, e]);
        }
        Ok(e)
    }

    /// Number of distinct non-terminal nodes reachable from `e`.
    pub fn node_count(&mut self, e: Edge) -> usize {
        if e.is_zero() || e.is_terminal() {
            return 0;
        }
        let epoch = self.next_epoch();
        let mut stack = vec![e.node];
        self.marks[e.node.0 as usize] = epoch;
        let mut count = 0;
        while let Some(id) = stack.pop() {
            count += 1;
            let succ = self.nodes[id.0 as usize].succ;
            for s in succ {
                if !s.node.is_terminal() && self.marks[s.node.0 as usize] != epoch {
                    self.marks[s.node.0 as usize] = epoch;
                    stack.push(s.node);
                }
            }
        }
        count
    }

    fn next_epoch(&mut self) -> u32 {
        if self.marks.len() < self.nodes.len() {
            self.marks.resize(self.nodes.len(), 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Protects `e` and everything below it from garbage collection.
    pub fn inc_ref(&mut self, e: Edge) {
        if e.node.is_terminal() {
            return;
        }
        let mut stack = vec![e.node];
        while let Some(id) = stack.pop() {
            let node = &mut self.nodes[id.0 as usize];
            node.rc = node.rc.checked_add(1).expect("reference count overflow");
            if node.rc == 1 {
                stack.extend(
                    node.succ
                        .iter()
                        .filter(|s| !s.node.is_terminal())
                        .map(|s| s.node),
                );
            }
        }
    }

    /// Releases a reference taken with [`Package::inc_ref`].
    pub fn dec_ref(&mut self, e: Edge) -> Result<()> {
        if e.node.is_terminal() {
            return Ok(());
        }
        if self.nodes[e.node.0 as usize].rc == 0 {
            return Err(Error::RefUnderflow(e.node.0));
        }
        let mut stack = vec![e.node];
        while let Some(id) = stack.pop() {
            let node = &mut self.nodes[id.0 as usize];
            // children of a live node always hold a reference from it
            debug_assert!(node.rc > 0);
            node.rc -= 1;
            if node.rc == 0 {
                stack.extend(
                    node.succ
                        .iter()
                        .filter(|s| !s.node.is_terminal())
                        .map(|s| s.node),
                );
            }
        }
        Ok(())
    }

    /// Removes every node without references. Compute tables are flushed
    /// whenever anything is reclaimed, since freed slots get reused.
    pub fn garbage_collect(&mut self) -> usize {
        let before = self.unique.len();
        let nodes = &self.nodes;
        let free = &mut self.free;
        self.unique.retain(|_, id| {
            let keep = nodes[id.0 as usize].rc > 0;
            if !keep {
                free.push(id.0);
            }
            keep
        });
        let reclaimed = before - self.unique.len();
        if reclaimed > 0 {
            self.compute.clear();
        }
        self.stats.gc_runs += 1;
        self.stats.nodes_reclaimed += reclaimed as u64;
        reclaimed
    }

    /// Collects garbage once the unique table grows past the threshold. If a
    /// collection leaves the table more than half full the threshold doubles.
    pub fn maybe_garbage_collect(&mut self) -> usize {
        if self.unique.len() <= self.gc_limit {
            return 0;
        }
        let reclaimed = self.garbage_collect();
        if self.unique.len() * 2 > self.gc_limit {
            self.gc_limit = self.gc_limit.saturating_mul(2);
        }
        reclaimed
    }

    /// Deadline for multiply and add; an operation still running when it
    /// passes is abandoned with [`Error::Timeout`].
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    fn poll_limits(&mut self) {
        if self.interrupt.is_some() {
            return;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.interrupt = Some(Error::Timeout);
        } else if let Err(e) = self.check_node_limit() {
            self.interrupt = Some(e);
        }
    }

    pub(crate) fn check_node_limit(&self) -> Result<()> {
        match self.config.max_nodes {
            Some(limit) if self.unique.len() > limit => Err(Error::NodeLimit(limit)),
            _ => Ok(()),
        }
    }

    /// Dense matrix of the DD over `n` qubits.
    pub fn to_matrix(&self, e: Edge, n: usize) -> Result<DenseMatrix> {
        if n > DENSE_LIMIT {
            return Err(Error::DenseLimit {
                n,
                limit: DENSE_LIMIT,
            });
        }
        let top = self.level(e);
        let fits = match top {
            None => e.is_zero() || n == 0,
            Some(l) => l + 1 == n,
        };
        if !fits {
            return Err(Error::LevelMismatch {
                left: top,
                right: n.checked_sub(1),
            });
        }
        let mut m = DenseMatrix::zeros(n);
        self.fill(&mut m, e, Complex64::new(1.0, 0.0), 0, 0, 1 << n);
        Ok(m)
    }

    /// Single matrix entry, following one path from the root. `row` and
    /// `col` index the matrix the edge denotes over its own qubit count.
    pub fn entry(&self, e: Edge, row: u128, col: u128) -> ComplexValue {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut e = e;
        loop {
            if e.is_zero() {
                return Complex64::new(0.0, 0.0);
            }
            acc *= self.complex.value(e.weight);
            let Some(level) = self.level(e) else {
                return acc;
            };
            let r = ((row >> level) & 1) as usize;
            let c = ((col >> level) & 1) as usize;
            e = self.node(e.node).succ[2 * r + c];
        }
    }

    fn fill(
        &self,
        m: &mut DenseMatrix,
        e: Edge,
        acc: Complex64,
        row: usize,
        col: usize,
        size: usize,
    ) {
        if e.is_zero() {
            return;
        }
        let w = acc * self.complex.value(e.weight);
        if e.node.is_terminal() {
            m.set(row, col, w);
            return;
        }
        let half = size / 2;
        let succ = self.node(e.node).succ;
        for (i, s) in succ.into_iter().enumerate() {
            self.fill(m, s, w, row + (i >> 1) * half, col + (i & 1) * half, half);
        }
    }

    /// Human-readable listing of the nodes reachable from `e`, parents first.
    pub fn dump(&self, e: Edge) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let w = self.complex.value(e.weight);
        let _ = writeln!(out, "root -> {} weight {}", fmt_node(e.node), fmt_c(w));
        let mut seen = rustc_hash::FxHashSet::default();
        let mut order = Vec::new();
        let mut stack = vec![e.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() || !seen.insert(id) {
                continue;
            }
            order.push(id);
            stack.extend(self.node(id).succ.iter().rev().map(|s| s.node));
        }
        order.sort_by_key(|id| std::cmp::Reverse(self.node(*id).level));
        for id in order {
            let node = self.node(id);
            let _ = write!(out, "{} level {}:", fmt_node(id), node.level);
            for s in node.succ {
                if s.is_zero() {
                    let _ = write!(out, " 0");
                } else {
                    let _ = write!(
                        out,
                        " {}*{}",
                        fmt_c(self.complex.value(s.weight)),
                        fmt_node(s.node)
                    );
                }
            }
            out.push('\n');
        }
        out
    }
}

fn fmt_node(id: NodeId) -> String {
    if id.is_terminal() {
        "T".to_string()
    } else {
        format!("n{}", id.0)
    }
}

fn fmt_c(v: Complex64) -> String {
    format!("({:.6}{:+.6}i)", v.re, v.im)
}

//! Recursive DD arithmetic: multiplication, addition and Kronecker product,
//! memoized in fixed-size compute tables.

use std::hash::{Hash, Hasher};

use rustc_hash::FxHasher;

use crate::error::{Error, Result};
use crate::package::{Edge, Loose, NodeId, Package};

/// Direct-mapped memo table. A colliding insert replaces the old entry.
#[derive(Debug, Clone)]
pub(crate) struct ComputeTable<K> {
    slots: Vec<Option<(K, Loose)>>,
    mask: usize,
    pub(crate) hits: u64,
    pub(crate) lookups: u64,
}

impl<K: Hash + Eq + Copy> ComputeTable<K> {
    fn new(bits: u32) -> Self {
        let size = 1usize << bits;
        ComputeTable {
            slots: vec![None; size],
            mask: size - 1,
            hits: 0,
            lookups: 0,
        }
    }

    #[inline]
    fn slot(&self, key: &K) -> usize {
        let mut h = FxHasher::default();
        key.hash(&mut h);
        let h = h.finish();
        ((h ^ (h >> 29)) as usize) & self.mask
    }

    #[inline]
    fn get(&mut self, key: &K) -> Option<Loose> {
        self.lookups += 1;
        match &self.slots[self.slot(key)] {
            Some((k, e)) if k == key => {
                self.hits += 1;
                Some(*e)
            }
            _ => None,
        }
    }

    #[inline]
    fn put(&mut self, key: K, value: Loose) {
        let i = self.slot(&key);
        self.slots[i] = Some((key, value));
    }

    fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ComputeTables {
    mul: ComputeTable<(NodeId, NodeId)>,
    add: ComputeTable<(NodeId, NodeId, u64, u64)>,
    kron: ComputeTable<(NodeId, NodeId)>,
}

impl ComputeTables {
    pub(crate) fn new(bits: u32) -> Self {
        assert!((1..=30).contains(&bits), "compute table size out of range");
        ComputeTables {
            mul: ComputeTable::new(bits),
            add: ComputeTable::new(bits),
            kron: ComputeTable::new(bits),
        }
    }

    pub(crate) fn clear(&mut self) {
        self.mul.clear();
        self.add.clear();
        self.kron.clear();
    }
}

/// Hit statistics of the multiplication compute table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub lookups: u64,
    pub hits: u64,
}

impl Package {
    pub fn multiply_cache_stats(&self) -> CacheStats {
        CacheStats {
            lookups: self.compute.mul.lookups,
            hits: self.compute.mul.hits,
        }
    }

    /// Drops all memoized results.
    pub fn clear_compute_tables(&mut self) {
        self.compute.clear();
    }

    fn check_same_level(&self, u: Edge, v: Edge) -> Result<()> {
        if u.is_zero() || v.is_zero() {
            return Ok(());
        }
        let (lu, lv) = (self.level(u), self.level(v));
        if lu != lv {
            return Err(Error::LevelMismatch {
                left: lu,
                right: lv,
            });
        }
        Ok(())
    }

    /// Matrix product `u · v`.
    pub fn multiply(&mut self, u: Edge, v: Edge) -> Result<Edge> {
        self.check_same_level(u, v)?;
        let r = self.mul_rec(self.loosen(u), self.loosen(v));
        self.finish(r)
    }

    /// Entrywise sum `u + v`.
    pub fn add(&mut self, u: Edge, v: Edge) -> Result<Edge> {
        self.check_same_level(u, v)?;
        let r = self.add_rec(self.loosen(u), self.loosen(v));
        self.finish(r)
    }

    /// Turns a recursion result into an edge, or reports the limit that cut
    /// the recursion short. Memoized results of an interrupted run may be
    /// wrong, so the compute tables are dropped.
    fn finish(&mut self, r: Loose) -> Result<Edge> {
        if let Some(e) = self.interrupt.take() {
            self.compute.clear();
            return Err(e);
        }
        Ok(self.tighten(r))
    }

    /// Kronecker product `a ⊗ b`; `b` occupies the lower levels.
    pub fn kron(&mut self, a: Edge, b: Edge) -> Edge {
        if a.is_zero() || b.is_zero() {
            return Edge::ZERO;
        }
        let shift = self.qubits(b);
        let r = self.kron_rec(a.normalized(), b.node, shift);
        let w = self.weight_value(a) * self.weight_value(b);
        self.tighten(Loose {
            node: r.node,
            w: r.w * w,
        })
    }

    fn mul_rec(&mut self, u: Loose, v: Loose) -> Loose {
        if u.is_zero() || v.is_zero() || self.interrupt.is_some() {
            return Loose::ZERO;
        }
        let w = u.w * v.w;
        if u.node.is_terminal() && v.node.is_terminal() {
            return Loose { node: u.node, w };
        }
        let key = (u.node, v.node);
        if let Some(r) = self.compute.mul.get(&key) {
            return Loose {
                node: r.node,
                w: r.w * w,
            };
        }
        let (un, vn) = (self.node(u.node), self.node(v.node));
        debug_assert_eq!(un.level, vn.level);
        let level = un.level as usize;
        let us = un.succ.map(|e| self.loosen(e));
        let vs = vn.succ.map(|e| self.loosen(e));

        let mut out = [Loose::ZERO; 4];
        for i in 0..2 {
            for j in 0..2 {
                let left = self.mul_rec(us[2 * i], vs[j]);
                let right = self.mul_rec(us[2 * i + 1], vs[2 + j]);
                out[2 * i + j] = self.add_rec(left, right);
            }
        }
        let r = self.make_node_loose(level, out);
        self.compute.mul.put(key, r);
        Loose {
            node: r.node,
            w: r.w * w,
        }
    }

    /// Keyed on `(x.node, y.node, y.weight / x.weight)` so that sums of
    /// scalar multiples share cache entries. The ratio is keyed exactly:
    /// rounding it would erase the small differences that cancellation
    /// leaves behind.
    fn add_rec(&mut self, x: Loose, y: Loose) -> Loose {
        if self.interrupt.is_some() {
            return Loose::ZERO;
        }
        if x.is_zero() {
            return y;
        }
        if y.is_zero() {
            return x;
        }
        if x.node == y.node {
            let w = x.w + y.w;
            return if self.negligible(w) {
                Loose::ZERO
            } else {
                Loose { node: x.node, w }
            };
        }
        // order operands so that the key is symmetric
        let (x, y) = if x.node <= y.node { (x, y) } else { (y, x) };
        let ratio = y.w / x.w;
        let key = (x.node, y.node, ratio.re.to_bits(), ratio.im.to_bits());
        if let Some(r) = self.compute.add.get(&key) {
            return Loose {
                node: r.node,
                w: r.w * x.w,
            };
        }
        let (xn, yn) = (self.node(x.node), self.node(y.node));
        debug_assert_eq!(xn.level, yn.level);
        let level = xn.level as usize;
        let xs = xn.succ.map(|e| self.loosen(e));
        let ys = yn.succ.map(|e| self.loosen(e));

        let mut out = [Loose::ZERO; 4];
        for k in 0..4 {
            let b = Loose {
                node: ys[k].node,
                w: ys[k].w * ratio,
            };
            out[k] = self.add_rec(xs[k], b);
        }
        let r = self.make_node_loose(level, out);
        self.compute.add.put(key, r);
        Loose {
            node: r.node,
            w: r.w * x.w,
        }
    }

    /// `a ⊗ B` where `B` is the node `b` with unit weight.
    fn kron_rec(&mut self, a: Edge, b: NodeId, shift: usize) -> Loose {
        if a.is_zero() {
            return Loose::ZERO;
        }
        let aw = self.weight_value(a);
        if a.is_terminal() {
            return Loose { node: b, w: aw };
        }
        let key = (a.node, b);
        let r = match self.compute.kron.get(&key) {
            Some(r) => r,
            None => {
                let node = self.node(a.node);
                let level = node.level as usize + shift;
                let succ = node.succ;
                let mut out = [Loose::ZERO; 4];
                for (o, s) in out.iter_mut().zip(succ) {
                    *o = self.kron_rec(s, b, shift);
                }
                let r = self.make_node_loose(level, out);
                self.compute.kron.put(key, r);
                r
            }
        };
        Loose {
            node: r.node,
            w: r.w * aw,
        }
    }
}

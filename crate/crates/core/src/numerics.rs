//! Canonical complex edge weights.
//!
//! Every weight used by the decision-diagram engine lives in a [`ComplexTable`]
//! and is referred to through a [`ComplexRef`]. Values closer than the table
//! tolerance (per coordinate) share one handle, which is what lets the unique
//! table recognise numerically equal nodes.

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Handle into a [`ComplexTable`]. Equal handles denote the same entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexRef(u32);

impl ComplexRef {
    pub const ZERO: ComplexRef = ComplexRef(0);
    pub const ONE: ComplexRef = ComplexRef(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self == Self::ONE
    }
}

/// Grow-only table of complex numbers deduplicated under a tolerance.
///
/// Entries are bucketed on a grid with cell width `4ε`; a lookup probes the
/// home cell plus the neighbour cells that lie within `ε` of the value.
#[derive(Debug, Clone)]
pub struct ComplexTable {
    values: Vec<ComplexValue>,
    buckets: FxHashMap<(i64, i64), SmallVec<[u32; 2]>>,
    tolerance: f64,
    cell: f64,
}

impl Default for ComplexTable {
    fn default() -> Self {
        Self::new(DEFAULT_TOLERANCE)
    }
}

impl ComplexTable {
    pub fn new(tolerance: f64) -> Self {
        assert!(
            tolerance.is_finite() && tolerance > 0.0,
            "tolerance must be positive"
        );
        let mut table = ComplexTable {
            values: Vec::new(),
            buckets: FxHashMap::default(),
            tolerance,
            cell: 4.0 * tolerance,
        };
        table.insert(ComplexValue::new(0.0, 0.0));
        table.insert(ComplexValue::new(1.0, 0.0));
        table
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn value(&self, r: ComplexRef) -> ComplexValue {
        self.values[r.0 as usize]
    }

    /// Returns the handle of an entry within tolerance of `v`, inserting `v`
    /// if there is none.
    pub fn lookup(&mut self, v: ComplexValue) -> Result<ComplexRef> {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite { re: v.re, im: v.im });
        }
        Ok(self.lookup_finite(v))
    }

    pub(crate) fn lookup_finite(&mut self, v: ComplexValue) -> ComplexRef {
        debug_assert!(v.re.is_finite() && v.im.is_finite());
        let eps = self.tolerance;
        if v.im.abs() <= eps {
            if v.re.abs() <= eps {
                return ComplexRef::ZERO;
            }
            if (v.re - 1.0).abs() <= eps {
                return ComplexRef::ONE;
            }
        }

        let (cx, fx) = self.cell_of(v.re);
        let (cy, fy) = self.cell_of(v.im);
        let dx = self.neighbour(fx);
        let dy = self.neighbour(fy);

        if let Some(r) = self.probe((cx, cy), v) {
            return r;
        }
        if dx != 0 {
            if let Some(r) = self.probe((cx + dx, cy), v) {
                return r;
            }
        }
        if dy != 0 {
            if let Some(r) = self.probe((cx, cy + dy), v) {
                return r;
            }
        }
        if dx != 0 && dy != 0 {
            if let Some(r) = self.probe((cx + dx, cy + dy), v) {
                return r;
            }
        }
        self.insert(v)
    }

    #[inline]
    fn cell_of(&self, x: f64) -> (i64, f64) {
        let scaled = (x / self.cell).floor();
        (scaled as i64, x - scaled * self.cell)
    }

    #[inline]
    fn neighbour(&self, offset: f64) -> i64 {
        if offset < self.tolerance {
            -1
        } else if self.cell - offset <= self.tolerance {
            1
        } else {
            0
        }
    }

    fn probe(&self, key: (i64, i64), v: ComplexValue) -> Option<ComplexRef> {
        let eps = self.tolerance;
        self.buckets.get(&key).and_then(|ids| {
            ids.iter().copied().find_map(|id| {
                let e = self.values[id as usize];
                ((e.re - v.re).abs() <= eps && (e.im - v.im).abs() <= eps).then_some(ComplexRef(id))
            })
        })
    }

    fn insert(&mut self, v: ComplexValue) -> ComplexRef {
        let id = u32::try_from(self.values.len()).expect("complex table overflow");
        self.values.push(v);
        let key = (self.cell_of(v.re).0, self.cell_of(v.im).0);
        self.buckets.entry(key).or_default().push(id);
        ComplexRef(id)
    }

    /// Looks up a value produced by engine arithmetic. Overflow to a
    /// non-finite value is an engine bug, so it panics.
    #[inline]
    fn canonical(&mut self, v: ComplexValue) -> ComplexRef {
        assert!(
            v.re.is_finite() && v.im.is_finite(),
            "engine arithmetic produced a non-finite weight"
        );
        self.lookup_finite(v)
    }

    pub fn cadd(&mut self, a: ComplexRef, b: ComplexRef) -> ComplexRef {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let v = self.value(a) + self.value(b);
        self.canonical(v)
    }

    pub fn cmul(&mut self, a: ComplexRef, b: ComplexRef) -> ComplexRef {
        if a.is_zero() || b.is_zero() {
            return ComplexRef::ZERO;
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        let v = self.value(a) * self.value(b);
        self.canonical(v)
    }

    pub fn cneg(&mut self, a: ComplexRef) -> ComplexRef {
        if a.is_zero() {
            return a;
        }
        let v = -self.value(a);
        self.canonical(v)
    }

    pub fn cdiv(&mut self, a: ComplexRef, b: ComplexRef) -> Result<ComplexRef> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.is_zero() || b.is_one() {
            return Ok(a);
        }
        if a == b {
            return Ok(ComplexRef::ONE);
        }
        let v = self.value(a) / self.value(b);
        Ok(self.canonical(v))
    }
}

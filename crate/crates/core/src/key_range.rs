use std::fmt;
use std::ops::Bound;

use crate::storage::Value;

/// An interval over index keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRange {
    pub lo: Bound<Value>,
    pub hi: Bound<Value>,
}

impl KeyRange {
    /// `lo <= key <= hi`, i.e. SQL `BETWEEN`.
    pub fn between(lo: impl Into<Value>, hi: impl Into<Value>) -> Self {
        KeyRange { lo: Bound::Included(lo.into()), hi: Bound::Included(hi.into()) }
    }

    pub fn new(lo: Value, lo_inclusive: bool, hi: Value, hi_inclusive: bool) -> Self {
        let wrap = |v, inc| if inc { Bound::Included(v) } else { Bound::Excluded(v) };
        KeyRange { lo: wrap(lo, lo_inclusive), hi: wrap(hi, hi_inclusive) }
    }

    pub fn point(v: impl Into<Value>) -> Self {
        let v = v.into();
        KeyRange { lo: Bound::Included(v.clone()), hi: Bound::Included(v) }
    }

    pub fn all() -> Self {
        KeyRange { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn contains(&self, v: &Value) -> bool {
        let above = match &self.lo {
            Bound::Included(lo) => v >= lo,
            Bound::Excluded(lo) => v > lo,
            Bound::Unbounded => true,
        };
        let below = match &self.hi {
            Bound::Included(hi) => v <= hi,
            Bound::Excluded(hi) => v < hi,
            Bound::Unbounded => true,
        };
        above && below
    }

    /// True when no value can satisfy the range (`lo > hi`, or an empty
    /// half-open interval).
    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Bound::Included(lo), Bound::Included(hi)) => lo > hi,
            (Bound::Included(lo), Bound::Excluded(hi)) | (Bound::Excluded(lo), Bound::Included(hi)) => lo >= hi,
            (Bound::Excluded(lo), Bound::Excluded(hi)) => match (lo.as_int(), hi.as_int()) {
                (Some(a), Some(b)) => b - a < 2,
                _ => lo >= hi,
            },
            _ => false,
        }
    }

    /// Index of the first key in `keys` (sorted ascending) that is not below the range.
    pub(crate) fn start_in<T>(&self, keys: &[T], key: impl Fn(&T) -> &Value) -> usize {
        match &self.lo {
            Bound::Included(lo) => keys.partition_point(|k| key(k) < lo),
            Bound::Excluded(lo) => keys.partition_point(|k| key(k) <= lo),
            Bound::Unbounded => 0,
        }
    }

    /// One past the last key in `keys` that is not above the range.
    pub(crate) fn end_in<T>(&self, keys: &[T], key: impl Fn(&T) -> &Value) -> usize {
        match &self.hi {
            Bound::Included(hi) => keys.partition_point(|k| key(k) <= hi),
            Bound::Excluded(hi) => keys.partition_point(|k| key(k) < hi),
            Bound::Unbounded => keys.len(),
        }
    }
}

impl fmt::Display for KeyRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            Bound::Included(v) => write!(f, "[{v}")?,
            Bound::Excluded(v) => write!(f, "({v}")?,
            Bound::Unbounded => write!(f, "(-inf")?,
        }
        match &self.hi {
            Bound::Included(v) => write!(f, ", {v}]"),
            Bound::Excluded(v) => write!(f, ", {v})"),
            Bound::Unbounded => write!(f, ", +inf)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emptiness() {
        assert!(KeyRange::between(5, 4).is_empty());
        assert!(!KeyRange::between(4, 4).is_empty());
        assert!(KeyRange::new(Value::Int(4), false, Value::Int(5), false).is_empty());
        assert!(!KeyRange::new(Value::Int(4), false, Value::Int(6), false).is_empty());
        assert!(!KeyRange::all().is_empty());
    }

    #[test]
    fn search_bounds() {
        let keys: Vec<Value> = [1, 3, 3, 5, 9].into_iter().map(Value::Int).collect();
        let r = KeyRange::between(3, 5);
        assert_eq!((r.start_in(&keys, |k| k), r.end_in(&keys, |k| k)), (1, 4));
        let r = KeyRange::new(Value::Int(3), false, Value::Int(9), false);
        assert_eq!((r.start_in(&keys, |k| k), r.end_in(&keys, |k| k)), (3, 4));
        assert!(r.contains(&Value::Int(5)) && !r.contains(&Value::Int(9)));
    }
}

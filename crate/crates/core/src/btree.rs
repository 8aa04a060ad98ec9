//! Non-unique B-tree index, bulk loaded bottom-up from sorted `(key, rowid)` pairs.
//!
//! Leaves hold `(key, rowid)` entries in `(key, rowid)` order and form a
//! chain; branch nodes hold the largest entry of each child as separator.
//! NULL keys are not indexed. Node block numbers put the leaves first
//! (`0..leaf_blocks`) followed by each branch level bottom-up.

use std::fmt;
use std::ops::Bound;

use crate::error::{Error, Result};
use crate::key_range::KeyRange;
use crate::storage::{BufferPool, Column, RowId, SegmentId, Table, Value};

pub const DEFAULT_FANOUT: usize = 400;
pub const MIN_FANOUT: usize = 4;

const NODE_HEADER_BYTES: u64 = 24;
/// row header + key length + rowid length + rowid
const LEAF_ENTRY_OVERHEAD: u64 = 2 + 1 + 1 + 6;
/// row header + key length + child block pointer
const BRANCH_ENTRY_OVERHEAD: u64 = 2 + 1 + 4;

#[derive(Debug, Clone)]
struct Branch {
    /// last entry of each child
    separators: Vec<(Value, RowId)>,
    /// index of the first child in the level below
    first_child: usize,
}

pub struct BTreeIndex {
    name: String,
    table: String,
    column: Column,
    segment: SegmentId,
    fanout: usize,
    leaves: Vec<Vec<(Value, RowId)>>,
    /// branch levels, lowest first; the last level has exactly one node (the root)
    branches: Vec<Vec<Branch>>,
    entry_count: u64,
    size_bytes: u64,
}

impl fmt::Debug for BTreeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BTreeIndex")
            .field("name", &self.name)
            .field("column", &self.column)
            .field("blevel", &self.blevel())
            .field("leaf_blocks", &self.leaf_blocks())
            .field("entries", &self.entry_count)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BTreeStats {
    pub blevel: u32,
    pub leaf_blocks: u64,
    pub entry_count: u64,
}

/// Splits `n` items into `ceil(n / fanout)` groups whose sizes differ by at most one.
fn even_groups(n: usize, fanout: usize) -> Vec<std::ops::Range<usize>> {
    let groups = n.div_ceil(fanout);
    let (base, extra) = n.checked_div(groups).map_or((0, 0), |base| (base, n % groups));
    let mut start = 0;
    (0..groups)
        .map(|g| {
            let len = base + usize::from(g < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

pub fn build_btree_index(name: impl Into<String>, table: &Table, column: Column, fanout: usize) -> Result<BTreeIndex> {
    if fanout < MIN_FANOUT {
        return Err(Error::Config(format!("fanout {fanout} below minimum {MIN_FANOUT}")));
    }
    table.schema().require(column)?;
    let mut entries: Vec<(Value, RowId)> =
        table.rows().filter_map(|(rid, row)| row.value(column).map(|v| (v, rid))).collect();
    entries.sort();
    let entry_count = entries.len() as u64;

    let mut size_bytes = 0u64;
    let mut leaves = Vec::new();
    let mut rest = entries.into_iter();
    for g in even_groups(entry_count as usize, fanout) {
        let leaf: Vec<_> = rest.by_ref().take(g.len()).collect();
        size_bytes +=
            NODE_HEADER_BYTES + leaf.iter().map(|(k, _)| LEAF_ENTRY_OVERHEAD + k.key_len() as u64).sum::<u64>();
        leaves.push(leaf);
    }

    let mut branches: Vec<Vec<Branch>> = Vec::new();
    let mut child_maxes: Vec<(Value, RowId)> = leaves.iter().map(|l| l[l.len() - 1].clone()).collect();
    while child_maxes.len() > 1 {
        let level: Vec<Branch> = even_groups(child_maxes.len(), fanout)
            .into_iter()
            .map(|g| Branch { first_child: g.start, separators: child_maxes[g].to_vec() })
            .collect();
        size_bytes += level
            .iter()
            .map(|b| {
                NODE_HEADER_BYTES
                    + b.separators.iter().map(|(k, _)| BRANCH_ENTRY_OVERHEAD + k.key_len() as u64).sum::<u64>()
            })
            .sum::<u64>();
        child_maxes = level.iter().map(|b| b.separators[b.separators.len() - 1].clone()).collect();
        branches.push(level);
    }

    Ok(BTreeIndex {
        name: name.into(),
        table: table.name().to_string(),
        column,
        segment: SegmentId::fresh(),
        fanout,
        leaves,
        branches,
        entry_count,
        size_bytes,
    })
}

impl BTreeIndex {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table_name(&self) -> &str {
        &self.table
    }

    pub fn column(&self) -> Column {
        self.column
    }

    pub fn segment(&self) -> SegmentId {
        self.segment
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    /// Branch levels above the leaves.
    pub fn blevel(&self) -> u32 {
        self.branches.len() as u32
    }

    pub fn leaf_blocks(&self) -> u64 {
        self.leaves.len() as u64
    }

    pub fn entry_count(&self) -> u64 {
        self.entry_count
    }

    pub fn size_bytes(&self) -> u64 {
        self.size_bytes
    }

    pub fn stats(&self) -> BTreeStats {
        BTreeStats { blevel: self.blevel(), leaf_blocks: self.leaf_blocks(), entry_count: self.entry_count }
    }

    /// All leaf entries in `(key, rowid)` order, without touching the buffer pool.
    pub fn entries(&self) -> impl Iterator<Item = &(Value, RowId)> {
        self.leaves.iter().flatten()
    }

    fn branch_block(&self, level: usize, node: usize) -> u32 {
        let below: usize = self.branches[..level].iter().map(Vec::len).sum();
        (self.leaves.len() + below + node) as u32
    }

    /// Descends from the root to the leaf where entries satisfying `lo` begin,
    /// charging one get per node.
    fn descend(&self, pool: &mut BufferPool, lo: &Bound<Value>) -> usize {
        let child_of = |seps: &[(Value, RowId)]| -> usize {
            let p = match lo {
                Bound::Included(v) => seps.partition_point(|(k, _)| k < v),
                Bound::Excluded(v) => seps.partition_point(|(k, _)| k <= v),
                Bound::Unbounded => 0,
            };
            p.min(seps.len() - 1)
        };
        let mut node = 0usize;
        for level in (0..self.branches.len()).rev() {
            pool.access(self.segment, self.branch_block(level, node));
            let b = &self.branches[level][node];
            node = b.first_child + child_of(&b.separators);
        }
        pool.access(self.segment, node as u32);
        node
    }

    /// Entries with keys in `range`, in `(key, rowid)` order.
    ///
    /// Costs `blevel + 1` gets to reach the first leaf plus one per further
    /// leaf whose entries are read.
    pub fn scan_range(&self, pool: &mut BufferPool, range: &KeyRange) -> Vec<(Value, RowId)> {
        let mut out = Vec::new();
        if self.leaves.is_empty() {
            return out;
        }
        let mut leaf = self.descend(pool, &range.lo);
        if range.is_empty() {
            return out;
        }
        let mut pos = range.start_in(&self.leaves[leaf], |e| &e.0);
        loop {
            let entries = &self.leaves[leaf];
            for e in &entries[pos..] {
                if !range.contains(&e.0) {
                    return out;
                }
                out.push(e.clone());
            }
            leaf += 1;
            match self.leaves.get(leaf) {
                Some(next) if range.contains(&next[0].0) => {
                    pool.access(self.segment, leaf as u32);
                    pos = 0;
                }
                _ => return out,
            }
        }
    }

    pub fn search_eq(&self, pool: &mut BufferPool, key: &Value) -> Vec<RowId> {
        self.scan_range(pool, &KeyRange::point(key.clone())).into_iter().map(|(_, rid)| rid).collect()
    }

    /// Checks balance, occupancy and ordering by full traversal.
    pub fn check_invariants(&self) -> Result<(), String> {
        let min_fill = self.fanout.div_ceil(2);
        let many = self.leaves.len() > 1;
        for (i, leaf) in self.leaves.iter().enumerate() {
            if leaf.is_empty() || leaf.len() > self.fanout || (many && leaf.len() < min_fill) {
                return Err(format!("leaf {i} holds {} entries", leaf.len()));
            }
        }
        let all: Vec<_> = self.entries().collect();
        if all.windows(2).any(|w| w[0] > w[1]) {
            return Err("leaf entries out of order".into());
        }
        if all.len() as u64 != self.entry_count {
            return Err("entry count mismatch".into());
        }
        let mut below = self.leaves.len();
        for (l, level) in self.branches.iter().enumerate() {
            let is_root = l + 1 == self.branches.len();
            if is_root && level.len() != 1 {
                return Err("root level must have one node".into());
            }
            let mut expected_child = 0;
            for b in level {
                let n = b.separators.len();
                if n > self.fanout || (!is_root && n < min_fill) || (is_root && n < 2) {
                    return Err(format!("branch at level {l} holds {n} children"));
                }
                if b.first_child != expected_child {
                    return Err("branch children not contiguous".into());
                }
                expected_child += n;
            }
            if expected_child != below {
                return Err(format!("level {l} does not cover the level below"));
            }
            below = level.len();
        }
        Ok(())
    }
}

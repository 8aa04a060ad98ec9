//! Exact table and index statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::bitmap::BitmapIndex;
use crate::btree::BTreeIndex;
use crate::error::{Error, Result};
use crate::storage::{Column, Table, Value};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColumnStats {
    /// distinct non-null values
    pub ndv: u64,
    pub min: Option<Value>,
    pub max: Option<Value>,
    pub null_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableStats {
    pub table: String,
    pub row_count: u64,
    pub block_count: u64,
    pub columns: BTreeMap<Column, ColumnStats>,
}

impl TableStats {
    pub fn column(&self, column: Column) -> Result<&ColumnStats> {
        self.columns
            .get(&column)
            .ok_or_else(|| Error::Planning(format!("no statistics for column `{column}` of `{}`", self.table)))
    }
}

pub fn analyze_table(table: &Table) -> TableStats {
    struct Acc {
        seen: HashSet<Value>,
        min: Option<Value>,
        max: Option<Value>,
        nulls: u64,
    }
    let mut acc: Vec<(Column, Acc)> = table
        .schema()
        .columns()
        .iter()
        .map(|&c| (c, Acc { seen: HashSet::new(), min: None, max: None, nulls: 0 }))
        .collect();
    for (_, row) in table.rows() {
        for (column, a) in &mut acc {
            match row.value(*column) {
                None => a.nulls += 1,
                Some(v) => {
                    if a.min.as_ref().is_none_or(|m| &v < m) {
                        a.min = Some(v.clone());
                    }
                    if a.max.as_ref().is_none_or(|m| &v > m) {
                        a.max = Some(v.clone());
                    }
                    a.seen.insert(v);
                }
            }
        }
    }
    TableStats {
        table: table.name().to_string(),
        row_count: table.row_count(),
        block_count: table.block_count() as u64,
        columns: acc
            .into_iter()
            .map(|(c, a)| (c, ColumnStats { ndv: a.seen.len() as u64, min: a.min, max: a.max, null_count: a.nulls }))
            .collect(),
    }
}

/// Number of table-block changes met while walking the index in key order.
pub fn clustering_factor(index: &BTreeIndex) -> u64 {
    let mut cf = 0;
    let mut prev = None;
    for (_, rid) in index.entries() {
        if prev != Some(rid.block) {
            cf += 1;
            prev = Some(rid.block);
        }
    }
    cf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexKind {
    Bitmap,
    BTree,
}

impl IndexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::Bitmap => "bitmap",
            IndexKind::BTree => "btree",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bitmap" => Ok(IndexKind::Bitmap),
            "btree" | "b-tree" => Ok(IndexKind::BTree),
            other => Err(Error::Usage(format!("unknown index kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexStats {
    pub name: String,
    pub kind: IndexKind,
    pub column: Column,
    pub size_bytes: u64,
    /// leaf blocks for a B-tree, segment blocks for a bitmap index
    pub blocks: u64,
    /// branch levels for a B-tree, directory levels for a bitmap index
    pub blevel: u32,
    pub clustering_factor: u64,
    pub distinct_keys: u64,
}

impl IndexStats {
    pub fn of_btree(index: &BTreeIndex) -> Self {
        let mut distinct = 0u64;
        let mut prev: Option<&Value> = None;
        for (k, _) in index.entries() {
            if prev != Some(k) {
                distinct += 1;
                prev = Some(k);
            }
        }
        IndexStats {
            name: index.name().to_string(),
            kind: IndexKind::BTree,
            column: index.column(),
            size_bytes: index.size_bytes(),
            blocks: index.leaf_blocks(),
            blevel: index.blevel(),
            clustering_factor: clustering_factor(index),
            distinct_keys: distinct,
        }
    }

    pub fn of_bitmap(index: &BitmapIndex) -> Self {
        IndexStats {
            name: index.name().to_string(),
            kind: IndexKind::Bitmap,
            column: index.column(),
            size_bytes: index.size_bytes(),
            blocks: index.segment_blocks(),
            blevel: index.blevel(),
            clustering_factor: index.clustering_factor(),
            distinct_keys: index.distinct_keys() as u64,
        }
    }
}

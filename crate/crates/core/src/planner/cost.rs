use std::ops::Bound;

use crate::error::{Error, Result};
use crate::stats::{ColumnStats, IndexStats, TableStats};
use crate::storage::{Column, Value};

use super::predicate::Predicate;

/// Fixed selectivity for range predicates over text columns.
pub const TEXT_RANGE_SELECTIVITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModelConfig {
    /// Blocks read per multiblock I/O during a full scan.
    pub multiblock_divisor: f64,
    /// Cost charged per row fetched through a bitmap conversion.
    pub bitmap_per_row_cost: f64,
    /// Minimum index blocks charged by any index probe.
    pub btree_probe_base: u64,
}

impl Default for CostModelConfig {
    fn default() -> Self {
        CostModelConfig { multiblock_divisor: 10.33, bitmap_per_row_cost: 0.19, btree_probe_base: 1 }
    }
}

impl CostModelConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("multiblock_divisor", self.multiblock_divisor)?;
        positive("bitmap_per_row_cost", self.bitmap_per_row_cost)?;
        if self.btree_probe_base == 0 {
            return Err(Error::Config("btree_probe_base must be positive".into()));
        }
        Ok(())
    }
}

fn column(stats: &TableStats, c: Column) -> Result<&ColumnStats> {
    stats.column(c)
}

fn range_selectivity(cs: &ColumnStats, lo: &Bound<Value>, hi: &Bound<Value>) -> f64 {
    let (Some(Value::Int(min)), Some(Value::Int(max))) = (&cs.min, &cs.max) else {
        return if cs.ndv == 0 { 0.0 } else { TEXT_RANGE_SELECTIVITY };
    };
    let (min, max) = (*min as f64, *max as f64);
    let bound = |b: &Bound<Value>| match b {
        Bound::Included(v) | Bound::Excluded(v) => v.as_int().map(|x| x as f64),
        Bound::Unbounded => None,
    };
    let lo_v = bound(lo).unwrap_or(min).max(min);
    let hi_v = bound(hi).unwrap_or(max).min(max);
    if hi_v < lo_v {
        return 0.0;
    }
    let mut sel = if max > min { (hi_v - lo_v) / (max - min) } else { 1.0 };
    let density = 1.0 / cs.ndv as f64;
    for b in [lo, hi] {
        if let Bound::Excluded(v) = b {
            if v.as_int().is_some_and(|x| (min..=max).contains(&(x as f64))) {
                sel -= density;
            }
        }
    }
    sel.clamp(0.0, 1.0)
}

/// Estimated fraction of rows matching `pred`, assuming independent columns
/// and uniform values.
pub fn estimate_selectivity(pred: &Predicate, stats: &TableStats) -> Result<f64> {
    let per_value = |c: Column| -> Result<f64> {
        let cs = column(stats, c)?;
        Ok(if cs.ndv == 0 { 0.0 } else { 1.0 / cs.ndv as f64 })
    };
    Ok(match pred {
        Predicate::Eq(c, _) => per_value(*c)?,
        Predicate::Range(c, r) => {
            let cs = column(stats, *c)?;
            if r.is_empty() || cs.ndv == 0 {
                0.0
            } else {
                range_selectivity(cs, &r.lo, &r.hi)
            }
        }
        Predicate::InList(c, vs) => (vs.len() as f64 * per_value(*c)?).min(1.0),
        Predicate::IsNull(c) => {
            let cs = column(stats, *c)?;
            if stats.row_count == 0 {
                0.0
            } else {
                cs.null_count as f64 / stats.row_count as f64
            }
        }
        Predicate::And(parts) => {
            let mut s = 1.0;
            for p in parts {
                s *= estimate_selectivity(p, stats)?;
            }
            s
        }
        Predicate::Or(parts) => {
            let mut s = 0.0;
            for p in parts {
                let x = estimate_selectivity(p, stats)?;
                s = s + x - s * x;
            }
            s
        }
    })
}

/// `round(selectivity * rows)`, at least 1 unless the table is empty or the
/// predicate cannot match any row.
pub fn estimate_cardinality(pred: &Predicate, stats: &TableStats) -> Result<u64> {
    let sel = estimate_selectivity(pred, stats)?;
    let card = (sel * stats.row_count as f64).round() as u64;
    Ok(if stats.row_count == 0 || !pred.is_satisfiable() { card } else { card.max(1) })
}

pub fn cost_full_scan(stats: &TableStats, cfg: &CostModelConfig) -> u64 {
    ((stats.block_count as f64 / cfg.multiblock_divisor).ceil() as u64).max(1)
}

/// Cost of a B-tree access: descent, the leaf fraction, and table blocks in
/// proportion to the clustering factor. `probes` is the number of separate
/// descents (one per IN-list value).
pub fn cost_btree(sel: f64, probes: u64, index: &IndexStats, cfg: &CostModelConfig) -> u64 {
    let leaf = ((sel * index.blocks as f64).ceil() as u64).max(cfg.btree_probe_base);
    let table = (sel * index.clustering_factor as f64).ceil() as u64;
    probes.max(1) * index.blevel as u64 + leaf + table
}

/// Index part of a bitmap access for one key lookup or key range: directory
/// levels plus the entry blocks in proportion to `sel`.
pub fn cost_bitmap_scan(sel: f64, index: &IndexStats, cfg: &CostModelConfig) -> u64 {
    index.blevel as u64 + ((sel * index.blocks as f64).ceil() as u64).max(cfg.btree_probe_base)
}

/// Per-row part of a bitmap plan: converting `card` rowids and fetching them.
/// The clustering factor takes no part.
pub fn cost_bitmap_fetch(card: u64, cfg: &CostModelConfig) -> u64 {
    (card as f64 * cfg.bitmap_per_row_cost).ceil() as u64
}

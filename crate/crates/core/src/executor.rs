//! Runs plans against a table and its indexes, attributing every block
//! access to the segment that owns it.

use std::fmt::{self, Write};
use std::time::{Duration, Instant};

use crate::bitmap::{or_all, BitmapIndex, CompressedBitmap};
use crate::btree::BTreeIndex;
use crate::error::{Error, Result};
use crate::index::AnyIndex;
use crate::planner::{Access, BitmapNode, BitmapOp, Plan};
use crate::storage::{BufferPool, Row, RowId, SegmentId, Table};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentStats {
    pub name: String,
    /// `table`, `bitmap` or `btree`
    pub role: &'static str,
    pub consistent_gets: u64,
    pub physical_reads: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecStats {
    pub consistent_gets: u64,
    pub physical_reads: u64,
    pub rows_processed: u64,
    pub elapsed: Duration,
    /// Table first, then indexes by name.
    pub segments: Vec<SegmentStats>,
}

impl ExecStats {
    pub fn segment(&self, name: &str) -> Option<&SegmentStats> {
        self.segments.iter().find(|s| s.name == name)
    }

    pub fn table_gets(&self) -> u64 {
        self.segments.iter().filter(|s| s.role == "table").map(|s| s.consistent_gets).sum()
    }

    /// Counter block with one line per counter, then the per-segment split.
    pub fn render(&self) -> String {
        let mut out = String::from("Statistics\n----------------------------------------------------------\n");
        for (v, label) in [
            (self.consistent_gets, "consistent gets"),
            (self.physical_reads, "physical reads"),
            (self.rows_processed, "rows processed"),
        ] {
            let _ = writeln!(out, "{v:>11}  {label}");
        }
        let _ = writeln!(out, "{:>11}  elapsed (us)", self.elapsed.as_micros());
        for s in &self.segments {
            let _ = writeln!(
                out,
                "{:>11}  consistent gets, {} physical reads on {} '{}'",
                s.consistent_gets, s.physical_reads, s.role, s.name
            );
        }
        out
    }
}

impl fmt::Display for ExecStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone)]
pub struct ExecOutput {
    /// Matching rows; empty for COUNT queries.
    pub rows: Vec<(RowId, Row)>,
    /// Number of matching rows.
    pub count: u64,
    pub stats: ExecStats,
}

struct Context<'a> {
    table: Option<&'a Table>,
    indexes: &'a [&'a AnyIndex],
}

impl<'a> Context<'a> {
    fn find(&self, name: &str) -> Result<&'a AnyIndex> {
        self.indexes
            .iter()
            .copied()
            .find(|i| i.name() == name)
            .ok_or_else(|| Error::Execution(format!("index `{name}` does not exist")))
    }

    fn bitmap(&self, name: &str) -> Result<&'a BitmapIndex> {
        let idx = self.find(name)?;
        let bm = idx.as_bitmap().ok_or_else(|| Error::Execution(format!("index `{name}` is not a bitmap index")))?;
        if let Some(t) = self.table {
            if bm.table_name() != t.name() || bm.row_count() != t.row_count() {
                return Err(Error::Execution(format!("index `{name}` is stale for `{}`", t.name())));
            }
        }
        Ok(bm)
    }

    fn btree(&self, name: &str) -> Result<&'a BTreeIndex> {
        let idx = self.find(name)?;
        let bt = idx.as_btree().ok_or_else(|| Error::Execution(format!("index `{name}` is not a B-tree index")))?;
        if let Some(t) = self.table {
            if bt.table_name() != t.name() {
                return Err(Error::Execution(format!("index `{name}` is not on `{}`", t.name())));
            }
        }
        Ok(bt)
    }

    fn eval(&self, node: &BitmapNode, pool: &mut BufferPool) -> Result<CompressedBitmap> {
        Ok(match &node.op {
            BitmapOp::SingleValue { index, value } => self.bitmap(index)?.lookup_eq(pool, value),
            BitmapOp::Null { index } => self.bitmap(index)?.lookup_null(pool),
            BitmapOp::RangeScan { index, range } => self.bitmap(index)?.lookup_range(pool, range),
            BitmapOp::And(children) => {
                let mut acc: Option<CompressedBitmap> = None;
                for c in children {
                    let b = self.eval(c, pool)?;
                    acc = Some(match acc {
                        None => b,
                        Some(a) => a.and(&b)?,
                    });
                }
                acc.ok_or_else(|| Error::Execution("empty BITMAP AND".into()))?
            }
            BitmapOp::Or(children) => {
                let parts = children.iter().map(|c| self.eval(c, pool)).collect::<Result<Vec<_>>>()?;
                let first = parts.first().ok_or_else(|| Error::Execution("empty BITMAP OR".into()))?;
                or_all(&parts.iter().collect::<Vec<_>>(), first.len())
            }
        })
    }

    fn stats(
        &self,
        pool: &BufferPool,
        before: &crate::storage::PoolSnapshot,
        started: Instant,
        rows: u64,
    ) -> ExecStats {
        let after = pool.snapshot();
        let io = after.totals.since(&before.totals);
        let deltas = after.segments_since(before);
        let seg = |id: SegmentId| deltas.get(&id).copied().unwrap_or_default();
        let mut segments = Vec::new();
        if let Some(t) = self.table {
            let d = seg(t.segment());
            segments.push(SegmentStats {
                name: t.name().to_string(),
                role: "table",
                consistent_gets: d.consistent_gets,
                physical_reads: d.physical_reads,
            });
        }
        let mut idx: Vec<&AnyIndex> = self.indexes.to_vec();
        idx.sort_by(|a, b| a.name().cmp(b.name()));
        for i in idx {
            let d = seg(i.segment());
            if d.consistent_gets > 0 {
                segments.push(SegmentStats {
                    name: i.name().to_string(),
                    role: i.kind().as_str(),
                    consistent_gets: d.consistent_gets,
                    physical_reads: d.physical_reads,
                });
            }
        }
        ExecStats {
            consistent_gets: io.consistent_gets,
            physical_reads: io.physical_reads,
            rows_processed: rows,
            elapsed: started.elapsed(),
            segments,
        }
    }
}

fn ordinals_to_rowids(bitmap: &CompressedBitmap, rows_per_block: u64) -> impl Iterator<Item = RowId> + '_ {
    bitmap.iter_ones().map(move |o| RowId::new((o / rows_per_block) as u32, (o % rows_per_block) as u16))
}

/// Executes `plan` against `table`. COUNT queries return the count and no rows
/// and report one processed row.
pub fn execute(plan: &Plan, table: &Table, indexes: &[&AnyIndex], pool: &mut BufferPool) -> Result<ExecOutput> {
    if plan.table != table.name() {
        return Err(Error::Execution(format!("plan is for `{}`, not `{}`", plan.table, table.name())));
    }
    let ctx = Context { table: Some(table), indexes };
    let before = pool.snapshot();
    let started = Instant::now();
    let pred = &plan.query.predicate;
    let residual = |rows: Vec<(RowId, Row)>| match &plan.residual {
        Some(r) => rows.into_iter().filter(|(_, row)| r.matches(row)).collect(),
        None => rows,
    };

    let rows: Vec<(RowId, Row)> = match &plan.access {
        Access::FullScan => table.scan(pool).filter(|(_, row)| pred.matches(row)).collect(),
        Access::BTree { index, ranges, .. } => {
            let bt = ctx.btree(index)?;
            let mut rowids = Vec::new();
            for r in ranges {
                rowids.extend(bt.scan_range(pool, r).into_iter().map(|(_, rid)| rid));
            }
            residual(table.fetch_rows(pool, rowids)?)
        }
        Access::Bitmap { root } => {
            let bitmap = ctx.eval(root, pool)?;
            let rpb = table.rows_per_block() as u64;
            residual(table.fetch_rows(pool, ordinals_to_rowids(&bitmap, rpb))?)
        }
        Access::BitmapCount { root } => {
            let count = ctx.eval(root, pool)?.count();
            pool.add_rows(1);
            return Ok(ExecOutput { rows: Vec::new(), count, stats: ctx.stats(pool, &before, started, 1) });
        }
    };
    let count = rows.len() as u64;
    let (rows, processed) = if plan.query.count_only { (Vec::new(), 1) } else { (rows, count) };
    pool.add_rows(processed);
    Ok(ExecOutput { rows, count, stats: ctx.stats(pool, &before, started, processed) })
}

/// Answers a count-only plan from the bitmap indexes alone.
pub fn execute_count(plan: &Plan, indexes: &[&AnyIndex], pool: &mut BufferPool) -> Result<(u64, ExecStats)> {
    let Access::BitmapCount { root } = &plan.access else {
        return Err(Error::Execution(format!("{} plan is not count-only", plan.kind())));
    };
    let ctx = Context { table: None, indexes };
    let before = pool.snapshot();
    let started = Instant::now();
    let count = ctx.eval(root, pool)?.count();
    pool.add_rows(1);
    Ok((count, ctx.stats(pool, &before, started, 1)))
}

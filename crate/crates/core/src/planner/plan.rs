use std::fmt;

use crate::error::Result;
use crate::key_range::KeyRange;
use crate::stats::{IndexKind, IndexStats, TableStats};
use crate::storage::{Column, Value};

use super::cost::{
    cost_bitmap_fetch, cost_bitmap_scan, cost_btree, cost_full_scan, estimate_cardinality, estimate_selectivity,
    CostModelConfig,
};
use super::predicate::{Predicate, Query};

/// Candidate kinds in tie-break order: on equal cost the earlier kind wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlanKind {
    BitmapCountOnly,
    BitmapPlan,
    BTreeAccess,
    FullScan,
}

impl PlanKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanKind::BitmapCountOnly => "BitmapCountOnly",
            PlanKind::BitmapPlan => "BitmapPlan",
            PlanKind::BTreeAccess => "BTreeAccess",
            PlanKind::FullScan => "FullScan",
        }
    }
}

impl fmt::Display for PlanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BitmapOp {
    SingleValue { index: String, value: Value },
    Null { index: String },
    RangeScan { index: String, range: KeyRange },
    And(Vec<BitmapNode>),
    Or(Vec<BitmapNode>),
}

/// A node of a bitmap combination tree with its own estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct BitmapNode {
    pub op: BitmapOp,
    pub cost: u64,
    pub card: u64,
}

impl BitmapNode {
    /// Compact structural description, e.g. `AND(OR(9 x SINGLE VALUE), SINGLE VALUE)`.
    pub fn shape(&self) -> String {
        match &self.op {
            BitmapOp::SingleValue { .. } | BitmapOp::Null { .. } => "SINGLE VALUE".into(),
            BitmapOp::RangeScan { .. } => "RANGE SCAN".into(),
            BitmapOp::And(children) => format!("AND({})", group_shapes(children)),
            BitmapOp::Or(children) => format!("OR({})", group_shapes(children)),
        }
    }

    pub fn index_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_indexes(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_indexes<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.op {
            BitmapOp::SingleValue { index, .. } | BitmapOp::Null { index } | BitmapOp::RangeScan { index, .. } => {
                out.push(index)
            }
            BitmapOp::And(cs) | BitmapOp::Or(cs) => cs.iter().for_each(|c| c.collect_indexes(out)),
        }
    }
}

/// Joins child shapes, folding runs of identical shapes into `n x SHAPE`.
fn group_shapes(children: &[BitmapNode]) -> String {
    let mut parts: Vec<(String, usize)> = Vec::new();
    for c in children {
        let s = c.shape();
        match parts.last_mut() {
            Some((last, n)) if *last == s => *n += 1,
            _ => parts.push((s, 1)),
        }
    }
    parts.into_iter().map(|(s, n)| if n == 1 { s } else { format!("{n} x {s}") }).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Access {
    FullScan,
    BTree {
        index: String,
        column: Column,
        /// ascending, non-overlapping key ranges probed in order
        ranges: Vec<KeyRange>,
        index_cost: u64,
        index_card: u64,
    },
    Bitmap {
        root: BitmapNode,
    },
    BitmapCount {
        root: BitmapNode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub table: String,
    pub query: Query,
    pub access: Access,
    /// Conjuncts the index part does not resolve, checked on fetched rows.
    pub residual: Option<Predicate>,
    pub cost: u64,
    pub card: u64,
}

impl Plan {
    pub fn kind(&self) -> PlanKind {
        match self.access {
            Access::FullScan => PlanKind::FullScan,
            Access::BTree { .. } => PlanKind::BTreeAccess,
            Access::Bitmap { .. } => PlanKind::BitmapPlan,
            Access::BitmapCount { .. } => PlanKind::BitmapCountOnly,
        }
    }

    /// Names of the indexes the plan reads, sorted.
    pub fn index_names(&self) -> Vec<&str> {
        match &self.access {
            Access::FullScan => Vec::new(),
            Access::BTree { index, .. } => vec![index.as_str()],
            Access::Bitmap { root } | Access::BitmapCount { root } => root.index_names(),
        }
    }

    pub fn bitmap_root(&self) -> Option<&BitmapNode> {
        match &self.access {
            Access::Bitmap { root } | Access::BitmapCount { root } => Some(root),
            _ => None,
        }
    }

    /// Plan kind plus the bitmap tree shape when there is one.
    pub fn shape(&self) -> String {
        match self.bitmap_root() {
            Some(root) => format!("{}[{}]", self.kind(), root.shape()),
            None => self.kind().to_string(),
        }
    }

    fn rank(&self) -> (u64, PlanKind, String) {
        let first = self.index_names().first().map(|s| s.to_string()).unwrap_or_default();
        (self.cost, self.kind(), first)
    }
}

struct Planner<'a> {
    stats: &'a TableStats,
    indexes: &'a [IndexStats],
    cfg: &'a CostModelConfig,
}

impl Planner<'_> {
    /// The alphabetically first index of `kind` on `column`.
    fn index_on(&self, kind: IndexKind, column: Column) -> Option<&IndexStats> {
        self.indexes.iter().filter(|i| i.kind == kind && i.column == column).min_by(|a, b| a.name.cmp(&b.name))
    }

    fn bitmap_leaf(&self, pred: &Predicate, idx: &IndexStats, op: BitmapOp) -> Result<BitmapNode> {
        let sel = estimate_selectivity(pred, self.stats)?;
        Ok(BitmapNode { op, cost: cost_bitmap_scan(sel, idx, self.cfg), card: estimate_cardinality(pred, self.stats)? })
    }

    /// Bitmap tree answering `pred` exactly, if every column it touches has a bitmap index.
    fn bitmap_node(&self, pred: &Predicate) -> Result<Option<BitmapNode>> {
        let index = |c: Column| self.index_on(IndexKind::Bitmap, c);
        let node = match pred {
            Predicate::Eq(c, v) => match index(*c) {
                Some(i) => Some(self.bitmap_leaf(
                    pred,
                    i,
                    BitmapOp::SingleValue { index: i.name.clone(), value: v.clone() },
                )?),
                None => None,
            },
            Predicate::IsNull(c) => match index(*c) {
                Some(i) => Some(self.bitmap_leaf(pred, i, BitmapOp::Null { index: i.name.clone() })?),
                None => None,
            },
            Predicate::Range(c, r) => match index(*c) {
                Some(i) => {
                    Some(self.bitmap_leaf(pred, i, BitmapOp::RangeScan { index: i.name.clone(), range: r.clone() })?)
                }
                None => None,
            },
            Predicate::InList(c, vs) => {
                let parts: Vec<Predicate> = vs.iter().map(|v| Predicate::Eq(*c, v.clone())).collect();
                if parts.len() == 1 {
                    self.bitmap_node(&parts[0])?
                } else {
                    self.combine(pred, &parts, BitmapOp::Or)?
                }
            }
            Predicate::And(parts) => self.combine(pred, parts, BitmapOp::And)?,
            Predicate::Or(parts) => self.combine(pred, parts, BitmapOp::Or)?,
        };
        Ok(node)
    }

    fn combine(
        &self,
        whole: &Predicate,
        parts: &[Predicate],
        op: fn(Vec<BitmapNode>) -> BitmapOp,
    ) -> Result<Option<BitmapNode>> {
        let mut children = Vec::with_capacity(parts.len());
        for p in parts {
            match self.bitmap_node(p)? {
                Some(n) => children.push(n),
                None => return Ok(None),
            }
        }
        let cost = children.iter().map(|c| c.cost).sum();
        Ok(Some(BitmapNode { op: op(children), cost, card: estimate_cardinality(whole, self.stats)? }))
    }
}

fn residual_of(conjuncts: &[&Predicate], skip: impl Fn(usize) -> bool) -> Option<Predicate> {
    let rest: Vec<Predicate> =
        conjuncts.iter().enumerate().filter(|(i, _)| !skip(*i)).map(|(_, p)| (*p).clone()).collect();
    match rest.len() {
        0 => None,
        1 => rest.into_iter().next(),
        _ => Some(Predicate::And(rest)),
    }
}

/// Every candidate plan for `query`: a full scan, one B-tree access per
/// (B-tree index, sargable conjunct) pair, and bitmap plans when at least one
/// conjunct is bitmap-resolvable.
pub fn enumerate_plans(
    query: &Query,
    stats: &TableStats,
    indexes: &[IndexStats],
    cfg: &CostModelConfig,
) -> Result<Vec<Plan>> {
    cfg.validate()?;
    let pred = &query.predicate;
    pred.validate_columns(&|c| stats.columns.contains_key(&c))?;
    let card = estimate_cardinality(pred, stats)?;
    let planner = Planner { stats, indexes, cfg };
    let plan = |access, residual, cost| Plan {
        table: stats.table.clone(),
        query: query.clone(),
        access,
        residual,
        cost,
        card,
    };

    let mut plans = vec![plan(Access::FullScan, None, cost_full_scan(stats, cfg))];
    let conjuncts = pred.conjuncts();

    let mut btrees: Vec<&IndexStats> = indexes.iter().filter(|i| i.kind == IndexKind::BTree).collect();
    btrees.sort_by(|a, b| a.name.cmp(&b.name));
    for idx in btrees {
        for (ci, conj) in conjuncts.iter().enumerate() {
            let ranges = match conj {
                Predicate::Eq(c, v) if *c == idx.column => vec![KeyRange::point(v.clone())],
                Predicate::Range(c, r) if *c == idx.column => vec![r.clone()],
                Predicate::InList(c, vs) if *c == idx.column => vs.iter().cloned().map(KeyRange::point).collect(),
                _ => continue,
            };
            let sel = estimate_selectivity(conj, stats)?;
            let probes = ranges.len() as u64;
            let index_cost =
                probes * idx.blevel as u64 + ((sel * idx.blocks as f64).ceil() as u64).max(cfg.btree_probe_base);
            plans.push(plan(
                Access::BTree {
                    index: idx.name.clone(),
                    column: idx.column,
                    ranges,
                    index_cost,
                    index_card: estimate_cardinality(conj, stats)?,
                },
                residual_of(&conjuncts, |i| i == ci),
                cost_btree(sel, probes, idx, cfg),
            ));
        }
    }

    if let Some(root) = planner.bitmap_node(pred)? {
        if query.count_only {
            plans.push(plan(Access::BitmapCount { root: root.clone() }, None, root.cost));
        }
        let cost = root.cost + cost_bitmap_fetch(root.card, cfg);
        plans.push(plan(Access::Bitmap { root }, None, cost));
    } else if conjuncts.len() > 1 {
        let mut resolved = Vec::new();
        let mut nodes = Vec::new();
        for (ci, conj) in conjuncts.iter().enumerate() {
            if let Some(n) = planner.bitmap_node(conj)? {
                resolved.push(ci);
                nodes.push(n);
            }
        }
        if !nodes.is_empty() {
            let root = if nodes.len() == 1 {
                nodes.pop().expect("one node")
            } else {
                let parts: Vec<Predicate> = resolved.iter().map(|&i| conjuncts[i].clone()).collect();
                BitmapNode {
                    cost: nodes.iter().map(|n| n.cost).sum(),
                    card: estimate_cardinality(&Predicate::And(parts), stats)?,
                    op: BitmapOp::And(nodes),
                }
            };
            let cost = root.cost + cost_bitmap_fetch(root.card, cfg);
            plans.push(plan(Access::Bitmap { root }, residual_of(&conjuncts, |i| resolved.contains(&i)), cost));
        }
    }
    Ok(plans)
}

/// Cheapest candidate; a COUNT answerable from bitmaps alone always uses the
/// count-only plan.
pub fn choose_plan(query: &Query, stats: &TableStats, indexes: &[IndexStats], cfg: &CostModelConfig) -> Result<Plan> {
    let plans = enumerate_plans(query, stats, indexes, cfg)?;
    if let Some(p) = plans.iter().find(|p| p.kind() == PlanKind::BitmapCountOnly) {
        return Ok(p.clone());
    }
    Ok(plans.into_iter().min_by_key(Plan::rank).expect("full scan is always a candidate"))
}

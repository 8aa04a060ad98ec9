//! Selectivity estimation, access-path costing and plan choice.

mod cost;
mod explain;
mod plan;
mod predicate;

pub use cost::{
    cost_bitmap_fetch, cost_bitmap_scan, cost_btree, cost_full_scan, estimate_cardinality, estimate_selectivity,
    CostModelConfig, TEXT_RANGE_SELECTIVITY,
};
pub use explain::explain;
pub use plan::{choose_plan, enumerate_plans, Access, BitmapNode, BitmapOp, Plan, PlanKind};
pub use predicate::{Predicate, Query};

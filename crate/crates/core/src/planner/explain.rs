use std::fmt::Write;

use super::plan::{Access, BitmapNode, BitmapOp, Plan};

fn line(out: &mut String, depth: usize, text: &str, cost: u64, card: u64) {
    let _ = writeln!(out, "{:indent$}{text} (Cost={cost} Card={card})", "", indent = depth * 2);
}

fn bare(out: &mut String, depth: usize, text: &str) {
    let _ = writeln!(out, "{:indent$}{text}", "", indent = depth * 2);
}

fn bitmap_tree(out: &mut String, depth: usize, node: &BitmapNode) {
    match &node.op {
        BitmapOp::SingleValue { index, .. } | BitmapOp::Null { index } => {
            line(out, depth, &format!("BITMAP INDEX (SINGLE VALUE) OF '{index}'"), node.cost, node.card)
        }
        BitmapOp::RangeScan { index, .. } => {
            line(out, depth, &format!("BITMAP INDEX (RANGE SCAN) OF '{index}'"), node.cost, node.card)
        }
        BitmapOp::And(children) | BitmapOp::Or(children) => {
            let name = if matches!(node.op, BitmapOp::And(_)) { "BITMAP AND" } else { "BITMAP OR" };
            line(out, depth, name, node.cost, node.card);
            for c in children {
                bitmap_tree(out, depth + 1, c);
            }
        }
    }
}

/// Renders `plan` as an indented operator tree, one operator per line.
pub fn explain(plan: &Plan) -> String {
    let mut out = String::new();
    let table = &plan.table;
    line(&mut out, 0, "SELECT STATEMENT", plan.cost, if plan.query.count_only { 1 } else { plan.card });
    let mut depth = 1;
    if plan.query.count_only {
        bare(&mut out, depth, "SORT (AGGREGATE)");
        depth += 1;
    }
    if let Some(residual) = &plan.residual {
        bare(&mut out, depth, &format!("FILTER {residual}"));
        depth += 1;
    }
    match &plan.access {
        Access::FullScan => line(&mut out, depth, &format!("TABLE ACCESS (FULL) OF '{table}'"), plan.cost, plan.card),
        Access::BTree { index, index_cost, index_card, .. } => {
            line(&mut out, depth, &format!("TABLE ACCESS (BY INDEX ROWID) OF '{table}'"), plan.cost, plan.card);
            line(
                &mut out,
                depth + 1,
                &format!("INDEX (RANGE SCAN) OF '{index}' (NON-UNIQUE)"),
                *index_cost,
                *index_card,
            );
        }
        Access::Bitmap { root } => {
            line(&mut out, depth, &format!("TABLE ACCESS (BY INDEX ROWID) OF '{table}'"), plan.cost, plan.card);
            line(&mut out, depth + 1, "BITMAP CONVERSION (TO ROWIDS)", root.cost, root.card);
            bitmap_tree(&mut out, depth + 2, root);
        }
        Access::BitmapCount { root } => {
            line(&mut out, depth, "BITMAP CONVERSION (COUNT)", root.cost, root.card);
            bitmap_tree(&mut out, depth + 1, root);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{Predicate, Query};
    use crate::storage::{Column, Value};

    fn leaf(index: &str, v: i64) -> BitmapNode {
        BitmapNode { op: BitmapOp::SingleValue { index: index.into(), value: Value::Int(v) }, cost: 2, card: 17 }
    }

    #[test]
    fn bitmap_plan_lines() {
        let root = BitmapNode {
            op: BitmapOp::And(vec![
                BitmapNode { op: BitmapOp::Or(vec![leaf("sal_bmx", 1000), leaf("sal_bmx", 1500)]), cost: 4, card: 34 },
                leaf("gender_bmx", 0),
            ]),
            cost: 6,
            card: 17,
        };
        let plan = Plan {
            table: "t".into(),
            query: Query::select(Predicate::eq(Column::Sal, 1)),
            access: Access::Bitmap { root },
            residual: None,
            cost: 10,
            card: 17,
        };
        let text = explain(&plan);
        let expected = "\
SELECT STATEMENT (Cost=10 Card=17)
  TABLE ACCESS (BY INDEX ROWID) OF 't' (Cost=10 Card=17)
    BITMAP CONVERSION (TO ROWIDS) (Cost=6 Card=17)
      BITMAP AND (Cost=6 Card=17)
        BITMAP OR (Cost=4 Card=34)
          BITMAP INDEX (SINGLE VALUE) OF 'sal_bmx' (Cost=2 Card=17)
          BITMAP INDEX (SINGLE VALUE) OF 'sal_bmx' (Cost=2 Card=17)
        BITMAP INDEX (SINGLE VALUE) OF 'gender_bmx' (Cost=2 Card=17)
";
        assert_eq!(text, expected);
    }

    #[test]
    fn count_and_full_scan() {
        let plan = Plan {
            table: "t".into(),
            query: Query::count(Predicate::eq(Column::Sal, 1)),
            access: Access::FullScan,
            residual: None,
            cost: 61,
            card: 17,
        };
        assert_eq!(
            explain(&plan),
            "SELECT STATEMENT (Cost=61 Card=1)\n  SORT (AGGREGATE)\n    TABLE ACCESS (FULL) OF 't' (Cost=61 Card=17)\n"
        );
    }
}

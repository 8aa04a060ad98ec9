//! Every executable plan for a predicate returns exactly the rows a naive
//! filter over the heap returns.

use std::collections::BTreeMap;

use ixbench_core::planner::{enumerate_plans, PlanKind, Predicate, Query};
use ixbench_core::stats::IndexKind;
use ixbench_core::storage::{assign_gender, generate_normal, generate_random, Column, Gender, Row, RowId, Value};
use ixbench_core::{Database, EngineConfig, KeyRange};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Predicate shape evaluated directly against row fields.
#[derive(Debug, Clone)]
enum Filter {
    EmpEq(i64),
    EmpRange { lo: i64, lo_inc: bool, hi: i64, hi_inc: bool },
    SalEq(i64),
    SalBetween(i64, i64),
    SalIn(Vec<i64>),
    Gender(Option<Gender>),
    All(Vec<Filter>),
    Any(Vec<Filter>),
}

impl Filter {
    fn eval(&self, r: &Row) -> bool {
        match self {
            Filter::EmpEq(v) => r.empno == *v,
            Filter::EmpRange { lo, lo_inc, hi, hi_inc } => {
                (if *lo_inc { r.empno >= *lo } else { r.empno > *lo })
                    && (if *hi_inc { r.empno <= *hi } else { r.empno < *hi })
            }
            Filter::SalEq(v) => r.sal == *v,
            Filter::SalBetween(lo, hi) => *lo <= r.sal && r.sal <= *hi,
            Filter::SalIn(vs) => vs.contains(&r.sal),
            Filter::Gender(g) => r.gender == *g,
            Filter::All(fs) => fs.iter().all(|f| f.eval(r)),
            Filter::Any(fs) => fs.iter().any(|f| f.eval(r)),
        }
    }

    fn predicate(&self) -> Predicate {
        match self {
            Filter::EmpEq(v) => Predicate::eq(Column::Empno, *v),
            Filter::EmpRange { lo, lo_inc, hi, hi_inc } => {
                Predicate::Range(Column::Empno, KeyRange::new(Value::Int(*lo), *lo_inc, Value::Int(*hi), *hi_inc))
            }
            Filter::SalEq(v) => Predicate::eq(Column::Sal, *v),
            Filter::SalBetween(lo, hi) => Predicate::between(Column::Sal, *lo, *hi),
            Filter::SalIn(vs) => Predicate::in_list(Column::Sal, vs.iter().copied()).unwrap(),
            Filter::Gender(Some(g)) => Predicate::eq(Column::Gender, Value::from(*g)),
            Filter::Gender(None) => Predicate::IsNull(Column::Gender),
            Filter::All(fs) => Predicate::and(fs.iter().map(Filter::predicate).collect()).unwrap(),
            Filter::Any(fs) => Predicate::or(fs.iter().map(Filter::predicate).collect()).unwrap(),
        }
    }
}

fn leaf(rng: &mut ChaCha8Rng, n: i64) -> Filter {
    match rng.gen_range(0..7) {
        0 => Filter::EmpEq(rng.gen_range(0..=n + 1)),
        1 => {
            let lo = rng.gen_range(1..=n);
            Filter::EmpRange { lo, lo_inc: rng.gen(), hi: lo + rng.gen_range(0..n / 10), hi_inc: rng.gen() }
        }
        2 => Filter::SalEq(rng.gen_range(1000..=7000)),
        3 => {
            let lo = rng.gen_range(1000..7000);
            Filter::SalBetween(lo, lo + rng.gen_range(0..200))
        }
        4 => Filter::SalIn((0..rng.gen_range(1..10)).map(|_| rng.gen_range(1000..=7000)).collect()),
        5 => Filter::Gender(None),
        _ => Filter::Gender(Some(if rng.gen() { Gender::M } else { Gender::F })),
    }
}

fn filter(rng: &mut ChaCha8Rng, n: i64, depth: u32) -> Filter {
    if depth == 0 || rng.gen_bool(0.4) {
        return leaf(rng, n);
    }
    let parts = (0..rng.gen_range(2..=3)).map(|_| filter(rng, n, depth - 1)).collect();
    if rng.gen() {
        Filter::All(parts)
    } else {
        Filter::Any(parts)
    }
}

fn database(n: u64) -> Database {
    let mut normal = generate_normal(n, 7, 8192).unwrap();
    let mut random = generate_random(&normal, 8).unwrap();
    assign_gender(&mut normal);
    assign_gender(&mut random);
    let mut db = Database::in_memory(EngineConfig::default()).unwrap();
    for t in [normal, random] {
        let name = t.name().to_string();
        db.put_table(t).unwrap();
        for c in [Column::Empno, Column::Sal, Column::Gender] {
            db.create_index(&format!("{name}_{c}_bmx"), &name, c, IndexKind::Bitmap).unwrap();
            db.create_index(&format!("{name}_{c}_idx"), &name, c, IndexKind::BTree).unwrap();
        }
    }
    db
}

#[test]
fn all_plans_agree_with_brute_force() {
    let n = 4000;
    let mut db = database(n);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut kinds: BTreeMap<PlanKind, usize> = BTreeMap::new();
    for i in 0..200 {
        let table = if i % 2 == 0 { "test_normal" } else { "test_random" };
        let f = filter(&mut rng, n as i64, 2);
        let expected: Vec<RowId> =
            db.table(table).unwrap().rows().filter(|(_, r)| f.eval(r)).map(|(id, _)| id).collect();

        let query = Query::select(f.predicate());
        let plans =
            enumerate_plans(&query, &db.analyze(table).unwrap(), &db.index_stats(table), &db.config().cost).unwrap();
        for plan in plans {
            let out = db.execute(&plan, true).unwrap();
            let mut got: Vec<RowId> = out.rows.iter().map(|(id, _)| *id).collect();
            got.sort();
            assert_eq!(got, expected, "{} via {}", query.predicate, plan.shape());
            assert_eq!(out.count, expected.len() as u64);
            assert_eq!(out.stats.rows_processed, expected.len() as u64);
            *kinds.entry(plan.kind()).or_default() += 1;
        }

        let count = Query::count(f.predicate());
        let (plan, out) = db.run(table, &count, true).unwrap();
        assert_eq!(out.count, expected.len() as u64, "COUNT {} via {}", count.predicate, plan.shape());
        if plan.kind() == PlanKind::BitmapCountOnly {
            assert_eq!(out.stats.table_gets(), 0);
        }
    }
    for k in [PlanKind::FullScan, PlanKind::BTreeAccess, PlanKind::BitmapPlan] {
        assert!(kinds.get(&k).copied().unwrap_or(0) > 20, "{k:?} exercised only {kinds:?}");
    }
}

#[test]
fn bitmap_fetch_charges_one_get_per_distinct_block() {
    let mut db = database(3000);
    let table = "test_random";
    let query = Query::select(Predicate::between(Column::Empno, 100, 180));
    let plans =
        enumerate_plans(&query, &db.analyze(table).unwrap(), &db.index_stats(table), &db.config().cost).unwrap();
    let plan = plans.into_iter().find(|p| p.kind() == PlanKind::BitmapPlan).unwrap();
    let out = db.execute(&plan, true).unwrap();
    let mut blocks: Vec<u32> = out.rows.iter().map(|(id, _)| id.block).collect();
    blocks.sort();
    blocks.dedup();
    assert_eq!(out.stats.table_gets(), blocks.len() as u64);
    let per_segment: u64 = out.stats.segments.iter().map(|s| s.consistent_gets).sum();
    assert_eq!(per_segment, out.stats.consistent_gets);
}

#[test]
fn second_run_is_served_from_the_pool() {
    let mut db = database(2000);
    let query = Query::select(Predicate::between(Column::Empno, 10, 400));
    let (plan, cold) = db.run("test_random", &query, true).unwrap();
    assert!(cold.stats.physical_reads > 0);
    let warm = db.execute(&plan, false).unwrap();
    assert_eq!(warm.stats.physical_reads, 0);
    assert_eq!(warm.stats.consistent_gets, cold.stats.consistent_gets);
}

#[test]
fn empty_table_yields_no_rows() {
    let mut db = Database::in_memory(EngineConfig::default()).unwrap();
    let mut t = generate_normal(0, 1, 8192).unwrap();
    assign_gender(&mut t);
    db.put_table(t).unwrap();
    db.create_index("e_bmx", "test_normal", Column::Empno, IndexKind::Bitmap).unwrap();
    db.create_index("e_idx", "test_normal", Column::Empno, IndexKind::BTree).unwrap();
    let query = Query::select(Predicate::eq(Column::Empno, 5));
    let plans =
        enumerate_plans(&query, &db.analyze("test_normal").unwrap(), &db.index_stats("test_normal"), &db.config().cost)
            .unwrap();
    for plan in plans {
        let out = db.execute(&plan, true).unwrap();
        assert!(out.rows.is_empty());
        assert_eq!(out.stats.table_gets(), 0, "{}", plan.shape());
    }
    let (_, out) = db.run("test_normal", &Query::count(Predicate::eq(Column::Empno, 5)), true).unwrap();
    assert_eq!(out.count, 0);
}

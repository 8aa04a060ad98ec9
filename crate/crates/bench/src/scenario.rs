//! The fixed scenario registry and the runner that measures it.
//!
//! Empno probes and range endpoints are defined for a million-row table and
//! scaled by `scale / 1_000_000`, which keeps their selectivities.

use std::collections::HashMap;

use ixbench_core::planner::{Predicate, Query};
use ixbench_core::stats::IndexKind;
use ixbench_core::storage::{assign_gender, generate_normal, generate_random, Column, Table};
use ixbench_core::{Database, EngineConfig};

use crate::error::{BenchError, Result};
use crate::report::{IndexMeta, Report, ReportRow, TableMeta};

pub const MIN_SCALE: u64 = 1000;
pub const DEFAULT_SCALE: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
const REFERENCE_ROWS: f64 = 1_000_000.0;

pub const EMPNO_PROBES: [i64; 7] = [1000, 2398, 8545, 98008, 85342, 128444, 858];
pub const EMPNO_RANGES: [(i64, i64); 6] =
    [(1, 2300), (8, 1980), (1850, 4250), (28888, 31850), (82900, 85478), (984888, 1_000_000)];
pub const SAL_PROBES: [i64; 5] = [1869, 3548, 6500, 7000, 2500];
pub const SAL_RANGES: [(i64, i64); 5] = [(1500, 2000), (2000, 2500), (2500, 3000), (3000, 4000), (4000, 7000)];
pub const CONCLUSION_SALARIES: [i64; 9] = [1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500, 5000];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dataset {
    Normal,
    Random,
}

impl Dataset {
    fn table(self) -> &'static str {
        match self {
            Dataset::Normal => ixbench_core::storage::NORMAL_TABLE,
            Dataset::Random => ixbench_core::storage::RANDOM_TABLE,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Dataset::Normal => "normal",
            Dataset::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QuerySet {
    EmpnoProbes,
    EmpnoRanges,
    Salary,
    Gender,
    Conclusion,
    /// index builds only
    Nothing,
}

#[derive(Debug, Clone, Copy)]
struct ScenarioDef {
    name: &'static str,
    description: &'static str,
    datasets: &'static [Dataset],
    gender: bool,
    columns: &'static [Column],
    kinds: &'static [IndexKind],
    queries: QuerySet,
}

const BOTH: &[IndexKind] = &[IndexKind::Bitmap, IndexKind::BTree];
const BITMAP: &[IndexKind] = &[IndexKind::Bitmap];
const BTREE: &[IndexKind] = &[IndexKind::BTree];
const NORMAL: &[Dataset] = &[Dataset::Normal];
const RANDOM: &[Dataset] = &[Dataset::Random];
const EMPNO: &[Column] = &[Column::Empno];
const SAL: &[Column] = &[Column::Sal];
const GENDER: &[Column] = &[Column::Gender];

macro_rules! family {
    ($base:literal, $desc:literal, $ds:expr, $cols:expr, $q:expr) => {
        [
            ScenarioDef {
                name: $base,
                description: $desc,
                datasets: $ds,
                gender: false,
                columns: $cols,
                kinds: BOTH,
                queries: $q,
            },
            ScenarioDef {
                name: concat!($base, "a"),
                description: $desc,
                datasets: $ds,
                gender: false,
                columns: $cols,
                kinds: BITMAP,
                queries: $q,
            },
            ScenarioDef {
                name: concat!($base, "b"),
                description: $desc,
                datasets: $ds,
                gender: false,
                columns: $cols,
                kinds: BTREE,
                queries: $q,
            },
        ]
    };
}

fn registry() -> Vec<ScenarioDef> {
    let mut defs = Vec::new();
    defs.extend(family!(
        "step1",
        "Equality probes on the unique empno column of the sequentially loaded table.",
        NORMAL,
        EMPNO,
        QuerySet::EmpnoProbes
    ));
    defs.extend(family!(
        "step2",
        "Equality probes on empno over the randomly ordered table.",
        RANDOM,
        EMPNO,
        QuerySet::EmpnoProbes
    ));
    defs.extend(family!(
        "step3",
        "Range predicates on empno over the sequentially loaded table.",
        NORMAL,
        EMPNO,
        QuerySet::EmpnoRanges
    ));
    defs.extend(family!(
        "step4",
        "Range predicates on empno over the randomly ordered table.",
        RANDOM,
        EMPNO,
        QuerySet::EmpnoRanges
    ));
    defs.extend(family!(
        "step5",
        "Equality and range predicates on the salary column (about 6000 distinct values).",
        NORMAL,
        SAL,
        QuerySet::Salary
    ));
    defs.push(ScenarioDef {
        name: "step6",
        description: "Adds the gender column to both tables and builds bitmap and B-tree indexes on it.",
        datasets: &[Dataset::Normal, Dataset::Random],
        gender: true,
        columns: GENDER,
        kinds: BOTH,
        queries: QuerySet::Nothing,
    });
    defs.push(ScenarioDef {
        name: "step7",
        description: "Equality and NULL probes on the low-cardinality gender column with a bitmap index.",
        datasets: NORMAL,
        gender: true,
        columns: GENDER,
        kinds: BITMAP,
        queries: QuerySet::Gender,
    });
    defs.push(ScenarioDef {
        name: "step8",
        description: "Equality and NULL probes on the gender column with a B-tree index.",
        datasets: NORMAL,
        gender: true,
        columns: GENDER,
        kinds: BTREE,
        queries: QuerySet::Gender,
    });
    defs.push(ScenarioDef {
        name: "conclusion",
        description: "Salary IN-list combined with gender = 'M', answered with a pair of bitmap indexes or a pair of B-tree indexes.",
        datasets: NORMAL,
        gender: true,
        columns: &[Column::Sal, Column::Gender],
        kinds: BOTH,
        queries: QuerySet::Conclusion,
    });
    defs
}

/// Every registered scenario name.
pub fn scenario_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name).collect()
}

/// Scenarios run by the full suite; the lettered variants are subsets of these.
pub const SUITE: [&str; 9] = ["step1", "step2", "step3", "step4", "step5", "step6", "step7", "step8", "conclusion"];

/// Scales a value defined for a million-row table to `scale` rows.
pub fn scale_empno(value: i64, scale: u64) -> i64 {
    ((value as f64 * scale as f64 / REFERENCE_ROWS).round() as i64).clamp(1, scale as i64)
}

fn queries(set: QuerySet, scale: u64) -> Result<Vec<(String, Query)>> {
    let id = |p: &str, i: usize| format!("{p}{}", i + 1);
    Ok(match set {
        QuerySet::EmpnoProbes => EMPNO_PROBES
            .iter()
            .enumerate()
            .map(|(i, &v)| (id("q", i), Query::select(Predicate::eq(Column::Empno, scale_empno(v, scale)))))
            .collect(),
        QuerySet::EmpnoRanges => EMPNO_RANGES
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let p = Predicate::between(Column::Empno, scale_empno(lo, scale), scale_empno(hi, scale));
                (id("r", i), Query::select(p))
            })
            .collect(),
        QuerySet::Salary => {
            let mut q: Vec<(String, Query)> = SAL_PROBES
                .iter()
                .enumerate()
                .map(|(i, &v)| (id("e", i), Query::select(Predicate::eq(Column::Sal, v))))
                .collect();
            q.extend(
                SAL_RANGES
                    .iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| (id("r", i), Query::select(Predicate::between(Column::Sal, lo, hi)))),
            );
            q
        }
        QuerySet::Gender => vec![
            ("m".into(), Query::select(Predicate::eq(Column::Gender, "M"))),
            ("f".into(), Query::select(Predicate::eq(Column::Gender, "F"))),
            ("null".into(), Query::select(Predicate::IsNull(Column::Gender))),
        ],
        QuerySet::Conclusion => vec![(
            "c1".into(),
            Query::select(Predicate::and(vec![
                Predicate::in_list(Column::Sal, CONCLUSION_SALARIES)?,
                Predicate::eq(Column::Gender, "M"),
            ])?),
        )],
        QuerySet::Nothing => Vec::new(),
    })
}

struct Datasets {
    normal: Table,
    random: Table,
    normal_gender: Table,
    random_gender: Table,
}

/// Runs scenarios, reusing generated tables across runs with the same
/// `(scale, seed)`.
pub struct Runner {
    config: EngineConfig,
    cache: HashMap<(u64, u64), Datasets>,
}

impl Runner {
    pub fn new(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Runner { config, cache: HashMap::new() })
    }

    fn datasets(&mut self, scale: u64, seed: u64) -> Result<&Datasets> {
        if !self.cache.contains_key(&(scale, seed)) {
            let normal = generate_normal(scale, seed, self.config.page_size)?;
            let random = generate_random(&normal, seed.wrapping_add(1))?;
            let mut normal_gender = normal.clone();
            let mut random_gender = random.clone();
            assign_gender(&mut normal_gender);
            assign_gender(&mut random_gender);
            self.cache.insert((scale, seed), Datasets { normal, random, normal_gender, random_gender });
        }
        Ok(&self.cache[&(scale, seed)])
    }

    pub fn run(&mut self, name: &str, scale: u64, seed: u64) -> Result<Report> {
        let def = registry()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| BenchError::UnknownScenario(name.to_string()))?;
        if scale < MIN_SCALE {
            return Err(BenchError::ScaleTooSmall { scale, min: MIN_SCALE });
        }
        let config = self.config;
        let data = self.datasets(scale, seed)?;
        let mut db = Database::in_memory(config)?;
        for &ds in def.datasets {
            let t = match (ds, def.gender) {
                (Dataset::Normal, false) => &data.normal,
                (Dataset::Random, false) => &data.random,
                (Dataset::Normal, true) => &data.normal_gender,
                (Dataset::Random, true) => &data.random_gender,
            };
            db.put_table(t.clone())?;
        }

        let mut report = Report {
            scenario: def.name.to_string(),
            description: def.description.to_string(),
            scale,
            seed,
            ..Report::default()
        };
        for &ds in def.datasets {
            let t = db.table(ds.table())?;
            report.tables.push(TableMeta {
                name: t.name().to_string(),
                rows: t.row_count(),
                blocks: t.block_count() as u64,
                size_bytes: t.size_bytes(),
            });
        }

        let queries = queries(def.queries, scale)?;
        let mut configs: Vec<Option<IndexKind>> = def.kinds.iter().copied().map(Some).collect();
        if !queries.is_empty() {
            configs.push(None);
        }
        // per query, measurements in configuration order
        let mut measured: Vec<Vec<ReportRow>> = vec![Vec::new(); queries.len()];
        for kind in configs {
            let mut built = Vec::new();
            if let Some(kind) = kind {
                for &ds in def.datasets {
                    for &column in def.columns {
                        let suffix = if kind == IndexKind::Bitmap { "bmx" } else { "idx" };
                        let name = format!("{}_{}_{}", ds.prefix(), column, suffix);
                        let s = db.create_index(&name, ds.table(), column, kind)?.stats();
                        report.indexes.push(IndexMeta {
                            name: s.name.clone(),
                            table: ds.table().to_string(),
                            kind: s.kind.to_string(),
                            column: s.column.to_string(),
                            size_bytes: s.size_bytes,
                            blocks: s.blocks,
                            blevel: s.blevel,
                            clustering_factor: s.clustering_factor,
                            distinct_keys: s.distinct_keys,
                        });
                        built.push(name);
                    }
                }
            }
            let table = def.datasets[0].table();
            for (slot, (qid, q)) in measured.iter_mut().zip(&queries) {
                let (plan, out) = db.run(table, q, true)?;
                slot.push(ReportRow {
                    scenario: def.name.to_string(),
                    query_id: qid.clone(),
                    predicate: q.predicate.to_string(),
                    index_kind: kind.map_or("none", IndexKind::as_str).to_string(),
                    plan_kind: plan.kind().to_string(),
                    plan_shape: plan.shape(),
                    cost_est: plan.cost,
                    card_est: plan.card,
                    rows: out.count,
                    consistent_gets: out.stats.consistent_gets,
                    physical_reads: out.stats.physical_reads,
                });
            }
            for name in built {
                db.drop_index(&name)?;
            }
        }
        report.rows = measured.into_iter().flatten().collect();
        Ok(report)
    }
}

/// Runs one scenario on freshly generated data.
pub fn run_scenario(name: &str, scale: u64, seed: u64, config: &EngineConfig) -> Result<Report> {
    Runner::new(*config)?.run(name, scale, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        let names = scenario_names();
        assert_eq!(names.len(), 19);
        for s in SUITE {
            assert!(names.contains(&s));
        }
        assert!(names.contains(&"step4b"));
    }

    #[test]
    fn scaling() {
        assert_eq!(scale_empno(2300, 100_000), 230);
        assert_eq!(scale_empno(8, 100_000), 1);
        assert_eq!(scale_empno(1_000_000, 100_000), 100_000);
        assert_eq!(scale_empno(858, 1000), 1);
    }

    #[test]
    fn errors() {
        let cfg = EngineConfig::default();
        assert!(matches!(run_scenario("bogus", 1000, 1, &cfg), Err(BenchError::UnknownScenario(_))));
        assert!(matches!(run_scenario("step1", 999, 1, &cfg), Err(BenchError::ScaleTooSmall { .. })));
    }

    #[test]
    fn unique_probes_return_one_row() {
        let r = run_scenario("step1a", 1000, 7, &EngineConfig::default()).unwrap();
        assert_eq!(r.rows.len(), 14);
        assert!(r.rows.iter().all(|row| row.rows == 1));
        assert_eq!(r.indexes.len(), 1);
    }

    #[test]
    fn step6_reports_only_indexes() {
        let r = run_scenario("step6", 2000, 7, &EngineConfig::default()).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.indexes.len(), 4);
        assert_eq!(r.tables.len(), 2);
    }
}

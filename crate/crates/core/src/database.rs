//! A catalog of tables and indexes sharing one buffer pool, optionally
//! persisted to a directory.
//!
//! Index definitions are stored in a `catalog` file, one `index <name>
//! <kind> <table> <column>` line each, and rebuilt when the directory is opened.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bitmap::build_bitmap_index;
use crate::btree::{build_btree_index, DEFAULT_FANOUT, MIN_FANOUT};
use crate::error::{Error, Result};
use crate::executor::{execute, ExecOutput};
use crate::index::AnyIndex;
use crate::planner::{choose_plan, CostModelConfig, Plan, Query};
use crate::stats::{analyze_table, IndexKind, IndexStats, TableStats};
use crate::storage::{parse_key_values, BufferPool, Column, Table, DEFAULT_PAGE_SIZE, DEFAULT_POOL_BLOCKS};

const CATALOG_FILE: &str = "catalog";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub page_size: usize,
    pub pool_blocks: usize,
    pub fanout: usize,
    pub cost: CostModelConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            page_size: DEFAULT_PAGE_SIZE,
            pool_blocks: DEFAULT_POOL_BLOCKS,
            fanout: DEFAULT_FANOUT,
            cost: CostModelConfig::default(),
        }
    }
}

impl EngineConfig {
    /// Applies `key = value` lines over the defaults; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = EngineConfig::default();
        for (k, v) in parse_key_values(text)? {
            cfg.set(&k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("invalid value `{v}` for {key}")))
        }
        match key {
            "page_size" => self.page_size = num(key, value)?,
            "pool_blocks" => self.pool_blocks = num(key, value)?,
            "fanout" => self.fanout = num(key, value)?,
            "multiblock_divisor" => self.cost.multiblock_divisor = num(key, value)?,
            "bitmap_per_row_cost" => self.cost.bitmap_per_row_cost = num(key, value)?,
            "btree_probe_base" => self.cost.btree_probe_base = num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        crate::storage::rows_per_block(self.page_size)?;
        if self.pool_blocks == 0 {
            return Err(Error::Config("pool_blocks must be positive".into()));
        }
        if self.fanout < MIN_FANOUT {
            return Err(Error::Config(format!("fanout must be at least {MIN_FANOUT}")));
        }
        self.cost.validate()
    }
}

#[derive(Debug)]
pub struct Database {
    dir: Option<PathBuf>,
    config: EngineConfig,
    pool: BufferPool,
    tables: BTreeMap<String, Table>,
    indexes: BTreeMap<String, AnyIndex>,
}

impl Database {
    pub fn in_memory(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Database {
            dir: None,
            pool: BufferPool::new(config.pool_blocks)?,
            config,
            tables: BTreeMap::new(),
            indexes: BTreeMap::new(),
        })
    }

    /// Opens (creating if needed) a database directory, loading every table
    /// and rebuilding every catalogued index.
    pub fn open(dir: &Path, config: EngineConfig) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut db = Database::in_memory(config)?;
        db.dir = Some(dir.to_path_buf());
        let mut names = Vec::new();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "meta") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    names.push(stem.to_string());
                }
            }
        }
        names.sort();
        for name in names {
            let t = Table::load(dir, &name)?;
            db.tables.insert(name, t);
        }
        let catalog = dir.join(CATALOG_FILE);
        if catalog.exists() {
            for (i, line) in fs::read_to_string(&catalog)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                match line.split_whitespace().collect::<Vec<_>>()[..] {
                    ["index", name, kind, table, column] => {
                        db.build_index(name, table, column.parse()?, kind.parse()?)?;
                    }
                    _ => {
                        return Err(Error::Format(format!("catalog line {}: `{line}`", i + 1)));
                    }
                }
            }
        }
        Ok(db)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn pool(&self) -> &BufferPool {
        &self.pool
    }

    pub fn pool_mut(&mut self) -> &mut BufferPool {
        &mut self.pool
    }

    pub fn table_names(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn table(&self, name: &str) -> Result<&Table> {
        self.tables.get(name).ok_or_else(|| Error::Catalog(format!("no table `{name}`")))
    }

    /// Adds or replaces a table; indexes on a replaced table are rebuilt.
    pub fn put_table(&mut self, table: Table) -> Result<()> {
        let name = table.name().to_string();
        self.tables.insert(name.clone(), table);
        let stale: Vec<(String, Column, IndexKind)> = self
            .indexes
            .values()
            .filter(|i| i.table_name() == name)
            .map(|i| (i.name().to_string(), i.column(), i.kind()))
            .collect();
        for (idx, column, kind) in stale {
            self.indexes.remove(&idx);
            if self.table(&name)?.schema().contains(column) {
                self.build_index(&idx, &name, column, kind)?;
            }
        }
        Ok(())
    }

    fn build_index(&mut self, name: &str, table: &str, column: Column, kind: IndexKind) -> Result<&AnyIndex> {
        let t = self.table(table)?;
        let index: AnyIndex = match kind {
            IndexKind::Bitmap => build_bitmap_index(name, t, column)?.into(),
            IndexKind::BTree => build_btree_index(name, t, column, self.config.fanout)?.into(),
        };
        self.indexes.insert(name.to_string(), index);
        Ok(&self.indexes[name])
    }

    pub fn create_index(&mut self, name: &str, table: &str, column: Column, kind: IndexKind) -> Result<&AnyIndex> {
        if self.indexes.contains_key(name) {
            return Err(Error::Catalog(format!("index `{name}` already exists")));
        }
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Usage(format!("invalid index name `{name}`")));
        }
        self.build_index(name, table, column, kind)
    }

    pub fn drop_index(&mut self, name: &str) -> Result<AnyIndex> {
        self.indexes.remove(name).ok_or_else(|| Error::Catalog(format!("no index `{name}`")))
    }

    pub fn index(&self, name: &str) -> Result<&AnyIndex> {
        self.indexes.get(name).ok_or_else(|| Error::Catalog(format!("no index `{name}`")))
    }

    /// Indexes on `table`, by name.
    pub fn indexes_on(&self, table: &str) -> Vec<&AnyIndex> {
        self.indexes.values().filter(|i| i.table_name() == table).collect()
    }

    pub fn analyze(&self, table: &str) -> Result<TableStats> {
        Ok(analyze_table(self.table(table)?))
    }

    pub fn index_stats(&self, table: &str) -> Vec<IndexStats> {
        self.indexes_on(table).into_iter().map(AnyIndex::stats).collect()
    }

    pub fn plan(&self, table: &str, query: &Query) -> Result<Plan> {
        let stats = self.analyze(table)?;
        choose_plan(query, &stats, &self.index_stats(table), &self.config.cost)
    }

    /// Plans and executes `query`; `cold` empties the buffer pool first.
    pub fn run(&mut self, table: &str, query: &Query, cold: bool) -> Result<(Plan, ExecOutput)> {
        let plan = self.plan(table, query)?;
        let out = self.execute(&plan, cold)?;
        Ok((plan, out))
    }

    pub fn execute(&mut self, plan: &Plan, cold: bool) -> Result<ExecOutput> {
        if cold {
            self.pool.flush();
        }
        let t = self.tables.get(&plan.table).ok_or_else(|| Error::Catalog(format!("no table `{}`", plan.table)))?;
        let idx: Vec<&AnyIndex> = self.indexes.values().filter(|i| i.table_name() == plan.table).collect();
        execute(plan, t, &idx, &mut self.pool)
    }

    /// Writes every table and the index catalog to the database directory.
    pub fn save(&self) -> Result<()> {
        let dir = self.dir.as_ref().ok_or_else(|| Error::Usage("in-memory database has no directory".into()))?;
        for t in self.tables.values() {
            t.save(dir)?;
        }
        let mut catalog = String::new();
        for i in self.indexes.values() {
            catalog.push_str(&format!("index {} {} {} {}\n", i.name(), i.kind(), i.table_name(), i.column()));
        }
        fs::write(dir.join(CATALOG_FILE), catalog)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{PlanKind, Predicate};
    use crate::storage::{assign_gender, generate_normal};

    #[test]
    fn config_parsing() {
        let cfg = EngineConfig::parse("# tuned\npage_size = 4096\nbitmap_per_row_cost=0.2\n").unwrap();
        assert_eq!(cfg.page_size, 4096);
        assert_eq!(cfg.cost.bitmap_per_row_cost, 0.2);
        assert!(matches!(EngineConfig::parse("colour = red"), Err(Error::Config(_))));
        assert!(matches!(EngineConfig::parse("fanout = 2"), Err(Error::Config(_))));
        assert!(matches!(EngineConfig::parse("pool_blocks = x"), Err(Error::Config(_))));
    }

    #[test]
    fn round_trip_directory() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path(), EngineConfig::default()).unwrap();
        let mut t = generate_normal(20_000, 3, DEFAULT_PAGE_SIZE).unwrap();
        assign_gender(&mut t);
        db.put_table(t).unwrap();
        db.create_index("g_bmx", "test_normal", Column::Gender, IndexKind::Bitmap).unwrap();
        db.create_index("e_idx", "test_normal", Column::Empno, IndexKind::BTree).unwrap();
        assert!(db.create_index("g_bmx", "test_normal", Column::Sal, IndexKind::Bitmap).is_err());
        db.save().unwrap();

        let mut db = Database::open(dir.path(), EngineConfig::default()).unwrap();
        assert_eq!(db.indexes_on("test_normal").len(), 2);
        let (plan, out) = db.run("test_normal", &Query::select(Predicate::eq(Column::Empno, 5)), true).unwrap();
        assert_eq!(plan.kind(), PlanKind::BTreeAccess);
        assert_eq!(out.count, 1);
        db.drop_index("e_idx").unwrap();
        assert!(db.drop_index("e_idx").is_err());
        assert!(db.table("nope").is_err());
    }

    #[test]
    fn replacing_table_rebuilds_indexes() {
        let mut db = Database::in_memory(EngineConfig::default()).unwrap();
        db.put_table(generate_normal(100, 3, DEFAULT_PAGE_SIZE).unwrap()).unwrap();
        db.create_index("s_bmx", "test_normal", Column::Sal, IndexKind::Bitmap).unwrap();
        db.put_table(generate_normal(200, 3, DEFAULT_PAGE_SIZE).unwrap()).unwrap();
        let (_, out) = db.run("test_normal", &Query::count(Predicate::between(Column::Sal, 0, 10_000)), true).unwrap();
        assert_eq!(out.count, 200);
    }
}

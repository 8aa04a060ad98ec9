use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ixbench_core::planner::{explain, Query};
use ixbench_core::stats::IndexKind;
use ixbench_core::storage::{assign_gender, generate_normal, generate_random, Column};
use ixbench_core::{Database, EngineConfig};

use crate::error::{BenchError, Result};
use crate::filter::parse_filter;
use crate::report::{render_all, Format};
use crate::scenario::{scenario_names, Runner, DEFAULT_SCALE, DEFAULT_SEED, SUITE};

#[derive(Debug, Parser)]
#[command(name = "ixbench", version, about = "Compare bitmap and B-tree access paths on generated employee tables")]
struct Cli {
    /// Block size in bytes for generated tables
    #[arg(long, global = true)]
    page_size: Option<usize>,
    /// Buffer pool capacity in blocks
    #[arg(long, global = true)]
    pool_blocks: Option<usize>,
    /// Engine settings as key = value lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding tables and the index catalog
    #[arg(long, global = true, default_value = "ixbench-data")]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the sequential and shuffled employee tables
    Gen {
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        rows: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Add the gender column (NULL, M or F by employee number)
        #[arg(long)]
        gender: bool,
    },
    /// Create an index on a column
    Index {
        #[arg(long)]
        table: String,
        #[arg(long)]
        column: Column,
        #[arg(long)]
        kind: IndexKind,
        /// Defaults to <table>_<column>_<bmx|idx>
        #[arg(long)]
        name: Option<String>,
    },
    /// Drop an index
    DropIndex {
        #[arg(long)]
        name: String,
    },
    /// Print exact table and index statistics
    Analyze {
        #[arg(long)]
        table: String,
    },
    /// Plan and run a filter, printing the plan and I/O statistics
    Query {
        #[arg(long)]
        table: String,
        /// e.g. "empno between 1 and 2300" or "sal in (1000, 1500) and gender = 'M'"
        #[arg(long = "where")]
        filter: String,
        /// Count matching rows instead of fetching them
        #[arg(long)]
        count: bool,
        /// Keep the buffer pool warm instead of flushing it first
        #[arg(long)]
        warm: bool,
        /// Print up to this many matching rows
        #[arg(long, default_value_t = 0)]
        limit: usize,
    },
    /// Run one registered scenario
    Bench {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "md")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the full scenario suite
    Report {
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "md")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List scenario names
    Scenarios,
}

fn engine_config(cli: &Cli) -> Result<EngineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => EngineConfig::parse(&fs::read_to_string(path)?)?,
        None => EngineConfig::default(),
    };
    if let Some(p) = cli.page_size {
        cfg.page_size = p;
    }
    if let Some(p) = cli.pool_blocks {
        cfg.pool_blocks = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: &mut dyn Write, output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = engine_config(&cli)?;
    let dir = cli.data_dir.clone();
    match cli.command {
        Command::Gen { rows, seed, gender } => {
            let mut normal = generate_normal(rows, seed, cfg.page_size)?;
            let mut random = generate_random(&normal, seed.wrapping_add(1))?;
            if gender {
                assign_gender(&mut normal);
                assign_gender(&mut random);
            }
            let mut db = Database::open(&dir, cfg)?;
            for t in [normal, random] {
                writeln!(
                    out,
                    "{}: {} rows, {} blocks, {} bytes",
                    t.name(),
                    t.row_count(),
                    t.block_count(),
                    t.size_bytes()
                )?;
                db.put_table(t)?;
            }
            db.save()?;
        }
        Command::Index { table, column, kind, name } => {
            let mut db = Database::open(&dir, cfg)?;
            let suffix = if kind == IndexKind::Bitmap { "bmx" } else { "idx" };
            let name = name.unwrap_or_else(|| format!("{table}_{column}_{suffix}"));
            let s = db.create_index(&name, &table, column, kind)?.stats();
            writeln!(
                out,
                "created {} index {} on {table}({column}): {} bytes, {} blocks, blevel {}, clustering factor {}",
                s.kind, s.name, s.size_bytes, s.blocks, s.blevel, s.clustering_factor
            )?;
            db.save()?;
        }
        Command::DropIndex { name } => {
            let mut db = Database::open(&dir, cfg)?;
            db.drop_index(&name)?;
            db.save()?;
            writeln!(out, "dropped index {name}")?;
        }
        Command::Analyze { table } => {
            let db = Database::open(&dir, cfg)?;
            let s = db.analyze(&table)?;
            writeln!(out, "table {}: {} rows, {} blocks", s.table, s.row_count, s.block_count)?;
            for (c, cs) in &s.columns {
                let show =
                    |v: &Option<ixbench_core::storage::Value>| v.as_ref().map_or("-".to_string(), ToString::to_string);
                writeln!(
                    out,
                    "  column {c}: {} distinct, {} nulls, min {}, max {}",
                    cs.ndv,
                    cs.null_count,
                    show(&cs.min),
                    show(&cs.max)
                )?;
            }
            for i in db.index_stats(&table) {
                writeln!(
                    out,
                    "  index {} ({} on {}): {} bytes, {} blocks, blevel {}, clustering factor {}, {} distinct keys",
                    i.name, i.kind, i.column, i.size_bytes, i.blocks, i.blevel, i.clustering_factor, i.distinct_keys
                )?;
            }
        }
        Command::Query { table, filter, count, warm, limit } => {
            let predicate = parse_filter(&filter)?;
            let query = if count { Query::count(predicate) } else { Query::select(predicate) };
            let mut db = Database::open(&dir, cfg)?;
            let (plan, result) = db.run(&table, &query, !warm)?;
            writeln!(out, "{}", explain(&plan))?;
            if count {
                writeln!(out, "COUNT(*) = {}\n", result.count)?;
            } else {
                for (rid, row) in result.rows.iter().take(limit) {
                    let gender = row.gender.map_or("NULL", |g| g.as_str());
                    writeln!(out, "{rid}\t{}\t{}\t{}\t{gender}", row.empno, row.ename_str(), row.sal)?;
                }
                writeln!(out, "{} rows selected.\n", result.count)?;
            }
            write!(out, "{}", result.stats.render())?;
        }
        Command::Bench { scenario, scale, seed, format, output } => {
            let report = Runner::new(cfg)?.run(&scenario, scale, seed)?;
            emit(out, output.as_ref(), &report.render(format)?)?;
        }
        Command::Report { all, scale, seed, format, output } => {
            if !all {
                return Err(BenchError::Usage("report needs --all".into()));
            }
            let mut runner = Runner::new(cfg)?;
            let reports = SUITE.iter().map(|s| runner.run(s, scale, seed)).collect::<Result<Vec<_>>>()?;
            emit(out, output.as_ref(), &render_all(&reports, format)?)?;
        }
        Command::Scenarios => {
            for name in scenario_names() {
                writeln!(out, "{name}")?;
            }
        }
    }
    Ok(())
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{first}");
            return 2;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

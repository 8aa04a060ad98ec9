//! Deterministic generators for the `test_normal` / `test_random` tables.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, so a given
//! `(n, seed)` always produces the same table on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::storage::row::{Column, Gender, Row, Schema, ENAME_LEN, SAL_MAX, SAL_MIN};
use crate::storage::table::{create_table, Table};

pub const NORMAL_TABLE: &str = "test_normal";
pub const RANDOM_TABLE: &str = "test_random";

/// Builds `test_normal`: `empno = 1..=n` in order, a random 30-letter
/// uppercase `ename` and a salary drawn uniformly from `[1000, 7000)` and
/// rounded to the integer column, so both endpoints occur (at half weight).
/// `gender` starts out NULL and the schema has no gender column.
pub fn generate_normal(n: u64, seed: u64, page_size: usize) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = create_table(NORMAL_TABLE, Schema::employee(), page_size)?;
    let span = (SAL_MAX - SAL_MIN) as f64;
    for empno in 1..=n as i64 {
        let mut ename = [0u8; ENAME_LEN];
        for c in ename.iter_mut() {
            *c = b'A' + rng.gen_range(0..26u8);
        }
        let sal = (SAL_MIN as f64 + rng.gen::<f64>() * span).round() as i64;
        table.insert(Row { empno, ename, sal, gender: None })?;
    }
    Ok(table)
}

/// Copies `source` into `test_random` in a seeded uniformly random order.
pub fn generate_random(source: &Table, seed: u64) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Row> = source.rows().map(|(_, r)| r).collect();
    rows.shuffle(&mut rng);
    let mut table = create_table(RANDOM_TABLE, source.schema().clone(), source.page_size())?;
    for row in rows {
        table.insert(row)?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenderCounts {
    pub male: u64,
    pub female: u64,
    pub null: u64,
}

/// Gender assigned to an employee number: `empno mod 6` of 0 is NULL,
/// 1..=3 is M and 4..=5 is F (1/2 M, 1/3 F, 1/6 NULL).
pub fn gender_for(empno: i64) -> Option<Gender> {
    match empno.rem_euclid(6) {
        0 => None,
        1..=3 => Some(Gender::M),
        _ => Some(Gender::F),
    }
}

/// Adds the gender column if missing and rewrites every row with [`gender_for`].
pub fn assign_gender(table: &mut Table) -> GenderCounts {
    table.schema_mut().add(Column::Gender);
    let mut counts = GenderCounts::default();
    table.rewrite_rows(|row| {
        row.gender = gender_for(row.empno);
        match row.gender {
            Some(Gender::M) => counts.male += 1,
            Some(Gender::F) => counts.female += 1,
            None => counts.null += 1,
        }
    });
    counts
}

use std::fmt;
use std::ops::Bound;

use crate::error::{Error, Result};
use crate::key_range::KeyRange;
use crate::storage::{Column, Row, Schema, Value};

/// A filter over one table's rows. Comparisons with NULL are false; only
/// `IsNull` matches NULL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Eq(Column, Value),
    Range(Column, KeyRange),
    /// Distinct values, kept sorted.
    InList(Column, Vec<Value>),
    IsNull(Column),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
}

impl Predicate {
    pub fn eq(column: Column, value: impl Into<Value>) -> Self {
        Predicate::Eq(column, value.into())
    }

    pub fn between(column: Column, lo: impl Into<Value>, hi: impl Into<Value>) -> Self {
        Predicate::Range(column, KeyRange::between(lo, hi))
    }

    /// Sorts and de-duplicates `values`; rejects an empty list.
    pub fn in_list<V: Into<Value>>(column: Column, values: impl IntoIterator<Item = V>) -> Result<Self> {
        let mut values: Vec<Value> = values.into_iter().map(Into::into).collect();
        values.sort();
        values.dedup();
        if values.is_empty() {
            return Err(Error::Usage(format!("empty IN list on `{column}`")));
        }
        Ok(Predicate::InList(column, values))
    }

    pub fn and(parts: Vec<Predicate>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Usage("AND needs at least one operand".into()));
        }
        Ok(Predicate::And(parts))
    }

    pub fn or(parts: Vec<Predicate>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Usage("OR needs at least one operand".into()));
        }
        Ok(Predicate::Or(parts))
    }

    /// Top-level conjuncts with nested ANDs flattened.
    pub fn conjuncts(&self) -> Vec<&Predicate> {
        match self {
            Predicate::And(parts) => parts.iter().flat_map(Predicate::conjuncts).collect(),
            other => vec![other],
        }
    }

    pub fn columns(&self) -> Vec<Column> {
        let mut out = Vec::new();
        self.collect_columns(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_columns(&self, out: &mut Vec<Column>) {
        match self {
            Predicate::Eq(c, _) | Predicate::Range(c, _) | Predicate::InList(c, _) | Predicate::IsNull(c) => {
                out.push(*c)
            }
            Predicate::And(parts) | Predicate::Or(parts) => parts.iter().for_each(|p| p.collect_columns(out)),
        }
    }

    /// Checks that every column exists in `schema` and every literal has the column's type.
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        self.validate_columns(&|c| schema.contains(c))
    }

    /// Like [`Predicate::validate`], with column existence decided by `known`.
    pub fn validate_columns(&self, known: &dyn Fn(Column) -> bool) -> Result<()> {
        let exists = |c: Column| -> Result<()> {
            if known(c) {
                Ok(())
            } else {
                Err(Error::Planning(format!("unknown column `{c}`")))
            }
        };
        let typed = |c: Column, v: &Value| -> Result<()> {
            exists(c)?;
            if v.column_type() != c.column_type() {
                return Err(Error::Planning(format!("literal {v} does not match the type of `{c}`")));
            }
            Ok(())
        };
        match self {
            Predicate::Eq(c, v) => typed(*c, v),
            Predicate::Range(c, r) => {
                exists(*c)?;
                for b in [&r.lo, &r.hi] {
                    if let Bound::Included(v) | Bound::Excluded(v) = b {
                        typed(*c, v)?;
                    }
                }
                Ok(())
            }
            Predicate::InList(c, vs) => {
                if vs.is_empty() {
                    return Err(Error::Planning(format!("empty IN list on `{c}`")));
                }
                vs.iter().try_for_each(|v| typed(*c, v))
            }
            Predicate::IsNull(c) => exists(*c),
            Predicate::And(parts) | Predicate::Or(parts) => {
                if parts.is_empty() {
                    return Err(Error::Planning("empty AND/OR".into()));
                }
                parts.iter().try_for_each(|p| p.validate_columns(known))
            }
        }
    }

    /// False only when no row can match regardless of the data.
    pub fn is_satisfiable(&self) -> bool {
        match self {
            Predicate::Range(_, r) => !r.is_empty(),
            Predicate::InList(_, vs) => !vs.is_empty(),
            Predicate::Eq(..) | Predicate::IsNull(_) => true,
            Predicate::And(parts) => parts.iter().all(Predicate::is_satisfiable),
            Predicate::Or(parts) => parts.iter().any(Predicate::is_satisfiable),
        }
    }

    /// Brute-force evaluation against one row.
    pub fn matches(&self, row: &Row) -> bool {
        match self {
            Predicate::Eq(c, v) => row.value(*c).as_ref() == Some(v),
            Predicate::Range(c, r) => row.value(*c).is_some_and(|v| r.contains(&v)),
            Predicate::InList(c, vs) => row.value(*c).is_some_and(|v| vs.binary_search(&v).is_ok()),
            Predicate::IsNull(c) => row.value(*c).is_none(),
            Predicate::And(parts) => parts.iter().all(|p| p.matches(row)),
            Predicate::Or(parts) => parts.iter().any(|p| p.matches(row)),
        }
    }
}

fn fmt_range(f: &mut fmt::Formatter<'_>, c: Column, r: &KeyRange) -> fmt::Result {
    match (&r.lo, &r.hi) {
        (Bound::Included(lo), Bound::Included(hi)) => write!(f, "{c} BETWEEN {lo} AND {hi}"),
        (Bound::Unbounded, Bound::Unbounded) => write!(f, "{c} IS NOT NULL"),
        (lo, hi) => {
            let mut first = true;
            match lo {
                Bound::Included(v) => write!(f, "{c} >= {v}")?,
                Bound::Excluded(v) => write!(f, "{c} > {v}")?,
                Bound::Unbounded => first = false,
            }
            let sep = if first { " AND " } else { "" };
            match hi {
                Bound::Included(v) => write!(f, "{sep}{c} <= {v}"),
                Bound::Excluded(v) => write!(f, "{sep}{c} < {v}"),
                Bound::Unbounded => Ok(()),
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, parts: &[Predicate], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")
        };
        match self {
            Predicate::Eq(c, v) => write!(f, "{c} = {v}"),
            Predicate::Range(c, r) => fmt_range(f, *c, r),
            Predicate::InList(c, vs) => {
                write!(f, "{c} IN (")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            Predicate::IsNull(c) => write!(f, "{c} IS NULL"),
            Predicate::And(parts) => join(f, parts, "AND"),
            Predicate::Or(parts) => join(f, parts, "OR"),
        }
    }
}

/// A single-table statement: fetch matching rows or count them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub predicate: Predicate,
    pub count_only: bool,
}

impl Query {
    pub fn select(predicate: Predicate) -> Self {
        Query { predicate, count_only: false }
    }

    pub fn count(predicate: Predicate) -> Self {
        Query { predicate, count_only: true }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = if self.count_only { "COUNT(*)" } else { "*" };
        write!(f, "SELECT {what} WHERE {}", self.predicate)
    }
}

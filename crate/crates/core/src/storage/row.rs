//! Row format for the employee tables.
//!
//! Every row is encoded into a fixed 50-byte record:
//!
//! | offset | bytes | field                               |
//! |--------|-------|-------------------------------------|
//! | 0      | 8     | `empno`, little-endian `i64`        |
//! | 8      | 30    | `ename`, uppercase ASCII            |
//! | 38     | 8     | `sal`, little-endian `i64`          |
//! | 46     | 1     | gender tag (0 = NULL, 1 = M, 2 = F) |
//! | 47     | 1     | flags (bit 0 = live row)            |
//! | 48     | 2     | padding                             |

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const ENAME_LEN: usize = 30;
pub const ROW_WIDTH: usize = 50;
pub const SAL_MIN: i64 = 1000;
pub const SAL_MAX: i64 = 7000;

const ROW_LIVE: u8 = 0x01;

/// Physical address of a row: block number within the table and slot within the block.
///
/// Ordering is lexicographic on `(block, slot)`, which for an append-only
/// table is also insertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId {
    pub block: u32,
    pub slot: u16,
}

impl RowId {
    pub const fn new(block: u32, slot: u16) -> Self {
        RowId { block, slot }
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block, self.slot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    M,
    F,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::M => "M",
            Gender::F => "F",
        }
    }

    fn tag(g: Option<Gender>) -> u8 {
        match g {
            None => 0,
            Some(Gender::M) => 1,
            Some(Gender::F) => 2,
        }
    }

    fn from_tag(tag: u8) -> Result<Option<Gender>> {
        match tag {
            0 => Ok(None),
            1 => Ok(Some(Gender::M)),
            2 => Ok(Some(Gender::F)),
            other => Err(Error::Format(format!("bad gender tag {other}"))),
        }
    }
}

/// A column of the employee schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Column {
    Empno,
    Ename,
    Sal,
    Gender,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Int,
    Text,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::Empno, Column::Ename, Column::Sal, Column::Gender];

    pub fn name(self) -> &'static str {
        match self {
            Column::Empno => "empno",
            Column::Ename => "ename",
            Column::Sal => "sal",
            Column::Gender => "gender",
        }
    }

    pub fn column_type(self) -> ColumnType {
        match self {
            Column::Empno | Column::Sal => ColumnType::Int,
            Column::Ename | Column::Gender => ColumnType::Text,
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "empno" => Ok(Column::Empno),
            "ename" => Ok(Column::Ename),
            "sal" => Ok(Column::Sal),
            "gender" => Ok(Column::Gender),
            other => Err(Error::Catalog(format!("unknown column `{other}`"))),
        }
    }
}

/// A non-null column value. NULL is modelled as `Option<Value>::None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Text(_) => None,
        }
    }

    pub fn column_type(&self) -> ColumnType {
        match self {
            Value::Int(_) => ColumnType::Int,
            Value::Text(_) => ColumnType::Text,
        }
    }

    /// Bytes this value occupies as an index key.
    pub fn key_len(&self) -> usize {
        match self {
            Value::Int(_) => 8,
            Value::Text(s) => s.len(),
        }
    }
}

// Ints sort before text; comparisons across types only happen in mixed-type
// containers and never inside a single column.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Int(_), Value::Text(_)) => Ordering::Less,
            (Value::Text(_), Value::Int(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => write!(f, "'{s}'"),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<Gender> for Value {
    fn from(g: Gender) -> Self {
        Value::Text(g.as_str().to_string())
    }
}

/// Ordered list of columns carried by a table.
///
/// The base layout is `empno, ename, sal`; `gender` is added by
/// [`crate::storage::assign_gender`] or declared up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<Column>,
}

impl Schema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let base = [Column::Empno, Column::Ename, Column::Sal];
        let ok = columns.len() >= 3
            && columns[..3] == base
            && (columns.len() == 3 || (columns.len() == 4 && columns[3] == Column::Gender));
        if !ok {
            return Err(Error::Config(format!(
                "unsupported schema {:?}; expected empno,ename,sal[,gender]",
                columns.iter().map(|c| c.name()).collect::<Vec<_>>()
            )));
        }
        Ok(Schema { columns })
    }

    pub fn employee() -> Self {
        Schema { columns: vec![Column::Empno, Column::Ename, Column::Sal] }
    }

    pub fn employee_with_gender() -> Self {
        Schema { columns: Column::ALL.to_vec() }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn contains(&self, column: Column) -> bool {
        self.columns.contains(&column)
    }

    pub fn require(&self, column: Column) -> Result<()> {
        if self.contains(column) {
            Ok(())
        } else {
            Err(Error::Catalog(format!("column `{column}` is not part of the table schema")))
        }
    }

    pub(crate) fn add(&mut self, column: Column) {
        if !self.contains(column) {
            self.columns.push(column);
        }
    }

    /// Comma separated column names, as stored in table metadata.
    pub fn to_list(&self) -> String {
        self.columns.iter().map(|c| c.name()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_list(s: &str) -> Result<Self> {
        let cols = s.split(',').map(str::parse).collect::<Result<Vec<Column>>>()?;
        Schema::new(cols)
    }
}

/// One employee row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row {
    pub empno: i64,
    pub ename: [u8; ENAME_LEN],
    pub sal: i64,
    pub gender: Option<Gender>,
}

impl Row {
    pub fn new(empno: i64, ename: &str, sal: i64, gender: Option<Gender>) -> Result<Self> {
        let bytes = ename.as_bytes();
        if bytes.len() != ENAME_LEN {
            return Err(Error::Validation(format!(
                "ename must be exactly {ENAME_LEN} characters, got {}",
                bytes.len()
            )));
        }
        let mut buf = [0u8; ENAME_LEN];
        buf.copy_from_slice(bytes);
        let row = Row { empno, ename: buf, sal, gender };
        row.validate()?;
        Ok(row)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.ename.iter().all(u8::is_ascii_uppercase) {
            return Err(Error::Validation("ename must contain only A-Z".into()));
        }
        if !(SAL_MIN..=SAL_MAX).contains(&self.sal) {
            return Err(Error::Validation(format!("sal {} outside [{SAL_MIN}, {SAL_MAX}]", self.sal)));
        }
        Ok(())
    }

    pub fn ename_str(&self) -> &str {
        // validated rows are ASCII
        std::str::from_utf8(&self.ename).unwrap_or("")
    }

    pub fn value(&self, column: Column) -> Option<Value> {
        match column {
            Column::Empno => Some(Value::Int(self.empno)),
            Column::Ename => Some(Value::Text(self.ename_str().to_string())),
            Column::Sal => Some(Value::Int(self.sal)),
            Column::Gender => self.gender.map(Value::from),
        }
    }

    pub fn encode(&self, out: &mut [u8]) {
        debug_assert_eq!(out.len(), ROW_WIDTH);
        out[0..8].copy_from_slice(&self.empno.to_le_bytes());
        out[8..38].copy_from_slice(&self.ename);
        out[38..46].copy_from_slice(&self.sal.to_le_bytes());
        out[46] = Gender::tag(self.gender);
        out[47] = ROW_LIVE;
        out[48] = 0;
        out[49] = 0;
    }

    pub fn decode(buf: &[u8]) -> Result<Self> {
        if buf.len() != ROW_WIDTH || buf[47] & ROW_LIVE == 0 {
            return Err(Error::Format("not a live row record".into()));
        }
        let mut ename = [0u8; ENAME_LEN];
        ename.copy_from_slice(&buf[8..38]);
        Ok(Row {
            empno: i64::from_le_bytes(buf[0..8].try_into().expect("8 bytes")),
            ename,
            sal: i64::from_le_bytes(buf[38..46].try_into().expect("8 bytes")),
            gender: Gender::from_tag(buf[46])?,
        })
    }
}

//! Heap tables of fixed-width rows packed into fixed-size blocks.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::storage::buffer_pool::{BufferPool, SegmentId};
use crate::storage::row::{Row, RowId, Schema, ROW_WIDTH};

pub const DEFAULT_PAGE_SIZE: usize = 8192;
/// Bytes reserved at the start of every block (row directory, checksums, ...).
pub const BLOCK_HEADER_BYTES: usize = 192;

const META_FORMAT: &str = "1";

/// Number of rows a block of `page_size` bytes holds.
pub fn rows_per_block(page_size: usize) -> Result<usize> {
    if page_size < BLOCK_HEADER_BYTES + ROW_WIDTH {
        return Err(Error::Config(format!(
            "page size {page_size} cannot hold a single {ROW_WIDTH}-byte row \
             after the {BLOCK_HEADER_BYTES}-byte block header"
        )));
    }
    if page_size > (1 << 20) {
        return Err(Error::Config(format!("page size {page_size} exceeds 1 MiB")));
    }
    Ok((page_size - BLOCK_HEADER_BYTES) / ROW_WIDTH)
}

pub struct Table {
    name: String,
    schema: Schema,
    page_size: usize,
    rows_per_block: usize,
    blocks: Vec<Box<[u8]>>,
    row_count: u64,
    segment: SegmentId,
}

/// A copy gets its own segment so both can share one buffer pool.
impl Clone for Table {
    fn clone(&self) -> Self {
        Table {
            name: self.name.clone(),
            schema: self.schema.clone(),
            page_size: self.page_size,
            rows_per_block: self.rows_per_block,
            blocks: self.blocks.clone(),
            row_count: self.row_count,
            segment: SegmentId::fresh(),
        }
    }
}

impl fmt::Debug for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Table")
            .field("name", &self.name)
            .field("schema", &self.schema.to_list())
            .field("page_size", &self.page_size)
            .field("rows", &self.row_count)
            .field("blocks", &self.blocks.len())
            .finish()
    }
}

/// Creates an empty table.
pub fn create_table(name: impl Into<String>, schema: Schema, page_size: usize) -> Result<Table> {
    let rows_per_block = rows_per_block(page_size)?;
    Ok(Table {
        name: name.into(),
        schema,
        page_size,
        rows_per_block,
        blocks: Vec::new(),
        row_count: 0,
        segment: SegmentId::fresh(),
    })
}

impl Table {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub(crate) fn schema_mut(&mut self) -> &mut Schema {
        &mut self.schema
    }

    pub fn page_size(&self) -> usize {
        self.page_size
    }

    pub fn rows_per_block(&self) -> usize {
        self.rows_per_block
    }

    pub fn row_count(&self) -> u64 {
        self.row_count
    }

    pub fn block_count(&self) -> u32 {
        self.blocks.len() as u32
    }

    pub fn segment(&self) -> SegmentId {
        self.segment
    }

    pub fn size_bytes(&self) -> u64 {
        self.blocks.len() as u64 * self.page_size as u64
    }

    pub fn rows_in_block(&self, block_no: u32) -> Result<usize> {
        let block = self.block(block_no)?;
        Ok(u16::from_le_bytes([block[0], block[1]]) as usize)
    }

    fn block(&self, block_no: u32) -> Result<&[u8]> {
        self.blocks.get(block_no as usize).map(|b| &b[..]).ok_or_else(|| {
            Error::Addressing(format!(
                "block {block_no} out of range for `{}` ({} blocks)",
                self.name,
                self.blocks.len()
            ))
        })
    }

    /// Appends a row, allocating a new block when the last one is full.
    pub fn insert(&mut self, row: Row) -> Result<RowId> {
        row.validate()?;
        if row.gender.is_some() && !self.schema.contains(crate::storage::Column::Gender) {
            return Err(Error::Validation(format!("table `{}` has no gender column", self.name)));
        }
        let slot = (self.row_count % self.rows_per_block as u64) as usize;
        if slot == 0 {
            if self.blocks.len() >= u32::MAX as usize {
                return Err(Error::Config("table block limit reached".into()));
            }
            self.blocks.push(vec![0u8; self.page_size].into_boxed_slice());
        }
        let block_no = self.blocks.len() - 1;
        let block = &mut self.blocks[block_no];
        let off = BLOCK_HEADER_BYTES + slot * ROW_WIDTH;
        row.encode(&mut block[off..off + ROW_WIDTH]);
        block[0..2].copy_from_slice(&((slot + 1) as u16).to_le_bytes());
        self.row_count += 1;
        Ok(RowId::new(block_no as u32, slot as u16))
    }

    /// Row ordinal (0-based insertion position) of a row address.
    pub fn ordinal_of(&self, rowid: RowId) -> u64 {
        rowid.block as u64 * self.rows_per_block as u64 + rowid.slot as u64
    }

    /// Row address of an ordinal; every block but the last is full.
    pub fn rowid_of(&self, ordinal: u64) -> Result<RowId> {
        if ordinal >= self.row_count {
            return Err(Error::Addressing(format!("ordinal {ordinal} out of range ({} rows)", self.row_count)));
        }
        let rpb = self.rows_per_block as u64;
        Ok(RowId::new((ordinal / rpb) as u32, (ordinal % rpb) as u16))
    }

    fn decode_slot(&self, block: &[u8], slot: usize) -> Row {
        let off = BLOCK_HEADER_BYTES + slot * ROW_WIDTH;
        Row::decode(&block[off..off + ROW_WIDTH]).expect("table blocks hold only valid rows")
    }

    /// Reads a block through the buffer pool, charging one consistent get.
    pub fn read_block(&self, pool: &mut BufferPool, block_no: u32) -> Result<BlockRows<'_>> {
        let block = self.block(block_no)?;
        pool.access(self.segment, block_no);
        Ok(BlockRows { table: self, block, block_no, next: 0, len: u16::from_le_bytes([block[0], block[1]]) as usize })
    }

    /// Full table scan through the buffer pool in block order.
    pub fn scan<'a>(&'a self, pool: &'a mut BufferPool) -> TableScan<'a> {
        TableScan { table: self, pool, current: None, next_block: 0 }
    }

    /// Uncharged iteration over all rows, used by index builds and ANALYZE.
    pub fn rows(&self) -> impl Iterator<Item = (RowId, Row)> + '_ {
        self.blocks.iter().enumerate().flat_map(move |(b, block)| {
            let n = u16::from_le_bytes([block[0], block[1]]) as usize;
            (0..n).map(move |s| (RowId::new(b as u32, s as u16), self.decode_slot(block, s)))
        })
    }

    /// Fetches rows by address. Consecutive addresses in the same block share
    /// one consistent get, so an ascending address stream costs one get per
    /// distinct block.
    pub fn fetch_rows<I>(&self, pool: &mut BufferPool, rowids: I) -> Result<Vec<(RowId, Row)>>
    where
        I: IntoIterator<Item = RowId>,
    {
        let mut out = Vec::new();
        let mut last_block = None;
        for rid in rowids {
            let block = self.block(rid.block)?;
            let n = u16::from_le_bytes([block[0], block[1]]) as usize;
            if rid.slot as usize >= n {
                return Err(Error::Addressing(format!("no row at {rid} in `{}`", self.name)));
            }
            if last_block != Some(rid.block) {
                pool.access(self.segment, rid.block);
                last_block = Some(rid.block);
            }
            out.push((rid, self.decode_slot(block, rid.slot as usize)));
        }
        Ok(out)
    }

    /// Applies `f` to every row in place.
    pub(crate) fn rewrite_rows(&mut self, mut f: impl FnMut(&mut Row)) {
        for block in &mut self.blocks {
            let n = u16::from_le_bytes([block[0], block[1]]) as usize;
            for slot in 0..n {
                let off = BLOCK_HEADER_BYTES + slot * ROW_WIDTH;
                let rec = &mut block[off..off + ROW_WIDTH];
                let mut row = Row::decode(rec).expect("valid row");
                f(&mut row);
                row.encode(rec);
            }
        }
    }

    pub fn data_path(dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}.tbl"))
    }

    pub fn meta_path(dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}.meta"))
    }

    /// Writes `<name>.tbl` (blocks back to back) and the `<name>.meta` sidecar.
    ///
    /// The sidecar is a `key = value` text file:
    ///
    /// ```text
    /// format = 1
    /// name = test_normal
    /// page_size = 8192
    /// row_width = 50
    /// rows_per_block = 160
    /// row_count = 100000
    /// block_count = 625
    /// columns = empno,ename,sal,gender
    /// ```
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut data = fs::File::create(Self::data_path(dir, &self.name))?;
        for block in &self.blocks {
            data.write_all(block)?;
        }
        data.sync_all()?;
        let meta = format!(
            "# ixbench table metadata\nformat = {META_FORMAT}\nname = {}\npage_size = {}\n\
             row_width = {ROW_WIDTH}\nrows_per_block = {}\nrow_count = {}\nblock_count = {}\ncolumns = {}\n",
            self.name,
            self.page_size,
            self.rows_per_block,
            self.row_count,
            self.blocks.len(),
            self.schema.to_list()
        );
        fs::write(Self::meta_path(dir, &self.name), meta)?;
        Ok(())
    }

    pub fn load(dir: &Path, name: &str) -> Result<Table> {
        let meta_text = fs::read_to_string(Self::meta_path(dir, name)).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::Catalog(format!("no table `{name}` in {}", dir.display()))
            } else {
                Error::Io(e)
            }
        })?;
        let meta = parse_key_values(&meta_text)?;
        let get = |k: &str| meta.get(k).ok_or_else(|| Error::Format(format!("table metadata missing `{k}`")));
        let num = |k: &str| -> Result<u64> {
            get(k)?.parse().map_err(|_| Error::Format(format!("bad `{k}` in table metadata")))
        };
        if get("format")? != META_FORMAT {
            return Err(Error::Format("unsupported table metadata format".into()));
        }
        if num("row_width")? != ROW_WIDTH as u64 {
            return Err(Error::Format("row width mismatch".into()));
        }
        let page_size = num("page_size")? as usize;
        let mut table = create_table(get("name")?.clone(), Schema::parse_list(get("columns")?)?, page_size)?;
        if num("rows_per_block")? != table.rows_per_block as u64 {
            return Err(Error::Format("rows_per_block mismatch".into()));
        }
        let block_count = num("block_count")? as usize;
        let row_count = num("row_count")?;
        let mut data = fs::File::open(Self::data_path(dir, name))?;
        let mut blocks = Vec::with_capacity(block_count);
        let mut counted = 0u64;
        for _ in 0..block_count {
            let mut page = vec![0u8; page_size].into_boxed_slice();
            data.read_exact(&mut page)?;
            counted += u16::from_le_bytes([page[0], page[1]]) as u64;
            blocks.push(page);
        }
        if counted != row_count {
            return Err(Error::Format(format!("row count mismatch: metadata says {row_count}, blocks hold {counted}")));
        }
        table.blocks = blocks;
        table.row_count = row_count;
        Ok(table)
    }
}

/// Parses `key = value` lines, ignoring blanks and `#` comments.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Format(format!("line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Rows of one block, decoded on demand.
pub struct BlockRows<'a> {
    table: &'a Table,
    block: &'a [u8],
    block_no: u32,
    next: usize,
    len: usize,
}

impl BlockRows<'_> {
    pub fn block_no(&self) -> u32 {
        self.block_no
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl Iterator for BlockRows<'_> {
    type Item = (RowId, Row);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.len {
            return None;
        }
        let slot = self.next;
        self.next += 1;
        Some((RowId::new(self.block_no, slot as u16), self.table.decode_slot(self.block, slot)))
    }
}

pub struct TableScan<'a> {
    table: &'a Table,
    pool: &'a mut BufferPool,
    current: Option<BlockRows<'a>>,
    next_block: u32,
}

impl Iterator for TableScan<'_> {
    type Item = (RowId, Row);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(item) = self.current.as_mut().and_then(Iterator::next) {
                return Some(item);
            }
            if self.next_block >= self.table.block_count() {
                return None;
            }
            let b = self.next_block;
            self.next_block += 1;
            self.current = Some(self.table.read_block(self.pool, b).expect("block in range"));
        }
    }
}

//! Value-per-bitmap index.
//!
//! Every distinct non-null key owns one bitmap over row ordinals and NULLs
//! share a separate bitmap, so the bitmaps partition the table. Entries are
//! laid out back to back in key order (NULL entry last) inside the index
//! segment; a small branch directory above the entry blocks routes key
//! lookups. Each entry stores:
//!
//! ```text
//! row header (2) | key length (1) | key | start rowid (6) | end rowid (6)
//!   | bitmap length (varint) | encoded bitmap
//! ```

use std::borrow::Borrow;
use std::fmt;

use crate::bitmap::compressed::{varint_len, CompressedBitmap};
use crate::error::{Error, Result};
use crate::key_range::KeyRange;
use crate::storage::{BufferPool, Column, RowId, SegmentId, Table, Value};

/// Fixed segment header: column id, row count, rows per block, key count.
pub const BITMAP_INDEX_HEADER_BYTES: u64 = 64;
const ENTRY_FIXED_BYTES: u64 = 2 + 1 + 6 + 6;
/// Bytes per directory entry (separator key + block pointer).
const DIRECTORY_ENTRY_BYTES: usize = 16;

#[derive(Debug, Clone)]
struct Entry {
    key: Value,
    bitmap: CompressedBitmap,
    offset: u64,
    bytes: u64,
}

/// Branch levels above the entry blocks, lowest level first.
#[derive(Debug, Clone, Default)]
struct Directory {
    fanout: u64,
    level_nodes: Vec<u64>,
    first_block: u64,
}

impl Directory {
    fn new(leaf_blocks: u64, fanout: u64) -> Self {
        let mut level_nodes = Vec::new();
        let mut nodes = leaf_blocks;
        while nodes > 1 {
            nodes = nodes.div_ceil(fanout);
            level_nodes.push(nodes);
        }
        Directory { fanout, level_nodes, first_block: leaf_blocks }
    }

    fn levels(&self) -> usize {
        self.level_nodes.len()
    }

    fn blocks(&self) -> u64 {
        self.level_nodes.iter().sum()
    }

    /// Directory blocks visited from the root down to `leaf_block`.
    fn path(&self, leaf_block: u64) -> Vec<u32> {
        let mut base = self.first_block;
        let mut path = Vec::with_capacity(self.levels());
        let mut div = 1u64;
        for &nodes in &self.level_nodes {
            div *= self.fanout;
            path.push((base + leaf_block / div) as u32);
            base += nodes;
        }
        path.reverse();
        path
    }
}

pub struct BitmapIndex {
    name: String,
    table: String,
    column: Column,
    segment: SegmentId,
    page_size: u64,
    row_count: u64,
    rows_per_block: u64,
    entries: Vec<Entry>,
    null_entry: Entry,
    size_bytes: u64,
    segment_blocks: u64,
    directory: Directory,
}

impl fmt::Debug for BitmapIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitmapIndex")
            .field("name", &self.name)
            .field("column", &self.column)
            .field("keys", &self.entries.len())
            .field("size_bytes", &self.size_bytes)
            .field("segment_blocks", &self.segment_blocks)
            .finish()
    }
}

fn entry_bytes(key_len: usize, bitmap: &CompressedBitmap) -> u64 {
    let enc = bitmap.encoded_len() as u64;
    ENTRY_FIXED_BYTES + key_len as u64 + varint_len(enc) as u64 + enc
}

/// Builds a bitmap index on `column` of `table`.
pub fn build_bitmap_index(name: impl Into<String>, table: &Table, column: Column) -> Result<BitmapIndex> {
    table.schema().require(column)?;
    let n = table.row_count();
    let mut pairs: Vec<(Value, u64)> = Vec::with_capacity(n as usize);
    let mut nulls = Vec::new();
    for (ordinal, (_, row)) in table.rows().enumerate() {
        match row.value(column) {
            Some(v) => pairs.push((v, ordinal as u64)),
            None => nulls.push(ordinal as u64),
        }
    }
    // stable: ordinals stay ascending within a key
    pairs.sort_by(|a, b| a.0.cmp(&b.0));

    let page_size = table.page_size() as u64;
    let mut offset = BITMAP_INDEX_HEADER_BYTES;
    let mut entries = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let key = pairs[i].0.clone();
        let j = i + pairs[i..].partition_point(|p| p.0 == key);
        let bitmap = CompressedBitmap::from_sorted_positions(n, pairs[i..j].iter().map(|p| p.1))?;
        let bytes = entry_bytes(key.key_len(), &bitmap);
        entries.push(Entry { key, bitmap, offset, bytes });
        offset += bytes;
        i = j;
    }
    let null_bitmap = CompressedBitmap::from_sorted_positions(n, nulls)?;
    let null_bytes = if null_bitmap.count() > 0 { entry_bytes(0, &null_bitmap) } else { 0 };
    let null_entry = Entry { key: Value::Text(String::new()), bitmap: null_bitmap, offset, bytes: null_bytes };
    let size_bytes = offset + null_bytes;
    let segment_blocks = size_bytes.div_ceil(page_size);
    let fanout = (page_size as usize / DIRECTORY_ENTRY_BYTES).max(2) as u64;
    Ok(BitmapIndex {
        name: name.into(),
        table: table.name().to_string(),
        column,
        segment: SegmentId::fresh(),
        page_size,
        row_count: n,
        rows_per_block: table.rows_per_block() as u64,
        entries,
        null_entry,
        size_bytes,
        segment_blocks,
        directory: Directory::new(segment_blocks, fanout),
    })
}

impl BitmapIndex {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table_name(&self) -> &str {
        &self.table
    }

    pub fn column(&self) -> Column {
        self.column
    }

    pub fn segment(&self) -> SegmentId {
        self.segment
    }

    pub fn row_count(&self) -> u64 {
        self.row_count
    }

    pub fn distinct_keys(&self) -> usize {
        self.entries.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Value> {
        self.entries.iter().map(|e| &e.key)
    }

    /// `(key, bitmap)` pairs in key order, without touching the buffer pool.
    pub fn key_bitmaps(&self) -> impl Iterator<Item = (&Value, &CompressedBitmap)> {
        self.entries.iter().map(|e| (&e.key, &e.bitmap))
    }

    pub fn null_bitmap(&self) -> &CompressedBitmap {
        &self.null_entry.bitmap
    }

    /// Serialized size: segment header plus all entries.
    pub fn size_bytes(&self) -> u64 {
        self.size_bytes
    }

    /// Blocks holding index entries (`ceil(size / page_size)`).
    pub fn segment_blocks(&self) -> u64 {
        self.segment_blocks
    }

    /// Directory levels above the entry blocks.
    pub fn blevel(&self) -> u32 {
        self.directory.levels() as u32
    }

    pub fn directory_blocks(&self) -> u64 {
        self.directory.blocks()
    }

    /// Reported clustering factor; by convention the table's row count.
    pub fn clustering_factor(&self) -> u64 {
        self.row_count
    }

    fn block_of(&self, byte_offset: u64) -> u64 {
        (byte_offset / self.page_size).min(self.segment_blocks.saturating_sub(1))
    }

    /// Charges the directory path plus every entry block in `[first, last]`.
    fn charge(&self, pool: &mut BufferPool, first: u64, last: u64) {
        if self.segment_blocks == 0 {
            return;
        }
        for b in self.directory.path(first) {
            pool.access(self.segment, b);
        }
        for b in first..=last {
            pool.access(self.segment, b as u32);
        }
    }

    fn charge_entries(&self, pool: &mut BufferPool, from: &Entry, to: &Entry) {
        let first = self.block_of(from.offset);
        let last = self.block_of(to.offset + to.bytes.max(1) - 1);
        self.charge(pool, first, last);
    }

    /// Charges the single block a failed search lands on.
    fn charge_miss(&self, pool: &mut BufferPool, pos: usize) {
        let offset = self.entries.get(pos).map(|e| e.offset).unwrap_or(self.null_entry.offset.saturating_sub(1));
        let b = self.block_of(offset);
        self.charge(pool, b, b);
    }

    /// Bitmap of rows whose value equals `value`; all zeros for absent keys.
    pub fn lookup_eq(&self, pool: &mut BufferPool, value: &Value) -> CompressedBitmap {
        match self.entries.binary_search_by(|e| e.key.cmp(value)) {
            Ok(i) => {
                let e = &self.entries[i];
                self.charge_entries(pool, e, e);
                e.bitmap.clone()
            }
            Err(pos) => {
                self.charge_miss(pool, pos);
                CompressedBitmap::zeros(self.row_count)
            }
        }
    }

    /// Bitmap of rows where the column is NULL.
    pub fn lookup_null(&self, pool: &mut BufferPool) -> CompressedBitmap {
        let e = &self.null_entry;
        if e.bytes > 0 {
            self.charge_entries(pool, e, e);
        } else {
            self.charge_miss(pool, self.entries.len());
        }
        e.bitmap.clone()
    }

    /// OR of the bitmaps of all keys inside `range`.
    pub fn lookup_range(&self, pool: &mut BufferPool, range: &KeyRange) -> CompressedBitmap {
        if range.is_empty() {
            return CompressedBitmap::zeros(self.row_count);
        }
        let a = range.start_in(&self.entries, |e| &e.key);
        let b = range.end_in(&self.entries, |e| &e.key);
        if a >= b {
            self.charge_miss(pool, a);
            return CompressedBitmap::zeros(self.row_count);
        }
        self.charge_entries(pool, &self.entries[a], &self.entries[b - 1]);
        or_all(&self.entries[a..b].iter().map(|e| &e.bitmap).collect::<Vec<_>>(), self.row_count)
    }

    /// Converts set ordinals into row addresses, ascending.
    pub fn to_rowids(&self, bitmap: &CompressedBitmap) -> Result<Vec<RowId>> {
        if bitmap.len() != self.row_count {
            return Err(Error::Usage(format!(
                "bitmap of length {} does not match index `{}` over {} rows",
                bitmap.len(),
                self.name,
                self.row_count
            )));
        }
        let rpb = self.rows_per_block;
        Ok(bitmap.iter_ones().map(|o| RowId::new((o / rpb) as u32, (o % rpb) as u16)).collect())
    }
}

/// Balanced pairwise OR of many bitmaps of equal length.
pub fn or_all(bitmaps: &[&CompressedBitmap], len: u64) -> CompressedBitmap {
    fn or_pairs<B: Borrow<CompressedBitmap>>(items: &[B]) -> Vec<CompressedBitmap> {
        items
            .chunks(2)
            .map(|c| match c {
                [a, b] => a.borrow().or(b.borrow()).expect("equal lengths"),
                [a] => a.borrow().clone(),
                _ => unreachable!(),
            })
            .collect()
    }
    if bitmaps.is_empty() {
        return CompressedBitmap::zeros(len);
    }
    let mut level = or_pairs(bitmaps);
    while level.len() > 1 {
        level = or_pairs(&level);
    }
    level.pop().expect("one bitmap left")
}

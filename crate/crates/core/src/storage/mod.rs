//! Heap storage: row format, blocks, the metering buffer pool and data generators.

mod buffer_pool;
mod datagen;
mod row;
mod table;

pub use buffer_pool::{BufferPool, IoCounters, PoolSnapshot, SegmentId, SegmentIo, DEFAULT_POOL_BLOCKS};
pub use datagen::{
    assign_gender, gender_for, generate_normal, generate_random, GenderCounts, NORMAL_TABLE, RANDOM_TABLE,
};
pub use row::{Column, ColumnType, Gender, Row, RowId, Schema, Value, ENAME_LEN, ROW_WIDTH, SAL_MAX, SAL_MIN};
pub use table::{
    create_table, parse_key_values, rows_per_block, BlockRows, Table, TableScan, BLOCK_HEADER_BYTES, DEFAULT_PAGE_SIZE,
};

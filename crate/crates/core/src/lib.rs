//! Heap storage, bitmap and B-tree indexes, statistics, a cost-based planner
//! and an executor that meters every block access through a buffer pool.

pub mod bitmap;
pub mod btree;
pub mod database;
pub mod error;
pub mod executor;
pub mod index;
pub mod key_range;
pub mod planner;
pub mod stats;
pub mod storage;

pub use database::{Database, EngineConfig};
pub use error::{Error, Result};
pub use index::AnyIndex;
pub use key_range::KeyRange;

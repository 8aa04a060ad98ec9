//! Metering buffer pool.
//!
//! The pool does not copy page bytes; it tracks which `(segment, block)`
//! pairs are resident under LRU replacement and counts every access. Each
//! access is one consistent get, and a miss additionally counts one
//! physical read.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU32, Ordering};

use lru::LruCache;

use crate::error::{Error, Result};

pub const DEFAULT_POOL_BLOCKS: usize = 2000;

static NEXT_SEGMENT: AtomicU32 = AtomicU32::new(1);

/// Identifies a storage segment (a table heap or an index) in the buffer pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentId(u32);

impl SegmentId {
    /// Allocates a process-unique segment id.
    pub fn fresh() -> Self {
        SegmentId(NEXT_SEGMENT.fetch_add(1, Ordering::Relaxed))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seg#{}", self.0)
    }
}

/// Counters in the shape of an autotrace statistics block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IoCounters {
    pub consistent_gets: u64,
    pub physical_reads: u64,
    pub rows_processed: u64,
}

impl IoCounters {
    /// Counter growth since `earlier`.
    pub fn since(&self, earlier: &IoCounters) -> IoCounters {
        IoCounters {
            consistent_gets: self.consistent_gets - earlier.consistent_gets,
            physical_reads: self.physical_reads - earlier.physical_reads,
            rows_processed: self.rows_processed - earlier.rows_processed,
        }
    }
}

/// Per-segment access counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SegmentIo {
    pub consistent_gets: u64,
    pub physical_reads: u64,
}

impl SegmentIo {
    pub fn since(&self, earlier: &SegmentIo) -> SegmentIo {
        SegmentIo {
            consistent_gets: self.consistent_gets - earlier.consistent_gets,
            physical_reads: self.physical_reads - earlier.physical_reads,
        }
    }
}

/// Point-in-time copy of all pool counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PoolSnapshot {
    pub totals: IoCounters,
    pub segments: BTreeMap<SegmentId, SegmentIo>,
}

impl PoolSnapshot {
    /// Per-segment growth since `earlier`; segments with no activity are omitted.
    pub fn segments_since(&self, earlier: &PoolSnapshot) -> BTreeMap<SegmentId, SegmentIo> {
        self.segments
            .iter()
            .filter_map(|(id, now)| {
                let before = earlier.segments.get(id).copied().unwrap_or_default();
                let d = now.since(&before);
                (d != SegmentIo::default()).then_some((*id, d))
            })
            .collect()
    }
}

pub struct BufferPool {
    resident: LruCache<(SegmentId, u32), ()>,
    counters: IoCounters,
    segments: BTreeMap<SegmentId, SegmentIo>,
}

impl BufferPool {
    pub fn new(capacity_blocks: usize) -> Result<Self> {
        let cap = NonZeroUsize::new(capacity_blocks)
            .ok_or_else(|| Error::Config("buffer pool capacity must be positive".into()))?;
        Ok(BufferPool { resident: LruCache::new(cap), counters: IoCounters::default(), segments: BTreeMap::new() })
    }

    pub fn capacity(&self) -> usize {
        self.resident.cap().get()
    }

    pub fn resident_blocks(&self) -> usize {
        self.resident.len()
    }

    pub fn is_resident(&self, segment: SegmentId, block: u32) -> bool {
        self.resident.contains(&(segment, block))
    }

    /// Records one block access. Returns `true` on a cache hit.
    pub fn access(&mut self, segment: SegmentId, block: u32) -> bool {
        let hit = self.resident.get(&(segment, block)).is_some();
        let seg = self.segments.entry(segment).or_default();
        self.counters.consistent_gets += 1;
        seg.consistent_gets += 1;
        if !hit {
            self.counters.physical_reads += 1;
            seg.physical_reads += 1;
            self.resident.put((segment, block), ());
        }
        hit
    }

    pub fn add_rows(&mut self, rows: u64) {
        self.counters.rows_processed += rows;
    }

    pub fn reset_counters(&mut self) {
        self.counters = IoCounters::default();
        self.segments.clear();
    }

    /// Empties the resident set so the next access of every block is a miss.
    pub fn flush(&mut self) {
        self.resident.clear();
    }

    pub fn counters(&self) -> IoCounters {
        self.counters
    }

    pub fn segment_counters(&self, segment: SegmentId) -> SegmentIo {
        self.segments.get(&segment).copied().unwrap_or_default()
    }

    pub fn snapshot(&self) -> PoolSnapshot {
        PoolSnapshot { totals: self.counters, segments: self.segments.clone() }
    }
}

impl Default for BufferPool {
    fn default() -> Self {
        BufferPool::new(DEFAULT_POOL_BLOCKS).expect("non-zero default capacity")
    }
}

impl fmt::Debug for BufferPool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BufferPool")
            .field("capacity", &self.capacity())
            .field("resident", &self.resident.len())
            .field("counters", &self.counters)
            .finish_non_exhaustive()
    }
}

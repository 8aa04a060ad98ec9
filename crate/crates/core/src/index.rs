use crate::bitmap::BitmapIndex;
use crate::btree::BTreeIndex;
use crate::stats::{IndexKind, IndexStats};
use crate::storage::{Column, SegmentId};

/// Either kind of secondary index.
#[derive(Debug)]
pub enum AnyIndex {
    Bitmap(BitmapIndex),
    BTree(BTreeIndex),
}

impl AnyIndex {
    pub fn name(&self) -> &str {
        match self {
            AnyIndex::Bitmap(i) => i.name(),
            AnyIndex::BTree(i) => i.name(),
        }
    }

    pub fn table_name(&self) -> &str {
        match self {
            AnyIndex::Bitmap(i) => i.table_name(),
            AnyIndex::BTree(i) => i.table_name(),
        }
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            AnyIndex::Bitmap(_) => IndexKind::Bitmap,
            AnyIndex::BTree(_) => IndexKind::BTree,
        }
    }

    pub fn column(&self) -> Column {
        match self {
            AnyIndex::Bitmap(i) => i.column(),
            AnyIndex::BTree(i) => i.column(),
        }
    }

    pub fn segment(&self) -> SegmentId {
        match self {
            AnyIndex::Bitmap(i) => i.segment(),
            AnyIndex::BTree(i) => i.segment(),
        }
    }

    pub fn size_bytes(&self) -> u64 {
        match self {
            AnyIndex::Bitmap(i) => i.size_bytes(),
            AnyIndex::BTree(i) => i.size_bytes(),
        }
    }

    pub fn stats(&self) -> IndexStats {
        match self {
            AnyIndex::Bitmap(i) => IndexStats::of_bitmap(i),
            AnyIndex::BTree(i) => IndexStats::of_btree(i),
        }
    }

    pub fn as_bitmap(&self) -> Option<&BitmapIndex> {
        match self {
            AnyIndex::Bitmap(i) => Some(i),
            AnyIndex::BTree(_) => None,
        }
    }

    pub fn as_btree(&self) -> Option<&BTreeIndex> {
        match self {
            AnyIndex::BTree(i) => Some(i),
            AnyIndex::Bitmap(_) => None,
        }
    }
}

impl From<BitmapIndex> for AnyIndex {
    fn from(i: BitmapIndex) -> Self {
        AnyIndex::Bitmap(i)
    }
}

impl From<BTreeIndex> for AnyIndex {
    fn from(i: BTreeIndex) -> Self {
        AnyIndex::BTree(i)
    }
}

//! Bitmap indexes over RLE-compressed bit vectors.

mod compressed;
mod index;

pub use compressed::{BitmapBuilder, CompressedBitmap};
pub use index::{build_bitmap_index, or_all, BitmapIndex, BITMAP_INDEX_HEADER_BYTES};

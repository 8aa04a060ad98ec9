//! Run-length compressed bit vectors.
//!
//! In memory a bitmap is a list of alternating runs: the first run carries
//! `first`, the next one `!first`, and so on. Runs are never empty. Boolean
//! operators walk the run lists of both operands in lock step, so their cost
//! is proportional to the number of runs rather than the number of bits.
//!
//! On disk (and for size accounting) a bitmap is stored in a byte-aligned
//! code: the bit vector is cut into bytes, runs of `0x00` / `0xFF` bytes
//! become fill tokens and everything else is copied as literal bytes.
//!
//! ```text
//! token header: kk cccccc
//!   kk = 00 zero fill, 01 one fill, 10 literal
//!   cccccc = byte count; 63 means "63 + LEB128 varint that follows"
//! literal tokens are followed by `count` raw bytes (bit i of the vector is
//! bit (i % 8) of byte i / 8, least significant first)
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CompressedBitmap {
    len: u64,
    first: bool,
    runs: Vec<u64>,
    popcount: u64,
}

impl fmt::Debug for CompressedBitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "CompressedBitmap({})", self.to_bit_string())
        } else {
            f.debug_struct("CompressedBitmap")
                .field("len", &self.len)
                .field("runs", &self.runs.len())
                .field("popcount", &self.popcount)
                .finish()
        }
    }
}

/// Incremental run builder; merges adjacent runs of the same bit.
#[derive(Debug, Default)]
pub struct BitmapBuilder {
    len: u64,
    first: bool,
    runs: Vec<u64>,
    last_bit: bool,
    popcount: u64,
}

impl BitmapBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_run(&mut self, bit: bool, n: u64) {
        if n == 0 {
            return;
        }
        if self.runs.is_empty() {
            self.first = bit;
            self.runs.push(n);
        } else if self.last_bit == bit {
            *self.runs.last_mut().expect("non-empty") += n;
        } else {
            self.runs.push(n);
        }
        self.last_bit = bit;
        self.len += n;
        if bit {
            self.popcount += n;
        }
    }

    pub fn push(&mut self, bit: bool) {
        self.push_run(bit, 1);
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn finish(self) -> CompressedBitmap {
        CompressedBitmap {
            len: self.len,
            first: if self.runs.is_empty() { false } else { self.first },
            runs: self.runs,
            popcount: self.popcount,
        }
    }
}

impl CompressedBitmap {
    pub fn zeros(len: u64) -> Self {
        let mut b = BitmapBuilder::new();
        b.push_run(false, len);
        b.finish()
    }

    pub fn ones(len: u64) -> Self {
        let mut b = BitmapBuilder::new();
        b.push_run(true, len);
        b.finish()
    }

    /// Builds a bitmap of `len` bits with the given strictly increasing
    /// positions set.
    pub fn from_sorted_positions<I>(len: u64, positions: I) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut b = BitmapBuilder::new();
        let mut next = 0u64;
        for p in positions {
            if p < next || p >= len {
                return Err(Error::Usage(format!("bit position {p} is out of order or beyond length {len}")));
            }
            b.push_run(false, p - next);
            b.push(true);
            next = p + 1;
        }
        b.push_run(false, len - next);
        Ok(b.finish())
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = BitmapBuilder::new();
        for &bit in bits {
            b.push(bit);
        }
        b.finish()
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of set bits.
    pub fn count(&self) -> u64 {
        self.popcount
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// `(bit, length)` for each run, in order.
    pub fn runs(&self) -> impl Iterator<Item = (bool, u64)> + '_ {
        let first = self.first;
        self.runs.iter().enumerate().map(move |(i, &n)| (first ^ (i % 2 == 1), n))
    }

    pub fn get(&self, pos: u64) -> bool {
        let mut start = 0;
        for (bit, n) in self.runs() {
            if pos < start + n {
                return bit;
            }
            start += n;
        }
        false
    }

    /// Positions of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        let mut start = 0u64;
        self.runs().flat_map(move |(bit, n)| {
            let s = start;
            start += n;
            if bit {
                s..s + n
            } else {
                s..s
            }
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.len as usize);
        for (bit, n) in self.runs() {
            out.extend(std::iter::repeat_n(bit, n as usize));
        }
        out
    }

    /// `0`/`1` rendering, bit 0 first.
    pub fn to_bit_string(&self) -> String {
        self.to_bools().into_iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Usage(format!("bitmap length mismatch: {} vs {}", self.len, other.len)));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.check_len(other)?;
        let mut out = BitmapBuilder::new();
        let mut a = self.runs();
        let mut b = other.runs();
        let mut ra = a.next();
        let mut rb = b.next();
        while let (Some((abit, alen)), Some((bbit, blen))) = (ra, rb) {
            let n = alen.min(blen);
            out.push_run(op(abit, bbit), n);
            ra = if alen > n { Some((abit, alen - n)) } else { a.next() };
            rb = if blen > n { Some((bbit, blen - n)) } else { b.next() };
        }
        Ok(out.finish())
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x && y)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x || y)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x ^ y)
    }

    pub fn not(&self) -> Self {
        CompressedBitmap {
            len: self.len,
            first: if self.runs.is_empty() { false } else { !self.first },
            runs: self.runs.clone(),
            popcount: self.len - self.popcount,
        }
    }

    /// Byte-aligned encoding of the bit vector (the length is stored separately).
    pub fn encode(&self) -> Vec<u8> {
        let mut w = TokenWriter::default();
        let nbytes = self.len.div_ceil(8);
        let runs: Vec<(bool, u64, u64)> = {
            let mut start = 0;
            self.runs()
                .map(|(bit, n)| {
                    let r = (bit, start, start + n);
                    start += n;
                    r
                })
                .collect()
        };
        let mut ri = 0usize;
        let mut byte = 0u64;
        while byte < nbytes {
            let bit_start = byte * 8;
            while runs[ri].2 <= bit_start {
                ri += 1;
            }
            let (bit, _, end) = runs[ri];
            let whole = (end - bit_start) / 8;
            if whole > 0 {
                w.fill(bit, whole);
                byte += whole;
                continue;
            }
            // byte straddles runs (or is the padded tail)
            let mut value = 0u8;
            let limit = (bit_start + 8).min(self.len);
            let mut j = ri;
            while j < runs.len() && runs[j].1 < limit {
                let (b, s, e) = runs[j];
                if b {
                    for p in s.max(bit_start)..e.min(limit) {
                        value |= 1 << (p - bit_start);
                    }
                }
                j += 1;
            }
            w.literal(value);
            byte += 1;
        }
        w.finish()
    }

    /// Serialized size in bytes of [`CompressedBitmap::encode`].
    pub fn encoded_len(&self) -> usize {
        self.encode().len()
    }

    pub fn decode(bytes: &[u8], len: u64) -> Result<Self> {
        let mut b = BitmapBuilder::new();
        let mut i = 0usize;
        let bad = || Error::Format("truncated bitmap encoding".into());
        while i < bytes.len() {
            let header = bytes[i];
            i += 1;
            let mut count = (header & 0x3f) as u64;
            if count == 63 {
                let (extra, used) = read_varint(&bytes[i..]).ok_or_else(bad)?;
                count += extra;
                i += used;
            }
            match header >> 6 {
                0 => b.push_run(false, count * 8),
                1 => b.push_run(true, count * 8),
                2 => {
                    let end = i + count as usize;
                    let lits = bytes.get(i..end).ok_or_else(bad)?;
                    for &v in lits {
                        for k in 0..8 {
                            b.push(v & (1 << k) != 0);
                        }
                    }
                    i = end;
                }
                _ => return Err(Error::Format("bad bitmap token".into())),
            }
        }
        let mut full = b.finish();
        if full.len != len.div_ceil(8) * 8 {
            return Err(Error::Format(format!("bitmap encodes {} bits, expected {len}", full.len)));
        }
        full.truncate(len);
        Ok(full)
    }

    fn truncate(&mut self, len: u64) {
        if len >= self.len {
            return;
        }
        let mut b = BitmapBuilder::new();
        let mut left = len;
        for (bit, n) in self.runs() {
            if left == 0 {
                break;
            }
            let take = n.min(left);
            b.push_run(bit, take);
            left -= take;
        }
        *self = b.finish();
    }
}

#[derive(Default)]
struct TokenWriter {
    out: Vec<u8>,
    pending_fill: Option<(bool, u64)>,
    literals: Vec<u8>,
}

impl TokenWriter {
    fn fill(&mut self, bit: bool, n: u64) {
        self.flush_literals();
        match &mut self.pending_fill {
            Some((b, count)) if *b == bit => *count += n,
            _ => {
                self.flush_fill();
                self.pending_fill = Some((bit, n));
            }
        }
    }

    fn literal(&mut self, v: u8) {
        match v {
            0x00 => self.fill(false, 1),
            0xff => self.fill(true, 1),
            _ => {
                self.flush_fill();
                self.literals.push(v);
            }
        }
    }

    fn header(&mut self, kind: u8, count: u64) {
        if count < 63 {
            self.out.push(kind << 6 | count as u8);
        } else {
            self.out.push(kind << 6 | 63);
            write_varint(&mut self.out, count - 63);
        }
    }

    fn flush_fill(&mut self) {
        if let Some((bit, n)) = self.pending_fill.take() {
            self.header(u8::from(bit), n);
        }
    }

    fn flush_literals(&mut self) {
        if !self.literals.is_empty() {
            let lits = std::mem::take(&mut self.literals);
            self.header(2, lits.len() as u64);
            self.out.extend_from_slice(&lits);
        }
    }

    fn finish(mut self) -> Vec<u8> {
        self.flush_fill();
        self.flush_literals();
        self.out
    }
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

pub(crate) fn varint_len(v: u64) -> usize {
    let bits = 64 - v.leading_zeros() as usize;
    bits.div_ceil(7).max(1)
}

fn read_varint(bytes: &[u8]) -> Option<(u64, usize)> {
    let mut v = 0u64;
    for (i, &b) in bytes.iter().enumerate().take(10) {
        v |= ((b & 0x7f) as u64) << (7 * i);
        if b & 0x80 == 0 {
            return Some((v, i + 1));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> CompressedBitmap {
        CompressedBitmap::from_bools(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    #[test]
    fn runs_are_canonical() {
        let b = bits("0001100000111");
        assert_eq!(b.runs().collect::<Vec<_>>(), vec![(false, 3), (true, 2), (false, 5), (true, 3)]);
        assert_eq!(b.count(), 5);
        assert_eq!(b.len(), 13);
    }

    #[test]
    fn operators() {
        let a = bits("000100110");
        let b = bits("010001000");
        assert_eq!(a.or(&b).unwrap().to_bit_string(), "010101110");
        assert_eq!(a.and(&b).unwrap().count(), 0);
        assert_eq!(a.xor(&b).unwrap().to_bit_string(), "010101110");
        assert_eq!(a.not().to_bit_string(), "111011001");
        assert!(matches!(a.and(&bits("01")), Err(Error::Usage(_))));
    }

    #[test]
    fn empty_bitmap() {
        let e = CompressedBitmap::zeros(0);
        assert_eq!(e.count(), 0);
        assert_eq!(e.not().count(), 0);
        assert!(e.encode().is_empty());
        assert_eq!(CompressedBitmap::decode(&[], 0).unwrap(), e);
    }

    #[test]
    fn compression_shape() {
        // one contiguous range: constant runs
        let contiguous = CompressedBitmap::from_sorted_positions(100_000, 40_000..60_000).unwrap();
        assert_eq!(contiguous.run_count(), 3);
        assert!(contiguous.encoded_len() < 16);
        // k isolated bits: O(k) runs
        let sparse = CompressedBitmap::from_sorted_positions(100_000, (0..1000).map(|i| i * 97 + 5)).unwrap();
        assert_eq!(sparse.run_count(), 2 * 1000 + 1);
    }

    #[test]
    fn single_bit_encoding_is_small() {
        let b = CompressedBitmap::from_sorted_positions(1_000_000, [654_321]).unwrap();
        // zero fill + one literal + zero fill
        assert!(b.encoded_len() <= 10, "{}", b.encoded_len());
        assert_eq!(CompressedBitmap::decode(&b.encode(), 1_000_000).unwrap(), b);
    }

    #[test]
    fn rejects_unordered_positions() {
        assert!(CompressedBitmap::from_sorted_positions(10, [3, 2]).is_err());
        assert!(CompressedBitmap::from_sorted_positions(10, [10]).is_err());
    }

    #[test]
    fn varint_lengths() {
        for v in [0u64, 1, 127, 128, 16_383, 16_384, u64::MAX] {
            let mut buf = Vec::new();
            write_varint(&mut buf, v);
            assert_eq!(buf.len(), varint_len(v));
            assert_eq!(read_varint(&buf), Some((v, buf.len())));
        }
    }

    fn arb_bools() -> impl Strategy<Value = Vec<bool>> {
        prop_oneof![
            proptest::collection::vec(any::<bool>(), 0..300),
            // long runs to exercise fill tokens
            proptest::collection::vec((any::<bool>(), 1usize..200), 0..20)
                .prop_map(|runs| { runs.into_iter().flat_map(|(b, n)| std::iter::repeat_n(b, n)).collect() }),
        ]
    }

    proptest! {
        #[test]
        fn algebra_matches_bool_arrays(pair in (1usize..400).prop_flat_map(|n| (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(prop_oneof![Just(false), Just(true), Just(false)], n),
        ))) {
            let (x, y) = pair;
            let a = CompressedBitmap::from_bools(&x);
            let b = CompressedBitmap::from_bools(&y);
            let and: Vec<bool> = x.iter().zip(&y).map(|(p, q)| *p && *q).collect();
            let or: Vec<bool> = x.iter().zip(&y).map(|(p, q)| *p || *q).collect();
            let xor: Vec<bool> = x.iter().zip(&y).map(|(p, q)| p ^ q).collect();
            let not: Vec<bool> = x.iter().map(|p| !p).collect();
            prop_assert_eq!(a.and(&b).unwrap().to_bools(), and);
            prop_assert_eq!(a.or(&b).unwrap().to_bools(), or);
            prop_assert_eq!(a.xor(&b).unwrap().to_bools(), xor);
            prop_assert_eq!(a.not().to_bools(), not);
            prop_assert_eq!(a.count() as usize, x.iter().filter(|b| **b).count());
            prop_assert_eq!(a.not().not(), a);
        }

        #[test]
        fn runs_invariant(x in arb_bools()) {
            let a = CompressedBitmap::from_bools(&x);
            let runs: Vec<_> = a.runs().collect();
            prop_assert_eq!(runs.iter().map(|r| r.1).sum::<u64>(), x.len() as u64);
            prop_assert!(runs.iter().all(|r| r.1 > 0));
            prop_assert!(runs.windows(2).all(|w| w[0].0 != w[1].0));
            prop_assert_eq!(a.iter_ones().collect::<Vec<_>>(),
                x.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u64).collect::<Vec<_>>());
        }

        #[test]
        fn encoding_round_trips(x in arb_bools()) {
            let a = CompressedBitmap::from_bools(&x);
            let back = CompressedBitmap::decode(&a.encode(), a.len()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}

//! Fixed-width bit strings: the value space of oracle outputs and element codecs.
//!
//! A [`Bits`] is a canonical `len`-bit value stored little-endian in bytes.
//! Bits beyond `len` are always zero, so equality and hashing work on the
//! raw storage.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    len: u32,
    bytes: Vec<u8>,
}

impl Bits {
    /// The all-zero string of `len` bits.
    pub fn zero(len: u32) -> Self {
        Bits {
            len,
            bytes: vec![0u8; Self::nbytes(len)],
        }
    }

    fn nbytes(len: u32) -> usize {
        ((len as usize) + 7) / 8
    }

    /// Build from raw bytes, truncating/masking to `len` bits.
    pub fn from_bytes(len: u32, src: &[u8]) -> Self {
        let mut bytes = vec![0u8; Self::nbytes(len)];
        let n = bytes.len().min(src.len());
        bytes[..n].copy_from_slice(&src[..n]);
        let mut b = Bits { len, bytes };
        b.mask_top();
        b
    }

    pub fn from_u64(len: u32, v: u64) -> Self {
        debug_assert!(len >= 64 || v < (1u64 << len), "value overflows width");
        Self::from_bytes(len, &v.to_le_bytes())
    }

    pub fn from_u128(len: u32, v: u128) -> Self {
        Self::from_bytes(len, &v.to_le_bytes())
    }

    fn mask_top(&mut self) {
        let rem = (self.len % 8) as u8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= (1u8 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit(&self, i: u32) -> bool {
        debug_assert!(i < self.len);
        (self.bytes[(i / 8) as usize] >> (i % 8)) & 1 == 1
    }

    pub fn set_bit(&mut self, i: u32, v: bool) {
        debug_assert!(i < self.len);
        let byte = &mut self.bytes[(i / 8) as usize];
        if v {
            *byte |= 1 << (i % 8);
        } else {
            *byte &= !(1 << (i % 8));
        }
    }

    /// Value as u64; width must be at most 64.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        let mut buf = [0u8; 8];
        let n = self.bytes.len().min(8);
        buf[..n].copy_from_slice(&self.bytes[..n]);
        u64::from_le_bytes(buf)
    }

    /// Value as u128; width must be at most 128.
    pub fn to_u128(&self) -> u128 {
        debug_assert!(self.len <= 128);
        let mut buf = [0u8; 16];
        let n = self.bytes.len().min(16);
        buf[..n].copy_from_slice(&self.bytes[..n]);
        u128::from_le_bytes(buf)
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len, "width mismatch in xor");
        let bytes = self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| a ^ b)
            .collect();
        Bits {
            len: self.len,
            bytes,
        }
    }

    /// Concatenate: `self` occupies the low bits, `hi` the high bits.
    pub fn concat(&self, hi: &Bits) -> Bits {
        let mut out = Bits::zero(self.len + hi.len);
        for i in 0..self.len {
            out.set_bit(i, self.bit(i));
        }
        for i in 0..hi.len {
            out.set_bit(self.len + i, hi.bit(i));
        }
        out
    }

    /// Extract bits [lo, lo+len) as a new string.
    pub fn slice(&self, lo: u32, len: u32) -> Bits {
        debug_assert!(lo + len <= self.len);
        let mut out = Bits::zero(len);
        for i in 0..len {
            out.set_bit(i, self.bit(lo + i));
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // MSB-first rendering, matching how numbers read.
        let mut s = String::with_capacity(self.len as usize);
        for i in (0..self.len).rev() {
            s.push(if self.bit(i) { '1' } else { '0' });
        }
        write!(f, "Bits<{}>({})", self.len, s)
    }
}

/// Incremental writer used by the element codecs to pack multi-field ranks.
pub struct BitWriter {
    bits: Bits,
    pos: u32,
}

impl BitWriter {
    pub fn new(total_len: u32) -> Self {
        BitWriter {
            bits: Bits::zero(total_len),
            pos: 0,
        }
    }

    pub fn push(&mut self, width: u32, value: u128) {
        debug_assert!(width == 128 || value < (1u128 << width));
        for i in 0..width {
            self.bits.set_bit(self.pos + i, (value >> i) & 1 == 1);
        }
        self.pos += width;
    }

    pub fn finish(self) -> Bits {
        debug_assert_eq!(self.pos, self.bits.len(), "writer underfilled");
        self.bits
    }
}

/// Matching reader for decode paths.
pub struct BitReader<'a> {
    bits: &'a Bits,
    pos: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a Bits) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn take(&mut self, width: u32) -> u128 {
        let mut v = 0u128;
        for i in 0..width {
            if self.bits.bit(self.pos + i) {
                v |= 1u128 << i;
            }
        }
        self.pos += width;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_masking() {
        let b = Bits::from_u64(5, 0b10110);
        assert_eq!(b.to_u64(), 0b10110);
        assert_eq!(b.len(), 5);
        // A value packed from oversized bytes is masked down.
        let c = Bits::from_bytes(5, &[0xff]);
        assert_eq!(c.to_u64(), 0b11111);
    }

    #[test]
    fn concat_slice_inverse() {
        let lo = Bits::from_u64(7, 0x55);
        let hi = Bits::from_u64(9, 0x1ab);
        let joined = lo.concat(&hi);
        assert_eq!(joined.len(), 16);
        assert_eq!(joined.slice(0, 7), lo);
        assert_eq!(joined.slice(7, 9), hi);
    }

    #[test]
    fn writer_reader_roundtrip() {
        let mut w = BitWriter::new(23);
        w.push(11, 1234);
        w.push(12, 4000);
        let bits = w.finish();
        let mut r = BitReader::new(&bits);
        assert_eq!(r.take(11), 1234);
        assert_eq!(r.take(12), 4000);
    }
}

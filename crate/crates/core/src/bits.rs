//! Packed binary vectors over GF(2).

use std::fmt;

use crate::error::{Error, Result};

/// A fixed-length vector over GF(2), packed 64 bits per word.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Unused high bits of
/// the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinaryVector {
    words: Vec<u64>,
    len: usize,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Builds a vector from a slice of 0/1 values. Any other value is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => v.set(i, true),
                other => {
                    return Err(Error::Argument(format!(
                        "bit {i} has value {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Low `len` bits of `word`, bit `i` of the integer becoming element `i`.
    pub fn from_u64(word: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == 64 { word } else { word & ((1u64 << len) - 1) };
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn xor_assign(&mut self, other: &BinaryVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BinaryVector) -> BinaryVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Number of positions where `self` and `other` differ.
    pub fn distance(&self, other: &BinaryVector) -> usize {
        assert_eq!(self.len, other.len, "length mismatch in distance");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Copies `self` into `out` starting at bit `offset`.
    pub fn write_into(&self, out: &mut BinaryVector, offset: usize) {
        for i in 0..self.len {
            out.set(offset + i, self.get(i));
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> BinaryVector {
        BinaryVector::from_bools((start..start + len).map(|i| self.get(i)))
    }

    pub fn concat(parts: &[BinaryVector]) -> BinaryVector {
        let total = parts.iter().map(BinaryVector::len).sum();
        let mut out = BinaryVector::zeros(total);
        let mut offset = 0;
        for p in parts {
            p.write_into(&mut out, offset);
            offset += p.len();
        }
        out
    }

    /// Hex encoding, element 0 as the most significant bit of the first
    /// nibble, zero-padded to a multiple of four bits.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for n in 0..nibbles {
            let mut val = 0u8;
            for b in 0..4 {
                let i = 4 * n + b;
                val <<= 1;
                if i < self.len && self.get(i) {
                    val |= 1;
                }
            }
            s.push(char::from_digit(u32::from(val), 16).unwrap());
        }
        s
    }

    /// Inverse of [`to_hex`](Self::to_hex) for a vector of `len` bits.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Argument(format!(
                "hex string has {} digits, expected {} for {} bits",
                hex.len(),
                len.div_ceil(4),
                len
            )));
        }
        let mut v = Self::zeros(len);
        for (n, c) in hex.chars().enumerate() {
            let val = c
                .to_digit(16)
                .ok_or_else(|| Error::Argument(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                let i = 4 * n + b;
                let bit = (val >> (3 - b)) & 1 == 1;
                if i < len {
                    v.set(i, bit);
                } else if bit {
                    return Err(Error::Argument("nonzero padding bits in hex".into()));
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector(")?;
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        write!(f, ")")
    }
}

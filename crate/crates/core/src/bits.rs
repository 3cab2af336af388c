//! Packed bit strings.
//!
//! Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` in the
//! last word are always zero, so weight and equality can work on whole words.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length sequence of bits stored in 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitString {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        s.clear_tail();
        s
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            words: Vec::with_capacity(words_for(bits)),
            len: 0,
        }
    }

    /// Builds a string from raw words; bits beyond `len` are masked off.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(words_for(len), 0);
        let mut s = BitString { words, len };
        s.clear_tail();
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i, true);
            }
        }
        s
    }

    /// Parses a string of `'0'`/`'1'` characters, first character is bit 0.
    pub fn from_bit_str(bits: &str) -> Result<Self, Error> {
        let mut s = Self::zeros(bits.len());
        for (i, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => s.set(i, true),
                _ => return Err(Error::Parse(alloc::format!("invalid bit character {c:?}"))),
            }
        }
        Ok(s)
    }

    /// Indicator vector of `positions`.
    pub fn from_support(len: usize, positions: &[usize]) -> Result<Self, Error> {
        let mut s = Self::zeros(len);
        for &p in positions {
            if p >= len {
                return Err(Error::Domain(alloc::format!(
                    "support index {p} out of range for length {len}"
                )));
            }
            s.set(p, true);
        }
        Ok(s)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range ({})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range ({})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range ({})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        if value {
            self.set(self.len - 1, true);
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.weight()
    }

    /// Hamming distance. Panics on length mismatch.
    pub fn distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &BitString) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// XOR of the bits at `positions`.
    pub fn parity_at(&self, positions: &[usize]) -> bool {
        positions.iter().fold(false, |acc, &p| acc ^ self.get(p))
    }

    pub fn complement(&self) -> BitString {
        let mut out = BitString {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_tail();
        out
    }

    /// Positions of the one bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Copy of bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitString::zeros(len);
        if start.is_multiple_of(WORD) {
            let first = start / WORD;
            out.words
                .copy_from_slice(&self.words[first..first + words_for(len)]);
            out.clear_tail();
            return out;
        }
        let shift = start % WORD;
        for (k, dst) in out.words.iter_mut().enumerate() {
            let wi = start / WORD + k;
            let lo = self.words[wi] >> shift;
            let hi = self.words.get(wi + 1).map_or(0, |w| w << (WORD - shift));
            *dst = lo | hi;
        }
        out.clear_tail();
        out
    }

    /// Appends all bits of `other`.
    pub fn extend(&mut self, other: &BitString) {
        if self.len.is_multiple_of(WORD) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        let shift = self.len % WORD;
        let new_len = self.len + other.len;
        self.words.resize(words_for(new_len), 0);
        let base = self.len / WORD;
        for (k, &w) in other.words.iter().enumerate() {
            self.words[base + k] |= w << shift;
            if let Some(next) = self.words.get_mut(base + k + 1) {
                *next |= w >> (WORD - shift);
            }
        }
        self.len = new_len;
        self.clear_tail();
    }

    pub fn concat(parts: &[BitString]) -> BitString {
        let total = parts.iter().map(BitString::len).sum();
        let mut out = BitString::with_capacity(total);
        for p in parts {
            out.extend(p);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Lowercase hex, most significant bit first within each byte. Bit `8j`
    /// is the top bit of byte `j`; trailing pad bits are zero.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let nbytes = self.len.div_ceil(8);
        let mut out = String::with_capacity(2 * nbytes);
        for j in 0..nbytes {
            let mut byte = 0u8;
            for b in 0..8 {
                let i = 8 * j + b;
                if i < self.len && self.get(i) {
                    byte |= 0x80 >> b;
                }
            }
            out.push(DIGITS[(byte >> 4) as usize] as char);
            out.push(DIGITS[(byte & 0xf) as usize] as char);
        }
        out
    }

    /// Inverse of [`BitString::to_hex`]. Pad bits past `len` must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self, Error> {
        let nbytes = len.div_ceil(8);
        if hex.len() != 2 * nbytes {
            return Err(Error::Parse(alloc::format!(
                "expected {} hex digits for {len} bits, found {}",
                2 * nbytes,
                hex.len()
            )));
        }
        let digit = |c: u8| -> Result<u8, Error> {
            match c {
                b'0'..=b'9' => Ok(c - b'0'),
                b'a'..=b'f' => Ok(c - b'a' + 10),
                b'A'..=b'F' => Ok(c - b'A' + 10),
                _ => Err(Error::Parse(alloc::format!(
                    "invalid hex digit {:?}",
                    c as char
                ))),
            }
        };
        let raw = hex.as_bytes();
        let mut s = BitString::zeros(len);
        for j in 0..nbytes {
            let byte = (digit(raw[2 * j])? << 4) | digit(raw[2 * j + 1])?;
            for b in 0..8 {
                if byte & (0x80 >> b) == 0 {
                    continue;
                }
                let i = 8 * j + b;
                if i >= len {
                    return Err(Error::Parse("nonzero padding bits".into()));
                }
                s.set(i, true);
            }
        }
        Ok(s)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString(")?;
            for b in self.iter() {
                f.write_str(if b { "1" } else { "0" })?;
            }
            write!(f, ")")
        } else {
            write!(f, "BitString(len={}, weight={})", self.len, self.weight())
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ones_and_zeros() {
        assert_eq!(BitString::zeros(70).weight(), 0);
        assert_eq!(BitString::ones(70).weight(), 70);
        assert_eq!(BitString::ones(70).complement(), BitString::zeros(70));
    }

    #[test]
    fn hex_is_msb_first() {
        let s = BitString::from_bit_str("10000000").unwrap();
        assert_eq!(s.to_hex(), "80");
        let s = BitString::from_bit_str("0000000101").unwrap();
        assert_eq!(s.to_hex(), "0140");
        assert_eq!(BitString::from_hex("0140", 10).unwrap(), s);
        assert!(BitString::from_hex("0141", 10).is_err());
        assert!(BitString::from_hex("01", 10).is_err());
        assert_eq!(BitString::zeros(0).to_hex(), "");
    }

    #[test]
    fn slice_and_extend_cross_words() {
        let s = BitString::from_bools(&(0..200).map(|i| i % 3 == 0).collect::<Vec<_>>());
        let a = s.slice(0, 70);
        let b = s.slice(70, 130);
        assert_eq!(BitString::concat(&[a, b]), s);
        let mid = s.slice(5, 64);
        for i in 0..64 {
            assert_eq!(mid.get(i), s.get(i + 5));
        }
    }

    #[test]
    fn dot_and_parity() {
        let a = BitString::from_bit_str("1101").unwrap();
        let b = BitString::from_bit_str("1001").unwrap();
        assert!(!a.dot(&b));
        assert!(!a.parity_at(&[0, 1, 2]));
        assert!(a.parity_at(&[0, 1, 3]));
        assert_eq!(a.support(), vec![0, 1, 3]);
    }

    fn arb_bits() -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), 0..300)
    }

    proptest! {
        #[test]
        fn hex_round_trip(bits in arb_bits()) {
            let s = BitString::from_bools(&bits);
            prop_assert_eq!(BitString::from_hex(&s.to_hex(), s.len()).unwrap(), s);
        }

        #[test]
        fn weight_matches_bits(bits in arb_bits()) {
            let s = BitString::from_bools(&bits);
            prop_assert_eq!(s.weight(), bits.iter().filter(|b| **b).count());
            prop_assert_eq!(s.support().len(), s.weight());
        }

        #[test]
        fn distance_is_weight_of_xor(a in arb_bits(), seed in any::<u64>()) {
            let b: Vec<bool> = a.iter().enumerate()
                .map(|(i, x)| x ^ ((seed >> (i % 64)) & 1 == 1)).collect();
            let (sa, sb) = (BitString::from_bools(&a), BitString::from_bools(&b));
            prop_assert_eq!(sa.distance(&sb), sa.xor(&sb).weight());
        }

        #[test]
        fn push_matches_from_bools(bits in arb_bits()) {
            let mut s = BitString::default();
            for &b in &bits { s.push(b); }
            prop_assert_eq!(s, BitString::from_bools(&bits));
        }
    }
}

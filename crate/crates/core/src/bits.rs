//! Fixed-size bit array with a lazily built rank directory.

use std::sync::OnceLock;

/// Words per rank block.
const BLOCK_WORDS: usize = 8;

#[derive(Debug, Default)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: u64,
    /// `rank[i]` is the number of set bits in words `[0, i * BLOCK_WORDS)`.
    rank: OnceLock<Vec<u64>>,
}

impl Clone for Bits {
    fn clone(&self) -> Self {
        Bits { words: self.words.clone(), len: self.len, rank: OnceLock::new() }
    }
}

impl PartialEq for Bits {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for Bits {}

pub(crate) fn words_for(len: u64) -> usize {
    len.div_ceil(64) as usize
}

impl Bits {
    pub fn zeroed(len: u64) -> Self {
        Bits { words: vec![0; words_for(len)], len, rank: OnceLock::new() }
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        self.rank = OnceLock::new();
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        (self.words[(i >> 6) as usize] >> (i & 63)) & 1 == 1
    }

    /// Clears every bit at index `>= len` in the last word.
    pub fn clear_tail(&mut self) {
        let rem = self.len & 63;
        if rem != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << rem) - 1;
            }
        }
    }

    fn rank_dir(&self) -> &[u64] {
        self.rank.get_or_init(|| {
            let mut dir = Vec::with_capacity(self.words.len() / BLOCK_WORDS + 1);
            let mut acc = 0u64;
            for block in self.words.chunks(BLOCK_WORDS) {
                dir.push(acc);
                acc += block.iter().map(|w| u64::from(w.count_ones())).sum::<u64>();
            }
            dir.push(acc);
            dir
        })
    }

    /// Number of set bits at indices `0..=i`.
    pub fn count_through(&self, i: u64) -> u64 {
        debug_assert!(i < self.len);
        let word = (i >> 6) as usize;
        let block = word / BLOCK_WORDS;
        let mut acc = self.rank_dir()[block];
        for w in &self.words[block * BLOCK_WORDS..word] {
            acc += u64::from(w.count_ones());
        }
        let bit = i & 63;
        let mask = if bit == 63 { u64::MAX } else { (1u64 << (bit + 1)) - 1 };
        acc + u64::from((self.words[word] & mask).count_ones())
    }

    #[cfg(test)]
    pub fn count_ones(&self) -> u64 {
        *self.rank_dir().last().unwrap_or(&0)
    }

    /// Smallest set index `>= from`, if any.
    pub fn next_one(&self, from: u64) -> Option<u64> {
        if from >= self.len {
            return None;
        }
        let mut word = (from >> 6) as usize;
        let mut w = self.words[word] & (u64::MAX << (from & 63));
        loop {
            if w != 0 {
                return Some(((word as u64) << 6) | u64::from(w.trailing_zeros()));
            }
            word += 1;
            if word >= self.words.len() {
                return None;
            }
            w = self.words[word];
        }
    }

    /// Set indices in `lo..=hi`, ascending.
    pub fn ones_in(&self, lo: u64, hi: u64) -> Ones<'_> {
        let hi = hi.min(self.len.saturating_sub(1));
        Ones { bits: self, next: lo, hi, empty: lo > hi || self.len == 0 }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8) as usize;
        let mut out = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(nbytes);
        out
    }

    pub fn from_bytes(len: u64, bytes: &[u8]) -> Option<Self> {
        if bytes.len() as u64 != len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        let bits = Bits { words, len, rank: OnceLock::new() };
        let rem = len & 63;
        if rem != 0 && bits.words.last().is_some_and(|w| w >> rem != 0) {
            return None;
        }
        Some(bits)
    }
}

pub(crate) struct Ones<'a> {
    bits: &'a Bits,
    next: u64,
    hi: u64,
    empty: bool,
}

impl Iterator for Ones<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.empty {
            return None;
        }
        match self.bits.next_one(self.next) {
            Some(i) if i <= self.hi => {
                if i == self.hi {
                    self.empty = true;
                } else {
                    self.next = i + 1;
                }
                Some(i)
            }
            _ => {
                self.empty = true;
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_scan_agree_with_naive() {
        let mut b = Bits::zeroed(1000);
        for i in (0..1000).filter(|i| i % 7 == 3 || i % 64 == 63) {
            let w = b.words_mut();
            w[i as usize >> 6] |= 1 << (i & 63);
        }
        let mut naive = 0;
        for i in 0..1000 {
            if b.get(i) {
                naive += 1;
            }
            assert_eq!(b.count_through(i), naive, "rank at {i}");
        }
        assert_eq!(b.count_ones(), naive);
        let ones: Vec<u64> = b.ones_in(100, 200).collect();
        let expect: Vec<u64> = (100..=200).filter(|&i| b.get(i)).collect();
        assert_eq!(ones, expect);
        assert_eq!(b.next_one(998), None);
    }

    #[test]
    fn bytes_reject_dirty_tail() {
        let b = Bits::zeroed(13);
        let mut bytes = b.to_bytes();
        assert_eq!(bytes.len(), 2);
        assert!(Bits::from_bytes(13, &bytes).is_some());
        bytes[1] = 0x80;
        assert!(Bits::from_bytes(13, &bytes).is_none());
    }
}

//! Segmented sieve of Eratosthenes over odd integers, with a binary cache
//! format.
//!
//! Cache layout: `b"RCLB"`, version byte `0x01`, the limit as a
//! little-endian `u64`, then the bitset as little-endian `u64` words. Bit
//! `i` of the bitset stands for the odd integer `2i + 1`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest accepted sieve limit.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 40;

/// Odd integers per segment.
pub const SEGMENT_BITS: usize = 1 << 20;

const SEGMENT_WORDS: usize = SEGMENT_BITS / 64;
const CACHE_MAGIC: &[u8; 4] = b"RCLB";
const CACHE_VERSION: u8 = 0x01;

/// Primality table for every integer up to `limit`.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .field("words", &self.bits.len())
            .finish()
    }
}

fn odd_slots(limit: u64) -> u64 {
    // odd integers 1, 3, ..., <= limit
    limit.div_ceil(2)
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Sieve all primes up to `limit` (`2 <= limit <= 2^40`).
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
        return Err(Error::Bounds(format!(
            "sieve limit {limit} outside [2, 2^40]"
        )));
    }
    let slots = odd_slots(limit);
    let words = slots.div_ceil(64) as usize;
    let mut bits = vec![0u64; words];
    let base: Vec<u64> = simple_sieve(limit.isqrt())
        .into_iter()
        .filter(|&p| p != 2)
        .collect();

    bits.par_chunks_mut(SEGMENT_WORDS)
        .enumerate()
        .for_each(|(seg, chunk)| {
            let lo = (seg * SEGMENT_BITS) as u64;
            let hi = (lo + (chunk.len() * 64) as u64).min(slots);
            sieve_segment(chunk, lo, hi, &base);
        });

    Ok(PrimeTable { limit, bits })
}

/// Sieve odd slots `[lo, hi)` into `chunk`, whose bit 0 is slot `lo`.
fn sieve_segment(chunk: &mut [u64], lo: u64, hi: u64, base: &[u64]) {
    let len = (hi - lo) as usize;
    for (w, word) in chunk.iter_mut().enumerate() {
        let start = w * 64;
        *word = if start >= len {
            0
        } else if len - start >= 64 {
            u64::MAX
        } else {
            (1u64 << (len - start)) - 1
        };
    }
    if lo == 0 {
        chunk[0] &= !1; // 1 is not prime
    }
    let hi_value = 2 * hi - 1;
    for &p in base {
        let sq = p * p;
        if sq > hi_value {
            break;
        }
        // first odd multiple of p that is >= max(p^2, 2*lo + 1)
        let lo_value = 2 * lo + 1;
        let mut m = if sq >= lo_value {
            sq
        } else {
            let k = lo_value.div_ceil(p);
            let k = if k % 2 == 0 { k + 1 } else { k };
            k * p
        };
        while m <= hi_value {
            let slot = (m - 1) / 2 - lo;
            chunk[(slot / 64) as usize] &= !(1u64 << (slot % 64));
            m += 2 * p;
        }
    }
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primality of `n`. Values beyond the table fall back to Miller–Rabin.
    pub fn is_prime(&self, n: u64) -> bool {
        if n > self.limit {
            return super::factor::is_prime_u64(n);
        }
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let slot = (n - 1) / 2;
        self.bits[(slot / 64) as usize] >> (slot % 64) & 1 == 1
    }

    /// Primes in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let odd = self.bits.iter().enumerate().flat_map(|(w, &word)| {
            BitIter(word).map(move |b| 2 * (w as u64 * 64 + b as u64) + 1)
        });
        std::iter::once(2).chain(odd)
    }

    /// Primes in `[lo, hi]`, ascending.
    pub fn range(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let hi = hi.min(self.limit);
        let two = (lo <= 2 && hi >= 2).then_some(2);
        let first_slot = lo.max(3) / 2;
        let last_slot = if hi >= 3 { (hi - 1) / 2 } else { 0 };
        let odd = (first_slot..=last_slot)
            .filter(move |_| hi >= 3)
            .filter(move |&s| self.bits[(s / 64) as usize] >> (s % 64) & 1 == 1)
            .map(|s| 2 * s + 1);
        two.into_iter().chain(odd)
    }

    /// Number of primes `<= limit`.
    pub fn count(&self) -> u64 {
        1 + self.bits.iter().map(|w| w.count_ones() as u64).sum::<u64>()
    }

    /// Primes collected into a vector.
    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(13 + 8 * self.bits.len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.push(CACHE_VERSION);
        buf.extend_from_slice(&self.limit.to_le_bytes());
        for w in &self.bits {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let mut f = fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    /// Load a cache file. When `expected_limit` is given the stored limit
    /// must match it exactly.
    pub fn read_cache(path: &Path, expected_limit: Option<u64>) -> Result<Self> {
        let bad = |reason: String| Error::Cache {
            path: path.to_path_buf(),
            reason,
        };
        let mut raw = Vec::new();
        fs::File::open(path)?.read_to_end(&mut raw)?;
        if raw.len() < 13 || &raw[..4] != CACHE_MAGIC {
            return Err(bad("missing RCLB magic".into()));
        }
        if raw[4] != CACHE_VERSION {
            return Err(bad(format!("unsupported version {:#04x}", raw[4])));
        }
        let limit = u64::from_le_bytes(raw[5..13].try_into().unwrap());
        if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
            return Err(bad(format!("stored limit {limit} out of range")));
        }
        if let Some(want) = expected_limit {
            if want != limit {
                return Err(bad(format!("stored limit {limit}, expected {want}")));
            }
        }
        let words = odd_slots(limit).div_ceil(64) as usize;
        let body = &raw[13..];
        if body.len() != words * 8 {
            return Err(bad(format!(
                "bitset has {} bytes, limit {limit} needs {}",
                body.len(),
                words * 8
            )));
        }
        let bits = body
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(PrimeTable { limit, bits })
    }

    /// Read `primes-<limit>.bin` from `dir` if present, otherwise sieve and
    /// write it.
    pub fn cached(dir: &Path, limit: u64) -> Result<Self> {
        let path = dir.join(format!("primes-{limit}.bin"));
        if path.exists() {
            return Self::read_cache(&path, Some(limit));
        }
        let table = sieve_primes(limit)?;
        fs::create_dir_all(dir)?;
        table.write_cache(&path)?;
        Ok(table)
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

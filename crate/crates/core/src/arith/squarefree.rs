//! Block-wise enumeration of squarefree integers together with their prime
//! supports.

use rayon::prelude::*;

use super::factor::Factorization;
use super::sieve::sieve_primes;

/// Integers per enumeration block.
pub const BLOCK_LEN: u64 = 1 << 15;

/// Upper bound on ω(n) for n < 2^64.
const MAX_OMEGA: usize = 15;

/// Prime supports of every squarefree integer in one block `[lo, hi)`.
pub struct SupportBlock {
    lo: u64,
    primes: Vec<u64>,
    count: Vec<u8>,
    squarefree: Vec<bool>,
}

impl SupportBlock {
    /// Iterate `(n, sorted prime support)` over the squarefree `n` of the
    /// block, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &[u64])> + '_ {
        self.squarefree
            .iter()
            .enumerate()
            .filter(|(_, &sf)| sf)
            .map(move |(i, _)| {
                let start = i * MAX_OMEGA;
                (
                    self.lo + i as u64,
                    &self.primes[start..start + self.count[i] as usize],
                )
            })
    }
}

/// Sieve that splits `[1, limit]` into fixed blocks.
pub struct SquarefreeSieve {
    limit: u64,
    small: Vec<u64>,
}

impl SquarefreeSieve {
    pub fn new(limit: u64) -> Self {
        let root = limit.isqrt();
        let small = if root >= 2 {
            sieve_primes(root).expect("sqrt of a u64 is in range").to_vec()
        } else {
            Vec::new()
        };
        SquarefreeSieve { limit, small }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn block_count(&self) -> u64 {
        self.limit.div_ceil(BLOCK_LEN)
    }

    /// Block `index`, covering `[1 + index·BLOCK_LEN, min(limit, (index+1)·BLOCK_LEN)]`.
    pub fn block(&self, index: u64) -> SupportBlock {
        let lo = 1 + index * BLOCK_LEN;
        let hi = (lo + BLOCK_LEN).min(self.limit + 1);
        let len = (hi - lo) as usize;
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut primes = vec![0u64; len * MAX_OMEGA];
        let mut count = vec![0u8; len];
        let mut squarefree = vec![true; len];

        for &p in &self.small {
            if p >= hi {
                break;
            }
            let sq = p * p;
            let mut m = lo.div_ceil(sq) * sq;
            while m < hi {
                squarefree[(m - lo) as usize] = false;
                m += sq;
            }
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                if squarefree[i] {
                    primes[i * MAX_OMEGA + count[i] as usize] = p;
                    count[i] += 1;
                    rem[i] /= p;
                }
                m += p;
            }
        }
        for i in 0..len {
            if squarefree[i] && rem[i] > 1 {
                primes[i * MAX_OMEGA + count[i] as usize] = rem[i];
                count[i] += 1;
            }
        }
        SupportBlock {
            lo,
            primes,
            count,
            squarefree,
        }
    }

    /// Fold every block in parallel, then combine the per-block results in
    /// block order. The result does not depend on the thread count as long
    /// as `merge` is associative.
    pub fn par_fold<A, F, M>(&self, init: impl Fn() -> A + Sync, fold: F, merge: M) -> A
    where
        A: Send,
        F: Fn(&mut A, u64, &[u64]) + Sync,
        M: Fn(A, A) -> A,
    {
        let parts: Vec<A> = (0..self.block_count())
            .into_par_iter()
            .map(|b| {
                let block = self.block(b);
                let mut acc = init();
                for (n, support) in block.iter() {
                    fold(&mut acc, n, support);
                }
                acc
            })
            .collect();
        parts.into_iter().fold(init(), merge)
    }
}

/// Squarefree `n <= limit` all of whose prime factors satisfy `prime_pred`,
/// ascending, with their factorizations.
pub fn squarefree_stream<P>(limit: u64, prime_pred: P) -> impl Iterator<Item = (u64, Factorization)>
where
    P: Fn(u64) -> bool,
{
    let sieve = SquarefreeSieve::new(limit);
    (0..sieve.block_count()).flat_map(move |b| {
        let block = sieve.block(b);
        block
            .iter()
            .filter(|(_, s)| s.iter().all(|&p| prime_pred(p)))
            .map(|(n, s)| (n, Factorization::squarefree(s)))
            .collect::<Vec<_>>()
    })
}

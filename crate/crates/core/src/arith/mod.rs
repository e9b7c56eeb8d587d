//! Exact integer substrate: sieving, factorization, radicals and squarefree
//! enumeration.

mod factor;
mod sieve;
mod squarefree;

pub use factor::{factorize, factorize_u64, is_prime_u64, radical_omega, totient, Factorization};
pub use sieve::{sieve_primes, PrimeTable, MAX_SIEVE_LIMIT, SEGMENT_BITS};
pub use squarefree::{squarefree_stream, SquarefreeSieve, SupportBlock, BLOCK_LEN};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

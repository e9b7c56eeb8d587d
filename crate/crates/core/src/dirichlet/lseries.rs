use super::euler::PrimeClass;
use super::series::{CoeffSeries, Mode};
use crate::arith::{sieve_primes, SquarefreeSieve};
use crate::error::{Error, Result};

/// Largest `γ` accepted by [`l_series`].
pub const MAX_GAMMA: u32 = 8;

/// `l_γ` by enumeration: 1 at each squarefree product of exactly `γ`
/// primes from the class.
pub fn l_series_direct(class: &PrimeClass, gamma: u32, n: usize, mode: Mode) -> Result<CoeffSeries> {
    check_gamma(gamma)?;
    let mut s = CoeffSeries::zero(n, mode)?;
    if gamma == 0 {
        s.set_int(1, 1);
        return Ok(s);
    }
    let sieve = SquarefreeSieve::new(n as u64);
    let hits: Vec<u64> = sieve.par_fold(
        Vec::new,
        |acc, m, support| {
            if support.len() == gamma as usize && support.iter().all(|&p| class.contains(p)) {
                acc.push(m);
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    for m in hits {
        s.set_int(m as usize, 1);
    }
    Ok(s)
}

/// `l_γ` from the recurrence
/// `γ l_γ = l_1 l_{γ-1} - Σ_{j=2}^{γ} (-1)^j l_1(js) l_{γ-j}`.
pub fn l_series_recurrence(class: &PrimeClass, gamma: u32, n: usize, mode: Mode) -> Result<CoeffSeries> {
    check_gamma(gamma)?;
    let mut ls = vec![CoeffSeries::one(n, mode)?];
    if gamma == 0 {
        return Ok(ls.pop().unwrap());
    }
    let mut l1 = CoeffSeries::zero(n, mode)?;
    if n >= 2 {
        for p in sieve_primes(n as u64)?.iter().filter(|&p| class.contains(p)) {
            l1.set_int(p as usize, 1);
        }
    }
    let dilated: Vec<CoeffSeries> = (0..=gamma).map(|j| if j < 2 { l1.clone() } else { l1.dilate(j) }).collect();
    ls.push(l1.clone());
    for g in 2..=gamma as usize {
        let mut acc = l1.mul(&ls[g - 1])?;
        for j in 2..=g {
            let term = dilated[j].mul(&ls[g - j])?;
            acc = if j % 2 == 0 { acc.sub(&term)? } else { acc.add(&term)? };
        }
        ls.push(acc.scale(1, g as i64));
    }
    Ok(ls.pop().unwrap())
}

/// `l_γ`, built both ways; disagreement is an internal-consistency error.
pub fn l_series(class: &PrimeClass, gamma: u32, n: usize, mode: Mode) -> Result<CoeffSeries> {
    let direct = l_series_direct(class, gamma, n, mode)?;
    let rec = l_series_recurrence(class, gamma, n, mode)?;
    let agree = match mode {
        Mode::Exact => (1..=n).all(|k| direct.get_exact(k) == rec.get_exact(k)),
        Mode::Float => (1..=n).all(|k| (direct.get(k) - rec.get(k)).abs() < 1e-9),
    };
    if !agree {
        let k = (1..=n).find(|&k| direct.get(k) != rec.get(k)).unwrap_or(0);
        return Err(Error::Consistency(format!(
            "l_{gamma}: enumeration and recurrence differ at n = {k} ({} vs {})",
            direct.get(k),
            rec.get(k)
        )));
    }
    Ok(direct)
}

fn check_gamma(gamma: u32) -> Result<()> {
    if gamma > MAX_GAMMA {
        return Err(Error::Bounds(format!("γ = {gamma} exceeds {MAX_GAMMA}")));
    }
    Ok(())
}

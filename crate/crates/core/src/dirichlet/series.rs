use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest truncation accepted for a series.
pub const MAX_TRUNCATION: usize = 10_000_000;

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
enum Coeffs {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// Truncated Dirichlet series `Σ_{n ≤ N} a_n n^{-s}`. Slot 0 is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries {
    coeffs: Coeffs,
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 || n > MAX_TRUNCATION {
        return Err(Error::Bounds(format!("truncation {n} outside [1, {MAX_TRUNCATION}]")));
    }
    Ok(())
}

impl CoeffSeries {
    pub fn zero(n: usize, mode: Mode) -> Result<Self> {
        check_len(n)?;
        Ok(CoeffSeries {
            coeffs: match mode {
                Mode::Exact => Coeffs::Exact(vec![Rational::from_integer(0); n + 1]),
                Mode::Float => Coeffs::Float(vec![0.0; n + 1]),
            },
        })
    }

    /// The unit series: 1 at `n = 1`.
    pub fn one(n: usize, mode: Mode) -> Result<Self> {
        let mut s = Self::zero(n, mode)?;
        s.set_int(1, 1);
        Ok(s)
    }

    /// Series with integer coefficients `a(n)` for `1 <= n <= N`.
    pub fn from_fn(n: usize, mode: Mode, a: impl Fn(usize) -> i64) -> Result<Self> {
        let mut s = Self::zero(n, mode)?;
        for k in 1..=n {
            s.set_int(k, a(k));
        }
        Ok(s)
    }

    pub fn from_integers(values: &[i64], mode: Mode) -> Result<Self> {
        Self::from_fn(values.len(), mode, |k| values[k - 1])
    }

    pub fn from_floats(values: Vec<f64>) -> Result<Self> {
        check_len(values.len())?;
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(0.0);
        v.extend(values);
        if !v[1].is_finite() {
            return Err(Error::Domain("coefficient a_1 is not finite".into()));
        }
        Ok(CoeffSeries { coeffs: Coeffs::Float(v) })
    }

    pub fn truncation(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len() - 1,
            Coeffs::Float(v) => v.len() - 1,
        }
    }

    pub fn mode(&self) -> Mode {
        match self.coeffs {
            Coeffs::Exact(_) => Mode::Exact,
            Coeffs::Float(_) => Mode::Float,
        }
    }

    pub(crate) fn set_int(&mut self, k: usize, value: i64) {
        match &mut self.coeffs {
            Coeffs::Exact(v) => v[k] = Rational::from_integer(value),
            Coeffs::Float(v) => v[k] = value as f64,
        }
    }

    /// Coefficient `a_k` as a float (0 beyond the truncation).
    pub fn get(&self, k: usize) -> f64 {
        match &self.coeffs {
            Coeffs::Exact(v) => v.get(k).map_or(0.0, |r| *r.numer() as f64 / *r.denom() as f64),
            Coeffs::Float(v) => v.get(k).copied().unwrap_or(0.0),
        }
    }

    /// Exact coefficient; `None` in float mode.
    pub fn get_exact(&self, k: usize) -> Option<Rational> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v.get(k).copied().unwrap_or_else(|| Rational::from_integer(0))),
            Coeffs::Float(_) => None,
        }
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.truncation()).filter(|&k| self.get(k) != 0.0).collect()
    }

    pub fn to_float(&self) -> CoeffSeries {
        let n = self.truncation();
        let v = (0..=n).map(|k| if k == 0 { 0.0 } else { self.get(k) }).collect();
        CoeffSeries { coeffs: Coeffs::Float(v) }
    }

    fn same_shape(&self, other: &CoeffSeries) -> Result<()> {
        if self.mode() != other.mode() {
            return Err(Error::ModeMismatch(format!(
                "{:?} series combined with {:?} series",
                self.mode(),
                other.mode()
            )));
        }
        if self.truncation() != other.truncation() {
            return Err(Error::Domain(format!(
                "truncations differ: {} vs {}",
                self.truncation(),
                other.truncation()
            )));
        }
        Ok(())
    }

    /// Dirichlet convolution `c_n = Σ_{d|n} a_d b_{n/d}`.
    pub fn mul(&self, other: &CoeffSeries) -> Result<CoeffSeries> {
        self.same_shape(other)?;
        let n = self.truncation();
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => Coeffs::Exact(convolve(a, b, n, Rational::from_integer(0))),
            (Coeffs::Float(a), Coeffs::Float(b)) => Coeffs::Float(convolve(a, b, n, 0.0)),
            _ => unreachable!(),
        };
        Ok(CoeffSeries { coeffs })
    }

    pub fn add(&self, other: &CoeffSeries) -> Result<CoeffSeries> {
        self.zip(other, |x, y| x + y, |x, y| x + y)
    }

    pub fn sub(&self, other: &CoeffSeries) -> Result<CoeffSeries> {
        self.zip(other, |x, y| x - y, |x, y| x - y)
    }

    fn zip(
        &self,
        other: &CoeffSeries,
        fe: impl Fn(Rational, Rational) -> Rational,
        ff: impl Fn(f64, f64) -> f64,
    ) -> Result<CoeffSeries> {
        self.same_shape(other)?;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => Coeffs::Exact(a.iter().zip(b).map(|(&x, &y)| fe(x, y)).collect()),
            (Coeffs::Float(a), Coeffs::Float(b)) => Coeffs::Float(a.iter().zip(b).map(|(&x, &y)| ff(x, y)).collect()),
            _ => unreachable!(),
        };
        Ok(CoeffSeries { coeffs })
    }

    /// Multiply every coefficient by the rational `num/den`.
    pub fn scale(&self, num: i64, den: i64) -> CoeffSeries {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(a) => {
                let r = Rational::new(num, den);
                Coeffs::Exact(a.iter().map(|&x| x * r).collect())
            }
            Coeffs::Float(a) => Coeffs::Float(a.iter().map(|&x| x * num as f64 / den as f64).collect()),
        };
        CoeffSeries { coeffs }
    }

    /// The series of `F(ks)`: coefficient `a_m` moves to `m^k`.
    pub fn dilate(&self, k: u32) -> CoeffSeries {
        let n = self.truncation();
        let coeffs = match &self.coeffs {
            Coeffs::Exact(a) => {
                let mut out = vec![Rational::from_integer(0); n + 1];
                dilate_into(a, &mut out, k);
                Coeffs::Exact(out)
            }
            Coeffs::Float(a) => {
                let mut out = vec![0.0; n + 1];
                dilate_into(a, &mut out, k);
                Coeffs::Float(out)
            }
        };
        CoeffSeries { coeffs }
    }

    /// Partial sums `A(x) = Σ_{n ≤ x} a_n` at each requested `x`, in float.
    pub fn partial_sums(&self, xs: &[u64]) -> Vec<f64> {
        let mut acc = 0.0;
        let mut k = 0usize;
        let n = self.truncation();
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by_key(|&i| xs[i]);
        let mut vals = vec![0.0; xs.len()];
        for i in order {
            let x = (xs[i] as usize).min(n);
            while k < x {
                k += 1;
                acc += self.get(k);
            }
            vals[i] = acc;
        }
        vals
    }

    /// `Σ_{n ≤ N} a_n n^{-σ}` together with the tail bound
    /// `max|a_n| · N^{1-σ}/(σ-1)` from integral comparison.
    pub fn evaluate(&self, sigma: f64) -> Result<Evaluation> {
        if sigma <= 1.0 {
            return Err(Error::Domain(format!(
                "truncated series evaluated at σ = {sigma} <= 1 has no tail bound"
            )));
        }
        let n = self.truncation();
        let (mut sum, mut max) = (0.0, 0.0f64);
        for k in 1..=n {
            let a = self.get(k);
            sum += a * (k as f64).powf(-sigma);
            max = max.max(a.abs());
        }
        let tail = max * (n as f64).powf(1.0 - sigma) / (sigma - 1.0);
        Ok(Evaluation { value: sum, tail })
    }
}

/// A numerical value with an estimate of the neglected part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub tail: f64,
}

fn dilate_into<T: Copy>(a: &[T], out: &mut [T], k: u32) {
    let n = out.len() - 1;
    for m in 1..=n {
        match (m as u64).checked_pow(k) {
            Some(t) if t as usize <= n => out[t as usize] = a[m],
            _ => break,
        }
    }
}

fn convolve<T>(a: &[T], b: &[T], n: usize, zero: T) -> Vec<T>
where
    T: Copy + PartialEq + Send + Sync + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    // block over n so that each worker owns a slice of the output
    const BLOCK: usize = 1 << 14;
    let nz_a: Vec<usize> = (1..=n).filter(|&d| a[d] != zero).collect();
    let mut out = vec![zero; n + 1];
    out[1..].par_chunks_mut(BLOCK).enumerate().for_each(|(bi, chunk)| {
        let lo = 1 + bi * BLOCK;
        let hi = lo + chunk.len() - 1;
        for &d in &nz_a {
            if d > hi {
                break;
            }
            let ad = a[d];
            // multiples d*e in [lo, hi]
            let e0 = lo.div_ceil(d);
            let e1 = hi / d;
            for e in e0..=e1 {
                let be = b[e];
                if be != zero {
                    let slot = d * e - lo;
                    chunk[slot] = chunk[slot] + ad * be;
                }
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn divisor_count(n: usize) -> i64 {
        (1..=n).filter(|d| n % d == 0).count() as i64
    }

    #[test]
    fn zeta_squared_is_divisor_count() {
        for mode in [Mode::Exact, Mode::Float] {
            let z = CoeffSeries::from_fn(100, mode, |_| 1).unwrap();
            let d = z.mul(&z).unwrap();
            assert_eq!(d.get(12), 6.0);
            for n in 1..=100 {
                assert_eq!(d.get(n), divisor_count(n) as f64);
            }
        }
    }

    #[test]
    fn unit_is_neutral() {
        let a = CoeffSeries::from_fn(50, Mode::Exact, |n| (n * n % 7) as i64 - 3).unwrap();
        let one = CoeffSeries::one(50, Mode::Exact).unwrap();
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = CoeffSeries::one(10, Mode::Exact).unwrap();
        let b = CoeffSeries::one(10, Mode::Float).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::ModeMismatch(_))));
        assert!(matches!(a.add(&b), Err(Error::ModeMismatch(_))));
        assert!(CoeffSeries::one(MAX_TRUNCATION + 1, Mode::Float).is_err());
    }

    #[test]
    fn convolution_crosses_blocks() {
        let n = 40_000;
        let z = CoeffSeries::from_fn(n, Mode::Float, |_| 1).unwrap();
        let d = z.mul(&z).unwrap();
        for k in [16_383, 16_384, 16_385, 32_768, 39_999, 40_000] {
            assert_eq!(d.get(k), divisor_count(k) as f64, "k = {k}");
        }
    }

    #[test]
    fn dilation_and_sums() {
        let z = CoeffSeries::from_fn(30, Mode::Exact, |_| 1).unwrap();
        let z2 = z.dilate(2);
        assert_eq!(z2.support(), vec![1, 4, 9, 16, 25]);
        assert_eq!(z.partial_sums(&[10, 3, 100]), vec![10.0, 3.0, 30.0]);
    }

    #[test]
    fn zeta_two() {
        let z = CoeffSeries::from_fn(100_000, Mode::Float, |_| 1).unwrap();
        let e = z.evaluate(2.0).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((e.value - exact).abs() < 1e-3);
        assert!((e.value - exact).abs() <= e.tail);
        assert!(z.evaluate(1.0).is_err());
    }
}

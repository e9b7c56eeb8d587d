use std::fmt;
use std::sync::{Arc, OnceLock};

use super::fit::linear_fit;
use super::series::{CoeffSeries, Mode, MAX_TRUNCATION};
use crate::arith::{gcd, sieve_primes, totient};
use crate::error::{Error, Result};

/// Primes up to this bound are multiplied out explicitly in [`evaluate`].
pub const EULER_PRIME_BOUND: u64 = 10_000_000;

/// Largest degree of a local factor's numerator or denominator.
pub const MAX_FACTOR_DEGREE: usize = 8;

/// A set of rational primes.
#[derive(Clone)]
pub enum PrimeClass {
    All,
    /// Primes whose residue mod `modulus` lies in `residues`.
    Residues { modulus: u64, residues: Vec<u64> },
    /// Arbitrary membership test with its natural density.
    Custom {
        name: String,
        density: f64,
        pred: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    },
}

impl fmt::Debug for PrimeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeClass::All => write!(f, "All"),
            PrimeClass::Residues { modulus, residues } => write!(f, "Residues({residues:?} mod {modulus})"),
            PrimeClass::Custom { name, density, .. } => write!(f, "Custom({name}, density {density})"),
        }
    }
}

impl PrimeClass {
    pub fn residues(modulus: u64, residues: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Domain("modulus 0".into()));
        }
        let mut r: Vec<u64> = residues.iter().map(|x| x % modulus).collect();
        r.sort_unstable();
        r.dedup();
        Ok(PrimeClass::Residues { modulus, residues: r })
    }

    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeClass::All => true,
            PrimeClass::Residues { modulus, residues } => residues.binary_search(&(p % modulus)).is_ok(),
            PrimeClass::Custom { pred, .. } => pred(p),
        }
    }

    /// Natural density among all primes (Dirichlet).
    pub fn density(&self) -> f64 {
        match self {
            PrimeClass::All => 1.0,
            PrimeClass::Residues { modulus, residues } => {
                let units = residues.iter().filter(|&&r| gcd(r, *modulus) == 1).count();
                units as f64 / totient(*modulus) as f64
            }
            PrimeClass::Custom { density, .. } => *density,
        }
    }
}

/// A rational function `num(t)/den(t)` with integer coefficients and
/// constant terms 1. Coefficients are listed from degree 0 upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFactor {
    num: Vec<i64>,
    den: Vec<i64>,
}

impl LocalFactor {
    pub fn new(num: &[i64], den: &[i64]) -> Result<Self> {
        for (name, poly) in [("numerator", num), ("denominator", den)] {
            if poly.first() != Some(&1) {
                return Err(Error::Domain(format!("{name} must have constant term 1")));
            }
            if poly.len() > MAX_FACTOR_DEGREE + 1 {
                return Err(Error::Domain(format!("{name} degree exceeds {MAX_FACTOR_DEGREE}")));
            }
        }
        Ok(LocalFactor { num: num.to_vec(), den: den.to_vec() })
    }

    /// `(1 - t)^{-1}`.
    pub fn geometric() -> Self {
        LocalFactor { num: vec![1], den: vec![1, -1] }
    }

    /// The polynomial `p(t)` with no denominator.
    pub fn polynomial(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs, &[1])
    }

    /// Power-series coefficients `c_0 .. c_k`.
    pub fn series(&self, k: usize) -> Result<Vec<i64>> {
        let mut c: Vec<i64> = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut v = *self.num.get(i).unwrap_or(&0) as i128;
            for j in 1..self.den.len().min(i + 1) {
                v -= self.den[j] as i128 * c[i - j] as i128;
            }
            c.push(i64::try_from(v).map_err(|_| Error::Bounds("local factor coefficient overflow".into()))?);
        }
        Ok(c)
    }

    /// First nonzero power-series degree `j0 >= 1` and its coefficient;
    /// `None` when the factor is identically 1.
    pub fn leading(&self) -> Option<(usize, i64)> {
        let s = self.series(4 * MAX_FACTOR_DEGREE).ok()?;
        s.iter().enumerate().skip(1).find(|(_, &c)| c != 0).map(|(j, &c)| (j, c))
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let ev = |p: &[i64]| p.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64);
        (ev(&self.num), ev(&self.den))
    }
}

/// `∏_{p ∈ class} F(p^{-ks})`.
#[derive(Debug, Clone)]
pub struct EulerProductSpec {
    pub class: PrimeClass,
    pub factor: LocalFactor,
    /// Evaluate at `ks` instead of `s`.
    pub substitution: u32,
}

impl EulerProductSpec {
    pub fn new(class: PrimeClass, factor: LocalFactor) -> Self {
        EulerProductSpec { class, factor, substitution: 1 }
    }

    /// `∏ (1 - p^{-s})^{-1}` over the class.
    pub fn zeta(class: PrimeClass) -> Self {
        Self::new(class, LocalFactor::geometric())
    }

    pub fn with_substitution(mut self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("substitution factor must be at least 1".into()));
        }
        self.substitution = k;
        Ok(self)
    }

    /// Abscissa of absolute convergence, `1/(k j0)`, or 0 when the
    /// product has finitely many nontrivial factors.
    pub fn abscissa(&self) -> f64 {
        match self.factor.leading() {
            Some((j0, _)) if self.class.density() > 0.0 => 1.0 / (self.substitution as f64 * j0 as f64),
            _ => 0.0,
        }
    }
}

/// Multiplicative expansion of the product up to `n`.
pub fn expand(spec: &EulerProductSpec, n: usize, mode: Mode) -> Result<CoeffSeries> {
    if n == 0 || n > MAX_TRUNCATION {
        return Err(Error::Bounds(format!("truncation {n} outside [1, {MAX_TRUNCATION}]")));
    }
    let mut a = vec![1i64; n + 1];
    if n >= 2 {
        let k = spec.substitution as usize;
        let local = spec.factor.series(64 / k + 1)?;
        for p in sieve_primes(n as u64)?.iter() {
            let p = p as usize;
            let inside = spec.class.contains(p as u64);
            let mut m = p;
            while m <= n {
                if inside {
                    let mut v = 0usize;
                    let mut q = m;
                    while q % p == 0 {
                        q /= p;
                        v += 1;
                    }
                    a[m] = if v % k == 0 {
                        a[m].checked_mul(local[v / k])
                            .ok_or_else(|| Error::Bounds("coefficient overflow in expansion".into()))?
                    } else {
                        0
                    };
                } else {
                    a[m] = 0;
                }
                m += p;
            }
        }
    }
    CoeffSeries::from_fn(n, mode, |i| a[i])
}

fn default_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(EULER_PRIME_BOUND).expect("fixed bound is valid").to_vec())
}

/// `E_1(x) = ∫_x^∞ e^{-u}/u du` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // continued fraction, modified Lentz
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Logarithm of an Euler product split into the explicit part over
/// `p <= prime_bound` and the analytic tail beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerEvaluation {
    pub value: f64,
    pub log_value: f64,
    pub partial_log: f64,
    /// `δ c_{j0} E_1((k j0 σ - 1) log P)`: the prime-number-theorem estimate
    /// of `Σ_{p > P} log F_p`.
    pub tail_log: f64,
    pub prime_bound: u64,
}

/// Evaluate the product at real `σ` above its abscissa.
pub fn evaluate(spec: &EulerProductSpec, sigma: f64) -> Result<EulerEvaluation> {
    evaluate_with_primes(spec, sigma, default_primes())
}

/// As [`evaluate`], with an explicit ascending prime list.
pub fn evaluate_with_primes(spec: &EulerProductSpec, sigma: f64, primes: &[u64]) -> Result<EulerEvaluation> {
    let abscissa = spec.abscissa();
    if !(sigma > abscissa) {
        return Err(Error::Domain(format!("σ = {sigma} is not above the abscissa {abscissa}")));
    }
    let k = spec.substitution as f64;
    let mut partial = 0.0;
    for &p in primes {
        if !spec.class.contains(p) {
            continue;
        }
        let t = (p as f64).powf(-k * sigma);
        let (num, den) = spec.factor.eval(t);
        if num <= 0.0 || den <= 0.0 {
            return Err(Error::Domain(format!("local factor is not positive at p = {p}")));
        }
        partial += num.ln() - den.ln();
    }
    let bound = primes.last().copied().unwrap_or(1);
    let tail = match spec.factor.leading() {
        Some((j0, c)) if bound > 1 => {
            let s = k * j0 as f64 * sigma;
            spec.class.density() * c as f64 * exp_integral_e1((s - 1.0) * (bound as f64).ln())
        }
        _ => 0.0,
    };
    let log_value = partial + tail;
    Ok(EulerEvaluation {
        value: log_value.exp(),
        log_value,
        partial_log: partial,
        tail_log: tail,
        prime_bound: bound,
    })
}

/// Result of fitting `log F(σ0 + ε) ≈ const + κ log(1/ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentProbe {
    pub exponent: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// `(ε, log F(σ0 + ε))`.
    pub ladder: Vec<(f64, f64)>,
}

/// Default ladder `ε_k = 0.1 · 2^{-k}`, `k = 1..12`.
pub fn default_ladder() -> Vec<f64> {
    (1..=12).map(|k| 0.1 * 0.5f64.powi(k)).collect()
}

/// Estimate the singularity exponent of the product at `σ0`.
pub fn exponent_probe(spec: &EulerProductSpec, sigma0: f64) -> Result<ExponentProbe> {
    exponent_probe_with(spec, sigma0, &default_ladder(), default_primes())
}

pub fn exponent_probe_with(
    spec: &EulerProductSpec,
    sigma0: f64,
    ladder: &[f64],
    primes: &[u64],
) -> Result<ExponentProbe> {
    let mut points = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let e = evaluate_with_primes(spec, sigma0 + eps, primes)?;
        if !e.log_value.is_finite() {
            return Err(Error::Fit(format!("non-finite value at ε = {eps}")));
        }
        points.push((eps, e.log_value));
    }
    let xs: Vec<f64> = points.iter().map(|&(e, _)| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let line = linear_fit(&xs, &ys)?;
    if line.max_abs_residual > 0.05 {
        return Err(Error::Fit(format!(
            "ladder is not log-linear: slope {:.4}, max residual {:.4}",
            line.slope, line.max_abs_residual
        )));
    }
    Ok(ExponentProbe {
        exponent: line.slope,
        intercept: line.intercept,
        max_residual: line.max_abs_residual,
        ladder: points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_primes() -> Vec<u64> {
        sieve_primes(2_000_000).unwrap().to_vec()
    }

    #[test]
    fn expand_examples() {
        let z = expand(&EulerProductSpec::zeta(PrimeClass::All), 10, Mode::Exact).unwrap();
        assert!((1..=10).all(|n| z.get(n) == 1.0));

        let split7 = PrimeClass::residues(7, &[1, 6]).unwrap();
        let spec = EulerProductSpec::new(split7, LocalFactor::polynomial(&[1, 0, 3]).unwrap());
        let a = expand(&spec, 200, Mode::Exact).unwrap();
        assert_eq!(a.get(169), 3.0);
        assert_eq!(a.get(13), 0.0);
        assert_eq!(a.get(1), 1.0);

        let one4 = PrimeClass::residues(4, &[1]).unwrap();
        let a = expand(&EulerProductSpec::zeta(one4), 30, Mode::Exact).unwrap();
        assert_eq!((a.get(25), a.get(5), a.get(13), a.get(3)), (1.0, 1.0, 1.0, 0.0));
        assert!(expand(&EulerProductSpec::zeta(PrimeClass::All), MAX_TRUNCATION + 1, Mode::Float).is_err());
    }

    #[test]
    fn expansion_is_multiplicative() {
        let spec = EulerProductSpec::new(
            PrimeClass::residues(3, &[1, 2]).unwrap(),
            LocalFactor::new(&[1, 2], &[1, -1, 1]).unwrap(),
        );
        let n = 10_000;
        let a = expand(&spec, n, Mode::Float).unwrap();
        for m in 1..=100 {
            for k in 1..=n / m {
                if gcd(m as u64, k as u64) == 1 {
                    assert_eq!(a.get(m * k), a.get(m) * a.get(k), "m = {m}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn substitution_moves_support() {
        let spec = EulerProductSpec::zeta(PrimeClass::All).with_substitution(2).unwrap();
        let a = expand(&spec, 100, Mode::Exact).unwrap();
        assert_eq!(a.support(), vec![1, 4, 9, 16, 25, 36, 49, 64, 81, 100]);
        assert_eq!(spec.abscissa(), 0.5);
    }

    #[test]
    fn local_factor_series() {
        assert_eq!(LocalFactor::new(&[1], &[1, -1]).unwrap().series(4).unwrap(), vec![1; 5]);
        let f = LocalFactor::new(&[1, 1], &[1, -1]).unwrap();
        assert_eq!(f.series(3).unwrap(), vec![1, 2, 2, 2]);
        assert_eq!(LocalFactor::polynomial(&[1, 0, 3]).unwrap().leading(), Some((2, 3)));
        assert!(LocalFactor::new(&[2], &[1]).is_err());
        assert!(LocalFactor::polynomial(&[1; 10]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let primes = small_primes();
        let z = evaluate_with_primes(&EulerProductSpec::zeta(PrimeClass::All), 2.0, &primes).unwrap();
        // partial-sum oracle
        let oracle: f64 = (1..200_000u64).map(|n| 1.0 / (n * n) as f64).sum::<f64>() + 1.0 / 200_000.0;
        assert!((z.value - oracle).abs() < 1e-3, "{} vs {oracle}", z.value);
        assert!((z.value - 1.6449).abs() < 1e-3);

        let empty = PrimeClass::residues(10, &[]).unwrap();
        let e = evaluate_with_primes(&EulerProductSpec::zeta(empty), 1.5, &primes).unwrap();
        assert_eq!(e.value, 1.0);

        assert!(evaluate_with_primes(&EulerProductSpec::zeta(PrimeClass::All), 1.0, &primes).is_err());
    }

    #[test]
    fn e1_values() {
        // reference values of E_1
        for (x, want) in [(0.01, 4.037_929_576_538_11), (0.5, 0.559_773_594_776_160_8), (1.0, 0.219_383_934_395_520_3), (2.0, 0.048_900_510_708_061_1), (10.0, 4.156_968_929_685_324e-6)] {
            let got = exp_integral_e1(x);
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "E1({x}) = {got}");
        }
    }

    #[test]
    fn zeta_pole_probe() {
        let p = exponent_probe_with(&EulerProductSpec::zeta(PrimeClass::All), 1.0, &default_ladder(), &small_primes()).unwrap();
        assert!((p.exponent - 1.0).abs() < 0.05, "{p:?}");
    }
}

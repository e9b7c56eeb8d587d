use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::tauberian::AsymptoticShape;
use crate::error::{Error, Result};

/// Largest accepted ratio of extreme singular values of the (column
/// normalized) design matrix.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Free,
    Fixed(f64),
}

/// Which exponents of `a x^α (log x)^b (log log x)^c` are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub alpha: Exponent,
    pub b: Exponent,
    pub c: Exponent,
}

impl Default for FitModel {
    /// α and b free, c fixed at 0.
    fn default() -> Self {
        FitModel {
            alpha: Exponent::Free,
            b: Exponent::Free,
            c: Exponent::Fixed(0.0),
        }
    }
}

impl FitModel {
    pub fn describe(&self) -> String {
        let part = |name: &str, e: Exponent| match e {
            Exponent::Free => format!("{name}=free"),
            Exponent::Fixed(v) => format!("{name}={v}"),
        };
        format!("{};{};{}", part("alpha", self.alpha), part("b", self.b), part("c", self.c))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub shape: AsymptoticShape,
    pub model: FitModel,
    /// `max |fit(x)/y - 1|` over the sample.
    pub max_rel_residual: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

/// Least squares for `log y = log a + α log x + b log log x + c log log log x`
/// with the chosen exponents held fixed.
pub fn asymptotic_fit(xs: &[f64], ys: &[f64], model: FitModel) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!("{} abscissae but {} values", xs.len(), ys.len())));
    }
    if xs.len() < 6 {
        return Err(Error::Fit(format!("{} points; at least 6 needed", xs.len())));
    }
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(0.0, f64::max);
    if x_max < 100.0 * x_min {
        return Err(Error::Fit(format!("sample spans [{x_min}, {x_max}], under two decades")));
    }
    let uses_c = !matches!(model.c, Exponent::Fixed(v) if v == 0.0);
    let x_floor = if uses_c { std::f64::consts::E } else { 1.0 };
    if x_min <= x_floor {
        return Err(Error::Fit(format!("abscissae must exceed {x_floor}")));
    }
    if let Some(y) = ys.iter().find(|y| !(**y > 0.0) || !y.is_finite()) {
        return Err(Error::Fit(format!("non-positive value {y}")));
    }

    let features = |x: f64| [x.ln(), x.ln().ln(), if uses_c { x.ln().ln().ln() } else { 0.0 }];
    let exps = [model.alpha, model.b, model.c];
    let free: Vec<usize> = (0..3).filter(|&i| exps[i] == Exponent::Free).collect();
    let rows = xs.len();
    let cols = 1 + free.len();
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (r, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let f = features(x);
        let mut target = y.ln();
        for i in 0..3 {
            if let Exponent::Fixed(v) = exps[i] {
                target -= v * f[i];
            }
        }
        design[(r, 0)] = 1.0;
        for (j, &i) in free.iter().enumerate() {
            design[(r, j + 1)] = f[i];
        }
        rhs[r] = target;
    }
    // normalize columns so the condition number reflects collinearity only
    let norms: Vec<f64> = (0..cols).map(|j| design.column(j).norm()).collect();
    for j in 0..cols {
        if norms[j] == 0.0 {
            return Err(Error::Fit("degenerate design column".into()));
        }
        design.column_mut(j).scale_mut(1.0 / norms[j]);
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 0.0) || smax / smin > MAX_CONDITION {
        return Err(Error::Fit(format!("ill-conditioned design (condition {:.3e})", smax / smin)));
    }
    let sol = svd.solve(&rhs, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    let mut params = [0.0; 3];
    for i in 0..3 {
        if let Exponent::Fixed(v) = exps[i] {
            params[i] = v;
        }
    }
    for (j, &i) in free.iter().enumerate() {
        params[i] = sol[j + 1] / norms[j + 1];
    }
    let log_a = sol[0] / norms[0];
    let shape = AsymptoticShape {
        amplitude: log_a.exp(),
        alpha: params[0],
        b: params[1],
        c: params[2],
    };
    let max_rel_residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let f = features(x);
            let log_fit = log_a + params[0] * f[0] + params[1] * f[1] + params[2] * f[2];
            (log_fit.exp() / y - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(FitResult {
        shape,
        model,
        max_rel_residual,
        points: xs.len(),
        x_min,
        x_max,
    })
}

/// Ordinary least-squares line `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<Line> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Fit("linear fit needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = (intercept + slope * x - y).abs();
        max_abs = max_abs.max(r);
        max_rel = max_rel.max(if y != 0.0 { r / y.abs() } else { f64::INFINITY });
    }
    Ok(Line {
        slope,
        intercept,
        max_abs_residual: max_abs,
        max_rel_residual: max_rel,
    })
}

/// `count` points geometrically spaced over `[lo, hi]`, rounded to integers.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<u64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let r = (hi / lo).powf(1.0 / (count - 1) as f64);
    let mut out: Vec<u64> = (0..count).map(|i| (lo * r.powi(i as i32)).round() as u64).collect();
    out.dedup();
    out
}

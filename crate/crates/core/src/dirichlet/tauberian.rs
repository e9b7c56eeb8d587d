use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation (g = 7, 9 terms), with reflection
/// below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let a = LANCZOS[1..]
            .iter()
            .enumerate()
            .fold(LANCZOS[0], |acc, (i, &c)| acc + c / (x + i as f64 + 1.0));
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// `a · x^α (log x)^b (log log x)^c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticShape {
    pub amplitude: f64,
    pub alpha: f64,
    pub b: f64,
    pub c: f64,
}

impl AsymptoticShape {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.amplitude * x.powf(self.alpha);
        if self.b != 0.0 {
            v *= x.ln().powf(self.b);
        }
        if self.c != 0.0 {
            v *= x.ln().ln().powf(self.c);
        }
        v
    }
}

/// Partial-sum asymptotics for a non-negative Dirichlet series
/// `F(s) = g(s)(s-1)^{-α0} (log 1/(s-1))^{b0}`:
/// `(g(1)/Γ(α0)) x (log x)^{α0-1} (log log x)^{b0}`, or for `α0 = 0`,
/// `b0 g(1) x (log log x)^{b0-1} / log x`.
pub fn tauberian_predict(alpha0: f64, b0: f64, g0_at_1: f64) -> Result<AsymptoticShape> {
    if !(alpha0 >= 0.0) {
        return Err(Error::Domain(format!("α0 = {alpha0} is negative")));
    }
    if alpha0 == 0.0 {
        if b0 == 0.0 {
            return Err(Error::Unsupported("α0 = 0 with b0 = 0".into()));
        }
        if b0 < 1.0 {
            return Err(Error::Domain(format!("α0 = 0 needs b0 >= 1, got {b0}")));
        }
        return Ok(AsymptoticShape {
            amplitude: b0 * g0_at_1,
            alpha: 1.0,
            b: -1.0,
            c: b0 - 1.0,
        });
    }
    Ok(AsymptoticShape {
        amplitude: g0_at_1 / gamma(alpha0),
        alpha: 1.0,
        b: alpha0 - 1.0,
        c: b0,
    })
}

use std::fmt;

use crate::arith::gcd;
use crate::error::{Error, Result};

/// Largest supported permutation degree.
pub const MAX_DEGREE: usize = 16;

/// A permutation of `{1, ..., n}` with `n <= 16`.
///
/// Stored zero-based; composition `g * h` applies `h` first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    degree: u8,
    image: [u8; MAX_DEGREE],
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} > {MAX_DEGREE}");
        let mut image = [0u8; MAX_DEGREE];
        for (i, x) in image.iter_mut().enumerate() {
            *x = i as u8;
        }
        Perm {
            degree: degree as u8,
            image,
        }
    }

    /// From a one-based image list `[g(1), ..., g(n)]`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(Error::Size(format!("degree {n} > {MAX_DEGREE}")));
        }
        let mut seen = [false; MAX_DEGREE];
        let mut p = Perm::identity(n);
        for (i, &x) in images.iter().enumerate() {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::Domain(format!("{images:?} is not a bijection of 1..{n}")));
            }
            seen[x - 1] = true;
            p.image[i] = (x - 1) as u8;
        }
        Ok(p)
    }

    /// Parse cycle notation such as `"(135)(246)"` or `"(1 3 5)(2 4 6)"`.
    /// Multi-digit points need spaces or commas. `"()"` is the identity.
    pub fn from_cycles(degree: usize, cycles: &str) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Size(format!("degree {degree} > {MAX_DEGREE}")));
        }
        let mut p = Perm::identity(degree);
        let mut touched = [false; MAX_DEGREE];
        let body = cycles.trim();
        for chunk in body.split(')') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk
                .strip_prefix('(')
                .ok_or_else(|| Error::Domain(format!("malformed cycle notation {cycles:?}")))?;
            let points: Vec<usize> = if inner.contains([' ', ',']) {
                inner
                    .split([' ', ','])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Domain(format!("bad point in {cycles:?}")))?
            } else {
                inner
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Domain(format!("bad point in {cycles:?}")))?
            };
            for (k, &x) in points.iter().enumerate() {
                if x == 0 || x > degree || touched[x - 1] {
                    return Err(Error::Domain(format!(
                        "point {x} invalid or repeated in {cycles:?}"
                    )));
                }
                touched[x - 1] = true;
                let next = points[(k + 1) % points.len()];
                p.image[x - 1] = (next - 1) as u8;
            }
        }
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    /// Image of the one-based point `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.image[x - 1] as usize + 1
    }

    pub fn is_identity(&self) -> bool {
        (0..self.degree as usize).all(|i| self.image[i] as usize == i)
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = *self;
        for i in 0..self.degree as usize {
            out.image[i] = self.image[other.image[i] as usize];
        }
        out
    }

    pub fn inverse(&self) -> Perm {
        let mut out = *self;
        for i in 0..self.degree as usize {
            out.image[self.image[i] as usize] = i as u8;
        }
        out
    }

    /// `h * self * h^-1`.
    pub fn conjugate_by(&self, h: &Perm) -> Perm {
        h.compose(self).compose(&h.inverse())
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = *self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    /// Orbit sizes on `{1..n}`, including fixed points, in order of first
    /// point.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree as usize;
        let mut seen = [false; MAX_DEGREE];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.image[x] as usize;
                len += 1;
            }
            out.push(len);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(1u64, |a, l| a / gcd(a, l as u64) * l as u64)
    }

    /// `e(g)`: the gcd of the orbit sizes of `g` on `{1..n}`.
    pub fn e(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(0u64, |a, l| gcd(a, l as u64))
    }
}

impl fmt::Display for Perm {
    /// Cycle notation with fixed points omitted; the identity is `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree as usize;
        let wide = n >= 10;
        let mut seen = [false; MAX_DEGREE];
        let mut any = false;
        for start in 0..n {
            if seen[start] || self.image[start] as usize == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                if wide && !first {
                    write!(f, " ")?;
                }
                first = false;
                seen[x] = true;
                write!(f, "{}", x + 1)?;
                x = self.image[x] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let g = Perm::from_cycles(6, "(135)(246)").unwrap();
        assert_eq!(g.to_string(), "(135)(246)");
        assert_eq!(g.apply(1), 3);
        assert_eq!(g.apply(6), 2);
        assert_eq!(Perm::from_cycles(6, "()").unwrap(), Perm::identity(6));
        assert_eq!(Perm::from_cycles(12, "(1 12)").unwrap().apply(12), 1);
        assert!(Perm::from_cycles(6, "(17)").is_err());
        assert!(Perm::from_cycles(6, "(11)").is_err());
        assert!(Perm::from_images(&[1, 1]).is_err());
    }

    #[test]
    fn composition_applies_right_first() {
        let a = Perm::from_cycles(3, "(12)").unwrap();
        let b = Perm::from_cycles(3, "(23)").unwrap();
        // (a*b)(2) = a(b(2)) = a(3) = 3
        assert_eq!(a.compose(&b).apply(2), 3);
        assert_eq!(a.compose(&b).to_string(), "(123)");
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn e_values() {
        assert_eq!(Perm::identity(6).e(), 1);
        assert_eq!(Perm::from_cycles(6, "(34)(56)").unwrap().e(), 1);
        assert_eq!(Perm::from_cycles(6, "(135)(246)").unwrap().e(), 3);
        assert_eq!(Perm::from_cycles(4, "(1234)").unwrap().e(), 4);
        assert_eq!(Perm::from_cycles(4, "(13)(24)").unwrap().e(), 2);
    }

    #[test]
    fn order_and_power() {
        let g = Perm::from_cycles(6, "(123456)").unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.pow(6).is_identity());
        assert_eq!(g.pow(3).to_string(), "(14)(25)(36)");
    }
}

//! Quadratic discriminants, binary quadratic forms and class groups of
//! imaginary quadratic fields.
//!
//! Class groups are computed from the reduced forms of the discriminant
//! under Gauss composition; their structure is read off from element
//! orders. Genus theory supplies the 2-rank independently.

use std::collections::HashMap;
use std::fmt;

use crate::arith::{factorize_u64, Factorization, SquarefreeSieve};
use crate::error::{Error, Result};
use crate::finabelian::FiniteAbelianGroup;

/// Largest `|d|` accepted by [`class_group`].
pub const MAX_CLASS_GROUP_DISC: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

/// A fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadDisc(i64);

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let m4 = d.rem_euclid(4);
    if m4 == 1 {
        return factorize_u64(d.unsigned_abs()).is_squarefree();
    }
    if m4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && factorize_u64(m.unsigned_abs()).is_squarefree();
    }
    false
}

impl QuadDisc {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental(d) {
            Ok(QuadDisc(d))
        } else {
            Err(Error::Domain(format!("{d} is not a fundamental discriminant")))
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn sign(self) -> Sign {
        if self.0 < 0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn is_imaginary(self) -> bool {
        self.0 < 0
    }

    pub fn factorization(self) -> Factorization {
        factorize_u64(self.0.unsigned_abs())
    }

    /// Product of the primes ramified in `Q(√d)`, i.e. `rad(|d|)`.
    pub fn ramified_product(self) -> u64 {
        self.factorization().radical()
    }

    /// Number of ramified primes.
    pub fn omega(self) -> u32 {
        self.factorization().omega() as u32
    }

    /// 2-rank of the class group by genus theory: `ω(d) - 1`. For real
    /// fields this is the 2-rank of the narrow class group.
    pub fn genus_rank2(self) -> u32 {
        self.omega() - 1
    }
}

impl fmt::Display for QuadDisc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The quadratic discriminants whose ramified primes are exactly the
/// primes of the squarefree `c`: one for odd `c`, three for even `c`.
pub fn discriminants_with_radical(c: u64) -> Vec<QuadDisc> {
    let c = c as i64;
    let mut out = Vec::with_capacity(3);
    if c % 2 == 1 {
        let d = if c % 4 == 1 { c } else { -c };
        if d != 1 {
            out.push(QuadDisc(d));
        }
    } else {
        let m = c / 2;
        // 4m' with m' = ±m ≡ 3 mod 4, then 8m' for both signs
        out.push(QuadDisc(if m % 4 == 3 { 4 * m } else { -4 * m }));
        out.push(QuadDisc(-8 * m));
        out.push(QuadDisc(8 * m));
    }
    out.sort_by_key(|d| (d.0.unsigned_abs(), d.0));
    out
}

/// All fundamental discriminants with `|d| <= limit` of the given sign,
/// ascending in `|d|`.
pub fn fundamental_discriminants(limit: u64, sign: Sign) -> impl Iterator<Item = QuadDisc> {
    let sieve = SquarefreeSieve::new(limit);
    let want_neg = sign == Sign::Negative;
    let mut out: Vec<QuadDisc> = sieve.par_fold(
        Vec::new,
        |acc, n, _| {
            let n = n as i64;
            let m = if want_neg { -n } else { n };
            if m.rem_euclid(4) == 1 && m != 1 {
                acc.push(QuadDisc(m));
            }
            let r = m.rem_euclid(4);
            if (r == 2 || r == 3) && 4 * n as u64 <= limit {
                acc.push(QuadDisc(4 * m));
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    out.sort_by_key(|d| d.0.unsigned_abs());
    out.into_iter()
}

/// A binary quadratic form `ax² + bxy + cy²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, u, v) with u a + v b = g >= 0
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl QForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The principal form of discriminant `d < 0`.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        QForm::new(1, b, (b * b - d) / 4)
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a
            && self.a <= self.c
            && !((self.b.abs() == self.a || self.a == self.c) && self.b < 0)
    }

    /// The unique reduced form equivalent to a positive definite form.
    pub fn reduce(&self) -> Self {
        let d = self.discriminant() as i128;
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        assert!(a > 0 && d < 0, "reduction needs a positive definite form");
        loop {
            if b.abs() > a || b == -a {
                // translate b into (-a, a]
                let r = (a - b).div_euclid(2 * a);
                let nb = b + 2 * a * r;
                c = (nb * nb - d) / (4 * a);
                b = nb;
            }
            if a > c {
                (a, c) = (c, a);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        QForm::new(a as i64, b as i64, c as i64)
    }

    /// Gauss composition followed by reduction.
    pub fn compose(&self, other: &QForm) -> QForm {
        let disc = self.discriminant();
        debug_assert_eq!(disc, other.discriminant());
        let (f1, f2) = if self.a > other.a { (other, self) } else { (self, other) };
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (g, u, _) = xgcd(a2, a1);
            (g, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (g, u, v) = xgcd(s, d);
            (g, u, -v)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc as i128) / (4 * a3);
        debug_assert_eq!(b3 * b3 - 4 * a3 * c3, disc as i128);
        QForm::new(
            i64::try_from(a3).expect("composed form fits in i64"),
            i64::try_from(b3).expect("composed form fits in i64"),
            i64::try_from(c3).expect("composed form fits in i64"),
        )
        .reduce()
    }

    /// Inverse class `(a, -b, c)`, reduced.
    pub fn inverse(&self) -> QForm {
        QForm::new(self.a, -self.b, self.c).reduce()
    }

    pub fn pow(&self, mut k: u64) -> QForm {
        let mut acc = QForm::principal(self.discriminant());
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// All primitive reduced forms of discriminant `d < 0`, sorted.
pub fn reduced_forms(d: i64) -> Vec<QForm> {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "bad discriminant {d}");
    let mut out = Vec::new();
    let bmax = ((-d) as f64 / 3.0).sqrt() as i64 + 1;
    let mut b = d.rem_euclid(2);
    while b <= bmax {
        let m = (b * b - d) / 4;
        let mut a = b.max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                if crate::arith::gcd(crate::arith::gcd(a as u64, b as u64), c as u64) == 1 {
                    out.push(QForm::new(a, b, c));
                    if b != 0 && b != a && a != c {
                        out.push(QForm::new(a, -b, c));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    out
}

/// Class number `h(d)` for `d < 0`: the number of reduced forms.
pub fn class_number(d: i64) -> usize {
    reduced_forms(d).len()
}

/// The class group of `Q(√d)` for a negative fundamental discriminant.
pub fn class_group(d: QuadDisc) -> Result<FiniteAbelianGroup> {
    if !d.is_imaginary() {
        return Err(Error::Domain(format!("{d} is not negative")));
    }
    if d.0.unsigned_abs() > MAX_CLASS_GROUP_DISC {
        return Err(Error::Bounds(format!("|{d}| exceeds {MAX_CLASS_GROUP_DISC}")));
    }
    let forms = reduced_forms(d.0);
    let h = forms.len() as u64;
    let id = QForm::principal(d.0);
    let primes: Vec<u64> = factorize_u64(h).primes().collect();
    let orders: Vec<u64> = forms
        .iter()
        .map(|f| {
            let mut ord = h;
            for &q in &primes {
                while ord % q == 0 && f.pow(ord / q) == id {
                    ord /= q;
                }
            }
            ord
        })
        .collect();
    FiniteAbelianGroup::from_element_orders(&orders)
}

/// Reduced forms of order at most 2 (`b = 0`, `b = a` or `a = c`), for
/// `d < 0`. Enumerates only `a <= sqrt(|d|/3)`.
pub fn ambiguous_forms(d: i64) -> Vec<QForm> {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "bad discriminant {d}");
    let primitive = |f: &QForm| {
        crate::arith::gcd(crate::arith::gcd(f.a as u64, f.b.unsigned_abs()), f.c as u64) == 1
    };
    let mut out = Vec::new();
    let amax = ((-d) as f64 / 3.0).sqrt() as i64 + 1;
    for a in 1..=amax {
        // b = 0
        if d % 4 == 0 && (-d / 4) % a == 0 {
            let f = QForm::new(a, 0, -d / 4 / a);
            if a <= f.c && primitive(&f) {
                out.push(f);
            }
        }
        // b = a
        let num = a * a - d;
        if num % (4 * a) == 0 {
            let f = QForm::new(a, a, num / (4 * a));
            if a <= f.c && primitive(&f) {
                out.push(f);
            }
        }
        // a = c, 0 < b < a
        let bb = d + 4 * a * a;
        if bb > 0 {
            let b = bb.isqrt();
            if b * b == bb && b < a && b > 0 {
                let f = QForm::new(a, b, a);
                if primitive(&f) {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `rk_2 Cl(d)` from the number of ambiguous classes, `2^{rk_2}`.
pub fn two_rank(d: QuadDisc) -> Result<u32> {
    if !d.is_imaginary() {
        return Err(Error::Domain(format!("{d} is not negative")));
    }
    let n = ambiguous_forms(d.0).len();
    if !n.is_power_of_two() {
        return Err(Error::Consistency(format!("{n} ambiguous classes for {d}")));
    }
    Ok(n.trailing_zeros())
}

/// Composition table of the reduced forms of `d`, as indices into
/// [`reduced_forms`].
pub fn composition_table(d: i64) -> (Vec<QForm>, Vec<Vec<usize>>) {
    let forms = reduced_forms(d);
    let index: HashMap<QForm, usize> = forms.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let table = forms
        .iter()
        .map(|f| forms.iter().map(|g| index[&f.compose(g)]).collect())
        .collect();
    (forms, table)
}

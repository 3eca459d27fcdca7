//! Floating-point helpers: double-double accumulation for the long integer
//! vectors that appear along thin cylinders, and small vector utilities.

use core::cmp::Ordering;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion for integers of magnitude below 2^106.
    pub fn from_i128(x: i128) -> Dd {
        let hi = x as f64;
        let lo = (x - hi as i128) as f64;
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    #[cfg(test)]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul_f64(q1).neg());
        let q2 = r.hi / other.hi;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Fractional part in `[0, 1)`, rounded to `f64`.
    pub fn fract(self) -> f64 {
        let fh = libm::floor(self.hi);
        let rest = Dd { hi: self.hi - fh, lo: self.lo };
        // self.hi - fh is exact; renormalise before the second floor.
        let (h, l) = two_sum(rest.hi, rest.lo);
        let f = libm::floor(h);
        let v = (h - f) + l;
        if v >= 1.0 {
            v - 1.0
        } else if v < 0.0 {
            let w = v + 1.0;
            if w >= 1.0 {
                0.0
            } else {
                w
            }
        } else {
            v
        }
    }
}

/// `sum_i k_i * x_i` in double-double precision. Exact products for
/// `|k_i| < 2^53`.
pub(crate) fn dot_int_dd(k: &[i64], x: &[f64]) -> Dd {
    let mut acc = Dd::ZERO;
    for (&ki, &xi) in k.iter().zip(x) {
        let (p, e) = two_prod(ki as f64, xi);
        acc = acc.add(Dd { hi: p, lo: e });
    }
    acc
}

pub(crate) fn dot_dd(a: &[f64], b: &[f64]) -> Dd {
    let mut acc = Dd::ZERO;
    for (&ai, &bi) in a.iter().zip(b) {
        let (p, e) = two_prod(ai, bi);
        acc = acc.add(Dd { hi: p, lo: e });
    }
    acc
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

pub(crate) fn norm2_int(k: &[i64]) -> i128 {
    k.iter().map(|&v| (v as i128) * (v as i128)).sum()
}

pub(crate) fn norm_int(k: &[i64]) -> f64 {
    libm::sqrt(norm2_int(k) as f64)
}

/// Representative of `{k, -k}` whose first nonzero entry is positive.
pub fn canonical_sign(k: &mut [i64]) {
    if let Some(&first) = k.iter().find(|&&v| v != 0) {
        if first < 0 {
            k.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

pub(crate) fn is_canonical(k: &[i64]) -> bool {
    k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Order used for all tie-breaks: value, then squared norm, then
/// lexicographic order of entries.
pub(crate) fn cmp_ranked(a: (f64, &[i64]), b: (f64, &[i64])) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| norm2_int(a.1).cmp(&norm2_int(b.1))).then_with(|| a.1.cmp(b.1))
}

pub(crate) fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

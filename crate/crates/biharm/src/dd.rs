//! Double-double arithmetic (about 32 significant digits) built from
//! error-free transforms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    pub const FRAC_PI_2: Dd = Dd { hi: std::f64::consts::FRAC_PI_2, lo: 6.123233995736766e-17 };

    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        // One Newton step from the f64 root.
        let r = self - Dd::from_f64(x) * Dd::from_f64(x);
        Dd::from_f64(x) + Dd::from_f64(r.hi / (2.0 * x))
    }

    /// Nearest integer of the value as f64.
    pub fn round(self) -> f64 {
        let r = self.hi.round();
        if r == self.hi {
            r + self.lo.round()
        } else if (r - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // tie broken by the low word
            if self.lo < 0.0 && r > self.hi {
                r - 1.0
            } else if self.lo > 0.0 && r < self.hi {
                r + 1.0
            } else {
                r
            }
        } else {
            r
        }
    }

    /// (sin x, cos x) by reduction modulo π/2 and Taylor series.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self / Dd::FRAC_PI_2).round();
        let r = self - Dd::FRAC_PI_2.mul_f64(k);
        // Halve three times to speed up the series, then double back.
        let t = r.mul_f64(0.125);
        let t2 = t.sqr();
        let mut s = t;
        let mut c = Dd::ONE;
        let mut term_s = t;
        let mut term_c = Dd::ONE;
        for n in 1..20 {
            let n = n as f64;
            term_s = -(term_s * t2) / Dd::from_f64((2.0 * n) * (2.0 * n + 1.0));
            term_c = -(term_c * t2) / Dd::from_f64((2.0 * n - 1.0) * (2.0 * n));
            s += term_s;
            c += term_c;
            if term_s.hi.abs() < 1e-36 && term_c.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..3 {
            let s2 = (s * c).mul_f64(2.0);
            let c2 = c * c - s * s;
            s = s2;
            c = c2;
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}{:+.3e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_double() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third.mul_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let two = Dd::from_f64(2.0).sqrt();
        assert!((two * two - Dd::from_f64(2.0)).to_f64().abs() < 1e-31);
        let tiny = Dd::ONE + Dd::from_f64(1e-20);
        assert!(tiny > Dd::ONE);
        assert_eq!((tiny - Dd::ONE).to_f64(), 1e-20);
    }

    #[test]
    fn trig_identities_and_known_values() {
        for i in -40..40 {
            let x = Dd::from_f64(i as f64 * 0.37 + 0.001);
            let (s, c) = x.sin_cos();
            assert!((s * s + c * c - Dd::ONE).to_f64().abs() < 1e-30);
            assert!((s.to_f64() - (i as f64 * 0.37 + 0.001).sin()).abs() < 1e-15);
        }
        // sin(π/6) = 1/2 with π/6 formed in double-double
        let x = Dd::PI / Dd::from_f64(6.0);
        assert!((x.sin() - Dd::from_f64(0.5)).to_f64().abs() < 1e-31);
        assert!((Dd::ONE.cos().to_f64() - 0.5403023058681398).abs() < 1e-16);
    }
}

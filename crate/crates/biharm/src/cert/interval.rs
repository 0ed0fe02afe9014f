//! Closed intervals with outward rounding.
//!
//! The platform gives no portable control over the FPU rounding mode, so
//! directed rounding is emulated: each operation is done in round-to-nearest
//! and an error-free transform (two-sum, FMA residual) tells whether the
//! rounded value lies above or below the exact one. Only then is the result
//! moved one ulp outward, so endpoints are as tight as true directed
//! rounding for + − × ÷ and √.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ROUNDING_MODE: &str = "emulated-directed (error-free transforms)";

#[inline]
fn add_err(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = add_err(a, b);
    if e < 0.0 || !s.is_finite() {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = add_err(a, b);
    if e > 0.0 || !s.is_finite() {
        s.next_up()
    } else {
        s
    }
}

/// Products that land near the subnormal range lose the exactness of the
/// FMA residual; those are widened unconditionally.
const TINY: f64 = 1e-290;

fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.abs() < TINY && a != 0.0 && b != 0.0 {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.abs() < TINY && a != 0.0 && b != 0.0 {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of (a/b − q) from the exact remainder a − q·b.
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    if r == 0.0 {
        0.0
    } else if (r < 0.0) == (b < 0.0) {
        1.0
    } else {
        -1.0
    }
}

fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q.abs() < TINY && a != 0.0 {
        return q.next_down();
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q.abs() < TINY && a != 0.0 {
        return q.next_up();
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s.mul_add(s, -x) > 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if s.mul_add(s, -x) < 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::Config(format!("invalid interval [{lo}, {hi}]")))
        }
    }

    pub const fn point(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    /// The two floats adjacent to π.
    pub fn pi() -> Interval {
        let p = std::f64::consts::PI;
        Interval { lo: p, hi: p.next_up() }
    }

    pub fn half_pi() -> Interval {
        Interval::pi().scale_pow2(0.5)
    }

    /// Multiplication by a power of two is exact.
    pub fn scale_pow2(self, k: f64) -> Interval {
        if k >= 0.0 {
            Interval { lo: self.lo * k, hi: self.hi * k }
        } else {
            Interval { lo: self.hi * k, hi: self.lo * k }
        }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn split(self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    pub fn div(self, b: Interval) -> Result<Interval> {
        if b.contains_zero() {
            return Err(Error::DivisionByZero(b.to_string()));
        }
        let cands_lo = [div_down(self.lo, b.lo), div_down(self.lo, b.hi), div_down(self.hi, b.lo), div_down(self.hi, b.hi)];
        let cands_hi = [div_up(self.lo, b.lo), div_up(self.lo, b.hi), div_up(self.hi, b.lo), div_up(self.hi, b.hi)];
        Ok(Interval {
            lo: cands_lo.into_iter().fold(f64::INFINITY, f64::min),
            hi: cands_hi.into_iter().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    pub fn sqr(self) -> Interval {
        self.powi(2)
    }

    pub fn powi(self, n: u32) -> Interval {
        fn pow_down(a: f64, n: u32) -> f64 {
            (0..n).fold(1.0, |acc, _| mul_down(acc, a))
        }
        fn pow_up(a: f64, n: u32) -> f64 {
            (0..n).fold(1.0, |acc, _| mul_up(acc, a))
        }
        if n == 0 {
            return Interval::point(1.0);
        }
        let (alo, ahi) = (self.lo.abs(), self.hi.abs());
        if n % 2 == 0 {
            if self.contains_zero() {
                Interval { lo: 0.0, hi: pow_up(alo.max(ahi), n) }
            } else {
                let (a, b) = if self.lo > 0.0 { (self.lo, self.hi) } else { (ahi, alo) };
                Interval { lo: pow_down(a, n), hi: pow_up(b, n) }
            }
        } else {
            // odd powers are monotone
            let lo = if self.lo >= 0.0 { pow_down(self.lo, n) } else { -pow_up(alo, n) };
            let hi = if self.hi >= 0.0 { pow_up(self.hi, n) } else { -pow_down(ahi, n) };
            Interval { lo, hi }
        }
    }

    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::Config(format!("sqrt of {self}")));
        }
        Ok(Interval { lo: sqrt_down(self.lo), hi: sqrt_up(self.hi) })
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn min(self, o: Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn max(self, o: Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    /// Range of a 2π-periodic function with a maximum at `peak` + 2kπ and
    /// a minimum at `peak` + π + 2kπ, given an endpoint evaluator.
    fn periodic(self, f: fn(f64) -> f64, peak: Interval) -> Interval {
        let two_pi = Interval::pi().scale_pow2(2.0);
        if self.width() >= 6.0 {
            return Interval { lo: -1.0, hi: 1.0 };
        }
        // libm sin/cos are faithful to within an ulp; two ulps of slack.
        let out = |y: f64| (y.next_down().next_down().max(-1.0), y.next_up().next_up().min(1.0));
        let (a_lo, a_hi) = out(f(self.lo));
        let (b_lo, b_hi) = out(f(self.hi));
        let mut lo = a_lo.min(b_lo);
        let mut hi = a_hi.max(b_hi);
        let k0 = ((self.lo - peak.hi) / two_pi.lo).floor() - 1.0;
        for j in 0..4 {
            let k = Interval::point(k0 + j as f64);
            let top = peak + k * two_pi;
            let bottom = top + Interval::pi();
            if top.intersects(self) {
                hi = 1.0;
            }
            if bottom.intersects(self) {
                lo = -1.0;
            }
        }
        Interval { lo, hi }
    }

    pub fn sin(self) -> Interval {
        self.periodic(f64::sin, Interval::half_pi())
    }

    pub fn cos(self) -> Interval {
        self.periodic(f64::cos, Interval::point(0.0))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Interval {
        Interval::point(x)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, b: Interval) -> Interval {
        Interval { lo: add_down(self.lo, b.lo), hi: add_up(self.hi, b.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, b: Interval) -> Interval {
        Interval { lo: add_down(self.lo, -b.hi), hi: add_up(self.hi, -b.lo) }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, b: Interval) -> Interval {
        let (a0, a1, b0, b1) = (self.lo, self.hi, b.lo, b.hi);
        let lo = mul_down(a0, b0).min(mul_down(a0, b1)).min(mul_down(a1, b0)).min(mul_down(a1, b1));
        let hi = mul_up(a0, b0).max(mul_up(a0, b1)).max(mul_up(a1, b0)).max(mul_up(a1, b1));
        Interval { lo, hi }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            fn $m(self, b: f64) -> Interval { $tr::$m(self, Interval::point(b)) }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            fn $m(self, b: Interval) -> Interval { $tr::$m(Interval::point(self), b) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul);

/// Exact rational value of a finite float as `m/2^k` or `m*2^k`.
pub fn dyadic_string(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
    while mant % 2 == 0 {
        mant /= 2;
        exp += 1;
    }
    match exp.cmp(&0) {
        std::cmp::Ordering::Equal => format!("{sign}{mant}"),
        std::cmp::Ordering::Less => format!("{sign}{mant}/2^{}", -exp),
        std::cmp::Ordering::Greater => format!("{sign}{mant}*2^{exp}"),
    }
}

/// Cartesian product of intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalBox {
    dims: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Config("empty box".into()));
        }
        Ok(IntervalBox { dims })
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        IntervalBox::new(bounds.iter().map(|&(a, b)| Interval::new(a, b)).collect::<Result<_>>()?)
    }

    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn max_width(&self) -> f64 {
        self.dims.iter().map(|i| i.width()).fold(0.0, f64::max)
    }

    /// Index of the widest coordinate, first on ties.
    pub fn widest(&self) -> usize {
        let mut best = 0;
        for (i, d) in self.dims.iter().enumerate() {
            if d.width() > self.dims[best].width() {
                best = i;
            }
        }
        best
    }

    pub fn bisect(&self) -> (IntervalBox, IntervalBox) {
        let k = self.widest();
        let (a, b) = self.dims[k].split();
        let mut l = self.dims.clone();
        let mut r = self.dims.clone();
        l[k] = a;
        r[k] = b;
        (IntervalBox { dims: l }, IntervalBox { dims: r })
    }

    pub fn center(&self) -> Vec<f64> {
        self.dims.iter().map(|i| i.mid()).collect()
    }

    pub fn center_box(&self) -> IntervalBox {
        IntervalBox { dims: self.dims.iter().map(|i| Interval::point(i.mid())).collect() }
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.dims.iter().zip(p).all(|(i, &x)| i.contains(x))
    }

    pub fn is_subset_of(&self, other: &IntervalBox) -> bool {
        self.dims.len() == other.dims.len() && self.dims.iter().zip(&other.dims).all(|(a, b)| a.is_subset_of(*b))
    }
}

impl std::ops::Index<usize> for IntervalBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.dims[i]
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

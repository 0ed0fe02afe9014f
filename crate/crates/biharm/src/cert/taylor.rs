//! Taylor enclosures of sin and cos about zero, and the two-term
//! enclosures c₃φ₀³ + c₁φ of the v⁰ and v² coefficients of P near the
//! origin.
//!
//! The coefficients are expanded exactly: polynomials in φ₀, φ and √6 with
//! rational coefficients, where each remainder is a formal symbol θ ∈ [−1, 1]
//! times its Lagrange bound. Low-order terms therefore cancel exactly, and
//! only the surviving high-order terms are bounded with intervals.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use super::funcs::sqrt6;
use super::interval::{Interval, IntervalBox};
use crate::error::{Error, Result};

type Q = Ratio<i128>;

pub const SIN_DEGREE: u32 = 6;
pub const COS_DEGREE: u32 = 5;

fn factorial(n: u32) -> i128 {
    (1..=n as i128).product()
}

/// Bounds a rational by an interval; exact when numerator and denominator
/// fit in 53 bits.
fn rational_interval(q: &Q) -> Interval {
    let widen = |n: i128| {
        let x = n as f64;
        if n.unsigned_abs() <= 1u128 << 53 {
            Interval::point(x)
        } else {
            Interval::new(x.next_down(), x.next_up()).expect("ordered")
        }
    };
    widen(*q.numer()).div(widen(*q.denom())).expect("denominator is positive")
}

/// Polynomial truncation of sin or cos about 0 plus a symmetric remainder.
#[derive(Clone, Debug, Serialize)]
pub struct TaylorEnclosure {
    pub center: f64,
    pub degree: u32,
    /// Coefficient of xᵏ for k = 0..=degree.
    pub coefficients: Vec<Interval>,
    pub remainder: Interval,
    pub domain: Interval,
}

impl TaylorEnclosure {
    fn build(domain: Interval, degree: u32, phase: u32) -> Self {
        let coefficients = (0..=degree)
            .map(|k| {
                // k-th derivative of sin (phase 1) or cos (phase 0) at zero
                let r = (k + 3 * phase) % 4;
                let sign = match r {
                    0 => 1,
                    2 => -1,
                    _ => 0,
                };
                rational_interval(&Q::new(sign, factorial(k)))
            })
            .collect();
        let m = domain.abs().powi(degree + 1) * rational_interval(&Q::new(1, factorial(degree + 1)));
        let remainder = Interval::new(-m.hi(), m.hi()).expect("ordered");
        TaylorEnclosure { center: 0.0, degree, coefficients, remainder, domain }
    }

    /// sin to sixth order on `domain`.
    pub fn sin(domain: Interval) -> Self {
        Self::build(domain, SIN_DEGREE, 1)
    }

    /// cos to fifth order on `domain`.
    pub fn cos(domain: Interval) -> Self {
        Self::build(domain, COS_DEGREE, 0)
    }

    pub fn eval(&self, x: Interval) -> Interval {
        let poly = self.coefficients.iter().rev().fold(Interval::point(0.0), |acc, c| acc * x + *c);
        poly + self.remainder
    }
}

const N_THETA: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Mono {
    phi0: u32,
    phi: u32,
    root6: u32,
    theta: [u32; N_THETA],
}

const ONE: Mono = Mono { phi0: 0, phi: 0, root6: 0, theta: [0; N_THETA] };

#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<Mono, Q>);

impl Poly {
    fn term(m: Mono, c: Q) -> Poly {
        let mut p = Poly::default();
        p.push(m, c);
        p
    }

    fn constant(c: i128) -> Poly {
        Poly::term(ONE, Q::from_integer(c))
    }

    fn push(&mut self, m: Mono, c: Q) {
        let e = self.0.entry(m).or_insert_with(|| Q::from_integer(0));
        *e += c;
        if *e.numer() == 0 {
            self.0.remove(&m);
        }
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.0 {
            r.push(*m, *c);
        }
        r
    }

    fn scale(&self, k: Q) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (*m, c * k)).collect())
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(Q::from_integer(-1)))
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &o.0 {
                let mut c = ca * cb;
                let mut m = Mono {
                    phi0: a.phi0 + b.phi0,
                    phi: a.phi + b.phi,
                    root6: a.root6 + b.root6,
                    theta: [0; N_THETA],
                };
                for i in 0..N_THETA {
                    m.theta[i] = a.theta[i] + b.theta[i];
                }
                if m.root6 == 2 {
                    m.root6 = 0;
                    c *= Q::from_integer(6);
                }
                r.push(m, c);
            }
        }
        r
    }

    fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(1), |acc, _| acc.mul(self))
    }
}

#[derive(Clone, Copy)]
enum Var {
    Phi0,
    Phi,
}

/// Truncated series of sin (phase 1) or cos (phase 0) at k·var with the
/// remainder carried by symbol θ_`slot`.
fn trig(var: Var, k: i128, phase: u32, slot: usize) -> Poly {
    let degree = if phase == 1 { SIN_DEGREE } else { COS_DEGREE };
    let x = match var {
        Var::Phi0 => Poly::term(Mono { phi0: 1, ..ONE }, Q::from_integer(k)),
        Var::Phi => Poly::term(Mono { phi: 1, ..ONE }, Q::from_integer(k)),
    };
    let mut out = Poly::default();
    for n in 0..=degree {
        let sign = match (n + 3 * phase) % 4 {
            0 => 1,
            2 => -1,
            _ => 0,
        };
        if sign != 0 {
            out = out.add(&x.pow(n).scale(Q::new(sign, factorial(n))));
        }
    }
    let mut theta = [0; N_THETA];
    theta[slot] = 1;
    let rem = x.pow(degree + 1).mul(&Poly::term(Mono { theta, ..ONE }, Q::new(1, factorial(degree + 1))));
    out.add(&rem)
}

/// Which coefficient of P to enclose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    V0,
    V2,
}

impl Which {
    /// Box on which the expansion is claimed.
    pub fn domain(self) -> IntervalBox {
        let b = match self {
            Which::V0 => [(0.0, 0.01), (0.0, 0.021)],
            Which::V2 => [(0.0, 0.11), (0.0, 0.0006)],
        };
        IntervalBox::from_bounds(&b).expect("valid box")
    }

    /// Published enclosure (φ₀³ coefficient, φ coefficient).
    pub fn reference(self) -> [(f64, f64); 2] {
        match self {
            Which::V0 => [(13.2121, 13.24), (15.673, 15.6867)],
            Which::V2 => [(9.76536, 9.83056), (21.2159, 21.4586)],
        }
    }
}

fn expansion(which: Which) -> Poly {
    let sin_phi0 = trig(Var::Phi0, 1, 1, 0);
    let cos_phi0 = trig(Var::Phi0, 1, 0, 1);
    let sin_2phi = trig(Var::Phi, 2, 1, 4);
    let two_root6 = Poly::term(Mono { root6: 1, ..ONE }, Q::from_integer(2));
    let phi0 = Poly::term(Mono { phi0: 1, ..ONE }, Q::from_integer(1));
    let phi = Poly::term(Mono { phi: 1, ..ONE }, Q::from_integer(1));
    let dp = phi.sub(&phi0);
    let c = |k: i128| Poly::constant(k);
    match which {
        Which::V0 => {
            let sin_2phi0 = trig(Var::Phi0, 2, 1, 2);
            let cos_2phi0 = trig(Var::Phi0, 2, 0, 3);
            let cos_2phi = trig(Var::Phi, 2, 0, 5);
            let k = c(4).mul(&cos_2phi).add(&c(9));
            c(-12)
                .mul(&sin_2phi0)
                .sub(&c(12).mul(&dp.add(&sin_2phi)))
                .add(&two_root6.mul(&dp).mul(&k).mul(&cos_phi0))
                .sub(&c(12).mul(&dp).mul(&cos_2phi0))
                .add(&two_root6.mul(&k).mul(&sin_phi0))
        }
        Which::V2 => c(6)
            .mul(&two_root6)
            .mul(&sin_phi0.add(&dp.mul(&cos_phi0)))
            .sub(&c(4).mul(&sin_2phi)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoeffEnclosure {
    pub which: Which,
    pub phi0_cubed: Interval,
    pub phi: Interval,
}

impl CoeffEnclosure {
    pub fn positive(&self) -> bool {
        self.phi0_cubed.lo() > 0.0 && self.phi.lo() > 0.0
    }

    /// Largest endpoint distance to the published intervals.
    pub fn deviation(&self) -> f64 {
        let [a, b] = self.which.reference();
        let d = |i: Interval, r: (f64, f64)| (i.lo() - r.0).abs().max((i.hi() - r.1).abs());
        d(self.phi0_cubed, a).max(d(self.phi, b))
    }

    /// Both intervals meet the published ones.
    pub fn intersects_reference(&self) -> bool {
        let [a, b] = self.which.reference();
        let meets = |i: Interval, r: (f64, f64)| i.lo() <= r.1 && r.0 <= i.hi();
        meets(self.phi0_cubed, a) && meets(self.phi, b)
    }

    /// Interval value of c₃φ₀³ + c₁φ over a box.
    pub fn eval(&self, b: &IntervalBox) -> Interval {
        self.phi0_cubed * b[0].powi(3) + self.phi * b[1]
    }
}

/// Encloses the chosen coefficient as c₃φ₀³ + c₁φ over `b`. Terms with a
/// factor φ are folded into c₁, pure φ₀ terms of degree ≥ 3 into c₃; every
/// other term must cancel exactly. Requires φ₀, φ ≥ 0 on the box.
pub fn taylor_enclose_p_coeff(which: Which, b: &IntervalBox) -> Result<CoeffEnclosure> {
    if b.dim() != 2 || !b.is_subset_of(&which.domain()) {
        return Err(Error::TaylorDomain(b.to_string()));
    }
    let unit = Interval::new(-1.0, 1.0).expect("ordered");
    let r6 = sqrt6();
    let mut c3 = Interval::point(0.0);
    let mut c1 = Interval::point(0.0);
    for (m, q) in &expansion(which).0 {
        let mut v = rational_interval(q) * r6.powi(m.root6);
        for &t in &m.theta {
            v = v * unit.powi(t);
        }
        if m.phi >= 1 {
            c1 = c1 + v * b[0].powi(m.phi0) * b[1].powi(m.phi - 1);
        } else if m.phi0 >= 3 {
            c3 = c3 + v * b[0].powi(m.phi0 - 3);
        } else {
            return Err(Error::Config(format!("uncancelled term of order {} in φ₀", m.phi0)));
        }
    }
    Ok(CoeffEnclosure { which, phi0_cubed: c3, phi: c1 })
}

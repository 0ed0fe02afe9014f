//! Interval extensions of the coefficient functions being certified.
//!
//! Each function is written once over [`Arith`] and evaluated two ways:
//! the natural interval extension, and a refinement that uses interval
//! derivatives to collapse monotone directions onto a face and then
//! intersects with the mean-value and second-order centred forms.

use std::ops::{Add, Mul, Neg, Sub};

use super::interval::{Interval, IntervalBox};

/// Arithmetic needed by the certified expressions.
pub trait Arith: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn cst(x: Interval) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// 1/x, for arguments bounded away from zero.
    fn recip(self) -> Self;
    /// Exact multiplication by a power of two.
    fn pow2(self, k: f64) -> Self;

    fn k(x: f64) -> Self {
        Self::cst(Interval::point(x))
    }
}

impl Arith for Interval {
    fn cst(x: Interval) -> Self {
        x
    }
    fn sin(self) -> Self {
        Interval::sin(self)
    }
    fn cos(self) -> Self {
        Interval::cos(self)
    }
    fn recip(self) -> Self {
        Interval::point(1.0).div(self).expect("argument bounded away from zero")
    }
    fn pow2(self, k: f64) -> Self {
        self.scale_pow2(k)
    }
}

/// Value, gradient and Hessian enclosure in up to two variables. The
/// Hessian is stored as (∂₀₀, ∂₀₁, ∂₁₁).
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub v: Interval,
    pub g: [Interval; 2],
    pub h: [Interval; 3],
}

const ZERO: Interval = Interval::ZERO;

/// Position of ∂ᵢ∂ⱼ in the packed Hessian.
fn hidx(i: usize, j: usize) -> usize {
    i + j
}

impl Jet {
    pub fn var(v: Interval, i: usize) -> Jet {
        let mut g = [ZERO; 2];
        g[i] = Interval::point(1.0);
        Jet { v, g, h: [ZERO; 3] }
    }

    /// Composition with a scalar function with value v, f′ = d1, f″ = d2.
    fn chain(self, v: Interval, d1: Interval, d2: Interval) -> Jet {
        let g = self.g;
        let h = [
            d1 * self.h[0] + d2 * g[0] * g[0],
            d1 * self.h[1] + d2 * g[0] * g[1],
            d1 * self.h[2] + d2 * g[1] * g[1],
        ];
        Jet { v, g: [d1 * g[0], d1 * g[1]], h }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            g: [self.g[0] + o.g[0], self.g[1] + o.g[1]],
            h: [self.h[0] + o.h[0], self.h[1] + o.h[1], self.h[2] + o.h[2]],
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (a, b) = (self, o);
        let cross = |i: usize, j: usize| a.g[i] * b.g[j] + a.g[j] * b.g[i];
        Jet {
            v: a.v * b.v,
            g: [a.v * b.g[0] + b.v * a.g[0], a.v * b.g[1] + b.v * a.g[1]],
            h: [
                a.v * b.h[0] + b.v * a.h[0] + cross(0, 0),
                a.v * b.h[1] + b.v * a.h[1] + cross(0, 1),
                a.v * b.h[2] + b.v * a.h[2] + cross(1, 1),
            ],
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, g: [-self.g[0], -self.g[1]], h: [-self.h[0], -self.h[1], -self.h[2]] }
    }
}

impl Arith for Jet {
    fn cst(x: Interval) -> Self {
        Jet { v: x, g: [ZERO; 2], h: [ZERO; 3] }
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn recip(self) -> Self {
        let r = Arith::recip(self.v);
        let r2 = r * r;
        self.chain(r, -r2, (r2 * r).scale_pow2(2.0))
    }
    fn pow2(self, k: f64) -> Self {
        Jet {
            v: self.v.scale_pow2(k),
            g: self.g.map(|x| x.scale_pow2(k)),
            h: self.h.map(|x| x.scale_pow2(k)),
        }
    }
}

pub fn sqrt6() -> Interval {
    Interval::point(6.0).sqrt().expect("6 is positive")
}

/// [0, π/2] with the outer endpoint rounded up.
pub fn zero_to_half_pi() -> Interval {
    Interval::point(0.0).hull(Interval::half_pi())
}

/// Coefficients (c₀, c₁, c₂) of P(φ₀, φ, ·).
pub fn p_coeffs<T: Arith>(phi0: T, phi: T) -> [T; 3] {
    let k = T::k;
    let r6 = T::cst(sqrt6().scale_pow2(2.0));
    let two_phi = phi.pow2(2.0);
    let (s2p, c2p) = (two_phi.sin(), two_phi.cos());
    let (s0, c0_) = (phi0.sin(), phi0.cos());
    let two_phi0 = phi0.pow2(2.0);
    let dp = phi - phi0;
    let a = k(4.0) * c2p + k(9.0);
    let c0 = k(-12.0) * two_phi0.sin() - k(12.0) * (dp + s2p) + r6 * dp * a * c0_ - k(12.0) * dp * two_phi0.cos()
        + r6 * a * s0;
    let c1 = k(4.0) * c2p - r6.pow2(2.0) * c0_ + k(10.0);
    let c2 = k(6.0) * r6 * (s0 + dp * c0_) - k(4.0) * s2p;
    [c0, c1, c2]
}

/// φ = φ₀ + z (φ_max − φ₀), with φ_max − φ₀ = cos φ₀ / (1 + sin φ₀).
pub fn phi_from_z<T: Arith>(phi0: T, z: T) -> T {
    phi0 + z * phi0.cos() * (T::k(1.0) + phi0.sin()).recip()
}

/// A scalar expression in one or two variables.
pub trait Expr: Sync {
    fn eval<T: Arith>(&self, x: &[T]) -> T;
}

macro_rules! exprs {
    ($($(#[$m:meta])* $name:ident |$x:ident| $body:expr;)*) => {$(
        $(#[$m])*
        #[derive(Clone, Copy, Debug)]
        pub struct $name;
        impl Expr for $name {
            fn eval<T: Arith>(&self, $x: &[T]) -> T {
                $body
            }
        }
    )*};
}

exprs! {
    /// v⁰ coefficient in (φ₀, φ).
    C0 |x| p_coeffs(x[0], x[1])[0];
    /// v¹ coefficient in (φ₀, φ).
    C1 |x| p_coeffs(x[0], x[1])[1];
    /// v² coefficient in (φ₀, φ).
    C2 |x| p_coeffs(x[0], x[1])[2];
    C0Z |x| p_coeffs(x[0], phi_from_z(x[0], x[1]))[0];
    C1Z |x| p_coeffs(x[0], phi_from_z(x[0], x[1]))[1];
    C2Z |x| p_coeffs(x[0], phi_from_z(x[0], x[1]))[2];
    /// 4 cos 2φ − 2√6 cos φ₀ + 9.
    AWithoutV |x| T::k(4.0) * x[1].pow2(2.0).cos() - T::cst(sqrt6().scale_pow2(2.0)) * x[0].cos() + T::k(9.0);
    /// 6(3φ − 2 sin 2φ + 2φ cos 2φ).
    QConst |x| {
        let t = x[0].pow2(2.0);
        T::k(6.0) * (T::k(3.0) * x[0] - T::k(2.0) * t.sin() + T::k(2.0) * x[0] * t.cos())
    };
}

pub fn natural<E: Expr>(e: &E, b: &IntervalBox) -> Interval {
    e.eval(b.dims())
}

fn jet<E: Expr>(e: &E, dims: &[Interval]) -> Jet {
    let jets: Vec<Jet> = dims.iter().enumerate().map(|(i, &d)| Jet::var(d, i)).collect();
    e.eval(&jets)
}

/// Lower bounds from the mean-value and second-order forms about the
/// centre of `dims`, given the jet over the whole of `dims`.
fn centred_lo<E: Expr>(e: &E, dims: &[Interval], over: &Jet) -> f64 {
    let n = dims.len();
    let c: Vec<Interval> = dims.iter().map(|d| Interval::point(d.mid())).collect();
    let at = jet(e, &c);
    let dx: Vec<Interval> = dims.iter().zip(&c).map(|(d, c)| *d - *c).collect();
    let mut mv = at.v;
    let mut quad = at.v;
    for i in 0..n {
        mv = mv + over.g[i] * dx[i];
        quad = quad + at.g[i] * dx[i] + (over.h[hidx(i, i)] * dx[i].sqr()).scale_pow2(0.5);
        for j in i + 1..n {
            quad = quad + over.h[hidx(i, j)] * dx[i] * dx[j];
        }
    }
    mv.lo().max(quad.lo())
}

/// Enclosure of the range of `e` over `b`. The lower end uses the
/// gradient to move monotone coordinates onto the minimizing face, then
/// takes the best of the natural, mean-value and second-order forms there.
pub fn refined<E: Expr>(e: &E, b: &IntervalBox) -> Interval {
    let dims = b.dims();
    let n = dims.len();
    let mut face: Vec<Interval> = dims.to_vec();
    let mut j = jet(e, &face);
    let nat = j.v;
    let mut lo = nat.lo();
    // Each pass fixes at least one more coordinate.
    loop {
        let mut moved = false;
        for i in 0..n {
            if face[i].width() == 0.0 {
                continue;
            }
            if j.g[i].lo() >= 0.0 {
                face[i] = Interval::point(face[i].lo());
                moved = true;
            } else if j.g[i].hi() <= 0.0 {
                face[i] = Interval::point(face[i].hi());
                moved = true;
            }
        }
        if !moved {
            break;
        }
        j = jet(e, &face);
        lo = lo.max(j.v.lo());
    }
    lo = lo.max(centred_lo(e, &face, &j));
    Interval::new(lo, nat.hi().max(lo)).expect("ordered")
}

pub fn coeff_v0(b: &IntervalBox) -> Interval {
    refined(&C0, b)
}

pub fn coeff_v1(b: &IntervalBox) -> Interval {
    refined(&C1, b)
}

pub fn coeff_v2(b: &IntervalBox) -> Interval {
    refined(&C2, b)
}

pub fn coeff_v0_z(b: &IntervalBox) -> Interval {
    refined(&C0Z, b)
}

pub fn coeff_v1_z(b: &IntervalBox) -> Interval {
    refined(&C1Z, b)
}

pub fn coeff_v2_z(b: &IntervalBox) -> Interval {
    refined(&C2Z, b)
}

pub fn a_without_v(b: &IntervalBox) -> Interval {
    refined(&AWithoutV, b)
}

pub fn q_constant(b: &IntervalBox) -> Interval {
    refined(&QConst, b)
}

/// Lower bound, over v ≥ 0, of c₀ + c₁v + c₂v² with the coefficients
/// taken in (φ₀, z) coordinates. The upper end is the quadratic at the
/// vertex computed from the box centre, so it is an attained value.
pub fn quadratic_min_z(b: &IntervalBox) -> Interval {
    let (c0, c1, c2) = (coeff_v0_z(b), coeff_v1_z(b), coeff_v2_z(b));
    let lo = if c1.lo() >= 0.0 {
        c0.lo()
    } else if c2.lo() > 0.0 {
        let c1l = Interval::point(c1.lo());
        (Interval::point(c0.lo()) - c1l.sqr().div(Interval::point(c2.lo()).scale_pow2(4.0)).expect("c2 > 0")).lo()
    } else {
        -f64::MAX
    };
    let centre = b.center_box();
    let [k0, k1, k2] = p_coeffs(centre[0], phi_from_z(centre[0], centre[1]));
    let v = if k1.mid() < 0.0 && k2.mid() > 0.0 { -k1.mid() / (2.0 * k2.mid()) } else { 0.0 };
    let at_v = k0 + k1 * v + k2 * Interval::point(v).sqr();
    Interval::new(lo, at_v.hi().max(lo)).expect("ordered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interval_forms_contain_float_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20_000 {
            let phi0 = rng.gen_range(0.0..1.5707);
            let phi = rng.gen_range(0.0..1.5707);
            let w = rng.gen_range(0.0..1e-3);
            let b = IntervalBox::from_bounds(&[(phi0, phi0 + w), (phi, phi + w)]).unwrap();
            let f = regions::p_cubic(phi0, phi);
            for (k, e) in [coeff_v0(&b), coeff_v1(&b), coeff_v2(&b)].into_iter().enumerate() {
                assert!(e.contains(f[k]) || (e.lo() - f[k]).abs() < 1e-12, "{e} {}", f[k]);
            }
            let z = rng.gen_range(0.0..1.0);
            let ph = phi_from_z(Interval::point(phi0), Interval::point(z));
            let expect = phi0 + z * (regions::phi_max(phi0) - phi0);
            assert!((ph.mid() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn refined_range_is_sound() {
        // Dense samples of each sub-box never fall below the refined lower end.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let w = rng.gen_range(1e-3..0.5);
            let p0 = rng.gen_range(0.0..1.5707 - w);
            let p = rng.gen_range(0.0..1.5707 - w);
            let b = IntervalBox::from_bounds(&[(p0, p0 + w), (p, p + w)]).unwrap();
            let encl = [coeff_v0(&b), coeff_v1(&b), coeff_v2(&b)];
            for i in 0..=20 {
                for j in 0..=20 {
                    let f = regions::p_cubic(p0 + w * i as f64 / 20.0, p + w * j as f64 / 20.0);
                    for k in 0..3 {
                        assert!(f[k] >= encl[k].lo() - 1e-12 && f[k] <= encl[k].hi() + 1e-12);
                    }
                }
            }
            assert!(encl[0].lo() >= natural(&C0, &b).lo());
        }
    }

    #[test]
    fn jet_gradient_matches_difference_quotient() {
        let (p0, p, h) = (0.7, 0.3, 1e-6);
        let g = jet(&C0, &[Interval::point(p0), Interval::point(p)]);
        let f = |a: f64, b: f64| regions::p_cubic(a, b)[0];
        let d0 = (f(p0 + h, p) - f(p0 - h, p)) / (2.0 * h);
        let d1 = (f(p0, p + h) - f(p0, p - h)) / (2.0 * h);
        assert!((g.g[0].mid() - d0).abs() < 1e-6 && (g.g[1].mid() - d1).abs() < 1e-6);
    }

    #[test]
    fn half_pi_range_is_outward() {
        let r = zero_to_half_pi();
        assert!(r.lo() == 0.0 && r.hi() > std::f64::consts::FRAC_PI_2);
    }
}

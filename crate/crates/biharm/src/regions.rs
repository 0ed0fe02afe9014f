//! Five-dimensional phase-plane geometry: the region 𝒞, the tangent-line
//! frame and its w-equation, the cone 𝒦 with the ξ-equation, and the
//! growth sandwich used for blowup.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::ode::{self, Dimension, State};

/// 2√6, the value of c⋆ for d = 5.
pub fn two_root_six() -> f64 {
    2.0 * 6f64.sqrt()
}

/// Default tolerance for boundary classification.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// U₀(φ₀) = 2√6 sin φ₀.
pub fn u0(phi0: f64) -> f64 {
    two_root_six() * phi0.sin()
}

pub fn du0(phi0: f64) -> f64 {
    two_root_six() * phi0.cos()
}

/// Upper boundary curve of 𝒞, defined on [0, π]; arguments outside are
/// clamped.
pub fn boundary_f(x: f64) -> f64 {
    let x = x.clamp(0.0, PI);
    if x <= FRAC_PI_2 {
        u0(x)
    } else {
        two_root_six()
    }
}

/// Positive exactly on 𝒞, zero on its boundary, and negative outside
/// (within the strip 0 ≤ x ≤ π the sign matches membership).
pub fn region_c_margin(x: f64, y: f64) -> f64 {
    x.min(PI - x).min(boundary_f(x) - y).min(y + boundary_f(PI - x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    Inside,
    Boundary,
    Outside,
}

pub fn in_region_c(x: f64, y: f64, tol: f64) -> RegionClass {
    let m = region_c_margin(x, y);
    if m.abs() <= tol {
        RegionClass::Boundary
    } else if m > 0.0 {
        RegionClass::Inside
    } else {
        RegionClass::Outside
    }
}

/// Membership in −𝒞.
pub fn in_minus_c(x: f64, y: f64, tol: f64) -> RegionClass {
    in_region_c(-x, -y, tol)
}

/// Tangent line to U₀ at φ₀ and the shifted coordinate w = φ″ − y_{φ₀}(φ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentFrame {
    pub phi0: f64,
    pub y0: f64,
    pub phi_max: f64,
}

impl TangentFrame {
    pub fn new(phi0: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&phi0) {
            return Err(Error::Config(format!("phi0 = {phi0} outside [0, pi/2]")));
        }
        Ok(TangentFrame { phi0, y0: u0(phi0), phi_max: phi_max(phi0) })
    }

    pub fn line(&self, phi: f64) -> f64 {
        du0(self.phi0) * (phi - self.phi0) + self.y0
    }

    pub fn w(&self, x: &State) -> f64 {
        x.d2phi - self.line(x.phi)
    }
}

/// Where the tangent line at φ₀ reaches height 2√6. Written as
/// cos/(1 + sin) rather than (1 − sin)/cos so it stays finite at π/2.
pub fn phi_max(phi0: f64) -> f64 {
    if phi0 == FRAC_PI_2 {
        return FRAC_PI_2;
    }
    phi0.cos() / (1.0 + phi0.sin()) + phi0
}

pub fn eval_a(phi0: f64, phi: f64, v: f64) -> f64 {
    4.0 * (2.0 * phi).cos() - two_root_six() * phi0.cos() + 9.0 + 6.0 * v * v
}

/// Coefficients (c₀, c₁, c₂, c₃) of P as a cubic in v.
pub fn p_cubic(phi0: f64, phi: f64) -> [f64; 4] {
    let r6 = two_root_six();
    let dp = phi - phi0;
    let c2p = (2.0 * phi).cos();
    let s2p = (2.0 * phi).sin();
    let c0 = -12.0 * (2.0 * phi0).sin() - 12.0 * (dp + s2p) + r6 * dp * (4.0 * c2p + 9.0) * phi0.cos()
        + 12.0 * (phi0 - phi) * (2.0 * phi0).cos()
        + r6 * (4.0 * c2p + 9.0) * phi0.sin();
    let c1 = 4.0 * c2p - 2.0 * r6 * phi0.cos() + 10.0;
    let c2 = 6.0 * r6 * (phi0.sin() + dp * phi0.cos()) - 4.0 * s2p;
    [c0, c1, c2, 2.0]
}

pub fn eval_p(phi0: f64, phi: f64, v: f64) -> f64 {
    let c = p_cubic(phi0, phi);
    c[0] + v * (c[1] + v * (c[2] + v * c[3]))
}

fn require_five(traj: &Trajectory) -> Result<()> {
    traj.d.require_five().map(|_| ())
}

/// Largest defect of w″ = a w − 2w′ + P along the samples, with
/// derivatives of w taken from the jet and the field. Each defect is
/// divided by 1 + the sum of the absolute terms, so orbits near blowup
/// are judged at working precision.
pub fn w_system_residual(phi0: f64, traj: &Trajectory) -> Result<f64> {
    require_five(traj)?;
    let frame = TangentFrame::new(phi0)?;
    let slope = du0(phi0);
    let mut worst: f64 = 0.0;
    for x in traj.states() {
        let p4 = ode::fourth_derivative(traj.d, x);
        let w = frame.w(&x);
        let dw = x.d3phi - slope * x.dphi;
        let d2w = p4 - slope * x.d2phi;
        let terms = [eval_a(phi0, x.phi, x.dphi) * w, -2.0 * dw, eval_p(phi0, x.phi, x.dphi)];
        let scale = 1.0 + d2w.abs() + terms.iter().map(|t| t.abs()).sum::<f64>();
        worst = worst.max((d2w - terms.iter().sum::<f64>()).abs() / scale);
    }
    Ok(worst)
}

pub fn xi(x: &State) -> f64 {
    x.d2phi - 3.0 * x.phi
}

pub fn dxi(x: &State) -> f64 {
    x.d3phi - 3.0 * x.dphi
}

/// Coefficients of Q as a cubic in v.
pub fn q_cubic(phi: f64) -> [f64; 4] {
    let c = phi.cos();
    [
        6.0 * (3.0 * phi - 2.0 * (2.0 * phi).sin() + 2.0 * phi * (2.0 * phi).cos()),
        8.0 * c * c,
        18.0 * phi - 4.0 * (2.0 * phi).sin(),
        2.0,
    ]
}

pub fn eval_q(phi: f64, v: f64) -> f64 {
    let c = q_cubic(phi);
    c[0] + v * (c[1] + v * (c[2] + v * c[3]))
}

/// Largest defect of ξ″ = (6φ′² + 4cos 2φ + 6)ξ − 2ξ′ + Q(φ, φ′), scaled
/// like `w_system_residual`.
pub fn xi_system_residual(traj: &Trajectory) -> Result<f64> {
    require_five(traj)?;
    let mut worst: f64 = 0.0;
    for x in traj.states() {
        let d2xi = ode::fourth_derivative(traj.d, x) - 3.0 * x.d2phi;
        let coef = 6.0 * x.dphi * x.dphi + 4.0 * (2.0 * x.phi).cos() + 6.0;
        let terms = [coef * xi(&x), -2.0 * dxi(&x), eval_q(x.phi, x.dphi)];
        let scale = 1.0 + d2xi.abs() + terms.iter().map(|t| t.abs()).sum::<f64>();
        worst = worst.max((d2xi - terms.iter().sum::<f64>()).abs() / scale);
    }
    Ok(worst)
}

/// (x, y) ∈ 𝒦 ⇔ x ≥ 0 and y ≥ 3x.
pub fn in_cone_k(x: f64, y: f64) -> bool {
    x >= 0.0 && y >= 3.0 * x
}

/// Both (φ, φ″) and (φ′, φ‴) in 𝒦, equivalently φ, φ′, ξ, ξ′ ≥ 0.
pub fn state_in_cone(x: &State) -> bool {
    in_cone_k(x.phi, x.d2phi) && in_cone_k(x.dphi, x.d3phi)
}

/// Returns y² − 4yv + 7v² + 3v⁴ and its sum-of-squares rewriting.
pub fn sos_identity_check(y: f64, v: f64) -> (f64, f64) {
    let lhs = y * y - 4.0 * y * v + 7.0 * v * v + 3.0 * v.powi(4);
    let rhs = 3.0 * v.powi(4) + 7.0 * (v - 2.0 * y / 7.0).powi(2) + 3.0 / 7.0 * y * y;
    (lhs, rhs)
}

/// Growth constant C₁ for d = 5, 6, 7: the smallest power of two for which
/// `growth_bound_check` passes with 10% slack on 10⁵ samples. Pinned by
/// the test `growth_constants_are_minimal`.
pub const GROWTH_C1: [f64; 3] = [16.0, 32.0, 32.0];

/// p(ξ₀, ξ₁, ξ₂) together with α = 2(d − 4), β = 6, c₀ = c⋆.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupStructure {
    pub d: Dimension,
    pub alpha: f64,
    pub beta: f64,
    pub c0: f64,
}

impl BlowupStructure {
    pub fn new(d: Dimension) -> Result<Self> {
        let c0 = ode::c_star(d)?;
        Ok(BlowupStructure { d, alpha: 2.0 * (d.as_f64() - 4.0), beta: 6.0, c0 })
    }

    pub fn c1(&self) -> f64 {
        GROWTH_C1[(self.d.get() - 5) as usize]
    }

    pub fn p(&self, xi0: f64, xi1: f64, xi2: f64) -> f64 {
        let d = self.d;
        ode::coeff_q(d, xi0) * xi2 - ode::coeff_f(d, xi0)
            + self.beta * xi2 * xi1 * xi1
            + 0.5 * ode::coeff_dq(d, xi0) * xi1 * xi1
            + self.alpha * ode::coeff_g(d, xi0) * xi1
            + self.alpha * xi1.powi(3)
    }

    /// (p − lower, upper − p) for constant c1.
    pub fn margins(&self, c1: f64, xi0: f64, xi1: f64, xi2: f64) -> (f64, f64) {
        let p = self.p(xi0, xi1, xi2);
        let lower = self.beta * (xi2 - self.c0) * xi1 * xi1 + xi1.powi(3) / c1;
        let upper = self.beta * xi1 * xi1 * xi2 + c1 * (1.0 + xi2 + xi1.powi(3));
        (p - lower, upper - p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub d: u32,
    pub c1: f64,
    pub samples: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// Smallest p − lower, relative to 1 + |p|.
    pub worst_lower_margin: f64,
    pub worst_upper_margin: f64,
}

fn growth_points(c0: f64, samples: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![(0.0, 0.0, c0), (FRAC_PI_2, 0.0, c0), (PI / 4.0, 0.0, c0), (-PI / 4.0, 0.0, c0)];
    while pts.len() < samples {
        let xi0 = rng.gen_range(-PI..PI);
        let xi1 = match rng.gen_range(0..8) {
            0 => 0.0,
            _ => 10f64.powf(rng.gen_range(-3.0..3.0)),
        };
        let xi2 = match rng.gen_range(0..8) {
            0 => c0,
            _ => c0 + 10f64.powf(rng.gen_range(-3.0..3.0)),
        };
        pts.push((xi0, xi1, xi2));
    }
    pts.truncate(samples);
    pts
}

fn growth_check_with(st: &BlowupStructure, c1: f64, samples: usize) -> GrowthReport {
    let mut rep = GrowthReport {
        d: st.d.get(),
        c1,
        samples,
        lower_violations: 0,
        upper_violations: 0,
        worst_lower_margin: f64::INFINITY,
        worst_upper_margin: f64::INFINITY,
    };
    for (a, b, c) in growth_points(st.c0, samples, 0x6772_6f77 + st.d.get() as u64) {
        let (lo, hi) = st.margins(c1, a, b, c);
        let scale = 1.0 + st.p(a, b, c).abs();
        // Relative slack below 1e-12 is indistinguishable from equality.
        if lo / scale < -1e-12 {
            rep.lower_violations += 1;
        }
        if hi / scale < -1e-12 {
            rep.upper_violations += 1;
        }
        rep.worst_lower_margin = rep.worst_lower_margin.min(lo / scale);
        rep.worst_upper_margin = rep.worst_upper_margin.min(hi / scale);
    }
    rep
}

/// Samples the growth sandwich at ξ₁ ≥ 0, ξ₂ ≥ c₀ with the stored C₁.
pub fn growth_bound_check(d: Dimension, samples: usize) -> Result<GrowthReport> {
    let st = BlowupStructure::new(d)?;
    Ok(growth_check_with(&st, st.c1(), samples))
}

/// Smallest power of two C₁ ≥ 1 such that 0.9·C₁ already passes.
pub fn fit_growth_constant(d: Dimension, samples: usize) -> Result<f64> {
    let st = BlowupStructure::new(d)?;
    let mut c1 = 1.0;
    loop {
        let rep = growth_check_with(&st, 0.9 * c1, samples);
        if rep.lower_violations == 0 && rep.upper_violations == 0 {
            return Ok(c1);
        }
        c1 *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, IntegrationConfig};

    #[test]
    fn region_examples() {
        assert_eq!(in_region_c(FRAC_PI_2, 0.0, BOUNDARY_TOL), RegionClass::Inside);
        assert_ne!(in_region_c(0.0, 0.0, BOUNDARY_TOL), RegionClass::Inside);
        let y = two_root_six() * (PI / 4.0).sin();
        assert_eq!(in_region_c(PI / 4.0, y, BOUNDARY_TOL), RegionClass::Boundary);
        assert_eq!(in_region_c(PI / 4.0, y + 0.1, BOUNDARY_TOL), RegionClass::Outside);
        assert_eq!(in_minus_c(-FRAC_PI_2, 0.0, BOUNDARY_TOL), RegionClass::Inside);
        assert!((boundary_f(FRAC_PI_2) - two_root_six()).abs() < 1e-15);
        assert_eq!(boundary_f(2.0), two_root_six());
    }

    #[test]
    fn tangent_frame_reaches_cap() {
        for i in 0..100 {
            let phi0 = FRAC_PI_2 * i as f64 / 100.0;
            let fr = TangentFrame::new(phi0).unwrap();
            assert!((fr.line(fr.phi_max) - two_root_six()).abs() < 1e-12, "{phi0}");
        }
        assert_eq!(phi_max(FRAC_PI_2), FRAC_PI_2);
        assert!(TangentFrame::new(2.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let r = 6f64.sqrt();
        assert!((eval_p(0.0, 0.0, 1.0) - (16.0 - 4.0 * r)).abs() < 1e-13);
        assert!(eval_p(0.0, 0.0, 0.0).abs() < 1e-14);
        assert!((eval_a(0.0, 0.0, 0.0) - (13.0 - 2.0 * r)).abs() < 1e-14);
        assert_eq!(eval_q(0.0, 0.0), 0.0);
        assert_eq!(eval_q(0.0, 1.0), 10.0);
    }

    fn random_orbits() -> Vec<Trajectory> {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = IntegrationConfig::default().with_span(3.0).with_blowup_norm(1e3);
        (0..20)
            .map(|_| {
                let x0 = State::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                integrate(Dimension::FIVE, x0, 0.0, &cfg, &[]).unwrap()
            })
            .collect()
    }

    #[test]
    fn w_and_xi_residuals_vanish() {
        let zero = integrate(Dimension::FIVE, State::ZERO, 0.0, &IntegrationConfig::default().with_span(1.0), &[]).unwrap();
        assert_eq!(w_system_residual(0.0, &zero).unwrap(), 0.0);
        for t in random_orbits() {
            for phi0 in [0.0, 0.3, 1.0, FRAC_PI_2] {
                assert!(w_system_residual(phi0, &t).unwrap() < 1e-8);
            }
            assert!(xi_system_residual(&t).unwrap() < 1e-8);
        }
        let t6 = integrate(Dimension::new(6).unwrap(), State::ZERO, 0.0, &IntegrationConfig::default().with_span(1.0), &[]).unwrap();
        assert!(xi_system_residual(&t6).is_err());
    }

    #[test]
    fn sos_identity() {
        assert_eq!(sos_identity_check(0.0, 0.0), (0.0, 0.0));
        let (l, r) = sos_identity_check(1.0, 0.0);
        assert_eq!(l, 1.0);
        assert!((r - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let (l, r) = sos_identity_check(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            assert!((l - r).abs() < 1e-12);
        }
    }

    #[test]
    fn spot_checks_of_a_and_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100_000 {
            let phi0 = rng.gen_range(0.0..FRAC_PI_2);
            let phi = rng.gen_range(phi0..=phi_max(phi0));
            let v: f64 = rng.gen_range(1e-9..5.0);
            assert!(eval_a(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), v) >= 0.1);
            assert!(eval_p(phi0, phi, v) > 0.0, "{phi0} {phi} {v}");
        }
    }

    #[test]
    fn growth_sandwich_holds() {
        let st = BlowupStructure::new(Dimension::FIVE).unwrap();
        let (lo, _) = st.margins(st.c1(), 0.0, 0.0, st.c0);
        assert!(lo >= 0.0);
        for d in [5, 6, 7] {
            let rep = growth_bound_check(Dimension::new(d).unwrap(), 100_000).unwrap();
            assert_eq!((rep.lower_violations, rep.upper_violations), (0, 0), "{rep:?}");
        }
        assert!(growth_bound_check(Dimension::new(4).unwrap(), 10).is_err());
    }

    #[test]
    fn growth_constants_are_minimal() {
        for d in [5, 6, 7] {
            let fitted = fit_growth_constant(Dimension::new(d).unwrap(), 100_000).unwrap();
            assert_eq!(fitted, GROWTH_C1[d as usize - 5], "d = {d}");
        }
    }

    #[test]
    fn cone_examples() {
        assert!(state_in_cone(&State::new(0.1, 0.1, 0.31, 0.31)));
        assert!(!state_in_cone(&State::new(0.1, 0.1, 0.29, 0.3)));
        let x = State::new(0.2, 0.4, 1.0, 2.0);
        assert_eq!(state_in_cone(&x), x.phi >= 0.0 && x.dphi >= 0.0 && xi(&x) >= 0.0 && dxi(&x) >= 0.0);
    }
}

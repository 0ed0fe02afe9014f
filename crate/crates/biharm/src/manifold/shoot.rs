//! Location of the heteroclinic orbit by bisection on g(θ).
//!
//! Near the target the orbit separates from the heteroclinic one at a rate
//! of roughly e^{2.7 s}, so resolving it over 25 s-units needs θ far below
//! double precision. Orbits are therefore integrated with a high-order
//! Taylor method in double-double arithmetic, and θ is bisected in
//! double-double as well.

use serde::{Deserialize, Serialize};

use super::chart::{seed_state_dd, SeedSpec};
use super::classify::{track_in_c, target_state, ClassificationResult, Outcome, HETEROCLINIC_TOL};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::integrator::{Event, EventKind, Sample, Termination, Trajectory};
use crate::ode::{Dimension, State};
use crate::regions;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootConfig {
    pub eps0: f64,
    /// Span over which the heteroclinic candidate is judged and exported.
    pub span: f64,
    /// Length of the classification integration.
    pub horizon: f64,
    pub order: usize,
    /// Local truncation tolerance of the Taylor steps.
    pub step_tol: f64,
    pub max_step: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig { eps0: 1e-3, span: 25.0, horizon: 80.0, order: 30, step_tol: 1e-32, max_step: 0.5 }
    }
}

impl ShootConfig {
    pub fn validate(&self) -> Result<()> {
        SeedSpec::new(self.eps0, 0.0)?;
        let ok = self.span > 0.0
            && self.horizon >= self.span
            && (8..=60).contains(&self.order)
            && self.step_tol > 0.0
            && self.max_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid shooting configuration {self:?}")))
        }
    }
}

/// Taylor coefficients a₀..a_order of φ about a point with jet `x`,
/// for the d = 5 equation.
fn taylor_coeffs(x: [Dd; 4], order: usize) -> Vec<Dd> {
    let n = order + 1;
    let mut a = vec![Dd::ZERO; n];
    a[0] = x[0];
    a[1] = x[1];
    a[2] = x[2].mul_f64(0.5);
    a[3] = x[3] / Dd::from_f64(6.0);
    let (s0, c0) = x[0].mul_f64(2.0).sin_cos();
    let (mut s, mut c) = (vec![s0], vec![c0]);
    let (mut d1, mut d2, mut p11) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let conv = |u: &[Dd], v: &[Dd], k: usize| (0..=k).fold(Dd::ZERO, |acc, j| acc + u[j] * v[k - j]);
    for k in 0..n - 4 {
        let kf = k as f64;
        d1.push(a[k + 1].mul_f64(kf + 1.0));
        d2.push(a[k + 2].mul_f64((kf + 1.0) * (kf + 2.0)));
        let d3k = a[k + 3].mul_f64((kf + 1.0) * (kf + 2.0) * (kf + 3.0));
        p11.push(conv(&d1, &d1, k));
        let p111 = conv(&p11, &d1, k);
        let f = conv(&c, &d2, k).mul_f64(4.0) + d2[k].mul_f64(9.0) - s[k].mul_f64(12.0)
            + conv(&d2, &p11, k).mul_f64(6.0)
            - conv(&s, &p11, k).mul_f64(4.0)
            + conv(&c, &d1, k).mul_f64(4.0)
            + d1[k].mul_f64(10.0)
            + p111.mul_f64(2.0)
            - d3k.mul_f64(2.0);
        a[k + 4] = f / Dd::from_f64((kf + 1.0) * (kf + 2.0) * (kf + 3.0) * (kf + 4.0));
        // (sin 2φ)′ = 2φ′ cos 2φ, (cos 2φ)′ = −2φ′ sin 2φ
        let inv = Dd::from_f64(2.0) / Dd::from_f64(kf + 1.0);
        let sn = conv(&d1, &c, k) * inv;
        let cn = -(conv(&d1, &s, k) * inv);
        s.push(sn);
        c.push(cn);
    }
    a
}

/// (φ, φ′, φ″, φ‴) of the series at t.
fn jet_at(a: &[Dd], t: Dd) -> [Dd; 4] {
    let mut out = [Dd::ZERO; 4];
    for (j, o) in out.iter_mut().enumerate() {
        let mut acc = Dd::ZERO;
        for k in (j..a.len()).rev() {
            let fall: f64 = (k - j + 1..=k).map(|m| m as f64).product();
            acc = acc * t + a[k].mul_f64(fall);
        }
        *o = acc;
    }
    out
}

fn step_size(a: &[Dd], cfg: &ShootConfig) -> f64 {
    let n = a.len() - 1;
    let scale = a[..4].iter().map(|x| x.hi.abs()).fold(1.0, f64::max);
    let mut h = cfg.max_step;
    for k in [n - 1, n] {
        let m = a[k].hi.abs();
        if m > 0.0 {
            h = h.min((cfg.step_tol * scale / m).powf(1.0 / k as f64));
        }
    }
    h
}

fn to_state(x: &[Dd; 4]) -> State {
    State::new(x[0].to_f64(), x[1].to_f64(), x[2].to_f64(), x[3].to_f64())
}

/// Result of one double-double orbit.
#[derive(Clone, Debug)]
pub struct DdOrbit {
    pub g: Option<i8>,
    pub tau: Option<f64>,
    /// State at the end of the export span, if reached.
    pub at_span: Option<State>,
    pub in_c_to_span: bool,
    pub end_s: f64,
    pub end_state: State,
    /// Export-span part as a trajectory.
    pub trajectory: Trajectory,
}

impl DdOrbit {
    /// Within tolerance of the target at the export span, inside 𝒞 throughout.
    pub fn is_candidate(&self) -> bool {
        self.in_c_to_span && self.at_span.is_some_and(|x| x.dist(target_state()) < HETEROCLINIC_TOL)
    }
}

/// Integrates the orbit through the seed at angle θ until |φ″| reaches c⋆
/// or the horizon ends.
pub fn integrate_dd(theta: Dd, cfg: &ShootConfig) -> DdOrbit {
    let c_star = Dd::from_f64(24.0).sqrt();
    let mut x = seed_state_dd(cfg.eps0, theta);
    let mut s = Dd::ZERO;
    let mut samples = vec![Sample { s: 0.0, state: to_state(&x) }];
    let mut steps: Vec<Vec<f64>> = Vec::new();
    let mut at_span = None;
    let mut events = Vec::new();
    let (mut g, mut tau) = (None, None);
    let mut exported_done = false;
    while s.to_f64() < cfg.horizon {
        let a = taylor_coeffs(x, cfg.order);
        let mut h = step_size(&a, cfg);
        let remaining_span = cfg.span - s.to_f64();
        let landing = !exported_done && remaining_span <= h;
        if landing {
            h = remaining_span;
        }
        h = h.min(cfg.horizon - s.to_f64());
        let hd = if landing { Dd::from_f64(cfg.span) - s } else { Dd::from_f64(h) };
        let next = jet_at(&a, hd);
        // first crossing of |φ″| = c⋆ inside the step
        let crossed = next[2].abs() >= c_star;
        if crossed {
            let side = if next[2] > Dd::ZERO { 1.0 } else { -1.0 };
            let (mut lo, mut hi) = (0.0, hd.to_f64());
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (jet_at(&a, Dd::from_f64(mid))[2].to_f64() * side) >= c_star.to_f64() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let st = to_state(&jet_at(&a, Dd::from_f64(hi)));
            let te = s.to_f64() + hi;
            g = Some(side as i8);
            tau = Some(te);
            if !exported_done {
                let kind = if side > 0.0 { EventKind::SecondDerivUp } else { EventKind::SecondDerivDown };
                events.push(Event { kind, s: te, state: st });
                steps.push(a.iter().map(|v| v.to_f64()).collect());
                samples.push(Sample { s: te, state: st });
            }
            x = jet_at(&a, Dd::from_f64(hi));
            s = s + Dd::from_f64(hi);
            break;
        }
        if !exported_done {
            steps.push(a.iter().map(|v| v.to_f64()).collect());
        }
        x = next;
        s = if landing { Dd::from_f64(cfg.span) } else { s + hd };
        if !exported_done {
            samples.push(Sample { s: s.to_f64(), state: to_state(&x) });
            if landing {
                at_span = Some(to_state(&x));
                exported_done = true;
            }
        }
        if !x.iter().all(|v| v.hi.is_finite()) {
            break;
        }
    }
    let termination = match (events.last(), at_span) {
        (Some(ev), _) => Termination::EventStop(ev.clone()),
        (None, Some(_)) => Termination::SpanExhausted,
        (None, None) => Termination::BlowupDetected { s_last: s.to_f64(), norm: to_state(&x).norm() },
    };
    let trajectory = Trajectory::from_taylor(Dimension::FIVE, samples, steps, termination, events);
    let in_c_to_span = at_span.is_some() && track_in_c(trajectory.states());
    DdOrbit { g, tau, at_span, in_c_to_span, end_s: s.to_f64(), end_state: to_state(&x), trajectory }
}

fn classification(theta: f64, orbit: &DdOrbit) -> ClassificationResult {
    let outcome = if orbit.is_candidate() {
        Outcome::HeteroclinicCandidate
    } else {
        match orbit.g {
            Some(1) => Outcome::BlowupPlus,
            Some(_) => Outcome::BlowupMinus,
            None => Outcome::Undecided,
        }
    };
    let (end_s, end_state) = match orbit.at_span {
        Some(x) if outcome == Outcome::HeteroclinicCandidate => (orbit.trajectory.last().s, x),
        _ => (orbit.end_s, orbit.end_state),
    };
    ClassificationResult {
        theta,
        outcome,
        tau: orbit.tau,
        g: orbit.g,
        end_s,
        end_state,
        in_c_throughout: orbit.in_c_to_span,
        diagnostics: None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Heteroclinic {
    pub theta_star: f64,
    /// θ* as a double-double pair (hi, lo).
    pub theta_star_dd: (f64, f64),
    /// Final bracket width.
    pub width: f64,
    pub iterations: u32,
    /// Bisection stopped at the double-double resolution.
    pub floor_reached: bool,
    pub classification: ClassificationResult,
    #[serde(skip)]
    pub orbit: Trajectory,
}

/// Bisects g on `bracket` until the bracket is narrower than `theta_tol`
/// and its midpoint is a heteroclinic candidate, or the double-double
/// resolution is exhausted.
pub fn find_heteroclinic(bracket: (f64, f64), theta_tol: f64, cfg: &ShootConfig) -> Result<Heteroclinic> {
    cfg.validate()?;
    if !(theta_tol > 0.0) {
        return Err(Error::Config(format!("theta_tol must be positive, got {theta_tol}")));
    }
    let (mut lo, mut hi) = (Dd::from_f64(bracket.0), Dd::from_f64(bracket.1));
    let g_lo = integrate_dd(lo, cfg).g;
    let g_hi = integrate_dd(hi, cfg).g;
    if g_lo != Some(-1) || g_hi != Some(1) {
        return Err(Error::NoSignChange { lo: bracket.0, hi: bracket.1, g_lo, g_hi });
    }
    let mut iterations = 0;
    loop {
        let mid = (lo + hi).mul_f64(0.5);
        let orbit = integrate_dd(mid, cfg);
        let width = (hi - lo).to_f64();
        let floor = width <= mid.hi.abs().max(1.0) * 1e-31 || iterations >= 400;
        if (width < theta_tol && orbit.is_candidate()) || floor {
            return Ok(Heteroclinic {
                theta_star: mid.to_f64(),
                theta_star_dd: (mid.hi, mid.lo),
                width,
                iterations,
                floor_reached: floor,
                classification: classification(mid.to_f64(), &orbit),
                orbit: orbit.trajectory,
            });
        }
        iterations += 1;
        match orbit.g {
            Some(-1) => lo = mid,
            Some(1) => hi = mid,
            _ => {
                // Undecided within the horizon: probe the quarter points.
                let q_lo = (lo + mid).mul_f64(0.5);
                let q_hi = (mid + hi).mul_f64(0.5);
                match (integrate_dd(q_lo, cfg).g, integrate_dd(q_hi, cfg).g) {
                    (Some(1), _) => hi = q_lo,
                    (Some(-1), Some(1)) => (lo, hi) = (q_lo, q_hi),
                    (Some(-1), _) => lo = q_lo,
                    (_, Some(-1)) => lo = q_hi,
                    (_, Some(1)) => hi = q_hi,
                    _ => (lo, hi) = (q_lo, q_hi),
                }
            }
        }
    }
}

/// Double-double classification of a single seed.
pub fn classify_orbit_dd(spec: SeedSpec, cfg: &ShootConfig) -> ClassificationResult {
    let cfg = ShootConfig { eps0: spec.eps0, ..*cfg };
    classification(spec.theta, &integrate_dd(Dd::from_f64(spec.theta), &cfg))
}

/// Number of (φ, φ″) samples of a trajectory outside 𝒞.
pub fn samples_outside_c(traj: &Trajectory) -> usize {
    traj.states()
        .filter(|x| regions::in_region_c(x.phi, x.d2phi, regions::BOUNDARY_TOL) == regions::RegionClass::Outside)
        .count()
}

//! Energy-law audits over random orbits: conservation for d = 4,
//! monotonicity for d > 4, and the analytic rate against differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegrationConfig};
use crate::ode::{self, Dimension, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyMode {
    /// Largest |E(s) − E(0)| along each orbit.
    Conservation,
    /// Most negative increment E(sᵢ₊₁) − E(sᵢ).
    Monotonicity,
}

impl std::str::FromStr for EnergyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "conservation" => Ok(EnergyMode::Conservation),
            "monotonicity" => Ok(EnergyMode::Monotonicity),
            _ => Err(Error::Config(format!("unknown energy mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitDefect {
    pub start: State,
    pub end_s: f64,
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyAudit {
    pub d: u32,
    pub mode: EnergyMode,
    /// Conservation: the largest defect. Monotonicity: the most negative
    /// increment (≤ 0).
    pub worst: f64,
    pub orbits: Vec<OrbitDefect>,
}

/// Uniform random start in [−scale, scale]⁴.
pub fn random_state(rng: &mut ChaCha8Rng, scale: f64) -> State {
    let mut c = || rng.gen_range(-scale..scale);
    State::new(c(), c(), c(), c())
}

/// Integrates `n` random orbits (until the span ends or blowup) and
/// measures the energy defect selected by `mode`. Each difference is
/// divided by 1 + |K| + |P|: blowup drives the two parts of E to ~1e15
/// with opposite signs, where absolute differences are pure rounding.
pub fn energy_audit(d: Dimension, mode: EnergyMode, n: usize, cfg: &IntegrationConfig, seed: u64) -> Result<EnergyAudit> {
    if mode == EnergyMode::Conservation && d.get() != 4 {
        return Err(Error::Dimension { d: d.get(), need: "d = 4 for conservation" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<State> = (0..n).map(|_| random_state(&mut rng, 0.5)).collect();
    let mut orbits = Vec::with_capacity(n);
    for x0 in starts {
        let t = integrate(d, x0, 0.0, cfg, &[])?;
        let es: Vec<(f64, f64)> = t
            .states()
            .map(|x| {
                let e = ode::energy(d, x);
                (e.total, 1.0 + e.kinetic.abs() + e.potential.abs())
            })
            .collect();
        let defect = match mode {
            EnergyMode::Conservation => es.iter().map(|e| (e.0 - es[0].0).abs() / e.1).fold(0.0, f64::max),
            EnergyMode::Monotonicity => es.windows(2).map(|w| (w[1].0 - w[0].0) / w[1].1.max(w[0].1)).fold(0.0, f64::min),
        };
        orbits.push(OrbitDefect { start: x0, end_s: t.last().s, defect });
    }
    let worst = match mode {
        EnergyMode::Conservation => orbits.iter().map(|o| o.defect).fold(0.0, f64::max),
        EnergyMode::Monotonicity => orbits.iter().map(|o| o.defect).fold(0.0, f64::min),
    };
    Ok(EnergyAudit { d: d.get(), mode, worst, orbits })
}

/// Largest relative error between the analytic energy rate and a centred
/// difference of E along the flow, over `n` random states.
pub fn energy_rate_check(d: Dimension, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let x = random_state(&mut rng, 1.0);
        let f = ode::vector_field(d, x);
        let h = 1e-5;
        let at = |t: f64| {
            let y = State::new(x.phi + t * f.phi, x.dphi + t * f.dphi, x.d2phi + t * f.d2phi, x.d3phi + t * f.d3phi);
            ode::energy(d, y).total
        };
        // Fourth-order stencil along the tangent line.
        let fd = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
        let rate = ode::energy(d, x).rate;
        worst = worst.max((fd - rate).abs() / rate.abs().max(1.0));
    }
    worst
}

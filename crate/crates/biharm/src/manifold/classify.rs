//! Orbit classification by the sign of φ″ at the first crossing of ±c⋆.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::{seed_state, SeedSpec};
use crate::integrator::{integrate, EventKind, IntegrationConfig, Termination, Trajectory};
use crate::ode::{Dimension, State};
use crate::regions::{self, RegionClass};

/// Distance to (π/2, 0, 0, 0) below which a surviving orbit counts as
/// heteroclinic.
pub const HETEROCLINIC_TOL: f64 = 1e-3;

pub fn target_state() -> State {
    State::new(FRAC_PI_2, 0.0, 0.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    BlowupPlus,
    BlowupMinus,
    HeteroclinicCandidate,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub theta: f64,
    pub outcome: Outcome,
    /// First s with |φ″| ≥ c⋆.
    pub tau: Option<f64>,
    pub g: Option<i8>,
    pub end_s: f64,
    pub end_state: State,
    pub in_c_throughout: bool,
    pub diagnostics: Option<String>,
}

impl ClassificationResult {
    pub fn end_distance(&self) -> f64 {
        self.end_state.dist(target_state())
    }
}

pub fn track_in_c(states: impl Iterator<Item = State>) -> bool {
    states.into_iter().all(|x| regions::in_region_c(x.phi, x.d2phi, regions::BOUNDARY_TOL) != RegionClass::Outside)
}

/// Classifies an orbit from its trajectory, assuming the watch list was
/// the two second-derivative events.
pub fn classify_trajectory(theta: f64, traj: &Trajectory) -> ClassificationResult {
    let end = traj.last();
    let in_c = track_in_c(traj.states());
    let (outcome, tau, g) = match &traj.termination {
        Termination::EventStop(ev) => match ev.kind {
            EventKind::SecondDerivUp => (Outcome::BlowupPlus, Some(ev.s), Some(1)),
            EventKind::SecondDerivDown => (Outcome::BlowupMinus, Some(ev.s), Some(-1)),
            _ => (Outcome::Undecided, None, None),
        },
        Termination::SpanExhausted if in_c && end.state.dist(target_state()) < HETEROCLINIC_TOL => {
            (Outcome::HeteroclinicCandidate, None, None)
        }
        _ => (Outcome::Undecided, None, None),
    };
    ClassificationResult {
        theta,
        outcome,
        tau,
        g,
        end_s: end.s,
        end_state: end.state,
        in_c_throughout: in_c,
        diagnostics: None,
    }
}

/// Integrates the d = 5 orbit through the seed and classifies it.
pub fn classify_orbit(spec: SeedSpec, cfg: &IntegrationConfig) -> ClassificationResult {
    let x0 = seed_state(spec);
    let watch = [EventKind::SecondDerivUp, EventKind::SecondDerivDown];
    match integrate(Dimension::FIVE, x0, 0.0, cfg, &watch) {
        Ok(traj) => classify_trajectory(spec.theta, &traj),
        Err(e) => ClassificationResult {
            theta: spec.theta,
            outcome: Outcome::Undecided,
            tau: None,
            g: None,
            end_s: f64::NAN,
            end_state: x0,
            in_c_throughout: false,
            diagnostics: Some(e.to_string()),
        },
    }
}

/// Evenly spaced θ values including both ends.
pub fn theta_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs two points");
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Classifies every θ in parallel; output order follows `thetas`.
pub fn classify_grid(eps0: f64, thetas: &[f64], cfg: &IntegrationConfig) -> crate::Result<Vec<ClassificationResult>> {
    let specs = thetas.iter().map(|&t| SeedSpec::new(eps0, t)).collect::<crate::Result<Vec<_>>>()?;
    Ok(specs.par_iter().map(|&s| classify_orbit(s, cfg)).collect())
}

/// Number of sign changes of g along the decided grid points.
pub fn sign_changes(results: &[ClassificationResult]) -> usize {
    let gs: Vec<i8> = results.iter().filter_map(|r| r.g).collect();
    gs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// CSV: theta, outcome, g, tau, end-state components.
pub fn write_grid_csv<W: Write>(results: &[ClassificationResult], w: W) -> crate::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["theta", "outcome", "g", "tau", "end_s", "phi", "dphi", "d2phi", "d3phi"])?;
    for r in results {
        let x = r.end_state;
        wr.write_record([
            r.theta.to_string(),
            format!("{:?}", r.outcome),
            r.g.map(|g| g.to_string()).unwrap_or_default(),
            r.tau.map(|t| t.to_string()).unwrap_or_default(),
            r.end_s.to_string(),
            x.phi.to_string(),
            x.dphi.to_string(),
            x.d2phi.to_string(),
            x.d3phi.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::chart::theta0;

    #[test]
    fn endpoints_have_opposite_signs() {
        let cfg = IntegrationConfig::default();
        let e = 1e-3;
        let t0 = theta0(e).unwrap();
        let hi = classify_orbit(SeedSpec::new(e, t0 + 0.05).unwrap(), &cfg);
        assert_eq!((hi.outcome, hi.g), (Outcome::BlowupPlus, Some(1)));
        let lo = classify_orbit(SeedSpec::new(e, -FRAC_PI_2).unwrap(), &cfg);
        assert_eq!((lo.outcome, lo.g), (Outcome::BlowupMinus, Some(-1)));
        // θ ↦ θ + π reflects the orbit
        let refl = classify_orbit(SeedSpec::new(e, t0 + 0.05 + std::f64::consts::PI).unwrap(), &cfg);
        assert_eq!(refl.g, Some(-1));
    }

    #[test]
    fn grid_csv_round_trip() {
        let cfg = IntegrationConfig::default();
        let rs = classify_grid(1e-3, &theta_grid(1.4, 1.5, 3), &cfg).unwrap();
        assert!(rs.iter().all(|r| r.g == Some(1)));
        let mut buf = Vec::new();
        write_grid_csv(&rs, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(rd.records().count(), 3);
    }
}

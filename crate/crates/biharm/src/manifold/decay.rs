//! Backward-time decay along the unstable manifold.

use serde::Serialize;

use super::chart::{seed_state, SeedSpec};
use crate::error::{Error, Result};
use crate::integrator::{integrate_reversed, IntegrationConfig};
use crate::ode::{Dimension, State};

/// Coordinates of x in the basis (1, λ, λ², λ³) for λ = 1, 3, −4, −2.
pub fn eigen_coordinates(x: State) -> [f64; 4] {
    let lams = [1.0, 3.0, -4.0, -2.0];
    // Inverse of the Vandermonde matrix by Lagrange basis polynomials:
    // the coefficient on λᵢ is ℓᵢ applied to the moments of x.
    let m = x.to_array();
    let mut out = [0.0; 4];
    for (i, &li) in lams.iter().enumerate() {
        let others: Vec<f64> = lams.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &l)| l).collect();
        let denom: f64 = others.iter().map(|&l| li - l).product();
        // ℓᵢ(t) = Π (t − λⱼ)/(λᵢ − λⱼ), expanded as e₀ + e₁t + e₂t² + t³
        let (a, b, c) = (others[0], others[1], others[2]);
        let e = [-a * b * c, a * b + b * c + a * c, -(a + b + c), 1.0];
        out[i] = (0..4).map(|k| e[k] * m[k]).sum::<f64>() / denom;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    /// Fitted backward decay rate along η₃ (eigenvalue 1).
    pub rate1: f64,
    /// Fitted backward decay rate along η₄ (eigenvalue 3), when that
    /// coordinate is resolvable over a long enough window.
    pub rate2: Option<f64>,
    pub window1: (f64, f64),
    pub window2: Option<(f64, f64)>,
    /// Smallest state norm reached, and where.
    pub min_norm: f64,
    pub min_norm_at: f64,
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    sxy / sxx
}

/// Smallest projection magnitude used in a fit, relative to ε₀.
const FLOOR: f64 = 1e-12;

/// How far a fitted coordinate must stay above the stable-direction
/// components, which grow in reversed time from the seeding error.
const DOMINANCE: f64 = 100.0;

/// Integrates the seed in reversed time and fits log|coordinate| against
/// σ along η₃ and η₄. A window ends once the coordinate falls below
/// FLOOR·ε₀ or is no longer DOMINANCE times the stable components.
pub fn verify_unstable_decay(spec: SeedSpec, cfg: &IntegrationConfig) -> Result<DecayReport> {
    let x0 = seed_state(spec);
    let traj = integrate_reversed(Dimension::FIVE, x0.time_flip(), cfg)?;
    let pts: Vec<(f64, [f64; 4])> = traj.samples.iter().map(|p| (p.s, eigen_coordinates(p.state.time_flip()))).collect();
    let floor = FLOOR * spec.eps0;
    let fit = |k: usize| -> Option<(f64, (f64, f64))> {
        let data: Vec<(f64, f64)> = pts
            .iter()
            .take_while(|(_, c)| c[k].abs() > floor && c[k].abs() > DOMINANCE * (c[2].abs() + c[3].abs()))
            .map(|(s, c)| (*s, c[k].abs().ln()))
            .collect();
        let w = (data.first()?.0, data.last()?.0);
        if data.len() < 5 || w.1 - w.0 < 0.5 {
            return None;
        }
        Some((-slope(&data), w))
    };
    let (rate1, window1) = fit(0).ok_or_else(|| Error::Config("eta3 projection too small to fit".into()))?;
    let (rate2, window2) = fit(1).map_or((None, None), |(r, w)| (Some(r), Some(w)));
    let (min_norm_at, min_norm) = traj
        .samples
        .iter()
        .map(|p| (p.s, p.state.norm()))
        .fold((0.0, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best });
    Ok(DecayReport { rate1, rate2, window1, window2, min_norm, min_norm_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_coordinates_invert_basis() {
        let c = [0.3, -1.2, 0.5, 2.0];
        let lams = [1.0, 3.0, -4.0, -2.0];
        let mut x = [0.0; 4];
        for i in 0..4 {
            for k in 0..4 {
                x[k] += c[i] * f64::powi(lams[i], k as i32);
            }
        }
        let back = eigen_coordinates(State::from_array(x));
        assert!((0..4).all(|i| (back[i] - c[i]).abs() < 1e-12));
    }
}

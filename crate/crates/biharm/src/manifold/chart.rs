//! First-order chart of the unstable manifold W^u(0) for d = 5 and the
//! seeding circle on it.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ode::State;
use crate::regions;

/// Eigenvectors of the unstable directions and the graph derivative DW(0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalChart {
    /// Eigenvector for eigenvalue 1.
    pub eta3: [f64; 4],
    /// Eigenvector for eigenvalue 3.
    pub eta4: [f64; 4],
    /// Maps (φ, φ″) to (φ′, φ‴) on the tangent plane.
    pub dw0: [[f64; 2]; 2],
}

impl Default for LocalChart {
    fn default() -> Self {
        LocalChart {
            eta3: [1.0, 1.0, 1.0, 1.0],
            eta4: [1.0, 3.0, 9.0, 27.0],
            dw0: [[0.75, 0.25], [-2.25, 3.25]],
        }
    }
}

impl LocalChart {
    /// The tangent-plane point with (φ, φ″) = z.
    pub fn lift(&self, z: [f64; 2]) -> State {
        let w = [
            self.dw0[0][0] * z[0] + self.dw0[0][1] * z[1],
            self.dw0[1][0] * z[0] + self.dw0[1][1] * z[1],
        ];
        State::new(z[0], w[0], z[1], w[1])
    }
}

/// A point ε₀(cos θ, sin θ) on the seeding circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub eps0: f64,
    pub theta: f64,
}

impl SeedSpec {
    pub fn new(eps0: f64, theta: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 < 0.1) || !theta.is_finite() {
            return Err(Error::Config(format!("seed needs 0 < eps0 < 0.1 and finite theta, got ({eps0}, {theta})")));
        }
        Ok(SeedSpec { eps0, theta })
    }
}

pub fn seed_state(spec: SeedSpec) -> State {
    let (s, c) = spec.theta.sin_cos();
    LocalChart::default().lift([spec.eps0 * c, spec.eps0 * s])
}

/// Seed in double-double precision, exact in the chart coefficients.
pub fn seed_state_dd(eps0: f64, theta: Dd) -> [Dd; 4] {
    let (s, c) = theta.sin_cos();
    let a = c.mul_f64(eps0);
    let b = s.mul_f64(eps0);
    [a, (a.mul_f64(3.0) + b).mul_f64(0.25), b, (b.mul_f64(13.0) - a.mul_f64(9.0)).mul_f64(0.25)]
}

/// The θ ∈ [0, π/2] where the seed's (φ, φ″) meets the boundary curve
/// φ″ = 2√6 sin φ.
pub fn theta0(eps0: f64) -> Result<f64> {
    SeedSpec::new(eps0, 0.0)?;
    let g = |t: f64| regions::two_root_six() * (eps0 * t.cos()).sin() - eps0 * t.sin();
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    debug_assert!(g(lo) > 0.0 && g(hi) < 0.0);
    while hi - lo > 4.0 * f64::EPSILON {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

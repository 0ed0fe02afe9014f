//! Radial pullback ψ(r) = φ(log r), the Laplacian of the equivariant map
//! u = (x/|x| sin ψ, cos ψ), rescaled blowup diagnostics, and the winding
//! profile obtained from an orbit that leaves 𝒞 ∪ −𝒞.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, Direction, IntegrationConfig, Termination, Trajectory};
use crate::manifold::{seed_state, theta0, SeedSpec};
use crate::ode::{self, Dimension, State};
use crate::regions::{in_minus_c, in_region_c, RegionClass, BOUNDARY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialSample {
    pub r: f64,
    pub psi: f64,
    pub dpsi: f64,
    pub d2psi: f64,
}

/// ψ on (0, 1] sampled at the nodes of a forward trajectory. Nodes are
/// adaptive steps in s, so the r-grid is geometric away from blowup and
/// refines towards r = 1.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub samples: Vec<RadialSample>,
    pub psi0: f64,
    pub meta: String,
    /// s-value mapped to r = 1.
    pub shift: f64,
    traj: Trajectory,
}

impl RadialProfile {
    pub fn d(&self) -> Dimension {
        self.traj.d
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.samples[0].r, self.samples.last().expect("non-empty").r)
    }

    /// φ-jet at s = log r + shift, from the trajectory's dense output.
    pub fn state_at(&self, r: f64) -> Result<State> {
        let (lo, hi) = self.r_range();
        if !(r >= lo && r <= hi) {
            return Err(Error::OutOfSpan { s: r, lo, hi });
        }
        // Clamp so rounding in log/exp cannot leave the span.
        let (s0, s1) = (self.traj.first().s, self.shift.min(self.traj.last().s));
        self.traj.sample_at((r.ln() + self.shift).clamp(s0, s1))
    }

    pub fn sample_at(&self, r: f64) -> Result<RadialSample> {
        Ok(radial_sample(self.state_at(r)?, r))
    }

    /// |ψ − ψ₀| at the smallest sampled radius.
    pub fn origin_defect(&self) -> f64 {
        (self.samples[0].psi - self.psi0).abs()
    }

    /// Largest relative residual of the radial fourth-order equation over
    /// samples with r ≥ `r_min`.
    pub fn max_psi_residual(&self, r_min: f64) -> Result<f64> {
        let d = self.d();
        let mut worst: f64 = 0.0;
        for (p, x) in self.samples.iter().zip(self.states()) {
            if p.r >= r_min {
                worst = worst.max(ode::psi_residual_relative(d, p.r, ode::radial_jet(d, x, p.r))?.abs());
            }
        }
        Ok(worst)
    }

    /// max |ψ″(r)| / r^`exponent` over samples with r ≤ `r_max`.
    pub fn d2psi_power_constant(&self, r_max: f64, exponent: f64) -> f64 {
        self.samples.iter().filter(|p| p.r <= r_max).map(|p| p.d2psi.abs() / p.r.powf(exponent)).fold(0.0, f64::max)
    }

    fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.traj.samples.iter().filter(|p| p.s <= self.shift).map(|p| p.state)
    }

    /// CSV with header r, psi, dpsi, d2psi, L0f0, L1f1.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "psi", "dpsi", "d2psi", "L0f0", "L1f1"])?;
        let d = self.d();
        for p in &self.samples {
            let (l0, l1) = laplacian_at(d, p);
            wr.serialize((p.r, p.psi, p.dpsi, p.d2psi, l0, l1))?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn radial_sample(x: State, r: f64) -> RadialSample {
    RadialSample { r, psi: x.phi, dpsi: x.dphi / r, d2psi: (x.d2phi - x.dphi) / (r * r) }
}

/// Pulls a forward trajectory back to r = e^{s − shift}. `shift` defaults
/// to the terminal s, so a blowup lands at r = 1.
pub fn to_radial(traj: &Trajectory, shift: Option<f64>) -> Result<RadialProfile> {
    if traj.direction != Direction::Forward {
        return Err(Error::Config("radial pullback needs a forward trajectory".into()));
    }
    let shift = shift.unwrap_or(traj.last().s);
    let samples: Vec<RadialSample> = traj
        .samples
        .iter()
        .filter(|p| p.s <= shift)
        .map(|p| radial_sample(p.state, (p.s - shift).exp()))
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyOverlap(shift));
    }
    Ok(RadialProfile {
        samples,
        psi0: 0.0,
        meta: format!("d={} s=[{}, {}] shift={}", traj.d, traj.first().s, traj.last().s, shift),
        shift,
        traj: traj.clone(),
    })
}

/// (L₀f₀, L₁f₁) for f₀ = sin ψ, f₁ = cos ψ at one radial sample.
pub fn laplacian_at(d: Dimension, p: &RadialSample) -> (f64, f64) {
    let k = d.as_f64() - 1.0;
    let r = p.r;
    let (sn, cs) = p.psi.sin_cos();
    let (f0, f0p, f0pp) = (sn, cs * p.dpsi, cs * p.d2psi - sn * p.dpsi * p.dpsi);
    let (f1p, f1pp) = (-sn * p.dpsi, -sn * p.d2psi - cs * p.dpsi * p.dpsi);
    (f0pp + k / r * f0p - k / (r * r) * f0, f1pp + k / r * f1p)
}

/// The two components of Δu at radius r, where Δu(x) = (x/|x| L₀f₀, L₁f₁).
pub fn laplacian_components(d: Dimension, prof: &RadialProfile, r: f64) -> Result<(f64, f64)> {
    let d = d.require_blowup_range()?;
    Ok(laplacian_at(d, &prof.sample_at(r)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RescaledSample {
    pub s: f64,
    pub lambda: f64,
    pub v1: f64,
    pub v2: f64,
    pub zeta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupDiagnostics {
    pub samples: Vec<RescaledSample>,
    /// Zero of the affine fit of 1/λ against s over the final decade of λ.
    pub s_f_estimate: f64,
    pub r_squared: f64,
    pub fit_window: (f64, f64),
    pub v1_range: (f64, f64),
    pub v2_range: (f64, f64),
    pub zeta_range: (f64, f64),
}

fn range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

/// λ = (φ‴)^{1/3}, v₁ = φ′/λ, v₂ = φ″/λ², ζ = λ′/λ² on the terminal run of
/// samples with φ‴ > 0. λ′ comes from centred differences of the dense
/// output, independent of the vector field.
pub fn blowup_diagnostics(traj: &Trajectory) -> Result<BlowupDiagnostics> {
    let n = traj.samples.len();
    let start = traj.samples.iter().rposition(|p| p.state.d3phi <= 0.0).map_or(0, |i| i + 1);
    if n - start < 4 {
        return Err(Error::NoPositiveThirdDerivative);
    }
    let seg = &traj.samples[start..];
    let lam = |x: State| x.d3phi.cbrt();
    let mut out = Vec::with_capacity(seg.len() - 2);
    for w in seg.windows(3) {
        let (a, p, b) = (w[0].s, w[1], w[2].s);
        let h = 0.25 * (p.s - a).min(b - p.s);
        let (xm, xp) = (traj.sample_at(p.s - h)?, traj.sample_at(p.s + h)?);
        let l = lam(p.state);
        let dl = (lam(xp) - lam(xm)) / (2.0 * h);
        out.push(RescaledSample { s: p.s, lambda: l, v1: p.state.dphi / l, v2: p.state.d2phi / (l * l), zeta: dl / (l * l) });
    }
    let l_last = lam(traj.last().state);
    let fit: Vec<&RescaledSample> = out.iter().filter(|q| q.lambda >= l_last / 10.0).collect();
    if fit.len() < 3 {
        return Err(Error::NoPositiveThirdDerivative);
    }
    let pts: Vec<(f64, f64)> = fit.iter().map(|q| (q.s, 1.0 / q.lambda)).collect();
    let (slope, icept, r2) = linear_fit(&pts);
    Ok(BlowupDiagnostics {
        s_f_estimate: -icept / slope,
        r_squared: r2,
        fit_window: (pts[0].0, pts[pts.len() - 1].0),
        v1_range: range(fit.iter().map(|q| q.v1)),
        v2_range: range(fit.iter().map(|q| q.v2)),
        zeta_range: range(fit.iter().map(|q| q.zeta)),
        samples: out,
    })
}

/// Least squares y = a x + b; returns (a, b, R²).
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let a = sxy / sxx;
    (a, my - a * mx, if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) })
}

/// Seed for the winding orbit: a point of the seeding circle beyond θ₀.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindingSeed {
    pub eps0: f64,
    pub theta: f64,
}

impl WindingSeed {
    /// θ = θ₀(ε₀) + `offset`.
    pub fn beyond_theta0(eps0: f64, offset: f64) -> Result<Self> {
        Ok(WindingSeed { eps0, theta: theta0(eps0)? + offset })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub k: u32,
    pub s: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingReport {
    pub s_f_estimate: f64,
    pub crossings: Vec<Crossing>,
    pub winding_count: usize,
    pub seed: WindingSeed,
    pub reflected: bool,
    pub terminal_s: f64,
    pub blowup_norm: f64,
    /// Whether the gaps in s between successive crossings shrink.
    pub gaps_decreasing: bool,
}

/// First s at which φ reaches kπ for k = 1, 2, … (bisection on the dense
/// output, so the list is strictly increasing).
fn kpi_crossings(traj: &Trajectory, shift: f64) -> Result<Vec<Crossing>> {
    let mut out = Vec::new();
    let mut k = 1u32;
    for w in traj.samples.windows(2) {
        while w[1].state.phi >= k as f64 * PI {
            let target = k as f64 * PI;
            let (mut lo, mut hi) = (w[0].s.max(out.last().map_or(f64::NEG_INFINITY, |c: &Crossing| c.s)), w[1].s);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if traj.sample_at(mid)?.phi >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(Crossing { k, s: hi, r: (hi - shift).exp() });
            k += 1;
        }
    }
    Ok(out)
}

/// Integrates the d = 5 orbit through a seed outside 𝒞 ∪ −𝒞 to blowup,
/// reflects it if φ → −∞, and pulls it back so the blowup sits at r = 1.
pub fn build_winding_profile(cfg: &IntegrationConfig, seed: WindingSeed) -> Result<(Trajectory, RadialProfile, WindingReport)> {
    let spec = SeedSpec::new(seed.eps0, seed.theta)?;
    let x0 = seed_state(spec);
    let outside = |x: State| {
        in_region_c(x.phi, x.d2phi, BOUNDARY_TOL) == RegionClass::Outside
            && in_minus_c(x.phi, x.d2phi, BOUNDARY_TOL) == RegionClass::Outside
    };
    if !outside(x0) {
        return Err(Error::Config(format!("winding seed θ = {} lies in C or -C", seed.theta)));
    }
    let mut traj = integrate(Dimension::FIVE, x0, 0.0, cfg, &[])?;
    if !matches!(traj.termination, Termination::BlowupDetected { .. }) {
        return Err(Error::NoBlowup(format!("{:?} at s = {}", traj.termination, traj.last().s)));
    }
    let reflected = traj.last().state.phi < 0.0;
    if reflected {
        traj = traj.reflected();
    }
    let prof = to_radial(&traj, None)?;
    let diag = blowup_diagnostics(&traj)?;
    let crossings = kpi_crossings(&traj, prof.shift)?;
    let gaps: Vec<f64> = crossings.windows(2).map(|w| w[1].s - w[0].s).collect();
    let report = WindingReport {
        s_f_estimate: diag.s_f_estimate,
        winding_count: crossings.len(),
        gaps_decreasing: gaps.windows(2).all(|g| g[1] < g[0]),
        crossings,
        seed,
        reflected,
        terminal_s: traj.last().s,
        blowup_norm: cfg.blowup_norm,
    };
    Ok((traj, prof, report))
}

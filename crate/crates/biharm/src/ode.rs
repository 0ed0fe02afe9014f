//! The autonomous fourth-order ODE in s = log r, its energy, symmetries,
//! critical points and the second-order harmonic analogue.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};

/// Domain dimension `d`. Evaluation accepts 3..=10; individual operations
/// narrow this further.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub const FIVE: Dimension = Dimension(5);

    pub fn new(d: u32) -> Result<Self> {
        if (3..=10).contains(&d) {
            Ok(Dimension(d))
        } else {
            Err(Error::Dimension { d, need: "3..=10" })
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Blowup classification is only available for d in {5, 6, 7}.
    pub fn require_blowup_range(self) -> Result<Self> {
        if (5..=7).contains(&self.0) {
            Ok(self)
        } else {
            Err(Error::Dimension { d: self.0, need: "5, 6 or 7" })
        }
    }

    pub fn require_five(self) -> Result<Self> {
        if self.0 == 5 {
            Ok(self)
        } else {
            Err(Error::Dimension { d: self.0, need: "5" })
        }
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The 4-jet (φ, φ′, φ″, φ‴).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
    pub d3phi: f64,
}

impl State {
    pub const ZERO: State = State { phi: 0.0, dphi: 0.0, d2phi: 0.0, d3phi: 0.0 };

    pub const fn new(phi: f64, dphi: f64, d2phi: f64, d3phi: f64) -> Self {
        State { phi, dphi, d2phi, d3phi }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        State::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.phi, self.dphi, self.d2phi, self.d3phi]
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Euclidean distance to another jet.
    pub fn dist(self, other: State) -> f64 {
        let (a, b) = (self.to_array(), other.to_array());
        (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
    }

    /// The jet of s ↦ φ(−s): odd derivatives change sign.
    pub fn time_flip(self) -> Self {
        State::new(self.phi, -self.dphi, self.d2phi, -self.d3phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("parity must be `even` or `odd`, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub parity: Parity,
    pub matrix: [[f64; 4]; 4],
    /// Populated for even parity only.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<[f64; 4]>,
}

impl Linearization {
    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in self.matrix.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// max_i |(A v − λ v)_i| for each stored eigenpair.
    pub fn eigen_residuals(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&lam, &v)| {
                let av = self.apply(v);
                (0..4).map(|i| (av[i] - lam * v[i]).abs()).fold(0.0, f64::max)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicState {
    pub phi_h: f64,
    pub dphi_h: f64,
}

fn dm(d: Dimension) -> f64 {
    d.as_f64()
}

pub fn coeff_q(d: Dimension, phi: f64) -> f64 {
    let d = dm(d);
    (d - 1.0) * (2.0 * phi).cos() - (d - 11.0) * d - 21.0
}

/// Derivative of `coeff_q` in φ.
pub fn coeff_dq(d: Dimension, phi: f64) -> f64 {
    -2.0 * (dm(d) - 1.0) * (2.0 * phi).sin()
}

pub fn coeff_f(d: Dimension, phi: f64) -> f64 {
    let d = dm(d);
    1.5 * (d - 3.0) * (d - 1.0) * (2.0 * phi).sin()
}

pub fn coeff_g(d: Dimension, phi: f64) -> f64 {
    let d = dm(d);
    0.5 * ((d - 1.0) * (2.0 * phi).cos() + 3.0 * d - 5.0)
}

/// Potential with F(0) = 0 and F′ = f.
#[allow(non_snake_case)]
pub fn coeff_F(d: Dimension, phi: f64) -> f64 {
    let d = dm(d);
    let s = phi.sin();
    1.5 * (d - 3.0) * (d - 1.0) * s * s
}

/// φ⁽⁴⁾ as a function of the jet.
pub fn fourth_derivative(d: Dimension, x: State) -> f64 {
    let State { phi, dphi: p1, d2phi: p2, d3phi: p3 } = x;
    let dd = dm(d);
    let s2 = (2.0 * phi).sin();
    let c2 = (2.0 * phi).cos();
    coeff_q(d, phi) * p2 - coeff_f(d, phi)
        + (6.0 * p2 - (dd - 1.0) * s2) * p1 * p1
        + (dd - 4.0) * ((dd - 1.0) * c2 + 3.0 * dd - 5.0) * p1
        + 2.0 * (dd - 4.0) * p1 * p1 * p1
        - 2.0 * (dd - 4.0) * p3
}

/// (φ′, φ″, φ‴, φ⁽⁴⁾).
pub fn vector_field(d: Dimension, x: State) -> State {
    State::new(x.dphi, x.d2phi, x.d3phi, fourth_derivative(d, x))
}

/// Field of u(s) = φ(−s). Terms with an odd number of derivatives flip.
pub fn reversed_field(d: Dimension, u: State) -> State {
    let State { phi, dphi: p1, d2phi: p2, d3phi: p3 } = u;
    let dd = dm(d);
    let s2 = (2.0 * phi).sin();
    let c2 = (2.0 * phi).cos();
    let u4 = coeff_q(d, phi) * p2 - coeff_f(d, phi) + (6.0 * p2 - (dd - 1.0) * s2) * p1 * p1
        - (dd - 4.0) * ((dd - 1.0) * c2 + 3.0 * dd - 5.0) * p1
        - 2.0 * (dd - 4.0) * p1 * p1 * p1
        + 2.0 * (dd - 4.0) * p3;
    State::new(p1, p2, p3, u4)
}

pub fn energy(d: Dimension, x: State) -> EnergyBreakdown {
    let State { phi, dphi: p1, d2phi: p2, d3phi: p3 } = x;
    let dd = dm(d);
    let q = coeff_q(d, phi);
    let kinetic = p1 * (p3 + 2.0 * (dd - 4.0) * p2 - 0.5 * q * p1 - 1.5 * p1 * p1 * p1);
    let potential = coeff_F(d, phi) - 0.5 * p2 * p2;
    let rate = (dd - 4.0)
        * (2.0 * p2 * p2 + ((dd - 1.0) * (2.0 * phi).cos() + 3.0 * dd - 5.0) * p1 * p1 + 2.0 * p1.powi(4));
    EnergyBreakdown { total: kinetic + potential, kinetic, potential, rate }
}

pub fn symmetry_shift(x: State, k: i64) -> State {
    State { phi: x.phi + k as f64 * PI, ..x }
}

pub fn symmetry_reflect(x: State, k: i64) -> State {
    State::new(k as f64 * PI - x.phi, -x.dphi, -x.d2phi, -x.d3phi)
}

/// Values at φ of the three functions whose suprema define c⋆:
/// |q′|/12, f/q and (2F)^{1/2}.
pub fn c_star_terms_at(d: Dimension, phi: f64) -> [f64; 3] {
    [
        coeff_dq(d, phi).abs() / 12.0,
        coeff_f(d, phi) / coeff_q(d, phi),
        (2.0 * coeff_F(d, phi)).sqrt(),
    ]
}

/// Closed-form suprema of the three c⋆ terms.
pub fn c_star_terms(d: Dimension) -> Result<[f64; 3]> {
    let d = d.require_blowup_range()?;
    let dd = dm(d);
    let a = 1.5 * (dd - 3.0) * (dd - 1.0);
    let b = dd - 1.0;
    let k = -(dd - 11.0) * dd - 21.0;
    // A sin t / (K + B cos t) peaks at cos t = −B/K.
    Ok([(dd - 1.0) / 6.0, a / (k * k - b * b).sqrt(), (3.0 * (dd - 3.0) * (dd - 1.0)).sqrt()])
}

/// Threshold on φ″ beyond which blowup is forced.
pub fn c_star(d: Dimension) -> Result<f64> {
    Ok(c_star_terms(d)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Critical points kπ/2; only defined here for the parity of k.
pub fn critical_point(k: i64) -> State {
    State::new(k as f64 * FRAC_PI_2, 0.0, 0.0, 0.0)
}

pub fn linearization(d: Dimension, parity: Parity) -> Result<Linearization> {
    if d.get() == 3 {
        return Err(Error::Dimension { d: 3, need: "d not in {1, 3}" });
    }
    let dd = dm(d);
    let bottom = match parity {
        Parity::Even => [
            -3.0 * (dd - 3.0) * (dd - 1.0),
            2.0 * (dd - 4.0) * (2.0 * dd - 3.0),
            -(dd - 12.0) * dd - 22.0,
            8.0 - 2.0 * dd,
        ],
        Parity::Odd => [
            3.0 * (dd - 3.0) * (dd - 1.0),
            2.0 * (dd - 4.0) * (dd - 2.0),
            -(dd - 10.0) * dd - 20.0,
            8.0 - 2.0 * dd,
        ],
    };
    let matrix = [
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        bottom,
    ];
    let (eigenvalues, eigenvectors) = match parity {
        Parity::Even => {
            let ev = vec![3.0, 1.0, 1.0 - dd, 3.0 - dd];
            let vecs = ev.iter().map(|&l| [1.0, l, l * l, l * l * l]).collect();
            (ev, vecs)
        }
        Parity::Odd => (Vec::new(), Vec::new()),
    };
    Ok(Linearization { parity, matrix, eigenvalues, eigenvectors })
}

/// (φ′_H, φ″_H) for the damped pendulum analogue.
pub fn harmonic_field(d: Dimension, h: HarmonicState) -> [f64; 2] {
    let dd = dm(d);
    [h.dphi_h, 0.5 * (dd - 1.0) * (2.0 * h.phi_h).sin() - (dd - 2.0) * h.dphi_h]
}

/// (energy, rate of change) of the harmonic analogue.
pub fn harmonic_energy(d: Dimension, h: HarmonicState) -> (f64, f64) {
    let dd = dm(d);
    let c = h.phi_h.cos();
    (
        0.5 * h.dphi_h * h.dphi_h + 0.5 * (dd - 1.0) * c * c,
        -(dd - 2.0) * h.dphi_h * h.dphi_h,
    )
}

/// Radial 5-jet (ψ, ψ′, ψ″, ψ‴, ψ⁽⁴⁾) at r.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialJet {
    pub psi: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

/// The individual terms of the radial right-hand side, in display order.
fn psi_rhs_terms(d: Dimension, r: f64, j: RadialJet) -> [f64; 5] {
    let dd = dm(d);
    let s2 = (2.0 * j.psi).sin();
    let c2 = (2.0 * j.psi).cos();
    [
        6.0 * j.d1 * j.d1 * j.d2,
        2.0 * (dd - 1.0) / r * (j.d1.powi(3) - j.d3),
        -(dd - 1.0) / (r * r) * ((dd - c2 - 4.0) * j.d2 + s2 * j.d1 * j.d1),
        (dd - 3.0) * (dd - 1.0) / r.powi(3) * (c2 + 2.0) * j.d1,
        -3.0 * (dd - 3.0) * (dd - 1.0) / (2.0 * r.powi(4)) * s2,
    ]
}

/// ψ⁽⁴⁾ minus the right-hand side of the radial equation.
pub fn psi_residual(d: Dimension, r: f64, jet: RadialJet) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(jet.d4 - psi_rhs_terms(d, r, jet).iter().sum::<f64>())
}

/// `psi_residual` divided by 1 + |ψ⁽⁴⁾| + Σ|terms|, a defect that is
/// meaningful in floating point where the individual terms are large.
pub fn psi_residual_relative(d: Dimension, r: f64, jet: RadialJet) -> Result<f64> {
    let res = psi_residual(d, r, jet)?;
    let scale = 1.0 + jet.d4.abs() + psi_rhs_terms(d, r, jet).iter().map(|t| t.abs()).sum::<f64>();
    Ok(res / scale)
}

/// Chain rule for ψ(r) = φ(log r) up to fourth order. The coefficients are
/// signed Stirling numbers of the first kind.
pub fn radial_jet(d: Dimension, x: State, r: f64) -> RadialJet {
    let p4 = fourth_derivative(d, x);
    let (p1, p2, p3) = (x.dphi, x.d2phi, x.d3phi);
    RadialJet {
        psi: x.phi,
        d1: p1 / r,
        d2: (p2 - p1) / (r * r),
        d3: (p3 - 3.0 * p2 + 2.0 * p1) / r.powi(3),
        d4: (p4 - 6.0 * p3 + 11.0 * p2 - 6.0 * p1) / r.powi(4),
    }
}

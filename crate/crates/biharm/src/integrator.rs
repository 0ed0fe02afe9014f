//! Dormand–Prince 5(4) with continuous extension, event location by
//! bisection on the dense output, and blowup termination.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Dimension, State};
use crate::regions;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub blowup_norm: f64,
    pub max_span: f64,
    pub event_refine_tol: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_step: 0.05,
            blowup_norm: 1e8,
            max_span: 25.0,
            event_refine_tol: 1e-10,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("blowup_norm", self.blowup_norm),
            ("max_span", self.max_span),
            ("event_refine_tol", self.event_refine_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.rel_tol > 1e-6 || self.abs_tol > 1e-6 {
            return Err(Error::Config("rel_tol and abs_tol must not exceed 1e-6".into()));
        }
        Ok(())
    }

    pub fn with_span(self, max_span: f64) -> Self {
        IntegrationConfig { max_span, ..self }
    }

    pub fn with_blowup_norm(self, blowup_norm: f64) -> Self {
        IntegrationConfig { blowup_norm, ..self }
    }

    pub fn with_tolerances(self, rel_tol: f64, abs_tol: f64) -> Self {
        IntegrationConfig { rel_tol, abs_tol, ..self }
    }
}

/// User event: fires where the function changes sign.
pub type EventFn = Arc<dyn Fn(&State) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum EventKind {
    /// φ″ crosses +c⋆ upward.
    SecondDerivUp,
    /// φ″ crosses −c⋆ downward.
    SecondDerivDown,
    /// (φ, φ″) reaches ∂𝒞 after having been inside.
    RegionCExit,
    Custom { id: String, func: EventFn },
}

impl EventKind {
    pub fn custom(id: impl Into<String>, f: impl Fn(&State) -> f64 + Send + Sync + 'static) -> Self {
        EventKind::Custom { id: id.into(), func: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        match self {
            EventKind::SecondDerivUp => "second_deriv_up",
            EventKind::SecondDerivDown => "second_deriv_down",
            EventKind::RegionCExit => "region_c_exit",
            EventKind::Custom { id, .. } => id,
        }
    }
}

impl fmt::Debug for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl PartialEq for EventKind {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub s: f64,
    pub state: State,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    SpanExhausted,
    BlowupDetected { s_last: f64, norm: f64 },
    EventStop(Event),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    /// Samples describe u(σ) = φ(−σ) against σ.
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    pub state: State,
}

/// Continuous extension of one accepted step.
#[derive(Clone, Debug)]
enum Segment {
    /// Dormand–Prince interpolant.
    Dp { s0: f64, h: f64, r: [[f64; 4]; 5] },
    /// Taylor coefficients of φ about `s0`.
    Taylor { s0: f64, coeffs: Vec<f64> },
}

impl Segment {
    fn eval(&self, s: f64) -> State {
        match self {
            Segment::Dp { s0, h, r } => {
                let t = (s - s0) / h;
                let t1 = 1.0 - t;
                let mut y = [0.0; 4];
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = r[0][i] + t * (r[1][i] + t1 * (r[2][i] + t * (r[3][i] + t1 * r[4][i])));
                }
                State::from_array(y)
            }
            Segment::Taylor { s0, coeffs } => {
                let t = s - s0;
                let mut y = [0.0; 4];
                for (j, yj) in y.iter_mut().enumerate() {
                    // j-th derivative of Σ aₖ tᵏ
                    let mut acc = 0.0;
                    for k in (j..coeffs.len()).rev() {
                        let fall: f64 = (k - j + 1..=k).map(|m| m as f64).product();
                        acc = acc * t + coeffs[k] * fall;
                    }
                    *yj = acc;
                }
                State::from_array(y)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub d: Dimension,
    pub direction: Direction,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub events: Vec<Event>,
    segments: Vec<Segment>,
}

impl Trajectory {
    /// Assembles a forward trajectory from Taylor steps: `steps[i]` holds
    /// the coefficients of φ about `samples[i].s`, valid up to the next
    /// sample.
    pub fn from_taylor(
        d: Dimension,
        samples: Vec<Sample>,
        steps: Vec<Vec<f64>>,
        termination: Termination,
        events: Vec<Event>,
    ) -> Trajectory {
        assert_eq!(samples.len(), steps.len() + 1, "one Taylor step per sample interval");
        let segments = samples.iter().zip(steps).map(|(p, coeffs)| Segment::Taylor { s0: p.s, coeffs }).collect();
        Trajectory { d, direction: Direction::Forward, samples, termination, events, segments }
    }

    /// The image under φ ↦ −φ, which maps solutions to solutions.
    pub fn reflected(&self) -> Trajectory {
        let neg = |x: State| State::new(-x.phi, -x.dphi, -x.d2phi, -x.d3phi);
        let segments = self
            .segments
            .iter()
            .map(|seg| match seg {
                Segment::Dp { s0, h, r } => Segment::Dp { s0: *s0, h: *h, r: r.map(|row| row.map(|v| -v)) },
                Segment::Taylor { s0, coeffs } => Segment::Taylor { s0: *s0, coeffs: coeffs.iter().map(|c| -c).collect() },
            })
            .collect();
        Trajectory {
            d: self.d,
            direction: self.direction,
            samples: self.samples.iter().map(|p| Sample { s: p.s, state: neg(p.state) }).collect(),
            termination: self.termination.clone(),
            events: self.events.iter().map(|e| Event { state: neg(e.state), ..e.clone() }).collect(),
            segments,
        }
    }

    pub fn first(&self) -> Sample {
        self.samples[0]
    }

    pub fn last(&self) -> Sample {
        *self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn span(&self) -> (f64, f64) {
        (self.first().s, self.last().s)
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.samples.iter().map(|p| p.state)
    }

    pub fn blew_up(&self) -> bool {
        matches!(self.termination, Termination::BlowupDetected { .. })
    }

    /// Dense-output state at s.
    pub fn sample_at(&self, s: f64) -> Result<State> {
        let (lo, hi) = self.span();
        if !(s >= lo && s <= hi) {
            return Err(Error::OutOfSpan { s, lo, hi });
        }
        let idx = self.samples.partition_point(|p| p.s < s);
        if idx < self.samples.len() && self.samples[idx].s == s {
            return Ok(self.samples[idx].state);
        }
        Ok(self.segments[idx - 1].eval(s))
    }

    /// CSV with header s, phi, dphi, d2phi, d3phi, energy_total, energy_rate.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["s", "phi", "dphi", "d2phi", "d3phi", "energy_total", "energy_rate"])?;
        for p in &self.samples {
            let e = ode::energy(self.d, p.state);
            let x = p.state;
            wr.serialize((p.s, x.phi, x.dphi, x.d2phi, x.d3phi, e.total, e.rate))?;
        }
        wr.flush()?;
        Ok(())
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const DENSE: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

type Field<'a> = dyn Fn(State) -> State + 'a;

struct StepOutcome {
    y1: [f64; 4],
    k7: [f64; 4],
    err: f64,
    seg: Segment,
}

fn add_scaled(y: [f64; 4], h: f64, ks: &[[f64; 4]; 7], coeffs: &[f64]) -> [f64; 4] {
    let mut out = y;
    for (j, &a) in coeffs.iter().enumerate() {
        if a != 0.0 {
            for i in 0..4 {
                out[i] += h * a * ks[j][i];
            }
        }
    }
    out
}

fn dp_step(f: &Field<'_>, s: f64, y: [f64; 4], k1: [f64; 4], h: f64, cfg: &IntegrationConfig) -> StepOutcome {
    let mut k = [[0.0; 4]; 7];
    k[0] = k1;
    for st in 1..7 {
        let yi = add_scaled(y, h, &k, &A[st][..st]);
        k[st] = f(State::from_array(yi)).to_array();
    }
    // The seventh stage is evaluated at the new point and reused.
    let y1 = add_scaled(y, h, &k, &A[6][..6]);
    let mut acc = 0.0;
    for i in 0..4 {
        let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y1[i].abs());
        acc += (e / sc).powi(2);
    }
    let mut err = (acc / 4.0).sqrt();
    if !y1.iter().chain(k[6].iter()).all(|v| v.is_finite()) {
        err = f64::INFINITY;
    }
    let mut r = [[0.0; 4]; 5];
    for i in 0..4 {
        let ydiff = y1[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        r[0][i] = y[i];
        r[1][i] = ydiff;
        r[2][i] = bspl;
        r[3][i] = ydiff - h * k[6][i] - bspl;
        r[4][i] = h * (0..7).map(|j| DENSE[j] * k[j][i]).sum::<f64>();
    }
    StepOutcome { y1, k7: k[6], err, seg: Segment::Dp { s0: s, h, r } }
}

/// Compiled event: a scalar function and the sign convention that fires.
struct Watcher {
    kind: EventKind,
    g: Box<dyn Fn(&State) -> f64>,
    /// Fires on a transition from g > 0 to g <= 0 (region exit), else on
    /// g < 0 to g >= 0 (or any sign change for custom events).
    exit: bool,
    armed: bool,
    prev: f64,
}

impl Watcher {
    fn new(kind: EventKind, d: Dimension, x0: &State) -> Result<Self> {
        let (g, exit): (Box<dyn Fn(&State) -> f64>, bool) = match &kind {
            EventKind::SecondDerivUp => {
                let c = ode::c_star(d)?;
                (Box::new(move |x: &State| x.d2phi - c), false)
            }
            EventKind::SecondDerivDown => {
                let c = ode::c_star(d)?;
                (Box::new(move |x: &State| -x.d2phi - c), false)
            }
            EventKind::RegionCExit => {
                d.require_five()?;
                (Box::new(|x: &State| regions::region_c_margin(x.phi, x.d2phi)), true)
            }
            EventKind::Custom { func, .. } => {
                let f = func.clone();
                (Box::new(move |x: &State| f(x)), false)
            }
        };
        let prev = g(x0);
        let armed = if exit { prev > 0.0 } else { true };
        Ok(Watcher { kind, g, exit, armed, prev })
    }

    fn fires(&self, prev: f64, now: f64) -> bool {
        match (&self.kind, self.exit) {
            (_, true) => self.armed && prev > 0.0 && now <= 0.0,
            (EventKind::Custom { .. }, _) => (prev < 0.0 && now >= 0.0) || (prev > 0.0 && now <= 0.0),
            _ => prev < 0.0 && now >= 0.0,
        }
    }

    /// Bisection on the dense output; returns the first s at which the
    /// event condition holds, to within `tol`.
    fn refine(&self, seg: &Segment, s0: f64, s1: f64, tol: f64) -> (f64, State) {
        let (mut lo, mut hi) = (s0, s1);
        let g_lo = self.prev;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let gm = (self.g)(&seg.eval(mid));
            if self.fires(g_lo, gm) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (hi, seg.eval(hi))
    }
}

fn run(
    d: Dimension,
    direction: Direction,
    field: &Field<'_>,
    x0: State,
    s0: f64,
    cfg: &IntegrationConfig,
    watch: &[EventKind],
) -> Result<Trajectory> {
    cfg.validate()?;
    if !x0.is_finite() {
        return Err(Error::Config(format!("initial state is not finite: {x0:?}")));
    }
    let mut watchers = watch
        .iter()
        .map(|k| Watcher::new(k.clone(), d, &x0))
        .collect::<Result<Vec<_>>>()?;

    let s_end = s0 + cfg.max_span;
    let mut samples = vec![Sample { s: s0, state: x0 }];
    let mut segments: Vec<Segment> = Vec::new();
    let mut events = Vec::new();

    let mut s = s0;
    let mut y = x0.to_array();
    let mut k1 = field(x0).to_array();
    let ynorm = x0.norm();
    let fnorm = State::from_array(k1).norm();
    let mut h = (0.01 * (1.0 + ynorm) / (1e-8 + fnorm)).min(cfg.max_step).max(1e-6);

    let termination = loop {
        if s >= s_end {
            break Termination::SpanExhausted;
        }
        let last = s_end - s <= h * (1.0 + 1e-12);
        if last {
            h = s_end - s;
        }
        let out = dp_step(field, s, y, k1, h, cfg);
        if out.err > 1.0 {
            let fac = if out.err.is_finite() { (0.9 * out.err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            if h < 1e-14 * s.abs().max(1.0) {
                return Err(Error::StepUnderflow { s, h, norm: State::from_array(y).norm() });
            }
            continue;
        }
        let s_new = if last { s_end } else { s + h };
        let x_new = State::from_array(out.y1);

        let mut hit: Option<(f64, State, usize)> = None;
        for (wi, w) in watchers.iter_mut().enumerate() {
            let now = (w.g)(&x_new);
            if w.fires(w.prev, now) {
                let (se, xe) = w.refine(&out.seg, s, s_new, cfg.event_refine_tol);
                if hit.is_none_or(|(sh, _, _)| se < sh) {
                    hit = Some((se, xe, wi));
                }
            }
            if w.exit && now > 0.0 {
                w.armed = true;
            }
            w.prev = now;
        }
        segments.push(out.seg);
        if let Some((se, xe, wi)) = hit {
            let xe = if se >= s_new { x_new } else { xe };
            samples.push(Sample { s: se.min(s_new), state: xe });
            let ev = Event { kind: watchers[wi].kind.clone(), s: se.min(s_new), state: xe };
            events.push(ev.clone());
            break Termination::EventStop(ev);
        }
        samples.push(Sample { s: s_new, state: x_new });
        s = s_new;
        y = out.y1;
        k1 = out.k7;

        let norm = x_new.norm();
        if norm > cfg.blowup_norm {
            break Termination::BlowupDetected { s_last: s, norm };
        }
        let fac = if out.err == 0.0 { 5.0 } else { (0.9 * out.err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(cfg.max_step);
    };
    Ok(Trajectory { d, direction, samples, termination, events, segments })
}

/// Integrates φ⁽⁴⁾ = Φ(φ, φ′, φ″, φ‴) forward from (s0, x0).
pub fn integrate(
    d: Dimension,
    x0: State,
    s0: f64,
    cfg: &IntegrationConfig,
    watch: &[EventKind],
) -> Result<Trajectory> {
    run(d, Direction::Forward, &|x| ode::vector_field(d, x), x0, s0, cfg, watch)
}

/// Integrates the time-reversed field for u(σ) = φ(−σ) starting at σ = 0.
/// `x0` is the jet of u, i.e. `State::time_flip` of a φ-jet.
pub fn integrate_reversed(d: Dimension, x0: State, cfg: &IntegrationConfig) -> Result<Trajectory> {
    run(d, Direction::Reversed, &|x| ode::reversed_field(d, x), x0, 0.0, cfg, &[])
}

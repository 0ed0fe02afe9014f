//! The nine certificate tasks and their JSON certificates.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::funcs;
use super::interval::{dyadic_string, Interval, IntervalBox, ROUNDING_MODE};
use super::search::{enclose_sublevel, prove_lower_bound, SearchOutcome, Status};
use super::taylor::{taylor_enclose_p_coeff, Which};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskId {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    V7,
    V8,
    V9,
}

impl TaskId {
    pub const ALL: [TaskId; 9] =
        [TaskId::V1, TaskId::V2, TaskId::V3, TaskId::V4, TaskId::V5, TaskId::V6, TaskId::V7, TaskId::V8, TaskId::V9];

    pub fn default_min_width(self) -> f64 {
        match self {
            TaskId::V8 | TaskId::V9 => 1e-4,
            _ => 1e-5,
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for TaskId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownTask(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coords {
    #[serde(rename = "(phi0,phi)")]
    PhiPhi,
    #[serde(rename = "(phi0,z)")]
    PhiZ,
    #[serde(rename = "phi")]
    Phi,
}

/// A box in both decimal and exact dyadic form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub coords: Coords,
    pub decimal: Vec<[f64; 2]>,
    pub dyadic: Vec<[String; 2]>,
}

impl BoxRecord {
    pub fn new(coords: Coords, b: &IntervalBox) -> Self {
        BoxRecord {
            coords,
            decimal: b.dims().iter().map(|i| [i.lo(), i.hi()]).collect(),
            dyadic: b.dims().iter().map(|i| [dyadic_string(i.lo()), dyadic_string(i.hi())]).collect(),
        }
    }

    pub fn to_box(&self) -> IntervalBox {
        let b: Vec<(f64, f64)> = self.decimal.iter().map(|d| (d[0], d[1])).collect();
        IntervalBox::from_bounds(&b).expect("recorded boxes are valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    Proved,
    Failed,
    Inconclusive,
}

impl CertStatus {
    fn rank(self) -> u8 {
        match self {
            CertStatus::Proved => 0,
            CertStatus::Inconclusive => 1,
            CertStatus::Failed => 2,
        }
    }
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub task_id: TaskId,
    pub region: Vec<BoxRecord>,
    pub target: String,
    pub status: CertStatus,
    pub witness: Option<BoxRecord>,
    pub boxes_examined: u64,
    pub max_depth: u32,
    pub min_width: f64,
    pub rounding_mode: String,
    pub wall_ms: u64,
    pub details: serde_json::Value,
}

impl Certificate {
    /// The certificate with wall time removed, for comparing runs.
    pub fn without_timing(&self) -> Certificate {
        Certificate { wall_ms: 0, ..self.clone() }
    }
}

pub type BoxEval = fn(&IntervalBox) -> Interval;

/// One lower-bound claim f ≥ bound on a box.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub label: &'static str,
    pub coords: Coords,
    pub region: IntervalBox,
    pub bound: f64,
    pub f: BoxEval,
}

fn bx(b: &[(f64, f64)]) -> IntervalBox {
    IntervalBox::from_bounds(b).expect("static boxes are valid")
}

fn half_pi_hi() -> f64 {
    Interval::half_pi().hi()
}

/// The published sublevel box A in (φ₀, z) coordinates.
pub fn region_a() -> IntervalBox {
    bx(&[(0.0, 783.0 / 1024.0), (779.0 / 1024.0, 1.0)])
}

/// Branch-and-bound claims made by a task (empty for V4 and V7).
pub fn bound_checks(id: TaskId) -> Vec<BoundCheck> {
    let h = half_pi_hi();
    let check = |label, coords, region, bound, f| BoundCheck { label, coords, region, bound, f };
    match id {
        TaskId::V1 => vec![check(
            "4cos2phi - 2sqrt6 cos phi0 + 9 >= 0.1 over one period",
            Coords::PhiPhi,
            bx(&[(0.0, Interval::pi().scale_pow2(2.0).hi()), (0.0, Interval::pi().hi())]),
            0.1,
            funcs::a_without_v,
        )],
        TaskId::V2 => vec![check("c0 >= 0.01", Coords::PhiPhi, bx(&[(0.4, h), (0.0, h)]), 0.01, funcs::coeff_v0)],
        TaskId::V3 => vec![
            check("c0 >= 0.01", Coords::PhiZ, bx(&[(0.01, 0.4), (0.0, 1.0)]), 0.01, funcs::coeff_v0_z),
            check("c0 >= 0.01", Coords::PhiZ, bx(&[(0.0, 0.4), (0.01, 1.0)]), 0.01, funcs::coeff_v0_z),
        ],
        TaskId::V5 => vec![
            check("c2 >= 0.01", Coords::PhiPhi, bx(&[(0.11, h), (0.0, h)]), 0.01, funcs::coeff_v2),
            check("c2 >= 0.01", Coords::PhiPhi, bx(&[(0.0, h), (0.0006, h)]), 0.01, funcs::coeff_v2),
        ],
        TaskId::V6 => vec![check("c1 >= 0.01", Coords::PhiPhi, bx(&[(1.0, h), (0.0, h)]), 0.01, funcs::coeff_v1)],
        TaskId::V8 => vec![check(
            "min over v >= 0 of c0 + c1 v + c2 v^2 >= 0.5",
            Coords::PhiZ,
            region_a(),
            0.5,
            funcs::quadratic_min_z,
        )],
        TaskId::V9 => vec![check(
            "6(3phi - 2sin2phi + 2phi cos2phi) > 1.9",
            Coords::Phi,
            bx(&[(Interval::pi().scale_pow2(0.125).lo(), 3.0)]),
            1.9f64.next_up(),
            funcs::q_constant,
        )],
        TaskId::V4 | TaskId::V7 => Vec::new(),
    }
}

struct Acc {
    status: CertStatus,
    witness: Option<BoxRecord>,
    boxes: u64,
    depth: u32,
    details: Vec<serde_json::Value>,
}

impl Acc {
    fn new() -> Self {
        Acc { status: CertStatus::Proved, witness: None, boxes: 0, depth: 0, details: Vec::new() }
    }

    fn note(&mut self, status: CertStatus, witness: Option<BoxRecord>) {
        if status.rank() > self.status.rank() {
            self.status = status;
            self.witness = witness;
        }
    }

    fn search(&mut self, c: &BoundCheck, out: SearchOutcome) {
        let status = match out.status {
            Status::Proved => CertStatus::Proved,
            Status::Failed { .. } => CertStatus::Failed,
            Status::Inconclusive { .. } => CertStatus::Inconclusive,
        };
        let witness = out.status.witness().map(|w| BoxRecord::new(c.coords, w));
        self.boxes += out.boxes_examined;
        self.depth = self.depth.max(out.max_depth);
        self.details.push(json!({
            "check": c.label,
            "region": BoxRecord::new(c.coords, &c.region),
            "bound": c.bound,
            "status": status,
            "certified_min": out.certified_min,
            "boxes_examined": out.boxes_examined,
        }));
        self.note(status, witness);
    }
}

fn taylor_part(acc: &mut Acc, which: Which) -> Result<()> {
    let dom = which.domain();
    let enc = taylor_enclose_p_coeff(which, &dom)?;
    acc.boxes += 1;
    let status = if enc.positive() { CertStatus::Proved } else { CertStatus::Failed };
    acc.details.push(json!({
        "check": "Taylor enclosure c3 phi0^3 + c1 phi with c3, c1 > 0",
        "coefficient": which,
        "region": BoxRecord::new(Coords::PhiPhi, &dom),
        "phi0_cubed": [enc.phi0_cubed.lo(), enc.phi0_cubed.hi()],
        "phi": [enc.phi.lo(), enc.phi.hi()],
        "reference": which.reference(),
        "max_endpoint_deviation": enc.deviation(),
        "status": status,
    }));
    acc.note(status, if enc.positive() { None } else { Some(BoxRecord::new(Coords::PhiPhi, &dom)) });
    Ok(())
}

fn v7_part(acc: &mut Acc) {
    let region = bx(&[(0.0, 1.0), (0.0, 1.0)]);
    let enclosure = enclose_sublevel(&funcs::coeff_v1_z, &region, 0.01, 1024);
    let a = region_a();
    let status = match &enclosure {
        None => CertStatus::Proved,
        Some(e) if e.is_subset_of(&a) => CertStatus::Proved,
        Some(_) => CertStatus::Failed,
    };
    acc.boxes += 1;
    acc.details.push(json!({
        "check": "sublevel set {c1 <= 0.01} inside A",
        "grid_denominator": 1024,
        "enclosure": enclosure.as_ref().map(|e| BoxRecord::new(Coords::PhiZ, e)),
        "enclosure_over_1024": enclosure.as_ref().map(|e| e.dims().iter().map(|i| [i.lo() * 1024.0, i.hi() * 1024.0]).collect::<Vec<_>>()),
        "published": BoxRecord::new(Coords::PhiZ, &a),
        "equals_published": enclosure.as_ref() == Some(&a),
        "status": status,
    }));
    acc.note(status, enclosure.filter(|_| status != CertStatus::Proved).map(|e| BoxRecord::new(Coords::PhiZ, &e)));
}

/// Interval point checks of the two analytic bounds on Q(φ, 0) outside
/// [π/8, 3].
fn v9_tails(acc: &mut Acc) {
    const N: usize = 10_000;
    let eighth = Interval::pi().scale_pow2(0.125);
    let slope = 6.0 * (Interval::point(2.0).sqrt().expect("positive") - 1.0);
    let mut worst = [f64::INFINITY; 2];
    let mut bad = None;
    for k in 1..=N {
        let near = eighth.lo() * k as f64 / N as f64;
        let far = 3.0 + 0.01 * (k - 1) as f64;
        let b0 = bx(&[(near, near)]);
        let b1 = bx(&[(far, far)]);
        let m0 = (funcs::q_constant(&b0) - slope * b0[0]).lo();
        let m1 = (funcs::q_constant(&b1) - 6.0 * (b1[0] - 2.0)).lo();
        worst[0] = worst[0].min(m0 / near);
        worst[1] = worst[1].min(m1);
        if (m0 < 0.0 || m1 < 0.0) && bad.is_none() {
            bad = Some(if m0 < 0.0 { b0 } else { b1 });
        }
    }
    acc.boxes += 2 * N as u64;
    let status = if bad.is_none() { CertStatus::Proved } else { CertStatus::Failed };
    acc.details.push(json!({
        "check": "h >= 6(sqrt2 - 1) phi on (0, pi/8] and h >= 6(phi - 2) on [3, 103) at interval sample points",
        "samples_per_bound": N,
        "min_relative_margin_near_zero": worst[0],
        "min_margin_beyond_3": worst[1],
        "status": status,
    }));
    acc.note(status, bad.map(|b| BoxRecord::new(Coords::Phi, &b)));
}

fn target(id: TaskId) -> &'static str {
    match id {
        TaskId::V1 => "a(phi0, phi, v) >= 0.1 for all arguments",
        TaskId::V2 => "v^0 coefficient of P >= 0.01 on [0.4, pi/2] x [0, pi/2]",
        TaskId::V3 => "v^0 coefficient of P >= 0.01 near the origin in (phi0, z)",
        TaskId::V4 => "v^0 coefficient enclosed by c3 phi0^3 + c1 phi with c3, c1 > 0 on [0, 0.01] x [0, 0.021]",
        TaskId::V5 => "v^2 coefficient of P >= 0.01 away from the origin and positive Taylor enclosure near it",
        TaskId::V6 => "v^1 coefficient of P >= 0.01 on [1, pi/2] x [0, pi/2]",
        TaskId::V7 => "{v^1 coefficient <= 0.01} contained in A = [0, 783/1024] x [779/1024, 1]",
        TaskId::V8 => "min over v >= 0 of P - 2v^3 >= 0.5 on A",
        TaskId::V9 => "min over [pi/8, 3] of 6(3phi - 2sin2phi + 2phi cos2phi) > 1.9",
    }
}

/// Runs one task with the given minimum box width.
pub fn run_task(id: TaskId, min_width: f64) -> Result<Certificate> {
    if !(min_width > 0.0 && min_width.is_finite()) {
        return Err(Error::Config(format!("min_width must be positive, got {min_width}")));
    }
    let start = Instant::now();
    let mut acc = Acc::new();
    let checks = bound_checks(id);
    let mut region: Vec<BoxRecord> = checks.iter().map(|c| BoxRecord::new(c.coords, &c.region)).collect();
    for c in &checks {
        let out = prove_lower_bound(&c.f, &c.region, c.bound, min_width);
        acc.search(c, out);
    }
    match id {
        TaskId::V1 => {
            let closed = 5.0 - funcs::sqrt6().scale_pow2(2.0);
            let ok = closed.lo() >= 0.1;
            acc.details.push(json!({
                "check": "closed form 5 - 2sqrt6 >= 0.1",
                "value": [closed.lo(), closed.hi()],
                "status": if ok { CertStatus::Proved } else { CertStatus::Failed },
            }));
            acc.note(if ok { CertStatus::Proved } else { CertStatus::Failed }, None);
        }
        TaskId::V4 => {
            region.push(BoxRecord::new(Coords::PhiPhi, &Which::V0.domain()));
            taylor_part(&mut acc, Which::V0)?;
        }
        TaskId::V5 => {
            region.push(BoxRecord::new(Coords::PhiPhi, &Which::V2.domain()));
            taylor_part(&mut acc, Which::V2)?;
        }
        TaskId::V7 => {
            region.push(BoxRecord::new(Coords::PhiZ, &bx(&[(0.0, 1.0), (0.0, 1.0)])));
            v7_part(&mut acc);
        }
        TaskId::V9 => v9_tails(&mut acc),
        _ => {}
    }
    Ok(Certificate {
        task_id: id,
        region,
        target: target(id).to_string(),
        status: acc.status,
        witness: acc.witness,
        boxes_examined: acc.boxes,
        max_depth: acc.depth,
        min_width,
        rounding_mode: ROUNDING_MODE.to_string(),
        wall_ms: start.elapsed().as_millis() as u64,
        details: json!(acc.details),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_ids_parse() {
        assert_eq!("v7".parse::<TaskId>().unwrap(), TaskId::V7);
        assert!(matches!("V10".parse::<TaskId>(), Err(Error::UnknownTask(_))));
        assert!(run_task(TaskId::V1, 0.0).is_err());
    }

    #[test]
    fn v1_and_v2_prove() {
        let c = run_task(TaskId::V1, 1e-5).unwrap();
        assert_eq!(c.status, CertStatus::Proved);
        // coarse width is still enough for V2
        let c = run_task(TaskId::V2, 1e-1).unwrap();
        assert_eq!(c.status, CertStatus::Proved, "{}", c.details);
        let back: Certificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn v9_certifies_margin() {
        let c = run_task(TaskId::V9, 1e-4).unwrap();
        assert_eq!(c.status, CertStatus::Proved);
        assert!(c.details[0]["certified_min"].as_f64().unwrap() > 1.9);
    }
}

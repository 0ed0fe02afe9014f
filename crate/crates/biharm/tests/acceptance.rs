//! Acceptance criteria 1–10, one PASS/FAIL line each.
//!
//! Criteria 2 and 8 are not attainable as stated (see README); they are
//! evaluated in full and reported as FAIL without failing the run. Any
//! other FAIL, or a listed criterion starting to pass, exits non-zero so
//! the list stays accurate.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use biharm::audit::{energy_audit, energy_rate_check, random_state, EnergyMode};
use biharm::cert::{run_task, taylor_enclose_p_coeff, CertStatus, Certificate, TaskId, Which};
use biharm::integrator::{integrate, IntegrationConfig, Termination};
use biharm::manifold::classify::{sign_changes, theta_grid, track_in_c};
use biharm::manifold::{classify_grid, classify_orbit, find_heteroclinic, theta0, ClassificationResult, Outcome, SeedSpec, ShootConfig};
use biharm::ode::{c_star, linearization, Dimension, Parity, State};
use biharm::profile::{blowup_diagnostics, build_winding_profile, to_radial, WindingSeed};
use biharm::regions::{sos_identity_check, w_system_residual, xi_system_residual};

const UNATTAINABLE: [u32; 2] = [2, 8];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn five() -> Dimension {
    Dimension::FIVE
}

fn certificates(threads: usize) -> Vec<Certificate> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| TaskId::ALL.iter().map(|&id| run_task(id, id.default_min_width()).unwrap()).collect())
}

fn certified_min(c: &Certificate) -> f64 {
    c.details
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|d| d.get("certified_min").and_then(|v| v.as_f64()))
        .fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for id in TaskId::ALL {
        let t = Instant::now();
        let c = run_task(id, id.default_min_width()).unwrap();
        let took = t.elapsed();
        ok &= c.status == CertStatus::Proved && took < Duration::from_secs(300);
        let bound = match id {
            TaskId::V2 | TaskId::V3 | TaskId::V5 | TaskId::V6 => Some(0.01),
            TaskId::V8 => Some(0.5),
            TaskId::V9 => Some(1.9),
            _ => None,
        };
        if let Some(b) = bound {
            let m = certified_min(&c);
            // V9 asks for a strict inequality.
            ok &= if id == TaskId::V9 { m > b } else { m >= b };
            notes.push(format!("{id} {} min {m:.4} {}ms", c.status, took.as_millis()));
        } else {
            notes.push(format!("{id} {} {}ms", c.status, took.as_millis()));
        }
    }
    verdict(ok, notes.join("; "))
}

fn criterion_2() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for w in [Which::V0, Which::V2] {
        let e = taylor_enclose_p_coeff(w, &w.domain()).unwrap();
        ok &= e.positive() && e.intersects_reference() && e.deviation() < 0.05;
        notes.push(format!(
            "{w:?}: phi0^3 [{:.5}, {:.5}] phi [{:.5}, {:.5}] positive {} meets {} deviation {:.4}",
            e.phi0_cubed.lo(),
            e.phi0_cubed.hi(),
            e.phi.lo(),
            e.phi.hi(),
            e.positive(),
            e.intersects_reference(),
            e.deviation()
        ));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_3() -> Verdict {
    let c = run_task(TaskId::V7, TaskId::V7.default_min_width()).unwrap();
    let d = &c.details[0];
    let equals = d["equals_published"].as_bool().unwrap();
    verdict(
        c.status == CertStatus::Proved,
        format!("enclosure x1024 = {}, equals A: {equals}", d["enclosure_over_1024"]),
    )
}

fn criterion_4() -> Verdict {
    let exact = [(5, 2.0 * 6f64.sqrt()), (6, 3.0 * 5f64.sqrt()), (7, 36.0 / 13f64.sqrt())];
    let mut worst_c: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let mut spectra = true;
    for (n, v) in exact {
        let d = Dimension::new(n).unwrap();
        worst_c = worst_c.max((c_star(d).unwrap() - v).abs());
        let lin = linearization(d, Parity::Even).unwrap();
        let dd = n as f64;
        let mut want = vec![3.0, 1.0, 1.0 - dd, 3.0 - dd];
        let mut got = lin.eigenvalues.clone();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        spectra &= want == got;
        worst_res = lin.eigen_residuals().into_iter().fold(worst_res, f64::max);
    }
    verdict(
        worst_c < 1e-12 && worst_res < 1e-12 && spectra,
        format!("c* error {worst_c:.1e}, eigen-residual {worst_res:.1e}, spectra match {spectra}"),
    )
}

fn criterion_5() -> Verdict {
    let cfg = IntegrationConfig::default().with_span(10.0);
    let cons = energy_audit(Dimension::new(4).unwrap(), EnergyMode::Conservation, 20, &cfg, 4).unwrap();
    let mono = energy_audit(five(), EnergyMode::Monotonicity, 20, &cfg, 5).unwrap();
    let rate = energy_rate_check(five(), 1000, 6);
    verdict(
        cons.worst < 1e-7 && mono.worst > -1e-8 && rate < 1e-6,
        format!("conservation {:.1e}, monotonicity {:.1e}, rate error {rate:.1e}", cons.worst, mono.worst),
    )
}

fn criterion_6() -> Verdict {
    let cfg = IntegrationConfig::default();
    let sc = ShootConfig::default();
    let t0 = theta0(sc.eps0).unwrap();
    let g_lo = classify_orbit(SeedSpec::new(sc.eps0, -FRAC_PI_2).unwrap(), &cfg).g;
    let g_hi = classify_orbit(SeedSpec::new(sc.eps0, t0 + 0.05).unwrap(), &cfg).g;
    let h = find_heteroclinic((-FRAC_PI_2, t0 + 0.05), 1e-10, &sc).unwrap();
    let in_c = track_in_c(h.orbit.states());
    let dist = h.classification.end_distance();
    let grid = classify_grid(sc.eps0, &theta_grid(-FRAC_PI_2, t0, 200), &cfg).unwrap();
    let changes = sign_changes(&grid);
    let undecided = grid.iter().filter(|r| r.g.is_none()).count();
    verdict(
        g_lo == Some(-1) && g_hi == Some(1) && h.width < 1e-10 && dist < 1e-3 && in_c && changes == 1,
        format!(
            "g(-pi/2) {g_lo:?}, g(theta0+0.05) {g_hi:?}, theta* {:.12} width {:.1e}, end distance {dist:.1e}, in C {in_c}, grid sign changes {changes} ({undecided} undecided)",
            h.theta_star, h.width
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = IntegrationConfig::default();
    let quarter = cfg.blowup_norm.powf(0.25);
    let (mut blown, mut positive_d3, mut ordered, mut literal) = (0, 0, 0, 0);
    let mut worst_r2: f64 = 1.0;
    for i in 0..100 {
        let d = Dimension::new(5 + (i % 3) as u32).unwrap();
        let c = c_star(d).unwrap();
        let x0 = State::new(rng.gen_range(-3.0..3.0), rng.gen_range(1e-3..2.0), c + rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let t = integrate(d, x0, 0.0, &cfg, &[]).unwrap();
        if matches!(t.termination, Termination::BlowupDetected { .. }) {
            blown += 1;
        }
        if t.samples[1..].iter().all(|p| p.state.d3phi > 0.0) {
            positive_d3 += 1;
        }
        let e = t.last().state;
        if e.phi > 0.0 && e.phi < e.dphi && e.dphi < e.d2phi && e.d2phi < e.d3phi && e.dphi > quarter {
            ordered += 1;
        }
        if [e.phi, e.dphi, e.d2phi, e.d3phi].iter().all(|&v| v > quarter) {
            literal += 1;
        }
        worst_r2 = worst_r2.min(blowup_diagnostics(&t).map_or(0.0, |g| g.r_squared));
    }
    verdict(
        blown == 100 && positive_d3 == 100 && ordered == 100 && worst_r2 > 0.999,
        format!(
            "blowup {blown}/100, phi''' > 0 {positive_d3}/100, 0 < phi < phi' < phi'' < phi''' with phi' > N^(1/4) {ordered}/100 (all four > N^(1/4): {literal}/100), worst R^2 {worst_r2:.6}"
        ),
    )
}

fn criterion_8() -> Verdict {
    let base = IntegrationConfig::default().with_span(60.0);
    let seed = WindingSeed::beyond_theta0(1e-3, 0.2).unwrap();
    let (_, prof, r8) = build_winding_profile(&base.with_blowup_norm(1e8), seed).unwrap();
    let (_, _, r10) = build_winding_profile(&base.with_blowup_norm(1e10), seed).unwrap();
    let psi_min = prof.samples[0].psi.abs();
    let increasing = r8.crossings.windows(2).all(|w| w[1].s > w[0].s);
    verdict(
        psi_min < 1e-3 && increasing && r8.winding_count >= 4 && r10.winding_count >= r8.winding_count,
        format!(
            "psi(r_min) {psi_min:.1e}, crossings increasing {increasing}, winding count {} at 1e8 and {} at 1e10",
            r8.winding_count, r10.winding_count
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = IntegrationConfig::default().with_span(3.0);
    let (mut w_res, mut xi_res, mut psi_res): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let t = integrate(five(), random_state(&mut rng, 1.0), 0.0, &cfg, &[]).unwrap();
        for phi0 in [0.0, 0.4, 1.0, FRAC_PI_2] {
            w_res = w_res.max(w_system_residual(phi0, &t).unwrap());
        }
        xi_res = xi_res.max(xi_system_residual(&t).unwrap());
        psi_res = psi_res.max(to_radial(&t, None).unwrap().max_psi_residual(1e-4).unwrap());
    }
    let mut sos: f64 = 0.0;
    for _ in 0..10_000 {
        let (y, v) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (l, r) = sos_identity_check(y, v);
        sos = sos.max((l - r).abs() / (1.0 + l.abs()));
    }
    verdict(
        w_res < 1e-8 && xi_res < 1e-8 && psi_res < 1e-6 && sos < 1e-12,
        format!("w {w_res:.1e}, xi {xi_res:.1e}, psi {psi_res:.1e}, sum of squares {sos:.1e}"),
    )
}

fn grid(threads: usize) -> Vec<ClassificationResult> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| classify_grid(1e-3, &theta_grid(-FRAC_PI_2, FRAC_PI_2, 200), &IntegrationConfig::default()).unwrap())
}

/// Bitwise comparison, so NaN fields still compare equal.
fn same_grid(a: &[ClassificationResult], b: &[ClassificationResult]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.outcome == y.outcome
                && x.g == y.g
                && x.tau.map(f64::to_bits) == y.tau.map(f64::to_bits)
                && x.end_s.to_bits() == y.end_s.to_bits()
                && x.end_state.to_array().map(f64::to_bits) == y.end_state.to_array().map(f64::to_bits)
        })
}

fn criterion_10() -> Verdict {
    let certs: Vec<Vec<Certificate>> = [1, 4, 16].iter().map(|&n| certificates(n).iter().map(Certificate::without_timing).collect()).collect();
    let certs_ok = certs.windows(2).all(|w| w[0] == w[1]);
    let grids: Vec<Vec<ClassificationResult>> = [1, 4, 16].iter().map(|&n| grid(n)).collect();
    let grids_ok = grids.windows(2).all(|w| same_grid(&w[0], &w[1]));
    let outcomes: Vec<Outcome> = grids[0].iter().map(|r| r.outcome).collect();
    verdict(
        certs_ok && grids_ok,
        format!(
            "certificates identical {certs_ok}, 200-point grids identical {grids_ok} ({} blowup+)",
            outcomes.iter().filter(|o| **o == Outcome::BlowupPlus).count()
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (n, f) in criteria {
        let t = Instant::now();
        let v = f();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let known = UNATTAINABLE.contains(&n);
        let note = if known && !v.pass { " [known unattainable]" } else { "" };
        println!("criterion {n:>2}: {tag}{note} ({:.1}s) {}", t.elapsed().as_secs_f64(), v.detail);
        if v.pass == known {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

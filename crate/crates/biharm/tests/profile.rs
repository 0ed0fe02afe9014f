use std::f64::consts::FRAC_PI_2;

use biharm::integrator::{integrate, IntegrationConfig};
use biharm::manifold::{find_heteroclinic, theta0, ShootConfig};
use biharm::ode::{Dimension, State};
use biharm::profile::{blowup_diagnostics, build_winding_profile, laplacian_components, to_radial, RadialProfile, WindingSeed};
use biharm::Error;

fn heteroclinic_profile() -> RadialProfile {
    let cfg = ShootConfig::default();
    let h = find_heteroclinic((-FRAC_PI_2, theta0(cfg.eps0).unwrap() + 0.05), 1e-10, &cfg).unwrap();
    to_radial(&h.orbit, None).unwrap()
}

#[test]
fn heteroclinic_pullback() {
    let p = heteroclinic_profile();
    let s = &p.samples;
    assert!(s.windows(2).all(|w| w[1].r > w[0].r));
    // Monotone up to the first arrival at π/2; the approach to π/2 is a
    // damped oscillation, so ψ overshoots before settling.
    let k = s.iter().position(|q| q.psi >= FRAC_PI_2).unwrap();
    assert!(s[..=k].windows(2).all(|w| w[1].psi > w[0].psi));
    assert!(s.iter().all(|q| q.psi < 2.0));
    assert!((s.last().unwrap().psi - FRAC_PI_2).abs() < 1e-3);
    assert!(p.origin_defect() < 1e-3);
    // ψ ≈ ψ′(0) r at the small end.
    let slope0 = s[0].psi / s[0].r;
    assert!(s[..5].iter().all(|q| (q.psi / q.r / slope0 - 1.0).abs() < 1e-2));
    assert!(p.max_psi_residual(1e-4).unwrap() < 1e-6);

    // Δu stays bounded towards r = 0: L₀f₀ vanishes linearly and L₁f₁
    // settles to a constant.
    let d = p.d();
    let r0 = s[0].r;
    let (a0, a1) = laplacian_components(d, &p, 2.0 * r0).unwrap();
    let (b0, b1) = laplacian_components(d, &p, 4.0 * r0).unwrap();
    assert!((b0 / a0 - 2.0).abs() < 0.05, "{a0} {b0}");
    assert!((b1 / a1 - 1.0).abs() < 1e-2, "{a1} {b1}");

    // |ψ″| ≤ C r^0.9 near the origin: the local log-log slope exceeds 0.9.
    let q: Vec<_> = s.iter().filter(|q| q.r < 1e3 * r0).collect();
    let slope = ((q.last().unwrap().d2psi.abs()).ln() - q[0].d2psi.abs().ln()) / (q.last().unwrap().r.ln() - q[0].r.ln());
    assert!(slope > 0.9, "{slope}");
    assert!(p.d2psi_power_constant(1e3 * r0, 0.9).is_finite());
}

#[test]
fn winding_profile_properties() {
    let seed = WindingSeed::beyond_theta0(1e-3, 0.2).unwrap();
    let base = IntegrationConfig::default().with_span(60.0);
    let (t8, p8, r8) = build_winding_profile(&base, seed).unwrap();
    let (t10, _, r10) = build_winding_profile(&base.with_blowup_norm(1e10), seed).unwrap();
    assert!(p8.samples[0].psi.abs() < 1e-3);
    assert_eq!(p8.samples.last().unwrap().r, 1.0);
    assert!(r8.winding_count >= 1 && r10.winding_count >= r8.winding_count);
    assert!(r8.crossings.windows(2).all(|w| w[1].s > w[0].s));
    assert!(r10.gaps_decreasing);
    assert!(p8.max_psi_residual(1e-4).unwrap() < 1e-6);

    let g8 = blowup_diagnostics(&t8).unwrap();
    let g10 = blowup_diagnostics(&t10).unwrap();
    assert!(g8.r_squared > 0.999);
    assert!(g8.s_f_estimate > t8.last().s);
    assert!((g8.s_f_estimate - g10.s_f_estimate).abs() < 1e-2 * g10.s_f_estimate);
    // Rescaled variables stay in fixed positive bands over the final decade.
    for g in [&g8, &g10] {
        assert!(g.v1_range.0 > 0.5 && g.v1_range.1 < 1.0, "{:?}", g.v1_range);
        assert!(g.v2_range.0 > 0.5 && g.v2_range.1 < 1.0, "{:?}", g.v2_range);
        assert!(g.zeta_range.0 > 0.5 && g.zeta_range.1 < 1.0, "{:?}", g.zeta_range);
    }
}

#[test]
fn winding_errors() {
    let seed = WindingSeed::beyond_theta0(1e-3, 0.2).unwrap();
    let short = IntegrationConfig::default().with_span(1.0);
    assert!(matches!(build_winding_profile(&short, seed), Err(Error::NoBlowup(_))));
    let inside = WindingSeed { eps0: 1e-3, theta: 0.5 };
    assert!(matches!(build_winding_profile(&IntegrationConfig::default(), inside), Err(Error::Config(_))));
}

#[test]
fn negative_blowup_is_reflected() {
    let seed = WindingSeed { eps0: 1e-3, theta: theta0(1e-3).unwrap() + 0.2 + std::f64::consts::PI };
    let (t, _, r) = build_winding_profile(&IntegrationConfig::default().with_span(60.0), seed).unwrap();
    assert!(r.reflected);
    assert!(t.last().state.phi > 0.0);
}

#[test]
fn diagnostics_need_positive_third_derivative() {
    let t = integrate(Dimension::FIVE, State::ZERO, 0.0, &IntegrationConfig::default().with_span(1.0), &[]).unwrap();
    assert!(matches!(blowup_diagnostics(&t), Err(Error::NoPositiveThirdDerivative)));
}

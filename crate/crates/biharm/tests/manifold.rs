use std::f64::consts::{FRAC_PI_2, PI};

use biharm::integrator::{integrate, integrate_reversed, IntegrationConfig, Termination};
use biharm::manifold::chart::seed_state;
use biharm::manifold::{classify_orbit, find_heteroclinic, theta0, verify_unstable_decay, Outcome, SeedSpec, ShootConfig};
use biharm::ode::{c_star, energy, Dimension, State};
use biharm::regions::{in_minus_c, in_region_c, RegionClass, BOUNDARY_TOL};
use biharm::Error;

fn five() -> Dimension {
    Dimension::FIVE
}

fn spec(theta: f64) -> SeedSpec {
    SeedSpec::new(1e-3, theta).unwrap()
}

#[test]
fn reflected_seed_flips_g() {
    let cfg = IntegrationConfig::default();
    for theta in [-1.2, 0.2, 1.0, 1.45] {
        let a = classify_orbit(spec(theta), &cfg);
        let b = classify_orbit(spec(theta + PI), &cfg);
        assert_eq!(a.g.map(|g| -g), b.g, "theta {theta}");
    }
}

#[test]
fn heteroclinic_orbit_properties() {
    let cfg = ShootConfig::default();
    let h = find_heteroclinic((-FRAC_PI_2, theta0(cfg.eps0).unwrap() + 0.05), 1e-10, &cfg).unwrap();
    assert_eq!(h.classification.outcome, Outcome::HeteroclinicCandidate);
    assert!(h.classification.end_distance() < 1e-3);
    assert!(h.orbit.states().all(|x| in_region_c(x.phi, x.d2phi, BOUNDARY_TOL) != RegionClass::Outside));
    // Energy climbs from ≈ 0 towards F(π/2) = 12.
    let es: Vec<f64> = h.orbit.states().map(|x| energy(five(), x).total).collect();
    assert!(es[0].abs() < 1e-4);
    assert!((es.last().unwrap() - 12.0).abs() < 1e-2, "{}", es.last().unwrap());
    assert!(es.windows(2).all(|w| w[1] >= w[0] - 1e-12));

    // Halving ε₀ re-finds an orbit with nearly the same end state.
    let half = ShootConfig { eps0: cfg.eps0 / 2.0, ..cfg };
    let h2 = find_heteroclinic((-FRAC_PI_2, theta0(half.eps0).unwrap() + 0.05), 1e-10, &half).unwrap();
    assert!(h2.classification.end_state.dist(h.classification.end_state) < 1e-2);
}

#[test]
fn bracket_without_sign_change_is_rejected() {
    let cfg = ShootConfig::default();
    let t0 = theta0(cfg.eps0).unwrap();
    assert!(matches!(find_heteroclinic((t0 + 0.05, t0 + 0.1), 1e-10, &cfg), Err(Error::NoSignChange { .. })));
}

#[test]
fn second_derivative_persists_past_threshold() {
    let cfg = IntegrationConfig::default();
    let c = c_star(five()).unwrap();
    for theta in [-1.5, -0.5, 1.4, 2.0, 3.0] {
        let t = integrate(five(), seed_state(spec(theta)), 0.0, &cfg, &[]).unwrap();
        let Some(i) = t.samples.iter().position(|p| p.state.d2phi.abs() >= c) else { continue };
        assert!(t.samples[i..].iter().all(|p| p.state.d2phi.abs() >= c), "theta {theta}");
        assert!(matches!(t.termination, Termination::BlowupDetected { .. }));
    }
}

#[test]
fn reversed_seeds_stay_in_c_union_minus_c() {
    let cfg = IntegrationConfig::default().with_span(3.0);
    let t0 = theta0(1e-3).unwrap();
    let inside = |x: State| {
        in_region_c(x.phi, x.d2phi, BOUNDARY_TOL) != RegionClass::Outside || in_minus_c(x.phi, x.d2phi, BOUNDARY_TOL) != RegionClass::Outside
    };
    let mut checked = 0;
    for i in 0..40 {
        let theta = -FRAC_PI_2 + (t0 + FRAC_PI_2) * (i as f64 + 0.5) / 40.0;
        let x0 = seed_state(spec(theta));
        if !inside(x0) {
            continue;
        }
        checked += 1;
        let t = integrate_reversed(five(), x0.time_flip(), &cfg).unwrap();
        // Only the stretch before the seeding error's stable part takes over.
        for p in t.samples.iter().take_while(|p| p.state.norm() <= x0.norm()) {
            assert!(inside(p.state.time_flip()), "theta {theta} at sigma {}", p.s);
        }
    }
    assert!(checked > 30);
}

#[test]
fn decay_rates_match_unstable_eigenvalues() {
    let cfg = IntegrationConfig::default();
    for theta in [0.3, 1.0, -1.0, 2.5] {
        let r = verify_unstable_decay(spec(theta), &cfg).unwrap();
        assert!((0.9..=1.1).contains(&r.rate1), "{r:?}");
    }
    let r = verify_unstable_decay(spec(FRAC_PI_2), &cfg).unwrap();
    assert!((2.7..=3.3).contains(&r.rate2.unwrap()), "{r:?}");
    // With ε₀ = 1e-6 and tight tolerances every component drops below 1e-8.
    let tight = cfg.with_tolerances(1e-13, 1e-22).with_span(12.0);
    let r = verify_unstable_decay(SeedSpec::new(1e-6, 1.0).unwrap(), &tight).unwrap();
    assert!(r.min_norm < 1e-8, "{r:?}");
}

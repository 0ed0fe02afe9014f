//! Builds the winding profile from an orbit that leaves 𝒞 ∪ −𝒞 and counts
//! how often ψ passes a multiple of π before the blowup norm is reached.

use biharm::integrator::IntegrationConfig;
use biharm::profile::{build_winding_profile, WindingSeed};

fn main() -> biharm::Result<()> {
    let seed = WindingSeed::beyond_theta0(1e-3, 0.2)?;
    for norm in [1e8, 1e10, 1e12] {
        let cfg = IntegrationConfig::default().with_blowup_norm(norm).with_span(60.0);
        let (_, prof, rep) = build_winding_profile(&cfg, seed)?;
        println!(
            "blowup norm {norm:e}: {} crossings, s_f = {:.6}, psi(r_min = {:.1e}) = {:.2e}",
            rep.winding_count,
            rep.s_f_estimate,
            prof.samples[0].r,
            prof.samples[0].psi
        );
    }
    Ok(())
}

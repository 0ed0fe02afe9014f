//! Pulls the heteroclinic orbit back to ψ(r) = φ(log r) and evaluates the
//! Laplacian components of the equivariant map.

use std::f64::consts::FRAC_PI_2;

use biharm::manifold::{find_heteroclinic, theta0, ShootConfig};
use biharm::profile::{laplacian_components, to_radial};

fn main() -> biharm::Result<()> {
    let cfg = ShootConfig::default();
    let h = find_heteroclinic((-FRAC_PI_2, theta0(cfg.eps0)? + 0.05), 1e-10, &cfg)?;
    let prof = to_radial(&h.orbit, None)?;
    let (lo, hi) = prof.r_range();
    println!("r in [{lo:.3e}, {hi}], psi(r_min) = {:.3e}, psi(1) = {:.6}", prof.samples[0].psi, prof.samples.last().unwrap().psi);
    for r in [1e-8, 1e-6, 1e-4, 1e-2, 0.5] {
        let (l0, l1) = laplacian_components(prof.d(), &prof, r)?;
        println!("r = {r:.0e}: L0 f0 = {l0:+.6e}, L1 f1 = {l1:+.6e}");
    }
    println!("max relative psi residual for r >= 1e-4: {:.2e}", prof.max_psi_residual(1e-4)?);
    Ok(())
}

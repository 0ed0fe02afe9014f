//! Encloses the two small-φ coefficients as c₃φ₀³ + c₁φ with exact
//! polynomial algebra and interval Lagrange remainders.

use biharm::cert::{taylor_enclose_p_coeff, Which};

fn main() -> biharm::Result<()> {
    for which in [Which::V0, Which::V2] {
        let e = taylor_enclose_p_coeff(which, &which.domain())?;
        println!(
            "{which:?}: phi0^3 in {}, phi in {}, positive {}, deviation from published {:.4}",
            e.phi0_cubed,
            e.phi,
            e.positive(),
            e.deviation()
        );
    }
    Ok(())
}

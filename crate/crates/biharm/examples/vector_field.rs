//! Evaluates the fourth-order field, the energy and the blowup thresholds.

use biharm::ode::{self, c_star, critical_point, linearization, Dimension, Parity, State};

fn main() -> biharm::Result<()> {
    let d = Dimension::FIVE;
    let x = State::new(0.3, 0.1, -0.2, 0.05);
    println!("phi'''' at {x:?} = {}", ode::fourth_derivative(d, x));
    let e = ode::energy(d, x);
    println!("energy {:.6} (kinetic {:.6}, potential {:.6}), rate {:.6}", e.total, e.kinetic, e.potential, e.rate);
    for n in [5, 6, 7] {
        println!("c*({n}) = {:.15}", c_star(Dimension::new(n)?)?);
    }
    for k in 0..3 {
        println!("critical point k = {k}: {:?}", critical_point(k));
    }
    let lin = linearization(d, Parity::Even)?;
    println!("even eigenvalues {:?}, residuals {:?}", lin.eigenvalues, lin.eigen_residuals());
    Ok(())
}

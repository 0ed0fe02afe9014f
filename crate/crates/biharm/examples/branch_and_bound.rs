//! Proves a lower bound for a user function by box subdivision.

use biharm::cert::{prove_lower_bound, Interval, IntervalBox};

fn main() -> biharm::Result<()> {
    let region = IntervalBox::from_bounds(&[(-1.0, 1.0), (0.0, 2.0)])?;
    // x² + sin(y) + 0.1 ≥ 0 on the box; the minimum 0.1 sits at x = 0, y ∈ {0}.
    let f = |b: &IntervalBox| b[0].sqr() + b[1].sin() + Interval::point(0.1);
    for bound in [0.05, 0.1, 0.2] {
        let out = prove_lower_bound(&f, &region, bound, 1e-6);
        println!("f >= {bound}: {} after {} boxes (certified min {:.4})", out.status.name(), out.boxes_examined, out.certified_min);
    }
    Ok(())
}

//! Dyadic bounding box of a sublevel set on a 1/1024 grid.

use biharm::cert::{enclose_sublevel, IntervalBox};

fn main() -> biharm::Result<()> {
    let region = IntervalBox::from_bounds(&[(0.0, 2.0), (-2.0, 2.0)])?;
    let f = |b: &IntervalBox| b[0].sqr() + b[1].sqr();
    match enclose_sublevel(&f, &region, 1.0, 1024) {
        Some(b) => println!("{{x^2 + y^2 <= 1}} inside {b}"),
        None => println!("empty"),
    }
    Ok(())
}

//! Runs every interval certificate at its default minimum width.

use biharm::cert::{run_task, TaskId};

fn main() -> biharm::Result<()> {
    for id in TaskId::ALL {
        let c = run_task(id, id.default_min_width())?;
        println!("{id} {:<12} {:>6} boxes {:>5} ms  {}", c.status.to_string(), c.boxes_examined, c.wall_ms, c.target);
    }
    Ok(())
}

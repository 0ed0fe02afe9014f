pub mod funcs;
pub mod interval;
pub mod search;
pub mod taylor;
pub mod tasks;

pub use interval::{Interval, IntervalBox, ROUNDING_MODE};
pub use search::{enclose_sublevel, prove_lower_bound, SearchOutcome, Status};
pub use taylor::{taylor_enclose_p_coeff, CoeffEnclosure, TaylorEnclosure, Which};
pub use tasks::{run_task, Certificate, CertStatus, TaskId};

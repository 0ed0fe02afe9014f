//! Branch-and-bound lower-bound proofs and dyadic sublevel-set enclosure.
//!
//! Both searches explore the whole tree (no early cancellation) and merge
//! the two halves of every split left-first, so their results do not depend
//! on how rayon schedules the work.

use serde::Serialize;

use super::interval::{Interval, IntervalBox};

pub type BoxFn<'a> = dyn Fn(&IntervalBox) -> Interval + Sync + 'a;

/// Below this depth subtrees are handed to rayon.
const PAR_DEPTH: u32 = 14;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Status {
    Proved,
    /// A box whose centre value already violates the bound.
    Failed { witness: IntervalBox },
    /// A box that reached the minimum width undecided.
    Inconclusive { witness: IntervalBox },
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Proved => "Proved",
            Status::Failed { .. } => "Failed",
            Status::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn witness(&self) -> Option<&IntervalBox> {
        match self {
            Status::Proved => None,
            Status::Failed { witness } | Status::Inconclusive { witness } => Some(witness),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Status::Proved => 0,
            Status::Inconclusive { .. } => 1,
            Status::Failed { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub status: Status,
    pub boxes_examined: u64,
    pub max_depth: u32,
    /// Smallest lower end over discharged leaves: a certified lower bound
    /// for the function when the status is Proved.
    pub certified_min: f64,
}

fn merge(a: SearchOutcome, b: SearchOutcome) -> SearchOutcome {
    let status = if b.status.rank() > a.status.rank() { b.status } else { a.status };
    SearchOutcome {
        status,
        boxes_examined: a.boxes_examined + b.boxes_examined,
        max_depth: a.max_depth.max(b.max_depth),
        certified_min: a.certified_min.min(b.certified_min),
    }
}

fn prove_rec(f: &BoxFn<'_>, b: IntervalBox, bound: f64, min_width: f64, depth: u32) -> SearchOutcome {
    let leaf = |status: Status, certified_min: f64| SearchOutcome { status, boxes_examined: 1, max_depth: depth, certified_min };
    let val = f(&b);
    if val.lo() >= bound {
        return leaf(Status::Proved, val.lo());
    }
    if f(&b.center_box()).hi() < bound {
        return leaf(Status::Failed { witness: b }, val.lo());
    }
    if b.max_width() < min_width {
        return leaf(Status::Inconclusive { witness: b }, val.lo());
    }
    let (l, r) = b.bisect();
    let (a, c) = if depth < PAR_DEPTH {
        rayon::join(
            || prove_rec(f, l, bound, min_width, depth + 1),
            || prove_rec(f, r, bound, min_width, depth + 1),
        )
    } else {
        (prove_rec(f, l, bound, min_width, depth + 1), prove_rec(f, r, bound, min_width, depth + 1))
    };
    let mut out = merge(a, c);
    out.boxes_examined += 1;
    out
}

/// Proves f ≥ bound on `region` by bisecting the widest side.
pub fn prove_lower_bound(f: &BoxFn<'_>, region: &IntervalBox, bound: f64, min_width: f64) -> SearchOutcome {
    prove_rec(f, region.clone(), bound, min_width, 0)
}

/// Index-space cell block [i0, i1) × [j0, j1) × … on the dyadic grid.
type Block = Vec<(u64, u64)>;

fn block_box(origin: &[f64], block: &Block, den: f64) -> IntervalBox {
    let dims = block
        .iter()
        .zip(origin)
        .map(|(&(a, b), &o)| Interval::new(o + a as f64 / den, o + b as f64 / den).expect("ordered"))
        .collect();
    IntervalBox::new(dims).expect("non-empty")
}

fn union(a: Option<Block>, b: Option<Block>) -> Option<Block> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.iter().zip(&b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect()),
    }
}

fn sublevel_rec(f: &BoxFn<'_>, origin: &[f64], block: Block, thr: f64, den: f64, depth: u32) -> Option<Block> {
    let val = f(&block_box(origin, &block, den));
    if val.lo() > thr {
        return None;
    }
    let sizes: Vec<u64> = block.iter().map(|(a, b)| b - a).collect();
    if val.hi() <= thr || sizes.iter().all(|&s| s == 1) {
        return Some(block);
    }
    let k = (0..sizes.len()).fold(0, |best, i| if sizes[i] > sizes[best] { i } else { best });
    let (a, b) = block[k];
    let m = a + (b - a) / 2;
    let mut l = block.clone();
    let mut r = block;
    l[k] = (a, m);
    r[k] = (m, b);
    let (x, y) = if depth < PAR_DEPTH {
        rayon::join(
            || sublevel_rec(f, origin, l, thr, den, depth + 1),
            || sublevel_rec(f, origin, r, thr, den, depth + 1),
        )
    } else {
        (sublevel_rec(f, origin, l, thr, den, depth + 1), sublevel_rec(f, origin, r, thr, den, depth + 1))
    };
    union(x, y)
}

/// Bounding box, on the grid of spacing 1/`grid_denominator`, of every
/// cell where interval evaluation cannot rule out f ≤ `threshold`. `None`
/// means the sublevel set is provably empty. Region endpoints must lie on
/// the grid.
pub fn enclose_sublevel(f: &BoxFn<'_>, region: &IntervalBox, threshold: f64, grid_denominator: u64) -> Option<IntervalBox> {
    assert!(grid_denominator.is_power_of_two(), "grid denominator must be a power of two");
    let den = grid_denominator as f64;
    let origin: Vec<f64> = region.dims().iter().map(|i| i.lo()).collect();
    let block: Block = region
        .dims()
        .iter()
        .map(|i| {
            let n = (i.width() * den).round();
            assert!(n * (1.0 / den) == i.width() && (i.lo() * den).fract() == 0.0, "region endpoints must be on the grid");
            (0, n as u64)
        })
        .collect();
    sublevel_rec(f, &origin, block, threshold, den, 0).map(|b| block_box(&origin, &b, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_is_nonnegative_on_zero_pi() {
        let region = IntervalBox::new(vec![Interval::point(0.0).hull(Interval::pi())]).unwrap();
        let out = prove_lower_bound(&|b: &IntervalBox| b[0].sin(), &region, -0.001, 1e-6);
        assert_eq!(out.status, Status::Proved);
        assert!(out.certified_min >= -0.001);
    }

    #[test]
    fn parabola_fails_near_origin() {
        let region = IntervalBox::from_bounds(&[(0.0, 2.0)]).unwrap();
        let out = prove_lower_bound(&|b: &IntervalBox| b[0].sqr() - 1.0, &region, 0.0, 1e-6);
        let Status::Failed { witness } = out.status else { panic!("{out:?}") };
        assert!(witness[0].hi() <= 1.0);
    }

    #[test]
    fn coarse_width_is_inconclusive() {
        let region = IntervalBox::from_bounds(&[(0.0, 1.0)]).unwrap();
        let out = prove_lower_bound(&|b: &IntervalBox| b[0] - b[0] + 0.5 * b[0], &region, 0.0, 10.0);
        assert!(matches!(out.status, Status::Inconclusive { .. }), "{out:?}");
    }

    #[test]
    fn sublevel_of_linear_function() {
        let region = IntervalBox::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let got = enclose_sublevel(&|b: &IntervalBox| b[0], &region, 0.5, 4).unwrap();
        let exact = IntervalBox::from_bounds(&[(0.0, 0.5), (0.0, 1.0)]).unwrap();
        assert!(exact.is_subset_of(&got));
        assert!(got.is_subset_of(&IntervalBox::from_bounds(&[(0.0, 0.75), (0.0, 1.0)]).unwrap()));
        assert!(enclose_sublevel(&|_: &IntervalBox| Interval::point(1.0), &region, 0.0, 1024).is_none());
    }

    #[test]
    fn schedule_independent() {
        let region = IntervalBox::from_bounds(&[(0.0, 3.0), (-1.0, 2.0)]).unwrap();
        let f = |b: &IntervalBox| (b[0] * b[1]).sin() + b[0].sqr() * 0.1 + 1.0;
        let runs: Vec<SearchOutcome> = [1, 3, 8]
            .iter()
            .map(|&n| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
                pool.install(|| prove_lower_bound(&f, &region, 0.05, 1e-4))
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
    }
}

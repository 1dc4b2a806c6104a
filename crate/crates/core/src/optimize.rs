//! Derivative-free scalar minimization.

/// Result of a one-dimensional minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2

/// Golden-section search on `[lo, hi]`, stopping when the bracket is
/// narrower than `tol`. Assumes `f` is unimodal on the interval.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Minimum {
        x,
        value,
        evaluations,
    }
}

/// Samples `f` on `points` evenly spaced nodes of `[lo, hi]`, then refines
/// the best node by golden-section search between its neighbours. Guards
/// against functions that are not unimodal over the whole range.
pub fn scan_then_refine(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Minimum {
    assert!(points >= 2, "scan needs at least two nodes");
    let step = (hi - lo) / (points - 1) as f64;
    let node = |k: usize| {
        if k + 1 == points {
            hi
        } else {
            lo + step * k as f64
        }
    };
    let (best, best_val) =
        (0..points)
            .map(|k| (k, f(node(k))))
            .fold(
                (0, f64::INFINITY),
                |acc, (k, v)| if v < acc.1 { (k, v) } else { acc },
            );
    let a = node(best.saturating_sub(1));
    let b = node((best + 1).min(points - 1));
    let refined = golden_section(&mut f, a, b, tol);
    let evaluations = points + refined.evaluations;
    if refined.value <= best_val {
        Minimum {
            evaluations,
            ..refined
        }
    } else {
        Minimum {
            x: node(best),
            value: best_val,
            evaluations,
        }
    }
}

//! Scalar extremization: golden-section search and grid-then-refine.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// A located extremum: abscissa and objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

impl Extremum {
    /// Larger value wins; on a tie the smaller abscissa wins.
    pub fn max_of(self, other: Extremum) -> Extremum {
        if other.value > self.value || (other.value == self.value && other.x < self.x) {
            other
        } else {
            self
        }
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Extremum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = Extremum { x: c, value: fc }.max_of(Extremum { x: d, value: fd });
    // 200 iterations shrink any finite bracket below double resolution
    for _ in 0..200 {
        if (b - a) <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            best = best.max_of(Extremum { x: c, value: fc });
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            best = best.max_of(Extremum { x: d, value: fd });
        }
    }
    best
}

/// Golden-section search for a minimum.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Extremum {
    let e = golden_max(|x| -f(x), lo, hi, tol);
    Extremum {
        x: e.x,
        value: -e.value,
    }
}

/// Refines every local maximum of a sampled objective.
///
/// `xs` must be strictly increasing and `values[i] = f(xs[i])`. Each sample that
/// is not smaller than its neighbours is refined by golden-section search on the
/// bracket formed by those neighbours (endpoints use a one-sided bracket). The
/// sampled points themselves remain candidates, so the result is never worse
/// than the raw grid maximum.
pub fn refine_grid_max(f: impl Fn(f64) -> f64, xs: &[f64], values: &[f64], tol: f64) -> Extremum {
    refine_top_maxima(f, xs, values, tol, usize::MAX)
}

/// [`refine_grid_max`] restricted to the `limit` highest sampled local maxima
/// (ties toward smaller `x`). Peaks whose sampled rise cannot reach the best
/// value found so far are skipped.
pub fn refine_top_maxima(
    f: impl Fn(f64) -> f64,
    xs: &[f64],
    values: &[f64],
    tol: f64,
    limit: usize,
) -> Extremum {
    assert_eq!(xs.len(), values.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let mut best = Extremum {
        x: xs[0],
        value: values[0],
    };
    for i in 0..n {
        best = best.max_of(Extremum {
            x: xs[i],
            value: values[i],
        });
    }
    if n == 1 {
        return best;
    }
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            (i == 0 || values[i] >= values[i - 1]) && (i + 1 == n || values[i] >= values[i + 1])
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks.truncate(limit);
    for i in peaks {
        // a smooth peak rises above its sample by a fraction of the drop to
        // the nearer neighbour, so one full drop is a safe ceiling
        let left = if i > 0 {
            values[i] - values[i - 1]
        } else {
            0.0
        };
        let right = if i + 1 < n {
            values[i] - values[i + 1]
        } else {
            0.0
        };
        if values[i] + left.max(right) <= best.value {
            continue;
        }
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(n - 1)];
        best = best.max_of(golden_max(&f, lo, hi, tol));
    }
    best
}

//! Maximal operators over grid intervals.
//!
//! The uncentered operators take suprema over every interval of cells; the
//! basic engine fills, for each left endpoint, a row of interval values and
//! folds it into the output with a reverse suffix-max walk, so the total
//! cost is O(N^2) plus the cost of producing each row entry. A convex-hull
//! divide-and-conquer variant of the plain maximal function runs in
//! O(N log^2 N) for cross-checks at large sizes.

use crate::error::{Error, Result};
use crate::fenwick::RankedSums;
use crate::grid::{DyadicInterval, GridFunction, Weight};
use crate::orlicz::{luxemburg_slice, luxemburg_slice_warm, YoungFunction};

/// Which intervals a sharp-type supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalFamily {
    /// Every interval of cells.
    All,
    /// Dyadic intervals only; requires a power-of-two cell count.
    Dyadic,
}

/// Prefix sums with a running Neumaier correction; differences of entries
/// reproduce window sums to near machine accuracy.
pub(crate) fn prefix_sums(values: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(len + 1);
    p.push(0.0);
    let mut s = 0.0;
    let mut c = 0.0;
    for x in values {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
        p.push(s + c);
    }
    p
}

/// For each left endpoint `a`, `fill` pushes the interval values
/// `[a, a], [a, a+1], ..., [a, n-1]` into the row; the reverse walk then
/// folds `row` into `out[i] = sup over intervals containing i`.
fn sweep_rows(n: usize, mut fill: impl FnMut(usize, &mut Vec<f64>), out: &mut [f64]) {
    let mut row = Vec::with_capacity(n);
    for a in 0..n {
        row.clear();
        fill(a, &mut row);
        debug_assert_eq!(row.len(), n - a);
        let mut running = f64::NEG_INFINITY;
        for i in (a..n).rev() {
            running = running.max(row[i - a]);
            if running > out[i] {
                out[i] = running;
            }
        }
    }
}

fn finish(f: &GridFunction, out: Vec<f64>) -> GridFunction {
    GridFunction::new(*f.grid(), out).expect("maximal values stay finite")
}

/// Uncentered Hardy-Littlewood maximal function:
/// `Mf(i) = sup { mean_Q |f| : Q an interval of cells, i in Q }`.
pub fn hl_maximal(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let p = prefix_sums(f.values().iter().map(|v| v.abs()), n);
    let mut out = vec![0.0; n];
    sweep_rows(
        n,
        |a, row| {
            for b in a..n {
                row.push((p[b + 1] - p[a]) / (b - a + 1) as f64);
            }
        },
        &mut out,
    );
    finish(f, out)
}

fn slope(p: (f64, f64), q: (f64, f64)) -> f64 {
    (q.1 - p.1) / (q.0 - p.0)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Peak of the unimodal slope profile from an external point to a hull.
fn tangent_max(g: impl Fn(usize) -> f64, len: usize) -> f64 {
    let (mut lo, mut hi) = (0, len - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if g(mid) < g(mid + 1) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    g(lo)
}

/// Equivalent to [`hl_maximal`] but organized as divide-and-conquer over
/// chords of the prefix-sum graph: the mean of `|f|` over cells `[a, c]` is
/// the slope from `(a, P_a)` to `(c+1, P_{c+1})`, intervals are classified
/// by the midpoint they straddle, and each side is resolved with hull
/// tangent searches. O(N log^2 N) total.
#[allow(clippy::needless_range_loop)] // the index walks `out` and the hulls together
pub fn hl_maximal_accel(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let p = prefix_sums(f.values().iter().map(|v| v.abs()), n);
    let pt = |k: usize| (k as f64, p[k]);
    let mut out = vec![0.0; n];

    // Recursion on cell ranges, managed iteratively to keep stack flat.
    let mut stack = vec![(0usize, n - 1)];
    let mut upper: Vec<(f64, f64)> = Vec::new();
    let mut lower: Vec<(f64, f64)> = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        if lo == hi {
            let v = p[lo + 1] - p[lo];
            if v > out[lo] {
                out[lo] = v;
            }
            continue;
        }
        let m = (lo + hi) / 2;

        // Upper hull of right endpoints b in [m+2, hi+1].
        upper.clear();
        for b in m + 2..=hi + 1 {
            let q = pt(b);
            while upper.len() >= 2
                && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) >= 0.0
            {
                upper.pop();
            }
            upper.push(q);
        }
        // Lower hull of left endpoints a in [lo, m].
        lower.clear();
        for a in lo..=m {
            let q = pt(a);
            while lower.len() >= 2
                && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0
            {
                lower.pop();
            }
            lower.push(q);
        }

        // Cells on the left: admissible starts grow with the cell index.
        let mut running = f64::NEG_INFINITY;
        for i in lo..=m {
            let from = pt(i);
            let best = tangent_max(|k| slope(from, upper[k]), upper.len());
            running = running.max(best);
            if running > out[i] {
                out[i] = running;
            }
        }
        // Cells on the right: admissible ends grow as the index descends.
        running = f64::NEG_INFINITY;
        for i in (m + 1..=hi).rev() {
            let to = pt(i + 1);
            let best = tangent_max(|k| slope(lower[k], to), lower.len());
            running = running.max(best);
            if running > out[i] {
                out[i] = running;
            }
        }

        stack.push((lo, m));
        stack.push((m + 1, hi));
    }
    finish(f, out)
}

/// Dyadic maximal function: the supremum restricted to dyadic intervals.
pub fn dyadic_maximal(f: &GridFunction) -> Result<GridFunction> {
    f.grid().require_power_of_two()?;
    let n = f.len();
    let p = prefix_sums(f.values().iter().map(|v| v.abs()), n);
    let mut out = vec![0.0; n];
    for q in DyadicInterval::family(f.grid())? {
        let iv = q.as_interval();
        let (s, e) = (iv.start_cell(), iv.end_cell());
        let avg = (p[e] - p[s]) / iv.cell_count() as f64;
        for i in iv.cells() {
            if avg > out[i] {
                out[i] = avg;
            }
        }
    }
    Ok(finish(f, out))
}

/// `M_delta f = (M |f|^delta)^{1/delta}`; any positive exponent is allowed,
/// so this doubles as `M_r` for `r > 1`.
pub fn m_delta(f: &GridFunction, delta: f64) -> Result<GridFunction> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            requirement: "a finite exponent > 0",
        });
    }
    let powered = f.abs_powf(delta)?;
    hl_maximal(&powered).abs_powf(1.0 / delta)
}

/// `M_r w = (M w^r)^{1/r}` as a weight-to-weight map; `r >= 1` so the
/// result dominates `Mw` (power-mean ordering).
pub fn m_r(w: &Weight, r: f64) -> Result<Weight> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            requirement: "a finite exponent r >= 1",
        });
    }
    Weight::new(m_delta(w.as_fn(), r)?)
}

/// Dyadic variant `M^d_delta f = (M^d |f|^delta)^{1/delta}`.
pub fn dyadic_m_delta(f: &GridFunction, delta: f64) -> Result<GridFunction> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            requirement: "a finite exponent > 0",
        });
    }
    let powered = f.abs_powf(delta)?;
    dyadic_maximal(&powered)?.abs_powf(1.0 / delta)
}

/// Iterated maximal function `M(Mf)`.
pub fn m_squared(f: &GridFunction) -> GridFunction {
    hl_maximal(&hl_maximal(f))
}

/// Sharp maximal function:
/// `M# f(i) = sup { mean_Q |f - mean_Q f| : i in Q }` over all intervals.
pub fn sharp_maximal(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let mut tree = RankedSums::new(f.values());
    let mut out = vec![0.0; n];
    sweep_rows(
        n,
        |a, row| {
            tree.reset();
            for b in a..n {
                tree.insert(b);
                row.push(tree.mean_oscillation());
            }
        },
        &mut out,
    );
    finish(f, out)
}

/// Sharp maximal function over dyadic intervals only.
pub fn dyadic_sharp_maximal(f: &GridFunction) -> Result<GridFunction> {
    f.grid().require_power_of_two()?;
    let n = f.len();
    let p = prefix_sums(f.values().iter().copied(), n);
    let mut out = vec![0.0; n];
    for q in DyadicInterval::family(f.grid())? {
        let iv = q.as_interval();
        let (s, e) = (iv.start_cell(), iv.end_cell());
        let mu = (p[e] - p[s]) / iv.cell_count() as f64;
        let osc = iv.cells().map(|i| (f.value(i) - mu).abs()).sum::<f64>() / iv.cell_count() as f64;
        for i in iv.cells() {
            if osc > out[i] {
                out[i] = osc;
            }
        }
    }
    Ok(finish(f, out))
}

/// `M#_delta f = (M# |f|^delta)^{1/delta}` over the chosen interval family.
pub fn sharp_maximal_delta(
    f: &GridFunction,
    delta: f64,
    family: IntervalFamily,
) -> Result<GridFunction> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            requirement: "a finite exponent > 0",
        });
    }
    let powered = f.abs_powf(delta)?;
    let sharp = match family {
        IntervalFamily::All => sharp_maximal(&powered),
        IntervalFamily::Dyadic => dyadic_sharp_maximal(&powered)?,
    };
    sharp.abs_powf(1.0 / delta)
}

/// Orlicz maximal function `M_B f(i) = sup { ||f||_{B,Q} : i in Q }` with
/// the normalized Luxemburg norm. Power-type `B` reduces exactly to
/// [`m_delta`]; other Young functions run the solver across the sweep with
/// warm starts from the previous interval.
pub fn orlicz_maximal(f: &GridFunction, b: &YoungFunction) -> Result<GridFunction> {
    if let YoungFunction::Power { r } = *b {
        return m_delta(f, r);
    }
    let n = f.len();
    let mut out = vec![0.0; n];
    let mut vals: Vec<f64> = Vec::with_capacity(n);
    sweep_rows(
        n,
        |a, row| {
            vals.clear();
            let mut hint = 0.0;
            for bcell in a..n {
                vals.push(f.value(bcell));
                let norm = if hint > 0.0 {
                    luxemburg_slice_warm(&vals, b, hint)
                } else {
                    luxemburg_slice(&vals, b)
                };
                hint = norm;
                row.push(norm);
            }
        },
        &mut out,
    );
    Ok(finish(f, out))
}

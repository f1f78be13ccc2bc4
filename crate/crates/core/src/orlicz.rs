//! Young functions, normalized Luxemburg norms over intervals, the
//! infimum-form average norm, and the generalized Hölder inequality.
//!
//! All interval norms are taken with respect to the normalized measure
//! `dx / |Q|`, so the defining constraint of the Luxemburg norm reads
//! `mean_{i in Q} B(|f_i| / lambda) <= 1`.

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, GridFunction, Interval};

/// Relative tolerance of the Luxemburg bisection and the infimum search.
pub const SOLVER_REL_TOL: f64 = 1e-12;

/// A Young function: convex, increasing, `B(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YoungFunction {
    /// `t^r` with `r >= 1`.
    Power { r: f64 },
    /// `t (1 + log^+ t)^alpha` with `alpha >= 0`; `alpha = 1` defines L log L.
    LLogL { alpha: f64 },
    /// `e^t - 1`, defining the exponential class.
    ExpL,
}

impl YoungFunction {
    pub fn power(r: f64) -> Result<Self> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                requirement: "a finite exponent r >= 1",
            });
        }
        Ok(Self::Power { r })
    }

    pub fn llogl(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                requirement: "a finite exponent alpha >= 0",
            });
        }
        Ok(Self::LLogL { alpha })
    }

    /// `t (1 + log^+ t)`, the fundamental L log L Young function.
    pub fn l_log_l() -> Self {
        Self::LLogL { alpha: 1.0 }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Power { r } => format!("t^{r}"),
            Self::LLogL { alpha } => format!("t(1+log^+t)^{alpha}"),
            Self::ExpL => "e^t-1".to_string(),
        }
    }

    /// Unchecked evaluation; assumes `t >= 0`.
    pub(crate) fn value(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match *self {
            Self::Power { r } => t.powf(r),
            Self::LLogL { alpha } => {
                if t <= 1.0 {
                    t
                } else {
                    t * (1.0 + t.ln()).powf(alpha)
                }
            }
            Self::ExpL => t.exp_m1(),
        }
    }

    /// Unchecked inverse; assumes `s >= 0`.
    pub(crate) fn inverse_value(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        match *self {
            Self::Power { r } => s.powf(1.0 / r),
            Self::LLogL { .. } => {
                if s <= 1.0 {
                    return s;
                }
                // B is strictly increasing on [1, s] with B(1) = 1 <= s <= B(s).
                let (mut lo, mut hi) = (1.0f64, s);
                for _ in 0..200 {
                    if (hi - lo) <= SOLVER_REL_TOL * hi {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.value(mid) < s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            Self::ExpL => s.ln_1p(),
        }
    }
}

/// `B(t)`; errors on a negative argument.
pub fn young_eval(b: &YoungFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            requirement: "a finite argument t >= 0",
        });
    }
    Ok(b.value(t))
}

/// `B^{-1}(s)`; errors on a negative argument.
pub fn young_inverse(b: &YoungFunction, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            requirement: "a finite argument s >= 0",
        });
    }
    Ok(b.inverse_value(s))
}

/// `Phi(t) = t (1 + log^+ t)`, as a plain scalar map.
pub fn phi(t: f64) -> f64 {
    YoungFunction::l_log_l().value(t.max(0.0))
}

/// A Young function together with its complementary partner, as used in the
/// generalized Hölder inequality.
#[derive(Debug, Clone, Copy)]
pub struct ComplementaryPair {
    a: YoungFunction,
    abar: YoungFunction,
}

impl ComplementaryPair {
    /// The L log L / exp L pair.
    pub fn l_log_l_exp_l() -> Self {
        Self {
            a: YoungFunction::l_log_l(),
            abar: YoungFunction::ExpL,
        }
    }

    /// The power pair `(t^r, t^{r'})` with `1/r + 1/r' = 1`; requires `r > 1`.
    pub fn powers(r: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                requirement: "a finite exponent r > 1",
            });
        }
        Ok(Self {
            a: YoungFunction::Power { r },
            abar: YoungFunction::Power { r: r / (r - 1.0) },
        })
    }

    pub fn primary(&self) -> &YoungFunction {
        &self.a
    }

    pub fn complement(&self) -> &YoungFunction {
        &self.abar
    }

    /// Range of `A^{-1}(t) Abar^{-1}(t) / t` over the given sample points.
    /// For an exactly complementary pair this lies in `[1, 2]`; the
    /// L log L / exp L pair keeps the upper bound everywhere but reaches the
    /// lower bound only for large `t`.
    pub fn product_ratio_range(&self, ts: &[f64]) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &t in ts {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "t",
                    value: t,
                    requirement: "positive sample points",
                });
            }
            let r = self.a.inverse_value(t) * self.abar.inverse_value(t) / t;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Ok((lo, hi))
    }
}

/// Mean of `B(|v| / lambda)` over a slice, with overflow treated as +inf.
fn constraint(vals: &[f64], b: &YoungFunction, lambda: f64) -> f64 {
    let s = compensated_sum(vals.iter().map(|&v| b.value(v.abs() / lambda)));
    if s.is_finite() {
        s / vals.len() as f64
    } else {
        f64::INFINITY
    }
}

/// Luxemburg norm of a raw slice of cell values under the normalized measure.
///
/// The bracket is analytic: with `m` cells and `M = max |v|`,
/// `lambda = M / B^{-1}(4m)` forces the mean above 1 through the single
/// largest term, while `lambda = M / B^{-1}(1/2)` caps every term at 1/2.
pub(crate) fn luxemburg_slice(vals: &[f64], b: &YoungFunction) -> f64 {
    let maxv = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if maxv == 0.0 {
        return 0.0;
    }
    let m = vals.len() as f64;
    let mut lo = maxv / b.inverse_value(4.0 * m);
    let mut hi = maxv / b.inverse_value(0.5);
    // Guard against degenerate brackets from extreme inverses.
    while constraint(vals, b, lo) < 1.0 {
        lo *= 0.5;
    }
    while constraint(vals, b, hi) > 1.0 {
        hi *= 2.0;
    }
    bisect_constraint(vals, b, lo, hi)
}

/// Same solver, warm-started from a previous norm of a nearby interval.
pub(crate) fn luxemburg_slice_warm(vals: &[f64], b: &YoungFunction, hint: f64) -> f64 {
    let maxv = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if maxv == 0.0 {
        return 0.0;
    }
    if !(hint > 0.0) || !hint.is_finite() {
        return luxemburg_slice(vals, b);
    }
    let mut lo = hint * 0.5;
    let mut hi = hint * 2.0;
    let mut guard = 0;
    while constraint(vals, b, lo) < 1.0 {
        hi = lo;
        lo *= 0.25;
        guard += 1;
        if guard > 80 {
            return luxemburg_slice(vals, b);
        }
    }
    while constraint(vals, b, hi) > 1.0 {
        lo = hi;
        hi *= 4.0;
        guard += 1;
        if guard > 80 {
            return luxemburg_slice(vals, b);
        }
    }
    bisect_constraint(vals, b, lo, hi)
}

fn bisect_constraint(vals: &[f64], b: &YoungFunction, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if (hi - lo) <= SOLVER_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if constraint(vals, b, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn collect_interval(f: &GridFunction, q: Interval) -> Result<Vec<f64>> {
    f.grid().check_interval(q)?;
    Ok(q.cells().map(|i| f.value(i)).collect())
}

/// Luxemburg norm `inf { λ > 0 : mean_Q B(|f|/λ) <= 1 }`; zero when `f`
/// vanishes identically on `Q`.
pub fn luxemburg_norm(f: &GridFunction, b: &YoungFunction, q: Interval) -> Result<f64> {
    let vals = collect_interval(f, q)?;
    Ok(luxemburg_slice(&vals, b))
}

/// `inf_{μ>0} { μ + μ mean_Q B(|f|/μ) }`, the two-sided companion of the
/// Luxemburg norm: it always lies in `[||f||_{B,Q}, 2 ||f||_{B,Q}]`.
///
/// The objective is convex in `μ` (each term is a perspective of a convex
/// function), hence unimodal on a logarithmic axis; a coarse scan brackets
/// the minimum and golden-section finishes.
pub fn rao_ren_norm(f: &GridFunction, b: &YoungFunction, q: Interval) -> Result<f64> {
    let vals = collect_interval(f, q)?;
    let maxv = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if maxv == 0.0 {
        return Ok(0.0);
    }
    let objective = |mu: f64| -> f64 {
        let c = constraint(&vals, b, mu);
        if c.is_finite() {
            mu * (1.0 + c)
        } else {
            f64::INFINITY
        }
    };
    // Coarse log scan around the max value.
    let mut best_k = 0i32;
    let mut best = f64::INFINITY;
    for k in -60..=60 {
        let v = objective(maxv * 2f64.powi(k));
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let mut lo = (best_k - 1) as f64 * std::f64::consts::LN_2 + maxv.ln();
    let mut hi = (best_k + 1) as f64 * std::f64::consts::LN_2 + maxv.ln();
    // Golden-section on log mu.
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1.exp());
    let mut f2 = objective(x2.exp());
    for _ in 0..120 {
        if (hi - lo) < SOLVER_REL_TOL {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1.exp());
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2.exp());
        }
    }
    Ok(best.min(f1).min(f2))
}

/// Both sides of the generalized Hölder inequality on `Q`:
/// `mean_Q |f g| <= 2 ||f||_{A,Q} ||g||_{Abar,Q}`.
/// Returns `(lhs, rhs)`; the inequality itself is the caller's to assert.
pub fn generalized_holder(
    f: &GridFunction,
    g: &GridFunction,
    pair: &ComplementaryPair,
    q: Interval,
) -> Result<(f64, f64)> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    f.grid().check_interval(q)?;
    let lhs =
        compensated_sum(q.cells().map(|i| (f.value(i) * g.value(i)).abs())) / q.cell_count() as f64;
    let nf = luxemburg_norm(f, pair.primary(), q)?;
    let ng = luxemburg_norm(g, pair.complement(), q)?;
    Ok((lhs, 2.0 * nf * ng))
}

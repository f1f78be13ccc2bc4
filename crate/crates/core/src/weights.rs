//! Muckenhoupt weight constants, the sharp reverse Hölder bound, weight
//! factories, Fefferman-Stein and Buckley ratio checks, and the geometric
//! majorant iteration that manufactures weights with controlled constants.

use crate::error::{Error, Result};
use crate::grid::{lp_norm, weak_lp_norm, weighted_integral, Grid, GridFunction, Weight};
use crate::maximal::{hl_maximal, m_r, prefix_sums};

/// `[w]_{A_1} = max_i (Mw)_i / w_i`, the smallest `c` with `Mw <= c w`.
pub fn a1_constant(w: &Weight) -> f64 {
    let mw = hl_maximal(w.as_fn());
    w.values()
        .iter()
        .zip(mw.values())
        .map(|(&wi, &mi)| mi / wi)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `[w]_{A_p} = sup_Q (mean_Q w) (mean_Q w^{1-p'})^{p-1}` over all grid
/// intervals; requires `p > 1`.
pub fn ap_constant(w: &Weight, p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            requirement: "a finite exponent p > 1",
        });
    }
    let n = w.values().len();
    let pw = prefix_sums(w.values().iter().copied(), n);
    let dual_exp = -1.0 / (p - 1.0); // 1 - p'
    let psigma = prefix_sums(w.values().iter().map(|&v| v.powf(dual_exp)), n);
    let mut best = f64::NEG_INFINITY;
    for a in 0..n {
        for b in a..n {
            let m = (b - a + 1) as f64;
            let mean_w = (pw[b + 1] - pw[a]) / m;
            let mean_sigma = (psigma[b + 1] - psigma[a]) / m;
            let prod = mean_w * mean_sigma.powf(p - 1.0);
            if prod > best {
                best = prod;
            }
        }
    }
    Ok(best)
}

/// The exponent `1 + 1/(2^{n+1} a1)` attached to an `A_1` constant in
/// dimension `n`.
pub fn reverse_holder_exponent_for(a1: f64, dimension: u32) -> f64 {
    1.0 + 1.0 / (2f64.powi(dimension as i32 + 1) * a1)
}

/// Reverse Hölder exponent of a weight on the 1-D grid.
pub fn reverse_holder_exponent(w: &Weight) -> f64 {
    reverse_holder_exponent_for(a1_constant(w), 1)
}

/// Both sides of the sharp reverse Hölder bound `M_{r_w} w <= 2 [w]_{A_1} w`.
#[derive(Debug, Clone)]
pub struct ReverseHolderCheck {
    pub a1: f64,
    pub exponent: f64,
    /// `max_i (M_{r_w} w)_i / (2 [w]_{A_1} w_i)`; the bound demands `<= 1`.
    pub max_ratio: f64,
    pub ok: bool,
}

pub fn verify_reverse_holder(w: &Weight) -> Result<ReverseHolderCheck> {
    let a1 = a1_constant(w);
    let exponent = reverse_holder_exponent_for(a1, 1);
    let mrw = m_r(w, exponent)?;
    let max_ratio = w
        .values()
        .iter()
        .zip(mrw.values())
        .map(|(&wi, &mi)| mi / (2.0 * a1 * wi))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ReverseHolderCheck {
        a1,
        exponent,
        max_ratio,
        ok: max_ratio <= 1.0 + 1e-9,
    })
}

/// Summary of a weight's constants, serializable as one CSV row.
#[derive(Debug, Clone)]
pub struct WeightReport {
    pub name: String,
    pub cells: usize,
    pub a1: f64,
    /// `(p, [w]_{A_p})` pairs in the order requested.
    pub ap: Vec<(f64, f64)>,
    pub reverse_holder_exponent: f64,
    pub reverse_holder_ok: bool,
}

impl WeightReport {
    pub fn compute(name: &str, w: &Weight, ps: &[f64]) -> Result<Self> {
        let check = verify_reverse_holder(w)?;
        let ap = ps
            .iter()
            .map(|&p| Ok((p, ap_constant(w, p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.to_string(),
            cells: w.values().len(),
            a1: check.a1,
            ap,
            reverse_holder_exponent: check.exponent,
            reverse_holder_ok: check.ok,
        })
    }

    pub fn csv_header(ps: &[f64]) -> String {
        let mut cols = vec!["name".to_string(), "n".to_string(), "a1".to_string()];
        cols.extend(ps.iter().map(|p| format!("ap@{p}")));
        cols.push("rw".to_string());
        cols.push("rh_ok".to_string());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.name.clone(),
            self.cells.to_string(),
            format!("{:.16e}", self.a1),
        ];
        cols.extend(self.ap.iter().map(|(_, v)| format!("{v:.16e}")));
        cols.push(format!("{:.16e}", self.reverse_holder_exponent));
        cols.push(self.reverse_holder_ok.to_string());
        cols.join(",")
    }
}

/// Parameters of the geometric majorant series
/// `Rh = sum_k M^k h / (2 m)^k`.
#[derive(Debug, Clone, Copy)]
pub struct RdfConfig {
    /// Exponent of the weighted Lebesgue space the bound refers to.
    pub s: f64,
    /// Maximum number of series terms.
    pub truncation: usize,
    /// Declared upper bound for the maximal operator norm on `L^s(v)`.
    pub maximal_norm_bound: f64,
}

impl RdfConfig {
    pub fn new(s: f64, truncation: usize, maximal_norm_bound: f64) -> Result<Self> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                requirement: "a finite exponent s > 1",
            });
        }
        if truncation == 0 {
            return Err(Error::InvalidParameter {
                name: "truncation",
                value: 0.0,
                requirement: "at least one series term",
            });
        }
        if !(maximal_norm_bound >= 1.0) || !maximal_norm_bound.is_finite() {
            return Err(Error::InvalidParameter {
                name: "maximal_norm_bound",
                value: maximal_norm_bound,
                requirement: "a finite bound >= 1",
            });
        }
        Ok(Self {
            s,
            truncation,
            maximal_norm_bound,
        })
    }

    /// Default configuration for a given reference weight: the norm bound
    /// comes from the maximal-function estimate `4 s' [v]_{A_s}^{1/(s-1)}`
    /// and the series keeps at most 24 terms.
    pub fn for_weight(s: f64, v: &Weight) -> Result<Self> {
        Self::new(s, 24, suggested_maximal_norm_bound(v, s)?)
    }
}

/// `4 s' [v]_{A_s}^{1/(s-1)}`, an a-priori ceiling for `||M||_{L^s(v)}`.
pub fn suggested_maximal_norm_bound(v: &Weight, s: f64) -> Result<f64> {
    let sp = crate::conjugate(s)?;
    Ok(4.0 * sp * ap_constant(v, s)?.powf(1.0 / (s - 1.0)))
}

/// Empirical lower bound for `||M||_{L^s(v)}`: the best ratio
/// `||Mf||_{L^s(v)} / ||f||_{L^s(v)}` over indicators, point masses, and
/// seeded random profiles.
pub fn maximal_norm_lower_bound(v: &Weight, s: f64, trials: usize, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    let grid = *v.grid();
    let n = grid.cells();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut consider = |f: &GridFunction| -> Result<()> {
        let denom = lp_norm(f, s, v)?;
        if denom > 0.0 {
            let ratio = lp_norm(&hl_maximal(f), s, v)? / denom;
            if ratio > best {
                best = ratio;
            }
        }
        Ok(())
    };
    consider(&GridFunction::constant(grid, 1.0)?)?;
    for _ in 0..trials {
        let kind = rng.gen_range(0..3);
        let f = match kind {
            0 => {
                // interval indicator
                let a = rng.gen_range(0..n);
                let len = rng.gen_range(1..=(n - a));
                let mut vals = vec![0.0; n];
                for item in vals.iter_mut().skip(a).take(len) {
                    *item = 1.0;
                }
                GridFunction::new(grid, vals)?
            }
            1 => {
                // point mass
                let j = rng.gen_range(0..n);
                let mut vals = vec![0.0; n];
                vals[j] = 1.0;
                GridFunction::new(grid, vals)?
            }
            _ => {
                let vals = (0..n)
                    .map(|_| 10f64.powf(rng.gen_range(-2.0..2.0)))
                    .collect();
                GridFunction::new(grid, vals)?
            }
        };
        consider(&f)?;
    }
    Ok(best)
}

/// Result of the truncated majorant series.
#[derive(Debug, Clone)]
pub struct RdfOutcome {
    pub majorant: GridFunction,
    /// Series terms actually accumulated (including the k = 0 term).
    pub terms: usize,
    /// Sup norm of the last term added.
    pub tail_sup: f64,
    /// True when the terms stopped contracting; the declared norm bound was
    /// too small for this input.
    pub diverged: bool,
}

/// `Rh = sum_{k=0}^{K} M^k h / (2 m)^k` for nonnegative `h`. The majorant
/// dominates `h` by construction; its norm and `A_1` bounds hold whenever
/// `m` really dominates the maximal operator norm.
pub fn rubio_de_francia(h: &GridFunction, cfg: &RdfConfig) -> Result<RdfOutcome> {
    if let Some(index) = h.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h.value(index),
            requirement: "a nonnegative function",
        });
    }
    if h.max_abs() == 0.0 {
        return Err(Error::InvalidParameter {
            name: "h",
            value: 0.0,
            requirement: "a function that is not identically zero",
        });
    }
    let scale = 1.0 / (2.0 * cfg.maximal_norm_bound);
    let mut term = h.clone();
    let mut acc: Vec<f64> = h.values().to_vec();
    let mut terms = 1;
    let mut prev_sup = h.max_abs();
    let mut tail_sup = prev_sup;
    let mut diverged = false;
    for _ in 1..=cfg.truncation {
        term = hl_maximal(&term).scale(scale)?;
        tail_sup = term.max_abs();
        if tail_sup >= prev_sup {
            diverged = true;
        }
        prev_sup = tail_sup;
        for (a, t) in acc.iter_mut().zip(term.values()) {
            *a += t;
        }
        terms += 1;
        if tail_sup < 1e-14 {
            break;
        }
    }
    Ok(RdfOutcome {
        majorant: GridFunction::new(*h.grid(), acc)?,
        terms,
        tail_sup,
        diverged,
    })
}

/// Strong Fefferman-Stein ratio `||Mf||_{L^p(w)} / (p' ||f||_{L^p(Mw)})`;
/// the two-weight inequality asserts this stays below an absolute constant.
pub fn fefferman_stein_strong_ratio(f: &GridFunction, p: f64, w: &Weight) -> Result<f64> {
    let pp = crate::conjugate(p)?;
    let mw = Weight::new(hl_maximal(w.as_fn()))?;
    let denom = pp * lp_norm(f, p, &mw)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(lp_norm(&hl_maximal(f), p, w)? / denom)
}

/// Weak Fefferman-Stein ratio `||Mf||_{L^{1,inf}(w)} / int |f| Mw`.
pub fn fefferman_stein_weak_ratio(f: &GridFunction, w: &Weight) -> Result<f64> {
    let mw = hl_maximal(w.as_fn());
    let denom = weighted_integral(&f.abs(), &Weight::new(mw)?)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(weak_lp_norm(&hl_maximal(f), 1.0, w)? / denom)
}

/// Largest `||Mf||_{L^p(w)} / (p' [w]_{A_p}^{1/(p-1)} ||f||_{L^p(w)})`
/// over the supplied family; the sharp maximal-function bound keeps this
/// below an absolute constant.
pub fn buckley_ratio(w: &Weight, p: f64, family: &[GridFunction]) -> Result<f64> {
    let pp = crate::conjugate(p)?;
    let shape = pp * ap_constant(w, p)?.powf(1.0 / (p - 1.0));
    let mut best = 0.0f64;
    for f in family {
        let denom = shape * lp_norm(f, p, w)?;
        if denom > 0.0 {
            best = best.max(lp_norm(&hl_maximal(f), p, w)? / denom);
        }
    }
    Ok(best)
}

/// `w(x) = max(|x|, h)^e` sampled at cell midpoints; the truncation keeps
/// the weight positive and grid-consistent for any real exponent.
pub fn truncated_power_weight(grid: Grid, exponent: f64) -> Result<Weight> {
    if !exponent.is_finite() {
        return Err(Error::InvalidParameter {
            name: "exponent",
            value: exponent,
            requirement: "a finite exponent",
        });
    }
    let h = grid.spacing();
    Weight::from_fn(grid, |x| x.abs().max(h).powf(exponent))
}

/// `(Mf)^delta` for `0 < delta < 1`; such weights have an `A_1` constant
/// bounded by `c / (1 - delta)`.
pub fn maximal_power_weight(f: &GridFunction, delta: f64) -> Result<Weight> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            requirement: "an exponent in (0, 1)",
        });
    }
    Weight::new(hl_maximal(f).abs_powf(delta)?)
}

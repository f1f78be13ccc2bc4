//! Generators of (weight, symbol, density) triples. Each family is a list of
//! parameter values plus a renderer producing the triple on any grid; the
//! renderers are built from continuum descriptors (centers, widths, heights
//! drawn once per instance), so the same instance refines consistently from
//! one resolution to the next.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Weight};
use crate::weights::{maximal_power_weight, truncated_power_weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// One rendered family member.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub label: String,
    /// The driving parameter (a shape parameter or a trial index).
    pub parameter: f64,
    pub weight: Weight,
    pub symbol: GridFunction,
    pub density: GridFunction,
}

type Generator = dyn Fn(&Grid, f64) -> Result<(Weight, GridFunction, GridFunction)> + Send + Sync;

/// A named, parameterized source of instances.
#[derive(Clone)]
pub struct ExtremalFamily {
    name: String,
    parameters: Vec<f64>,
    provides_symbol: bool,
    generator: Arc<Generator>,
}

impl ExtremalFamily {
    pub fn new(
        name: impl Into<String>,
        parameters: Vec<f64>,
        provides_symbol: bool,
        generator: impl Fn(&Grid, f64) -> Result<(Weight, GridFunction, GridFunction)>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            parameters,
            provides_symbol,
            generator: Arc::new(generator),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parameters(&self) -> &[f64] {
        &self.parameters
    }

    /// Whether instances carry a meaningful commutator symbol.
    pub fn provides_symbol(&self) -> bool {
        self.provides_symbol
    }

    pub fn instance(&self, grid: &Grid, parameter: f64) -> Result<FamilyInstance> {
        let (weight, symbol, density) = (self.generator)(grid, parameter)?;
        Ok(FamilyInstance {
            label: format!("{}[{}]", self.name, parameter),
            parameter,
            weight,
            symbol,
            density,
        })
    }

    pub fn instances(&self, grid: &Grid) -> Result<Vec<FamilyInstance>> {
        self.parameters
            .iter()
            .map(|&t| self.instance(grid, t))
            .collect()
    }
}

impl std::fmt::Debug for ExtremalFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExtremalFamily")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("provides_symbol", &self.provides_symbol)
            .finish()
    }
}

/// Default shape parameters for the singular sharpness probes.
/// Half-octave exponent ladder for the blow-up family. The range keeps
/// `delta * ln(1/h)` above 1 at 4096 cells, where the truncated power still
/// resolves the full `1/delta` constant instead of capping near `ln(1/h)`.
pub const SHARPNESS_DELTAS: [f64; 5] = [
    std::f64::consts::FRAC_1_SQRT_2,
    0.5,
    std::f64::consts::FRAC_1_SQRT_2 / 2.0,
    0.25,
    std::f64::consts::FRAC_1_SQRT_2 / 4.0,
];

/// The blow-up family: weight `max(|x|, h)^{delta - 1}`, symbol
/// `ln(max(|x|, h))`, density the indicator of `[1/2, 1)`. As `delta`
/// drops, the weight's maximal-function constant climbs like `1/delta`.
/// The density sits away from the singularity so the transform reaches a
/// fixed plateau across it: the measured norm ratios then track the
/// weight's mass near zero, which is what grows with the constant.
pub fn sharpness_family() -> ExtremalFamily {
    sharpness_family_with(SHARPNESS_DELTAS.to_vec())
}

/// Same family over a caller-chosen delta ladder. Deltas must lie in
/// `(0, 1]`: at `delta = 1` the weight is flat, below it the singularity
/// sharpens.
pub fn sharpness_family_with(deltas: Vec<f64>) -> ExtremalFamily {
    ExtremalFamily::new("sharpness", deltas, true, |grid, delta| {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                requirement: "must lie in (0, 1]",
            });
        }
        let h = grid.spacing();
        let w = truncated_power_weight(*grid, delta - 1.0)?;
        let b = GridFunction::from_fn(*grid, |x| x.abs().max(h).ln())?;
        let f = GridFunction::indicator(*grid, 0.5, 1.0)?;
        Ok((w, b, f))
    })
}

fn trial_rng(seed: u64, trial: f64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Truncation scale for singular descriptors; fixed in physical units so an
/// instance looks the same at every resolution.
const CORE: f64 = 0.02;

fn draw_weight(rng: &mut ChaCha8Rng, grid: &Grid) -> Result<Weight> {
    match rng.gen_range(0..4u8) {
        0 => Weight::constant(*grid, rng.gen_range(0.5..2.0)),
        1 => {
            let a = rng.gen_range(-0.9..1.5);
            truncated_power_weight(*grid, a).and_then(|w| {
                // Re-truncate at the fixed physical scale so refinement
                // does not sharpen the spike.
                let c = CORE.powf(a);
                Weight::new(
                    w.as_fn()
                        .map(|v| if a < 0.0 { v.min(c) } else { v.max(c) })?,
                )
            })
        }
        2 => {
            let a = rng.gen_range(-0.9..1.2);
            let c = rng.gen_range(-0.5..0.5);
            Weight::from_fn(*grid, |x| (x - c).abs().max(CORE).powf(a))
        }
        _ => {
            let c = rng.gen_range(-0.6..0.6);
            let width = rng.gen_range(0.05..0.3);
            let height = 10f64.powf(rng.gen_range(0.0..1.5));
            let base = GridFunction::from_fn(*grid, |x| {
                height * (-((x - c) / width).powi(2)).exp() + 0.1
            })?;
            maximal_power_weight(&base, rng.gen_range(0.3..0.9))
        }
    }
}

fn draw_symbol(rng: &mut ChaCha8Rng, grid: &Grid) -> Result<GridFunction> {
    let s = rng.gen_range(0.3..2.0);
    match rng.gen_range(0..4u8) {
        0 => {
            let c = rng.gen_range(-0.5..0.5);
            GridFunction::from_fn(*grid, move |x| s * (x - c).abs().max(CORE).ln())
        }
        1 => {
            let c = rng.gen_range(-0.7..0.7);
            GridFunction::from_fn(*grid, move |x| if x < c { s } else { -s })
        }
        2 => {
            let a = rng.gen_range(1.0..6.0);
            GridFunction::from_fn(*grid, move |x| s * (a * x).sin())
        }
        _ => {
            let c = rng.gen_range(-0.4..0.4);
            GridFunction::from_fn(*grid, move |x| {
                s * (x.abs().max(CORE).ln() + if x < c { 0.5 } else { -0.5 })
            })
        }
    }
}

fn draw_density(rng: &mut ChaCha8Rng, grid: &Grid) -> Result<GridFunction> {
    let boxes = rng.gen_range(1..=3u8);
    let mut parts: Vec<Box<dyn Fn(f64) -> f64>> = Vec::new();
    for _ in 0..boxes {
        let width = rng.gen_range(0.05..0.4);
        let from = rng.gen_range(-0.8..0.8 - width);
        let to = from + width;
        let height = 10f64.powf(rng.gen_range(-1.0..1.5));
        parts.push(Box::new(
            move |x| {
                if x >= from && x < to {
                    height
                } else {
                    0.0
                }
            },
        ));
    }
    if rng.gen_bool(0.4) {
        let c = rng.gen_range(-0.6..0.6);
        let width = rng.gen_range(0.05..0.3);
        let amp = 10f64.powf(rng.gen_range(-1.0..1.0));
        parts.push(Box::new(move |x| amp * (-((x - c) / width).powi(2)).exp()));
    }
    if rng.gen_bool(0.25) {
        let c = rng.gen_range(-0.5..0.5);
        let amp = 10f64.powf(rng.gen_range(-0.5..0.5));
        parts.push(Box::new(move |x| amp * (x - c).abs().max(CORE).powf(-0.5)));
    }
    GridFunction::from_fn(*grid, |x| parts.iter().map(|p| p(x)).sum())
}

/// The seeded default family: mixed weights (constant, truncated powers,
/// powers of maximal functions), mixed symbols (logarithms, steps, smooth
/// oscillations), and compactly supported densities.
pub fn default_family(trials: usize, seed: u64) -> ExtremalFamily {
    ExtremalFamily::new(
        format!("default[seed={seed}]"),
        (0..trials).map(|t| t as f64).collect(),
        true,
        move |grid, trial| {
            let mut rng = trial_rng(seed, trial);
            let w = draw_weight(&mut rng, grid)?;
            let b = draw_symbol(&mut rng, grid)?;
            let f = draw_density(&mut rng, grid)?;
            Ok((w, b, f))
        },
    )
}

/// Same weights and densities as the default family, constant symbol: every
/// commutator built from it vanishes.
pub fn constant_symbol_family(trials: usize, seed: u64) -> ExtremalFamily {
    ExtremalFamily::new(
        format!("constant-symbol[seed={seed}]"),
        (0..trials).map(|t| t as f64).collect(),
        true,
        move |grid, trial| {
            let mut rng = trial_rng(seed, trial);
            let w = draw_weight(&mut rng, grid)?;
            let _ = draw_symbol(&mut rng, grid)?;
            let b = GridFunction::constant(*grid, 1.0)?;
            let f = draw_density(&mut rng, grid)?;
            Ok((w, b, f))
        },
    )
}

/// Unit weight, log symbol, varying densities: no weight growth at all, so
/// fitted growth exponents degenerate.
pub fn constant_weight_family(trials: usize, seed: u64) -> ExtremalFamily {
    ExtremalFamily::new(
        format!("constant-weight[seed={seed}]"),
        (0..trials).map(|t| t as f64).collect(),
        true,
        move |grid, trial| {
            let mut rng = trial_rng(seed, trial);
            let w = Weight::constant(*grid, 1.0)?;
            let b = GridFunction::from_fn(*grid, |x| x.abs().max(CORE).ln())?;
            let f = draw_density(&mut rng, grid)?;
            Ok((w, b, f))
        },
    )
}

/// Weights and densities only (the symbol slot is a zero placeholder);
/// running a commutator check against it is an arity error.
pub fn densities_only_family(trials: usize, seed: u64) -> ExtremalFamily {
    ExtremalFamily::new(
        format!("densities-only[seed={seed}]"),
        (0..trials).map(|t| t as f64).collect(),
        false,
        move |grid, trial| {
            let mut rng = trial_rng(seed, trial);
            let w = draw_weight(&mut rng, grid)?;
            let b = GridFunction::constant(*grid, 0.0)?;
            let f = draw_density(&mut rng, grid)?;
            Ok((w, b, f))
        },
    )
}

/// Reject instances whose density never meets a grid cell (possible for very
/// coarse grids); callers that need a nonzero density use this.
pub fn nonzero_density(instance: &FamilyInstance) -> Result<()> {
    if instance.density.max_abs() == 0.0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok(())
}

//! Discrete one-dimensional harmonic analysis laboratory.
//!
//! Everything operates on piecewise-constant functions over a uniform grid
//! of cells. The crate provides maximal operators, Muckenhoupt weight
//! constants, truncated singular integrals and their commutators with
//! functions of bounded mean oscillation, stopping-time decompositions, and
//! a registry of weighted inequalities with numeric verification drivers.

// Parameter guards are written `!(x > 0.0)` on purpose: NaN must fail
// validation, and the positive comparison makes that a one-liner.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cz;
pub mod error;
pub mod family;
mod fenwick;
pub mod grid;
pub mod maximal;
pub mod orlicz;
pub mod singular;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{average, integral, lp_norm, weak_lp_norm, weighted_integral};
pub use grid::{Grid, GridFunction, Interval, Weight};

/// Conjugate exponent `p' = p / (p - 1)`; requires `p > 1`.
pub fn conjugate(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            requirement: "a finite exponent p > 1",
        });
    }
    Ok(p / (p - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_exponents() {
        assert_eq!(conjugate(2.0).unwrap(), 2.0);
        assert!((conjugate(4.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((conjugate(1.5).unwrap() - 3.0).abs() < 1e-12);
        assert!(conjugate(1.0).is_err());
        assert!(conjugate(0.7).is_err());
        // Involution: (p')' = p.
        for p in [1.1, 1.9, 2.0, 3.7, 19.0] {
            let back = conjugate(conjugate(p).unwrap()).unwrap();
            assert!((back - p).abs() < 1e-11);
        }
    }
}

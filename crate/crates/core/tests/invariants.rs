//! Cross-module properties on randomly generated inputs: order relations
//! between the maximal variants, norm comparisons, decomposition structure,
//! and serialization round-trips. Each property is an exact statement, so
//! tolerances only absorb floating-point reassociation.

use harmlab::cz::{cz_decompose, kolmogorov_check};
use harmlab::grid::{
    distribution, integral, lp_norm, read_csv, weak_lp_norm, write_csv, Grid, GridFunction, Weight,
};
use harmlab::maximal::{dyadic_maximal, hl_maximal, m_delta, sharp_maximal};
use harmlab::orlicz::{
    generalized_holder, luxemburg_norm, rao_ren_norm, ComplementaryPair, YoungFunction,
};
use harmlab::singular::{commutator, commutator_kernel_form, hilbert_kernel};
use harmlab::weights::{a1_constant, ap_constant};
use proptest::prelude::*;

const N: usize = 64;

fn grid() -> Grid {
    Grid::new(-1.0, 2.0 / N as f64, N).unwrap()
}

fn func(vals: Vec<f64>) -> GridFunction {
    GridFunction::new(grid(), vals).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, N)
}

fn positive_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..20.0, N)
}

/// Relative slack for sums reassociated by different evaluation orders.
fn slack(scale: f64) -> f64 {
    1e-11 * scale.max(1.0)
}

proptest! {
    #[test]
    fn maximal_dominates_pointwise_and_is_sublinear(a in values(), b in values(), c in 0.1f64..10.0) {
        let f = func(a);
        let g = func(b);
        let mf = hl_maximal(&f);
        let mg = hl_maximal(&g);
        let sum = hl_maximal(&f.zip(&g, |x, y| x + y).unwrap());
        let scaled = hl_maximal(&f.scale(c).unwrap());
        for i in 0..N {
            prop_assert!(mf.value(i) + slack(f.max_abs()) >= f.value(i).abs());
            prop_assert!(sum.value(i) <= mf.value(i) + mg.value(i) + slack(mf.value(i) + mg.value(i)));
            prop_assert!((scaled.value(i) - c * mf.value(i)).abs() <= slack(c * mf.value(i)));
        }
    }

    #[test]
    fn maximal_variants_are_ordered(a in values()) {
        let f = func(a);
        let mf = hl_maximal(&f);
        let md = dyadic_maximal(&f).unwrap();
        let m_half = m_delta(&f, 0.5).unwrap();
        let sharp = sharp_maximal(&f);
        for i in 0..N {
            let s = slack(mf.value(i));
            // Dyadic intervals are a subfamily of all intervals.
            prop_assert!(md.value(i) <= mf.value(i) + s);
            // Power means increase with the exponent.
            prop_assert!(m_half.value(i) <= mf.value(i) + s);
            // Oscillation around the mean is at most twice the mean of |f|.
            prop_assert!(sharp.value(i) <= 2.0 * mf.value(i) + s);
        }
    }

    #[test]
    fn weak_norm_sits_below_strong_norm(a in values(), wv in positive_values(), p in 1.0f64..4.0) {
        let f = func(a);
        let w = Weight::new(func(wv)).unwrap();
        let strong = lp_norm(&f, p, &w).unwrap();
        let weak = weak_lp_norm(&f, p, &w).unwrap();
        prop_assert!(weak <= strong + slack(strong));
    }

    #[test]
    fn distribution_function_is_nonincreasing(a in values(), wv in positive_values(), l1 in 0.01f64..5.0, step in 0.01f64..5.0) {
        let f = func(a);
        let w = Weight::new(func(wv)).unwrap();
        let d1 = distribution(&f, l1, &w).unwrap();
        let d2 = distribution(&f, l1 + step, &w).unwrap();
        prop_assert!(d2 <= d1);
    }

    #[test]
    fn ap_constants_decrease_in_p_below_a1(wv in positive_values()) {
        let w = Weight::new(func(wv)).unwrap();
        let a1 = a1_constant(&w);
        let mut prev = a1;
        for p in [1.5, 2.0, 3.0] {
            let ap = ap_constant(&w, p).unwrap();
            prop_assert!(ap >= 1.0 - 1e-12);
            prop_assert!(ap <= prev + slack(prev), "ap({p}) = {ap} above {prev}");
            prev = ap;
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(a in values()) {
        let f = func(a);
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.grid().cells(), N);
        prop_assert!((back.grid().origin() - grid().origin()).abs() < 1e-15);
        for i in 0..N {
            prop_assert_eq!(back.value(i).to_bits(), f.value(i).to_bits());
        }
    }

    #[test]
    fn cz_pieces_reassemble_and_respect_the_level(a in values(), mult in 1.1f64..8.0) {
        let f = func(a);
        let root_avg = integral(&f.abs()) / grid().measure();
        let lambda = root_avg * mult + 1e-9;
        let d = cz_decompose(&f, lambda).unwrap();
        let mask = d.omega_mask();
        let scale = f.max_abs().max(lambda);
        for (q, avg) in d.cubes.iter().zip(&d.averages) {
            prop_assert!(*avg > lambda && *avg <= 2.0 * lambda + slack(scale));
            prop_assert!(q.as_interval().cell_count() >= 1);
        }
        // good + sum of bad parts reproduces f; bad parts vanish off Omega
        // and have zero mean on their cubes.
        let mut rebuilt = d.good.values().to_vec();
        for part in &d.bad_parts {
            for (i, slot) in rebuilt.iter_mut().enumerate() {
                *slot += part.value(i);
            }
        }
        for i in 0..N {
            prop_assert!((rebuilt[i] - f.value(i)).abs() <= slack(scale));
            if !mask[i] {
                prop_assert!((d.good.value(i) - f.value(i)).abs() <= slack(scale));
            }
        }
        for part in &d.bad_parts {
            prop_assert!(integral(part).abs() <= slack(scale));
        }
    }

    #[test]
    fn commutator_formulas_agree(a in values(), bv in values()) {
        let f = func(a);
        let b = func(bv);
        let k = hilbert_kernel();
        let direct = commutator(&b, &k, &f).unwrap();
        let kernel_form = commutator_kernel_form(&b, &k, &f).unwrap();
        let scale = direct.max_abs().max(kernel_form.max_abs()).max(1.0);
        for i in 0..N {
            prop_assert!((direct.value(i) - kernel_form.value(i)).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn rao_ren_norm_sandwiches_luxemburg(a in values(), alpha in 0.5f64..2.5) {
        let f = func(a);
        let young = YoungFunction::llogl(alpha).unwrap();
        let q = grid().whole();
        let lux = luxemburg_norm(&f, &young, q).unwrap();
        let rr = rao_ren_norm(&f, &young, q).unwrap();
        prop_assert!(rr >= lux - 1e-9 * lux.max(1.0), "rr {rr} below lux {lux}");
        prop_assert!(rr <= 2.0 * lux + 1e-9 * lux.max(1.0), "rr {rr} above 2 lux {lux}");
    }

    #[test]
    fn generalized_holder_holds_for_both_pairings(a in values(), bv in values(), r in 1.2f64..3.0) {
        let f = func(a);
        let g = func(bv);
        let q = grid().whole();
        for pair in [ComplementaryPair::l_log_l_exp_l(), ComplementaryPair::powers(r).unwrap()] {
            let (lhs, rhs) = generalized_holder(&f, &g, &pair, q).unwrap();
            prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0), "{lhs} > {rhs}");
        }
    }

    #[test]
    fn kolmogorov_comparison_respects_the_classical_constant(a in values(), p in 0.3f64..0.95) {
        let f = func(a);
        let q = grid().whole();
        let (lhs, rhs) = kolmogorov_check(&f, q, p, 1.0).unwrap();
        let c = (1.0 / (1.0 - p)).powf(1.0 / p);
        prop_assert!(lhs <= c * rhs * (1.0 + 1e-9), "{lhs} > {c} * {rhs}");
    }
}

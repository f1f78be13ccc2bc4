//! The inequality registry and ratio-measurement engine. Every bound the
//! library knows about is an entry with two evaluators — the left side and
//! the right side's shape without its absolute constant — plus the parameter
//! axes it sweeps. The engine renders a family on a grid, evaluates both
//! sides at every sweep point, and reports the measured constants together
//! with growth-exponent fits.

use crate::conjugate;
use crate::error::{Error, Result};
use crate::family::ExtremalFamily;
use crate::grid::{
    distribution, lp_norm, weak_lp_norm, weighted_integral, Grid, GridFunction, Weight,
};
use crate::maximal::{
    dyadic_m_delta, hl_maximal, m_delta, m_r, m_squared, orlicz_maximal, sharp_maximal_delta,
    IntervalFamily,
};
use crate::orlicz::{phi, YoungFunction};
use crate::singular::{apply_kernel_operator, bmo_norm, commutator_kernel_form, KernelSpec};
use crate::weights::{a1_constant, ap_constant};
use std::collections::BTreeMap;
use std::fmt;

/// One point of a parameter sweep. Unset axes do not apply to the entry.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamPoint {
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub eps: Option<f64>,
    /// Threshold for weak-type entries, relative to `max |output|`.
    pub lambda_rel: Option<f64>,
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(p) = self.p {
            parts.push(format!("p={p}"));
        }
        if let Some(r) = self.r {
            parts.push(format!("r={r}"));
        }
        if let Some(e) = self.eps {
            parts.push(format!("eps={e}"));
        }
        if let Some(l) = self.lambda_rel {
            parts.push(format!("lam={l}"));
        }
        if parts.is_empty() {
            parts.push("-".into());
        }
        write!(f, "{}", parts.join(";"))
    }
}

/// Which axes an entry sweeps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Axes {
    pub p: bool,
    pub r: bool,
    pub eps: bool,
    pub lambda: bool,
}

/// Sweep values per axis.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub ps: Vec<f64>,
    pub rs: Vec<f64>,
    pub epss: Vec<f64>,
    pub lambda_rels: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            ps: vec![1.25, 1.5, 2.0, 3.0],
            rs: vec![1.1, 1.5, 2.0],
            epss: vec![0.5, 0.75],
            lambda_rels: vec![1.0, 0.5, 0.125, 0.03125, 0.0078125],
        }
    }
}

type Evaluator = fn(&mut EvalCache, ParamPoint) -> Result<f64>;

/// A registered inequality: identifier, human-readable statement of the
/// bound, sweep axes, and the two evaluators.
pub struct InequalitySpec {
    pub id: &'static str,
    pub statement: &'static str,
    pub axes: Axes,
    pub needs_symbol: bool,
    /// Declared stability ceiling for the measured constant.
    pub ceiling: f64,
    pub lhs: Evaluator,
    pub rhs_shape: Evaluator,
}

/// Per-instance memo of every derived object the evaluators share.
pub struct EvalCache {
    w: Weight,
    b: GridFunction,
    f: GridFunction,
    kernel: KernelSpec,
    a1: Option<f64>,
    bmo: Option<f64>,
    ap: BTreeMap<u64, f64>,
    mf: Option<GridFunction>,
    m2f: Option<GridFunction>,
    mw: Option<Weight>,
    tf: Option<GridFunction>,
    cf: Option<GridFunction>,
    mrw: BTreeMap<u64, Weight>,
    m_delta_tf: BTreeMap<u64, GridFunction>,
    sharp_delta_cf: BTreeMap<u64, GridFunction>,
    sharp_delta_tf: BTreeMap<u64, GridFunction>,
    dyadic_sharp_f: BTreeMap<u64, GridFunction>,
    dyadic_m_delta_f: BTreeMap<u64, GridFunction>,
    orlicz_w: BTreeMap<u64, Weight>,
}

fn key(x: f64) -> u64 {
    x.to_bits()
}

impl EvalCache {
    pub fn new(w: &Weight, b: &GridFunction, f: &GridFunction, kernel: &KernelSpec) -> Self {
        Self {
            w: w.clone(),
            b: b.clone(),
            f: f.clone(),
            kernel: *kernel,
            a1: None,
            bmo: None,
            ap: BTreeMap::new(),
            mf: None,
            m2f: None,
            mw: None,
            tf: None,
            cf: None,
            mrw: BTreeMap::new(),
            m_delta_tf: BTreeMap::new(),
            sharp_delta_cf: BTreeMap::new(),
            sharp_delta_tf: BTreeMap::new(),
            dyadic_sharp_f: BTreeMap::new(),
            dyadic_m_delta_f: BTreeMap::new(),
            orlicz_w: BTreeMap::new(),
        }
    }

    pub fn weight(&self) -> &Weight {
        &self.w
    }

    pub fn density(&self) -> &GridFunction {
        &self.f
    }

    pub fn a1(&mut self) -> f64 {
        if self.a1.is_none() {
            self.a1 = Some(a1_constant(&self.w));
        }
        self.a1.unwrap()
    }

    pub fn bmo(&mut self) -> f64 {
        if self.bmo.is_none() {
            self.bmo = Some(bmo_norm(&self.b));
        }
        self.bmo.unwrap()
    }

    pub fn ap(&mut self, p: f64) -> Result<f64> {
        if let Some(&v) = self.ap.get(&key(p)) {
            return Ok(v);
        }
        let v = ap_constant(&self.w, p)?;
        self.ap.insert(key(p), v);
        Ok(v)
    }

    pub fn mf(&mut self) -> GridFunction {
        if self.mf.is_none() {
            self.mf = Some(hl_maximal(&self.f));
        }
        self.mf.clone().unwrap()
    }

    pub fn m2f(&mut self) -> GridFunction {
        if self.m2f.is_none() {
            self.m2f = Some(m_squared(&self.f));
        }
        self.m2f.clone().unwrap()
    }

    pub fn mw(&mut self) -> Result<Weight> {
        if self.mw.is_none() {
            self.mw = Some(Weight::new(hl_maximal(self.w.as_fn()))?);
        }
        Ok(self.mw.clone().unwrap())
    }

    pub fn tf(&mut self) -> GridFunction {
        if self.tf.is_none() {
            self.tf = Some(apply_kernel_operator(&self.kernel, &self.f));
        }
        self.tf.clone().unwrap()
    }

    /// The commutator through its kernel form, so a constant symbol yields
    /// an exact zero.
    pub fn cf(&mut self) -> Result<GridFunction> {
        if self.cf.is_none() {
            self.cf = Some(commutator_kernel_form(&self.b, &self.kernel, &self.f)?);
        }
        Ok(self.cf.clone().unwrap())
    }

    pub fn mrw(&mut self, r: f64) -> Result<Weight> {
        if let Some(v) = self.mrw.get(&key(r)) {
            return Ok(v.clone());
        }
        let v = m_r(&self.w, r)?;
        self.mrw.insert(key(r), v.clone());
        Ok(v)
    }

    pub fn m_delta_tf(&mut self, eps: f64) -> Result<GridFunction> {
        if let Some(v) = self.m_delta_tf.get(&key(eps)) {
            return Ok(v.clone());
        }
        let t = self.tf();
        let v = m_delta(&t, eps)?;
        self.m_delta_tf.insert(key(eps), v.clone());
        Ok(v)
    }

    pub fn sharp_delta_cf(&mut self, delta: f64) -> Result<GridFunction> {
        if let Some(v) = self.sharp_delta_cf.get(&key(delta)) {
            return Ok(v.clone());
        }
        let c = self.cf()?;
        let v = sharp_maximal_delta(&c, delta, IntervalFamily::All)?;
        self.sharp_delta_cf.insert(key(delta), v.clone());
        Ok(v)
    }

    pub fn sharp_delta_tf(&mut self, eps: f64) -> Result<GridFunction> {
        if let Some(v) = self.sharp_delta_tf.get(&key(eps)) {
            return Ok(v.clone());
        }
        let t = self.tf();
        let v = sharp_maximal_delta(&t, eps, IntervalFamily::All)?;
        self.sharp_delta_tf.insert(key(eps), v.clone());
        Ok(v)
    }

    pub fn dyadic_sharp_f(&mut self, delta: f64) -> Result<GridFunction> {
        if let Some(v) = self.dyadic_sharp_f.get(&key(delta)) {
            return Ok(v.clone());
        }
        let v = sharp_maximal_delta(&self.f, delta, IntervalFamily::Dyadic)?;
        self.dyadic_sharp_f.insert(key(delta), v.clone());
        Ok(v)
    }

    pub fn dyadic_m_delta_f(&mut self, eps: f64) -> Result<GridFunction> {
        if let Some(v) = self.dyadic_m_delta_f.get(&key(eps)) {
            return Ok(v.clone());
        }
        let v = dyadic_m_delta(&self.f, eps)?;
        self.dyadic_m_delta_f.insert(key(eps), v.clone());
        Ok(v)
    }

    pub fn orlicz_w(&mut self, alpha: f64) -> Result<Weight> {
        if let Some(v) = self.orlicz_w.get(&key(alpha)) {
            return Ok(v.clone());
        }
        let young = YoungFunction::llogl(alpha)?;
        let v = Weight::new(orlicz_maximal(self.w.as_fn(), &young)?)?;
        self.orlicz_w.insert(key(alpha), v.clone());
        Ok(v)
    }

    /// Resolve a relative threshold against the commutator's sup; a vanishing
    /// commutator gets a harmless positive level.
    fn lambda_for(&mut self, pt: ParamPoint) -> Result<f64> {
        let scale = self.cf()?.max_abs();
        let rel = pt.lambda_rel.expect("lambda axis set");
        Ok(if scale > 0.0 { rel * scale } else { 1.0 })
    }
}

fn need_p(pt: ParamPoint) -> f64 {
    pt.p.expect("p axis set")
}

fn need_r(pt: ParamPoint) -> f64 {
    pt.r.expect("r axis set")
}

/// `mean of phi(|f|/lambda)` against the weight, integrated.
fn phi_integral(f: &GridFunction, lambda: f64, w: &Weight) -> Result<f64> {
    weighted_integral(&f.map(|v| phi(v.abs() / lambda))?, w)
}

/// Largest cellwise quotient `num_i / den_i`; cells where both vanish are
/// skipped, a positive numerator over a vanishing denominator is infinite.
fn sup_quotient(num: &GridFunction, den: &GridFunction) -> f64 {
    let mut worst = 0.0f64;
    for (n, d) in num.values().iter().zip(den.values()) {
        if *d > 0.0 {
            worst = worst.max(n / d);
        } else if *n > 0.0 {
            return f64::INFINITY;
        }
    }
    worst
}

const DELTA: f64 = 0.5;
const EPS: f64 = 0.75;
const LLOGL_EXTRA: f64 = 1.0;

pub static REGISTRY: &[InequalitySpec] = &[
    InequalitySpec {
        id: "FS-weak",
        statement: "||Mf||_{L^{1,inf}(w)} <= c int |f| Mw dx",
        axes: Axes {
            p: false,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, _| weak_lp_norm(&c.mf(), 1.0, c.weight()),
        rhs_shape: |c, _| {
            let mw = c.mw()?;
            weighted_integral(&c.density().abs(), &mw)
        },
    },
    InequalitySpec {
        id: "FS-strong",
        statement: "||Mf||_{L^p(w)} <= c p' ||f||_{L^p(Mw)}",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, pt| lp_norm(&c.mf(), need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            let mw = c.mw()?;
            Ok(conjugate(p)? * lp_norm(c.density(), p, &mw)?)
        },
    },
    InequalitySpec {
        id: "Buckley",
        statement: "||Mf||_{L^p(w)} <= c p' [w]_{A_p}^{1/(p-1)} ||f||_{L^p(w)}",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, pt| lp_norm(&c.mf(), need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            let ap = c.ap(p)?;
            Ok(conjugate(p)? * ap.powf(1.0 / (p - 1.0)) * lp_norm(c.density(), p, c.weight())?)
        },
    },
    InequalitySpec {
        id: "T-linear",
        statement: "||Tf||_{L^p(w)} <= c p p' [w]_{A_1} ||f||_{L^p(w)}",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, pt| lp_norm(&c.tf(), need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            Ok(p * conjugate(p)? * c.a1() * lp_norm(c.density(), p, c.weight())?)
        },
    },
    InequalitySpec {
        id: "T-endpoint",
        statement: "||Tf||_{L^{1,inf}(w)} <= c Phi([w]_{A_1}) ||f||_{L^1(w)}",
        axes: Axes {
            p: false,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, _| weak_lp_norm(&c.tf(), 1.0, c.weight()),
        rhs_shape: |c, _| Ok(phi(c.a1()) * lp_norm(c.density(), 1.0, c.weight())?),
    },
    InequalitySpec {
        id: "T-two-weight",
        statement: "||Tf||_{L^p(w)} <= c p' (r')^{1/p'} ||f||_{L^p(M_r w)}",
        axes: Axes {
            p: true,
            r: true,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, pt| lp_norm(&c.tf(), need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let pp = conjugate(p)?;
            let mrw = c.mrw(r)?;
            Ok(pp * conjugate(r)?.powf(1.0 / pp) * lp_norm(c.density(), p, &mrw)?)
        },
    },
    InequalitySpec {
        id: "T-weak-param",
        statement: "||Tf||_{L^{1,inf}(w)} <= c (p')^p (r')^{p-1} int |f| M_r w dx",
        axes: Axes {
            p: true,
            r: true,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, _| weak_lp_norm(&c.tf(), 1.0, c.weight()),
        rhs_shape: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let mrw = c.mrw(r)?;
            Ok(conjugate(p)?.powf(p)
                * conjugate(r)?.powf(p - 1.0)
                * weighted_integral(&c.density().abs(), &mrw)?)
        },
    },
    InequalitySpec {
        id: "M-two-weight",
        statement: "||Mf||_{L^p((M_r w)^{1-p})} <= c p' (r')^{1/p} ||f||_{L^p(w^{1-p})}",
        axes: Axes {
            p: true,
            r: true,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let dual = c.mrw(r)?.powf(1.0 - p)?;
            lp_norm(&c.mf(), p, &dual)
        },
        rhs_shape: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let dual = c.weight().powf(1.0 - p)?;
            Ok(conjugate(p)? * conjugate(r)?.powf(1.0 / p) * lp_norm(c.density(), p, &dual)?)
        },
    },
    InequalitySpec {
        id: "M2-two-weight",
        statement: "||M^2 f||_{L^p((M_r w)^{1-p})} <= c (p')^2 (r')^{1+1/p} ||f||_{L^p(w^{1-p})}",
        axes: Axes {
            p: true,
            r: true,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 8.0,
        lhs: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let dual = c.mrw(r)?.powf(1.0 - p)?;
            lp_norm(&c.m2f(), p, &dual)
        },
        rhs_shape: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let dual = c.weight().powf(1.0 - p)?;
            Ok(conjugate(p)?.powi(2)
                * conjugate(r)?.powf(1.0 + 1.0 / p)
                * lp_norm(c.density(), p, &dual)?)
        },
    },
    InequalitySpec {
        id: "Msharp-control",
        statement: "M#_eps(Tf) <= c_eps Mf pointwise",
        axes: Axes {
            p: false,
            r: false,
            eps: true,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 4.0,
        lhs: |c, pt| {
            let eps = pt.eps.expect("eps axis set");
            let num = c.sharp_delta_tf(eps)?;
            Ok(sup_quotient(&num, &c.mf()))
        },
        rhs_shape: |_, _| Ok(1.0),
    },
    InequalitySpec {
        id: "Lerner-sharp",
        statement: "||f||_{L^p(w)} <= c p [w]_{A_1} ||M^{#,d}_delta f||_{L^p(w)}",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        // On a compact grid near-constant densities are admissible and keep
        // the dyadic sharp norm small, so the constant here is the largest
        // of the registry; the family supremum still refines stably.
        ceiling: 40.0,
        lhs: |c, pt| lp_norm(&c.density().clone(), need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            let sharp = c.dyadic_sharp_f(DELTA)?;
            Ok(p * c.a1() * lp_norm(&sharp, p, c.weight())?)
        },
    },
    InequalitySpec {
        id: "Meps-sharp",
        statement: "||M^d_eps f||_{L^p(w)} <= c p [w]_{A_1} ||M^{#,d}_eps f||_{L^p(w)}",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: false,
        ceiling: 16.0,
        lhs: |c, pt| {
            let m = c.dyadic_m_delta_f(EPS)?;
            lp_norm(&m, need_p(pt), c.weight())
        },
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            let sharp = c.dyadic_sharp_f(EPS)?;
            Ok(p * c.a1() * lp_norm(&sharp, p, c.weight())?)
        },
    },
    InequalitySpec {
        id: "Comm-pointwise",
        statement: "M#_delta([b,T]f) <= c ||b||_* (M_eps(Tf) + M^2 f) pointwise",
        axes: Axes {
            p: false,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: true,
        ceiling: 16.0,
        lhs: |c, _| {
            let num = c.sharp_delta_cf(DELTA)?;
            let meps = c.m_delta_tf(EPS)?;
            let bmo = c.bmo();
            let den = meps.zip(&c.m2f(), |a, b| bmo * (a + b))?;
            Ok(sup_quotient(&num, &den))
        },
        rhs_shape: |_, _| Ok(1.0),
    },
    InequalitySpec {
        id: "Comm-CF",
        statement: "int |[b,T]f|^p w <= c int (M^2 f)^p w",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: true,
        ceiling: 64.0,
        lhs: |c, pt| {
            let p = need_p(pt);
            Ok(lp_norm(&c.cf()?, p, c.weight())?.powf(p))
        },
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            Ok(lp_norm(&c.m2f(), p, c.weight())?.powf(p))
        },
    },
    InequalitySpec {
        id: "Comm-strong-2w",
        statement: "||[b,T]f||_{L^p(w)} <= c ||b||_* (pp')^2 (r')^{1+1/p'} ||f||_{L^p(M_r w)}",
        axes: Axes {
            p: true,
            r: true,
            eps: false,
            lambda: false,
        },
        needs_symbol: true,
        ceiling: 4.0,
        lhs: |c, pt| lp_norm(&c.cf()?, need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let (p, r) = (need_p(pt), need_r(pt));
            let pp = conjugate(p)?;
            let mrw = c.mrw(r)?;
            Ok(c.bmo()
                * (p * pp).powi(2)
                * conjugate(r)?.powf(1.0 + 1.0 / pp)
                * lp_norm(c.density(), p, &mrw)?)
        },
    },
    InequalitySpec {
        id: "Comm-strong-A1",
        statement: "||[b,T]f||_{L^p(w)} <= c ||b||_* (pp')^2 [w]_{A_1}^2 ||f||_{L^p(w)}",
        axes: Axes {
            p: true,
            r: false,
            eps: false,
            lambda: false,
        },
        needs_symbol: true,
        ceiling: 4.0,
        lhs: |c, pt| lp_norm(&c.cf()?, need_p(pt), c.weight()),
        rhs_shape: |c, pt| {
            let p = need_p(pt);
            Ok(c.bmo()
                * (p * conjugate(p)?).powi(2)
                * c.a1().powi(2)
                * lp_norm(c.density(), p, c.weight())?)
        },
    },
    InequalitySpec {
        id: "Comm-weak-endpoint",
        statement: "w({|[b,T]f| > lam}) <= c Phi([w]_{A_1})^2 int phi(|f|/lam) w dx",
        axes: Axes {
            p: false,
            r: false,
            eps: false,
            lambda: true,
        },
        needs_symbol: true,
        ceiling: 4.0,
        lhs: |c, pt| {
            let lam = c.lambda_for(pt)?;
            distribution(&c.cf()?, lam, c.weight())
        },
        rhs_shape: |c, pt| {
            let lam = c.lambda_for(pt)?;
            Ok(phi(c.a1()).powi(2) * phi_integral(c.density(), lam, c.weight())?)
        },
    },
    InequalitySpec {
        id: "Comm-weak-LlogL",
        statement: "w({|[b,T]f| > lam}) <= c Phi(||b||_*) int phi(|f|/lam) M_{L(logL)^2} w dx",
        axes: Axes {
            p: false,
            r: false,
            eps: false,
            lambda: true,
        },
        needs_symbol: true,
        ceiling: 4.0,
        lhs: |c, pt| {
            let lam = c.lambda_for(pt)?;
            distribution(&c.cf()?, lam, c.weight())
        },
        rhs_shape: |c, pt| {
            let lam = c.lambda_for(pt)?;
            let mw = c.orlicz_w(1.0 + LLOGL_EXTRA)?;
            Ok(phi(c.bmo()) * phi_integral(c.density(), lam, &mw)?)
        },
    },
];

/// All registered identifiers, registry order.
pub fn registry_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.id).collect()
}

pub fn find_spec(id: &str) -> Result<&'static InequalitySpec> {
    REGISTRY
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownSpec(id.to_string()))
}

/// One evaluated sweep point.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub spec_id: String,
    pub param_point: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Fitted power-law growth of one quantity against one parameter.
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    pub exponent: f64,
    pub r_squared: f64,
    /// Set when the parameter did not vary enough to support a fit.
    pub degenerate: bool,
}

/// Outcome of measuring one registry entry over one family.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub id: String,
    pub trials: usize,
    pub max_ratio: f64,
    pub ratio_quantiles: Vec<(f64, f64)>,
    pub fitted_exponents: Vec<(String, GrowthFit)>,
    pub pass: bool,
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("spec_id,param_point,lhs,rhs,ratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e}\n",
                row.spec_id, row.param_point, row.lhs, row.rhs, row.ratio
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("spec_id: {}\n", self.id));
        out.push_str(&format!("trials: {}\n", self.trials));
        out.push_str(&format!("rows: {}\n", self.rows.len()));
        out.push_str(&format!("max_ratio: {:.6e}\n", self.max_ratio));
        for (q, v) in &self.ratio_quantiles {
            out.push_str(&format!("ratio_q{}: {v:.6e}\n", q * 100.0));
        }
        for (name, fit) in &self.fitted_exponents {
            out.push_str(&format!(
                "fit_{name}: exponent={:.4} r2={:.4} degenerate={}\n",
                fit.exponent, fit.r_squared, fit.degenerate
            ));
        }
        out.push_str(&format!("pass: {}\n", self.pass));
        out
    }
}

fn sweep_points(axes: Axes, sweep: &Sweep) -> Vec<ParamPoint> {
    let ps: Vec<Option<f64>> = if axes.p {
        sweep.ps.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let rs: Vec<Option<f64>> = if axes.r {
        sweep.rs.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let es: Vec<Option<f64>> = if axes.eps {
        sweep.epss.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let ls: Vec<Option<f64>> = if axes.lambda {
        sweep.lambda_rels.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for &p in &ps {
        for &r in &rs {
            for &eps in &es {
                for &lambda_rel in &ls {
                    out.push(ParamPoint {
                        p,
                        r,
                        eps,
                        lambda_rel,
                    });
                }
            }
        }
    }
    out
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

fn quantiles(sorted: &[f64]) -> Vec<(f64, f64)> {
    if sorted.is_empty() {
        return Vec::new();
    }
    [0.5, 0.9, 0.99, 1.0]
        .iter()
        .map(|&q| {
            let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
            (q, sorted[idx])
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`. Nonpositive pairs are
/// dropped; a parameter with no spread yields a degenerate zero fit.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<GrowthFit> {
    if points.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: points.len(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: logs.len(),
        });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let syy: f64 = logs.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx < 1e-18 {
        return Ok(GrowthFit {
            exponent: 0.0,
            r_squared: 0.0,
            degenerate: true,
        });
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy <= 1e-18 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(GrowthFit {
        exponent: slope,
        r_squared,
        degenerate: false,
    })
}

/// Evaluate one registry entry over every family member at every sweep
/// point applicable to the entry.
pub fn run_verification(
    spec_id: &str,
    family: &ExtremalFamily,
    grid: &Grid,
    kernel: &KernelSpec,
    sweep: &Sweep,
) -> Result<VerificationReport> {
    let entry = find_spec(spec_id)?;
    if entry.needs_symbol && !family.provides_symbol() {
        return Err(Error::ArityMismatch {
            family: family.name().to_string(),
            spec: entry.id.to_string(),
        });
    }
    let points = sweep_points(entry.axes, sweep);
    let instances = family.instances(grid)?;
    let mut rows = Vec::new();
    let mut per_instance_max: Vec<(f64, f64)> = Vec::new();
    let mut per_p_max: BTreeMap<u64, f64> = BTreeMap::new();
    for inst in &instances {
        let mut cache = EvalCache::new(&inst.weight, &inst.symbol, &inst.density, kernel);
        let mut inst_max = 0.0f64;
        for &pt in &points {
            let lhs = (entry.lhs)(&mut cache, pt)?;
            let rhs = (entry.rhs_shape)(&mut cache, pt)?;
            let ratio = ratio_of(lhs, rhs);
            inst_max = inst_max.max(ratio);
            if let Some(p) = pt.p {
                let slot = per_p_max.entry(key(p)).or_insert(0.0);
                *slot = slot.max(ratio);
            }
            rows.push(ReportRow {
                spec_id: entry.id.to_string(),
                param_point: pt.to_string(),
                lhs,
                rhs,
                ratio,
            });
        }
        per_instance_max.push((cache.a1(), inst_max));
    }
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let max_ratio = ratios.last().copied().unwrap_or(0.0);

    let mut fitted = Vec::new();
    let p_points: Vec<(f64, f64)> = per_p_max
        .iter()
        .map(|(&bits, &v)| (f64::from_bits(bits), v))
        .collect();
    if let Ok(fit) = fit_loglog(&p_points) {
        fitted.push(("p".to_string(), fit));
    }
    if let Ok(fit) = fit_loglog(&per_instance_max) {
        fitted.push(("a1".to_string(), fit));
    }

    Ok(VerificationReport {
        id: entry.id.to_string(),
        trials: instances.len(),
        max_ratio,
        ratio_quantiles: quantiles(&ratios),
        fitted_exponents: fitted,
        pass: max_ratio.is_finite() && max_ratio < entry.ceiling,
        rows,
    })
}

/// Run several entries over the same family and sweep.
pub fn run_suite(
    spec_ids: &[&str],
    family: &ExtremalFamily,
    grid: &Grid,
    kernel: &KernelSpec,
    sweep: &Sweep,
) -> Result<Vec<VerificationReport>> {
    spec_ids
        .iter()
        .map(|id| run_verification(id, family, grid, kernel, sweep))
        .collect()
}

/// Which parameter a growth fit tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthParameter {
    A1,
    P,
}

/// Exponents probed when fitting growth in `p` near `p = 1`.
pub const P_PROBE: [f64; 4] = [1.05, 1.1, 1.2, 1.5];

/// Lebesgue exponent used for the strong-norm ratios in the weight-constant
/// fits. Taking p near 1 minimizes the 1/p root that compresses the
/// measured growth.
pub const A1_PROBE_P: f64 = 1.05;

/// Thresholds swept when a raw weak quantity needs a sup over levels with a
/// nonlinear right side: quarter-octave steps down from the output's sup.
fn lambda_ladder(scale: f64) -> Vec<f64> {
    (0..40)
        .map(|i| scale * 2f64.powf(-(i as f64) * 0.25))
        .collect()
}

/// Sup over thresholds of `w({|g| > lam}) / int phi(|f|/lam) w` — the raw
/// distributional quantity behind the endpoint commutator bound.
fn weak_phi_quotient(g: &GridFunction, f: &GridFunction, w: &Weight) -> Result<f64> {
    let scale = g.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for lam in lambda_ladder(scale) {
        let lhs = distribution(g, lam, w)?;
        let rhs = phi_integral(f, lam, w)?;
        worst = worst.max(ratio_of(lhs, rhs));
    }
    Ok(worst)
}

/// The raw operator quantity whose growth the sharpness probes fit: a norm
/// ratio stripped of every parameter factor on the bound's right side.
/// Weak-type entries use their distributional form, strong entries the
/// L^p ratio at the probe exponent.
fn raw_growth(id: &str, cache: &mut EvalCache, p: f64) -> Result<f64> {
    let w = cache.weight().clone();
    let f = cache.density().clone();
    if id.starts_with("Comm-weak") {
        let cf = cache.cf()?;
        return weak_phi_quotient(&cf, &f, &w);
    }
    if id.starts_with("Comm") {
        let cf = cache.cf()?;
        return Ok(ratio_of(lp_norm(&cf, p, &w)?, lp_norm(&f, p, &w)?));
    }
    if id == "T-endpoint" || id == "T-weak-param" {
        let tf = cache.tf();
        return Ok(ratio_of(weak_lp_norm(&tf, 1.0, &w)?, lp_norm(&f, 1.0, &w)?));
    }
    if id.starts_with("T-") {
        let tf = cache.tf();
        return Ok(ratio_of(lp_norm(&tf, p, &w)?, lp_norm(&f, p, &w)?));
    }
    if id == "FS-weak" {
        let mf = cache.mf();
        return Ok(ratio_of(weak_lp_norm(&mf, 1.0, &w)?, lp_norm(&f, 1.0, &w)?));
    }
    if id == "M2-two-weight" {
        let m2 = cache.m2f();
        return Ok(ratio_of(lp_norm(&m2, p, &w)?, lp_norm(&f, p, &w)?));
    }
    let mf = cache.mf();
    Ok(ratio_of(lp_norm(&mf, p, &w)?, lp_norm(&f, p, &w)?))
}

/// Fit the growth of an entry's raw operator quantity against the weight
/// constant (one point per family member, `p = 2`) or against `p` near 1
/// (maximum over members per probed `p`).
pub fn fit_growth_exponent(
    spec_id: &str,
    family: &ExtremalFamily,
    grid: &Grid,
    kernel: &KernelSpec,
    parameter: GrowthParameter,
) -> Result<GrowthFit> {
    let entry = find_spec(spec_id)?;
    if entry.needs_symbol && !family.provides_symbol() {
        return Err(Error::ArityMismatch {
            family: family.name().to_string(),
            spec: entry.id.to_string(),
        });
    }
    let instances = family.instances(grid)?;
    let points: Vec<(f64, f64)> = match parameter {
        GrowthParameter::A1 => instances
            .iter()
            .map(|inst| {
                let mut cache = EvalCache::new(&inst.weight, &inst.symbol, &inst.density, kernel);
                Ok((cache.a1(), raw_growth(entry.id, &mut cache, A1_PROBE_P)?))
            })
            .collect::<Result<_>>()?,
        GrowthParameter::P => {
            let mut caches: Vec<EvalCache> = instances
                .iter()
                .map(|inst| EvalCache::new(&inst.weight, &inst.symbol, &inst.density, kernel))
                .collect();
            P_PROBE
                .iter()
                .map(|&p| {
                    let mut worst = 0.0f64;
                    for cache in &mut caches {
                        worst = worst.max(raw_growth(entry.id, cache, p)?);
                    }
                    Ok((p, worst))
                })
                .collect::<Result<_>>()?
        }
    };
    fit_loglog(&points)
}

/// Pre-registered acceptance bands for the fitted weight-constant exponents
/// of the blow-up family at 4096 cells (see `sharpness_family`). The strong
/// bands carry the 1/p-root compression of the L^p ratio; the weak
/// (distributional) bands do not and sit at the theorems' nominal growth:
/// linear for the operator, quadratic for its commutator.
pub const OPERATOR_STRONG_BAND: (f64, f64) = (0.45, 0.70);
pub const COMMUTATOR_STRONG_BAND: (f64, f64) = (1.05, 1.40);
pub const OPERATOR_WEAK_BAND: (f64, f64) = (0.80, 1.20);
pub const COMMUTATOR_WEAK_BAND: (f64, f64) = (1.50, 2.10);
/// Minimum gap between the commutator exponent and the operator exponent on
/// the same sweep.
pub const SCAN_SEPARATION_MIN: f64 = 0.5;

/// One swept member of a growth scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub delta: f64,
    pub a1: f64,
    pub p: f64,
    pub lhs_norm_ratio: f64,
}

/// A growth scan: the raw quantity of one registry entry measured across an
/// extremal family, with its fitted weight-constant exponent.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub id: String,
    pub rows: Vec<ScanRow>,
    pub fit: GrowthFit,
}

impl ScanReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("delta,a1,p,lhs_norm_ratio,fitted_exponent\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                row.delta, row.a1, row.p, row.lhs_norm_ratio, self.fit.exponent
            ));
        }
        out
    }
}

/// Measure one entry's raw quantity on every member of a parameterized
/// family and fit its growth against the measured weight constant.
pub fn sharpness_scan(
    spec_id: &str,
    family: &ExtremalFamily,
    grid: &Grid,
    kernel: &KernelSpec,
) -> Result<ScanReport> {
    let entry = find_spec(spec_id)?;
    if entry.needs_symbol && !family.provides_symbol() {
        return Err(Error::ArityMismatch {
            family: family.name().to_string(),
            spec: entry.id.to_string(),
        });
    }
    let weak = entry.id.starts_with("Comm-weak")
        || entry.id == "T-endpoint"
        || entry.id == "T-weak-param"
        || entry.id == "FS-weak";
    let p = if weak { 1.0 } else { A1_PROBE_P };
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for inst in family.instances(grid)? {
        let mut cache = EvalCache::new(&inst.weight, &inst.symbol, &inst.density, kernel);
        let a1 = cache.a1();
        let ratio = raw_growth(entry.id, &mut cache, A1_PROBE_P)?;
        points.push((a1, ratio));
        rows.push(ScanRow {
            delta: inst.parameter,
            a1,
            p,
            lhs_norm_ratio: ratio,
        });
    }
    Ok(ScanReport {
        id: entry.id.to_string(),
        rows,
        fit: fit_loglog(&points)?,
    })
}

/// Endpoint distribution comparison for one (symbol, density, weight)
/// triple over an explicit list of absolute thresholds.
pub fn weak_endpoint_check(
    b: &GridFunction,
    f: &GridFunction,
    w: &Weight,
    kernel: &KernelSpec,
    lambdas: &[f64],
) -> Result<VerificationReport> {
    if lambdas.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut cache = EvalCache::new(w, b, f, kernel);
    let a1 = cache.a1();
    let cf = cache.cf()?;
    let mut rows = Vec::new();
    for &lam in lambdas {
        if !(lam > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lam,
                requirement: "a positive threshold",
            });
        }
        let lhs = distribution(&cf, lam, w)?;
        let rhs = phi(a1).powi(2) * phi_integral(f, lam, w)?;
        rows.push(ReportRow {
            spec_id: "Comm-weak-endpoint".into(),
            param_point: format!("lam={lam}"),
            lhs,
            rhs,
            ratio: ratio_of(lhs, rhs),
        });
    }
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let max_ratio = ratios.last().copied().unwrap_or(0.0);
    Ok(VerificationReport {
        id: "Comm-weak-endpoint".into(),
        trials: 1,
        max_ratio,
        ratio_quantiles: quantiles(&ratios),
        fitted_exponents: Vec::new(),
        pass: max_ratio.is_finite(),
        rows,
    })
}

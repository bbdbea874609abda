//! Fuzzy 2d de Sitter hyperboloid.
//!
//! Chart: `x⁰ = rτ`, `x¹ = rτ cosθ − H⁻¹ sinθ`, `x² = rτ sinθ + H⁻¹ cosθ` on
//! the one-sheeted hyperboloid `(x⁰)² − (x¹)² − (x²)² = −H⁻²`, measure
//! `μ(dx) = dτ dθ / 2π`, and the orthonormal family
//! `φ_m = (ε/π)^{1/4} e^{−ε(τ−m)²/2} e^{imθ}`, `m ∈ [−M, M]`.
//!
//! With `p_m = m + 1/2 + iρ` and `a = r e^{−ε/4}/2` the quantized coordinates
//! are
//!
//! ```text
//! x̂⁰ = r Σ m |m⟩⟨m|
//! x̂¹ = a Σ ( p_m |m+1⟩⟨m| + h.c. )
//! x̂² = (a/i) Σ ( p_m |m+1⟩⟨m| − h.c. )
//! ```
//!
//! and on the interior of the label window
//! `[x̂⁰,x̂¹] = i r x̂²`, `[x̂⁰,x̂²] = −i r x̂¹`, `[x̂¹,x̂²] = −i r e^{−ε/2} x̂⁰`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cs::{self, Angles, BasisSet, CsError, Dependence, Observable, Point};
use crate::expr::{Expr, ExprError};
use crate::numerics::{
    periodic_trapezoid, tau_window_grid, ComplexMatrix, Density, NumericsError, ProductGrid,
    DEFAULT_NODES_PER_UNIT,
};

/// Interior margin used for all commutator checks.
pub const COMMUTATOR_MARGIN: usize = 2;

/// Smallest truncation accepted by [`verify_commutators`].
pub const MIN_VERIFY_TRUNCATION: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Ds2Error {
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },
    #[error("truncation M = {0} is too small; need M >= {MIN_VERIFY_TRUNCATION}")]
    TruncationTooSmall(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Cs(#[from] CsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Sign of the fuzzy time operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeConvention {
    /// `x̂⁰ = +r·diag(m)`, the direct quantization of `x⁰ = rτ`.
    #[default]
    CsQuantized,
    /// `x̂⁰ = −r M₁₂ = −r·diag(m)`, the group-generator correspondence.
    GroupGenerator,
}

impl TimeConvention {
    pub fn sign(self) -> f64 {
        match self {
            TimeConvention::CsQuantized => 1.0,
            TimeConvention::GroupGenerator => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ds2Params {
    r: f64,
    rho: f64,
    epsilon: f64,
    truncation: usize,
    convention: TimeConvention,
}

impl Ds2Params {
    pub fn new(r: f64, rho: f64, epsilon: f64, truncation: usize) -> Result<Self, Ds2Error> {
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Ds2Error::InvalidParameter {
                    field,
                    message: format!("must be a positive finite number, got {v}"),
                })
            }
        };
        positive("r", r)?;
        positive("rho", rho)?;
        positive("epsilon", epsilon)?;
        Ok(Self {
            r,
            rho,
            epsilon,
            truncation,
            convention: TimeConvention::default(),
        })
    }

    /// Parameters on the classical-limit path: `ρ = H⁻¹ / r`.
    pub fn on_limit_path(h_inv: f64, r: f64, epsilon: f64, truncation: usize) -> Result<Self, Ds2Error> {
        if !(h_inv > 0.0 && h_inv.is_finite()) {
            return Err(Ds2Error::InvalidParameter {
                field: "Hinv",
                message: format!("must be a positive finite number, got {h_inv}"),
            });
        }
        Self::new(r, h_inv / r, epsilon, truncation)
    }

    pub fn with_convention(mut self, convention: TimeConvention) -> Self {
        self.convention = convention;
        self
    }

    /// `r = 0.5, ρ = 2, ε = 0.1, M = 20`.
    pub fn reference() -> Self {
        Self::new(0.5, 2.0, 0.1, 20).unwrap()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `M`: labels run over `[−M, M]`.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn convention(&self) -> TimeConvention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        2 * self.truncation + 1
    }

    pub fn label_offset(&self) -> i64 {
        -(self.truncation as i64)
    }

    /// `H⁻¹ = rρ`.
    pub fn h_inv(&self) -> f64 {
        self.r * self.rho
    }

    /// Principal-series label `j = −1/2 + iρ`.
    pub fn j(&self) -> Complex64 {
        Complex64::new(-0.5, self.rho)
    }

    /// `ρ² + 1/4 = −j(j+1)`.
    pub fn casimir_eigenvalue(&self) -> f64 {
        self.rho * self.rho + 0.25
    }

    /// `p_m = m + 1/2 + iρ`.
    pub fn p(&self, m: i64) -> Complex64 {
        Complex64::new(m as f64 + 0.5, self.rho)
    }

    /// Default quadrature: τ window with 20 nodes per unit, `4M + 5` angles.
    pub fn default_grid(&self) -> Result<ProductGrid, Ds2Error> {
        self.grid(GridOptions::default())
    }

    pub fn grid(&self, opts: GridOptions) -> Result<ProductGrid, Ds2Error> {
        let nodes = opts.nodes_per_unit.unwrap_or(DEFAULT_NODES_PER_UNIT);
        let theta = opts.theta_count.unwrap_or(4 * self.truncation + 5);
        Ok(ProductGrid::new(
            vec![
                tau_window_grid(self.truncation, self.epsilon, nodes)?,
                periodic_trapezoid(theta)?,
            ],
            Density::Flat,
            1.0 / (2.0 * PI),
        )?)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GridOptions {
    pub nodes_per_unit: Option<usize>,
    pub theta_count: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl AmbientVector {
    /// `η(x, x) = (x⁰)² − (x¹)² − (x²)²`.
    pub fn minkowski_norm(&self) -> f64 {
        self.x0 * self.x0 - self.x1 * self.x1 - self.x2 * self.x2
    }
}

pub fn embed(params: &Ds2Params, tau: f64, theta: f64) -> AmbientVector {
    let (s, c) = theta.sin_cos();
    let rt = params.r * tau;
    let h = params.h_inv();
    AmbientVector {
        x0: rt,
        x1: rt * c - h * s,
        x2: rt * s + h * c,
    }
}

/// The Gaussian-weighted Fourier family on the cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFourierBasis {
    epsilon: f64,
    truncation: usize,
}

impl GaussianFourierBasis {
    pub fn label(&self, n: usize) -> i64 {
        n as i64 - self.truncation as i64
    }
}

pub fn basis(params: &Ds2Params) -> GaussianFourierBasis {
    GaussianFourierBasis {
        epsilon: params.epsilon,
        truncation: params.truncation,
    }
}

impl BasisSet for GaussianFourierBasis {
    fn len(&self) -> usize {
        2 * self.truncation + 1
    }

    fn time_label(&self, n: usize) -> f64 {
        self.label(n) as f64
    }

    fn label_offset(&self) -> i64 {
        -(self.truncation as i64)
    }

    fn evaluate(&self, x: &Point, out: &mut [Complex64]) {
        let theta = circle_angle(&x.angles);
        for (n, o) in out.iter_mut().enumerate() {
            let m = self.label(n) as f64;
            *o = Complex64::from_polar(cs::gaussian_profile(self.epsilon, m, x.tau), m * theta);
        }
    }

    fn gaussian_time_factor(&self) -> Option<f64> {
        Some(self.epsilon)
    }

    fn evaluate_compact(&self, angles: &Angles, out: &mut [Complex64]) {
        let theta = circle_angle(angles);
        for (n, o) in out.iter_mut().enumerate() {
            *o = Complex64::from_polar(1.0, self.label(n) as f64 * theta);
        }
    }
}

fn circle_angle(angles: &Angles) -> f64 {
    match *angles {
        Angles::Circle { theta } => theta,
        Angles::Sphere3 { .. } => panic!("2d basis evaluated on an S³ chart point"),
    }
}

/// `N(τ) = √(ε/π) Σ_{|m|≤M} e^{−ε(τ−m)²}`.
pub fn theta_normalization(params: &Ds2Params, tau: f64) -> f64 {
    let m = params.truncation as i64;
    let eps = params.epsilon;
    (eps / PI).sqrt()
        * (-m..=m)
            .map(|k| {
                let d = tau - k as f64;
                (-eps * d * d).exp()
            })
            .sum::<f64>()
}

/// `(x̂⁰, x̂¹, x̂²)` in closed form.
pub fn analytic_operators(params: &Ds2Params) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let dim = params.dim();
    let off = params.label_offset();
    let r = params.r;
    let a = 0.5 * r * (-params.epsilon / 4.0).exp();
    let sign = params.convention.sign();
    let x0 = ComplexMatrix::from_fn(dim, off, |i, j| {
        if i == j {
            Complex64::new(sign * r * (i as i64 + off) as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .expect("dim ≥ 1");
    // (m+1, m) entries; the (m, m+1) entries follow from self-adjointness.
    let lower = |i: usize, j: usize| (i == j + 1).then(|| params.p(j as i64 + off) * a);
    let x1 = ComplexMatrix::from_fn(dim, off, |i, j| {
        lower(i, j)
            .or_else(|| lower(j, i).map(|z| z.conj()))
            .unwrap_or_default()
    })
    .expect("dim ≥ 1");
    let minus_i = Complex64::new(0.0, -1.0);
    let x2 = ComplexMatrix::from_fn(dim, off, |i, j| {
        lower(i, j)
            .map(|z| z * minus_i)
            .or_else(|| lower(j, i).map(|z| (z * minus_i).conj()))
            .unwrap_or_default()
    })
    .expect("dim ≥ 1");
    (x0, x1, x2)
}

/// Interior defects of the three commutator identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorDefects {
    /// `‖[x̂⁰,x̂¹] − σ i r x̂²‖_int`
    pub x0_x1: f64,
    /// `‖[x̂⁰,x̂²] + σ i r x̂¹‖_int`
    pub x0_x2: f64,
    /// `‖[x̂¹,x̂²] + σ i r e^{−ε/2} x̂⁰‖_int`
    pub x1_x2: f64,
}

impl CommutatorDefects {
    pub fn max(&self) -> f64 {
        self.x0_x1.max(self.x0_x2).max(self.x1_x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub margin: usize,
    pub convention: TimeConvention,
    /// Identities obtained from the quantization (with the `e^{−ε/2}` factor).
    pub quantized: CommutatorDefects,
    /// The undeformed so(1,2) relations `[x̂⁰,x̂¹] = i r x̂²`,
    /// `[x̂⁰,x̂²] = −i r x̂¹`, `[x̂¹,x̂²] = i r x̂⁰`, reported for comparison.
    pub expected_form: CommutatorDefects,
}

fn commutators(
    x0: &ComplexMatrix,
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
) -> Result<[ComplexMatrix; 3], NumericsError> {
    Ok([x0.commutator(x1)?, x0.commutator(x2)?, x1.commutator(x2)?])
}

/// Commutator defects for an arbitrary triple (e.g. loaded from disk).
pub fn commutator_report_for(
    params: &Ds2Params,
    x0: &ComplexMatrix,
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
) -> Result<CommutatorReport, Ds2Error> {
    let margin = COMMUTATOR_MARGIN;
    let [c01, c02, c12] = commutators(x0, x1, x2)?;
    let r = params.r;
    let sigma = params.convention.sign();
    let i = Complex64::new(0.0, 1.0);
    let deform = (-params.epsilon / 2.0).exp();
    let defect = |c: &ComplexMatrix, rhs: ComplexMatrix| -> Result<f64, NumericsError> {
        c.sub(&rhs)?.interior_norm(margin)
    };
    let quantized = CommutatorDefects {
        x0_x1: defect(&c01, x2.scale(i * (sigma * r)))?,
        x0_x2: defect(&c02, x1.scale(-i * (sigma * r)))?,
        x1_x2: defect(&c12, x0.scale(-i * (sigma * r * deform)))?,
    };
    let expected_form = CommutatorDefects {
        x0_x1: defect(&c01, x2.scale(i * r))?,
        x0_x2: defect(&c02, x1.scale(-i * r))?,
        x1_x2: defect(&c12, x0.scale(i * r))?,
    };
    Ok(CommutatorReport {
        margin,
        convention: params.convention,
        quantized,
        expected_form,
    })
}

pub fn verify_commutators(params: &Ds2Params) -> Result<CommutatorReport, Ds2Error> {
    if params.truncation < MIN_VERIFY_TRUNCATION {
        return Err(Ds2Error::TruncationTooSmall(params.truncation));
    }
    let (x0, x1, x2) = analytic_operators(params);
    commutator_report_for(params, &x0, &x1, &x2)
}

/// `η_αβ x̂^α x̂^β = (x̂⁰)² − (x̂¹)² − (x̂²)²`.
pub fn casimir_ambient(params: &Ds2Params) -> ComplexMatrix {
    let (x0, x1, x2) = analytic_operators(params);
    casimir_of(&x0, &x1, &x2).expect("operators share one label window")
}

pub fn casimir_of(
    x0: &ComplexMatrix,
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
) -> Result<ComplexMatrix, NumericsError> {
    x0.matmul(x0)?.sub(&x1.matmul(x1)?)?.sub(&x2.matmul(x2)?)
}

/// Interior diagonal of the ambient Casimir: `r²m² − r²e^{−ε/2}(m² + 1/4 + ρ²)`.
pub fn casimir_interior_entry(params: &Ds2Params, m: i64) -> f64 {
    let r2 = params.r * params.r;
    let mf = m as f64;
    r2 * mf * mf - r2 * (-params.epsilon / 2.0).exp() * (mf * mf + 0.25 + params.rho * params.rho)
}

/// `−r²(ρ² + 1/4)`, the value approached as `ε → 0`.
pub fn casimir_target(params: &Ds2Params) -> f64 {
    -params.r * params.r * params.casimir_eigenvalue()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CasimirReport {
    /// Largest interior off-diagonal magnitude.
    pub off_diagonal: f64,
    /// Largest interior deviation from the closed-form `ε`-dependent diagonal.
    pub formula_defect: f64,
    /// Largest interior deviation from `−r²(ρ² + 1/4)`.
    pub target_deviation: f64,
    /// Deviation from `−r²(ρ² + 1/4)` at label 0.
    pub target_deviation_m0: f64,
}

pub fn casimir_report_for(params: &Ds2Params, casimir: &ComplexMatrix) -> Result<CasimirReport, Ds2Error> {
    let range = casimir.interior_range(COMMUTATOR_MARGIN)?;
    let target = casimir_target(params);
    let mut off_diagonal: f64 = 0.0;
    let mut formula_defect: f64 = 0.0;
    let mut target_deviation: f64 = 0.0;
    for i in range.clone() {
        for j in range.clone() {
            let z = casimir[(i, j)];
            if i == j {
                let m = casimir.label(i);
                formula_defect = formula_defect.max((z - casimir_interior_entry(params, m)).norm());
                target_deviation = target_deviation.max((z - target).norm());
            } else {
                off_diagonal = off_diagonal.max(z.norm());
            }
        }
    }
    let target_deviation_m0 = casimir
        .index_of(0)
        .map(|i| (casimir[(i, i)] - target).norm())
        .unwrap_or(f64::NAN);
    Ok(CasimirReport {
        off_diagonal,
        formula_defect,
        target_deviation,
        target_deviation_m0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPoint {
    pub r: f64,
    pub rho: f64,
    /// Interior norms of `[x̂⁰,x̂¹]`, `[x̂⁰,x̂²]`, `[x̂¹,x̂²]`.
    pub norms: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitScanReport {
    pub h_inv: f64,
    pub epsilon: f64,
    pub truncation: usize,
    pub points: Vec<LimitPoint>,
    /// Least-squares log–log slopes of the three norms against `r`; `None`
    /// with fewer than two distinct `r` values.
    pub slopes: Option<[f64; 3]>,
    /// Norms strictly decrease as `r` decreases.
    pub monotone: bool,
}

/// Commutator norms along `r → 0` with `rρ = H⁻¹` held fixed.
pub fn classical_limit_scan(
    h_inv: f64,
    r_values: &[f64],
    epsilon: f64,
    truncation: usize,
) -> Result<LimitScanReport, Ds2Error> {
    let points = r_values
        .par_iter()
        .map(|&r| {
            let params = Ds2Params::on_limit_path(h_inv, r, epsilon, truncation)?;
            let (x0, x1, x2) = analytic_operators(&params);
            let cs = commutators(&x0, &x1, &x2)?;
            let mut norms = [0.0; 3];
            for (n, c) in norms.iter_mut().zip(&cs) {
                *n = c.interior_norm(COMMUTATOR_MARGIN)?;
            }
            Ok(LimitPoint {
                r,
                rho: params.rho,
                norms,
            })
        })
        .collect::<Result<Vec<_>, Ds2Error>>()?;

    let xs: Vec<f64> = points.iter().map(|p| p.r.log10()).collect();
    let slopes = if distinct_count(&xs) >= 2 {
        let mut s = [0.0; 3];
        for (k, slot) in s.iter_mut().enumerate() {
            let ys: Vec<f64> = points.iter().map(|p| p.norms[k].log10()).collect();
            *slot = least_squares_slope(&xs, &ys);
        }
        Some(s)
    } else {
        None
    };

    let mut order: Vec<&LimitPoint> = points.iter().collect();
    order.sort_by(|a, b| b.r.total_cmp(&a.r));
    let monotone = order
        .windows(2)
        .all(|w| (0..3).all(|k| w[1].norms[k] < w[0].norms[k]));

    Ok(LimitScanReport {
        h_inv,
        epsilon,
        truncation,
        points,
        slopes,
        monotone,
    })
}

fn distinct_count(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v.len()
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// A real or complex observable on the 2d chart given as expression(s).
///
/// Bindings: `tau, theta, r, Hinv, rho, pi`.
pub struct ExprObservable<'a> {
    re: &'a Expr,
    im: Option<&'a Expr>,
    params: Ds2Params,
}

impl<'a> ExprObservable<'a> {
    pub fn new(params: &Ds2Params, re: &'a Expr, im: Option<&'a Expr>) -> Self {
        Self {
            re,
            im,
            params: *params,
        }
    }

    fn lookup(&self, x: &Point) -> impl Fn(&str) -> Option<f64> + '_ {
        let theta = match x.angles {
            Angles::Circle { theta } => theta,
            Angles::Sphere3 { .. } => f64::NAN,
        };
        let tau = x.tau;
        move |name: &str| match name {
            "tau" => Some(tau),
            "theta" => Some(theta),
            "r" => Some(self.params.r),
            "Hinv" => Some(self.params.h_inv()),
            "rho" => Some(self.params.rho),
            "pi" => Some(PI),
            _ => None,
        }
    }
}

fn expr_dependence(exprs: &[&Expr], time: &[&str], compact: &[&str]) -> Dependence {
    let t = exprs.iter().any(|e| e.mentions(time));
    let c = exprs.iter().any(|e| e.mentions(compact));
    match (t, c) {
        (false, false) => Dependence::Constant,
        (true, false) => Dependence::TimeOnly,
        (false, true) => Dependence::CompactOnly,
        (true, true) => Dependence::Full,
    }
}

pub(crate) fn dependence_of(re: &Expr, im: Option<&Expr>, time: &[&str], compact: &[&str]) -> Dependence {
    let mut exprs = vec![re];
    exprs.extend(im);
    expr_dependence(&exprs, time, compact)
}

impl Observable for ExprObservable<'_> {
    fn value(&self, x: &Point) -> Result<Complex64, String> {
        let lookup = self.lookup(x);
        let re = self.re.eval_with(&lookup).map_err(|e| e.to_string())?;
        let im = match self.im {
            Some(e) => e.eval_with(&lookup).map_err(|e| e.to_string())?,
            None => 0.0,
        };
        Ok(Complex64::new(re, im))
    }

    fn dependence(&self) -> Dependence {
        dependence_of(self.re, self.im, &["tau"], &["theta"])
    }
}

/// Checks that every identifier resolves, by evaluating once at `(0, 0)`.
fn check_bindings(obs: &ExprObservable<'_>) -> Result<(), Ds2Error> {
    let lookup = obs.lookup(&Point::circle(0.0, 0.0));
    for e in std::iter::once(obs.re).chain(obs.im) {
        match e.eval_with(&lookup) {
            Err(err @ ExprError::Unbound(_)) => return Err(err.into()),
            _ => continue,
        }
    }
    Ok(())
}

/// Quantizes `re + i·im` with the Gaussian–Fourier basis on `grid`.
pub fn quantize_expr(
    params: &Ds2Params,
    re: &Expr,
    im: Option<&Expr>,
    grid: &ProductGrid,
) -> Result<ComplexMatrix, Ds2Error> {
    let obs = ExprObservable::new(params, re, im);
    check_bindings(&obs)?;
    Ok(cs::quantize(&basis(params), &obs, grid)?)
}

/// Which closed form an observable was matched against.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OracleReference {
    /// One of `1, τ, x⁰, x¹, x²`.
    Analytic { name: String },
    /// Band structure predicted by the trigonometric degree.
    Band { width: usize },
    /// No prediction available (not a trigonometric polynomial).
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub reference: OracleReference,
    /// Max-entry difference from the analytic matrix, or the largest entry
    /// outside the predicted band.
    pub difference: f64,
    /// Observed bandwidth at tolerance `1e−10`.
    pub observed_bandwidth: usize,
    /// `max |A − A†|` over the interior block.
    pub interior_self_adjoint_defect: f64,
}

const PROBE_POINTS: [(f64, f64); 6] = [
    (0.0, 0.0),
    (0.37, 1.1),
    (-1.9, 2.7),
    (3.3, 4.4),
    (-0.6, 5.9),
    (2.2, 0.3),
];

type Candidate = (&'static str, fn(&Ds2Params, f64, f64) -> f64);

/// Identifies `f` among `1, τ, x⁰, x¹, x²` by evaluating at probe points.
fn identify(params: &Ds2Params, re: &Expr) -> Option<&'static str> {
    let candidates: [Candidate; 5] = [
        ("1", |_, _, _| 1.0),
        ("tau", |_, t, _| t),
        ("x0", |p, t, th| embed(p, t, th).x0),
        ("x1", |p, t, th| embed(p, t, th).x1),
        ("x2", |p, t, th| embed(p, t, th).x2),
    ];
    let obs = ExprObservable::new(params, re, None);
    let values: Vec<f64> = PROBE_POINTS
        .iter()
        .map(|&(t, th)| obs.value(&Point::circle(t, th)).map(|z| z.re))
        .collect::<Result<_, _>>()
        .ok()?;
    candidates.iter().find_map(|(name, g)| {
        PROBE_POINTS
            .iter()
            .zip(&values)
            .all(|(&(t, th), v)| {
                let w = g(params, t, th);
                (v - w).abs() <= 1e-12 * w.abs().max(1.0)
            })
            .then_some(*name)
    })
}

/// Compares the quadrature quantization of `f` with its closed form (for the
/// ambient coordinates, `1` and `τ`) or with the band structure predicted by
/// its trigonometric degree.
pub fn oracle_compare(params: &Ds2Params, f: &Expr) -> Result<OracleComparison, Ds2Error> {
    oracle_compare_on(params, f, &params.default_grid()?)
}

pub fn oracle_compare_on(
    params: &Ds2Params,
    f: &Expr,
    grid: &ProductGrid,
) -> Result<OracleComparison, Ds2Error> {
    let a = quantize_expr(params, f, None, grid)?;
    let margin = COMMUTATOR_MARGIN.min(params.dim().saturating_sub(1) / 2);
    let range = a.interior_range(margin)?;
    let mut sa_defect: f64 = 0.0;
    for i in range.clone() {
        for j in range.clone() {
            sa_defect = sa_defect.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    let observed_bandwidth = a.bandwidth(1e-10);
    let (reference, difference) = match identify(params, f) {
        Some(name) => {
            let expected = analytic_reference(params, name);
            (
                OracleReference::Analytic { name: name.into() },
                a.max_abs_diff(&expected)?,
            )
        }
        None => match f.trig_degree() {
            Some(d) => (
                OracleReference::Band { width: d as usize },
                a.max_abs_outside_band(d as usize),
            ),
            None => (OracleReference::Unknown, f64::NAN),
        },
    };
    Ok(OracleComparison {
        reference,
        difference,
        observed_bandwidth,
        interior_self_adjoint_defect: sa_defect,
    })
}

fn analytic_reference(params: &Ds2Params, name: &str) -> ComplexMatrix {
    // The quadrature always realizes the direct quantization of x⁰ = rτ.
    let direct = params.with_convention(TimeConvention::CsQuantized);
    let (x0, x1, x2) = analytic_operators(&direct);
    match name {
        "1" => ComplexMatrix::identity(params.dim(), params.label_offset()).unwrap(),
        "tau" => x0.scale_real(1.0 / params.r),
        "x0" => x0,
        "x1" => x1,
        "x2" => x2,
        _ => unreachable!("unknown analytic reference {name}"),
    }
}

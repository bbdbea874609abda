//! Fuzzy 4d de Sitter space-time over the ℝ × S³ chart.
//!
//! Points are `x⁰ = rτ`, `x = rτ ξ + H⁻¹ ξ⊥` with `ξ ∈ S³` and
//! `ξ⊥ = Jξ`, `J(a, b, c, d) = (−b, a, −d, c)`. Any orthonormal family
//! `Z_𝒥 : S³ → ℂ^{2s+1}` with an attached fuzzy-time spectrum `τ_𝒥` can be
//! plugged in through [`BasisProvider`]; the vector coherent states use
//! `φ_𝒥(τ, ξ) = (ε/π)^{1/4} e^{−ε(τ−τ_𝒥)²/2} Z_𝒥(ξ)`.
//!
//! The eigenbasis of the true principal-series time operator is not
//! constructed here. [`ModelProvider`] stands in for it with scalar
//! hyperspherical harmonics times canonical spin vectors and the spectrum
//! `τ_𝒥 = m` unless overridden.

pub mod harmonics;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cs::{self, Angles, BasisSet, CoherentState, CsError, Dependence, Observable, Point};
use crate::expr::{Expr, ExprError};
use crate::numerics::{
    s3_product_grid, tau_window_grid_span, ComplexMatrix, NumericsError, ProductGrid,
    DEFAULT_NODES_PER_UNIT,
};

pub use harmonics::{gegenbauer, hyperspherical_harmonic, spherical_harmonic};

/// Default S³ grid resolution per angle.
pub const DEFAULT_S3_COUNTS: [usize; 3] = [32, 32, 32];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Ds4Error {
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },
    #[error("spectrum table: {0}")]
    Spectrum(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Cs(#[from] CsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn positive(field: &'static str, v: f64) -> Result<(), Ds4Error> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Ds4Error::InvalidParameter {
            field,
            message: format!("must be a positive finite number, got {v}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ds4Params {
    r: f64,
    nu: f64,
    s: f64,
    epsilon: f64,
}

impl Ds4Params {
    pub fn new(r: f64, nu: f64, s: f64, epsilon: f64) -> Result<Self, Ds4Error> {
        positive("r", r)?;
        positive("nu", nu)?;
        positive("epsilon", epsilon)?;
        let twice = 2.0 * s;
        if !(s > 0.0) || twice.fract() != 0.0 || twice > 1e6 {
            return Err(Ds4Error::InvalidParameter {
                field: "s",
                message: format!("spin must be a positive half-integer, got {s}"),
            });
        }
        Ok(Self { r, nu, s, epsilon })
    }

    /// Parameters on the classical-limit path `r s √(ν² + 1/4) = H⁻¹`.
    pub fn on_limit_path(h_inv: f64, r: f64, s: f64, epsilon: f64) -> Result<Self, Ds4Error> {
        positive("Hinv", h_inv)?;
        positive("r", r)?;
        positive("s", s)?;
        let q = h_inv / (r * s);
        if q <= 0.5 {
            return Err(Ds4Error::InvalidParameter {
                field: "r",
                message: format!("need H⁻¹/(r s) > 1/2 for a real ν, got {q}"),
            });
        }
        Self::new(r, (q * q - 0.25).sqrt(), s, epsilon)
    }

    /// `r = 1, ν = √3.75, s = 1/2, ε = 0.1`: Casimir constant 3, `H⁻¹ = 1`.
    pub fn reference() -> Self {
        Self::new(1.0, 3.75f64.sqrt(), 0.5, 0.1).unwrap()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `2s + 1`.
    pub fn components(&self) -> usize {
        (2.0 * self.s) as usize + 1
    }

    /// `H⁻¹ = r s √(ν² + 1/4)`.
    pub fn h_inv(&self) -> f64 {
        self.r * self.s * (self.nu * self.nu + 0.25).sqrt()
    }

    /// Quartic Casimir eigenvalue `(ν² + 1/4) s (s + 1)`.
    pub fn quartic_casimir(&self) -> f64 {
        (self.nu * self.nu + 0.25) * self.s * (self.s + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S3Point {
    pub chi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl S3Point {
    pub fn new(chi: f64, theta: f64, phi: f64) -> Self {
        Self { chi, theta, phi }
    }

    /// `ξ = (cosχ, sinχ sinθ cosφ, sinχ sinθ sinφ, sinχ cosθ)`.
    pub fn xi(&self) -> [f64; 4] {
        let (sc, cc) = self.chi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [cc, sc * st * cp, sc * st * sp, sc * ct]
    }

    /// `ξ⊥ = Jξ`.
    pub fn xi_perp(&self) -> [f64; 4] {
        complex_structure(self.xi())
    }
}

/// `J(a, b, c, d) = (−b, a, −d, c)`; orthogonal with `J² = −1`.
pub fn complex_structure([a, b, c, d]: [f64; 4]) -> [f64; 4] {
    [-b, a, -d, c]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientVector4 {
    pub x0: f64,
    pub x: [f64; 4],
}

impl AmbientVector4 {
    /// `(x⁰)² − ‖x‖²`.
    pub fn minkowski_norm(&self) -> f64 {
        self.x0 * self.x0 - self.x.iter().map(|v| v * v).sum::<f64>()
    }
}

pub fn embed4(params: &Ds4Params, tau: f64, p: &S3Point) -> AmbientVector4 {
    let rt = params.r * tau;
    let h = params.h_inv();
    let xi = p.xi();
    let perp = complex_structure(xi);
    let mut x = [0.0; 4];
    for k in 0..4 {
        x[k] = rt * xi[k] + h * perp[k];
    }
    AmbientVector4 { x0: rt, x }
}

/// An orthonormal family `Z_𝒥 : S³ → ℂ^d` with a fuzzy-time spectrum.
///
/// `evaluate` writes `Z_𝒥(ξ)` to `out[𝒥·d .. (𝒥+1)·d]` and must be pure.
pub trait BasisProvider: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn components(&self) -> usize;

    /// Spectrum value `τ_𝒥` attached to label `index`.
    fn tau(&self, index: usize) -> f64;

    /// Label tuple for reports and matrix files.
    fn label(&self, index: usize) -> Vec<i64>;

    fn evaluate(&self, p: &S3Point, out: &mut [Complex64]);

    /// Declared `(s, ν)`.
    fn declared(&self) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelLabel {
    #[serde(rename = "L")]
    pub big_l: usize,
    pub l: usize,
    pub m: i64,
    /// Spin component, `1..=2s+1`.
    pub sigma: usize,
}

impl ModelLabel {
    fn tuple(&self) -> Vec<i64> {
        vec![self.big_l as i64, self.l as i64, self.m, self.sigma as i64]
    }
}

/// `Z_{(L,l,m,σ)}(ξ) = Y_{Llm}(ξ) e_σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelProvider {
    s: f64,
    nu: f64,
    l_max: usize,
    labels: Vec<ModelLabel>,
    spectrum: Vec<f64>,
}

pub fn model_provider(params: &Ds4Params, l_max: usize) -> ModelProvider {
    let d = params.components();
    let mut labels = Vec::new();
    for big_l in 0..=l_max {
        for l in 0..=big_l {
            for m in -(l as i64)..=(l as i64) {
                for sigma in 1..=d {
                    labels.push(ModelLabel { big_l, l, m, sigma });
                }
            }
        }
    }
    let spectrum = labels.iter().map(|lab| lab.m as f64).collect();
    ModelProvider {
        s: params.s,
        nu: params.nu,
        l_max,
        labels,
        spectrum,
    }
}

/// One override `label ↦ τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub label: Vec<i64>,
    pub tau: f64,
}

/// Spectrum override table; serialized as a JSON array of
/// `{"label": [L, l, m, sigma], "tau": value}` objects.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectrumTable(pub Vec<SpectrumEntry>);

impl ModelProvider {
    pub fn labels(&self) -> &[ModelLabel] {
        &self.labels
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Replaces `τ_𝒥` for every label listed in `table`; others keep `τ = m`.
    pub fn with_spectrum(mut self, table: &SpectrumTable) -> Result<Self, Ds4Error> {
        for entry in &table.0 {
            if !entry.tau.is_finite() {
                return Err(Ds4Error::Spectrum(format!(
                    "non-finite tau for label {:?}",
                    entry.label
                )));
            }
            let idx = self
                .labels
                .iter()
                .position(|lab| lab.tuple() == entry.label)
                .ok_or_else(|| Ds4Error::Spectrum(format!("unknown label {:?}", entry.label)))?;
            self.spectrum[idx] = entry.tau;
        }
        Ok(self)
    }
}

impl BasisProvider for ModelProvider {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn components(&self) -> usize {
        (2.0 * self.s) as usize + 1
    }

    fn tau(&self, index: usize) -> f64 {
        self.spectrum[index]
    }

    fn label(&self, index: usize) -> Vec<i64> {
        self.labels[index].tuple()
    }

    fn evaluate(&self, p: &S3Point, out: &mut [Complex64]) {
        let d = self.components();
        out.fill(Complex64::new(0.0, 0.0));
        // Harmonics are shared by the 2s+1 spin copies of each (L, l, m).
        let mut cached: Option<((usize, usize, i64), Complex64)> = None;
        for (i, lab) in self.labels.iter().enumerate() {
            let key = (lab.big_l, lab.l, lab.m);
            let y = match cached {
                Some((k, y)) if k == key => y,
                _ => {
                    let y = hyperspherical_harmonic(lab.big_l, lab.l, lab.m, p.chi, p.theta, p.phi);
                    cached = Some((key, y));
                    y
                }
            };
            out[i * d + (lab.sigma - 1)] = y;
        }
    }

    fn declared(&self) -> (f64, f64) {
        (self.s, self.nu)
    }
}

/// Adapts a provider into a [`BasisSet`] on the ℝ × S³ chart.
pub struct VectorCsBasis<'a, P: BasisProvider + ?Sized> {
    provider: &'a P,
    epsilon: f64,
}

impl<'a, P: BasisProvider + ?Sized> VectorCsBasis<'a, P> {
    pub fn new(provider: &'a P, epsilon: f64) -> Self {
        Self { provider, epsilon }
    }
}

fn sphere_point(angles: &Angles) -> S3Point {
    match *angles {
        Angles::Sphere3 { chi, theta, phi } => S3Point { chi, theta, phi },
        Angles::Circle { .. } => panic!("4d basis evaluated on a circle chart point"),
    }
}

impl<P: BasisProvider + ?Sized> BasisSet for VectorCsBasis<'_, P> {
    fn len(&self) -> usize {
        self.provider.len()
    }

    fn components(&self) -> usize {
        self.provider.components()
    }

    fn time_label(&self, n: usize) -> f64 {
        self.provider.tau(n)
    }

    fn evaluate(&self, x: &Point, out: &mut [Complex64]) {
        self.provider.evaluate(&sphere_point(&x.angles), out);
        let d = self.provider.components();
        for n in 0..self.provider.len() {
            let g = cs::gaussian_profile(self.epsilon, self.provider.tau(n), x.tau);
            for z in &mut out[n * d..(n + 1) * d] {
                *z *= g;
            }
        }
    }

    fn gaussian_time_factor(&self) -> Option<f64> {
        Some(self.epsilon)
    }

    fn evaluate_compact(&self, angles: &Angles, out: &mut [Complex64]) {
        self.provider.evaluate(&sphere_point(angles), out);
    }
}

/// `N(τ, ξ) = √(ε/π) Σ_𝒥 e^{−ε(τ−τ_𝒥)²} Z_𝒥†(ξ) Z_𝒥(ξ)`.
pub fn normalization4<P: BasisProvider + ?Sized>(
    provider: &P,
    epsilon: f64,
    tau: f64,
    p: &S3Point,
) -> Result<f64, Ds4Error> {
    let basis = VectorCsBasis::new(provider, epsilon);
    Ok(cs::normalization(&basis, &Point::sphere3(tau, p.chi, p.theta, p.phi))?)
}

/// The vector coherent state at `(τ, ξ)`; coefficients are laid out
/// `[𝒥·(2s+1) + σ]`.
pub fn vector_cs<P: BasisProvider + ?Sized>(
    provider: &P,
    epsilon: f64,
    tau: f64,
    p: &S3Point,
) -> Result<CoherentState, Ds4Error> {
    let basis = VectorCsBasis::new(provider, epsilon);
    Ok(cs::coherent_state(
        &basis,
        &Point::sphere3(tau, p.chi, p.theta, p.phi),
    )?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GridOptions {
    pub nodes_per_unit: Option<usize>,
    pub s3_counts: Option<[usize; 3]>,
}

/// τ window around the provider's spectrum times the S³ grid.
pub fn default_grid<P: BasisProvider + ?Sized>(
    provider: &P,
    epsilon: f64,
    opts: GridOptions,
) -> Result<ProductGrid, Ds4Error> {
    let [a, b, c] = opts.s3_counts.unwrap_or(DEFAULT_S3_COUNTS);
    let (lo, hi) = (0..provider.len())
        .map(|i| provider.tau(i))
        .fold((0.0f64, 0.0f64), |(lo, hi), t| (lo.min(t), hi.max(t)));
    let tau = tau_window_grid_span(
        lo.floor(),
        hi.ceil(),
        epsilon,
        opts.nodes_per_unit.unwrap_or(DEFAULT_NODES_PER_UNIT),
    )?;
    Ok(s3_product_grid(a, b, c)?.prepend(tau)?)
}

/// Observable on ℝ × S³ given as expression(s).
///
/// Bindings: `tau, chi, theta, phi, r, Hinv, nu, s, pi`.
pub struct ExprObservable4<'a> {
    re: &'a Expr,
    im: Option<&'a Expr>,
    params: Ds4Params,
}

impl<'a> ExprObservable4<'a> {
    pub fn new(params: &Ds4Params, re: &'a Expr, im: Option<&'a Expr>) -> Self {
        Self {
            re,
            im,
            params: *params,
        }
    }

    fn lookup(&self, x: &Point) -> impl Fn(&str) -> Option<f64> + '_ {
        let (chi, theta, phi) = match x.angles {
            Angles::Sphere3 { chi, theta, phi } => (chi, theta, phi),
            Angles::Circle { .. } => (f64::NAN, f64::NAN, f64::NAN),
        };
        let tau = x.tau;
        move |name: &str| match name {
            "tau" => Some(tau),
            "chi" => Some(chi),
            "theta" => Some(theta),
            "phi" => Some(phi),
            "r" => Some(self.params.r),
            "Hinv" => Some(self.params.h_inv()),
            "nu" => Some(self.params.nu),
            "s" => Some(self.params.s),
            "pi" => Some(PI),
            _ => None,
        }
    }
}

impl Observable for ExprObservable4<'_> {
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
        crate::ds2::dependence_of(self.re, self.im, &["tau"], &["chi", "theta", "phi"])
    }
}

/// Quantizes `re + i·im` with the vector coherent states of `provider`.
pub fn quantize4<P: BasisProvider + ?Sized>(
    provider: &P,
    params: &Ds4Params,
    re: &Expr,
    im: Option<&Expr>,
    grid: &ProductGrid,
) -> Result<ComplexMatrix, Ds4Error> {
    let obs = ExprObservable4::new(params, re, im);
    let probe = obs.lookup(&Point::sphere3(0.0, 0.0, 0.0, 0.0));
    for e in std::iter::once(re).chain(im) {
        if let Err(err @ ExprError::Unbound(_)) = e.eval_with(&probe) {
            return Err(err.into());
        }
    }
    let basis = VectorCsBasis::new(provider, params.epsilon);
    Ok(cs::quantize(&basis, &obs, grid)?)
}

/// `diag(τ_𝒥)`.
pub fn spectrum_matrix<P: BasisProvider + ?Sized>(provider: &P) -> Result<ComplexMatrix, Ds4Error> {
    let d: Vec<Complex64> = (0..provider.len())
        .map(|i| Complex64::new(provider.tau(i), 0.0))
        .collect();
    Ok(ComplexMatrix::from_diagonal(&d, 0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub orthonormality_defect: f64,
    /// `(ν² + 1/4) s (s + 1)`.
    pub casimir_constant: f64,
    /// `r² s (s + 1) (ν² + 1/4)`.
    pub fuzzy_radius_squared: f64,
    /// `H⁻²`.
    pub h_inv_squared: f64,
    /// `fuzzy_radius_squared / h_inv_squared = (s + 1)/s`.
    pub radius_ratio: f64,
    /// `H⁻¹ − r s √(ν² + 1/4)`.
    pub relation_residual: f64,
    pub spectrum_symmetric: bool,
    /// The provider declares the same `(s, ν)` as the parameters.
    pub declared_matches: bool,
}

pub fn provider_consistency<P: BasisProvider + ?Sized>(
    provider: &P,
    params: &Ds4Params,
    grid: &ProductGrid,
) -> Result<ConsistencyReport, Ds4Error> {
    let basis = VectorCsBasis::new(provider, params.epsilon);
    let orthonormality_defect = cs::identity_resolution_defect(&basis, grid)?;
    let casimir_constant = params.quartic_casimir();
    let fuzzy_radius_squared = params.r * params.r * casimir_constant;
    let h = params.h_inv();
    let mut spectrum: Vec<f64> = (0..provider.len()).map(|i| provider.tau(i)).collect();
    spectrum.sort_by(|a, b| a.total_cmp(b));
    let mut mirrored: Vec<f64> = spectrum.iter().map(|t| -t).collect();
    mirrored.reverse();
    let spectrum_symmetric = spectrum
        .iter()
        .zip(&mirrored)
        .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
    let (ds, dnu) = provider.declared();
    Ok(ConsistencyReport {
        orthonormality_defect,
        casimir_constant,
        fuzzy_radius_squared,
        h_inv_squared: h * h,
        radius_ratio: fuzzy_radius_squared / (h * h),
        relation_residual: h - params.r * params.s * (params.nu * params.nu + 0.25).sqrt(),
        spectrum_symmetric,
        declared_matches: ds == params.s && dnu == params.nu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ds4LimitPoint {
    pub r: f64,
    pub nu: f64,
    pub h_inv: f64,
    /// `H⁻¹ − r s √(ν² + 1/4)` for the derived parameters.
    pub relation_residual: f64,
    /// Derived `H⁻¹` minus the requested one.
    pub target_deviation: f64,
    pub casimir_constant: f64,
    pub fuzzy_radius_squared: f64,
}

/// Walks `r → 0` with `r s √(ν² + 1/4) = H⁻¹` held fixed.
pub fn casimir_limit_path(
    h_inv: f64,
    s: f64,
    epsilon: f64,
    r_values: &[f64],
) -> Result<Vec<Ds4LimitPoint>, Ds4Error> {
    r_values
        .iter()
        .map(|&r| {
            let p = Ds4Params::on_limit_path(h_inv, r, s, epsilon)?;
            let h = p.h_inv();
            Ok(Ds4LimitPoint {
                r,
                nu: p.nu,
                h_inv: h,
                relation_residual: h - p.r * p.s * (p.nu * p.nu + 0.25).sqrt(),
                target_deviation: h - h_inv,
                casimir_constant: p.quartic_casimir(),
                fuzzy_radius_squared: p.r * p.r * p.quartic_casimir(),
            })
        })
        .collect()
}

//! Generic coherent-state quantization.
//!
//! Given an orthonormal family `{φ_n}` on a chart `X = ℝ_τ × (compact part)`,
//! the coherent states are `|x⟩ = N(x)^{-1/2} Σ_n conj(φ_n(x)) |n⟩` with
//! `N(x) = Σ_n ‖φ_n(x)‖²`, and an observable `f` maps to
//! `A_f = ∫ f(x) |x⟩⟨x| N(x) μ(dx)`. The `N(x)` weight cancels the two
//! `N^{-1/2}` factors, so matrix elements are assembled directly as
//! `⟨n'|A_f|n⟩ = ∫ f(x) φ_{n'}(x)† φ_n(x) μ(dx)`.
//!
//! Vector-valued families (`components() > 1`) contract the component index
//! inside the bilinear form.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{ComplexMatrix, NumericsError, ProductGrid, QuadratureGrid1D};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsError {
    #[error("normalization N(x) vanishes at {0:?}; truncation too aggressive here")]
    DegenerateBasis(Point),
    #[error("observable is not finite at {point:?}: {value}")]
    NonFiniteObservable { point: Point, value: Complex64 },
    #[error("observable evaluation failed at {point:?}: {message}")]
    Observable { point: Point, message: String },
    #[error("operator dimension {found} does not match basis size {expected}")]
    DimMismatch { expected: usize, found: usize },
    #[error("grid does not fit the chart: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Compact chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angles {
    /// `θ ∈ [0, 2π)`.
    Circle { theta: f64 },
    /// Hyperspherical `(χ, θ, φ)`, `χ, θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    Sphere3 { chi: f64, theta: f64, phi: f64 },
}

impl Angles {
    fn from_coords(c: &[f64]) -> Result<Self, CsError> {
        match *c {
            [theta] => Ok(Angles::Circle { theta }),
            [chi, theta, phi] => Ok(Angles::Sphere3 { chi, theta, phi }),
            _ => Err(CsError::GridMismatch(format!(
                "expected 1 or 3 compact coordinates, got {}",
                c.len()
            ))),
        }
    }
}

/// A chart point `(τ, angles)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub tau: f64,
    pub angles: Angles,
}

impl Point {
    pub fn circle(tau: f64, theta: f64) -> Self {
        Self {
            tau,
            angles: Angles::Circle { theta },
        }
    }

    pub fn sphere3(tau: f64, chi: f64, theta: f64, phi: f64) -> Self {
        Self {
            tau,
            angles: Angles::Sphere3 { chi, theta, phi },
        }
    }
}

/// `(ε/π)^{1/4} e^{−(ε/2)(τ − t)²}`: the normalized Gaussian time profile.
pub fn gaussian_profile(epsilon: f64, center: f64, tau: f64) -> f64 {
    let d = tau - center;
    (epsilon / std::f64::consts::PI).powf(0.25) * (-0.5 * epsilon * d * d).exp()
}

/// An evaluatable orthonormal family `{φ_n}` on the chart.
///
/// Values of `φ_n(x)` are written to `out[n·d .. (n+1)·d]`, `d = components()`.
pub trait BasisSet: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn components(&self) -> usize {
        1
    }

    /// Fuzzy-time label attached to `φ_n` (the Gaussian centre for time-factored families).
    fn time_label(&self, n: usize) -> f64;

    /// Integer label of row 0 in matrices built on this basis.
    fn label_offset(&self) -> i64 {
        0
    }

    fn evaluate(&self, x: &Point, out: &mut [Complex64]);

    /// `Some(ε)` when `φ_n(τ, ω) = gaussian_profile(ε, time_label(n), τ) · Z_n(ω)`
    /// with `Z_n` given by [`BasisSet::evaluate_compact`].
    fn gaussian_time_factor(&self) -> Option<f64> {
        None
    }

    /// Compact factor `Z_n(ω)`; only called when `gaussian_time_factor` is `Some`.
    fn evaluate_compact(&self, _angles: &Angles, _out: &mut [Complex64]) {
        unimplemented!("basis does not factor into time and compact parts")
    }
}

/// Which chart variables an observable reads; used to pick a factored
/// quadrature when the basis separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependence {
    Constant,
    TimeOnly,
    CompactOnly,
    Full,
}

pub trait Observable: Sync {
    fn value(&self, x: &Point) -> Result<Complex64, String>;

    fn dependence(&self) -> Dependence {
        Dependence::Full
    }
}

/// Wraps a closure as an [`Observable`].
pub struct FnObservable<F> {
    f: F,
    dependence: Dependence,
}

impl<F> FnObservable<F>
where
    F: Fn(&Point) -> Complex64 + Sync,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            dependence: Dependence::Full,
        }
    }

    pub fn with_dependence(mut self, dependence: Dependence) -> Self {
        self.dependence = dependence;
        self
    }
}

impl<F> Observable for FnObservable<F>
where
    F: Fn(&Point) -> Complex64 + Sync,
{
    fn value(&self, x: &Point) -> Result<Complex64, String> {
        Ok((self.f)(x))
    }

    fn dependence(&self) -> Dependence {
        self.dependence
    }
}

/// Constant observable `f ≡ c`.
pub struct ConstantObservable(pub Complex64);

impl Observable for ConstantObservable {
    fn value(&self, _x: &Point) -> Result<Complex64, String> {
        Ok(self.0)
    }

    fn dependence(&self) -> Dependence {
        Dependence::Constant
    }
}

/// `|x⟩` as an array of `len × components` coefficients (`n·d + c` layout).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub coefficients: Vec<Complex64>,
    pub components: usize,
    /// The value of `N(x)` used to normalize.
    pub norm_factor: f64,
}

impl CoherentState {
    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficient of basis element `n`, component `c`.
    pub fn coefficient(&self, n: usize, c: usize) -> Complex64 {
        self.coefficients[n * self.components + c]
    }
}

/// `N(x) = Σ_n ‖φ_n(x)‖²`.
pub fn normalization<B: BasisSet + ?Sized>(basis: &B, x: &Point) -> Result<f64, CsError> {
    let mut buf = vec![Complex64::new(0.0, 0.0); basis.len() * basis.components()];
    basis.evaluate(x, &mut buf);
    let n: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(CsError::DegenerateBasis(*x))
    }
}

/// `|x⟩ = N(x)^{-1/2} Σ_n conj(φ_n(x)) |n⟩`.
pub fn coherent_state<B: BasisSet + ?Sized>(basis: &B, x: &Point) -> Result<CoherentState, CsError> {
    let d = basis.components();
    let mut buf = vec![Complex64::new(0.0, 0.0); basis.len() * d];
    basis.evaluate(x, &mut buf);
    let n: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
    if !(n > 0.0 && n.is_finite()) {
        return Err(CsError::DegenerateBasis(*x));
    }
    let s = n.sqrt().recip();
    Ok(CoherentState {
        coefficients: buf.iter().map(|z| z.conj() * s).collect(),
        components: d,
        norm_factor: n,
    })
}

/// `⟨x|A|x⟩`, summed over components for vector coherent states.
pub fn lower_symbol<B: BasisSet + ?Sized>(
    basis: &B,
    a: &ComplexMatrix,
    x: &Point,
) -> Result<Complex64, CsError> {
    if a.dim() != basis.len() {
        return Err(CsError::DimMismatch {
            expected: basis.len(),
            found: a.dim(),
        });
    }
    let cs = coherent_state(basis, x)?;
    let d = cs.components;
    let n = basis.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..d {
        for i in 0..n {
            let left = cs.coefficients[i * d + c].conj();
            if left == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = a.row(i);
            let mut inner = Complex64::new(0.0, 0.0);
            for (j, a_ij) in row.iter().enumerate() {
                inner += a_ij * cs.coefficients[j * d + c];
            }
            acc += left * inner;
        }
    }
    Ok(acc)
}

/// Berezin–Toeplitz quantization `A_f` by quadrature on `grid`.
///
/// The first grid factor is the τ axis; the remaining one or three factors
/// are the compact angles.
pub fn quantize<B, F>(basis: &B, f: &F, grid: &ProductGrid) -> Result<ComplexMatrix, CsError>
where
    B: BasisSet + ?Sized,
    F: Observable + ?Sized,
{
    let (tau_grid, compact) = grid.split_first().ok_or_else(|| {
        CsError::GridMismatch("grid needs a leading τ factor and compact factors".into())
    })?;
    if !matches!(compact.dimension(), 1 | 3) {
        return Err(CsError::GridMismatch(format!(
            "expected 1 or 3 compact factors, got {}",
            compact.dimension()
        )));
    }
    let entries = match basis.gaussian_time_factor() {
        Some(eps) => quantize_factored(basis, f, eps, tau_grid, &compact)?,
        None => quantize_direct(basis, f, grid)?,
    };
    Ok(ComplexMatrix::from_row_major(
        basis.len(),
        basis.label_offset(),
        entries,
    )?)
}

/// `max |A_1 − 𝕀|` entrywise: the defect of `∫ |x⟩⟨x| N(x) μ(dx) = 𝕀`.
pub fn identity_resolution_defect<B: BasisSet + ?Sized>(
    basis: &B,
    grid: &ProductGrid,
) -> Result<f64, CsError> {
    let a = quantize(basis, &ConstantObservable(Complex64::new(1.0, 0.0)), grid)?;
    let id = ComplexMatrix::identity(basis.len(), basis.label_offset())?;
    Ok(a.max_abs_diff(&id)?)
}

fn checked_value<F: Observable + ?Sized>(f: &F, x: &Point) -> Result<Complex64, CsError> {
    let v = f.value(x).map_err(|message| CsError::Observable { point: *x, message })?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(CsError::NonFiniteObservable { point: *x, value: v })
    }
}

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn add_into(mut a: Vec<Complex64>, b: Vec<Complex64>) -> Vec<Complex64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Node-by-node assembly for bases without a time factorization.
fn quantize_direct<B, F>(basis: &B, f: &F, grid: &ProductGrid) -> Result<Vec<Complex64>, CsError>
where
    B: BasisSet + ?Sized,
    F: Observable + ?Sized,
{
    let n = basis.len();
    let d = basis.components();
    let dim = grid.dimension();
    (0..grid.len())
        .into_par_iter()
        .try_fold(
            || (zeros(n * n), vec![0.0; dim], zeros(n * d)),
            |(mut acc, mut coords, mut phi), idx| {
                let w = grid.node(idx, &mut coords);
                let x = Point {
                    tau: coords[0],
                    angles: Angles::from_coords(&coords[1..])?,
                };
                let fx = checked_value(f, &x)? * w;
                basis.evaluate(&x, &mut phi);
                accumulate_gram(&mut acc, &phi, n, d, |_, _| fx);
                Ok((acc, coords, phi))
            },
        )
        .map(|r: Result<_, CsError>| r.map(|(acc, _, _)| acc))
        .try_reduce(|| zeros(n * n), |a, b| Ok(add_into(a, b)))
}

/// `acc[n'·N + n] += scale(n', n) · φ_{n'}† φ_n`.
fn accumulate_gram(
    acc: &mut [Complex64],
    phi: &[Complex64],
    n: usize,
    d: usize,
    scale: impl Fn(usize, usize) -> Complex64,
) {
    for i in 0..n {
        let pi = &phi[i * d..(i + 1) * d];
        if pi.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            continue;
        }
        for j in 0..n {
            let pj = &phi[j * d..(j + 1) * d];
            let mut dot = Complex64::new(0.0, 0.0);
            for (a, b) in pi.iter().zip(pj) {
                dot += a.conj() * b;
            }
            acc[i * n + j] += scale(i, j) * dot;
        }
    }
}

/// Distinct time labels and the class index of each basis element.
fn time_classes<B: BasisSet + ?Sized>(basis: &B) -> (Vec<f64>, Vec<usize>) {
    let mut centers = Vec::new();
    let mut lookup: HashMap<u64, usize> = HashMap::new();
    let class = (0..basis.len())
        .map(|n| {
            let t = basis.time_label(n);
            *lookup.entry(t.to_bits()).or_insert_with(|| {
                centers.push(t);
                centers.len() - 1
            })
        })
        .collect();
    (centers, class)
}

/// Assembly for `φ_n(τ, ω) = g_{t_n}(τ) Z_n(ω)`.
///
/// The τ integral only depends on the pair of Gaussian centres, so it is
/// reduced to a `K × K` table over the distinct labels.
fn quantize_factored<B, F>(
    basis: &B,
    f: &F,
    epsilon: f64,
    tau_grid: &QuadratureGrid1D,
    compact: &ProductGrid,
) -> Result<Vec<Complex64>, CsError>
where
    B: BasisSet + ?Sized,
    F: Observable + ?Sized,
{
    let n = basis.len();
    let d = basis.components();
    let (centers, class) = time_classes(basis);
    let k = centers.len();
    let taus = tau_grid.nodes();
    let tau_w = tau_grid.weights();
    // profiles[j·K + a] = g_a(τ_j)
    let profiles: Vec<f64> = taus
        .iter()
        .flat_map(|&t| centers.iter().map(move |&c| gaussian_profile(epsilon, c, t)))
        .collect();

    let compact_nodes = compact.nodes();
    let first_angles = Angles::from_coords(&compact_nodes[0].0)?;

    // K×K table Σ_j w_j h(τ_j) g_a(τ_j) g_b(τ_j)
    let time_table = |h: &dyn Fn(f64) -> Result<Complex64, CsError>| -> Result<Vec<Complex64>, CsError> {
        let mut table = zeros(k * k);
        for (j, (&t, &w)) in taus.iter().zip(tau_w).enumerate() {
            let hv = h(t)? * w;
            let g = &profiles[j * k..(j + 1) * k];
            for a in 0..k {
                let ga = hv * g[a];
                for b in a..k {
                    table[a * k + b] += ga * g[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                table[a * k + b] = table[b * k + a];
            }
        }
        Ok(table)
    };

    let compact_gram = |weight_fn: &(dyn Fn(&Angles) -> Result<Complex64, CsError> + Sync)| {
        compact_nodes
            .par_iter()
            .try_fold(
                || (zeros(n * n), zeros(n * d)),
                |(mut acc, mut z), (coords, w)| {
                    let angles = Angles::from_coords(coords)?;
                    let scale = weight_fn(&angles)? * *w;
                    basis.evaluate_compact(&angles, &mut z);
                    accumulate_gram(&mut acc, &z, n, d, |_, _| scale);
                    Ok((acc, z))
                },
            )
            .map(|r: Result<_, CsError>| r.map(|(acc, _)| acc))
            .try_reduce(|| zeros(n * n), |a, b| Ok(add_into(a, b)))
    };

    let combine = |table: &[Complex64], gram: &[Complex64]| -> Vec<Complex64> {
        let mut out = zeros(n * n);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = table[class[i] * k + class[j]] * gram[i * n + j];
            }
        }
        out
    };

    match f.dependence() {
        Dependence::Constant | Dependence::TimeOnly => {
            let table = time_table(&|t| {
                checked_value(
                    f,
                    &Point {
                        tau: t,
                        angles: first_angles,
                    },
                )
            })?;
            let gram = compact_gram(&|_| Ok(Complex64::new(1.0, 0.0)))?;
            Ok(combine(&table, &gram))
        }
        Dependence::CompactOnly => {
            let table = time_table(&|_| Ok(Complex64::new(1.0, 0.0)))?;
            let gram = compact_gram(&|angles| {
                checked_value(
                    f,
                    &Point {
                        tau: taus[0],
                        angles: *angles,
                    },
                )
            })?;
            Ok(combine(&table, &gram))
        }
        Dependence::Full => compact_nodes
            .par_iter()
            .try_fold(
                || (zeros(n * n), zeros(n * d)),
                |(mut acc, mut z), (coords, w)| {
                    let angles = Angles::from_coords(coords)?;
                    let table = time_table(&|t| checked_value(f, &Point { tau: t, angles }))?;
                    basis.evaluate_compact(&angles, &mut z);
                    let w = *w;
                    accumulate_gram(&mut acc, &z, n, d, |i, j| table[class[i] * k + class[j]] * w);
                    Ok((acc, z))
                },
            )
            .map(|r: Result<_, CsError>| r.map(|(acc, _)| acc))
            .try_reduce(|| zeros(n * n), |a, b| Ok(add_into(a, b))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{periodic_trapezoid, tau_window_grid, Density};
    use std::f64::consts::PI;

    /// `φ_m = g_m(τ) e^{imθ}` without the factored fast path.
    struct PlainFourier {
        eps: f64,
        m: i64,
    }

    impl BasisSet for PlainFourier {
        fn len(&self) -> usize {
            (2 * self.m + 1) as usize
        }
        fn time_label(&self, n: usize) -> f64 {
            (n as i64 - self.m) as f64
        }
        fn label_offset(&self) -> i64 {
            -self.m
        }
        fn evaluate(&self, x: &Point, out: &mut [Complex64]) {
            let Angles::Circle { theta } = x.angles else { panic!() };
            for (n, o) in out.iter_mut().enumerate() {
                let m = (n as i64 - self.m) as f64;
                *o = Complex64::from_polar(gaussian_profile(self.eps, m, x.tau), m * theta);
            }
        }
    }

    /// Same family with the factored path enabled.
    struct FactoredFourier(PlainFourier);

    impl BasisSet for FactoredFourier {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn time_label(&self, n: usize) -> f64 {
            self.0.time_label(n)
        }
        fn label_offset(&self) -> i64 {
            self.0.label_offset()
        }
        fn evaluate(&self, x: &Point, out: &mut [Complex64]) {
            self.0.evaluate(x, out)
        }
        fn gaussian_time_factor(&self) -> Option<f64> {
            Some(self.0.eps)
        }
        fn evaluate_compact(&self, angles: &Angles, out: &mut [Complex64]) {
            let Angles::Circle { theta } = *angles else { panic!() };
            for (n, o) in out.iter_mut().enumerate() {
                let m = (n as i64 - self.0.m) as f64;
                *o = Complex64::from_polar(1.0, m * theta);
            }
        }
    }

    fn grid(m: usize, eps: f64) -> ProductGrid {
        ProductGrid::new(
            vec![
                tau_window_grid(m, eps, 20).unwrap(),
                periodic_trapezoid(4 * m + 5).unwrap(),
            ],
            Density::Flat,
            1.0 / (2.0 * PI),
        )
        .unwrap()
    }

    #[test]
    fn factored_and_direct_paths_agree() {
        let plain = PlainFourier { eps: 0.3, m: 3 };
        let fact = FactoredFourier(PlainFourier { eps: 0.3, m: 3 });
        let g = grid(3, 0.3);
        let f = FnObservable::new(|x: &Point| {
            let Angles::Circle { theta } = x.angles else { unreachable!() };
            Complex64::new(x.tau * theta.cos() + (2.0 * theta).sin(), x.tau * x.tau * 0.1)
        });
        let a = quantize(&plain, &f, &g).unwrap();
        let b = quantize(&fact, &f, &g).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        let tau_only = FnObservable::new(|x: &Point| Complex64::new(x.tau, 0.0))
            .with_dependence(Dependence::TimeOnly);
        let a = quantize(&plain, &tau_only, &g).unwrap();
        let b = quantize(&fact, &tau_only, &g).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        let angle_only = FnObservable::new(|x: &Point| {
            let Angles::Circle { theta } = x.angles else { unreachable!() };
            Complex64::from_polar(1.0, theta)
        })
        .with_dependence(Dependence::CompactOnly);
        let a = quantize(&plain, &angle_only, &g).unwrap();
        let b = quantize(&fact, &angle_only, &g).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn unit_observable_reproduces_identity() {
        let b = FactoredFourier(PlainFourier { eps: 0.1, m: 10 });
        assert!(identity_resolution_defect(&b, &grid(10, 0.1)).unwrap() <= 1e-10);
        let p = PlainFourier { eps: 0.5, m: 2 };
        assert!(identity_resolution_defect(&p, &grid(2, 0.5)).unwrap() <= 1e-10);
    }

    #[test]
    fn single_gaussian_resolves_identity() {
        let b = PlainFourier { eps: 1.0, m: 0 };
        assert!(identity_resolution_defect(&b, &grid(0, 1.0)).unwrap() <= 1e-12);
    }

    #[test]
    fn exp_i_theta_is_a_single_off_diagonal() {
        // ∫ g_m g_{m+1} dτ = e^{−ε/4}
        let eps = 0.1;
        let b = FactoredFourier(PlainFourier { eps, m: 5 });
        let f = FnObservable::new(|x: &Point| {
            let Angles::Circle { theta } = x.angles else { unreachable!() };
            Complex64::from_polar(1.0, theta)
        });
        let a = quantize(&b, &f, &grid(5, eps)).unwrap();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let expect = if i == j + 1 { (-eps / 4.0).exp() } else { 0.0 };
                assert!((a[(i, j)] - expect).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn coherent_state_is_normalized_and_periodic() {
        let b = PlainFourier { eps: 0.4, m: 6 };
        for &(t, th) in &[(0.0, 0.0), (1.3, 2.0), (-4.2, 5.9), (2.0, -1.0)] {
            let cs = coherent_state(&b, &Point::circle(t, th)).unwrap();
            assert!((cs.norm() - 1.0).abs() < 1e-12);
            let cs2 = coherent_state(&b, &Point::circle(t, th + 2.0 * PI)).unwrap();
            for (a, c) in cs.coefficients.iter().zip(&cs2.coefficients) {
                assert!((a - c).norm() < 1e-12);
            }
        }
        let cs = coherent_state(&b, &Point::circle(2.0, 0.0)).unwrap();
        let peak = (0..b.len())
            .max_by(|&i, &j| cs.coefficients[i].norm().total_cmp(&cs.coefficients[j].norm()))
            .unwrap();
        assert_eq!(peak as i64 - 6, 2);
    }

    #[test]
    fn normalization_is_phase_invariant() {
        struct Phased(PlainFourier, f64);
        impl BasisSet for Phased {
            fn len(&self) -> usize {
                self.0.len()
            }
            fn time_label(&self, n: usize) -> f64 {
                self.0.time_label(n)
            }
            fn evaluate(&self, x: &Point, out: &mut [Complex64]) {
                self.0.evaluate(x, out);
                for o in out.iter_mut() {
                    *o *= Complex64::from_polar(1.0, self.1);
                }
            }
        }
        let x = Point::circle(0.7, 1.1);
        let a = normalization(&PlainFourier { eps: 1.0, m: 4 }, &x).unwrap();
        let b = normalization(&Phased(PlainFourier { eps: 1.0, m: 4 }, 0.9), &x).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn far_point_is_degenerate() {
        let b = PlainFourier { eps: 1.0, m: 1 };
        let x = Point::circle(1e3, 0.0);
        assert!(matches!(normalization(&b, &x), Err(CsError::DegenerateBasis(_))));
        assert!(matches!(coherent_state(&b, &x), Err(CsError::DegenerateBasis(_))));
    }

    #[test]
    fn lower_symbol_examples() {
        let b = FactoredFourier(PlainFourier { eps: 0.5, m: 5 });
        let g = grid(5, 0.5);
        let id = ComplexMatrix::identity(b.len(), -5).unwrap();
        let zero = ComplexMatrix::zeros(b.len(), -5).unwrap();
        let x = Point::circle(0.4, 1.7);
        assert!((lower_symbol(&b, &id, &x).unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(lower_symbol(&b, &zero, &x).unwrap(), Complex64::new(0.0, 0.0));
        let tau = FnObservable::new(|x: &Point| Complex64::new(x.tau, 0.0));
        let a = quantize(&b, &tau, &g).unwrap();
        for m0 in -3..=3 {
            let v = lower_symbol(&b, &a, &Point::circle(m0 as f64, 0.3)).unwrap();
            assert!(v.im.abs() < 1e-12);
            assert!((v.re - m0 as f64).abs() <= 1.0);
        }
        let small = ComplexMatrix::identity(3, 0).unwrap();
        assert!(matches!(
            lower_symbol(&b, &small, &x),
            Err(CsError::DimMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_observable_is_reported() {
        let b = FactoredFourier(PlainFourier { eps: 0.5, m: 2 });
        let f = FnObservable::new(|x: &Point| Complex64::new(1.0 / (x.tau - x.tau), 0.0));
        assert!(matches!(
            quantize(&b, &f, &grid(2, 0.5)),
            Err(CsError::NonFiniteObservable { .. })
        ));
        let p = PlainFourier { eps: 0.5, m: 2 };
        assert!(matches!(
            quantize(&p, &f, &grid(2, 0.5)),
            Err(CsError::NonFiniteObservable { .. })
        ));
    }

    #[test]
    fn grid_without_compact_factor_is_rejected() {
        let b = PlainFourier { eps: 0.5, m: 2 };
        let g = ProductGrid::new(vec![tau_window_grid(2, 0.5, 4).unwrap()], Density::Flat, 1.0)
            .unwrap();
        assert!(matches!(
            identity_resolution_defect(&b, &g),
            Err(CsError::GridMismatch(_))
        ));
    }
}

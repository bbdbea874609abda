//! One-dimensional rules and their tensor products.
//!
//! The τ axis is covered by a composite Gauss–Legendre window, periodic angles
//! by the uniform trapezoid rule, and the polar angles of S³ by plain
//! Gauss–Legendre with the `sin²χ sinθ` density folded into the weights.

use std::f64::consts::PI;

use super::NumericsError;

/// Number of standard deviations (in units of `1/√ε`) kept on each side of
/// the label window.
pub const TAU_TAIL_WIDTH: f64 = 10.0;

/// Default Gauss–Legendre nodes per unit-length τ panel.
pub const DEFAULT_NODES_PER_UNIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    PeriodicCircle,
}

impl Domain {
    /// `(lo, hi)` for a finite interval, `(0, 2π)` for the circle.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Interval { lo, hi } => (lo, hi),
            Domain::PeriodicCircle => (0.0, 2.0 * PI),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
}

impl QuadratureGrid1D {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex(
        &self,
        f: impl Fn(f64) -> num_complex::Complex64,
    ) -> num_complex::Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Legendre nodes and weights on [−1, 1] by Newton iteration on `P_n`.
fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Legendre rule on `[a, b]`; exact for degree ≤ 2n − 1.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureGrid1D, NumericsError> {
    if n == 0 {
        return Err(NumericsError::InvalidCount);
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    let (x, w) = legendre_reference(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureGrid1D {
        nodes: x.iter().map(|t| mid + half * t).collect(),
        weights: w.iter().map(|wi| half * wi).collect(),
        domain: Domain::Interval { lo: a, hi: b },
    })
}

/// Uniform trapezoid rule on `[0, 2π)`: nodes `2πk/n`, weights `2π/n`.
pub fn periodic_trapezoid(n: usize) -> Result<QuadratureGrid1D, NumericsError> {
    if n == 0 {
        return Err(NumericsError::InvalidCount);
    }
    let h = 2.0 * PI / n as f64;
    Ok(QuadratureGrid1D {
        nodes: (0..n).map(|k| k as f64 * h).collect(),
        weights: vec![h; n],
        domain: Domain::PeriodicCircle,
    })
}

/// Half-width `T = M + 10/√ε` of the τ window for labels in `[−M, M]`.
pub fn tau_window_half_width(m: usize, epsilon: f64) -> f64 {
    m as f64 + TAU_TAIL_WIDTH / epsilon.sqrt()
}

/// Composite Gauss–Legendre grid on `[−T, T]`, `T = M + 10/√ε`.
pub fn tau_window_grid(
    m: usize,
    epsilon: f64,
    nodes_per_unit: usize,
) -> Result<QuadratureGrid1D, NumericsError> {
    tau_window_grid_span(-(m as f64), m as f64, epsilon, nodes_per_unit)
}

/// Composite Gauss–Legendre grid covering `[lo − 10/√ε, hi + 10/√ε]`.
///
/// The window is cut into `⌈length⌉` equal panels, each at most one unit long.
pub fn tau_window_grid_span(
    lo: f64,
    hi: f64,
    epsilon: f64,
    nodes_per_unit: usize,
) -> Result<QuadratureGrid1D, NumericsError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(NumericsError::InvalidParameter(format!(
            "epsilon must be a positive finite number, got {epsilon}"
        )));
    }
    if nodes_per_unit == 0 {
        return Err(NumericsError::InvalidCount);
    }
    let tail = TAU_TAIL_WIDTH / epsilon.sqrt();
    let a = lo - tail;
    let b = hi + tail;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    let panels = ((b - a).ceil() as usize).max(1);
    let width = (b - a) / panels as f64;
    let (x, w) = legendre_reference(nodes_per_unit);
    let mut nodes = Vec::with_capacity(panels * nodes_per_unit);
    let mut weights = Vec::with_capacity(panels * nodes_per_unit);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (t, wt) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * width * t);
            weights.push(0.5 * width * wt);
        }
    }
    Ok(QuadratureGrid1D {
        nodes,
        weights,
        domain: Domain::Interval { lo: a, hi: b },
    })
}

/// Extra density applied on top of the tensor-product weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Flat,
    /// `sin²(c[k]) · sin(c[k+1])` for the hyperspherical angles starting at factor `k`.
    Hyperspherical { first: usize },
}

/// Tensor product of one-dimensional grids with an optional measure density
/// and overall scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    factors: Vec<QuadratureGrid1D>,
    density: Density,
    scale: f64,
}

impl ProductGrid {
    pub fn new(
        factors: Vec<QuadratureGrid1D>,
        density: Density,
        scale: f64,
    ) -> Result<Self, NumericsError> {
        if factors.is_empty() || factors.len() > 4 {
            return Err(NumericsError::InvalidParameter(format!(
                "a product grid takes 1 to 4 factors, got {}",
                factors.len()
            )));
        }
        if let Density::Hyperspherical { first } = density {
            if first + 3 > factors.len() {
                return Err(NumericsError::InvalidParameter(
                    "hyperspherical density needs three angle factors".into(),
                ));
            }
        }
        if !(scale > 0.0) {
            return Err(NumericsError::InvalidParameter(format!(
                "grid scale must be positive, got {scale}"
            )));
        }
        Ok(Self {
            factors,
            density,
            scale,
        })
    }

    pub fn factors(&self) -> &[QuadratureGrid1D] {
        &self.factors
    }

    pub fn density(&self) -> Density {
        self.density
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Places `grid` in front of the existing factors (used for the τ axis).
    pub fn prepend(&self, grid: QuadratureGrid1D) -> Result<Self, NumericsError> {
        let mut factors = Vec::with_capacity(self.factors.len() + 1);
        factors.push(grid);
        factors.extend(self.factors.iter().cloned());
        let density = match self.density {
            Density::Flat => Density::Flat,
            Density::Hyperspherical { first } => Density::Hyperspherical { first: first + 1 },
        };
        Self::new(factors, density, self.scale)
    }

    /// Splits off the leading factor; the remainder keeps the density and scale.
    pub fn split_first(&self) -> Option<(&QuadratureGrid1D, ProductGrid)> {
        if self.factors.len() < 2 {
            return None;
        }
        let density = match self.density {
            Density::Flat => Density::Flat,
            Density::Hyperspherical { first } if first >= 1 => {
                Density::Hyperspherical { first: first - 1 }
            }
            Density::Hyperspherical { .. } => return None,
        };
        let rest = ProductGrid {
            factors: self.factors[1..].to_vec(),
            density,
            scale: self.scale,
        };
        Some((&self.factors[0], rest))
    }

    /// Node coordinates and combined weight for flat index `idx`
    /// (last factor varies fastest).
    pub fn node(&self, mut idx: usize, coords: &mut [f64]) -> f64 {
        let mut w = self.scale;
        for (k, f) in self.factors.iter().enumerate().rev() {
            let i = idx % f.len();
            idx /= f.len();
            coords[k] = f.nodes[i];
            w *= f.weights[i];
        }
        if let Density::Hyperspherical { first } = self.density {
            let s = coords[first].sin();
            w *= s * s * coords[first + 1].sin();
        }
        w
    }

    /// All nodes as `(coords, weight)` pairs.
    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        let d = self.dimension();
        (0..self.len())
            .map(|i| {
                let mut c = vec![0.0; d];
                let w = self.node(i, &mut c);
                (c, w)
            })
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        let mut c = vec![0.0; self.dimension()];
        (0..self.len()).map(|i| self.node(i, &mut c)).sum()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let mut c = vec![0.0; self.dimension()];
        (0..self.len())
            .map(|i| {
                let w = self.node(i, &mut c);
                w * f(&c)
            })
            .sum()
    }
}

/// Chart `ξ = (cosχ, sinχ sinθ cosφ, sinχ sinθ sinφ, sinχ cosθ)` on the unit
/// S³ with `χ, θ` Gauss–Legendre on `[0, π]` and `φ` periodic. Total weight `2π²`.
pub fn s3_product_grid(
    n_chi: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<ProductGrid, NumericsError> {
    let chi = gauss_legendre(n_chi, 0.0, PI)?;
    let theta = gauss_legendre(n_theta, 0.0, PI)?;
    let phi = periodic_trapezoid(n_phi)?;
    ProductGrid::new(vec![chi, theta, phi], Density::Hyperspherical { first: 0 }, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn two_point_rule_is_cubic_exact() {
        let g = gauss_legendre(2, 0.0, 1.0).unwrap();
        assert!((g.integrate(|x| x * x) - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.integrate(|x| x * x * x) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn midpoint_rule() {
        let g = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_eq!(g.nodes(), &[0.0]);
        assert!((g.integrate(|_| 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sin_squared_on_half_period() {
        // ∫₀^π sin²χ dχ = [χ/2 − sin2χ/4]₀^π = π/2
        let g = gauss_legendre(32, 0.0, PI).unwrap();
        assert!((g.integrate(|x| x.sin().powi(2)) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_degree_exactness() {
        for n in [5usize, 17, 40] {
            let g = gauss_legendre(n, -1.0, 2.0).unwrap();
            let deg = 2 * n - 1;
            let exact = (2f64.powi(deg as i32 + 1) - (-1f64).powi(deg as i32 + 1)) / (deg as f64 + 1.0);
            let got = g.integrate(|x| x.powi(deg as i32));
            assert!((got - exact).abs() <= 1e-12 * exact.abs(), "n={n}: {got} vs {exact}");
        }
    }

    #[test]
    fn legendre_nodes_increase_and_weights_positive() {
        for n in 1..=64 {
            let g = gauss_legendre(n, 0.0, 1.0).unwrap();
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(g.weights().iter().all(|&w| w > 0.0));
            assert!((g.total_weight() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_errors() {
        assert!(matches!(gauss_legendre(0, 0.0, 1.0), Err(NumericsError::InvalidCount)));
        assert!(matches!(
            gauss_legendre(3, 1.0, 1.0),
            Err(NumericsError::InvalidInterval { .. })
        ));
        assert!(matches!(
            gauss_legendre(3, 2.0, 1.0),
            Err(NumericsError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn trapezoid_fourier_exactness() {
        let g = periodic_trapezoid(8).unwrap();
        let z = g.integrate_complex(|t| Complex64::new(0.0, 3.0 * t).exp());
        assert!(z.norm() < 1e-14);
        assert!((g.total_weight() - 2.0 * PI).abs() < 1e-14);
        let g4 = periodic_trapezoid(4).unwrap();
        assert!((g4.integrate(|t| t.cos().powi(2)) - PI).abs() < 1e-14);
        assert!(matches!(periodic_trapezoid(0), Err(NumericsError::InvalidCount)));
    }

    #[test]
    fn trapezoid_all_modes_below_n() {
        let n = 9;
        let g = periodic_trapezoid(n).unwrap();
        for k in -(n as i32 - 1)..(n as i32) {
            let z = g.integrate_complex(|t| Complex64::new(0.0, k as f64 * t).exp());
            let expect = if k == 0 { 2.0 * PI } else { 0.0 };
            assert!((z - expect).norm() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn tau_window_normalized_gaussian() {
        let g = tau_window_grid(0, 1.0, DEFAULT_NODES_PER_UNIT).unwrap();
        let v = g.integrate(|t| (1.0 / PI).sqrt() * (-t * t).exp());
        assert!((v - 1.0).abs() < 1e-12);
        let g1 = tau_window_grid(1, 1.0, DEFAULT_NODES_PER_UNIT).unwrap();
        let mean = g1.integrate(|t| t * (1.0 / PI).sqrt() * (-(t - 1.0) * (t - 1.0)).exp());
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tau_window_bounds() {
        let t = tau_window_half_width(2, 0.1);
        assert!((t - 33.6227766016838).abs() < 1e-12);
        let g = tau_window_grid(2, 0.1, 4).unwrap();
        let (lo, hi) = g.domain().bounds();
        assert!((hi - t).abs() < 1e-12 && (lo + t).abs() < 1e-12);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!((g.total_weight() - 2.0 * t).abs() < 1e-12 * t);
        assert!(tau_window_grid(2, 0.0, 4).is_err());
        assert!(tau_window_grid(2, -1.0, 4).is_err());
    }

    #[test]
    fn s3_volume_and_moments() {
        let g = s3_product_grid(32, 32, 32).unwrap();
        let vol = 2.0 * PI * PI;
        assert!((g.total_weight() - vol).abs() < 1e-10);
        let c2 = g.integrate(|c| c[0].cos().powi(2));
        assert!((c2 - vol / 4.0).abs() < 1e-10);
        let c1 = g.integrate(|c| c[0].cos());
        assert!(c1.abs() < 1e-12);
    }

    #[test]
    fn product_grid_split_and_prepend() {
        let s3 = s3_product_grid(4, 4, 4).unwrap();
        let tau = gauss_legendre(3, -1.0, 1.0).unwrap();
        let full = s3.prepend(tau.clone()).unwrap();
        assert_eq!(full.dimension(), 4);
        assert_eq!(full.density(), Density::Hyperspherical { first: 1 });
        assert!((full.total_weight() - s3.total_weight() * 2.0).abs() < 1e-12);
        let (head, rest) = full.split_first().unwrap();
        assert_eq!(head, &tau);
        assert_eq!(rest, s3);
    }

    #[test]
    fn product_grid_rejects_bad_shapes() {
        let g = periodic_trapezoid(3).unwrap();
        assert!(ProductGrid::new(vec![], Density::Flat, 1.0).is_err());
        assert!(ProductGrid::new(vec![g.clone(); 5], Density::Flat, 1.0).is_err());
        assert!(ProductGrid::new(vec![g.clone(); 2], Density::Hyperspherical { first: 0 }, 1.0).is_err());
        assert!(ProductGrid::new(vec![g], Density::Flat, 0.0).is_err());
    }

    #[test]
    fn flat_product_of_circle_and_interval() {
        let g = ProductGrid::new(
            vec![gauss_legendre(4, 0.0, 2.0).unwrap(), periodic_trapezoid(6).unwrap()],
            Density::Flat,
            1.0 / (2.0 * PI),
        )
        .unwrap();
        assert!((g.total_weight() - 2.0).abs() < 1e-13);
    }
}

//! Composite Gauss-Legendre rule on `(0, pi)` and the sine basis sampled at its nodes.

use std::f64::consts::PI;

/// Points per panel.
pub const PANEL_POINTS: usize = 8;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n` from the Chebyshev guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite rule on `(0, pi)` with [`PANEL_POINTS`] nodes per panel, plus
/// `sin(k x_j)` for `k = 1..=n_modes`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    n_modes: usize,
    /// Row-major `[k-1][j]`.
    sines: Vec<f64>,
}

impl Quadrature {
    pub fn new(panels: usize, n_modes: usize) -> Self {
        let (ref_nodes, ref_weights) = gauss_legendre(PANEL_POINTS);
        let h = PI / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_POINTS);
        let mut weights = Vec::with_capacity(panels * PANEL_POINTS);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        let mut sines = Vec::with_capacity(n_modes * nodes.len());
        for k in 1..=n_modes {
            sines.extend(nodes.iter().map(|x| (k as f64 * x).sin()));
        }
        Self { nodes, weights, n_modes, sines }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `sin(k x_j)` over the nodes, for `1 <= k <= n_modes`.
    pub fn sine(&self, k: usize) -> &[f64] {
        let n = self.len();
        &self.sines[(k - 1) * n..k * n]
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// `sum_k c_k sin(k x_j)` into `out`.
    pub fn synthesize(&self, coeffs: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for (o, s) in out.iter_mut().zip(self.sine(k + 1)) {
                *o += c * s;
            }
        }
    }

    /// Sine coefficients `(2/pi) int f sin(kx)` of nodal values.
    pub fn analyze(&self, values: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let s: f64 = self
                .sine(k + 1)
                .iter()
                .zip(values)
                .zip(&self.weights)
                .map(|((s, f), w)| s * f * w)
                .sum();
            *o = 2.0 / PI * s;
        }
    }

    /// `int f phi` with `phi = sin(x) / 2`.
    pub fn against_phi(&self, values: &[f64]) -> f64 {
        0.5 * self
            .sine(1)
            .iter()
            .zip(values)
            .zip(&self.weights)
            .map(|((s, f), w)| s * f * w)
            .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rule_is_exact_to_degree_fifteen() {
        let (x, w) = gauss_legendre(PANEL_POINTS);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..16 {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((got - exact).abs() < 1e-14, "degree {deg}: {got} vs {exact}");
        }
        // node symmetry and ordering
        for i in 0..PANEL_POINTS {
            assert!((x[i] + x[PANEL_POINTS - 1 - i]).abs() < 1e-15);
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn sine_orthogonality() {
        // Four panels per period of cos(32x), the highest product, keep the rule at 1e-13.
        let q = Quadrature::new(64, 16);
        for j in 1..=16 {
            for k in 1..=16 {
                let prod: Vec<f64> = q.sine(j).iter().zip(q.sine(k)).map(|(a, b)| a * b).collect();
                let expected = if j == k { PI / 2.0 } else { 0.0 };
                assert!((q.integrate(&prod) - expected).abs() < 1e-13, "({j},{k})");
            }
        }
    }

    #[test]
    fn analyze_inverts_synthesize() {
        let q = Quadrature::new(32, 8);
        let c = [0.3, -1.0, 0.0, 2.5, 0.0, 0.0, 1e-3, -0.25];
        let mut u = vec![0.0; q.len()];
        q.synthesize(&c, &mut u);
        let mut back = [0.0; 8];
        q.analyze(&u, &mut back);
        for (a, b) in c.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_has_unit_mass() {
        let q = Quadrature::new(4, 1);
        assert!((q.against_phi(&vec![1.0; q.len()]) - 1.0).abs() < 1e-14);
    }
}

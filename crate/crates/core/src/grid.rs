//! Uniform truncation of the real line and the discrete calculus used by the
//! solver and the diagnostics.

use crate::error::{Error, Result};

/// Nodes `x_i = −L + i·dx`, `i = 0..N`, with `dx = 2L/(N − 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    half_length: f64,
    n: usize,
    dx: f64,
}

pub const MIN_NODES: usize = 8;

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::domain(format!("grid half-length must be > 0, got {half_length}")));
        }
        if n < MIN_NODES {
            return Err(Error::domain(format!("grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        Ok(Self {
            half_length,
            n,
            dx: 2.0 * half_length / (n - 1) as f64,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Node coordinate. Symmetric nodes are exact negatives of each other.
    pub fn x(&self, i: usize) -> f64 {
        let j = self.n - 1 - i;
        if i <= j {
            -self.half_length + i as f64 * self.dx
        } else {
            self.half_length - j as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| f(self.x(i))).collect()
    }

    pub(crate) fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.n {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.n,
                found: f.len(),
            })
        }
    }
}

/// Composite trapezoid rule over `[−L, L]`.
pub fn integrate(f: &[f64], g: &Grid) -> Result<f64> {
    g.check(f)?;
    Ok(trapezoid(f, g.dx()))
}

pub(crate) fn trapezoid(f: &[f64], dx: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = f[1..n - 1].iter().sum();
    dx * (inner + 0.5 * (f[0] + f[n - 1]))
}

/// Trapezoid integral of `f(samples)` without materialising the field.
pub(crate) fn trapezoid_map(n: usize, dx: f64, mut f: impl FnMut(usize) -> f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut inner = 0.0;
    for i in 1..n - 1 {
        inner += f(i);
    }
    dx * (inner + 0.5 * (f(0) + f(n - 1)))
}

/// Second-order derivative: central differences inside, one-sided
/// three-point stencils at both ends.
pub fn ddx(f: &[f64], g: &Grid) -> Result<Vec<f64>> {
    g.check(f)?;
    Ok(ddx_raw(f, g.dx()))
}

pub(crate) fn ddx_raw(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    let h2 = 2.0 * dx;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / h2;
    }
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / h2;
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / h2;
    out
}

/// Second derivative: three-point stencil inside, four-point one-sided
/// stencils at the ends (second order everywhere).
pub fn d2dx2(f: &[f64], g: &Grid) -> Result<Vec<f64>> {
    g.check(f)?;
    Ok(d2dx2_raw(f, g.dx()))
}

pub(crate) fn d2dx2_raw(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    let h2 = dx * dx;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    out
}

/// Discrete L¹, L², L∞ norms and the H¹ seminorm (L² norm of the derivative).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub h1_semi: f64,
}

pub fn norms(f: &[f64], g: &Grid) -> Result<Norms> {
    g.check(f)?;
    let dx = g.dx();
    let l1 = trapezoid_map(f.len(), dx, |i| f[i].abs());
    let l2 = trapezoid_map(f.len(), dx, |i| f[i] * f[i]).sqrt();
    let linf = f.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let df = ddx_raw(f, dx);
    let h1_semi = trapezoid_map(f.len(), dx, |i| df[i] * df[i]).sqrt();
    Ok(Norms { l1, l2, linf, h1_semi })
}

/// Discrete extrema; ties resolve to the lowest index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: usize,
    pub max: f64,
    pub argmax: usize,
}

pub fn extrema(f: &[f64]) -> Result<Extrema> {
    let first = *f.first().ok_or(Error::Shape { expected: 1, found: 0 })?;
    let mut e = Extrema {
        min: first,
        argmin: 0,
        max: first,
        argmax: 0,
    };
    for (i, &x) in f.iter().enumerate().skip(1) {
        if x < e.min {
            e.min = x;
            e.argmin = i;
        }
        if x > e.max {
            e.max = x;
            e.argmax = i;
        }
    }
    Ok(e)
}

/// Trapezoid integral of `f` over `[a, b] ⊂ [−L, L]` with linear
/// interpolation of `f` at window edges that fall between nodes.
pub fn interval_integral(f: &[f64], g: &Grid, a: f64, b: f64) -> Result<f64> {
    g.check(f)?;
    let l = g.half_length();
    let slack = 1e-12 * l;
    if !(a <= b) || a < -l - slack || b > l + slack {
        return Err(Error::domain(format!(
            "integration window [{a}, {b}] does not fit the domain [-{l}, {l}]"
        )));
    }
    let a = a.max(-l);
    let b = b.min(l);
    let dx = g.dx();
    let n = g.len();
    // Fractional node positions of the window edges.
    let pa = ((a + l) / dx).clamp(0.0, (n - 1) as f64);
    let pb = ((b + l) / dx).clamp(0.0, (n - 1) as f64);
    let interp = |p: f64| {
        let i = (p.floor() as usize).min(n - 2);
        let w = p - i as f64;
        (1.0 - w) * f[i] + w * f[i + 1]
    };
    let ia = pa.ceil() as usize;
    let ib = pb.floor() as usize;
    if ia > ib {
        // Both edges inside one cell.
        return Ok(0.5 * (interp(pa) + interp(pb)) * (pb - pa) * dx);
    }
    let mut sum = 0.0;
    for i in ia..ib {
        sum += 0.5 * (f[i] + f[i + 1]) * dx;
    }
    sum += 0.5 * (interp(pa) + f[ia]) * (ia as f64 - pa) * dx;
    sum += 0.5 * (f[ib] + interp(pb)) * (pb - ib as f64) * dx;
    Ok(sum)
}

/// Integral over the window `Ω_k = (−k−1, k+1)`.
pub fn window_integral(f: &[f64], g: &Grid, k: usize) -> Result<f64> {
    let w = k as f64 + 1.0;
    if w > g.half_length() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "window k = {k} needs half-length {w} > L = {}",
            g.half_length()
        )));
    }
    interval_integral(f, g, -w, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_geometry() {
        let g = Grid::new(3.0, 13).unwrap();
        assert_eq!(g.dx() * 12.0, 6.0);
        let x = g.nodes();
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        for i in 0..13 {
            assert_eq!(x[i], -x[12 - i]);
        }
        assert_eq!(x[6], 0.0);
        assert!(Grid::new(1.0, 7).is_err());
        assert!(Grid::new(0.0, 10).is_err());
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::new(10.0, 101).unwrap();
        assert!((integrate(&vec![1.0; 101], &g).unwrap() - 20.0).abs() < 1e-12);
        assert!(integrate(&g.nodes(), &g).unwrap().abs() < 1e-12);
        assert!(integrate(&[1.0; 3], &g).is_err());

        // Closed-form trapezoid sum for x² on [−1, 1]: 2/3 + dx²/3.
        let g = Grid::new(1.0, 101).unwrap();
        let f = g.sample(|x| x * x);
        let dx = g.dx();
        let exact_trap = 2.0 / 3.0 + dx * dx / 3.0;
        assert!((integrate(&f, &g).unwrap() - exact_trap).abs() < 1e-14);
    }

    #[test]
    fn ddx_examples() {
        let g = Grid::new(2.0, 41).unwrap();
        assert!(ddx(&vec![3.5; 41], &g).unwrap().iter().all(|d| d.abs() < 1e-13));
        assert!(ddx(&g.nodes(), &g).unwrap().iter().all(|d| (d - 1.0).abs() < 1e-12));

        // Quadratic: exact everywhere (second-order stencils).
        let q = g.sample(|x| 3.0 * x * x - x + 2.0);
        let dq = ddx(&q, &g).unwrap();
        for (i, d) in dq.iter().enumerate() {
            assert!((d - (6.0 * g.x(i) - 1.0)).abs() < 1e-11);
        }

        let err = |n: usize| {
            let g = Grid::new(3.0, n).unwrap();
            let d = ddx(&g.sample(f64::sin), &g).unwrap();
            (0..n).map(|i| (d[i] - g.x(i).cos()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(101) / err(201);
        assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn d2dx2_exact_on_cubics() {
        let g = Grid::new(1.0, 21).unwrap();
        let f = g.sample(|x| x * x * x - 2.0 * x * x);
        let d2 = d2dx2(&f, &g).unwrap();
        for (i, d) in d2.iter().enumerate() {
            assert!((d - (6.0 * g.x(i) - 4.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn norms_examples() {
        let g = Grid::new(10.0, 201).unwrap();
        assert_eq!(norms(&vec![0.0; 201], &g).unwrap(), Norms::default());
        let n = norms(&vec![1.0; 201], &g).unwrap();
        assert!((n.l1 - 20.0).abs() < 1e-12);
        assert!((n.l2 - 20f64.sqrt()).abs() < 1e-12);
        assert_eq!(n.linf, 1.0);
        assert!(n.h1_semi.abs() < 1e-12);

        let l = 10.0;
        let err = |n: usize| {
            let g = Grid::new(l, n).unwrap();
            let f = g.sample(|x| (std::f64::consts::PI * x / l).sin());
            (norms(&f, &g).unwrap().l2.powi(2) - l).abs()
        };
        assert!(err(401) < 1e-10);
        assert!(err(401) <= err(51) + 1e-14);
    }

    #[test]
    fn extrema_examples() {
        assert_eq!(
            extrema(&[3.0, 3.0, 3.0]).unwrap(),
            Extrema { min: 3.0, argmin: 0, max: 3.0, argmax: 0 }
        );
        assert_eq!(
            extrema(&[1.0, 0.0, 2.0]).unwrap(),
            Extrema { min: 0.0, argmin: 1, max: 2.0, argmax: 2 }
        );
        assert!(extrema(&[]).is_err());
    }

    #[test]
    fn window_examples() {
        let g = Grid::new(10.0, 1001).unwrap();
        let one = vec![1.0; 1001];
        assert!((window_integral(&one, &g, 0).unwrap() - 2.0).abs() < 1e-12);
        assert!((window_integral(&one, &g, 2).unwrap() - 6.0).abs() < 1e-12);
        let sq = g.sample(|x| x * x);
        assert!((window_integral(&sq, &g, 1).unwrap() - 16.0 / 3.0).abs() < 1e-3);
        assert!(window_integral(&one, &g, 10).is_err());

        // Edges between nodes: N = 1000 puts ±1 off the grid.
        let g = Grid::new(10.0, 1000).unwrap();
        let one = vec![1.0; 1000];
        assert!((window_integral(&one, &g, 0).unwrap() - 2.0).abs() < 1e-12);
        let lin = g.sample(|x| x + 1.0);
        assert!((window_integral(&lin, &g, 0).unwrap() - 2.0).abs() < 1e-12);
        let sq = g.sample(|x| x * x);
        assert!((window_integral(&sq, &g, 1).unwrap() - 16.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn full_window_equals_integrate() {
        let g = Grid::new(5.0, 77).unwrap();
        let f = g.sample(|x| (x * 0.7).cos() + x * x * 0.1);
        let a = window_integral(&f, &g, 4).unwrap();
        let b = integrate(&f, &g).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn integrate_is_linear(
            alpha in -5.0f64..5.0,
            beta in -5.0f64..5.0,
            f in proptest::collection::vec(-10.0f64..10.0, 40),
            h in proptest::collection::vec(-10.0f64..10.0, 40),
        ) {
            let g = Grid::new(2.0, 40).unwrap();
            let mix: Vec<f64> = f.iter().zip(&h).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = integrate(&mix, &g).unwrap();
            let rhs = alpha * integrate(&f, &g).unwrap() + beta * integrate(&h, &g).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn extrema_match_linear_scan(f in proptest::collection::vec(-100.0f64..100.0, 1..60)) {
            let e = extrema(&f).unwrap();
            let mut min = (f[0], 0);
            let mut max = (f[0], 0);
            for (i, &x) in f.iter().enumerate() {
                if x < min.0 { min = (x, i); }
                if x > max.0 { max = (x, i); }
            }
            prop_assert_eq!((e.min, e.argmin, e.max, e.argmax), (min.0, min.1, max.0, max.1));
        }
    }
}

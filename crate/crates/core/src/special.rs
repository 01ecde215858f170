//! Bessel, modified Bessel and Struve functions of low integer order, plus
//! Gauss-Legendre rules.
//!
//! The integer-order Bessel functions use their integral representations
//! over a full period, where the trapezoidal rule converges geometrically
//! once the node count exceeds the argument. This keeps one code path valid
//! from `x = 0` out to the large arguments met in directivity kernels
//! (`ka` of a few hundred) without switching between series and asymptotics.

use std::f64::consts::PI;

fn period_nodes(x: f64, order: u32) -> usize {
    (x.abs().ceil() as usize) + order as usize + 40
}

/// Bessel function of the first kind, integer order `n`.
///
/// `J_n(x) = (1/pi) * int_0^pi cos(n t - x sin t) dt`
pub fn bessel_jn(n: u32, x: f64) -> f64 {
    let panels = period_nodes(x, n);
    let h = PI / panels as f64;
    let nf = n as f64;
    let mut sum = 0.5 * (1.0 + (nf * PI).cos());
    for j in 1..panels {
        let t = j as f64 * h;
        sum += (nf * t - x * t.sin()).cos();
    }
    sum / panels as f64
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_jn(0, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_jn(1, x)
}

/// Modified Bessel function of the first kind, integer order `n`.
///
/// `I_n(x) = (1/pi) * int_0^pi exp(x cos t) cos(n t) dt`
pub fn bessel_in(n: u32, x: f64) -> f64 {
    let panels = period_nodes(x, n);
    let h = PI / panels as f64;
    let nf = n as f64;
    let mut sum = 0.5 * (x.exp() + (-x).exp() * (nf * PI).cos());
    for j in 1..panels {
        let t = j as f64 * h;
        sum += (x * t.cos()).exp() * (nf * t).cos();
    }
    sum / panels as f64
}

pub fn bessel_i0(x: f64) -> f64 {
    bessel_in(0, x)
}

pub fn bessel_i1(x: f64) -> f64 {
    bessel_in(1, x)
}

/// Struve function `H_1(x)`.
///
/// Evaluated as `(2x/pi) * int_0^{pi/2} cos^2(p) sin(x sin p) dp` with a
/// Gauss-Legendre rule sized to the oscillation count.
pub fn struve_h1(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let rule = GaussLegendre::new(x.abs().ceil() as usize + 32);
    let half = 0.25 * PI;
    let mut sum = 0.0;
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let p = half * (1.0 + t);
        let c = p.cos();
        sum += w * c * c * (x * p.sin()).sin();
    }
    2.0 * x / PI * sum * half
}

/// Complete elliptic integral of the first kind, parameter `m`, given
/// `m1 = 1 - m` to keep precision near the logarithmic singularity.
pub fn elliptic_k_complement(m1: f64) -> f64 {
    let mut a = 1.0;
    let mut b = m1.max(0.0).sqrt();
    for _ in 0..60 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * PI / a
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(t, w)| (mid + half * t, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Brent-style bracketed root refinement (bisection with secant steps).
pub(crate) fn refine_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        let x = if secant > a.min(b) && secant < a.max(b) && (secant - mid).abs() < 0.25 * (b - a).abs() {
            secant
        } else {
            mid
        };
        let fx = f(x);
        if fx == 0.0 || (b - a).abs() < tol {
            return Some(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Some(0.5 * (a + b))
}

//! Gauss-Legendre nodes/weights and composite Simpson integration.

/// Gauss-Legendre rule on [-1, 1], mapped on demand to arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence; nodes accurate to ~1e-15.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for j in 0..m {
            // Tricomi-style initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (j as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[j] = -x;
            weights[j] = w;
            nodes[n - 1 - j] = x;
            weights[n - 1 - j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b]; all nodes strictly interior.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// (P_n(x), P_n'(x)) by upward recurrence.
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

/// Composite Simpson on uniformly spaced samples. An odd trailing interval is
/// closed with the 3/8 rule, so any sample count >= 2 integrates cleanly.
pub fn simpson_uniform(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * dx * (values[0] + values[1]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, mut total) = if intervals % 2 == 0 {
                (n - 1, 0.0)
            } else {
                // 3/8 rule over the last three intervals.
                let tail = &values[n - 4..];
                (
                    n - 4,
                    0.375 * dx * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]),
                )
            };
            let mut sum = 0.0;
            let mut k = 0;
            while k + 2 <= simpson_end {
                sum += values[k] + 4.0 * values[k + 1] + values[k + 2];
                k += 2;
            }
            total += sum * dx / 3.0;
            total
        }
    }
}

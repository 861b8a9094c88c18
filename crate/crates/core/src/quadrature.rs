//! Quadrature rules: Gauss–Legendre nodes and composite Simpson on
//! non-uniform samples.

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
///
/// Nodes are found by Newton iteration on the three-term Legendre recurrence
/// from Chebyshev-like initial guesses.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "need at least one node");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(q, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_q(x), P_q'(x))`.
fn legendre(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if q == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(q: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(q);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (x.iter().map(|v| mid + half * v).collect(), w.iter().map(|v| v * half).collect())
}

/// Composite Simpson integral of samples `y` at strictly increasing `t`.
///
/// Pairs of intervals use the non-uniform three-point rule; an odd trailing
/// interval is integrated with the quadratic through its last three samples.
/// Two samples fall back to the trapezoid rule.
pub fn simpson(t: &[f64], y: &[f64]) -> f64 {
    assert_eq!(t.len(), y.len(), "sample count mismatch");
    match t.len() {
        0 | 1 => return 0.0,
        2 => return 0.5 * (t[1] - t[0]) * (y[0] + y[1]),
        _ => {}
    }
    let intervals = t.len() - 1;
    let paired = intervals - intervals % 2;
    let mut total = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = t[i + 1] - t[i];
        let h1 = t[i + 2] - t[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * (y[i] * (2.0 - h1 / h0) + y[i + 1] * hs * hs / (h0 * h1) + y[i + 2] * (2.0 - h0 / h1));
        i += 2;
    }
    if intervals % 2 == 1 {
        let n = t.len();
        let h0 = t[n - 2] - t[n - 3];
        let h1 = t[n - 1] - t[n - 2];
        // Integral over the last interval of the quadratic through the last three points.
        total += y[n - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
            + y[n - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - y[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    total
}

/// Running Simpson integrals `∫_{t_0}^{t_i} y` for every sample `i`.
pub fn cumulative_simpson(t: &[f64], y: &[f64]) -> Vec<f64> {
    (0..t.len()).map(|i| simpson(&t[..=i], &y[..=i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for q in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(q);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * q) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "q={q} deg={deg}: {got} vs {exact}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn simpson_is_exact_for_quadratics_on_nonuniform_grids() {
        let t = [0.0, 0.1, 0.35, 0.5, 0.9, 1.0, 1.7];
        let f = |x: f64| -x * x + 4.0 * x + 3.0;
        let anti = |x: f64| -x.powi(3) / 3.0 + 2.0 * x * x + 3.0 * x;
        for end in 2..=t.len() {
            let y: Vec<f64> = t[..end].iter().map(|&x| f(x)).collect();
            let got = simpson(&t[..end], &y);
            let exact = anti(t[end - 1]) - anti(0.0);
            let tol = if end == 2 { 1e-2 } else { 1e-13 };
            assert!((got - exact).abs() < tol, "end={end}: {got} vs {exact}");
        }
        let cum = cumulative_simpson(&t, &t.map(f));
        assert!((cum[6] - anti(1.7)).abs() < 1e-13);
    }

    #[test]
    fn simpson_converges_on_smooth_integrands() {
        let err = |m: usize| {
            let t: Vec<f64> = (0..=m).map(|i| (i as f64 / m as f64).powf(1.5)).collect();
            let y: Vec<f64> = t.iter().map(|x| x.exp()).collect();
            (simpson(&t, &y) - (1f64.exp() - 1.0)).abs()
        };
        assert!(err(64) < err(32) / 8.0);
    }
}

//! Smooth radial cutoff used to build the dyadic family.

use std::sync::OnceLock;

use crate::quadrature::gauss_legendre;

const PANELS: usize = 8;
const NODES: usize = 24;

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

fn integral(a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|p| {
            let lo = a + p as f64 * h;
            x.iter().zip(w).map(|(x, w)| w * bump(lo + 0.5 * h * (x + 1.0))).sum::<f64>() * 0.5 * h
        })
        .sum()
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

fn total() -> f64 {
    static TOTAL: OnceLock<f64> = OnceLock::new();
    *TOTAL.get_or_init(|| integral(0.0, 1.0))
}

/// Smooth monotone step on `[0, 1]`: 0 at 0, 1 at 1, with all derivatives
/// vanishing at both ends. Symmetric: `step(t) + step(1 − t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else if t <= 0.5 {
        integral(0.0, t) / total()
    } else {
        1.0 - integral(t, 1.0) / total()
    }
}

/// Radial cutoff: 1 for `r ≤ 1`, 0 for `r ≥ 2`, smooth and non-increasing
/// in between.
pub fn chi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        1.0 - smooth_step(r - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_and_symmetry() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(7.5), 0.0);
        for i in 1..20 {
            let t = i as f64 / 20.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-14);
        }
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_between_plateaus() {
        let mut prev = 1.0;
        for i in 0..=400 {
            let v = chi(1.0 + i as f64 / 400.0);
            assert!(v <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}

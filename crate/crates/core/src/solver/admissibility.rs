//! Parameter conditions for the fixed-point argument with `b̄ = 1`.
//!
//! With `s̄ = s − 2 + 1 − r + n/p` the tuple `(n, r, p, q, s, p̃, a)` must satisfy
//!
//! * `1 < p ≤ p̃`, `1 ≤ q ≤ ∞`
//! * `s > 1`, `s̄ p̃ < n`, `r > n/p`
//! * `0 < 2a = s − n/p̃ − r + n/p < 1`
//! * `0 ≤ s̄ < s − 1`
//! * `1 < n p̃ / (2n − s̄ p̃) < ∞`
//! * `0 ≤ n/p̃ − s̄ < 1`
//! * `s̄ ≤ n/p ≤ 1 + s̄`

use serde::Serialize;

use crate::error::SolverError;
use crate::solver::config::BesovIndices;

/// Derived quantities of an admissible tuple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Admissible {
    pub s_bar: f64,
    /// Time weight exponent `a = (s − n/p̃ − r + n/p)/2`.
    pub a: f64,
}

/// Weight exponent implied by the other indices.
pub fn implied_weight(n: usize, idx: &BesovIndices) -> f64 {
    let n = n as f64;
    0.5 * (idx.s - n / idx.p_tilde - idx.r + n / idx.p)
}

/// Checks every condition; the error names the first one violated.
pub fn check_admissible(n: usize, idx: &BesovIndices) -> Result<Admissible, SolverError> {
    let nf = n as f64;
    let BesovIndices { r, p, q, s, p_tilde: pt, a } = *idx;
    let s_bar = s - 1.0 - r + nf / p;
    let two_a = s - nf / pt - r + nf / p;
    let fail = |m: String| Err(SolverError::Inadmissible(m));
    if !(1.0 < p && p <= pt) {
        return fail(format!("need 1 < p <= p~, got p={p}, p~={pt}"));
    }
    if q.is_nan() || q < 1.0 {
        return fail(format!("need q >= 1, got {q}"));
    }
    if s <= 1.0 {
        return fail(format!("need s > 1, got {s}"));
    }
    if s_bar * pt >= nf {
        return fail(format!("need s_bar * p~ < n, got {}", s_bar * pt));
    }
    if r <= nf / p {
        return fail(format!("need r > n/p = {}, got r={r}", nf / p));
    }
    if !(0.0 < two_a && two_a < 1.0) {
        return fail(format!("need 0 < s - n/p~ - r + n/p < 1, got {two_a}"));
    }
    if (2.0 * a - two_a).abs() > 1e-9 {
        return fail(format!("weight a={a} differs from the implied value {}", 0.5 * two_a));
    }
    if !(0.0 <= s_bar && s_bar < s - 1.0) {
        return fail(format!("need 0 <= s_bar < s - 1, got s_bar={s_bar}"));
    }
    let denom = 2.0 * nf - s_bar * pt;
    let ratio = nf * pt / denom;
    if !(denom > 0.0 && ratio > 1.0 && ratio.is_finite()) {
        return fail(format!("need 1 < n p~ / (2n - s_bar p~) < inf, got {ratio}"));
    }
    let gap = nf / pt - s_bar;
    if !(0.0..1.0).contains(&gap) {
        return fail(format!("need 0 <= n/p~ - s_bar < 1, got {gap}"));
    }
    if !(s_bar <= nf / p && nf / p <= 1.0 + s_bar) {
        return fail(format!("need s_bar <= n/p <= 1 + s_bar, got n/p={}, s_bar={s_bar}", nf / p));
    }
    Ok(Admissible { s_bar, a: 0.5 * two_a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tuple_is_admissible() {
        let idx = BesovIndices::default();
        let adm = check_admissible(3, &idx).unwrap();
        assert!((adm.s_bar - 1.0).abs() < 1e-15);
        assert!((adm.a - 0.25).abs() < 1e-15);
        assert!((implied_weight(3, &idx) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn violations_are_rejected() {
        let base = BesovIndices::default();
        for bad in [
            BesovIndices { r: 1.4, a: 0.5 * (3.0 - 1.5 - 1.4 + 1.5), ..base },
            BesovIndices { s: 1.0, ..base },
            BesovIndices { a: 0.3, ..base },
            BesovIndices { p: 3.0, ..base },
            BesovIndices { s: 4.2, a: 0.5 * (4.2 - 1.5 - 2.5 + 1.5), ..base },
        ] {
            assert!(check_admissible(3, &bad).is_err(), "{bad:?}");
        }
    }
}

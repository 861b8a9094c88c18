//! Property tests over seeded random fields.

use lans_core::lab::{run_check, CheckSpec};
use lans_core::lp::family::DyadicFamily;
use lans_core::lp::norms::{besov_norm, BesovIndex};
use lans_core::random::{random_smooth, random_spectral};
use lans_core::snapshot::{read_snapshot, write_snapshot};
use lans_core::solver::nonlinearity_v;
use lans_core::{apply_multiplier, helmholtz_inverse, leray_project, stokes_project, Grid, MultiplierSymbol, SpectralField};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Grid> {
    prop_oneof![Just((2usize, 8usize)), Just((2, 16)), Just((3, 8)), Just((3, 16))]
        .prop_map(|(n, size)| Grid::new(n, size).unwrap())
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn transform_round_trip(g in grid_strategy(), seed in any::<u64>()) {
        let f = random_spectral(seed, &g, 2, |_| 1.0);
        let back = f.to_real().to_spectral();
        prop_assert!(rel(&back, &f) < 1e-13);
        let r = f.to_real();
        let again = r.to_spectral().to_real();
        let err = r.sub(&again).max_abs();
        prop_assert!(err < 1e-13 * r.max_abs().max(1.0));
    }

    #[test]
    fn leray_is_an_idempotent_projection_onto_divergence_free_fields(g in grid_strategy(), seed in any::<u64>()) {
        let f = random_smooth(seed, &g, g.dim(), 1e9, 0.0);
        let p = leray_project(&f);
        prop_assert!(rel(&leray_project(&p), &p) < 1e-13);
        prop_assert!(p.divergence().l2_norm() < 1e-12);
        // Orthogonal projection: ‖Pf‖ ≤ ‖f‖.
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
    }

    #[test]
    fn stokes_projection_equals_leray(g in grid_strategy(), seed in any::<u64>(), alpha in 0.0f64..10.0) {
        let f = random_smooth(seed, &g, g.dim(), 1e9, 0.0);
        let d = stokes_project(&f, alpha).sub(&leray_project(&f)).l2_norm();
        prop_assert!(d <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn helmholtz_pair_inverts(g in grid_strategy(), seed in any::<u64>(), alpha in 0.0f64..5.0) {
        let f = random_smooth(seed, &g, 1, 1e9, 0.0);
        let h = apply_multiplier(&MultiplierSymbol::helmholtz(&g, alpha), &helmholtz_inverse(&f, alpha)).unwrap();
        prop_assert!(rel(&h, &f) < 1e-12);
    }

    #[test]
    fn blocks_partition_band_limited_fields(g in grid_strategy(), seed in any::<u64>()) {
        let fam = DyadicFamily::for_grid(&g);
        let k_max = f64::from(1u32 << fam.j_max());
        let f = random_smooth(seed, &g, 1, k_max, 0.0);
        let rebuilt = fam.decompose(&f).unwrap().reconstruct();
        prop_assert!(rel(&rebuilt, &f) < 1e-12);
    }

    #[test]
    fn distant_blocks_are_orthogonal(g in grid_strategy(), seed in any::<u64>()) {
        let fam = DyadicFamily::for_grid(&g);
        let f = random_smooth(seed, &g, 1, 1e9, 0.0);
        let top = fam.j_max() as i32;
        for j in -1..=top {
            for m in (j + 2)..=top {
                let jm = fam.block(&fam.block(&f, m).unwrap(), j).unwrap();
                prop_assert!(jm.l2_norm() <= 1e-12 * f.l2_norm());
            }
        }
    }

    #[test]
    fn nonlinearity_is_a_quadratic_form(seed in any::<u64>(), alpha in prop_oneof![Just(0.0), 0.1f64..2.0], lambda in -3.0f64..3.0) {
        let g = Grid::new(3, 16).unwrap();
        let u = random_smooth(seed, &g, 3, 4.0, 0.0);
        let w = random_smooth(seed ^ 0x9e37, &g, 3, 4.0, 0.0);
        let vu = nonlinearity_v(&u, alpha);
        let scale = vu.l2_norm().max(1e-300);
        // Homogeneity of degree two.
        let scaled = nonlinearity_v(&u.scale(lambda), alpha);
        prop_assert!(scaled.sub(&vu.scale(lambda * lambda)).l2_norm() <= 1e-12 * scale * (1.0 + lambda * lambda));
        // Parallelogram law, which characterizes forms coming from a symmetric bilinear map.
        let lhs = nonlinearity_v(&u.add(&w), alpha).add(&nonlinearity_v(&u.sub(&w), alpha));
        let rhs = vu.scale(2.0).add(&nonlinearity_v(&w, alpha).scale(2.0));
        prop_assert!(lhs.sub(&rhs).l2_norm() <= 1e-11 * rhs.l2_norm().max(1e-300));
    }

    #[test]
    fn besov_norm_is_a_norm(g in grid_strategy(), seed in any::<u64>(), s in -1.0f64..3.0, c in -4.0f64..4.0) {
        let fam = DyadicFamily::for_grid(&g);
        let k_max = f64::from(1u32 << fam.j_max());
        let f = random_smooth(seed, &g, 1, k_max, 0.0);
        let h = random_smooth(seed.wrapping_add(1), &g, 1, k_max, 0.0);
        for (p, q) in [(2.0, 2.0), (1.0, f64::INFINITY), (4.0, 1.0)] {
            let idx = BesovIndex::new(s, p, q).unwrap();
            let nf = besov_norm(&fam, &f, idx);
            prop_assert!((besov_norm(&fam, &f.scale(c), idx) - c.abs() * nf).abs() <= 1e-12 * nf.max(1.0) * (1.0 + c.abs()));
            let sum = besov_norm(&fam, &f.add(&h), idx);
            prop_assert!(sum <= (nf + besov_norm(&fam, &h, idx)) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn snapshots_round_trip(g in grid_strategy(), seed in any::<u64>(), t in 0.0f64..10.0) {
        let f = random_smooth(seed, &g, g.dim(), 1e9, 0.0).to_real();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, t).unwrap();
        let (back, t_back) = read_snapshot(buf.as_slice()).unwrap();
        prop_assert_eq!(t_back, t);
        prop_assert_eq!(back.components(), f.components());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn check_reports_are_deterministic(seed in any::<u64>()) {
        let spec: CheckSpec = serde_json::from_value(serde_json::json!({
            "check": "paraproduct_reconstruction", "grid": {"n": 2, "N": 16}, "ensemble": {"size": 3, "k_max": 4.0}
        }))
        .unwrap();
        let a = run_check(&spec, seed).unwrap();
        let b = run_check(&spec, seed).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert!(a.pass);
    }
}

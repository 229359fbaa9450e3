use bandlab::ensemble::{apply_diagonal_shift, respects_support, sample_band_matrix_indexed, BandEnsembleSpec, DiagonalShift, EntryDistribution};
use bandlab::que::{block_mass_profile, que_statistic, uncertainty_check};
use bandlab::reduction::{block_split, Reducer};
use bandlab::spectral::{eigh, resolvent_dense, semicircle_stieltjes};
use bandlab::stats::ks_two_sample;
use num_complex::Complex;
use proptest::prelude::*;

fn dist() -> impl Strategy<Value = EntryDistribution> {
    prop_oneof![Just(EntryDistribution::Gaussian), Just(EntryDistribution::Rademacher), Just(EntryDistribution::Uniform)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn samples_are_symmetric_and_banded(w in 1usize..6, p in 2usize..5, d in dist(), seed in any::<u64>(), k in 0u64..4) {
        let spec = BandEnsembleSpec::new(w, p, d, seed).unwrap();
        let h = sample_band_matrix_indexed::<f64>(&spec, k).unwrap();
        prop_assert!(h.is_symmetric(0.0));
        prop_assert!(respects_support(&h, &spec.profile::<f64>().unwrap()));
        let again = sample_band_matrix_indexed::<f64>(&spec, k).unwrap();
        prop_assert_eq!(h, again);
    }

    #[test]
    fn profile_rows_sum_to_one(w in 1usize..10, p in 2usize..6) {
        let spec = BandEnsembleSpec::new(w, p, EntryDistribution::Gaussian, 0).unwrap();
        let prof = spec.profile::<f64>().unwrap();
        for i in 0..spec.n {
            prop_assert!((prof.row_sum(i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resolvent_identity(seed in any::<u64>(), re in -2.5f64..2.5, im in 0.05f64..2.0, re2 in -2.5f64..2.5, im2 in 0.05f64..2.0) {
        // G(z) − G(z′) = (z − z′) G(z) G(z′)
        let spec = BandEnsembleSpec::new(3, 2, EntryDistribution::Gaussian, seed).unwrap();
        let h = sample_band_matrix_indexed::<f64>(&spec, 0).unwrap();
        let (z, zp) = (Complex::new(re, im), Complex::new(re2, im2));
        let (g, gp) = (resolvent_dense(&h, z).unwrap(), resolvent_dense(&h, zp).unwrap());
        let lhs = bandlab::linalg::Matrix::from_fn(g.rows(), g.cols(), |i, j| g[(i, j)] - gp[(i, j)]);
        let rhs = g.matmul_c(&gp).unwrap().map(|x| x * (z - zp));
        prop_assert!(lhs.max_abs_diff_c(&rhs) < 1e-10);
    }

    #[test]
    fn stieltjes_solves_quadratic(re in -4.0f64..4.0, im in 1e-6f64..4.0) {
        let z = Complex::new(re, im);
        let m = semicircle_stieltjes(z).unwrap();
        prop_assert!((m * m + z * m + 1.0).norm() < 1e-12 * (1.0 + z.norm()));
        prop_assert!(m.im > 0.0);
        prop_assert!(m.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn ks_is_a_bounded_symmetric_statistic(a in prop::collection::vec(-5.0f64..5.0, 1..40), b in prop::collection::vec(-5.0f64..5.0, 1..40)) {
        let d = ks_two_sample(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_two_sample(&b, &a).unwrap());
        prop_assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn que_statistic_is_linear_and_sign_invariant(seed in any::<u64>(), c in -1.0f64..1.0) {
        let spec = BandEnsembleSpec::new(2, 2, EntryDistribution::Gaussian, seed).unwrap();
        let sp = eigh(&sample_band_matrix_indexed::<f64>(&spec, 0).unwrap()).unwrap();
        let psi = sp.vector(3).to_vec();
        let neg: Vec<f64> = psi.iter().map(|x| -x).collect();
        let a: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -0.5 }).collect();
        let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
        let base = que_statistic(&psi, &a, 8).unwrap();
        prop_assert!((que_statistic(&psi, &ca, 8).unwrap() - c * base).abs() < 1e-14);
        prop_assert_eq!(que_statistic(&neg, &a, 8).unwrap(), base);
    }

    #[test]
    fn block_masses_rotate_with_the_vector(v in prop::collection::vec(-1.0f64..1.0, 12), r in 0usize..4) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let psi: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let mut rot = psi.clone();
        rot.rotate_left(3 * r);
        let (m, mr) = (block_mass_profile(&psi, 3).unwrap(), block_mass_profile(&rot, 3).unwrap());
        for l in 0..4 {
            prop_assert!((mr[l] - m[(l + r) % 4]).abs() < 1e-15);
        }
        prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_is_monotone_in_mu(seed in any::<u64>(), e in -0.8f64..0.8, mu in 0.01f64..0.3) {
        let spec = BandEnsembleSpec::new(4, 2, EntryDistribution::Gaussian, seed).unwrap();
        let h = sample_band_matrix_indexed::<f64>(&spec, 0).unwrap();
        let red = Reducer::new(&block_split(&h, 4, 0).unwrap(), &DiagonalShift::zero(16)).unwrap();
        prop_assume!(!red.is_singular(e));
        let strict = uncertainty_check(&red, e, mu).unwrap();
        let loose = uncertainty_check(&red, e, mu / 2.0).unwrap();
        prop_assert!(loose.n_tested <= strict.n_tested);
        if let (Some(a), Some(b)) = (loose.worst_mass, strict.worst_mass) {
            prop_assert!(a >= b - 1e-12);
        }
        prop_assert!(loose.quad_margin.unwrap() >= strict.quad_margin.unwrap() - 1e-12);
        if strict.passed() {
            prop_assert!(loose.passed());
        }
    }

    #[test]
    fn schur_complement_spectrum_contains_fixed_points(seed in any::<u64>(), g in -0.5f64..0.5) {
        let spec = BandEnsembleSpec::new(2, 3, EntryDistribution::Gaussian, seed).unwrap();
        let h = sample_band_matrix_indexed::<f64>(&spec, 0).unwrap();
        let shift = DiagonalShift::constant(12, g);
        let dec = block_split(&h, 2, 0).unwrap();
        let red = Reducer::new(&dec, &shift).unwrap();
        let lam = bandlab::spectral::eigvalsh(&apply_diagonal_shift(&h, &shift).unwrap()).unwrap();
        for (k, &l) in lam.iter().enumerate() {
            if red.is_singular(l) || red.nearest_delta(l).is_some_and(|(_, d)| d < 1e-6) {
                continue;
            }
            prop_assert!(red.xi(l).unwrap().iter().any(|x| (x - l).abs() < 1e-8), "k = {}", k);
        }
    }

    #[test]
    fn block_split_reassembles(seed in any::<u64>(), offset in 0usize..6) {
        let spec = BandEnsembleSpec::new(2, 3, EntryDistribution::Gaussian, seed).unwrap();
        let h = sample_band_matrix_indexed::<f64>(&spec, 0).unwrap();
        let dec = block_split(&h, 2, offset).unwrap();
        prop_assert_eq!(dec.reassemble(), h);
    }
}

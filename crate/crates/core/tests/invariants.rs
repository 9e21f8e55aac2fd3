use num_complex::Complex64;
use ostbc_core::bounds::{lemma_form_from_mu, pep_from_mu};
use ostbc_core::equivalent::singular_values;
use ostbc_core::sim::{
    ml_decode_equivalent, ml_decode_full, project_to_equivalent, sample_channel, simulate_entry, transmit_matrix,
    FullCodebook,
};
use ostbc_core::{
    build_code_matrix, check_rankin_bounds, coxeter_bound, extract_equivalent_code, is_spherical, numerical_rank,
    union_bound_ser, verify_orthogonality, Catalog, Decoder, Error, EuclideanCode, FadingLinkParams, OstbcDesign,
    SimConfig, SymbolVector,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn symbols(design: &OstbcDesign) -> impl Strategy<Value = SymbolVector> {
    let (j, n_tx) = (design.n_info(), design.n_tx());
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), j)
        .prop_map(move |v| {
            let info: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            SymbolVector::padded(&info, n_tx, 0)
        })
}

proptest! {
    #[test]
    fn alamouti_is_orthogonal(s in symbols(&OstbcDesign::alamouti())) {
        let d = OstbcDesign::alamouti();
        prop_assert!(verify_orthogonality(&d, &s).unwrap() <= 1e-12 * s.norm_sqr().max(1.0));
    }

    #[test]
    fn rate_three_quarters_is_orthogonal(s in symbols(&OstbcDesign::rate_three_quarters())) {
        let d = OstbcDesign::rate_three_quarters();
        prop_assert!(verify_orthogonality(&d, &s).unwrap() <= 1e-12 * s.norm_sqr().max(1.0));
    }

    #[test]
    fn code_matrix_is_additive(a in symbols(&OstbcDesign::rate_three_quarters()), b in symbols(&OstbcDesign::rate_three_quarters())) {
        let d = OstbcDesign::rate_three_quarters();
        let sum = SymbolVector::new(a.symbols.iter().zip(&b.symbols).map(|(x, y)| x + y).collect(), 0);
        let lhs = build_code_matrix(&d, &sum).unwrap();
        let ga = build_code_matrix(&d, &a).unwrap();
        let gb = build_code_matrix(&d, &b).unwrap();
        let zero = ga.sub(&ga);
        let rhs = ga.sub(&zero.sub(&gb));
        prop_assert!(lhs.sub(&rhs).frobenius_sqr() < 1e-20);
    }

    #[test]
    fn pep_forms_agree(mu in 0.0f64..0.999, k in 1u32..20) {
        prop_assert!((pep_from_mu(mu, k) - lemma_form_from_mu(mu, 1.0 - mu, k)).abs() < 1e-12);
    }

    #[test]
    fn union_bound_monotone_in_snr(g in 0.0f64..1e3, step in 1.0f64..10.0, k in 1u32..8) {
        let cat = Catalog::builtin();
        let s = cat.get("alamouti-qpsk").unwrap().spectrum().unwrap();
        let a = union_bound_ser(&s, FadingLinkParams::new(k, g).unwrap()).unwrap();
        let b = union_bound_ser(&s, FadingLinkParams::new(k, g * step + 1e-9).unwrap()).unwrap();
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn rotation_preserves_rank_and_sphericity(theta in 0.0f64..6.3) {
        let cat = Catalog::builtin();
        let code = &cat.get("alamouti-bio4").unwrap().code;
        let (c, s) = (theta.cos(), theta.sin());
        let m = vec![c, -s, 0.0, 0.0, s, c, 0.0, 0.0, 0.0, 0.0, c, s, 0.0, 0.0, -s, c];
        let r = code.transformed(&m).unwrap();
        prop_assert_eq!(numerical_rank(&r), 4);
        prop_assert!(is_spherical(&r));
    }
}

#[test]
fn decoder_metric_identity() {
    // Σ_j ‖G_u h_j − G_t h_j‖² = Σ_j c_j² d²(u, t)
    let cat = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for e in cat.list() {
        let book = FullCodebook::from_entry(e).unwrap();
        for _ in 0..50 {
            let ch = sample_channel(e.design.n_tx(), 3, 1.0, &mut rng).unwrap();
            let c2: f64 = (0..3).map(|j| ch.column_norm(j).powi(2)).sum();
            let u = rng.random_range(0..e.len());
            let t = rng.random_range(0..e.len());
            let full: f64 = (0..3)
                .map(|j| {
                    let a = book.matrix(u).mul_vec(ch.column(j));
                    let b = book.matrix(t).mul_vec(ch.column(j));
                    a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()
                })
                .sum();
            let d = e.code.distance(u, t);
            assert!((full - c2 * d * d).abs() <= 1e-9 * (1.0 + full), "{}", e.key);
        }
    }
}

#[test]
fn projected_decisions_identical_over_many_trials() {
    let cat = Catalog::builtin();
    let e = cat.get("alamouti-qpsk").unwrap();
    let book = FullCodebook::from_entry(e).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut errors = 0;
    for i in 0..100_000 {
        let n0 = [0.2, 1.0, 4.0][i % 3];
        let ch = sample_channel(2, 1 + i % 2, 1.0, &mut rng).unwrap();
        let u = rng.random_range(0..e.len());
        let r = transmit_matrix(book.matrix(u), &ch, n0, &mut rng).unwrap();
        let full = ml_decode_full(&book, &r, &ch).unwrap();
        let (model, y) = project_to_equivalent(e, &ch, &r).unwrap();
        assert_eq!(full, ml_decode_equivalent(&e.code, &model, &y).unwrap(), "trial {i}");
        errors += usize::from(full != u);
    }
    assert!(errors > 1000);
}

#[test]
fn diversity_ordering() {
    let cat = Catalog::builtin();
    for key in ["alamouti-bpsk", "alamouti-qpsk"] {
        let e = cat.get(key).unwrap();
        let ser: Vec<f64> = [1usize, 2, 4]
            .iter()
            .map(|&n_rx| {
                let mut cfg = SimConfig::new(key, n_rx, vec![8.0], 50_000, 5);
                cfg.decoder = Decoder::EquivalentSimo;
                simulate_entry(e, &cfg).unwrap()[0].ser
            })
            .collect();
        assert!(ser[0] > ser[1] && ser[1] > ser[2], "{key}: {ser:?}");
    }
}

#[test]
fn extracted_codes_of_random_signal_sets() {
    let design = OstbcDesign::alamouti();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let proxies: Vec<SymbolVector> = (0..6)
        .map(|u| {
            let info: Vec<Complex64> = (0..2).map(|_| Complex64::new(rng.random(), rng.random())).collect();
            SymbolVector::padded(&info, 2, 5 - u)
        })
        .collect();
    let code = extract_equivalent_code(&design, &proxies).unwrap();
    for p in &proxies {
        let cw = code.codeword(p.label).unwrap();
        assert_eq!(cw[0], p.symbols[0].re);
        assert_eq!(cw[3], p.symbols[1].im);
    }
    let sv = singular_values(&code);
    assert_eq!(sv.len(), 4);
    assert!(sv.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn rankin_and_coxeter_on_catalog() {
    let cat = Catalog::builtin();
    for key in ["alamouti-bpsk", "alamouti-bio4", "alamouti-bio8"] {
        let code = &cat.get(key).unwrap().code;
        let cert = check_rankin_bounds(code).unwrap();
        assert!(cert.third.unwrap().equality, "{key}");
        let cox = coxeter_bound(cert.n as u32, cert.d_min_sq.sqrt()).unwrap();
        assert!((cox - code.len() as f64).abs() < 1e-5, "{key}: {cox}");
    }
    let skewed = EuclideanCode::new(vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.0, 0.0]]).unwrap();
    assert!(matches!(check_rankin_bounds(&skewed), Err(Error::NonSpherical { .. })));
}

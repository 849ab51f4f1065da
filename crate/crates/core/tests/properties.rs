use idim_core::concentration::{danco_calibrate, danco_id, DancoConfig};
use idim_core::datasets::{generate, ManifoldSpec};
use idim_core::geometry::Spectrum;
use idim_core::linear::{lpca_estimate, lpca_select, LpcaVariant};
use idim_core::local::local_estimate;
use idim_core::pipeline::{pearson_matrix, zscore_consensus};
use idim_core::{estimate, Dataset, EstimatorParams, Method};
use nalgebra::DMatrix;
use proptest::prelude::*;

const VARIANTS: [LpcaVariant; 7] = [
    LpcaVariant::FukunagaOlsen { alpha: 0.05 },
    LpcaVariant::Fan {
        alpha: 10.0,
        beta: 0.8,
    },
    LpcaVariant::MaxGap,
    LpcaVariant::Ratio { alpha: 0.05 },
    LpcaVariant::ParticipationRatio,
    LpcaVariant::Kaiser,
    LpcaVariant::BrokenStick,
];

const DISTANCE_METHODS: [Method; 9] = [
    Method::CorrInt,
    Method::Knn,
    Method::Mada,
    Method::MindMli,
    Method::MindMlk,
    Method::Mle,
    Method::Mom,
    Method::Tle,
    Method::TwoNn,
];

fn rotate(data: &Dataset, seed: u64, shift: f64, scale: f64) -> Dataset {
    use rand::Rng;
    let mut r = idim_core::rng::from_seed(seed);
    let d = data.n_var();
    let q = DMatrix::from_fn(d, d, |_, _| r.random::<f64>() - 0.5)
        .qr()
        .q();
    let x = DMatrix::from_row_slice(data.n_obj(), d, data.values());
    let y = x * q.transpose() * scale;
    let values: Vec<f64> = y
        .row_iter()
        .flat_map(|row| row.iter().map(|v| v + shift).collect::<Vec<_>>())
        .collect();
    Dataset::new("t", data.n_obj(), d, values).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lpca_rules_are_scale_invariant(
        ev in prop::collection::vec(1e-3f64..10.0, 1..12),
        c in 1e-3f64..1e3,
    ) {
        let s = Spectrum::new(ev.clone());
        let t = s.scaled(c);
        for v in VARIANTS {
            let a = lpca_select(&s, v).unwrap();
            let b = lpca_select(&t, v).unwrap();
            if v == LpcaVariant::ParticipationRatio {
                prop_assert!(rel_close(a.value, b.value, 1e-12));
            } else {
                prop_assert_eq!(a.value, b.value, "{:?}", v);
            }
        }
    }

    #[test]
    fn lpca_integer_rules_within_rank_bounds(
        n in 3usize..40,
        d in 1usize..8,
        seed in 0u64..1000,
    ) {
        use rand::Rng;
        let mut r = idim_core::rng::from_seed(seed);
        let values = (0..n * d).map(|_| r.random::<f64>()).collect();
        let data = Dataset::new("x", n, d, values).unwrap();
        for v in VARIANTS {
            if v == LpcaVariant::ParticipationRatio {
                continue;
            }
            let e = lpca_estimate(&data, v).unwrap();
            prop_assert!(e.value >= 1.0 && e.value <= (n - 1).min(d) as f64);
        }
    }

    #[test]
    fn consensus_absorbs_column_shift(
        rows in prop::collection::vec(prop::collection::vec(0.5f64..20.0, 3), 2..12),
        shift in -50.0f64..50.0,
        col in 0usize..3,
    ) {
        let names: Vec<String> = (0..3).map(|j| format!("m{j}")).collect();
        let ok = vec![vec![true; 3]; rows.len()];
        let a = zscore_consensus(&rows, &ok, &names).unwrap();
        let mut shifted = rows.clone();
        shifted.iter_mut().for_each(|r| r[col] += shift);
        let b = zscore_consensus(&shifted, &ok, &names).unwrap();
        for (ra, rb) in a.zscores.iter().zip(&b.zscores) {
            for (x, y) in ra.iter().zip(rb) {
                prop_assert!((x - y).abs() <= 1e-9, "{} {}", x, y);
            }
        }
    }

    #[test]
    fn consensus_is_permutation_invariant(
        rows in prop::collection::vec(prop::collection::vec(0.5f64..20.0, 4), 3..10),
        rot in 0usize..10,
    ) {
        let n = rows.len();
        let names: Vec<String> = (0..4).map(|j| format!("m{j}")).collect();
        let ok = vec![vec![true; 4]; n];
        let a = zscore_consensus(&rows, &ok, &names).unwrap();
        // Rotate the rows and reverse the columns.
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let p: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].iter().rev().copied().collect()).collect();
        let rev_names: Vec<String> = names.iter().rev().cloned().collect();
        let b = zscore_consensus(&p, &ok, &rev_names).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((b.consensus[k] - a.consensus[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn correlation_invariant_under_positive_affine_maps(
        rows in prop::collection::vec(prop::collection::vec(0.5f64..20.0, 3), 3..12),
        slope in 0.01f64..100.0,
        offset in -10.0f64..10.0,
    ) {
        let names: Vec<String> = (0..3).map(|j| format!("m{j}")).collect();
        let a = pearson_matrix(&rows, &names).unwrap();
        let mapped: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] * slope + offset, r[1], r[2]]).collect();
        let b = pearson_matrix(&mapped, &names).unwrap();
        prop_assert_eq!(&a.zero_variance, &b.zero_variance);
        for i in 0..3 {
            prop_assert_eq!(a.matrix[i][i], 1.0);
            for j in 0..3 {
                prop_assert!((a.matrix[i][j] - b.matrix[i][j]).abs() <= 1e-9);
                prop_assert_eq!(a.matrix[i][j], a.matrix[j][i]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn distance_estimators_are_isometry_invariant(seed in 0u64..1000, shift in -5.0f64..5.0) {
        let data = generate(&ManifoldSpec::new("affine", 3, 6, 400, seed)).unwrap();
        let moved = rotate(&data, seed + 1, shift, 1.0);
        let p = EstimatorParams::default();
        for m in DISTANCE_METHODS {
            let a = estimate(&data, m, &p, 0).unwrap().value;
            let b = estimate(&moved, m, &p, 0).unwrap().value;
            let tol = if matches!(m, Method::CorrInt | Method::Knn) { 1e-6 } else { 1e-9 };
            prop_assert!(rel_close(a, b, tol), "{}: {} vs {}", m, a, b);
        }
    }

    #[test]
    fn distance_estimators_are_scale_invariant(seed in 0u64..1000, scale in 0.01f64..100.0) {
        let data = generate(&ManifoldSpec::new("ball", 4, 4, 400, seed)).unwrap();
        let values: Vec<f64> = data.values().iter().map(|v| v * scale).collect();
        let scaled = Dataset::new("s", data.n_obj(), data.n_var(), values).unwrap();
        let p = EstimatorParams::default();
        for m in DISTANCE_METHODS {
            let a = estimate(&data, m, &p, 0).unwrap().value;
            let b = estimate(&scaled, m, &p, 0).unwrap().value;
            let tol = if matches!(m, Method::CorrInt | Method::Knn) { 1e-6 } else { 1e-9 };
            prop_assert!(rel_close(a, b, tol), "{}: {} vs {}", m, a, b);
        }
    }

    #[test]
    fn local_estimates_follow_row_permutations(seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        let data = generate(&ManifoldSpec::new("swiss_roll", 2, 3, 150, seed)).unwrap();
        let mut perm: Vec<usize> = (0..150).collect();
        perm.shuffle(&mut idim_core::rng::from_seed(seed));
        let shuffled = data.select_rows(&perm).unwrap();
        let p = EstimatorParams::default();
        let cal = idim_core::concentration::ComputeCalibration;
        let a = local_estimate(&data, Method::LpcaPr, 20, &p, 0, &cal).unwrap();
        let b = local_estimate(&shuffled, Method::LpcaPr, 20, &p, 0, &cal).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!(rel_close(a.values[i], b.values[k], 1e-9));
        }
    }
}

#[test]
fn danco_is_isometry_invariant() {
    let cal = danco_calibrate(&DancoConfig {
        d_max: 8,
        samples_per_dim: 5,
        ..Default::default()
    })
    .unwrap();
    for seed in 0..3 {
        let data = generate(&ManifoldSpec::new("affine", 4, 8, 500, seed)).unwrap();
        let moved = rotate(&data, seed + 10, 2.5, 1.0);
        assert_eq!(
            danco_id(&data, &cal).unwrap().value,
            danco_id(&moved, &cal).unwrap().value
        );
    }
}

#[test]
fn duplicated_columns_leave_insensitive_estimators_unchanged() {
    let p = EstimatorParams::default();
    let cal = std::sync::Arc::new(danco_calibrate(&p.danco).unwrap());
    let corpus = [
        generate(&ManifoldSpec::new("gaussian", 5, 5, 1500, 1)).unwrap(),
        generate(&ManifoldSpec::new("cube", 4, 4, 1500, 2)).unwrap(),
    ];
    let methods = [
        Method::CorrInt,
        Method::FisherS,
        Method::Mada,
        Method::MindMli,
        Method::MindMlk,
        Method::Mle,
        Method::Mom,
        Method::Tle,
        Method::TwoNn,
        Method::Danco,
        Method::Ess,
        Method::LpcaFo,
        Method::LpcaFan,
        Method::LpcaRatio,
        Method::LpcaPr,
    ];
    for data in &corpus {
        for m in methods {
            let r = idim_core::pipeline::duplication_sensitivity(data, m, &p, 0, &cal).unwrap();
            assert!((0.9..=1.1).contains(&r), "{m}: {r}");
        }
    }
}

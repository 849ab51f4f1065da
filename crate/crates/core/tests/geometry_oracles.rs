use idim_core::geometry::{covariance_spectrum, knn, pca_project};
use idim_core::rng;
use idim_core::Dataset;
use nalgebra::DMatrix;
use rand::Rng;

fn random_dataset(r: &mut rng::Rng, n: usize, d: usize, grid: bool) -> Dataset {
    let values = (0..n * d)
        .map(|_| {
            if grid {
                r.random_range(0..4) as f64
            } else {
                r.random::<f64>()
            }
        })
        .collect();
    Dataset::new("r", n, d, values).unwrap()
}

/// All pairs, sorted by (squared distance, index).
fn brute(data: &Dataset, k: usize) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    let n = data.n_obj();
    let mut idx = Vec::new();
    let mut dst = Vec::new();
    for i in 0..n {
        let mut all: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let s: f64 = data
                    .row(i)
                    .iter()
                    .zip(data.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (s, j)
            })
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        idx.push(all[..k].iter().map(|p| p.1).collect());
        dst.push(all[..k].iter().map(|p| p.0.sqrt()).collect());
    }
    (idx, dst)
}

#[test]
fn knn_matches_all_pairs_scan() {
    let mut r = rng::stream(0, &["knn-oracle"]);
    for inst in 0..100 {
        let n = r.random_range(2..=500);
        let d = [1, 2, 3, 5, 8, 16, 31, 40][inst % 8];
        let grid = inst % 3 == 0;
        let data = random_dataset(&mut r, n, d, grid);
        let k = r.random_range(1..n.min(25));
        let g = knn(&data, k).unwrap();
        let (idx, dst) = brute(&data, k);
        for i in 0..n {
            assert_eq!(g.neighbors(i), &idx[i][..], "instance {inst} row {i}");
            for (a, b) in g.distances(i).iter().zip(&dst[i]) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b), "instance {inst}");
            }
        }
    }
}

#[test]
fn knn_hand_example() {
    let d = Dataset::from_rows("x", &[[0.0], [1.0], [3.0]]).unwrap();
    let g = knn(&d, 1).unwrap();
    assert_eq!(
        [g.neighbors(0)[0], g.neighbors(1)[0], g.neighbors(2)[0]],
        [1, 0, 1]
    );
    assert_eq!([g.dist(0, 1), g.dist(1, 1), g.dist(2, 1)], [1.0, 1.0, 2.0]);
    assert!(knn(&d, 3).is_err());
}

#[test]
fn knn_rows_sorted_without_self() {
    let mut r = rng::stream(1, &["square"]);
    let data = random_dataset(&mut r, 2000, 2, false);
    let g = knn(&data, 10).unwrap();
    for i in 0..2000 {
        assert!(!g.neighbors(i).contains(&i));
        assert!(g.distances(i).windows(2).all(|w| w[0] <= w[1]));
    }
}

fn gram_eigenvalues(data: &Dataset) -> Vec<f64> {
    let n = data.n_obj();
    let d = data.n_var();
    let x = DMatrix::from_row_slice(n, d, data.values());
    let mean = x.row_mean();
    let mut xc = x.clone();
    for mut row in xc.row_iter_mut() {
        row -= &mean;
    }
    let gram = &xc * xc.transpose() / (n as f64 - 1.0);
    let mut ev: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

#[test]
fn spectrum_matches_gram_eigensolve() {
    let mut r = rng::stream(2, &["gram"]);
    for inst in 0..20 {
        let n = r.random_range(5..120);
        let d = r.random_range(1..30);
        let scales: Vec<f64> = (0..d)
            .map(|_| 10f64.powf(r.random_range(-2.0..1.0)))
            .collect();
        let values = (0..n * d)
            .map(|i| scales[i % d] * (r.random::<f64>() - 0.5))
            .collect();
        let data = Dataset::new("g", n, d, values).unwrap();
        let s = covariance_spectrum(&data).unwrap();
        let gram = gram_eigenvalues(&data);
        let l1 = gram[0];
        assert_eq!(s.len(), (n - 1).min(d));
        for (i, &l) in s.eigenvalues().iter().enumerate() {
            let g = if gram[i] < 1e-10 * l1 { 0.0 } else { gram[i] };
            assert!((l - g).abs() <= 1e-8 * l1, "instance {inst}: {l} vs {g}");
        }
    }
}

fn random_rotation(r: &mut rng::Rng, d: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| r.random::<f64>() - 0.5);
    m.qr().q()
}

fn transform(data: &Dataset, q: &DMatrix<f64>, shift: f64) -> Dataset {
    let x = DMatrix::from_row_slice(data.n_obj(), data.n_var(), data.values());
    let y = x * q.transpose();
    let values: Vec<f64> = y
        .row_iter()
        .flat_map(|r| r.iter().map(|v| v + shift).collect::<Vec<_>>())
        .collect();
    Dataset::new("t", data.n_obj(), data.n_var(), values).unwrap()
}

#[test]
fn spectrum_rotation_invariant_and_trace() {
    let mut r = rng::stream(3, &["rot"]);
    let d = 6;
    let values = (0..300 * d)
        .map(|i| (1 + i % d) as f64 * r.random::<f64>())
        .collect();
    let data = Dataset::new("x", 300, d, values).unwrap();
    let s = covariance_spectrum(&data).unwrap();
    let rot = transform(&data, &random_rotation(&mut r, d), 3.5);
    let s2 = covariance_spectrum(&rot).unwrap();
    for (a, b) in s.eigenvalues().iter().zip(s2.eigenvalues()) {
        assert!((a - b).abs() <= 1e-8 * s.eigenvalues()[0]);
    }
    let var: f64 = (0..d)
        .map(|j| {
            let col: Vec<f64> = (0..300).map(|i| data.get(i, j)).collect();
            let m = col.iter().sum::<f64>() / 300.0;
            col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 299.0
        })
        .sum();
    assert!((s.total() - var).abs() <= 1e-8 * var);
}

#[test]
fn line_segment_spectrum() {
    let rows: Vec<[f64; 3]> = (0..50)
        .map(|i| [i as f64 * 0.1, i as f64 * 0.2, -(i as f64) * 0.3])
        .collect();
    let data = Dataset::from_rows("line", &rows).unwrap();
    let s = covariance_spectrum(&data).unwrap();
    assert!(s.eigenvalues()[0] > 0.0);
    assert_eq!(&s.eigenvalues()[1..], &[0.0, 0.0]);
    assert_eq!(s.rank(), 1);
}

#[test]
fn isotropic_gaussian_spectrum() {
    let spec = idim_core::datasets::ManifoldSpec::new("gaussian", 4, 4, 50000, 0);
    let data = idim_core::datasets::generate(&spec).unwrap();
    let s = covariance_spectrum(&data).unwrap();
    assert!(
        s.eigenvalues().iter().all(|&l| (0.95..=1.05).contains(&l)),
        "{:?}",
        s.eigenvalues()
    );
}

#[test]
fn duplicated_columns_double_the_spectrum() {
    let mut r = rng::stream(4, &["dup"]);
    let data = random_dataset(&mut r, 200, 4, false);
    let a = covariance_spectrum(&data).unwrap();
    let b = covariance_spectrum(&data.duplicate_columns()).unwrap();
    for i in 0..4 {
        assert!(
            (b.eigenvalues()[i] - 2.0 * a.eigenvalues()[i]).abs() <= 1e-10 * a.eigenvalues()[0]
        );
    }
    assert!(b.eigenvalues()[4..].iter().all(|&l| l == 0.0));
}

fn pair_dists(d: &Dataset) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..d.n_obj() {
        for j in 0..i {
            out.push(d.dist2(i, j).sqrt());
        }
    }
    out
}

#[test]
fn projection_preserves_distances() {
    let rows: Vec<[f64; 3]> = (0..40)
        .map(|i| [1.0 + i as f64, 2.0 * i as f64, 0.5 * i as f64])
        .collect();
    let line = Dataset::from_rows("line", &rows).unwrap();
    let p1 = pca_project(&line, 1).unwrap();
    for (a, b) in pair_dists(&line).iter().zip(pair_dists(&p1)) {
        assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }
    let mut r = rng::stream(5, &["proj"]);
    let full = random_dataset(&mut r, 60, 5, false);
    let pf = pca_project(&full, 5).unwrap();
    for (a, b) in pair_dists(&full).iter().zip(pair_dists(&pf)) {
        assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }
    assert!(pca_project(&full, 6).is_err());
}

#[test]
fn projection_keeps_dominant_variance() {
    let data = idim_core::datasets::anisotropic_gaussian(
        &[25.0, 16.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        10,
        5000,
        7,
    )
    .unwrap();
    let s = covariance_spectrum(&data).unwrap();
    let p = pca_project(&data, 2).unwrap();
    let kept = covariance_spectrum(&p).unwrap().total();
    let ev = s.eigenvalues();
    assert!(kept >= (ev[0] + ev[1]) * (1.0 - 1e-10));
}

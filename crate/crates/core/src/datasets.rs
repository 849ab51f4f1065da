//! Seeded synthetic manifolds with known intrinsic dimension.
//!
//! Constructions: uniform sphere samples are normalized Gaussian vectors,
//! uniform ball samples are sphere samples scaled by `U^(1/d)`. Manifolds
//! that live in fewer coordinates than `ambient_dim` are zero-padded; the
//! `affine` and `gaussian` entries are additionally rotated by a random
//! orthonormal frame. Noise is isotropic Gaussian in ambient units.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::rng::{self, Rng};

/// Registered generator names.
pub const REGISTRY: &[&str] = &[
    "cube",
    "ball",
    "sphere",
    "affine",
    "gaussian",
    "swiss_roll",
    "helix",
    "moebius",
    "nonlinear_cube",
    "line_disk_ball",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldSpec {
    pub name: String,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
    pub n_points: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ManifoldSpec {
    pub fn new(
        name: &str,
        intrinsic_dim: usize,
        ambient_dim: usize,
        n_points: usize,
        seed: u64,
    ) -> Self {
        ManifoldSpec {
            name: name.into(),
            intrinsic_dim,
            ambient_dim,
            n_points,
            noise_sigma: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    /// Short identifier such as `sphere_d7_D8`.
    pub fn label(&self) -> String {
        format!(
            "{}_d{}_D{}",
            self.name, self.intrinsic_dim, self.ambient_dim
        )
    }

    fn validate(&self) -> Result<()> {
        if !REGISTRY.contains(&self.name.as_str()) {
            return param_err(format!(
                "unknown dataset '{}'; known: {}",
                self.name,
                REGISTRY.join(", ")
            ));
        }
        if self.n_points == 0 || self.intrinsic_dim == 0 || self.ambient_dim == 0 {
            return param_err("dimensions and point count must be positive");
        }
        if self.intrinsic_dim > self.ambient_dim {
            return param_err("intrinsic_dim must not exceed ambient_dim");
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return param_err("noise_sigma must be a nonnegative number");
        }
        let (d, big_d) = (self.intrinsic_dim, self.ambient_dim);
        let fixed = |want_d: usize, min_big_d: usize| -> Result<()> {
            if d != want_d || big_d < min_big_d {
                return param_err(format!(
                    "{} requires d = {} and D >= {}",
                    self.name, want_d, min_big_d
                ));
            }
            Ok(())
        };
        match self.name.as_str() {
            "sphere" if big_d < d + 1 => param_err("sphere S^d needs D >= d + 1"),
            "swiss_roll" | "moebius" => fixed(2, 3),
            "helix" => fixed(1, 3),
            "nonlinear_cube" if big_d < 2 * d => param_err("nonlinear_cube needs D >= 2d"),
            "line_disk_ball" if big_d != 3 || self.n_points < 30 => {
                param_err("line_disk_ball is 3-D and needs at least 30 points")
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn gaussian(r: &mut Rng) -> f64 {
    StandardNormal.sample(r)
}

/// Uniform point on the unit sphere `S^(d-1)` in `R^d`.
pub fn sphere_point(r: &mut Rng, d: usize, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out[..d].iter_mut() {
            *x = gaussian(r);
            norm2 += *x * *x;
        }
        if norm2 > 1e-300 {
            let inv = 1.0 / norm2.sqrt();
            for x in out[..d].iter_mut() {
                *x *= inv;
            }
            return;
        }
    }
}

/// Uniform point in the unit ball of `R^d`.
pub fn ball_point(r: &mut Rng, d: usize, out: &mut [f64]) {
    sphere_point(r, d, out);
    let u: f64 = r.random::<f64>();
    let s = u.powf(1.0 / d as f64);
    for x in out[..d].iter_mut() {
        *x *= s;
    }
}

/// Random `big_d x d` matrix with orthonormal columns (row-major).
pub fn random_frame(r: &mut Rng, big_d: usize, d: usize) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<f64> = (0..big_d).map(|_| gaussian(r)).collect();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
    }
    let mut m = vec![0.0; big_d * d];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..big_d {
            m[i * d + j] = c[i];
        }
    }
    m
}

fn apply_frame(frame: &[f64], big_d: usize, d: usize, x: &[f64], out: &mut [f64]) {
    for i in 0..big_d {
        out[i] = (0..d).map(|j| frame[i * d + j] * x[j]).sum();
    }
}

/// Draws `spec.n_points` points of the registered manifold `spec.name`.
pub fn generate(spec: &ManifoldSpec) -> Result<Dataset> {
    spec.validate()?;
    if spec.name == "line_disk_ball" {
        let per = spec.n_points / 3;
        let data = line_disk_ball_with(per, spec.n_points - 2 * per, spec.seed)?;
        return add_noise(data, spec);
    }
    let (d, big_d, n) = (spec.intrinsic_dim, spec.ambient_dim, spec.n_points);
    let mut r = rng::stream(spec.seed, &["generate", &spec.name]);
    let mut values = vec![0.0; n * big_d];
    let mut latent = vec![0.0; d.max(3) + 1];
    let frame = match spec.name.as_str() {
        "affine" | "gaussian" => Some(random_frame(&mut r, big_d, d)),
        _ => None,
    };
    let offset: Vec<f64> = match spec.name.as_str() {
        "affine" => (0..big_d).map(|_| gaussian(&mut r)).collect(),
        _ => vec![0.0; big_d],
    };
    for row in values.chunks_exact_mut(big_d) {
        match spec.name.as_str() {
            "cube" => row[..d].iter_mut().for_each(|x| *x = r.random::<f64>()),
            "ball" => ball_point(&mut r, d, row),
            "sphere" => sphere_point(&mut r, d + 1, row),
            "affine" => {
                latent[..d]
                    .iter_mut()
                    .for_each(|x| *x = 2.0 * r.random::<f64>() - 1.0);
                apply_frame(frame.as_ref().unwrap(), big_d, d, &latent[..d], row);
                row.iter_mut().zip(&offset).for_each(|(x, o)| *x += o);
            }
            "gaussian" => {
                latent[..d].iter_mut().for_each(|x| *x = gaussian(&mut r));
                apply_frame(frame.as_ref().unwrap(), big_d, d, &latent[..d], row);
            }
            "swiss_roll" => {
                let t = 1.5 * PI * (1.0 + 2.0 * r.random::<f64>());
                let h = 21.0 * r.random::<f64>();
                row[0] = t * t.cos();
                row[1] = h;
                row[2] = t * t.sin();
            }
            "helix" => {
                let t = r.random::<f64>();
                row[0] = (6.0 * PI * t).cos();
                row[1] = (6.0 * PI * t).sin();
                row[2] = 2.0 * t;
            }
            "moebius" => {
                let u = 2.0 * PI * r.random::<f64>();
                let v = 2.0 * r.random::<f64>() - 1.0;
                let rad = 1.0 + 0.5 * v * (u / 2.0).cos();
                row[0] = rad * u.cos();
                row[1] = rad * u.sin();
                row[2] = 0.5 * v * (u / 2.0).sin();
            }
            "nonlinear_cube" => {
                for i in 0..d {
                    let t = r.random::<f64>();
                    row[2 * i] = t;
                    row[2 * i + 1] = 0.5 * (2.0 * PI * t).sin();
                }
            }
            _ => unreachable!(),
        }
    }
    let data = Dataset::new(spec.label(), n, big_d, values)?;
    add_noise(data, spec)
}

fn add_noise(data: Dataset, spec: &ManifoldSpec) -> Result<Dataset> {
    if spec.noise_sigma == 0.0 {
        return Ok(data);
    }
    let mut r = rng::stream(spec.seed, &["noise", &spec.name]);
    let mut values = data.values().to_vec();
    values
        .iter_mut()
        .for_each(|x| *x += spec.noise_sigma * gaussian(&mut r));
    let out = Dataset::new(data.name(), data.n_obj(), data.n_var(), values)?;
    match data.labels() {
        Some(l) => out.with_labels(l.to_vec()),
        None => Ok(out),
    }
}

/// Points where the Line-Disk-Ball components touch.
pub const LINE_DISK_BALL_JUNCTIONS: [[f64; 3]; 2] = [[1.0, 0.0, 0.0], [3.0, 0.0, 0.0]];

/// Diameter of each Line-Disk-Ball component (all equal to 2).
pub const LINE_DISK_BALL_DIAMETER: f64 = 2.0;

/// Whether `row` lies farther than `fraction` of the component diameter
/// from every Line-Disk-Ball junction.
pub fn away_from_junctions(row: &[f64], fraction: f64) -> bool {
    let limit = fraction * LINE_DISK_BALL_DIAMETER;
    LINE_DISK_BALL_JUNCTIONS.iter().all(|j| {
        j.iter()
            .zip(row)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            > limit
    })
}

/// Line-Disk-Ball: a unit 3-ball at the origin (label 3), a segment from
/// `(1,0,0)` to `(3,0,0)` (label 1) and a unit disk in the `z = 0` plane
/// centred at `(4,0,0)` (label 2). The segment touches the ball and the
/// disk rim at single points, see [`LINE_DISK_BALL_JUNCTIONS`].
pub fn line_disk_ball(n_per_component: usize, seed: u64) -> Result<Dataset> {
    if n_per_component < 10 {
        return param_err("line_disk_ball needs at least 10 points per component");
    }
    line_disk_ball_with(n_per_component, n_per_component, seed)
}

fn line_disk_ball_with(n_line_disk: usize, n_ball: usize, seed: u64) -> Result<Dataset> {
    let mut r = rng::stream(seed, &["generate", "line_disk_ball"]);
    let n = 2 * n_line_disk + n_ball;
    let mut values = Vec::with_capacity(n * 3);
    for _ in 0..n_line_disk {
        values.extend_from_slice(&[1.0 + 2.0 * r.random::<f64>(), 0.0, 0.0]);
    }
    let mut p = [0.0; 3];
    for _ in 0..n_line_disk {
        ball_point(&mut r, 2, &mut p);
        values.extend_from_slice(&[4.0 + p[0], p[1], 0.0]);
    }
    for _ in 0..n_ball {
        ball_point(&mut r, 3, &mut p);
        values.extend_from_slice(&p);
    }
    let labels = [vec![1; n_line_disk], vec![2; n_line_disk], vec![3; n_ball]].concat();
    Dataset::new("line_disk_ball", n, 3, values)?.with_labels(labels)
}

/// A zero-mean Gaussian with the given per-axis variances, randomly rotated
/// into `ambient_dim` coordinates.
pub fn anisotropic_gaussian(
    variances: &[f64],
    ambient_dim: usize,
    n_points: usize,
    seed: u64,
) -> Result<Dataset> {
    let d = variances.len();
    if d == 0 || d > ambient_dim || n_points == 0 || variances.iter().any(|v| !(*v > 0.0)) {
        return param_err("need 1 <= len(variances) <= ambient_dim and positive variances");
    }
    let mut r = rng::stream(seed, &["generate", "anisotropic_gaussian"]);
    let frame = random_frame(&mut r, ambient_dim, d);
    let sd: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    let mut values = vec![0.0; n_points * ambient_dim];
    let mut z = vec![0.0; d];
    for row in values.chunks_exact_mut(ambient_dim) {
        z.iter_mut()
            .zip(&sd)
            .for_each(|(x, s)| *x = s * gaussian(&mut r));
        apply_frame(&frame, ambient_dim, d, &z, row);
    }
    Dataset::new(
        format!("aniso_gaussian_d{}_D{}", d, ambient_dim),
        n_points,
        ambient_dim,
        values,
    )
}

/// Fixed list of known-ID manifolds spanning intrinsic dimensions 1–10 and
/// ambient dimensions 3–20.
pub fn benchmark_specs(n_points: usize, seed: u64) -> Vec<ManifoldSpec> {
    let table: [(&str, usize, usize); 14] = [
        ("helix", 1, 3),
        ("sphere", 1, 3),
        ("swiss_roll", 2, 3),
        ("moebius", 2, 3),
        ("sphere", 2, 3),
        ("cube", 3, 5),
        ("affine", 4, 8),
        ("nonlinear_cube", 4, 8),
        ("ball", 5, 10),
        ("gaussian", 6, 12),
        ("sphere", 7, 8),
        ("cube", 8, 12),
        ("affine", 10, 20),
        ("cube", 10, 15),
    ];
    table
        .iter()
        .enumerate()
        .map(|(i, &(name, d, big_d))| {
            ManifoldSpec::new(name, d, big_d, n_points, seed.wrapping_add(i as u64))
        })
        .collect()
}

/// The datasets of [`benchmark_specs`] with their ground-truth ID.
pub fn benchmark_suite(n_points: usize, seed: u64) -> Result<Vec<(Dataset, usize)>> {
    if n_points < 100 {
        return param_err("benchmark_suite needs at least 100 points");
    }
    benchmark_specs(n_points, seed)
        .iter()
        .map(|s| Ok((generate(s)?, s.intrinsic_dim)))
        .collect()
}

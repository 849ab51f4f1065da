//! Shared numeric substrate: exact k-NN, covariance spectra, PCA projection.
//!
//! The metric is Euclidean throughout.

mod eigen;
mod kdtree;
mod knn;
mod spectrum;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use knn::{knn, knn_brute_force, knn_kdtree, NeighborGraph, KDTREE_MAX_DIM};
pub use spectrum::{covariance_matrix, covariance_spectrum, pca, pca_project, Pca, Spectrum};

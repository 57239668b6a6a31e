//! k-groups: clustering by energy distance.
//!
//! Points are grouped so as to minimize the within-cluster energy dispersion
//! `W = Σ_j (n_j / 2) G(π_j, π_j)`, where `G(A, B)` is the mean α-powered
//! Euclidean distance between two sets. Two local searches are provided:
//! single-point relocation ([`solver::fit_first_variation`]) and relocation
//! of nearest-neighbour pairs ([`solver::fit_second_variation`]). At α = 2
//! the objective is the k-means within sum of squares, and
//! [`solver::fit_kmeans_alpha2`] runs the same search with centroids.
//!
//! ```
//! use kgroups::{fit, Alpha, DataMatrix, FitConfig, Mode};
//!
//! let data = DataMatrix::from_column(&[0.0, 0.2, 0.1, 9.0, 9.3, 9.1]).unwrap();
//! let cfg = FitConfig::new(2, Alpha::ONE, Mode::FirstVariation).with_seed(7);
//! let result = fit(&data, &cfg).unwrap();
//! let labels = result.partition.labels();
//! assert_eq!(labels[0], labels[1]);
//! assert_ne!(labels[0], labels[3]);
//! ```

pub mod datagen;
pub mod energy;
pub mod error;
pub mod partition;
pub mod solver;
pub mod sum;
pub mod validation;

pub use datagen::{generate, LabeledSample, MixtureSpec};
pub use energy::{alpha_distance, disco, dispersion_g, two_sample_xi, weighted_statistic, Alpha, DataMatrix, Disco, DistanceCache};
pub use error::{Error, Result};
pub use partition::{move_point, move_points, random_partition, ClusterSumLedger, Partition};
pub use solver::{
    first_variation_delta, fit, fit_first_variation, fit_kmeans_alpha2, fit_second_variation, mth_variation_delta,
    FitConfig, FitResult, Mode,
};
pub use validation::{adjusted_rand, diag_index, kappa_index, rand_index, ContingencyTable, IndexReport};

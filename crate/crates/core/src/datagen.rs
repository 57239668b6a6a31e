//! Seeded mixture generators with ground-truth component labels.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`, whose output stream is fixed by its specification,
//! so samples are reproducible across platforms. Transforms:
//!
//! * uniform: `rng.gen::<f64>()` in `[0, 1)`
//! * normal: Box–Muller, cosine branch only,
//!   `sqrt(-2 ln(1 - u₁)) · cos(2π u₂)`
//! * lognormal: `exp` of the normal draw
//! * Cauchy: inverse CDF, `location + scale · tan(π(u - ½))`
//! * cubic: independent `Uniform(lower, upper)` per coordinate
//!
//! For each row the component is drawn first (one uniform against the
//! cumulative weights), then its coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::DataMatrix;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Normal { mean: f64, sd: f64 },
    Lognormal { meanlog: f64, sdlog: f64 },
    Cauchy { location: f64, scale: f64 },
    CubicUniform { lower: f64, upper: f64 },
}

impl Family {
    fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            Family::Normal { mean, sd } if finite(&[mean, sd]) && sd >= 0.0 => Ok(()),
            Family::Lognormal { meanlog, sdlog } if finite(&[meanlog, sdlog]) && sdlog > 0.0 => Ok(()),
            Family::Cauchy { location, scale } if finite(&[location, scale]) && scale > 0.0 => Ok(()),
            Family::CubicUniform { lower, upper } if finite(&[lower, upper]) && lower < upper => Ok(()),
            other => Err(invalid(format!("invalid distribution parameters: {other:?}"))),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Family::Normal { mean, sd } => mean + sd * standard_normal(rng),
            Family::Lognormal { meanlog, sdlog } => (meanlog + sdlog * standard_normal(rng)).exp(),
            Family::Cauchy { location, scale } => cauchy_quantile(rng.gen::<f64>(), location, scale),
            Family::CubicUniform { lower, upper } => lower + (upper - lower) * rng.gen::<f64>(),
        }
    }
}

/// Box–Muller, cosine branch.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Cauchy quantile function.
pub fn cauchy_quantile(u: f64, location: f64, scale: f64) -> f64 {
    location + scale * (std::f64::consts::PI * (u - 0.5)).tan()
}

/// `n` iid Cauchy(location, scale) draws.
pub fn cauchy_sample(location: f64, scale: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let family = Family::Cauchy { location, scale };
    family.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| family.draw(&mut rng)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    #[serde(flatten)]
    pub family: Family,
    #[serde(default = "one")]
    pub dim: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub components: Vec<Component>,
    pub n: usize,
    pub seed: u64,
}

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.components.first() else {
            return Err(invalid("mixture has no components"));
        };
        if self.n == 0 {
            return Err(invalid("sample size must be positive"));
        }
        if first.dim == 0 {
            return Err(invalid("component dimension must be at least 1"));
        }
        for c in &self.components {
            c.family.validate()?;
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(invalid(format!("component weight {} is not positive", c.weight)));
            }
            if c.dim != first.dim {
                return Err(invalid("all components must share one dimension"));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("component weights sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, |c| c.dim)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Data plus the index of the component that generated each row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub data: DataMatrix,
    pub truth: Vec<usize>,
}

pub fn generate(spec: &MixtureSpec) -> Result<LabeledSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dim = spec.dim();
    let mut cumulative = Vec::with_capacity(spec.components.len());
    let mut acc = 0.0;
    for c in &spec.components {
        acc += c.weight;
        cumulative.push(acc);
    }
    let last = spec.components.len() - 1;
    let mut values = Vec::with_capacity(spec.n * dim);
    let mut truth = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let u = rng.gen::<f64>() * acc;
        let comp = cumulative.iter().position(|&c| u < c).unwrap_or(last);
        let family = spec.components[comp].family;
        for _ in 0..dim {
            values.push(family.draw(&mut rng));
        }
        truth.push(comp);
    }
    Ok(LabeledSample {
        data: DataMatrix::new(spec.n, dim, values)?,
        truth,
    })
}

/// The two-component location and scale designs used by the benchmarks.
pub mod designs {
    use super::{Component, Family, MixtureSpec};

    fn even(a: Family, b: Family, dim: usize, n: usize, seed: u64) -> MixtureSpec {
        MixtureSpec {
            components: vec![
                Component { weight: 0.5, family: a, dim },
                Component { weight: 0.5, family: b, dim },
            ],
            n,
            seed,
        }
    }

    /// `0.5·N(0, 1) + 0.5·N(d, 1)`
    pub fn normal_location(d: f64, n: usize, seed: u64) -> MixtureSpec {
        even(
            Family::Normal { mean: 0.0, sd: 1.0 },
            Family::Normal { mean: d, sd: 1.0 },
            1,
            n,
            seed,
        )
    }

    /// `0.5·logN(0, 1) + 0.5·logN(d, 1)`
    pub fn lognormal_location(d: f64, n: usize, seed: u64) -> MixtureSpec {
        even(
            Family::Lognormal { meanlog: 0.0, sdlog: 1.0 },
            Family::Lognormal { meanlog: d, sdlog: 1.0 },
            1,
            n,
            seed,
        )
    }

    /// `0.5·Cauchy(0, 1) + 0.5·Cauchy(d, 1)`
    pub fn cauchy_location(d: f64, n: usize, seed: u64) -> MixtureSpec {
        even(
            Family::Cauchy { location: 0.0, scale: 1.0 },
            Family::Cauchy { location: d, scale: 1.0 },
            1,
            n,
            seed,
        )
    }

    /// `0.5·Cubic^dim(0, 1) + 0.5·Cubic^dim(0.3, 0.7)`
    pub fn cubic(dim: usize, n: usize, seed: u64) -> MixtureSpec {
        even(
            Family::CubicUniform { lower: 0.0, upper: 1.0 },
            Family::CubicUniform { lower: 0.3, upper: 0.7 },
            dim,
            n,
            seed,
        )
    }
}

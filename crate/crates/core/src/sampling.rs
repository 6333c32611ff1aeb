//! Seeded point sampling in regions and coset domains.
//!
//! The uniform sampler draws from the hyperbolic measure `dx dy / y²` on a
//! bounding box (inverse CDF in `y`) and rejects points outside the region.
//! The grid sampler does the same and then snaps both coordinates to a fixed
//! denominator, so the resulting points are exact rationals.

use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{self, Region};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::group::SubgroupSpec;
use crate::hyperbolic::{self, UHPoint};

/// Draw limit per point before giving up.
pub const MAX_DRAWS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Grid,
    Uniform,
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Sampler::Grid),
            "uniform" => Ok(Sampler::Uniform),
            _ => Err(Error::InvalidArgument(format!(
                "unknown sampler `{s}`, expected grid or uniform"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub kind: Sampler,
    /// Cusp ends are cut at this height.
    pub y_cap: f64,
    /// Grid denominator for the rational sampler.
    pub denominator: i64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            kind: Sampler::Grid,
            y_cap: 10.0,
            denominator: 10_000,
        }
    }
}

impl SamplerConfig {
    pub fn new(kind: Sampler) -> Self {
        SamplerConfig {
            kind,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.y_cap > 3f64.sqrt() / 2.0) || !self.y_cap.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "y cap {} is below the standard domain",
                self.y_cap
            )));
        }
        if self.denominator < 1 {
            return Err(Error::InvalidArgument(
                "grid denominator must be positive".into(),
            ));
        }
        Ok(())
    }
}

struct BoxSampler {
    x0: f64,
    x1: f64,
    inv_y0: f64,
    inv_y1: f64,
}

impl BoxSampler {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        BoxSampler {
            x0,
            x1,
            inv_y0: 1.0 / y0,
            inv_y1: 1.0 / y1,
        }
    }

    /// Density proportional to `1/y²` on the box.
    fn draw(&self, rng: &mut impl Rng) -> (f64, f64) {
        let x = self.x0 + rng.gen::<f64>() * (self.x1 - self.x0);
        let u: f64 = rng.gen();
        let y = 1.0 / (self.inv_y0 - u * (self.inv_y0 - self.inv_y1));
        (x, y)
    }
}

fn snap(v: f64, den: i64) -> Rational {
    let n = (v * den as f64).round();
    Rational::new(BigInt::from(n as i64), BigInt::from(den))
}

fn to_point(x: f64, y: f64, config: &SamplerConfig) -> Option<UHPoint> {
    match config.kind {
        Sampler::Uniform => UHPoint::float(x, y).ok(),
        Sampler::Grid => {
            UHPoint::exact(snap(x, config.denominator), snap(y, config.denominator)).ok()
        }
    }
}

/// A point of `F` in the half-open form returned by [`domain::reduce_to_f`],
/// below the cap.
fn draw_reduced(config: &SamplerConfig, rng: &mut impl Rng) -> Result<UHPoint> {
    let bs = BoxSampler::new(-0.5, 0.5, 3f64.sqrt() / 2.0, config.y_cap);
    for _ in 0..MAX_DRAWS {
        let (x, y) = bs.draw(rng);
        if let Some(p) = to_point(x, y, config) {
            if domain::is_reduced(&p) && p.y_f64() <= config.y_cap {
                return Ok(p);
            }
        }
    }
    Err(Error::Sampling(MAX_DRAWS))
}

/// `n` points of `F_Γ`; each point picks a piece `αᵢ(F)` uniformly (all
/// pieces have equal area) and a point of `F` from the sampler.
pub fn sample_points(
    spec: &SubgroupSpec,
    n: usize,
    config: &SamplerConfig,
    seed: u64,
) -> Result<Vec<UHPoint>> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reps = spec.coset_representatives();
    (0..n)
        .map(|_| {
            let i = if reps.len() == 1 {
                0
            } else {
                rng.gen_range(0..reps.len())
            };
            let z = draw_reduced(config, &mut rng)?;
            Ok(reps[i].apply(&z))
        })
        .collect()
}

/// `n` points of `region` under the hyperbolic measure.
pub fn sample_region(
    region: &Region,
    n: usize,
    config: &SamplerConfig,
    rng: &mut impl Rng,
) -> Result<Vec<UHPoint>> {
    config.check()?;
    (0..n).map(|_| sample_one(region, config, rng)).collect()
}

fn sample_one(region: &Region, config: &SamplerConfig, rng: &mut impl Rng) -> Result<UHPoint> {
    let h = 3f64.sqrt() / 2.0;
    let cap = config.y_cap;
    let bs = match region {
        Region::Standard => BoxSampler::new(-0.5, 0.5, h, cap),
        Region::Cusp { height } => {
            let u = crate::exact::to_f64(height);
            BoxSampler::new(-0.5, 0.5, u, cap.max(u + 1.0))
        }
        Region::Central { height } => BoxSampler::new(-0.5, 0.5, h, crate::exact::to_f64(height)),
        Region::Strip { height, .. } => BoxSampler::new(0.0, 1.0, *height, cap.max(5.0 * height)),
        Region::Translate { .. } => BoxSampler::new(-0.5, 0.5, h, cap),
        Region::Ball {
            center,
            cosh_radius,
        } => {
            let r = cosh_radius.max(1.0).acosh();
            let (x0, y0) = (center.x_f64(), center.y_f64());
            let (lo, hi) = (y0 * (-r).exp(), y0 * r.exp());
            let half = y0 * r.sinh();
            BoxSampler::new(x0 - half, x0 + half, lo, hi.max(lo * (1.0 + 1e-12)))
        }
    };
    for _ in 0..MAX_DRAWS {
        let (x, y) = bs.draw(rng);
        let Some(p) = to_point(x, y, config) else {
            continue;
        };
        let p = match region {
            Region::Strip { scaling, .. } => hyperbolic::mobius_apply(scaling, &p),
            Region::Translate { alpha } => {
                if !Region::Standard.contains(&p) {
                    continue;
                }
                alpha.apply(&p)
            }
            _ => p,
        };
        if region.contains(&p) {
            return Ok(p);
        }
    }
    Err(Error::Sampling(MAX_DRAWS))
}

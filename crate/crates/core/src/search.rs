//! Search for equilateral point sets on `Γ\H²`.
//!
//! Points are placed one at a time. The first two sit on the imaginary axis;
//! each further point solves `2 cosh d_Y(z, pⱼ) = 2 cosh d` for all earlier
//! `pⱼ` by damped Gauss-Newton in the coordinates `(x, ln y)`, with seeded
//! random restarts. If a point cannot be placed, all points so far are
//! re-solved together from random starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain;
use crate::error::{Error, Result};
use crate::group::SubgroupSpec;
use crate::hyperbolic::UHPoint;
use crate::metrics;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Restarts allowed per placed point.
    pub budget: usize,
    pub seed: u64,
    /// Acceptance bound on the largest `2 cosh` deviation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 200,
            seed: 0,
            tolerance: 1e-10,
            max_iterations: 60,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilateralCandidate {
    pub points: Vec<UHPoint>,
    /// Target distance `d`.
    pub distance: f64,
    pub two_cosh: f64,
    /// Largest `|2 cosh d_Y(pᵢ, pⱼ) − 2 cosh d|` over pairs.
    pub residual: f64,
}

/// `k` points with pairwise surface distance `d`, or `None` when the budget
/// runs out (which proves nothing).
pub fn equilateral_search(
    spec: &SubgroupSpec,
    k: usize,
    d: f64,
    config: &SearchConfig,
) -> Result<Option<EquilateralCandidate>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 points, got {k}"
        )));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "distance must be positive, got {d}"
        )));
    }
    let target = 2.0 * d.cosh();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = vec![UHPoint::float(0.0, 2.0)?];
    let second = UHPoint::float(0.0, 2.0 * d.exp())?;
    let mut starts = vec![(0.0, (2.0 * d.exp()).ln())];
    if residual_max(spec, &second, &points, target)? > config.tolerance {
        starts.clear();
    }
    for j in 1..k {
        if j == 2 {
            starts.push(plane_third_point(d));
        }
        match place(spec, &points, target, &starts, config, &mut rng)? {
            Some(z) => points.push(z),
            None => match place_jointly(spec, j + 1, target, config, &mut rng)? {
                Some(all) => points = all,
                None => return Ok(None),
            },
        }
        starts.clear();
    }
    let points = points
        .iter()
        .map(|p| domain::reduce_to_subgroup_domain(p, spec).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let residual = candidate_residual(spec, &points, target)?;
    if residual > config.tolerance {
        return Ok(None);
    }
    Ok(Some(EquilateralCandidate {
        points,
        distance: d,
        two_cosh: target,
        residual,
    }))
}

/// Largest pairwise deviation, recomputed with the oracle.
pub fn candidate_residual(spec: &SubgroupSpec, points: &[UHPoint], target: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let v = metrics::surface_distance_oracle(p, q, spec)?.two_cosh();
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}

/// Third vertex of the plane triangle on `2i`, `2eᵈ i`, in `(x, ln y)`.
fn plane_third_point(d: f64) -> (f64, f64) {
    let r2 = 4.0 * d.exp();
    let y = (r2 + 4.0) / (2.0 * 2.0 * d.cosh());
    let x = (r2 - y * y).max(0.0).sqrt();
    (x, y.ln())
}

fn residuals(spec: &SubgroupSpec, z: &UHPoint, fixed: &[UHPoint], target: f64) -> Result<Vec<f64>> {
    fixed
        .iter()
        .map(|p| Ok(metrics::surface_distance_oracle(z, p, spec)?.two_cosh() - target))
        .collect()
}

fn residual_max(spec: &SubgroupSpec, z: &UHPoint, fixed: &[UHPoint], target: f64) -> Result<f64> {
    Ok(residuals(spec, z, fixed, target)?
        .iter()
        .fold(0.0, |m, r| m.max(r.abs())))
}

fn point_at(u: (f64, f64)) -> Result<UHPoint> {
    UHPoint::float(u.0, u.1.exp())
}

/// Restart points in `(x, ln y)`, spread over a box around `F`.
fn random_start(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (
        rng.gen_range(-0.5..0.5),
        rng.gen_range((0.8f64).ln()..(6.0f64).ln()),
    )
}

fn place(
    spec: &SubgroupSpec,
    fixed: &[UHPoint],
    target: f64,
    starts: &[(f64, f64)],
    config: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Option<UHPoint>> {
    let f = |u: &[f64]| -> Result<Vec<f64>> {
        residuals(spec, &point_at((u[0], u[1]))?, fixed, target)
    };
    for attempt in 0..config.budget.max(starts.len()) {
        let start = starts
            .get(attempt)
            .copied()
            .unwrap_or_else(|| random_start(rng));
        if let Some(u) = levenberg_marquardt(&f, vec![start.0, start.1], config)? {
            return Ok(Some(point_at((u[0], u[1]))?));
        }
    }
    Ok(None)
}

/// Moves all points jointly, the first one included; used when
/// one-at-a-time placement around the fixed first point gets stuck.
fn place_jointly(
    spec: &SubgroupSpec,
    count: usize,
    target: f64,
    config: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<UHPoint>>> {
    let unpack = |u: &[f64]| -> Result<Vec<UHPoint>> {
        u.chunks_exact(2).map(|c| point_at((c[0], c[1]))).collect()
    };
    let f = |u: &[f64]| -> Result<Vec<f64>> {
        let pts = unpack(u)?;
        let mut r = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                r.push(metrics::surface_distance_oracle(p, q, spec)?.two_cosh() - target);
            }
        }
        Ok(r)
    };
    for _ in 0..config.budget {
        let u0: Vec<f64> = (0..count)
            .flat_map(|_| {
                let (x, s) = random_start(rng);
                [x, s]
            })
            .collect();
        if let Some(u) = levenberg_marquardt(&f, u0, config)? {
            return Ok(Some(unpack(&u)?));
        }
    }
    Ok(None)
}

/// Damped Gauss-Newton with a central-difference Jacobian. Returns the
/// parameters once every residual is below a hundredth of the tolerance.
fn levenberg_marquardt(
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    mut u: Vec<f64>,
    config: &SearchConfig,
) -> Result<Option<Vec<f64>>> {
    let goal = config.tolerance * 0.01;
    let norm2 = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let out_of_range = |u: &[f64]| u.iter().skip(1).step_by(2).any(|s| s.abs() > 30.0);
    let n = u.len();
    let mut r = f(&u)?;
    let mut mu = 1e-3;
    for _ in 0..config.max_iterations {
        if r.iter().all(|v| v.abs() <= goal) {
            return Ok(Some(u));
        }
        let h = 1e-6;
        let mut jac = vec![vec![0.0; r.len()]; n];
        for (k, col) in jac.iter_mut().enumerate() {
            let mut up = u.clone();
            let mut down = u.clone();
            up[k] += h;
            down[k] -= h;
            let (ru, rd) = (f(&up)?, f(&down)?);
            for (c, (a, b)) in col.iter_mut().zip(ru.iter().zip(&rd)) {
                *c = (a - b) / (2.0 * h);
            }
        }
        let jtj: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&jac[i], &jac[j])).collect())
            .collect();
        let jtr: Vec<f64> = (0..n).map(|i| dot(&jac[i], &r)).collect();
        let current = norm2(&r);
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += mu * (1.0 + row[i]);
            }
            let Some(step) = solve_linear(a, jtr.iter().map(|v| -v).collect()) else {
                mu *= 10.0;
                continue;
            };
            let next: Vec<f64> = u
                .iter()
                .zip(&step)
                .map(|(x, d)| x + d.clamp(-2.0, 2.0))
                .collect();
            if out_of_range(&next) {
                mu *= 10.0;
                continue;
            }
            let rn = f(&next)?;
            if norm2(&rn) < current {
                u = next;
                r = rn;
                mu = (mu / 10.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(r.iter().all(|v| v.abs() <= goal).then_some(u))
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_always_work() {
        for d in [0.3, 1.0, 2.5] {
            let c = equilateral_search(&SubgroupSpec::full(), 2, d, &SearchConfig::default())
                .unwrap()
                .unwrap();
            assert_eq!(c.points.len(), 2);
            assert!(c.residual <= 1e-10);
        }
    }

    #[test]
    fn triangle_on_modular_surface() {
        let spec = SubgroupSpec::full();
        let c = equilateral_search(&spec, 3, 0.5, &SearchConfig::default())
            .unwrap()
            .unwrap();
        assert!(c.residual <= 1e-10);
        assert!(candidate_residual(&spec, &c.points, c.two_cosh).unwrap() <= 1e-10);
        assert!(candidate_residual(&spec, &c.points[..2], c.two_cosh).unwrap() <= 1e-10);
    }

    #[test]
    fn plane_vertex_is_equidistant() {
        let d = 0.7;
        let (x, s) = plane_third_point(d);
        let z = UHPoint::float(x, s.exp()).unwrap();
        let a = crate::hyperbolic::cosh_distance(&z, &UHPoint::ints(0, 2)).two_cosh();
        let b = crate::hyperbolic::cosh_distance(&z, &UHPoint::float(0.0, 2.0 * d.exp()).unwrap())
            .two_cosh();
        assert!((a - 2.0 * d.cosh()).abs() < 1e-12 && (b - 2.0 * d.cosh()).abs() < 1e-12);
    }

    #[test]
    fn bad_arguments() {
        let cfg = SearchConfig::default();
        assert!(equilateral_search(&SubgroupSpec::full(), 1, 1.0, &cfg).is_err());
        assert!(equilateral_search(&SubgroupSpec::full(), 3, -1.0, &cfg).is_err());
    }
}

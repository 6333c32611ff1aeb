//! Orbit points in a disc: `{γ ∈ Γ : cosh d(p, γq) ≤ H}`.
//!
//! The main enumerator sweeps the bottom row `(c, d)` directly. For fixed
//! `(c, d)` the imaginary part `v = Im γq = y_q / |cq + d|²` is fixed and the
//! remaining freedom is `γ ↦ Tᵏγ`, which shifts `Re γq` by `k`. Both ranges
//! follow from `2 cosh d(p, w) ≥ y_p/v + v/y_p`.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact;
use crate::group::{ModularElement, SubgroupSpec};
use crate::hyperbolic::{DistanceKey, PreparedPoint, UHPoint};

/// Default limit on the number of candidate elements examined.
pub const DEFAULT_CAP: usize = 20_000_000;

const OUTWARD: f64 = 1e-9;
const PAR_MIN_ROWS: i64 = 48;

fn outward(v: f64) -> f64 {
    v + OUTWARD * v.abs().max(1.0)
}

/// A disc query `cosh d(center, γ source) ≤ cosh_radius` over `γ ∈ spec`.
#[derive(Clone, Debug)]
pub struct BallQuery {
    pub spec: SubgroupSpec,
    pub center: UHPoint,
    pub source: UHPoint,
    pub cosh_radius: f64,
    pub cap: usize,
}

impl BallQuery {
    pub fn new(spec: SubgroupSpec, center: UHPoint, source: UHPoint, cosh_radius: f64) -> Self {
        BallQuery {
            spec,
            center,
            source,
            cosh_radius,
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn check(&self) -> Result<()> {
        if !self.cosh_radius.is_finite() || self.cosh_radius < 1.0 {
            return Err(Error::Threshold(self.cosh_radius));
        }
        Ok(())
    }
}

/// All `γ ∈ Γ` with `cosh d(center, γ source) ≤ H`, sorted by `(c, d, a)`.
pub fn enumerate_ball(query: &BallQuery) -> Result<Vec<ModularElement>> {
    Ok(enumerate_ball_with_keys(query)?
        .into_iter()
        .map(|(g, _)| g)
        .collect())
}

/// Like [`enumerate_ball`], also returning each `2 cosh d(center, γ source)`.
///
/// For exact points the bound is tested exactly against the rational value
/// of `2H`; float points use the relative tolerance.
pub fn enumerate_ball_with_keys(query: &BallQuery) -> Result<Vec<(ModularElement, DistanceKey)>> {
    query.check()?;
    let p = PreparedPoint::new(&query.center);
    let q = PreparedPoint::new(&query.source);
    let two_h = 2.0 * query.cosh_radius;
    let bound = exact::from_f64(two_h)
        .map(|r| crate::exact::ExactKey::from_big(r))
        .ok_or(Error::Threshold(two_h))?;
    let candidates = sweep_parallel(&p, &q, query.cosh_radius, query.cap)?;
    let mut out: Vec<(ModularElement, DistanceKey)> = candidates
        .into_iter()
        .filter(|(g, _)| query.spec.is_member(g))
        .filter_map(|(g, _)| {
            let key = p.two_cosh(&g, &q);
            let keep = match &key {
                DistanceKey::Exact(k) => *k <= bound,
                DistanceKey::Float(v) => crate::hyperbolic::within(*v, two_h),
            };
            keep.then_some((g, key))
        })
        .collect();
    out.sort_by_key(|(g, _)| g.sort_key());
    out.dedup_by(|x, y| x.0 == y.0);
    Ok(out)
}

/// Bottom rows `(c, d)` are grouped by `c`; this splits the `c` range across
/// threads when it is large enough to pay for it.
pub(crate) fn sweep_parallel(
    p: &PreparedPoint,
    q: &PreparedPoint,
    cosh_radius: f64,
    cap: usize,
) -> Result<Vec<(ModularElement, f64)>> {
    let bounds = SweepBounds::new(p, q, cosh_radius, cap)?;
    if bounds.c_max < PAR_MIN_ROWS {
        let mut out = Vec::new();
        for c in 0..=bounds.c_max {
            bounds.row(c, &mut out)?;
            if out.len() > cap {
                return Err(Error::CapExceeded(cap));
            }
        }
        return Ok(out);
    }
    let rows: Vec<Vec<(ModularElement, f64)>> = (0..=bounds.c_max)
        .into_par_iter()
        .map(|c| {
            let mut row = Vec::new();
            bounds.row(c, &mut row).map(|_| row)
        })
        .collect::<Result<_>>()?;
    let total: usize = rows.iter().map(Vec::len).sum();
    if total > cap {
        return Err(Error::CapExceeded(cap));
    }
    Ok(rows.into_iter().flatten().collect())
}

/// Sequential sweep; pushes every full-group element whose float value of
/// `2 cosh d(p, γq)` passes the outward-rounded bound.
pub(crate) fn sweep(
    p: &PreparedPoint,
    q: &PreparedPoint,
    cosh_radius: f64,
    cap: usize,
    out: &mut Vec<(ModularElement, f64)>,
) -> Result<()> {
    let bounds = SweepBounds::new(p, q, cosh_radius, cap)?;
    let start = out.len();
    for c in 0..=bounds.c_max {
        bounds.row(c, out)?;
        if out.len() - start > cap {
            return Err(Error::CapExceeded(cap));
        }
    }
    Ok(())
}

struct SweepBounds<'a> {
    p: &'a PreparedPoint,
    q: &'a PreparedPoint,
    h: f64,
    /// Range of `|cq + d|²`.
    lo: f64,
    hi: f64,
    c_max: i64,
    filter: f64,
    cap: usize,
}

impl<'a> SweepBounds<'a> {
    fn new(p: &'a PreparedPoint, q: &'a PreparedPoint, h: f64, cap: usize) -> Result<Self> {
        if !h.is_finite() || h < 1.0 {
            return Err(Error::Threshold(h));
        }
        let lambda = outward(h + (h * h - 1.0).max(0.0).sqrt());
        let hi = outward(q.y * lambda / p.y);
        let lo = q.y / (p.y * lambda) * (1.0 - OUTWARD);
        let c_bound = outward(hi.sqrt() / q.y).floor();
        if c_bound > cap as f64 || c_bound > 1e15 {
            return Err(Error::CapExceeded(cap));
        }
        Ok(SweepBounds {
            p,
            q,
            h,
            lo,
            hi,
            c_max: c_bound as i64,
            filter: outward(2.0 * h),
            cap,
        })
    }

    fn row(&self, c: i64, out: &mut Vec<(ModularElement, f64)>) -> Result<()> {
        let (xq, yq) = (self.q.x, self.q.y);
        let cf = c as f64;
        let rest = self.hi - cf * cf * yq * yq;
        if rest < 0.0 {
            return Ok(());
        }
        if c == 0 {
            if self.lo <= 1.0 && 1.0 <= self.hi {
                self.family(ModularElement::IDENTITY, out)?;
            }
            return Ok(());
        }
        let centre = -cf * xq;
        let half = outward(rest.sqrt());
        let d_lo = (centre - half).ceil();
        let d_hi = (centre + half).floor();
        if (d_hi - d_lo) > self.cap as f64 {
            return Err(Error::CapExceeded(self.cap));
        }
        let mut d = d_lo as i64;
        while d as f64 <= d_hi {
            let df = d as f64;
            let norm = (cf * xq + df).powi(2) + cf * cf * yq * yq;
            if norm >= self.lo && norm <= self.hi && gcd(c, d) == 1 {
                let (a0, b0) = bezout(c, d);
                self.family(ModularElement { a: a0, b: b0, c, d }, out)?;
            }
            d += 1;
        }
        Ok(())
    }

    /// Elements `Tᵏ g` passing the float bound.
    fn family(&self, g: ModularElement, out: &mut Vec<(ModularElement, f64)>) -> Result<()> {
        let (xq, yq) = (self.q.x, self.q.y);
        let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
        let cx = c * xq + d;
        let norm = cx * cx + c * c * yq * yq;
        let u0 = ((a * xq + b) * cx + a * c * yq * yq) / norm;
        let v = yq / norm;
        let yp = self.p.y;
        let r = 2.0 * self.h * yp * v - yp * yp - v * v;
        let r = r + OUTWARD * (2.0 * self.h * yp * v).max(1.0);
        if r < 0.0 {
            return Ok(());
        }
        let centre = self.p.x - u0;
        let half = r.sqrt() + OUTWARD;
        let k_lo = (centre - half).ceil();
        let k_hi = (centre + half).floor();
        if !(k_lo.abs() < 4e18 && k_hi.abs() < 4e18) {
            return Err(Error::Overflow);
        }
        if k_hi - k_lo > self.cap as f64 {
            return Err(Error::CapExceeded(self.cap));
        }
        let mut k = k_lo as i64;
        while k as f64 <= k_hi {
            let gk = ModularElement {
                a: g.a
                    .checked_add(k.checked_mul(g.c).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?,
                b: g.b
                    .checked_add(k.checked_mul(g.d).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?,
                c: g.c,
                d: g.d,
            };
            let val = self.p.two_cosh_f64(&gk, self.q);
            if val <= self.filter {
                out.push((gk, val));
            }
            k += 1;
        }
        Ok(())
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(a, b)` with `a·d − b·c = 1`, for coprime `c > 0` and `d`.
fn bezout(c: i64, d: i64) -> (i64, i64) {
    // Extended Euclid on (d, c): s·d + t·c = g.
    let (mut r0, mut r1) = (d as i128, c as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    if r0 < 0 {
        s0 = -s0;
        t0 = -t0;
    }
    debug_assert_eq!(s0 * d as i128 + t0 * c as i128, 1);
    (s0 as i64, (-t0) as i64)
}

/// Word-length BFS over `{S, T, T⁻¹}` with right multiplication.
///
/// Only used to cross-check [`enumerate_ball`]. Nodes with
/// `cosh d(p, g q) > 64 (H + 1)` are not expanded; with `prune = false` every
/// word up to `max_word_length` is visited.
pub fn enumerate_ball_bfs_oracle(
    query: &BallQuery,
    max_word_length: usize,
) -> Result<Vec<ModularElement>> {
    enumerate_ball_bfs(query, max_word_length, true)
}

pub fn enumerate_ball_bfs(
    query: &BallQuery,
    max_word_length: usize,
    prune: bool,
) -> Result<Vec<ModularElement>> {
    query.check()?;
    let p = PreparedPoint::new(&query.center);
    let q = PreparedPoint::new(&query.source);
    let prune_at = 2.0 * 64.0 * (query.cosh_radius + 1.0);
    let two_h = exact::from_f64(2.0 * query.cosh_radius).map(crate::exact::ExactKey::from_big);
    let mut seen: HashSet<ModularElement> = HashSet::from([ModularElement::IDENTITY]);
    let mut queue = VecDeque::from([(ModularElement::IDENTITY, 0usize)]);
    let mut found = Vec::new();
    while let Some((g, depth)) = queue.pop_front() {
        let val = p.two_cosh_f64(&g, &q);
        let inside = match (p.two_cosh(&g, &q), &two_h) {
            (DistanceKey::Exact(k), Some(b)) => k <= *b,
            (key, _) => crate::hyperbolic::within(key.two_cosh(), 2.0 * query.cosh_radius),
        };
        if inside && query.spec.is_member(&g) {
            found.push(g);
        }
        if depth == max_word_length || (prune && val > prune_at) {
            continue;
        }
        for s in ModularElement::GENERATORS {
            let next = g.compose(&s)?;
            if seen.insert(next) {
                queue.push_back((next, depth + 1));
            }
        }
        if seen.len() > query.cap {
            return Err(Error::CapExceeded(query.cap));
        }
    }
    found.sort_by_key(ModularElement::sort_key);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ModularElement;

    fn full_query(p: UHPoint, h: f64) -> BallQuery {
        BallQuery::new(SubgroupSpec::full(), p.clone(), p, h)
    }

    #[test]
    fn trivial_balls() {
        assert_eq!(
            enumerate_ball(&full_query(UHPoint::ints(0, 2), 1.0)).unwrap(),
            vec![M::IDENTITY]
        );
        assert_eq!(
            enumerate_ball(&full_query(UHPoint::i(), 1.0)).unwrap(),
            vec![M::IDENTITY, M::S]
        );
        assert_eq!(
            enumerate_ball_bfs_oracle(&full_query(UHPoint::ints(0, 2), 1.0), 0).unwrap(),
            vec![M::IDENTITY]
        );
        assert_eq!(
            enumerate_ball_bfs_oracle(&full_query(UHPoint::i(), 1.0), 1).unwrap(),
            vec![M::IDENTITY, M::S]
        );
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(matches!(
            enumerate_ball(&full_query(UHPoint::i(), 0.5)),
            Err(Error::Threshold(_))
        ));
        assert!(enumerate_ball(&full_query(UHPoint::i(), f64::NAN)).is_err());
    }

    #[test]
    fn agrees_with_bfs_at_cosh_two() {
        let q = full_query(UHPoint::ints(0, 2), 2f64.cosh());
        let a = enumerate_ball(&q).unwrap();
        let b = enumerate_ball_bfs_oracle(&q, 30).unwrap();
        assert_eq!(a, b);
        assert!(a.len() > 1);
    }

    #[test]
    fn pruning_matches_full_bfs_on_short_words() {
        for (p, h) in [(UHPoint::ratio(1, 3, 3, 2), 3.0), (UHPoint::i(), 5.0)] {
            let q = full_query(p, h);
            assert_eq!(
                enumerate_ball_bfs(&q, 12, true).unwrap(),
                enumerate_ball_bfs(&q, 12, false).unwrap()
            );
        }
    }

    #[test]
    fn cap_is_enforced() {
        let q = full_query(UHPoint::ratio(0, 1, 1, 1000), 50.0).with_cap(10);
        assert!(matches!(enumerate_ball(&q), Err(Error::CapExceeded(10))));
    }

    #[test]
    fn output_is_sorted_and_closed_under_inverse() {
        let out = enumerate_ball(&full_query(UHPoint::ratio(1, 5, 7, 4), 12.0)).unwrap();
        let mut sorted = out.clone();
        sorted.sort_by_key(M::sort_key);
        assert_eq!(out, sorted);
        let set: HashSet<M> = out.iter().copied().collect();
        assert!(out.iter().all(|g| set.contains(&g.inverse())));
    }

    #[test]
    fn float_points_agree_with_exact_points() {
        let p = UHPoint::ratio(1, 4, 3, 2);
        let q = UHPoint::ratio(-1, 3, 5, 4);
        let exact = enumerate_ball(&BallQuery::new(
            SubgroupSpec::full(),
            p.clone(),
            q.clone(),
            7.3,
        ))
        .unwrap();
        let float = enumerate_ball(&BallQuery::new(
            SubgroupSpec::full(),
            p.to_float(),
            q.to_float(),
            7.3,
        ))
        .unwrap();
        assert_eq!(exact, float);
    }

    #[test]
    fn bezout_identity() {
        for (c, d) in [(1, 0), (1, -5), (3, 7), (7, -3), (12, 5), (5, 12)] {
            let (a, b) = bezout(c, d);
            assert_eq!(a * d - b * c, 1);
        }
    }
}

//! Surface distances on `Γ\H²`, distance multisets and quadruple counts.
//!
//! Both points are first reduced into `F`: `δ_p p = p'`, `δ_q q = q'`. Then
//! `d_Y(p, q) = min d(p', g q')` over `g ∈ δ_p Γ δ_q⁻¹`, i.e. over full-group
//! elements `g` with `δ_p⁻¹ g δ_q ∈ Γ`. When that twisted set contains the
//! identity it is a conjugate of `Γ`, and the covers of `F_u` and `F_o`
//! apply; otherwise a ball around `p'` is grown until it holds a member.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::covers::{self, GeodesicCover};
use crate::domain::{self, FPart};
use crate::error::{Error, Result};
use crate::exact::{self, ExactKey, Rational};
use crate::group::{ModularElement, SubgroupSpec};
use crate::hyperbolic::{self, DistanceKey, PreparedPoint, UHPoint};
use crate::orbit;

/// Candidates whose float value lies within this relative margin of the
/// float minimum are re-evaluated exactly.
const EXACT_MARGIN: f64 = 1e-7;
const GROWTH_LIMIT: f64 = 1e12;

/// Minimum of `2 cosh d(p, g q)` over `elements`, exact when both points are.
pub(crate) fn min_key(
    p: &PreparedPoint,
    q: &PreparedPoint,
    elements: impl Iterator<Item = ModularElement>,
) -> Option<DistanceKey> {
    let cands: Vec<(ModularElement, f64)> = elements.map(|g| (g, p.two_cosh_f64(&g, q))).collect();
    select_min(p, q, &cands, false).map(|(k, _)| k)
}

/// The minimum key over float-scored candidates, plus (optionally) every
/// candidate attaining it.
fn select_min(
    p: &PreparedPoint,
    q: &PreparedPoint,
    cands: &[(ModularElement, f64)],
    collect_all: bool,
) -> Option<(DistanceKey, Vec<ModularElement>)> {
    let m = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    if !m.is_finite() {
        return None;
    }
    let cut = m + EXACT_MARGIN * m.abs().max(1.0);
    let mut best: Option<DistanceKey> = None;
    let mut at_best = Vec::new();
    for (g, v) in cands {
        if *v > cut {
            continue;
        }
        let key = p.two_cosh(g, q);
        let ord = match &best {
            None => Ordering::Less,
            Some(b) if key.same_distance(b) => Ordering::Equal,
            Some(b) => key.cmp(b),
        };
        match ord {
            Ordering::Less => {
                best = Some(key);
                at_best.clear();
                if collect_all {
                    at_best.push(*g);
                }
            }
            Ordering::Equal if collect_all => at_best.push(*g),
            _ => {}
        }
    }
    best.map(|b| (b, at_best))
}

/// A point reduced into `F`, prepared for repeated distance evaluation.
#[derive(Clone, Debug)]
pub struct SurfacePoint {
    pub reduced: UHPoint,
    /// `δ` with `δ z = reduced`.
    pub delta: ModularElement,
    pub part: FPart,
    /// Piece index of `z` in the coset domain.
    pub piece: usize,
    prepared: PreparedPoint,
}

impl SurfacePoint {
    pub fn new(z: &UHPoint, spec: &SubgroupSpec) -> Result<Self> {
        let (reduced, delta) = domain::reduce_to_f(z)?;
        let piece = domain::canonical_piece(&reduced, &delta, spec)?;
        Ok(SurfacePoint {
            part: domain::classify_in_f(&reduced),
            prepared: PreparedPoint::new(&reduced),
            reduced,
            delta,
            piece,
        })
    }

    /// Identifies the surface point (same key iff same point of `Γ\H²`,
    /// for exact inputs).
    fn identity_key(&self) -> String {
        format!("{}|{}", self.reduced, self.piece)
    }
}

fn twisted_member(
    spec: &SubgroupSpec,
    a: &SurfacePoint,
    b: &SurfacePoint,
    g: &ModularElement,
) -> Result<bool> {
    if spec.is_full() {
        return Ok(true);
    }
    Ok(spec.is_member(&a.delta.inverse().compose(g)?.compose(&b.delta)?))
}

/// Grows a ball around `a'` until it contains an element of the twisted set.
fn twisted_search(
    spec: &SubgroupSpec,
    a: &SurfacePoint,
    b: &SurfacePoint,
    collect_all: bool,
) -> Result<(DistanceKey, Vec<ModularElement>)> {
    let (p, q) = (&a.prepared, &b.prepared);
    let mut h = (p.two_cosh_f64(&ModularElement::IDENTITY, q) / 2.0).max(1.0);
    let mut buf = Vec::new();
    loop {
        buf.clear();
        orbit::sweep(p, q, h, orbit::DEFAULT_CAP, &mut buf)?;
        let mut members = Vec::with_capacity(buf.len());
        for c in &buf {
            if twisted_member(spec, a, b, &c.0)? {
                members.push(*c);
            }
        }
        if let Some((key, mins)) = select_min(p, q, &members, collect_all) {
            let inside = match &key {
                DistanceKey::Exact(k) => {
                    exact::from_f64(2.0 * h).is_some_and(|r| *k <= ExactKey::from_big(r))
                }
                DistanceKey::Float(v) => hyperbolic::within(*v, 2.0 * h),
            };
            if inside {
                return Ok((key, mins));
            }
        }
        if h > GROWTH_LIMIT {
            return Err(Error::CapExceeded(orbit::DEFAULT_CAP));
        }
        h = 3.0 * h + 1.0;
    }
}

/// `d_Y(p, q)` by orbit enumeration, as a `2 cosh` key.
pub fn surface_distance_oracle(
    p: &UHPoint,
    q: &UHPoint,
    spec: &SubgroupSpec,
) -> Result<DistanceKey> {
    let a = SurfacePoint::new(p, spec)?;
    let b = SurfacePoint::new(q, spec)?;
    Ok(twisted_search(spec, &a, &b, false)?.0)
}

/// [`surface_distance_oracle`] plus every `γ ∈ Γ` with `d(p, γq) = d_Y(p, q)`.
pub fn surface_distance_minimizers(
    p: &UHPoint,
    q: &UHPoint,
    spec: &SubgroupSpec,
) -> Result<(DistanceKey, Vec<ModularElement>)> {
    let a = SurfacePoint::new(p, spec)?;
    let b = SurfacePoint::new(q, spec)?;
    let (key, mins) = twisted_search(spec, &a, &b, true)?;
    let da = a.delta.inverse();
    let mut gammas = mins
        .into_iter()
        .map(|g| da.compose(&g)?.compose(&b.delta))
        .collect::<Result<Vec<_>>>()?;
    gammas.sort_by_key(ModularElement::sort_key);
    gammas.dedup();
    Ok((key, gammas))
}

/// `min d(γ₁p, γ₂q)` over pairs from a cover; both points must lie in the
/// cover's region.
pub fn surface_distance_cover(
    p: &UHPoint,
    q: &UHPoint,
    cover: &GeodesicCover,
) -> Result<DistanceKey> {
    for z in [p, q] {
        if !cover.region.closure_contains(z) {
            return Err(Error::OutsideRegion(z.to_string()));
        }
    }
    covers::cover_distance(p, q, cover)
}

/// Surface distances that use the `F_u` and `F_o` covers when both points
/// reduce into the same part of the same piece, and the oracle otherwise.
#[derive(Clone, Debug)]
pub struct SurfaceMetric {
    spec: SubgroupSpec,
    cusp: Vec<ModularElement>,
    central: Vec<ModularElement>,
}

impl SurfaceMetric {
    pub fn new(spec: &SubgroupSpec) -> Result<Self> {
        let full = SubgroupSpec::full();
        Ok(SurfaceMetric {
            spec: spec.clone(),
            cusp: covers::cover_fu(&full).difference_set()?,
            central: covers::cover_fo(&full)?.difference_set()?,
        })
    }

    pub fn spec(&self) -> &SubgroupSpec {
        &self.spec
    }

    pub fn prepare(&self, z: &UHPoint) -> Result<SurfacePoint> {
        SurfacePoint::new(z, &self.spec)
    }

    pub fn distance(&self, p: &UHPoint, q: &UHPoint) -> Result<DistanceKey> {
        self.distance_prepared(&self.prepare(p)?, &self.prepare(q)?)
    }

    pub fn distance_prepared(&self, a: &SurfacePoint, b: &SurfacePoint) -> Result<DistanceKey> {
        let diffs = match (a.part, b.part) {
            (FPart::Cusp, FPart::Cusp) => Some(&self.cusp),
            (FPart::Central, FPart::Central) => Some(&self.central),
            _ => None,
        };
        let same_piece =
            self.spec.is_full() || self.spec.is_member(&a.delta.inverse().compose(&b.delta)?);
        match diffs {
            Some(diffs) if same_piece => {
                let mut cands = Vec::with_capacity(diffs.len());
                for g in diffs {
                    if twisted_member(&self.spec, a, b, g)? {
                        cands.push((*g, a.prepared.two_cosh_f64(g, &b.prepared)));
                    }
                }
                let (key, _) = select_min(&a.prepared, &b.prepared, &cands, false)
                    .expect("identity is a member");
                Ok(key)
            }
            _ => Ok(twisted_search(&self.spec, a, b, false)?.0),
        }
    }
}

/// Distinct-distance statistics of a point set on `Γ\H²`.
///
/// Multiplicities count ordered pairs, so they sum to `N² − N`.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceStats {
    /// Points after collapsing duplicates.
    pub n: usize,
    pub duplicates: usize,
    pub distinct: usize,
    pub ordered_pairs: u64,
    pub quadruples: u128,
    #[serde(serialize_with = "serialize_rational")]
    pub bound: Rational,
    #[serde(skip)]
    pub multiplicities: Vec<(DistanceKey, u64)>,
}

fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&exact::format_rational(r))
}

impl DistanceStats {
    fn from_histogram(
        n: usize,
        duplicates: usize,
        multiplicities: Vec<(DistanceKey, u64)>,
    ) -> Self {
        let ordered_pairs = multiplicities.iter().map(|m| m.1).sum();
        let quadruples: u128 = multiplicities
            .iter()
            .map(|m| (m.1 as u128) * (m.1 as u128))
            .sum();
        let pairs = (n as u128) * (n as u128) - n as u128;
        let bound = if quadruples == 0 {
            exact::int(0)
        } else {
            Rational::new(BigInt::from(pairs * pairs), BigInt::from(quadruples))
        };
        DistanceStats {
            n,
            duplicates,
            distinct: multiplicities.len(),
            ordered_pairs,
            quadruples,
            bound,
            multiplicities,
        }
    }

    pub fn bound_f64(&self) -> f64 {
        exact::to_f64(&self.bound)
    }

    /// `distinct · Q ≥ (N² − N)²` in exact integers.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let pairs = BigInt::from(self.n) * BigInt::from(self.n) - BigInt::from(self.n);
        BigInt::from(self.distinct) * BigInt::from(self.quadruples) >= &pairs * &pairs
    }
}

/// Groups keys into `(key, ordered multiplicity)`, sorted by distance. Each
/// key stands for one unordered pair; zero distances are dropped.
pub fn histogram(keys: Vec<DistanceKey>) -> Vec<(DistanceKey, u64)> {
    let (mut exact_keys, mut floats) = (Vec::new(), Vec::new());
    for k in keys {
        if k.is_zero() {
            continue;
        }
        match k {
            DistanceKey::Exact(e) => exact_keys.push(e),
            DistanceKey::Float(v) => floats.push(v),
        }
    }
    let mut out: Vec<(DistanceKey, u64)> = Vec::new();
    if floats.is_empty() {
        exact_keys.par_sort_unstable_by(|a, b| a.structural_cmp(b));
        for k in exact_keys {
            match out.last_mut() {
                Some((DistanceKey::Exact(last), n)) if *last == k => *n += 2,
                _ => out.push((DistanceKey::Exact(k), 2)),
            }
        }
        out.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    } else {
        // Mixed or float input: compare everything in floating point.
        floats.extend(exact_keys.iter().map(ExactKey::to_f64));
        floats.par_sort_unstable_by(f64::total_cmp);
        let mut group_start = f64::NAN;
        for v in floats {
            match out.last_mut() {
                Some((_, n)) if (v - group_start).abs() <= hyperbolic::tolerance(v) => *n += 2,
                _ => {
                    group_start = v;
                    out.push((DistanceKey::Float(v), 2));
                }
            }
        }
    }
    out
}

/// Pairwise surface-distance statistics on `Γ\H²`.
pub fn distance_stats(points: &[UHPoint], spec: &SubgroupSpec) -> Result<DistanceStats> {
    let metric = SurfaceMetric::new(spec)?;
    distance_stats_with(points, &metric)
}

pub fn distance_stats_with(points: &[UHPoint], metric: &SurfaceMetric) -> Result<DistanceStats> {
    let prepared = points
        .par_iter()
        .map(|p| metric.prepare(p))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = HashMap::new();
    let unique: Vec<SurfacePoint> = prepared
        .into_iter()
        .filter(|sp| seen.insert(sp.identity_key(), ()).is_none())
        .collect();
    let duplicates = points.len() - unique.len();
    let keys: Vec<DistanceKey> = (0..unique.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..unique.len())
                .map(|j| metric.distance_prepared(&unique[i], &unique[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(DistanceStats::from_histogram(
        unique.len(),
        duplicates,
        histogram(keys),
    ))
}

/// Plane statistics in `H²` (no quotient).
pub fn plane_distance_stats(points: &[UHPoint]) -> DistanceStats {
    let keys = (0..points.len())
        .flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)))
        .map(|(i, j)| hyperbolic::cosh_distance(&points[i], &points[j]))
        .collect();
    DistanceStats::from_histogram(points.len(), 0, histogram(keys))
}

/// `|{(p₁, p₂, p₃, p₄) : d(p₁, p₂) = d(p₃, p₄) ≠ 0}|` in the plane.
pub fn quadruple_count_h2(points: &[UHPoint]) -> u128 {
    plane_distance_stats(points).quadruples
}

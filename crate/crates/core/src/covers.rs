//! Geodesic covers of `F_u`, `F_o`, strips and bounded central regions.
//!
//! A finite set `C ⊆ Γ` covers a region `R` if for all `p, q ∈ R` the surface
//! distance equals `min d(γ₁p, γ₂q)` over `γ₁, γ₂ ∈ C`. Since
//! `d(γ₁p, γ₂q) = d(p, γ₁⁻¹γ₂ q)`, evaluation runs over the difference set
//! `C⁻¹C`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Region;
use crate::error::{Error, Result};
use crate::group::{ModularElement, SubgroupSpec};
use crate::hyperbolic::{self, cosh_of_sum, DistanceKey, UHPoint};
use crate::metrics;
use crate::orbit::{self, BallQuery};
use crate::sampling::{self, SamplerConfig};

/// Slack added to composite enumeration thresholds.
pub const THRESHOLD_ROUNDING: f64 = 1e-9;

/// Numerical constants behind the central-part cover of the modular group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoverConstants {
    /// `cosh diam(F_o) = 23√3/24` (corner-pair value).
    pub cosh_diam_fo: f64,
    /// `cosh r₀ = 5√3/6` with `r₀ = max d(2i, z)` over `z ∈ F_o`.
    pub cosh_r0: f64,
    /// `Area(F_o) = π/3 − 1/2`.
    pub area_fo: f64,
    /// `cosh(diam + 2r₀)`, the radius defining the cover.
    pub cover_radius_cosh: f64,
    /// `cosh(diam + 3r₀)`, the radius of the disc used for the area count.
    pub disc_radius_cosh: f64,
    /// `(π/36)(848 + 11√4381)`.
    pub area_disc: f64,
    /// Integer bound on the cover size from the area count.
    pub area_bound: u32,
}

impl CoverConstants {
    pub fn modular() -> Self {
        let s3 = 3f64.sqrt();
        let cosh_diam_fo = 23.0 * s3 / 24.0;
        let cosh_r0 = 5.0 * s3 / 6.0;
        let two_r0 = 2.0 * cosh_r0 * cosh_r0 - 1.0;
        let cover_radius_cosh = cosh_of_sum(cosh_diam_fo, two_r0);
        let disc_radius_cosh = cosh_of_sum(cover_radius_cosh, cosh_r0);
        CoverConstants {
            cosh_diam_fo,
            cosh_r0,
            area_fo: PI / 3.0 - 0.5,
            cover_radius_cosh,
            disc_radius_cosh,
            area_disc: PI / 36.0 * (848.0 + 11.0 * 4381f64.sqrt()),
            area_bound: 252,
        }
    }

    /// Enumeration threshold: the cover radius rounded up.
    pub fn cover_threshold(&self) -> f64 {
        self.cover_radius_cosh + THRESHOLD_ROUNDING
    }

    /// `2π(cosh R − 1)` at `R = diam + 3r₀`, evaluated from the cosh value.
    pub fn disc_area_numeric(&self) -> f64 {
        2.0 * PI * (self.disc_radius_cosh - 1.0)
    }

    /// `Area(D) / Area(F_o)`.
    pub fn area_ratio(&self) -> f64 {
        self.area_disc / self.area_fo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    TranslationCover,
    BallCover,
    GenericCentral,
}

#[derive(Clone, Debug)]
pub struct GeodesicCover {
    pub region: Region,
    pub spec: SubgroupSpec,
    pub elements: Vec<ModularElement>,
    pub provenance: Provenance,
}

impl GeodesicCover {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &ModularElement) -> bool {
        self.elements
            .binary_search_by_key(&g.sort_key(), ModularElement::sort_key)
            .is_ok()
    }

    /// `{γ₁⁻¹γ₂ : γ₁, γ₂ ∈ C}`, sorted.
    pub fn difference_set(&self) -> Result<Vec<ModularElement>> {
        difference_set(&self.elements)
    }
}

pub(crate) fn difference_set(elements: &[ModularElement]) -> Result<Vec<ModularElement>> {
    let mut out = BTreeSet::new();
    for g1 in elements {
        let inv = g1.inverse();
        for g2 in elements {
            out.insert(inv.compose(g2)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// `{T⁻¹, I, T} ∩ Γ`, a cover of `F_u`.
pub fn cover_fu(spec: &SubgroupSpec) -> GeodesicCover {
    let elements = [
        ModularElement::T_INV,
        ModularElement::IDENTITY,
        ModularElement::T,
    ]
    .into_iter()
    .filter(|g| spec.is_member(g))
    .collect();
    GeodesicCover {
        region: Region::cusp(),
        spec: spec.clone(),
        elements,
        provenance: Provenance::TranslationCover,
    }
}

/// `{γ ∈ Γ : cosh d(2i, γ 2i) ≤ cosh(diam F_o + 2r₀)}`, a cover of `F_o`.
pub fn cover_fo(spec: &SubgroupSpec) -> Result<GeodesicCover> {
    cover_fo_with_threshold(spec, CoverConstants::modular().cover_threshold())
}

/// The same ball construction with an explicit cosh threshold.
pub fn cover_fo_with_threshold(spec: &SubgroupSpec, cosh_radius: f64) -> Result<GeodesicCover> {
    let base = UHPoint::ints(0, 2);
    let elements = orbit::enumerate_ball(&BallQuery::new(
        spec.clone(),
        base.clone(),
        base,
        cosh_radius,
    ))?;
    Ok(GeodesicCover {
        region: Region::central(),
        spec: spec.clone(),
        elements,
        provenance: Provenance::BallCover,
    })
}

/// `{γ ∈ Γ : d(O, γO) ≤ 3 diam(R)}` for a bounded region `R ∋ O`.
pub fn cover_central_generic(
    spec: &SubgroupSpec,
    region: &Region,
    base: &UHPoint,
) -> Result<GeodesicCover> {
    if !region.closure_contains(base) {
        return Err(Error::OutsideRegion(base.to_string()));
    }
    let stabiliser = orbit::enumerate_ball(&BallQuery::new(
        spec.clone(),
        base.clone(),
        base.clone(),
        1.0,
    ))?;
    if stabiliser.len() > 1 {
        return Err(Error::EllipticBase);
    }
    let h = region.diameter_cosh()?.max(1.0);
    // cosh 3t = 4 cosh³ t − 3 cosh t
    let threshold = 4.0 * h * h * h - 3.0 * h + THRESHOLD_ROUNDING * h.powi(3).max(1.0);
    let elements = orbit::enumerate_ball(&BallQuery::new(
        spec.clone(),
        base.clone(),
        base.clone(),
        threshold,
    ))?;
    Ok(GeodesicCover {
        region: region.clone(),
        spec: spec.clone(),
        elements,
        provenance: Provenance::GenericCentral,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StripCertification {
    /// `T ≥ 100 + 10 / c_min`.
    ValidByThreshold,
    /// Below that threshold, but `T ≥ 2` for the width-one cusp of the
    /// modular group, where the translation cover of `F_u` applies.
    ModularCusp,
    Unverified,
}

#[derive(Clone, Debug, Serialize)]
pub struct StripCover {
    pub height: f64,
    pub elements: Vec<ModularElement>,
    pub certification: StripCertification,
}

/// The three translations `{T⁻¹, I, T}` as a cover of `P(T)`.
pub fn cover_strip(height: f64, c_min: f64) -> Result<StripCover> {
    if !(height > 0.0) || !height.is_finite() {
        return Err(Error::StripHeight(height));
    }
    if !(c_min > 0.0) || !c_min.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "c_min must be positive, got {c_min}"
        )));
    }
    let certification = if height >= 100.0 + 10.0 / c_min {
        StripCertification::ValidByThreshold
    } else if height >= 2.0 && c_min >= 1.0 {
        StripCertification::ModularCusp
    } else {
        StripCertification::Unverified
    };
    Ok(StripCover {
        height,
        elements: vec![
            ModularElement::T_INV,
            ModularElement::IDENTITY,
            ModularElement::T,
        ],
        certification,
    })
}

/// Outcome of [`verify_cover`].
#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub pass: bool,
    /// Largest `2 cosh` excess of the cover value over the surface distance.
    pub worst_gap: f64,
    pub seed: u64,
    pub samples: usize,
    pub pairs_checked: usize,
    pub failures: usize,
    /// Surface-distance minimisers that are not elements of the cover.
    pub uncovered_minimizers: usize,
    pub worst_pair: Option<(UHPoint, UHPoint)>,
}

/// Compares the cover distance with the surface distance on the region's
/// corner pairs plus `samples` seeded random pairs.
///
/// Random points are drawn on a rational grid, so those comparisons are exact.
pub fn verify_cover(cover: &GeodesicCover, samples: usize, seed: u64) -> Result<CoverReport> {
    let config = SamplerConfig::default();
    let mut pairs = Vec::new();
    let corners: Vec<UHPoint> = cover
        .region
        .corner_points(config.y_cap)
        .into_iter()
        .filter(|p| cover.region.closure_contains(p))
        .collect();
    for (i, p) in corners.iter().enumerate() {
        for q in &corners[i..] {
            pairs.push((p.clone(), q.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sampling::sample_region(&cover.region, 2 * samples, &config, &mut rng)?;
    for chunk in pts.chunks_exact(2) {
        pairs.push((chunk[0].clone(), chunk[1].clone()));
    }
    verify_pairs(cover, &pairs, seed, samples)
}

/// [`verify_cover`] on an explicit list of pairs.
pub fn verify_pairs(
    cover: &GeodesicCover,
    pairs: &[(UHPoint, UHPoint)],
    seed: u64,
    samples: usize,
) -> Result<CoverReport> {
    let diffs = cover.difference_set()?;
    let results: Vec<(f64, bool, usize)> = pairs
        .par_iter()
        .map(|(p, q)| {
            let via_cover = min_over(p, q, &diffs);
            let (truth, minimizers) = metrics::surface_distance_minimizers(p, q, &cover.spec)?;
            let gap = via_cover.two_cosh() - truth.two_cosh();
            let ok = match (&via_cover, &truth) {
                (DistanceKey::Exact(a), DistanceKey::Exact(b)) => a == b,
                _ => via_cover.same_distance(&truth),
            };
            let uncovered = minimizers.iter().filter(|g| !cover.contains(g)).count();
            Ok((gap, ok, uncovered))
        })
        .collect::<Result<_>>()?;
    let mut report = CoverReport {
        pass: true,
        worst_gap: 0.0,
        seed,
        samples,
        pairs_checked: pairs.len(),
        failures: 0,
        uncovered_minimizers: 0,
        worst_pair: None,
    };
    for ((gap, ok, uncovered), pair) in results.into_iter().zip(pairs) {
        report.uncovered_minimizers += uncovered;
        if !ok {
            report.failures += 1;
            report.pass = false;
        }
        if gap > report.worst_gap {
            report.worst_gap = gap;
            report.worst_pair = Some(pair.clone());
        }
    }
    Ok(report)
}

fn min_over(p: &UHPoint, q: &UHPoint, elements: &[ModularElement]) -> DistanceKey {
    let pp = hyperbolic::PreparedPoint::new(p);
    let pq = hyperbolic::PreparedPoint::new(q);
    metrics::min_key(&pp, &pq, elements.iter().copied()).expect("cover contains the identity")
}

/// Cover distance `min d(γ₁p, γ₂q)` over pairs of cover elements.
pub fn cover_distance(p: &UHPoint, q: &UHPoint, cover: &GeodesicCover) -> Result<DistanceKey> {
    Ok(min_over(p, q, &cover.difference_set()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ModularElement;

    #[test]
    fn constants_match_closed_forms() {
        let c = CoverConstants::modular();
        assert!((c.cosh_diam_fo - 1.6598).abs() < 1e-4);
        assert!((c.cosh_r0 - 1.4433).abs() < 1e-4);
        assert!((c.area_fo - 0.5471).abs() < 1e-4);
        assert!((c.area_disc - 137.5389).abs() < 1e-4);
        assert!((c.disc_area_numeric() - c.area_disc).abs() < 1e-9);
        assert!(c.area_ratio().floor() <= 252.0);
    }

    #[test]
    fn translation_covers() {
        assert_eq!(
            cover_fu(&SubgroupSpec::full()).elements,
            vec![M::T_INV, M::IDENTITY, M::T]
        );
        assert_eq!(
            cover_fu(&SubgroupSpec::principal(2).unwrap()).elements,
            vec![M::IDENTITY]
        );
        assert_eq!(cover_fu(&SubgroupSpec::gamma0(2).unwrap()).len(), 3);
    }

    #[test]
    fn ball_cover_edge_cases() {
        let c = cover_fo_with_threshold(&SubgroupSpec::full(), 1.0).unwrap();
        assert_eq!(c.elements, vec![M::IDENTITY]);
        let full = cover_fo(&SubgroupSpec::full()).unwrap();
        assert!(full.contains(&M::IDENTITY));
        assert!(full.len() <= 252);
        let g2 = cover_fo(&SubgroupSpec::principal(2).unwrap()).unwrap();
        let filtered: Vec<M> = full
            .elements
            .iter()
            .copied()
            .filter(|g| g2.spec.is_member(g))
            .collect();
        assert_eq!(g2.elements, filtered);
    }

    #[test]
    fn generic_cover_rejects_elliptic_base() {
        let err = cover_central_generic(&SubgroupSpec::full(), &Region::central(), &UHPoint::i());
        assert!(matches!(err, Err(Error::EllipticBase)));
        let ball = Region::Ball {
            center: UHPoint::ints(0, 2),
            cosh_radius: 1.0,
        };
        let c = cover_central_generic(&SubgroupSpec::full(), &ball, &UHPoint::ints(0, 2)).unwrap();
        assert_eq!(c.elements, vec![M::IDENTITY]);
    }

    #[test]
    fn strip_certification() {
        assert_eq!(
            cover_strip(110.0, 1.0).unwrap().certification,
            StripCertification::ValidByThreshold
        );
        assert_eq!(
            cover_strip(2.0, 1.0).unwrap().certification,
            StripCertification::ModularCusp
        );
        assert_eq!(
            cover_strip(2.0, 0.5).unwrap().certification,
            StripCertification::Unverified
        );
        assert!(matches!(cover_strip(-1.0, 1.0), Err(Error::StripHeight(_))));
        assert_eq!(cover_strip(110.0, 1.0).unwrap().elements.len(), 3);
    }

    #[test]
    fn identity_alone_fails_on_central_part() {
        let bogus = GeodesicCover {
            region: Region::central(),
            spec: SubgroupSpec::full(),
            elements: vec![M::IDENTITY],
            provenance: Provenance::BallCover,
        };
        let report = verify_cover(&bogus, 50, 7).unwrap();
        assert!(!report.pass);
        assert!(report.worst_gap > 0.0);
    }

    #[test]
    fn small_verification_runs_pass() {
        let report = verify_cover(&cover_fu(&SubgroupSpec::full()), 40, 3).unwrap();
        assert!(report.pass, "{report:?}");
        let report = verify_cover(&cover_fo(&SubgroupSpec::full()).unwrap(), 40, 3).unwrap();
        assert!(report.pass, "{report:?}");
    }
}

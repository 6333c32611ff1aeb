//! Fundamental domains, point reduction and the `F = F_u ∪ F_o` split.
//!
//! `F = {|Re z| ≤ 1/2, |z| ≥ 1}` is the standard domain of PSL(2, ℤ). The
//! reduction map uses the half-open convention `Re z ∈ [−1/2, 1/2)` and keeps
//! the left half of the unit arc, so it is a function on orbits.

use std::f64::consts::PI;

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::group::{ModularElement, SubgroupSpec};
use crate::hyperbolic::{self, polygon_area, RealMatrix2, UHPoint, Vertex};

/// Default height separating the cusp part from the central part.
pub const CUSP_HEIGHT: i64 = 2;

const FLOAT_SLACK: f64 = 1e-12;
const MAX_FLOAT_STEPS: usize = 100_000;

/// A region of the upper half-plane used as a cover domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// The standard domain `F`.
    Standard,
    /// `F_u = {|x| ≤ 1/2, y ≥ U}`.
    Cusp { height: Rational },
    /// `F_o = F \ F_u`, i.e. `F ∩ {y < U}`.
    Central { height: Rational },
    /// `σ P(T)` with `P(T) = {0 < x < 1, y ≥ T}`.
    Strip { height: f64, scaling: RealMatrix2 },
    /// `α(F)`.
    Translate { alpha: ModularElement },
    /// Closed hyperbolic disc.
    Ball { center: UHPoint, cosh_radius: f64 },
}

/// Which part of `F` a point falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum FPart {
    Cusp,
    Central,
    Outside,
}

impl Region {
    pub fn cusp() -> Self {
        Region::Cusp {
            height: exact::int(CUSP_HEIGHT),
        }
    }

    pub fn central() -> Self {
        Region::Central {
            height: exact::int(CUSP_HEIGHT),
        }
    }

    /// `F_u` with a custom height `U ≥ 2`.
    pub fn cusp_with_height(height: Rational) -> Result<Self> {
        check_height(&height)?;
        Ok(Region::Cusp { height })
    }

    pub fn central_with_height(height: Rational) -> Result<Self> {
        check_height(&height)?;
        Ok(Region::Central { height })
    }

    pub fn strip(height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::StripHeight(height));
        }
        Ok(Region::Strip {
            height,
            scaling: RealMatrix2::IDENTITY,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Region::Standard => "F",
            Region::Cusp { .. } => "fu",
            Region::Central { .. } => "fo",
            Region::Strip { .. } => "strip",
            Region::Translate { .. } => "translate",
            Region::Ball { .. } => "ball",
        }
    }

    /// Closed-set membership (for `F_o` the top edge `y = U` is excluded;
    /// see [`Region::closure_contains`]). Exact for exact points.
    pub fn contains(&self, z: &UHPoint) -> bool {
        match self {
            Region::Standard => in_standard(z),
            Region::Cusp { height } => half_width_ok(z) && y_at_least(z, height),
            Region::Central { height } => in_standard(z) && !y_at_least(z, height),
            Region::Strip { height, scaling } => {
                let w = hyperbolic::mobius_apply(&scaling.inverse(), z);
                in_strip(&w, *height)
            }
            Region::Translate { alpha } => in_standard(&alpha.inverse().apply(z)),
            Region::Ball {
                center,
                cosh_radius,
            } => hyperbolic::within(
                hyperbolic::cosh_distance(center, z).two_cosh(),
                2.0 * cosh_radius,
            ),
        }
    }

    /// Membership in the closure of the region.
    pub fn closure_contains(&self, z: &UHPoint) -> bool {
        match self {
            Region::Central { height } => in_standard(z) && y_at_most(z, height),
            Region::Strip { height, scaling } => {
                let w = hyperbolic::mobius_apply(&scaling.inverse(), z);
                let x = w.x_f64();
                (-FLOAT_SLACK..=1.0 + FLOAT_SLACK).contains(&x) && w.y_f64() >= height - FLOAT_SLACK
            }
            _ => self.contains(z),
        }
    }

    /// Hyperbolic area; `None` when infinite.
    pub fn area(&self) -> Option<f64> {
        match self {
            Region::Standard => Some(PI / 3.0),
            Region::Cusp { height } => Some(1.0 / exact::to_f64(height)),
            Region::Central { height } => Some(PI / 3.0 - 1.0 / exact::to_f64(height)),
            Region::Strip { height, .. } => Some(1.0 / height),
            Region::Translate { alpha } => Some(translate_area(alpha)),
            Region::Ball { cosh_radius, .. } => hyperbolic::disc_area_from_cosh(*cosh_radius).ok(),
        }
    }

    /// `cosh` of the diameter for bounded regions.
    ///
    /// For `F_o` this is the corner-pair value `cosh d(ρ, 1/2 + iU)`, which is
    /// `23√3/24` at `U = 2`. [`Region::boundary_diameter_cosh`] gives a
    /// numerical maximum over the boundary instead.
    pub fn diameter_cosh(&self) -> Result<f64> {
        match self {
            Region::Central { height } => {
                let u = exact::to_f64(height);
                Ok((1.75 + u * u) / (3f64.sqrt() * u))
            }
            Region::Ball { cosh_radius, .. } => Ok(2.0 * cosh_radius * cosh_radius - 1.0),
            _ => Err(Error::UnboundedRegion),
        }
    }

    /// Maximum of `cosh d(p, q)` over sampled pairs of boundary points of the
    /// closure; `steps` points per boundary side.
    pub fn boundary_diameter_cosh(&self, steps: usize) -> Result<f64> {
        let pts = self.boundary_samples(steps)?;
        let mut best = 1.0f64;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                best = best.max(hyperbolic::two_cosh_f64(p.0, p.1, q.0, q.1) / 2.0);
            }
        }
        Ok(best)
    }

    fn boundary_samples(&self, steps: usize) -> Result<Vec<(f64, f64)>> {
        let steps = steps.max(2);
        let t = |k: usize| k as f64 / (steps - 1) as f64;
        match self {
            Region::Central { height } => {
                let u = exact::to_f64(height);
                let h = 3f64.sqrt() / 2.0;
                let mut pts = Vec::with_capacity(4 * steps);
                for k in 0..steps {
                    let theta = PI / 3.0 + t(k) * PI / 3.0;
                    pts.push((theta.cos(), theta.sin()));
                    pts.push((-0.5, h + t(k) * (u - h)));
                    pts.push((0.5, h + t(k) * (u - h)));
                    pts.push((-0.5 + t(k), u));
                }
                Ok(pts)
            }
            Region::Ball {
                center,
                cosh_radius,
            } => {
                let (x0, y0) = (center.x_f64(), center.y_f64());
                let r = cosh_radius.max(1.0).acosh();
                let (cy, rad) = (y0 * r.cosh(), y0 * r.sinh());
                Ok((0..steps)
                    .map(|k| {
                        let a = 2.0 * PI * t(k);
                        (x0 + rad * a.cos(), cy + rad * a.sin())
                    })
                    .collect())
            }
            _ => Err(Error::UnboundedRegion),
        }
    }

    /// Corner points and side midpoints of the closure, used to augment
    /// random samples. Cusp ends are cut at `y_cap`.
    pub fn corner_points(&self, y_cap: f64) -> Vec<UHPoint> {
        let h = 3f64.sqrt() / 2.0;
        let f = |x: f64, y: f64| UHPoint::Float { x, y };
        let cap = exact::from_f64(y_cap).unwrap_or_else(|| exact::int(10));
        let e = |x: Rational, y: Rational| UHPoint::Exact { x, y };
        let half = exact::rat(1, 2);
        let neg_half = exact::rat(-1, 2);
        // Rational points just inside F next to the bottom corners.
        let near_rho = exact::rat(8661, 10000);
        match self {
            Region::Standard => vec![
                UHPoint::rho(),
                f(0.5, h),
                UHPoint::i(),
                e(neg_half.clone(), near_rho.clone()),
                e(half.clone(), near_rho),
                e(neg_half, cap.clone()),
                e(half, cap.clone()),
                e(exact::int(0), cap),
            ],
            Region::Cusp { height } => {
                let mid = (height + &cap) / exact::int(2);
                vec![
                    e(neg_half.clone(), height.clone()),
                    e(half.clone(), height.clone()),
                    e(exact::int(0), height.clone()),
                    e(neg_half.clone(), mid.clone()),
                    e(half.clone(), mid),
                    e(neg_half, cap.clone()),
                    e(half, cap.clone()),
                    e(exact::int(0), cap),
                ]
            }
            Region::Central { height } => {
                let u = exact::to_f64(height);
                vec![
                    UHPoint::rho(),
                    f(0.5, h),
                    UHPoint::i(),
                    e(neg_half.clone(), near_rho.clone()),
                    e(half.clone(), near_rho),
                    e(neg_half.clone(), height.clone()),
                    e(half.clone(), height.clone()),
                    e(exact::int(0), height.clone()),
                    f(-0.5, (h + u) / 2.0),
                    f(0.5, (h + u) / 2.0),
                    f((3.0 * PI / 4.0).cos(), (3.0 * PI / 4.0).sin()),
                    f((PI / 4.0).cos(), (PI / 4.0).sin()),
                ]
            }
            Region::Strip { height, scaling } => {
                let t = *height;
                [
                    (0.0, t),
                    (1.0, t),
                    (0.5, t),
                    (0.0, 2.0 * t),
                    (1.0, 2.0 * t),
                    (0.5, 2.0 * t),
                ]
                .into_iter()
                .map(|(x, y)| hyperbolic::mobius_apply(scaling, &f(x, y)))
                .collect()
            }
            Region::Translate { alpha } => Region::Standard
                .corner_points(y_cap)
                .iter()
                .map(|p| alpha.apply(p))
                .collect(),
            Region::Ball {
                center,
                cosh_radius,
            } => {
                let mut pts = vec![center.clone()];
                if let Ok(b) = self.boundary_samples(4) {
                    pts.extend(b.into_iter().take(4).map(|(x, y)| f(x, y)));
                }
                let _ = cosh_radius;
                pts
            }
        }
    }
}

fn check_height(height: &Rational) -> Result<()> {
    if *height < exact::int(CUSP_HEIGHT) {
        return Err(Error::InvalidArgument(format!(
            "cusp height must be at least {CUSP_HEIGHT}, got {}",
            exact::format_rational(height)
        )));
    }
    Ok(())
}

fn translate_area(alpha: &ModularElement) -> f64 {
    let m: RealMatrix2 = alpha.into();
    let h = 3f64.sqrt() / 2.0;
    let vertices = [
        Vertex::Finite(-0.5, h),
        Vertex::Finite(0.5, h),
        Vertex::Infinity,
    ]
    .map(|v| v.image(&m));
    polygon_area(&vertices)
}

fn half_width_ok(z: &UHPoint) -> bool {
    match z {
        UHPoint::Exact { x, .. } => x.abs() <= exact::rat(1, 2),
        UHPoint::Float { x, .. } => x.abs() <= 0.5 + FLOAT_SLACK,
    }
}

fn y_at_least(z: &UHPoint, h: &Rational) -> bool {
    match z {
        UHPoint::Exact { y, .. } => y >= h,
        UHPoint::Float { y, .. } => *y >= exact::to_f64(h) - FLOAT_SLACK,
    }
}

fn y_at_most(z: &UHPoint, h: &Rational) -> bool {
    match z {
        UHPoint::Exact { y, .. } => y <= h,
        UHPoint::Float { y, .. } => *y <= exact::to_f64(h) + FLOAT_SLACK,
    }
}

fn in_standard(z: &UHPoint) -> bool {
    match z {
        UHPoint::Exact { x, y } => half_width_ok(z) && x * x + y * y >= exact::int(1),
        UHPoint::Float { x, y } => half_width_ok(z) && x * x + y * y >= 1.0 - FLOAT_SLACK,
    }
}

fn in_strip(w: &UHPoint, height: f64) -> bool {
    match w {
        UHPoint::Exact { x, y } => {
            let t = exact::from_f64(height).expect("finite height");
            x.is_positive() && *x < exact::int(1) && *y >= t
        }
        UHPoint::Float { x, y } => *x > 0.0 && *x < 1.0 && *y >= height - FLOAT_SLACK,
    }
}

/// True if `z` is already in the image of [`reduce_to_f`]: `Re z ∈ [−1/2, 1/2)`,
/// `|z| ≥ 1`, and `Re z ≤ 0` when `|z| = 1`.
pub fn is_reduced(z: &UHPoint) -> bool {
    match z {
        UHPoint::Exact { x, y } => {
            let r = x * x + y * y;
            let one = exact::int(1);
            *x >= exact::rat(-1, 2)
                && *x < exact::rat(1, 2)
                && (r > one || (r == one && !x.is_positive()))
        }
        UHPoint::Float { x, y } => {
            let r = x * x + y * y;
            *x >= -0.5 && *x < 0.5 && (r > 1.0 || (r == 1.0 && *x <= 0.0))
        }
    }
}

/// `3i → Cusp`, `i → Central`, `2 + 2i → Outside`, with `U = 2`.
pub fn classify_in_f(z: &UHPoint) -> FPart {
    classify_in_f_with_height(z, &exact::int(CUSP_HEIGHT))
}

pub fn classify_in_f_with_height(z: &UHPoint, height: &Rational) -> FPart {
    if !in_standard(z) {
        FPart::Outside
    } else if y_at_least(z, height) {
        FPart::Cusp
    } else {
        FPart::Central
    }
}

/// Returns `(z', γ)` with `γ z = z'` and `z'` reduced into `F`.
///
/// Alternates `z ↦ z − n` with `n = ⌊x + 1/2⌋` and `z ↦ −1/z` while
/// `|z| < 1`; each inversion strictly increases `Im z`, which is bounded on
/// an orbit, so the loop terminates.
pub fn reduce_to_f(z: &UHPoint) -> Result<(UHPoint, ModularElement)> {
    match z {
        UHPoint::Exact { x, y } => reduce_exact(x.clone(), y.clone()),
        UHPoint::Float { x, y } => reduce_float(*x, *y),
    }
}

fn reduce_exact(mut x: Rational, mut y: Rational) -> Result<(UHPoint, ModularElement)> {
    let mut gamma = ModularElement::IDENTITY;
    let half = exact::rat(1, 2);
    let one = exact::int(1);
    loop {
        let n = exact::floor_int(&(&x + &half));
        if n != num_bigint::BigInt::from(0) {
            let k = n.to_i64().ok_or(Error::Overflow)?;
            x -= Rational::from_integer(n);
            let shift = ModularElement::translation(k.checked_neg().ok_or(Error::Overflow)?);
            gamma = shift.compose(&gamma)?;
        }
        let r = &x * &x + &y * &y;
        if r < one {
            x = -&x / &r;
            y = &y / &r;
            gamma = ModularElement::S.compose(&gamma)?;
            continue;
        }
        if r == one && x.is_positive() {
            x = -x;
            gamma = ModularElement::S.compose(&gamma)?;
        }
        return Ok((UHPoint::Exact { x, y }, gamma));
    }
}

fn reduce_float(mut x: f64, mut y: f64) -> Result<(UHPoint, ModularElement)> {
    let mut gamma = ModularElement::IDENTITY;
    for _ in 0..MAX_FLOAT_STEPS {
        let n = (x + 0.5).floor();
        if n != 0.0 {
            if n.abs() > 9.0e15 {
                return Err(Error::Overflow);
            }
            x -= n;
            gamma = ModularElement::translation(-(n as i64)).compose(&gamma)?;
            // Guard the half-open interval against rounding.
            if x >= 0.5 {
                x -= 1.0;
                gamma = ModularElement::T_INV.compose(&gamma)?;
            }
        }
        let r = x * x + y * y;
        if r < 1.0 - 1e-15 {
            x = -x / r;
            y /= r;
            gamma = ModularElement::S.compose(&gamma)?;
            continue;
        }
        if r <= 1.0 + 1e-15 && x > 0.0 {
            x = -x;
            gamma = ModularElement::S.compose(&gamma)?;
        }
        return Ok((UHPoint::Float { x, y }, gamma));
    }
    Err(Error::InvalidArgument(
        "float reduction did not converge".into(),
    ))
}

/// Reduces `z` into the coset domain `F_Γ = ∪ αᵢ(F)`.
///
/// Returns `(γz, i, γ)` with `γ ∈ Γ` and `γz ∈ αᵢ(F)`. At the elliptic point
/// `i` the smallest admissible piece index is taken.
pub fn reduce_to_subgroup_domain(
    z: &UHPoint,
    spec: &SubgroupSpec,
) -> Result<(UHPoint, usize, ModularElement)> {
    let (reduced, delta) = reduce_to_f(z)?;
    let piece = canonical_piece(&reduced, &delta, spec)?;
    let alpha = spec.coset_representatives()[piece];
    let gamma = alpha.compose(&delta)?;
    debug_assert!(spec.is_member(&gamma));
    Ok((alpha.apply(&reduced), piece, gamma))
}

/// The piece index `i` with `αᵢ δ ∈ Γ`, minimised over the stabiliser of the
/// reduced point when it is `i`.
pub fn canonical_piece(
    reduced: &UHPoint,
    delta: &ModularElement,
    spec: &SubgroupSpec,
) -> Result<usize> {
    let mut best = spec.coset_of(&delta.inverse());
    if *reduced == UHPoint::i() {
        let alt = ModularElement::S.compose(delta)?;
        best = best.min(spec.coset_of(&alt.inverse()));
    }
    Ok(best)
}

/// `F_Γ = ∪ αᵢ(F)` for a subgroup given by its coset representatives.
#[derive(Clone, Debug)]
pub struct SubgroupDomain {
    spec: SubgroupSpec,
    pieces: Vec<Region>,
}

impl SubgroupDomain {
    pub fn new(spec: &SubgroupSpec) -> Self {
        let pieces = spec
            .coset_representatives()
            .iter()
            .map(|&alpha| Region::Translate { alpha })
            .collect();
        SubgroupDomain {
            spec: spec.clone(),
            pieces,
        }
    }

    pub fn spec(&self) -> &SubgroupSpec {
        &self.spec
    }

    pub fn pieces(&self) -> &[Region] {
        &self.pieces
    }

    /// Sum of the piece areas, each computed from the image triangle.
    pub fn area(&self) -> f64 {
        self.pieces.iter().filter_map(Region::area).sum()
    }

    /// Indices of all pieces whose closure contains `z`.
    pub fn pieces_containing(&self, z: &UHPoint) -> Vec<usize> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(z))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of pieces containing `z` in their interior (after pulling back
    /// to `F`, strictly inside).
    pub fn pieces_containing_interior(&self, z: &UHPoint) -> Vec<usize> {
        self.spec
            .coset_representatives()
            .iter()
            .enumerate()
            .filter(|(_, alpha)| {
                let w = alpha.inverse().apply(z);
                match &w {
                    UHPoint::Exact { x, y } => {
                        x.abs() < exact::rat(1, 2) && x * x + y * y > exact::int(1)
                    }
                    UHPoint::Float { x, y } => x.abs() < 0.5 && x * x + y * y > 1.0,
                }
            })
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ModularElement;

    #[test]
    fn reduce_examples() {
        let (p, g) = reduce_to_f(&UHPoint::i()).unwrap();
        assert_eq!((p, g), (UHPoint::i(), M::IDENTITY));

        let (p, g) = reduce_to_f(&UHPoint::ints(7, 1)).unwrap();
        assert_eq!(p, UHPoint::i());
        assert_eq!(g, M::translation(-7));

        let (p, g) = reduce_to_f(&UHPoint::ratio(1, 10, 1, 10)).unwrap();
        assert_eq!(p, UHPoint::ints(0, 5));
        assert_eq!(g, M::translation(5).compose(&M::S).unwrap());
    }

    #[test]
    fn reduce_respects_boundary_convention() {
        // Right edge maps to left edge.
        let (p, _) = reduce_to_f(&UHPoint::ratio(1, 2, 3, 1)).unwrap();
        assert_eq!(p, UHPoint::ratio(-1, 2, 3, 1));
        // Right half of the arc maps to the left half.
        let (p, g) = reduce_to_f(&UHPoint::ratio(7, 25, 24, 25)).unwrap();
        assert_eq!(p, UHPoint::ratio(-7, 25, 24, 25));
        assert_eq!(g, M::S);
        assert!(is_reduced(&p));
        let (p, _) = reduce_to_f(&UHPoint::float(0.5, 3f64.sqrt() / 2.0).unwrap()).unwrap();
        assert!((p.x_f64() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn reduce_maps_point_by_returned_element() {
        let z = UHPoint::ratio(13, 7, 1, 97);
        let (p, g) = reduce_to_f(&z).unwrap();
        assert_eq!(g.apply(&z), p);
        assert!(is_reduced(&p));
        let (p2, g2) = reduce_to_f(&p).unwrap();
        assert_eq!((p2, g2), (p, M::IDENTITY));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_in_f(&UHPoint::ints(0, 3)), FPart::Cusp);
        assert_eq!(classify_in_f(&UHPoint::i()), FPart::Central);
        assert_eq!(classify_in_f(&UHPoint::ints(2, 2)), FPart::Outside);
        assert_eq!(classify_in_f(&UHPoint::ints(0, 2)), FPart::Cusp);
        assert_eq!(classify_in_f(&UHPoint::ratio(0, 1, 1, 2)), FPart::Outside);
    }

    #[test]
    fn region_membership() {
        let fo = Region::central();
        assert!(fo.contains(&UHPoint::i()));
        assert!(!fo.contains(&UHPoint::ints(0, 2)));
        assert!(fo.closure_contains(&UHPoint::ints(0, 2)));
        assert!(fo.contains(&UHPoint::rho()));
        let strip = Region::strip(3.0).unwrap();
        assert!(strip.contains(&UHPoint::ratio(1, 2, 4, 1)));
        assert!(!strip.contains(&UHPoint::ratio(0, 1, 4, 1)));
        assert!(Region::strip(-1.0).is_err());
        let t = Region::Translate { alpha: M::S };
        assert!(t.contains(&UHPoint::ratio(0, 1, 1, 2)));
        assert!(Region::cusp_with_height(exact::int(1)).is_err());
    }

    #[test]
    fn subgroup_reduction_examples() {
        let full = SubgroupSpec::full();
        let (p, i, g) = reduce_to_subgroup_domain(&UHPoint::i(), &full).unwrap();
        assert_eq!((p, i, g), (UHPoint::i(), 0, M::IDENTITY));

        let g2 = SubgroupSpec::principal(2).unwrap();
        let z = UHPoint::ints(7, 1);
        let (p, i, g) = reduce_to_subgroup_domain(&z, &g2).unwrap();
        assert!(g2.is_member(&g));
        assert_eq!(g.apply(&z), p);
        assert!(Region::Translate {
            alpha: g2.coset_representatives()[i]
        }
        .contains(&p));
    }

    #[test]
    fn gamma2_domain_area_is_two_pi() {
        let dom = SubgroupDomain::new(&SubgroupSpec::principal(2).unwrap());
        assert_eq!(dom.pieces().len(), 6);
        assert!((dom.area() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn central_diameter_values() {
        let fo = Region::central();
        let closed = fo.diameter_cosh().unwrap();
        assert!((closed - 23.0 * 3f64.sqrt() / 24.0).abs() < 1e-12);
        // The bottom corners ρ and ρ + 1 are farther apart than the corner
        // pair used for the closed form.
        let numeric = fo.boundary_diameter_cosh(400).unwrap();
        assert!((numeric - 5.0 / 3.0).abs() < 1e-6);
        assert!(Region::Standard.diameter_cosh().is_err());
    }
}

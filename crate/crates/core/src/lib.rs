//! Geodesic distances, covers and distinct-distance statistics on modular
//! surfaces `Γ\H²` for congruence subgroups `Γ ⊆ PSL(2, ℤ)`.

mod error;

pub mod covers;
pub mod domain;
pub mod exact;
pub mod experiment;
pub mod group;
pub mod hyperbolic;
pub mod metrics;
pub mod orbit;
pub mod sampling;
pub mod search;

pub use covers::{
    cover_central_generic, cover_fo, cover_fu, cover_strip, verify_cover, CoverConstants,
    GeodesicCover,
};
pub use domain::{
    classify_in_f, reduce_to_f, reduce_to_subgroup_domain, FPart, Region, SubgroupDomain,
};
pub use error::{Error, ParseError, Result};
pub use exact::{ExactKey, Rational};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentRow};
pub use group::{ModularElement, SubgroupKind, SubgroupSpec};
pub use hyperbolic::{cosh_distance, disc_area, mobius_apply, DistanceKey, RealMatrix2, UHPoint};
pub use metrics::{
    distance_stats, quadruple_count_h2, surface_distance_cover, surface_distance_oracle,
    DistanceStats,
};
pub use orbit::{enumerate_ball, enumerate_ball_bfs_oracle, BallQuery};
pub use sampling::{sample_points, Sampler, SamplerConfig};
pub use search::{equilateral_search, EquilateralCandidate, SearchConfig};

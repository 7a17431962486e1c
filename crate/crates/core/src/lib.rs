//! Hölder-exponent bounds for quasiconformal maps and planar divergence-form
//! elliptic equations.
//!
//! The central quantity is the exponent lower bound `1 / (A C)`, where `C` is
//! the supremum over circles of the averaged distortion
//! `|1 - conj(eta)^2 mu|^2 / (1 - |mu|^2)` and `A <= 1` is the supremum of the
//! isoperimetric ratio `4 pi |f(D)| / H1(f(S))^2` of image disks. Setting
//! `A = 1` recovers the distortion-only bound `1 / C`, which in turn is never
//! worse than Mori's `1 / K`.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod catalog;
pub mod elliptic;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod plane;
pub mod quadrature;
pub mod sampled;

pub use bounds::{
    distortion_constant, distortion_integrand, gronwall_check, holder_lower_bound, isoperimetric_constant,
    mori_consistency, regularity_report, GronwallVerdict, MoriReport, RegularityReport,
};
pub use catalog::{affine_map, parse_map_spec, power_spiral, radial_stretch, spiral_map, CatalogEntry};
pub use elliptic::{
    beltrami_from_matrix, comparison_bounds, elliptic_holder_bound, validate_matrix_field, ComparisonBounds,
    MatrixField, SymMatrix,
};
pub use error::{QcError, Result};
pub use extremal::{
    delta_weight_integral, empirical_holder, epsilon_weight_integral, extremality_report, DefectProfile,
    EpsilonProfile, ExtremalityReport, Verdict,
};
pub use geometry::{phi_profile, GeometryProfile, ProfileConfig, RadialConfig};
pub use plane::{
    beltrami_of, log_spaced, validate_field, wirtinger_from_cartesian, BeltramiField, CircleSpec, DomainSpec, MapModel,
    OuterDomain, QcMap, ValidatedField, C64,
};
pub use quadrature::{circular_average, sup_over_circles, QuadratureConfig, SupResult};
pub use sampled::{Interpolation, SampledField};

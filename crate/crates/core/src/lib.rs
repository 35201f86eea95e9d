//! Rotational surfaces in E⁴ with rotation rates m = n = 1.
//!
//! The crate computes the closed-form invariants of the surface
//! `X(s,t) = (x cos t, x sin t, y cos t, y sin t)` built from a meridian
//! `(x(s), y(s))`, checks them against a independent numerical oracle
//! (finite-difference frames, second fundamental form and Laplace–Beltrami
//! operator), classifies the Gauss map as pointwise 1-type of the first or
//! second kind, and verifies bicomplex group structure on the surface.

pub mod bicomplex;
pub mod commands;
pub mod error;
pub mod exterior;
pub mod expr;
pub mod jet;
pub mod numeric;
pub mod pointwise;
pub mod profile;
pub mod report;
pub mod surface;

pub use bicomplex::{bc_add, bc_inverse, bc_mul, bc_scale, parse_bicomplex, Bicomplex, Conjugation, GroupCheckReport};
pub use commands::{AnalysisConfig, BicomplexOp, GroupCheckConfig, SourceChoice};
pub use error::{Error, ParseError, Result};
pub use exterior::{biv_inner, frame_biv_to_fixed, pluecker_residual, wedge, Bivector4, Frame, FrameBivector, Vec4};
pub use expr::{parse_expr, Expr, Params};
pub use jet::Jet3;
pub use numeric::{laplacian_numeric, numeric_jets, FnImmersion, Immersion, ImmersionSample, MetricComponents};
pub use pointwise::{first_kind_test, second_kind_fit, GaussSampleSet, Kind, LaplacianSource, PointwiseFit, Thresholds};
pub use profile::{arclength_reparametrize, make_family, parse_interval, parse_profile_spec, Family, FamilyKind, Interval, ProfileCurve};
pub use surface::{clifford_torus, flat_family, InvariantTriple, RotationSurface, SecondFundamental};

//! Generic coordinate tensor calculus over metric fields.

pub mod curvature;
pub mod frame;
pub mod metric;

pub use curvature::{
    christoffel, geodesic_acceleration, ricci_scalar, riemann, ChristoffelData, CurvatureData,
};
pub use frame::{rank2_to_frame, rank3_to_frame, rank4_to_frame};
pub use metric::{
    signature_consistent_at, ConstantMetric, GeometryError, Metric, MetricComponents, Signature,
};

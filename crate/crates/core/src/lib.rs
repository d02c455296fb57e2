//! Numerical differential geometry for pp-wave spacetimes and their
//! almost-Kähler Riemannian duals.
//!
//! The crate builds Lorentzian wave metrics from a parsed profile function,
//! produces the Riemannian dual metric, and verifies the geometry end to end:
//! curvature in closed form against generic tensor calculus, closedness of
//! the fundamental 2-form, the Nijenhuis obstruction, conserved quantities of
//! dual geodesics, and the plane-wave scaling limit of arbitrary lightlike
//! charts.
//!
//! Everything is evaluated pointwise with forward-mode derivative jets
//! ([`jet::Jet2`]), which carry values, gradients, and Hessians exactly
//! through every arithmetic node — the derivative depth the Riemann tensor
//! needs, without symbolic expression swell.

pub mod chart;
pub mod expr;
pub mod field;
pub mod geodesics;
pub mod geometry;
pub mod jet;
pub mod kahler;
pub mod linalg;
pub mod ode;
pub mod penrose;
pub mod ppwave;
pub mod sampling;

pub use chart::{ChartFile, ChartFileError, LoadedChart};
pub use expr::{Expr, ParseError};
pub use field::ScalarField;
pub use geodesics::{
    ConservedMonitors, GeodesicError, GeodesicState, MonitorDrift, ProbeReport, StepControl,
    Trajectory,
};
pub use geometry::{
    ChristoffelData, CurvatureData, GeometryError, Metric, MetricComponents, Signature,
};
pub use jet::{EvalError, Jet1, Jet2};
pub use kahler::{
    AlmostComplexStructure, Classification, ClassificationReport, FundamentalForm, KahlerError,
    NijenhuisValue,
};
pub use penrose::{
    DualPipelineOutcome, LightlikeChart, PenroseError, PenroseFamily, PenroseReport,
    PlaneWaveCertificate, PlaneWaveLimit,
};
pub use ppwave::{ChartError, DualChart, FrameData, PpWaveChart, TorusChart};

//! Whitney regularity of the image of a ball: chamber meshes, geodesic
//! ratios in the image, derivatives of `p_{k+1}` along stratum images, and
//! the min/max envelopes of `p_{k+1}` over `Π_k′`.

mod envelope;
mod lift;
mod mesh;
mod ratio;

pub use envelope::{
    envelope_at, envelope_faces, envelope_fiber_agreement, envelope_functions, Envelope,
    EnvelopeCell, FiberAgreement, CONTAINMENT_TOL,
};
pub use lift::{lift_derivatives, LiftReport, LiftSample, ScalingCheck, SCALING_STEPS};
pub use mesh::{build_chamber_mesh, ChamberMesh, MESH_TOL};
pub use ratio::{
    image_graph, whitney_ratio, whitney_study, ImageGraph, PairRecord, PairSpec, RatioReport,
    RefinementRow, IMAGE_LINK_FACTOR, MAX_IMAGE_LINKS, NEAR_BOUNDARY_FRACTION, PAIRS_PER_SOURCE, RESOLUTION_FACTOR,
};

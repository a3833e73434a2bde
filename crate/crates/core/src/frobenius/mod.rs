//! Frobenius manifold charts, structure constants, WDVV and axiom checks,
//! deformed flat coordinates, the intersection form and the central charge.

pub mod chart;
pub mod deformed;
pub mod integrate;
pub mod intersection;
pub mod tensor;

pub use chart::{EulerField, FMChart};
pub use deformed::{deformed_flat_coordinates, DeformedFlatSeries, SeriesMatrix};
pub use integrate::integrate_gradient;
pub use intersection::{intersection_form, virasoro_central_charge, IntersectionForm};
pub use tensor::{check_axioms, check_wdvv, structure_constants, AxiomReport, StructureConstants, WdvvReport};

//! The quantised operator: flux splitting, integer transfer maps, the
//! conservative update in one and several dimensions, and tools for
//! comparing the dynamics induced by different interface rules.

mod equivalence;
mod kernel;
mod maps;
mod nd;
mod params;
mod split;
mod step;

pub use equivalence::{
    disagreement_set, first_disagreement, trajectories_identical, Divergence, EquivalenceReport,
};
pub use maps::{
    build_transfer_maps, interface_flux, quantised_two_point_flux, Direction, InterfaceRule,
    QuantisedTwoPointFlux, SplitMaps, TransferMap,
};
pub use kernel::TabulatedStep;
pub use nd::{step_nd, step_nd_sequential, GridNd};
pub use params::{cfl_check, CflReport, SchemeParams};
pub use split::{alpha_for_range, lax_friedrichs_split, FluxSplit};
pub use step::{
    apply_flux_difference, interface_fluxes, run_recording_visits, step, step_counted,
    step_in_place, step_observed, OpCounts, VisitedPairs,
};

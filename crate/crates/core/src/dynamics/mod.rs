//! Time evolution and the balance laws measured along it.

mod balance;
mod evolve;
mod lorentz;
mod virial;

pub use balance::{
    continuity_residual, continuity_residual_with, ehrenfest_check, expectation_dynamics_residual,
    identity_observable, ContinuityResidual, EhrenfestReport, ExpectationForm, ExpectationResidual, Observable,
};
pub use evolve::{
    centered_rate, cfl_limit, evolve, gaussian_packet, ho_eigenfunction, step, Equation, EvolutionState, EvolveOptions,
    ObservationSeries, Observer, StationaryState,
};
pub use lorentz::{lorentz_report, LorentzReport, Vec3};
pub use virial::{virial_report, virial_report_with, VirialOptions, VirialReport};

pub(crate) use virial::{decays_at_edges, gradient_channels, measured_rate, stationarity};

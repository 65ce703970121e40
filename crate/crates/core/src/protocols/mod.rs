//! Two-party protocols: the execution harness, the intersection
//! subprotocol, set-intersection oracles with exact distance measurement,
//! amplification, and the streaming-to-protocol simulation.

pub mod boost;
pub mod framework;
pub mod intersection;
pub mod oracle;
pub mod simulate;

pub use boost::{boost_si, boost_trials, BoostOutcome, BoostParams, BoostSummary};
pub use framework::{run_protocol, Echo, Message, Party, Protocol, PublicCoins, RoundStructure, Silent, Transcript};
pub use intersection::{intersection_protocol, Intersection};
pub use oracle::{
    calibrate_mock, measure_internal_eps, oracle_from_tag, measure_internal_eps_mc, mock_eps_solver, EpsMeasurement, MockMode, MockOracle,
    SiOracle, CALIBRATION_M, EXACT_LIMIT,
};
pub use simulate::{simulate_two_pass, Simulation};

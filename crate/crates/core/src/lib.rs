//! Sequential unambiguous discrimination of two qubit states and the
//! quantum discord of the resulting bipartite states.

pub mod correlations;
pub mod error;
pub mod figures;
pub mod montecarlo;
pub mod optimizer;
pub mod protocol;
pub mod qmath;
mod search;

pub use correlations::{DiscordReport, SearchSchedule, Side};
pub use error::{Error, Result};
pub use figures::CurvePoint;
pub use montecarlo::{EmpiricalProbs, Estimate, TrialStats, Unambiguity};
pub use optimizer::{NumericSearch, OptimumReport, Regime};
pub use protocol::{PovmSet, ProtocolParams, SequentialProtocol};
pub use qmath::{CMatrix, CVector, DensityOperator, StateVector, UnitaryOperator, C64};

//! Threshold-based (send-on-delta) sampling of continuous piecewise-polynomial
//! signals, together with the event-sequence geometry needed to study it:
//! Weyl's discrepancy norm and its relatives, spike-train distances, the
//! MMD/chain/transcription machinery, and an empirical harness for the
//! quasi-isometry and discontinuity properties of the sampler.
//!
//! Signals are exact piecewise polynomials of degree at most two, so every
//! threshold crossing is computed in closed form.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod events;
pub mod io;
pub mod norms;
pub mod sampler;
pub mod signal;
pub mod spike_metrics;
pub mod structure;

pub use error::{Error, Result};
pub use events::{Event, EventSequence};
pub use norms::NormKind;
pub use sampler::{Threshold, Trigger};
pub use signal::{Segment, Signal};

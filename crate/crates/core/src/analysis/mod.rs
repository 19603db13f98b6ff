//! Empirical harness: discontinuity measure, quasi-isometry checks,
//! left-continuity probes and norm certification.

pub mod certify;
pub mod continuity;
pub mod emdm;
pub mod families;
pub mod qi;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EventSequence;
use crate::norms::NormKind;
use crate::spike_metrics::{
    van_rossum_squared, victor_purpura, VanRossumParams, VictorPurpuraParams, VpSignMode,
};

pub use certify::{certify_norm, CertificationReport, CertifyConfig};
pub use continuity::{left_continuity_probe, ContinuityReport};
pub use emdm::{
    emdm_characterize, emdm_report, emdm_sweep, schreiber_witness, Characterization, EmdmReport, EmdmSweep,
    GrowthRow, SchreiberWitness,
};
pub use qi::{qi_verify, QiReport};

/// A distance on event sequences used by the EMDM machinery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "metric")]
pub enum EventMetric {
    Norm { norm: NormKind },
    /// Reported in the inner-product form `‖R_{η1} - R_{η2}‖_2^2`.
    VanRossum { alpha: f64 },
    VictorPurpura { s: f64, mode: VpSignMode },
}

impl EventMetric {
    pub fn distance(&self, a: &EventSequence, b: &EventSequence) -> Result<f64> {
        match *self {
            Self::Norm { norm } => Ok(norm.of(&a.difference(b)?)),
            Self::VanRossum { alpha } => van_rossum_squared(a, b, VanRossumParams::new(alpha)?),
            Self::VictorPurpura { s, mode } => victor_purpura(a, b, VictorPurpuraParams::new(s, mode)?),
        }
    }

    /// Depends on event times, not only on their order.
    pub fn is_time_sensitive(&self) -> bool {
        !matches!(self, Self::Norm { .. })
    }
}

impl From<NormKind> for EventMetric {
    fn from(norm: NormKind) -> Self {
        Self::Norm { norm }
    }
}

impl fmt::Display for EventMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Norm { norm } => write!(f, "{norm}"),
            Self::VanRossum { alpha } => write!(f, "vr(alpha={alpha})"),
            Self::VictorPurpura { s, .. } => write!(f, "vp(s={s})"),
        }
    }
}

impl EventMetric {
    /// Parses `D`, `A`, `M`, `vr` or `vp`; the rate applies to the last two.
    pub fn parse(name: &str, rate: f64) -> Result<Self> {
        match name {
            "vr" | "van_rossum" => Ok(Self::VanRossum { alpha: rate }),
            "vp" | "victor_purpura" => Ok(Self::VictorPurpura { s: rate, mode: VpSignMode::Separate }),
            other => NormKind::from_str(other)
                .map(Self::from)
                .map_err(|_| Error::Parse(format!("unknown metric '{other}'"))),
        }
    }
}

/// `(1/ϑ) Φ_ϑ(f)`. Divides rather than multiplying by `1/ϑ`, so pure
/// sequences map to exactly `±1`.
pub(crate) fn normalized(eta: &EventSequence, theta: f64) -> EventSequence {
    let events = eta
        .events()
        .iter()
        .map(|e| crate::events::Event::new(e.t, e.v / theta))
        .collect();
    EventSequence::from_sorted_unchecked(eta.horizon(), events)
}

//! Live SNMP v2c polling of the six ICMP counters, wrap-corrected deltas and
//! per-window classification. A scriptable simulated agent stands in for a
//! real device in tests and demos.

pub mod codec;
mod client;
mod sim;
mod stream;

use std::sync::OnceLock;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::ICMP_SHORT_NAMES;
use crate::error::{Error, Result};
use codec::Oid;

pub use client::{poll, AgentEndpoint};
pub use sim::{serve_simulated_agent, Faults, Phase, Scenario, ScenarioClock, SimulatedAgent};
pub use stream::{classify_stream, Event, StreamConfig, StreamSummary};

/// Counter OIDs in attribute order (iOM, iIM, iOU, iIU, iIE, iOE).
pub const ICMP_OIDS: [&str; 6] = [
    "1.3.6.1.2.1.5.14.0",
    "1.3.6.1.2.1.5.1.0",
    "1.3.6.1.2.1.5.16.0",
    "1.3.6.1.2.1.5.3.0",
    "1.3.6.1.2.1.5.8.0",
    "1.3.6.1.2.1.5.21.0",
];

pub const SYS_UPTIME_OID: &str = "1.3.6.1.2.1.1.3.0";

pub fn icmp_oids() -> [Oid; 6] {
    ICMP_OIDS.map(|s| s.parse().expect("static OID"))
}

/// Milliseconds on a process-wide monotonic clock.
pub fn monotonic_ms() -> u64 {
    static EPOCH: OnceLock<Instant> = OnceLock::new();
    EPOCH.get_or_init(Instant::now).elapsed().as_millis() as u64
}

/// Cumulative counters read from one agent response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterSnapshot {
    pub timestamp_ms: u64,
    pub counters: [u32; 6],
    /// sysUpTime in hundredths of a second, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uptime: Option<u32>,
}

impl CounterSnapshot {
    pub fn new(timestamp_ms: u64, counters: [u32; 6]) -> Self {
        CounterSnapshot { timestamp_ms, counters, uptime: None }
    }

    /// True when both snapshots carry sysUpTime and it went backwards.
    pub fn restarted_since(&self, prev: &CounterSnapshot) -> bool {
        matches!((prev.uptime, self.uptime), (Some(a), Some(b)) if b < a)
    }
}

/// Per-window counter activity in attribute order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector {
    pub window_start: u64,
    pub window_end: u64,
    pub deltas: [f64; 6],
}

impl DeltaVector {
    pub fn duration_secs(&self) -> f64 {
        (self.window_end - self.window_start) as f64 / 1000.0
    }

    /// Deltas divided by the window length in seconds.
    pub fn rates(&self) -> [f64; 6] {
        let secs = self.duration_secs();
        self.deltas.map(|d| d / secs)
    }

    pub fn named(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        ICMP_SHORT_NAMES.iter().copied().zip(self.deltas)
    }
}

/// Wrap-corrected difference of two snapshots: a counter that went down is
/// assumed to have wrapped exactly once.
pub fn delta(prev: &CounterSnapshot, curr: &CounterSnapshot) -> Result<DeltaVector> {
    if curr.timestamp_ms <= prev.timestamp_ms {
        return Err(Error::invalid(format!(
            "snapshot timestamps must increase ({} then {})",
            prev.timestamp_ms, curr.timestamp_ms
        )));
    }
    let mut deltas = [0.0; 6];
    for (d, (&p, &c)) in deltas.iter_mut().zip(prev.counters.iter().zip(&curr.counters)) {
        *d = c.wrapping_sub(p) as f64;
    }
    Ok(DeltaVector { window_start: prev.timestamp_ms, window_end: curr.timestamp_ms, deltas })
}

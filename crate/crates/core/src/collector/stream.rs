use std::ops::ControlFlow;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};

use super::{delta, poll, AgentEndpoint, CounterSnapshot, DeltaVector};
use crate::classifiers::{ClassDistribution, TrainedModel};
use crate::dataset::{icmp_index, ClassLabel};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct StreamConfig {
    pub interval: Duration,
    /// Stop after this many polls.
    pub max_polls: Option<u64>,
    /// Feed the model per-second rates instead of raw deltas.
    pub rates: bool,
}

impl StreamConfig {
    pub fn new(interval: Duration) -> Self {
        StreamConfig { interval, max_polls: None, rates: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Window { delta: DeltaVector, label: ClassLabel, distribution: ClassDistribution },
    /// A failed poll or a detected agent restart; the next window starts over.
    Gap { timestamp_ms: u64, reason: String },
}

impl Event {
    pub fn to_json(&self) -> Value {
        match self {
            Event::Window { delta, label, distribution } => {
                let deltas: Map<String, Value> = delta.named().map(|(n, v)| (n.to_string(), json!(v))).collect();
                json!({
                    "window_start": delta.window_start,
                    "window_end": delta.window_end,
                    "deltas": deltas,
                    "label": label,
                    "distribution": distribution,
                })
            }
            Event::Gap { timestamp_ms, reason } => json!({ "gap": timestamp_ms, "reason": reason }),
        }
    }

    pub fn to_json_line(&self) -> String {
        self.to_json().to_string()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamSummary {
    pub polls: u64,
    pub windows: u64,
    pub gaps: u64,
}

fn model_indices(model: &TrainedModel) -> Result<Vec<usize>> {
    model
        .schema()
        .names()
        .iter()
        .map(|n| icmp_index(n).ok_or_else(|| Error::UnknownAttribute(format!("{n} is not an ICMP counter"))))
        .collect()
}

/// Polls `endpoint` every `interval` and hands each completed window to
/// `sink`. Polling runs on its own thread and feeds classification through a
/// channel. Poll failures become gap events. Returns when `max_polls` is
/// reached or the sink breaks.
pub fn classify_stream<F>(endpoint: &AgentEndpoint, model: &TrainedModel, config: &StreamConfig, mut sink: F) -> Result<StreamSummary>
where
    F: FnMut(&Event) -> ControlFlow<()>,
{
    if config.interval.is_zero() {
        return Err(Error::invalid("poll interval must be positive"));
    }
    endpoint.validate()?;
    let indices = model_indices(model)?;
    let (tx, rx) = mpsc::channel::<Result<CounterSnapshot>>();
    let (stop_tx, stop_rx) = mpsc::channel::<()>();

    std::thread::scope(|scope| {
        scope.spawn(move || {
            let start = Instant::now();
            let mut n: u64 = 0;
            while config.max_polls.is_none_or(|m| n < m) {
                if tx.send(poll(endpoint)).is_err() {
                    return;
                }
                n += 1;
                let next = start + config.interval * n as u32;
                let wait = next.saturating_duration_since(Instant::now());
                if !matches!(stop_rx.recv_timeout(wait), Err(mpsc::RecvTimeoutError::Timeout)) {
                    return;
                }
            }
        });

        let mut summary = StreamSummary::default();
        let mut prev: Option<CounterSnapshot> = None;
        for outcome in rx.iter() {
            summary.polls += 1;
            let event = match outcome {
                Err(e) => {
                    prev = None;
                    Some(Event::Gap { timestamp_ms: super::monotonic_ms(), reason: e.to_string() })
                }
                Ok(curr) => match prev.replace(curr) {
                    None => None,
                    Some(p) if curr.restarted_since(&p) => Some(Event::Gap {
                        timestamp_ms: curr.timestamp_ms,
                        reason: "agent restart detected".into(),
                    }),
                    Some(p) => Some(match delta(&p, &curr) {
                        Ok(d) => {
                            let values = if config.rates { d.rates() } else { d.deltas };
                            let x: Vec<f64> = indices.iter().map(|&i| values[i]).collect();
                            let distribution = model.predict_distribution(&x)?;
                            let label = model.predict(&x)?;
                            Event::Window { delta: d, label, distribution }
                        }
                        Err(e) => {
                            prev = None;
                            Event::Gap { timestamp_ms: curr.timestamp_ms, reason: e.to_string() }
                        }
                    }),
                },
            };
            if let Some(ev) = event {
                match ev {
                    Event::Window { .. } => summary.windows += 1,
                    Event::Gap { .. } => summary.gaps += 1,
                }
                if sink(&ev).is_break() {
                    break;
                }
            }
        }
        drop(stop_tx);
        drop(rx);
        Ok(summary)
    })
}

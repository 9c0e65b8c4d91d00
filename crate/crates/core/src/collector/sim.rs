use std::net::{SocketAddr, UdpSocket};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::codec::{error_status, Message, Oid, Pdu, PduType, Value, VarBind};
use super::{icmp_oids, SYS_UPTIME_OID};
use crate::error::{Error, Result};

/// `windows` consecutive windows that each add `increment` to the counters.
/// A phase without a window count lasts forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    #[serde(default)]
    pub windows: Option<u64>,
    pub increment: [u32; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioClock {
    /// Each answered GetRequest closes a window.
    PerRequest,
    /// A window closes every `period_ms` of wall time.
    Wall { period_ms: u64 },
}

/// Deliberate misbehaviour for exercising error paths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Faults {
    /// Left out of every response.
    #[serde(default)]
    pub omit: Vec<String>,
    /// Non-zero error-status returned for every request.
    #[serde(default)]
    pub error_status: Option<i32>,
}

/// Scripted cumulative counter values over windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub initial: [u32; 6],
    pub phases: Vec<Phase>,
    pub clock: ScenarioClock,
    #[serde(default)]
    pub faults: Faults,
}

/// Per-window increments of an echo flood: echo requests and replies plus
/// the message totals that include them.
pub const ECHO_FLOOD_INCREMENT: [u32; 6] = [10_005, 10_005, 5, 5, 10_000, 10_000];

impl Scenario {
    /// Counters never change.
    pub fn constant(counters: [u32; 6]) -> Self {
        Scenario { initial: counters, phases: Vec::new(), clock: ScenarioClock::PerRequest, faults: Faults::default() }
    }

    /// `idle_windows` windows with no ICMP activity, then an echo flood.
    pub fn idle_then_flood(idle_windows: u64) -> Self {
        Scenario {
            initial: [0; 6],
            phases: vec![
                Phase { windows: Some(idle_windows), increment: [0; 6] },
                Phase { windows: None, increment: ECHO_FLOOD_INCREMENT },
            ],
            clock: ScenarioClock::PerRequest,
            faults: Faults::default(),
        }
    }

    pub fn with_clock(mut self, clock: ScenarioClock) -> Self {
        self.clock = clock;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let ScenarioClock::Wall { period_ms: 0 } = self.clock {
            return Err(Error::invalid("scenario clock period must be positive"));
        }
        for name in &self.faults.omit {
            name.parse::<Oid>().map_err(|e| Error::invalid(format!("omitted OID {name:?}: {e}")))?;
        }
        if self.faults.error_status == Some(0) {
            return Err(Error::invalid("forced error-status must be non-zero"));
        }
        Ok(())
    }

    /// Cumulative counters after `window` closed windows.
    pub fn counters_at(&self, window: u64) -> [u32; 6] {
        let mut c = self.initial;
        let mut left = window;
        for phase in &self.phases {
            let n = phase.windows.map_or(left, |w| w.min(left));
            for (v, &inc) in c.iter_mut().zip(&phase.increment) {
                *v = v.wrapping_add((inc as u64).wrapping_mul(n) as u32);
            }
            left -= n;
            if left == 0 {
                break;
            }
        }
        c
    }
}

/// Handle to a running simulated agent. Dropping it stops the agent.
pub struct SimulatedAgent {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    requests: Arc<AtomicU64>,
    handle: Option<JoinHandle<()>>,
}

impl SimulatedAgent {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn port(&self) -> u16 {
        self.addr.port()
    }

    /// GetRequests answered so far.
    pub fn requests_served(&self) -> u64 {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn stop(mut self) {
        self.shutdown();
    }

    /// Blocks until the agent thread exits (it only does when stopped).
    pub fn join(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }

    fn shutdown(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

impl Drop for SimulatedAgent {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// Starts an agent on `bind` (port 0 picks a free port) answering GetRequests
/// from `scenario` on a background thread.
pub fn serve_simulated_agent(scenario: Scenario, bind: SocketAddr) -> Result<SimulatedAgent> {
    scenario.validate()?;
    let socket = UdpSocket::bind(bind).map_err(Error::Network)?;
    socket.set_read_timeout(Some(Duration::from_millis(20))).map_err(Error::Network)?;
    let addr = socket.local_addr().map_err(Error::Network)?;
    let stop = Arc::new(AtomicBool::new(false));
    let requests = Arc::new(AtomicU64::new(0));
    let handle = {
        let (stop, requests) = (stop.clone(), requests.clone());
        std::thread::spawn(move || run_agent(socket, scenario, stop, requests))
    };
    Ok(SimulatedAgent { addr, stop, requests, handle: Some(handle) })
}

fn run_agent(socket: UdpSocket, scenario: Scenario, stop: Arc<AtomicBool>, requests: Arc<AtomicU64>) {
    let started = Instant::now();
    let mut responder = Responder::new(scenario);
    let mut buf = [0u8; 65535];
    while !stop.load(Ordering::SeqCst) {
        let (n, peer) = match socket.recv_from(&mut buf) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let elapsed = started.elapsed();
        let (reply, answered) = responder.respond(&buf[..n], elapsed);
        if answered {
            requests.fetch_add(1, Ordering::SeqCst);
        }
        let _ = socket.send_to(&reply.encode(), peer);
    }
}

struct Responder {
    scenario: Scenario,
    oids: [Oid; 6],
    uptime_oid: Oid,
    omit: Vec<Oid>,
    served: u64,
}

impl Responder {
    fn new(scenario: Scenario) -> Self {
        let omit = scenario.faults.omit.iter().map(|s| s.parse().expect("validated")).collect();
        Responder { scenario, oids: icmp_oids(), uptime_oid: SYS_UPTIME_OID.parse().unwrap(), omit, served: 0 }
    }

    fn window(&self, elapsed: Duration) -> u64 {
        match self.scenario.clock {
            ScenarioClock::PerRequest => self.served,
            ScenarioClock::Wall { period_ms } => elapsed.as_millis() as u64 / period_ms,
        }
    }

    /// The response and whether it answered a well-formed GetRequest.
    fn respond(&mut self, request: &[u8], elapsed: Duration) -> (Message, bool) {
        let msg = match Message::decode(request) {
            Ok(m) => m,
            Err(_) => return (error_reply(Vec::new(), 0, error_status::GEN_ERR, 0, Vec::new()), false),
        };
        if msg.pdu.pdu_type != PduType::GetRequest {
            return (error_reply(msg.community, msg.pdu.request_id, error_status::GEN_ERR, 0, msg.pdu.varbinds), false);
        }
        if let Some(status) = self.scenario.faults.error_status {
            return (error_reply(msg.community, msg.pdu.request_id, status, 1, msg.pdu.varbinds), true);
        }
        let counters = self.scenario.counters_at(self.window(elapsed));
        let uptime = (elapsed.as_millis() / 10) as u32;
        let varbinds = msg
            .pdu
            .varbinds
            .into_iter()
            .filter(|vb| !self.omit.contains(&vb.oid))
            .map(|vb| {
                let value = if let Some(i) = self.oids.iter().position(|o| o == &vb.oid) {
                    Value::Counter32(counters[i])
                } else if vb.oid == self.uptime_oid {
                    Value::TimeTicks(uptime)
                } else {
                    Value::NoSuchObject
                };
                VarBind { oid: vb.oid, value }
            })
            .collect();
        self.served += 1;
        let reply = Message {
            version: msg.version,
            community: msg.community,
            pdu: Pdu {
                pdu_type: PduType::GetResponse,
                request_id: msg.pdu.request_id,
                error_status: error_status::NO_ERROR,
                error_index: 0,
                varbinds,
            },
        };
        (reply, true)
    }
}

fn error_reply(community: Vec<u8>, request_id: i32, status: i32, index: i32, varbinds: Vec<VarBind>) -> Message {
    Message {
        version: super::codec::SNMP_V2C,
        community,
        pdu: Pdu { pdu_type: PduType::GetResponse, request_id, error_status: status, error_index: index, varbinds },
    }
}

use std::io::ErrorKind;
use std::net::{SocketAddr, ToSocketAddrs, UdpSocket};
use std::sync::atomic::{AtomicI32, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::codec::{Message, Oid, PduType, Value};
use super::{icmp_oids, monotonic_ms, CounterSnapshot, ICMP_OIDS, SYS_UPTIME_OID};
use crate::dataset::ICMP_LONG_NAMES;
use crate::error::{Error, Result};

/// Where and how to reach an SNMP agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentEndpoint {
    pub host: String,
    pub port: u16,
    pub community: String,
    /// Per-attempt wait for a response.
    pub timeout: Duration,
    /// Extra attempts after the first.
    pub retries: u32,
    /// Also request sysUpTime so restarts can be detected.
    pub check_uptime: bool,
}

impl AgentEndpoint {
    pub fn new(host: impl Into<String>) -> Self {
        AgentEndpoint {
            host: host.into(),
            port: 161,
            community: "public".into(),
            timeout: Duration::from_secs(1),
            retries: 1,
            check_uptime: false,
        }
    }

    pub fn with_port(mut self, port: u16) -> Self {
        self.port = port;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.timeout.is_zero() {
            return Err(Error::invalid("agent timeout must be positive"));
        }
        Ok(())
    }

    fn resolve(&self) -> Result<SocketAddr> {
        (self.host.as_str(), self.port)
            .to_socket_addrs()
            .map_err(Error::Network)?
            .next()
            .ok_or_else(|| Error::Network(std::io::Error::new(ErrorKind::NotFound, format!("cannot resolve {}", self.host))))
    }
}

fn next_request_id() -> i32 {
    static NEXT: AtomicI32 = AtomicI32::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed) & 0x7FFF_FFFF
}

/// One GetRequest for the six ICMP counters (and sysUpTime if enabled),
/// retried on timeout. The snapshot is stamped when the response arrives.
pub fn poll(endpoint: &AgentEndpoint) -> Result<CounterSnapshot> {
    endpoint.validate()?;
    let addr = endpoint.resolve()?;
    let bind: SocketAddr = if addr.is_ipv4() { "0.0.0.0:0" } else { "[::]:0" }.parse().unwrap();
    let socket = UdpSocket::bind(bind).map_err(Error::Network)?;
    socket.connect(addr).map_err(Error::Network)?;

    let mut oids = icmp_oids().to_vec();
    let uptime_oid: Oid = SYS_UPTIME_OID.parse().unwrap();
    if endpoint.check_uptime {
        oids.push(uptime_oid.clone());
    }
    let request_id = next_request_id();
    let request = Message::get_request(&endpoint.community, request_id, &oids).encode();

    let attempts = endpoint.retries + 1;
    let mut buf = [0u8; 65535];
    for _ in 0..attempts {
        socket.send(&request).map_err(Error::Network)?;
        let deadline = Instant::now() + endpoint.timeout;
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            if remaining.is_zero() {
                break;
            }
            socket.set_read_timeout(Some(remaining)).map_err(Error::Network)?;
            let n = match socket.recv(&mut buf) {
                Ok(n) => n,
                Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => break,
                // ICMP port unreachable from an earlier send: treat as a lost attempt.
                Err(e) if e.kind() == ErrorKind::ConnectionRefused => {
                    std::thread::sleep(remaining);
                    break;
                }
                Err(e) => return Err(Error::Network(e)),
            };
            let timestamp_ms = monotonic_ms();
            let msg = Message::decode(&buf[..n])?;
            if msg.pdu.pdu_type != PduType::GetResponse || msg.pdu.request_id != request_id {
                continue;
            }
            return snapshot_from(&msg, timestamp_ms, endpoint.check_uptime.then_some(&uptime_oid));
        }
    }
    Err(Error::Timeout { attempts })
}

fn snapshot_from(msg: &Message, timestamp_ms: u64, uptime_oid: Option<&Oid>) -> Result<CounterSnapshot> {
    if msg.pdu.error_status != 0 {
        return Err(Error::ErrorStatus {
            status: msg.pdu.error_status as i64,
            index: msg.pdu.error_index as i64,
        });
    }
    let lookup = |oid: &Oid| msg.pdu.varbinds.iter().find(|vb| &vb.oid == oid).map(|vb| &vb.value);
    let mut counters = [0u32; 6];
    for (i, oid) in icmp_oids().iter().enumerate() {
        counters[i] = match lookup(oid) {
            Some(Value::Counter32(c)) | Some(Value::Gauge32(c)) => *c,
            Some(Value::Integer(c)) if *c >= 0 => *c as u32,
            Some(other) => {
                return Err(Error::MissingVarbind(format!(
                    "{} ({}): got {other:?}",
                    ICMP_LONG_NAMES[i], ICMP_OIDS[i]
                )))
            }
            None => return Err(Error::MissingVarbind(format!("{} ({})", ICMP_LONG_NAMES[i], ICMP_OIDS[i]))),
        };
    }
    let uptime = match uptime_oid {
        None => None,
        Some(oid) => match lookup(oid) {
            Some(Value::TimeTicks(t)) => Some(*t),
            _ => return Err(Error::MissingVarbind(format!("sysUpTime ({SYS_UPTIME_OID})"))),
        },
    };
    Ok(CounterSnapshot { timestamp_ms, counters, uptime })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreachable_endpoint_times_out_after_all_attempts() {
        // a bound socket that never answers
        let silent = UdpSocket::bind("127.0.0.1:0").unwrap();
        let mut ep = AgentEndpoint::new("127.0.0.1").with_port(silent.local_addr().unwrap().port());
        ep.timeout = Duration::from_millis(60);
        ep.retries = 2;
        let start = Instant::now();
        match poll(&ep) {
            Err(Error::Timeout { attempts }) => assert_eq!(attempts, 3),
            other => panic!("{other:?}"),
        }
        assert!(start.elapsed() >= Duration::from_millis(180));
        let mut buf = [0u8; 1500];
        silent.set_read_timeout(Some(Duration::from_millis(100))).unwrap();
        let mut received = 0;
        while silent.recv(&mut buf).is_ok() {
            received += 1;
        }
        assert_eq!(received, 3);
    }

    #[test]
    fn closed_port_also_times_out() {
        let port = UdpSocket::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let mut ep = AgentEndpoint::new("127.0.0.1").with_port(port);
        ep.timeout = Duration::from_millis(30);
        ep.retries = 0;
        assert!(matches!(poll(&ep), Err(Error::Timeout { attempts: 1 })));
    }

    #[test]
    fn zero_timeout_rejected() {
        let mut ep = AgentEndpoint::new("127.0.0.1");
        ep.timeout = Duration::ZERO;
        assert!(matches!(poll(&ep), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn defaults() {
        let ep = AgentEndpoint::new("h");
        assert_eq!((ep.port, ep.community.as_str(), ep.check_uptime), (161, "public", false));
    }
}

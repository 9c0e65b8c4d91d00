//! Minimal BER codec for SNMP v2c Get/GetResponse messages.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const SNMP_V2C: i32 = 1;

const TAG_INTEGER: u8 = 0x02;
const TAG_OCTET_STRING: u8 = 0x04;
const TAG_NULL: u8 = 0x05;
const TAG_OID: u8 = 0x06;
const TAG_SEQUENCE: u8 = 0x30;
const TAG_COUNTER32: u8 = 0x41;
const TAG_GAUGE32: u8 = 0x42;
const TAG_TIMETICKS: u8 = 0x43;
const TAG_NO_SUCH_OBJECT: u8 = 0x80;
const TAG_NO_SUCH_INSTANCE: u8 = 0x81;
const TAG_END_OF_MIB_VIEW: u8 = 0x82;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("truncated input")]
    Truncated,
    #[error("expected tag 0x{expected:02x}, found 0x{found:02x}")]
    UnexpectedTag { expected: u8, found: u8 },
    #[error("unsupported PDU tag 0x{0:02x}")]
    UnsupportedPdu(u8),
    #[error("unsupported value tag 0x{0:02x}")]
    UnsupportedValue(u8),
    #[error("invalid length encoding")]
    BadLength,
    #[error("integer does not fit")]
    IntegerOverflow,
    #[error("invalid object identifier: {0}")]
    BadOid(String),
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
    #[error("unsupported SNMP version {0}")]
    UnsupportedVersion(i32),
}

type Result<T> = std::result::Result<T, CodecError>;

/// Object identifier. At least two arcs; the first is 0, 1 or 2 and the
/// second is below 40 unless the first is 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Oid(Vec<u32>);

impl Oid {
    pub fn new(arcs: Vec<u32>) -> Result<Self> {
        let ok = arcs.len() >= 2
            && arcs[0] <= 2
            && (arcs[0] == 2 || arcs[1] < 40)
            && (arcs[0] as u64 * 40 + arcs[1] as u64) <= u32::MAX as u64;
        if ok {
            Ok(Oid(arcs))
        } else {
            Err(CodecError::BadOid(format!("{arcs:?}")))
        }
    }

    pub fn arcs(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for Oid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Oid {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self> {
        let arcs = s
            .trim_start_matches('.')
            .split('.')
            .map(|p| p.parse::<u32>().map_err(|_| CodecError::BadOid(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Oid::new(arcs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Integer(i32),
    OctetString(Vec<u8>),
    Null,
    Oid(Oid),
    Counter32(u32),
    Gauge32(u32),
    TimeTicks(u32),
    NoSuchObject,
    NoSuchInstance,
    EndOfMibView,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarBind {
    pub oid: Oid,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PduType {
    GetRequest,
    GetNextRequest,
    GetResponse,
}

impl PduType {
    fn tag(self) -> u8 {
        match self {
            PduType::GetRequest => 0xA0,
            PduType::GetNextRequest => 0xA1,
            PduType::GetResponse => 0xA2,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0xA0 => Ok(PduType::GetRequest),
            0xA1 => Ok(PduType::GetNextRequest),
            0xA2 => Ok(PduType::GetResponse),
            t => Err(CodecError::UnsupportedPdu(t)),
        }
    }
}

/// SNMP error-status values used by this crate.
pub mod error_status {
    pub const NO_ERROR: i32 = 0;
    pub const TOO_BIG: i32 = 1;
    pub const GEN_ERR: i32 = 5;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdu {
    pub pdu_type: PduType,
    pub request_id: i32,
    pub error_status: i32,
    pub error_index: i32,
    pub varbinds: Vec<VarBind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub version: i32,
    pub community: Vec<u8>,
    pub pdu: Pdu,
}

impl Message {
    pub fn get_request(community: &str, request_id: i32, oids: &[Oid]) -> Self {
        Message {
            version: SNMP_V2C,
            community: community.as_bytes().to_vec(),
            pdu: Pdu {
                pdu_type: PduType::GetRequest,
                request_id,
                error_status: 0,
                error_index: 0,
                varbinds: oids.iter().map(|o| VarBind { oid: o.clone(), value: Value::Null }).collect(),
            },
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut body = Vec::new();
        put_integer(&mut body, TAG_INTEGER, self.version as i64);
        put_tlv(&mut body, TAG_OCTET_STRING, &self.community);
        let mut pdu = Vec::new();
        put_integer(&mut pdu, TAG_INTEGER, self.pdu.request_id as i64);
        put_integer(&mut pdu, TAG_INTEGER, self.pdu.error_status as i64);
        put_integer(&mut pdu, TAG_INTEGER, self.pdu.error_index as i64);
        let mut list = Vec::new();
        for vb in &self.pdu.varbinds {
            let mut item = Vec::new();
            put_oid(&mut item, &vb.oid);
            put_value(&mut item, &vb.value);
            put_tlv(&mut list, TAG_SEQUENCE, &item);
        }
        put_tlv(&mut pdu, TAG_SEQUENCE, &list);
        put_tlv(&mut body, self.pdu.pdu_type.tag(), &pdu);
        let mut out = Vec::with_capacity(body.len() + 4);
        put_tlv(&mut out, TAG_SEQUENCE, &body);
        out
    }

    /// Decodes one message. The whole buffer must be consumed.
    pub fn decode(buf: &[u8]) -> Result<Self> {
        let mut outer = Reader::new(buf);
        let body = outer.expect(TAG_SEQUENCE)?;
        outer.finish()?;
        let mut r = Reader::new(body);
        let version = r.integer_i32()?;
        if version != SNMP_V2C {
            return Err(CodecError::UnsupportedVersion(version));
        }
        let community = r.expect(TAG_OCTET_STRING)?.to_vec();
        let (tag, pdu_bytes) = r.tlv()?;
        let pdu_type = PduType::from_tag(tag)?;
        r.finish()?;

        let mut p = Reader::new(pdu_bytes);
        let request_id = p.integer_i32()?;
        let error_status = p.integer_i32()?;
        let error_index = p.integer_i32()?;
        let mut list = Reader::new(p.expect(TAG_SEQUENCE)?);
        p.finish()?;
        let mut varbinds = Vec::new();
        while !list.is_empty() {
            let mut item = Reader::new(list.expect(TAG_SEQUENCE)?);
            let oid = decode_oid(item.expect(TAG_OID)?)?;
            let value = item.value()?;
            item.finish()?;
            varbinds.push(VarBind { oid, value });
        }
        Ok(Message {
            version,
            community,
            pdu: Pdu { pdu_type, request_id, error_status, error_index, varbinds },
        })
    }
}

fn put_length(out: &mut Vec<u8>, len: usize) {
    if len < 0x80 {
        out.push(len as u8);
    } else {
        let bytes = len.to_be_bytes();
        let skip = bytes.iter().take_while(|&&b| b == 0).count();
        out.push(0x80 | (bytes.len() - skip) as u8);
        out.extend_from_slice(&bytes[skip..]);
    }
}

fn put_tlv(out: &mut Vec<u8>, tag: u8, content: &[u8]) {
    out.push(tag);
    put_length(out, content.len());
    out.extend_from_slice(content);
}

/// Minimal two's-complement encoding.
fn put_integer(out: &mut Vec<u8>, tag: u8, v: i64) {
    let bytes = v.to_be_bytes();
    let mut start = 0;
    while start < 7 {
        let (b, next) = (bytes[start], bytes[start + 1]);
        if (b == 0x00 && next & 0x80 == 0) || (b == 0xFF && next & 0x80 != 0) {
            start += 1;
        } else {
            break;
        }
    }
    put_tlv(out, tag, &bytes[start..]);
}

fn put_oid(out: &mut Vec<u8>, oid: &Oid) {
    let arcs = oid.arcs();
    let mut content = Vec::new();
    let first = arcs[0] as u64 * 40 + arcs[1] as u64;
    put_base128(&mut content, first);
    for &a in &arcs[2..] {
        put_base128(&mut content, a as u64);
    }
    put_tlv(out, TAG_OID, &content);
}

fn put_base128(out: &mut Vec<u8>, mut v: u64) {
    let mut tmp = [0u8; 10];
    let mut i = tmp.len();
    loop {
        i -= 1;
        tmp[i] = (v & 0x7F) as u8 | if i == tmp.len() - 1 { 0 } else { 0x80 };
        v >>= 7;
        if v == 0 {
            break;
        }
    }
    out.extend_from_slice(&tmp[i..]);
}

fn put_value(out: &mut Vec<u8>, v: &Value) {
    match v {
        Value::Integer(i) => put_integer(out, TAG_INTEGER, *i as i64),
        Value::OctetString(s) => put_tlv(out, TAG_OCTET_STRING, s),
        Value::Null => put_tlv(out, TAG_NULL, &[]),
        Value::Oid(o) => put_oid(out, o),
        Value::Counter32(c) => put_integer(out, TAG_COUNTER32, *c as i64),
        Value::Gauge32(c) => put_integer(out, TAG_GAUGE32, *c as i64),
        Value::TimeTicks(c) => put_integer(out, TAG_TIMETICKS, *c as i64),
        Value::NoSuchObject => put_tlv(out, TAG_NO_SUCH_OBJECT, &[]),
        Value::NoSuchInstance => put_tlv(out, TAG_NO_SUCH_INSTANCE, &[]),
        Value::EndOfMibView => put_tlv(out, TAG_END_OF_MIB_VIEW, &[]),
    }
}

fn decode_oid(content: &[u8]) -> Result<Oid> {
    let mut values = Vec::new();
    let mut acc: u64 = 0;
    let mut fresh = true;
    for &b in content {
        if fresh && b == 0x80 {
            return Err(CodecError::BadOid("non-minimal sub-identifier".into()));
        }
        acc = (acc << 7) | (b & 0x7F) as u64;
        if acc > u32::MAX as u64 {
            return Err(CodecError::BadOid("sub-identifier overflow".into()));
        }
        fresh = b & 0x80 == 0;
        if fresh {
            values.push(acc as u32);
            acc = 0;
        }
    }
    if !fresh || values.is_empty() {
        return Err(CodecError::BadOid("unterminated sub-identifier".into()));
    }
    let (a, b) = match values[0] {
        v if v < 40 => (0, v),
        v if v < 80 => (1, v - 40),
        v => (2, v - 80),
    };
    let mut arcs = vec![a, b];
    arcs.extend_from_slice(&values[1..]);
    Oid::new(arcs)
}

fn decode_signed(content: &[u8]) -> Result<i64> {
    if content.is_empty() {
        return Err(CodecError::BadLength);
    }
    if content.len() > 8 {
        return Err(CodecError::IntegerOverflow);
    }
    if content.len() > 1 {
        let (b, next) = (content[0], content[1]);
        if (b == 0x00 && next & 0x80 == 0) || (b == 0xFF && next & 0x80 != 0) {
            return Err(CodecError::BadLength);
        }
    }
    let mut v: i64 = if content[0] & 0x80 != 0 { -1 } else { 0 };
    for &b in content {
        v = (v << 8) | b as i64;
    }
    Ok(v)
}

fn decode_u32(content: &[u8]) -> Result<u32> {
    u32::try_from(decode_signed(content)?).map_err(|_| CodecError::IntegerOverflow)
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    fn finish(&self) -> Result<()> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(CodecError::TrailingBytes(n)),
        }
    }

    fn tlv(&mut self) -> Result<(u8, &'a [u8])> {
        let (&tag, rest) = self.buf.split_first().ok_or(CodecError::Truncated)?;
        let (&first, mut rest) = rest.split_first().ok_or(CodecError::Truncated)?;
        let len = if first < 0x80 {
            first as usize
        } else {
            let n = (first & 0x7F) as usize;
            if n == 0 || n > 4 || rest.len() < n || rest[0] == 0 {
                return Err(CodecError::BadLength);
            }
            let len = rest[..n].iter().fold(0usize, |acc, &b| (acc << 8) | b as usize);
            if len < 0x80 {
                return Err(CodecError::BadLength);
            }
            rest = &rest[n..];
            len
        };
        if rest.len() < len {
            return Err(CodecError::Truncated);
        }
        let (content, rest) = rest.split_at(len);
        self.buf = rest;
        Ok((tag, content))
    }

    fn expect(&mut self, expected: u8) -> Result<&'a [u8]> {
        let (found, content) = self.tlv()?;
        if found != expected {
            return Err(CodecError::UnexpectedTag { expected, found });
        }
        Ok(content)
    }

    fn integer_i32(&mut self) -> Result<i32> {
        i32::try_from(decode_signed(self.expect(TAG_INTEGER)?)?).map_err(|_| CodecError::IntegerOverflow)
    }

    fn value(&mut self) -> Result<Value> {
        let (tag, c) = self.tlv()?;
        let empty = |v: Value| if c.is_empty() { Ok(v) } else { Err(CodecError::BadLength) };
        match tag {
            TAG_INTEGER => Ok(Value::Integer(
                i32::try_from(decode_signed(c)?).map_err(|_| CodecError::IntegerOverflow)?,
            )),
            TAG_OCTET_STRING => Ok(Value::OctetString(c.to_vec())),
            TAG_NULL => empty(Value::Null),
            TAG_OID => Ok(Value::Oid(decode_oid(c)?)),
            TAG_COUNTER32 => Ok(Value::Counter32(decode_u32(c)?)),
            TAG_GAUGE32 => Ok(Value::Gauge32(decode_u32(c)?)),
            TAG_TIMETICKS => Ok(Value::TimeTicks(decode_u32(c)?)),
            TAG_NO_SUCH_OBJECT => empty(Value::NoSuchObject),
            TAG_NO_SUCH_INSTANCE => empty(Value::NoSuchInstance),
            TAG_END_OF_MIB_VIEW => empty(Value::EndOfMibView),
            t => Err(CodecError::UnsupportedValue(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oid(s: &str) -> Oid {
        s.parse().unwrap()
    }

    #[test]
    fn known_get_request_bytes() {
        let msg = Message::get_request("public", 1, &[oid("1.3.6.1.2.1.5.8.0")]);
        let expected: Vec<u8> = vec![
            0x30, 0x26, 0x02, 0x01, 0x01, 0x04, 0x06, b'p', b'u', b'b', b'l', b'i', b'c', 0xA0, 0x19, 0x02, 0x01,
            0x01, 0x02, 0x01, 0x00, 0x02, 0x01, 0x00, 0x30, 0x0E, 0x30, 0x0C, 0x06, 0x08, 0x2B, 0x06, 0x01,
            0x02, 0x01, 0x05, 0x08, 0x00, 0x05, 0x00,
        ];
        assert_eq!(msg.encode(), expected);
        assert_eq!(Message::decode(&expected).unwrap(), msg);
    }

    #[test]
    fn integer_encodings() {
        let cases: [(i64, &[u8]); 7] = [
            (0, &[0x00]),
            (127, &[0x7F]),
            (128, &[0x00, 0x80]),
            (256, &[0x01, 0x00]),
            (-1, &[0xFF]),
            (-128, &[0x80]),
            (-129, &[0xFF, 0x7F]),
        ];
        for (v, bytes) in cases {
            let mut out = Vec::new();
            put_integer(&mut out, TAG_INTEGER, v);
            assert_eq!(&out[2..], bytes, "{v}");
            assert_eq!(decode_signed(bytes).unwrap(), v);
        }
        let mut out = Vec::new();
        put_integer(&mut out, TAG_COUNTER32, u32::MAX as i64);
        assert_eq!(out, [0x41, 0x05, 0x00, 0xFF, 0xFF, 0xFF, 0xFF]);
    }

    #[test]
    fn oid_encoding_multi_byte_arc() {
        let mut out = Vec::new();
        put_oid(&mut out, &oid("1.3.6.1.4.1.311"));
        assert_eq!(out, [0x06, 0x07, 0x2B, 0x06, 0x01, 0x04, 0x01, 0x82, 0x37]);
        assert_eq!(decode_oid(&out[2..]).unwrap(), oid("1.3.6.1.4.1.311"));
    }

    #[test]
    fn long_form_length() {
        let msg = Message::get_request(&"c".repeat(300), 7, &[oid("1.3.6.1.2.1.5.1.0")]);
        let enc = msg.encode();
        assert_eq!(enc[1], 0x82);
        assert_eq!(Message::decode(&enc).unwrap(), msg);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(Message::decode(&[]), Err(CodecError::Truncated));
        assert!(Message::decode(&[0x30, 0x05, 0x02]).is_err());
        let mut enc = Message::get_request("public", 1, &[]).encode();
        enc.push(0);
        assert_eq!(Message::decode(&enc), Err(CodecError::TrailingBytes(1)));
        assert!(matches!(
            Message::decode(&[0x04, 0x00]),
            Err(CodecError::UnexpectedTag { expected: 0x30, found: 0x04 })
        ));
    }

    #[test]
    fn rejects_other_versions() {
        let mut msg = Message::get_request("public", 1, &[]);
        msg.version = 3;
        assert_eq!(Message::decode(&msg.encode()), Err(CodecError::UnsupportedVersion(3)));
    }

    #[test]
    fn oid_parse_and_display() {
        assert_eq!(oid(".1.3.6.1.2.1.5.14.0").to_string(), "1.3.6.1.2.1.5.14.0");
        assert!("1".parse::<Oid>().is_err());
        assert!("3.1".parse::<Oid>().is_err());
        assert!("1.40".parse::<Oid>().is_err());
        assert!("1.x".parse::<Oid>().is_err());
    }

    pub(crate) fn arb_oid() -> impl Strategy<Value = Oid> {
        (0u32..3, 0u32..40, prop::collection::vec(any::<u32>(), 0..12)).prop_map(|(a, b, rest)| {
            let mut arcs = vec![a, b];
            arcs.extend(rest);
            Oid::new(arcs).unwrap()
        })
    }

    fn arb_value() -> impl Strategy<Value = Value> {
        prop_oneof![
            any::<i32>().prop_map(Value::Integer),
            prop::collection::vec(any::<u8>(), 0..300).prop_map(Value::OctetString),
            Just(Value::Null),
            arb_oid().prop_map(Value::Oid),
            any::<u32>().prop_map(Value::Counter32),
            any::<u32>().prop_map(Value::Gauge32),
            any::<u32>().prop_map(Value::TimeTicks),
            Just(Value::NoSuchObject),
            Just(Value::NoSuchInstance),
            Just(Value::EndOfMibView),
        ]
    }

    pub(crate) fn arb_message() -> impl Strategy<Value = Message> {
        (
            prop::collection::vec(any::<u8>(), 0..40),
            prop_oneof![Just(PduType::GetRequest), Just(PduType::GetNextRequest), Just(PduType::GetResponse)],
            any::<i32>(),
            any::<i32>(),
            any::<i32>(),
            prop::collection::vec((arb_oid(), arb_value()), 0..10),
        )
            .prop_map(|(community, pdu_type, request_id, error_status, error_index, vbs)| Message {
                version: SNMP_V2C,
                community,
                pdu: Pdu {
                    pdu_type,
                    request_id,
                    error_status,
                    error_index,
                    varbinds: vbs.into_iter().map(|(oid, value)| VarBind { oid, value }).collect(),
                },
            })
    }

    proptest! {
        #[test]
        fn decode_encode_identity(msg in arb_message()) {
            prop_assert_eq!(Message::decode(&msg.encode()).unwrap(), msg);
        }

        #[test]
        fn decoding_arbitrary_bytes_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
            let _ = Message::decode(&bytes);
        }

        #[test]
        fn reencoding_decoded_bytes_is_stable(msg in arb_message()) {
            let enc = msg.encode();
            prop_assert_eq!(Message::decode(&enc).unwrap().encode(), enc);
        }
    }
}

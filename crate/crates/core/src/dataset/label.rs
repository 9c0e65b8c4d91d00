use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const N_CLASSES: usize = 8;

/// Traffic class. The discriminant is the stable class index used for every
/// tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Normal = 0,
    IcmpEcho = 1,
    TcpSyn = 2,
    UdpFlood = 3,
    HttpFlood = 4,
    Slowloris = 5,
    Slowpost = 6,
    BruteForce = 7,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; N_CLASSES] = [
        ClassLabel::Normal,
        ClassLabel::IcmpEcho,
        ClassLabel::TcpSyn,
        ClassLabel::UdpFlood,
        ClassLabel::HttpFlood,
        ClassLabel::Slowloris,
        ClassLabel::Slowpost,
        ClassLabel::BruteForce,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<ClassLabel> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Normal => "Normal",
            ClassLabel::IcmpEcho => "IcmpEcho",
            ClassLabel::TcpSyn => "TcpSyn",
            ClassLabel::UdpFlood => "UdpFlood",
            ClassLabel::HttpFlood => "HttpFlood",
            ClassLabel::Slowloris => "Slowloris",
            ClassLabel::Slowpost => "Slowpost",
            ClassLabel::BruteForce => "BruteForce",
        }
    }

    /// Human-readable name for reports.
    pub fn display_name(self) -> &'static str {
        match self {
            ClassLabel::Normal => "Normal",
            ClassLabel::IcmpEcho => "ICMP-Echo Attack",
            ClassLabel::TcpSyn => "TCP-SYN Attack",
            ClassLabel::UdpFlood => "UDP Flood Attack",
            ClassLabel::HttpFlood => "HTTP Flood Attack",
            ClassLabel::Slowloris => "Slowloris Attack",
            ClassLabel::Slowpost => "Slowpost Attack",
            ClassLabel::BruteForce => "Brute Force Attack",
        }
    }

    /// Parses canonical names case-insensitively, plus the display strings and
    /// common short forms in CSV exports ("icmp-echo", "httpFlood",
    /// "bruteForce", ...).
    pub fn parse(s: &str) -> Option<ClassLabel> {
        let key = alias_key(s);
        let key = key.strip_suffix("attack").unwrap_or(&key);
        let label = match key {
            "normal" => ClassLabel::Normal,
            "icmpecho" => ClassLabel::IcmpEcho,
            "tcpsyn" => ClassLabel::TcpSyn,
            "udpflood" => ClassLabel::UdpFlood,
            "httpflood" => ClassLabel::HttpFlood,
            "slowloris" => ClassLabel::Slowloris,
            "slowpost" => ClassLabel::Slowpost,
            "bruteforce" => ClassLabel::BruteForce,
            _ => return None,
        };
        Some(label)
    }
}

fn alias_key(s: &str) -> String {
    s.trim()
        .trim_matches('"')
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassLabel::parse(s).ok_or_else(|| Error::invalid(format!("unknown class label {s:?}")))
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ClassLabel::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown class label {s:?}")))
    }
}

/// Per-class record counts, indexed by [`ClassLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts(pub [usize; N_CLASSES]);

impl ClassCounts {
    pub fn get(&self, label: ClassLabel) -> usize {
        self.0[label.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassLabel, usize)> + '_ {
        ClassLabel::ALL.iter().map(move |&l| (l, self.0[l.index()]))
    }

    /// Labels with a non-zero count, in index order.
    pub fn present(&self) -> Vec<ClassLabel> {
        self.iter().filter(|(_, n)| *n > 0).map(|(l, _)| l).collect()
    }

    /// Most frequent class; ties go to the lower index. `None` when empty.
    pub fn majority(&self) -> Option<ClassLabel> {
        let mut best: Option<(ClassLabel, usize)> = None;
        for (label, n) in self.iter() {
            if n > 0 && best.is_none_or(|(_, m)| n > m) {
                best = Some((label, n));
            }
        }
        best.map(|(l, _)| l)
    }
}

//! Gaussian channel parameterization and per-phase mutual-information tables.
//!
//! All nodes transmit with the same power `P` in every phase, the noise is unit
//! power complex AWGN and links are reciprocal, so one power gain per node pair
//! (`G_ab`, `G_ar`, `G_br`) describes a channel realization. Rates are in bits
//! per channel use.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Protocol;

pub fn db_to_linear(x_db: f64) -> Result<f64> {
    if !x_db.is_finite() {
        return Err(Error::invalid("x_db", format!("must be finite, got {x_db}")));
    }
    Ok(10f64.powf(x_db / 10.0))
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid("x", format!("must be finite and > 0, got {x}")));
    }
    Ok(10.0 * x.log10())
}

/// `C(x) = log2(1 + x)`, the capacity of a unit-noise AWGN link at SNR `x`.
pub fn capacity_c(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::invalid("x", format!("SNR must be finite and >= 0, got {x}")));
    }
    Ok(x.ln_1p() / std::f64::consts::LN_2)
}

/// Linear power gains of one channel realization plus the common transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    g_ab: f64,
    g_ar: f64,
    g_br: f64,
    power: f64,
}

impl ChannelGains {
    pub fn new(g_ab: f64, g_ar: f64, g_br: f64, power: f64) -> Result<Self> {
        for (name, v) in [("g_ab", g_ab), ("g_ar", g_ar), ("g_br", g_br)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("gain must be finite and >= 0, got {v}")));
            }
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::invalid("power", format!("must be finite and > 0, got {power}")));
        }
        Ok(Self {
            g_ab,
            g_ar,
            g_br,
            power,
        })
    }

    /// Builds gains from decibel quantities: power `P` and the three link gains.
    pub fn from_db(p_db: f64, g_ab_db: f64, g_ar_db: f64, g_br_db: f64) -> Result<Self> {
        let lin =
            |name: &str, v: f64| db_to_linear(v).map_err(|_| Error::invalid(name, format!("must be finite, got {v}")));
        Self::new(
            lin("g_ab_db", g_ab_db)?,
            lin("g_ar_db", g_ar_db)?,
            lin("g_br_db", g_br_db)?,
            lin("p_db", p_db)?,
        )
    }

    pub fn g_ab(&self) -> f64 {
        self.g_ab
    }

    pub fn g_ar(&self) -> f64 {
        self.g_ar
    }

    pub fn g_br(&self) -> f64 {
        self.g_br
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Whether `G_ab <= G_ar <= G_br`, the regime where the relay sits between
    /// the terminals and is closer to `b`. Informational only.
    pub fn is_ordered(&self) -> bool {
        self.g_ab <= self.g_ar && self.g_ar <= self.g_br
    }
}

/// A mutual-information term appearing in a protocol's rate constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    /// `I(X_a; Y_r)` while `b` is silent.
    UplinkA,
    /// `I(X_b; Y_r)` while `a` is silent.
    UplinkB,
    /// `I(X_a; Y_r | X_b)` with both terminals transmitting.
    MacA,
    /// `I(X_b; Y_r | X_a)` with both terminals transmitting.
    MacB,
    /// `I(X_a, X_b; Y_r)`.
    MacSum,
    /// `I(X_r; Y_a)`, relay broadcast heard at `a`.
    DownlinkA,
    /// `I(X_r; Y_b)`, relay broadcast heard at `b`.
    DownlinkB,
    /// `I(X_a; Y_b)` while `a` transmits alone.
    DirectAB,
    /// `I(X_b; Y_a)` while `b` transmits alone.
    DirectBA,
    /// `I(X_a; Y_r, Y_b)`: joint reception of `a` at relay and `b`.
    JointA,
    /// `I(X_b; Y_r, Y_a)`.
    JointB,
}

impl Link {
    pub fn name(self) -> &'static str {
        match self {
            Link::UplinkA => "uplink_a",
            Link::UplinkB => "uplink_b",
            Link::MacA => "mac_a",
            Link::MacB => "mac_b",
            Link::MacSum => "mac_sum",
            Link::DownlinkA => "downlink_a",
            Link::DownlinkB => "downlink_b",
            Link::DirectAB => "direct_ab",
            Link::DirectBA => "direct_ba",
            Link::JointA => "joint_a",
            Link::JointB => "joint_b",
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-phase mutual-information constants for one protocol, keyed by
/// `(phase, link)` with phases numbered from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MiTable {
    protocol: Protocol,
    entries: BTreeMap<(u8, Link), f64>,
}

impl MiTable {
    /// Validates that the entries are exactly the terms `protocol` needs and
    /// that each is finite and nonnegative.
    pub fn new(protocol: Protocol, entries: BTreeMap<(u8, Link), f64>) -> Result<Self> {
        let required = protocol.mi_terms();
        for key in required {
            match entries.get(key) {
                None => {
                    return Err(Error::invalid(
                        "mi_table",
                        format!("missing phase {} term {} for {protocol}", key.0, key.1),
                    ))
                }
                Some(v) if !(v.is_finite() && *v >= 0.0) => {
                    return Err(Error::invalid(
                        "mi_table",
                        format!("phase {} term {} must be finite and >= 0, got {v}", key.0, key.1),
                    ))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = entries.keys().find(|k| !required.contains(k)) {
            return Err(Error::invalid(
                "mi_table",
                format!("phase {} term {} is not used by {protocol}", extra.0, extra.1),
            ));
        }
        Ok(Self { protocol, entries })
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    /// Value of a term. Panics if the term is not part of this protocol's table.
    pub fn get(&self, phase: u8, link: Link) -> f64 {
        match self.entries.get(&(phase, link)) {
            Some(v) => *v,
            None => panic!("{} has no phase {phase} term {link}", self.protocol),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u8, Link), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}

/// Evaluates every term of `protocol` for independent complex Gaussian inputs
/// at power `P`, unit noise and no time sharing.
///
/// Point-to-point links give `C(P G)`, the two-user MAC at the relay gives the
/// usual individual and sum terms, and joint reception at two listeners adds
/// their received powers.
pub fn gaussian_mi_table(gains: &ChannelGains, protocol: Protocol) -> MiTable {
    let p = gains.power;
    let c = |snr: f64| capacity_c(snr).expect("gains are validated nonnegative");
    let value = |link: Link| match link {
        Link::UplinkA | Link::MacA | Link::DownlinkA => c(p * gains.g_ar),
        Link::UplinkB | Link::MacB | Link::DownlinkB => c(p * gains.g_br),
        Link::MacSum => c(p * (gains.g_ar + gains.g_br)),
        Link::DirectAB | Link::DirectBA => c(p * gains.g_ab),
        Link::JointA => c(p * (gains.g_ar + gains.g_ab)),
        Link::JointB => c(p * (gains.g_br + gains.g_ab)),
    };
    let entries = protocol
        .mi_terms()
        .iter()
        .map(|&(phase, link)| ((phase, link), value(link)))
        .collect();
    MiTable { protocol, entries }
}

//! Rate constraints of the four relaying protocols as linear inequalities in
//! the phase durations and the two rates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{Link, MiTable};
use crate::error::{Error, Result};
use crate::region::{HalfPlane, RateRegion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Direct transmission: `a -> b`, then `b -> a`.
    Dt,
    /// Multiple access then relay broadcast.
    Mabc,
    /// `a` alone, `b` alone, then relay broadcast.
    Tdbc,
    /// `a` alone, `b` alone, both together, then relay broadcast.
    Hbc,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::Dt, Protocol::Mabc, Protocol::Tdbc, Protocol::Hbc];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Dt => "dt",
            Protocol::Mabc => "mabc",
            Protocol::Tdbc => "tdbc",
            Protocol::Hbc => "hbc",
        }
    }

    pub fn phases(self) -> usize {
        match self {
            Protocol::Dt | Protocol::Mabc => 2,
            Protocol::Tdbc => 3,
            Protocol::Hbc => 4,
        }
    }

    /// Every `(phase, link)` mutual-information term used by this protocol's
    /// bounds.
    pub fn mi_terms(self) -> &'static [(u8, Link)] {
        use Link::*;
        match self {
            Protocol::Dt => &[(1, DirectAB), (2, DirectBA)],
            Protocol::Mabc => &[(1, MacA), (1, MacB), (1, MacSum), (2, DownlinkA), (2, DownlinkB)],
            Protocol::Tdbc => &[
                (1, UplinkA),
                (1, DirectAB),
                (1, JointA),
                (2, UplinkB),
                (2, DirectBA),
                (2, JointB),
                (3, DownlinkA),
                (3, DownlinkB),
            ],
            Protocol::Hbc => &[
                (1, UplinkA),
                (1, DirectAB),
                (2, UplinkB),
                (2, DirectBA),
                (3, MacA),
                (3, MacB),
                (3, MacSum),
                (4, DownlinkA),
                (4, DownlinkB),
            ],
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dt" => Ok(Protocol::Dt),
            "mabc" => Ok(Protocol::Mabc),
            "tdbc" => Ok(Protocol::Tdbc),
            "hbc" => Ok(Protocol::Hbc),
            _ => Err(Error::invalid(
                "protocol",
                format!("unknown protocol {s:?} (dt|mabc|tdbc|hbc)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Achievable region (the exact region for DT and MABC).
    Inner,
    /// Cut-set outer bound.
    Outer,
    /// Outer bound without the constraint that the relay decodes both messages.
    OuterRelayFree,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Inner => "inner",
            BoundKind::Outer => "outer",
            BoundKind::OuterRelayFree => "outer_relay_free",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "inner" | "exact" => Ok(BoundKind::Inner),
            "outer" => Ok(BoundKind::Outer),
            "outer_relay_free" => Ok(BoundKind::OuterRelayFree),
            _ => Err(Error::invalid(
                "bound",
                format!("unknown bound {s:?} (inner|exact|outer|outer-relay-free)"),
            )),
        }
    }
}

/// Relative phase durations of one protocol: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    protocol: Protocol,
    durations: Vec<f64>,
}

impl PhaseSchedule {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(protocol: Protocol, durations: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(protocol, durations, Self::SUM_TOL)
    }

    /// Like [`PhaseSchedule::new`] but with a caller-chosen tolerance on the
    /// sum (user input is typically rounded).
    pub fn with_tolerance(protocol: Protocol, durations: Vec<f64>, tol: f64) -> Result<Self> {
        if durations.len() != protocol.phases() {
            return Err(Error::invalid(
                "delta",
                format!(
                    "{protocol} has {} phases, got {} durations",
                    protocol.phases(),
                    durations.len()
                ),
            ));
        }
        if let Some(d) = durations.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::invalid(
                "delta",
                format!("durations must be finite and >= 0, got {d}"),
            ));
        }
        let sum: f64 = durations.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::invalid("delta", format!("durations must sum to 1, got {sum}")));
        }
        Ok(Self { protocol, durations })
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }
}

/// One inequality `rate_coefs . (R_a, R_b) + delta_coefs . Δ <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub name: &'static str,
    /// Coefficients of `Δ_1..Δ_4`; each is minus a mutual-information term.
    pub delta_coefs: [f64; 4],
    pub rate_coefs: [f64; 2],
}

impl Constraint {
    /// Right-hand side once the schedule is fixed.
    pub fn capacity_at(&self, durations: &[f64]) -> f64 {
        -durations.iter().zip(&self.delta_coefs).map(|(d, c)| d * c).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSet {
    pub protocol: Protocol,
    pub bound: BoundKind,
    pub constraints: Vec<Constraint>,
}

struct Builder<'a> {
    mi: &'a MiTable,
    out: Vec<Constraint>,
}

impl Builder<'_> {
    fn push(&mut self, name: &'static str, rate: [f64; 2], terms: &[(u8, Link)]) {
        let mut delta_coefs = [0.0; 4];
        for &(phase, link) in terms {
            delta_coefs[phase as usize - 1] -= self.mi.get(phase, link);
        }
        self.out.push(Constraint {
            name,
            delta_coefs,
            rate_coefs: rate,
        });
    }
}

const RA: [f64; 2] = [1.0, 0.0];
const RB: [f64; 2] = [0.0, 1.0];
const SUM: [f64; 2] = [1.0, 1.0];

/// Instantiates a protocol's inequality template with the constants in `mi`.
/// Each `R <= min{x, y}` clause becomes two inequalities.
pub fn build_constraints(protocol: Protocol, bound: BoundKind, mi: &MiTable) -> Result<ConstraintSet> {
    use Link::*;
    if mi.protocol() != protocol {
        return Err(Error::invalid(
            "mi_table",
            format!("table was built for {}, not {protocol}", mi.protocol()),
        ));
    }
    let unsupported = |reason: &str| Error::UnsupportedBound {
        protocol: protocol.to_string(),
        bound: bound.to_string(),
        reason: reason.to_string(),
    };
    let mut b = Builder { mi, out: Vec::new() };
    match (protocol, bound) {
        (Protocol::Dt, BoundKind::Inner) => {
            b.push("b decodes a over the direct link", RA, &[(1, DirectAB)]);
            b.push("a decodes b over the direct link", RB, &[(2, DirectBA)]);
        }
        (Protocol::Dt, _) => {
            return Err(unsupported(
                "the direct-transmission region is exact; only the inner bound is defined",
            ))
        }
        (Protocol::Mabc, _) => {
            b.push("relay decodes a", RA, &[(1, MacA)]);
            b.push("b decodes relay broadcast", RA, &[(2, DownlinkB)]);
            b.push("relay decodes b", RB, &[(1, MacB)]);
            b.push("a decodes relay broadcast", RB, &[(2, DownlinkA)]);
            if bound != BoundKind::OuterRelayFree {
                b.push("relay decodes both", SUM, &[(1, MacSum)]);
            }
        }
        (Protocol::Tdbc, BoundKind::Inner) => {
            b.push("relay decodes a", RA, &[(1, UplinkA)]);
            b.push(
                "b decodes a with side information",
                RA,
                &[(1, DirectAB), (3, DownlinkB)],
            );
            b.push("relay decodes b", RB, &[(2, UplinkB)]);
            b.push(
                "a decodes b with side information",
                RB,
                &[(2, DirectBA), (3, DownlinkA)],
            );
        }
        (Protocol::Tdbc, _) => {
            b.push("cut around a", RA, &[(1, JointA)]);
            b.push(
                "b decodes a with side information",
                RA,
                &[(1, DirectAB), (3, DownlinkB)],
            );
            b.push("cut around b", RB, &[(2, JointB)]);
            b.push(
                "a decodes b with side information",
                RB,
                &[(2, DirectBA), (3, DownlinkA)],
            );
            if bound == BoundKind::Outer {
                b.push("relay decodes both", SUM, &[(1, UplinkA), (2, UplinkB)]);
            }
        }
        (Protocol::Hbc, BoundKind::Inner) => {
            b.push("relay decodes a", RA, &[(1, UplinkA), (3, MacA)]);
            b.push(
                "b decodes a with side information",
                RA,
                &[(1, DirectAB), (4, DownlinkB)],
            );
            b.push("relay decodes b", RB, &[(2, UplinkB), (3, MacB)]);
            b.push(
                "a decodes b with side information",
                RB,
                &[(2, DirectBA), (4, DownlinkA)],
            );
            b.push("relay decodes both", SUM, &[(1, UplinkA), (2, UplinkB), (3, MacSum)]);
        }
        (Protocol::Hbc, _) => {
            return Err(unsupported(
                "the outer bound needs correlated inputs in the joint phase and conditional \
                 terms for which jointly Gaussian inputs are not known to be optimal, so it \
                 is not evaluated",
            ))
        }
    }
    Ok(ConstraintSet {
        protocol,
        bound,
        constraints: b.out,
    })
}

/// Rate region for a fixed schedule.
pub fn fixed_delta_region(
    protocol: Protocol,
    bound: BoundKind,
    mi: &MiTable,
    sched: &PhaseSchedule,
) -> Result<RateRegion> {
    if sched.protocol() != protocol {
        return Err(Error::invalid(
            "delta",
            format!("schedule is for {}, not {protocol}", sched.protocol()),
        ));
    }
    let set = build_constraints(protocol, bound, mi)?;
    let planes = set
        .constraints
        .iter()
        .map(|c| HalfPlane::new(c.rate_coefs[0], c.rate_coefs[1], c.capacity_at(sched.durations())))
        .collect::<Result<Vec<_>>>()?;
    RateRegion::from_halfplanes(&planes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gaussian_mi_table, ChannelGains};
    use crate::region::RatePair;

    fn symmetric(protocol: Protocol) -> MiTable {
        gaussian_mi_table(&ChannelGains::new(1.0, 1.0, 1.0, 1.0).unwrap(), protocol)
    }

    #[test]
    fn schedule_validation() {
        assert!(PhaseSchedule::new(Protocol::Mabc, vec![0.5, 0.5]).is_ok());
        assert!(PhaseSchedule::new(Protocol::Mabc, vec![0.5, 0.5, 0.0]).is_err());
        assert!(PhaseSchedule::new(Protocol::Tdbc, vec![0.5, 0.6, -0.1]).is_err());
        assert!(PhaseSchedule::new(Protocol::Hbc, vec![0.25, 0.25, 0.25, 0.2]).is_err());
        assert!(PhaseSchedule::with_tolerance(Protocol::Tdbc, vec![0.333, 0.333, 0.333], 1e-2).is_ok());
    }

    #[test]
    fn parse_names() {
        assert_eq!("HBC".parse::<Protocol>().unwrap(), Protocol::Hbc);
        assert!("xyz".parse::<Protocol>().is_err());
        assert_eq!(
            "outer-relay-free".parse::<BoundKind>().unwrap(),
            BoundKind::OuterRelayFree
        );
        assert_eq!("exact".parse::<BoundKind>().unwrap(), BoundKind::Inner);
    }

    #[test]
    fn mabc_template() {
        let set = build_constraints(Protocol::Mabc, BoundKind::Inner, &symmetric(Protocol::Mabc)).unwrap();
        assert_eq!(set.constraints.len(), 5);
        let mut coefs: Vec<f64> = set
            .constraints
            .iter()
            .map(|c| -c.delta_coefs.iter().sum::<f64>())
            .collect();
        coefs.sort_by(f64::total_cmp);
        assert_eq!(&coefs[..4], &[1.0, 1.0, 1.0, 1.0]);
        assert!((coefs[4] - 1.584_962_500_721_156).abs() < 1e-12);

        let outer = build_constraints(Protocol::Mabc, BoundKind::Outer, &symmetric(Protocol::Mabc)).unwrap();
        assert_eq!(outer.constraints, set.constraints);
        let free = build_constraints(Protocol::Mabc, BoundKind::OuterRelayFree, &symmetric(Protocol::Mabc)).unwrap();
        assert_eq!(free.constraints.len(), 4);
        assert!(free.constraints.iter().all(|c| c.rate_coefs != SUM));
    }

    #[test]
    fn tdbc_without_direct_link_is_two_hop() {
        let t = gaussian_mi_table(&ChannelGains::new(0.0, 1.0, 3.0, 1.0).unwrap(), Protocol::Tdbc);
        let set = build_constraints(Protocol::Tdbc, BoundKind::Inner, &t).unwrap();
        let ra: Vec<_> = set.constraints.iter().filter(|c| c.rate_coefs == RA).collect();
        assert_eq!(ra.len(), 2);
        assert_eq!(ra[0].delta_coefs, [-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(ra[1].delta_coefs, [0.0, 0.0, -2.0, 0.0]);
    }

    #[test]
    fn unsupported_bounds() {
        for bound in [BoundKind::Outer, BoundKind::OuterRelayFree] {
            let err = build_constraints(Protocol::Hbc, bound, &symmetric(Protocol::Hbc)).unwrap_err();
            assert!(matches!(err, Error::UnsupportedBound { .. }));
            assert!(err.to_string().contains("jointly Gaussian"));
            let err = build_constraints(Protocol::Dt, bound, &symmetric(Protocol::Dt)).unwrap_err();
            assert!(matches!(err, Error::UnsupportedBound { .. }));
        }
        let err = build_constraints(Protocol::Tdbc, BoundKind::Inner, &symmetric(Protocol::Mabc)).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument { .. }));
    }

    #[test]
    fn fixed_schedule_regions() {
        let sched = PhaseSchedule::new(Protocol::Mabc, vec![0.5, 0.5]).unwrap();
        let r = fixed_delta_region(Protocol::Mabc, BoundKind::Inner, &symmetric(Protocol::Mabc), &sched).unwrap();
        let c = 0.5 * 3f64.log2() - 0.5;
        let expect = [(0.0, 0.0), (0.5, 0.0), (0.5, c), (c, 0.5), (0.0, 0.5)];
        assert_eq!(r.vertices().len(), 5);
        for (p, (a, b)) in r.vertices().iter().zip(expect) {
            assert!((p.r_a - a).abs() < 1e-12 && (p.r_b - b).abs() < 1e-12);
        }

        let dt = PhaseSchedule::new(Protocol::Dt, vec![0.5, 0.5]).unwrap();
        let r = fixed_delta_region(Protocol::Dt, BoundKind::Inner, &symmetric(Protocol::Dt), &dt).unwrap();
        assert_eq!(
            r.vertices(),
            &[
                RatePair::new(0.0, 0.0),
                RatePair::new(0.5, 0.0),
                RatePair::new(0.5, 0.5),
                RatePair::new(0.0, 0.5)
            ]
        );

        assert!(fixed_delta_region(Protocol::Mabc, BoundKind::Inner, &symmetric(Protocol::Mabc), &dt).is_err());
    }

    #[test]
    fn tdbc_fixed_schedule_at_low_snr() {
        // P = 0 dB, G_ar = 0 dB, G_br = 5 dB, G_ab = -7 dB, equal thirds.
        // Worked by hand from the four inequalities:
        //   R_a <= min(C(1)/3, (C(g_ab) + C(g_br))/3) = 1/3
        //   R_b <= min(C(g_br)/3, (C(g_ab) + C(1))/3)
        let g_ab = 10f64.powf(-0.7);
        let g_br = 10f64.powf(0.5);
        let ra = (1.0f64 / 3.0).min(((1.0 + g_ab).log2() + (1.0 + g_br).log2()) / 3.0);
        let rb = ((1.0 + g_br).log2() / 3.0).min(((1.0 + g_ab).log2() + 1.0) / 3.0);
        assert!((ra - 1.0 / 3.0).abs() < 1e-15);
        assert!((rb - 0.420_821_569_046_959_2).abs() < 1e-12);

        let t = gaussian_mi_table(&ChannelGains::from_db(0.0, -7.0, 0.0, 5.0).unwrap(), Protocol::Tdbc);
        let sched = PhaseSchedule::new(Protocol::Tdbc, vec![1.0 / 3.0; 3]).unwrap();
        let r = fixed_delta_region(Protocol::Tdbc, BoundKind::Inner, &t, &sched).unwrap();
        let expect = [(0.0, 0.0), (ra, 0.0), (ra, rb), (0.0, rb)];
        assert_eq!(r.vertices().len(), 4);
        for (p, (a, b)) in r.vertices().iter().zip(expect) {
            assert!((p.r_a - a).abs() < 1e-12 && (p.r_b - b).abs() < 1e-12, "{p:?}");
        }
    }
}

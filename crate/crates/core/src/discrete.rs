//! Finite-alphabet half-duplex channels and the MABC capacity region.
//!
//! Each node's augmented alphabet is its symbol list plus the silence symbol
//! `∅`, stored at index `len()` of the alphabet. Half-duplex operation pins a
//! transmitting node's output and a listening node's input to `∅`, so each
//! phase law only needs to be given over the non-silent symbols:
//!
//! * `mac`: `W(y_r | x_a, x_b)`, both terminals transmitting.
//! * `broadcast`: `W(y_a, y_b | x_r)`, the relay transmitting.
//! * `solo_a`, `solo_b` (optional): `W(y_r, y_b | x_a)` and `W(y_r, y_a | x_b)`
//!   for phases where one terminal transmits alone; needed by DT, TDBC, HBC.

use serde::{Deserialize, Serialize};

use crate::channel::{Link, MiTable};
use crate::error::{Error, Result};
use crate::protocol::{fixed_delta_region, BoundKind, PhaseSchedule, Protocol};
use crate::region::{RatePair, RateRegion};

const STOCHASTIC_TOL: f64 = 1e-12;

/// Upper limit on `(p_a, p_b, p_r)` tuples enumerated by [`mabc_capacity_region`].
pub const MAX_GRID_TUPLES: u128 = 10_000_000;

fn xlog2x_ratio(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * (p / q).log2()
    }
}

/// Row-stochastic matrix `W(y | x)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    /// `name` labels errors, e.g. `"mac"` gives "mac row 3 sums to 0.9".
    pub fn new(name: &str, rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::invalid(name, "transition matrix must be nonempty"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(
                    name,
                    format!("row {i} has {} entries, expected {cols}", row.len()),
                ));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::invalid(name, format!("row {i} has invalid probability {v}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::invalid(name, format!("row {i} sums to {s}, not 1")));
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Sums columns of a matrix whose output is a pair `(u, v)` flattened
    /// row-major as `u * inner + v`. `keep_outer` selects which half survives.
    fn marginal(&self, inner: usize, keep_outer: bool) -> StochasticMatrix {
        let outer = self.cols / inner;
        let cols = if keep_outer { outer } else { inner };
        let mut data = vec![0.0; self.rows * cols];
        for x in 0..self.rows {
            for (k, p) in self.row(x).iter().enumerate() {
                let y = if keep_outer { k / inner } else { k % inner };
                data[x * cols + y] += p;
            }
        }
        StochasticMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }
}

fn check_distribution(name: &str, p: &[f64], size: usize) -> Result<()> {
    if p.len() != size {
        return Err(Error::invalid(
            name,
            format!("distribution has {} entries, expected {size}", p.len()),
        ));
    }
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid(name, "probabilities must be finite and >= 0"));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::invalid(name, format!("probabilities sum to {s}, not 1")));
    }
    Ok(())
}

/// `I(X; Y)` in bits for input law `px` and channel `w`.
pub fn mutual_information(px: &[f64], w: &StochasticMatrix) -> Result<f64> {
    check_distribution("px", px, w.rows())?;
    Ok(mi_unchecked(px, w))
}

fn mi_unchecked(px: &[f64], w: &StochasticMatrix) -> f64 {
    let mut py = vec![0.0; w.cols()];
    for (x, &p) in px.iter().enumerate() {
        for (y, &t) in w.row(x).iter().enumerate() {
            py[y] += p * t;
        }
    }
    let mut mi = 0.0;
    for (x, &p) in px.iter().enumerate() {
        if p > 0.0 {
            for (y, &t) in w.row(x).iter().enumerate() {
                mi += p * xlog2x_ratio(t, py[y]);
            }
        }
    }
    mi.max(0.0)
}

/// The three terms of a two-user MAC with independent inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacInformation {
    /// `I(X_a; Y | X_b)`
    pub a_given_b: f64,
    /// `I(X_b; Y | X_a)`
    pub b_given_a: f64,
    /// `I(X_a, X_b; Y)`
    pub sum: f64,
}

/// MAC terms for product inputs. `w` has one row per `(x_a, x_b)`, `x_a` major.
pub fn mutual_information_cond(pxa: &[f64], pxb: &[f64], w: &StochasticMatrix) -> Result<MacInformation> {
    if pxa.len() * pxb.len() != w.rows() {
        return Err(Error::invalid(
            "mac",
            format!(
                "{} rows cannot be indexed by {}x{} inputs",
                w.rows(),
                pxa.len(),
                pxb.len()
            ),
        ));
    }
    check_distribution("pxa", pxa, pxa.len())?;
    check_distribution("pxb", pxb, pxb.len())?;
    Ok(mac_unchecked(pxa, pxb, w))
}

fn mac_unchecked(pxa: &[f64], pxb: &[f64], w: &StochasticMatrix) -> MacInformation {
    let nb = pxb.len();
    let ny = w.cols();
    let joint: Vec<f64> = pxa.iter().flat_map(|a| pxb.iter().map(move |b| a * b)).collect();
    let sum = mi_unchecked(&joint, w);

    // I(X_a; Y | X_b) = Σ_xb p(xb) I(X_a; Y | X_b = xb)
    let conditional = |given_b: bool| {
        let (outer, inner) = if given_b { (pxb, pxa) } else { (pxa, pxb) };
        let mut total = 0.0;
        for (o, &po) in outer.iter().enumerate() {
            if po <= 0.0 {
                continue;
            }
            let mut py = vec![0.0; ny];
            for (i, &pi) in inner.iter().enumerate() {
                let row = if given_b { w.row(i * nb + o) } else { w.row(o * nb + i) };
                for (y, &t) in row.iter().enumerate() {
                    py[y] += pi * t;
                }
            }
            for (i, &pi) in inner.iter().enumerate() {
                if pi <= 0.0 {
                    continue;
                }
                let row = if given_b { w.row(i * nb + o) } else { w.row(o * nb + i) };
                for (y, &t) in row.iter().enumerate() {
                    total += po * pi * xlog2x_ratio(t, py[y]);
                }
            }
        }
        total.max(0.0)
    };
    MacInformation {
        a_given_b: conditional(true),
        b_given_a: conditional(false),
        sum,
    }
}

/// Symbol names of every node's non-silent alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alphabets {
    pub x_a: Vec<String>,
    pub x_b: Vec<String>,
    pub x_r: Vec<String>,
    pub y_r: Vec<String>,
    pub y_a: Vec<String>,
    pub y_b: Vec<String>,
}

/// On-disk form of a [`DiscreteChannel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteChannelSpec {
    /// Name of the silence symbol; reserved, must not appear in any alphabet.
    #[serde(default = "default_silence")]
    pub silence: String,
    pub alphabets: Alphabets,
    /// Rows `(x_a, x_b)` row-major with `x_a` major; columns `y_r`.
    pub mac: Vec<Vec<f64>>,
    /// Rows `x_r`; columns `(y_a, y_b)` row-major with `y_a` major.
    pub broadcast: Vec<Vec<f64>>,
    /// Rows `x_a`; columns `(y_r, y_b)` row-major with `y_r` major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solo_a: Option<Vec<Vec<f64>>>,
    /// Rows `x_b`; columns `(y_r, y_a)` row-major with `y_r` major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solo_b: Option<Vec<Vec<f64>>>,
}

fn default_silence() -> String {
    "∅".to_string()
}

/// A discrete memoryless half-duplex relay channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    silence: String,
    alphabets: Alphabets,
    mac: StochasticMatrix,
    broadcast: StochasticMatrix,
    solo_a: Option<StochasticMatrix>,
    solo_b: Option<StochasticMatrix>,
}

impl DiscreteChannel {
    pub fn from_spec(spec: DiscreteChannelSpec) -> Result<Self> {
        let a = &spec.alphabets;
        for (name, alpha) in [
            ("x_a", &a.x_a),
            ("x_b", &a.x_b),
            ("x_r", &a.x_r),
            ("y_r", &a.y_r),
            ("y_a", &a.y_a),
            ("y_b", &a.y_b),
        ] {
            if alpha.is_empty() {
                return Err(Error::invalid(name, "alphabet must be nonempty"));
            }
            if alpha.contains(&spec.silence) {
                return Err(Error::invalid(
                    name,
                    format!("silence symbol {:?} is reserved and implicit", spec.silence),
                ));
            }
        }
        let shape = |name: &str, m: &StochasticMatrix, rows: usize, cols: usize| {
            if m.rows() != rows || m.cols() != cols {
                Err(Error::invalid(
                    name,
                    format!(
                        "expected {rows}x{cols} transition matrix, got {}x{}",
                        m.rows(),
                        m.cols()
                    ),
                ))
            } else {
                Ok(())
            }
        };
        let mac = StochasticMatrix::new("mac", spec.mac)?;
        shape("mac", &mac, a.x_a.len() * a.x_b.len(), a.y_r.len())?;
        let broadcast = StochasticMatrix::new("broadcast", spec.broadcast)?;
        shape("broadcast", &broadcast, a.x_r.len(), a.y_a.len() * a.y_b.len())?;
        let solo_a = spec
            .solo_a
            .map(|rows| StochasticMatrix::new("solo_a", rows))
            .transpose()?;
        if let Some(m) = &solo_a {
            shape("solo_a", m, a.x_a.len(), a.y_r.len() * a.y_b.len())?;
        }
        let solo_b = spec
            .solo_b
            .map(|rows| StochasticMatrix::new("solo_b", rows))
            .transpose()?;
        if let Some(m) = &solo_b {
            shape("solo_b", m, a.x_b.len(), a.y_r.len() * a.y_a.len())?;
        }
        Ok(Self {
            silence: spec.silence,
            alphabets: spec.alphabets,
            mac,
            broadcast,
            solo_a,
            solo_b,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DiscreteChannelSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn silence_symbol(&self) -> &str {
        &self.silence
    }

    /// Index of `∅` in a node's augmented alphabet of `alphabet_len` symbols.
    pub fn silence_index(alphabet_len: usize) -> usize {
        alphabet_len
    }

    pub fn mac(&self) -> &StochasticMatrix {
        &self.mac
    }

    pub fn broadcast(&self) -> &StochasticMatrix {
        &self.broadcast
    }

    /// `W(y_a | x_r)` and `W(y_b | x_r)`.
    fn downlinks(&self) -> (StochasticMatrix, StochasticMatrix) {
        let nyb = self.alphabets.y_b.len();
        (self.broadcast.marginal(nyb, true), self.broadcast.marginal(nyb, false))
    }

    fn downlink_information(&self, pxr: &[f64]) -> (f64, f64) {
        let (to_a, to_b) = self.downlinks();
        (mi_unchecked(pxr, &to_a), mi_unchecked(pxr, &to_b))
    }
}

/// Input laws for each transmitting role; which ones are needed depends on the
/// protocol.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputDistributions {
    /// `a` transmitting alone (DT, TDBC, HBC phase 1).
    pub a_alone: Option<Vec<f64>>,
    /// `b` transmitting alone (DT, TDBC, HBC phase 2).
    pub b_alone: Option<Vec<f64>>,
    /// `a` in the multiple-access phase (MABC, HBC).
    pub a_mac: Option<Vec<f64>>,
    /// `b` in the multiple-access phase (MABC, HBC).
    pub b_mac: Option<Vec<f64>>,
    /// The relay broadcast (MABC, TDBC, HBC).
    pub relay: Option<Vec<f64>>,
}

fn required<'a>(name: &str, p: &'a Option<Vec<f64>>, size: usize) -> Result<&'a [f64]> {
    let p = p
        .as_deref()
        .ok_or_else(|| Error::invalid(name, "input distribution is required for this protocol"))?;
    check_distribution(name, p, size)?;
    Ok(p)
}

struct SoloInformation {
    to_relay: f64,
    direct: f64,
    joint: f64,
}

fn solo_information(
    law: &Option<StochasticMatrix>,
    name: &str,
    px: &[f64],
    listener: usize,
) -> Result<SoloInformation> {
    let w = law
        .as_ref()
        .ok_or_else(|| Error::invalid(name, "channel has no law for this single-transmitter phase"))?;
    Ok(SoloInformation {
        to_relay: mi_unchecked(px, &w.marginal(listener, true)),
        direct: mi_unchecked(px, &w.marginal(listener, false)),
        joint: mi_unchecked(px, w),
    })
}

/// Mutual-information table for `protocol` on a discrete channel with the
/// given (fixed, user-chosen) input laws.
pub fn discrete_mi_table(ch: &DiscreteChannel, protocol: Protocol, inputs: &InputDistributions) -> Result<MiTable> {
    use Link::*;
    let a = &ch.alphabets;
    let mut e = std::collections::BTreeMap::new();
    let solo = |which_a: bool| -> Result<SoloInformation> {
        if which_a {
            let p = required("a_alone", &inputs.a_alone, a.x_a.len())?;
            solo_information(&ch.solo_a, "solo_a", p, a.y_b.len())
        } else {
            let p = required("b_alone", &inputs.b_alone, a.x_b.len())?;
            solo_information(&ch.solo_b, "solo_b", p, a.y_a.len())
        }
    };
    let mac = || -> Result<MacInformation> {
        let pa = required("a_mac", &inputs.a_mac, a.x_a.len())?;
        let pb = required("b_mac", &inputs.b_mac, a.x_b.len())?;
        Ok(mac_unchecked(pa, pb, &ch.mac))
    };
    let relay = || -> Result<(f64, f64)> {
        let pr = required("relay", &inputs.relay, a.x_r.len())?;
        Ok(ch.downlink_information(pr))
    };
    match protocol {
        Protocol::Dt => {
            e.insert((1, DirectAB), solo(true)?.direct);
            e.insert((2, DirectBA), solo(false)?.direct);
        }
        Protocol::Mabc => {
            let m = mac()?;
            let (da, db) = relay()?;
            e.extend([((1, MacA), m.a_given_b), ((1, MacB), m.b_given_a), ((1, MacSum), m.sum)]);
            e.extend([((2, DownlinkA), da), ((2, DownlinkB), db)]);
        }
        Protocol::Tdbc => {
            let (sa, sb) = (solo(true)?, solo(false)?);
            let (da, db) = relay()?;
            e.extend([
                ((1, UplinkA), sa.to_relay),
                ((1, DirectAB), sa.direct),
                ((1, JointA), sa.joint),
            ]);
            e.extend([
                ((2, UplinkB), sb.to_relay),
                ((2, DirectBA), sb.direct),
                ((2, JointB), sb.joint),
            ]);
            e.extend([((3, DownlinkA), da), ((3, DownlinkB), db)]);
        }
        Protocol::Hbc => {
            let (sa, sb) = (solo(true)?, solo(false)?);
            let m = mac()?;
            let (da, db) = relay()?;
            e.extend([((1, UplinkA), sa.to_relay), ((1, DirectAB), sa.direct)]);
            e.extend([((2, UplinkB), sb.to_relay), ((2, DirectBA), sb.direct)]);
            e.extend([((3, MacA), m.a_given_b), ((3, MacB), m.b_given_a), ((3, MacSum), m.sum)]);
            e.extend([((4, DownlinkA), da), ((4, DownlinkB), db)]);
        }
    }
    MiTable::new(protocol, e)
}

/// The MABC pentagon for one choice of input laws and a fixed schedule.
pub fn mabc_fixed_inputs_region(
    ch: &DiscreteChannel,
    pxa: &[f64],
    pxb: &[f64],
    pxr: &[f64],
    sched: &PhaseSchedule,
) -> Result<RateRegion> {
    let inputs = InputDistributions {
        a_mac: Some(pxa.to_vec()),
        b_mac: Some(pxb.to_vec()),
        relay: Some(pxr.to_vec()),
        ..Default::default()
    };
    let table = discrete_mi_table(ch, Protocol::Mabc, &inputs)?;
    fixed_delta_region(Protocol::Mabc, BoundKind::Inner, &table, sched)
}

/// Probability vectors whose entries are multiples of `1 / resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputGrid {
    resolution: u32,
}

impl InputGrid {
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::invalid("grid", "resolution must be >= 1"));
        }
        Ok(Self { resolution })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Number of grid distributions over `size` symbols: `C(K + size - 1, size - 1)`.
    pub fn count(&self, size: usize) -> u128 {
        let k = self.resolution as u128;
        let mut c: u128 = 1;
        for i in 1..size as u128 {
            c = c * (k + i) / i;
        }
        c
    }

    /// All grid distributions over `size` symbols, in lexicographic order of
    /// their integer compositions.
    pub fn distributions(&self, size: usize) -> Vec<Vec<f64>> {
        let k = self.resolution;
        let mut out = Vec::new();
        let mut counts = vec![0u32; size];
        fn rec(pos: usize, left: u32, counts: &mut Vec<u32>, k: u32, out: &mut Vec<Vec<f64>>) {
            if pos + 1 == counts.len() {
                counts[pos] = left;
                out.push(counts.iter().map(|&c| c as f64 / k as f64).collect());
                return;
            }
            for c in (0..=left).rev() {
                counts[pos] = c;
                rec(pos + 1, left - c, counts, k, out);
            }
        }
        if size > 0 {
            rec(0, k, &mut counts, k, &mut out);
        }
        out
    }
}

/// Drops triples dominated componentwise by another triple.
fn pareto<const N: usize>(mut v: Vec<[f64; N]>) -> Vec<[f64; N]> {
    v.sort_by(|p, q| q[0].total_cmp(&p[0]));
    let mut kept: Vec<[f64; N]> = Vec::new();
    for p in v {
        let dominated = kept.iter().any(|q| (0..N).all(|i| q[i] >= p[i]));
        if !dominated {
            kept.push(p);
        }
    }
    kept
}

/// MABC capacity region for a fixed schedule: the convex hull (time sharing)
/// of the pentagons of every grid choice of product inputs.
pub fn mabc_capacity_region(ch: &DiscreteChannel, sched: &PhaseSchedule, grid: &InputGrid) -> Result<RateRegion> {
    if sched.protocol() != Protocol::Mabc {
        return Err(Error::invalid(
            "delta",
            format!("schedule is for {}, not mabc", sched.protocol()),
        ));
    }
    let a = &ch.alphabets;
    let count = grid.count(a.x_a.len()) * grid.count(a.x_b.len()) * grid.count(a.x_r.len());
    if count > MAX_GRID_TUPLES {
        return Err(Error::ResourceLimit {
            count,
            limit: MAX_GRID_TUPLES,
        });
    }
    let (d1, d2) = (sched.durations()[0], sched.durations()[1]);

    let da = grid.distributions(a.x_a.len());
    let db = grid.distributions(a.x_b.len());
    let uplink: Vec<[f64; 3]> = da
        .iter()
        .flat_map(|pa| db.iter().map(move |pb| (pa, pb)))
        .map(|(pa, pb)| {
            let m = mac_unchecked(pa, pb, &ch.mac);
            [d1 * m.a_given_b, d1 * m.b_given_a, d1 * m.sum]
        })
        .collect();
    let downlink: Vec<[f64; 2]> = grid
        .distributions(a.x_r.len())
        .iter()
        .map(|pr| {
            let (to_a, to_b) = ch.downlink_information(pr);
            // R_a is limited by what b hears, R_b by what a hears
            [d2 * to_b, d2 * to_a]
        })
        .collect();
    // Each pentagon is monotone in every term, so dominated terms add nothing.
    let uplink = pareto(uplink);
    let downlink = pareto(downlink);

    let mut points = vec![RatePair::ORIGIN];
    for u in &uplink {
        for d in &downlink {
            points.extend(pentagon(u[0].min(d[0]), u[1].min(d[1]), u[2]));
        }
        if points.len() > 4096 {
            points = RateRegion::hull_of(points).vertices().to_vec();
        }
    }
    Ok(RateRegion::hull_of(points))
}

/// Corners of `{R_a <= ra, R_b <= rb, R_a + R_b <= sum}` away from the origin.
fn pentagon(ra: f64, rb: f64, sum: f64) -> [RatePair; 4] {
    let a = ra.min(sum);
    let b = rb.min(sum);
    [
        RatePair::new(a, 0.0),
        RatePair::new(a, rb.min(sum - a).max(0.0)),
        RatePair::new(ra.min(sum - b).max(0.0), b),
        RatePair::new(0.0, b),
    ]
}

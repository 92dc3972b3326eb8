//! Path loss with quasi-static fading, parameter sweeps and Monte Carlo
//! averages of optimized sum rates.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_mi_table, ChannelGains};
use crate::error::{Error, Result};
use crate::lp::optimize_schedule;
use crate::protocol::{BoundKind, Protocol};

/// Generator used for fading draws; echoed in every Monte Carlo report.
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64, stream = sample index)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingModel {
    /// Path loss only.
    None,
    /// Unit-mean exponential power gain on each link.
    Rayleigh,
}

impl FadingModel {
    pub fn name(self) -> &'static str {
        match self {
            FadingModel::None => "none",
            FadingModel::Rayleigh => "rayleigh",
        }
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(FadingModel::None),
            "rayleigh" => Ok(FadingModel::Rayleigh),
            _ => Err(Error::invalid(
                "model",
                format!("unknown fading model {s:?}, expected none|rayleigh"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingConfig {
    pub alpha: f64,
    pub d_ab: f64,
    pub d_ar: f64,
    pub d_br: f64,
    pub model: FadingModel,
    /// Linear transmit power per phase.
    pub power: f64,
    pub samples: u64,
    pub seed: u64,
}

impl FadingConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("d_ab", self.d_ab),
            ("d_ar", self.d_ar),
            ("d_br", self.d_br),
            ("power", self.power),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "must be >= 1"));
        }
        Ok(())
    }
}

/// Gains of realization `index`. Each index owns its own ChaCha20 stream, so
/// results do not depend on evaluation order. Draw order is ab, ar, br.
pub fn sample_gains(cfg: &FadingConfig, index: u64) -> Result<ChannelGains> {
    cfg.validate()?;
    let mut fades = [1.0f64; 3];
    if cfg.model == FadingModel::Rayleigh {
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index);
        for f in &mut fades {
            *f = Exp1.sample(&mut rng);
        }
    }
    let loss = |d: f64| d.powf(-cfg.alpha);
    ChannelGains::new(
        loss(cfg.d_ab) * fades[0],
        loss(cfg.d_ar) * fades[1],
        loss(cfg.d_br) * fades[2],
        cfg.power,
    )
}

/// Optimized sum rate (`mu = 1/2`) and its schedule.
fn best_sum_rate(gains: &ChannelGains, protocol: Protocol, bound: BoundKind) -> Result<(f64, Vec<f64>)> {
    let table = gaussian_mi_table(gains, protocol);
    let opt = optimize_schedule(protocol, bound, &table, 0.5)?;
    Ok((opt.sum_rate(), opt.schedule.durations().to_vec()))
}

#[cfg(feature = "parallel")]
fn map_indexed<T: Send>(n: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indexed<T>(n: u64, f: impl Fn(u64) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "p_db")]
    PDb,
    #[serde(rename = "g_ab_db")]
    GabDb,
    #[serde(rename = "g_ar_db")]
    GarDb,
    #[serde(rename = "g_br_db")]
    GbrDb,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::PDb => "p_db",
            SweepParam::GabDb => "g_ab_db",
            SweepParam::GarDb => "g_ar_db",
            SweepParam::GbrDb => "g_br_db",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "p_db" | "p" => Ok(SweepParam::PDb),
            "g_ab_db" | "g_ab" => Ok(SweepParam::GabDb),
            "g_ar_db" | "g_ar" => Ok(SweepParam::GarDb),
            "g_br_db" | "g_br" => Ok(SweepParam::GbrDb),
            _ => Err(Error::invalid(
                "param",
                format!("unknown sweep parameter {s:?}, expected p_db|g_ab_db|g_ar_db|g_br_db"),
            )),
        }
    }
}

/// Values in dB; the swept one may be left unset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialGainsDb {
    pub p_db: Option<f64>,
    pub g_ab_db: Option<f64>,
    pub g_ar_db: Option<f64>,
    pub g_br_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub fixed: PartialGainsDb,
}

impl SweepSpec {
    /// Sweep points `start + k * step` up to `stop`.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::invalid(
                "step",
                format!("must be finite and > 0, got {}", self.step),
            ));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start > self.stop {
            return Err(Error::invalid(
                "start",
                format!("need finite start <= stop, got {}..{}", self.start, self.stop),
            ));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as u64 + 1;
        if n > 1_000_000 {
            return Err(Error::invalid("step", format!("{n} sweep points is too many")));
        }
        Ok((0..n).map(|k| self.start + k as f64 * self.step).collect())
    }

    fn gains_at(&self, value: f64) -> Result<ChannelGains> {
        let f = &self.fixed;
        let pick = |param: SweepParam, fixed: Option<f64>| -> Result<f64> {
            if param == self.param {
                Ok(value)
            } else {
                fixed.ok_or_else(|| Error::invalid(param.name(), "fixed value is required when not swept"))
            }
        };
        ChannelGains::from_db(
            pick(SweepParam::PDb, f.p_db)?,
            pick(SweepParam::GabDb, f.g_ab_db)?,
            pick(SweepParam::GarDb, f.g_ar_db)?,
            pick(SweepParam::GbrDb, f.g_br_db)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub protocol: Protocol,
    pub sum_rate: f64,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub param: SweepParam,
    pub bound: BoundKind,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep_value,protocol,sum_rate,delta_1,delta_2,delta_3,delta_4\n");
        for r in &self.rows {
            let _ = write!(out, "{},{},{}", r.sweep_value, r.protocol.name(), r.sum_rate);
            for k in 0..4 {
                match r.deltas.get(k) {
                    Some(d) => {
                        let _ = write!(out, ",{d}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Sum rate of `protocol` at sweep point `value`.
    pub fn sum_rate(&self, value: f64, protocol: Protocol) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == value && r.protocol == protocol)
            .map(|r| r.sum_rate)
    }
}

fn sorted_protocols(protocols: &[Protocol]) -> Vec<Protocol> {
    let mut ps = protocols.to_vec();
    ps.sort_by_key(|p| p.name());
    ps.dedup();
    ps
}

/// Optimized sum rate of each protocol at every sweep point.
pub fn sweep_sum_rate(spec: &SweepSpec, protocols: &[Protocol], bound: BoundKind) -> Result<SweepTable> {
    if protocols.is_empty() {
        return Err(Error::invalid("protocols", "at least one protocol is required"));
    }
    let values = spec.values()?;
    let gains = values.iter().map(|&v| spec.gains_at(v)).collect::<Result<Vec<_>>>()?;
    let protocols = sorted_protocols(protocols);
    let jobs: Vec<(usize, Protocol)> = (0..values.len())
        .flat_map(|i| protocols.iter().map(move |&p| (i, p)))
        .collect();
    let rows = map_indexed(jobs.len() as u64, |j| {
        let (i, p) = jobs[j as usize];
        best_sum_rate(&gains[i], p, bound).map(|(sum_rate, deltas)| SweepRow {
            sweep_value: values[i],
            protocol: p,
            sum_rate,
            deltas,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        param: spec.param,
        bound,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolStats {
    pub protocol: Protocol,
    pub mean: f64,
    pub stderr: f64,
}

/// One realization: its gains, whether they satisfy `G_ab <= G_ar <= G_br`,
/// and the sum rate of each requested protocol (same order as the report).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSample {
    pub index: u64,
    pub g_ab: f64,
    pub g_ar: f64,
    pub g_br: f64,
    pub ordered: bool,
    pub sum_rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub seed: u64,
    pub model: FadingModel,
    pub samples: u64,
    pub rng: &'static str,
    pub bound: BoundKind,
    pub out_of_regime: u64,
    pub stats: Vec<ProtocolStats>,
}

/// Per-realization sum rates for `sample_gains(cfg, 0..N)`.
pub fn montecarlo_samples(cfg: &FadingConfig, protocols: &[Protocol], bound: BoundKind) -> Result<Vec<McSample>> {
    cfg.validate()?;
    let protocols = sorted_protocols(protocols);
    map_indexed(cfg.samples, |i| {
        let g = sample_gains(cfg, i)?;
        let sum_rates = protocols
            .iter()
            .map(|&p| best_sum_rate(&g, p, bound).map(|r| r.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(McSample {
            index: i,
            g_ab: g.g_ab(),
            g_ar: g.g_ar(),
            g_br: g.g_br(),
            ordered: g.is_ordered(),
            sum_rates,
        })
    })
    .into_iter()
    .collect()
}

/// Mean and standard error of `values`, summed in sorted order so the result
/// does not depend on sample order.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mean = v.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let var = dev.iter().sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Expected optimized sum rate of each protocol over the fading law, with the
/// standard error of the mean. Protocols are reported in name order.
pub fn montecarlo_expected_rates(cfg: &FadingConfig, protocols: &[Protocol], bound: BoundKind) -> Result<McReport> {
    if protocols.is_empty() {
        return Err(Error::invalid("protocols", "at least one protocol is required"));
    }
    let samples = montecarlo_samples(cfg, protocols, bound)?;
    let stats = sorted_protocols(protocols)
        .into_iter()
        .enumerate()
        .map(|(k, protocol)| {
            let col: Vec<f64> = samples.iter().map(|s| s.sum_rates[k]).collect();
            let (mean, stderr) = mean_stderr(&col);
            ProtocolStats { protocol, mean, stderr }
        })
        .collect();
    Ok(McReport {
        seed: cfg.seed,
        model: cfg.model,
        samples: cfg.samples,
        rng: RNG_NAME,
        bound,
        out_of_regime: samples.iter().filter(|s| !s.ordered).count() as u64,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: FadingModel) -> FadingConfig {
        FadingConfig {
            alpha: 2.0,
            d_ab: 1.0,
            d_ar: 1.0,
            d_br: 1.0,
            model,
            power: 1.0,
            samples: 10,
            seed: 42,
        }
    }

    #[test]
    fn path_loss_only() {
        let g = sample_gains(&cfg(FadingModel::None), 3).unwrap();
        assert_eq!((g.g_ab(), g.g_ar(), g.g_br()), (1.0, 1.0, 1.0));
        let mut c = cfg(FadingModel::None);
        c.d_ab = 2.0;
        assert_eq!(sample_gains(&c, 0).unwrap().g_ab(), 0.25);
    }

    #[test]
    fn rayleigh_is_index_addressed() {
        let c = cfg(FadingModel::Rayleigh);
        let a = sample_gains(&c, 5).unwrap();
        let b = sample_gains(&c, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(sample_gains(&c, 6).unwrap(), a);
        let mut other = c.clone();
        other.seed = 43;
        assert_ne!(sample_gains(&other, 5).unwrap(), a);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(FadingModel::None);
        c.samples = 0;
        assert!(sample_gains(&c, 0).is_err());
        let mut c = cfg(FadingModel::None);
        c.d_br = 0.0;
        let e = sample_gains(&c, 0).unwrap_err().to_string();
        assert!(e.contains("d_br"));
    }

    #[test]
    fn sweep_values_and_errors() {
        let spec = SweepSpec {
            param: SweepParam::GabDb,
            start: -20.0,
            stop: 0.0,
            step: 1.0,
            fixed: PartialGainsDb {
                p_db: Some(15.0),
                g_ar_db: Some(0.0),
                g_br_db: Some(5.0),
                ..Default::default()
            },
        };
        assert_eq!(spec.values().unwrap().len(), 21);
        let mut zero = spec.clone();
        zero.step = 0.0;
        assert!(matches!(zero.values(), Err(Error::InvalidArgument { .. })));
        let mut missing = spec.clone();
        missing.fixed.g_br_db = None;
        let e = sweep_sum_rate(&missing, &[Protocol::Hbc], BoundKind::Inner).unwrap_err();
        assert!(e.to_string().contains("g_br_db"));
    }

    #[test]
    fn stats_helpers() {
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        let var: f64 = [1.5f64, 0.5, 0.5, 1.5].iter().map(|d| d * d).sum::<f64>() / 3.0;
        assert!((s - (var / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_leaves_unused_deltas_blank() {
        let t = SweepTable {
            param: SweepParam::PDb,
            bound: BoundKind::Inner,
            rows: vec![SweepRow {
                sweep_value: 0.0,
                protocol: Protocol::Dt,
                sum_rate: 1.0,
                deltas: vec![0.5, 0.5],
            }],
        };
        assert_eq!(t.to_csv().lines().nth(1).unwrap(), "0,dt,1,0.5,0.5,,");
    }
}

//! System constants, unit conversions and random channel generation.
//!
//! Power is measured in milliwatts throughout, so `0 dBm == 1.0`. The slot
//! length `T` defaults to one, which turns every reported energy into a power
//! per slot.
//!
//! Channels are drawn from a ChaCha20 stream seeded with
//! `ChaCha20Rng::seed_from_u64(seed)`. The stream is consumed in the fixed
//! order `h1, h2, g1, g2`, each entry as (real, imaginary) standard normals.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = nalgebra::DMatrix<Complex64>;

/// Scalar constants of the two-way relay system.
///
/// Pairs are indexed by source node: `[S1, S2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub n_antennas: usize,
    pub slot_length: f64,
    pub eta: f64,
    pub sigma_r2: f64,
    pub sigma_d2: [f64; 2],
    pub sigma_c2: [f64; 2],
    pub p_max: [f64; 2],
    pub p_relay: f64,
    pub tau: [f64; 2],
    pub weights: [f64; 2],
    pub pathloss_c: f64,
    pub pathloss_n: f64,
    pub distances: [f64; 2],
}

impl Default for SystemParams {
    /// Symmetric reference setup: unit noise, `eta = 0.5`, 5 dBm source caps,
    /// `c = 1`, `n = 3`, both sources 1 m from a 4-antenna relay at 20 dBm and
    /// SINR targets derived from 10% of the single-link rate.
    fn default() -> Self {
        let p_max = dbm_to_watts(5.0);
        let tau = tau_from_rate(0.1 * r_max(p_max, 1.0));
        Self {
            n_antennas: 4,
            slot_length: 1.0,
            eta: 0.5,
            sigma_r2: 1.0,
            sigma_d2: [1.0; 2],
            sigma_c2: [1.0; 2],
            p_max: [p_max; 2],
            p_relay: dbm_to_watts(20.0),
            tau: [tau; 2],
            weights: [0.5; 2],
            pathloss_c: 1.0,
            pathloss_n: 3.0,
            distances: [1.0; 2],
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.n_antennas == 0 {
            return bad("n_antennas must be positive");
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad("eta must lie in (0, 1)");
        }
        let positive = [
            self.slot_length,
            self.sigma_r2,
            self.sigma_d2[0],
            self.sigma_d2[1],
            self.sigma_c2[0],
            self.sigma_c2[1],
            self.p_max[0],
            self.p_max[1],
            self.p_relay,
            self.pathloss_c,
            self.distances[0],
            self.distances[1],
            self.weights[0],
            self.weights[1],
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("noise variances, powers, distances, weights and c must be positive");
        }
        if self.tau.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("SINR targets must be non-negative");
        }
        if !self.pathloss_n.is_finite() || self.pathloss_n < 0.0 {
            return bad("path-loss exponent must be non-negative");
        }
        Ok(())
    }

    /// Weights are expected to sum to one; the solvers do not rely on it.
    pub fn weights_normalized(&self) -> bool {
        (self.weights[0] + self.weights[1] - 1.0).abs() <= 1e-12
    }

    /// `eta * T / 2`, the factor converting received power into harvested energy.
    pub fn harvest_factor(&self) -> f64 {
        self.eta * self.slot_length / 2.0
    }

    /// Sets one config key. Returns `Ok(false)` when the key is not a system
    /// parameter so callers can layer their own keys on top.
    pub fn apply_key(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        let (base, dbm) = match key.strip_suffix("_dbm") {
            Some(b) => (b, true),
            None => (key, false),
        };
        let power = |v: f64| if dbm { dbm_to_watts(v) } else { v };
        let power_key = matches!(base, "sigma_r2" | "sigma_d2" | "sigma_c2" | "p_max" | "p_relay");
        if dbm && !power_key {
            return Err(format!("`{key}`: only power keys accept the _dbm suffix"));
        }
        match base {
            "n_antennas" => {
                self.n_antennas = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("`{key}` expects a positive integer"))?
            }
            "slot_length" => self.slot_length = parse_scalar(key, value)?,
            "eta" => self.eta = parse_scalar(key, value)?,
            "sigma_r2" => self.sigma_r2 = power(parse_scalar(key, value)?),
            "p_relay" => self.p_relay = power(parse_scalar(key, value)?),
            "sigma_d2" => self.sigma_d2 = parse_pair(key, value)?.map(power),
            "sigma_c2" => self.sigma_c2 = parse_pair(key, value)?.map(power),
            "p_max" => self.p_max = parse_pair(key, value)?.map(power),
            "tau" => self.tau = parse_pair(key, value)?,
            "weights" => self.weights = parse_pair(key, value)?,
            "pathloss_c" => self.pathloss_c = parse_scalar(key, value)?,
            "pathloss_n" => self.pathloss_n = parse_scalar(key, value)?,
            "distances" => self.distances = parse_pair(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Parses a `key = value` config containing only system keys.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut params = Self::default();
        for entry in parse_kv(text)? {
            match params.apply_key(&entry.key, &entry.value) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(Error::Config {
                        line: entry.line,
                        msg: format!("unknown key `{}`", entry.key),
                    })
                }
                Err(msg) => return Err(Error::Config { line: entry.line, msg }),
            }
        }
        params.validate()?;
        Ok(params)
    }
}

/// One `key = value` line of a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits config text into entries. `#` starts a comment; blank lines are skipped.
pub fn parse_kv(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: idx + 1,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config { line: idx + 1, msg: "empty key".into() });
        }
        out.push(ConfigEntry {
            line: idx + 1,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn parse_scalar(key: &str, value: &str) -> std::result::Result<f64, String> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{key}` expects a number, got `{value}`"))
}

/// A pair is `a, b`; a single number sets both entries.
fn parse_pair(key: &str, value: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [one] => {
            let v = parse_scalar(key, one)?;
            Ok([v, v])
        }
        [a, b] => Ok([parse_scalar(key, a)?, parse_scalar(key, b)?]),
        _ => Err(format!("`{key}` expects one or two comma-separated numbers")),
    }
}

/// Uplink (`h`) and downlink (`g`) channel vectors for one fading block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h1: CVec,
    pub h2: CVec,
    pub g1: CVec,
    pub g2: CVec,
    pub seed: u64,
}

impl ChannelRealization {
    pub fn new(h1: CVec, h2: CVec, g1: CVec, g2: CVec, seed: u64) -> Result<Self> {
        let ch = Self { h1, h2, g1, g2, seed };
        ch.validate()?;
        Ok(ch)
    }

    pub fn n(&self) -> usize {
        self.h1.len()
    }

    pub fn h(&self, i: usize) -> &CVec {
        if i == 0 {
            &self.h1
        } else {
            &self.h2
        }
    }

    pub fn g(&self, i: usize) -> &CVec {
        if i == 0 {
            &self.g1
        } else {
            &self.g2
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.h1.len();
        if n == 0 || [&self.h2, &self.g1, &self.g2].iter().any(|v| v.len() != n) {
            return Err(Error::Dimension(format!(
                "channel lengths {}, {}, {}, {}",
                self.h1.len(),
                self.h2.len(),
                self.g1.len(),
                self.g2.len()
            )));
        }
        let finite = [&self.h1, &self.h2, &self.g1, &self.g2]
            .iter()
            .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if !finite {
            return Err(Error::Domain("channel entries must be finite".into()));
        }
        Ok(())
    }

    /// FNV-1a over the raw bits of every entry, used to pair trials across runs.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for v in [&self.h1, &self.h2, &self.g1, &self.g2] {
            for z in v.iter() {
                for word in [z.re.to_bits(), z.im.to_bits()] {
                    for byte in word.to_le_bytes() {
                        hash ^= u64::from(byte);
                        hash = hash.wrapping_mul(0x0100_0000_01b3);
                    }
                }
            }
        }
        hash
    }
}

/// Distance path loss `c * d^(-n)`.
pub fn pathloss_gain(d: f64, params: &SystemParams) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    Ok(params.pathloss_c * d.powf(-params.pathloss_n))
}

/// Draws i.i.d. circular complex Gaussian channels whose per-entry variance is
/// the path-loss gain of the corresponding source.
pub fn sample_channel(params: &SystemParams, seed: u64) -> Result<ChannelRealization> {
    params.validate()?;
    let n = params.n_antennas;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let gains = [
        pathloss_gain(params.distances[0], params)?,
        pathloss_gain(params.distances[1], params)?,
    ];
    let mut draw = |gain: f64| -> CVec {
        let scale = (gain / 2.0).sqrt();
        CVec::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(scale * re, scale * im)
        })
    };
    let h1 = draw(gains[0]);
    let h2 = draw(gains[1]);
    let g1 = draw(gains[0]);
    let g2 = draw(gains[1]);
    Ok(ChannelRealization { h1, h2, g1, g2, seed })
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn watts_to_dbm(p: f64) -> f64 {
    10.0 * p.log10()
}

/// Half-duplex single-link rate `1/2 log2(1 + p / sigma2)`.
pub fn r_max(p: f64, sigma2: f64) -> f64 {
    0.5 * (1.0 + p / sigma2).log2()
}

/// SINR target reaching rate `rate` over the second half-slot: `2^(2R) - 1`.
pub fn tau_from_rate(rate: f64) -> f64 {
    (2.0 * rate).exp2() - 1.0
}

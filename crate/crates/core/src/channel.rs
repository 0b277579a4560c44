//! Fading draws and the rate / gain-threshold / duration conversions.
//!
//! A transmission at rate `R` from a node with power `P` is decodable by any
//! receiver whose power gain is at least `Gamma = (b^R - 1) / P`, where `b` is
//! the log base (2 for bits, `e` for nats). The noise variance is normalized
//! to one everywhere.

use std::f64::consts::LN_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GainMatrix, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "LogBaseRepr", into = "LogBaseRepr")]
pub enum LogBase {
    /// Rates in bits per slot.
    #[default]
    Two,
    /// Rates in nats per slot.
    E,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LogBaseRepr {
    Num(f64),
    Name(String),
}

impl TryFrom<LogBaseRepr> for LogBase {
    type Error = String;

    fn try_from(r: LogBaseRepr) -> Result<Self, Self::Error> {
        match r {
            LogBaseRepr::Num(2.0) => Ok(LogBase::Two),
            LogBaseRepr::Num(x) if x == std::f64::consts::E => Ok(LogBase::E),
            LogBaseRepr::Name(s) if s == "2" => Ok(LogBase::Two),
            LogBaseRepr::Name(s) if s == "e" => Ok(LogBase::E),
            LogBaseRepr::Num(x) => Err(format!("log_base must be 2 or \"e\", got {x}")),
            LogBaseRepr::Name(s) => Err(format!("log_base must be 2 or \"e\", got {s:?}")),
        }
    }
}

impl From<LogBase> for LogBaseRepr {
    fn from(b: LogBase) -> Self {
        match b {
            LogBase::Two => LogBaseRepr::Num(2.0),
            LogBase::E => LogBaseRepr::Name("e".into()),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Two => f.write_str("2"),
            LogBase::E => f.write_str("e"),
        }
    }
}

impl LogBase {
    #[inline]
    fn ln(self) -> f64 {
        match self {
            LogBase::Two => LN_2,
            LogBase::E => 1.0,
        }
    }

    /// `log_b(1 + x)`
    #[inline]
    pub fn log1p(self, x: f64) -> f64 {
        x.ln_1p() / self.ln()
    }

    /// `b^x - 1`
    #[inline]
    pub fn exp_m1(self, x: f64) -> f64 {
        (x * self.ln()).exp_m1()
    }
}

/// `R = log_b(1 + P * Gamma)`
#[inline]
pub fn rate_from_threshold(power: f64, gamma: f64, base: LogBase) -> f64 {
    base.log1p(power * gamma)
}

/// `Gamma = (b^R - 1) / P`, the inverse of [`rate_from_threshold`].
#[inline]
pub fn threshold_from_rate(power: f64, rate: f64, base: LogBase) -> f64 {
    base.exp_m1(rate) / power
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ChannelError {
    /// The Phase-I rate needed to send the packet within the slot is not
    /// supported at this threshold.
    #[error("phase-I transmission does not fit in the slot")]
    Infeasible,
    #[error("phase II has zero length; no relay transmission is possible")]
    NoPhaseTwo,
}

/// Phase-I duration `mu_I = L / R_0` for threshold `gamma`, or
/// [`ChannelError::Infeasible`] when it would exceed the slot.
#[inline]
pub fn phase1_duration(
    packet_bits: f64,
    power: f64,
    gamma: f64,
    slot_duration: f64,
    base: LogBase,
) -> Result<f64, ChannelError> {
    let rate = rate_from_threshold(power, gamma, base);
    if rate <= 0.0 {
        return Err(ChannelError::Infeasible);
    }
    let mu1 = packet_bits / rate;
    if mu1 > slot_duration {
        Err(ChannelError::Infeasible)
    } else {
        Ok(mu1)
    }
}

/// Gain threshold of a relay that must deliver `L` bits within `mu2`.
#[inline]
pub fn relay_threshold(
    packet_bits: f64,
    mu2: f64,
    relay_power: f64,
    base: LogBase,
) -> Result<f64, ChannelError> {
    if mu2 <= 0.0 {
        return Err(ChannelError::NoPhaseTwo);
    }
    Ok(threshold_from_rate(relay_power, packet_bits / mu2, base))
}

/// Block fading with exponentially distributed power gains (Rayleigh
/// envelope), independent across links and slots.
#[derive(Debug, Clone)]
pub struct FadingModel {
    rng: ChaCha8Rng,
}

impl FadingModel {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        Self { rng }
    }

    #[inline]
    fn draw(&mut self, mean: f64) -> f64 {
        let x: f64 = self.rng.sample(Exp1);
        (mean * x).max(f64::MIN_POSITIVE)
    }

    /// Draws the next slot's gains. BS gains come first, then the D2D matrix
    /// row by row, so the `k`-th call is a pure function of the seed and `k`.
    pub fn sample_slot_gains(&mut self, cfg: &SimConfig) -> GainMatrix {
        let n = cfg.n_users;
        let bs: Vec<f64> = cfg.mean_gain_bs.iter().map(|&m| self.draw(m)).collect();
        let mut d2d = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // Diagonal entries are drawn to keep the stream layout fixed;
                // they never enter a decode decision.
                let mean = if i == j { 1.0 } else { cfg.mean_gain_d2d[i][j] };
                d2d.push(self.draw(mean));
            }
        }
        GainMatrix::new(bs, d2d)
    }
}

//! Simulation configuration: the JSON-facing raw form and its validated,
//! linear-unit counterpart.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::LogBase;

/// A per-user parameter that may be given once and broadcast to all users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerUser {
    Scalar(f64),
    List(Vec<f64>),
}

/// A per-link parameter: a scalar, or a full `N x N` matrix (row = transmitter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerPair {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

/// Configuration exactly as it appears in a config file.
///
/// Powers are given in dB through the `*_db` keys, or in linear units through
/// the plain keys; exactly one of the two forms must be present. Missing keys
/// take the reference defaults (`q = 0.9`, `P = 20 dB`, mean gain `0.3`,
/// `L = 1`, `T = 1`, `V = 1000`, `lambda = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub n_users: usize,
    pub slot_duration: f64,
    pub packet_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_power_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user_powers_db: Option<PerUser>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user_powers: Option<PerUser>,
    pub mean_gain_bs: PerUser,
    pub mean_gain_d2d: PerPair,
    pub qos: PerUser,
    pub arrival_rate: f64,
    pub control_v: f64,
    pub n_slots: u64,
    pub seed: u64,
    pub log_base: LogBase,
    pub allow_idle: bool,
    pub relay_enabled: bool,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            n_users: 4,
            slot_duration: 1.0,
            packet_bits: 1.0,
            bs_power_db: Some(20.0),
            bs_power: None,
            user_powers_db: Some(PerUser::Scalar(20.0)),
            user_powers: None,
            mean_gain_bs: PerUser::Scalar(0.3),
            mean_gain_d2d: PerPair::Scalar(0.3),
            qos: PerUser::Scalar(0.9),
            arrival_rate: 1.0,
            control_v: 1000.0,
            n_slots: 100_000,
            seed: 1,
            log_base: LogBase::Two,
            allow_idle: false,
            relay_enabled: true,
        }
    }
}

impl RawConfig {
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Sets one transmit power for the BS and every user.
    pub fn set_common_power_db(&mut self, db: f64) {
        self.bs_power_db = Some(db);
        self.bs_power = None;
        self.user_powers_db = Some(PerUser::Scalar(db));
        self.user_powers = None;
    }

    pub fn validate(&self) -> Result<SimConfig, ConfigErrors> {
        validate_config(self)
    }
}

/// Validated configuration with every per-user quantity expanded and every
/// power in linear units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_users: usize,
    pub slot_duration: f64,
    pub packet_bits: f64,
    pub bs_power: f64,
    pub user_powers: Vec<f64>,
    pub mean_gain_bs: Vec<f64>,
    /// `mean_gain_d2d[i][j]` is the mean gain from user `i` to user `j`.
    pub mean_gain_d2d: Vec<Vec<f64>>,
    pub qos: Vec<f64>,
    pub arrival_rate: f64,
    pub control_v: f64,
    pub n_slots: u64,
    pub seed: u64,
    pub log_base: LogBase,
    pub allow_idle: bool,
    pub relay_enabled: bool,
}

impl SimConfig {
    /// Reference parameters for `n_users` users.
    pub fn reference(n_users: usize) -> Self {
        let raw = RawConfig {
            n_users,
            ..RawConfig::default()
        };
        validate_config(&raw).expect("reference defaults are valid")
    }

    pub fn drift_constant(&self) -> f64 {
        super::drift_constant(&self.qos, self.slot_duration)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("n_users must be ≥ 1")]
    NoUsers,
    #[error("n_slots must be ≥ 1")]
    NoSlots,
    #[error("{field} must be > 0 (got {value})")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be finite (got {value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("qos out of range: user {user} has {value}, expected [0, 1]")]
    QosOutOfRange { user: usize, value: f64 },
    #[error("arrival_rate out of range: {0}, expected [0, 1]")]
    ArrivalRateOutOfRange(f64),
    #[error("{field} has {got} entries, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{field}: give either the linear or the _db form, not both")]
    AmbiguousPower { field: &'static str },
    #[error("{field}: no power given")]
    MissingPower { field: &'static str },
}

/// Every invariant violation found in one config.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl ConfigErrors {
    pub fn contains(&self, pred: impl Fn(&ConfigError) -> bool) -> bool {
        self.0.iter().any(pred)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid config {path}: {source}")]
    Invalid { path: String, source: ConfigErrors },
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Reads a JSON config file without validating it.
pub fn load_raw_config(path: impl AsRef<Path>) -> Result<RawConfig, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    RawConfig::from_json_str(&text).map_err(|source| LoadError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig, LoadError> {
    let path = path.as_ref();
    load_raw_config(path)?
        .validate()
        .map_err(|source| LoadError::Invalid {
            path: path.display().to_string(),
            source,
        })
}

struct Checker {
    errors: Vec<ConfigError>,
}

impl Checker {
    fn positive(&mut self, field: &'static str, value: f64) {
        if !value.is_finite() {
            self.errors.push(ConfigError::NonFinite { field, value });
        } else if value <= 0.0 {
            self.errors.push(ConfigError::NonPositive { field, value });
        }
    }

    fn expand(&mut self, field: &'static str, v: &PerUser, n: usize) -> Vec<f64> {
        match v {
            PerUser::Scalar(x) => vec![*x; n],
            PerUser::List(xs) if xs.len() == n => xs.clone(),
            PerUser::List(xs) => {
                self.errors.push(ConfigError::LengthMismatch {
                    field,
                    expected: n,
                    got: xs.len(),
                });
                Vec::new()
            }
        }
    }

    fn power(
        &mut self,
        field: &'static str,
        linear: Option<&PerUser>,
        db: Option<&PerUser>,
        n: usize,
    ) -> Vec<f64> {
        let values = match (linear, db) {
            (Some(_), Some(_)) => {
                self.errors.push(ConfigError::AmbiguousPower { field });
                return Vec::new();
            }
            (None, None) => {
                self.errors.push(ConfigError::MissingPower { field });
                return Vec::new();
            }
            (Some(lin), None) => self.expand(field, lin, n),
            (None, Some(db)) => self
                .expand(field, db, n)
                .into_iter()
                .map(|d| if d.is_finite() { db_to_linear(d) } else { d })
                .collect(),
        };
        for &p in &values {
            self.positive(field, p);
        }
        values
    }
}

/// Checks every invariant of `raw`, converting dB powers to linear units.
/// All violations are collected rather than stopping at the first.
pub fn validate_config(raw: &RawConfig) -> Result<SimConfig, ConfigErrors> {
    let mut c = Checker { errors: Vec::new() };
    let n = raw.n_users;
    if n == 0 {
        c.errors.push(ConfigError::NoUsers);
    }
    if raw.n_slots == 0 {
        c.errors.push(ConfigError::NoSlots);
    }
    c.positive("slot_duration", raw.slot_duration);
    c.positive("packet_bits", raw.packet_bits);
    c.positive("control_v", raw.control_v);
    if !(0.0..=1.0).contains(&raw.arrival_rate) {
        c.errors
            .push(ConfigError::ArrivalRateOutOfRange(raw.arrival_rate));
    }

    let bs_power = c
        .power(
            "bs_power",
            raw.bs_power.map(PerUser::Scalar).as_ref(),
            raw.bs_power_db.map(PerUser::Scalar).as_ref(),
            1,
        )
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    let user_powers = c.power(
        "user_powers",
        raw.user_powers.as_ref(),
        raw.user_powers_db.as_ref(),
        n,
    );

    let mean_gain_bs = c.expand("mean_gain_bs", &raw.mean_gain_bs, n);
    for &g in &mean_gain_bs {
        c.positive("mean_gain_bs", g);
    }

    let mean_gain_d2d = match &raw.mean_gain_d2d {
        PerPair::Scalar(g) => vec![vec![*g; n]; n],
        PerPair::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                c.errors.push(ConfigError::LengthMismatch {
                    field: "mean_gain_d2d",
                    expected: n,
                    got: rows
                        .iter()
                        .map(Vec::len)
                        .find(|&l| l != n)
                        .unwrap_or(rows.len()),
                });
            }
            rows.clone()
        }
    };
    for (i, row) in mean_gain_d2d.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            // The diagonal never carries a transmission.
            if i != j {
                c.positive("mean_gain_d2d", g);
            }
        }
    }

    let qos = c.expand("qos", &raw.qos, n);
    for (user, &value) in qos.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            c.errors.push(ConfigError::QosOutOfRange { user, value });
        }
    }

    if !c.errors.is_empty() {
        return Err(ConfigErrors(c.errors));
    }
    Ok(SimConfig {
        n_users: n,
        slot_duration: raw.slot_duration,
        packet_bits: raw.packet_bits,
        bs_power,
        user_powers,
        mean_gain_bs,
        mean_gain_d2d,
        qos,
        arrival_rate: raw.arrival_rate,
        control_v: raw.control_v,
        n_slots: raw.n_slots,
        seed: raw.seed,
        log_base: raw.log_base,
        allow_idle: raw.allow_idle,
        relay_enabled: raw.relay_enabled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values_are_valid() {
        let cfg = validate_config(&RawConfig::default()).unwrap();
        assert!((cfg.bs_power - 100.0).abs() < 1e-9);
        assert!(cfg.user_powers.iter().all(|p| (p - 100.0).abs() < 1e-9));
        assert_eq!(cfg.qos, vec![0.9; 4]);
        assert_eq!(cfg.slot_duration, 1.0);
        assert_eq!(cfg.packet_bits, 1.0);
        assert_eq!(cfg.control_v, 1000.0);
        assert_eq!(cfg.mean_gain_d2d, vec![vec![0.3; 4]; 4]);
    }

    #[test]
    fn zero_users_rejected() {
        let raw = RawConfig {
            n_users: 0,
            ..RawConfig::default()
        };
        let err = validate_config(&raw).unwrap_err();
        assert!(err.contains(|e| *e == ConfigError::NoUsers));
        assert!(err.to_string().contains("n_users must be ≥ 1"));
    }

    #[test]
    fn qos_above_one_rejected() {
        let raw = RawConfig {
            qos: PerUser::Scalar(1.2),
            ..RawConfig::default()
        };
        let err = validate_config(&raw).unwrap_err();
        assert!(err.to_string().contains("qos out of range"));
        assert_eq!(err.0.len(), 4, "one error per user");
    }

    #[test]
    fn collects_every_violation() {
        let raw = RawConfig {
            bs_power_db: None,
            bs_power: Some(-1.0),
            mean_gain_bs: PerUser::Scalar(0.0),
            arrival_rate: 1.5,
            control_v: 0.0,
            ..RawConfig::default()
        };
        let err = validate_config(&raw).unwrap_err();
        assert!(err.contains(|e| matches!(
            e,
            ConfigError::NonPositive {
                field: "bs_power",
                ..
            }
        )));
        assert!(err.contains(|e| matches!(
            e,
            ConfigError::NonPositive {
                field: "mean_gain_bs",
                ..
            }
        )));
        assert!(err.contains(|e| matches!(
            e,
            ConfigError::NonPositive {
                field: "control_v",
                ..
            }
        )));
        assert!(err.contains(|e| matches!(e, ConfigError::ArrivalRateOutOfRange(_))));
    }

    #[test]
    fn list_length_must_match() {
        let raw = RawConfig {
            n_users: 3,
            qos: PerUser::List(vec![0.9, 0.8]),
            ..RawConfig::default()
        };
        let err = validate_config(&raw).unwrap_err();
        assert!(err.contains(|e| matches!(
            e,
            ConfigError::LengthMismatch {
                field: "qos",
                expected: 3,
                got: 2
            }
        )));
    }

    #[test]
    fn both_power_forms_rejected() {
        let raw = RawConfig {
            bs_power: Some(100.0),
            ..RawConfig::default()
        };
        let err = validate_config(&raw).unwrap_err();
        assert!(err.contains(|e| matches!(e, ConfigError::AmbiguousPower { .. })));
    }

    #[test]
    fn json_partial_keys_take_defaults() {
        let raw = RawConfig::from_json_str(
            r#"{"n_users": 2, "qos": [0.5, 0.7], "log_base": "e", "mean_gain_d2d": [[1, 0.2], [0.4, 1]]}"#,
        )
        .unwrap();
        let cfg = raw.validate().unwrap();
        assert_eq!(cfg.qos, vec![0.5, 0.7]);
        assert_eq!(cfg.log_base, LogBase::E);
        assert_eq!(cfg.mean_gain_d2d[1][0], 0.4);
        assert_eq!(cfg.mean_gain_bs, vec![0.3, 0.3]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RawConfig::from_json_str(r#"{"n_user": 2}"#).is_err());
    }
}

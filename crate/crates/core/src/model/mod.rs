//! Domain types, virtual-queue dynamics and the auxiliary-reward rule.

mod config;

pub use config::{
    db_to_linear, load_config, load_raw_config, validate_config, ConfigError, ConfigErrors,
    LoadError, PerPair, PerUser, RawConfig, SimConfig,
};

use serde::Serialize;

/// Channel power gains for one slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainMatrix {
    n: usize,
    /// `bs_to_user[i]` is the BS-to-user-`i` gain.
    pub bs_to_user: Vec<f64>,
    /// Row-major `N x N`; entry `(i, j)` is the gain from user `i` to user `j`.
    user_to_user: Vec<f64>,
}

impl GainMatrix {
    /// Builds a gain matrix from BS gains and a row-major `N x N` D2D matrix.
    ///
    /// Panics if the dimensions disagree.
    pub fn new(bs_to_user: Vec<f64>, user_to_user: Vec<f64>) -> Self {
        let n = bs_to_user.len();
        assert_eq!(user_to_user.len(), n * n, "D2D matrix must be N x N");
        Self {
            n,
            bs_to_user,
            user_to_user,
        }
    }

    pub fn from_rows(bs_to_user: Vec<f64>, rows: &[Vec<f64>]) -> Self {
        Self::new(bs_to_user, rows.iter().flatten().copied().collect())
    }

    pub fn n_users(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d2d(&self, from: usize, to: usize) -> f64 {
        self.user_to_user[from * self.n + to]
    }

    pub fn d2d_row(&self, from: usize) -> &[f64] {
        &self.user_to_user[from * self.n..(from + 1) * self.n]
    }
}

/// The per-user QoS queues `Y` and the offloading queue `Z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VirtualQueueState {
    pub y: Vec<f64>,
    pub z: f64,
}

impl VirtualQueueState {
    pub fn new(n_users: usize) -> Self {
        Self {
            y: vec![0.0; n_users],
            z: 0.0,
        }
    }

    /// End-of-slot update of every queue. `mu2_normalized` is `mu_II / T`.
    pub fn update(
        &mut self,
        arrival: bool,
        qos: &[f64],
        decoded: &[bool],
        aux_r: u8,
        mu2_normalized: f64,
    ) {
        for ((y, &q), &d) in self.y.iter_mut().zip(qos).zip(decoded) {
            *y = update_user_queue(*y, arrival, q, d);
        }
        self.z = update_z_queue(self.z, aux_r, mu2_normalized);
    }
}

/// `(y + a*q - 1_decoded)^+`
#[inline]
pub fn update_user_queue(y: f64, arrival: bool, q: f64, decoded: bool) -> f64 {
    let a = if arrival { q } else { 0.0 };
    let d = if decoded { 1.0 } else { 0.0 };
    (y + a - d).max(0.0)
}

/// `(z + r - mu_II)^+`, with `mu_II` in units of slots.
#[inline]
pub fn update_z_queue(z: f64, r: u8, mu2: f64) -> f64 {
    (z + f64::from(r) - mu2).max(0.0)
}

/// The minimizer of `(Z - V) r` over `r in [0, 1]`: 1 while `Z < V`, else 0.
#[inline]
pub fn choose_auxiliary(z: f64, v: f64) -> u8 {
    u8::from(z < v)
}

/// `C = (sum_i (q_i^2 + 1) + 1 + T^2) / 2`, the constant in the `C/V`
/// optimality gap.
pub fn drift_constant(qos: &[f64], slot_duration: f64) -> f64 {
    let users: f64 = qos.iter().map(|q| q * q + 1.0).sum();
    (users + 1.0 + slot_duration * slot_duration) / 2.0
}

/// Everything the scheduler decided for one slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotDecision {
    pub arrival: bool,
    /// Phase-I gain threshold `Gamma_0`; `None` when the BS stays silent.
    pub phase1_threshold: Option<f64>,
    /// Phase-I rate, zero when silent.
    pub phase1_rate: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Index of the Phase-II relay.
    pub relay: Option<usize>,
    pub relay_rate: Option<f64>,
    pub relay_threshold: Option<f64>,
    pub aux_r: u8,
    pub decoded: Vec<bool>,
    /// Value of `sum_m Y_m 1_m + Z mu_II / T` for this decision.
    pub objective: f64,
    /// Set when a packet arrived but no Phase-I rate fit in the slot.
    pub all_infeasible: bool,
    pub candidates_evaluated: usize,
}

impl SlotDecision {
    /// The BS transmits nothing; the whole slot counts as Phase II.
    pub fn idle(
        arrival: bool,
        n_users: usize,
        slot_duration: f64,
        queues: &VirtualQueueState,
        aux_r: u8,
    ) -> Self {
        Self {
            arrival,
            phase1_threshold: None,
            phase1_rate: 0.0,
            mu1: 0.0,
            mu2: slot_duration,
            relay: None,
            relay_rate: None,
            relay_threshold: None,
            aux_r,
            decoded: vec![false; n_users],
            objective: queues.z,
            all_infeasible: false,
            candidates_evaluated: 0,
        }
    }

    pub fn decoded_count(&self) -> usize {
        self.decoded.iter().filter(|&&d| d).count()
    }
}

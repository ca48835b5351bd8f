//! Synthetic downlink channel generation and the per-BCU block structure.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{C64, CMat};

/// Name of the RNG algorithm, recorded in output metadata so that identical
/// seeds reproduce identical channels everywhere.
pub const RNG_ALGORITHM: &str = "chacha8";

/// All dimension and protocol parameters of one system instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Total BS antenna count.
    pub n_t: usize,
    /// Number of BCUs (antenna clusters).
    pub p: usize,
    /// Antennas per BCU; `p * m == n_t`.
    pub m: usize,
    /// Number of user devices.
    pub k: usize,
    /// Antennas per user.
    pub n_r: usize,
    /// Streams per user; `l <= n_r`.
    pub l: usize,
    /// Symbols per coherence block.
    pub tau: usize,
    /// Total transmit power (linear).
    pub p_bs: f64,
    /// Noise variance (linear).
    pub sigma2_n: f64,
}

impl SystemConfig {
    /// Total number of transmit data streams.
    pub fn l_tot(&self) -> usize {
        self.k * self.l
    }

    /// System load η = L_tot / N_T.
    pub fn system_load(&self) -> f64 {
        self.l_tot() as f64 / self.n_t as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 1 || self.p < 1 || self.m < 1 || self.k < 1 || self.n_r < 1 || self.l < 1 {
            return Err(Error::InvalidConfig(
                "all antenna, cluster, user, and stream counts must be >= 1".into(),
            ));
        }
        if self.p * self.m != self.n_t {
            return Err(Error::InvalidConfig(format!(
                "P·M = N_T violated: {}·{} != {}",
                self.p, self.m, self.n_t
            )));
        }
        if self.l > self.n_r {
            return Err(Error::InvalidConfig(format!(
                "L ≤ N_R violated: {} > {}",
                self.l, self.n_r
            )));
        }
        if self.l_tot() > self.n_t {
            return Err(Error::InvalidConfig(format!(
                "L_tot = K·L ≤ N_T violated: {} > {}",
                self.l_tot(),
                self.n_t
            )));
        }
        if !(self.p_bs.is_finite() && self.p_bs > 0.0) {
            return Err(Error::InvalidConfig("P_BS must be positive".into()));
        }
        if !(self.sigma2_n.is_finite() && self.sigma2_n >= 0.0) {
            return Err(Error::InvalidConfig("σ_n² must be non-negative".into()));
        }
        Ok(())
    }
}

/// Channel statistics used by [`generate_channels`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelKind {
    /// Entries i.i.d. circularly-symmetric complex Gaussian, unit variance.
    IidRayleigh,
    /// i.i.d. Rayleigh with an independent log-normal large-scale gain per
    /// (user, BCU) block, normalized so E[g²] = 1. Gives the strongest-BCU
    /// selection non-trivial structure to exploit.
    BcuDisparity {
        /// Standard deviation of the per-block gain in dB.
        spread_db: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    pub seed: u64,
}

/// Per-user downlink channels `H_k` (N_R × N_T) with per-BCU block views.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub k: usize,
    pub n_r: usize,
    pub n_t: usize,
    pub p: usize,
    pub m: usize,
    /// One N_R × N_T matrix per user.
    pub users: Vec<CMat>,
}

/// splitmix64-style seed derivation; used to give every generation stream
/// and Monte Carlo trial its own independent ChaCha8 seed.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base ^ a.wrapping_mul(0x9e3779b97f4a7c15) ^ b.wrapping_mul(0xbf58476d1ce4e5b9);
    for _ in 0..2 {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = z;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = x ^ (x >> 31);
    }
    z
}

/// Generates a seeded channel realization.
///
/// Entries are drawn user by user in row-major order from a dedicated RNG
/// stream; disparity gains come from a second stream, so the zero-spread
/// disparity model is bit-identical to `IidRayleigh` under the same seed.
pub fn generate_channels(cfg: &SystemConfig, model: &ChannelModel) -> Result<ChannelSet> {
    cfg.validate()?;
    if let ChannelKind::BcuDisparity { spread_db } = model.kind {
        if !(spread_db.is_finite() && spread_db >= 0.0) {
            return Err(Error::InvalidConfig(
                "disparity gain spread must be non-negative".into(),
            ));
        }
    }

    let mut entry_rng = ChaCha8Rng::seed_from_u64(derive_seed(model.seed, 0, 0));
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut users = Vec::with_capacity(cfg.k);
    for _ in 0..cfg.k {
        let mut h = DMatrix::zeros(cfg.n_r, cfg.n_t);
        for r in 0..cfg.n_r {
            for c in 0..cfg.n_t {
                let re: f64 = entry_rng.sample(StandardNormal);
                let im: f64 = entry_rng.sample(StandardNormal);
                h[(r, c)] = C64::new(re * scale, im * scale);
            }
        }
        users.push(h);
    }

    if let ChannelKind::BcuDisparity { spread_db } = model.kind {
        if spread_db > 0.0 {
            let mut gain_rng = ChaCha8Rng::seed_from_u64(derive_seed(model.seed, 1, 0));
            // Amplitude g = 10^(X/20) with X ~ N(0, spread²), divided by
            // exp(b²σ²) with b = ln(10)/20 so that E[g²] = 1.
            let b = std::f64::consts::LN_10 / 20.0;
            let norm = (b * b * spread_db * spread_db).exp();
            for h in users.iter_mut() {
                for p in 0..cfg.p {
                    let x: f64 = gain_rng.sample::<f64, _>(StandardNormal) * spread_db;
                    let g = 10f64.powf(x / 20.0) / norm;
                    let mut block = h.view_mut((0, p * cfg.m), (cfg.n_r, cfg.m));
                    block.apply(|z| *z *= g);
                }
            }
        }
    }

    Ok(ChannelSet {
        k: cfg.k,
        n_r: cfg.n_r,
        n_t: cfg.n_t,
        p: cfg.p,
        m: cfg.m,
        users,
    })
}

impl ChannelSet {
    /// `H_{k,p}`: columns `p·M .. (p+1)·M` of `H_k` (0-based indices).
    pub fn bcu_block(&self, k: usize, p: usize) -> Result<CMat> {
        if k >= self.k {
            return Err(Error::IndexOutOfRange(format!(
                "user index {k} out of range (K = {})",
                self.k
            )));
        }
        if p >= self.p {
            return Err(Error::IndexOutOfRange(format!(
                "BCU index {p} out of range (P = {})",
                self.p
            )));
        }
        Ok(self.users[k].columns(p * self.m, self.m).into_owned())
    }

    /// `H^p`: the K·N_R × M stack of `H_{k,p}` over users.
    pub fn bcu_stack(&self, p: usize) -> Result<CMat> {
        if p >= self.p {
            return Err(Error::IndexOutOfRange(format!(
                "BCU index {p} out of range (P = {})",
                self.p
            )));
        }
        let mut out = CMat::zeros(self.k * self.n_r, self.m);
        for k in 0..self.k {
            out.view_mut((k * self.n_r, 0), (self.n_r, self.m))
                .copy_from(&self.users[k].columns(p * self.m, self.m));
        }
        Ok(out)
    }
}

// Self-describing container for cross-implementation oracle comparison:
// a dimensions header plus row-major interleaved re/im doubles per user.
#[derive(Serialize, Deserialize)]
struct ChannelSetFile {
    format: String,
    version: u32,
    rng: String,
    k: usize,
    n_r: usize,
    n_t: usize,
    p: usize,
    m: usize,
    users: Vec<Vec<f64>>,
}

impl ChannelSet {
    pub fn to_json(&self) -> String {
        let users = self
            .users
            .iter()
            .map(|h| {
                let mut data = Vec::with_capacity(2 * self.n_r * self.n_t);
                for r in 0..self.n_r {
                    for c in 0..self.n_t {
                        data.push(h[(r, c)].re);
                        data.push(h[(r, c)].im);
                    }
                }
                data
            })
            .collect();
        let file = ChannelSetFile {
            format: "channel-set".into(),
            version: 1,
            rng: RNG_ALGORITHM.into(),
            k: self.k,
            n_r: self.n_r,
            n_t: self.n_t,
            p: self.p,
            m: self.m,
            users,
        };
        serde_json::to_string_pretty(&file).expect("channel set serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChannelSetFile =
            serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        if file.format != "channel-set" {
            return Err(Error::Io(format!("unexpected format tag {:?}", file.format)));
        }
        if file.users.len() != file.k {
            return Err(Error::Io("user count mismatch".into()));
        }
        let mut users = Vec::with_capacity(file.k);
        for data in &file.users {
            if data.len() != 2 * file.n_r * file.n_t {
                return Err(Error::Io("entry count mismatch".into()));
            }
            let mut h = DMatrix::zeros(file.n_r, file.n_t);
            let mut it = data.iter();
            for r in 0..file.n_r {
                for c in 0..file.n_t {
                    let re = *it.next().unwrap();
                    let im = *it.next().unwrap();
                    h[(r, c)] = C64::new(re, im);
                }
            }
            users.push(h);
        }
        Ok(ChannelSet {
            k: file.k,
            n_r: file.n_r,
            n_t: file.n_t,
            p: file.p,
            m: file.m,
            users,
        })
    }
}

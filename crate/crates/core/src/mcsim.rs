//! Monte Carlo uncoded-BER engine: 16-QAM modulation, downlink transmission,
//! user-side equalization, detection, and error counting.
//!
//! Trials are pre-partitioned by index with per-trial derived seeds, so sweep
//! results are bit-identical regardless of the worker count.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;

use crate::channel::{derive_seed, generate_channels, ChannelKind, ChannelModel, ChannelSet, SystemConfig};
use crate::equalizer::{self, EqualizerBank};
use crate::error::{Error, Result};
use crate::numerics::{C64, CMat, CVec};
use crate::precoder::{self, Precoder, Scheme};

/// 16-QAM constellation with Gray bit mapping and unit average energy.
///
/// Per real dimension the two bits map 00→−3, 01→−1, 11→+1, 10→+3 (levels
/// scaled by 1/√10); the first two bits of a nibble select the real part,
/// the last two the imaginary part.
pub struct Qam16;

const QAM_SCALE: f64 = 0.31622776601683794; // 1/sqrt(10)

fn gray_level(b0: u8, b1: u8) -> f64 {
    let level = match (b0, b1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        (1, 0) => 3.0,
        _ => unreachable!(),
    };
    level * QAM_SCALE
}

impl Qam16 {
    /// Constellation point for a 4-bit nibble `b0 b1 b2 b3`.
    pub fn point(nibble: u8) -> C64 {
        debug_assert!(nibble < 16);
        let b = [
            (nibble >> 3) & 1,
            (nibble >> 2) & 1,
            (nibble >> 1) & 1,
            nibble & 1,
        ];
        C64::new(gray_level(b[0], b[1]), gray_level(b[2], b[3]))
    }

    /// Maps bits (length a multiple of 4) to symbols.
    pub fn map(bits: &[u8]) -> Result<Vec<C64>> {
        if !bits.len().is_multiple_of(4) {
            return Err(Error::InvalidConfig(format!(
                "bit count {} is not a multiple of 4",
                bits.len()
            )));
        }
        Ok(bits
            .chunks(4)
            .map(|c| {
                let nibble = (c[0] << 3) | (c[1] << 2) | (c[2] << 1) | c[3];
                Self::point(nibble)
            })
            .collect())
    }

    /// Minimum-distance detection; ties resolved by lowest nibble index.
    pub fn demap_symbol(z: C64) -> u8 {
        let mut best = 0u8;
        let mut best_d = f64::INFINITY;
        for nibble in 0..16u8 {
            let d = (z - Self::point(nibble)).norm_sqr();
            if d < best_d {
                best_d = d;
                best = nibble;
            }
        }
        best
    }

    pub fn demap(symbols: &[C64]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(symbols.len() * 4);
        for &z in symbols {
            let nibble = Self::demap_symbol(z);
            bits.push((nibble >> 3) & 1);
            bits.push((nibble >> 2) & 1);
            bits.push((nibble >> 1) & 1);
            bits.push(nibble & 1);
        }
        bits
    }
}

/// One downlink use: `y_k = √γ H_k W s + n_k`, then `r_{k,l} = u_{k,l}ᴴ y_k`.
pub fn transmit_and_equalize(
    ch: &ChannelSet,
    eq: &EqualizerBank,
    w: &CMat,
    gamma: f64,
    s: &CVec,
    noise: &[CVec],
) -> Result<CVec> {
    if noise.len() != ch.k {
        return Err(Error::DimensionMismatch(format!(
            "expected {} per-user noise vectors, got {}",
            ch.k,
            noise.len()
        )));
    }
    let l = eq.per_user[0].ncols();
    let x = w * s;
    let sqrt_gamma = gamma.sqrt();
    let mut r = CVec::zeros(ch.k * l);
    for k in 0..ch.k {
        let y_k = (&ch.users[k] * &x).scale(sqrt_gamma) + &noise[k];
        let rows = eq.per_user[k].adjoint() * y_k;
        for stream in 0..l {
            r[k * l + stream] = rows[stream];
        }
    }
    Ok(r)
}

/// Receiver-side per-stream scaling before symbol detection.
#[derive(Debug, Clone)]
pub enum DetectScaling {
    /// `ŝ_i = r_i √Q_i / √γ` — diagonalizing schemes, where the receiver is
    /// assumed to know Q and γ.
    DiagQ(Vec<f64>),
    /// `ŝ_i = r_i / (√γ g_i)` with `g_i` the realized diagonal of C·W —
    /// optimistic scaling for the FD scheme, where C·W is not diagonal.
    Genie(Vec<C64>),
}

/// Scales each equalized stream and demaps to bits.
pub fn detect(r: &CVec, gamma: f64, scaling: &DetectScaling) -> Vec<u8> {
    let sqrt_gamma = gamma.sqrt();
    let symbols: Vec<C64> = match scaling {
        DetectScaling::DiagQ(q) => r
            .iter()
            .zip(q.iter())
            .map(|(ri, qi)| ri * qi.sqrt() / sqrt_gamma)
            .collect(),
        DetectScaling::Genie(g) => r
            .iter()
            .zip(g.iter())
            .map(|(ri, gi)| {
                if gi.norm_sqr() > 0.0 {
                    ri / (gi * sqrt_gamma)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect(),
    };
    Qam16::demap(&symbols)
}

/// BER estimate at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub power_db: f64,
    pub ber: f64,
    pub bits: u64,
    pub errors: u64,
    /// 95% confidence radius, normal approximation.
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub scheme: Scheme,
    pub points: Vec<BerPoint>,
}

/// Full sweep result plus reproducibility metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct BerSweep {
    pub curves: Vec<BerCurve>,
    pub trials: usize,
    pub seed: u64,
    pub model: ChannelKind,
    /// Channel realizations redrawn due to singular Gram matrices.
    pub redraws: u64,
}

const MAX_REDRAWS_PER_TRIAL: usize = 64;

struct TrialOutcome {
    /// errors[scheme][power]
    errors: Vec<Vec<u64>>,
    redraws: u64,
}

struct SchemeRealization {
    bank: EqualizerBank,
    precoder: Precoder,
    scaling: DetectScaling,
}

/// Builds the precoder and receiver scaling for one scheme on one channel
/// realization. The DEZF route goes through the Gram-sharing equalizers and
/// is bit-identical to the bus protocol's output.
fn realize_scheme(ch: &ChannelSet, cfg: &SystemConfig, scheme: Scheme) -> Result<SchemeRealization> {
    match scheme {
        Scheme::Cen => {
            let bank = equalizer::exact_equalizers(ch, cfg.l)?;
            let eff = precoder::effective_channel(ch, &bank)?;
            let grams = precoder::gram_accumulate(&eff)?;
            let pre = precoder::ezf_precoder(&eff, &grams, Scheme::Cen)?;
            let scaling = DetectScaling::DiagQ(pre.q.clone());
            Ok(SchemeRealization {
                bank,
                precoder: pre,
                scaling,
            })
        }
        Scheme::Dezf => {
            let mut user_grams = Vec::with_capacity(cfg.k);
            for k in 0..cfg.k {
                let mut g = CMat::zeros(cfg.n_r, cfg.n_r);
                for p in 0..cfg.p {
                    let block = ch.bcu_block(k, p)?;
                    g += &block * block.adjoint();
                }
                user_grams.push(g);
            }
            let bank = equalizer::exact_equalizers_via_gram(&user_grams, cfg.l)?;
            let eff = precoder::effective_channel(ch, &bank)?;
            let grams = precoder::gram_accumulate(&eff)?;
            let pre = precoder::ezf_precoder(&eff, &grams, Scheme::Dezf)?;
            let scaling = DetectScaling::DiagQ(pre.q.clone());
            Ok(SchemeRealization {
                bank,
                precoder: pre,
                scaling,
            })
        }
        Scheme::Apd => {
            let table = equalizer::bcu_metrics(ch);
            let strongest = equalizer::strongest_bcu(&table);
            let bank = equalizer::approx_equalizers(ch, &strongest, cfg.l)?;
            let eff = precoder::effective_channel(ch, &bank)?;
            let grams = precoder::gram_accumulate(&eff)?;
            let pre = precoder::ezf_precoder(&eff, &grams, Scheme::Apd)?;
            let scaling = DetectScaling::DiagQ(pre.q.clone());
            Ok(SchemeRealization {
                bank,
                precoder: pre,
                scaling,
            })
        }
        Scheme::Fd => {
            // Equalization vectors assumed known at every BCU.
            let bank = equalizer::exact_equalizers(ch, cfg.l)?;
            let pre = precoder::fd_precoder(ch, &bank)?;
            let eff = precoder::effective_channel(ch, &bank)?;
            let cw = &eff.c * &pre.w;
            let diag: Vec<C64> = (0..cfg.l_tot()).map(|i| cw[(i, i)]).collect();
            Ok(SchemeRealization {
                bank,
                precoder: pre,
                scaling: DetectScaling::Genie(diag),
            })
        }
    }
}

fn run_trial(
    cfg: &SystemConfig,
    schemes: &[Scheme],
    power_db: &[f64],
    kind: ChannelKind,
    seed: u64,
    trial: usize,
) -> Result<TrialOutcome> {
    let l_tot = cfg.l_tot();
    let mut redraws = 0u64;
    for attempt in 0..MAX_REDRAWS_PER_TRIAL {
        let base = derive_seed(seed, trial as u64, attempt as u64);
        let model = ChannelModel {
            kind,
            seed: derive_seed(base, 1, 0),
        };
        let ch = generate_channels(cfg, &model)?;

        let realizations: std::result::Result<Vec<_>, Error> = schemes
            .iter()
            .map(|&s| realize_scheme(&ch, cfg, s))
            .collect();
        let realizations = match realizations {
            Ok(r) => r,
            Err(Error::SingularGram { .. }) => {
                redraws += 1;
                continue;
            }
            Err(e) => return Err(e),
        };

        // Symbols and noise are shared across schemes and power points; the
        // noise variance is fixed while the transmit power is swept.
        let mut sym_rng = ChaCha8Rng::seed_from_u64(derive_seed(base, 2, 0));
        let mut bits = Vec::with_capacity(cfg.tau);
        let mut symbols = Vec::with_capacity(cfg.tau);
        for _ in 0..cfg.tau {
            let b: Vec<u8> = (0..4 * l_tot).map(|_| sym_rng.gen_range(0..2u8)).collect();
            let s = CVec::from_vec(Qam16::map(&b)?);
            bits.push(b);
            symbols.push(s);
        }
        let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(base, 3, 0));
        let noise_scale = (cfg.sigma2_n / 2.0).sqrt();
        let noise: Vec<Vec<CVec>> = (0..cfg.tau)
            .map(|_| {
                (0..cfg.k)
                    .map(|_| {
                        DVector::from_fn(cfg.n_r, |_, _| {
                            let re: f64 = noise_rng.sample(StandardNormal);
                            let im: f64 = noise_rng.sample(StandardNormal);
                            C64::new(re * noise_scale, im * noise_scale)
                        })
                    })
                    .collect()
            })
            .collect();

        let mut errors = vec![vec![0u64; power_db.len()]; schemes.len()];
        for (si, real) in realizations.iter().enumerate() {
            let trace: f64 = real.precoder.w.iter().map(|z| z.norm_sqr()).sum();
            if trace <= 0.0 {
                return Err(Error::ZeroPrecoder);
            }
            // Precompute H_k W s per interval; power scaling is applied per
            // grid point afterwards.
            let mut hx = Vec::with_capacity(cfg.tau);
            for s in &symbols {
                let x = &real.precoder.w * s;
                let per_user: Vec<CVec> = (0..cfg.k).map(|k| &ch.users[k] * &x).collect();
                hx.push(per_user);
            }
            for (pi, db) in power_db.iter().enumerate() {
                let p_bs = 10f64.powf(db / 10.0);
                let gamma = p_bs / trace;
                let sqrt_gamma = gamma.sqrt();
                for j in 0..cfg.tau {
                    let mut r = CVec::zeros(l_tot);
                    for k in 0..cfg.k {
                        let y_k = hx[j][k].scale(sqrt_gamma) + &noise[j][k];
                        let rows = real.bank.per_user[k].adjoint() * y_k;
                        for stream in 0..cfg.l {
                            r[k * cfg.l + stream] = rows[stream];
                        }
                    }
                    let decided = detect(&r, gamma, &real.scaling);
                    errors[si][pi] += decided
                        .iter()
                        .zip(bits[j].iter())
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                }
            }
        }
        return Ok(TrialOutcome { errors, redraws });
    }
    Err(Error::RedrawBudgetExceeded {
        attempts: MAX_REDRAWS_PER_TRIAL,
    })
}

/// Runs `trials` independent coherence blocks per scheme and power point.
/// Each trial draws a fresh channel, τ symbol vectors, and noise; σ_n² stays
/// fixed (from `cfg`) while `P_BS` follows the dB grid.
pub fn ber_sweep(
    cfg: &SystemConfig,
    schemes: &[Scheme],
    power_db: &[f64],
    kind: ChannelKind,
    trials: usize,
    seed: u64,
) -> Result<BerSweep> {
    cfg.validate()?;
    if trials < 1 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    if schemes.is_empty() || power_db.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one scheme and one power point are required".into(),
        ));
    }
    let outcomes: std::result::Result<Vec<TrialOutcome>, Error> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, schemes, power_db, kind, seed, t))
        .collect();
    let outcomes = outcomes?;

    let bits_per_cell = (cfg.tau * cfg.l_tot() * 4) as u64 * trials as u64;
    let mut errors = vec![vec![0u64; power_db.len()]; schemes.len()];
    let mut redraws = 0u64;
    for o in &outcomes {
        redraws += o.redraws;
        for (si, row) in o.errors.iter().enumerate() {
            for (pi, e) in row.iter().enumerate() {
                errors[si][pi] += e;
            }
        }
    }
    let curves = schemes
        .iter()
        .enumerate()
        .map(|(si, &scheme)| {
            let points = power_db
                .iter()
                .enumerate()
                .map(|(pi, &db)| {
                    let e = errors[si][pi];
                    let ber = e as f64 / bits_per_cell as f64;
                    let ci95 = 1.96 * (ber * (1.0 - ber) / bits_per_cell as f64).sqrt();
                    BerPoint {
                        power_db: db,
                        ber,
                        bits: bits_per_cell,
                        errors: e,
                        ci95,
                    }
                })
                .collect();
            BerCurve { scheme, points }
        })
        .collect();
    Ok(BerSweep {
        curves,
        trials,
        seed,
        model: kind,
        redraws,
    })
}

pub const CSV_HEADER: &str = "scheme,power_db,ber,bits,ci95";

impl BerSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for curve in &self.curves {
            for p in &curve.points {
                out.push_str(&format!(
                    "{},{},{:.10e},{},{:.10e}\n",
                    curve.scheme.as_str(),
                    p.power_db,
                    p.ber,
                    p.bits,
                    p.ci95
                ));
            }
        }
        out
    }

    pub fn metadata_json(&self, cfg: &SystemConfig) -> String {
        serde_json::to_string_pretty(&json!({
            "seed": self.seed,
            "rng": crate::channel::RNG_ALGORITHM,
            "model": self.model,
            "trials": self.trials,
            "redraws": self.redraws,
            "cfg": cfg,
            "schemes": self.curves.iter().map(|c| c.scheme.as_str()).collect::<Vec<_>>(),
        }))
        .expect("metadata serialization")
    }
}

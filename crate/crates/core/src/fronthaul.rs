//! Closed-form fronthaul load formulas, relative gains, and sweep tables.
//!
//! Loads are counted in real scalars per coherence block:
//!   - centralized: `ζ_CEN = 2τN_T`
//!   - APD:         `ζ_APD = PK + 2L_tot·N_R − L_tot + P·L_tot² + 2τL_tot`
//!   - DEZF:        `ζ_DEZF = (P+1)(K·N_R² + L_tot²) + 2τL_tot`
//!
//! The DEZF expression is derived from a fusion-node message breakdown
//! (per-BCU uploads of K user Grams and one local Gram, one aggregate
//! broadcast back, plus the symbol stream); it is a reconstruction fitted to
//! the published gain tables rather than a quoted formula.

use serde::Serialize;

use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::precoder::Scheme;

/// Fronthaul load summary for one scheme at one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct LoadReport {
    pub scheme: &'static str,
    pub k: usize,
    pub p: usize,
    pub m: usize,
    pub l: usize,
    pub n_r: usize,
    pub tau: usize,
    /// System load η = L_tot / N_T.
    pub eta: f64,
    /// Real scalars per coherence block.
    pub zeta: u64,
    /// Relative gain vs. centralized, as a fraction (may be negative).
    pub gain: f64,
    /// Gain in percent, rounded half away from zero to two decimals.
    pub gain_percent: f64,
}

/// Exact integer fronthaul load for the given scheme.
pub fn analytic_load(scheme: Scheme, cfg: &SystemConfig) -> Result<u64> {
    cfg.validate()?;
    let (p, k, n_r, tau) = (cfg.p as u64, cfg.k as u64, cfg.n_r as u64, cfg.tau as u64);
    let l_tot = cfg.l_tot() as u64;
    let n_t = cfg.n_t as u64;
    let load = match scheme {
        Scheme::Cen => 2 * tau * n_t,
        Scheme::Apd => p * k + 2 * l_tot * n_r - l_tot + p * l_tot * l_tot + 2 * tau * l_tot,
        Scheme::Dezf => (p + 1) * (k * n_r * n_r + l_tot * l_tot) + 2 * tau * l_tot,
        Scheme::Fd => {
            return Err(Error::InvalidConfig(
                "no fronthaul load formula is defined for the FD scheme".into(),
            ))
        }
    };
    Ok(load)
}

/// `ζ̂ = 1 − ζ/ζ_CEN`.
pub fn gain(zeta_scheme: u64, zeta_cen: u64) -> Result<f64> {
    if zeta_cen == 0 {
        return Err(Error::InvalidConfig("ζ_CEN must be positive".into()));
    }
    Ok(1.0 - zeta_scheme as f64 / zeta_cen as f64)
}

/// Rounds a percent value half away from zero to two decimals.
pub fn round_percent(pct: f64) -> f64 {
    (pct * 100.0).round() / 100.0
}

/// Sweep axis for [`table_report`].
#[derive(Debug, Clone)]
pub enum Sweep {
    /// Vary the user count K at fixed P, M.
    Users(Vec<usize>),
    /// Vary the (P, M) partition at fixed N_T.
    Clusters(Vec<(usize, usize)>),
}

fn report_for(cfg: &SystemConfig, scheme: Scheme) -> Result<LoadReport> {
    let zeta = analytic_load(scheme, cfg)?;
    let zeta_cen = analytic_load(Scheme::Cen, cfg)?;
    let g = gain(zeta, zeta_cen)?;
    Ok(LoadReport {
        scheme: scheme.as_str(),
        k: cfg.k,
        p: cfg.p,
        m: cfg.m,
        l: cfg.l,
        n_r: cfg.n_r,
        tau: cfg.tau,
        eta: cfg.system_load(),
        zeta,
        gain: g,
        gain_percent: round_percent(g * 100.0),
    })
}

/// One row per (sweep point, scheme) for CEN, APD, and DEZF. Invalid sweep
/// points produce a row-level error; other rows are still produced.
pub fn table_report(
    base: &SystemConfig,
    sweep: &Sweep,
) -> Vec<std::result::Result<LoadReport, (String, Error)>> {
    let configs: Vec<(String, SystemConfig)> = match sweep {
        Sweep::Users(ks) => ks
            .iter()
            .map(|&k| (format!("K={k}"), SystemConfig { k, ..*base }))
            .collect(),
        Sweep::Clusters(pms) => pms
            .iter()
            .map(|&(p, m)| (format!("P={p},M={m}"), SystemConfig { p, m, ..*base }))
            .collect(),
    };
    let mut rows = Vec::new();
    for (label, cfg) in configs {
        for scheme in [Scheme::Cen, Scheme::Apd, Scheme::Dezf] {
            rows.push(report_for(&cfg, scheme).map_err(|e| (label.clone(), e)));
        }
    }
    rows
}

/// CSV header matching [`to_csv_row`].
pub const CSV_HEADER: &str = "scheme,K,P,M,L,N_R,tau,eta,zeta,gain_percent";

pub fn to_csv_row(r: &LoadReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.6},{},{:.2}",
        r.scheme, r.k, r.p, r.m, r.l, r.n_r, r.tau, r.eta, r.zeta, r.gain_percent
    )
}

/// The two published sweeps: K ∈ {16, 24, 32, 36} at (P, M) = (4, 64), and
/// (P, M) ∈ {(4,64), (8,32), (16,16)} at K = 16; both with N_T = 256, L = 2,
/// N_R = 4, τ = 65.
pub fn paper_table_base() -> SystemConfig {
    SystemConfig {
        n_t: 256,
        p: 4,
        m: 64,
        k: 16,
        n_r: 4,
        l: 2,
        tau: 65,
        p_bs: 1.0,
        sigma2_n: 1.0,
    }
}

pub fn paper_table_sweeps() -> [(&'static str, Sweep); 2] {
    [
        ("table1", Sweep::Users(vec![16, 24, 32, 36])),
        (
            "table2",
            Sweep::Clusters(vec![(4, 64), (8, 32), (16, 16)]),
        ),
    ]
}

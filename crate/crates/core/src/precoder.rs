//! The EZF precoder family: centralized, APD-decomposed over BCU blocks,
//! and fully-decentralized, with power loading.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSet, SystemConfig};
use crate::equalizer::EqualizerBank;
use crate::error::{Error, Result};
use crate::numerics::{self, C64, CMat};

/// Precoding scheme tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// Centralized EZF.
    Cen,
    /// Approximate partially-decentralized EZF (strongest-BCU equalizers).
    Apd,
    /// Distributed-exact EZF (matches centralized performance).
    Dezf,
    /// Fully-decentralized EZF (local pseudo-inverses, 1/sqrt(P) scaling).
    Fd,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Cen => "CEN",
            Scheme::Apd => "APD",
            Scheme::Dezf => "DEZF",
            Scheme::Fd => "FD",
        }
    }
}

/// Equivalent composite channel `C` (L_tot × N_T) with per-BCU column blocks.
/// Row order is user-major, stream-minor: row (k·L + l).
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub c: CMat,
    /// Columns per BCU block.
    pub m: usize,
    /// Number of BCU blocks.
    pub p: usize,
}

impl EffectiveChannel {
    /// `C_p`: columns `p·M .. (p+1)·M`.
    pub fn block(&self, p: usize) -> Result<CMat> {
        if p >= self.p {
            return Err(Error::IndexOutOfRange(format!(
                "BCU index {p} out of range (P = {})",
                self.p
            )));
        }
        Ok(self.c.columns(p * self.m, self.m).into_owned())
    }
}

/// Per-BCU Gram matrices `G_p = C_p C_pᴴ` and their sum `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSet {
    pub per_bcu: Vec<CMat>,
    pub aggregate: CMat,
}

/// Composite precoder `W` (N_T × L_tot), its per-BCU row blocks, the column
/// normalization `Q`, and any zeroed FD columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub w: CMat,
    /// Rows per BCU block.
    pub m: usize,
    /// diag(G⁻¹); all ones for the FD scheme, where Q is undefined.
    pub q: Vec<f64>,
    pub scheme: Scheme,
    /// (BCU, stream) pairs whose local FD precoding column was zero.
    pub zero_columns: Vec<(usize, usize)>,
}

impl Precoder {
    /// `W_p`: rows `p·M .. (p+1)·M`.
    pub fn block(&self, p: usize) -> CMat {
        self.w.rows(p * self.m, self.m).into_owned()
    }
}

/// `Ũ_kᴴ · H_{k,p}`: the rows user k contributes to `C_p`. Shared by the
/// direct pipeline and the bus protocol so both produce bit-identical rows.
pub(crate) fn equalized_block(u_k: &CMat, h_block: &CMat) -> CMat {
    u_k.adjoint() * h_block
}

/// Builds `C` with row (k·L + l) equal to `u_{k,l}ᴴ H_k`.
pub fn effective_channel(ch: &ChannelSet, eq: &EqualizerBank) -> Result<EffectiveChannel> {
    if eq.per_user.len() != ch.k {
        return Err(Error::DimensionMismatch(format!(
            "equalizer bank covers {} users, channel set has {}",
            eq.per_user.len(),
            ch.k
        )));
    }
    let l = eq.per_user[0].ncols();
    let l_tot = ch.k * l;
    let mut c = CMat::zeros(l_tot, ch.n_t);
    for k in 0..ch.k {
        let u_k = &eq.per_user[k];
        if u_k.nrows() != ch.n_r || u_k.ncols() != l {
            return Err(Error::DimensionMismatch(format!(
                "equalizer for user {k} has shape {}x{}",
                u_k.nrows(),
                u_k.ncols()
            )));
        }
        for p in 0..ch.p {
            let rows = equalized_block(u_k, &ch.bcu_block(k, p)?);
            c.view_mut((k * l, p * ch.m), (l, ch.m)).copy_from(&rows);
        }
    }
    Ok(EffectiveChannel {
        c,
        m: ch.m,
        p: ch.p,
    })
}

/// `G_p = C_p C_pᴴ`, accumulated to `G = Σ_p G_p` in BCU order.
pub fn gram_accumulate(eff: &EffectiveChannel) -> Result<GramSet> {
    let l_tot = eff.c.nrows();
    let mut per_bcu = Vec::with_capacity(eff.p);
    let mut aggregate = CMat::zeros(l_tot, l_tot);
    for p in 0..eff.p {
        let c_p = eff.block(p)?;
        let g_p = &c_p * c_p.adjoint();
        aggregate += &g_p;
        per_bcu.push(g_p);
    }
    Ok(GramSet { per_bcu, aggregate })
}

/// Solves for `G⁻¹` and reads off `Q = diag(G⁻¹)`.
pub(crate) fn gram_inverse(g: &CMat) -> Result<(CMat, Vec<f64>)> {
    let d = g.nrows();
    let gi = numerics::hpd_solve(g, &CMat::identity(d, d))?;
    let q: Vec<f64> = (0..d).map(|i| gi[(i, i)].re).collect();
    if q.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::SingularGram {
            min_eig: q.iter().cloned().fold(f64::INFINITY, f64::min),
            threshold: 0.0,
        });
    }
    Ok((gi, q))
}

/// `W_p = C_pᴴ G⁻¹ Q^{-1/2}`, given `G⁻¹` and the per-stream scalings.
pub(crate) fn block_precoder(c_p: &CMat, gi: &CMat, q_inv_sqrt: &[f64]) -> CMat {
    let mut w_p = c_p.adjoint() * gi;
    for (i, s) in q_inv_sqrt.iter().enumerate() {
        let scale = C64::new(*s, 0.0);
        for r in 0..w_p.nrows() {
            w_p[(r, i)] *= scale;
        }
    }
    w_p
}

/// The EZF precoder `W = Cᴴ G⁻¹ Q^{-1/2}` assembled from per-BCU blocks.
/// The scheme tag follows the equalizer bank that produced `eff`.
pub fn ezf_precoder(eff: &EffectiveChannel, grams: &GramSet, scheme: Scheme) -> Result<Precoder> {
    let (gi, q) = gram_inverse(&grams.aggregate)?;
    let q_inv_sqrt: Vec<f64> = q.iter().map(|v| 1.0 / v.sqrt()).collect();
    let l_tot = eff.c.nrows();
    let n_t = eff.c.ncols();
    let mut w = CMat::zeros(n_t, l_tot);
    for p in 0..eff.p {
        let c_p = eff.block(p)?;
        let w_p = block_precoder(&c_p, &gi, &q_inv_sqrt);
        w.view_mut((p * eff.m, 0), (eff.m, l_tot)).copy_from(&w_p);
    }
    Ok(Precoder {
        w,
        m: eff.m,
        q,
        scheme,
        zero_columns: Vec::new(),
    })
}

/// Fully-decentralized precoder: each BCU pseudo-inverts only its local
/// effective channel and scales columns to norm 1/sqrt(P). Columns a BCU
/// cannot serve are left zero and flagged.
pub fn fd_precoder(ch: &ChannelSet, eq: &EqualizerBank) -> Result<Precoder> {
    let eff = effective_channel(ch, eq)?;
    let l_tot = eff.c.nrows();
    let n_t = eff.c.ncols();
    let sqrt_p = (eff.p as f64).sqrt();
    let mut w = CMat::zeros(n_t, l_tot);
    let mut zero_columns = Vec::new();
    for p in 0..eff.p {
        let c_p = eff.block(p)?;
        let c_dag = numerics::pinv(&c_p, numerics::PINV_DEFAULT_TOL)?;
        for i in 0..l_tot {
            let col = c_dag.column(i);
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm <= 0.0 {
                zero_columns.push((p, i));
                continue;
            }
            let scale = 1.0 / (norm * sqrt_p);
            for r in 0..eff.m {
                w[(p * eff.m + r, i)] = col[r] * scale;
            }
        }
    }
    Ok(Precoder {
        w,
        m: eff.m,
        q: vec![1.0; l_tot],
        scheme: Scheme::Fd,
        zero_columns,
    })
}

/// Power loading factor γ with E{‖√γ W s‖²} = P_BS for unit-energy symbols.
pub fn power_loading(precoder: &Precoder, cfg: &SystemConfig) -> Result<f64> {
    let trace: f64 = precoder.w.iter().map(|z| z.norm_sqr()).sum();
    if trace <= 0.0 {
        return Err(Error::ZeroPrecoder);
    }
    Ok(cfg.p_bs / trace)
}

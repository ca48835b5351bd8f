//! User equalization matrices: exact (centralized / DEZF) and approximate
//! via strongest-BCU selection (APD).

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::numerics::{self, CMat};

/// How an [`EqualizerBank`] was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqualizerKind {
    /// First L left singular vectors of the full per-user channel.
    Exact,
    /// First L eigenvectors of the strongest-BCU block Gram; carries the
    /// selected BCU index per user.
    Approx(Vec<usize>),
}

/// Per-user equalization matrices `Ũ_k` (N_R × L, orthonormal columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerBank {
    pub per_user: Vec<CMat>,
    pub kind: EqualizerKind,
    /// Users whose L-th eigenvalue fell below the rank threshold (the stream
    /// count exceeds the local channel rank). Diagnostic only.
    pub rank_deficient: Vec<usize>,
}

/// K × P table of per-(user, BCU) channel strengths `T_{k,p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub values: Vec<Vec<f64>>,
}

/// `Ũ_k` = first L left singular vectors of `H_k`, descending singular values.
pub fn exact_equalizers(ch: &ChannelSet, l: usize) -> Result<EqualizerBank> {
    check_streams(ch, l)?;
    let mut per_user = Vec::with_capacity(ch.k);
    for h in &ch.users {
        let dec = numerics::svd_thin(h)?;
        per_user.push(dec.u.columns(0, l).into_owned());
    }
    Ok(EqualizerBank {
        per_user,
        kind: EqualizerKind::Exact,
        rank_deficient: Vec::new(),
    })
}

/// Exact equalizers computed from the aggregate per-user Gram matrices
/// `H_k H_kᴴ` instead of the channel SVD. This is the route the BCUs use in
/// the DEZF protocol; it agrees with [`exact_equalizers`] up to factorization
/// round-off.
pub fn exact_equalizers_via_gram(grams: &[CMat], l: usize) -> Result<EqualizerBank> {
    let mut per_user = Vec::with_capacity(grams.len());
    let mut rank_deficient = Vec::new();
    for (k, g) in grams.iter().enumerate() {
        let dec = numerics::hermitian_eig(g)?;
        if l > dec.eigenvalues.len() {
            return Err(Error::DimensionMismatch(format!(
                "requested {l} streams from a {}x{} Gram matrix",
                g.nrows(),
                g.ncols()
            )));
        }
        let trace: f64 = dec.eigenvalues.iter().sum();
        if dec.eigenvalues[l - 1] < 1e-12 * trace {
            rank_deficient.push(k);
        }
        per_user.push(dec.eigenvectors.columns(0, l).into_owned());
    }
    Ok(EqualizerBank {
        per_user,
        kind: EqualizerKind::Exact,
        rank_deficient,
    })
}

/// `T_{k,p}` = tr(H_{k,p} H_{k,p}ᴴ) = squared Frobenius norm of the block.
pub fn bcu_metrics(ch: &ChannelSet) -> MetricTable {
    let values = ch
        .users
        .iter()
        .map(|h| {
            (0..ch.p)
                .map(|p| {
                    h.columns(p * ch.m, ch.m)
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();
    MetricTable { values }
}

/// Per-user argmax over BCUs; ties broken by lowest BCU index.
pub fn strongest_bcu(table: &MetricTable) -> Vec<usize> {
    table
        .values
        .iter()
        .map(|row| {
            let mut best = 0usize;
            for (p, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = p;
                }
            }
            best
        })
        .collect()
}

/// `Ũ_k` = first L eigenvectors of `H_{k,p*_k} H_{k,p*_k}ᴴ`.
pub fn approx_equalizers(ch: &ChannelSet, strongest: &[usize], l: usize) -> Result<EqualizerBank> {
    check_streams(ch, l)?;
    if strongest.len() != ch.k {
        return Err(Error::DimensionMismatch(format!(
            "expected {} strongest-BCU indices, got {}",
            ch.k,
            strongest.len()
        )));
    }
    let mut per_user = Vec::with_capacity(ch.k);
    let mut rank_deficient = Vec::new();
    for (k, &p_star) in strongest.iter().enumerate() {
        let block = ch.bcu_block(k, p_star)?;
        let gram = &block * block.adjoint();
        let dec = numerics::hermitian_eig(&gram)?;
        let trace: f64 = dec.eigenvalues.iter().sum();
        if dec.eigenvalues[l - 1] < 1e-12 * trace {
            rank_deficient.push(k);
        }
        per_user.push(dec.eigenvectors.columns(0, l).into_owned());
    }
    Ok(EqualizerBank {
        per_user,
        kind: EqualizerKind::Approx(strongest.to_vec()),
        rank_deficient,
    })
}

fn check_streams(ch: &ChannelSet, l: usize) -> Result<()> {
    if l < 1 || l > ch.n_r {
        return Err(Error::InvalidConfig(format!(
            "stream count L = {l} must satisfy 1 ≤ L ≤ N_R = {}",
            ch.n_r
        )));
    }
    Ok(())
}

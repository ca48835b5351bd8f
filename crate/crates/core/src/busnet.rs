//! Message-level simulation of the decentralized protocols over a shared
//! fronthaul bus, with exact real-scalar accounting per message class.
//!
//! The precoded vectors `x_p = W_p s` travel on the per-BCU internal bus and
//! are therefore never recorded in the ledger; only the centralized scheme
//! streams precoded vectors over the fronthaul.

use std::collections::BTreeMap;

use serde_json::json;

use crate::channel::{ChannelSet, SystemConfig};
use crate::equalizer::{self, MetricTable};
use crate::error::{Error, Result};
use crate::precoder::{self, Precoder, Scheme};
use crate::numerics::CMat;

/// Bus participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeId {
    Bcu(usize),
    Source,
    Fusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MessageClass {
    Metric,
    EqualizerBlock,
    LocalGram,
    UserGram,
    AggregateBroadcast,
    SymbolVector,
    PrecodedVector,
}

impl MessageClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            MessageClass::Metric => "metric",
            MessageClass::EqualizerBlock => "equalizer_block",
            MessageClass::LocalGram => "local_gram",
            MessageClass::UserGram => "user_gram",
            MessageClass::AggregateBroadcast => "aggregate_broadcast",
            MessageClass::SymbolVector => "symbol_vector",
            MessageClass::PrecodedVector => "precoded_vector",
        }
    }
}

/// Payload dimensions of one message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsgDims {
    Scalar,
    /// Complex block with the phase convention making one real per column
    /// implicit (equalizer matrices).
    Block { rows: usize, cols: usize },
    /// Hermitian d×d matrix: d real diagonal entries plus d(d-1)/2 complex
    /// off-diagonal entries, i.e. d² reals.
    Hermitian { d: usize },
    /// Dense complex vector.
    Vector { len: usize },
}

/// Number of real scalars a message of the given class and dimensions puts
/// on the wire.
pub fn real_count(class: MessageClass, dims: MsgDims) -> Result<u64> {
    let n = match (class, dims) {
        (MessageClass::Metric, MsgDims::Scalar) => 1,
        (MessageClass::EqualizerBlock, MsgDims::Block { rows, cols }) => {
            (2 * rows * cols - cols) as u64
        }
        (MessageClass::LocalGram, MsgDims::Hermitian { d })
        | (MessageClass::UserGram, MsgDims::Hermitian { d })
        | (MessageClass::AggregateBroadcast, MsgDims::Hermitian { d }) => (d * d) as u64,
        (MessageClass::SymbolVector, MsgDims::Vector { len })
        | (MessageClass::PrecodedVector, MsgDims::Vector { len }) => (2 * len) as u64,
        _ => {
            return Err(Error::InvalidConfig(format!(
                "unsupported message class/dims combination: {class:?} / {dims:?}"
            )))
        }
    };
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub sender: NodeId,
    pub class: MessageClass,
    pub dims: MsgDims,
    pub real_count: u64,
}

/// Per-class totals of real scalars exchanged over one coherence block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BusLedger {
    per_kind: BTreeMap<MessageClass, u64>,
    total: u64,
}

impl BusLedger {
    pub fn record(&mut self, sender: NodeId, class: MessageClass, dims: MsgDims) -> Result<Message> {
        let n = real_count(class, dims)?;
        *self.per_kind.entry(class).or_insert(0) += n;
        self.total += n;
        Ok(Message {
            sender,
            class,
            dims,
            real_count: n,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn kind_total(&self, class: MessageClass) -> u64 {
        self.per_kind.get(&class).copied().unwrap_or(0)
    }

    pub fn to_json(&self, scheme: Scheme, cfg: &SystemConfig) -> String {
        let per_kind: BTreeMap<&'static str, u64> = self
            .per_kind
            .iter()
            .map(|(k, v)| (k.as_str(), *v))
            .collect();
        serde_json::to_string_pretty(&json!({
            "scheme": scheme.as_str(),
            "cfg": cfg,
            "per_kind": per_kind,
            "total": self.total,
        }))
        .expect("ledger serialization")
    }
}

/// Which node aggregates the DEZF Gram uploads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DezfTopology {
    /// BCUs upload to a fusion node which broadcasts the aggregates back.
    /// Matches the default analytic load formula.
    #[default]
    FusionNode,
    /// BCUs broadcast peer-to-peer and aggregate locally; no echo.
    PeerBroadcast,
}

/// Outcome of one APD protocol execution, with per-BCU state retained for
/// consensus checks.
#[derive(Debug, Clone)]
pub struct ApdRun {
    pub precoder: Precoder,
    pub ledger: BusLedger,
    /// The aggregate Gram matrix each BCU independently assembled.
    pub bcu_grams: Vec<CMat>,
    pub strongest: Vec<usize>,
}

fn check_inputs(ch: &ChannelSet, cfg: &SystemConfig) -> Result<()> {
    cfg.validate()?;
    if ch.k != cfg.k || ch.n_r != cfg.n_r || ch.n_t != cfg.n_t || ch.p != cfg.p || ch.m != cfg.m {
        return Err(Error::DimensionMismatch(
            "channel set does not match system configuration".into(),
        ));
    }
    Ok(())
}

/// Centralized reference: the CPU computes everything locally and streams
/// precoded vectors, `ζ_CEN = 2τN_T`.
pub fn run_centralized(ch: &ChannelSet, cfg: &SystemConfig) -> Result<(Precoder, BusLedger)> {
    check_inputs(ch, cfg)?;
    let eq = equalizer::exact_equalizers(ch, cfg.l)?;
    let eff = precoder::effective_channel(ch, &eq)?;
    let grams = precoder::gram_accumulate(&eff)?;
    let pre = precoder::ezf_precoder(&eff, &grams, Scheme::Cen)?;
    let mut ledger = BusLedger::default();
    for _ in 0..cfg.tau {
        ledger.record(
            NodeId::Fusion,
            MessageClass::PrecodedVector,
            MsgDims::Vector { len: cfg.n_t },
        )?;
    }
    Ok((pre, ledger))
}

/// APD protocol: metric broadcast, strongest-BCU equalizer broadcast, local
/// Gram broadcast, then τ symbol vectors from the source.
pub fn run_apd(ch: &ChannelSet, cfg: &SystemConfig) -> Result<(Precoder, BusLedger)> {
    let run = run_apd_traced(ch, cfg)?;
    Ok((run.precoder, run.ledger))
}

pub fn run_apd_traced(ch: &ChannelSet, cfg: &SystemConfig) -> Result<ApdRun> {
    check_inputs(ch, cfg)?;
    let l_tot = cfg.l_tot();
    let mut ledger = BusLedger::default();

    // Phase 1: every BCU broadcasts its K locally computed metrics.
    let mut table = vec![vec![0.0; cfg.p]; cfg.k];
    for p in 0..cfg.p {
        for (k, row) in table.iter_mut().enumerate() {
            row[p] = ch
                .bcu_block(k, p)?
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>();
            ledger.record(NodeId::Bcu(p), MessageClass::Metric, MsgDims::Scalar)?;
        }
    }
    let strongest = equalizer::strongest_bcu(&MetricTable { values: table });

    // Phase 2: each strongest BCU broadcasts its users' equalizer blocks.
    let eq = equalizer::approx_equalizers(ch, &strongest, cfg.l)?;
    for &p_star in &strongest {
        ledger.record(
            NodeId::Bcu(p_star),
            MessageClass::EqualizerBlock,
            MsgDims::Block {
                rows: cfg.n_r,
                cols: cfg.l,
            },
        )?;
    }

    // Phase 3: every BCU forms C_p from D and its local channel, then
    // broadcasts the Hermitian G_p.
    let mut c_blocks = Vec::with_capacity(cfg.p);
    let mut g_blocks = Vec::with_capacity(cfg.p);
    for p in 0..cfg.p {
        let mut c_p = CMat::zeros(l_tot, cfg.m);
        for k in 0..cfg.k {
            let rows = precoder::equalized_block(&eq.per_user[k], &ch.bcu_block(k, p)?);
            c_p.view_mut((k * cfg.l, 0), (cfg.l, cfg.m)).copy_from(&rows);
        }
        let g_p = &c_p * c_p.adjoint();
        ledger.record(
            NodeId::Bcu(p),
            MessageClass::LocalGram,
            MsgDims::Hermitian { d: l_tot },
        )?;
        c_blocks.push(c_p);
        g_blocks.push(g_p);
    }

    // Every BCU independently accumulates the aggregate Gram in BCU order.
    let mut bcu_grams = Vec::with_capacity(cfg.p);
    for _ in 0..cfg.p {
        let mut g = CMat::zeros(l_tot, l_tot);
        for g_p in &g_blocks {
            g += g_p;
        }
        bcu_grams.push(g);
    }

    let (gi, q) = precoder::gram_inverse(&bcu_grams[0])?;
    let q_inv_sqrt: Vec<f64> = q.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut w = CMat::zeros(cfg.n_t, l_tot);
    for (p, c_p) in c_blocks.iter().enumerate() {
        let w_p = precoder::block_precoder(c_p, &gi, &q_inv_sqrt);
        w.view_mut((p * cfg.m, 0), (cfg.m, l_tot)).copy_from(&w_p);
    }

    // Phase 4: the source broadcasts the symbol vector once per interval.
    for _ in 0..cfg.tau {
        ledger.record(
            NodeId::Source,
            MessageClass::SymbolVector,
            MsgDims::Vector { len: l_tot },
        )?;
    }

    Ok(ApdRun {
        precoder: Precoder {
            w,
            m: cfg.m,
            q,
            scheme: Scheme::Apd,
            zero_columns: Vec::new(),
        },
        ledger,
        bcu_grams,
        strongest,
    })
}

/// DEZF protocol: per-user channel Gram uploads, exact equalizers from the
/// aggregates, then local Gram sharing as in APD.
pub fn run_dezf(ch: &ChannelSet, cfg: &SystemConfig) -> Result<(Precoder, BusLedger)> {
    run_dezf_with_topology(ch, cfg, DezfTopology::default())
}

pub fn run_dezf_with_topology(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    topology: DezfTopology,
) -> Result<(Precoder, BusLedger)> {
    check_inputs(ch, cfg)?;
    let l_tot = cfg.l_tot();
    let mut ledger = BusLedger::default();

    // Uploads: each BCU sends K user Grams H_{k,p} H_{k,p}ᴴ.
    let mut user_grams = vec![CMat::zeros(cfg.n_r, cfg.n_r); cfg.k];
    for p in 0..cfg.p {
        for (k, agg) in user_grams.iter_mut().enumerate() {
            let block = ch.bcu_block(k, p)?;
            *agg += &block * block.adjoint();
            ledger.record(
                NodeId::Bcu(p),
                MessageClass::UserGram,
                MsgDims::Hermitian { d: cfg.n_r },
            )?;
        }
    }
    if topology == DezfTopology::FusionNode {
        for _ in 0..cfg.k {
            ledger.record(
                NodeId::Fusion,
                MessageClass::AggregateBroadcast,
                MsgDims::Hermitian { d: cfg.n_r },
            )?;
        }
    }

    // All BCUs derive identical exact equalizers from the aggregates.
    let eq = equalizer::exact_equalizers_via_gram(&user_grams, cfg.l)?;

    let mut c_blocks = Vec::with_capacity(cfg.p);
    let mut g = CMat::zeros(l_tot, l_tot);
    for p in 0..cfg.p {
        let mut c_p = CMat::zeros(l_tot, cfg.m);
        for k in 0..cfg.k {
            let rows = precoder::equalized_block(&eq.per_user[k], &ch.bcu_block(k, p)?);
            c_p.view_mut((k * cfg.l, 0), (cfg.l, cfg.m)).copy_from(&rows);
        }
        g += &c_p * c_p.adjoint();
        ledger.record(
            NodeId::Bcu(p),
            MessageClass::LocalGram,
            MsgDims::Hermitian { d: l_tot },
        )?;
        c_blocks.push(c_p);
    }
    if topology == DezfTopology::FusionNode {
        ledger.record(
            NodeId::Fusion,
            MessageClass::AggregateBroadcast,
            MsgDims::Hermitian { d: l_tot },
        )?;
    }

    let (gi, q) = precoder::gram_inverse(&g)?;
    let q_inv_sqrt: Vec<f64> = q.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut w = CMat::zeros(cfg.n_t, l_tot);
    for (p, c_p) in c_blocks.iter().enumerate() {
        let w_p = precoder::block_precoder(c_p, &gi, &q_inv_sqrt);
        w.view_mut((p * cfg.m, 0), (cfg.m, l_tot)).copy_from(&w_p);
    }

    for _ in 0..cfg.tau {
        ledger.record(
            NodeId::Source,
            MessageClass::SymbolVector,
            MsgDims::Vector { len: l_tot },
        )?;
    }

    Ok((
        Precoder {
            w,
            m: cfg.m,
            q,
            scheme: Scheme::Dezf,
            zero_columns: Vec::new(),
        },
        ledger,
    ))
}

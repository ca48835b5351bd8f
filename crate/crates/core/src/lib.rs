//! Clustered massive MU-MIMO downlink precoding: eigen-zero-forcing (EZF)
//! in centralized, approximate partially-decentralized (APD), decentralized
//! (DEZF), and fully-decentralized (FD) variants, plus fronthaul accounting
//! and a Monte Carlo BER engine.

pub mod busnet;
pub mod channel;
pub mod equalizer;
pub mod error;
pub mod fronthaul;
pub mod mcsim;
pub mod numerics;
pub mod precoder;

pub use channel::{ChannelKind, ChannelModel, ChannelSet, SystemConfig};
pub use equalizer::{EqualizerBank, EqualizerKind, MetricTable};
pub use error::{Error, Result};
pub use numerics::{C64, CMat, CVec};
pub use precoder::{EffectiveChannel, GramSet, Precoder, Scheme};

//! Link-level simulator for an in-band full-duplex ISAC transceiver that
//! multiplexes OFDM (communication) and AFDM (radar) within one PRI,
//! cancels self-interference in the affine domain via iterative Kaiser
//! windowing, and estimates target range/velocity from a single PRI via
//! post-coded time domain (PCTD) processing.

pub mod channel;
pub mod error;
pub mod frame;
pub mod metrics;
pub mod pctd;
pub mod pipeline;
pub mod sic;
pub mod signal;
pub mod transforms;
pub mod waveform;

pub use error::{Error, Result};
pub use signal::{Domain, Signal};
pub use transforms::DaftParams;

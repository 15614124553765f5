//! Multi-edge-type LDPC codes: ensembles, random code sampling, syndrome
//! belief-propagation decoding and rate adaptation.

mod code;
mod decoder;
mod ensemble;

pub use code::{adapt_rate, repetition_combine, sample_code, syndrome, SparseParityCheck};
pub use decoder::{bp_decode, BpDecoder, DecodeResult, LLR_CLAMP};
pub use ensemble::{builtin_ensemble, rate_002, rate_half_regular, BalanceReport, MultiEdgeEnsemble};

//! Simulation toolkit for stabilizer quantum LDPC codes over the
//! depolarizing channel.
//!
//! The crate covers the full pipeline: binary-symplectic stabilizer algebra
//! ([`stabilizer`]), dual-containing CSS code construction and file I/O
//! ([`codes`]), the depolarizing channel ([`channel`]), optimal channel
//! identification via quantum Fisher information ([`estimation`]), syndrome
//! belief-propagation decoding ([`decoder`]), and a seeded Monte-Carlo
//! harness measuring how imperfect channel estimates degrade QBER and FER
//! ([`montecarlo`]).

pub mod bits;
pub mod channel;
pub mod codes;
pub mod decoder;
pub mod estimation;
pub mod montecarlo;
pub mod stabilizer;

pub use channel::{flip_probability, kraus_weights, sample_error, ChannelParams};
pub use codes::{bicycle_code, load_code, save_code, validate_code, BicycleParams};
pub use decoder::{bp_decode, decode_with_retries, init_priors, PriorSplit, TannerGraph};
pub use estimation::{
    crb_variance, decoder_prior, fisher_entangled, fisher_unentangled, sample_estimate,
    EstimatorConfig, FisherArg, ProbeMode,
};
pub use montecarlo::{run_sweep, CodeSource, Metric, ResultTable, SweepConfig};
pub use stabilizer::{
    BinarySymplecticRow, Pauli, PauliErrorPattern, PauliString, ResidualClass, StabilizerMatrix,
    Syndrome,
};

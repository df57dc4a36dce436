//! Voice and transcript featurization.
//!
//! The crate turns WAV recordings and their transcripts into utterance-level
//! feature vectors, and provides the filtering, transformation, selection and
//! cross-validated baseline modeling used to analyse the resulting tables.

pub mod acoustic;
pub mod audio_io;
pub mod coherence;
pub mod featdict;
pub mod functionals;
pub mod mlpipe;
pub mod textfeat;

#[cfg(test)]
pub(crate) mod test_signals;

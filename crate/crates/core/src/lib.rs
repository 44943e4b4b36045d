//! Japanese TTS label toolkit.
//!
//! * [`label`]: parse, validate and convert accent-phrase label strings.
//! * [`codec`]: display/interchange symbol substitution.
//! * [`lexicon`]: pronunciation dictionary, segmentation, candidate lattices.
//! * [`decoder`]: dictionary-guided pronunciation correction.
//! * [`metrics`]: CER, boundary accuracy and pitch F1.
//! * [`jsonl`] and [`cli`]: corpus files and the command-line front end.

pub mod cli;
pub mod codec;
pub mod decoder;
pub mod distance;
pub mod jsonl;
pub mod label;
pub mod lexicon;
pub mod metrics;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/notation.md")]
    mod notation {}
    #[doc = include_str!("../../../book/src/pitch.md")]
    mod pitch {}
    #[doc = include_str!("../../../book/src/lexicon.md")]
    mod lexicon {}
    #[doc = include_str!("../../../book/src/correction.md")]
    mod correction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

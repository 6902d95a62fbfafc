pub mod blocks;
pub mod density;
pub mod error;
pub mod pairing;
pub mod periodic;
pub mod pointclass;
pub mod rational;
pub mod reduce;
pub mod report;
pub mod words;

pub use density::{density, max_deviation, DensityTracker, WindowCounter};
pub use error::{Error, Result};
pub use pairing::{pair, triple, unpair, untriple};
pub use periodic::{
    limit_density, modulus, restrict_modulus, EventuallyPeriodicWord, ModulusTable,
};
pub use rational::{ratio, Rational};
pub use words::Word;

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/densities.md")]
    mod densities {}
    #[doc = include_str!("../../../book/src/periodic.md")]
    mod periodic {}
    #[doc = include_str!("../../../book/src/blocks.md")]
    mod blocks {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}

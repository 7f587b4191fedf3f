pub mod error;
pub mod geometry;
pub mod kernel;
pub mod objectives;
pub mod optimality;
pub mod ssd;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-kernel.md")]
    mod exact_kernel {}
    #[doc = include_str!("../../../book/src/tangent-cones.md")]
    mod tangent_cones {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/subgradients.md")]
    mod subgradients {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

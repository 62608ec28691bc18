//! Guide chapters, compiled as doc-tests so the book cannot drift from the API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/paulis.md")]
pub mod paulis {}
#[doc = include_str!("../../../book/src/blocks.md")]
pub mod blocks {}
#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}

//! Quantum process tomography on simulated qubit channels.
//!
//! The crate implements five ways of estimating the χ (process) matrix of an
//! unknown channel and compares what each of them costs:
//!
//! * [`sqpt`]: standard process tomography, `4^n` inputs times `4^n` Pauli
//!   observables, inverted through the `B` matrix.
//! * [`aapt_jsm`]: ancilla-assisted tomography with joint Pauli⊗Pauli
//!   measurements on a single faithful input.
//! * [`aapt_mub`]: ancilla-assisted tomography with `d+1` mutually unbiased
//!   basis measurements on the Choi state.
//! * [`aapt_povm`]: ancilla-assisted tomography with one universal observable
//!   measured jointly on two extra ancillas.
//! * [`dcqd`]: direct characterization with Bell-state measurements, where
//!   χ populations are read off outcome frequencies directly.
//!
//! Supporting modules hold the linear algebra ([`qcore`]), channel
//! representations ([`channels`]), projective measurement and seeded
//! sampling ([`measurement`]) and finite-ensemble statistics plus resource
//! accounting ([`stats`]).
//!
//! Qubit 0 is always the most significant tensor factor.

pub mod aapt_jsm;
pub mod aapt_mub;
pub mod aapt_povm;
pub mod channels;
pub mod dcqd;
pub mod dispatch;
pub mod error;
pub mod measurement;
pub mod qcore;
pub mod sqpt;
pub mod stats;

pub use channels::{ChannelSpec, ChiMatrix, KrausChannel};
pub use error::{QptError, Result};
pub use measurement::Mode;
pub use qcore::{ComplexMatrix, DensityOperator, PauliString, C64};

// Book chapters are compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/sqpt.md")]
    mod sqpt {}
    #[doc = include_str!("../../../book/src/aapt.md")]
    mod aapt {}
    #[doc = include_str!("../../../book/src/dcqd.md")]
    mod dcqd {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

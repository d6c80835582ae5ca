//! Heralded noiseless amplification and attenuation of optical quantum states.
//!
//! This crate simulates the conditional filter g^n̂ acting on single-mode states
//! of light.  For gain g > 1 the filter amplifies coherent amplitudes without
//! adding noise (|α⟩ → |gα⟩ up to normalisation); for g < 1 it attenuates them.
//! Both directions are probabilistic: the trace of the filtered state is the
//! heralding weight of the successful event.
//!
//! The crate is organised in layers:
//!
//! * [`fock`] — truncated Fock-space states and the exact action of g^n̂,
//!   used as the brute-force oracle for everything else.
//! * [`gaussian`] — closed-form transformation laws for Gaussian states
//!   (covariance matrix + displacement), including the physicality bound that
//!   limits amplification of squeezed states.
//! * [`phase_space`] — Husimi Q and Glauber–Sudarshan P representations and
//!   their pointwise transformation rules under the filter.
//! * [`nongaussian`] — closed-form effective gains for small Fock
//!   superpositions, coherent-state mixtures and photon-added coherent states,
//!   where the mean field can move *against* the direction of the filter.
//! * [`experiment`] — a three-mode model of a realistic photon-addition
//!   experiment (beam-splitter attenuator, inefficient heralding detector,
//!   impure addition source).
//! * [`scan`] — parameter sweeps driven by a TOML config, written as CSV.
//! * [`verify`] — randomized self-check suites cross-validating the layers
//!   against the Fock-space oracle.
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release -p heralded --example filter_basics
//! cargo run --release -p heralded --example gaussian_transform
//! cargo run --release -p heralded --example q_function
//! cargo run --release -p heralded --example counterexamples
//! cargo run --release -p heralded --example spacs_experiment
//! cargo run --release -p heralded --example scan_to_csv
//! ```

pub mod error;
pub mod experiment;
pub mod fock;
pub mod gaussian;
pub mod nongaussian;
pub mod phase_space;
pub mod scan;
pub mod verify;

pub use error::{Error, Result};

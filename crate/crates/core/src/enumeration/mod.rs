//! Nets over bounded-length inputs, the catalogs of strings a machine
//! produces from them, and the index programs that decode a string from
//! its catalog position.

mod catalog;
mod net;

pub use catalog::*;
pub use net::{
    build_certified, build_net, default_epsilon, CoverageCertificate, NetConfig, NetScheme, StateNet,
    CERTIFICATE_SAMPLES,
};

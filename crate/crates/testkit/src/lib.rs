//! Shared test support: a stub HTTP origin, a raw HTTP client, random
//! archive generators, fixture trees and an independent uuencode reference.

pub mod client;
pub mod fixtures;
pub mod gen;
pub mod origin;
pub mod uu_oracle;

pub use origin::{RecordedRequest, Reply, StubOrigin};

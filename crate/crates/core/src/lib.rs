//! Discovery, construction and exhaustive certification of complete addition
//! laws on projective models of elliptic curves, plus the genus-2 theta-divisor
//! construction, over small finite fields.

pub mod addlaws;
pub mod bihom;
pub mod complete;
pub mod construct_ec;
pub mod error;
pub mod field;
pub mod genus2;
pub mod hyperplane;
pub mod lawspace;
pub mod models;
pub mod poly;

pub use error::{Error, Result};
pub use field::{make_field, Embedding, Fe, Field};

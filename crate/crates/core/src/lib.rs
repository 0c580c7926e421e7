//! Unification types of finite posets, read as duals of finitely presented
//! pseudocomplemented distributive lattices.

pub mod bits;
pub mod canon;
pub mod conditions;
pub mod connectivity;
pub mod duality;
pub mod error;
pub mod io;
pub mod morphism;
pub mod oracle;
pub mod poset;
pub mod product;
pub mod typecheck;
pub mod variety;
pub mod witness;

pub use bits::BitSet;
pub use error::{Error, Result};
pub use morphism::{Budget, PMorphism};
pub use poset::Poset;
pub use variety::Variety;

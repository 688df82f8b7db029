//! Finite-model workbench for Heyting algebras, interior algebras and the
//! Grzegorczyk algebras between them.
//!
//! Elements are indices into operation tables (Heyting side) or atom
//! bitmasks (modal side). All constructions are exhaustive and deterministic:
//! whenever several witnesses exist, the lexicographically least is reported.

pub mod algebra;
pub mod bridge;
pub mod catalog;
pub mod error;
pub mod finlat;
pub mod freealg;
pub mod hom;
pub mod io;
pub mod modal;
pub mod ulogic;
pub mod verify;

pub use algebra::{Algebra, FiniteAlgebra, Limits, Signature};
pub use bridge::{AlgebraCatalog, OpenAlgebra};
pub use error::{Error, Result};
pub use finlat::{FinitePoset, HeytingAlgebra};
pub use hom::{HomKind, Homomorphism, SearchMode};
pub use modal::{BooleanSubalgebra, Filter, ModalAlgebra, Standard};
pub use ulogic::{Formula, Rule, UniversalSentence};

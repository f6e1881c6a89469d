//! Barcodes with overlap matchings.
//!
//! This crate implements the category **Barc** of barcodes — finite
//! multisets of decorated real intervals — whose morphisms are *overlap
//! matchings*: partial injections that only match an interval to one it
//! overlaps above.  On top of that sit:
//!
//! - kernels, cokernels, and epi-mono image factorizations in **Barc**
//!   ([`overlap`]);
//! - stratified diagrams, a finitely presented model of functors from the
//!   real line to the category of matchings, with the equivalence functors
//!   in both directions ([`diagram`]);
//! - δ-matchings, δ-interleavings, and an exact bottleneck distance with
//!   attainment information ([`interleaving`]);
//! - finitely presented persistence modules over a prime field, barcodes via
//!   rank functions, functorial kernel/image/cokernel barcodes, and the
//!   induced matching of a morphism ([`module`]);
//! - text formats and a command-line interface for all of the above
//!   ([`textio`]).
//!
//! Everything is generic over an exact ordered scalar ([`scalar::Scalar`]);
//! the aliases below fix arbitrary-precision rationals, which is what the
//! command-line tool uses.

pub mod barcode;
pub mod bipartite;
pub mod diagram;
pub mod error;
pub mod field;
pub mod interleaving;
pub mod interval;
pub mod matching;
pub mod module;
pub mod overlap;
pub mod scalar;
pub mod textio;

pub use error::{Error, Result};
pub use scalar::{ExtReal, Scalar, Threshold};

/// Default exact scalar: arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
/// Fixed-width rationals; exact while numerators and denominators fit `i64`.
pub type Rational64 = num_rational::Rational64;

/// Concrete aliases over the default scalar.
pub type RationalInterval = interval::Interval<Rational>;
pub type RationalBarcode = barcode::Barcode<Rational>;
pub type RationalOverlapMatching = overlap::OverlapMatching<Rational>;
pub type RationalDiagram = diagram::StratifiedDiagram<Rational>;
pub type RationalModule = module::PersistenceModule<Rational>;
pub type RationalMorphism = module::ModuleMorphism<Rational>;

//! Construction and machine certification of equichordal (EC) and
//! equi-isoclinic (EI) tight fusion frames.
//!
//! The library builds Grassmannian packings from character-theoretic data —
//! finite abelian groups, Gauss sums over finite fields, and complex
//! conference matrices — and certifies every claimed property (tightness,
//! Welch-bound saturation, equichordality, equi-isoclinicity, realness) with
//! explicit residuals against explicit tolerances.

pub mod abelian_group;
pub mod cmatrix;
pub mod conference;
pub mod constructions;
pub mod finite_field;
pub mod fusion_frame;
pub mod harmonic;

pub use abelian_group::{Character, FiniteAbelianGroup, GroupElement};
pub use cmatrix::{ComplexMatrix, MatrixError};
pub use conference::{ConferenceMatrix, Core, SignatureMatrix};
pub use constructions::{ClaimedClass, ConstructionError, Family, FamilyBuild, FamilySpec};
pub use finite_field::{AddChar, FieldElement, FiniteField, MultChar, Parity};
pub use fusion_frame::{Certificate, FrameError, FusionFrame};
pub use harmonic::{DftSpectrum, GeneratingTff, HarmonicClass, HarmonicClassification};

//! Computational toolkit for Richard Thompson's group F: the rewriting
//! system for standard forms and the word problem, an exact piecewise-linear
//! oracle, derivation certificates (the algebraic form of van Kampen
//! diagrams), and builders that produce explicit quadratic-area certificates
//! for every trivial word.

pub mod certify;
pub mod construct;
pub mod harness;
pub mod plmaps;
pub mod rewrite;
pub mod words;

//! Banded diagrams: the structured composite behind the horizontal and
//! vertical constructions. A banded diagram with `s` bands records a proof
//! of `y_1^{-1} u y_2 = z` where `y_j = x_0 y_{j1} x_0 y_{j2} ... x_0 y_{js}`,
//! exposing the `x_0`-bands and the wedges between them so that band areas
//! and wedge areas can be accounted for individually.

use super::{CertError, Certificate, P5};
use crate::words::{Letter, Word};
use std::sync::Arc;
use thiserror::Error;

/// An `x_0`-band: the strip of cells conjugating `top` by `x_0`, with
/// boundary `x_0^{-1} top x_0 psi(top)^{-1}` and area `|top|`.
pub struct Band {
    pub top: Word,
    pub cert: Certificate,
}

/// The region between two consecutive bands (or above the first band /
/// below the last). `nested` records sub-diagrams whose flattening the
/// wedge certificate incorporates, for introspection by the harness.
pub struct Wedge {
    pub cert: Certificate,
    pub nested: Vec<Arc<BandedDiagram>>,
}

impl Wedge {
    pub fn plain(cert: Certificate) -> Wedge {
        Wedge {
            cert,
            nested: Vec::new(),
        }
    }
}

pub struct BandedDiagram {
    pub top: Word,
    pub left_pieces: Vec<Word>,
    pub right_pieces: Vec<Word>,
    pub bands: Vec<Band>,
    pub wedges: Vec<Wedge>,
    pub bottom: Word,
}

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("banded diagram shape broken: {0}")]
    Shape(String),
    #[error("band {index} does not prove the conjugation of its top word")]
    BandBoundary { index: usize },
    #[error("wedge {index} boundary does not chain: expected {expected}, found {found}")]
    WedgeBoundary {
        index: usize,
        expected: Word,
        found: Word,
    },
    #[error(transparent)]
    Cert(#[from] CertError),
}

impl BandedDiagram {
    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Total cells: bands plus wedges.
    pub fn area(&self) -> u64 {
        self.bands.iter().map(|b| b.cert.area()).sum::<u64>()
            + self.wedges.iter().map(|w| w.cert.area()).sum::<u64>()
    }

    /// The side word `y_j = x_0 y_{j1} x_0 y_{j2} ... x_0 y_{js}`.
    fn side(pieces: &[Word]) -> Word {
        let x0 = Word::one(Letter::pos(0));
        let mut parts: Vec<&Word> = Vec::with_capacity(2 * pieces.len());
        for p in pieces {
            parts.push(&x0);
            parts.push(p);
        }
        Word::concat(&parts)
    }

    pub fn left_side(&self) -> Word {
        Self::side(&self.left_pieces)
    }

    pub fn right_side(&self) -> Word {
        Self::side(&self.right_pieces)
    }

    /// The boundary word `y_1^{-1} u y_2 z^{-1}` the flattened certificate

    /// proves.
    pub fn boundary(&self) -> Word {
        Word::concat(&[
            &self.left_side().inverse(),
            &self.top,
            &self.right_side(),
            &self.bottom.inverse(),
        ])
    }

    /// Balanced: the top, the bottom, and all side pieces avoid `x_0`.
    pub fn is_balanced(&self) -> bool {
        let free = |w: &Word| w.letters().iter().all(|l| l.index() > 0);
        free(&self.top)
            && free(&self.bottom)
            && self.left_pieces.iter().all(free)
            && self.right_pieces.iter().all(free)
    }

    /// The expected (chaining) boundary of wedge `i`.
    fn wedge_target(&self, i: usize) -> Word {
        let s = self.bands.len();
        if s == 0 {
            return Word::concat(&[&self.top, &self.bottom.inverse()]);
        }
        if i == 0 {
            return Word::concat(&[&self.top, &self.bands[0].top.inverse()]);
        }
        let below = if i == s {
            &self.bottom
        } else {
            &self.bands[i].top
        };
        Word::concat(&[
            &self.left_pieces[i - 1],
            below,
            &self.right_pieces[i - 1].inverse(),
            &self.bands[i - 1].top.shift(1).inverse(),
        ])
    }

    /// Validates the banded shape: piece/band/wedge counts, band boundaries,
    /// and the wedge chaining equations (up to free equality).
    pub fn check_chaining(&self) -> Result<(), ChainError> {
        let s = self.bands.len();
        if self.wedges.len() != s + 1 && !(s == 0 && self.wedges.len() == 1) {
            return Err(ChainError::Shape(format!(
                "{} bands need {} wedges, found {}",
                s,
                s + 1,
                self.wedges.len()
            )));
        }
        if self.left_pieces.len() != s || self.right_pieces.len() != s {
            return Err(ChainError::Shape(format!(
                "{} bands need {s} side pieces each, found {} and {}",
                s,
                self.left_pieces.len(),
                self.right_pieces.len()
            )));
        }
        let x0 = Word::one(Letter::pos(0));
        for (index, band) in self.bands.iter().enumerate() {
            let expected = Word::concat(&[
                &x0.inverse(),
                &band.top,
                &x0,
                &band.top.shift(1).inverse(),
            ]);
            if !band.cert.boundary().freely_equal(&expected) {
                return Err(ChainError::BandBoundary { index });
            }
        }
        for (index, wedge) in self.wedges.iter().enumerate() {
            let expected = self.wedge_target(index);
            if !wedge.cert.boundary().freely_equal(&expected) {
                return Err(ChainError::WedgeBoundary {
                    index,
                    expected,
                    found: wedge.cert.boundary().clone(),
                });
            }
        }
        Ok(())
    }

    /// Glue bands and wedges into one certificate with boundary
    /// `y_1^{-1} u y_2 z^{-1}`.
    pub fn flatten(&self) -> Result<Certificate, ChainError> {
        self.check_chaining()?;
        let x0 = Word::one(Letter::pos(0));
        let mut c = self.wedges[0].cert.clone();
        if self.bands.is_empty() {
            return Ok(c.with_boundary(self.boundary()));
        }
        for i in 1..=self.bands.len() {
            c = Certificate::glue(c.conjugate(x0.clone()), self.bands[i - 1].cert.clone())?;
            let y = self.left_pieces[i - 1].clone();
            c = Certificate::glue(
                c.conjugate(y.clone()),
                self.wedges[i].cert.clone().mirror().conjugate(y),
            )?;
        }
        Ok(c.with_boundary(self.boundary()))
    }

    /// The `(band, wedge)` pairs in top-to-bottom order: band `i` together
    /// with the wedge `Phi_i` below it (the last wedge is bounded below by
    /// the bottom word). Nested composites were spliced into this global
    /// ordering when the diagram was built.
    pub fn linearize_bands(&self) -> Vec<(&Band, &Wedge)> {
        self.bands.iter().zip(self.wedges[1..].iter()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Certificate;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// The one-band toy: u = x1, y1 = y2 = x0, z = x2.
    fn toy() -> BandedDiagram {
        let band_top = w("x1");
        let band = Band {
            cert: Certificate::band_conjugate(&band_top, 0).unwrap(),
            top: band_top,
        };
        BandedDiagram {
            top: w("x1"),
            left_pieces: vec![Word::empty()],
            right_pieces: vec![Word::empty()],
            bands: vec![band],
            wedges: vec![
                Wedge::plain(Certificate::empty(P5, w("x1 x1^-1"))),
                Wedge::plain(Certificate::empty(P5, w("x2 x2^-1"))),
            ],
            bottom: w("x2"),
        }
    }

    #[test]
    fn toy_flattens_to_the_relator() {
        let b = toy();
        assert!(b.is_balanced());
        let c = b.flatten().unwrap();
        assert_eq!(c.area(), 1);
        assert!(c.boundary().freely_equal(&w("x0^-1 x1 x0 x2^-1")));
        assert!(c.verify());
        assert_eq!(b.linearize_bands().len(), 1);
        assert_eq!(b.area(), 1);
    }

    #[test]
    fn chaining_violation_detected() {
        let mut b = toy();
        b.bottom = w("x3");
        assert!(matches!(
            b.flatten(),
            Err(ChainError::WedgeBoundary { index: 1, .. })
        ));
    }

    #[test]
    fn zero_band_diagram_flattens_to_its_wedge() {
        let c = Certificate::single(
            P5,
            Word::empty(),
            crate::certify::RelatorId::Pr { i: 1, j: 2 },
            1,
        )
        .unwrap();
        let b = BandedDiagram {
            top: w("x1^-1 x2 x1"),
            left_pieces: vec![],
            right_pieces: vec![],
            bands: vec![],
            wedges: vec![Wedge::plain(c)],
            bottom: w("x3"),
        };
        let f = b.flatten().unwrap();
        assert_eq!(f.area(), 1);
        assert!(f.verify());
    }
}

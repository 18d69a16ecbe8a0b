//! Certificate JSON:
//! `{"presentation": {"kind":"pr","r":5} | {"kind":"finite"},
//!   "boundary": "<word>",
//!   "steps": [{"u":"<word>","rel":[i,j] | 1 | 2, "e": 1 | -1}, ...]}`

use super::{CertStep, Certificate, Presentation, RelatorId};
use crate::words::Word;
use serde::{Deserialize, Serialize};
use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("bad word: {0}")]
    Word(#[from] crate::words::ParseWordError),
    #[error("bad relator in step {0}")]
    Relator(usize),
    #[error("bad exponent {0} (must be 1 or -1)")]
    Exponent(i8),
    #[error("bad presentation")]
    Presentation,
}

#[derive(Serialize, Deserialize)]
struct PresentationDto {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RelDto {
    Pair([u64; 2]),
    Index(u8),
}

#[derive(Serialize, Deserialize)]
struct StepDto {
    u: String,
    rel: RelDto,
    e: i8,
}

impl Certificate {
    /// Stream the certificate to a writer in the documented schema. Steps
    /// are materialized one at a time.
    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let pres = match self.presentation() {
            Presentation::Pr { r } => PresentationDto {
                kind: "pr".into(),
                r: Some(r),
            },
            Presentation::Finite => PresentationDto {
                kind: "finite".into(),
                r: None,
            },
        };
        write!(out, "{{\"presentation\":")?;
        serde_json::to_writer(&mut out, &pres)?;
        write!(out, ",\"boundary\":")?;
        serde_json::to_writer(&mut out, &self.boundary().to_string())?;
        write!(out, ",\"steps\":[")?;
        let mut first = true;
        let mut err: Option<io::Error> = None;
        self.for_each_step(&mut |step| {
            if err.is_some() {
                return;
            }
            let dto = StepDto {
                u: step.conjugator.to_string(),
                rel: match step.relator {
                    RelatorId::Pr { i, j } => RelDto::Pair([i as u64, j as u64]),
                    RelatorId::Finite(k) => RelDto::Index(k),
                },
                e: step.exponent,
            };
            let sep = if first { "" } else { "," };
            first = false;
            if let Err(e) = write!(out, "{sep}").and_then(|_| {
                serde_json::to_writer(&mut out, &dto).map_err(io::Error::from)
            }) {
                err = Some(e);
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        writeln!(out, "]}}")
    }

    pub fn to_json_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("json is utf8")
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Certificate, JsonError> {
        #[derive(Deserialize)]
        struct CertDto {
            presentation: PresentationDto,
            boundary: String,
            steps: Vec<StepDto>,
        }
        let dto: CertDto = serde_json::from_reader(reader)?;
        let presentation = match (dto.presentation.kind.as_str(), dto.presentation.r) {
            ("pr", Some(r)) if r >= 1 => Presentation::Pr { r },
            ("finite", None) => Presentation::Finite,
            _ => return Err(JsonError::Presentation),
        };
        let boundary: Word = dto.boundary.parse()?;
        let mut steps = Vec::with_capacity(dto.steps.len());
        for (n, s) in dto.steps.into_iter().enumerate() {
            if s.e != 1 && s.e != -1 {
                return Err(JsonError::Exponent(s.e));
            }
            let relator = match s.rel {
                RelDto::Pair([i, j]) => {
                    let (Ok(i), Ok(j)) = (u32::try_from(i), u32::try_from(j)) else {
                        return Err(JsonError::Relator(n));
                    };
                    RelatorId::Pr { i, j }
                }
                RelDto::Index(k) => RelatorId::Finite(k),
            };
            steps.push(CertStep {
                conjugator: s.u.parse()?,
                relator,
                exponent: s.e,
            });
        }
        Certificate::from_steps(presentation, boundary, steps).map_err(|_| JsonError::Presentation)
    }

    pub fn from_json_str(s: &str) -> Result<Certificate, JsonError> {
        Certificate::from_json_reader(s.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Certificate, RelatorId, P5};
    use crate::words::Word;

    #[test]
    fn json_roundtrip_preserves_verification_and_area() {
        let band = Certificate::band_conjugate(&"x1 x2^-1 x3".parse().unwrap(), 0).unwrap();
        let cert = Certificate::glue(band.clone(), band.mirror()).unwrap();
        let s = cert.to_json_string();
        let back = Certificate::from_json_str(&s).unwrap();
        assert_eq!(back.area(), cert.area());
        assert_eq!(back.presentation(), cert.presentation());
        assert!(back.verify());
        assert!(back.verify_materialized());
    }

    #[test]
    fn json_schema_shape() {
        let c = Certificate::single(P5, Word::empty(), RelatorId::Pr { i: 0, j: 1 }, 1).unwrap();
        let s = c.to_json_string();
        assert!(s.contains("\"presentation\":{\"kind\":\"pr\",\"r\":5}"));
        assert!(s.contains("\"boundary\":\"x0^-1 x1 x0 x2^-1\""));
        assert!(s.contains("\"rel\":[0,1]"));
        let fin = Certificate::glue(c.clone(), c.mirror())
            .unwrap()
            .to_finite()
            .unwrap();
        let s = fin.to_json_string();
        assert!(s.contains("\"presentation\":{\"kind\":\"finite\"}"));
    }

    #[test]
    fn finite_rel_index_roundtrip() {
        let c = Certificate::single(
            crate::certify::Presentation::Finite,
            "x0".parse().unwrap(),
            RelatorId::Finite(1),
            1,
        )
        .unwrap();
        let back = Certificate::from_json_str(&c.to_json_string()).unwrap();
        assert!(back.verify_materialized() == c.verify_materialized());
        assert_eq!(back.area(), 1);
    }
}

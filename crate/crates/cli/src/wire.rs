//! Serialized document formats (JSON is the source of truth; CSV and tables
//! are projections of it).
//!
//! Schemas ship under `schemas/` at the repository root and are versioned in
//! the `schema` field of every document. Floats go through serde_json's
//! shortest round-trip representation, so parsing a document reproduces the
//! original bits and identical inputs serialize byte-identically.

use dirac_selberg::hyperbolic::UnimodularMatrix;
use dirac_selberg::spin::{epsilon, SpinStructure};
use dirac_selberg::surfaces::{LengthSpectrum, SurfacePresentation, Word};
use dirac_selberg::{Error, Result};
use serde::{Deserialize, Serialize};

pub const SURFACE_SCHEMA: &str = "dirac-selberg/surface.v1";
pub const SPECTRUM_SCHEMA: &str = "dirac-selberg/spectrum.v1";
pub const RESULT_SCHEMA: &str = "dirac-selberg/result.v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub schema: String,
    pub label: String,
    pub genus: usize,
    pub cusps: usize,
    pub area: f64,
    /// Row-major [a, b, c, d] per generator.
    pub generators: Vec<[f64; 4]>,
    /// Compact letter notation (`A`–`Z` generators, lowercase inverses).
    pub parabolic_words: Vec<String>,
    pub relations: Vec<String>,
}

impl SurfaceDoc {
    pub fn from_surface(s: &SurfacePresentation) -> Self {
        SurfaceDoc {
            schema: SURFACE_SCHEMA.into(),
            label: s.label.clone(),
            genus: s.genus,
            cusps: s.cusps,
            area: s.area,
            generators: s.generators.iter().map(|m| [m.a, m.b, m.c, m.d]).collect(),
            parabolic_words: s.parabolic_words.iter().map(|w| w.to_string()).collect(),
            relations: s.relations.iter().map(|w| w.to_string()).collect(),
        }
    }

    pub fn to_surface(&self) -> Result<SurfacePresentation> {
        if self.schema != SURFACE_SCHEMA {
            return Err(Error::Domain(format!(
                "unexpected schema {:?} (want {SURFACE_SCHEMA})",
                self.schema
            )));
        }
        let generators = self
            .generators
            .iter()
            .map(|m| UnimodularMatrix::new(m[0], m[1], m[2], m[3]))
            .collect::<Result<Vec<_>>>()?;
        let parabolic_words = self
            .parabolic_words
            .iter()
            .map(|w| Word::parse(w))
            .collect::<Result<Vec<_>>>()?;
        let relations = self
            .relations
            .iter()
            .map(|w| Word::parse(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(SurfacePresentation {
            generators,
            parabolic_words,
            relations,
            genus: self.genus,
            cusps: self.cusps,
            area: self.area,
            label: self.label.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRecordDoc {
    pub length: f64,
    pub trace: f64,
    pub word: String,
    pub primitive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primitive_root: Option<String>,
    /// ±1 marking; present only when a spin structure was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<i8>,
    pub orientation_pair_id: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub schema: String,
    pub surface: SurfaceDoc,
    pub r_max: f64,
    pub word_cap: usize,
    pub complete_up_to: f64,
    /// The completeness watermark is a frontier heuristic, not a rigorous
    /// certificate; this flag is always true and serialized for honesty.
    pub watermark_heuristic: bool,
    pub incomplete: bool,
    pub overflow: bool,
    pub tail_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin: Option<Vec<i8>>,
    pub records: Vec<SpectrumRecordDoc>,
    pub warnings: Vec<String>,
}

impl SpectrumDoc {
    pub fn build(
        surface: &SurfacePresentation,
        spectrum: &LengthSpectrum,
        spin: Option<&SpinStructure>,
    ) -> Result<Self> {
        let mut warnings = Vec::new();
        if spectrum.incomplete {
            warnings.push(format!(
                "word cap {} certifies the spectrum only up to {:.6} (requested {:.6})",
                spectrum.word_length_cap, spectrum.complete_up_to, spectrum.requested_r_max
            ));
        }
        if spectrum.overflow {
            warnings.push("matrix entries overflowed the enumeration cap; some words were dropped".into());
        }
        if spin.is_none() {
            warnings.push("no spin structure supplied; epsilon column omitted".into());
        }
        let mut records = Vec::with_capacity(spectrum.records.len());
        for rec in &spectrum.records {
            let eps = match spin {
                Some(sp) => Some(epsilon(sp, &rec.word, surface)?),
                None => None,
            };
            records.push(SpectrumRecordDoc {
                length: rec.length,
                trace: rec.trace,
                word: rec.word.to_string(),
                primitive: rec.primitive,
                primitive_root: rec.primitive_root.as_ref().map(|w| w.to_string()),
                epsilon: eps,
                orientation_pair_id: rec.inverse_index,
            });
        }
        Ok(SpectrumDoc {
            schema: SPECTRUM_SCHEMA.into(),
            surface: SurfaceDoc::from_surface(surface),
            r_max: spectrum.requested_r_max,
            word_cap: spectrum.word_length_cap,
            complete_up_to: spectrum.complete_up_to,
            watermark_heuristic: true,
            incomplete: spectrum.incomplete,
            overflow: spectrum.overflow,
            tail_constant: spectrum.tail_constant,
            spin: spin.map(|s| s.signs().to_vec()),
            records,
            warnings,
        })
    }

    /// CSV projection: `length,trace,word,primitive[,epsilon],orientation_pair_id`.
    pub fn to_csv(&self) -> String {
        let with_eps = self.spin.is_some();
        let mut out = String::new();
        if with_eps {
            out.push_str("length,trace,word,primitive,epsilon,orientation_pair_id\n");
        } else {
            out.push_str("length,trace,word,primitive,orientation_pair_id\n");
        }
        for r in &self.records {
            let pair = r
                .orientation_pair_id
                .map(|i| i.to_string())
                .unwrap_or_default();
            if with_eps {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.length,
                    r.trace,
                    r.word,
                    r.primitive,
                    r.epsilon.unwrap_or(0),
                    pair
                ));
            } else {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.length, r.trace, r.word, r.primitive, pair
                ));
            }
        }
        out
    }
}

/// One named check inside a result document: the identity or limit the run
/// exercises, the configured tolerance, the observed value, and the verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckDoc {
    pub name: String,
    pub statement: String,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for ComplexDoc {
    fn from(z: num_complex::Complex64) -> Self {
        ComplexDoc { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometricSideDoc {
    pub identity: ComplexDoc,
    pub hyperbolic: ComplexDoc,
    pub cusp: ComplexDoc,
    pub total: ComplexDoc,
    pub hyperbolic_tail_bound: f64,
    pub quadrature_err: f64,
}

impl From<&dirac_selberg::GeometricSide> for GeometricSideDoc {
    fn from(g: &dirac_selberg::GeometricSide) -> Self {
        GeometricSideDoc {
            identity: g.identity.into(),
            hyperbolic: g.hyperbolic.into(),
            cusp: g.cusp.into(),
            total: g.total.into(),
            hyperbolic_tail_bound: g.hyperbolic_tail_bound,
            quadrature_err: g.quadrature_err,
        }
    }
}

/// Generic result envelope: inputs echo, per-command payload, checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDoc {
    pub schema: String,
    pub command: String,
    pub inputs: serde_json::Value,
    pub results: serde_json::Value,
    pub checks: Vec<CheckDoc>,
    pub warnings: Vec<String>,
}

impl ResultDoc {
    pub fn new(command: &str, inputs: serde_json::Value, results: serde_json::Value) -> Self {
        ResultDoc {
            schema: RESULT_SCHEMA.into(),
            command: command.into(),
            inputs,
            results,
            checks: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

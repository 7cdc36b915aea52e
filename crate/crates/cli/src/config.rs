//! Run configuration with flags > config file > defaults precedence.
//!
//! The config file is a flat JSON object whose keys mirror the long flags
//! (`r_max`, `word_cap`, `n_max`, `m_max`, `abs_tol`, `rel_tol`,
//! `max_subdivisions`, `cutoff`, `spin`, `format`, `check_tol`).

use dirac_selberg::{Error, QuadratureSpec, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub r_max: Option<f64>,
    pub word_cap: Option<usize>,
    pub n_max: Option<usize>,
    pub m_max: Option<usize>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<u32>,
    pub cutoff: Option<f64>,
    pub spin: Option<String>,
    pub format: Option<String>,
    pub check_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Domain(format!("config {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Domain(format!("config {}: {e}", p.display())))
            }
        }
    }
}

/// Resolved truncation and tolerance settings shared by the commands.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub r_max: f64,
    pub word_cap: usize,
    pub n_max: Option<usize>,
    pub m_max: usize,
    pub quadrature: QuadratureSpec,
    pub check_tol: f64,
}

pub struct Precedence<'a> {
    pub file: &'a FileConfig,
}

impl Precedence<'_> {
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        &self,
        r_max: Option<f64>,
        word_cap: Option<usize>,
        n_max: Option<usize>,
        m_max: Option<usize>,
        abs_tol: Option<f64>,
        rel_tol: Option<f64>,
        check_tol: Option<f64>,
    ) -> Result<Resolved> {
        let defaults = QuadratureSpec::default();
        let resolved = Resolved {
            r_max: r_max.or(self.file.r_max).unwrap_or(6.0),
            word_cap: word_cap.or(self.file.word_cap).unwrap_or(10),
            n_max: n_max.or(self.file.n_max),
            m_max: m_max.or(self.file.m_max).unwrap_or(120),
            quadrature: QuadratureSpec {
                abs_tol: abs_tol.or(self.file.abs_tol).unwrap_or(1e-10),
                rel_tol: rel_tol.or(self.file.rel_tol).unwrap_or(1e-10),
                max_subdivisions: self.file.max_subdivisions.unwrap_or(40_000),
                cutoff: self.file.cutoff.unwrap_or(defaults.cutoff),
            },
            check_tol: check_tol.or(self.file.check_tol).unwrap_or(1e-6),
        };
        if !(resolved.r_max > 0.0) || resolved.word_cap == 0 {
            return Err(Error::Domain("truncation settings must be positive".into()));
        }
        resolved.quadrature.validate()?;
        Ok(resolved)
    }
}

/// Parses a complex number given as `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|e| Error::Domain(format!("bad number {t:?}: {e}")))
    };
    match parts.as_slice() {
        [re] => Ok(num_complex::Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(num_complex::Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(Error::Domain(format!("complex value {s:?} must be re or re,im"))),
    }
}

//! Coefficient files.
//!
//! ```json
//! {"type": "maass", "s": [0.5, 9.5337], "parity": "odd",
//!  "coefficients": [{"n": 1, "re": 1.0, "im": 0.0}, {"n": 2, "re": -1.068, "im": 0.0}]}
//! ```
//!
//! `type` is `maass`, `holomorphic` (with integer `k`, weight `2k`) or `eisenstein`
//! (no coefficient list). Coefficients are the classical `a_n` / `c_n`.

use std::collections::BTreeMap;
use std::path::Path;

use periodlab_core::autoforms::{
    eisenstein_coefficients, holomorphic_coefficients, CoefficientSet, MaassForm, Normalization, Parity, SpectralParam,
};
use periodlab_core::Complex64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Maass,
    Holomorphic,
    Eisenstein,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ParityField {
    Even,
    Odd,
    None,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    n: i64,
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    #[serde(rename = "type")]
    kind: Kind,
    s: Option<[f64; 2]>,
    k: Option<u32>,
    parity: ParityField,
    coefficients: Option<Vec<Entry>>,
}

/// A validated coefficient file.
#[derive(Clone, Debug)]
pub enum Loaded {
    Maass(MaassForm),
    Holomorphic(CoefficientSet),
    Eisenstein(SpectralParam),
}

impl Loaded {
    pub fn type_name(&self) -> &'static str {
        match self {
            Loaded::Maass(_) => "maass",
            Loaded::Holomorphic(_) => "holomorphic",
            Loaded::Eisenstein(_) => "eisenstein",
        }
    }

    /// Hyperfunction data; `n_max` is used only for generated Eisenstein data.
    pub fn coefficient_set(&self, n_max: usize) -> Result<CoefficientSet, CliError> {
        Ok(match self {
            Loaded::Maass(form) => form.coefficients()?,
            Loaded::Holomorphic(set) => set.clone(),
            Loaded::Eisenstein(s) => eisenstein_coefficients(*s, n_max, Normalization::Family)?,
        })
    }
}

fn schema(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {msg}", path.display()))
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(path, e))?;
    parse(&text).map_err(|e| match e {
        CliError::Parse(msg) => schema(path, msg),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<Loaded, CliError> {
    let file: File = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let parity = match file.parity {
        ParityField::Even => Parity::Even,
        ParityField::Odd => Parity::Odd,
        ParityField::None => Parity::None,
    };
    let field = |msg: &str| CliError::Parse(msg.to_string());
    let s = file.s.map(|[re, im]| Complex64::new(re, im));
    if let Some(s) = s {
        if !s.re.is_finite() || !s.im.is_finite() {
            return Err(field("field \"s\" must be finite"));
        }
    }
    let mut data = BTreeMap::new();
    for (i, e) in file.coefficients.iter().flatten().enumerate() {
        if !e.re.is_finite() || !e.im.is_finite() {
            return Err(CliError::Parse(format!("coefficients[{i}] (n = {}) is not finite", e.n)));
        }
        if data.insert(e.n, Complex64::new(e.re, e.im)).is_some() {
            return Err(CliError::Parse(format!("coefficients[{i}]: n = {} appears twice", e.n)));
        }
    }
    match file.kind {
        Kind::Maass => {
            let s = s.ok_or_else(|| field("type \"maass\" needs field \"s\""))?;
            if file.k.is_some() {
                return Err(field("type \"maass\" does not take field \"k\""));
            }
            if file.coefficients.is_none() {
                return Err(field("type \"maass\" needs field \"coefficients\""));
            }
            Ok(Loaded::Maass(MaassForm::new(SpectralParam::from_s(s), &data, parity).map_err(invalid)?))
        }
        Kind::Holomorphic => {
            let k = file.k.ok_or_else(|| field("type \"holomorphic\" needs field \"k\""))?;
            if s.is_some() {
                return Err(field("type \"holomorphic\" takes \"k\", not \"s\""));
            }
            if parity != Parity::None {
                return Err(field("type \"holomorphic\" data are one-sided; parity must be \"none\""));
            }
            if file.coefficients.is_none() {
                return Err(field("type \"holomorphic\" needs field \"coefficients\""));
            }
            Ok(Loaded::Holomorphic(holomorphic_coefficients(&data, k).map_err(invalid)?))
        }
        Kind::Eisenstein => {
            let s = s.ok_or_else(|| field("type \"eisenstein\" needs field \"s\""))?;
            if file.k.is_some() {
                return Err(field("type \"eisenstein\" does not take field \"k\""));
            }
            if parity == Parity::Odd {
                return Err(field("the Eisenstein series is even; parity \"odd\" contradicts it"));
            }
            if file.coefficients.as_ref().is_some_and(|c| !c.is_empty()) {
                return Err(field("type \"eisenstein\" coefficients are generated; omit \"coefficients\""));
            }
            Ok(Loaded::Eisenstein(SpectralParam::from_s(s)))
        }
    }
}

fn invalid(e: periodlab_core::Error) -> CliError {
    CliError::Parse(e.to_string())
}

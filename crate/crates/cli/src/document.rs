//! JSON polynomial documents.
//!
//! ```json
//! {
//!   "n": 1,
//!   "k": 1,
//!   "coefficients": [ [[[-2, 0]]], [[[1, 0]]] ],
//!   "weights": { "mode": "abs" }
//! }
//! ```
//!
//! `coefficients[i]` is `B_i` as a list of rows; every entry is `[re, im]`.
//! `weights.mode` is one of `coeff`, `max`, `abs`, `custom`; `custom`
//! requires `weights.values` with `k + 1` entries.

use polycond::numlin::{ComplexMatrix, C64};
use polycond::poly::{MatrixPolynomial, WeightMode, WeightScheme};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDocument {
    pub n: usize,
    pub k: usize,
    pub coefficients: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDocument {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

pub fn parse_weight_mode(s: &str) -> CliResult<WeightMode> {
    match s {
        "coeff" => Ok(WeightMode::CoefficientNorms),
        "max" => Ok(WeightMode::MaxNorm),
        "abs" => Ok(WeightMode::Absolute),
        "custom" => Ok(WeightMode::Custom),
        other => Err(CliError::Parse(format!(
            "unknown weight mode '{other}' (expected coeff, max, abs or custom)"
        ))),
    }
}

impl PolynomialDocument {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Structural checks with the path of the first offending field.
    fn validate(&self) -> CliResult<()> {
        fn bad<T>(field: String, msg: String) -> CliResult<T> {
            Err(CliError::Parse(format!("field {field}: {msg}")))
        }
        if self.n == 0 {
            return bad("n".into(), "must be positive".into());
        }
        if self.coefficients.len() != self.k + 1 {
            return bad(
                "coefficients".into(),
                format!("expected k + 1 = {} matrices, found {}", self.k + 1, self.coefficients.len()),
            );
        }
        for (i, b) in self.coefficients.iter().enumerate() {
            if b.len() != self.n {
                return bad(format!("coefficients[{i}]"), format!("expected {} rows, found {}", self.n, b.len()));
            }
            for (r, row) in b.iter().enumerate() {
                if row.len() != self.n {
                    return bad(
                        format!("coefficients[{i}][{r}]"),
                        format!("expected {} entries, found {}", self.n, row.len()),
                    );
                }
                if let Some(c) = row.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
                    return bad(format!("coefficients[{i}][{r}][{c}]"), "entry is not finite".into());
                }
            }
        }
        if let Some(w) = &self.weights {
            let mode = parse_weight_mode(&w.mode).or_else(|e| bad("weights.mode".into(), e.to_string()))?;
            match (&w.values, mode) {
                (Some(v), _) if v.len() != self.k + 1 => {
                    return bad("weights.values".into(), format!("expected {} values, found {}", self.k + 1, v.len()));
                }
                (None, WeightMode::Custom) => {
                    return bad("weights.values".into(), "required when mode is custom".into());
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn polynomial(&self) -> CliResult<MatrixPolynomial> {
        let mats = self
            .coefficients
            .iter()
            .map(|b| {
                let rows: Vec<Vec<C64>> =
                    b.iter().map(|row| row.iter().map(|z| C64::new(z[0], z[1])).collect()).collect();
                ComplexMatrix::from_rows(&rows)
            })
            .collect::<polycond::Result<Vec<_>>>()?;
        Ok(MatrixPolynomial::new(mats)?)
    }

    pub fn from_polynomial(p: &MatrixPolynomial, weights: Option<WeightsDocument>) -> Self {
        let n = p.n();
        Self {
            n,
            k: p.grade(),
            coefficients: p
                .coefficients()
                .iter()
                .map(|b| (0..n).map(|i| (0..n).map(|j| [b[(i, j)].re, b[(i, j)].im]).collect()).collect())
                .collect(),
            weights,
        }
    }

    /// Weights chosen by `mode` (falling back to the document, then to `coeff`),
    /// with explicit values taking precedence for `custom`.
    pub fn weights(&self, p: &MatrixPolynomial, mode: Option<WeightMode>, values: Option<Vec<f64>>) -> CliResult<WeightScheme> {
        let doc_mode = self.weights.as_ref().map(|w| parse_weight_mode(&w.mode)).transpose()?;
        let mode = mode.or(doc_mode).unwrap_or(WeightMode::CoefficientNorms);
        let scheme = match mode {
            WeightMode::Absolute => WeightScheme::absolute(p.grade()),
            WeightMode::Custom => {
                let v = values
                    .or_else(|| self.weights.as_ref().and_then(|w| w.values.clone()))
                    .ok_or_else(|| CliError::Parse("custom weights need --weight-values or weights.values".into()))?;
                if v.len() != p.grade() + 1 {
                    return Err(CliError::Parse(format!("expected {} weight values, found {}", p.grade() + 1, v.len())));
                }
                WeightScheme::custom(v)?
            }
            m => WeightScheme::for_polynomial(m, p)?,
        };
        Ok(scheme)
    }
}

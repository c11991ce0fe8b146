//! JSON form of certificates. Rationals are `"p/q"` strings; restriction matrices are lists
//! of rows whose width is the parent stratum's rank.

use serde::{Deserialize, Serialize};

use super::{
    verify_chain, verify_he_hypotheses, verify_hef_hypotheses, CertError, ChainCertificate,
    ChainStep, GridCell, GridCertificate, Stratum, Verdict,
};
use crate::ratcone::linalg::MatrixRows;
use crate::ratcone::{ClassVector, Matrix};

/// A certificate together with the statement it is meant to establish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Chain criterion for nefness of the divisor itself.
    Chain(ChainCertificate),
    /// Chain hypotheses for `H - E` on a single blowup.
    BlowupE(ChainCertificate),
    /// Grid hypotheses for `H - E - F` on the two-step blowup.
    BlowupEf(GridCertificate),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    #[default]
    Chain,
    BlowupE,
    BlowupEf,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    rank: usize,
    restriction: MatrixRows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next_class: Option<ClassVector>,
    #[serde(default)]
    oracle_curves: Vec<ClassVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    rank: usize,
    restriction: MatrixRows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alt_restriction: Option<MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next_a: Option<ClassVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next_b: Option<ClassVector>,
    #[serde(default)]
    oracle_curves: Vec<ClassVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertificate {
    #[serde(default)]
    kind: Kind,
    root_rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    steps: Vec<RawStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    outer: Vec<RawStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    grid: Vec<Vec<RawCell>>,
    divisor: ClassVector,
}

fn bad(msg: impl Into<String>) -> CertError {
    CertError::Json(msg.into())
}

fn matrix(rows: MatrixRows, cols: usize, location: &str) -> Result<Matrix, CertError> {
    rows.into_matrix(cols)
        .map_err(|e| bad(format!("{location}: {e}")))
}

fn steps_from_raw(
    raw: Vec<RawStep>,
    root_rank: usize,
    prefix: &str,
) -> Result<Vec<ChainStep>, CertError> {
    let mut parent = root_rank;
    raw.into_iter()
        .enumerate()
        .map(|(i, s)| {
            let location = format!("{prefix} {i}");
            let restriction = matrix(s.restriction, parent, &location)?;
            parent = s.rank;
            Ok(ChainStep {
                stratum: Stratum {
                    id: s.id.unwrap_or(location),
                    rank: s.rank,
                    oracle: s.oracle_curves,
                },
                restriction,
                next_class: s.next_class,
            })
        })
        .collect()
}

fn step_to_raw(s: &ChainStep) -> RawStep {
    RawStep {
        id: Some(s.stratum.id.clone()),
        rank: s.stratum.rank,
        restriction: MatrixRows::from(&s.restriction),
        next_class: s.next_class.clone(),
        oracle_curves: s.stratum.oracle.clone(),
    }
}

impl Certificate {
    pub fn from_json(text: &str) -> Result<Self, CertError> {
        let raw: RawCertificate = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        match raw.kind {
            Kind::Chain | Kind::BlowupE => {
                if !raw.outer.is_empty() || !raw.grid.is_empty() {
                    return Err(bad("chain certificates take `steps` only"));
                }
                let cert = ChainCertificate {
                    root_rank: raw.root_rank,
                    steps: steps_from_raw(raw.steps, raw.root_rank, "step")?,
                    divisor: raw.divisor,
                };
                Ok(if raw.kind == Kind::Chain {
                    Certificate::Chain(cert)
                } else {
                    Certificate::BlowupE(cert)
                })
            }
            Kind::BlowupEf => {
                if !raw.steps.is_empty() {
                    return Err(bad("grid certificates take `outer` and `grid`"));
                }
                let outer = steps_from_raw(raw.outer, raw.root_rank, "outer")?;
                let corner_rank = outer.last().map_or(raw.root_rank, |s| s.stratum.rank);
                let ranks: Vec<Vec<usize>> = raw
                    .grid
                    .iter()
                    .map(|r| r.iter().map(|c| c.rank).collect())
                    .collect();
                let mut grid = Vec::with_capacity(raw.grid.len());
                for (i, row) in raw.grid.into_iter().enumerate() {
                    let mut cells = Vec::with_capacity(row.len());
                    for (j, c) in row.into_iter().enumerate() {
                        let location = format!("cell ({i},{j})");
                        let parent = if j > 0 {
                            ranks[i][j - 1]
                        } else if i > 0 {
                            ranks[i - 1][0]
                        } else {
                            corner_rank
                        };
                        let restriction = matrix(c.restriction, parent, &location)?;
                        let alt_restriction = match c.alt_restriction {
                            Some(m) if i > 0 => {
                                let above = ranks[i - 1].get(j).copied().ok_or_else(|| {
                                    bad(format!("{location}: grid is not rectangular"))
                                })?;
                                Some(matrix(m, above, &location)?)
                            }
                            Some(_) => {
                                return Err(bad(format!(
                                    "{location}: second restriction on the first row"
                                )))
                            }
                            None => None,
                        };
                        cells.push(GridCell {
                            stratum: Stratum {
                                id: c.id.unwrap_or(location),
                                rank: c.rank,
                                oracle: c.oracle_curves,
                            },
                            restriction,
                            alt_restriction,
                            next_a: c.next_a,
                            next_b: c.next_b,
                        });
                    }
                    grid.push(cells);
                }
                Ok(Certificate::BlowupEf(GridCertificate {
                    root_rank: raw.root_rank,
                    outer,
                    grid,
                    divisor: raw.divisor,
                }))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            Certificate::Chain(c) | Certificate::BlowupE(c) => RawCertificate {
                kind: if matches!(self, Certificate::Chain(_)) {
                    Kind::Chain
                } else {
                    Kind::BlowupE
                },
                root_rank: c.root_rank,
                steps: c.steps.iter().map(step_to_raw).collect(),
                outer: Vec::new(),
                grid: Vec::new(),
                divisor: c.divisor.clone(),
            },
            Certificate::BlowupEf(g) => RawCertificate {
                kind: Kind::BlowupEf,
                root_rank: g.root_rank,
                steps: Vec::new(),
                outer: g.outer.iter().map(step_to_raw).collect(),
                grid: g
                    .grid
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|c| RawCell {
                                id: Some(c.stratum.id.clone()),
                                rank: c.stratum.rank,
                                restriction: MatrixRows::from(&c.restriction),
                                alt_restriction: c.alt_restriction.as_ref().map(MatrixRows::from),
                                next_a: c.next_a.clone(),
                                next_b: c.next_b.clone(),
                                oracle_curves: c.stratum.oracle.clone(),
                            })
                            .collect()
                    })
                    .collect(),
                divisor: g.divisor.clone(),
            },
        };
        serde_json::to_string_pretty(&raw).expect("certificates serialize")
    }

    pub fn verify(&self) -> Result<Verdict, CertError> {
        match self {
            Certificate::Chain(c) => verify_chain(c),
            Certificate::BlowupE(c) => verify_he_hypotheses(c),
            Certificate::BlowupEf(g) => verify_hef_hypotheses(g),
        }
    }
}

//! File formats: the shared JSON matrix schema, OPD serialization with
//! reduction certificates, plain-text rate configs, and CSV emitters for
//! trajectories and positivity-domain point clouds.
//!
//! A matrix is stored as `{rows, cols, data}` with `data` a row-major list of
//! `[re, im]` pairs; bipartite operators add `dim_s` and `dim_e`.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PauliChannelFamily, TrajectoryPoint};
use crate::error::{Error, Result};
use crate::frames::{
    basis_induced_family, pauli_frame, FrameKind, FrameLabel, OperatorFrame,
};
use crate::hs::{BipartiteOperator, CMatrix, HsOperator, C64};
use crate::opd::{Elimination, Opd, OpdTerm, ReductionCertificate};
use crate::positivity::{Containment, DomainSample, PositivityVerdict, TwoMapRates};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_e: Option<usize>,
}

impl MatrixJson {
    pub fn from_operator(op: &HsOperator) -> Self {
        Self {
            rows: op.dim(),
            cols: op.dim(),
            data: row_major(op.matrix()),
            dim_s: None,
            dim_e: None,
        }
    }

    pub fn from_bipartite(op: &BipartiteOperator) -> Self {
        Self {
            rows: op.total_dim(),
            cols: op.total_dim(),
            data: row_major(op.matrix()),
            dim_s: Some(op.dim_s()),
            dim_e: Some(op.dim_e()),
        }
    }

    fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "matrix data has {} entries, expected {}",
                self.data.len(),
                self.rows * self.cols
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.data[r * self.cols + c];
            C64::new(re, im)
        }))
    }

    pub fn to_operator(&self) -> Result<HsOperator> {
        HsOperator::new(self.to_matrix()?)
    }

    /// Requires the `dim_s`/`dim_e` fields.
    pub fn to_bipartite(&self) -> Result<BipartiteOperator> {
        let dim_s = self
            .dim_s
            .ok_or_else(|| Error::Parse("missing dim_s for a bipartite matrix".into()))?;
        let dim_e = self
            .dim_e
            .ok_or_else(|| Error::Parse("missing dim_e for a bipartite matrix".into()))?;
        BipartiteOperator::new(dim_s, dim_e, self.to_matrix()?)
    }
}

fn row_major(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut data = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            data.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    data
}

fn nested(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn from_nested(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged coefficient matrix".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameJson {
    pub kind: FrameKind,
    pub dim: usize,
    pub labels: Vec<FrameLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<MatrixJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<MatrixJson>>,
    pub bounds: (f64, f64),
}

pub fn frame_to_json(frame: &OperatorFrame) -> FrameJson {
    FrameJson {
        kind: frame.kind(),
        dim: frame.dim(),
        labels: frame.labels().to_vec(),
        elements: Some(frame.elements().iter().map(MatrixJson::from_operator).collect()),
        dual: frame
            .dual()
            .map(|d| d.iter().map(MatrixJson::from_operator).collect()),
        bounds: frame.bounds(),
    }
}

pub fn frame_from_json(json: &FrameJson) -> Result<OperatorFrame> {
    match json.kind {
        FrameKind::Pauli => pauli_frame(json.dim),
        FrameKind::BasisInduced => basis_induced_family(json.dim),
        FrameKind::Orthonormal => OperatorFrame::orthonormal(json.dim),
        FrameKind::Custom => {
            let elements = json
                .elements
                .as_ref()
                .ok_or_else(|| Error::Parse("custom frame without elements".into()))?
                .iter()
                .map(|m| m.to_operator())
                .collect::<Result<Vec<_>>>()?;
            let frame = OperatorFrame::from_elements(
                FrameKind::Custom,
                json.dim,
                json.labels.clone(),
                elements,
            )?;
            match &json.dual {
                Some(dual) => frame.with_dual(
                    dual.iter().map(|m| m.to_operator()).collect::<Result<Vec<_>>>()?,
                ),
                None => Ok(frame),
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub omega: f64,
    pub label: FrameLabel,
    #[serde(rename = "D")]
    pub system_op: MatrixJson,
    #[serde(rename = "rho")]
    pub env_state: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EliminationJson {
    pub label: FrameLabel,
    pub coefficients: Vec<(FrameLabel, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub original_count: usize,
    pub final_count: usize,
    pub eliminations: Vec<EliminationJson>,
    pub updated_primal: Vec<MatrixJson>,
    pub updated_dual: Vec<MatrixJson>,
    pub eliminated_weight_norms: Vec<f64>,
    pub cross_q: Vec<Vec<f64>>,
    pub cross_f: Vec<Vec<f64>>,
    pub cross_g: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpdJson {
    pub dim_s: usize,
    pub dim_e: usize,
    pub frame: FrameJson,
    pub terms: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

pub fn opd_to_json(opd: &Opd) -> OpdJson {
    OpdJson {
        dim_s: opd.dim_s,
        dim_e: opd.dim_e,
        frame: frame_to_json(&opd.frame),
        terms: opd
            .terms
            .iter()
            .map(|t| TermJson {
                omega: t.weight,
                label: t.label,
                system_op: MatrixJson::from_operator(&t.system_op),
                env_state: MatrixJson::from_operator(&t.env_state),
            })
            .collect(),
        certificate: opd.reduction.as_ref().map(|c| CertificateJson {
            original_count: c.original_count,
            final_count: c.final_count,
            eliminations: c
                .eliminations
                .iter()
                .map(|e| EliminationJson {
                    label: e.label,
                    coefficients: e.coefficients.clone(),
                })
                .collect(),
            updated_primal: c.updated_primal.iter().map(MatrixJson::from_operator).collect(),
            updated_dual: c.updated_dual.iter().map(MatrixJson::from_operator).collect(),
            eliminated_weight_norms: c.eliminated_weight_norms.clone(),
            cross_q: nested(&c.cross_q),
            cross_f: nested(&c.cross_f),
            cross_g: nested(&c.cross_g),
        }),
    }
}

pub fn opd_from_json(json: &OpdJson) -> Result<Opd> {
    let frame = frame_from_json(&json.frame)?;
    let terms = json
        .terms
        .iter()
        .map(|t| {
            Ok(OpdTerm {
                weight: t.omega,
                label: t.label,
                system_op: t.system_op.to_operator()?,
                env_state: t.env_state.to_operator()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reduction = json
        .certificate
        .as_ref()
        .map(|c| -> Result<ReductionCertificate> {
            Ok(ReductionCertificate {
                original_count: c.original_count,
                final_count: c.final_count,
                eliminations: c
                    .eliminations
                    .iter()
                    .map(|e| Elimination {
                        label: e.label,
                        coefficients: e.coefficients.clone(),
                    })
                    .collect(),
                updated_primal: c
                    .updated_primal
                    .iter()
                    .map(|m| m.to_operator())
                    .collect::<Result<Vec<_>>>()?,
                updated_dual: c
                    .updated_dual
                    .iter()
                    .map(|m| m.to_operator())
                    .collect::<Result<Vec<_>>>()?,
                eliminated_weight_norms: c.eliminated_weight_norms.clone(),
                cross_q: from_nested(&c.cross_q)?,
                cross_f: from_nested(&c.cross_f)?,
                cross_g: from_nested(&c.cross_g)?,
            })
        })
        .transpose()?;
    Ok(Opd {
        dim_s: json.dim_s,
        dim_e: json.dim_e,
        terms,
        frame,
        reduction,
    })
}

pub fn load_bipartite(path: impl AsRef<Path>) -> Result<BipartiteOperator> {
    let text = std::fs::read_to_string(path)?;
    let json: MatrixJson = serde_json::from_str(&text)?;
    json.to_bipartite()
}

pub fn save_opd(path: impl AsRef<Path>, opd: &Opd) -> Result<()> {
    let json = opd_to_json(opd);
    std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
    Ok(())
}

pub fn load_opd(path: impl AsRef<Path>) -> Result<Opd> {
    let text = std::fs::read_to_string(path)?;
    let json: OpdJson = serde_json::from_str(&text)?;
    opd_from_json(&json)
}

/// Parses a plain-text rate config: one line of three nonnegative rates per
/// channel, `#` comments allowed. One line applies to all four channels, two
/// lines define the two-map setup, four lines list every channel.
pub fn rates_from_text(text: &str) -> Result<PauliChannelFamily> {
    let rows = parse_rate_rows(text)?;
    match rows.len() {
        1 => PauliChannelFamily::uniform(rows[0]),
        2 => PauliChannelFamily::two_map(rows[0], rows[1]),
        4 => PauliChannelFamily::new([rows[0], rows[1], rows[2], rows[3]]),
        n => Err(Error::Parse(format!(
            "rate config must have 1, 2 or 4 rows, got {n}"
        ))),
    }
}

/// Extracts the two-map rates from a config whose channels 1..3 coincide.
pub fn two_map_from_text(text: &str) -> Result<TwoMapRates> {
    let rows = parse_rate_rows(text)?;
    match rows.len() {
        1 => TwoMapRates::new(rows[0], rows[0]),
        2 => TwoMapRates::new(rows[0], rows[1]),
        4 => {
            if rows[1] == rows[2] && rows[2] == rows[3] {
                TwoMapRates::new(rows[0], rows[1])
            } else {
                Err(Error::Parse(
                    "channels 1..3 differ; the geometry requires the two-map setup".into(),
                ))
            }
        }
        n => Err(Error::Parse(format!(
            "rate config must have 1, 2 or 4 rows, got {n}"
        ))),
    }
}

fn parse_rate_rows(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "line {}: expected 3 rates, got {}",
                lineno + 1,
                parts.len()
            )));
        }
        let mut row = [0.0; 3];
        for (i, p) in parts.iter().enumerate() {
            row[i] = p
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("rate config is empty".into()));
    }
    Ok(rows)
}

pub fn write_trajectory_csv<W: Write>(mut w: W, rows: &[TrajectoryPoint]) -> Result<()> {
    writeln!(w, "t,bloch_x,bloch_y,bloch_z,min_eigenvalue")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.t, r.bloch[0], r.bloch[1], r.bloch[2], r.min_eigenvalue
        )?;
    }
    Ok(())
}

pub fn write_domain_csv_header<W: Write>(mut w: W) -> Result<()> {
    writeln!(w, "v1,v2,v3,t,g,in_initial_domain,in_evolved_domain,verdict")?;
    Ok(())
}

pub fn write_domain_csv_rows<W: Write>(mut w: W, t: f64, samples: &[DomainSample]) -> Result<()> {
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            s.v[0], s.v[1], s.v[2], t, s.g, s.in_initial, s.in_evolved, s.verdict
        )?;
    }
    Ok(())
}

/// Per-run JSON summary of a positivity study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivitySummary {
    pub rates: TwoMapRates,
    pub times: Vec<f64>,
    pub containment: Vec<ContainmentEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classifications: Vec<ClassificationEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContainmentEntry {
    pub t: f64,
    #[serde(flatten)]
    pub result: Containment,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub v: [f64; 3],
    #[serde(flatten)]
    pub verdict: PositivityVerdict,
}

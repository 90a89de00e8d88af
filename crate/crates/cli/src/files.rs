//! On-disk formats: structured JSON with matrices as row-major nested
//! arrays of [re, im] pairs. Values round-trip exactly through the decimal
//! encoding, so parse(serialize(x)) is value-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use choimap_core::{
    kraus_to_choi, Complex64, ChoiMatrix, ComplexMatrix, DensityMatrix, KrausRepr,
};

use crate::error::{CliError, Result};

/// A matrix as rows of [re, im] pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

/// A channel file: either a list of Kraus operators or one Choi matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelFile {
    Kraus {
        d_in: usize,
        d_out: usize,
        operators: Vec<MatrixJson>,
    },
    Choi {
        d_in: usize,
        d_out: usize,
        matrix: MatrixJson,
    },
}

/// A state file: one density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub matrix: MatrixJson,
}

/// A bare Hermitian matrix, accepted for objectives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub d: usize,
    pub matrix: MatrixJson,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m.get(r, c).re, m.get(r, c).im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> std::result::Result<ComplexMatrix, String> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err("matrix must have at least one row and column".to_string());
    }
    let cols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            ));
        }
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::new(rows.len(), cols, data).map_err(|e| e.to_string())
}

/// A parsed channel in whichever representation the file carried.
#[derive(Debug, Clone)]
pub enum Channel {
    Kraus(KrausRepr),
    Choi(ChoiMatrix),
}

impl Channel {
    pub fn to_choi(&self) -> ChoiMatrix {
        match self {
            Channel::Kraus(k) => kraus_to_choi(k),
            Channel::Choi(x) => x.clone(),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn malformed(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Malformed {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn load_channel(path: &Path) -> Result<Channel> {
    let text = read_to_string(path)?;
    let file: ChannelFile = parse_json(path, &text)?;
    match file {
        ChannelFile::Kraus {
            d_in,
            d_out,
            operators,
        } => {
            let ops = operators
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    matrix_from_json(m)
                        .map_err(|e| malformed(path, format!("operator {i}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let k = KrausRepr::new(d_in, d_out, ops).map_err(|e| malformed(path, e.to_string()))?;
            Ok(Channel::Kraus(k))
        }
        ChannelFile::Choi { d_in, d_out, matrix } => {
            let m = matrix_from_json(&matrix).map_err(|e| malformed(path, e))?;
            let x =
                ChoiMatrix::new(d_in, d_out, m).map_err(|e| malformed(path, e.to_string()))?;
            Ok(Channel::Choi(x))
        }
    }
}

pub fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix> {
    let text = read_to_string(path)?;
    let file: StateFile = parse_json(path, &text)?;
    let m = matrix_from_json(&file.matrix).map_err(|e| malformed(path, e))?;
    if m.rows() != file.d || m.cols() != file.d {
        return Err(malformed(
            path,
            format!("matrix is {}x{}, header says d = {}", m.rows(), m.cols(), file.d),
        ));
    }
    DensityMatrix::new(m, tol).map_err(|e| malformed(path, e.to_string()))
}

/// Objectives may come either as a choi/kraus channel file (its Choi matrix
/// is the objective) or as a bare matrix file {d, matrix}.
pub fn load_objective(path: &Path) -> Result<ComplexMatrix> {
    let text = read_to_string(path)?;
    if let Ok(file) = serde_json::from_str::<ChannelFile>(&text) {
        let _ = file;
        return Ok(load_channel(path)?.to_choi().into_matrix());
    }
    let file: MatrixFile = parse_json(path, &text)?;
    let m = matrix_from_json(&file.matrix).map_err(|e| malformed(path, e))?;
    if m.rows() != file.d || m.cols() != file.d {
        return Err(malformed(
            path,
            format!("matrix is {}x{}, header says d = {}", m.rows(), m.cols(), file.d),
        ));
    }
    Ok(m)
}

fn write_file(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable formats");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_kraus(path: &Path, k: &KrausRepr) -> Result<()> {
    let file = ChannelFile::Kraus {
        d_in: k.d_in(),
        d_out: k.d_out(),
        operators: k.operators().iter().map(matrix_to_json).collect(),
    };
    write_file(path, &file)
}

pub fn save_choi(path: &Path, x: &ChoiMatrix) -> Result<()> {
    let file = ChannelFile::Choi {
        d_in: x.d_in(),
        d_out: x.d_out(),
        matrix: matrix_to_json(x.matrix()),
    };
    write_file(path, &file)
}

pub fn save_state(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let file = StateFile {
        d: m.rows(),
        matrix: matrix_to_json(m),
    };
    write_file(path, &file)
}

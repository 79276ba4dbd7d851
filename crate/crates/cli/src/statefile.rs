//! JSON state files: `{dims, kind, data, metadata}` with complex entries as `[re, im]`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use conesep::states::DimSpec;
use conesep::{CMatrix, Complex64, MixedState, PureState};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Mixed,
    /// A square matrix that need not be a state, e.g. a metric `M_i`; `dims` has one entry.
    Operator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Data {
    Vector(Vec<[f64; 2]>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub kind: Kind,
    pub data: Data,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn rows_of(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| pair(&m[(i, j)])).collect())
        .collect()
}

impl StateFile {
    pub fn from_pure(z: &PureState) -> Self {
        Self {
            dims: z.dims().dims().to_vec(),
            kind: Kind::Pure,
            data: Data::Vector(z.amplitudes().iter().map(pair).collect()),
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_mixed(rho: &MixedState) -> Self {
        Self {
            dims: rho.dims().dims().to_vec(),
            kind: Kind::Mixed,
            data: Data::Matrix(rows_of(rho.matrix())),
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_operator(m: &CMatrix) -> Self {
        Self {
            dims: vec![m.rows()],
            kind: Kind::Operator,
            data: Data::Matrix(rows_of(m)),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn matrix(&self) -> Result<CMatrix, CliError> {
        let n = self.total();
        let Data::Matrix(rows) = &self.data else {
            return Err(CliError::Parse(format!(
                "{:?} data must be a matrix of [re, im] rows",
                self.kind
            )));
        };
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CliError::Parse(format!("matrix data must be {n}x{n}")));
        }
        let flat = rows.iter().flatten().map(|[re, im]| c(*re, *im)).collect();
        CMatrix::from_row_major(n, n, flat).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_pure(&self) -> Result<PureState, CliError> {
        if self.kind != Kind::Pure {
            return Err(CliError::Parse(format!(
                "expected a pure state, found {:?}",
                self.kind
            )));
        }
        let Data::Vector(v) = &self.data else {
            return Err(CliError::Parse(
                "pure data must be a vector of [re, im] pairs".into(),
            ));
        };
        if v.len() != self.total() {
            return Err(CliError::Parse(format!(
                "pure data has {} entries, dims require {}",
                v.len(),
                self.total()
            )));
        }
        let dims = DimSpec::new(self.dims.clone()).map_err(|e| CliError::Parse(e.to_string()))?;
        PureState::new(dims, v.iter().map(|[re, im]| c(*re, *im)).collect())
            .map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_mixed(&self) -> Result<MixedState, CliError> {
        if self.kind != Kind::Mixed {
            return Err(CliError::Parse(format!(
                "expected a mixed state, found {:?}",
                self.kind
            )));
        }
        let dims = DimSpec::new(self.dims.clone()).map_err(|e| CliError::Parse(e.to_string()))?;
        MixedState::new(dims, self.matrix()?).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Any matrix-valued file; a pure state is read as its projector.
    pub fn to_operator(&self) -> Result<CMatrix, CliError> {
        match self.kind {
            Kind::Pure => Ok(self.to_pure()?.projector()),
            _ => self.matrix(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state file is serializable");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::io(path, source))?;
        Self::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.to_json())
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::io(path, source))
}

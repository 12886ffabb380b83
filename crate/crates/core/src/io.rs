//! Dense matrix/vector JSON format: `{"d": 3, "entries": [[re, im], ...]}`, row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub d: usize,
    pub entries: Vec<[f64; 2]>,
}

impl DenseJson {
    pub fn from_vector(d: usize, v: &[C64]) -> Self {
        Self { d, entries: v.iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn from_matrix(d: usize, m: &CMatrix) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self { d, entries }
    }

    pub fn values(&self) -> Vec<C64> {
        self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect()
    }

    /// Interpret the entries as a square matrix.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = (self.entries.len() as f64).sqrt().round() as usize;
        if n * n != self.entries.len() || n == 0 {
            return Err(Error::InvalidArgument(format!("{} entries do not form a square matrix", self.entries.len())));
        }
        Ok(CMatrix::from_row_iterator(n, n, self.values()))
    }

    pub fn to_json_pretty(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|[re, im]| format!("[{}, {}]", fmt_num(*re), fmt_num(*im)))
            .collect();
        format!("{{\n  \"d\": {},\n  \"entries\": [\n    {}\n  ]\n}}\n", self.d, rows.join(",\n    "))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64 * 0.5));
        let j = DenseJson::from_matrix(1, &m);
        let back = DenseJson::parse(&j.to_json_pretty()).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
        assert!(DenseJson { d: 1, entries: vec![[0.0, 0.0]; 3] }.to_matrix().is_err());
    }
}

//! JSON wire format. Complex numbers are always [re, im] pairs; matrices are
//! row-major arrays of rows.
//!
//! State: {"labels":[{"name":"A","dim":2},...], "matrix":[[[re,im],...],...]}
//! Channel: {"in_labels":[...], "out_labels":[...], "kraus":[matrix,...]}

use crate::channel::ChannelSpec;
use crate::error::{CoreError, Result};
use crate::layout::SystemLayout;
use crate::linalg::{CMatrix, C64};
use crate::state::StateSpec;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LabelJson {
    pub name: String,
    pub dim: usize,
}

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StateJson {
    pub labels: Vec<LabelJson>,
    pub matrix: MatrixJson,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ChannelJson {
    pub in_labels: Vec<LabelJson>,
    pub out_labels: Vec<LabelJson>,
    pub kraus: Vec<MatrixJson>,
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if nrows == 0 || ncols == 0 {
        return Err(CoreError::Malformed("empty matrix".into()));
    }
    for r in rows {
        if r.len() != ncols {
            return Err(CoreError::Malformed("ragged matrix rows".into()));
        }
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn layout_from_json(labels: &[LabelJson]) -> Result<SystemLayout> {
    SystemLayout::new(labels.iter().map(|l| (l.name.clone(), l.dim)).collect())
}

fn layout_to_json(layout: &SystemLayout) -> Vec<LabelJson> {
    layout
        .labels()
        .iter()
        .zip(layout.dims())
        .map(|(name, dim)| LabelJson { name: name.clone(), dim: *dim })
        .collect()
}

pub fn state_to_json(s: &StateSpec) -> StateJson {
    StateJson {
        labels: layout_to_json(s.layout()),
        matrix: matrix_to_json(s.matrix()),
    }
}

pub fn state_from_json(j: &StateJson) -> Result<StateSpec> {
    StateSpec::new(layout_from_json(&j.labels)?, matrix_from_json(&j.matrix)?)
}

pub fn channel_to_json(c: &ChannelSpec) -> ChannelJson {
    ChannelJson {
        in_labels: layout_to_json(c.in_layout()),
        out_labels: layout_to_json(c.out_layout()),
        kraus: c.kraus().iter().map(matrix_to_json).collect(),
    }
}

pub fn channel_from_json(j: &ChannelJson) -> Result<ChannelSpec> {
    let kraus = j
        .kraus
        .iter()
        .map(matrix_from_json)
        .collect::<Result<Vec<_>>>()?;
    ChannelSpec::new_cptp(
        layout_from_json(&j.in_labels)?,
        layout_from_json(&j.out_labels)?,
        kraus,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::max_entangled;

    #[test]
    fn state_json_round_trip() {
        let s = max_entangled("A", "B", 2).unwrap();
        let j = state_to_json(&s);
        let text = serde_json::to_string(&j).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        let s2 = state_from_json(&back).unwrap();
        assert!(s.trace_distance_to(&s2).unwrap() < 1e-12);
    }
}

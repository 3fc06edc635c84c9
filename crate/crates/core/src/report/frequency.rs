use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::stats::{ContingencyTable, TableScope, COLS, ROWS};

/// Share of each (orientation, location) combination within one scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMatrix {
    pub scope: TableScope,
    pub total: u64,
    pub values: [[f64; COLS]; ROWS],
}

impl FrequencyMatrix {
    pub fn sum(&self) -> f64 {
        self.values.iter().flatten().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn relative_frequencies(table: &ContingencyTable) -> Result<FrequencyMatrix, ReportError> {
    let total = table.grand_total();
    if total == 0 {
        return Err(ReportError::EmptyTable(table.scope.to_string()));
    }
    let mut values = [[0.0; COLS]; ROWS];
    for (row, counts) in values.iter_mut().zip(table.counts()) {
        for (v, &c) in row.iter_mut().zip(counts) {
            *v = c as f64 / total as f64;
        }
    }
    Ok(FrequencyMatrix { scope: table.scope.clone(), total, values })
}

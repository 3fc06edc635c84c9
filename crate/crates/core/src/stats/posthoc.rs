use serde::{Deserialize, Serialize};

use super::special::chi_square_sf;
use super::table::ContingencyTable;
use super::StatsError;
use crate::phonology::Cell;

/// One cell of the global table collapsed against everything else:
///
/// ```text
///             location j     other locations
/// ori i           a                b
/// other ori       c                d
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostHocTable {
    pub cell: Cell,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl PostHocTable {
    /// Builds the 2x2 from a cell count and the marginals of its row and column.
    pub fn from_marginals(cell: Cell, count: u64, row_total: u64, col_total: u64, grand_total: u64) -> Self {
        let b = row_total - count;
        let c = col_total - count;
        Self { cell, a: count, b, c, d: grand_total - row_total - c }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    /// Row sums (a+b, c+d) and column sums (a+c, b+d).
    pub fn marginals(&self) -> ([u64; 2], [u64; 2]) {
        ([self.a + self.b, self.c + self.d], [self.a + self.c, self.b + self.d])
    }

    /// Expected counts (a, b, c, d) under independence of the margins.
    pub fn expected(&self) -> [f64; 4] {
        let n = self.total() as f64;
        let ([r1, r2], [c1, c2]) = self.marginals();
        let (r1, r2, c1, c2) = (r1 as f64, r2 as f64, c1 as f64, c2 as f64);
        [r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n]
    }
}

/// The 56 post-hoc tables of a contingency table, row-major.
pub fn post_hoc_decompose(table: &ContingencyTable) -> Result<Vec<PostHocTable>, StatsError> {
    let grand = table.grand_total();
    if grand == 0 {
        return Err(StatsError::EmptyTable(table.scope.to_string()));
    }
    Ok(Cell::all()
        .map(|cell| {
            PostHocTable::from_marginals(
                cell,
                table.count(cell),
                table.row_total(cell.orientation),
                table.col_total(cell.location),
                grand,
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
}

/// Pearson chi-square test of independence on a 2x2 table, one degree of
/// freedom. An empty margin gives statistic 0 and p = 1.
pub fn chi_square_2x2(t: &PostHocTable, continuity_correction: bool) -> Result<ChiSquare, StatsError> {
    let n = t.total();
    if n == 0 {
        return Err(StatsError::EmptyTable(t.cell.to_string()));
    }
    let ([r1, r2], [c1, c2]) = t.marginals();
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return Ok(ChiSquare { statistic: 0.0, p_value: 1.0 });
    }
    // N (ad - bc)^2 / (r1 r2 c1 c2), with ad - bc exact in integers
    let cross = (i128::from(t.a) * i128::from(t.d) - i128::from(t.b) * i128::from(t.c)).unsigned_abs() as f64;
    let n = n as f64;
    let cross = if continuity_correction { (cross - n / 2.0).max(0.0) } else { cross };
    let statistic = n * cross * cross / (r1 as f64 * r2 as f64 * c1 as f64 * c2 as f64);
    Ok(ChiSquare { statistic, p_value: chi_square_sf(statistic, 1.0) })
}

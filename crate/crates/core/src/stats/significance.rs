use serde::{Deserialize, Serialize};

use super::posthoc::{chi_square_2x2, post_hoc_decompose};
use super::table::{ContingencyTable, TableScope};
use super::StatsError;
use crate::phonology::Cell;
use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignificanceConfig {
    /// Family-wise level applied to Bonferroni-adjusted p-values.
    pub alpha: f64,
    /// Every expected count of a 2x2 must reach this for the cell to be tested.
    pub min_expected: f64,
    /// Yates correction; off by default.
    pub continuity_correction: bool,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        Self { alpha: 0.001, min_expected: 5.0, continuity_correction: false }
    }
}

impl SignificanceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::new(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        if !(self.min_expected >= 0.0 && self.min_expected.is_finite()) {
            return Err(ConfigError::new(format!("min_expected {} must be a non-negative number", self.min_expected)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    OverRepresented,
    UnderRepresented,
    /// Observed count equals the expected count exactly.
    AsExpected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStatus {
    Ok,
    /// No annotations: nothing was tested.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceCell {
    pub cell: Cell,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub expected_a: f64,
    pub chi2: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    /// All four expected counts reach `min_expected`.
    pub valid: bool,
    pub significant: bool,
    pub direction: Direction,
}

impl SignificanceCell {
    pub fn verdict(&self) -> &'static str {
        match (self.valid, self.significant, self.direction) {
            (false, _, _) => "invalid",
            (true, true, Direction::OverRepresented) => "over",
            (true, true, Direction::UnderRepresented) => "under",
            _ => "not_significant",
        }
    }

    pub fn is_over_represented(&self) -> bool {
        self.significant && self.direction == Direction::OverRepresented
    }
}

/// Post-hoc results for one (corpus, hand) table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub scope: TableScope,
    pub status: TableStatus,
    pub alpha: f64,
    pub min_expected: f64,
    pub continuity_correction: bool,
    pub grand_total: u64,
    /// Bonferroni family size: the number of valid cells.
    pub tests: usize,
    pub cells: Vec<SignificanceCell>,
}

impl SignificanceReport {
    /// Placeholder for a scope without observations.
    pub fn empty(scope: TableScope, config: &SignificanceConfig) -> Self {
        Self {
            scope,
            status: TableStatus::Empty,
            alpha: config.alpha,
            min_expected: config.min_expected,
            continuity_correction: config.continuity_correction,
            grand_total: 0,
            tests: 0,
            cells: Vec::new(),
        }
    }

    pub fn over_represented(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().filter(|c| c.is_over_represented()).map(|c| c.cell)
    }

    pub fn cell(&self, cell: Cell) -> Option<&SignificanceCell> {
        self.cells.iter().find(|c| c.cell == cell)
    }
}

fn direction(a: u64, row: u64, col: u64, n: u64) -> Direction {
    // sign of a - row * col / n, in integers
    let observed = u128::from(a) * u128::from(n);
    let expected = u128::from(row) * u128::from(col);
    match observed.cmp(&expected) {
        std::cmp::Ordering::Greater => Direction::OverRepresented,
        std::cmp::Ordering::Less => Direction::UnderRepresented,
        std::cmp::Ordering::Equal => Direction::AsExpected,
    }
}

/// Tests every cell of `table` against the rest and applies a Bonferroni
/// correction over the valid cells.
pub fn significance_map(
    table: &ContingencyTable,
    config: &SignificanceConfig,
) -> Result<SignificanceReport, StatsError> {
    let posthoc = post_hoc_decompose(table)?;
    let grand_total = table.grand_total();
    let mut cells = Vec::with_capacity(posthoc.len());
    for t in &posthoc {
        let expected = t.expected();
        let test = chi_square_2x2(t, config.continuity_correction)?;
        let ([r1, _], [c1, _]) = t.marginals();
        cells.push(SignificanceCell {
            cell: t.cell,
            a: t.a,
            b: t.b,
            c: t.c,
            d: t.d,
            expected_a: expected[0],
            chi2: test.statistic,
            p_raw: test.p_value,
            p_adjusted: 1.0,
            valid: expected.iter().all(|&e| e >= config.min_expected && e > 0.0),
            significant: false,
            direction: direction(t.a, r1, c1, grand_total),
        });
    }
    let tests = cells.iter().filter(|c| c.valid).count();
    for c in &mut cells {
        c.p_adjusted = (c.p_raw * tests.max(1) as f64).min(1.0);
        c.significant = c.valid && c.p_adjusted < config.alpha;
    }
    Ok(SignificanceReport {
        scope: table.scope.clone(),
        status: TableStatus::Ok,
        alpha: config.alpha,
        min_expected: config.min_expected,
        continuity_correction: config.continuity_correction,
        grand_total,
        tests,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::HandSide;
    use crate::phonology::{LocationBin as L, OrientationBin as O};

    fn table(counts: [[u64; 7]; 8]) -> ContingencyTable {
        ContingencyTable::from_counts(TableScope::corpus("x", HandSide::Right), counts)
    }

    #[test]
    fn uniform_table_has_no_signal() {
        let r = significance_map(&table([[100; 7]; 8]), &SignificanceConfig::default()).unwrap();
        assert_eq!(r.tests, 56);
        assert!(r.cells.iter().all(|c| !c.significant && c.chi2 == 0.0 && c.p_adjusted == 1.0));
        assert!(r.cells.iter().all(|c| c.direction == Direction::AsExpected));
    }

    #[test]
    fn dominant_cell() {
        let mut counts = [[20u64; 7]; 8];
        counts[0][3] = 1000;
        let r = significance_map(&table(counts), &SignificanceConfig::default()).unwrap();
        let hot = r.cell(Cell::new(O::N, L::Neck)).unwrap();
        assert!(hot.valid && hot.significant);
        assert_eq!(hot.direction, Direction::OverRepresented);
        assert_eq!(r.over_represented().collect::<Vec<_>>(), vec![Cell::new(O::N, L::Neck)]);
        let same_row = r.cell(Cell::new(O::N, L::Ears)).unwrap();
        assert_eq!(same_row.direction, Direction::UnderRepresented);
        assert!(same_row.significant);
    }

    #[test]
    fn small_expectations_are_invalid_and_shrink_the_family() {
        let mut counts = [[50u64; 7]; 8];
        counts[7] = [0; 7];
        counts[6] = [1, 1, 1, 1, 1, 1, 1];
        let r = significance_map(&table(counts), &SignificanceConfig::default()).unwrap();
        assert_eq!(r.tests, 42);
        assert!(r.cells.iter().filter(|c| c.cell.orientation == O::NW).all(|c| !c.valid && c.p_raw == 1.0));
        assert!(r.cells.iter().filter(|c| !c.valid).all(|c| !c.significant));
    }

    #[test]
    fn bonferroni_clamps_at_one() {
        let mut counts = [[30u64; 7]; 8];
        counts[2][2] = 33;
        let r = significance_map(&table(counts), &SignificanceConfig::default()).unwrap();
        let c = r.cell(Cell::new(O::E, L::Nose)).unwrap();
        assert!(c.p_raw * 56.0 > 1.0);
        assert_eq!(c.p_adjusted, 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(SignificanceConfig { alpha: 0.0, ..Default::default() }.validate().is_err());
        assert!(SignificanceConfig { alpha: 1.0, ..Default::default() }.validate().is_err());
        assert!(SignificanceConfig { min_expected: -1.0, ..Default::default() }.validate().is_err());
        assert!(SignificanceConfig::default().validate().is_ok());
    }
}

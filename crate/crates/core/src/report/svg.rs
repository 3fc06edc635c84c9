//! Minimal SVG heatmaps. Output depends only on the input values.
//!
//! Palette: frequency cells shade linearly from white to `#08306b` relative
//! to the largest value in the matrix. Significance cells are `#d7301f` with
//! `+` for over-represented, `#2b8cbe` with `-` for under-represented,
//! `#bdbdbd` with `x` for invalid, white otherwise.

use std::fmt::Write as _;

use super::FrequencyMatrix;
use crate::phonology::{LocationBin, OrientationBin};
use crate::stats::{Direction, SignificanceReport};

const CELL_W: usize = 72;
const CELL_H: usize = 36;
const LEFT: usize = 48;
const TOP: usize = 56;

struct Grid {
    out: String,
}

impl Grid {
    fn new(title: &str) -> Self {
        let width = LEFT + CELL_W * LocationBin::ALL.len() + 8;
        let height = TOP + CELL_H * OrientationBin::ALL.len() + 8;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<text x="4" y="16" font-size="13">{}</text>"#, escape(title));
        for (j, loc) in LocationBin::ALL.iter().enumerate() {
            let x = LEFT + j * CELL_W + CELL_W / 2;
            let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{loc}</text>"#, TOP - 8);
        }
        for (i, ori) in OrientationBin::ALL.iter().enumerate() {
            let y = TOP + i * CELL_H + CELL_H / 2 + 4;
            let _ = writeln!(out, r#"<text x="{}" y="{y}" text-anchor="end">{ori}</text>"#, LEFT - 6);
        }
        Self { out }
    }

    fn cell(&mut self, row: usize, col: usize, fill: &str, label: &str, dark: bool) {
        let (x, y) = (LEFT + col * CELL_W, TOP + row * CELL_H);
        let _ = writeln!(
            self.out,
            r##"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}" stroke="#666666" stroke-width="0.5"/>"##
        );
        let color = if dark { "#ffffff" } else { "#000000" };
        let _ = writeln!(
            self.out,
            r#"<text x="{}" y="{}" text-anchor="middle" fill="{color}">{label}</text>"#,
            x + CELL_W / 2,
            y + CELL_H / 2 + 4
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn shade(t: f64) -> String {
    let lerp = |from: f64, to: f64| (from + (to - from) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

pub fn frequency_heatmap(m: &FrequencyMatrix) -> String {
    let mut grid = Grid::new(&format!("relative frequency {} (n = {})", m.scope, m.total));
    let max = m.max();
    for (i, row) in m.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = if max > 0.0 { v / max } else { 0.0 };
            grid.cell(i, j, &shade(t), &format!("{v:.3}"), t > 0.55);
        }
    }
    grid.finish()
}

pub fn significance_heatmap(r: &SignificanceReport) -> String {
    let mut grid = Grid::new(&format!("co-dependence {} (Bonferroni alpha {}, {} tests)", r.scope, r.alpha, r.tests));
    for c in &r.cells {
        let (fill, label) = match (c.valid, c.significant, c.direction) {
            (false, _, _) => ("#bdbdbd", "x"),
            (true, true, Direction::OverRepresented) => ("#d7301f", "+"),
            (true, true, _) => ("#2b8cbe", "-"),
            _ => ("#ffffff", ""),
        };
        grid.cell(c.cell.orientation.index(), c.cell.location.index(), fill, label, c.significant);
    }
    grid.finish()
}

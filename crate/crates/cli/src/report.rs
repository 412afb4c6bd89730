//! Aligned plain-text summaries. Every number is printed in shortest
//! round-trip form unless a precision is requested.

use std::fmt::Write;

use minmotion::{MttSolution, MttTrace, Peaks};

use crate::config::{Mode, ProblemConfig};

pub struct Table {
    rows: Vec<(String, Vec<String>)>,
    precision: Option<usize>,
}

impl Table {
    pub fn new(precision: Option<usize>) -> Self {
        Self {
            rows: Vec::new(),
            precision,
        }
    }

    fn number(&self, v: f64) -> String {
        match self.precision {
            Some(p) => format!("{v:.p$}"),
            None => format!("{v}"),
        }
    }

    pub fn numbers(&mut self, label: &str, values: &[f64]) {
        let cells = values.iter().map(|&v| self.number(v)).collect();
        self.rows.push((label.to_string(), cells));
    }

    pub fn text(&mut self, label: &str, value: impl Into<String>) {
        self.rows.push((label.to_string(), vec![value.into()]));
    }

    pub fn render(&self) -> String {
        let label_width = self.rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let columns = self.rows.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
        let mut widths = vec![0; columns];
        for (_, cells) in self.rows.iter().filter(|(_, c)| c.len() > 1) {
            for (w, c) in widths.iter_mut().zip(cells) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for (label, cells) in &self.rows {
            let _ = write!(out, "{label:<label_width$}");
            if cells.len() == 1 {
                let _ = write!(out, "  {}", cells[0]);
            } else {
                for (c, w) in cells.iter().zip(&widths) {
                    let _ = write!(out, "  {c:>w$}");
                }
            }
            out.push('\n');
        }
        out
    }
}

fn index_set(indices: &[usize]) -> String {
    let inner: Vec<String> = indices.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

fn header(table: &mut Table, cfg: &ProblemConfig) {
    table.text("order", cfg.order().to_string());
    table.text("distance", format!("{} {}", cfg.spec.distance(), cfg.unit));
    table.numbers("bounds w", cfg.spec.bounds());
    table.text("mode", cfg.mode.to_string());
}

fn solution_rows(table: &mut Table, sol: &MttSolution) {
    table.numbers("z_hat", sol.dimensionless().values());
    table.numbers("x", sol.peaks().values());
    table.numbers("T [s]", sol.times().values());
    table.text("active bounds", index_set(sol.active_bounds()));
}

/// Summary of a minimum-time solve, one row per intermediate.
pub fn mtt_summary(cfg: &ProblemConfig, trace: &MttTrace, precision: Option<usize>) -> String {
    let mut table = Table::new(precision);
    header(&mut table, cfg);
    table.numbers("w_hat", trace.w_hat.interior());
    table.numbers("u_hat", trace.u_hat.values());
    table.numbers("T(u_hat)", trace.u_times.values());
    table.numbers("ratios", &trace.ratios);
    table.text("B", index_set(&trace.boundary_set));
    table.text("held", index_set(&trace.held));
    solution_rows(&mut table, &trace.solution);
    table.text(
        "total T",
        format!("{} s", table.number(trace.solution.horizon())),
    );
    table.render()
}

pub fn mdt_summary(
    cfg: &ProblemConfig,
    minimum: &MttSolution,
    sol: &MttSolution,
    precision: Option<usize>,
) -> String {
    let mut table = Table::new(precision);
    header(&mut table, cfg);
    if let Mode::Mdt {
        horizon,
        target_order,
    } = cfg.mode
    {
        table.text("target order", target_order.to_string());
        table.text("horizon", format!("{} s", table.number(horizon)));
    }
    table.text(
        "minimum T",
        format!("{} s", table.number(minimum.horizon())),
    );
    solution_rows(&mut table, sol);
    table.text("total T", format!("{} s", table.number(sol.horizon())));
    table.render()
}

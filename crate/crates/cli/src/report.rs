//! Plain-text tables for the human-readable reports.

use std::fmt::Write;

use spinforge::compiler::CompiledHamiltonian;
use spinforge::poly::ResourceStats;

/// Left-aligned columns separated by two spaces.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: ToString>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn render(&self, indent: usize) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let mut line = " ".repeat(indent);
            for (k, c) in r.iter().enumerate() {
                if k + 1 == cols {
                    line.push_str(c);
                } else {
                    let _ = write!(line, "{c:<w$}  ", w = width[k]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

pub fn histogram(stats: &ResourceStats) -> String {
    if stats.order_histogram.is_empty() {
        return "-".into();
    }
    stats
        .order_histogram
        .iter()
        .map(|(order, count)| format!("{order}:{count}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Shortest round-tripping decimal, trimmed of noise such as `0.30000000000000004`.
pub fn num(x: f64) -> String {
    let rounded = (x * 1e9).round() / 1e9;
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

pub fn stats_block(stats: &ResourceStats, num_spins: usize) -> String {
    let mut t = Table::new(["resource", "value"]);
    t.row(["spins".to_string(), num_spins.to_string()]);
    t.row(["terms".to_string(), stats.num_terms.to_string()]);
    t.row(["max order".to_string(), stats.max_order.to_string()]);
    for (order, count) in &stats.order_histogram {
        t.row([format!("order {order}"), count.to_string()]);
    }
    t.row(["L1 norm".to_string(), num(stats.l1_norm)]);
    t.render(2)
}

pub fn compiled(h: &CompiledHamiltonian, title: &str) -> String {
    let mut out = format!("{title}\n");
    if !h.variables.is_empty() {
        out.push_str("variables\n");
        let mut t = Table::new(["id", "range", "encoding", "spins"]);
        for ev in &h.variables {
            let spins = match (ev.spins.first(), ev.spins.last()) {
                (Some(a), Some(b)) if a != b => format!("{} ({a}..{b})", ev.num_spins()),
                (Some(a), _) => format!("1 ({a})"),
                _ => "0".into(),
            };
            t.row([
                ev.id().to_string(),
                format!("{}..{}", ev.variable.lo, ev.variable.hi),
                ev.spec.to_string(),
                spins,
            ]);
        }
        out.push_str(&t.render(2));
    }
    if !h.penalties.is_empty() {
        out.push_str("penalties\n");
        let mut t = Table::new(["label", "level", "weight", "terms", "max order"]);
        for p in &h.penalties {
            t.row([
                p.label.clone(),
                p.level.to_string(),
                num(p.weight),
                p.poly.num_terms().to_string(),
                p.poly.max_order().to_string(),
            ]);
        }
        out.push_str(&t.render(2));
    }
    if !h.exported.is_empty() {
        out.push_str("exported constraints\n");
        let mut t = Table::new(["label", "target", "terms", "max order"]);
        for c in &h.exported {
            t.row([
                c.label.clone(),
                num(c.target),
                c.poly.num_terms().to_string(),
                c.poly.max_order().to_string(),
            ]);
        }
        out.push_str(&t.render(2));
    }
    out.push_str("hamiltonian\n");
    out.push_str(&stats_block(&h.total.stats(), h.num_spins));
    out
}

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

pub const CONVENTIONS: &str =
    "units J=1; periodic chain; site l <-> bit l-1, bit 0 <-> sigma_z=+1; e1 and e2 are not rescaled by N";

/// Floats are written with 17 significant digits so every value round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with `#`-prefixed header and trailer comments.
pub struct Table {
    comments: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    trailer: Vec<String>,
}

impl Table {
    pub fn new(command: &str, flags: &str, columns: &[&'static str]) -> Self {
        Self {
            comments: vec![
                format!("z2mem {}", env!("CARGO_PKG_VERSION")),
                format!("command: {command} {flags}"),
                format!("conventions: {CONVENTIONS}"),
            ],
            columns: columns.to_vec(),
            rows: Vec::new(),
            trailer: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Comment printed after the data rows, for fitted quantities.
    pub fn summary(&mut self, line: impl Into<String>) {
        self.trailer.push(line.into());
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        for c in &self.trailer {
            let _ = writeln!(s, "# {c}");
        }
        s
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

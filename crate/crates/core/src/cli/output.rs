//! Deterministic CSV and JSON writers.
//!
//! Floats are printed in their shortest round-trip form, so identical runs
//! produce identical bytes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::diagnostics::Check;

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// A CSV document: `#` metadata lines, one header row, data rows.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(command: &str, config: &Value) -> Self {
        let mut text = String::new();
        writeln!(text, "# shrinkers {} {command}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(text, "# config: {}", serde_json::to_string(config).unwrap()).unwrap();
        Self { text, columns: 0 }
    }

    pub fn meta(&mut self, line: &str) {
        debug_assert_eq!(self.columns, 0, "metadata must precede the header");
        writeln!(self.text, "# {line}").unwrap();
    }

    pub fn checks(&mut self, checks: &[Check]) {
        for c in checks {
            self.meta(&format!(
                "check {}: {} (measured {}, tolerance {})",
                c.name,
                if c.passed { "pass" } else { "fail" },
                num(c.measured),
                num(c.tolerance)
            ));
        }
    }

    pub fn header(&mut self, cols: &[&str]) {
        self.columns = cols.len();
        self.text.push_str(&cols.join(","));
        self.text.push('\n');
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// One object with exactly the keys `config`, `results` and `checks`.
pub fn json_document<R: Serialize>(config: &Value, results: &R, checks: &[Check]) -> String {
    #[derive(Serialize)]
    struct Doc<'a, R> {
        config: &'a Value,
        results: &'a R,
        checks: &'a [Check],
    }
    let mut s = serde_json::to_string_pretty(&Doc { config, results, checks }).unwrap();
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()
        }
    }
}

/// `dir/stem.ext` becomes `dir/stem.<suffix>`.
pub fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-20, 6.02214076e23, -2.5, 4.686190426, f64::MIN_POSITIVE] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits = s.chars().take_while(|c| *c != 'e').filter(|c| c.is_ascii_digit()).count();
            assert!(digits <= 18, "{s}");
        }
        assert_eq!(num(1.0), "1.0");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new("demo", &serde_json::json!({"d": 3.0}));
        c.meta("note");
        c.header(&["x", "y"]);
        c.row(vec![num(1.0), num(0.5)]);
        let text = c.finish();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# shrinkers"));
        assert_eq!(lines[1], "# config: {\"d\":3.0}");
        assert_eq!(lines[2], "# note");
        assert_eq!(&lines[3..], ["x,y", "1.0,0.5"]);
    }

    #[test]
    fn companion_paths() {
        assert_eq!(companion(Path::new("out/run.csv"), "brackets.json"), Path::new("out/run.brackets.json"));
        assert_eq!(companion(Path::new("run"), "profile-n1.csv"), Path::new("run.profile-n1.csv"));
    }
}

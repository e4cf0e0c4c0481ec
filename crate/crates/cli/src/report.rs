//! Check bookkeeping and artifact emission: `report.txt`, CSV files
//! (always with a header row), and binary field snapshots.
//!
//! Output is deterministic: identical config and seed produce
//! byte-identical files. Floating-point cells use a fixed scientific
//! format; nothing time- or environment-dependent is written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// One pass/fail assertion with a human-readable measurement.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Fixed-width scientific formatting for CSV cells and report lines.
pub fn fnum(x: f64) -> String {
    format!("{x:.12e}")
}

/// Output directory handle.
pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path) -> std::io::Result<Artifacts> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf() })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    /// Write a CSV with the given header and pre-rendered rows.
    pub fn csv<I>(&self, file: &str, header: &str, rows: I) -> std::io::Result<()>
    where
        I: IntoIterator<Item = String>,
    {
        let mut w = fs::File::create(self.path(file))?;
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    /// Write `report.txt`: config echo, one line per check, and a final
    /// verdict. Returns whether every check passed.
    pub fn report(
        &self,
        kind: &str,
        threads: usize,
        config_lines: &[String],
        checks: &[Check],
    ) -> std::io::Result<bool> {
        let mut w = fs::File::create(self.path("report.txt"))?;
        writeln!(w, "besov-ns experiment report")?;
        writeln!(w, "kind: {kind}")?;
        writeln!(w, "threads: {threads}")?;
        writeln!(w, "config:")?;
        for line in config_lines {
            writeln!(w, "  {line}")?;
        }
        writeln!(w, "checks:")?;
        let mut all = true;
        for c in checks {
            all &= c.pass;
            writeln!(w, "  {} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let passed = checks.iter().filter(|c| c.pass).count();
        writeln!(
            w,
            "result: {} ({passed}/{} checks)",
            if all { "PASS" } else { "FAIL" },
            checks.len()
        )?;
        Ok(all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_verdict_reflects_the_checks() {
        let tmp = std::env::temp_dir().join(format!("besov-ns-report-test-{}", std::process::id()));
        let art = Artifacts::new(&tmp).unwrap();
        let ok = art
            .report(
                "lp-check",
                1,
                &["grid.N = 64".into()],
                &[Check::new("a", true, "fine"), Check::new("b", false, "bad")],
            )
            .unwrap();
        assert!(!ok);
        let text = fs::read_to_string(art.path("report.txt")).unwrap();
        assert!(text.contains("FAIL b: bad"));
        assert!(text.contains("result: FAIL (1/2 checks)"));
        fs::remove_dir_all(&tmp).unwrap();
    }

    #[test]
    fn csv_starts_with_the_header() {
        let tmp = std::env::temp_dir().join(format!("besov-ns-csv-test-{}", std::process::id()));
        let art = Artifacts::new(&tmp).unwrap();
        art.csv("x.csv", "a,b", vec!["1,2".to_string()]).unwrap();
        let text = fs::read_to_string(art.path("x.csv")).unwrap();
        assert_eq!(text, "a,b\n1,2\n");
        fs::remove_dir_all(&tmp).unwrap();
    }

    #[test]
    fn numeric_cells_have_fixed_width_format() {
        assert_eq!(fnum(1.0), "1.000000000000e0");
        assert_eq!(fnum(-0.5), "-5.000000000000e-1");
    }
}

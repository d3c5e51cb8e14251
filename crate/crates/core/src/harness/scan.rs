//! Last line of defense: report artifacts must never quote a protected
//! record. Synthetic CSVs are the mechanism's output and are exempt; the
//! scan covers everything derived for human or downstream consumption.

use std::path::{Path, PathBuf};

use crate::data::Dataset;
use crate::error::Result;

/// Returns a description per file that contains any original row verbatim
/// (as its exact CSV line, which for continuous columns carries full float
/// precision, so accidental matches are not a practical concern).
pub fn scan_for_leaks(original: &Dataset, files: &[PathBuf]) -> Result<Vec<String>> {
    let csv = original.to_csv_string()?;
    let rows: Vec<&str> = csv.lines().skip(1).filter(|l| !l.is_empty()).collect();
    let mut findings = Vec::new();
    for path in files {
        if !path.is_file() {
            continue;
        }
        let content = std::fs::read_to_string(path)?;
        if let Some(row) = rows.iter().position(|r| content.contains(*r)) {
            findings.push(format!("{} contains original row {}", path.display(), row + 1));
        }
    }
    Ok(findings)
}

/// The artifacts a run derives from protected data, existing or not.
pub fn report_artifacts(out_dir: &Path, algorithms: &[String]) -> Vec<PathBuf> {
    let mut files = vec![
        out_dir.join("report.json"),
        out_dir.join("metrics.csv"),
        out_dir.join("report.md"),
    ];
    for a in algorithms {
        files.push(out_dir.join(format!("radar_{a}.svg")));
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::demo_dataset;

    #[test]
    fn planted_row_is_caught_and_clean_files_pass() {
        let original = demo_dataset(3, 40);
        let dir = tempfile::tempdir().unwrap();
        let clean = dir.path().join("report.md");
        std::fs::write(&clean, "| metric | value |\n| specks | 0.12 |\n").unwrap();

        let csv = original.to_csv_string().unwrap();
        let row = csv.lines().nth(5).unwrap();
        let dirty = dir.path().join("report.json");
        std::fs::write(&dirty, format!("{{\"debug\": \"{row}\"}}")).unwrap();

        let missing = dir.path().join("not_written.svg");
        let findings =
            scan_for_leaks(&original, &[clean.clone(), dirty.clone(), missing]).unwrap();
        assert_eq!(findings.len(), 1);
        assert!(findings[0].contains("report.json"));
        assert!(findings[0].contains("row 5"));

        let findings = scan_for_leaks(&original, &[clean]).unwrap();
        assert!(findings.is_empty());
    }
}

//! Result persistence: the shared results.csv ledger plus per-experiment
//! sidecar files, all written atomically (temp file + rename) so a crashed
//! run never leaves a half-written artifact.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

pub const RESULTS_HEADER: &str = "experiment_id,timestamp,config_hash,law,n,p,replicas,seed,\
statistic,value,ci_low,ci_high,tolerance,margin,pass";

/// One row of results.csv. Optional numeric fields render as empty cells.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub experiment_id: String,
    pub timestamp: u64,
    pub config_hash: String,
    pub law: String,
    pub n: usize,
    pub p: u32,
    pub replicas: usize,
    pub seed: u64,
    pub statistic: String,
    pub value: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub tolerance: Option<f64>,
    pub margin: Option<f64>,
    pub pass: Option<bool>,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

/// Law descriptions may contain commas (e.g. table laws); keep the CSV
/// column count stable by swapping them for semicolons.
fn sanitize_cell(s: &str) -> String {
    s.replace(',', ";")
}

impl ResultRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment_id,
            self.timestamp,
            self.config_hash,
            sanitize_cell(&self.law),
            self.n,
            self.p,
            self.replicas,
            self.seed,
            self.statistic,
            self.value,
            opt(self.ci_low),
            opt(self.ci_high),
            opt(self.tolerance),
            opt(self.margin),
            self.pass.map(|b| b.to_string()).unwrap_or_default(),
        )
    }
}

/// Writes `content` to `path` atomically.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

/// Appends rows to `<dir>/results.csv`, creating it (with header) on first
/// use. The whole file is rewritten through a temp file so appends are
/// atomic too.
pub fn append_results(dir: &Path, rows: &[ResultRecord]) -> io::Result<PathBuf> {
    let path = dir.join("results.csv");
    let mut body = match std::fs::read_to_string(&path) {
        Ok(existing) => existing,
        Err(e) if e.kind() == io::ErrorKind::NotFound => format!("{RESULTS_HEADER}\n"),
        Err(e) => return Err(e),
    };
    for row in rows {
        let _ = writeln!(body, "{}", row.to_csv_row());
    }
    write_atomic(&path, &body)?;
    Ok(path)
}

/// Sidecar CSV with per-replica scalar values.
pub fn write_replica_sidecar(
    dir: &Path,
    experiment_id: &str,
    values: &[f64],
) -> io::Result<PathBuf> {
    let mut body = String::from("replica,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(body, "{i},{v}");
    }
    let path = dir.join(format!("{experiment_id}_replicas.csv"));
    write_atomic(&path, &body)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(stat: &str, value: f64) -> ResultRecord {
        ResultRecord {
            experiment_id: "test-abc".into(),
            timestamp: 0,
            config_hash: "deadbeefdeadbeef".into(),
            law: "rademacher".into(),
            n: 8,
            p: 1,
            replicas: 2,
            seed: 1,
            statistic: stat.into(),
            value,
            ci_low: None,
            ci_high: Some(1.5),
            tolerance: None,
            margin: None,
            pass: Some(true),
        }
    }

    #[test]
    fn row_rendering_with_empty_cells() {
        let row = record("delta_root", 0.25).to_csv_row();
        assert_eq!(
            row,
            "test-abc,0,deadbeefdeadbeef,rademacher,8,1,2,1,delta_root,0.25,,1.5,,,true"
        );
        assert_eq!(row.matches(',').count(), RESULTS_HEADER.matches(',').count());
    }

    #[test]
    fn law_commas_become_semicolons() {
        let mut r = record("a", 1.0);
        r.law = "table(1:0.5,-1:0.5)".into();
        let row = r.to_csv_row();
        assert_eq!(row.matches(',').count(), RESULTS_HEADER.matches(',').count());
        assert!(row.contains("table(1:0.5;-1:0.5)"));
    }

    #[test]
    fn append_creates_then_extends() {
        let dir = std::env::temp_dir().join(format!("rml-out-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        let p = append_results(&dir, &[record("a", 1.0)]).unwrap();
        let p2 = append_results(&dir, &[record("b", 2.0)]).unwrap();
        assert_eq!(p, p2);
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], RESULTS_HEADER);
        assert!(lines[1].contains(",a,") && lines[2].contains(",b,"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

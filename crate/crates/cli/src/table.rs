//! Result tables: CSV with a mandatory header and 17-significant-digit
//! numbers, mirrored losslessly to JSON.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub k: u32,
    pub region: String,
    pub model: String,
    pub statistic: String,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ResultTable {
    pub rows: Vec<Row>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultTable {
    pub fn push(&mut self, k: u32, region: &str, model: &str, statistic: &str, value: f64, stderr: f64) {
        self.rows.push(Row {
            k,
            region: region.to_string(),
            model: model.to_string(),
            statistic: statistic.to_string(),
            value,
            stderr,
        });
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "k,region,model,statistic,value,stderr")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{},{},{},{},{}",
                r.k,
                r.region,
                r.model,
                r.statistic,
                fmt17(r.value),
                fmt17(r.stderr)
            )?;
        }
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(f, &self.rows).map_err(std::io::Error::other)
    }
}

/// Reads a table back (used by tests for the round-trip check).
pub fn read_csv(path: &Path) -> std::io::Result<ResultTable> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    assert_eq!(header, "k,region,model,statistic,value,stderr", "schema drift");
    let mut t = ResultTable::default();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        t.rows.push(Row {
            k: parts[0].parse().unwrap(),
            region: parts[1].to_string(),
            model: parts[2].to_string(),
            statistic: parts[3].to_string(),
            value: parts[4].parse().unwrap(),
            stderr: parts[5].parse().unwrap(),
        });
    }
    Ok(t)
}

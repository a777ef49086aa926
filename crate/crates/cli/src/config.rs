//! Flat key = value configuration files. Precedence: CLI flags > config file
//! > built-in defaults. Lines starting with '#' are comments.

use std::collections::HashMap;
use std::path::Path;

#[derive(Clone, Debug, Default)]
pub struct FileConfig {
    map: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut map = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(std::io::Error::other(format!(
                    "config line {} is not `key = value`: {line:?}",
                    lineno + 1
                )));
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig { map })
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Option<T> {
        self.map.get(key).and_then(|v| v.parse().ok())
    }
}

/// flag (CLI) > file value > default.
pub fn resolve<T: std::str::FromStr + Copy>(
    flag: Option<T>,
    file: &FileConfig,
    key: &str,
    default: T,
) -> T {
    flag.or_else(|| file.get(key)).unwrap_or(default)
}

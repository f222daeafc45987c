//! Run configuration: defaults, config-file loading, and flag merging.
//!
//! A config file may be JSON (`{"q": "2", "prec": 256, ...}`) or simple
//! `key=value` lines (`#` comments allowed). Recognized keys: `q`, `prec`,
//! `guard`, `depths`, `wmax`, `format`, `output`, `workers`, `cache_limit`.
//! Command-line flags always win over file values, which win over defaults.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
    Markdown,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<OutputFormat, String> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(format!(
                "unknown format {other:?} (expected text, csv, json, or md)"
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Markdown => "md",
        })
    }
}

/// Fully merged run settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Field designation accepted by the field parser: "q" or "q:c0,c1,...".
    pub field: String,
    /// Absolute u-adic precision; None picks each command's default
    /// (the max(8·weight, 160) floor where a weight exists).
    pub precision: Option<i64>,
    /// Extra agreement demanded past any rational candidate's degrees.
    pub guard: i64,
    /// Depth pairs scanned by search.
    pub depths: Vec<(u32, u32)>,
    /// Maximum composition weight for search.
    pub wmax: u64,
    /// Output format; None picks each command's default.
    pub format: Option<OutputFormat>,
    /// Write machine output here instead of stdout.
    pub output: Option<PathBuf>,
    /// Worker threads for parallel scans.
    pub workers: usize,
    /// Maximum number of cached power-sum series.
    pub cache_limit: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: "2".to_string(),
            precision: None,
            guard: 20,
            depths: vec![(2, 2)],
            wmax: 31,
            format: None,
            output: None,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache_limit: usize::MAX,
        }
    }
}

impl RunConfig {
    /// Enforce the documented invariants after merging.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(n) = self.precision {
            if n < 16 {
                return Err(format!("precision must be >= 16, got {n}"));
            }
        }
        if self.guard < 1 {
            return Err(format!("guard must be >= 1, got {}", self.guard));
        }
        if self.workers < 1 {
            return Err("workers must be >= 1".to_string());
        }
        if self.depths.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err("depth pairs need both depths >= 1".to_string());
        }
        Ok(())
    }

    /// Apply a layer of overrides (file first, then flags).
    pub fn apply(&mut self, layer: &Overrides) {
        if let Some(v) = &layer.field {
            self.field = v.clone();
        }
        if let Some(v) = layer.precision {
            self.precision = Some(v);
        }
        if let Some(v) = layer.guard {
            self.guard = v;
        }
        if let Some(v) = &layer.depths {
            self.depths = v.clone();
        }
        if let Some(v) = layer.wmax {
            self.wmax = v;
        }
        if let Some(v) = layer.format {
            self.format = Some(v);
        }
        if let Some(v) = &layer.output {
            self.output = Some(v.clone());
        }
        if let Some(v) = layer.workers {
            self.workers = v;
        }
        if let Some(v) = layer.cache_limit {
            self.cache_limit = v;
        }
    }
}

/// One layer of optional settings (from a file or from flags).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub field: Option<String>,
    pub precision: Option<i64>,
    pub guard: Option<i64>,
    pub depths: Option<Vec<(u32, u32)>>,
    pub wmax: Option<u64>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub cache_limit: Option<usize>,
}

/// Parse "AxB,CxD,..." into depth pairs; a bare "A" means "AxA".
pub fn parse_depths(s: &str) -> Result<Vec<(u32, u32)>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err("empty depth pair".to_string());
        }
        let pair = match item.split_once(['x', 'X']) {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| format!("bad depth {a:?}"))?;
                let b: u32 = b.trim().parse().map_err(|_| format!("bad depth {b:?}"))?;
                (a, b)
            }
            None => {
                let a: u32 = item.parse().map_err(|_| format!("bad depth {item:?}"))?;
                (a, a)
            }
        };
        out.push(pair);
    }
    Ok(out)
}

/// Read a config file (JSON or key=value lines) into an override layer.
/// Parse failures carry the offending line number.
pub fn load_config(path: &std::path::Path) -> Result<Overrides, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        load_json(path, &text)
    } else {
        load_key_value(path, &text)
    }
}

fn load_json(path: &std::path::Path, text: &str) -> Result<Overrides, String> {
    let doc: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| format!("{}: line {}: {e}", path.display(), e.line()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| format!("{}: line 1: top level must be an object", path.display()))?;
    let mut layer = Overrides::default();
    for (key, value) in obj {
        let rendered = match value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => other.to_string(),
        };
        set_key(&mut layer, key, &rendered)
            .map_err(|e| format!("{}: key {key:?}: {e}", path.display()))?;
    }
    Ok(layer)
}

fn load_key_value(path: &std::path::Path, text: &str) -> Result<Overrides, String> {
    let mut layer = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}: line {lineno}: expected key=value", path.display()))?;
        set_key(&mut layer, key.trim(), value.trim())
            .map_err(|e| format!("{}: line {lineno}: {e}", path.display()))?;
    }
    Ok(layer)
}

fn set_key(layer: &mut Overrides, key: &str, value: &str) -> Result<(), String> {
    match key {
        "q" | "field" => layer.field = Some(value.to_string()),
        "prec" | "precision" => {
            layer.precision =
                Some(value.parse().map_err(|_| format!("bad precision {value:?}"))?);
        }
        "guard" => {
            layer.guard = Some(value.parse().map_err(|_| format!("bad guard {value:?}"))?);
        }
        "depths" => layer.depths = Some(parse_depths(value)?),
        "wmax" => {
            layer.wmax = Some(value.parse().map_err(|_| format!("bad wmax {value:?}"))?);
        }
        "format" => layer.format = Some(OutputFormat::parse(value)?),
        "output" => layer.output = Some(PathBuf::from(value)),
        "workers" => {
            layer.workers =
                Some(value.parse().map_err(|_| format!("bad workers {value:?}"))?);
        }
        "cache_limit" => {
            layer.cache_limit =
                Some(value.parse().map_err(|_| format!("bad cache_limit {value:?}"))?);
        }
        other => return Err(format!("unknown key {other:?}")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_keeps_defaults() {
        let dir = std::env::temp_dir().join("mz-config-test-empty");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.conf");
        std::fs::write(&path, "").unwrap();
        let layer = load_config(&path).unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply(&layer);
        assert_eq!(cfg.field, "2");
        assert_eq!(cfg.precision, None);
        assert_eq!(cfg.guard, 20);
        assert_eq!(cfg.depths, vec![(2, 2)]);
        cfg.validate().unwrap();
    }

    #[test]
    fn key_value_and_json_agree_and_flags_win() {
        let dir = std::env::temp_dir().join("mz-config-test-kv");
        std::fs::create_dir_all(&dir).unwrap();
        let kv = dir.join("a.conf");
        std::fs::write(&kv, "# comment\nq=4\nprec=300\ndepths=2x2,3x2\n").unwrap();
        let js = dir.join("a.json");
        std::fs::write(&js, "{\"q\": 4, \"prec\": 300, \"depths\": \"2x2,3x2\"}").unwrap();
        let from_kv = load_config(&kv).unwrap();
        let from_js = load_config(&js).unwrap();
        for layer in [&from_kv, &from_js] {
            assert_eq!(layer.field.as_deref(), Some("4"));
            assert_eq!(layer.precision, Some(300));
            assert_eq!(layer.depths.as_deref(), Some(&[(2, 2), (3, 2)][..]));
        }
        let mut cfg = RunConfig::default();
        cfg.apply(&from_kv);
        let flags = Overrides { precision: Some(400), ..Overrides::default() };
        cfg.apply(&flags);
        assert_eq!(cfg.precision, Some(400));
        assert_eq!(cfg.field, "4");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = std::env::temp_dir().join("mz-config-test-err");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        std::fs::write(&path, "q=2\nnot a setting\n").unwrap();
        let err = load_config(&path).unwrap_err();
        assert!(err.contains("line 2"), "got: {err}");
        let path2 = dir.join("bad.json");
        std::fs::write(&path2, "{\"q\": }").unwrap();
        let err2 = load_config(&path2).unwrap_err();
        assert!(err2.contains("line 1"), "got: {err2}");
    }

    #[test]
    fn invariants_rejected() {
        let mut cfg = RunConfig::default();
        cfg.precision = Some(8);
        assert!(cfg.validate().is_err());
        cfg.precision = Some(16);
        cfg.guard = 0;
        assert!(cfg.validate().is_err());
        cfg.guard = 1;
        cfg.workers = 0;
        assert!(cfg.validate().is_err());
    }
}

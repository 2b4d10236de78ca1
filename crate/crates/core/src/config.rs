//! Experiment configuration files: flat `key = value` lines grouped under
//! `[experiment]` and `[output]` headers. `#` starts a comment.

use std::fmt;
use std::str::FromStr;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::lab::ExperimentConfig;

pub const PRESET_ELLIPTIC_EXACT: &str = include_str!("../presets/elliptic-exact.conf");
pub const PRESET_GENUS2_MONTECARLO: &str = include_str!("../presets/genus2-montecarlo.conf");

pub const PRESETS: [(&str, &str); 2] = [
    ("elliptic-exact", PRESET_ELLIPTIC_EXACT),
    ("genus2-montecarlo", PRESET_GENUS2_MONTECARLO),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown output format {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub experiment: ExperimentConfig,
    pub output: OutputConfig,
}

fn config_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| format!("bad list entry {v:?}")))
        .collect()
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ConfigFile::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                if section != "experiment" && section != "output" {
                    return Err(config_err(line_no, format!("unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(line_no, format!("expected key = value, got {line:?}")))?;
            let key = key.trim();
            if section.is_empty() {
                return Err(config_err(line_no, "key outside of a section"));
            }
            let qualified = format!("{section}.{key}");
            out.set(&qualified, value.trim())
                .map_err(|e| config_err(line_no, e))?;
        }
        Ok(out)
    }

    /// Sets `section.key`; plain keys are looked up in `[experiment]` first.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let key = match key {
            "path" | "format" => format!("output.{key}"),
            k if !k.contains('.') => format!("experiment.{k}"),
            k => k.to_string(),
        };
        let e = &mut self.experiment;
        let err = |x: Error| x.to_string();
        match key.as_str() {
            "experiment.family" => e.family = value.parse().map_err(err)?,
            "experiment.q" => e.q_list = parse_list(value)?,
            "experiment.curve" => {
                e.curve = if value.is_empty() {
                    None
                } else {
                    Some(value.parse::<CurveSpec>().map_err(err)?)
                }
            }
            "experiment.delta" => {
                e.delta = value.parse().map_err(|_| format!("bad delta {value:?}"))?
            }
            "experiment.offsets" => e.offsets = parse_list(value)?,
            "experiment.mode" => e.mode = value.parse().map_err(err)?,
            "experiment.samples" => {
                e.samples = value.parse().map_err(|_| format!("bad samples {value:?}"))?
            }
            "experiment.oracle" => e.oracle = value.parse().map_err(err)?,
            "experiment.seed" => {
                return Err("the seed is taken only from --seed".to_string());
            }
            "output.path" => self.output.path = Some(value.to_string()),
            "output.format" => self.output.format = value.parse().map_err(err)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{Family, Mode};
    use crate::scheme::Oracle;

    #[test]
    fn presets_parse() {
        let a = ConfigFile::parse(PRESET_ELLIPTIC_EXACT).unwrap();
        assert_eq!(a.experiment.q_list, vec![101, 211, 401]);
        assert_eq!(a.experiment.offsets, vec![0, 1]);
        assert_eq!(a.experiment.mode, Mode::Exact);
        assert_eq!(a.experiment.family, Family::Elliptic);
        a.experiment.validate().unwrap();
        let b = ConfigFile::parse(PRESET_GENUS2_MONTECARLO).unwrap();
        assert_eq!(b.experiment.family, Family::Genus2);
        assert_eq!(b.experiment.samples, 20_000);
        assert_eq!(b.experiment.oracle, Oracle::Kernel);
        assert_eq!(b.experiment.offsets, vec![0, 1, 2, 3]);
        b.experiment.validate().unwrap();
        assert!(preset("nope").is_none());
    }

    #[test]
    fn overrides_and_errors() {
        let mut c = ConfigFile::parse("[experiment]\nq = 13\n[output]\nformat = json\n").unwrap();
        assert_eq!(c.output.format, OutputFormat::Json);
        c.set("samples", "77").unwrap();
        c.set("curve", "ec:p=13,a=1,b=1").unwrap();
        c.set("path", "out.csv").unwrap();
        assert_eq!(c.experiment.samples, 77);
        assert!(c.experiment.curve.is_some());
        assert_eq!(c.output.path.as_deref(), Some("out.csv"));
        assert!(c.set("bogus", "1").is_err());
        assert!(ConfigFile::parse("q = 5").is_err());
        assert!(ConfigFile::parse("[experiment]\nseed = 4").is_err());
        assert!(ConfigFile::parse("[weird]\n").is_err());
        assert!(ConfigFile::parse("[experiment]\nq = 1x").is_err());
        assert!(ConfigFile::parse("[experiment]\nno equals sign").is_err());
    }
}

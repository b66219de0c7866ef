//! `key=value` configuration files and flag/file merging.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use wenoshep_core::experiment::PointSource;
use wenoshep_core::{Geometry, Mode, TestField};

/// Bad flag values, bad config files and similar user mistakes.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Every key a config file may contain, in normalized form.
pub const KNOWN_KEYS: &[&str] = &[
    "kernel",
    "eps_shape",
    "eps_rule",
    "stencil_c",
    "stencil_min_size",
    "weno_epsilon",
    "weno_t",
    "mode",
    "allow_uncovered",
    "probe_resolution",
    "points",
    "levels",
    "level",
    "field",
    "gamma",
    "eval_grid_n",
    "eps0",
    "threshold",
    "format",
    "dump_indicators",
    "data",
    "query",
    "out",
];

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Values read from a config file, consulted when a flag is absent.
#[derive(Debug, Default)]
pub struct FileConfig {
    path: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        cfg.path = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let key = normalize(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{}`", n + 1, k.trim()));
            }
            if values.insert(key, v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key `{}`", n + 1, k.trim()));
            }
        }
        Ok(FileConfig { path: None, values })
    }

    /// The flag value if given, else the file value, parsed with `parse`.
    pub fn pick<T>(
        &self,
        key: &str,
        flag: Option<&str>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> anyhow::Result<Option<T>> {
        let raw = match flag {
            Some(v) => v,
            None => match self.values.get(key) {
                Some(v) => v.as_str(),
                None => return Ok(None),
            },
        };
        parse(raw).map(Some).map_err(|e| {
            let origin = match (&self.path, flag) {
                (Some(p), None) => format!(" (from {})", p.display()),
                _ => String::new(),
            };
            usage(format!("invalid value `{raw}` for {}{origin}: {e}", key.replace('_', "-")))
        })
    }

    /// Boolean switches: set by the flag, or `true`/`false` in the file.
    pub fn switch(&self, key: &str, flag: bool) -> anyhow::Result<bool> {
        if flag {
            return Ok(true);
        }
        Ok(self.pick(key, None, parse_bool)?.unwrap_or(false))
    }
}

pub fn parse_from<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| e.to_string())
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err("expected true or false".into()),
    }
}

/// `4..7` and `4..=7` are inclusive; `4,5,7` and `6` are literal lists.
pub fn parse_levels(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{}`: {e}", t.trim()));
    if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (num(a)?, num(b.trim_start_matches('='))?);
        if hi < lo {
            return Err("empty level range".into());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(num).collect()
}

/// `linear`, `weno` or `both`.
pub fn parse_modes(s: &str) -> Result<Vec<Mode>, String> {
    if s.trim().eq_ignore_ascii_case("both") {
        return Ok(vec![Mode::Linear, Mode::Weno]);
    }
    Ok(vec![parse_from::<Mode>(s)?])
}

/// The only named shape rule is `level`.
pub fn parse_eps_rule(s: &str) -> Result<(), String> {
    match s.trim() {
        "level" => Ok(()),
        other => Err(format!("unknown shape rule `{other}`, expected level")),
    }
}

/// `franke`, `piecewise` (jump across the line), a geometry name for the
/// piecewise field, or `constant:VALUE`.
pub fn parse_field(s: &str) -> Result<TestField, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("franke") {
        return Ok(TestField::Franke);
    }
    if s.eq_ignore_ascii_case("piecewise") {
        return Ok(TestField::Piecewise { geometry: Geometry::Line });
    }
    if let Some(v) = s.strip_prefix("constant:") {
        let value: f64 = parse_from(v)?;
        return Ok(TestField::Constant { value });
    }
    let geometry: Geometry = parse_from(s)?;
    Ok(TestField::Piecewise { geometry })
}

/// `grid`, `halton`, or a path to an `x,y,f` file.
pub fn parse_points(s: &str) -> Result<PointSource, String> {
    match s.trim() {
        "" => Err("empty point source".into()),
        "grid" => Ok(PointSource::Grid),
        "halton" => Ok(PointSource::Halton),
        path => Ok(PointSource::Csv { path: path.into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        assert_eq!(parse_levels("4..7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_levels("4..=7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_levels("3, 5").unwrap(), vec![3, 5]);
        assert_eq!(parse_levels("6").unwrap(), vec![6]);
        assert!(parse_levels("7..4").is_err());
        assert!(parse_levels("a").is_err());
    }

    #[test]
    fn fields_and_modes() {
        assert_eq!(parse_field("franke").unwrap(), TestField::Franke);
        assert_eq!(parse_field("constant:7").unwrap(), TestField::Constant { value: 7.0 });
        assert_eq!(
            parse_field("circle").unwrap(),
            TestField::Piecewise { geometry: Geometry::Circle }
        );
        assert_eq!(
            parse_field("piecewise").unwrap(),
            TestField::Piecewise { geometry: Geometry::Line }
        );
        assert!(parse_field("sphere").is_err());
        assert!(parse_eps_rule("level").is_ok());
        assert!(parse_eps_rule("fixed").is_err());
        assert_eq!(parse_modes("both").unwrap().len(), 2);
        assert_eq!(parse_modes("weno").unwrap(), vec![Mode::Weno]);
        assert!(parse_modes("cubic").is_err());
    }

    #[test]
    fn file_parsing() {
        let cfg = FileConfig::parse("# comment\nstencil-c = 3.0\nlevels=4..5 # trailing\n\n").unwrap();
        assert_eq!(cfg.pick("stencil_c", None, parse_from::<f64>).unwrap(), Some(3.0));
        assert_eq!(cfg.pick("stencil_c", Some("2"), parse_from::<f64>).unwrap(), Some(2.0));
        assert_eq!(cfg.pick("levels", None, parse_levels).unwrap(), Some(vec![4, 5]));
        assert_eq!(cfg.pick("kernel", None, parse_from::<f64>).unwrap(), None);
        assert!(FileConfig::parse("nonsense").is_err());
        assert!(FileConfig::parse("colour=blue").is_err());
        assert!(FileConfig::parse("mode=weno\nmode=linear").is_err());
    }

    #[test]
    fn switches() {
        let cfg = FileConfig::parse("allow_uncovered=yes").unwrap();
        assert!(cfg.switch("allow_uncovered", false).unwrap());
        assert!(FileConfig::default().switch("allow_uncovered", true).unwrap());
        assert!(!FileConfig::default().switch("allow_uncovered", false).unwrap());
    }
}

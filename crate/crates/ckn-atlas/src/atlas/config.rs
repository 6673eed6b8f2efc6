//! Scan configuration: defaults, a plain `key = value` file format, and the
//! precedence rule (command-line flags over file entries over defaults).

use std::path::{Path, PathBuf};

use crate::constants::two_star;
use crate::error::{Error, Result};

/// Parameters of one curve scan. `gn_tolerance` is the relative tolerance
/// handed to the shooting integration behind the matching curve; the output
/// paths are optional because a table can be consumed in memory.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub d: u32,
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub gn_tolerance: f64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::domain("curve scans need d >= 2"));
        }
        if !(self.p_min > 2.0 && self.p_min < self.p_max && self.p_max < two_star(self.d)) {
            return Err(Error::domain(format!(
                "need 2 < p_min < p_max < {}; got [{}, {}]",
                two_star(self.d),
                self.p_min,
                self.p_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::domain("a scan needs at least 2 grid points"));
        }
        if !(self.gn_tolerance > 0.0 && self.gn_tolerance.is_finite()) {
            return Err(Error::domain("tolerance must be positive and finite"));
        }
        Ok(())
    }

    /// Evenly spaced grid with `steps` points, endpoints included.
    pub fn p_grid(&self) -> Vec<f64> {
        let n = self.steps;
        let h = (self.p_max - self.p_min) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.p_max
                } else {
                    self.p_min + h * i as f64
                }
            })
            .collect()
    }
}

/// Accumulates settings from any mix of sources. Each setter overwrites, so
/// precedence is the order of application: load the file first, then the
/// flags. `finish` fills what is still unset from the defaults.
#[derive(Debug, Default, Clone)]
pub struct RunConfigBuilder {
    d: Option<u32>,
    p_min: Option<f64>,
    p_max: Option<f64>,
    steps: Option<usize>,
    gn_tolerance: Option<f64>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
}

impl RunConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn d(&mut self, d: u32) -> &mut Self {
        self.d = Some(d);
        self
    }

    pub fn p_min(&mut self, v: f64) -> &mut Self {
        self.p_min = Some(v);
        self
    }

    pub fn p_max(&mut self, v: f64) -> &mut Self {
        self.p_max = Some(v);
        self
    }

    pub fn steps(&mut self, n: usize) -> &mut Self {
        self.steps = Some(n);
        self
    }

    pub fn gn_tolerance(&mut self, tol: f64) -> &mut Self {
        self.gn_tolerance = Some(tol);
        self
    }

    pub fn out(&mut self, path: PathBuf) -> &mut Self {
        self.out = Some(path);
        self
    }

    pub fn svg(&mut self, path: PathBuf) -> &mut Self {
        self.svg = Some(path);
        self
    }

    /// Read a `key = value` file into the builder. Later flag setters still
    /// win because they run after this call.
    pub fn apply_file(&mut self, path: &Path) -> Result<&mut Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (key, value) in parse_config_text(&text)? {
            self.apply_entry(&key, &value)?;
        }
        Ok(self)
    }

    fn apply_entry(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::domain(format!("bad value for {key}: {value:?}")))
        }
        match key {
            "d" => self.d = Some(num(key, value)?),
            "p_min" => self.p_min = Some(num(key, value)?),
            "p_max" => self.p_max = Some(num(key, value)?),
            "steps" => self.steps = Some(num(key, value)?),
            "tol" => self.gn_tolerance = Some(num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            other => {
                return Err(Error::domain(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// Resolve defaults and validate. The default p window follows the
    /// admissible range of the dimension, pulled in by 0.05 on both ends and
    /// capped at 6 where the upper endpoint is unbounded.
    pub fn finish(&self) -> Result<RunConfig> {
        let d = self
            .d
            .ok_or_else(|| Error::domain("the dimension must be set"))?;
        if d < 2 {
            return Err(Error::domain("curve scans need d >= 2"));
        }
        let p_max_default = (two_star(d) - 0.05).min(6.0);
        let config = RunConfig {
            d,
            p_min: self.p_min.unwrap_or(2.05),
            p_max: self.p_max.unwrap_or(p_max_default),
            steps: self.steps.unwrap_or(100),
            gn_tolerance: self.gn_tolerance.unwrap_or(1e-12),
            out: self.out.clone(),
            svg: self.svg.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Split config text into (key, value) pairs. Blank lines and lines starting
/// with `#` are skipped; everything else must contain `=`.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::domain(format!(
                "config line {} is not `key = value`: {line:?}",
                idx + 1
            )));
        };
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_track_the_dimension() {
        let c = RunConfigBuilder::new().d(5).finish().unwrap();
        assert_eq!(c.steps, 100);
        assert!((c.p_min - 2.05).abs() < 1e-15);
        assert!((c.p_max - (10.0 / 3.0 - 0.05)).abs() < 1e-12);

        // unbounded upper endpoint gets the fixed cap
        let c2 = RunConfigBuilder::new().d(2).finish().unwrap();
        assert!((c2.p_max - 6.0).abs() < 1e-15);
    }

    #[test]
    fn file_entries_lose_to_later_flags() {
        let mut b = RunConfigBuilder::new();
        for (k, v) in parse_config_text("d = 5\nsteps = 40\ntol = 1e-9").unwrap() {
            b.apply_entry(&k, &v).unwrap();
        }
        b.steps(7);
        let c = b.finish().unwrap();
        assert_eq!(c.d, 5);
        assert_eq!(c.steps, 7);
        assert_eq!(c.gn_tolerance, 1e-9);
    }

    #[test]
    fn parser_skips_comments_and_flags_junk() {
        let entries =
            parse_config_text("# comment\n\n  out = a b.csv  \nsvg=fig.svg\n").unwrap();
        assert_eq!(
            entries,
            vec![
                ("out".to_string(), "a b.csv".to_string()),
                ("svg".to_string(), "fig.svg".to_string())
            ]
        );
        assert!(parse_config_text("steps 40").is_err());

        let mut b = RunConfigBuilder::new();
        assert!(b.apply_entry("step", "40").is_err());
        assert!(b.apply_entry("steps", "forty").is_err());
    }

    #[test]
    fn validation_guards_the_window() {
        assert!(RunConfigBuilder::new().finish().is_err());
        assert!(RunConfigBuilder::new().d(1).finish().is_err());
        let mut b = RunConfigBuilder::new();
        b.d(3).p_min(2.5).p_max(2.4);
        assert!(b.finish().is_err());
        let mut b = RunConfigBuilder::new();
        b.d(3).p_max(7.0);
        assert!(b.finish().is_err());
        let mut b = RunConfigBuilder::new();
        b.d(3).steps(1);
        assert!(b.finish().is_err());
    }

    #[test]
    fn grid_hits_both_endpoints() {
        let c = RunConfigBuilder::new().d(4).p_min(2.1).p_max(2.9).steps(5).finish().unwrap();
        let g = c.p_grid();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 2.1);
        assert_eq!(g[4], 2.9);
        assert!((g[2] - 2.5).abs() < 1e-15);
    }
}

//! Layered run settings: defaults, then the config file, then flags.

use std::path::PathBuf;

use hwlab::irreps::Family;
use hwlab::suite::{Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Defining,
    Sym,
    PrimitiveWedge2,
}

impl std::str::FromStr for FamilyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "defining" => Ok(FamilyName::Defining),
            "sym" => Ok(FamilyName::Sym),
            "primitive-wedge2" | "primitive_wedge2" | "wedge2" => Ok(FamilyName::PrimitiveWedge2),
            other => Err(format!("unknown family `{other}` (expected defining, sym, primitive-wedge2)")),
        }
    }
}

/// Every field optional; `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub n: Option<usize>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub truncation: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub k_max: Option<usize>,
    pub family: Option<FamilyName>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub tolerances: Vec<(String, f64)>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

impl Settings {
    /// Parses the flat `key = value` format. Blank lines and lines starting
    /// with `#` are ignored; `tol.<name> = <value>` sets a tolerance override.
    pub fn from_config_text(text: &str) -> Result<Self, String> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let at = |e: String| format!("line {}: {e}", lineno + 1);
            match key {
                "n" => s.n = Some(parse(key, value).map_err(at)?),
                "lambda" => s.lambda = Some(parse(key, value).map_err(at)?),
                "mu" => s.mu = Some(parse(key, value).map_err(at)?),
                "truncation" | "N" => s.truncation = Some(parse(key, value).map_err(at)?),
                "quad_nodes" | "m" => s.quad_nodes = Some(parse(key, value).map_err(at)?),
                "k_max" => s.k_max = Some(parse(key, value).map_err(at)?),
                "family" => s.family = Some(value.parse().map_err(at)?),
                "k" => s.k = Some(parse(key, value).map_err(at)?),
                "seed" => s.seed = Some(parse(key, value).map_err(at)?),
                "format" => s.format = Some(value.parse().map_err(|e: hwlab::Error| at(e.to_string()))?),
                "output" => s.output = Some(PathBuf::from(value)),
                _ => match key.strip_prefix("tol.") {
                    Some(name) if !name.is_empty() => s.tolerances.push((name.to_string(), parse(key, value).map_err(at)?)),
                    _ => return Err(at(format!("unknown key `{key}`"))),
                },
            }
        }
        Ok(s)
    }

    /// Overlays `self` on `base`; fields set here win.
    pub fn over(self, base: Settings) -> Settings {
        let mut tolerances = base.tolerances;
        tolerances.extend(self.tolerances);
        Settings {
            n: self.n.or(base.n),
            lambda: self.lambda.or(base.lambda),
            mu: self.mu.or(base.mu),
            truncation: self.truncation.or(base.truncation),
            quad_nodes: self.quad_nodes.or(base.quad_nodes),
            k_max: self.k_max.or(base.k_max),
            family: self.family.or(base.family),
            k: self.k.or(base.k),
            seed: self.seed.or(base.seed),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            tolerances,
        }
    }

    /// Fills `config` from these settings. `--k` without `--family` selects
    /// the symmetric power.
    pub fn apply(self, config: &mut RunConfig) {
        if let Some(v) = self.n {
            config.n = v;
        }
        if let Some(v) = self.lambda {
            config.lambda = v;
        }
        if let Some(v) = self.mu {
            config.mu = v;
        }
        if let Some(v) = self.truncation {
            config.truncation = v;
        }
        if let Some(v) = self.quad_nodes {
            config.quad_nodes = v;
        }
        if let Some(v) = self.k_max {
            config.k_max = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.format {
            config.format = v;
        }
        if self.output.is_some() {
            config.output_path = self.output;
        }
        let k = self.k.unwrap_or(match config.family {
            Family::Sym { k } => k,
            _ => 2,
        });
        config.family = match self.family {
            Some(FamilyName::Defining) => Family::Defining,
            Some(FamilyName::PrimitiveWedge2) => Family::PrimitiveWedge2,
            Some(FamilyName::Sym) => Family::Sym { k },
            None if self.k.is_some() => Family::Sym { k },
            None => config.family,
        };
        config.tolerances.extend(self.tolerances);
    }
}

//! Flat INI-style run configuration.
//!
//! One level of `[section]` headers with `key = value` lines, `#` comments.
//! Unknown sections or keys are rejected with the offending line number, and
//! every physical constraint is re-validated at parse time. `parse` then
//! `serialize` then `parse` is a fixed point.

use critlab_core::{Grid, ModelParams, PressureLaw};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: Option<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
    pub dealias: f64,
}

impl GridSection {
    pub fn build(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.dim, self.n, self.box_length, self.dealias)
            .map_err(|e| ConfigError { line: None, message: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamsSection {
    pub mu: f64,
    pub lambda: f64,
    pub xi: f64,
    pub theta: f64,
    pub eps: f64,
    pub pressure: PressureLaw,
}

impl ParamsSection {
    pub fn build(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::new(self.mu, self.lambda, self.xi, self.theta, self.eps, self.pressure)
            .map_err(|e| ConfigError { line: None, message: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_every: usize,
    pub renormalize_director: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFamily {
    /// `b0 = 0`, `div u0 = 0`
    WellPrepared,
    /// generic `b0`, `Q u0` of order one
    IllPrepared,
}

impl fmt::Display for DataFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataFamily::WellPrepared => write!(f, "well_prepared"),
            DataFamily::IllPrepared => write!(f, "ill_prepared"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSection {
    pub family: DataFamily,
    pub amplitude: f64,
    pub seed: u64,
}

/// Quantity tracked by the limit sweep at integrability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    B,
    Qu,
    W,
    Dbar,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::B => write!(f, "b"),
            Quantity::Qu => write!(f, "qu"),
            Quantity::W => write!(f, "w"),
            Quantity::Dbar => write!(f, "dbar"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MenuEntry {
    pub quantity: Quantity,
    pub p: f64,
}

impl fmt::Display for MenuEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.quantity, self.p)
    }
}

impl FromStr for MenuEntry {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (q, p) = s
            .split_once('@')
            .ok_or_else(|| format!("menu entry '{s}' is not of the form quantity@p"))?;
        let quantity = match q.trim() {
            "b" => Quantity::B,
            "qu" => Quantity::Qu,
            "w" => Quantity::W,
            "dbar" => Quantity::Dbar,
            other => return Err(format!("unknown quantity '{other}' (want b|qu|w|dbar)")),
        };
        let p: f64 =
            p.trim().parse().map_err(|_| format!("menu entry '{s}': bad integrability"))?;
        if p < 2.0 {
            return Err(format!("menu entry '{s}': integrability must be >= 2"));
        }
        Ok(MenuEntry { quantity, p })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub eps_list: Vec<f64>,
    pub norm_menu: Vec<MenuEntry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub grid: Option<GridSection>,
    pub params: Option<ParamsSection>,
    pub run: Option<RunSection>,
    pub data: Option<DataSection>,
    pub sweep: Option<SweepSection>,
}

struct RawEntry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

struct RawSection {
    line: usize,
    entries: Vec<RawEntry>,
}

impl RawSection {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        for e in self.entries.iter_mut() {
            if e.key == key && !e.used {
                e.used = true;
                return Some((e.line, e.value.clone()));
            }
        }
        None
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => match value.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(_) => err(Some(line), format!("cannot parse '{value}' for key '{key}'")),
            },
        }
    }

    fn require<T: FromStr>(&mut self, section: &str, key: &str) -> Result<T, ConfigError> {
        self.parse(key)?.map_or_else(
            || err(Some(self.line), format!("section [{section}] is missing key '{key}'")),
            Ok,
        )
    }

    fn reject_unused(&self, section: &str) -> Result<(), ConfigError> {
        for e in &self.entries {
            if !e.used {
                return err(
                    Some(e.line),
                    format!("unknown key '{}' in section [{section}]", e.key),
                );
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut sections: Vec<(String, RawSection)> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return err(Some(line_no), "unterminated section header");
                }
                let name = line[1..line.len() - 1].trim().to_string();
                if sections.iter().any(|(n, _)| *n == name) {
                    return err(Some(line_no), format!("duplicate section [{name}]"));
                }
                sections.push((name, RawSection { line: line_no, entries: Vec::new() }));
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(Some(line_no), "expected 'key = value'");
            };
            let Some((_, section)) = sections.last_mut() else {
                return err(Some(line_no), "key outside any [section]");
            };
            section.entries.push(RawEntry {
                line: line_no,
                key: key.trim().to_string(),
                value: value.trim().to_string(),
                used: false,
            });
        }

        let mut config = RunConfig::default();
        for (name, mut section) in sections {
            match name.as_str() {
                "grid" => {
                    let grid = GridSection {
                        dim: section.require("grid", "dim")?,
                        n: section.require("grid", "n")?,
                        box_length: section.require("grid", "L")?,
                        dealias: section.parse("dealias")?.unwrap_or(2.0 / 3.0),
                    };
                    section.reject_unused("grid")?;
                    grid.build().map_err(|mut e| {
                        e.line = Some(section.line);
                        e
                    })?;
                    config.grid = Some(grid);
                }
                "params" => {
                    let pressure_kind: String =
                        section.parse("pressure")?.unwrap_or_else(|| "gamma".to_string());
                    let gamma: Option<f64> = section.parse("gamma")?;
                    let pressure = match pressure_kind.as_str() {
                        "linear" => {
                            if gamma.is_some() {
                                return err(
                                    Some(section.line),
                                    "'gamma' given but pressure = linear",
                                );
                            }
                            PressureLaw::Linear
                        }
                        "gamma" => PressureLaw::Gamma(gamma.unwrap_or(2.0)),
                        other => {
                            return err(
                                Some(section.line),
                                format!("unknown pressure law '{other}' (want linear|gamma)"),
                            )
                        }
                    };
                    let params = ParamsSection {
                        mu: section.require("params", "mu")?,
                        lambda: section.require("params", "lambda")?,
                        xi: section.require("params", "xi")?,
                        theta: section.require("params", "theta")?,
                        eps: section.parse("eps")?.unwrap_or(1.0),
                        pressure,
                    };
                    section.reject_unused("params")?;
                    params.build().map_err(|mut e| {
                        e.line = Some(section.line);
                        e
                    })?;
                    config.params = Some(params);
                }
                "run" => {
                    let run = RunSection {
                        dt: section.require("run", "dt")?,
                        t_final: section.require("run", "T")?,
                        snapshot_every: section.parse("snapshot_every")?.unwrap_or(10),
                        renormalize_director: section
                            .parse("renormalize_director")?
                            .unwrap_or(true),
                    };
                    section.reject_unused("run")?;
                    if !(run.dt > 0.0) || !(run.t_final > 0.0) {
                        return err(Some(section.line), "dt and T must be positive");
                    }
                    if run.snapshot_every == 0 {
                        return err(Some(section.line), "snapshot_every must be >= 1");
                    }
                    config.run = Some(run);
                }
                "data" => {
                    let family: String = section.require("data", "family")?;
                    let family = match family.as_str() {
                        "well_prepared" => DataFamily::WellPrepared,
                        "ill_prepared" => DataFamily::IllPrepared,
                        other => {
                            return err(
                                Some(section.line),
                                format!(
                                    "unknown data family '{other}' (want well_prepared|ill_prepared)"
                                ),
                            )
                        }
                    };
                    let data = DataSection {
                        family,
                        amplitude: section.require("data", "amplitude")?,
                        seed: section.require("data", "seed")?,
                    };
                    section.reject_unused("data")?;
                    if !(data.amplitude > 0.0) {
                        return err(Some(section.line), "amplitude must be positive");
                    }
                    config.data = Some(data);
                }
                "sweep" => {
                    let (eps_line, eps_raw) =
                        section.take("eps_list").ok_or(ConfigError {
                            line: Some(section.line),
                            message: "section [sweep] is missing key 'eps_list'".into(),
                        })?;
                    let mut eps_list = Vec::new();
                    for piece in eps_raw.split(',') {
                        let eps: f64 = piece.trim().parse().map_err(|_| ConfigError {
                            line: Some(eps_line),
                            message: format!("bad eps entry '{}'", piece.trim()),
                        })?;
                        if !(eps > 0.0 && eps <= 1.0) {
                            return err(Some(eps_line), format!("eps {eps} outside (0, 1]"));
                        }
                        eps_list.push(eps);
                    }
                    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
                        return err(Some(eps_line), "eps_list must be strictly decreasing");
                    }
                    let norm_menu = match section.take("norm_menu") {
                        None => Vec::new(),
                        Some((menu_line, menu_raw)) => {
                            let mut menu = Vec::new();
                            for piece in menu_raw.split(',') {
                                menu.push(piece.trim().parse::<MenuEntry>().map_err(
                                    |message| ConfigError { line: Some(menu_line), message },
                                )?);
                            }
                            menu
                        }
                    };
                    section.reject_unused("sweep")?;
                    config.sweep = Some(SweepSection { eps_list, norm_menu });
                }
                other => return err(Some(section.line), format!("unknown section [{other}]")),
            }
        }
        Ok(config)
    }

    pub fn parse_file(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        RunConfig::parse(&text)
    }

    /// Canonical text form; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if let Some(g) = &self.grid {
            out.push_str(&format!(
                "[grid]\ndim = {}\nn = {}\nL = {}\ndealias = {}\n\n",
                g.dim, g.n, g.box_length, g.dealias
            ));
        }
        if let Some(p) = &self.params {
            out.push_str("[params]\n");
            out.push_str(&format!(
                "mu = {}\nlambda = {}\nxi = {}\ntheta = {}\neps = {}\n",
                p.mu, p.lambda, p.xi, p.theta, p.eps
            ));
            match p.pressure {
                PressureLaw::Linear => out.push_str("pressure = linear\n"),
                PressureLaw::Gamma(g) => {
                    out.push_str(&format!("pressure = gamma\ngamma = {g}\n"))
                }
            }
            out.push('\n');
        }
        if let Some(r) = &self.run {
            out.push_str(&format!(
                "[run]\ndt = {}\nT = {}\nsnapshot_every = {}\nrenormalize_director = {}\n\n",
                r.dt, r.t_final, r.snapshot_every, r.renormalize_director
            ));
        }
        if let Some(d) = &self.data {
            out.push_str(&format!(
                "[data]\nfamily = {}\namplitude = {}\nseed = {}\n\n",
                d.family, d.amplitude, d.seed
            ));
        }
        if let Some(s) = &self.sweep {
            let eps: Vec<String> = s.eps_list.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("[sweep]\neps_list = {}\n", eps.join(", ")));
            if !s.norm_menu.is_empty() {
                let menu: Vec<String> = s.norm_menu.iter().map(|m| m.to_string()).collect();
                out.push_str(&format!("norm_menu = {}\n", menu.join(", ")));
            }
            out.push('\n');
        }
        out
    }

    pub fn require_grid(&self) -> Result<&GridSection, ConfigError> {
        self.grid.as_ref().map_or_else(|| err(None, "missing [grid] section"), Ok)
    }

    pub fn require_params(&self) -> Result<&ParamsSection, ConfigError> {
        self.params.as_ref().map_or_else(|| err(None, "missing [params] section"), Ok)
    }

    pub fn require_run(&self) -> Result<&RunSection, ConfigError> {
        self.run.as_ref().map_or_else(|| err(None, "missing [run] section"), Ok)
    }

    pub fn require_data(&self) -> Result<&DataSection, ConfigError> {
        self.data.as_ref().map_or_else(|| err(None, "missing [data] section"), Ok)
    }

    pub fn require_sweep(&self) -> Result<&SweepSection, ConfigError> {
        self.sweep.as_ref().map_or_else(|| err(None, "missing [sweep] section"), Ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# limit sweep at desk scale
[grid]
dim = 2
n = 64
L = 6.283185307179586

[params]
mu = 0.5
lambda = 0.25
xi = 0.4
theta = 0.3
pressure = gamma
gamma = 2

[run]
dt = 0.01
T = 0.5

[data]
family = well_prepared
amplitude = 0.05
seed = 42

[sweep]
eps_list = 0.5, 0.25, 0.125
norm_menu = b@4, qu@6, w@6, dbar@6
";

    #[test]
    fn parses_and_round_trips() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.grid.as_ref().unwrap().dealias, 2.0 / 3.0);
        assert_eq!(c.run.as_ref().unwrap().snapshot_every, 10);
        assert_eq!(c.sweep.as_ref().unwrap().eps_list.len(), 3);
        assert_eq!(c.sweep.as_ref().unwrap().norm_menu[0].quantity, Quantity::B);
        let again = RunConfig::parse(&c.serialize()).unwrap();
        assert_eq!(c, again);
        // fixed point of serialize
        assert_eq!(c.serialize(), again.serialize());
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let bad = "[grid]\ndim = 2\nn = 64\nL = 6.0\nwibble = 3\n";
        let e = RunConfig::parse(bad).unwrap_err();
        assert_eq!(e.line, Some(5));
        assert!(e.message.contains("wibble"));
    }

    #[test]
    fn rejects_unknown_sections_and_bad_values() {
        assert!(RunConfig::parse("[mystery]\nx = 1\n").is_err());
        assert!(RunConfig::parse("[grid]\ndim = banana\nn = 64\nL = 6.0\n").is_err());
        // physical validation happens at parse time
        let e = RunConfig::parse(
            "[params]\nmu = -1\nlambda = 0\nxi = 1\ntheta = 1\n",
        )
        .unwrap_err();
        assert!(e.message.contains("mu"));
        // eps_list must decrease
        assert!(RunConfig::parse("[sweep]\neps_list = 0.25, 0.5\n").is_err());
    }

    #[test]
    fn key_outside_section_is_anchored() {
        let e = RunConfig::parse("dim = 2\n").unwrap_err();
        assert_eq!(e.line, Some(1));
    }
}

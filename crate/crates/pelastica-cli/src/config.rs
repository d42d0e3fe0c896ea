//! Run configuration: defaults, `key = value` files with `[section]` prefixes,
//! and command-line overrides, in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Curve,
    Solve,
    Threshold,
    Hbound,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Curve => "curve",
            Command::Solve => "solve",
            Command::Threshold => "threshold",
            Command::Hbound => "hbound",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    EuP,
    AlgebraicSigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    SymmetricCone,
    Cone,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ProjectedNewton,
    ProjectedGradient,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstacleConfig {
    pub kind: Option<ObstacleKind>,
    /// Tip heights; one solve per entry.
    pub h: Vec<f64>,
    pub theta: f64,
    pub left: f64,
    pub right: f64,
    /// Endpoint value of symmetric cones.
    pub endpoint: f64,
    /// Samples of a `sampled` obstacle on a uniform grid of `[0, 1]`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: f64,
    pub lambda: f64,
    pub samples: usize,
    #[serde(rename = "G")]
    pub shape: Shape,
    pub obstacle: ObstacleConfig,
    #[serde(rename = "grid.N")]
    pub grid_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub symmetric: bool,
    pub method: Method,
    pub epsilon_schedule: Vec<f64>,
    pub with_exact: bool,
    pub force: bool,
    pub out: PathBuf,
    pub format: Format,
    pub p_list: Vec<f64>,
    pub h_list: Vec<f64>,
    /// Solve the existing cells of a sweep, not only classify them.
    pub sweep_solve: bool,
    pub a_grid: Vec<f64>,
    /// Worker threads for sweeps; 0 picks the available parallelism.
    pub threads: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let solver = pelastica::MinimizeOptions::default();
        RunConfig {
            command,
            p: 2.0,
            lambda: 1.0,
            samples: 401,
            shape: Shape::EuP,
            obstacle: ObstacleConfig {
                kind: None,
                h: Vec::new(),
                theta: 0.5,
                left: -0.25,
                right: -0.25,
                endpoint: -0.25,
                values: Vec::new(),
            },
            grid_n: solver.n,
            tol: solver.tol,
            max_iter: solver.max_iter,
            symmetric: false,
            method: Method::ProjectedNewton,
            epsilon_schedule: solver.epsilon_schedule,
            with_exact: false,
            force: false,
            out: PathBuf::from("out"),
            format: Format::Csv,
            p_list: Vec::new(),
            h_list: Vec::new(),
            sweep_solve: true,
            a_grid: Vec::new(),
            threads: 0,
        }
    }

    /// Applies every entry of a config file.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (line, key, value) in parse_entries(&text)? {
            self.set(&key, &value).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}:{line}: {m}", path.display())),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Sets one dotted key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let o = &mut self.obstacle;
        match key {
            "p" => self.p = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "G" => {
                self.shape = match value {
                    "eu_p" | "EU_p" => Shape::EuP,
                    "algebraic_sigmoid" => Shape::AlgebraicSigmoid,
                    _ => return bad(key, value, "expected eu_p or algebraic_sigmoid"),
                }
            }
            "obstacle.kind" => {
                o.kind = Some(match value {
                    "symmetric_cone" => ObstacleKind::SymmetricCone,
                    "cone" => ObstacleKind::Cone,
                    "sampled" => ObstacleKind::Sampled,
                    _ => return bad(key, value, "expected symmetric_cone, cone or sampled"),
                })
            }
            "obstacle.h" => o.h = list(key, value)?,
            "obstacle.theta" => o.theta = num(key, value)?,
            "obstacle.left" => o.left = num(key, value)?,
            "obstacle.right" => o.right = num(key, value)?,
            "obstacle.endpoint" => o.endpoint = num(key, value)?,
            "obstacle.values" => o.values = list(key, value)?,
            "grid.N" => self.grid_n = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "max_iter" => self.max_iter = num(key, value)?,
            "symmetric" => self.symmetric = boolean(key, value)?,
            "method" => {
                self.method = match value {
                    "projected_newton" => Method::ProjectedNewton,
                    "projected_gradient" => Method::ProjectedGradient,
                    _ => return bad(key, value, "expected projected_newton or projected_gradient"),
                }
            }
            "epsilon_schedule" => self.epsilon_schedule = list(key, value)?,
            "with_exact" => self.with_exact = boolean(key, value)?,
            "force" => self.force = boolean(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "format" => {
                self.format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    "svg" => Format::Svg,
                    _ => return bad(key, value, "expected csv, json or svg"),
                }
            }
            "sweep.p_list" => self.p_list = list(key, value)?,
            "sweep.h_list" => self.h_list = list(key, value)?,
            "sweep.solve" => self.sweep_solve = boolean(key, value)?,
            "hbound.a_grid" => self.a_grid = list(key, value)?,
            "threads" => self.threads = num(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks the parameters the selected command reads.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let exponent = |v: f64| {
            if v > 1.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("p must exceed 1, got {v}")))
            }
        };
        match self.command {
            Command::Curve => {
                exponent(self.p)?;
                positive("lambda", self.lambda)?;
                if self.samples < 2 {
                    return Err(CliError::Config(format!("samples must be at least 2, got {}", self.samples)));
                }
            }
            Command::Solve => {
                exponent(self.p)?;
                self.validate_solver()?;
                match self.obstacle_kind() {
                    None => {
                        return Err(CliError::Config(
                            "missing obstacle: give --height or obstacle.kind = sampled with obstacle.values".into(),
                        ))
                    }
                    Some(ObstacleKind::Sampled) => {
                        if self.obstacle.values.len() < 2 {
                            return Err(CliError::Config("a sampled obstacle needs obstacle.values".into()));
                        }
                    }
                    Some(_) => {
                        if self.obstacle.h.is_empty() {
                            return Err(CliError::Config("missing obstacle height: give --height".into()));
                        }
                    }
                }
            }
            Command::Threshold => {
                for &p in &self.ps() {
                    exponent(p)?;
                }
            }
            Command::Hbound => {
                exponent(self.p)?;
                for &a in &self.a_grid {
                    positive("hbound.a_grid entries", a)?;
                }
            }
            Command::Sweep => {
                if self.h_list.is_empty() {
                    return Err(CliError::Config("sweep needs --h-list".into()));
                }
                for &p in &self.ps() {
                    exponent(p)?;
                }
                for &h in &self.h_list {
                    positive("sweep.h_list entries", h)?;
                }
                if self.sweep_solve {
                    self.validate_solver()?;
                }
            }
        }
        Ok(())
    }

    fn validate_solver(&self) -> Result<()> {
        if self.grid_n < 64 {
            return Err(CliError::Config(format!("grid.N must be at least 64, got {}", self.grid_n)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::Config("max_iter must be positive".into()));
        }
        if self.epsilon_schedule.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(CliError::Config("epsilon_schedule entries must be positive".into()));
        }
        Ok(())
    }

    /// Obstacle kind after defaulting: heights alone mean a symmetric cone.
    pub fn obstacle_kind(&self) -> Option<ObstacleKind> {
        match self.obstacle.kind {
            Some(k) => Some(k),
            None if !self.obstacle.h.is_empty() => Some(ObstacleKind::SymmetricCone),
            None => None,
        }
    }

    /// Exponents of threshold and sweep runs: `p_list`, or `p` alone.
    pub fn ps(&self) -> Vec<f64> {
        if self.p_list.is_empty() {
            vec![self.p]
        } else {
            self.p_list.clone()
        }
    }

    pub fn minimize_options(&self) -> pelastica::MinimizeOptions {
        pelastica::MinimizeOptions {
            n: self.grid_n,
            tol: self.tol,
            symmetric: self.symmetric,
            max_iter: self.max_iter,
            method: match self.method {
                Method::ProjectedNewton => pelastica::solver::Method::ProjectedNewton,
                Method::ProjectedGradient => pelastica::solver::Method::ProjectedGradient,
            },
            epsilon_schedule: self.epsilon_schedule.clone(),
            ..Default::default()
        }
    }
}

/// `(line, dotted key, value)` triples of a config text. `#` and `;` start comments.
pub fn parse_entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("line {}: unterminated section header", i + 1)))?
                .trim();
            section = name.to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", i + 1)));
        }
        let v = v.trim().trim_matches('"');
        let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
        out.push((i + 1, key, v.to_string()));
    }
    Ok(out)
}

fn bad<T>(key: &str, value: &str, hint: &str) -> Result<T> {
    Err(CliError::Config(format!("{key} = {value}: {hint}")))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e| CliError::Config(format!("{key} = {value}: {e}")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bad(key, value, "expected true or false"),
    }
}

/// Comma- or whitespace-separated numbers, optionally in brackets.
pub fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_prefix_keys() {
        let e = parse_entries("p = 3\n# note\n[grid]\nN = 256\n[obstacle]\nh = 0.1, 0.2\n").unwrap();
        let keys: Vec<&str> = e.iter().map(|(_, k, _)| k.as_str()).collect();
        assert_eq!(keys, ["p", "grid.N", "obstacle.h"]);
        let mut c = RunConfig::new(Command::Solve);
        for (_, k, v) in &e {
            c.set(k, v).unwrap();
        }
        assert_eq!((c.p, c.grid_n), (3.0, 256));
        assert_eq!(c.obstacle.h, vec![0.1, 0.2]);
        assert_eq!(c.obstacle_kind(), Some(ObstacleKind::SymmetricCone));
    }

    #[test]
    fn unknown_and_malformed_entries() {
        let mut c = RunConfig::new(Command::Solve);
        assert!(matches!(c.set("grid.M", "3"), Err(CliError::Config(_))));
        assert!(matches!(c.set("p", "two"), Err(CliError::Config(_))));
        assert!(parse_entries("[grid\nN=2").is_err());
        assert!(parse_entries("just words").is_err());
    }

    #[test]
    fn list_forms() {
        assert_eq!(list("k", "[1, 2 3]").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(list("k", "").unwrap().is_empty());
    }
}

use std::ffi::OsString;
use std::path::PathBuf;

use boostcav::observables::Route;
use boostcav::rect2d::Route2D;
use boostcav::regsum::{RegConfig, RegMethod};
use boostcav::Scheme;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "boostcav", version, about = "Casimir energy and momentum of moving cavities (hbar = c = 1)")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Plain-text `key = value` file mirroring the flags; flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Static Casimir energy by all three regulators, or the plate energy per area.
    Static(StaticArgs),
    /// Boosted energy, momentum and shell residual by both routes.
    Boost(BoostArgs),
    /// Energy and momentum across a velocity grid.
    Sweep(SweepArgs),
    /// Boosted rectangular cavity in 2+1 dimensions.
    Rect2d(Rect2dArgs),
    /// Run the invariant catalogue.
    Verify(VerifyArgs),
    /// Dump mode frequencies, normalizations and sample values.
    Modes(ModesArgs),
}

/// Velocity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct IntList(pub Vec<u32>);

#[derive(Debug, Args)]
pub struct RegArgs {
    /// Regularization method: zeta, cutoff or abel-plana.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<RegMethod>,

    /// Strictly decreasing cutoff values, comma separated.
    #[arg(long, value_parser = parse_list_f64)]
    pub schedule: Option<FloatList>,

    /// Powers of 1/epsilon to fit, comma separated.
    #[arg(long, value_parser = parse_list_u32)]
    pub divergent_powers: Option<IntList>,

    /// Analytic powers of epsilon to fit, comma separated, or `none`.
    #[arg(long, value_parser = parse_list_u32)]
    pub analytic_powers: Option<IntList>,
}

impl RegArgs {
    pub fn apply(&self, base: RegConfig) -> RegConfig {
        let mut cfg = base;
        if let Some(m) = self.method {
            cfg.method = m;
        }
        if let Some(s) = &self.schedule {
            cfg.epsilon_schedule = s.0.clone();
        }
        if let Some(p) = &self.divergent_powers {
            cfg.divergent_powers = p.0.clone();
        }
        if let Some(p) = &self.analytic_powers {
            cfg.analytic_powers = p.0.clone();
        }
        cfg
    }
}

#[derive(Debug, Args)]
pub struct StaticArgs {
    /// Proper length of the cavity.
    #[arg(long = "L", value_parser = parse_positive, allow_hyphen_values = true, default_value = "1")]
    pub length: f64,

    /// Electromagnetic parallel-plate energy per area instead.
    #[arg(long)]
    pub plates: bool,

    /// Plate separation for `--plates`.
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub a: f64,

    #[command(flatten)]
    pub reg: RegArgs,
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "lorentz")]
    pub scheme: Scheme,

    #[arg(long = "L", value_parser = parse_positive, allow_hyphen_values = true, default_value = "1")]
    pub length: f64,

    #[arg(long, value_parser = parse_velocity, allow_hyphen_values = true)]
    pub v: f64,

    #[command(flatten)]
    pub reg: RegArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "lorentz")]
    pub scheme: Scheme,

    #[arg(long = "L", value_parser = parse_positive, allow_hyphen_values = true, default_value = "1")]
    pub length: f64,

    /// Grid as `start:stop:step` or a comma-separated list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub v: Grid,

    #[arg(long, value_parser = parse_route, default_value = "closed-form")]
    pub route: Route,

    #[command(flatten)]
    pub reg: RegArgs,
}

#[derive(Debug, Args)]
pub struct Rect2dArgs {
    /// Proper side along the boost.
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub a: f64,

    /// Proper side across the boost.
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub b: f64,

    /// Velocity, `start:stop:step` grid or comma-separated list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "0")]
    pub v: Grid,

    /// Restrict to one route: printed or quadrature.
    #[arg(long, value_parser = parse_route_2d)]
    pub route: Option<Route2D>,

    /// Solve for finite-part shifts that restore the mass shell.
    #[arg(long)]
    pub solve_subtraction: bool,

    /// Velocities for the subtraction solver.
    #[arg(long, value_parser = parse_grid, default_value = "0.2,0.4,0.6")]
    pub subtraction_grid: Grid,

    #[command(flatten)]
    pub reg: RegArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only the checks of one module.
    #[arg(long, value_parser = ["modes", "stress", "regsum", "observables", "rect2d"])]
    pub only: Option<String>,

    /// Deliberately corrupt a convention (negative control).
    #[arg(long, hide = true, value_parser = ["momentum-sign"])]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "lorentz")]
    pub scheme: Scheme,

    #[arg(long = "L", value_parser = parse_positive, allow_hyphen_values = true, default_value = "1")]
    pub length: f64,

    #[arg(long, value_parser = parse_velocity, allow_hyphen_values = true, default_value = "0")]
    pub v: f64,

    #[arg(long, default_value = "5", value_parser = clap::value_parser!(u32).range(1..=10000))]
    pub n_max: u32,

    /// Lab time of the samples.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub t: f64,

    /// Interior sample points per mode.
    #[arg(long, default_value = "5", value_parser = clap::value_parser!(u32).range(1..=1000))]
    pub points: u32,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive, got {x}"))
    }
}

fn parse_velocity(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v.abs() < 1.0 {
        Ok(v)
    } else {
        Err(format!("velocity must satisfy |v| < 1, got {v}"))
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: boostcav::Error| e.to_string())
}

fn parse_route(s: &str) -> Result<Route, String> {
    s.parse().map_err(|e: boostcav::Error| e.to_string())
}

fn parse_route_2d(s: &str) -> Result<Route2D, String> {
    s.parse().map_err(|e: boostcav::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<RegMethod, String> {
    s.parse().map_err(|e: boostcav::Error| e.to_string())
}

fn floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

fn parse_list_f64(s: &str) -> Result<FloatList, String> {
    floats(s).map(FloatList)
}

fn parse_list_u32(s: &str) -> Result<IntList, String> {
    if s.trim().eq_ignore_ascii_case("none") || s.trim().is_empty() {
        return Ok(IntList(Vec::new()));
    }
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| format!("'{p}' is not a non-negative integer")))
        .collect::<Result<_, _>>()
        .map(IntList)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    grid_values(s).map(Grid)
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn grid_values(s: &str) -> Result<Vec<f64>, String> {
    let values = if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(parse_f64).collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(format!("grid '{s}' must have the form start:stop:step"));
        };
        if !(step > 0.0) || stop < start {
            return Err(format!("grid '{s}' is empty"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(format!("grid '{s}' has too many points"));
        }
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        floats(s)?
    };
    if values.is_empty() {
        return Err("velocity grid is empty".into());
    }
    if let Some(v) = values.iter().find(|v| !(v.abs() < 1.0)) {
        return Err(format!("velocity must satisfy |v| < 1, got {v}"));
    }
    Ok(values)
}

const SUBCOMMANDS: [&str; 6] = ["static", "boost", "sweep", "rect2d", "verify", "modes"];
const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--config", "--format", "--output", "-o"];
const BOOLEAN_KEYS: [&str; 2] = ["plates", "solve-subtraction"];

/// Parsed `key = value` pairs from a configuration file.
pub fn read_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config line {}: expected `key = value`, got '{line}'", i + 1));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

/// Index of the subcommand token, skipping global options and their values.
fn subcommand_position(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if SUBCOMMANDS.contains(&a) {
            return Some(i);
        }
        if GLOBAL_VALUE_FLAGS.contains(&a) {
            i += 1;
        }
        i += 1;
    }
    None
}

fn config_path(args: &[String]) -> Option<String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            path = args.get(i + 1).cloned();
            i += 1;
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
        }
        i += 1;
    }
    path
}

/// Splices configuration-file options in front of the command-line flags so
/// that later (command-line) occurrences override them.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config '{path}': {e}"))?;
    let mut command = None;
    let mut injected = Vec::new();
    for (key, value) in read_config(&text)? {
        match key.as_str() {
            "command" => command = Some(value),
            "config" => return Err("config files cannot include other config files".into()),
            k if BOOLEAN_KEYS.contains(&k) => match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => injected.push(format!("--{k}")),
                "false" | "no" | "0" => {}
                other => return Err(format!("config key '{k}' expects true or false, got '{other}'")),
            },
            k => {
                injected.push(format!("--{k}"));
                injected.push(value);
            }
        }
    }
    let mut args = args;
    let position = match subcommand_position(&args) {
        Some(p) => p,
        None => {
            let Some(cmd) = command else {
                return Ok(args);
            };
            args.push(cmd);
            args.len() - 1
        }
    };
    let tail = args.split_off(position + 1);
    args.extend(injected);
    args.extend(tail);
    Ok(args)
}

pub fn parse(raw: Vec<OsString>) -> Result<Cli, clap::Error> {
    let args: Vec<String> = raw.into_iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let merged = merge_config(args.clone()).map_err(|msg| {
        use clap::CommandFactory;
        Cli::command().error(clap::error::ErrorKind::InvalidValue, msg)
    })?;
    Cli::try_parse_from(merged)
}

pub fn reg_base(method: Option<RegMethod>) -> RegConfig {
    RegConfig::for_method(method.unwrap_or(RegMethod::ZetaExact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid_values("0:0.9:0.1").unwrap().len(), 10);
        assert_eq!(grid_values("0:0.3:0.05").unwrap().len(), 7);
        assert_eq!(grid_values("0.2,0.4").unwrap(), vec![0.2, 0.4]);
        assert!(grid_values("0.5:0.1:0.1").is_err());
        assert!(grid_values("0:1:0").is_err());
        assert!(grid_values("").is_err());
        assert!(grid_values("0:1.2:0.5").is_err());
    }

    #[test]
    fn config_lines() {
        let pairs = read_config("# comment\nscheme = lorentz\n\nL=2\nsolve_subtraction = true\n").unwrap();
        assert_eq!(pairs[0], ("scheme".into(), "lorentz".into()));
        assert_eq!(pairs[2].0, "solve-subtraction");
        assert!(read_config("oops").is_err());
    }

    #[test]
    fn subcommand_is_found_after_globals() {
        let a: Vec<String> =
            ["boostcav", "--format", "json", "boost", "--v", "0.2"].iter().map(|s| s.to_string()).collect();
        assert_eq!(subcommand_position(&a), Some(3));
    }
}

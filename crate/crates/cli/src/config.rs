//! Flag/config-file merging, resolved-config output and error classes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use hmhp::io::{write_json, SCHEMA_VERSION};

/// Exit 1 for usage problems, 2 for bad or unreadable data.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl From<hmhp::Error> for CliError {
    fn from(e: hmhp::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

/// Unwraps a value that `fill` has defaulted or checked.
pub fn required<T: Clone>(value: &Option<T>, flag: &str) -> Result<T, CliError> {
    value.clone().ok_or_else(|| usage(format!("missing required option --{flag}")))
}

/// Options shared by every subcommand.
#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct Common {
    /// JSON object of option values (keys as flag names); flags win over it.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for every random draw [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Log filter, e.g. `debug`; overrides HMHP_LOG [default: info]
    #[arg(long)]
    pub log_level: Option<String>,
}

pub trait Command: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;

    fn common(&self) -> &Common;

    fn common_mut(&mut self) -> &mut Common;

    /// Applies defaults and checks option combinations.
    fn fill(&mut self) -> Result<(), CliError>;

    fn run(&self, out: &Path) -> Result<(), CliError>;
}

fn normalize_key(k: &str) -> String {
    k.replace('-', "_")
}

/// Config file values overlaid by the flags given on the command line.
fn merge<T: Command>(flags: &T, file: Option<&Path>) -> Result<T, CliError> {
    let known = match serde_json::to_value(T::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    let mut merged = Map::new();
    if let Some(path) = file {
        let shown = path.display();
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{shown}: {e}")))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{shown}:{}: {e}", e.line())))?;
        let Value::Object(obj) = value else {
            return Err(usage(format!("{shown}: config must be a JSON object")));
        };
        for (k, v) in obj {
            let key = normalize_key(&k);
            match key.as_str() {
                "schema_version" => {
                    if v.as_u64() != Some(SCHEMA_VERSION as u64) {
                        return Err(usage(format!("{shown}: unsupported schema_version {v}")));
                    }
                }
                "command" => {
                    if v.as_str() != Some(T::NAME) {
                        return Err(usage(format!("{shown}: config is for command {v}, not '{}'", T::NAME)));
                    }
                }
                _ if known.contains_key(&key) => {
                    if v.is_object() {
                        return Err(usage(format!("{shown}: key '{k}' must be a flat value")));
                    }
                    merged.insert(key, v);
                }
                _ => return Err(usage(format!("{shown}: unknown key '{k}' for '{}'", T::NAME))),
            }
        }
    }
    if let Ok(Value::Object(given)) = serde_json::to_value(flags) {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    let mut out: T = serde_json::from_value(Value::Object(merged)).map_err(|e| {
        let src = file.map_or(String::new(), |p| format!("{}: ", p.display()));
        usage(format!("{src}{e}"))
    })?;
    out.common_mut().config = file.map(Path::to_path_buf);
    Ok(out)
}

fn init_logging(level: Option<&str>) {
    let mut builder = env_logger::Builder::from_env(env_logger::Env::default().filter_or("HMHP_LOG", "info"));
    if let Some(level) = level {
        builder.parse_filters(level);
    }
    builder.format_timestamp(None).target(env_logger::Target::Stderr);
    let _ = builder.try_init();
}

/// Merges options, sets up logging and threads, records the resolved
/// configuration in the output directory and runs the command.
pub fn execute<T: Command>(flags: T) -> Result<(), CliError> {
    let file = flags.common().config.clone();
    let mut args = merge(&flags, file.as_deref())?;
    init_logging(args.common().log_level.as_deref());
    if let Some(n) = args.common().threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("cannot set up {n} threads: {e}")))?;
    }
    let common = args.common_mut();
    common.seed.get_or_insert(0);
    let out = common.out.get_or_insert_with(|| PathBuf::from("out")).clone();
    args.fill()?;
    fs::create_dir_all(&out).map_err(|e| data(format!("{}: {e}", out.display())))?;
    let mut resolved = match serde_json::to_value(&args) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    resolved.insert("command".into(), Value::from(T::NAME));
    resolved.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    write_json(&out.join("resolved-config.json"), &resolved)?;
    log::info!("{}: writing to {}", T::NAME, out.display());
    args.run(&out)
}

/// Writes a JSON object with a `schema_version` key added.
pub fn write_versioned(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut obj = match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("reports serialize to objects"),
    };
    obj.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    write_json(path, &obj)?;
    Ok(())
}

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use groupshap::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Config echo written next to every output so a run can be repeated.
pub fn record(subcommand: &str, config: Value) -> Value {
    json!({
        "tool": "groupshap",
        "version": VERSION,
        "subcommand": subcommand,
        "argv": std::env::args().collect::<Vec<_>>(),
        "config": config,
    })
}

/// `<file>.run.json` beside a file output.
pub fn beside(file: &Path) -> PathBuf {
    let mut name = file.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".run.json");
    file.with_file_name(name)
}

pub fn write(path: &Path, value: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("json values always serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn write_for_file(file: &Path, subcommand: &str, config: Value) -> Result<(), Error> {
    write(&beside(file), &record(subcommand, config))
}

pub fn write_for_dir(dir: &Path, subcommand: &str, config: Value) -> Result<(), Error> {
    write(&dir.join("run.json"), &record(subcommand, config))
}

//! `key = value` config files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Keys read from a config file, with their source line for error messages.
#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value, got {line:?}", idx + 1);
            };
            let key = key.trim().replace('_', "-");
            if entries.insert(key.clone(), (value.trim().to_string(), idx + 1)).is_some() {
                bail!("line {}: key {key:?} given twice", idx + 1);
            }
        }
        Ok(Self { entries })
    }

    /// Rejects keys that the current subcommand does not understand.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (key, (_, line)) in &self.entries {
            if !known.contains(&key.as_str()) {
                bail!("config line {line}: unknown key {key:?} (known: {})", known.join(", "));
            }
        }
        Ok(())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((value, line)) => value
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config line {line}: bad value {value:?} for {key}: {e}")),
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((value, line)) => match value.as_str() {
                "true" | "1" | "yes" | "on" => Ok(Some(true)),
                "false" | "0" | "no" | "off" => Ok(Some(false)),
                _ => bail!("config line {line}: expected a boolean for {key}, got {value:?}"),
            },
        }
    }
}

/// Flag value if given, else the config file, else the default.
pub fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T::Err: Display,
{
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

pub fn pick_opt<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    Ok(match flag {
        Some(v) => Some(v),
        None => file.get(key)?,
    })
}

pub fn pick_bool(flag: Option<bool>, file: &ConfigFile, key: &str, default: bool) -> Result<bool> {
    Ok(match flag {
        Some(v) => v,
        None => file.get_bool(key)?.unwrap_or(default),
    })
}

/// Turns a `--x` / `--no-x` pair into an optional override.
pub fn switch(on: bool, off: bool) -> Option<bool> {
    match (on, off) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

/// Accumulates the resolved configuration for echoing.
#[derive(Debug, Default)]
pub struct Echo(Vec<(String, String)>);

impl Echo {
    pub fn add(&mut self, key: &str, value: impl Display) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn print(&self) {
        println!("resolved configuration:");
        let width = self.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.0 {
            println!("  {k:<width$} = {v}");
        }
    }
}

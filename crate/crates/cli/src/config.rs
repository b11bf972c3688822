//! Flag tables and layered configuration: defaults, then `+F` files in
//! order, then the remaining command-line flags.
//!
//! Configuration files hold one `key value` pair per line; `#` starts a
//! comment, and keys may be written with or without the leading dash.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagKind {
    /// Takes one value; later occurrences replace earlier ones.
    Value,
    /// No value on the command line; `0`/`1` in files.
    Switch,
    /// Takes one value; occurrences within one source accumulate.
    Repeatable,
}

#[derive(Debug, Clone, Copy)]
pub struct FlagSpec {
    pub name: &'static str,
    pub kind: FlagKind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

impl FlagSpec {
    pub const fn value(name: &'static str, default: Option<&'static str>, help: &'static str) -> Self {
        FlagSpec {
            name,
            kind: FlagKind::Value,
            default,
            help,
        }
    }

    pub const fn switch(name: &'static str, help: &'static str) -> Self {
        FlagSpec {
            name,
            kind: FlagKind::Switch,
            default: Some("0"),
            help,
        }
    }

    pub const fn repeatable(name: &'static str, default: Option<&'static str>, help: &'static str) -> Self {
        FlagSpec {
            name,
            kind: FlagKind::Repeatable,
            default,
            help,
        }
    }
}

/// A command's flag table plus an optional matcher for flag families
/// that are not listed one by one (it maps a raw name to its canonical
/// key).
pub struct CommandSpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub flags: &'static [FlagSpec],
    pub dynamic: Option<fn(&str) -> Option<String>>,
    pub dynamic_help: &'static str,
}

impl CommandSpec {
    fn lookup(&self, raw: &str) -> Option<(String, FlagKind)> {
        if let Some(f) = self.flags.iter().find(|f| f.name == raw) {
            return Some((f.name.to_string(), f.kind));
        }
        self.dynamic.and_then(|d| d(raw)).map(|k| (k, FlagKind::Value))
    }

    pub fn usage(&self) -> String {
        let mut s = format!("usage: {} [+F <config file>]... [flags]\n{}\n\nflags:\n", self.name, self.summary);
        for f in self.flags {
            let arg = match f.kind {
                FlagKind::Switch => String::new(),
                _ => " <v>".to_string(),
            };
            let def = match (f.kind, f.default) {
                (FlagKind::Switch, _) | (_, None) => String::new(),
                (_, Some(d)) => format!(" [default {d}]"),
            };
            let rep = if f.kind == FlagKind::Repeatable { " (repeatable)" } else { "" };
            s.push_str(&format!("  -{:<16} {}{}{}\n", format!("{}{arg}", f.name), f.help, rep, def));
        }
        if !self.dynamic_help.is_empty() {
            s.push_str(&format!("  {}\n", self.dynamic_help));
        }
        s.push_str("  -help             show this text\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Default,
    File(String),
    Cli,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Default => f.write_str("default"),
            Source::File(name) => write!(f, "file {name}"),
            Source::Cli => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub values: Vec<String>,
    pub source: Source,
}

#[derive(Debug)]
pub enum CliError {
    /// `-help` was requested.
    Help,
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Help => f.write_str("help requested"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Merged settings with the source of each key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliConfig {
    entries: BTreeMap<String, Entry>,
}

impl CliConfig {
    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn source(&self, key: &str) -> Option<&Source> {
        self.entries.get(key).map(|e| &e.source)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).and_then(|e| e.values.last()).map(String::as_str)
    }

    pub fn values(&self, key: &str) -> &[String] {
        self.entries.get(key).map_or(&[], |e| e.values.as_slice())
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("invalid value `{v}` for -{key}"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse(key)?.ok_or_else(|| usage(format!("-{key} is required")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.str(key) {
            None | Some("0") => Ok(false),
            Some("1") => Ok(true),
            Some(v) => Err(usage(format!("-{key} expects 0 or 1, found `{v}`"))),
        }
    }

    /// One `key = value (source)` line per setting.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for (k, e) in &self.entries {
            s.push_str(&format!("  {k} = {} ({})\n", e.values.join(" "), e.source));
        }
        s
    }

    fn apply(&mut self, pending: Vec<(String, String)>, source: Source) {
        let mut layer: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (k, v) in pending {
            layer.entry(k).or_default().push(v);
        }
        for (k, vals) in layer {
            self.entries.insert(k, Entry { values: vals, source: source.clone() });
        }
    }
}

/// Read and split a configuration file into `(key, value)` pairs.
pub fn parse_config_text(spec: &CommandSpec, name: &str, text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (line, ""),
        };
        let key = key.strip_prefix('-').unwrap_or(key);
        let (canon, kind) = spec
            .lookup(key)
            .ok_or_else(|| usage(format!("{name}:{}: unknown key `{key}`", i + 1)))?;
        let value = match (kind, value) {
            (FlagKind::Switch, "") => "1".to_string(),
            (FlagKind::Switch, "0" | "1") => value.to_string(),
            (FlagKind::Switch, v) => return Err(usage(format!("{name}:{}: `{key}` expects 0 or 1, found `{v}`", i + 1))),
            (_, "") => return Err(usage(format!("{name}:{}: `{key}` needs a value", i + 1))),
            (_, v) => v.to_string(),
        };
        out.push((canon, value));
    }
    Ok(out)
}

/// Resolve `argv` (without the program name). `read_file` supplies the
/// contents of `+F` files so tests can run without touching disk.
pub fn resolve_config_with<R>(spec: &CommandSpec, argv: &[String], mut read_file: R) -> Result<CliConfig, CliError>
where
    R: FnMut(&str) -> std::io::Result<String>,
{
    let mut files = Vec::new();
    let mut cli = Vec::new();
    let mut i = 0;
    while i < argv.len() {
        let tok = argv[i].as_str();
        i += 1;
        if tok == "+F" {
            let f = argv.get(i).ok_or_else(|| usage("+F needs a file name"))?;
            files.push(f.clone());
            i += 1;
            continue;
        }
        if matches!(tok, "-help" | "-h" | "--help") {
            return Err(CliError::Help);
        }
        let raw = tok
            .strip_prefix('-')
            .filter(|r| !r.is_empty() && !r.starts_with('-'))
            .ok_or_else(|| usage(format!("unexpected argument `{tok}`")))?;
        let (canon, kind) = spec.lookup(raw).ok_or_else(|| usage(format!("unknown flag `{tok}`")))?;
        let value = match kind {
            FlagKind::Switch => "1".to_string(),
            _ => {
                let v = argv.get(i).ok_or_else(|| usage(format!("{tok} needs a value")))?;
                i += 1;
                v.clone()
            }
        };
        cli.push((canon, value));
    }

    let mut config = CliConfig::default();
    let defaults = spec
        .flags
        .iter()
        .filter_map(|f| f.default.map(|d| (f.name.to_string(), d.to_string())))
        .collect();
    config.apply(defaults, Source::Default);
    for f in files {
        let text = read_file(&f).map_err(|e| usage(format!("cannot read configuration file {f}: {e}")))?;
        let pairs = parse_config_text(spec, &f, &text)?;
        config.apply(pairs, Source::File(f));
    }
    config.apply(cli, Source::Cli);
    Ok(config)
}

pub fn resolve_config(spec: &CommandSpec, argv: &[String]) -> Result<CliConfig, CliError> {
    resolve_config_with(spec, argv, |p| std::fs::read_to_string(p))
}

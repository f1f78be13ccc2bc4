//! Run configuration: `[section]` headers over `key = value` lines, with
//! `#` comments. Parsing is strict — an unknown section or key is an error,
//! so a typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use harmlab::family::{
    constant_symbol_family, constant_weight_family, default_family, densities_only_family,
    sharpness_family, sharpness_family_with, ExtremalFamily,
};
use harmlab::grid::Grid;
use harmlab::singular::{hilbert_kernel, synthetic_cz_kernel, KernelSpec};
use harmlab::verify::{find_spec, Sweep};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// One `[section]` with its keys. Values keep their source line for error
/// messages; `take_*` removes entries so leftovers can be rejected.
struct Table {
    name: String,
    entries: BTreeMap<String, (String, usize)>,
}

impl Table {
    fn empty(name: &str) -> Self {
        Table {
            name: name.to_string(),
            entries: BTreeMap::new(),
        }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(v, _)| v)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => match v.parse::<f64>() {
                Ok(x) => Ok(Some(x)),
                Err(_) => err(format!("[{}] {key}: `{v}` is not a number", self.name)),
            },
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => match v.parse::<usize>() {
                Ok(x) => Ok(Some(x)),
                Err(_) => err(format!(
                    "[{}] {key}: `{v}` is not a non-negative integer",
                    self.name
                )),
            },
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => match v.parse::<u64>() {
                Ok(x) => Ok(Some(x)),
                Err(_) => err(format!(
                    "[{}] {key}: `{v}` is not a non-negative integer",
                    self.name
                )),
            },
        }
    }

    fn take_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let name = self.name.clone();
        match self.take(key) {
            None => Ok(None),
            Some(v) => split_list(&v)
                .iter()
                .map(|item| {
                    item.parse::<f64>().map_err(|_| {
                        ConfigError(format!("[{name}] {key}: `{item}` is not a number"))
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn take_str_list(&mut self, key: &str) -> Option<Vec<String>> {
        self.take(key).map(|v| split_list(&v))
    }

    /// Reject any keys that no consumer claimed.
    fn deny_leftovers(self) -> Result<()> {
        if let Some((key, (_, line))) = self.entries.into_iter().next() {
            return err(format!(
                "unknown key `{key}` in [{}] (line {line})",
                self.name
            ));
        }
        Ok(())
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parse the raw text into tables, rejecting malformed lines, duplicate
/// sections, duplicate keys, and keys outside any section.
fn parse_tables(text: &str) -> Result<BTreeMap<String, Table>> {
    let mut tables: BTreeMap<String, Table> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return err(format!("line {line_no}: malformed section header `{raw}`"));
            };
            let name = name.trim().to_string();
            if name.is_empty() {
                return err(format!("line {line_no}: empty section name"));
            }
            if tables.contains_key(&name) {
                return err(format!("line {line_no}: duplicate section [{name}]"));
            }
            tables.insert(name.clone(), Table::empty(&name));
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!(
                "line {line_no}: expected `key = value`, got `{raw}`"
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return err(format!("line {line_no}: empty key"));
        }
        let Some(section) = &current else {
            return err(format!(
                "line {line_no}: key `{key}` appears before any [section]"
            ));
        };
        let table = tables.get_mut(section).expect("section was inserted");
        if table.entries.contains_key(&key) {
            return err(format!(
                "line {line_no}: duplicate key `{key}` in [{section}]"
            ));
        }
        table.entries.insert(key, (value, line_no));
    }
    Ok(tables)
}

/// Everything a `verify` or `scan` run needs.
pub struct RunConfig {
    pub grid: Grid,
    pub family: ExtremalFamily,
    pub kernel: KernelSpec,
    pub sweep: Sweep,
    pub ids: Vec<String>,
    pub out_dir: PathBuf,
}

/// Load a `verify` configuration; `[sweep]` is honored here.
pub fn load_verify(text: &str) -> Result<RunConfig> {
    load(text, true)
}

/// Load a `scan` configuration; scans march along the family's own
/// parameter ladder, so a `[sweep]` section is rejected.
pub fn load_scan(text: &str) -> Result<RunConfig> {
    load(text, false)
}

fn load(text: &str, allow_sweep: bool) -> Result<RunConfig> {
    let mut tables = parse_tables(text)?;
    let mut take_table = |name: &str| tables.remove(name);

    let grid = {
        let mut t = take_table("grid").ok_or(ConfigError("missing [grid] section".into()))?;
        let n = match t.take_usize("n")? {
            Some(n) if n > 0 => n,
            Some(_) => return err("[grid] n must be positive"),
            None => return err("[grid] n is required"),
        };
        let origin = t.take_f64("origin")?.unwrap_or(-1.0);
        let spacing = t.take_f64("spacing")?.unwrap_or(2.0 / n as f64);
        t.deny_leftovers()?;
        Grid::new(origin, spacing, n).map_err(|e| ConfigError(format!("[grid]: {e}")))?
    };

    let family = {
        let mut t = take_table("family").unwrap_or_else(|| Table::empty("family"));
        let name = t.take("name").unwrap_or_else(|| "default".to_string());
        let trials = t.take_usize("trials")?;
        let seed = t.take_u64("seed")?;
        let deltas = t.take_f64_list("deltas")?;
        t.deny_leftovers()?;
        if name == "sharpness" {
            if trials.is_some() || seed.is_some() {
                return err(
                    "[family] trials/seed do not apply to the sharpness family; \
                     its instances are the delta ladder",
                );
            }
            match deltas {
                Some(d) if d.is_empty() => return err("[family] deltas must be non-empty"),
                Some(d) => sharpness_family_with(d),
                None => sharpness_family(),
            }
        } else {
            if deltas.is_some() {
                return err("[family] deltas only applies to the sharpness family");
            }
            let trials = trials.unwrap_or(200);
            let seed = seed.unwrap_or(42);
            match name.as_str() {
                "default" => default_family(trials, seed),
                "constant-symbol" => constant_symbol_family(trials, seed),
                "constant-weight" => constant_weight_family(trials, seed),
                "densities-only" => densities_only_family(trials, seed),
                other => {
                    return err(format!(
                        "[family] unknown name `{other}` (expected default, constant-symbol, \
                         constant-weight, densities-only, or sharpness)"
                    ))
                }
            }
        }
    };

    let kernel = {
        let mut t = take_table("kernel").unwrap_or_else(|| Table::empty("kernel"));
        let kind = t.take("kind").unwrap_or_else(|| "hilbert".to_string());
        let epsilon = t.take_f64("epsilon")?;
        t.deny_leftovers()?;
        match kind.as_str() {
            "hilbert" => {
                if epsilon.is_some() {
                    return err("[kernel] epsilon only applies to the synthetic kernel");
                }
                hilbert_kernel()
            }
            "synthetic" => synthetic_cz_kernel(epsilon.unwrap_or(0.75))
                .map_err(|e| ConfigError(format!("[kernel]: {e}")))?,
            other => {
                return err(format!(
                    "[kernel] unknown kind `{other}` (expected hilbert or synthetic)"
                ))
            }
        }
    };

    let sweep = match take_table("sweep") {
        None => Sweep::default(),
        Some(_) if !allow_sweep => {
            return err("[sweep] does not apply to scans; remove the section")
        }
        Some(mut t) => {
            let mut sweep = Sweep::default();
            if let Some(ps) = t.take_f64_list("p")? {
                sweep.ps = ps;
            }
            if let Some(rs) = t.take_f64_list("r")? {
                sweep.rs = rs;
            }
            if let Some(epss) = t.take_f64_list("eps")? {
                sweep.epss = epss;
            }
            if let Some(ls) = t.take_f64_list("lambda")? {
                sweep.lambda_rels = ls;
            }
            t.deny_leftovers()?;
            sweep
        }
    };

    let ids = {
        let mut t = take_table("specs").ok_or(ConfigError("missing [specs] section".into()))?;
        let ids = match t.take_str_list("ids") {
            Some(ids) if !ids.is_empty() => ids,
            _ => return err("[specs] ids is required and must be non-empty"),
        };
        t.deny_leftovers()?;
        for id in &ids {
            find_spec(id).map_err(|e| ConfigError(e.to_string()))?;
        }
        ids
    };

    let out_dir = {
        let mut t = take_table("output").ok_or(ConfigError("missing [output] section".into()))?;
        let dir = t
            .take("dir")
            .ok_or(ConfigError("[output] dir is required".into()))?;
        t.deny_leftovers()?;
        PathBuf::from(dir)
    };

    if let Some(name) = tables.keys().next() {
        return err(format!("unknown section [{name}]"));
    }

    Ok(RunConfig {
        grid,
        family,
        kernel,
        sweep,
        ids,
        out_dir,
    })
}

//! Flat `key = value` configuration with flag overrides, per-subcommand
//! key validation, and a canonical content hash embedded in output files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use gaussvm::distributions::{
    make_power_margin, make_separated, make_weighted_power_margin, RiskConfig,
    SyntheticDistribution,
};
use gaussvm::noise;

pub type CliResult<T> = Result<T, String>;

/// Keys that steer presentation (where files go, worker count, plots) but
/// not the computed data; excluded from the hash and the header echo so a
/// rerun into another directory reproduces identical bytes.
const PRESENTATION_KEYS: &[&str] = &["out", "jobs", "plot"];

#[derive(Debug)]
pub struct RunConfig {
    pub command: &'static str,
    values: BTreeMap<String, String>,
    pub hash: String,
}

fn accepted_keys(command: &str) -> &'static [&'static str] {
    match command {
        "gen" => &[
            "family", "gamma", "q", "delta", "d", "n", "seed", "quad_tol", "mc_samples", "out",
            "jobs", "plot",
        ],
        "train" => &[
            "family", "gamma", "q", "delta", "d", "n", "lambda", "sigma", "with_offset", "seed",
            "quad_tol", "mc_samples", "out", "jobs", "plot",
        ],
        "noise" => &[
            "family", "gamma", "q", "delta", "d", "mass_grid", "geo_grid", "seed", "quad_tol",
            "mc_samples", "out", "jobs", "plot",
        ],
        "approx" => &[
            "family", "gamma", "q", "delta", "d", "sigma_grid", "lambda_grid", "alpha", "c_geo",
            "n_dense", "seed", "quad_tol", "mc_samples", "out", "jobs", "plot",
        ],
        "cover" => &[
            "family", "gamma", "q", "delta", "d", "sigma_grid", "epsilon_grid", "n", "seed",
            "quad_tol", "mc_samples", "out", "jobs", "plot",
        ],
        "rates" => &[
            "family", "gamma", "q", "delta", "d", "n_grid", "trials", "alpha", "sigma",
            "with_offset", "seed", "quad_tol", "mc_samples", "out", "jobs", "plot",
        ],
        "check" => &["seed", "quad_tol", "out", "jobs", "plot"],
        _ => unreachable!("unknown subcommand {command}"),
    }
}

fn defaults(command: &str) -> Vec<(&'static str, &'static str)> {
    if command == "check" {
        return vec![("seed", "0"), ("quad_tol", "1e-6"), ("plot", "false")];
    }
    let mut v = vec![
        ("family", "power_margin"),
        ("gamma", "1"),
        ("q", "family"),
        ("delta", "0.5"),
        ("d", "1"),
        ("quad_tol", "1e-6"),
        ("mc_samples", "100000"),
        ("plot", "false"),
    ];
    match command {
        "gen" => v.push(("n", "256")),
        "train" => v.extend([
            ("n", "256"),
            ("lambda", "0.01"),
            ("sigma", "3"),
            ("with_offset", "false"),
        ]),
        "noise" => v.extend([("mass_grid", "log:0.01:0.3:8"), ("geo_grid", "log:0.001:0.1:8")]),
        "approx" => v.extend([
            ("sigma_grid", "log:2:32:5"),
            ("lambda_grid", "log:1e-5:0.1:9"),
            ("alpha", "family"),
            ("c_geo", "1"),
            ("n_dense", "0"),
        ]),
        "cover" => v.extend([
            ("sigma_grid", "log:1:32:6"),
            ("epsilon_grid", "log:0.00390625:0.5:8"),
            ("n", "500"),
        ]),
        "rates" => v.extend([
            ("n_grid", "32,64,128,256,512,1024,2048"),
            ("trials", "20"),
            ("alpha", "family"),
            ("sigma", "auto"),
            ("with_offset", "false"),
        ]),
        _ => {}
    }
    v
}

impl RunConfig {
    /// Defaults, then the config file, then flags; a flag that contradicts
    /// a file value wins and the conflict is logged to stderr. Unknown and
    /// duplicate keys are errors.
    pub fn build(
        command: &'static str,
        file: Option<&Path>,
        flag_pairs: &[(String, String)],
    ) -> CliResult<RunConfig> {
        let accepted = accepted_keys(command);
        let mut values: BTreeMap<String, String> = defaults(command)
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut from_file: BTreeMap<String, String> = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    format!("{}:{}: expected key = value", path.display(), i + 1)
                })?;
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if !accepted.contains(&k.as_str()) {
                    return Err(format!(
                        "{}:{}: unknown key '{k}' for subcommand '{command}'",
                        path.display(),
                        i + 1
                    ));
                }
                if from_file.insert(k.clone(), v).is_some() {
                    return Err(format!("{}:{}: duplicate key '{k}'", path.display(), i + 1));
                }
            }
        }
        for (k, v) in &from_file {
            values.insert(k.clone(), v.clone());
        }
        for (k, v) in flag_pairs {
            if !accepted.contains(&k.as_str()) {
                return Err(format!("unknown key '{k}' for subcommand '{command}'"));
            }
            if let Some(old) = from_file.get(k) {
                if old != v {
                    eprintln!("flag overrides config file: {k} = {v} (file had {old})");
                }
            }
            values.insert(k.clone(), v.clone());
        }
        if !values.contains_key("seed") {
            return Err("missing required key 'seed' (config file or --seed)".into());
        }
        let hash = hash_of(command, &values);
        Ok(RunConfig {
            command,
            values,
            hash,
        })
    }

    fn raw(&self, key: &str) -> CliResult<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| format!("missing required key '{key}'"))
    }

    pub fn get_str(&self, key: &str) -> CliResult<&str> {
        self.raw(key)
    }

    pub fn get_f64(&self, key: &str) -> CliResult<f64> {
        let raw = self.raw(key)?;
        raw.parse::<f64>()
            .map_err(|_| format!("key '{key}': malformed number '{raw}'"))
    }

    pub fn get_positive(&self, key: &str) -> CliResult<f64> {
        let v = self.get_f64(key)?;
        if !(v > 0.0) {
            return Err(format!("key '{key}': must be positive, got {v}"));
        }
        Ok(v)
    }

    pub fn get_usize(&self, key: &str) -> CliResult<usize> {
        let raw = self.raw(key)?;
        raw.parse::<usize>()
            .map_err(|_| format!("key '{key}': malformed integer '{raw}'"))
    }

    pub fn get_bool(&self, key: &str) -> CliResult<bool> {
        match self.raw(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(format!("key '{key}': expected true or false, got '{other}'")),
        }
    }

    /// Grid syntax: `log:lo:hi:len` or an explicit comma list. Non-empty
    /// and strictly ascending.
    pub fn get_grid(&self, key: &str) -> CliResult<Vec<f64>> {
        let raw = self.raw(key)?;
        let grid = if let Some(rest) = raw.strip_prefix("log:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("key '{key}': expected log:lo:hi:len, got '{raw}'"));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| format!("key '{key}': malformed number '{}'", parts[0]))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| format!("key '{key}': malformed number '{}'", parts[1]))?;
            let len: usize = parts[2]
                .parse()
                .map_err(|_| format!("key '{key}': malformed length '{}'", parts[2]))?;
            if !(lo > 0.0 && hi > lo && len >= 2) {
                return Err(format!(
                    "key '{key}': log grid needs 0 < lo < hi and len >= 2, got '{raw}'"
                ));
            }
            noise::log_grid(lo, hi, len)
        } else {
            raw.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("key '{key}': malformed number '{t}'"))
                })
                .collect::<CliResult<Vec<f64>>>()?
        };
        if grid.is_empty() {
            return Err(format!("key '{key}': grid is empty"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("key '{key}': grid must be strictly ascending"));
        }
        Ok(grid)
    }

    pub fn get_usize_list(&self, key: &str) -> CliResult<Vec<usize>> {
        let raw = self.raw(key)?;
        raw.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("key '{key}': malformed integer '{t}'"))
            })
            .collect()
    }

    pub fn seed(&self) -> CliResult<u64> {
        let raw = self.raw("seed")?;
        raw.parse::<u64>()
            .map_err(|_| format!("key 'seed': malformed integer '{raw}'"))
    }

    pub fn plot(&self) -> CliResult<bool> {
        self.get_bool("plot")
    }

    pub fn jobs(&self) -> CliResult<Option<usize>> {
        match self.values.get("jobs") {
            None => Ok(None),
            Some(_) => self.get_usize("jobs").map(Some),
        }
    }

    /// `--out` / `out` key, then `GAUSSVM_OUT`, then `./out`.
    pub fn out_dir(&self) -> PathBuf {
        if let Some(dir) = self.values.get("out") {
            return PathBuf::from(dir);
        }
        if let Ok(dir) = std::env::var("GAUSSVM_OUT") {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from("out")
    }

    pub fn risk_config(&self) -> CliResult<RiskConfig> {
        let quad_tol = self.get_positive("quad_tol")?;
        let mc_samples = if self.values.contains_key("mc_samples") {
            let m = self.get_usize("mc_samples")?;
            if m == 0 {
                return Err("key 'mc_samples': must be positive".into());
            }
            m
        } else {
            RiskConfig::default().mc_samples
        };
        Ok(RiskConfig {
            quad_tol,
            mc_samples,
            ..RiskConfig::default()
        })
    }

    pub fn distribution(&self) -> CliResult<SyntheticDistribution> {
        let family = self.raw("family")?;
        let dist = match family {
            "power_margin" => make_power_margin(self.get_positive("gamma")?),
            "weighted_power_margin" => {
                let q = self.raw("q")?;
                if q == "family" {
                    return Err(
                        "key 'q': weighted_power_margin needs an explicit numeric q".into()
                    );
                }
                make_weighted_power_margin(self.get_positive("gamma")?, self.get_positive("q")?)
            }
            "separated" => make_separated(self.get_positive("delta")?, self.get_usize("d")?),
            other => {
                return Err(format!(
                    "key 'family': unknown family '{other}' \
                     (power_margin, weighted_power_margin, separated)"
                ))
            }
        };
        dist.map_err(|e| format!("invalid family parameters: {e}"))
    }

    /// `q` / `alpha` config value, with the sentinel `family` resolving to
    /// the distribution's constructed exponent.
    pub fn exponent(&self, key: &str, dist: &SyntheticDistribution) -> CliResult<f64> {
        let raw = self.raw(key)?;
        if raw == "family" {
            return Ok(match key {
                "q" => dist.known_exponents().q,
                "alpha" => dist.known_exponents().alpha,
                other => return Err(format!("key '{other}' has no family default")),
            });
        }
        self.get_f64(key)
    }

    /// Sorted `key=value` echo of the hash-covered configuration.
    pub fn echo_lines(&self) -> Vec<String> {
        self.values
            .iter()
            .filter(|(k, _)| !PRESENTATION_KEYS.contains(&k.as_str()))
            .map(|(k, v)| format!("{k}={v}"))
            .collect()
    }

    /// Comment header every data file starts with: artifact line (name,
    /// config hash, seed, version), then the config echo.
    pub fn header(&self) -> String {
        let mut s = format!(
            "# artifact={} config_hash={} seed={} version={}\n",
            self.command,
            self.hash,
            self.values.get("seed").map(String::as_str).unwrap_or("0"),
            env!("CARGO_PKG_VERSION"),
        );
        for line in self.echo_lines() {
            s.push_str("# config ");
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    /// `<command>_<hash prefix>`; the artifact-naming stem for every file
    /// the run writes.
    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.command, &self.hash[..12])
    }
}

fn hash_of(command: &str, values: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    for (k, v) in values {
        if PRESENTATION_KEYS.contains(&k.as_str()) {
            continue;
        }
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    let digest = h.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

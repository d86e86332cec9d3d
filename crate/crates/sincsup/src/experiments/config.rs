//! Flat `key = value` sweep-configuration files.
//!
//! Recognized keys (one per line; lines whose first non-blank character is
//! `#` are comments):
//!
//! | key               | meaning                                            | default        |
//! |-------------------|----------------------------------------------------|----------------|
//! | `ensemble`        | `gaussian` \| `rademacher` \| `bounded_symmetric`  | required       |
//! | `sigma`           | Gaussian standard deviation                        | `1.0`          |
//! | `bound`           | bounded-symmetric M                                | `1.0`          |
//! | `mean_abs_floor`  | bounded-symmetric m                                | `0.5`          |
//! | `shape`           | `uniform` \| `scaled_rademacher` \| `two_point_mixture` | `uniform` |
//! | `n_grid`          | comma-separated lengths, strictly increasing, ≥ 16 | required       |
//! | `trials_per_n`    | trials per level                                   | `200`          |
//! | `master_seed`     | decimal or `0x`-prefixed hex                       | `0`            |
//! | `sup_method`      | `certified` \| `heuristic`                         | `heuristic`    |
//! | `epsilon`         | certified tolerance (omit for per-instance default)| per-instance   |
//! | `cell_budget`     | certified cell budget                              | `1000000`      |
//! | `points_per_unit` | heuristic grid density, `0` = automatic            | `0`            |
//! | `signal_family`   | `sinc` \| `fourier_baseline` \| `bounded_kernel` \| `discrete_proxy` | `sinc` |
//! | `output_path`     | export stem (`<stem>.csv`, `<stem>.json`)          | required       |
//!
//! Unknown keys, duplicate keys, and keys that do not apply to the selected
//! ensemble or method are all errors — a typo should never silently fall
//! back to a default.

use std::collections::HashMap;
use std::path::Path;

use super::{ExperimentConfig, SignalFamily, SupMethod};
use crate::ensembles::{BoundedShape, Ensemble};
use crate::error::{Error, Result};
use crate::supbound::DEFAULT_CELL_BUDGET;

const KNOWN_KEYS: [&str; 14] = [
    "ensemble",
    "sigma",
    "bound",
    "mean_abs_floor",
    "shape",
    "n_grid",
    "trials_per_n",
    "master_seed",
    "sup_method",
    "epsilon",
    "cell_budget",
    "points_per_unit",
    "signal_family",
    "output_path",
];

fn parse_u64_maybe_hex(s: &str) -> Result<u64> {
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| Error::validation(format!("bad 64-bit seed value {s:?}")))
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let mut entries: HashMap<&str, &str> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::validation(format!("line {}: expected `key = value`, got {raw:?}", idx + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::validation(format!("line {}: unknown key {key:?}", idx + 1)));
        }
        if entries.insert(key, value).is_some() {
            return Err(Error::validation(format!("line {}: duplicate key {key:?}", idx + 1)));
        }
    }

    let mut used: Vec<&str> = Vec::new();
    let mut take = |key: &'static str| -> Option<&str> {
        used.push(key);
        entries.get(key).copied()
    };

    let require = |key: &str, value: Option<&str>| -> Result<String> {
        value.map(str::to_owned).ok_or_else(|| {
            Error::validation(format!("missing required config key {key:?}"))
        })
    };

    let ensemble_kind = require("ensemble", take("ensemble"))?;
    let sigma = take("sigma");
    let bound = take("bound");
    let mean_abs_floor = take("mean_abs_floor");
    let shape = take("shape");
    let parse_f64 = |key: &str, s: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::validation(format!("bad numeric value for {key}: {s:?}")))
    };
    let ensemble = match ensemble_kind.as_str() {
        "gaussian" => {
            for (key, set) in [("bound", &bound), ("mean_abs_floor", &mean_abs_floor), ("shape", &shape)] {
                if set.is_some() {
                    return Err(Error::validation(format!(
                        "key {key:?} does not apply to ensemble = gaussian"
                    )));
                }
            }
            let sigma = sigma.map(|s| parse_f64("sigma", s)).transpose()?.unwrap_or(1.0);
            Ensemble::gaussian(sigma)?
        }
        "rademacher" => {
            for (key, set) in [
                ("sigma", &sigma),
                ("bound", &bound),
                ("mean_abs_floor", &mean_abs_floor),
                ("shape", &shape),
            ] {
                if set.is_some() {
                    return Err(Error::validation(format!(
                        "key {key:?} does not apply to ensemble = rademacher"
                    )));
                }
            }
            Ensemble::rademacher()
        }
        "bounded_symmetric" => {
            if sigma.is_some() {
                return Err(Error::validation(
                    "key \"sigma\" does not apply to ensemble = bounded_symmetric",
                ));
            }
            let m_bound = bound.map(|s| parse_f64("bound", s)).transpose()?.unwrap_or(1.0);
            let floor = mean_abs_floor
                .map(|s| parse_f64("mean_abs_floor", s))
                .transpose()?
                .unwrap_or(0.5);
            let shape = shape.map(str::parse::<BoundedShape>).transpose()?.unwrap_or(BoundedShape::Uniform);
            Ensemble::bounded_symmetric(m_bound, floor, shape)?
        }
        other => {
            return Err(Error::validation(format!(
                "unknown ensemble {other:?} (expected gaussian, rademacher, or bounded_symmetric)"
            )))
        }
    };

    let n_grid_raw = require("n_grid", take("n_grid"))?;
    let n_grid = n_grid_raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::validation(format!("bad n_grid entry {s:?}")))
        })
        .collect::<Result<Vec<usize>>>()?;

    let trials_per_n = match take("trials_per_n") {
        Some(s) => s
            .parse()
            .map_err(|_| Error::validation(format!("bad trials_per_n value {s:?}")))?,
        None => 200,
    };
    let master_seed = match take("master_seed") {
        Some(s) => parse_u64_maybe_hex(s)?,
        None => 0,
    };

    let method_kind = take("sup_method").unwrap_or("heuristic").to_owned();
    let epsilon = take("epsilon");
    let cell_budget = take("cell_budget");
    let points_per_unit = take("points_per_unit");
    let sup_method = match method_kind.as_str() {
        "certified" => {
            if points_per_unit.is_some() {
                return Err(Error::validation(
                    "key \"points_per_unit\" does not apply to sup_method = certified",
                ));
            }
            let epsilon = epsilon.map(|s| parse_f64("epsilon", s)).transpose()?;
            let cell_budget = match cell_budget {
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::validation(format!("bad cell_budget value {s:?}")))?,
                None => DEFAULT_CELL_BUDGET,
            };
            SupMethod::Certified { epsilon, cell_budget }
        }
        "heuristic" => {
            for (key, set) in [("epsilon", &epsilon), ("cell_budget", &cell_budget)] {
                if set.is_some() {
                    return Err(Error::validation(format!(
                        "key {key:?} does not apply to sup_method = heuristic"
                    )));
                }
            }
            let points_per_unit = match points_per_unit {
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::validation(format!("bad points_per_unit value {s:?}")))?,
                None => 0,
            };
            SupMethod::Heuristic { points_per_unit }
        }
        other => {
            return Err(Error::validation(format!(
                "unknown sup_method {other:?} (expected certified or heuristic)"
            )))
        }
    };

    let signal_family = take("signal_family")
        .map(str::parse::<SignalFamily>)
        .transpose()?
        .unwrap_or(SignalFamily::Sinc);
    let output_path = require("output_path", take("output_path"))?;

    debug_assert_eq!(used.len(), KNOWN_KEYS.len());

    let config = ExperimentConfig {
        ensemble,
        n_grid,
        trials_per_n,
        master_seed,
        sup_method,
        signal_family,
        output_path: output_path.into(),
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

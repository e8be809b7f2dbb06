//! Flat one-level JSON experiment configs. Each model subcommand has a fixed
//! key set; the swept signal key accepts a scalar or an ascending array.

use drec_core::bench::{BenchParams, InitChoice, SweepSpec};
use drec_core::gmm::GmmParams;
use drec_core::groupsync::{PermSyncParams, Z2Params, ZkParams};
use drec_core::mra::MraParams;
use drec_core::ranking::RankingParams;
use drec_core::signrec::{lambda_for_snr, SignParams};
use serde_json::{Map, Value};

/// Key carrying the signal grid, per model kind.
pub fn grid_key(kind: &str) -> &'static str {
    match kind {
        "gmm" => "delta",
        "rank" => "beta",
        "sign" => "snr",
        "mra" => "delta_sq",
        "sync-z2" | "sync-zk" | "sync-perm" => "lambda",
        _ => unreachable!("unknown kind {kind}"),
    }
}

fn model_keys(kind: &str) -> (&'static [&'static str], &'static [&'static str]) {
    match kind {
        "gmm" => (&["p", "k", "d", "delta"], &["noise_scale"]),
        "rank" => (&["p", "beta"], &["c_p"]),
        "sign" => (&["n", "p", "s", "snr"], &[]),
        "mra" => (&["p", "d", "delta_sq"], &["noise_scale"]),
        "sync-z2" => (&["p", "lambda"], &[]),
        "sync-zk" => (&["p", "k", "lambda"], &[]),
        "sync-perm" => (&["p", "d", "lambda"], &[]),
        _ => unreachable!("unknown kind {kind}"),
    }
}

const COMMON_KEYS: [&str; 5] = ["replicates", "seed", "init", "flip_fraction", "threads"];

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize, String> {
    match obj.get(key).and_then(Value::as_u64) {
        Some(v) => Ok(v as usize),
        None => Err(format!("{key} must be a non-negative integer")),
    }
}

fn get_f64(obj: &Map<String, Value>, key: &str) -> Result<f64, String> {
    match obj.get(key).and_then(Value::as_f64) {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{key} must be a finite number")),
    }
}

fn get_grid(obj: &Map<String, Value>, key: &str) -> Result<Vec<f64>, String> {
    let grid: Vec<f64> = match obj.get(key) {
        Some(Value::Number(n)) => vec![n
            .as_f64()
            .ok_or_else(|| format!("{key} must be a finite number"))?],
        Some(Value::Array(items)) => {
            if items.is_empty() {
                return Err(format!("{key} must have at least one value"));
            }
            items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| format!("{key} values must be numbers"))
                })
                .collect::<Result<_, _>>()?
        }
        _ => return Err(format!("{key} must be a number or an array of numbers")),
    };
    if grid.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(format!("{key} values must be finite and > 0"));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(format!("{key} values must be sorted ascending"));
    }
    Ok(grid)
}

/// Parse the config text for one model subcommand into a sweep description.
/// Unknown keys and missing required keys are reported in full; range
/// violations name the violated constraint.
pub fn parse_config(kind: &str, text: &str) -> Result<SweepSpec, String> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| format!("malformed config JSON: {e}"))?;
    let obj = root
        .as_object()
        .ok_or("config must be a JSON object".to_string())?;

    let (required, optional) = model_keys(kind);
    let known = |k: &str| {
        required.contains(&k) || optional.contains(&k) || COMMON_KEYS.contains(&k)
    };
    let mut unknown: Vec<&str> = obj.keys().map(String::as_str).filter(|k| !known(k)).collect();
    if !unknown.is_empty() {
        unknown.sort_unstable();
        return Err(format!("unknown config keys: {}", unknown.join(", ")));
    }
    let mut missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|k| !obj.contains_key(*k))
        .collect();

    let init = match obj.get("init") {
        None => InitChoice::Builtin,
        Some(Value::String(s)) => match s.as_str() {
            "builtin" => InitChoice::Builtin,
            "truth" => InitChoice::Truth,
            "corrupted-truth" => {
                if !obj.contains_key("flip_fraction") {
                    missing.push("flip_fraction");
                    InitChoice::Builtin // placeholder; missing-key error wins below
                } else {
                    let f = get_f64(obj, "flip_fraction")?;
                    if !(0.0..=1.0).contains(&f) {
                        return Err("flip_fraction must be in [0, 1]".to_string());
                    }
                    InitChoice::CorruptedTruth(f)
                }
            }
            other => {
                return Err(format!(
                    "init must be one of builtin, truth, corrupted-truth (got {other:?})"
                ))
            }
        },
        Some(_) => return Err("init must be a string".to_string()),
    };
    if !missing.is_empty() {
        return Err(format!("missing config keys: {}", missing.join(", ")));
    }
    if obj.contains_key("flip_fraction") && !matches!(init, InitChoice::CorruptedTruth(_)) {
        return Err("flip_fraction requires init = \"corrupted-truth\"".to_string());
    }

    let grid = get_grid(obj, grid_key(kind))?;
    let replicates = if obj.contains_key("replicates") { get_usize(obj, "replicates")? } else { 1 };
    if replicates < 1 {
        return Err("replicates must be ≥ 1".to_string());
    }
    let seed = match obj.get("seed") {
        None => 0,
        Some(v) => v
            .as_u64()
            .ok_or("seed must be a non-negative integer".to_string())?,
    };
    let threads = if obj.contains_key("threads") { get_usize(obj, "threads")? } else { 0 };

    let p = get_usize(obj, "p")?;
    if p < 1 {
        return Err("p must be ≥ 1".to_string());
    }
    let params = match kind {
        "gmm" => {
            let k = get_usize(obj, "k")?;
            let d = get_usize(obj, "d")?;
            if k < 1 {
                return Err("k must be ≥ 1".to_string());
            }
            if d < 1 {
                return Err("d must be ≥ 1".to_string());
            }
            if k > p {
                return Err("k must be ≤ p".to_string());
            }
            if k > d {
                return Err("k must be ≤ d".to_string());
            }
            let noise_scale =
                if obj.contains_key("noise_scale") { get_f64(obj, "noise_scale")? } else { 1.0 };
            if noise_scale < 0.0 {
                return Err("noise_scale must be ≥ 0".to_string());
            }
            BenchParams::Gmm(GmmParams { p, k, d, delta_min: grid[0], noise_scale })
        }
        "rank" => {
            let c_p = if obj.contains_key("c_p") { get_f64(obj, "c_p")? } else { 0.0 };
            if c_p < 0.0 {
                return Err("c_p must be ≥ 0".to_string());
            }
            BenchParams::Rank(RankingParams { p, beta_star: grid[0], c_p })
        }
        "sign" => {
            let n = get_usize(obj, "n")?;
            let s = get_usize(obj, "s")?;
            if n < 1 {
                return Err("n must be ≥ 1".to_string());
            }
            if s < 1 {
                return Err("s must be ≥ 1".to_string());
            }
            if s > p {
                return Err("s must be ≤ p".to_string());
            }
            if s == p {
                return Err("s must be < p".to_string());
            }
            BenchParams::Sign(SignParams { n, p, s, lambda: lambda_for_snr(grid[0], n, p, s) })
        }
        "mra" => {
            let d = get_usize(obj, "d")?;
            if d < 1 {
                return Err("d must be ≥ 1".to_string());
            }
            let noise_scale =
                if obj.contains_key("noise_scale") { get_f64(obj, "noise_scale")? } else { 1.0 };
            if noise_scale < 0.0 {
                return Err("noise_scale must be ≥ 0".to_string());
            }
            BenchParams::Mra(MraParams { d, p, delta_min_sq: grid[0], noise_scale })
        }
        "sync-z2" => BenchParams::Z2(Z2Params { p, lambda_star: grid[0] }),
        "sync-zk" => {
            let k = get_usize(obj, "k")?;
            if k < 2 {
                return Err("k must be ≥ 2".to_string());
            }
            BenchParams::Zk(ZkParams { p, k, lambda_star: grid[0] })
        }
        "sync-perm" => {
            let d = get_usize(obj, "d")?;
            if d < 1 {
                return Err("d must be ≥ 1".to_string());
            }
            BenchParams::Perm(PermSyncParams { p, d, lambda_star: grid[0] })
        }
        _ => unreachable!("unknown kind {kind}"),
    };

    Ok(SweepSpec { params, grid, replicates, seed, init, threads })
}

/// Inverse of parse_config up to the signal placeholder (which parse_config
/// pins to grid[0]): parse_config(kind, &spec_to_config(spec)) == spec for
/// any spec that came out of parse_config.
pub fn spec_to_config(spec: &SweepSpec) -> String {
    let mut obj = Map::new();
    let num_u = |v: usize| Value::from(v as u64);
    let num_f = |v: f64| Value::from(v);
    match &spec.params {
        BenchParams::Gmm(m) => {
            obj.insert("p".into(), num_u(m.p));
            obj.insert("k".into(), num_u(m.k));
            obj.insert("d".into(), num_u(m.d));
            obj.insert("noise_scale".into(), num_f(m.noise_scale));
        }
        BenchParams::Rank(m) => {
            obj.insert("p".into(), num_u(m.p));
            obj.insert("c_p".into(), num_f(m.c_p));
        }
        BenchParams::Sign(m) => {
            obj.insert("n".into(), num_u(m.n));
            obj.insert("p".into(), num_u(m.p));
            obj.insert("s".into(), num_u(m.s));
        }
        BenchParams::Mra(m) => {
            obj.insert("p".into(), num_u(m.p));
            obj.insert("d".into(), num_u(m.d));
            obj.insert("noise_scale".into(), num_f(m.noise_scale));
        }
        BenchParams::Z2(m) => {
            obj.insert("p".into(), num_u(m.p));
        }
        BenchParams::Zk(m) => {
            obj.insert("p".into(), num_u(m.p));
            obj.insert("k".into(), num_u(m.k));
        }
        BenchParams::Perm(m) => {
            obj.insert("p".into(), num_u(m.p));
            obj.insert("d".into(), num_u(m.d));
        }
    }
    let key = grid_key(spec.params.kind());
    obj.insert(key.into(), Value::Array(spec.grid.iter().map(|&v| num_f(v)).collect()));
    obj.insert("replicates".into(), num_u(spec.replicates));
    obj.insert("seed".into(), Value::from(spec.seed));
    obj.insert("threads".into(), num_u(spec.threads));
    match spec.init {
        InitChoice::Builtin => {
            obj.insert("init".into(), Value::from("builtin"));
        }
        InitChoice::Truth => {
            obj.insert("init".into(), Value::from("truth"));
        }
        InitChoice::CorruptedTruth(f) => {
            obj.insert("init".into(), Value::from("corrupted-truth"));
            obj.insert("flip_fraction".into(), num_f(f));
        }
    }
    Value::Object(obj).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [&str; 7] = ["gmm", "rank", "sign", "mra", "sync-z2", "sync-zk", "sync-perm"];

    fn minimal(kind: &str) -> &'static str {
        match kind {
            "gmm" => r#"{"p": 200, "k": 3, "d": 10, "delta": 6, "replicates": 50, "seed": 7}"#,
            "rank" => r#"{"p": 40, "beta": 0.5}"#,
            "sign" => r#"{"n": 50, "p": 80, "s": 5, "snr": 3}"#,
            "mra" => r#"{"p": 30, "d": 6, "delta_sq": [10, 20]}"#,
            "sync-z2" => r#"{"p": 60, "lambda": 0.4}"#,
            "sync-zk" => r#"{"p": 60, "k": 4, "lambda": 0.4}"#,
            "sync-perm" => r#"{"p": 12, "d": 3, "lambda": 2}"#,
            _ => unreachable!(),
        }
    }

    #[test]
    fn minimal_configs_parse() {
        for kind in KINDS {
            let spec = parse_config(kind, minimal(kind)).unwrap();
            assert_eq!(spec.params.kind(), kind);
            assert!(!spec.grid.is_empty());
        }
    }

    #[test]
    fn example_gmm_config_is_valid() {
        let spec = parse_config("gmm", minimal("gmm")).unwrap();
        assert_eq!(spec.grid, vec![6.0]);
        assert_eq!(spec.replicates, 50);
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.init, InitChoice::Builtin);
        match spec.params {
            BenchParams::Gmm(g) => {
                assert_eq!((g.p, g.k, g.d), (200, 3, 10));
                assert_eq!(g.delta_min, 6.0);
                assert_eq!(g.noise_scale, 1.0);
            }
            other => panic!("wrong params {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_listed() {
        let err = parse_config("sync-z2", r#"{"p": 9, "lambda": 1, "zeta": 2, "alpha": 3}"#)
            .unwrap_err();
        assert_eq!(err, "unknown config keys: alpha, zeta");
    }

    #[test]
    fn missing_keys_are_named() {
        let err = parse_config("gmm", r#"{"p": 10, "delta": 2}"#).unwrap_err();
        assert_eq!(err, "missing config keys: k, d");
    }

    #[test]
    fn support_larger_than_dimension_is_rejected() {
        let err =
            parse_config("sign", r#"{"n": 50, "p": 20, "s": 30, "snr": 3}"#).unwrap_err();
        assert_eq!(err, "s must be ≤ p");
        let err =
            parse_config("sign", r#"{"n": 50, "p": 20, "s": 20, "snr": 3}"#).unwrap_err();
        assert_eq!(err, "s must be < p");
    }

    #[test]
    fn cluster_count_bounds_are_rejected() {
        let err = parse_config("gmm", r#"{"p": 4, "k": 6, "d": 10, "delta": 2}"#).unwrap_err();
        assert_eq!(err, "k must be ≤ p");
        let err = parse_config("gmm", r#"{"p": 40, "k": 6, "d": 3, "delta": 2}"#).unwrap_err();
        assert_eq!(err, "k must be ≤ d");
    }

    #[test]
    fn grid_validation() {
        assert!(parse_config("sync-z2", r#"{"p": 9, "lambda": []}"#)
            .unwrap_err()
            .contains("at least one value"));
        assert!(parse_config("sync-z2", r#"{"p": 9, "lambda": [2, 1]}"#)
            .unwrap_err()
            .contains("sorted ascending"));
        assert!(parse_config("sync-z2", r#"{"p": 9, "lambda": -1}"#)
            .unwrap_err()
            .contains("> 0"));
        assert!(parse_config("sync-z2", r#"{"p": 9, "lambda": "x"}"#)
            .unwrap_err()
            .contains("number"));
    }

    #[test]
    fn init_choices_parse() {
        let spec = parse_config("sync-z2", r#"{"p": 9, "lambda": 1, "init": "truth"}"#).unwrap();
        assert_eq!(spec.init, InitChoice::Truth);
        let spec = parse_config(
            "sync-z2",
            r#"{"p": 9, "lambda": 1, "init": "corrupted-truth", "flip_fraction": 0.1}"#,
        )
        .unwrap();
        assert_eq!(spec.init, InitChoice::CorruptedTruth(0.1));
        let err = parse_config("sync-z2", r#"{"p": 9, "lambda": 1, "init": "corrupted-truth"}"#)
            .unwrap_err();
        assert_eq!(err, "missing config keys: flip_fraction");
        let err =
            parse_config("sync-z2", r#"{"p": 9, "lambda": 1, "flip_fraction": 0.1}"#).unwrap_err();
        assert!(err.contains("corrupted-truth"));
        let err = parse_config("sync-z2", r#"{"p": 9, "lambda": 1, "init": "oracle"}"#)
            .unwrap_err();
        assert!(err.contains("builtin, truth, corrupted-truth"));
    }

    #[test]
    fn integer_keys_reject_fractions() {
        let err = parse_config("sync-z2", r#"{"p": 9.5, "lambda": 1}"#).unwrap_err();
        assert_eq!(err, "p must be a non-negative integer");
    }

    #[test]
    fn round_trip_through_serialization() {
        for kind in KINDS {
            let spec = parse_config(kind, minimal(kind)).unwrap();
            let text = spec_to_config(&spec);
            let back = parse_config(kind, &text).unwrap();
            assert_eq!(back, spec, "kind {kind}");
        }
        let spec = parse_config(
            "mra",
            r#"{"p": 30, "d": 6, "delta_sq": [10, 20], "init": "corrupted-truth",
                "flip_fraction": 0.25, "threads": 2, "seed": 11, "replicates": 4,
                "noise_scale": 0.5}"#,
        )
        .unwrap();
        let back = parse_config("mra", &spec_to_config(&spec)).unwrap();
        assert_eq!(back, spec);
    }
}

//! Declarative key-value sweep configuration.
//!
//! The file format is one `key = value` pair per line, `#` comments, blank
//! lines ignored. Unknown and duplicate keys are rejected with their line
//! number. All keys and defaults are listed in the `simulate` long help.

use anyhow::{anyhow, bail, Result};
use qldpc::codes::BicycleParams;
use qldpc::decoder::PriorSplit;
use qldpc::estimation::{FisherArg, ProbeMode};
use qldpc::montecarlo::{CodeSource, Metric, SweepConfig};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Reference text describing every config key; embedded in `--help`.
pub const CONFIG_KEY_HELP: &str = "\
Config file keys (one `key = value` per line, `#` comments):
  code              five-qubit | bicycle | file        [default: five-qubit]
  code-file         path to a code file                 (required when code = file)
  bicycle-n         qubit count, even                   [default: 400]
  bicycle-row-weight stabilizer row weight, even        [default: 16]
  bicycle-m         rows kept per block                 [default: 100]
  bicycle-seed      construction seed                   [default: 1]
  f-grid            operating points, space/comma list  (required)
  grid-unit         f | f-prime                         [default: f]
  modes             perfect no-information unentangled entangled fixed:<v>
                                                        [default: perfect]
  n-m               probe measurements per estimate     [default: 1]
  default-prior     f' used by no-information, (0,0.75] [default: 0.375]
  fisher-arg        f | f-prime                         [default: f-prime]
  fisher-scale-n    block length in the variance | code [default: code]
  prior-split       marginal | raw                      [default: marginal]
  max-iter          BP iteration cap per attempt        [default: 100]
  max-retries       perturbed decode retries            [default: 10]
  perturb-strength  retry odds perturbation, (0,1)      [default: 0.1]
  stop-block-errors block errors collected per point    [default: 100]
  max-trials        trial cap per point                 [default: 1000000]
  seed              master seed                         [default: 0]
  metric            physical | logical                  [default: physical]";

#[derive(Debug)]
pub struct ParsedConfig {
    pub sweep: SweepConfig,
    /// Resolved `key = value` pairs in a fixed order, for hashing and the
    /// CSV provenance header.
    pub canonical: Vec<(String, String)>,
}

pub fn parse_sweep_config(text: &str) -> Result<ParsedConfig> {
    let mut seen: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {line_no}: expected `key = value`, found {line:?}");
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!("line {line_no}: unknown key `{key}`");
        }
        if let Some((first, _)) = seen.get(&key) {
            bail!("line {line_no}: duplicate key `{key}` (first set on line {first})");
        }
        seen.insert(key, (line_no, value));
    }
    build(seen)
}

const KNOWN_KEYS: &[&str] = &[
    "code",
    "code-file",
    "bicycle-n",
    "bicycle-row-weight",
    "bicycle-m",
    "bicycle-seed",
    "f-grid",
    "grid-unit",
    "modes",
    "n-m",
    "default-prior",
    "fisher-arg",
    "fisher-scale-n",
    "prior-split",
    "max-iter",
    "max-retries",
    "perturb-strength",
    "stop-block-errors",
    "max-trials",
    "seed",
    "metric",
];

fn build(seen: BTreeMap<String, (usize, String)>) -> Result<ParsedConfig> {
    let get = |key: &str| seen.get(key).map(|(line, value)| (*line, value.as_str()));

    let parse_num = |key: &str| -> Result<Option<(usize, f64)>> {
        match get(key) {
            None => Ok(None),
            Some((line, v)) => {
                let x: f64 = v
                    .parse()
                    .map_err(|_| anyhow!("line {line}: invalid number {v:?} for `{key}`"))?;
                Ok(Some((line, x)))
            }
        }
    };
    let parse_int = |key: &str| -> Result<Option<(usize, u64)>> {
        match get(key) {
            None => Ok(None),
            Some((line, v)) => {
                let x: u64 = v
                    .parse()
                    .map_err(|_| anyhow!("line {line}: invalid integer {v:?} for `{key}`"))?;
                Ok(Some((line, x)))
            }
        }
    };

    let code_kind = get("code").map(|(_, v)| v).unwrap_or("five-qubit");
    let code = match code_kind {
        "five-qubit" => CodeSource::FiveQubit,
        "bicycle" => CodeSource::Bicycle(BicycleParams {
            n: parse_int("bicycle-n")?.map(|(_, v)| v as usize).unwrap_or(400),
            row_weight: parse_int("bicycle-row-weight")?
                .map(|(_, v)| v as usize)
                .unwrap_or(16),
            m_target: parse_int("bicycle-m")?.map(|(_, v)| v as usize).unwrap_or(100),
            seed: parse_int("bicycle-seed")?.map(|(_, v)| v).unwrap_or(1),
        }),
        "file" => {
            let Some((_, path)) = get("code-file") else {
                bail!("`code = file` requires `code-file`");
            };
            CodeSource::File(PathBuf::from(path))
        }
        other => {
            let line = get("code").map(|(l, _)| l).unwrap_or(0);
            bail!("line {line}: unknown code source {other:?}");
        }
    };

    let Some((grid_line, grid_text)) = get("f-grid") else {
        bail!("missing required key `f-grid`");
    };
    let grid: Vec<f64> = grid_text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| anyhow!("line {grid_line}: invalid grid value {t:?}"))
        })
        .collect::<Result<_>>()?;

    let grid_is_f_prime = match get("grid-unit") {
        None => false,
        Some((_, "f")) => false,
        Some((_, "f-prime")) => true,
        Some((line, other)) => bail!("line {line}: grid-unit must be `f` or `f-prime`, found {other:?}"),
    };

    let modes: Vec<ProbeMode> = match get("modes") {
        None => vec![ProbeMode::Perfect],
        Some((line, text)) => text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<ProbeMode>()
                    .map_err(|e| anyhow!("line {line}: {e}"))
            })
            .collect::<Result<_>>()?,
    };

    let fisher_arg = match get("fisher-arg") {
        None | Some((_, "f-prime")) => FisherArg::FPrime,
        Some((_, "f")) => FisherArg::F,
        Some((line, other)) => bail!("line {line}: fisher-arg must be `f` or `f-prime`, found {other:?}"),
    };
    let prior_split = match get("prior-split") {
        None | Some((_, "marginal")) => PriorSplit::Marginal,
        Some((_, "raw")) => PriorSplit::Raw,
        Some((line, other)) => bail!("line {line}: prior-split must be `marginal` or `raw`, found {other:?}"),
    };
    let metric = match get("metric") {
        None | Some((_, "physical")) => Metric::Physical,
        Some((_, "logical")) => Metric::Logical,
        Some((line, other)) => bail!("line {line}: metric must be `physical` or `logical`, found {other:?}"),
    };
    let fisher_scale_n = match get("fisher-scale-n") {
        None | Some((_, "code")) => None,
        Some((line, v)) => Some(
            v.parse::<usize>()
                .map_err(|_| anyhow!("line {line}: invalid fisher-scale-n {v:?}"))?,
        ),
    };

    let mut sweep = SweepConfig::new(code);
    sweep.grid = grid;
    sweep.grid_is_f_prime = grid_is_f_prime;
    sweep.modes = modes;
    sweep.n_m = parse_int("n-m")?.map(|(_, v)| v).unwrap_or(1);
    sweep.default_prior = parse_num("default-prior")?.map(|(_, v)| v).unwrap_or(0.375);
    sweep.fisher_arg = fisher_arg;
    sweep.fisher_scale_n = fisher_scale_n;
    sweep.prior_split = prior_split;
    sweep.max_iter = parse_int("max-iter")?.map(|(_, v)| v as u32).unwrap_or(100);
    sweep.max_retries = parse_int("max-retries")?.map(|(_, v)| v as u32).unwrap_or(10);
    sweep.perturb_strength = parse_num("perturb-strength")?.map(|(_, v)| v).unwrap_or(0.1);
    sweep.stop_block_errors = parse_int("stop-block-errors")?.map(|(_, v)| v).unwrap_or(100);
    sweep.max_trials = parse_int("max-trials")?.map(|(_, v)| v).unwrap_or(1_000_000);
    sweep.master_seed = parse_int("seed")?.map(|(_, v)| v).unwrap_or(0);
    sweep.metric = metric;

    let canonical = canonicalize(&sweep);
    Ok(ParsedConfig { sweep, canonical })
}

fn canonicalize(cfg: &SweepConfig) -> Vec<(String, String)> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    match &cfg.code {
        CodeSource::FiveQubit => pairs.push(("code".into(), "five-qubit".into())),
        CodeSource::File(path) => {
            pairs.push(("code".into(), "file".into()));
            pairs.push(("code-file".into(), path.display().to_string()));
        }
        CodeSource::Bicycle(p) => {
            pairs.push(("code".into(), "bicycle".into()));
            pairs.push(("bicycle-n".into(), p.n.to_string()));
            pairs.push(("bicycle-row-weight".into(), p.row_weight.to_string()));
            pairs.push(("bicycle-m".into(), p.m_target.to_string()));
            pairs.push(("bicycle-seed".into(), p.seed.to_string()));
        }
    }
    let grid = cfg
        .grid
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    pairs.push(("f-grid".into(), grid));
    pairs.push((
        "grid-unit".into(),
        if cfg.grid_is_f_prime { "f-prime" } else { "f" }.into(),
    ));
    let modes = cfg
        .modes
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    pairs.push(("modes".into(), modes));
    pairs.push(("n-m".into(), cfg.n_m.to_string()));
    pairs.push(("default-prior".into(), cfg.default_prior.to_string()));
    pairs.push(("fisher-arg".into(), cfg.fisher_arg.to_string()));
    pairs.push((
        "fisher-scale-n".into(),
        cfg.fisher_scale_n
            .map(|n| n.to_string())
            .unwrap_or_else(|| "code".into()),
    ));
    pairs.push(("prior-split".into(), cfg.prior_split.to_string()));
    pairs.push(("max-iter".into(), cfg.max_iter.to_string()));
    pairs.push(("max-retries".into(), cfg.max_retries.to_string()));
    pairs.push(("perturb-strength".into(), cfg.perturb_strength.to_string()));
    pairs.push(("stop-block-errors".into(), cfg.stop_block_errors.to_string()));
    pairs.push(("max-trials".into(), cfg.max_trials.to_string()));
    pairs.push(("seed".into(), cfg.master_seed.to_string()));
    pairs.push(("metric".into(), cfg.metric.to_string()));
    pairs
}

/// FNV-1a over the canonical config, as a hex provenance tag.
pub fn config_hash(canonical: &[(String, String)]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for (k, v) in canonical {
        for b in k.bytes().chain("=".bytes()).chain(v.bytes()).chain("\n".bytes()) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let parsed = parse_sweep_config("f-grid = 0.1 0.2\n").unwrap();
        assert_eq!(parsed.sweep.code, CodeSource::FiveQubit);
        assert_eq!(parsed.sweep.grid, vec![0.1, 0.2]);
        assert_eq!(parsed.sweep.modes, vec![ProbeMode::Perfect]);
        assert_eq!(parsed.sweep.stop_block_errors, 100);
        assert_eq!(parsed.sweep.max_iter, 100);
    }

    #[test]
    fn full_config_parses() {
        let text = "\
# comment
code = bicycle
bicycle-n = 32
bicycle-row-weight = 8
bicycle-m = 8
bicycle-seed = 3
f-grid = 0.01, 0.02
grid-unit = f-prime
modes = perfect entangled fixed:0.2
n-m = 5
default-prior = 0.25
fisher-arg = f
fisher-scale-n = 1034
prior-split = raw
max-iter = 50
max-retries = 2
perturb-strength = 0.3
stop-block-errors = 10
max-trials = 1000
seed = 42
metric = logical
";
        let parsed = parse_sweep_config(text).unwrap();
        let s = &parsed.sweep;
        assert!(matches!(s.code, CodeSource::Bicycle(p) if p.n == 32 && p.seed == 3));
        assert!(s.grid_is_f_prime);
        assert_eq!(s.modes.len(), 3);
        assert_eq!(s.n_m, 5);
        assert_eq!(s.fisher_arg, FisherArg::F);
        assert_eq!(s.fisher_scale_n, Some(1034));
        assert_eq!(s.prior_split, PriorSplit::Raw);
        assert_eq!(s.metric, Metric::Logical);
        assert_eq!(s.master_seed, 42);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_sweep_config("f-grid = 0.1\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn duplicate_key_reports_line() {
        let err = parse_sweep_config("f-grid = 0.1\nf-grid = 0.2\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn bad_value_reports_line() {
        let err = parse_sweep_config("f-grid = 0.1\nmax-iter = many\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn hash_is_stable_and_value_sensitive() {
        let a = parse_sweep_config("f-grid = 0.1\nseed = 1\n").unwrap();
        let b = parse_sweep_config("seed = 1\nf-grid = 0.1\n").unwrap();
        let c = parse_sweep_config("f-grid = 0.1\nseed = 2\n").unwrap();
        assert_eq!(config_hash(&a.canonical), config_hash(&b.canonical));
        assert_ne!(config_hash(&a.canonical), config_hash(&c.canonical));
    }

    #[test]
    fn help_text_covers_every_key() {
        for key in KNOWN_KEYS {
            assert!(
                CONFIG_KEY_HELP.contains(key),
                "help text missing key {key}"
            );
        }
    }
}

//! JSON run configuration: strict schema, exhaustive validation.
//!
//! Parsing is strict (unknown keys rejected); semantic validation walks the
//! whole tree and reports *every* violation with its field path, so a bad
//! config is fixed in one edit-run cycle, not ten.

use serde::{Deserialize, Serialize};

use radpair_core::spin::SpinQuantumNumber;
use radpair_core::sweep::{Grid1D, Spacing};
use radpair_core::{Electron, NucleusSpec, PhysicalConstants, RadicalPairSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nuclei: Option<Vec<NucleusConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defaults: Option<ContrastConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids: Option<GridsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetics: Option<KineticsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub born: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(default, rename = "B_uT", skip_serializing_if = "Option::is_none")]
    pub b_ut: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleusConfig {
    pub spin: String,
    #[serde(rename = "a_iso_uT")]
    pub a_iso_ut: f64,
    pub electron: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ContrastConfig {
    #[serde(default, rename = "B_hmf_uT", skip_serializing_if = "Option::is_none")]
    pub b_hmf_ut: Option<f64>,
    #[serde(default, rename = "B_gmf_uT", skip_serializing_if = "Option::is_none")]
    pub b_gmf_ut: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KineticsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_per_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridsConfig {
    #[serde(default, rename = "B_uT", skip_serializing_if = "Option::is_none")]
    pub b_ut: Option<GridConfig>,
    #[serde(default, rename = "a_uT", skip_serializing_if = "Option::is_none")]
    pub a_ut: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_per_s: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_per_s: Option<GridConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

/// "1/2", "1", "3/2", … → doubled spin quantum number.
pub fn parse_spin(text: &str) -> Result<u32, String> {
    let t = text.trim();
    let twice = if let Some((num, den)) = t.split_once('/') {
        if den.trim() != "2" {
            return Err(format!(
                "unrecognized spin \"{text}\" (use \"1/2\", \"1\", \"3/2\", …)"
            ));
        }
        num.trim()
            .parse::<u32>()
            .map_err(|_| format!("unrecognized spin \"{text}\""))?
    } else {
        t.parse::<u32>()
            .map_err(|_| format!("unrecognized spin \"{text}\""))?
            .checked_mul(2)
            .ok_or_else(|| format!("spin \"{text}\" out of range"))?
    };
    if twice == 0 {
        return Err("spin must be ≥ 1/2".to_string());
    }
    Ok(twice)
}

pub fn parse_config(text: &str) -> Result<RunConfig, Vec<String>> {
    let config: RunConfig =
        serde_json::from_str(text).map_err(|e| vec![format!("config: {e}")])?;
    let errors = validate(&config);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

fn check_num(
    errors: &mut Vec<String>,
    path: &str,
    value: f64,
    ok: impl Fn(f64) -> bool,
    want: &str,
) {
    if !value.is_finite() || !ok(value) {
        errors.push(format!("{path}: must be {want}, got {value}"));
    }
}

pub fn validate(config: &RunConfig) -> Vec<String> {
    let mut errors = Vec::new();

    if let Some(nuclei) = &config.nuclei {
        for (i, n) in nuclei.iter().enumerate() {
            if let Err(e) = parse_spin(&n.spin) {
                errors.push(format!("nuclei[{i}].spin: {e}"));
            }
            check_num(
                &mut errors,
                &format!("nuclei[{i}].a_iso_uT"),
                n.a_iso_ut,
                |a| a.abs() < 1e7,
                "a finite coupling with |a| < 1e7 µT",
            );
            if n.electron != "A" && n.electron != "B" {
                errors.push(format!(
                    "nuclei[{i}].electron: must be \"A\" or \"B\", got \"{}\"",
                    n.electron
                ));
            }
        }
    }
    if let Some(c) = &config.constants {
        if let Some(g) = c.gamma_e {
            check_num(&mut errors, "constants.gamma_e", g, |g| g > 0.0, "positive");
        }
    }
    if let Some(d) = &config.defaults {
        if let Some(b) = d.b_hmf_ut {
            check_num(&mut errors, "defaults.B_hmf_uT", b, |b| b >= 0.0, "≥ 0");
        }
        if let Some(b) = d.b_gmf_ut {
            check_num(&mut errors, "defaults.B_gmf_uT", b, |b| b >= 0.0, "≥ 0");
        }
    }
    if let Some(k) = &config.kinetics {
        if let Some(v) = k.k_per_s {
            check_num(&mut errors, "kinetics.k_per_s", v, |v| v > 0.0, "positive");
        }
        if let Some(v) = k.r_per_s {
            check_num(&mut errors, "kinetics.r_per_s", v, |v| v >= 0.0, "≥ 0");
        }
    }
    for (path, value) in [("born", &config.born), ("channel", &config.channel)] {
        if let Some(v) = value {
            if v != "singlet" && v != "triplet" {
                errors.push(format!(
                    "{path}: must be \"singlet\" or \"triplet\", got \"{v}\""
                ));
            }
        }
    }
    if let Some(b) = config.b_ut {
        check_num(&mut errors, "B_uT", b, |b| b >= 0.0, "≥ 0");
    }
    if config.workers == Some(0) {
        errors.push("workers: must be ≥ 1".to_string());
    }
    if let Some(grids) = &config.grids {
        for (path, grid) in [
            ("grids.B_uT", &grids.b_ut),
            ("grids.a_uT", &grids.a_ut),
            ("grids.k_per_s", &grids.k_per_s),
            ("grids.r_per_s", &grids.r_per_s),
        ] {
            if let Some(g) = grid {
                validate_grid(&mut errors, path, g);
            }
        }
    }
    if let Some(out) = &config.output {
        if let Some(f) = &out.format {
            if f != "csv" && f != "jsonl" {
                errors.push(format!(
                    "output.format: must be \"csv\" or \"jsonl\", got \"{f}\""
                ));
            }
        }
    }
    errors
}

fn validate_grid(errors: &mut Vec<String>, path: &str, g: &GridConfig) {
    let generated = g.min.is_some() || g.max.is_some() || g.count.is_some();
    match (&g.values, generated) {
        (Some(_), true) => {
            errors.push(format!(
                "{path}: give either explicit values or min/max/count, not both"
            ));
        }
        (Some(values), false) => {
            if values.is_empty() {
                errors.push(format!("{path}.values: must not be empty"));
            }
            for (i, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    errors.push(format!("{path}.values[{i}]: must be finite"));
                } else if i > 0 && values[i - 1] >= *v {
                    errors.push(format!("{path}.values[{i}]: must be strictly increasing"));
                }
            }
        }
        (None, _) => {
            let (min, max, count) = (g.min, g.max, g.count);
            if min.is_none() || max.is_none() || count.is_none() {
                errors.push(format!("{path}: needs min, max, and count (or values)"));
                return;
            }
            let (min, max, count) = (min.unwrap(), max.unwrap(), count.unwrap());
            if !min.is_finite() || !max.is_finite() {
                errors.push(format!("{path}: min and max must be finite"));
            }
            if count == 0 {
                errors.push(format!("{path}.count: must be ≥ 1"));
            }
            if count == 1 && min != max {
                errors.push(format!("{path}: a one-point grid needs min == max"));
            }
            if count > 1 && min >= max {
                errors.push(format!("{path}: needs min < max"));
            }
            match g.spacing.as_deref() {
                None | Some("log") => {
                    if min <= 0.0 {
                        errors.push(format!("{path}: log spacing needs min > 0"));
                    }
                }
                Some("linear") => {}
                Some(other) => {
                    errors.push(format!(
                        "{path}.spacing: must be \"log\" or \"linear\", got \"{other}\""
                    ));
                }
            }
        }
    }
}

impl GridConfig {
    /// Build the library grid; call only after `validate` has passed.
    pub fn to_grid(&self, name: &str) -> Result<Grid1D, String> {
        if let Some(values) = &self.values {
            let spacing = match self.spacing.as_deref() {
                Some("linear") => Spacing::Linear,
                _ => Spacing::Log,
            };
            return Grid1D::from_values(name, values.clone(), spacing).map_err(|e| e.to_string());
        }
        let (min, max, count) = (
            self.min.unwrap_or(f64::NAN),
            self.max.unwrap_or(f64::NAN),
            self.count.unwrap_or(0),
        );
        match self.spacing.as_deref() {
            Some("linear") => Grid1D::linear(name, min, max, count).map_err(|e| e.to_string()),
            _ => Grid1D::log(name, min, max, count).map_err(|e| e.to_string()),
        }
    }
}

impl RunConfig {
    /// Nuclei list → validated model; empty/missing list means a bare pair.
    pub fn to_spec(&self) -> Result<RadicalPairSpec, String> {
        let mut nuclei = Vec::new();
        for n in self.nuclei.iter().flatten() {
            let twice = parse_spin(&n.spin)?;
            let spin = SpinQuantumNumber::new(twice).map_err(|e| e.to_string())?;
            let electron = match n.electron.as_str() {
                "A" => Electron::A,
                "B" => Electron::B,
                other => return Err(format!("electron must be \"A\" or \"B\", got \"{other}\"")),
            };
            nuclei.push(NucleusSpec::new(spin, n.a_iso_ut, electron).map_err(|e| e.to_string())?);
        }
        RadicalPairSpec::new(nuclei).map_err(|e| e.to_string())
    }

    pub fn to_constants(&self) -> PhysicalConstants {
        let mut c = PhysicalConstants::default();
        if let Some(g) = self.constants.as_ref().and_then(|c| c.gamma_e) {
            c.gamma_e = g;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimal_config_is_valid() {
        let config =
            parse_config(r#"{"nuclei":[{"spin":"1/2","a_iso_uT":1000,"electron":"A"}]}"#)
                .unwrap();
        let spec = config.to_spec().unwrap();
        assert_eq!(spec.nuclear_multiplicity(), 2);
        assert_eq!(spec.total_dim(), 8);
    }

    #[test]
    fn zero_spin_is_rejected_with_field_path() {
        let err = parse_config(r#"{"nuclei":[{"spin":"0","a_iso_uT":1,"electron":"A"}]}"#)
            .unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].contains("nuclei[0].spin"));
        assert!(err[0].contains("spin must be ≥ 1/2"));
    }

    #[test]
    fn negative_rate_is_rejected_with_field_path() {
        let err = parse_config(r#"{"kinetics":{"k_per_s":-1}}"#).unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].contains("kinetics.k_per_s"));
    }

    #[test]
    fn all_errors_are_collected_not_just_the_first() {
        let err = parse_config(
            r#"{
                "nuclei":[{"spin":"0","a_iso_uT":1e9,"electron":"C"}],
                "kinetics":{"k_per_s":-1,"r_per_s":-2},
                "born":"maybe"
            }"#,
        )
        .unwrap_err();
        assert!(err.len() >= 6, "got only: {err:?}");
        for needle in [
            "nuclei[0].spin",
            "nuclei[0].a_iso_uT",
            "nuclei[0].electron",
            "kinetics.k_per_s",
            "kinetics.r_per_s",
            "born",
        ] {
            assert!(
                err.iter().any(|e| e.contains(needle)),
                "missing an error for {needle}: {err:?}"
            );
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"nucleii":[]}"#).unwrap_err();
        assert!(err[0].contains("nucleii"));
        let err =
            parse_config(r#"{"kinetics":{"k_per_s":1.0,"tau_s":3}}"#).unwrap_err();
        assert!(err[0].contains("tau_s"));
    }

    #[test]
    fn spin_grammar() {
        assert_eq!(parse_spin("1/2").unwrap(), 1);
        assert_eq!(parse_spin("1").unwrap(), 2);
        assert_eq!(parse_spin("3/2").unwrap(), 3);
        assert_eq!(parse_spin("2").unwrap(), 4);
        assert!(parse_spin("0").is_err());
        assert!(parse_spin("0/2").is_err());
        assert!(parse_spin("1/3").is_err());
        assert!(parse_spin("half").is_err());
        assert!(parse_spin("-1").is_err());
    }

    #[test]
    fn grid_config_modes() {
        let ok = parse_config(
            r#"{"grids":{"k_per_s":{"min":1e3,"max":1e9,"count":61},
                        "B_uT":{"values":[0.0,1.0,50.0]}}}"#,
        )
        .unwrap();
        let grids = ok.grids.unwrap();
        let kg = grids.k_per_s.unwrap().to_grid("k_per_s").unwrap();
        assert_eq!(kg.len(), 61);
        let bg = grids.b_ut.unwrap().to_grid("B_uT").unwrap();
        assert_eq!(bg.values(), &[0.0, 1.0, 50.0]);

        let err = parse_config(r#"{"grids":{"B_uT":{"min":1.0,"values":[1.0]}}}"#).unwrap_err();
        assert!(err[0].contains("not both"));
        let err = parse_config(r#"{"grids":{"B_uT":{"min":0.0,"max":1.0,"count":5}}}"#)
            .unwrap_err();
        assert!(err[0].contains("log spacing needs min > 0"));
        let err = parse_config(r#"{"grids":{"B_uT":{"values":[1.0,1.0]}}}"#).unwrap_err();
        assert!(err[0].contains("strictly increasing"));
    }

    fn random_config(rng: &mut ChaCha8Rng) -> RunConfig {
        let mut config = RunConfig::default();
        if rng.gen_bool(0.7) {
            let count = rng.gen_range(0..3);
            config.nuclei = Some(
                (0..count)
                    .map(|_| NucleusConfig {
                        spin: ["1/2", "1", "3/2"][rng.gen_range(0..3)].to_string(),
                        a_iso_ut: rng.gen_range(-5000.0..5000.0),
                        electron: if rng.gen_bool(0.5) { "A" } else { "B" }.to_string(),
                    })
                    .collect(),
            );
        }
        if rng.gen_bool(0.5) {
            config.constants = Some(ConstantsConfig {
                gamma_e: rng.gen_bool(0.8).then(|| rng.gen_range(1e10..1e12)),
            });
        }
        if rng.gen_bool(0.5) {
            config.defaults = Some(ContrastConfig {
                b_hmf_ut: rng.gen_bool(0.5).then(|| rng.gen_range(0.0..10.0)),
                b_gmf_ut: rng.gen_bool(0.5).then(|| rng.gen_range(10.0..100.0)),
            });
        }
        if rng.gen_bool(0.5) {
            config.kinetics = Some(KineticsConfig {
                k_per_s: rng.gen_bool(0.8).then(|| rng.gen_range(1e3..1e9)),
                r_per_s: rng.gen_bool(0.8).then(|| rng.gen_range(0.0..1e9)),
            });
        }
        if rng.gen_bool(0.4) {
            config.born = Some(if rng.gen_bool(0.5) { "singlet" } else { "triplet" }.to_string());
        }
        if rng.gen_bool(0.4) {
            config.channel =
                Some(if rng.gen_bool(0.5) { "singlet" } else { "triplet" }.to_string());
        }
        if rng.gen_bool(0.4) {
            config.b_ut = Some(rng.gen_range(0.0..1e4));
        }
        if rng.gen_bool(0.3) {
            config.workers = Some(rng.gen_range(1..16));
        }
        if rng.gen_bool(0.5) {
            let grid = GridConfig {
                min: Some(rng.gen_range(0.1..10.0)),
                max: Some(rng.gen_range(100.0..1e4)),
                count: Some(rng.gen_range(2..100)),
                spacing: rng
                    .gen_bool(0.5)
                    .then(|| if rng.gen_bool(0.5) { "log" } else { "linear" }.to_string()),
                values: None,
            };
            config.grids = Some(GridsConfig {
                k_per_s: Some(grid),
                ..Default::default()
            });
        }
        if rng.gen_bool(0.3) {
            config.output = Some(OutputConfig {
                path: rng.gen_bool(0.5).then(|| "out.csv".to_string()),
                format: rng
                    .gen_bool(0.5)
                    .then(|| if rng.gen_bool(0.5) { "csv" } else { "jsonl" }.to_string()),
            });
        }
        config
    }

    #[test]
    fn serialization_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0F1);
        for _ in 0..100 {
            let config = random_config(&mut rng);
            let text = serde_json::to_string_pretty(&config).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, config, "round-trip mismatch for:\n{text}");
        }
    }
}

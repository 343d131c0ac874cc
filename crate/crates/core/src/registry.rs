//! Named growth functions loaded from TOML or JSON.
//!
//! ```toml
//! [functions.slow]
//! family = "ks"
//! beta = 0.5
//!
//! [functions.bell]
//! family = "series"
//! bell = 2
//! kind = "g-alpha"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::growthfn::{GrowthFunction, SeriesKind};
use crate::sequences::{gen_bell, gen_power_factorial, PositiveSequence};
use crate::{Error, Result};

/// Terms generated for series entries built from a sequence family.
pub const SERIES_TERMS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `exp[(1+β) r^{1/(1+β)}]`
    Ks { beta: f64 },
    /// `exp[(1-β) r^{1/(1-β)}]`
    Ksgen { beta: f64 },
    /// `k`-fold iterated exponential.
    Expk { k: u32 },
    /// `exp(Σ c_i r^i)`
    ExpPoly { coeffs: Vec<f64> },
    /// `exp(a (log r)² + b log r)`
    LogQuadratic { a: f64, b: f64 },
    /// `(c + r)^k`
    Power { c: f64, k: f64 },
    /// Series with coefficients from a file, a Bell sequence or a
    /// power-factorial sequence.
    Series {
        #[serde(default)]
        file: Option<PathBuf>,
        #[serde(default)]
        bell: Option<u32>,
        #[serde(default)]
        power_factorial: Option<f64>,
        #[serde(default)]
        kind: SeriesKindSpec,
    },
    Dual { of: Box<FamilySpec> },
    Lfn { of: Box<FamilySpec> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKindSpec {
    #[default]
    Plain,
    GAlpha,
    GInvAlpha,
}

impl From<SeriesKindSpec> for SeriesKind {
    fn from(k: SeriesKindSpec) -> Self {
        match k {
            SeriesKindSpec::Plain => SeriesKind::Plain,
            SeriesKindSpec::GAlpha => SeriesKind::GAlpha,
            SeriesKindSpec::GInvAlpha => SeriesKind::GInvAlpha,
        }
    }
}

impl FamilySpec {
    /// Relative file paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<GrowthFunction> {
        use crate::growthfn::Repr;
        Ok(match self {
            FamilySpec::Ks { beta } => GrowthFunction::new(Repr::KsTest { beta: *beta })?,
            FamilySpec::Ksgen { beta } => GrowthFunction::new(Repr::KsGen { beta: *beta })?,
            FamilySpec::Expk { k } => GrowthFunction::new(Repr::IterExp { k: *k })?,
            FamilySpec::ExpPoly { coeffs } => GrowthFunction::new(Repr::ExpPoly { coeffs: coeffs.clone() })?,
            FamilySpec::LogQuadratic { a, b } => GrowthFunction::new(Repr::LogQuadratic { a: *a, b: *b })?,
            FamilySpec::Power { c, k } => GrowthFunction::new(Repr::Power { c: *c, k: *k })?,
            FamilySpec::Series { file, bell, power_factorial, kind } => {
                let seq = match (file, bell, power_factorial) {
                    (Some(f), None, None) => read_sequence(&base.join(f))?,
                    (None, Some(k), None) => gen_bell(*k, SERIES_TERMS)?,
                    (None, None, Some(b)) => gen_power_factorial(*b, SERIES_TERMS)?,
                    _ => {
                        return Err(Error::InvalidInput(
                            "series needs exactly one of file, bell, power-factorial".into(),
                        ))
                    }
                };
                GrowthFunction::new(Repr::Series { seq, kind: (*kind).into() })?
            }
            FamilySpec::Dual { of } => GrowthFunction::dual_of(&of.build(base)?),
            FamilySpec::Lfn { of } => GrowthFunction::l_function_of(&of.build(base)?),
        })
    }
}

pub fn read_sequence(path: &Path) -> Result<PositiveSequence> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    PositiveSequence::from_json(&v)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registry {
    pub functions: BTreeMap<String, FamilySpec>,
    #[serde(skip)]
    base: PathBuf,
}

impl Registry {
    /// TOML when the extension is `.toml`, JSON otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        let mut reg: Registry = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        } else {
            serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        };
        reg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(reg)
    }

    pub fn get(&self, name: &str) -> Result<GrowthFunction> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("no function named '{name}' in the registry")))?
            .build(&self.base)
    }

    pub fn build_all(&self) -> Result<Vec<(String, GrowthFunction)>> {
        self.functions.keys().map(|k| Ok((k.clone(), self.get(k)?))).collect()
    }
}

/// Built-in entries: the `ks` family at four exponents, its generalized
/// counterpart, `exp₂`, a quartic exponent, a polynomial, the Bell series and
/// a log-quadratic exponent.
pub fn default_registry() -> Registry {
    let mut functions = BTreeMap::new();
    for (name, beta) in [("exp", 0.0), ("ks-0.25", 0.25), ("ks-0.5", 0.5), ("ks-1", 1.0)] {
        functions.insert(name.to_string(), FamilySpec::Ks { beta });
    }
    functions.insert("ksgen-0.5".into(), FamilySpec::Ksgen { beta: 0.5 });
    functions.insert("exp2".into(), FamilySpec::Expk { k: 2 });
    functions.insert("quartic".into(), FamilySpec::ExpPoly { coeffs: vec![0.0, 0.0, 1.0, -1.0, 1.0] });
    functions.insert("poly5".into(), FamilySpec::Power { c: 1.0, k: 5.0 });
    functions.insert(
        "bell2".into(),
        FamilySpec::Series { file: None, bell: Some(2), power_factorial: None, kind: SeriesKindSpec::GAlpha },
    );
    functions.insert("log-quadratic".into(), FamilySpec::LogQuadratic { a: 1.0, b: -2.0 });
    Registry { functions, base: PathBuf::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_entries_build() {
        let reg = default_registry();
        let all = reg.build_all().unwrap();
        assert!(all.len() >= 10);
        let bell = reg.get("bell2").unwrap();
        // Σ b₂(n) rⁿ/n! = exp(e^r − 1)
        assert!((bell.log_u(1.0).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn toml_and_json_agree() {
        let dir = std::env::temp_dir().join(format!("growthcalc-registry-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let toml_path = dir.join("r.toml");
        std::fs::write(
            &toml_path,
            "[functions.slow]\nfamily = \"ks\"\nbeta = 0.5\n\n[functions.d]\nfamily = \"dual\"\nof = { family = \"ks\", beta = 0.5 }\n",
        )
        .unwrap();
        let json_path = dir.join("r.json");
        std::fs::write(
            &json_path,
            r#"{"functions": {"slow": {"family": "ks", "beta": 0.5}, "d": {"family": "dual", "of": {"family": "ks", "beta": 0.5}}}}"#,
        )
        .unwrap();
        let a = Registry::load(&toml_path).unwrap();
        let b = Registry::load(&json_path).unwrap();
        assert_eq!(a.functions, b.functions);
        assert!((a.get("d").unwrap().log_u(2.0).unwrap() - 2.0).abs() < 1e-9);
        assert!(a.get("missing").is_err());
        std::fs::write(&json_path, r#"{"functions": {"x": {"family": "ks", "beta": 0.5, "gamma": 1}}}"#).unwrap();
        assert!(Registry::load(&json_path).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn series_sources_are_exclusive() {
        let spec = FamilySpec::Series { file: None, bell: Some(2), power_factorial: Some(0.5), kind: SeriesKindSpec::Plain };
        assert!(spec.build(Path::new(".")).is_err());
    }
}

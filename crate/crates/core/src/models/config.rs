//! Model files: one JSON document per model, tagged by `type`.
//!
//! ```json
//! {"type": "anderson", "epsilon": 0.05, "delta": 1.2e-4,
//!  "E": 0.8322936730942848, "wLow": -1, "wHigh": 1}
//! ```
//!
//! `anderson` takes `E` (or `k`, with `E = −2 cos k`), `wLow`, `wHigh`.
//! `generic` takes `atoms`, each with `weight`, `eta`, `P`, `Q` and the
//! optional `Pw`, `Pprime`, `dFactor`; coefficient triples are
//! `[p1, p2, p3]`. A generic model may add `wLow`/`wHigh`.
//! `polymer` takes `Ec` and `blocks`, each with `weight`, `t`, `v`.
//! `anderson` and `generic` accept `dFactorLow`/`dFactorHigh` for a uniform
//! random factor on `Q`. `epsilon` and `delta` default to 0.

use std::path::Path;

use serde::Deserialize;

use super::{anderson_model, Atom, Block, ModelSpec, PolymerModel, PolymerSpec, Uniform};
use crate::error::{Error, Result};
use crate::su11::Su11Coeffs;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ModelFile {
    Anderson {
        #[serde(default)]
        epsilon: f64,
        #[serde(default)]
        delta: f64,
        #[serde(rename = "E")]
        energy: Option<f64>,
        k: Option<f64>,
        #[serde(rename = "wLow")]
        w_low: f64,
        #[serde(rename = "wHigh")]
        w_high: f64,
        #[serde(rename = "dFactorLow")]
        d_low: Option<f64>,
        #[serde(rename = "dFactorHigh")]
        d_high: Option<f64>,
    },
    Generic {
        #[serde(default)]
        epsilon: f64,
        #[serde(default)]
        delta: f64,
        atoms: Vec<AtomFile>,
        #[serde(rename = "wLow")]
        w_low: Option<f64>,
        #[serde(rename = "wHigh")]
        w_high: Option<f64>,
        #[serde(rename = "dFactorLow")]
        d_low: Option<f64>,
        #[serde(rename = "dFactorHigh")]
        d_high: Option<f64>,
    },
    Polymer {
        #[serde(default)]
        epsilon: f64,
        #[serde(default)]
        delta: f64,
        #[serde(rename = "Ec")]
        e_c: f64,
        blocks: Vec<BlockFile>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFile {
    weight: f64,
    eta: f64,
    #[serde(rename = "P")]
    p: [f64; 3],
    #[serde(rename = "Pw", default)]
    p_w: [f64; 3],
    #[serde(rename = "Pprime", default)]
    p_prime: [f64; 3],
    #[serde(rename = "Q")]
    q: [f64; 3],
    #[serde(rename = "dFactor", default = "one")]
    d_factor: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockFile {
    weight: f64,
    t: Vec<f64>,
    v: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

fn coeffs(c: [f64; 3]) -> Su11Coeffs {
    Su11Coeffs::new(c[0], c[1], c[2])
}

fn optional_interval(name: &str, low: Option<f64>, high: Option<f64>) -> Result<Option<Uniform>> {
    match (low, high) {
        (None, None) => Ok(None),
        (Some(l), Some(h)) => Uniform::new(l, h).map(Some),
        _ => Err(Error::InvalidModel(format!("{name}Low and {name}High must be given together"))),
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    match serde_json::from_str::<ModelFile>(text)? {
        ModelFile::Anderson { epsilon, delta, energy, k, w_low, w_high, d_low, d_high } => {
            let energy = match (energy, k) {
                (Some(e), None) => e,
                (None, Some(k)) => -2.0 * k.cos(),
                _ => return Err(Error::InvalidModel("anderson model needs exactly one of E and k".into())),
            };
            let d = optional_interval("dFactor", d_low, d_high)?;
            anderson_model(energy, epsilon, delta, Uniform::new(w_low, w_high)?, d)
        }
        ModelFile::Generic { epsilon, delta, atoms, w_low, w_high, d_low, d_high } => {
            let atoms = atoms
                .into_iter()
                .map(|a| Atom {
                    weight: a.weight,
                    eta: a.eta,
                    p: coeffs(a.p),
                    p_w: coeffs(a.p_w),
                    p_prime: coeffs(a.p_prime),
                    q: coeffs(a.q),
                    d_factor: a.d_factor,
                })
                .collect();
            let w = optional_interval("w", w_low, w_high)?;
            let d = optional_interval("dFactor", d_low, d_high)?;
            ModelSpec::exponential(atoms, w, d, epsilon, delta)
        }
        ModelFile::Polymer { epsilon, delta, e_c, blocks } => {
            let blocks = blocks
                .into_iter()
                .map(|b| Block::new(b.weight, b.t, b.v))
                .collect::<Result<Vec<_>>>()?;
            let model = PolymerModel::new(PolymerSpec { blocks }, e_c)?;
            ModelSpec::polymer(model, epsilon, delta)
        }
    }
}

pub fn load_model(path: &Path) -> Result<ModelSpec> {
    parse_model(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{constants, Family};

    #[test]
    fn anderson_by_energy_or_wavenumber() {
        let a = parse_model(r#"{"type":"anderson","E":0.8322936730942848,"wLow":-1,"wHigh":1}"#).unwrap();
        let b = parse_model(r#"{"type":"anderson","k":2,"wLow":-1,"wHigh":1,"epsilon":0.1}"#).unwrap();
        assert!((a.atoms()[0].eta - b.atoms()[0].eta).abs() < 1e-12);
        assert_eq!(b.epsilon, 0.1);
        assert!(parse_model(r#"{"type":"anderson","wLow":-1,"wHigh":1}"#).is_err());
    }

    #[test]
    fn generic_atoms_with_defaults() {
        let text = r#"{"type":"generic","epsilon":0.1,"delta":0.01,"atoms":[
            {"weight":0.5,"eta":1.0,"P":[1,0,0],"Q":[0,0,1]},
            {"weight":0.5,"eta":2.0,"P":[0,1,0],"Q":[0,0,2],"dFactor":0.5}]}"#;
        let spec = parse_model(text).unwrap();
        assert_eq!(spec.atoms().len(), 2);
        assert_eq!(spec.atoms()[1].d_factor, 0.5);
        assert!((constants(&spec).unwrap().c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polymer_dimer() {
        let text = r#"{"type":"polymer","Ec":-0.2,"blocks":[
            {"weight":0.5,"t":[1],"v":[0.6]},{"weight":0.5,"t":[1,1],"v":[-0.2,-0.2]}]}"#;
        let spec = parse_model(text).unwrap();
        assert!(matches!(spec.family, Family::Polymer(_)));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(parse_model("{").is_err());
        assert!(parse_model(r#"{"type":"other"}"#).is_err());
        assert!(parse_model(r#"{"type":"anderson","E":0,"wLow":-1,"wHigh":1,"bogus":1}"#).is_err());
        assert!(parse_model(r#"{"type":"anderson","E":0,"wLow":-1,"wHigh":1,"dFactorLow":1}"#).is_err());
    }

    #[test]
    fn shipped_examples_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
        let mut n = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "json") {
                load_model(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
                n += 1;
            }
        }
        assert!(n >= 3);
    }
}

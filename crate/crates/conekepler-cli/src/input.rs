//! Input file schemas.  Both documents are strict JSON: unknown keys are
//! rejected, and parse failures surface serde's line/column diagnostics.

use conekepler::trajectories::{EnergyClass, TrajectorySpec};
use conekepler::RegState;
use nalgebra::DVector;
use serde::Deserialize;

/// A trajectory description: `{"n": 2, "class": "elliptic", "u": [...], "v": [...]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub n: usize,
    pub class: String,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// An initial condition upstairs: `{"n": 2, "x": [...], "xdot": [...]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
}

pub fn parse_spec(text: &str) -> Result<TrajectorySpec, String> {
    let doc: SpecFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let class: EnergyClass = doc.class.parse().map_err(|e| format!("{e}"))?;
    check_len("u", &doc.u, doc.n)?;
    check_len("v", &doc.v, doc.n)?;
    TrajectorySpec::new(class, DVector::from_vec(doc.u), DVector::from_vec(doc.v))
        .map_err(|e| format!("{e}"))
}

pub fn parse_state(text: &str) -> Result<RegState, String> {
    let doc: StateFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    check_len("x", &doc.x, doc.n)?;
    check_len("xdot", &doc.xdot, doc.n)?;
    RegState::new(DVector::from_vec(doc.x), DVector::from_vec(doc.xdot))
        .map_err(|e| format!("{e}"))
}

fn check_len(field: &str, vals: &[f64], n: usize) -> Result<(), String> {
    if vals.len() != n {
        return Err(format!("\"{field}\" has {} entries but \"n\" is {n}", vals.len()));
    }
    if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
        return Err(format!("\"{field}\" contains a non-finite value {bad}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_specs_parse() {
        let spec =
            parse_spec(r#"{"n":2,"class":"elliptic","u":[1.0,0.0],"v":[0.0,1.0]}"#).unwrap();
        assert_eq!(spec.class(), EnergyClass::Elliptic);
        assert_eq!(spec.n(), 2);
    }

    #[test]
    fn diagnostics_carry_position_information() {
        let err = parse_spec(r#"{"n":2,
"class": elliptic}"#)
            .unwrap_err();
        assert!(err.contains("line 2"), "diagnostic was: {err}");
    }

    #[test]
    fn structural_mistakes_are_rejected() {
        assert!(parse_spec(r#"{"n":3,"class":"elliptic","u":[1,0],"v":[0,1,0]}"#).is_err());
        assert!(parse_spec(r#"{"n":2,"class":"round","u":[1,0],"v":[0,1]}"#).is_err());
        assert!(parse_spec(r#"{"n":2,"class":"elliptic","u":[1,0],"v":[0,1],"w":[]}"#).is_err());
        assert!(parse_state(r#"{"n":2,"x":[0.0,0.0],"xdot":[1.0,0.0]}"#).is_err());
    }
}

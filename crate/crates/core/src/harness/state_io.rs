//! State and support documents.
//!
//! A state is a JSON list of `{"occ": [...], "re": x, "im": y}` terms; a support is a JSON
//! list of occupation arrays.

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ModeLayout, OccupationVector, StateVector};
use crate::C64;

/// Largest accepted deviation of the squared norm from one at load time.
pub const LOAD_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateTerm {
    pub occ: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Parses a state document into its terms without building a layout.
pub fn parse_state(document: &str) -> Result<Vec<StateTerm>> {
    let terms: Vec<StateTerm> = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    if terms.is_empty() {
        return Err(Error::Schema("state has no terms".into()));
    }
    let modes = terms[0].occ.len();
    if modes == 0 || terms.iter().any(|t| t.occ.len() != modes) {
        return Err(Error::Schema("all occupation vectors must have the same nonzero length".into()));
    }
    Ok(terms)
}

/// Builds a normalized state on `modes` modes with cutoff `max occupation + headroom`.
///
/// Squared norms within [`LOAD_NORM_TOLERANCE`] of one are renormalized exactly.
pub fn build_state(terms: &[StateTerm], modes: usize, headroom: u32) -> Result<StateVector> {
    if terms.iter().any(|t| t.occ.len() != modes) {
        return Err(Error::Schema(format!("state occupation vectors must have {modes} entries")));
    }
    let max = terms.iter().flat_map(|t| t.occ.iter().copied()).max().unwrap_or(0);
    let layout = ModeLayout::new(modes, max + headroom)?;
    let state = StateVector::from_terms(
        layout,
        terms.iter().map(|t| (OccupationVector::new(t.occ.clone()), C64::new(t.re, t.im))),
    )?;
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > LOAD_NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    if norm_sqr != 1.0 {
        info!("renormalizing state with squared norm {norm_sqr}");
    }
    state.normalized()
}

/// Parses and builds a state in one step.
pub fn load_state(document: &str, modes: usize, headroom: u32) -> Result<StateVector> {
    build_state(&parse_state(document)?, modes, headroom)
}

/// Serializes a state's terms in basis order.
pub fn state_to_json(state: &StateVector) -> String {
    let terms: Vec<StateTerm> = state
        .terms()
        .map(|(o, c)| StateTerm { occ: o.counts().to_vec(), re: c.re, im: c.im })
        .collect();
    serde_json::to_string(&terms).expect("state document serializes")
}

/// Parses a support document: a list of occupation arrays of equal length.
pub fn load_support(document: &str) -> Result<Vec<OccupationVector>> {
    let raw: Vec<Vec<u32>> = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    if raw.is_empty() {
        return Err(Error::Schema("support is empty".into()));
    }
    let modes = raw[0].len();
    if modes == 0 || raw.iter().any(|o| o.len() != modes) {
        return Err(Error::Schema("all occupation vectors must have the same nonzero length".into()));
    }
    let mut support: Vec<OccupationVector> = raw.into_iter().map(OccupationVector::new).collect();
    let before = support.len();
    support.sort();
    support.dedup();
    if support.len() != before {
        return Err(Error::Schema("support lists an occupation vector twice".into()));
    }
    Ok(support)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let doc = r#"[{"occ":[1,0],"re":0.6,"im":0.0},{"occ":[0,1],"re":0.0,"im":0.8}]"#;
        let state = load_state(doc, 2, 2).unwrap();
        assert_eq!(state.layout().cutoff(), 3);
        let again = load_state(&state_to_json(&state), 2, 2).unwrap();
        assert_eq!(state, again);
    }

    #[test]
    fn tolerance_window() {
        let close = r#"[{"occ":[0],"re":1.0000000001}]"#;
        let s = load_state(close, 1, 2).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        let far = r#"[{"occ":[0],"re":1.1}]"#;
        assert!(matches!(load_state(far, 1, 2), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(parse_state("[]"), Err(Error::Schema(_))));
        assert!(matches!(parse_state(r#"[{"occ":[0],"re":1,"x":2}]"#), Err(Error::Schema(_))));
        assert!(matches!(load_state(r#"[{"occ":[0],"re":1}]"#, 2, 2), Err(Error::Schema(_))));
        assert!(matches!(load_support("[[0,1],[1]]"), Err(Error::Schema(_))));
        assert!(matches!(load_support("[[0,1],[0,1]]"), Err(Error::Schema(_))));
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

use super::{build_truncated_poly_algebra, CoeffKind, FiniteAlgebra, PrimeParams};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(default = "one")]
    pub d: u32,
}

fn one() -> u32 {
    1
}

/// JSON description of a ring:
/// `{"p":2,"m":8,"field":{"d":1},"vars":["t"],"relations":["t^4"],"coeff":"k"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub m: u32,
    #[serde(default = "default_field")]
    pub field: FieldSpec,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default = "default_coeff")]
    pub coeff: CoeffKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cut: Option<u32>,
}

fn default_field() -> FieldSpec {
    FieldSpec { d: 1 }
}

fn default_coeff() -> CoeffKind {
    CoeffKind::Witt
}

impl RingSpec {
    pub fn from_json(s: &str) -> Result<RingSpec, AlgebraError> {
        serde_json::from_str(s).map_err(|e| AlgebraError::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<Arc<FiniteAlgebra>, AlgebraError> {
        let params = PrimeParams::new(self.p, self.m, self.field.d)?;
        let vars: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        let rels: Vec<&str> = self.relations.iter().map(String::as_str).collect();
        build_truncated_poly_algebra(params, self.coeff, &vars, &rels, self.degree_cut)
    }
}

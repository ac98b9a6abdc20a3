//! Branches, multigerms, block structure and the group action.

mod block;
mod branch;
mod group;

use serde_json::{json, Value};

pub use block::{
    mobius_for, puiseux_block_form_with, replay_log, subgroup_for, to_block_form, to_block_form_ordered, BlockStructure, LogEntry, Subgroup,
};
pub use branch::{Branch, Slope};
pub use group::{apply_group, check_permutation, identity_permutation, linear_map, Flavor, GroupElement, Linear};

use crate::error::{CurvaError, Result};

/// An ordered tuple of branches, optionally carrying its block structure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multigerm {
    pub branches: Vec<Branch>,
    pub blocks: Option<BlockStructure>,
}

impl Multigerm {
    pub fn new(branches: Vec<Branch>) -> Result<Multigerm> {
        if branches.is_empty() {
            return Err(CurvaError::Validation("a multigerm needs at least one branch".into()));
        }
        Ok(Multigerm { branches, blocks: None })
    }

    pub fn r(&self) -> usize {
        self.branches.len()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.branches.iter().map(|b| b.n).collect()
    }

    pub fn truncs(&self) -> Vec<usize> {
        self.branches.iter().map(|b| b.trunc()).collect()
    }

    pub fn slopes(&self) -> Vec<Slope> {
        self.branches.iter().map(|b| b.tangent_slope()).collect()
    }

    /// Truncates branch i at t^{ts[i]}, keeping the block data.
    pub fn truncate(&self, ts: &[usize]) -> Multigerm {
        Multigerm {
            branches: self.branches.iter().zip(ts).map(|(b, &t)| b.truncate(t)).collect(),
            blocks: self.blocks.clone(),
        }
    }

    pub fn exact(&self) -> Multigerm {
        Multigerm { branches: self.branches.iter().map(|b| b.exact()).collect(), blocks: self.blocks.clone() }
    }

    /// Attaches the block structure if the branches are in block form.
    pub fn with_detected_blocks(mut self) -> Result<Multigerm> {
        self.blocks = Some(BlockStructure::detect(&self)?);
        Ok(self)
    }

    /// Block structure, either cached or detected.
    pub fn block_structure(&self) -> Result<BlockStructure> {
        match &self.blocks {
            Some(b) => Ok(b.clone()),
            None => BlockStructure::detect(self),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"branches": self.branches.iter().map(|b| b.to_json()).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value) -> Result<Multigerm> {
        let obj = v.as_object().ok_or_else(|| CurvaError::Validation("multigerm must be an object".into()))?;
        for key in obj.keys() {
            if key != "branches" {
                return Err(CurvaError::Validation(format!("unknown multigerm field {key:?}")));
            }
        }
        let arr = obj
            .get("branches")
            .and_then(|b| b.as_array())
            .ok_or_else(|| CurvaError::Validation("multigerm needs a \"branches\" array".into()))?;
        Multigerm::new(arr.iter().map(Branch::from_json).collect::<Result<Vec<_>>>()?)
    }

    pub fn parse(text: &str) -> Result<Multigerm> {
        let v: Value = serde_json::from_str(text).map_err(|e| CurvaError::Validation(format!("bad JSON: {e}")))?;
        Multigerm::from_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let doc = r#"{"branches":[{"x":[[2,"1","0"]],"y":[[3,"1","0"],[5,"-1/2","3"]],"trunc":8},
                     {"x":[[1,"1","0"]],"y":[[1,"2","0"]],"trunc":4}]}"#;
        let v: Value = serde_json::from_str(doc).unwrap();
        let m = Multigerm::from_json(&v).unwrap();
        assert_eq!(m.r(), 2);
        assert_eq!(m.to_json(), v);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(Multigerm::parse(r#"{"branches":[],"slopes":[]}"#).is_err());
        assert!(Multigerm::parse(r#"{"branches":[]}"#).is_err());
    }
}

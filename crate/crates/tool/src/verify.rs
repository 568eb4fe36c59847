use std::path::Path;

use pfs_core::{verify_wrapper, Exec, ValidationIssue};

use crate::error::{Result, ToolError};

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub issues: Vec<ValidationIssue>,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        !self.issues.iter().any(ValidationIssue::is_error)
    }
}

/// Parses, validates and decodes every embedded payload.
pub fn cmd_verify(wrapper: &Path, exec: Exec) -> Result<VerifyOutcome> {
    let bytes = std::fs::read(wrapper).map_err(|e| ToolError::io(wrapper, e))?;
    Ok(VerifyOutcome {
        issues: verify_wrapper(&bytes, exec),
    })
}

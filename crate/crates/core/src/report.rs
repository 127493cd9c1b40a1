//! Residual reports shared by all verification routines.

use alloc::string::String;
use alloc::vec::Vec;

/// One verified identity: the largest residual seen and the grade window it
/// was measured on.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub max_residual: f64,
    pub window: String,
    /// Acceptance threshold this identity is judged against.
    pub threshold: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.max_residual.is_finite() && self.max_residual <= self.threshold
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub identities: Vec<IdentityCheck>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        max_residual: f64,
        window: impl Into<String>,
        threshold: f64,
    ) {
        self.identities.push(IdentityCheck {
            name: name.into(),
            max_residual,
            window: window.into(),
            threshold,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.identities.extend(other.identities);
    }

    pub fn passed(&self) -> bool {
        self.identities.iter().all(IdentityCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.identities.iter().find(|c| c.name == name)
    }

    /// The first identity that exceeded its threshold.
    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.identities.iter().find(|c| !c.passed())
    }
}

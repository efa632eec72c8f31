use std::fmt;

use serde::{Deserialize, Serialize};

/// A node of a proof tree. Leaves carry architecture relations (`relation`), Dep entries
/// (`dep`) or closed-world side conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: String,
    pub conclusion: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn node(rule: impl Into<String>, conclusion: impl Into<String>, premises: Vec<Derivation>) -> Self {
        Derivation { rule: rule.into(), conclusion: conclusion.into(), premises }
    }

    pub fn leaf(rule: impl Into<String>, conclusion: impl Into<String>) -> Self {
        Self::node(rule, conclusion, Vec::new())
    }

    /// Rule ids in pre-order.
    pub fn rules(&self) -> Vec<&str> {
        let mut out = vec![self.rule.as_str()];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    pub fn count(&self, rule: &str) -> usize {
        self.rules().iter().filter(|r| **r == rule).count()
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        writeln!(f, "{:indent$}[{}] {}", "", self.rule, self.conclusion, indent = depth * 2)?;
        for p in &self.premises {
            p.write(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

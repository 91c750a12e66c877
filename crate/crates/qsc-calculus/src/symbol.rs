//! Resource symbols: the unit resources, their τ-relative variants, and
//! named noisy resources (static states, channels with optional test states,
//! protected source channels).

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResourceSymbol {
    /// [c→c]
    Cbit,
    /// [q→q]
    Qubit,
    /// [q→qq]
    Cobit,
    /// [c→c : τ]
    CbitTau,
    /// [q→q : τ]
    QubitTau,
    /// [q→qq : τ]
    CobitTau,
    /// [q q]
    Ebit,
    /// [c c]
    Rbit,
    /// ⟨ρ⟩ — a named static state
    Static { tag: String },
    /// ⟨N⟩ or ⟨N : ω⟩ — a named channel, proper when `test` is None
    Dynamic { name: String, test: Option<String> },
    /// ⟨N :: ρ⟩ — a protected resource originating at the Source
    Protected { name: String, source: String },
}

impl ResourceSymbol {
    pub fn stat(tag: &str) -> Self {
        ResourceSymbol::Static { tag: tag.to_string() }
    }

    pub fn chan(name: &str) -> Self {
        ResourceSymbol::Dynamic { name: name.to_string(), test: None }
    }

    pub fn chan_rel(name: &str, test: &str) -> Self {
        ResourceSymbol::Dynamic { name: name.to_string(), test: Some(test.to_string()) }
    }

    pub fn protected(name: &str, source: &str) -> Self {
        ResourceSymbol::Protected { name: name.to_string(), source: source.to_string() }
    }

    /// Classical resources can carry decoupling flags.
    pub fn is_classical_unit(&self) -> bool {
        matches!(
            self,
            ResourceSymbol::Cbit | ResourceSymbol::CbitTau | ResourceSymbol::Rbit
        )
    }

    pub fn is_unit(&self) -> bool {
        !matches!(
            self,
            ResourceSymbol::Static { .. }
                | ResourceSymbol::Dynamic { .. }
                | ResourceSymbol::Protected { .. }
        )
    }

    pub fn is_protected(&self) -> bool {
        matches!(self, ResourceSymbol::Protected { .. })
    }

    /// Pure unit resources (isometries / pure states). Named resources are
    /// pure only when declared so in a context.
    pub fn is_pure_unit(&self) -> bool {
        matches!(
            self,
            ResourceSymbol::Qubit
                | ResourceSymbol::Ebit
                | ResourceSymbol::Cobit
                | ResourceSymbol::QubitTau
                | ResourceSymbol::CobitTau
        )
    }

    /// Priority for basis elimination: cobits rewrite into qubits and ebits.
    pub fn elimination_priority(&self) -> u8 {
        match self {
            ResourceSymbol::Cobit => 0,
            ResourceSymbol::CobitTau => 1,
            ResourceSymbol::QubitTau => 2,
            ResourceSymbol::CbitTau => 3,
            ResourceSymbol::Qubit => 4,
            ResourceSymbol::Cbit => 5,
            ResourceSymbol::Ebit => 6,
            ResourceSymbol::Rbit => 7,
            _ => 200,
        }
    }
}

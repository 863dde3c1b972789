//! Registered checks. Identifiers are part of the CLI and report interface.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a check is an established fact or depends on an open conjecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Unconditional,
    /// Holds if `log S_{n,c}` is convex.
    ConditionalOnLogConvexity,
    /// Open conjecture itself, or a statement conditional on one.
    Conjecture,
}

impl Status {
    pub fn is_conditional(self) -> bool {
        self != Status::Unconditional
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckId {
    SzaszEnergyBound,
    BesselBound,
    SzaszLogDerivativeEnvelope,
    SzaszEnergySquaredBound,
    BesselSquaredBound,
    BernsteinLogDerivativeUpper,
    LegendreRatioConditionalUpper,
    LegendreRatioLower,
    BernsteinLogDerivativeLower,
    LegendreRatioUpperA,
    LegendreRatioUpperB,
    LegendrePolyBoundA,
    LegendrePolyBoundB,
    LegendrePolyBoundOrdering,
    SzaszSquaredBoundSharper,
    BesselSquaredBoundSharper,
    ConditionalUpperSharper,
    CrossoverSignPattern,
    LogConvexity,
    EnvelopeEquivalence,
    DurrmeyerConvexity,
    DurrmeyerSymmetry,
    AxialConvexity,
    SquareEquivalence,
    Synchronicity,
}

pub struct CheckInfo {
    pub id: CheckId,
    pub name: &'static str,
    pub status: Status,
    pub statement: &'static str,
}

pub const REGISTRY: &[CheckInfo] = &[
    CheckInfo { id: CheckId::SzaszEnergyBound, name: "ineq-2.2", status: Status::Unconditional,
        statement: "K_n(x) <= 1/sqrt(4nx+1), x >= 0" },
    CheckInfo { id: CheckId::BesselBound, name: "ineq-2.4", status: Status::Unconditional,
        statement: "I0(x) <= e^x/sqrt(2x+1), x >= 0" },
    CheckInfo { id: CheckId::SzaszLogDerivativeEnvelope, name: "ineq-2.5", status: Status::ConditionalOnLogConvexity,
        statement: "z1(t) <= K_n'(t)/K_n(t) <= z2(t), t > 0" },
    CheckInfo { id: CheckId::SzaszEnergySquaredBound, name: "ineq-2.6", status: Status::ConditionalOnLogConvexity,
        statement: "K_n(x)^2 <= 2 exp(sqrt(1+(4nx)^2) - 1 - 4nx)/(sqrt(1+(4nx)^2) + 1)" },
    CheckInfo { id: CheckId::BesselSquaredBound, name: "ineq-2.7", status: Status::ConditionalOnLogConvexity,
        statement: "I0(x)^2 <= 2 exp(sqrt(1+4x^2) - 1)/(sqrt(1+4x^2) + 1)" },
    CheckInfo { id: CheckId::BernsteinLogDerivativeUpper, name: "ineq-2.10", status: Status::ConditionalOnLogConvexity,
        statement: "F_n'/F_n <= z2(x) on (0, 1/2)" },
    CheckInfo { id: CheckId::LegendreRatioConditionalUpper, name: "ineq-2.11", status: Status::ConditionalOnLogConvexity,
        statement: "P_n'/P_n <= (sqrt(4n^2(t^2-1) + w^2) - w)/(2(t^2-1)), w = t - sqrt(t^2-1), t > 1" },
    CheckInfo { id: CheckId::LegendreRatioLower, name: "ineq-2.12", status: Status::Unconditional,
        statement: "n(n+1)/(2t + (n-1)sqrt(t^2-1)) <= P_n'/P_n, t >= 1" },
    CheckInfo { id: CheckId::BernsteinLogDerivativeLower, name: "ineq-2.13", status: Status::Unconditional,
        statement: "-2nX'/(1 + (n-3)X) <= F_n'/F_n on [0, 1/2]" },
    CheckInfo { id: CheckId::LegendreRatioUpperA, name: "ineq-2.14", status: Status::Unconditional,
        statement: "P_n'/P_n <= 2n^2/(t + (2n-1)sqrt(t^2-1)), t >= 1" },
    CheckInfo { id: CheckId::LegendreRatioUpperB, name: "ineq-2.15", status: Status::Unconditional,
        statement: "P_n'/P_n <= n^2(2n+1)/((n+1)t + (2n^2-1)sqrt(t^2-1)), t >= 1" },
    CheckInfo { id: CheckId::LegendrePolyBoundA, name: "ineq-2.16", status: Status::Unconditional,
        statement: "P_n(t) <= integrated form of the second ratio bound" },
    CheckInfo { id: CheckId::LegendrePolyBoundB, name: "ineq-2.17", status: Status::Unconditional,
        statement: "P_n(t) <= integrated form of the first ratio bound, n >= 2" },
    CheckInfo { id: CheckId::LegendrePolyBoundOrdering, name: "ineq-2.16-vs-2.17", status: Status::Unconditional,
        statement: "the integrated second-ratio bound is below the integrated first-ratio bound" },
    CheckInfo { id: CheckId::SzaszSquaredBoundSharper, name: "cmp-2.6-vs-2.2", status: Status::Unconditional,
        statement: "2 exp(sqrt(1+(4nx)^2) - 1 - 4nx)/(sqrt(1+(4nx)^2) + 1) <= 1/(4nx+1)" },
    CheckInfo { id: CheckId::BesselSquaredBoundSharper, name: "cmp-2.7-vs-2.4", status: Status::Unconditional,
        statement: "2 exp(sqrt(1+4x^2) - 1)/(sqrt(1+4x^2) + 1) <= e^{2x}/(2x+1)" },
    CheckInfo { id: CheckId::ConditionalUpperSharper, name: "cmp-2.11-vs-2.14", status: Status::Unconditional,
        statement: "the conditional ratio bound is below 2n^2/(t + (2n-1)sqrt(t^2-1)), t > 1" },
    CheckInfo { id: CheckId::CrossoverSignPattern, name: "crossover-2.11-vs-2.15", status: Status::Unconditional,
        statement: "conditional ratio bound <= second ratio bound exactly on (1, t*]" },
    CheckInfo { id: CheckId::LogConvexity, name: "conj-C", status: Status::Conjecture,
        statement: "log S_{n,c} is convex" },
    CheckInfo { id: CheckId::EnvelopeEquivalence, name: "thm-2.1-envelope", status: Status::Unconditional,
        statement: "(log S)'' >= 0 iff z1 <= S'/S <= z2" },
    CheckInfo { id: CheckId::DurrmeyerConvexity, name: "conj-4.6", status: Status::Conjecture,
        statement: "the Durrmeyer coefficients c_{n,k} form a convex sequence" },
    CheckInfo { id: CheckId::DurrmeyerSymmetry, name: "durrmeyer-symmetry", status: Status::Unconditional,
        statement: "c_{n,2n-k} = c_{n,k}" },
    CheckInfo { id: CheckId::AxialConvexity, name: "axial-convexity", status: Status::Unconditional,
        statement: "R_n is convex on every segment parallel to a side of the triangle" },
    CheckInfo { id: CheckId::SquareEquivalence, name: "equivalence-3", status: Status::Conjecture,
        statement: "log F_n convex <=> Q_n convex <=> log Q_n convex (grid verdicts agree)" },
    CheckInfo { id: CheckId::Synchronicity, name: "synchronicity", status: Status::Unconditional,
        statement: "V, 1-S and -log S are monotone in the same direction between grid points" },
];

impl CheckId {
    pub fn info(self) -> &'static CheckInfo {
        REGISTRY
            .iter()
            .find(|c| c.id == self)
            .expect("every check id is registered")
    }

    pub fn name(self) -> &'static str {
        self.info().name
    }

    pub fn status(self) -> Status {
        self.info().status
    }

    pub fn all() -> impl Iterator<Item = CheckId> {
        REGISTRY.iter().map(|c| c.id)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        REGISTRY
            .iter()
            .find(|c| c.name == s)
            .map(|c| c.id)
            .ok_or_else(|| Error::Parse(format!("unknown check id '{s}'")))
    }
}

/// `all` or a comma-separated list of check ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSelector(Vec<CheckId>);

impl SuiteSelector {
    pub fn all() -> Self {
        Self(CheckId::all().collect())
    }

    pub fn only(ids: impl IntoIterator<Item = CheckId>) -> Self {
        let mut v: Vec<CheckId> = ids.into_iter().collect();
        v.sort();
        v.dedup();
        Self(v)
    }

    pub fn checks(&self) -> &[CheckId] {
        &self.0
    }
}

impl FromStr for SuiteSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(Self::all());
        }
        if s.is_empty() {
            return Err(Error::Parse("empty suite selector".into()));
        }
        let ids = s
            .split(',')
            .map(|part| part.trim().parse::<CheckId>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::only(ids))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_is_one_to_one() {
        let names: HashSet<_> = REGISTRY.iter().map(|c| c.name).collect();
        let ids: HashSet<_> = REGISTRY.iter().map(|c| c.id).collect();
        assert_eq!(names.len(), REGISTRY.len());
        assert_eq!(ids.len(), REGISTRY.len());
        for c in REGISTRY {
            assert_eq!(c.name.parse::<CheckId>().unwrap(), c.id);
        }
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("all".parse::<SuiteSelector>().unwrap().checks().len(), REGISTRY.len());
        let sel: SuiteSelector = "ineq-2.2, conj-C,ineq-2.2".parse().unwrap();
        assert_eq!(sel.checks(), &[CheckId::SzaszEnergyBound, CheckId::LogConvexity]);
        assert!("nonexistent-id".parse::<SuiteSelector>().is_err());
        assert!("".parse::<SuiteSelector>().is_err());
        assert!("ineq-2.2,".parse::<SuiteSelector>().is_err());
    }

    #[test]
    fn conditional_split() {
        let conditional: Vec<_> = REGISTRY
            .iter()
            .filter(|c| c.status.is_conditional())
            .map(|c| c.name)
            .collect();
        assert_eq!(
            conditional,
            vec!["ineq-2.5", "ineq-2.6", "ineq-2.7", "ineq-2.10", "ineq-2.11", "conj-C", "conj-4.6", "equivalence-3"]
        );
    }
}

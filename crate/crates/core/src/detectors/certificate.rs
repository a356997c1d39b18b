use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;
use crate::sets::FSSeed;

use super::ladder::Ladder;

/// A single checkable claim about a set. Certificates are lists of
/// obligations that must hold; a refutation carries one that must fail.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Obligation {
    /// Every listed element lies in the set.
    Contains { elements: Vec<Rat> },
    /// Some grid `a` in `(0, delta)` has `a + block` inside the set, and `a`
    /// itself in the set when `shifter_in_set`. An empty block asks only for
    /// such an `a`.
    Shifter {
        delta: Rat,
        block: Vec<Rat>,
        shifter_in_set: bool,
    },
    /// Every grid `s` in `(0, reach]` has `s + shift + t` in the set for some
    /// `t` in `translates`.
    Cover {
        reach: Rat,
        shift: Rat,
        translates: Vec<Rat>,
    },
    /// Every listed point `g` has `g + shift + t` in the set for some `t`.
    PointCover {
        points: Vec<Rat>,
        shift: Rat,
        translates: Vec<Rat>,
    },
    /// The subset sums of `terms` are pairwise distinct.
    Distinct { terms: Vec<Rat> },
}

/// Search limits in force when a verdict was reached.
pub type Caps = BTreeMap<String, u64>;

/// Exhaustive failure at the recorded caps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    /// 1-based rung (or level) at which the search space ran out.
    pub rung: usize,
    pub caps: Caps,
    /// Obligation that fails when replayed against the checked set.
    pub obligation: Obligation,
}

/// A search stopped by a node budget before it could decide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inconclusive {
    pub rung: usize,
    pub caps: Caps,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "lowercase")]
pub enum Verdict<C> {
    Certificate(C),
    Refutation(Refutation),
    Inconclusive(Inconclusive),
}

impl<C> Verdict<C> {
    pub fn certificate(&self) -> Option<&C> {
        match self {
            Verdict::Certificate(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_certificate(&self) -> bool {
        matches!(self, Verdict::Certificate(_))
    }

    pub fn is_refutation(&self) -> bool {
        matches!(self, Verdict::Refutation(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Certificate(_) => "certificate",
            Verdict::Refutation(_) => "refutation",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn map<D>(self, f: impl FnOnce(C) -> D) -> Verdict<D> {
        match self {
            Verdict::Certificate(c) => Verdict::Certificate(f(c)),
            Verdict::Refutation(r) => Verdict::Refutation(r),
            Verdict::Inconclusive(i) => Verdict::Inconclusive(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IPWitness {
    pub seed: FSSeed,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyndeticRung {
    pub epsilon: Rat,
    pub translates: Vec<Rat>,
    /// Largest grid point up to which the translates cover.
    pub delta: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyndeticCertificate {
    pub rungs: Vec<SyndeticRung>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrokenIpRung {
    pub delta: Rat,
    pub length: usize,
    pub shifter: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrokenIPCertificate {
    pub seed: FSSeed,
    pub rungs: Vec<BrokenIpRung>,
}

impl BrokenIPCertificate {
    pub fn ladder(&self) -> crate::error::Result<Ladder> {
        Ladder::from_pairs(
            &self
                .rungs
                .iter()
                .map(|r| (r.delta.clone(), r.length))
                .collect::<Vec<_>>(),
        )
    }
}

/// How a broken-syndetic base set was generated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseChoice {
    FullGrid,
    Pattern { period: u64, residues: Vec<u64> },
    /// Translates `t` whose return set `A - t` fills at least `theta` of
    /// every rung window.
    Dense { theta: Rat },
    /// Supplied by the caller (planted instances).
    Given,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PieceShift {
    pub piece: Vec<Rat>,
    pub shifter: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrokenSyndeticRung {
    pub delta: Rat,
    pub pieces: Vec<PieceShift>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrokenSyndeticCertificate {
    pub base: BaseChoice,
    pub base_elements: Vec<Rat>,
    pub syndetic: SyndeticCertificate,
    /// Pieces are drawn from the base inside `(0, piece_window]`.
    pub piece_window: Rat,
    pub piece_cap: usize,
    pub shifter_in_set: bool,
    pub rungs: Vec<BrokenSyndeticRung>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PwLevel {
    pub radius: Rat,
    pub translates: Vec<Rat>,
    /// Probes are tested on `G ∩ (0, inner)`.
    pub inner: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PwProbe {
    pub probe: Vec<Rat>,
    pub shift: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PwProbes {
    /// One shift serves every probe: the full inner windows are covered.
    Uniform { shift: Rat },
    /// One entry per maximal probe.
    PerProbe { entries: Vec<PwProbe> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PWSyndeticCertificate {
    pub levels: Vec<PwLevel>,
    /// Shifts are drawn from `(0, probe_radius)`.
    pub probe_radius: Rat,
    pub probe_budget: usize,
    pub probes: PwProbes,
}

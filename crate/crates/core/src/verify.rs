use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Model, ModelKind};
use crate::tree::DecisionTree;
use crate::universe::{Example, PartialExample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExplanationKind {
    /// Local abductive: fixing `A` to `e`'s values forces `e`'s class.
    LAxp,
    /// Local contrastive: changing only features in `A` can change the class.
    LCxp,
    /// Global abductive: every example agreeing with `tau` gets class `c`.
    GAxp,
    /// Global contrastive: no example agreeing with `tau` gets class `c`.
    GCxp,
}

impl ExplanationKind {
    pub const ALL: [ExplanationKind; 4] = [
        ExplanationKind::LAxp,
        ExplanationKind::LCxp,
        ExplanationKind::GAxp,
        ExplanationKind::GCxp,
    ];

    pub fn is_local(&self) -> bool {
        matches!(self, ExplanationKind::LAxp | ExplanationKind::LCxp)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExplanationKind::LAxp => "laxp",
            ExplanationKind::LCxp => "lcxp",
            ExplanationKind::GAxp => "gaxp",
            ExplanationKind::GCxp => "gcxp",
        }
    }
}

impl fmt::Display for ExplanationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExplanationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "laxp" => Ok(ExplanationKind::LAxp),
            "lcxp" => Ok(ExplanationKind::LCxp),
            "gaxp" => Ok(ExplanationKind::GAxp),
            "gcxp" => Ok(ExplanationKind::GCxp),
            other => Err(Error::InvalidQuery(format!(
                "unknown explanation kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Example(Example),
    Class(bool),
}

/// A local candidate is a sorted feature set, a global one a partial example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    Features(Vec<usize>),
    Partial(PartialExample),
}

impl Candidate {
    pub fn size(&self) -> usize {
        match self {
            Candidate::Features(a) => a.len(),
            Candidate::Partial(p) => p.size(),
        }
    }

    pub fn features(&self) -> Vec<usize> {
        match self {
            Candidate::Features(a) => a.clone(),
            Candidate::Partial(p) => p.domain(),
        }
    }

    /// The candidate with `feature` dropped.
    pub fn without(&self, feature: usize) -> Candidate {
        match self {
            Candidate::Features(a) => {
                Candidate::Features(a.iter().copied().filter(|&f| f != feature).collect())
            }
            Candidate::Partial(p) => Candidate::Partial(p.without(feature)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationQuery {
    pub kind: ExplanationKind,
    pub target: Target,
    pub candidate: Candidate,
}

impl ExplanationQuery {
    pub fn new(kind: ExplanationKind, target: Target, candidate: Candidate) -> Result<Self> {
        let shape_ok = match (&target, &candidate) {
            (Target::Example(_), Candidate::Features(_)) => kind.is_local(),
            (Target::Class(_), Candidate::Partial(_)) => !kind.is_local(),
            _ => false,
        };
        if !shape_ok {
            return Err(Error::InvalidQuery(format!(
                "{kind} needs {}",
                if kind.is_local() {
                    "an example target and a feature-set candidate"
                } else {
                    "a class target and a partial-example candidate"
                }
            )));
        }
        let mut candidate = candidate;
        if let Candidate::Features(a) = &mut candidate {
            a.sort_unstable();
            a.dedup();
        }
        Ok(ExplanationQuery {
            kind,
            target,
            candidate,
        })
    }

    pub fn local(kind: ExplanationKind, e: Example, set: Vec<usize>) -> Result<Self> {
        Self::new(kind, Target::Example(e), Candidate::Features(set))
    }

    pub fn global(kind: ExplanationKind, c: bool, tau: PartialExample) -> Result<Self> {
        Self::new(kind, Target::Class(c), Candidate::Partial(tau))
    }

    fn check_against(&self, model: &Model) -> Result<()> {
        let n = model.num_features();
        if let Target::Example(e) = &self.target {
            model.check_example(e)?;
        }
        match &self.candidate {
            Candidate::Features(a) => {
                if let Some(&f) = a.iter().find(|&&f| f >= n) {
                    return Err(Error::FeatureOutOfRange { index: f, len: n });
                }
            }
            Candidate::Partial(p) => {
                if p.len() != n {
                    return Err(Error::UniverseMismatch {
                        expected: n,
                        found: p.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Limits for exhaustive enumeration. Exceeding one is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteCaps {
    /// Free features enumerated by the generic verifier.
    pub verify_free: usize,
    /// Universe size for the oracle on local kinds.
    pub oracle_local: usize,
    /// Universe size for the oracle on global kinds.
    pub oracle_global: usize,
    /// Free IN gates for circuit checks.
    pub circuit: usize,
}

impl Default for BruteCaps {
    fn default() -> Self {
        BruteCaps {
            verify_free: 24,
            oracle_local: 16,
            oracle_global: 12,
            circuit: 24,
        }
    }
}

pub const BRUTE_CAP_ENV: &str = "XPLAIN_BRUTE_CAP";

impl BruteCaps {
    /// All caps set to one value.
    pub fn uniform(cap: usize) -> Self {
        BruteCaps {
            verify_free: cap,
            oracle_local: cap,
            oracle_global: cap,
            circuit: cap,
        }
    }

    /// Defaults, or a uniform override from `XPLAIN_BRUTE_CAP`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BRUTE_CAP_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&c| c < 40)
                .map(Self::uniform)
                .ok_or_else(|| {
                    Error::Format(format!("{BRUTE_CAP_ENV} must be an integer below 40"))
                }),
            Err(_) => Ok(Self::default()),
        }
    }
}

/// `e_A`: `e` with every feature of `set` flipped.
pub fn flip(e: &Example, set: &[usize]) -> Example {
    e.flipped(set)
}

/// The tree restricted to examples extending `tau`.
pub fn restrict_dt(t: &DecisionTree, tau: &PartialExample) -> DecisionTree {
    t.restrict(tau)
}

pub fn verify(model: &Model, q: &ExplanationQuery) -> Result<bool> {
    verify_with(model, q, &BruteCaps::default())
}

/// Decision trees use the restriction test, every other family brute force.
pub fn verify_with(model: &Model, q: &ExplanationQuery, caps: &BruteCaps) -> Result<bool> {
    q.check_against(model)?;
    match model.kind() {
        ModelKind::Tree(t) => Ok(verify_dt(&t.normalized(), q)),
        _ => verify_brute(model, q, caps),
    }
}

/// Restriction-based check on a normalized tree.
pub fn verify_dt(t: &DecisionTree, q: &ExplanationQuery) -> bool {
    match (&q.kind, &q.target, &q.candidate) {
        (ExplanationKind::LAxp, Target::Example(e), Candidate::Features(a)) => {
            let class = t.classify(e.bits());
            let (has0, has1) = t.reachable_classes(&e.restrict(a));
            if class {
                !has0
            } else {
                !has1
            }
        }
        (ExplanationKind::LCxp, Target::Example(e), Candidate::Features(a)) => {
            let class = t.classify(e.bits());
            t.paths().iter().any(|p| {
                p.class != class
                    && p.conflicts(e.bits())
                        .iter()
                        .all(|f| a.binary_search(f).is_ok())
            })
        }
        (ExplanationKind::GAxp, Target::Class(c), Candidate::Partial(tau)) => {
            let (has0, has1) = t.reachable_classes(tau);
            if *c {
                !has0
            } else {
                !has1
            }
        }
        (ExplanationKind::GCxp, Target::Class(c), Candidate::Partial(tau)) => {
            let (has0, has1) = t.reachable_classes(tau);
            if *c {
                !has1
            } else {
                !has0
            }
        }
        _ => unreachable!("query shape validated at construction"),
    }
}

/// Direct check of the definitions by enumerating completions (or flips for
/// lCXp).
pub fn verify_brute(model: &Model, q: &ExplanationQuery, caps: &BruteCaps) -> Result<bool> {
    q.check_against(model)?;
    match (&q.kind, &q.target, &q.candidate) {
        (ExplanationKind::LAxp, Target::Example(e), Candidate::Features(a)) => {
            let class = model.classify_bits(e.bits());
            all_completions(model, &e.restrict(a), class, caps)
        }
        (ExplanationKind::LCxp, Target::Example(e), Candidate::Features(a)) => {
            if a.len() > caps.verify_free {
                return Err(Error::CapExceeded {
                    what: "lCXp verification",
                    size: a.len(),
                    cap: caps.verify_free,
                });
            }
            let class = model.classify_bits(e.bits());
            Ok((1u64..1u64 << a.len()).into_par_iter().any(|mask| {
                let mut bits = e.bits().to_vec();
                for (i, &f) in a.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        bits[f] = !bits[f];
                    }
                }
                model.classify_bits(&bits) != class
            }))
        }
        (ExplanationKind::GAxp, Target::Class(c), Candidate::Partial(tau)) => {
            all_completions(model, tau, *c, caps)
        }
        (ExplanationKind::GCxp, Target::Class(c), Candidate::Partial(tau)) => {
            all_completions(model, tau, !*c, caps)
        }
        _ => unreachable!("query shape validated at construction"),
    }
}

/// Whether every completion of `tau` is classified `class`.
pub(crate) fn all_completions(
    model: &Model,
    tau: &PartialExample,
    class: bool,
    caps: &BruteCaps,
) -> Result<bool> {
    let free = tau.free();
    if free.len() > caps.verify_free {
        return Err(Error::CapExceeded {
            what: "verification",
            size: free.len(),
            cap: caps.verify_free,
        });
    }
    let base = tau.complete_with(&Example::zeros(tau.len()));
    let check = |mask: u64| {
        let mut bits = base.bits().to_vec();
        for (i, &f) in free.iter().enumerate() {
            bits[f] = (mask >> i) & 1 == 1;
        }
        model.classify_bits(&bits) == class
    };
    if free.len() <= 10 {
        Ok((0..1u64 << free.len()).all(check))
    } else {
        Ok((0..1u64 << free.len()).into_par_iter().all(check))
    }
}

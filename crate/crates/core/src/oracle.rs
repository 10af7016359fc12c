//! Exhaustive ground truth. Everything here works from the full truth table
//! of a model and shares no code with the explanation algorithms.

use rayon::prelude::*;

use crate::enumerate::{assignment, combination_count, subsets_by_size, Combinations};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::universe::{Example, PartialExample};
use crate::verify::{
    verify_brute, verify_with, BruteCaps, Candidate, ExplanationKind, ExplanationQuery, Target,
};

/// Minimum explanation size and the first witness of that size in the
/// canonical order, or `None` for both when no explanation exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub size: Option<usize>,
    pub witness: Option<Candidate>,
}

impl OracleResult {
    fn none() -> Self {
        OracleResult {
            size: None,
            witness: None,
        }
    }

    fn found(c: Candidate) -> Self {
        OracleResult {
            size: Some(c.size()),
            witness: Some(c),
        }
    }
}

/// Class of every example, indexed by mask (bit `i` = feature `i`).
pub fn truth_table(model: &Model) -> Vec<bool> {
    let n = model.num_features();
    (0..1u64 << n)
        .into_par_iter()
        .map(|mask| model.classify_bits(Example::from_mask(n, mask).bits()))
        .collect()
}

fn check_target(model: &Model, kind: ExplanationKind, target: &Target) -> Result<()> {
    match (kind.is_local(), target) {
        (true, Target::Example(e)) => model.check_example(e),
        (false, Target::Class(_)) => Ok(()),
        _ => Err(Error::InvalidQuery(format!("target does not match {kind}"))),
    }
}

pub fn oracle_min(model: &Model, kind: ExplanationKind, target: &Target) -> Result<OracleResult> {
    oracle_min_with(model, kind, target, &BruteCaps::default())
}

pub fn oracle_min_with(
    model: &Model,
    kind: ExplanationKind,
    target: &Target,
    caps: &BruteCaps,
) -> Result<OracleResult> {
    check_target(model, kind, target)?;
    let n = model.num_features();
    let cap = if kind.is_local() {
        caps.oracle_local
    } else {
        caps.oracle_global
    };
    if n > cap {
        return Err(Error::CapExceeded {
            what: "oracle",
            size: n,
            cap,
        });
    }
    let table = truth_table(model);
    match target {
        Target::Example(e) => Ok(local_min(&table, n, kind, e)),
        Target::Class(c) => Ok(global_min(&table, n, kind, *c)),
    }
}

fn local_min(table: &[bool], n: usize, kind: ExplanationKind, e: &Example) -> OracleResult {
    let full = (1u64 << n) - 1;
    let emask = e.to_mask();
    let class = table[emask as usize];
    // reach[s]: some differently classified example differs from e only
    // inside s
    let mut reach: Vec<bool> = (0..1u64 << n)
        .map(|d| table[(d ^ emask) as usize] != class)
        .collect();
    for i in 0..n {
        let bit = 1usize << i;
        for s in 0..reach.len() {
            if s & bit != 0 && reach[s ^ bit] {
                reach[s] = true;
            }
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let found = subsets_by_size(&all, n).find(|a| {
        let mask = a.iter().fold(0u64, |m, &f| m | (1 << f));
        match kind {
            ExplanationKind::LAxp => !reach[(full & !mask) as usize],
            ExplanationKind::LCxp => reach[mask as usize],
            _ => unreachable!(),
        }
    });
    found.map_or_else(OracleResult::none, |a| {
        OracleResult::found(Candidate::Features(a))
    })
}

/// For each partial example, encoded in base 3 with digit 2 meaning
/// unassigned, whether some completion has class 0 (bit 0) and class 1
/// (bit 1).
fn ternary_table(table: &[bool], n: usize) -> Vec<u8> {
    let pow: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
    let mut flags = vec![0u8; pow[n]];
    for s in 0..pow[n] {
        let mut rest = s;
        let mut mask = 0usize;
        let mut free = None;
        for (i, p) in pow.iter().take(n).enumerate() {
            let d = rest % 3;
            rest /= 3;
            match d {
                2 => {
                    free = Some(*p);
                    break;
                }
                1 => mask |= 1 << i,
                _ => {}
            }
        }
        flags[s] = match free {
            Some(p) => flags[s - 2 * p] | flags[s - p],
            None => 1u8 << (table[mask] as u8),
        };
    }
    flags
}

fn global_min(table: &[bool], n: usize, kind: ExplanationKind, c: bool) -> OracleResult {
    let flags = ternary_table(table, n);
    let want = match kind {
        ExplanationKind::GAxp => 1u8 << c as u8,
        ExplanationKind::GCxp => 1u8 << !c as u8,
        _ => unreachable!(),
    };
    let all_free: usize = 3usize.pow(n as u32) - 1;
    let all: Vec<usize> = (0..n).collect();
    for a in subsets_by_size(&all, n) {
        let pow: Vec<usize> = a.iter().map(|&f| 3usize.pow(f as u32)).collect();
        for index in 0..1u64 << a.len() {
            let values: Vec<bool> = assignment(a.len(), index).collect();
            // start from all-free and lower the assigned digits
            let mut s = all_free;
            for (p, &v) in pow.iter().zip(&values) {
                s -= if v { *p } else { 2 * p };
            }
            if flags[s] == want {
                let tau = PartialExample::from_pairs(n, a.iter().copied().zip(values))
                    .expect("distinct features");
                return OracleResult::found(Candidate::Partial(tau));
            }
        }
    }
    OracleResult::none()
}

/// Whether `candidate` is an explanation from which no single feature can be
/// dropped. Uses the brute-force verifier only.
pub fn oracle_subset_min_check(
    model: &Model,
    kind: ExplanationKind,
    target: &Target,
    candidate: &Candidate,
) -> Result<bool> {
    oracle_subset_min_check_with(model, kind, target, candidate, &BruteCaps::default())
}

pub fn oracle_subset_min_check_with(
    model: &Model,
    kind: ExplanationKind,
    target: &Target,
    candidate: &Candidate,
    caps: &BruteCaps,
) -> Result<bool> {
    let query = |c: Candidate| ExplanationQuery::new(kind, target.clone(), c);
    if !verify_brute(model, &query(candidate.clone())?, caps)? {
        return Ok(false);
    }
    for f in candidate.features() {
        if verify_brute(model, &query(candidate.without(f))?, caps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy shrink of `seed`: drop features in ascending index order while
/// the candidate still verifies. Explanations of every kind are closed
/// under adding features, so one pass gives an inclusion-minimal result.
pub fn greedy_shrink(
    model: &Model,
    kind: ExplanationKind,
    target: &Target,
    seed: Candidate,
    caps: &BruteCaps,
) -> Result<Candidate> {
    let mut current = seed;
    for f in current.features() {
        let smaller = current.without(f);
        let q = ExplanationQuery::new(kind, target.clone(), smaller.clone())?;
        if verify_with(model, &q, caps)? {
            current = smaller;
        }
    }
    Ok(current)
}

/// Inclusion-minimal explanation for any model family by greedy shrinking
/// from a trivially valid seed, or `None` if no explanation exists.
pub fn oracle_subset_min(
    model: &Model,
    kind: ExplanationKind,
    target: &Target,
    caps: &BruteCaps,
) -> Result<Option<Candidate>> {
    check_target(model, kind, target)?;
    let n = model.num_features();
    let all: Vec<usize> = (0..n).collect();
    let seed = match (kind, target) {
        (ExplanationKind::LAxp, _) => Candidate::Features(all),
        (ExplanationKind::LCxp, Target::Example(e)) => {
            let q = ExplanationQuery::local(kind, e.clone(), all.clone())?;
            if !verify_with(model, &q, caps)? {
                return Ok(None);
            }
            Candidate::Features(all)
        }
        (_, Target::Class(c)) => {
            let wanted = if kind == ExplanationKind::GAxp {
                *c
            } else {
                !*c
            };
            match first_with_class(model, wanted, caps)? {
                Some(e) => Candidate::Partial(e.as_partial()),
                None => return Ok(None),
            }
        }
        _ => unreachable!("target checked"),
    };
    greedy_shrink(model, kind, target, seed, caps).map(Some)
}

/// First example in mask order with the given class.
pub fn first_with_class(model: &Model, class: bool, caps: &BruteCaps) -> Result<Option<Example>> {
    let n = model.num_features();
    if n > caps.verify_free {
        return Err(Error::CapExceeded {
            what: "example search",
            size: n,
            cap: caps.verify_free,
        });
    }
    Ok((0..1u64 << n)
        .into_par_iter()
        .find_first(|&mask| model.classify_bits(Example::from_mask(n, mask).bits()) == class)
        .map(|mask| Example::from_mask(n, mask)))
}

/// An example classified differently from the all-zero example, first in
/// mask order.
pub fn hom_witness(model: &Model, caps: &BruteCaps) -> Result<Option<Example>> {
    let n = model.num_features();
    let base = model.classify_bits(&vec![false; n]);
    first_with_class(model, !base, caps)
}

/// As [`hom_witness`] over examples with at most `k` ones, by increasing
/// weight then lexicographic position of the ones.
pub fn phom_witness(model: &Model, k: usize, caps: &BruteCaps) -> Result<Option<Example>> {
    let n = model.num_features();
    let k = k.min(n);
    let total: u128 = (0..=k).map(|w| combination_count(n, w)).sum();
    if total > 1u128 << caps.verify_free {
        return Err(Error::CapExceeded {
            what: "p-HOM search",
            size: k,
            cap: caps.verify_free,
        });
    }
    let base = model.classify_bits(&vec![false; n]);
    for w in 0..=k {
        for ones in Combinations::new(n, w) {
            let mut e = Example::zeros(n);
            for f in ones {
                e.set(f, true);
            }
            if model.classify_bits(e.bits()) != base {
                return Ok(Some(e));
            }
        }
    }
    Ok(None)
}

use crate::ensemble::{Ensemble, Members};
use crate::enumerate::subsets_by_size;
use crate::error::{Error, Result};
use crate::model::{Model, ModelKind};
use crate::oracle::greedy_shrink;
use crate::rules::{DecisionList, DecisionSet, Rule, Term};
use crate::universe::Example;
use crate::verify::{BruteCaps, Candidate, ExplanationKind, Target};

/// One `1 - b` rule per term, in order, then the empty `b` rule.
pub fn ds_to_dl(s: &DecisionSet) -> DecisionList {
    let b = s.default_class();
    let mut rules: Vec<Rule> = s.terms().iter().map(|t| Rule::new(t.clone(), !b)).collect();
    rules.push(Rule::new(Term::empty(), b));
    DecisionList::new(rules).expect("last rule is empty")
}

/// Search-tree size for one target rule (or rule tuple).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetStats {
    /// Target rule index per element (a single entry for one list).
    pub rules: Vec<usize>,
    /// Terminal nodes of the search tree.
    pub leaves: u64,
    /// `max(term_size, 1)^k`.
    pub bound: u128,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BranchStats {
    pub targets: Vec<TargetStats>,
}

impl BranchStats {
    pub fn within_bound(&self) -> bool {
        self.targets.iter().all(|t| t.leaves as u128 <= t.bound)
    }
}

fn leaf_bound(term_size: usize, k: usize) -> u128 {
    (term_size.max(1) as u128).saturating_pow(k.min(u32::MAX as usize) as u32)
}

fn better(candidate: &[usize], best: &Option<Vec<usize>>) -> bool {
    match best {
        None => true,
        Some(b) => (candidate.len(), candidate) < (b.len(), b.as_slice()),
    }
}

fn union_sorted(a: &[usize], f: usize) -> Vec<usize> {
    let mut out = a.to_vec();
    if let Err(pos) = out.binary_search(&f) {
        out.insert(pos, f);
    }
    out
}

/// Branching state shared by the single-list and ensemble searches.
struct Search<'a> {
    lists: &'a [DecisionList],
    /// Chosen target rule per list.
    targets: Vec<usize>,
    /// Features of the target terms, sorted.
    forbidden: Vec<usize>,
    e: &'a Example,
    k: usize,
    leaves: u64,
    best: Option<Vec<usize>>,
}

impl Search<'_> {
    /// First list (smallest index) with a rule before its target satisfied by
    /// `bits`, and the smallest such rule.
    fn blocking_rule(&self, bits: &[bool]) -> Option<&Term> {
        self.lists.iter().zip(&self.targets).find_map(|(l, &j)| {
            l.rules()[..j]
                .iter()
                .find(|r| r.term.applies(bits))
                .map(|r| &r.term)
        })
    }

    fn run(&mut self, flips: Vec<usize>) {
        let limit = match &self.best {
            Some(b) => self.k.min(b.len()),
            None => self.k,
        };
        if flips.len() > limit {
            self.leaves += 1;
            return;
        }
        let flipped = self.e.flipped(&flips);
        let Some(term) = self.blocking_rule(flipped.bits()) else {
            self.leaves += 1;
            if better(&flips, &self.best) {
                self.best = Some(flips);
            }
            return;
        };
        if flips.len() == limit {
            self.leaves += 1;
            return;
        }
        let breakable: Vec<usize> = term
            .features()
            .filter(|f| flips.binary_search(f).is_err() && self.forbidden.binary_search(f).is_err())
            .collect();
        if breakable.is_empty() {
            self.leaves += 1;
            return;
        }
        for f in breakable {
            self.run(union_sorted(&flips, f));
        }
    }
}

/// Conflicts of `e` with the chosen terms and their features, or `None` when
/// two chosen terms disagree on a feature (no example satisfies both).
fn seed(
    lists: &[DecisionList],
    targets: &[usize],
    e: &Example,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut required: Vec<(usize, bool)> = Vec::new();
    for (l, &j) in lists.iter().zip(targets) {
        for lit in l.rules()[j].term.literals() {
            required.push((lit.feature, lit.value));
        }
    }
    required.sort_unstable();
    required.dedup();
    if required.windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    let forbidden: Vec<usize> = required.iter().map(|&(f, _)| f).collect();
    let conflicts: Vec<usize> = required
        .iter()
        .filter(|&&(f, b)| e.get(f) != b)
        .map(|&(f, _)| f)
        .collect();
    Some((conflicts, forbidden))
}

fn search_targets<I>(
    lists: &[DecisionList],
    tuples: I,
    e: &Example,
    k: usize,
) -> (Option<Vec<usize>>, BranchStats)
where
    I: IntoIterator<Item = Vec<usize>>,
{
    let term_size = lists.iter().map(DecisionList::term_size).max().unwrap_or(0);
    let mut best: Option<Vec<usize>> = None;
    let mut stats = BranchStats::default();
    for targets in tuples {
        let Some((conflicts, forbidden)) = seed(lists, &targets, e) else {
            continue;
        };
        let mut search = Search {
            lists,
            targets: targets.clone(),
            forbidden,
            e,
            k,
            leaves: 0,
            best: best.clone(),
        };
        search.run(conflicts);
        stats.targets.push(TargetStats {
            rules: targets,
            leaves: search.leaves,
            bound: leaf_bound(term_size, k),
        });
        best = search.best;
    }
    (best, stats)
}

/// Minimum local contrastive explanation of size at most `k` for a decision
/// list, by bounded branching per opposite-class target rule. Ties go to
/// the lexicographically smallest feature set.
pub fn lcxp_card_branch(l: &DecisionList, e: &Example, k: usize) -> Option<Vec<usize>> {
    lcxp_card_branch_stats(l, e, k).0
}

pub fn lcxp_card_branch_stats(
    l: &DecisionList,
    e: &Example,
    k: usize,
) -> (Option<Vec<usize>>, BranchStats) {
    let class = l.classify(e.bits());
    let tuples = (0..l.len())
        .filter(|&j| l.rules()[j].class != class)
        .map(|j| vec![j]);
    search_targets(std::slice::from_ref(l), tuples, e, k)
}

fn ensemble_lists(ens: &Ensemble) -> Result<Vec<DecisionList>> {
    match ens.members() {
        Members::Lists(v) => Ok(v.clone()),
        Members::Sets(v) => Ok(v.iter().map(ds_to_dl).collect()),
        Members::Trees(_) => Err(Error::InvalidQuery(
            "rule branching needs an ensemble of decision lists or sets".into(),
        )),
    }
}

/// As [`lcxp_card_branch`] for a majority ensemble of lists or sets: one
/// search per tuple of target rules whose classes outvote the current class.
pub fn lcxp_card_branch_ens(ens: &Ensemble, e: &Example, k: usize) -> Result<Option<Vec<usize>>> {
    Ok(lcxp_card_branch_ens_stats(ens, e, k)?.0)
}

pub fn lcxp_card_branch_ens_stats(
    ens: &Ensemble,
    e: &Example,
    k: usize,
) -> Result<(Option<Vec<usize>>, BranchStats)> {
    let lists = ensemble_lists(ens)?;
    let class = ens.classify(e.bits());
    let sizes: Vec<usize> = lists.iter().map(DecisionList::len).collect();
    let total: usize = sizes.iter().product();
    let lists_ref = &lists;
    let tuples = (0..total).filter_map(move |mut index| {
        let mut tuple = Vec::with_capacity(sizes.len());
        for &s in &sizes {
            tuple.push(index % s);
            index /= s;
        }
        let against = lists_ref
            .iter()
            .zip(&tuple)
            .filter(|(l, &j)| l.rules()[j].class != class)
            .count();
        (against > lists_ref.len() - against).then_some(tuple)
    });
    Ok(search_targets(&lists, tuples, e, k))
}

/// Smallest feature set of size at most `k` whose flip changes the class,
/// by plain enumeration in the canonical order.
pub fn lcxp_card_enum(model: &Model, e: &Example, k: usize) -> Result<Option<Vec<usize>>> {
    model.check_example(e)?;
    let class = model.classify_bits(e.bits());
    let all: Vec<usize> = (0..e.len()).collect();
    let found =
        subsets_by_size(&all, k).find(|a| model.classify_bits(e.flipped(a).bits()) != class);
    Ok(found)
}

/// Inclusion-minimal local abductive explanation for a decision set or list,
/// by greedy shrinking over the brute-force verifier.
pub fn laxp_rules_subset_min(model: &Model, e: &Example, caps: &BruteCaps) -> Result<Vec<usize>> {
    if !matches!(model.kind(), ModelKind::Set(_) | ModelKind::List(_)) {
        return Err(Error::InvalidQuery(
            "laxp_rules_subset_min needs a decision set or list".into(),
        ));
    }
    model.check_example(e)?;
    let n = model.num_features();
    if n > caps.verify_free {
        return Err(Error::CapExceeded {
            what: "rule lAXp",
            size: n,
            cap: caps.verify_free,
        });
    }
    let seed = Candidate::Features((0..n).collect());
    let target = Target::Example(e.clone());
    Ok(greedy_shrink(model, ExplanationKind::LAxp, &target, seed, caps)?.features())
}

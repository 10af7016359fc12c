//! Seeded generators for test and benchmark models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitBuilder, GateKind};
use crate::ensemble::{Ensemble, Family, Members};
use crate::rules::{DecisionList, DecisionSet, Rule, Term};
use crate::tree::{DecisionTree, TreeBuilder};
use crate::universe::{Example, PartialExample};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn example<R: Rng>(rng: &mut R, n: usize) -> Example {
    Example::new((0..n).map(|_| rng.gen()).collect())
}

/// Each feature assigned with probability one half.
pub fn partial<R: Rng>(rng: &mut R, n: usize) -> PartialExample {
    let mut p = PartialExample::empty(n);
    for f in 0..n {
        if rng.gen_bool(0.5) {
            p.assign(f, rng.gen());
        }
    }
    p
}

/// Random tree of depth at most `max_depth`. Features may repeat along a
/// path, so the result is not necessarily normalized.
pub fn tree<R: Rng>(rng: &mut R, n: usize, max_depth: usize) -> DecisionTree {
    fn grow<R: Rng>(rng: &mut R, b: &mut TreeBuilder, n: usize, depth: usize) -> usize {
        if n == 0 || depth == 0 || rng.gen_bool(0.25) {
            return b.leaf(rng.gen());
        }
        let f = rng.gen_range(0..n);
        let zero = grow(rng, b, n, depth - 1);
        let one = grow(rng, b, n, depth - 1);
        b.inner(f, zero, one)
    }
    let mut b = TreeBuilder::new();
    let root = grow(rng, &mut b, n, max_depth);
    b.finish(root)
}

pub fn term<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> Term {
    let mut fs: Vec<usize> = (0..n).collect();
    fs.shuffle(rng);
    let len = rng.gen_range(1..=max_len.min(n).max(1)).min(n);
    Term::from_pairs(fs[..len].iter().map(|&f| (f, rng.gen()))).expect("distinct features")
}

pub fn set<R: Rng>(rng: &mut R, n: usize, max_terms: usize, max_len: usize) -> DecisionSet {
    let count = if n == 0 {
        0
    } else {
        rng.gen_range(0..=max_terms)
    };
    let terms = (0..count).map(|_| term(rng, n, max_len)).collect();
    DecisionSet::new(terms, rng.gen())
}

pub fn list<R: Rng>(rng: &mut R, n: usize, max_rules: usize, max_len: usize) -> DecisionList {
    let count = if n == 0 {
        0
    } else {
        rng.gen_range(0..max_rules.max(1))
    };
    let mut rules: Vec<Rule> = (0..count)
        .map(|_| Rule::new(term(rng, n, max_len), rng.gen()))
        .collect();
    rules.push(Rule::new(Term::empty(), rng.gen()));
    DecisionList::new(rules).expect("last rule is empty")
}

/// Odd ensemble with `size` elements (rounded up to odd).
pub fn ensemble<R: Rng>(rng: &mut R, family: Family, n: usize, size: usize) -> Ensemble {
    let size = size.max(1) | 1;
    let members = match family {
        Family::Tree => Members::Trees((0..size).map(|_| tree(rng, n, 4)).collect()),
        Family::Set => Members::Sets((0..size).map(|_| set(rng, n, 4, 3)).collect()),
        Family::List => Members::Lists((0..size).map(|_| list(rng, n, 5, 3)).collect()),
    };
    Ensemble::new(members).expect("odd size")
}

/// Random circuit with roughly `inner` internal gates; all sinks are joined
/// by the output gate.
pub fn circuit<R: Rng>(rng: &mut R, n: usize, inner: usize) -> Circuit {
    assert!(n > 0, "a circuit needs at least one feature");
    let mut b = CircuitBuilder::new();
    let mut pool: Vec<usize> = Vec::new();
    for _ in 0..inner.max(1) {
        let pick = |rng: &mut R, b: &mut CircuitBuilder, pool: &[usize]| {
            if pool.is_empty() || rng.gen_bool(0.5) {
                let f = rng.gen_range(0..n);
                b.literal(f, rng.gen())
            } else {
                *pool.choose(rng).expect("non-empty pool")
            }
        };
        let g = match rng.gen_range(0..4) {
            0 => {
                let i = pick(rng, &mut b, &pool);
                b.add(GateKind::Not, vec![i])
            }
            k => {
                let arity = rng.gen_range(1..=3);
                let mut ins: Vec<usize> = (0..arity).map(|_| pick(rng, &mut b, &pool)).collect();
                ins.sort_unstable();
                ins.dedup();
                let kind = match k {
                    1 => GateKind::And,
                    2 => GateKind::Or,
                    _ => GateKind::Maj(rng.gen_range(1..=ins.len())),
                };
                b.add(kind, ins)
            }
        };
        pool.push(g);
    }
    let mut used = vec![false; b.len()];
    for g in b.gates() {
        for &i in &g.inputs {
            used[i] = true;
        }
    }
    let sinks: Vec<usize> = (0..b.len()).filter(|&g| !used[g]).collect();
    let kind = match rng.gen_range(0..3) {
        0 => GateKind::And,
        1 => GateKind::Or,
        _ => GateKind::Maj(rng.gen_range(1..=sinks.len())),
    };
    let out = b.add(kind, sinks);
    b.finish(out).expect("generated circuit is well formed")
}

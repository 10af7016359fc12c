use std::fmt;

use serde::Serialize;

use crate::circuit::{Circuit, CircuitBuilder, GateKind};
use crate::ensemble::{Ensemble, Members};
use crate::error::{Error, Result};
use crate::explain_rules::ds_to_dl;
use crate::model::{Model, ModelKind};
use crate::rules::DecisionList;
use crate::tree::DecisionTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFormula {
    /// `3 * 2^MNL`
    Tree,
    /// `3 * 2^(sum of MNL)`
    TreeEnsemble,
    /// `3 * 2^(3 |L|)`
    List,
    /// `3 * 2^(3 sum |L|)`
    ListEnsemble,
}

/// Gate-deletion set plus the closed-form rank-width bound `3 * 2^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WidthCertificate {
    pub deletion: Vec<usize>,
    pub exponent: usize,
    pub formula: BoundFormula,
}

impl WidthCertificate {
    /// `3 * 2^exponent`, if it fits.
    pub fn bound(&self) -> Option<u128> {
        1u128.checked_shl(self.exponent as u32)?.checked_mul(3)
    }

    /// Whether deleting the certificate gates, the IN gates, the NOT gates
    /// reading an IN gate, and the output leaves an acyclic undirected graph.
    pub fn leaves_forest(&self, c: &Circuit) -> bool {
        let mut removed = vec![false; c.gates().len()];
        for &g in &self.deletion {
            removed[g] = true;
        }
        for &(_, g) in c.inputs() {
            removed[g] = true;
        }
        for (id, gate) in c.gates().iter().enumerate() {
            if gate.kind == GateKind::Not && c.gates()[gate.inputs[0]].kind == GateKind::In {
                removed[id] = true;
            }
        }
        removed[c.output()] = true;
        c.is_forest_without(&removed)
    }
}

impl fmt::Display for WidthCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "3*2^{} with |K| = {}",
            self.exponent,
            self.deletion.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub circuit: Circuit,
    pub certificate: WidthCertificate,
}

/// Feature used to build constant gates.
fn anchor(features: &[usize], n: usize) -> Result<usize> {
    match features.first() {
        Some(&f) => Ok(f),
        None if n > 0 => Ok(0),
        None => Err(Error::InvalidCircuit(
            "a constant gate needs at least one feature in the universe".into(),
        )),
    }
}

/// Circuit part true iff the tree says `c`; returns the part's output and
/// its per-leaf AND gates.
fn tree_part(
    b: &mut CircuitBuilder,
    t: &DecisionTree,
    c: bool,
    n: usize,
) -> Result<(usize, Vec<usize>)> {
    let minority = t.class_count(true) < t.class_count(false);
    let mut ands = Vec::new();
    for p in t.paths().into_iter().filter(|p| p.class == minority) {
        let g = if p.literals.is_empty() {
            b.constant(true, anchor(&t.features(), n)?)
        } else {
            let ins = p.literals.iter().map(|&(f, v)| b.literal(f, v)).collect();
            b.add(GateKind::And, ins)
        };
        ands.push(g);
    }
    let o = if ands.is_empty() {
        b.constant(false, anchor(&t.features(), n)?)
    } else {
        b.add(GateKind::Or, ands.clone())
    };
    let out = if minority == c {
        o
    } else {
        b.add(GateKind::Not, vec![o])
    };
    Ok((out, ands))
}

fn list_features(l: &DecisionList) -> Vec<usize> {
    let mut fs: Vec<usize> = l.rules().iter().flat_map(|r| r.term.features()).collect();
    fs.sort_unstable();
    fs.dedup();
    fs
}

/// Circuit part true iff the list says `c`; returns the part's output and
/// every other gate it created apart from IN gates and their negations.
fn list_part(
    b: &mut CircuitBuilder,
    l: &DecisionList,
    c: bool,
    n: usize,
) -> Result<(usize, Vec<usize>)> {
    let feats = list_features(l);
    let rules = l.rules();
    let Some(last_c) = rules.iter().rposition(|r| r.class == c) else {
        let g = b.constant(false, anchor(&feats, n)?);
        return Ok((g, vec![]));
    };
    let first_gate = b.len();
    // maximal same-class runs up to the last c-rule; later rules never decide c
    let mut blocks: Vec<(bool, Vec<usize>)> = Vec::new();
    for rule in &rules[..=last_c] {
        let g = if rule.term.is_empty() {
            b.constant(true, anchor(&feats, n)?)
        } else {
            let ins = rule
                .term
                .literals()
                .iter()
                .map(|lit| b.literal(lit.feature, lit.value))
                .collect();
            b.add(GateKind::And, ins)
        };
        match blocks.last_mut() {
            Some((class, gates)) if *class == rule.class => gates.push(g),
            _ => blocks.push((rule.class, vec![g])),
        }
    }
    let mut negated_earlier = Vec::new();
    let mut deciders = Vec::new();
    for (class, gates) in blocks {
        let or = b.add(GateKind::Or, gates);
        if class == c {
            let mut ins = vec![or];
            ins.extend(&negated_earlier);
            deciders.push(b.add(GateKind::And, ins));
        } else {
            negated_earlier.push(b.add(GateKind::Not, vec![or]));
        }
    }
    let out = b.add(GateKind::Or, deciders);
    let skip: Vec<usize> = b
        .input_gates()
        .chain(b.negated_input_gates())
        .chain([out])
        .collect();
    let k: Vec<usize> = (first_gate..b.len())
        .filter(|g| !skip.contains(g))
        .collect();
    Ok((out, k))
}

/// Circuit true exactly on examples the tree classifies `c`. One AND gate
/// per leaf of the less frequent class, joined by an OR, negated when that
/// class is not `c`.
pub fn dt_to_circuit(t: &DecisionTree, c: bool, n: usize) -> Result<Translation> {
    let t = t.normalized();
    let mut b = CircuitBuilder::new();
    let (out, k) = tree_part(&mut b, &t, c, n)?;
    debug_assert_eq!(k.len(), t.mnl());
    Ok(Translation {
        circuit: b.finish(out)?,
        certificate: WidthCertificate {
            deletion: k,
            exponent: t.mnl(),
            formula: BoundFormula::Tree,
        },
    })
}

/// Per-tree parts sharing input gates, joined by one majority gate.
pub fn dtmaj_to_circuit(ens: &Ensemble, c: bool, n: usize) -> Result<Translation> {
    let Members::Trees(trees) = ens.members() else {
        return Err(Error::InvalidQuery(
            "dtmaj_to_circuit needs an ensemble of trees".into(),
        ));
    };
    let mut b = CircuitBuilder::new();
    let mut outs = Vec::new();
    let mut k = Vec::new();
    let mut exponent = 0;
    for t in trees {
        let t = t.normalized();
        let (out, ands) = tree_part(&mut b, &t, c, n)?;
        outs.push(out);
        k.extend(ands);
        exponent += t.mnl();
    }
    let out = b.add(GateKind::Maj(ens.threshold()), outs);
    Ok(Translation {
        circuit: b.finish(out)?,
        certificate: WidthCertificate {
            deletion: k,
            exponent,
            formula: BoundFormula::TreeEnsemble,
        },
    })
}

/// Circuit true exactly on examples the list classifies `c`: a rule decides
/// `c` when its block fires and no earlier block of the other class does.
pub fn dl_to_circuit(l: &DecisionList, c: bool, n: usize) -> Result<Translation> {
    let mut b = CircuitBuilder::new();
    let (out, k) = list_part(&mut b, l, c, n)?;
    assert!(k.len() <= 3 * l.len());
    Ok(Translation {
        circuit: b.finish(out)?,
        certificate: WidthCertificate {
            deletion: k,
            exponent: 3 * l.len(),
            formula: BoundFormula::List,
        },
    })
}

pub fn dlmaj_to_circuit(ens: &Ensemble, c: bool, n: usize) -> Result<Translation> {
    let lists: Vec<DecisionList> = match ens.members() {
        Members::Lists(v) => v.clone(),
        Members::Sets(v) => v.iter().map(ds_to_dl).collect(),
        Members::Trees(_) => {
            return Err(Error::InvalidQuery(
                "dlmaj_to_circuit needs an ensemble of lists or sets".into(),
            ))
        }
    };
    let mut b = CircuitBuilder::new();
    let mut outs = Vec::new();
    let mut k = Vec::new();
    for l in &lists {
        let (out, part) = list_part(&mut b, l, c, n)?;
        outs.push(out);
        k.extend(part);
    }
    let out = b.add(GateKind::Maj(ens.threshold()), outs);
    Ok(Translation {
        circuit: b.finish(out)?,
        certificate: WidthCertificate {
            deletion: k,
            exponent: 3 * lists.iter().map(DecisionList::len).sum::<usize>(),
            formula: BoundFormula::ListEnsemble,
        },
    })
}

/// Dispatch on the model family. Decision sets go through their list form.
pub fn translate(model: &Model, c: bool) -> Result<Translation> {
    let n = model.num_features();
    match model.kind() {
        ModelKind::Tree(t) => dt_to_circuit(t, c, n),
        ModelKind::Set(s) => dl_to_circuit(&ds_to_dl(s), c, n),
        ModelKind::List(l) => dl_to_circuit(l, c, n),
        ModelKind::Ensemble(e) => match e.members() {
            Members::Trees(_) => dtmaj_to_circuit(e, c, n),
            _ => dlmaj_to_circuit(e, c, n),
        },
        ModelKind::Circuit(_) => Err(Error::InvalidQuery("model is already a circuit".into())),
    }
}

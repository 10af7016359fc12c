use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::builders::{
    odt_from_examples, set_model_odt, subset_model_rules, RuleFamily, SetFamily,
};
use super::solvers::{has_clique, is_tautology, min_hitting_set};
use super::{GadgetInstance, GadgetQuery};
use crate::ensemble::{Ensemble, Members};
use crate::error::{Error, Result};
use crate::model::{Model, ModelKind};
use crate::rules::{DecisionList, DecisionSet, Term};
use crate::tree::{DecisionTree, TreeBuilder};
use crate::universe::{Example, FeatureUniverse};
use crate::verify::{ExplanationKind, Target};

/// Which canonical models a generator emits: ordered trees for exact-set
/// membership, or decision sets / lists for superset membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetMode {
    SetOdt,
    SubsetDs,
    SubsetDl,
}

impl GadgetMode {
    pub const ALL: [GadgetMode; 3] = [
        GadgetMode::SetOdt,
        GadgetMode::SubsetDs,
        GadgetMode::SubsetDl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GadgetMode::SetOdt => "set-odt",
            GadgetMode::SubsetDs => "subset-ds",
            GadgetMode::SubsetDl => "subset-dl",
        }
    }

    fn is_set(&self) -> bool {
        *self == GadgetMode::SetOdt
    }
}

impl FromStr for GadgetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "set-odt" | "set" => Ok(GadgetMode::SetOdt),
            "subset-ds" | "subset" => Ok(GadgetMode::SubsetDs),
            "subset-dl" => Ok(GadgetMode::SubsetDl),
            other => Err(Error::InvalidQuery(format!(
                "unknown gadget mode `{other}` (expected set-odt, subset-ds or subset-dl)"
            ))),
        }
    }
}

enum Elem {
    Tree(DecisionTree),
    Set(DecisionSet),
    List(DecisionList),
}

impl Elem {
    fn from_kind(kind: ModelKind) -> Elem {
        match kind {
            ModelKind::Tree(t) => Elem::Tree(t),
            ModelKind::Set(s) => Elem::Set(s),
            ModelKind::List(l) => Elem::List(l),
            _ => unreachable!("builders emit trees, sets and lists"),
        }
    }

    fn into_kind(self) -> ModelKind {
        match self {
            Elem::Tree(t) => ModelKind::Tree(t),
            Elem::Set(s) => ModelKind::Set(s),
            Elem::List(l) => ModelKind::List(l),
        }
    }
}

/// Model saying `c` exactly on the family members: exact match on the
/// support in set mode, containment otherwise.
fn family_model(mode: GadgetMode, fam: &SetFamily, c: bool, order: &[usize]) -> Result<Elem> {
    Ok(match mode {
        GadgetMode::SetOdt => Elem::Tree(set_model_odt(fam, c, order)?),
        GadgetMode::SubsetDs => Elem::from_kind(subset_model_rules(fam, c, RuleFamily::Set)),
        GadgetMode::SubsetDl => Elem::from_kind(subset_model_rules(fam, c, RuleFamily::List)),
    })
}

/// Constant-0 element. (With an empty family the canonical models say the
/// opposite of their class parameter everywhere, so this is the family
/// model of the empty family for class 1.)
fn padder(mode: GadgetMode) -> Elem {
    match mode {
        GadgetMode::SetOdt => Elem::Tree(DecisionTree::leaf(false)),
        GadgetMode::SubsetDs => Elem::Set(DecisionSet::new(vec![], false)),
        GadgetMode::SubsetDl => Elem::List(DecisionList::constant(false)),
    }
}

fn assemble(elems: Vec<Elem>) -> Result<Ensemble> {
    let members = match elems.first() {
        Some(Elem::Tree(_)) | None => Members::Trees(
            elems
                .into_iter()
                .map(|e| match e {
                    Elem::Tree(t) => t,
                    _ => unreachable!("homogeneous"),
                })
                .collect(),
        ),
        Some(Elem::Set(_)) => Members::Sets(
            elems
                .into_iter()
                .map(|e| match e {
                    Elem::Set(s) => s,
                    _ => unreachable!("homogeneous"),
                })
                .collect(),
        ),
        Some(Elem::List(_)) => Members::Lists(
            elems
                .into_iter()
                .map(|e| match e {
                    Elem::List(l) => l,
                    _ => unreachable!("homogeneous"),
                })
                .collect(),
        ),
    };
    Ensemble::new(members)
}

fn binomial2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HittingSetInstance {
    pub universe: Vec<String>,
    pub sets: Vec<Vec<String>>,
    pub k: usize,
}

/// Features are the universe elements. The model is positive exactly on the
/// characteristic examples of the sets (set mode) or on their supersets.
/// Every query asks for an explanation of size at most `k`, which exists
/// iff the sets have a hitting set of size at most `k`.
pub fn hitting_set_gadget(inst: &HittingSetInstance, mode: GadgetMode) -> Result<GadgetInstance> {
    let u = Arc::new(FeatureUniverse::new(inst.universe.clone())?);
    let n = u.len();
    if inst.sets.is_empty() || inst.sets.iter().any(Vec::is_empty) {
        return Err(Error::InvalidInstance(
            "hitting set instances need a non-empty family of non-empty sets".into(),
        ));
    }
    let sets = inst
        .sets
        .iter()
        .map(|s| s.iter().map(|x| u.index_of(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let fam = SetFamily::new(sets.clone());
    let order: Vec<usize> = (0..n).collect();
    let model = Model::new(
        u.clone(),
        family_model(mode, &fam, true, &order)?.into_kind(),
    )?;
    let k = inst.k;
    let mut queries = vec![GadgetQuery::Explain {
        kind: ExplanationKind::LAxp,
        target: Target::Example(Example::zeros(n)),
        k,
    }];
    if !mode.is_set() {
        queries.push(GadgetQuery::Explain {
            kind: ExplanationKind::LCxp,
            target: Target::Example(Example::new(vec![true; n])),
            k,
        });
        queries.push(GadgetQuery::Explain {
            kind: ExplanationKind::GAxp,
            target: Target::Class(false),
            k,
        });
        queries.push(GadgetQuery::Explain {
            kind: ExplanationKind::GCxp,
            target: Target::Class(true),
            k,
        });
    }
    let best = min_hitting_set(n, &sets);
    Ok(GadgetInstance {
        provenance: format!("hitting-set/{}", mode.name()),
        model,
        queries,
        truth: best.is_some_and(|s| s <= k),
        meta: json!({ "min_hitting_set": best, "a": fam.a(), "b": fam.b(), "k": k }),
        order: Some(order),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphInstance {
    pub classes: Vec<Vec<String>>,
    /// Neighbour lists; the edge relation is the symmetric closure.
    pub adjacency: BTreeMap<String, Vec<String>>,
}

/// Graph with a proper colouring. Vertices are numbered colour by colour,
/// so vertex `v` becomes feature `v` in the generated models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    names: Vec<String>,
    classes: Vec<Vec<usize>>,
    adj: Vec<Vec<bool>>,
}

impl ColouredGraph {
    pub fn new(classes: Vec<Vec<String>>, edges: &[(String, String)]) -> Result<Self> {
        let names: Vec<String> = classes.iter().flatten().cloned().collect();
        let u = FeatureUniverse::new(names.clone()).map_err(|_| {
            Error::InvalidInstance("vertex names must be distinct across colour classes".into())
        })?;
        let mut next = 0;
        let classes: Vec<Vec<usize>> = classes
            .iter()
            .map(|c| {
                let ids = (next..next + c.len()).collect();
                next += c.len();
                ids
            })
            .collect();
        let mut adj = vec![vec![false; names.len()]; names.len()];
        for (a, b) in edges {
            let (x, y) = (u.index_of(a)?, u.index_of(b)?);
            adj[x][y] = true;
            adj[y][x] = true;
        }
        ColouredGraph::from_parts(names, classes, adj)
    }

    fn from_parts(
        names: Vec<String>,
        classes: Vec<Vec<usize>>,
        adj: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let g = ColouredGraph {
            names,
            classes,
            adj,
        };
        for v in 0..g.n() {
            if g.adj[v][v] {
                return Err(Error::InvalidInstance(format!(
                    "self-loop at `{}`",
                    g.names[v]
                )));
            }
        }
        for class in &g.classes {
            for &u in class {
                if let Some(&v) = class.iter().find(|&&v| g.adj[u][v]) {
                    return Err(Error::InvalidInstance(format!(
                        "edge `{}`-`{}` joins two vertices of one colour",
                        g.names[u], g.names[v]
                    )));
                }
            }
        }
        Ok(g)
    }

    pub fn from_instance(inst: &GraphInstance) -> Result<Self> {
        let edges: Vec<(String, String)> = inst
            .adjacency
            .iter()
            .flat_map(|(a, ns)| ns.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        ColouredGraph::new(inst.classes.clone(), &edges)
    }

    /// `k` colour classes with sizes summing to `n` (each at least one
    /// when `n >= k`), each cross-colour edge present with probability `p`.
    pub fn random<R: Rng>(rng: &mut R, n: usize, k: usize, p: f64) -> Self {
        assert!(k > 0);
        let mut colour: Vec<usize> = (0..n)
            .map(|v| if v < k { v } else { rng.gen_range(0..k) })
            .collect();
        colour.sort_unstable();
        let mut classes = vec![Vec::new(); k];
        for (v, &c) in colour.iter().enumerate() {
            classes[c].push(v);
        }
        let mut adj = vec![vec![false; n]; n];
        for u in 0..n {
            for v in u + 1..n {
                if colour[u] != colour[v] && rng.gen_bool(p) {
                    adj[u][v] = true;
                    adj[v][u] = true;
                }
            }
        }
        let names = (0..n).map(|v| format!("n{v}")).collect();
        ColouredGraph::from_parts(names, classes, adj).expect("proper by construction")
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().flatten().filter(|&&b| b).count() / 2
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    /// `v.<colour>.<index>` per vertex, colour by colour.
    pub fn feature_names(&self) -> Vec<String> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(c, vs)| (0..vs.len()).map(move |i| format!("v.{c}.{i}")))
            .collect()
    }

    fn vertex_meta(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .feature_names()
            .into_iter()
            .zip(&self.names)
            .map(|(f, v)| (f, json!(v)))
            .collect();
        serde_json::Value::Object(map)
    }
}

fn hom_queries(k: usize) -> Vec<GadgetQuery> {
    vec![GadgetQuery::Hom, GadgetQuery::PHom { k }]
}

/// Majority ensemble positive exactly on examples choosing one vertex per
/// colour, pairwise adjacent. Set mode: one pair-check tree per colour pair
/// plus constant-0 padders. Subset modes: one "some vertex of colour i"
/// model per colour, one model rejecting any non-adjacent pair, and `k`
/// padders.
pub fn mcc_ensemble_gadget(g: &ColouredGraph, mode: GadgetMode) -> Result<GadgetInstance> {
    let k = g.k();
    let n = g.n();
    let order: Vec<usize> = (0..n).collect();
    let mut elems = Vec::new();
    if mode.is_set() {
        if k < 2 {
            return Err(Error::InvalidInstance(
                "the pair-check construction needs at least two colours".into(),
            ));
        }
        for i in 0..k {
            for j in i + 1..k {
                let mut pairs = Vec::new();
                for &u in &g.classes[i] {
                    for &v in &g.classes[j] {
                        if g.adjacent(u, v) {
                            pairs.push(vec![u, v]);
                        }
                    }
                }
                let support = g.classes[i].iter().chain(&g.classes[j]).copied().collect();
                let fam = SetFamily::new(pairs).with_support(support)?;
                elems.push(family_model(mode, &fam, true, &order)?);
            }
        }
        elems.extend((0..binomial2(k) - 1).map(|_| padder(mode)));
        assert_eq!(elems.len(), 2 * binomial2(k) - 1);
    } else {
        for class in &g.classes {
            let fam = SetFamily::new(class.iter().map(|&v| vec![v]).collect());
            elems.push(family_model(mode, &fam, true, &order)?);
        }
        let mut non_edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !g.adjacent(u, v) {
                    non_edges.push(vec![u, v]);
                }
            }
        }
        elems.push(family_model(
            mode,
            &SetFamily::new(non_edges),
            false,
            &order,
        )?);
        elems.extend((0..k).map(|_| padder(mode)));
        assert_eq!(elems.len(), 2 * k + 1);
    }
    let ens = assemble(elems)?;
    let size = ens.len();
    let u = Arc::new(FeatureUniverse::new(g.feature_names())?);
    let model = Model::ensemble(u, ens)?;
    assert!(!model.classify_bits(&vec![false; n]));
    Ok(GadgetInstance {
        provenance: format!("mcc-ensemble/{}", mode.name()),
        model,
        queries: hom_queries(k),
        truth: has_clique(g.adjacency(), k),
        meta: json!({ "n": n, "m": g.m(), "k": k, "ens_size": size, "vertices": g.vertex_meta() }),
        order: Some(order),
    })
}

/// Majority ensemble of constant-size elements: `n` copies of "not both u
/// and v" per non-adjacent pair, one "v is set" per vertex, and constant-0
/// padders, balanced so that only a k-clique outvotes the rest.
pub fn mcc_unary_ensemble_gadget(g: &ColouredGraph, mode: GadgetMode) -> Result<GadgetInstance> {
    let (n, k) = (g.n(), g.k());
    let order: Vec<usize> = (0..n).collect();
    let missing = binomial2(n) - g.m();
    let mut elems = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !g.adjacent(u, v) {
                let fam = SetFamily::new(vec![vec![u, v]]);
                for _ in 0..n {
                    elems.push(family_model(mode, &fam, false, &order)?);
                }
            }
        }
    }
    for v in 0..n {
        elems.push(family_model(
            mode,
            &SetFamily::new(vec![vec![v]]),
            true,
            &order,
        )?);
    }
    let padders = (n * missing + 2 * k)
        .checked_sub(n + 1)
        .ok_or_else(|| Error::InvalidInstance("graph too small for the padding count".into()))?;
    elems.extend((0..padders).map(|_| padder(mode)));
    let ens = assemble(elems)?;
    assert_eq!(ens.len(), 2 * n * missing + 2 * k - 1);
    let zero = vec![false; n];
    let zero_votes = ens.votes(&zero);
    assert_eq!(zero_votes, n * missing);
    let size = ens.len();
    let u = Arc::new(FeatureUniverse::new(g.feature_names())?);
    let model = Model::ensemble(u, ens)?;
    assert!(!model.classify_bits(&zero));
    Ok(GadgetInstance {
        provenance: format!("mcc-unary/{}", mode.name()),
        model,
        queries: hom_queries(k),
        truth: has_clique(g.adjacency(), k),
        meta: json!({
            "n": n, "m": g.m(), "k": k, "ens_size": size,
            "padders": padders, "zero_votes": zero_votes,
            "vertices": g.vertex_meta(),
        }),
        order: Some(order),
    })
}

pub const DEFAULT_MAX_ODT_K: usize = 10;

fn ceil_log2(x: usize) -> usize {
    let mut h = 0;
    while (1usize << h) < x {
        h += 1;
    }
    h
}

/// Single ordered tree with a global abductive explanation for class 0 of
/// size at most `k` iff the graph has a k-clique. A complete tree of height
/// `k` over auxiliary features fans out to `2^k` copies of a complete tree
/// of height `ceil(log2(k(k-1)))`; each copy carries one block per colour
/// pair `i < j` (positive when colour `i` is empty, or when exactly one
/// vertex `v` of colour `i` is set and none of its colour-`j` neighbours)
/// and one block positive when the last colour is empty.
pub fn mcc_odt_gaxp_gadget(g: &ColouredGraph, max_k: usize) -> Result<GadgetInstance> {
    let k = g.k();
    if k < 2 {
        return Err(Error::InvalidInstance(
            "the tree construction needs at least two colours".into(),
        ));
    }
    if k > max_k {
        return Err(Error::InvalidInstance(format!(
            "k = {k} exceeds the configured ceiling of {max_k}"
        )));
    }
    let h = ceil_log2(k * (k - 1));
    let copies = 1usize << k;
    let mut names = Vec::new();
    let mut aux_index: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for copy in 0..=copies {
        let height = if copy == 0 { k } else { h };
        for depth in 0..height {
            for pos in 0..1usize << depth {
                aux_index.insert((copy, depth, pos), names.len());
                names.push(format!("aux.{copy}.{depth}.{pos}"));
            }
        }
    }
    let offset = names.len();
    names.extend(g.feature_names());
    let total = names.len();
    let vf = |v: usize| offset + v;
    let colour_features =
        |c: usize| -> Vec<usize> { g.classes[c].iter().map(|&v| vf(v)).collect() };

    let mut blocks: Vec<DecisionTree> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let fi = colour_features(i);
            let mut examples = vec![vec![false; fi.len()]];
            for idx in 0..fi.len() {
                let mut e = vec![false; fi.len()];
                e[idx] = true;
                examples.push(e);
            }
            let ti = odt_from_examples(&fi, &examples)?;
            let mut by_leaf = BTreeMap::new();
            for &v in &g.classes[i] {
                let mut bits = vec![false; total];
                bits[vf(v)] = true;
                by_leaf.insert(ti.leaf_of(&bits), v);
            }
            let block = ti.substitute_leaves(|leaf, _| {
                let v = *by_leaf.get(&leaf)?;
                let nbrs: Vec<usize> = g.classes[j]
                    .iter()
                    .filter(|&&u| g.adjacent(v, u))
                    .map(|&u| vf(u))
                    .collect();
                Some(odt_from_examples(&nbrs, &[vec![false; nbrs.len()]]).expect("one example"))
            });
            blocks.push(block);
        }
    }
    let last = colour_features(k - 1);
    blocks.push(odt_from_examples(&last, &[vec![false; last.len()]])?);
    assert!(blocks.len() <= 1 << h);

    fn complete(
        b: &mut TreeBuilder,
        aux: &BTreeMap<(usize, usize, usize), usize>,
        copy: usize,
        depth: usize,
        pos: usize,
        height: usize,
        leaf: &mut dyn FnMut(&mut TreeBuilder, usize) -> usize,
    ) -> usize {
        if depth == height {
            return leaf(b, pos);
        }
        let zero = complete(b, aux, copy, depth + 1, 2 * pos, height, leaf);
        let one = complete(b, aux, copy, depth + 1, 2 * pos + 1, height, leaf);
        b.inner(aux[&(copy, depth, pos)], zero, one)
    }

    let mut b = TreeBuilder::new();
    let root = complete(&mut b, &aux_index, 0, 0, 0, k, &mut |b, slot| {
        complete(
            b,
            &aux_index,
            slot + 1,
            0,
            0,
            h,
            &mut |b, slot| match blocks.get(slot) {
                Some(block) => b.graft(block),
                None => b.leaf(false),
            },
        )
    });
    let order: Vec<usize> = (0..total).collect();
    let tree = b.finish(root).with_order(order.clone());
    let nv = g.n();
    assert!(tree.nodes().len() <= (1usize << (k + h + 1)) * 4 * (nv + 1) * (nv + 1));
    debug_assert!(tree.respects_order(&order));
    let u = Arc::new(FeatureUniverse::new(names)?);
    let model = Model::tree(u, tree)?;
    Ok(GadgetInstance {
        provenance: "mcc-odt/gaxp".into(),
        model,
        queries: vec![GadgetQuery::Explain {
            kind: ExplanationKind::GAxp,
            target: Target::Class(false),
            k,
        }],
        truth: has_clique(g.adjacency(), k),
        meta: json!({
            "n": nv, "m": g.m(), "k": k, "aux_features": offset, "aux_height": h,
            "vertices": g.vertex_meta(),
        }),
        order: Some(order),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DnfInstance {
    pub vars: Vec<String>,
    pub terms: Vec<Vec<(String, u8)>>,
}

/// Decision set with the formula's terms and default 0: it says 1 exactly
/// where the formula holds, so some example is classified unlike the
/// all-zero one iff the formula is not a tautology (given that the all-zero
/// assignment satisfies it; otherwise the instance is flagged trivial).
pub fn taut_ds_gadget(inst: &DnfInstance) -> Result<GadgetInstance> {
    let u = Arc::new(FeatureUniverse::new(inst.vars.clone())?);
    if inst.terms.is_empty() {
        return Err(Error::InvalidInstance("formula has no terms".into()));
    }
    let mut raw = Vec::new();
    let mut terms = Vec::new();
    for t in &inst.terms {
        if t.is_empty() || t.len() > 3 {
            return Err(Error::InvalidInstance(format!(
                "terms need one to three literals, got {}",
                t.len()
            )));
        }
        let lits = t
            .iter()
            .map(|(v, b)| match b {
                0 | 1 => Ok((u.index_of(v)?, *b == 1)),
                _ => Err(Error::InvalidInstance(format!(
                    "literal value {b} is not a bit"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(Term::from_pairs(lits.iter().copied())?);
        raw.push(lits);
    }
    let n = u.len();
    let set = DecisionSet::new(terms, false);
    let trivial_no = !set.classify(&vec![false; n]);
    let model = Model::set(u, set)?;
    Ok(GadgetInstance {
        provenance: "taut/ds".into(),
        model,
        queries: vec![GadgetQuery::Hom],
        truth: !is_tautology(n, &raw),
        meta: json!({ "trivial_no": trivial_no, "vars": n, "terms": raw.len() }),
        order: None,
    })
}

use rayon::prelude::*;

use crate::enumerate::{combination_count, Combinations};
use crate::error::{Error, Result};
use crate::universe::{Example, PartialExample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    In,
    And,
    Or,
    Not,
    /// True iff at least `threshold` in-neighbours are true.
    Maj(usize),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::In => "IN",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Not => "NOT",
            GateKind::Maj(_) => "MAJ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, inputs: Vec<usize>) -> Self {
        Gate { kind, inputs }
    }
}

/// Boolean circuit over IN/AND/OR/NOT/MAJ gates with a single output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: usize,
    /// `(feature, IN gate)` sorted by feature.
    inputs: Vec<(usize, usize)>,
    topo: Vec<usize>,
}

/// Value of every gate under one input assignment.
pub type GateValuation = Vec<bool>;

impl Circuit {
    pub fn new(gates: Vec<Gate>, output: usize, inputs: Vec<(usize, usize)>) -> Result<Self> {
        let n = gates.len();
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        if output >= n {
            return bad(format!("output gate {output} out of range"));
        }
        let mut inputs = inputs;
        inputs.sort_unstable();
        let mut mapped = vec![false; n];
        for w in inputs.windows(2) {
            if w[0].0 == w[1].0 {
                return bad(format!("feature {} mapped to two IN gates", w[0].0));
            }
        }
        for &(_, g) in &inputs {
            if g >= n || gates[g].kind != GateKind::In {
                return bad(format!("input mapping points to non-IN gate {g}"));
            }
            if mapped[g] {
                return bad(format!("IN gate {g} mapped to two features"));
            }
            mapped[g] = true;
        }
        let mut outdeg = vec![0usize; n];
        for (id, gate) in gates.iter().enumerate() {
            let indeg = gate.inputs.len();
            match gate.kind {
                GateKind::In if indeg != 0 => return bad(format!("IN gate {id} has in-arcs")),
                GateKind::In if !mapped[id] => {
                    return bad(format!("IN gate {id} is not mapped to a feature"))
                }
                GateKind::Not if indeg != 1 => {
                    return bad(format!("NOT gate {id} must have exactly one in-arc"))
                }
                GateKind::And | GateKind::Or | GateKind::Maj(_) if indeg == 0 => {
                    return bad(format!("{} gate {id} has no in-arcs", gate.kind.name()))
                }
                _ => {}
            }
            for &src in &gate.inputs {
                if src >= n {
                    return bad(format!("gate {id} reads missing gate {src}"));
                }
                outdeg[src] += 1;
            }
        }
        if let Some(sink) = (0..n).find(|&g| g != output && outdeg[g] == 0) {
            return bad(format!("gate {sink} is a sink other than the output"));
        }
        if outdeg[output] != 0 {
            return bad("output gate has out-arcs".into());
        }
        let topo = topological_order(&gates).ok_or(Error::InvalidCircuit("cycle".into()))?;
        Ok(Circuit {
            gates,
            output,
            inputs,
            topo,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// `(feature, IN gate)` pairs sorted by feature.
    pub fn inputs(&self) -> &[(usize, usize)] {
        &self.inputs
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn maj_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g.kind, GateKind::Maj(_)))
            .count()
    }

    pub(crate) fn max_feature(&self) -> Option<usize> {
        self.inputs.last().map(|&(f, _)| f)
    }

    pub fn valuation(&self, e: &[bool]) -> GateValuation {
        let mut val = vec![false; self.gates.len()];
        for &(f, g) in &self.inputs {
            val[g] = e[f];
        }
        for &id in &self.topo {
            let gate = &self.gates[id];
            let mut ins = gate.inputs.iter().map(|&s| val[s]);
            let v = match gate.kind {
                GateKind::In => val[id],
                GateKind::And => ins.all(|b| b),
                GateKind::Or => ins.any(|b| b),
                GateKind::Not => !val[gate.inputs[0]],
                GateKind::Maj(t) => ins.filter(|&b| b).count() >= t,
            };
            val[id] = v;
        }
        val
    }

    pub fn eval(&self, e: &[bool]) -> bool {
        self.valuation(e)[self.output]
    }

    /// True iff every assignment agreeing with `tau` evaluates to `x`.
    /// Only features with an IN gate are enumerated.
    pub fn global_check(&self, tau: &PartialExample, x: bool, cap: usize) -> Result<bool> {
        let free: Vec<usize> = self
            .inputs
            .iter()
            .map(|&(f, _)| f)
            .filter(|&f| tau.get(f).is_none())
            .collect();
        if free.len() > cap {
            return Err(Error::CapExceeded {
                what: "circuit global check",
                size: free.len(),
                cap,
            });
        }
        let base = tau.complete_with(&Example::zeros(tau.len()));
        let violated = (0..1u64 << free.len()).into_par_iter().any(|mask| {
            let mut bits = base.bits().to_vec();
            for (i, &f) in free.iter().enumerate() {
                bits[f] = (mask >> i) & 1 == 1;
            }
            self.eval(&bits) != x
        });
        Ok(!violated)
    }

    /// An example over `n` features whose output differs from the all-zero
    /// example, smallest in mask order over the IN features.
    pub fn hom_witness(&self, n: usize, cap: usize) -> Result<Option<Example>> {
        let feats: Vec<usize> = self.inputs.iter().map(|&(f, _)| f).collect();
        if feats.len() > cap {
            return Err(Error::CapExceeded {
                what: "circuit homogeneity check",
                size: feats.len(),
                cap,
            });
        }
        let base = self.eval(&vec![false; n]);
        let found = (0..1u64 << feats.len())
            .into_par_iter()
            .find_first(|&mask| {
                let mut bits = vec![false; n];
                for (i, &f) in feats.iter().enumerate() {
                    bits[f] = (mask >> i) & 1 == 1;
                }
                self.eval(&bits) != base
            });
        Ok(found.map(|mask| {
            let mut e = Example::zeros(n);
            for (i, &f) in feats.iter().enumerate() {
                e.set(f, (mask >> i) & 1 == 1);
            }
            e
        }))
    }

    pub fn hom_check(&self, n: usize, cap: usize) -> Result<bool> {
        Ok(self.hom_witness(n, cap)?.is_some())
    }

    /// Like [`Circuit::hom_witness`] restricted to examples with at most `k`
    /// ones, searched by increasing weight.
    pub fn phom_witness(&self, n: usize, k: usize, cap: usize) -> Result<Option<Example>> {
        let feats: Vec<usize> = self.inputs.iter().map(|&(f, _)| f).collect();
        let k = k.min(feats.len());
        let total: u128 = (0..=k).map(|w| combination_count(feats.len(), w)).sum();
        if total > 1u128 << cap {
            return Err(Error::CapExceeded {
                what: "circuit p-HOM check",
                size: k,
                cap,
            });
        }
        let zero = vec![false; n];
        let base = self.eval(&zero);
        for w in 0..=k {
            for combo in Combinations::new(feats.len(), w) {
                let mut bits = zero.clone();
                for &i in &combo {
                    bits[feats[i]] = true;
                }
                if self.eval(&bits) != base {
                    return Ok(Some(Example::new(bits)));
                }
            }
        }
        Ok(None)
    }

    pub fn phom_check(&self, n: usize, k: usize, cap: usize) -> Result<bool> {
        Ok(self.phom_witness(n, k, cap)?.is_some())
    }

    /// Whether the undirected graph of the circuit after deleting the gates
    /// marked in `removed` has no cycle.
    pub fn is_forest_without(&self, removed: &[bool]) -> bool {
        let mut parent: Vec<usize> = (0..self.gates.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (id, gate) in self.gates.iter().enumerate() {
            if removed[id] {
                continue;
            }
            for &src in &gate.inputs {
                if removed[src] {
                    continue;
                }
                let (a, b) = (find(&mut parent, id), find(&mut parent, src));
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
        }
        true
    }
}

fn topological_order(gates: &[Gate]) -> Option<Vec<usize>> {
    let n = gates.len();
    let mut indeg: Vec<usize> = gates.iter().map(|g| g.inputs.len()).collect();
    let mut succ = vec![Vec::new(); n];
    for (id, g) in gates.iter().enumerate() {
        for &s in &g.inputs {
            succ[s].push(id);
        }
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(id) = ready.pop() {
        order.push(id);
        for &t in succ[id].iter().rev() {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.push(t);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Incremental construction; IN gates are created on first use of a feature
/// and per-feature NOT gates likewise.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    in_gate: Vec<(usize, usize)>,
    not_gate: Vec<(usize, usize)>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, kind: GateKind, inputs: Vec<usize>) -> usize {
        self.gates.push(Gate::new(kind, inputs));
        self.gates.len() - 1
    }

    pub fn input(&mut self, feature: usize) -> usize {
        if let Some(&(_, g)) = self.in_gate.iter().find(|&&(f, _)| f == feature) {
            return g;
        }
        let g = self.add(GateKind::In, vec![]);
        self.in_gate.push((feature, g));
        g
    }

    /// NOT of the IN gate of `feature`, shared across callers.
    pub fn negated_input(&mut self, feature: usize) -> usize {
        if let Some(&(_, g)) = self.not_gate.iter().find(|&&(f, _)| f == feature) {
            return g;
        }
        let i = self.input(feature);
        let g = self.add(GateKind::Not, vec![i]);
        self.not_gate.push((feature, g));
        g
    }

    /// Gate computing the literal `feature = value`.
    pub fn literal(&mut self, feature: usize, value: bool) -> usize {
        if value {
            self.input(feature)
        } else {
            self.negated_input(feature)
        }
    }

    /// Constant gate over `feature`: OR(g, NOT g) for true, AND(g, NOT g)
    /// for false.
    pub fn constant(&mut self, value: bool, feature: usize) -> usize {
        let g = self.input(feature);
        let ng = self.negated_input(feature);
        let kind = if value { GateKind::Or } else { GateKind::And };
        self.add(kind, vec![g, ng])
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn input_gates(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_gate.iter().map(|&(_, g)| g)
    }

    pub fn negated_input_gates(&self) -> impl Iterator<Item = usize> + '_ {
        self.not_gate.iter().map(|&(_, g)| g)
    }

    pub fn finish(self, output: usize) -> Result<Circuit> {
        Circuit::new(self.gates, output, self.in_gate)
    }
}

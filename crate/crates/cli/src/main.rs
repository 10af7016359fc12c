use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

use xplain_core::explain_dt::{
    card_xp_search, gaxp_subset_min, gcxp_subset_min, laxp_subset_min, lcxp_min, lcxp_subset_min,
};
use xplain_core::explain_rules::{
    ds_to_dl, laxp_rules_subset_min, lcxp_card_branch, lcxp_card_branch_ens, lcxp_card_enum,
};
use xplain_core::format::{
    example_to_value, features_to_value, model_to_value, parse_example, parse_feature_set,
    parse_model, parse_partial, partial_to_value,
};
use xplain_core::gadgets::{
    hitting_set_gadget, hom_equivalence_suite, mcc_ensemble_gadget, mcc_odt_gaxp_gadget,
    mcc_unary_ensemble_gadget, taut_ds_gadget, ColouredGraph, DnfInstance, GadgetInstance,
    GadgetMode, GraphInstance, HittingSetInstance, DEFAULT_MAX_ODT_K,
};
use xplain_core::oracle::{hom_witness, oracle_min_with, oracle_subset_min, phom_witness};
use xplain_core::random::seeded;
use xplain_core::translate::translate;
use xplain_core::verify::verify_with;
use xplain_core::{
    BruteCaps, Candidate, Example, ExplanationKind, ExplanationQuery, Members, Model, ModelKind,
    Target,
};

#[derive(Parser)]
#[command(
    name = "xplain",
    version,
    about = "Explanations for decision trees, decision sets and lists, their majority ensembles, and Boolean circuits",
    long_about = "Explanations for decision trees, decision sets and lists, their majority ensembles, and Boolean circuits.\n\n\
        Every command prints one JSON object {\"status\", \"payload\", \"timing_ms\"} on standard output. \
        Exit codes: 0 found/true, 1 false, 3 no explanation exists, 2 error.\n\n\
        Brute-force checks are capped by feature count; set XPLAIN_BRUTE_CAP to override every cap."
)]
struct Cli {
    /// Seed for randomly generated test data. Algorithmic output never depends on it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Leave out `timing_ms` so repeated runs print identical bytes.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one example.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        example: PathBuf,
    },
    /// Compute a subset-minimal or cardinality-minimum explanation.
    #[command(
        long_about = "Compute a subset-minimal or cardinality-minimum explanation.\n\n\
        Decision trees: subset-minimal lAXp by greedy removal with the restricted-tree test; \
        subset-minimal lCXp as a conflict set with a path of the other class that contains no \
        smaller one; subset-minimal gAXp/gCXp by shrinking the path of the first leaf of the \
        wanted class; minimum lCXp as the smallest conflict set over all paths of the other \
        class (first in depth-first leaf order); minimum lAXp/gAXp/gCXp by enumerating subsets \
        of the tested features in canonical order.\n\n\
        Decision lists and sets: minimum lCXp by bounded branching on the rules of the other \
        class (--algo branch, at most term_size^k leaves per target rule) or by plain \
        enumeration (--algo enum); ensembles of lists or sets branch over tuples of target rules \
        that outvote the current class. Subset-minimal lAXp by greedy removal.\n\n\
        Everything else falls back to the exhaustive oracle. Apart from the tree lCXp, minimum \
        searches return the first explanation in canonical order: by size, then \
        lexicographically by feature index."
    )]
    Explain {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum)]
        min: Minimality,
        /// Only report explanations with at most this many features.
        #[arg(long)]
        k: Option<usize>,
        /// Implementation of the minimum lCXp search on rule models.
        #[arg(long, value_enum, default_value_t = Algo::Branch)]
        algo: Algo,
    },
    /// Check whether a candidate is an explanation.
    #[command(long_about = "Check whether a candidate is an explanation.\n\n\
        Decision trees are checked by restricting the tree to the candidate and looking at the \
        reachable leaves, in time polynomial in the tree. Other models are checked by \
        enumerating completions (or flips, for lCXp), up to the brute-force cap.")]
    Verify {
        #[command(flatten)]
        query: QueryArgs,
        /// Feature list (`{"features": [...]}` or a bare array) for local kinds, partial
        /// example (`{"assign": {...}}`) for global kinds.
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Build a Boolean circuit accepting exactly the examples of one class.
    #[command(
        long_about = "Build a Boolean circuit accepting exactly the examples of one class.\n\n\
        Trees become an OR over the paths of the smaller side (negated when that side is the \
        other class), lists and sets a chain of first-applying-rule blocks, and ensembles one \
        MAJ gate over the translated elements. The payload carries a gate-deletion set that \
        leaves a forest, together with the width bound it certifies."
    )]
    Translate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        class: u8,
        /// Write the circuit model file here instead of into the payload.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a reduction instance from a source problem.
    #[command(
        long_about = "Generate a reduction instance from a source problem.\n\n\
        hitting-set: one canonical model over the universe; small hitting sets become small \
        explanations of the all-zero or all-one example and of the classes. \
        mcc-ens: a majority of pairwise edge checkers for multicoloured clique, asked HOM and p-HOM. \
        mcc-unary: a majority of trees with at most one leaf of some class, with vote padding \
        so that exactly the multicoloured cliques win. \
        mcc-odt: a single ordered tree whose global abductive explanations of size k for class 0 \
        correspond to multicoloured cliques; exponential in k, so k is capped. \
        taut: a decision set with default 0 whose terms are those of a 3-DNF, asked HOM.\n\n\
        Without --in a random instance is drawn from --seed."
    )]
    GenGadget {
        #[arg(long, value_enum)]
        kind: GadgetKind,
        /// Source instance JSON.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Canonical model family: set-odt, subset-ds or subset-dl.
        #[arg(long, default_value = "set-odt")]
        mode: String,
        /// Largest clique size accepted by mcc-odt.
        #[arg(long, default_value_t = DEFAULT_MAX_ODT_K)]
        max_k: usize,
        /// Vertices, universe size or variables of a random instance.
        #[arg(long, default_value_t = 6)]
        size: usize,
        /// Colours (clique size) of a random graph, or the budget of a random hitting set instance.
        #[arg(long, default_value_t = 3)]
        colours: usize,
    },
    /// Report the structural parameters of a model.
    Params {
        #[arg(long)]
        model: PathBuf,
    },
    /// Is some example classified unlike the all-zero example?
    #[command(
        long_about = "Is some example classified unlike the all-zero example?\n\n\
        Without --k the witness is the first such example read as a binary number with the \
        first feature as the lowest bit. With --k only \
        examples with at most k ones are considered, lightest first. Works on any model, \
        circuits included."
    )]
    Hom {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exhaustive reference answer for an explanation query.
    #[command(
        long_about = "Exhaustive reference answer for an explanation query.\n\n\
        Minimum explanations come from a truth table with a zeta transform (local kinds) or a \
        dynamic program over all partial examples (global kinds); subset-minimal ones from \
        greedy removal checked by brute force."
    )]
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum)]
        min: Minimality,
    },
    /// Cross-check homogeneity against the explanation problems on one model.
    #[command(
        long_about = "Cross-check homogeneity against the explanation problems on one model.\n\n\
        Evaluates nine statements that each hold exactly when the model is constant (no \
        example differs from the all-zero one, the empty set explains it, no contrastive \
        explanation exists, and so on), and for every k compares weight-k inhomogeneity with \
        contrastive explanations of size k of the all-zero example."
    )]
    HomSuite {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    model: PathBuf,
    /// laxp, lcxp, gaxp or gcxp.
    #[arg(long)]
    kind: String,
    /// Example file (`{"assign": {...}}`) for local kinds.
    #[arg(long)]
    example: Option<PathBuf>,
    /// Class (0 or 1) for global kinds.
    #[arg(long)]
    class: Option<u8>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Minimality {
    Subset,
    Card,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Branch,
    Enum,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetKind {
    HittingSet,
    MccEns,
    MccUnary,
    MccOdt,
    Taut,
}

#[derive(Clone, Copy)]
enum Status {
    Found,
    None,
    True,
    False,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Found => "found",
            Status::None => "none",
            Status::True => "true",
            Status::False => "false",
        }
    }

    fn code(self) -> u8 {
        match self {
            Status::Found | Status::True => 0,
            Status::False => 1,
            Status::None => 3,
        }
    }

    fn of(b: bool) -> Status {
        if b {
            Status::True
        } else {
            Status::False
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> Result<Model> {
    parse_model(&read(path)?).with_context(|| format!("loading model {}", path.display()))
}

fn bit(c: u8) -> Result<bool> {
    match c {
        0 => Ok(false),
        1 => Ok(true),
        _ => bail!("class must be 0 or 1, got {c}"),
    }
}

fn caps() -> Result<BruteCaps> {
    Ok(BruteCaps::from_env()?)
}

struct Query {
    model: Model,
    kind: ExplanationKind,
    target: Target,
}

impl QueryArgs {
    fn load(&self) -> Result<Query> {
        let model = load_model(&self.model)?;
        let kind: ExplanationKind = self.kind.parse()?;
        let target = if kind.is_local() {
            if self.class.is_some() {
                bail!("--class is for global kinds; {kind} takes --example");
            }
            let path = self
                .example
                .as_ref()
                .ok_or_else(|| anyhow!("{kind} needs --example"))?;
            Target::Example(parse_example(model.universe(), &read(path)?)?)
        } else {
            if self.example.is_some() {
                bail!("--example is for local kinds; {kind} takes --class");
            }
            let c = self.class.ok_or_else(|| anyhow!("{kind} needs --class"))?;
            Target::Class(bit(c)?)
        };
        Ok(Query {
            model,
            kind,
            target,
        })
    }
}

fn witness_payload(model: &Model, found: Option<Candidate>) -> (Status, Value) {
    let u = model.universe();
    match found {
        Some(c) => {
            let size = c.size();
            let witness = match &c {
                Candidate::Features(f) => features_to_value(u, f),
                Candidate::Partial(p) => partial_to_value(u, p),
            };
            (Status::Found, json!({ "witness": witness, "size": size }))
        }
        None => (Status::None, json!({ "witness": null, "size": null })),
    }
}

fn explain(
    q: &Query,
    min: Minimality,
    k: Option<usize>,
    algo: Algo,
    caps: &BruteCaps,
) -> Result<Option<Candidate>> {
    let n = q.model.num_features();
    let e = match &q.target {
        Target::Example(e) => Some(e),
        Target::Class(_) => None,
    };
    let c = match q.target {
        Target::Class(c) => c,
        Target::Example(_) => false,
    };
    let budget = k.unwrap_or(n);
    let feats = |v: Option<Vec<usize>>| v.map(Candidate::Features);
    use ExplanationKind::*;
    let found = match (min, q.kind, q.model.kind()) {
        (Minimality::Subset, LAxp, ModelKind::Tree(t)) => Some(Candidate::Features(
            laxp_subset_min(&t.normalize(), e.unwrap()),
        )),
        (Minimality::Subset, LAxp, ModelKind::Set(_) | ModelKind::List(_)) => Some(
            Candidate::Features(laxp_rules_subset_min(&q.model, e.unwrap(), caps)?),
        ),
        (Minimality::Subset, LCxp, ModelKind::Tree(t)) => {
            feats(lcxp_subset_min(&t.normalize(), e.unwrap()))
        }
        (Minimality::Subset, GAxp, ModelKind::Tree(t)) => {
            gaxp_subset_min(&t.normalize(), c, n).map(Candidate::Partial)
        }
        (Minimality::Subset, GCxp, ModelKind::Tree(t)) => {
            gcxp_subset_min(&t.normalize(), c, n).map(Candidate::Partial)
        }
        (Minimality::Subset, _, _) => oracle_subset_min(&q.model, q.kind, &q.target, caps)?,
        (Minimality::Card, LCxp, ModelKind::Tree(t)) => feats(lcxp_min(&t.normalize(), e.unwrap())),
        (Minimality::Card, _, ModelKind::Tree(t)) => {
            card_xp_search(t, q.kind, &q.target, budget, n)?
        }
        (Minimality::Card, LCxp, ModelKind::List(l)) if algo == Algo::Branch => {
            feats(lcxp_card_branch(l, e.unwrap(), budget))
        }
        (Minimality::Card, LCxp, ModelKind::Set(s)) if algo == Algo::Branch => {
            feats(lcxp_card_branch(&ds_to_dl(s), e.unwrap(), budget))
        }
        (Minimality::Card, LCxp, ModelKind::Ensemble(ens))
            if algo == Algo::Branch && !matches!(ens.members(), Members::Trees(_)) =>
        {
            feats(lcxp_card_branch_ens(ens, e.unwrap(), budget)?)
        }
        (Minimality::Card, LCxp, _) => feats(lcxp_card_enum(&q.model, e.unwrap(), budget)?),
        (Minimality::Card, _, _) => oracle_min_with(&q.model, q.kind, &q.target, caps)?.witness,
    };
    Ok(found.filter(|f| f.size() <= budget))
}

fn load_instance<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing instance {}", path.display()))
}

fn random_graph(seed: u64, n: usize, k: usize) -> Result<ColouredGraph> {
    if k < 2 || k > n {
        bail!("a random graph needs 2 <= colours <= size");
    }
    let mut rng = seeded(seed);
    let p = rng.gen_range(0.3..0.9);
    Ok(ColouredGraph::random(&mut rng, n, k, p))
}

fn graph_instance(
    input: &Option<PathBuf>,
    seed: u64,
    size: usize,
    colours: usize,
) -> Result<ColouredGraph> {
    match input {
        Some(p) => Ok(ColouredGraph::from_instance(&load_instance::<
            GraphInstance,
        >(p)?)?),
        None => random_graph(seed, size, colours),
    }
}

fn random_hitting_set(seed: u64, u: usize, k: usize) -> Result<HittingSetInstance> {
    if u == 0 {
        bail!("a random hitting set instance needs size >= 1");
    }
    let mut rng = seeded(seed);
    let name = |i: usize| format!("u{i}");
    let sets = (0..rng.gen_range(1..=u))
        .map(|_| {
            let mut s: Vec<String> = (0..u).filter(|_| rng.gen_bool(0.3)).map(name).collect();
            if s.is_empty() {
                s.push(name(rng.gen_range(0..u)));
            }
            s
        })
        .collect();
    Ok(HittingSetInstance {
        universe: (0..u).map(name).collect(),
        sets,
        k,
    })
}

fn random_dnf(seed: u64, vars: usize) -> Result<DnfInstance> {
    if vars == 0 {
        bail!("a random formula needs size >= 1");
    }
    let mut rng = seeded(seed);
    let terms = (0..rng.gen_range(1..=2 * vars))
        .map(|_| {
            let mut vs: Vec<usize> = (0..vars).collect();
            rand::seq::SliceRandom::shuffle(vs.as_mut_slice(), &mut rng);
            let len = rng.gen_range(1..=3.min(vars));
            vs[..len]
                .iter()
                .map(|&v| (format!("p{v}"), rng.gen_range(0..=1u8)))
                .collect()
        })
        .collect();
    Ok(DnfInstance {
        vars: (0..vars).map(|v| format!("p{v}")).collect(),
        terms,
    })
}

fn gen_gadget(cmd: &Command, seed: u64) -> Result<GadgetInstance> {
    let Command::GenGadget {
        kind,
        input,
        mode,
        max_k,
        size,
        colours,
        ..
    } = cmd
    else {
        unreachable!()
    };
    let mode: GadgetMode = mode.parse()?;
    Ok(match kind {
        GadgetKind::HittingSet => {
            let inst = match input {
                Some(p) => load_instance(p)?,
                None => random_hitting_set(seed, *size, *colours)?,
            };
            hitting_set_gadget(&inst, mode)?
        }
        GadgetKind::MccEns => {
            mcc_ensemble_gadget(&graph_instance(input, seed, *size, *colours)?, mode)?
        }
        GadgetKind::MccUnary => {
            mcc_unary_ensemble_gadget(&graph_instance(input, seed, *size, *colours)?, mode)?
        }
        GadgetKind::MccOdt => {
            mcc_odt_gaxp_gadget(&graph_instance(input, seed, *size, *colours)?, *max_k)?
        }
        GadgetKind::Taut => {
            let inst = match input {
                Some(p) => load_instance(p)?,
                None => random_dnf(seed, *size)?,
            };
            taut_ds_gadget(&inst)?
        }
    })
}

fn run(cli: &Cli) -> Result<(Status, Value)> {
    let caps = caps()?;
    match &cli.command {
        Command::Classify { model, example } => {
            let m = load_model(model)?;
            let e = parse_example(m.universe(), &read(example)?)?;
            Ok((Status::Found, json!({ "class": m.classify(&e)? as u8 })))
        }
        Command::Explain {
            query,
            min,
            k,
            algo,
        } => {
            let q = query.load()?;
            let found = explain(&q, *min, *k, *algo, &caps)?;
            Ok(witness_payload(&q.model, found))
        }
        Command::Verify { query, candidate } => {
            let q = query.load()?;
            let u = q.model.universe();
            let text = read(candidate)?;
            let cand = if q.kind.is_local() {
                Candidate::Features(parse_feature_set(u, &text)?)
            } else {
                Candidate::Partial(parse_partial(u, &text)?)
            };
            let eq = ExplanationQuery::new(q.kind, q.target.clone(), cand)?;
            let valid = verify_with(&q.model, &eq, &caps)?;
            Ok((Status::of(valid), json!({ "valid": valid })))
        }
        Command::Translate { model, class, out } => {
            let m = load_model(model)?;
            let tr = translate(&m, bit(*class)?)?;
            let circuit_model = Model::circuit(m.universe().clone(), tr.circuit.clone())?;
            let cert = &tr.certificate;
            let mut payload = json!({
                "gates": tr.circuit.gates().len(),
                "maj_gates": tr.circuit.maj_count(),
                "certificate": {
                    "deletion": cert.deletion,
                    "exponent": cert.exponent,
                    "bound": cert.bound().map(|b| b.to_string()),
                    "formula": cert.to_string(),
                    "forest": cert.leaves_forest(&tr.circuit),
                },
            });
            let file = model_to_value(&circuit_model);
            match out {
                Some(path) => {
                    write_json(path, &file)?;
                    payload["out"] = json!(path.display().to_string());
                }
                None => payload["circuit"] = file,
            }
            Ok((Status::Found, payload))
        }
        cmd @ Command::GenGadget { out, .. } => {
            let g = gen_gadget(cmd, cli.seed)?;
            let value = g.to_value();
            let payload = match out {
                Some(path) => {
                    write_json(path, &value)?;
                    json!({
                        "provenance": g.provenance,
                        "truth": g.truth,
                        "features": g.model.num_features(),
                        "out": path.display().to_string(),
                    })
                }
                None => value,
            };
            Ok((Status::Found, payload))
        }
        Command::Params { model } => {
            let m = load_model(model)?;
            Ok((Status::Found, serde_json::to_value(m.measure())?))
        }
        Command::Hom { model, k } => {
            let m = load_model(model)?;
            let w = match k {
                Some(k) => phom_witness(&m, *k, &caps)?,
                None => hom_witness(&m, &caps)?,
            };
            let witness = w
                .as_ref()
                .map(|e: &Example| example_to_value(m.universe(), e));
            Ok((Status::of(w.is_some()), json!({ "witness": witness })))
        }
        Command::Oracle { query, min } => {
            let q = query.load()?;
            let found = match min {
                Minimality::Card => oracle_min_with(&q.model, q.kind, &q.target, &caps)?.witness,
                Minimality::Subset => oracle_subset_min(&q.model, q.kind, &q.target, &caps)?,
            };
            Ok(witness_payload(&q.model, found))
        }
        Command::HomSuite { model } => {
            let m = load_model(model)?;
            let r = hom_equivalence_suite(&m, &caps)?;
            Ok((
                Status::of(r.all_equal && r.khom_agree),
                serde_json::to_value(r)?,
            ))
        }
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn emit(status: &str, payload: Value, timing: Option<u128>) {
    let mut out = json!({ "status": status, "payload": payload });
    if let Some(ms) = timing {
        out["timing_ms"] = json!(ms);
    }
    println!("{out}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            emit("error", Value::Null, None);
            return ExitCode::from(2);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("xplain: {e}");
        }
    }
    let start = Instant::now();
    let result = run(&cli);
    let timing = (!cli.quiet).then(|| start.elapsed().as_millis());
    match result {
        Ok((status, payload)) => {
            emit(status.name(), payload, timing);
            ExitCode::from(status.code())
        }
        Err(e) => {
            eprintln!("xplain: {e:#}");
            emit("error", Value::Null, timing);
            ExitCode::from(2)
        }
    }
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gamecomonad::comonad::export::{hella_to_dot, hella_to_json};
use gamecomonad::comonad::{build_hnk, check_comonad_laws, Grade, Mutation};
use gamecomonad::decomp::*;
use gamecomonad::game::{monotonicity_violations, verdict_cube, Game, GameVariant};
use gamecomonad::logic::*;
use gamecomonad::{Error, RelStructure, Signature};

#[derive(Parser)]
#[command(name = "gcq", version, about = "Pebble games, game comonads and tree decompositions of finite structures")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GameKind {
    Fun,
    Inj,
    Surj,
    Bij,
}

#[derive(Args)]
struct VariantArgs {
    #[arg(long, value_enum, default_value_t = GameKind::Bij)]
    game: GameKind,
    /// Duplicator must preserve relations only.
    #[arg(long, conflicts_with = "negated")]
    positive: bool,
    /// Duplicator must also preserve non-relations.
    #[arg(long)]
    negated: bool,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
}

impl VariantArgs {
    fn variant(&self) -> Result<GameVariant, Error> {
        let (xi, xs) = match self.game {
            GameKind::Fun => (false, false),
            GameKind::Inj => (true, false),
            GameKind::Surj => (false, true),
            GameKind::Bij => (true, true),
        };
        GameVariant::new(self.n, self.k, xi, xs, self.negated)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide one game between two structures.
    Solve {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        variant: VariantArgs,
        /// Include Duplicator's positional strategy when she wins.
        #[arg(long)]
        strategy: bool,
    },
    /// All eight games at one grade, with the monotonicity self-check.
    Cube {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Build a truncated comonad on a structure and check its laws.
    Comonad {
        a: PathBuf,
        #[arg(long, value_enum, default_value_t = ComonadKind::Hnk)]
        comonad: ComonadKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Corrupt the comultiplication before checking.
        #[arg(long)]
        mutate: bool,
        /// Include the truncated structure in the JSON document.
        #[arg(long)]
        dump: bool,
    },
    /// Coalgebras and (extended) tree decompositions.
    Decompose {
        #[command(subcommand)]
        op: DecomposeOp,
    },
    /// Formulas and quantifier oracles.
    Logic {
        /// Size bound of the built-in oracles.
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[command(subcommand)]
        op: LogicOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComonadKind {
    Tk,
    Hnk,
}

#[derive(Args)]
struct Grading {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Subcommand)]
enum DecomposeOp {
    /// Search for an H_{n,k}-coalgebra.
    Search {
        a: PathBuf,
        #[command(flatten)]
        grade: Grading,
        #[arg(long, default_value_t = SEARCH_BOUND)]
        bound: usize,
        #[arg(long)]
        round_trip: bool,
    },
    /// Validate an extended tree decomposition, structured at (n, k) if given.
    Validate {
        a: PathBuf,
        etd: PathBuf,
        #[arg(long, requires = "k")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
    },
    /// Validate a tree decomposition.
    ValidateTd { a: PathBuf, td: PathBuf },
    /// Tree decomposition of width at most k to an extended one.
    Td2etd {
        a: PathBuf,
        td: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        round_trip: bool,
    },
    /// Extended tree decomposition of arity 1 to a plain one.
    Etd2td {
        a: PathBuf,
        etd: PathBuf,
        #[arg(long)]
        round_trip: bool,
    },
    /// Extended tree decomposition to an H_{n,k}-coalgebra.
    Etd2coalg {
        a: PathBuf,
        etd: PathBuf,
        #[command(flatten)]
        grade: Grading,
        /// Put an empty-root node above the decomposition first.
        #[arg(long)]
        empty_root: bool,
        #[arg(long)]
        round_trip: bool,
    },
    /// H_{n,k}-coalgebra to an extended tree decomposition.
    Coalg2etd {
        a: PathBuf,
        coalgebra: PathBuf,
        #[arg(long)]
        round_trip: bool,
    },
    /// The decomposition of the truncated H_{n,k} structure itself.
    Hnk {
        a: PathBuf,
        #[command(flatten)]
        grade: Grading,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Exact treewidth of the Gaifman graph.
    Treewidth { a: PathBuf },
}

#[derive(Subcommand)]
enum LogicOp {
    /// Evaluate a formula; assignments are `var=element`.
    Eval {
        a: PathBuf,
        formula: PathBuf,
        #[arg(long = "assign", value_name = "VAR=ELEMENT")]
        assign: Vec<String>,
    },
    /// Exhaustive closure check of a named oracle.
    Closure {
        oracle: String,
        #[arg(long, default_value = "hom")]
        class: String,
    },
    /// q-type of a hom-closed unary oracle.
    Qtype { oracle: String },
    /// Replace hom-closed unary quantifiers by existential ones.
    Eliminate { formula: PathBuf },
    /// Seeded random formulas over one binary relation E.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_delimiter = ',', default_value = "exists,forall,geq_2,exists_both")]
        palette: Vec<String>,
        #[arg(long)]
        negation: bool,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<Output, Failure>;

/// A document in every format the command supports.
struct Output {
    json: Value,
    text: String,
    dot: Option<String>,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
}

fn structure(path: &Path) -> Result<RelStructure, Error> {
    RelStructure::from_json(&read(path)?)
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn opt(x: Option<usize>) -> String {
    x.map_or("-".into(), |x| x.to_string())
}

fn variant_label(v: &GameVariant) -> String {
    format!("{}(n={},k={},x={}{}{})", v.game_name(), v.n, v.k, v.xi as u8, v.xs as u8, v.xn as u8)
}

fn solve(a: &Path, b: &Path, v: GameVariant, with_strategy: bool) -> Outcome {
    let (sa, sb) = (structure(a)?, structure(b)?);
    let game = Game::new(&sa, &sb, v)?;
    let verdict = game.verdict();
    let mut json = verdict.to_json_value();
    json["a"] = json!(file_name(a));
    json["b"] = json!(file_name(b));
    if with_strategy && verdict.duplicator_wins {
        let system = game.canonical_system();
        let strat = game.synthesize_strategy(&system)?;
        if let Some(defect) = game.verify_strategy(&system, &strat) {
            return Err(Error::Invariant(format!("synthesized strategy is defective: {defect:?}")).into());
        }
        json["strategy"] = strat
            .choice
            .iter()
            .map(|(key, resp)| json!({"position": key.to_json_value(&sa, &sb), "response": resp.iter().map(|&y| sb.id(y)).collect::<Vec<_>>()}))
            .collect();
    }
    let text = format!(
        "{} {} vs {}: duplicator_wins={} stages={} system_size={}\n",
        variant_label(&v),
        file_name(a),
        file_name(b),
        verdict.duplicator_wins,
        verdict.stages,
        verdict.system_size
    );
    Ok(Output { json, text, dot: None })
}

fn cube(a: &Path, b: &Path, n: usize, k: usize) -> Outcome {
    let (sa, sb) = (structure(a)?, structure(b)?);
    let verdicts = verdict_cube(&sa, &sb, n, k)?;
    let violations = monotonicity_violations(&verdicts);
    let mut text = String::new();
    for (v, w) in &verdicts {
        text.push_str(&format!("{} {w}\n", variant_label(v)));
    }
    text.push_str(&format!("monotone={}\n", violations.is_empty()));
    let json = json!({
        "a": file_name(a),
        "b": file_name(b),
        "verdicts": verdicts.iter().map(|(v, w)| json!({"variant": v.to_json_value(), "duplicator_wins": w})).collect::<Vec<_>>(),
        "monotone": violations.is_empty(),
        "violations": violations.iter().map(|(s, w)| json!([s.to_json_value(), w.to_json_value()])).collect::<Vec<_>>(),
    });
    Ok(Output { json, text, dot: None })
}

fn comonad(a: &Path, kind: ComonadKind, n: usize, k: usize, depth: usize, mutate: bool, dump: bool) -> Outcome {
    let sa = structure(a)?;
    let mutation = if mutate { Mutation::CorruptComult } else { Mutation::None };
    let (grade, dot, structure_json) = match kind {
        ComonadKind::Tk => (Grade::Pebbling { k, m: depth }, None, None),
        ComonadKind::Hnk => {
            GameVariant::new(n, k, false, false, false)?;
            let h = build_hnk(&sa, n, k, depth)?;
            (Grade::Hella { n, k, m: depth }, Some(hella_to_dot(&h)), dump.then(|| hella_to_json(&h)))
        }
    };
    let report = check_comonad_laws(&sa, grade, mutation)?;
    let mut json = report.to_json_value();
    if let Some(s) = structure_json {
        json["structure"] = s;
    }
    let text = format!("{} depth {}: {} elements checked, passed={}\n", report.comonad, report.depth, report.checked, report.passed());
    Ok(Output { json, text, dot })
}

/// Fails with an invariant error when a requested round trip did not close.
fn round_trip(ok: bool, what: &str) -> Result<Value, Error> {
    if ok {
        Ok(json!({"ok": true}))
    } else {
        Err(Error::Invariant(format!("round trip failed: {what}")))
    }
}

fn decompose(op: DecomposeOp) -> Outcome {
    match op {
        DecomposeOp::Search { a, grade, bound, round_trip: rt } => {
            let sa = structure(&a)?;
            match coalgebra_search(&sa, grade.n, grade.k, bound)? {
                None => Ok(Output { json: json!({"found": false}), text: "NONE\n".into(), dot: None }),
                Some(alpha) => {
                    let d = coalgebra_to_etd(&sa, &alpha)?;
                    let report = validate_etd(&sa, &d, Some((grade.n, grade.k)))?;
                    let mut json = json!({"found": true, "coalgebra": alpha.to_json_value(&sa), "etd": d.to_json_value(&sa), "report": report.to_json_value()});
                    if rt {
                        let again = etd_to_coalgebra(&sa, &d, grade.n, grade.k)?;
                        json["round_trip"] = round_trip(check_coalgebra_laws(&sa, &again).passed(), "coalgebra to decomposition and back")?;
                    }
                    let text = format!("found depth {} width {} arity {}\n", alpha.depth(), report.width, opt(report.arity));
                    Ok(Output { json, text, dot: Some(etd_to_dot(&sa, &d)) })
                }
            }
        }
        DecomposeOp::Validate { a, etd, n, k } => {
            let sa = structure(&a)?;
            let d = ExtendedTreeDecomposition::from_json(&sa, &read(&etd)?)?;
            let report = validate_etd(&sa, &d, n.zip(k))?;
            let text = format!(
                "valid={} width={} arity={} structured={}\n",
                report.valid,
                report.width,
                opt(report.arity),
                report.structured
            );
            Ok(Output { json: report.to_json_value(), text, dot: Some(etd_to_dot(&sa, &d)) })
        }
        DecomposeOp::ValidateTd { a, td } => {
            let sa = structure(&a)?;
            let t = TreeDecomposition::from_json(&sa, &read(&td)?)?;
            let report = validate_td(&sa, &t)?;
            let text = format!("valid={} width={}\n", report.valid, report.width);
            Ok(Output { json: report.to_json_value(), text, dot: Some(td_to_dot(&sa, &t)) })
        }
        DecomposeOp::Td2etd { a, td, k, round_trip: rt } => {
            let sa = structure(&a)?;
            let t = TreeDecomposition::from_json(&sa, &read(&td)?)?;
            let d = td_to_etd(&sa, &t, k)?;
            let report = validate_etd(&sa, &d, None)?;
            let mut json = json!({"etd": d.to_json_value(&sa), "report": report.to_json_value()});
            if rt {
                let back = validate_td(&sa, &etd_to_td(&sa, &d)?)?;
                json["round_trip"] = round_trip(back.valid && back.width <= k, "decomposition to extended and back")?;
            }
            let text = format!("{} nodes, width {}, arity {}\n", d.nodes.len(), report.width, opt(report.arity));
            Ok(Output { json, text, dot: Some(etd_to_dot(&sa, &d)) })
        }
        DecomposeOp::Etd2td { a, etd, round_trip: rt } => {
            let sa = structure(&a)?;
            let d = ExtendedTreeDecomposition::from_json(&sa, &read(&etd)?)?;
            let t = etd_to_td(&sa, &d)?;
            let report = validate_td(&sa, &t)?;
            let mut json = json!({"td": t.to_json_value(&sa), "report": report.to_json_value()});
            if rt {
                let back = validate_etd(&sa, &td_to_etd(&sa, &t, report.width)?, None)?;
                json["round_trip"] = round_trip(back.within(report.width, 1), "extended decomposition to plain and back")?;
            }
            let text = format!("{} bags, width {}\n", t.nodes.len(), report.width);
            Ok(Output { json, text, dot: Some(td_to_dot(&sa, &t)) })
        }
        DecomposeOp::Etd2coalg { a, etd, grade, empty_root, round_trip: rt } => {
            let sa = structure(&a)?;
            let mut d = ExtendedTreeDecomposition::from_json(&sa, &read(&etd)?)?;
            if empty_root {
                d = with_empty_root(&d)?;
            }
            let alpha = etd_to_coalgebra(&sa, &d, grade.n, grade.k)?;
            let laws = check_coalgebra_laws(&sa, &alpha);
            let mut json = json!({"coalgebra": alpha.to_json_value(&sa), "laws": laws.to_json_value()});
            if rt && laws.passed() {
                let back = validate_etd(&sa, &coalgebra_to_etd(&sa, &alpha)?, Some((grade.n, grade.k)))?;
                json["round_trip"] = round_trip(back.valid && back.structured, "coalgebra to decomposition")?;
            }
            let text = format!("depth {} laws_passed={}\n", alpha.depth(), laws.passed());
            Ok(Output { json, text, dot: None })
        }
        DecomposeOp::Coalg2etd { a, coalgebra, round_trip: rt } => {
            let sa = structure(&a)?;
            let alpha = Coalgebra::from_json(&sa, &read(&coalgebra)?)?;
            let d = coalgebra_to_etd(&sa, &alpha)?;
            let report = validate_etd(&sa, &d, Some((alpha.n, alpha.k)))?;
            let mut json = json!({"etd": d.to_json_value(&sa), "report": report.to_json_value()});
            if rt {
                let again = etd_to_coalgebra(&sa, &d, alpha.n, alpha.k)?;
                json["round_trip"] = round_trip(check_coalgebra_laws(&sa, &again).passed(), "decomposition to coalgebra")?;
            }
            let text = format!("{} nodes, width {}, arity {}, structured={}\n", d.nodes.len(), report.width, opt(report.arity), report.structured);
            Ok(Output { json, text, dot: Some(etd_to_dot(&sa, &d)) })
        }
        DecomposeOp::Hnk { a, grade, depth } => {
            let sa = structure(&a)?;
            let h = etd_of_hnk(&sa, grade.n, grade.k, depth)?;
            let report = validate_etd(&h.structure, &h.etd, Some((grade.n, grade.k)))?;
            let json = json!({"size": h.structure.size(), "etd": h.etd.to_json_value(&h.structure), "report": report.to_json_value()});
            let text = format!(
                "{} elements, {} nodes, valid={} width={} arity={} structured={}\n",
                h.structure.size(),
                h.etd.nodes.len(),
                report.valid,
                report.width,
                opt(report.arity),
                report.structured
            );
            Ok(Output { json, text, dot: Some(etd_to_dot(&h.structure, &h.etd)) })
        }
        DecomposeOp::Treewidth { a } => {
            let tw = treewidth_oracle(&structure(&a)?)?;
            Ok(Output { json: json!({"treewidth": tw}), text: format!("{tw}\n"), dot: None })
        }
    }
}

fn parse_assignment(a: &RelStructure, items: &[String]) -> Result<Vec<(String, usize)>, Failure> {
    items
        .iter()
        .map(|s| {
            let (v, x) = s.split_once('=').ok_or_else(|| Failure::Usage(format!("assignment {s:?} is not VAR=ELEMENT")))?;
            let e = a.index_of(x).ok_or_else(|| Failure::Lib(Error::validation("assign", format!("unknown element {x:?}"))))?;
            Ok((v.to_string(), e))
        })
        .collect()
}

fn logic(bound: usize, op: LogicOp) -> Outcome {
    let reg = OracleRegistry::builtin(bound);
    match op {
        LogicOp::Eval { a, formula, assign } => {
            let sa = structure(&a)?;
            let phi = Formula::from_json(&read(&formula)?)?;
            let asg = parse_assignment(&sa, &assign)?;
            let pairs: Vec<(&str, usize)> = asg.iter().map(|(v, x)| (v.as_str(), *x)).collect();
            let value = eval_formula(&sa, &phi, &pairs, &reg)?;
            Ok(Output { json: json!({"formula": phi.to_string(), "value": value}), text: format!("{value}\n"), dot: None })
        }
        LogicOp::Closure { oracle, class } => {
            let q = reg.get(&oracle)?;
            let report = check_closure(&q, Closure::parse(&class)?, bound)?;
            let mut json = report.to_json_value();
            json["oracle"] = q.to_json_value();
            let text = format!("{} {}-closed up to {}: {}\n", q.name, class, bound, report.passed());
            Ok(Output { json, text, dot: None })
        }
        LogicOp::Qtype { oracle } => {
            let data = qtype_unary(&reg.get(&oracle)?, bound)?;
            let json = data.to_json_value();
            let text = format!("{}\n", json["qtype"]);
            Ok(Output { json, text, dot: None })
        }
        LogicOp::Eliminate { formula } => {
            let phi = Formula::from_json(&read(&formula)?)?;
            let psi = unary_to_existential(&phi, &reg, bound)?;
            Ok(Output { json: psi.to_json_value(), text: format!("{psi}\n"), dot: None })
        }
        LogicOp::Generate { seed, count, depth, palette, negation } => {
            let names: Vec<&str> = palette.iter().map(String::as_str).collect();
            let mut g = FormulaGenerator::new(seed, Signature::of(&[("E", 2)]), &["x", "y"], &names, negation, &reg)?;
            let corpus = g.corpus(count, depth);
            let text = corpus.iter().map(|f| format!("{f}\n")).collect();
            Ok(Output { json: json!({"seed": seed, "formulas": corpus.iter().map(Formula::to_json_value).collect::<Vec<_>>()}), text, dot: None })
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = match cli.command {
        Command::Solve { a, b, variant, strategy } => solve(&a, &b, variant.variant()?, strategy),
        Command::Cube { a, b, n, k } => cube(&a, &b, n, k),
        Command::Comonad { a, comonad: kind, n, k, depth, mutate, dump } => comonad(&a, kind, n, k, depth, mutate, dump),
        Command::Decompose { op } => decompose(op),
        Command::Logic { bound, op } => logic(bound, op),
    }?;
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
        Format::Text => out.text,
        Format::Dot => out.dot.ok_or_else(|| Failure::Usage("this command has no DOT rendering".into()))?,
    };
    match cli.out {
        Some(path) => std::fs::write(&path, body).map_err(|e| Failure::Lib(Error::validation(path.display().to_string(), e.to_string()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| Failure::Lib(Error::Resource(e.to_string()))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orbibraid::center::{minimal_power, theta, theta_power_membership, u_exponent, CentralWitness};
use orbibraid::coset_enum::{enumerate_cosets, CosetResult};
use orbibraid::homomorphisms::{semidirect_normal_form, Assignment};
use orbibraid::presentations::{
    coxeterize, one_cone_semidirect, orbifold_braid, punctured_semidirect, pure_orbifold_braid, two_cone_semidirect,
    two_cone_semidirect_n3, Presentation, SquareFilter,
};
use orbibraid::prover::{prove_plan, replay, Budget, ProofResult, DEFAULT_MAX_NODES, DEFAULT_SLACK};
use orbibraid::quotients::{check_relations_in_quotient, cycle_notation, enumerate_monomial, WreathAssignment};
use orbibraid::suites::{plan_for, run_suite_with, Report, SuiteName, SuiteParams};
use orbibraid::words::{GeneratorId, Word};

const EXIT_UNKNOWN: u8 = 2;
const EXIT_OVERFLOW: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "orbibraid",
    version,
    about = "Presentations, rewriting proofs and finite quotients for orbifold braid groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a presentation in the text format.
    Emit(EmitArgs),
    /// Search for a rewriting proof of `lhs = rhs`.
    Prove(ProveArgs),
    /// Check that a generator assignment preserves every source relation.
    VerifyHom(VerifyHomArgs),
    /// Write a word of a semidirect presentation as `normal | quotient`.
    NormalForm(NormalFormArgs),
    /// Wreath and monomial quotients.
    Quotient {
        #[command(subcommand)]
        cmd: QuotientCmd,
    },
    /// Order of a finite presented group by coset enumeration.
    Order(OrderArgs),
    /// The central element theta_n and its powers.
    Center(CenterArgs),
    /// Run a named verification suite.
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct JsonOut {
    /// Also write the result as JSON.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    #[arg(long, env = "ORBIBRAID_MAX_NODES", default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[arg(long, env = "ORBIBRAID_SLACK", default_value_t = DEFAULT_SLACK)]
    slack: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        if self.max_nodes == 0 {
            bail!("--max-nodes must be at least 1");
        }
        Ok(Budget { max_nodes: self.max_nodes, slack: self.slack, ..Budget::default() })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Builder {
    /// Half twists and loops: --n, --punctures, --cones.
    Orbifold,
    /// Pure generators: --n, --punctures, --cones.
    Pure,
    /// Semidirect form with two cone points: --n, --m, --m2.
    TwoCone,
    /// The special three-strand form with two cone points: --m, --m2.
    TwoConeN3,
    /// Semidirect form with one cone point: --n, --m.
    OneCone,
    /// Semidirect form with a cone point and a puncture: --n, --m.
    Punctured,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long, value_enum)]
    builder: Builder,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    punctures: usize,
    /// Cone orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    cones: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    m2: u32,
    /// Add `g^2 = 1` for the half twists and their conjugates.
    #[arg(long)]
    coxeterize: bool,
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Args)]
struct ProveArgs {
    #[arg(long, value_name = "FILE")]
    pres: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lhs: String,
    #[arg(long, allow_hyphen_values = true)]
    rhs: String,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Write the chain as JSON lines.
    #[arg(long, value_name = "PATH")]
    emit_chain: Option<PathBuf>,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Args)]
struct VerifyHomArgs {
    #[arg(long, value_name = "FILE")]
    source: PathBuf,
    #[arg(long, value_name = "FILE")]
    target: PathBuf,
    /// Lines `gen -> word`.
    #[arg(long, value_name = "FILE")]
    map: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Args)]
struct NormalFormArgs {
    #[arg(long, value_name = "FILE")]
    pres: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    word: String,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Subcommand)]
enum QuotientCmd {
    /// Image of a word in the wreath quotient.
    Eval {
        #[arg(long, value_name = "FILE")]
        pres: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Give each puncture loop its own integer coordinate.
        #[arg(long)]
        track_punctures: bool,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Evaluate both sides of every relation in the wreath quotient.
    Check {
        #[arg(long, value_name = "FILE")]
        pres: PathBuf,
        #[arg(long)]
        track_punctures: bool,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Count the elements of G(m,p,n).
    Enum {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5_000_000)]
        limit: usize,
        #[command(flatten)]
        out: JsonOut,
    },
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long, value_name = "FILE")]
    pres: PathBuf,
    #[arg(long, env = "ORBIBRAID_MAX_COSETS", default_value_t = orbibraid::coset_enum::DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Args)]
struct CenterArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    power: u64,
    /// Run the center suite as well.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Args)]
struct SuiteArgs {
    name: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    m2: u32,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, env = "ORBIBRAID_MAX_COSETS", default_value_t = orbibraid::coset_enum::DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    #[command(flatten)]
    out: JsonOut,
}

fn read_pres(path: &Path) -> Result<Presentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Presentation::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn word_in(p: &Presentation, s: &str) -> Result<Word> {
    let w = Word::parse(s).with_context(|| format!("parsing word {s:?}"))?;
    p.check_word(&w)?;
    Ok(w)
}

fn write_json(out: &JsonOut, v: &Value) -> Result<()> {
    if let Some(path) = &out.json {
        let text = serde_json::to_string_pretty(v)? + "\n";
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_map(path: &Path) -> Result<BTreeMap<GeneratorId, Word>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut images = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (g, w) =
            line.split_once("->").ok_or_else(|| anyhow!("{}:{}: expected `gen -> word`", path.display(), i + 1))?;
        images.insert(GeneratorId::parse(g.trim())?, Word::parse(w.trim())?);
    }
    Ok(images)
}

fn proof_json(r: &ProofResult) -> Value {
    json!({
        "status": r.status,
        "lhs": r.lhs.to_string(),
        "rhs": r.rhs.to_string(),
        "nodes": r.nodes_explored,
        "chain_len": r.chain.len(),
    })
}

fn report_exit(report: &Report) -> u8 {
    report.outcome().exit_code() as u8
}

fn print_report(report: &Report) {
    for e in &report.entries {
        println!(
            "{:<8} {:<48} nodes={} chain={}",
            format!("{:?}", e.status).to_lowercase(),
            e.tag,
            e.nodes,
            e.chain_len
        );
    }
    let failed: Vec<&str> = report.failures().map(|e| e.tag.as_str()).collect();
    if failed.is_empty() {
        println!("{}: pass ({} entries)", report.suite, report.entries.len());
    } else {
        println!(
            "{}: FAIL ({} of {} entries): {}",
            report.suite,
            failed.len(),
            report.entries.len(),
            failed.join(", ")
        );
    }
}

fn emit(a: EmitArgs) -> Result<u8> {
    let mut p = match a.builder {
        Builder::Orbifold => orbifold_braid(a.n, a.punctures, &a.cones)?,
        Builder::Pure => pure_orbifold_braid(a.n, a.punctures, &a.cones)?,
        Builder::TwoCone => two_cone_semidirect(a.n, a.m, a.m2)?,
        Builder::TwoConeN3 => two_cone_semidirect_n3(a.m, a.m2)?,
        Builder::OneCone => one_cone_semidirect(a.n, a.m)?,
        Builder::Punctured => punctured_semidirect(a.n, a.m)?,
    };
    if a.coxeterize {
        p = coxeterize(&p, SquareFilter::HalfTwists);
    }
    let text = p.to_text();
    match &a.output {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    write_json(
        &a.out,
        &json!({
            "name": p.name,
            "params": p.params,
            "generators": p.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "relations": p.relations.iter().map(|r| json!({"lhs": r.lhs.to_string(), "rhs": r.rhs.to_string(), "tag": r.tag})).collect::<Vec<_>>(),
        }),
    )?;
    Ok(0)
}

fn prove_cmd(a: ProveArgs) -> Result<u8> {
    let p = read_pres(&a.pres)?;
    let (lhs, rhs) = (word_in(&p, &a.lhs)?, word_in(&p, &a.rhs)?);
    let budget = a.budget.budget()?;
    let r = prove_plan(&p, &lhs, &rhs, &plan_for(&p, &lhs, &rhs), &budget)?;
    if r.is_proved() {
        replay(&p, &lhs, &rhs, &r.chain).map_err(|e| anyhow!("internal error: chain does not replay: {e}"))?;
    }
    println!("{} nodes={} chain={}", r.status, r.nodes_explored, r.chain.len());
    if let Some(path) = &a.emit_chain {
        let mut text = String::new();
        for (i, st) in r.chain.iter().enumerate() {
            let line = json!({
                "step": i,
                "position": st.position,
                "relation": st.piece.relation,
                "tag": st.tag,
                "direction": st.direction(),
                "word": st.word.to_string(),
            });
            text.push_str(&line.to_string());
            text.push('\n');
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    write_json(&a.out, &proof_json(&r))?;
    Ok(if r.is_proved() { 0 } else { EXIT_UNKNOWN })
}

fn verify_hom(a: VerifyHomArgs) -> Result<u8> {
    let source = read_pres(&a.source)?;
    let target = read_pres(&a.target)?;
    let asg = Assignment::new(source, target, read_map(&a.map)?)?;
    let budget = a.budget.budget()?;
    let mut entries = Vec::new();
    let mut all = true;
    for o in asg.obligations("hom") {
        let r = prove_plan(&asg.target, &o.lhs, &o.rhs, &plan_for(&asg.target, &o.lhs, &o.rhs), &budget)?;
        println!("{:<8} {:<40} nodes={} chain={}", r.status, o.tag, r.nodes_explored, r.chain.len());
        all &= r.is_proved();
        let mut e = proof_json(&r);
        e["tag"] = json!(o.tag);
        entries.push(e);
    }
    println!("{}", if all { "pass" } else { "FAIL" });
    write_json(&a.out, &json!({"entries": entries, "pass": all}))?;
    Ok(if all { 0 } else { EXIT_UNKNOWN })
}

fn normal_form(a: NormalFormArgs) -> Result<u8> {
    let p = read_pres(&a.pres)?;
    let w = word_in(&p, &a.word)?;
    let f = semidirect_normal_form(&p, &w)?;
    println!("{f}");
    let q: BTreeMap<String, u32> = f.quotient.iter().map(|(y, e)| (y.to_string(), *e)).collect();
    write_json(&a.out, &json!({"normal_part": f.normal_part.to_string(), "quotient": q}))?;
    Ok(0)
}

fn quotient(cmd: QuotientCmd) -> Result<u8> {
    match cmd {
        QuotientCmd::Eval { pres, word, track_punctures, out } => {
            let p = read_pres(&pres)?;
            let w = word_in(&p, &word)?;
            let a = WreathAssignment::for_presentation(&p, track_punctures)?;
            let e = a.eval(&w)?;
            let exps = a.shape.exponent_totals(&e);
            println!("{}", a.shape.format(&e));
            write_json(&out, &json!({"perm": cycle_notation(&e.perm), "exponents": e.exps, "totals": exps}))?;
            Ok(0)
        }
        QuotientCmd::Check { pres, track_punctures, out } => {
            let p = read_pres(&pres)?;
            let a = WreathAssignment::for_presentation(&p, track_punctures)?;
            let checks = check_relations_in_quotient(&p, &a)?;
            for c in &checks {
                println!("{:<5} {:<24} {}", if c.holds { "ok" } else { "FAIL" }, c.tag, c.relation);
            }
            let pass = checks.iter().all(|c| c.holds);
            write_json(&out, &json!({"checks": checks, "pass": pass}))?;
            Ok(if pass { 0 } else { 1 })
        }
        QuotientCmd::Enum { m, p, n, limit, out } => {
            let order = enumerate_monomial(m, p, n, limit)?.len();
            println!("{order}");
            write_json(&out, &json!({"m": m, "p": p, "n": n, "order": order}))?;
            Ok(0)
        }
    }
}

fn order(a: OrderArgs) -> Result<u8> {
    let p = read_pres(&a.pres)?;
    let r = enumerate_cosets(&p, a.max_cosets.max(1));
    match r {
        CosetResult::Order(k) => println!("{k}"),
        CosetResult::Overflow => println!("overflow"),
    }
    let order = match r {
        CosetResult::Order(k) => json!(k),
        CosetResult::Overflow => json!("overflow"),
    };
    write_json(&a.out, &json!({"order": order, "max_cosets": a.max_cosets}))?;
    Ok(if r == CosetResult::Overflow { EXIT_OVERFLOW } else { 0 })
}

fn center(a: CenterArgs) -> Result<u8> {
    let witness = CentralWitness::new(a.n, a.m)?;
    let th = theta(a.n);
    let l = minimal_power(a.n, a.m);
    let e = u_exponent(&th.pow(a.power as i64), a.m);
    println!("theta_{} = {}", a.n, witness.theta);
    println!("u-exponent of theta^{} = {} (mod {})", a.power, e, a.m);
    println!("l = {l}");
    let member = if a.n >= 2 { Some(theta_power_membership(a.n, a.m, a.power)?.member) } else { None };
    match member {
        Some(true) => println!("theta^{} lies in the normal subgroup", a.power),
        Some(false) => println!("theta^{} does not lie in the normal subgroup", a.power),
        None => println!("membership needs n >= 2"),
    }
    let mut v = json!({
        "n": a.n,
        "m": a.m,
        "power": a.power,
        "theta": th.to_string(),
        "u_exponent": e,
        "l": l,
        "member": member,
    });
    let mut code = 0;
    if a.verify {
        let report = run_suite_with(
            SuiteName::Center,
            &SuiteParams::new(a.n, a.m, 2),
            &a.budget.budget()?,
            orbibraid::coset_enum::DEFAULT_MAX_COSETS,
        )?;
        print_report(&report);
        code = report_exit(&report);
        v["report"] = serde_json::to_value(&report)?;
    }
    write_json(&a.out, &v)?;
    Ok(code)
}

fn suite(a: SuiteArgs) -> Result<u8> {
    let name: SuiteName = a.name.parse()?;
    let report = run_suite_with(name, &SuiteParams::new(a.n, a.m, a.m2), &a.budget.budget()?, a.max_cosets)?;
    print_report(&report);
    if let Some(path) = &a.out.json {
        fs::write(path, report.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report_exit(&report))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Emit(a) => emit(a),
        Cmd::Prove(a) => prove_cmd(a),
        Cmd::VerifyHom(a) => verify_hom(a),
        Cmd::NormalForm(a) => normal_form(a),
        Cmd::Quotient { cmd } => quotient(cmd),
        Cmd::Order(a) => order(a),
        Cmd::Center(a) => center(a),
        Cmd::Suite(a) => suite(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

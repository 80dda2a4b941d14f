use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bfcalc::abelian::IntMatrix;
use bfcalc::cells::StableComplex;
use bfcalc::cohomotopy::{
    complex_cohomotopy, cp_cohomotopy, golden_table, hurewicz_table, restriction_map,
    stunted_cohomotopy, table_cases,
};
use bfcalc::engine::{
    add_catalog, adjunction_verdict, bf_dimension, condition_star, decomposition_verdict, infer,
    infer_in_place, replay, simple_type_verdict, BfState, ComplementKind, DecompositionVerdict,
    FactKey, FlagKind, KnowledgeBase, SwFact,
};
use bfcalc::fourman::{catalog, ManifoldDescriptor, SurfaceData};
use bfcalc::par::Execution;
use bfcalc::session::Session;

use crate::{Cli, Command, GroupCmd, KbCmd, SessionCmd, SurfaceArgs};

pub const EXIT_OBSTRUCTED: u8 = 2;
pub const EXIT_INCONSISTENT: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<bfcalc::Error>() {
                Some(bfcalc::Error::Inconsistent(_)) => EXIT_INCONSISTENT,
                Some(bfcalc::Error::Parse(_)) => EXIT_USAGE,
                _ if e.downcast_ref::<UsageError>().is_some() => EXIT_USAGE,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Group(g) => group(g),
        Command::Table { n_max, sequential } => {
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let cases = table_cases(1..=n_max, 0..=6);
            for (&(n, j), h) in cases.iter().zip(golden_table(&cases, exec)) {
                let h = h?;
                println!("n={n} j={j} kernel={} cokernel={}", h.kernel, h.cokernel);
            }
            Ok(0)
        }
        Command::Catalog => {
            for name in catalog::NAMES {
                let x = catalog::by_name(name, Some(2))?;
                println!("{name:7} {x}");
            }
            Ok(0)
        }
        Command::Session(SessionCmd::Init { path }) => {
            if path.exists() {
                return Err(usage(format!("{} already exists", path.display())));
            }
            Session::new().save(&path)?;
            println!("created {}", path.display());
            Ok(0)
        }
        Command::Session(SessionCmd::Show { path }) => {
            let s = Session::load(&path)?;
            for e in s.kb.manifolds() {
                println!("MANIFOLD {}", e.descriptor);
            }
            for (k, f) in s.kb.facts() {
                let d = f.d.map_or("?".to_string(), |d| d.to_string());
                println!("FACT {k} d={d} BF = {} SW = {}", f.bf, f.sw);
            }
            println!(
                "{} relations, {} history entries",
                s.kb.relations().len(),
                s.history.len()
            );
            Ok(0)
        }
        Command::Kb(args) => kb(&args.session, args.op),
    }
}

fn group(g: GroupCmd) -> Result<u8> {
    match g {
        GroupCmd::Cp { n, j, audit } => {
            println!("{}", cp_cohomotopy(n, j)?);
            if audit && (1..=3).contains(&j) {
                for line in stunted_cohomotopy(n, j)?.derivation {
                    println!("  {line}");
                }
            }
        }
        GroupCmd::Complex { cells, m, audit } => {
            let x: StableComplex = cells.parse()?;
            let r = complex_cohomotopy(&x, m)?;
            println!("{}", r.group);
            if audit {
                for line in r.derivation {
                    println!("  {line}");
                }
            }
        }
        GroupCmd::Hurewicz { n, j } => {
            let h = hurewicz_table(n, j)?;
            println!("kernel {}", h.kernel);
            println!("cokernel {}", h.cokernel);
        }
        GroupCmd::Restrict { n, j, s } => {
            let f = restriction_map(n, j, s)?;
            println!("{} -> {}", f.source(), f.target());
            for c in 0..f.source().ngens() {
                let mut e = vec![0; f.source().ngens()];
                e[c] = 1;
                println!("  g{c} -> {:?}", f.target().reduce(&f.apply(&e)));
            }
        }
    }
    Ok(0)
}

fn parse_vec(kb: &KnowledgeBase, manifold: &str, text: &str) -> Result<Vec<i64>> {
    let text = text.trim();
    if text == "zero" || text == "0*" {
        return Ok(vec![0; kb.manifold(manifold)?.rank()]);
    }
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("bad integer `{t}`")))
        })
        .collect()
}

/// `NAME[1,2,3]` or `NAME[zero]`.
fn parse_fact(kb: &KnowledgeBase, text: &str) -> Result<FactKey> {
    let (name, rest) = text
        .split_once('[')
        .ok_or_else(|| usage(format!("expected NAME[c1], got `{text}`")))?;
    let inner = rest
        .strip_suffix(']')
        .ok_or_else(|| usage(format!("missing `]` in `{text}`")))?;
    Ok(FactKey::new(name, parse_vec(kb, name, inner)?))
}

fn parse_form(text: &str) -> Result<IntMatrix> {
    if text.trim().is_empty() {
        return Ok(IntMatrix::zeros(0, 0));
    }
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| usage(format!("bad form entry `{t}`")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(usage("the form must be square"));
    }
    Ok(IntMatrix::from_rows(&rows))
}

fn parse_surface(kb: &KnowledgeBase, manifold: &str, s: &SurfaceArgs) -> Result<SurfaceData> {
    let class = parse_vec(kb, manifold, &s.class)?;
    match (s.genus, s.positive) {
        (Some(g), None) => Ok(SurfaceData::embedded(class, g)),
        (None, Some(p)) => Ok(SurfaceData::immersed_sphere(class, p, s.negative)),
        _ => Err(usage(
            "give exactly one of --genus (embedded) or --positive (immersed sphere)",
        )),
    }
}

fn names(list: &str) -> Vec<String> {
    list.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Prints the verdict and its chain, then checks that the chain replays.
fn print_fact(kb: &KnowledgeBase, key: &FactKey) -> Result<()> {
    let Some(f) = kb.fact(key) else {
        println!("BF({key}) = Unknown");
        return Ok(());
    };
    println!("BF({key}) = {}", f.bf);
    for (at, j) in kb.chain(key) {
        println!("FACT {at} {j}");
    }
    let replayed = replay(kb, key)?;
    if replayed == f.bf {
        println!("REPLAY ok");
    } else {
        println!("REPLAY mismatch: {replayed}");
    }
    Ok(())
}

fn kb(path: &Path, op: KbCmd) -> Result<u8> {
    let mut s = Session::load(path).with_context(|| format!("loading {}", path.display()))?;
    let entry = format!("{op:?}");
    let mut save = true;
    let code = match op {
        KbCmd::Add { name, m } => {
            match add_catalog(&mut s.kb, &name, m)? {
                Some(k) => println!("added {} with canonical structure {k}", k.manifold),
                None => println!("added {name}"),
            }
            0
        }
        KbCmd::Define {
            name,
            b1,
            form,
            symplectic,
        } => {
            let x = ManifoldDescriptor::closed(&name, b1, parse_form(&form)?)?
                .with_symplectic(symplectic);
            for w in x.warnings() {
                eprintln!("warning: {w}");
            }
            println!("defined {x}");
            s.kb.add_manifold(x)?;
            0
        }
        KbCmd::Assert {
            fact,
            bf,
            sw,
            source,
        } => {
            let key = parse_fact(&s.kb, &fact)?;
            let bf: BfState = bf.as_deref().map_or(Ok(BfState::Unknown), str::parse)?;
            let sw: SwFact = sw.as_deref().map_or(Ok(SwFact::Unknown), str::parse)?;
            s.kb.assert_fact(&key, bf, sw, &source)?;
            println!("asserted {key}");
            0
        }
        KbCmd::Flag {
            manifold,
            flag,
            value,
        } => {
            let kind: FlagKind = flag.parse()?;
            s.kb.assert_flag(&manifold, kind, value)?;
            println!("{manifold}: {kind} = {value}");
            0
        }
        KbCmd::Surface { manifold, surface } => {
            let sd = parse_surface(&s.kb, &manifold, &surface)?;
            s.kb.add_surface(&manifold, sd)?;
            println!("recorded surface on {manifold}");
            0
        }
        KbCmd::Blowup { fact, r } => {
            let key = parse_fact(&s.kb, &fact)?;
            let out = s.kb.declare_blowup(&key, r)?;
            println!("declared {out}");
            0
        }
        KbCmd::Sum { pieces, name } => {
            let keys: Vec<FactKey> = pieces
                .iter()
                .map(|p| parse_fact(&s.kb, p))
                .collect::<Result<_>>()?;
            let out = s.kb.declare_connected_sum(&keys, name.as_deref())?;
            println!("declared {out}");
            0
        }
        KbCmd::Complement { a, b } => {
            let (a, b) = (parse_fact(&s.kb, &a)?, parse_fact(&s.kb, &b)?);
            let i =
                s.kb.declare_common_complement(&a, &b, ComplementKind::General)?;
            println!("declared relation #{i}");
            0
        }
        KbCmd::Infer { sequential } => {
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let stats = infer_in_place(&mut s.kb, exec)?;
            println!(
                "fixed point after {} rounds, {} changes",
                stats.rounds, stats.changes
            );
            0
        }
        KbCmd::Query { fact } => {
            save = false;
            let kb = infer(&s.kb, Execution::Parallel)?;
            let key = parse_fact_lenient(&kb, &fact)?;
            print_fact(&kb, &key)?;
            0
        }
        KbCmd::Star { fact } => {
            save = false;
            let kb = infer(&s.kb, Execution::Parallel)?;
            let key = parse_fact(&kb, &fact)?;
            println!("condition (*) for {key}: {}", condition_star(&kb, &key));
            0
        }
        KbCmd::Dimension { manifold } => {
            save = false;
            let kb = infer(&s.kb, Execution::Parallel)?;
            println!("dim_BF({manifold}) = {}", bf_dimension(&kb, &manifold)?);
            0
        }
        KbCmd::CheckDecomposition { x, x_prime } => {
            save = false;
            let v = decomposition_verdict(&s.kb, &names(&x), &names(&x_prime))?;
            println!("{v}");
            match v {
                DecompositionVerdict::Obstructed(_) => EXIT_OBSTRUCTED,
                _ => 0,
            }
        }
        KbCmd::CheckAdjunction {
            manifold,
            k,
            surface,
        } => {
            let k = parse_vec(&s.kb, &manifold, &k)?;
            let sd = parse_surface(&s.kb, &manifold, &surface)?;
            let v = adjunction_verdict(&mut s.kb, &manifold, &k, &sd)?;
            println!("{v}");
            0
        }
        KbCmd::CheckType { manifold } => {
            save = false;
            println!("{manifold}: {}", simple_type_verdict(&s.kb, &manifold)?);
            0
        }
    };
    if save {
        s.record(entry);
        s.save(path)?;
    }
    Ok(code)
}

/// Like [`parse_fact`], but an unknown manifold is not an error: the
/// answer is simply Unknown.
fn parse_fact_lenient(kb: &KnowledgeBase, text: &str) -> Result<FactKey> {
    match parse_fact(kb, text) {
        Ok(k) => Ok(k),
        Err(e) if e.downcast_ref::<bfcalc::Error>().is_some() => {
            let name = text.split_once('[').map_or(text, |(n, _)| n);
            Ok(FactKey::new(name, Vec::new()))
        }
        Err(e) => Err(e),
    }
}

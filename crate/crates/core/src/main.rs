use clap::{Args, Parser, Subcommand};
use plu::conditions::{check_star, check_star_n, is_projective_dual, star_failure_witness};
use plu::connectivity::{is_connected, is_n_connected, max_connected_with, max_n_connected_with};
use plu::duality::{dual_lattice, dual_poset, parse_algebra, variety_membership};
use plu::io::{map_json, morphism_json, poset_json, read_poset};
use plu::morphism::{check_map, count_pmorphisms, enumerate_pmorphisms_with};
use plu::oracle::verify_type_with;
use plu::product::{inject_left, inject_right, odot};
use plu::typecheck::{minimal_complete_set, type_report, UnificationType};
use plu::witness::ChainContext;
use plu::{Budget, Error, Poset, Variety};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "plu", version, about = "Unification types of finite posets dual to p-lattices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Target variety: b0, b1, b2, ..., omega.
    #[arg(long, global = true, default_value = "omega")]
    variety: Variety,
    /// Also write the relevant poset as Graphviz DOT.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Worker threads for the parallel searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check (*), (*_n), projectivity, or a p-morphism document.
    Check {
        file: PathBuf,
        #[arg(long, conflicts_with_all = ["star_n", "projective", "pmorphism"])]
        star: bool,
        #[arg(long, value_name = "N", conflicts_with_all = ["projective", "pmorphism"])]
        star_n: Option<usize>,
        /// Projectivity in --variety.
        #[arg(long, conflicts_with = "pmorphism")]
        projective: bool,
        /// Treat the file as a morphism document.
        #[arg(long)]
        pmorphism: bool,
    },
    /// Unification type with evidence.
    Type { file: PathBuf },
    /// Maximal connected (or n-connected) sets, or a membership test.
    Connected {
        file: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        /// List the maximal sets (the default).
        #[arg(long, conflicts_with = "set")]
        max: bool,
        /// Comma-separated labels to test instead of listing maximal sets.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<String>>,
    },
    /// The product X ⊙ Y.
    Product { x: PathBuf, y: PathBuf },
    /// Convert between posets and p-lattices.
    Dual {
        #[command(subcommand)]
        dir: DualDir,
    },
    /// All p-morphisms X -> Y.
    Morphisms {
        x: PathBuf,
        y: PathBuf,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// The undominated unifier chain for a type-0 target.
    Witness {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        /// Directory for u_m.json files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded verification of the classification.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand)]
enum DualDir {
    /// Poset document to its down-set algebra.
    ToAlgebra { file: PathBuf },
    /// Algebra document to its join-irreducible poset.
    ToPoset { file: PathBuf },
}

#[derive(Subcommand)]
enum OracleOp {
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
}

enum Failure {
    Input(Error),
    Budget(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::SizeLimitExceeded(_) => Failure::Budget(e),
            e => Failure::Input(e),
        }
    }
}

/// A report plus whether the verification it describes passed.
struct Outcome {
    body: Value,
    ok: bool,
    dot: Option<String>,
}

impl Outcome {
    fn ok(body: Value) -> Outcome {
        Outcome { body, ok: true, dot: None }
    }

    fn dot(mut self, p: &Poset) -> Outcome {
        self.dot = Some(p.to_dot());
        self
    }
}

fn set_labels(p: &Poset, sets: &[plu::BitSet]) -> Value {
    sets.iter().map(|s| json!(p.labels_of(s))).collect()
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(Error::Parse(format!("{}: {e}", path.display()))))
}

fn run(cmd: Cmd, g: &Global, budget: &Budget) -> Result<Outcome, Failure> {
    let v = g.variety;
    Ok(match cmd {
        Cmd::Check {
            file,
            star_n,
            projective,
            pmorphism,
            ..
        } => {
            if pmorphism {
                let text = read_text(&file)?;
                let (dom, cod, map) = parse_unchecked_morphism(&text, file.parent())?;
                let res = check_map(&dom, &cod, &map);
                let body = match &res {
                    Ok(()) => json!({ "ok": true }),
                    Err(viol) => json!({ "ok": false, "violation": viol.to_string() }),
                };
                return Ok(Outcome { body, ok: res.is_ok(), dot: None });
            }
            let p = read_poset(&file)?;
            let (ok, cap) = if projective {
                (is_projective_dual(&p, v), v.level().unwrap_or(usize::MAX))
            } else if let Some(n) = star_n {
                (check_star_n(&p, n), n)
            } else {
                (check_star(&p), usize::MAX)
            };
            let mut body = json!({ "ok": ok });
            if projective {
                body["variety"] = json!(v);
            }
            if !ok {
                if let Some(f) = star_failure_witness(&p, cap) {
                    body["failure"] = json!(f);
                } else if projective && v.level().is_some_and(|n| !p.in_pn(n)) {
                    body["failure"] = json!(format!("max |min(x)| is {}", p.max_min_size()));
                }
            }
            Outcome { body, ok, dot: None }.dot(&p)
        }
        Cmd::Type { file } => {
            let p = Arc::new(read_poset(&file)?);
            let report = type_report(&p, v, budget)?;
            let mut body = serde_json::to_value(&report).expect("reports serialize");
            if report.utype != UnificationType::TypeZero {
                let set: Vec<Value> = minimal_complete_set(&p, v, budget)?
                    .iter()
                    .map(|u| json!({ "dom": poset_json(u.dom()), "map": map_json(u) }))
                    .collect();
                body["minimal_complete_set"] = Value::Array(set);
            }
            Outcome::ok(body).dot(&p)
        }
        Cmd::Connected { file, n, set, .. } => {
            let p = read_poset(&file)?;
            if let Some(labels) = set {
                let s = p.set_of(&labels)?;
                let c = match n {
                    Some(n) => is_n_connected(&p, &s, n)?,
                    None => is_connected(&p, &s),
                };
                Outcome::ok(json!({ "n": n, "set": labels, "connected": c }))
            } else {
                let fam = match n {
                    Some(n) => max_n_connected_with(&p, n, budget)?,
                    None => max_connected_with(&p, budget)?,
                };
                Outcome::ok(json!({
                    "n": n,
                    "exhaustive": fam.exhaustive,
                    "sets": set_labels(&p, &fam.sets),
                }))
            }
            .dot(&p)
        }
        Cmd::Product { x, y } => {
            let (x, y) = (Arc::new(read_poset(&x)?), Arc::new(read_poset(&y)?));
            let z = odot(&x, &y)?;
            let mut body = poset_json(&z);
            body["inject_left"] = map_json(&inject_left(&x, &y)?);
            body["inject_right"] = map_json(&inject_right(&x, &y)?);
            Outcome::ok(body).dot(&z)
        }
        Cmd::Dual { dir } => match dir {
            DualDir::ToAlgebra { file } => {
                let p = read_poset(&file)?;
                let l = dual_lattice(&p)?;
                let mut body = l.to_json();
                body["variety"] = json!(variety_membership(&l));
                Outcome::ok(body).dot(l.order())
            }
            DualDir::ToPoset { file } => {
                let l = parse_algebra(&read_text(&file)?)?;
                let p = dual_poset(&l);
                let mut body = poset_json(&p);
                body["variety"] = json!(variety_membership(&l));
                Outcome::ok(body).dot(&p)
            }
        },
        Cmd::Morphisms { x, y, count } => {
            let (x, y) = (Arc::new(read_poset(&x)?), Arc::new(read_poset(&y)?));
            if count {
                Outcome::ok(json!({ "count": count_pmorphisms(&x, &y, budget)? }))
            } else {
                let all = enumerate_pmorphisms_with(&x, &y, budget)?;
                let maps: Vec<Value> = all.iter().map(map_json).collect();
                Outcome::ok(json!({ "count": maps.len(), "morphisms": maps }))
            }
        }
        Cmd::Witness { file, steps, out } => witness(&file, v, steps, out.as_deref(), budget)?,
        Cmd::Oracle {
            op: OracleOp::Verify { file, bound },
        } => {
            let p = Arc::new(read_poset(&file)?);
            let rep = verify_type_with(&p, v, bound, budget)?;
            let ok = rep.passed();
            let mut body = serde_json::to_value(&rep).expect("reports serialize");
            body["claim"] = json!(format!("verified up to bound {bound}"));
            Outcome {
                body,
                ok,
                dot: None,
            }
            .dot(&p)
        }
    })
}

/// A morphism document parsed without the p-morphism check.
fn parse_unchecked_morphism(text: &str, base: Option<&Path>) -> Result<(Poset, Poset, Vec<usize>), Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let side = |key: &str| -> Result<Poset, Failure> {
        match v.get(key) {
            Some(Value::String(f)) => Ok(read_poset(&base.map_or_else(|| PathBuf::from(f), |b| b.join(f)))?),
            Some(doc) => Ok(plu::io::parse_poset(&doc.to_string())?),
            None => Err(Error::Parse(format!("missing \"{key}\"")).into()),
        }
    };
    let (dom, cod) = (side("dom")?, side("cod")?);
    let map: std::collections::HashMap<String, String> = v
        .get("map")
        .map(|m| serde_json::from_value(m.clone()))
        .transpose()
        .map_err(|e| Error::Parse(e.to_string()))?
        .ok_or_else(|| Error::Parse("missing \"map\"".into()))?;
    for k in map.keys() {
        dom.idx(k)?;
    }
    let idx = dom
        .labels()
        .iter()
        .map(|l| cod.idx(map.get(l).ok_or_else(|| Error::PartialMap(l.clone()))?))
        .collect::<plu::Result<Vec<usize>>>()?;
    Ok((dom, cod, idx))
}

fn witness(file: &Path, v: Variety, steps: usize, out: Option<&Path>, budget: &Budget) -> Result<Outcome, Failure> {
    let p = Arc::new(read_poset(file)?);
    let ctx = ChainContext::for_target(p.clone(), v, budget)?;
    let lo = ctx.level.max(1);
    let mut chain = Vec::new();
    let mut ok = true;
    let mut last = None;
    for m in lo..lo + steps {
        let entry = match ctx.chain_link(m) {
            Ok(_) => {
                let um = ctx.chain(m)?;
                let mut e = Map::new();
                e.insert("m".into(), json!(m));
                e.insert("domain_size".into(), json!(um.dom().len()));
                e.insert("link".into(), json!("ok"));
                if let Some(dir) = out {
                    let path = dir.join(format!("u_{m}.json"));
                    let text = serde_json::to_string_pretty(&morphism_json(&um)).expect("serializes") + "\n";
                    std::fs::write(&path, text)
                        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    e.insert("file".into(), json!(path.display().to_string()));
                }
                last = Some(um);
                Value::Object(e)
            }
            Err(e @ (Error::ChainInvalid(_) | Error::ContextMismatch(_))) => {
                ok = false;
                json!({ "m": m, "link": e.to_string() })
            }
            Err(e) => return Err(e.into()),
        };
        let stop = !ok;
        chain.push(entry);
        if stop {
            break;
        }
    }
    let body = json!({
        "context": ctx.summary(),
        "chain": chain,
    });
    let out = Outcome { body, ok, dot: None };
    Ok(match last {
        Some(u) => out.dot(u.dom()),
        None => out,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let budget = Budget::from_env();
    match run(cli.cmd, &cli.global, &budget) {
        Ok(out) => {
            let mut body = out.body;
            if let Value::Object(m) = &mut body {
                m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
                m.insert("budget".into(), json!(budget.nodes));
            }
            let text = serde_json::to_string_pretty(&body).expect("serializes");
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if let (Some(path), Some(dot)) = (&cli.global.dot, out.dot) {
                if let Err(e) = std::fs::write(path, dot) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

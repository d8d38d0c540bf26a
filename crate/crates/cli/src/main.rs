use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cwm_core::engine::{decide_entailment_with, preferred_types, Options, DEFAULT_BUDGET};
use cwm_core::explain::explain;
use cwm_core::gen::{gen_case, Limits};
use cwm_core::model::{KnowledgeBase, Query};
use cwm_core::normalize::{normalize_kb, ClassName};
use cwm_core::oracle::oracle_decide;
use cwm_core::parser::{parse_concept, parse_kb, parse_query, render_kb};
use cwm_core::saturation::classify;
use cwm_core::Error;

type CliResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

/// Concept-wise multipreference reasoning over weighted EL⊥ knowledge bases.
#[derive(Parser)]
#[command(name = "cwm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a query; exit 0 if entailed, 1 if not.
    Entails {
        #[command(flatten)]
        kb: KbArg,
        /// `T(C) <= D` or `C <= D`.
        #[arg(long)]
        query: String,
        #[arg(long)]
        json: bool,
        /// Cross-check the verdict with the brute-force oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Print all strict subsumptions between concept names.
    Classify {
        #[command(flatten)]
        kb: KbArg,
    },
    /// Print the preferred types of a typical instance of a concept.
    Types {
        #[command(flatten)]
        kb: KbArg,
        /// The subject concept.
        #[arg(long)]
        query: String,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Print the normal form, fresh names included.
    Normalize {
        #[command(flatten)]
        kb: KbArg,
    },
    /// Compare the engine with the oracle on random knowledge bases.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Put nominals into the generated axioms.
        #[arg(long)]
        nominals: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        /// Directory for the minimized reproducer.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct KbArg {
    #[arg(long = "kb")]
    path: PathBuf,
}

impl KbArg {
    fn load(&self) -> CliResult<KnowledgeBase> {
        let text = fs::read_to_string(&self.path).map_err(|e| format!("{}: {e}", self.path.display()))?;
        Ok(parse_kb(&text)?)
    }
}

fn opts(budget: u64) -> Options {
    Options { budget: usize::try_from(budget).unwrap_or(usize::MAX) }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `CWM_THREADS` caps the worker pool; unset or 0 leaves it automatic.
fn configure_threads() {
    let Ok(v) = std::env::var("CWM_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => eprintln!("warning: ignoring CWM_THREADS={v:?}"),
    }
}

fn run(cmd: Command) -> CliResult<ExitCode> {
    match cmd {
        Command::Entails { kb, query, json, oracle, budget } => {
            let kb = kb.load()?;
            let q = parse_query(&query)?;
            let v = decide_entailment_with(&kb, &q, opts(budget))?;
            if oracle {
                let o = oracle_decide(&kb, &q)?;
                if (o.entailed, o.vacuous) != (v.entailed, v.vacuous) {
                    return Err(format!(
                        "oracle disagrees on {q}: engine entailed={} vacuous={}, oracle entailed={} vacuous={}",
                        v.entailed, v.vacuous, o.entailed, o.vacuous
                    )
                    .into());
                }
                if !json {
                    eprintln!("oracle agrees ({} candidates, {} preferred)", o.candidates, o.preferred);
                }
            }
            if json {
                println!("{}", v.to_json());
            } else {
                print!("{}", explain(&v, &v.normalized));
                println!("{} candidate types, {} preferred, {:.2?}", v.candidate_count, v.preferred.len(), v.elapsed);
            }
            Ok(if v.entailed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Classify { kb } => {
            let nkb = normalize_kb(&kb.load()?)?;
            let subs: Vec<_> = classify(&nkb)
                .into_iter()
                .filter_map(|(a, b)| match (a, b) {
                    (ClassName::Named(a), ClassName::Named(b))
                        if !nkb.fresh_registry.contains_key(&a) && !nkb.fresh_registry.contains_key(&b) =>
                    {
                        Some((a, b))
                    }
                    _ => None,
                })
                .collect();
            for (a, b) in subs {
                println!("{a} <= {b}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Types { kb, query, json, budget } => {
            let kb = kb.load()?;
            let subject = parse_concept(&query)?;
            let v = preferred_types(&kb, subject, opts(budget))?;
            if json {
                println!("{}", v.to_json());
            } else if v.vacuous {
                println!("{} is unsatisfiable", v.query.subject);
            } else {
                for t in explain(&v, &v.normalized).types {
                    println!("{{{}}} {}", t.concepts.join(", "), t.weights);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize { kb } => {
            let nkb = normalize_kb(&kb.load()?)?;
            print!("{}", render_kb(&nkb.to_kb()));
            for (name, origin) in &nkb.fresh_registry {
                let kind = if origin.definitional { "==" } else { "~" };
                println!("# {name} {kind} {}", origin.concept);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz { n, seed, nominals, budget, out } => fuzz(n, seed, nominals, opts(budget), &out),
    }
}

#[derive(Debug)]
enum Case {
    Agree,
    /// Outside the oracle's reach.
    Skipped,
    Disagree(String),
}

fn check(kb: &KnowledgeBase, q: &Query, opts: Options) -> Case {
    let o = match oracle_decide(kb, q) {
        Ok(o) => o,
        Err(Error::OracleCapExceeded { .. }) => return Case::Skipped,
        Err(e) => return Case::Disagree(format!("oracle failed: {e}")),
    };
    match decide_entailment_with(kb, q, opts) {
        Ok(v) if (v.entailed, v.vacuous) == (o.entailed, o.vacuous) => Case::Agree,
        Ok(v) => Case::Disagree(format!(
            "engine entailed={} vacuous={}, oracle entailed={} vacuous={}",
            v.entailed, v.vacuous, o.entailed, o.vacuous
        )),
        Err(Error::BudgetExceeded { .. }) => Case::Skipped,
        Err(e) => Case::Disagree(format!("engine failed: {e}")),
    }
}

fn case_seed(seed: u64, i: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i)
}

fn fuzz(n: u64, seed: u64, nominals: bool, opts: Options, out: &Path) -> CliResult<ExitCode> {
    let limits = Limits { nominals, ..Limits::default() };
    let results: Vec<(u64, Case)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = case_seed(seed, i);
            let (kb, q) = gen_case(s, &limits);
            (s, check(&kb, &q, opts))
        })
        .collect();
    let agree = results.iter().filter(|(_, c)| matches!(c, Case::Agree)).count();
    let skipped = results.iter().filter(|(_, c)| matches!(c, Case::Skipped)).count();
    println!("fuzz: {n} cases, {agree} agree, {skipped} skipped");
    let Some((s, Case::Disagree(why))) = results.into_iter().find(|(_, c)| matches!(c, Case::Disagree(_))) else {
        return Ok(ExitCode::SUCCESS);
    };
    let (kb, q) = gen_case(s, &limits);
    let kb = minimize(kb, |kb| matches!(check(kb, &q, opts), Case::Disagree(_)));
    let path = out.join(format!("cwm-fuzz-{s}.kb"));
    let text = format!("# query: {q}\n# {why}\n{}", render_kb(&kb));
    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    eprintln!("disagreement on case seed {s}: {why}");
    eprintln!("minimized reproducer written to {}", path.display());
    Ok(ExitCode::from(1))
}

/// Greedy deletion of statements while `fails` keeps holding.
fn minimize(mut kb: KnowledgeBase, fails: impl Fn(&KnowledgeBase) -> bool) -> KnowledgeBase {
    loop {
        let mut shrunk = false;
        for i in (0..kb.strict.len()).rev() {
            let mut t = kb.clone();
            t.strict.remove(i);
            if fails(&t) {
                kb = t;
                shrunk = true;
            }
        }
        for i in (0..kb.abox.len()).rev() {
            let mut t = kb.clone();
            t.abox.remove(i);
            if fails(&t) {
                kb = t;
                shrunk = true;
            }
        }
        let keys: Vec<String> = kb.defeasible.keys().cloned().collect();
        for c in keys {
            for i in (0..kb.defeasible.get(&c).map_or(0, Vec::len)).rev() {
                let mut t = kb.clone();
                let list = t.defeasible.get_mut(&c).unwrap();
                list.remove(i);
                if list.is_empty() {
                    t.defeasible.remove(&c);
                    t.distinguished.retain(|d| *d != c);
                }
                if fails(&t) {
                    kb = t;
                    shrunk = true;
                }
            }
        }
        if !shrunk {
            return kb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimize_keeps_only_the_culprit() {
        let kb = parse_kb(
            "concept A, B, C, D\nrole r\nindividual a\nA <= B\nB <= C\nC <= D\nA(a)\nT(A) <= B @ 3\nT(A) <= C @ 4\nT(B) <= D @ 1\n",
        )
        .unwrap();
        let culprit = |kb: &KnowledgeBase| render_kb(kb).contains("B <= C\n");
        let small = minimize(kb, culprit);
        assert_eq!(small.strict.len(), 1);
        assert!(small.abox.is_empty() && small.defeasible.is_empty() && small.distinguished.is_empty());
    }
}

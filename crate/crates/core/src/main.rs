//! Command-line front end: characteristic polynomials of instance files,
//! randomized verification campaigns, and enumeration dumps.
//!
//! Exit codes: 0 success, 2 input error, 3 equivalence violation.

use clap::{Parser, Subcommand, ValueEnum};
use rank1_charpoly::bundle::{for_each_mixed_forest, MixedForest, MultiEdge};
use rank1_charpoly::doomb::{
    doomb_contribution, enumerate_doombs, weight_table, Doomb,
};
use rank1_charpoly::exact::{char_poly, Polynomial, Rat};
use rank1_charpoly::instance::{
    instance_mus, instance_n, instance_operator, run_trial, CoeffRow, InstanceFile,
    InstancePayload, Report, Theorem, TrialOutcome,
};
use rank1_charpoly::level2::{
    doomb_to_polyhedron, level2_contributions, level2_pair_system, RootChoice,
};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "rank1-charpoly",
    about = "Exact characteristic polynomials of operators assembled from rank-1 pieces, \
             with combinatorial expansions cross-checked against linear algebra"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Combinatorial,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EnumKind {
    Doombs,
    Forests,
    Polyhedra,
}

#[derive(Subcommand)]
enum Cmd {
    /// Characteristic polynomial of an instance file
    Charpoly {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// include per-object contribution entries in the report
        #[arg(long)]
        audit: bool,
        /// coefficient table as CSV instead of JSON
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded random trials of one equivalence
    Verify {
        /// main | forman | mtt | mttd | level2 | lemmas
        theorem: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stream combinatorial objects as newline-delimited JSON
    Enumerate {
        kind: EnumKind,
        /// vertex count (doombs: alphabet size; forests/polyhedra: graph size)
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// instance file supplying weights (forests, polyhedra; optional for audit)
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        audit: bool,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Charpoly {
            instance,
            method,
            audit,
            csv,
            out,
        } => cmd_charpoly(&instance, method, audit, csv, out.as_deref()),
        Cmd::Verify {
            theorem,
            trials,
            max_n,
            seed,
            out,
        } => cmd_verify(&theorem, trials, max_n, seed, out.as_deref()),
        Cmd::Enumerate {
            kind,
            n,
            k,
            instance,
            audit,
        } => cmd_enumerate(kind, n, k, instance.as_deref(), audit),
    }
}

fn fail_input(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn read_instance(path: &std::path::Path) -> Result<InstanceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    InstanceFile::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn mus_to_charpoly(n: usize, mus: &[Rat]) -> Polynomial {
    let mut coeffs = vec![Rat::zero(); n + 1];
    for (k, mu) in mus.iter().enumerate() {
        let sign = if k % 2 == 0 { mu.clone() } else { -mu };
        coeffs[n - k] = sign;
    }
    Polynomial::from_coeffs(coeffs)
}

fn emit(out: Option<&std::path::Path>, body: &str) -> i32 {
    match out {
        None => {
            println!("{body}");
            0
        }
        Some(path) => match std::fs::write(path, format!("{body}\n")) {
            Ok(()) => 0,
            Err(e) => fail_input(&format!("{}: {e}", path.display())),
        },
    }
}

fn audit_entries(file: &InstanceFile, n: usize) -> Result<Vec<serde_json::Value>, String> {
    let mut entries = Vec::new();
    match &file.payload {
        InstancePayload::Rank1(i) => {
            let (sys, p) = i.build().map_err(|e| e.to_string())?;
            let w = weight_table(&sys, &p).map_err(|e| e.to_string())?;
            for k in 1..=n {
                for g in doombs_with_support(sys.family_size, k, &w) {
                    let c = doomb_contribution(&g, &sys, &w).map_err(|e| e.to_string())?;
                    entries.push(serde_json::to_value(&c).unwrap());
                }
            }
        }
        InstancePayload::Bundle(i) => {
            let b = i.build().map_err(|e| e.to_string())?;
            let (sys, p) = b.to_rank_one_system().map_err(|e| e.to_string())?;
            let w = weight_table(&sys, &p).map_err(|e| e.to_string())?;
            for k in 1..=n {
                for g in doombs_with_support(sys.family_size, k, &w) {
                    let c = doomb_contribution(&g, &sys, &w).map_err(|e| e.to_string())?;
                    entries.push(serde_json::to_value(&c).unwrap());
                }
            }
        }
        InstancePayload::Level2(i) => {
            let (c, b) = i.build().map_err(|e| e.to_string())?;
            for k in 1..=n {
                let contribs = level2_contributions(&c, &b, k, &RootChoice::Smallest)
                    .map_err(|e| e.to_string())?;
                for pc in contribs {
                    entries.push(serde_json::to_value(&pc).unwrap());
                }
            }
        }
        InstancePayload::Mttd(_) => {
            // no per-object audit for the doubled-weight corollary
        }
    }
    Ok(entries)
}

fn doombs_with_support(
    count: usize,
    k: usize,
    w: &rank1_charpoly::doomb::WeightTable,
) -> Vec<Doomb> {
    let mut out = Vec::new();
    rank1_charpoly::doomb::for_each_doomb(
        count,
        k,
        &|a, b| !w.get(a, b).is_zero(),
        &mut |g| out.push(g.clone()),
    );
    out
}

fn cmd_charpoly(
    path: &std::path::Path,
    method: Method,
    audit: bool,
    csv: bool,
    out: Option<&std::path::Path>,
) -> i32 {
    let started = Instant::now();
    let file = match read_instance(path) {
        Ok(f) => f,
        Err(e) => return fail_input(&e),
    };
    let n = instance_n(&file);
    let combinatorial = if method != Method::Oracle {
        match instance_mus(&file) {
            Ok(mus) => Some(mus),
            Err(e) => return fail_input(&e.to_string()),
        }
    } else {
        None
    };
    let oracle = if method != Method::Combinatorial {
        match instance_operator(&file).map(|m| char_poly(&m)) {
            Ok(Ok(p)) => Some(p),
            Ok(Err(e)) => return fail_input(&e.to_string()),
            Err(e) => return fail_input(&e.to_string()),
        }
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut mismatches = 0usize;
    for k in 0..=n {
        let comb = combinatorial.as_ref().map(|mus| mus[k].clone());
        let orac = oracle.as_ref().map(|p| {
            let c = p.coeff(n - k);
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        });
        let equal = match (&comb, &orac) {
            (Some(a), Some(b)) => {
                let eq = a == b;
                if !eq {
                    mismatches += 1;
                }
                Some(eq)
            }
            _ => None,
        };
        rows.push(CoeffRow {
            k,
            combinatorial: comb,
            oracle: orac,
            equal,
        });
    }
    let poly = match (&combinatorial, &oracle) {
        (_, Some(p)) => p.clone(),
        (Some(mus), None) => mus_to_charpoly(n, mus),
        (None, None) => unreachable!("some method always selected"),
    };
    let audit_rows = if audit {
        match audit_entries(&file, n) {
            Ok(a) => a,
            Err(e) => return fail_input(&e),
        }
    } else {
        Vec::new()
    };
    let report = Report {
        command: format!("charpoly --method {method:?}").to_lowercase(),
        coefficients: rows,
        passed: n + 1 - mismatches,
        failed: mismatches,
        elapsed_ms: started.elapsed().as_millis(),
        instance: Some(file),
        audit: audit_rows,
        failures: Vec::new(),
    };
    eprintln!("elapsed_ms: {}", report.elapsed_ms);
    let body = if csv {
        let mut s = String::from("k,combinatorial,oracle,equal\n");
        for row in &report.coefficients {
            let fmt = |o: &Option<Rat>| o.as_ref().map(|r| r.to_string()).unwrap_or_default();
            let eq = row
                .equal
                .map(|b| b.to_string())
                .unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{}\n",
                row.k,
                fmt(&row.combinatorial),
                fmt(&row.oracle),
                eq
            ));
        }
        s.push_str(&format!("# char_poly: {poly}\n"));
        s.trim_end().to_string()
    } else {
        let mut v = serde_json::to_value(&report).unwrap();
        v["char_poly"] = serde_json::Value::String(poly.to_string());
        serde_json::to_string_pretty(&v).unwrap()
    };
    let code = emit(out, &body);
    if code != 0 {
        return code;
    }
    if mismatches > 0 {
        eprintln!("error: {mismatches} coefficient(s) disagree between methods");
        return 3;
    }
    0
}

fn cmd_verify(
    theorem: &str,
    trials: usize,
    max_n: Option<usize>,
    seed: Option<u64>,
    out: Option<&std::path::Path>,
) -> i32 {
    let started = Instant::now();
    let theorem: Theorem = match theorem.parse() {
        Ok(t) => t,
        Err(e) => return fail_input(&e),
    };
    let seed = seed.unwrap_or_else(rank1_charpoly::instance::seed_from_env);
    let (default_n, cap) = match theorem {
        Theorem::Main => (4, 4),
        Theorem::Forman => (6, 6),
        Theorem::Mtt => (4, 6),
        Theorem::Mttd => (4, 4),
        Theorem::Level2 => (4, 4),
        Theorem::Lemmas => (8, 8),
    };
    let max_n = max_n.unwrap_or(default_n);
    if max_n == 0 || max_n > cap {
        return fail_input(&format!(
            "--max-n {max_n} out of bounds for {theorem:?} (1..={cap})"
        ));
    }
    let indices: Vec<usize> = (0..trials).collect();
    #[cfg(feature = "parallel")]
    let mut outcomes: Vec<TrialOutcome> = {
        use rayon::prelude::*;
        indices
            .par_iter()
            .map(|&i| run_trial(theorem, seed, i, max_n))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut outcomes: Vec<TrialOutcome> = indices
        .iter()
        .map(|&i| run_trial(theorem, seed, i, max_n))
        .collect();
    outcomes.sort_by_key(|o| o.index);
    let failures: Vec<TrialOutcome> = outcomes.iter().filter(|o| !o.passed).cloned().collect();
    let passed = outcomes.len() - failures.len();
    // dump the first reproducing instance for debugging
    let mut dump_note = None;
    if let Some(first) = failures.first() {
        if let Some(inst) = &first.instance {
            let dump = format!("failure-{:?}-{}.json", theorem, first.index).to_lowercase();
            if std::fs::write(&dump, inst.to_json()).is_ok() {
                dump_note = Some(dump);
            }
        }
    }
    let report = Report {
        command: format!("verify {theorem:?} trials={trials} max_n={max_n} seed={seed}")
            .to_lowercase(),
        coefficients: Vec::new(),
        passed,
        failed: failures.len(),
        elapsed_ms: started.elapsed().as_millis(),
        instance: None,
        audit: Vec::new(),
        failures,
    };
    eprintln!("elapsed_ms: {}", report.elapsed_ms);
    let body = serde_json::to_string_pretty(&report).unwrap();
    let code = emit(out, &body);
    if code != 0 {
        return code;
    }
    if report.failed > 0 {
        if let Some(d) = dump_note {
            eprintln!("error: {} trial(s) failed; first instance dumped to {d}", report.failed);
        } else {
            eprintln!("error: {} trial(s) failed", report.failed);
        }
        return 3;
    }
    0
}

fn cmd_enumerate(
    kind: EnumKind,
    n: usize,
    k: usize,
    instance: Option<&std::path::Path>,
    audit: bool,
) -> i32 {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match kind {
        EnumKind::Doombs => {
            if n == 0 || n > 6 || k > n {
                return fail_input("doombs bounds: 1 <= n <= 6, k <= n");
            }
            for g in enumerate_doombs(n, k, &|_, _| true) {
                let line = serde_json::json!({ "edges": g.edges });
                writeln!(w, "{line}").unwrap();
            }
            0
        }
        EnumKind::Forests => {
            if n == 0 || n > 8 || k > n {
                return fail_input("forests bounds: 1 <= n <= 8, k <= n");
            }
            let edges: Vec<MultiEdge> = match instance {
                Some(path) => {
                    let file = match read_instance(path) {
                        Ok(f) => f,
                        Err(e) => return fail_input(&e),
                    };
                    match &file.payload {
                        InstancePayload::Bundle(i) => match i.build() {
                            Ok(b) => b
                                .edges
                                .iter()
                                .map(|e| MultiEdge {
                                    u: e.u,
                                    v: e.v,
                                    phi: e.phi.clone(),
                                    c: e.c.clone(),
                                })
                                .collect(),
                            Err(e) => return fail_input(&e.to_string()),
                        },
                        _ => return fail_input("forests need a bundle instance"),
                    }
                }
                None => {
                    // unit-weight complete graph
                    let mut es = Vec::new();
                    for u in 1..n {
                        for v in u + 1..=n {
                            es.push(MultiEdge {
                                u,
                                v,
                                phi: Rat::one(),
                                c: Rat::one(),
                            });
                        }
                    }
                    es
                }
            };
            let mut code = 0;
            for_each_mixed_forest(n, &edges, k, &mut |mf: &MixedForest| {
                let picked: Vec<Vec<usize>> = mf
                    .edge_indices
                    .iter()
                    .map(|&i| vec![edges[i].u, edges[i].v])
                    .collect();
                let line = if audit {
                    let c: Rat = mf.edge_indices.iter().map(|&i| edges[i].c.clone()).product();
                    serde_json::json!({ "edges": picked, "weight": c })
                } else {
                    serde_json::json!({ "edges": picked })
                };
                if writeln!(w, "{line}").is_err() {
                    code = 2;
                }
            });
            code
        }
        EnumKind::Polyhedra => {
            if !(2..=4).contains(&n) {
                return fail_input("polyhedra bounds: 2 <= n <= 4");
            }
            let path = match instance {
                Some(p) => p,
                None => return fail_input("polyhedra need a level2 instance"),
            };
            let file = match read_instance(path) {
                Ok(f) => f,
                Err(e) => return fail_input(&e),
            };
            let (c, b) = match &file.payload {
                InstancePayload::Level2(i) => match i.build() {
                    Ok(x) => x,
                    Err(e) => return fail_input(&e.to_string()),
                },
                _ => return fail_input("polyhedra need a level2 instance"),
            };
            if c.n != n {
                return fail_input("instance dimension does not match --n");
            }
            if audit {
                let contribs = match level2_contributions(&c, &b, k, &RootChoice::Smallest) {
                    Ok(x) => x,
                    Err(e) => return fail_input(&e.to_string()),
                };
                for pc in contribs {
                    writeln!(w, "{}", serde_json::to_string(&pc).unwrap()).unwrap();
                }
                return 0;
            }
            // structural stream: every nonzero-weight DOOMB as a polyhedron
            let (sys, p) = match level2_pair_system(&c, &b) {
                Ok(x) => x,
                Err(e) => return fail_input(&e.to_string()),
            };
            let wt = match weight_table(&sys, &p) {
                Ok(x) => x,
                Err(e) => return fail_input(&e.to_string()),
            };
            for g in doombs_with_support(sys.family_size, k, &wt) {
                if rank1_charpoly::doomb::doomb_weight(&g, &wt).is_zero() {
                    continue;
                }
                match doomb_to_polyhedron(&g, n) {
                    Ok(h) => {
                        let line = serde_json::json!({
                            "edges": g.edges,
                            "components": serde_json::to_value(&h.components).unwrap(),
                        });
                        writeln!(w, "{line}").unwrap();
                    }
                    Err(_) => continue, // zero-weight shape
                }
            }
            0
        }
    }
}

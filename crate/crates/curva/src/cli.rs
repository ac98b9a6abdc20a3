//! Command-line requests and their JSON reports.
//!
//! Every report echoes its input and the bounds it used, so running the
//! same request again reproduces it byte for byte.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::curve::{replay_log, to_block_form, Multigerm};
use crate::error::{CurvaError, Result};
use crate::invariants::{determinacy_bounds, kappa, value_set, Kind};
use crate::moduli::{moduli_report, ClassSpec};
use crate::normalform::{a_normal_form, equivalent, g_normal_form_with, verify_certificate, ReduceOptions};

#[derive(Parser, Debug)]
#[command(name = "curva", version, about = "Invariants, normal forms and equivalence of plane curve multigerms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Γ, Λ and Λ_G in a box, the conductor and the determinacy bounds.
    Invariants {
        input: PathBuf,
        /// Skip Λ_G (it needs the block form and is the most expensive).
        #[arg(long)]
        no_lambda_g: bool,
    },
    /// Block form, 𝒢-normal form and 𝒜-normal form with the replayable log.
    NormalForm {
        input: PathBuf,
        /// Raise every determinacy bound to at least this order.
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Decide analytic equivalence up to reordering of branches.
    Equivalent { first: PathBuf, second: PathBuf },
    /// Dimension of the generic component of the moduli space of a class.
    ModuliDim {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        /// Semigroup generators for --class irreducible, comma separated.
        #[arg(long, value_delimiter = ',')]
        generators: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Invariants and normal forms of every *.json multigerm in a directory.
    Corpus { dir: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassArg {
    Ordinary,
    Nm,
    Irreducible,
}

/// A finished request: the report and the process exit code.
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, exit: 0 }
    }
}

pub fn error_report(e: &CurvaError) -> Value {
    json!({"error": e.code(), "message": e.to_string(), "exit_code": e.exit_code()})
}

pub fn read_multigerm(path: &Path) -> Result<(Value, Multigerm)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CurvaError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CurvaError::Validation(format!("{} is not JSON: {e}", path.display())))?;
    let phi = Multigerm::from_json(&doc)?;
    Ok((doc, phi))
}

pub fn invariants_report(doc: &Value, phi: &Multigerm, with_lambda_g: bool) -> Result<Value> {
    let gamma = value_set(phi, Kind::Gamma)?;
    let lambda = value_set(phi, Kind::Lambda)?;
    let (bf, g, pi) = to_block_form(phi)?;
    let lambda_g = if with_lambda_g { Some(value_set(&bf, Kind::LambdaG)?) } else { None };
    let stabilization = json!({
        "Gamma": gamma.degree,
        "Lambda": lambda.degree,
        "LambdaG": lambda_g.as_ref().map(|s| json!(s.degree)),
    });
    Ok(json!({
        "input": doc,
        "r": phi.r(),
        "multiplicities": phi.multiplicities(),
        "truncation": phi.truncs(),
        "kappa": kappa(phi)?,
        "determinacy": determinacy_bounds(phi)?,
        "Gamma": gamma.to_json(),
        "Lambda": lambda.to_json(),
        "block_form": {"psi": bf.to_json(), "element": g.to_json(), "permutation": pi, "blocks": bf.block_structure()?.to_json()},
        "LambdaG": lambda_g.map(|s| s.to_json()),
        "stabilization": stabilization,
    }))
}

pub fn normal_form_report(doc: &Value, phi: &Multigerm, degree_bound: Option<usize>) -> Result<Value> {
    let (bf, g, pi) = to_block_form(phi)?;
    let nf = g_normal_form_with(&bf, ReduceOptions { degree_bound, ..Default::default() })?;
    // the log must reproduce the normal form from the block form
    if replay_log(&bf, &nf.group_log)?.branches != nf.psi.branches {
        return Err(CurvaError::Internal("group log does not replay to the normal form".into()));
    }
    let anf = a_normal_form(&nf)?;
    Ok(json!({
        "input": doc,
        "degree_bound": degree_bound,
        "block_form": {"psi": bf.to_json(), "element": g.to_json(), "permutation": pi},
        "normal_form": nf.to_json(),
        "a_normal_form": {
            "psi": anf.psi.to_json(),
            "parameter_vector": anf.to_json()["parameter_vector"],
            "normalized_index": anf.to_json()["normalized_index"],
            "scaling_certificate": anf.scaling_certificate,
        },
    }))
}

fn class_spec(class: ClassArg, r: Option<usize>, n: Option<u64>, m: Option<u64>, generators: &[u64], seed: u64) -> Result<ClassSpec> {
    let need = |v: Option<u64>, name: &str| v.ok_or_else(|| CurvaError::Validation(format!("--{name} is required")));
    let spec = match class {
        ClassArg::Ordinary => ClassSpec::ordinary(r.ok_or_else(|| CurvaError::Validation("--r is required".into()))?, seed),
        ClassArg::Nm => ClassSpec::nm(need(n, "n")?, need(m, "m")?, r.ok_or_else(|| CurvaError::Validation("--r is required".into()))?, seed),
        ClassArg::Irreducible => ClassSpec::irreducible(generators.to_vec(), seed),
    };
    spec.validate()?;
    Ok(spec)
}

/// Corpus entries in file-name order.
fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CurvaError::Validation(format!("cannot list {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Invariants { input, no_lambda_g } => {
            let (doc, phi) = read_multigerm(input)?;
            Ok(Outcome::ok(invariants_report(&doc, &phi, !no_lambda_g)?))
        }
        Command::NormalForm { input, degree_bound } => {
            let (doc, phi) = read_multigerm(input)?;
            Ok(Outcome::ok(normal_form_report(&doc, &phi, *degree_bound)?))
        }
        Command::Equivalent { first, second } => {
            let (da, a) = read_multigerm(first)?;
            let (db, b) = read_multigerm(second)?;
            let v = equivalent(&a, &b)?;
            let verified = match &v.certificate {
                Some(c) => Some(verify_certificate(&a, &b, c)?),
                None => None,
            };
            if verified == Some(false) {
                return Err(CurvaError::Internal("certificate failed to verify".into()));
            }
            let mut report = v.to_json();
            report["inputs"] = json!([da, db]);
            report["certificate_verified"] = json!(verified);
            Ok(Outcome { report, exit: if v.equivalent { 0 } else { 2 } })
        }
        Command::ModuliDim { class, r, n, m, generators, seed } => {
            let spec = class_spec(*class, *r, *n, *m, generators, *seed)?;
            let rep = moduli_report(&spec)?;
            let exit = if rep.agreement() { 0 } else { CurvaError::Oracle(String::new()).exit_code() };
            Ok(Outcome { report: rep.to_json(), exit })
        }
        Command::Corpus { dir } => {
            let mut entries = Vec::new();
            let mut exit = 0;
            for path in corpus_files(dir)? {
                let name = path.file_name().unwrap().to_string_lossy().to_string();
                let entry = read_multigerm(&path).and_then(|(doc, phi)| {
                    let round_trip = phi.to_json() == doc;
                    Ok(json!({
                        "file": name,
                        "round_trip": round_trip,
                        "invariants": invariants_report(&doc, &phi, true)?,
                        "normal_form": normal_form_report(&doc, &phi, None)?,
                    }))
                });
                match entry {
                    Ok(v) => entries.push(v),
                    Err(e) => {
                        exit = exit.max(e.exit_code());
                        entries.push(json!({"file": name, "error": error_report(&e)}));
                    }
                }
            }
            Ok(Outcome { report: json!({"entries": entries}), exit })
        }
    }
}

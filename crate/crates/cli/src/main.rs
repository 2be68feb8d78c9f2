//! Command line front end: parse form and formation documents, run the
//! decision operations, emit deterministic JSON reports.
//!
//! Exit codes: 0 = computed, 1 = verdict negative, 2 = unknown or budget
//! exhausted, 3 = invalid input.

mod docs;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use docs::{FormDoc, FormationIsoDoc, LinkingFormDoc, MatrixDoc, QuasiFormationDoc};
use oddform_core::formations::{self};
use oddform_core::forms::{self, IsometryVerdict, NamedLattice, Submodule};
use oddform_core::linking::{self, OrbitBudget};
use oddform_core::monoid::{self, ElementaryCertificate, KappaValue, OrbitStatus};
use oddform_core::snf;
use oddform_core::Error;

#[derive(Parser)]
#[command(name = "oddform", about = "Exact gluing calculus for quadratic forms over Z")]
struct Cli {
    /// node budget for backtracking searches
    #[arg(long, global = true, default_value_t = 2_000_000)]
    budget: u64,
    /// maximal number of hyperbolic stabilizations to try
    #[arg(long, global = true, default_value_t = 3)]
    stab_cap: usize,
    /// cap on linking group orders for exhaustive enumeration
    #[arg(long, global = true, default_value_t = 10_000)]
    order_cap: u64,
    /// output format (only json)
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smith normal form of an integer matrix document
    Snf { input: PathBuf },
    /// S-boundary linking form of a nondegenerate form over Z
    Boundary { input: PathBuf },
    /// Union of two forms along a stable boundary isomorphism
    /// f : d(v) -> d(-w)
    Glue { v: PathBuf, w: PathBuf, iso: PathBuf },
    /// Orthogonal splitting of a simple form along a primitive submodule
    Split { form: PathBuf, submodule: PathBuf },
    /// The two boundaries of a quasi-formation
    B { input: PathBuf },
    /// The delta invariant of a quasi-formation (eps = +1 over Z)
    Delta { input: PathBuf },
    /// kappa of a stable boundary isomorphism f : d(v) -> d(v')
    Kappa { v: PathBuf, vprime: PathBuf, iso: PathBuf },
    /// Elementarity certificate for a quasi-formation
    Elementary { input: PathBuf },
    /// Orbit count of the stable boundary automorphism set of a form
    Sbaut { input: PathBuf },
    /// Strict cancellation criteria for a form over Z
    CancelCheck { input: PathBuf },
    /// Stabilize a quasi-formation until an elementarity certificate appears
    Stabilize { input: PathBuf },
    /// Emit the named even lattice as a form document
    Lattice { name: String },
    /// Validate a document of any supported kind
    Validate { input: PathBuf },
}

fn read_json(path: &PathBuf) -> Result<Value, Error> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Document(format!("stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Document(format!("invalid JSON: {e}")))
}

fn parse<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, Error> {
    serde_json::from_value(value).map_err(|e| Error::Document(format!("bad document: {e}")))
}

fn form_value(v: &oddform_core::forms::QuadraticForm) -> Value {
    json!({
        "epsilon": v.epsilon.sign(),
        "format_version": "1",
        "kind": "form",
        "ring": v.ring,
        "theta": v.theta,
    })
}

fn linking_value(l: &linking::LinkingForm) -> Value {
    let mut v = serde_json::to_value(l).expect("linking form serializes");
    let obj = v.as_object_mut().expect("object");
    obj.insert("format_version".into(), json!("1"));
    obj.insert("kind".into(), json!("linking_form"));
    v
}

/// Exit discipline shared by all subcommands.
enum Outcome {
    Computed(Value),
    Negative(Value),
    Unknown(Value),
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    if cli.format != "json" {
        return Err(Error::Document(format!("unsupported format '{}'", cli.format)));
    }
    match cli.command {
        Command::Snf { input } => {
            let doc: MatrixDoc = parse(read_json(&input)?)?;
            let m = doc.into_mat()?;
            let r = snf::smith_normal_form(&m)?;
            Ok(Outcome::Computed(json!({
                "d": r.d,
                "diagonal": r.diagonal().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "u": r.u,
                "w": r.w,
            })))
        }
        Command::Boundary { input } => {
            let doc: FormDoc = parse(read_json(&input)?)?;
            let v = doc.into_form()?;
            let b = linking::s_boundary(&v)?;
            Ok(Outcome::Computed(linking_value(&b)))
        }
        Command::Glue { v, w, iso } => {
            let v = parse::<FormDoc>(read_json(&v)?)?.into_form()?;
            let w = parse::<FormDoc>(read_json(&w)?)?.into_form()?;
            let f = parse::<FormationIsoDoc>(read_json(&iso)?)?.into_iso(&v, &w.negate())?;
            let u = formations::union(&v, &w, &f)?;
            Ok(Outcome::Computed(form_value(&u)))
        }
        Command::Split { form, submodule } => {
            let m = parse::<FormDoc>(read_json(&form)?)?.into_form()?;
            let j = parse::<MatrixDoc>(read_json(&submodule)?)?.into_mat()?;
            let j = Submodule::new(j)?;
            let se = formations::split_embedding(&m, &j)?;
            Ok(Outcome::Computed(json!({
                "f_j": {
                    "alpha": se.f_j.alpha,
                    "beta": se.f_j.beta,
                    "nu": se.f_j.nu,
                },
                "glued": form_value(&se.glued),
                "r_j": se.r_j.matrix,
                "theta_perp": form_value(&se.theta_perp),
                "vperp": se.vperp_basis,
            })))
        }
        Command::B { input } => {
            let x = parse::<QuasiFormationDoc>(read_json(&input)?)?.into_quasi()?;
            let pair = formations::b_invariant(&x)?;
            Ok(Outcome::Computed(json!({
                "v": form_value(&pair.v),
                "v_basis": pair.v_basis,
                "vperp": form_value(&pair.vperp),
                "vperp_basis": pair.vperp_basis,
            })))
        }
        Command::Delta { input } => {
            let x = parse::<QuasiFormationDoc>(read_json(&input)?)?.into_quasi()?;
            let d = monoid::delta_invariant(&x, cli.budget)?;
            let out = json!({
                "representative": d.representative,
                "status": d.status,
            });
            match d.status {
                OrbitStatus::IsIdentityOrbit => Ok(Outcome::Computed(out)),
                OrbitStatus::NontrivialOrbit => Ok(Outcome::Negative(out)),
                OrbitStatus::Unknown => Ok(Outcome::Unknown(out)),
            }
        }
        Command::Kappa { v, vprime, iso } => {
            let v = parse::<FormDoc>(read_json(&v)?)?.into_form()?;
            let vp = parse::<FormDoc>(read_json(&vprime)?)?.into_form()?;
            let f = parse::<FormationIsoDoc>(read_json(&iso)?)?.into_iso(&v, &vp)?;
            let kv = monoid::kappa(&v, &vp, &f)?;
            let out = match kv {
                KappaValue::Signature(s) => json!({"kind": "signature", "value": s}),
                KappaValue::Arf(a) => json!({"kind": "arf", "value": a}),
            };
            Ok(Outcome::Computed(out))
        }
        Command::Elementary { input } => {
            let x = parse::<QuasiFormationDoc>(read_json(&input)?)?.into_quasi()?;
            match monoid::elementary_certificate(&x, cli.budget)? {
                Some(cert) => Ok(Outcome::Computed(certificate_value(&cert))),
                None => {
                    // try to certify a negative verdict through the boundaries
                    let pair = formations::b_invariant(&x)?;
                    if pair.v.is_nondegenerate()? {
                        if let IsometryVerdict::No(d) =
                            forms::is_isometric(&pair.v, &pair.vperp, cli.budget)?
                        {
                            return Ok(Outcome::Negative(json!({
                                "elementary": false,
                                "reason": format!("boundaries differ: {d:?}"),
                            })));
                        }
                        let dc = monoid::delta_invariant(&x, cli.budget)?;
                        if dc.status == OrbitStatus::NontrivialOrbit {
                            return Ok(Outcome::Negative(json!({
                                "elementary": false,
                                "reason": "delta lies outside the identity orbit",
                            })));
                        }
                    }
                    Ok(Outcome::Unknown(json!({"status": "unknown"})))
                }
            }
        }
        Command::Sbaut { input } => {
            let v = parse::<FormDoc>(read_json(&input)?)?.into_form()?;
            let dec = linking::biso_orbits(
                &v,
                &v,
                OrbitBudget { order_cap: cli.order_cap, search_budget: cli.budget },
            )?;
            let out = json!({"orbits": dec.orbit_count()});
            if dec.complete {
                Ok(Outcome::Computed(out))
            } else {
                Ok(Outcome::Unknown(json!({
                    "orbits_lower_bound": dec.orbit_count(),
                    "status": "automorphism search incomplete",
                })))
            }
        }
        Command::CancelCheck { input } => {
            let v = parse::<FormDoc>(read_json(&input)?)?.into_form()?;
            let verdict = monoid::strict_cancellation_check(&v, cli.budget)?;
            let out = serde_json::to_value(&verdict).expect("verdict serializes");
            if verdict.holds {
                Ok(Outcome::Computed(out))
            } else {
                Ok(Outcome::Unknown(out))
            }
        }
        Command::Stabilize { input } => {
            let x = parse::<QuasiFormationDoc>(read_json(&input)?)?.into_quasi()?;
            match monoid::stabilize_until_elementary(&x, cli.stab_cap, cli.budget)? {
                Some(st) => Ok(Outcome::Computed(json!({
                    "certificate": certificate_value(&st.certificate),
                    "k": st.k,
                }))),
                None => Ok(Outcome::Unknown(json!({
                    "k_max": cli.stab_cap,
                    "status": "no certificate within the stabilization cap",
                }))),
            }
        }
        Command::Lattice { name } => {
            let lattice: NamedLattice = name.parse()?;
            Ok(Outcome::Computed(form_value(&forms::named_lattice(lattice))))
        }
        Command::Validate { input } => {
            let value = read_json(&input)?;
            let kind = value
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Document("document without a kind".into()))?
                .to_string();
            match kind.as_str() {
                "matrix" => {
                    parse::<MatrixDoc>(value)?.into_mat()?;
                }
                "form" => {
                    parse::<FormDoc>(value)?.into_form()?;
                }
                "quasiformation" => {
                    parse::<QuasiFormationDoc>(value)?.into_quasi()?;
                }
                "linking_form" => {
                    parse::<LinkingFormDoc>(value)?.into_linking()?;
                }
                other => {
                    return Err(Error::Document(format!("unknown document kind '{other}'")))
                }
            }
            Ok(Outcome::Computed(json!({"kind": kind, "valid": true})))
        }
    }
}

fn certificate_value(cert: &ElementaryCertificate) -> Value {
    match cert {
        ElementaryCertificate::Representative { rho } => {
            json!({"rho": rho, "rule": "representative"})
        }
        ElementaryCertificate::SkewLagrangian { complement } => {
            json!({"complement": complement, "rule": "skew_lagrangian"})
        }
        ElementaryCertificate::FieldLagrangian { complement } => {
            json!({"complement": complement, "rule": "field_lagrangian"})
        }
        ElementaryCertificate::Cancellation { verdict } => json!({
            "rule": "cancellation",
            "verdict": serde_json::to_value(verdict).expect("verdict serializes"),
        }),
        ElementaryCertificate::DeltaIdentity => json!({"rule": "delta_identity"}),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Computed(v)) => {
            println!("{}", serde_json::to_string(&v).expect("serializable"));
            ExitCode::from(0)
        }
        Ok(Outcome::Negative(v)) => {
            println!("{}", serde_json::to_string(&v).expect("serializable"));
            ExitCode::from(1)
        }
        Ok(Outcome::Unknown(v)) => {
            println!("{}", serde_json::to_string(&v).expect("serializable"));
            ExitCode::from(2)
        }
        Err(e) => {
            let v = json!({"error": e.to_string()});
            println!("{}", serde_json::to_string(&v).expect("serializable"));
            match e {
                Error::Budget(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semico::carriers::{invariant_factors_of_table, Carrier};
use semico::cohomology::{
    comparison_triangle, h_n, script_h_n, CohomologyMonoid, DEFAULT_BUDGET,
};
use semico::cyclic::{closed_form_cohomology, separation_family, ClosedFormAnswer};
use semico::error::{Error, Result};
use semico::extensions::{are_congruent, classify, raw_extension_oracle};
use semico::io::{cochain_to_value, parse_carrier, parse_monoid, parse_semimodule};
use semico::semimodules::MSemimodule;

#[derive(Parser)]
#[command(name = "semico", version, about = "Cohomology monoids and Schreier extensions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a carrier, monoid, or semimodule file
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Cohomology monoids of a semimodule over a degree range
    Cohomology {
        #[arg(long)]
        input: PathBuf,
        /// degree or inclusive range, e.g. 2 or 0..2
        #[arg(long, default_value = "0..2")]
        n: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison of the two degree-n cohomology monoids with the
    /// cohomology of the group completion
    Diagram {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Extension operations
    Extensions {
        #[command(subcommand)]
        cmd: ExtCmd,
    },
    /// Group completion, units, and cancellativity of a carrier
    Completion {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form cyclic-monoid cohomology
    Cyclic {
        /// run the built-in separating coefficient family
        #[arg(long = "example-310")]
        example_310: bool,
        /// order of the cyclic monoid
        #[arg(long)]
        m: Option<u64>,
        /// cross-check a finite module input against the closed forms
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "0..3")]
        n: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ExtCmd {
    /// Classify the extensions of A by M built from all 2-cocycles
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// also run the slow raw-table oracle and compare
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))
}

fn parse_degree_range(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| Error::Malformed(format!("bad degree range {s:?}")))?;
        let b: usize = b.trim().parse().map_err(|_| Error::Malformed(format!("bad degree range {s:?}")))?;
        if b < a {
            return Err(Error::Malformed(format!("empty degree range {s:?}")));
        }
        Ok((a..=b).collect())
    } else {
        let n: usize = s.trim().parse().map_err(|_| Error::Malformed(format!("bad degree {s:?}")))?;
        Ok(vec![n])
    }
}

fn class_monoid_summary(h: &CohomologyMonoid) -> (String, Value) {
    match h.group_invariant_factors() {
        Ok(factors) => {
            let name = if factors.is_empty() {
                "0".to_string()
            } else {
                factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
            };
            (
                format!("{name} ({} classes)", h.size()),
                json!({"classes": h.size(), "group": name, "invariant_factors": factors}),
            )
        }
        Err(_) => (
            format!("commutative monoid with {} classes", h.size()),
            json!({"classes": h.size(), "group": Value::Null}),
        ),
    }
}

fn check_threads_env() -> Result<()> {
    if let Ok(v) = std::env::var("SEMICO_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => {}
            _ => {
                return Err(Error::Malformed(format!(
                    "SEMICO_THREADS must be a positive integer, got {v:?}"
                )))
            }
        }
    }
    Ok(())
}

fn emit(format: Format, command: &str, text: String, result: Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => {
            let doc = json!({
                "schema_version": 1,
                "command": command,
                "result": result,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
}

fn run_validate(input: &PathBuf) -> Result<(String, Value)> {
    let v = read_json(input)?;
    let kind = if v.get("action").is_some() && v.get("monoid").is_some() {
        parse_semimodule(&v)?;
        "semimodule"
    } else if v.get("kind").and_then(Value::as_str) == Some("monoid") {
        parse_monoid(&v)?;
        "monoid"
    } else {
        parse_carrier(&v)?;
        "carrier"
    };
    Ok((format!("{kind}: ok\n"), json!({"kind": kind, "ok": true})))
}

fn run_cohomology(input: &PathBuf, degrees: &[usize], budget: u64) -> Result<(String, Value)> {
    let sm = parse_semimodule(&read_json(input)?)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for &n in degrees {
        let h = h_n(&sm, n, budget)?;
        let sh = script_h_n(&sm, n, budget)?;
        let (h_text, h_json) = class_monoid_summary(&h);
        let (sh_text, sh_json) = class_monoid_summary(&sh);
        writeln!(text, "n={n}: H = {h_text}, script-H = {sh_text}").unwrap();
        rows.push(json!({
            "n": n,
            "h": h_json,
            "script_h": sh_json,
            "h_representatives":
                h.reps.iter().map(|f| cochain_to_value(f, &sm)).collect::<Vec<_>>(),
        }));
    }
    Ok((text, json!({"degrees": rows})))
}

fn run_diagram(input: &PathBuf, n: usize, budget: u64) -> Result<(String, Value)> {
    let sm = parse_semimodule(&read_json(input)?)?;
    let rep = comparison_triangle(&sm, n, budget)?;
    let (sh_text, sh_json) = class_monoid_summary(&rep.script_h);
    let (ha_text, ha_json) = class_monoid_summary(&rep.h_a);
    let (hk_text, hk_json) = class_monoid_summary(&rep.h_k);
    let mut text = String::new();
    writeln!(text, "n={n}").unwrap();
    writeln!(text, "script-H(M, A) = {sh_text}").unwrap();
    writeln!(text, "H(M, A)        = {ha_text}").unwrap();
    writeln!(text, "H(M, K(A))     = {hk_text}").unwrap();
    writeln!(text, "triangle commutes: {}", rep.commutes).unwrap();
    writeln!(text, "j surjective: {}", rep.j_surjective).unwrap();
    match rep.hk_injective {
        Some(b) => writeln!(text, "map into H(M, K(A)) injective: {b}").unwrap(),
        None => writeln!(text, "map into H(M, K(A)) injective: n/a (A not cancellative)")
            .unwrap(),
    }
    let result = json!({
        "n": n,
        "script_h": sh_json,
        "h_a": ha_json,
        "h_k": hk_json,
        "commutes": rep.commutes,
        "j_surjective": rep.j_surjective,
        "hk_injective": rep.hk_injective,
        "strong_refines_weak": rep.strong_refines_weak,
    });
    if !rep.commutes || !rep.j_surjective || !rep.strong_refines_weak {
        return Err(Error::TheoremMismatch("comparison triangle failed".into()));
    }
    Ok((text, result))
}

fn run_classify(input: &PathBuf, budget: u64, oracle: bool) -> Result<(String, Value)> {
    let sm = parse_semimodule(&read_json(input)?)?;
    let c = classify(&sm, budget)?;
    let mut text = String::new();
    writeln!(text, "2-cocycles: {}", c.cocycles.len()).unwrap();
    writeln!(text, "|script-H^2| = {}, |H^2| = {}", c.script_h.size(), c.h.size()).unwrap();
    let mut classes = Vec::new();
    for cls in 0..c.congruence_classes {
        let members: Vec<usize> = (0..c.cocycles.len())
            .filter(|&i| c.congruence_class_of[i] == cls)
            .collect();
        let canonical = members[0];
        writeln!(
            text,
            "class {cls}: size {}, canonical cocycle #{canonical}, order profile {:?}",
            members.len(),
            c.order_profiles[cls]
        )
        .unwrap();
        classes.push(json!({
            "id": cls,
            "size": members.len(),
            "canonical_cocycle": cochain_to_value(&c.cocycles[canonical], &sm),
            "order_profile": c.order_profiles[cls],
        }));
    }
    writeln!(
        text,
        "congruence classes: {}; similarity classes: {}",
        c.congruence_classes, c.similarity_classes
    )
    .unwrap();
    writeln!(text, "theta injective: {}", c.theta_injective).unwrap();
    let mut result = json!({
        "congruence_classes": c.congruence_classes,
        "similarity_classes": c.similarity_classes,
        "theta_injective": c.theta_injective,
        "classes": classes,
    });
    if oracle {
        let raw = raw_extension_oracle(&sm)?;
        let mut matched = true;
        for e in &raw {
            if !c.extensions.iter().any(|g| {
                are_congruent(e, g).ok().flatten().is_some()
            }) {
                matched = false;
            }
        }
        let agrees = matched && raw.len() == c.congruence_classes;
        writeln!(text, "raw oracle classes: {} (agrees: {agrees})", raw.len()).unwrap();
        result["raw_oracle"] = json!({"classes": raw.len(), "agrees": agrees});
        if !agrees {
            return Err(Error::TheoremMismatch(
                "raw-table oracle disagrees with the cocycle classification".into(),
            ));
        }
    }
    Ok((text, result))
}

fn run_completion(input: &PathBuf) -> Result<(String, Value)> {
    let v = read_json(input)?;
    // accept a bare carrier or a semimodule file
    let carrier = parse_carrier(v.get("carrier").unwrap_or(&v))?;
    let completion = carrier.group_completion()?;
    let k_name = completion.presentation().to_string();
    let cancellative = carrier.is_cancellative();
    let (u_carrier, _) = carrier.units();
    let u_name = match &u_carrier {
        Carrier::FiniteTable(t) => {
            let factors = invariant_factors_of_table(t)
                .expect("unit submonoid is always a group");
            if factors.is_empty() {
                "0".to_string()
            } else {
                factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
            }
        }
        other => other.group_completion()?.presentation().to_string(),
    };
    let text = format!(
        "K(A) = {k_name}\nU(A) = {u_name}\ncancellative: {cancellative}\n"
    );
    let result = json!({
        "completion": k_name,
        "units": u_name,
        "cancellative": cancellative,
    });
    Ok((text, result))
}

fn closed_form_text(ans: &ClosedFormAnswer) -> String {
    match ans {
        ClosedFormAnswer::Group(p) => p.to_string(),
        ClosedFormAnswer::FixedSubmonoid { kernel_in_completion, description } => {
            format!("{description} (fixed subgroup of K(A): {kernel_in_completion})")
        }
    }
}

fn run_cyclic(
    example: bool,
    m: Option<u64>,
    input: Option<&PathBuf>,
    degrees: &[usize],
    budget: u64,
) -> Result<(String, Value)> {
    if example {
        let m = m.ok_or_else(|| Error::Malformed("--example-310 needs --m".into()))?;
        let (da, du, dk) = separation_family(m)?;
        let mut text = String::new();
        writeln!(text, "separating family over the cyclic monoid of order {m}").unwrap();
        writeln!(text, "A = D({m}) x N x Z/{m}, t(d, n, p) = (d, n, n + p)").unwrap();
        let mut rows = Vec::new();
        for (label, data) in [("A", &da), ("U(A)", &du), ("K(A)", &dk)] {
            let odd = closed_form_cohomology(data, 1)?;
            let even = closed_form_cohomology(data, 2)?;
            let zero = closed_form_cohomology(data, 0)?;
            writeln!(
                text,
                "{label}: H^0 = {}, H^even = {}, H^odd = {}",
                closed_form_text(&zero),
                closed_form_text(&even),
                closed_form_text(&odd)
            )
            .unwrap();
            rows.push(json!({
                "coefficients": label,
                "h0": closed_form_text(&zero),
                "h_even": closed_form_text(&even),
                "h_odd": closed_form_text(&odd),
            }));
        }
        writeln!(
            text,
            "odd separation: vanishes for A, Z/{m} for U(A) and K(A)"
        )
        .unwrap();
        return Ok((text, json!({"m": m, "family": rows})));
    }
    let input = input.ok_or_else(|| {
        Error::Malformed("cyclic needs either --example-310 or --input".into())
    })?;
    let sm: MSemimodule = parse_semimodule(&read_json(input)?)?;
    let m = m.unwrap_or(sm.monoid.size as u64);
    let mut text = String::new();
    let mut rows = Vec::new();
    for &n in degrees {
        let ok = semico::cyclic::crosscheck_bar_vs_classical(m, &sm, n, budget)?;
        writeln!(text, "n={n}: cochain cohomology matches the classical oracle: {ok}")
            .unwrap();
        rows.push(json!({"n": n, "agrees": ok}));
        if !ok {
            return Err(Error::TheoremMismatch(format!(
                "cochain cohomology disagrees with the classical oracle at degree {n}"
            )));
        }
    }
    Ok((text, json!({"m": m, "crosscheck": rows})))
}

fn run(cli: Cli) -> Result<()> {
    check_threads_env()?;
    match cli.cmd {
        Cmd::Validate { input, common } => {
            let (text, result) = run_validate(&input)?;
            emit(common.format, "validate", text, result);
        }
        Cmd::Cohomology { input, n, budget, common } => {
            let degrees = parse_degree_range(&n)?;
            let (text, result) = run_cohomology(&input, &degrees, budget)?;
            emit(common.format, "cohomology", text, result);
        }
        Cmd::Diagram { input, n, budget, common } => {
            let (text, result) = run_diagram(&input, n, budget)?;
            emit(common.format, "diagram", text, result);
        }
        Cmd::Extensions { cmd } => match cmd {
            ExtCmd::Classify { input, budget, oracle, common } => {
                let (text, result) = run_classify(&input, budget, oracle)?;
                emit(common.format, "extensions classify", text, result);
            }
        },
        Cmd::Completion { input, common } => {
            let (text, result) = run_completion(&input)?;
            emit(common.format, "completion", text, result);
        }
        Cmd::Cyclic { example_310, m, input, n, budget, common } => {
            let degrees = parse_degree_range(&n)?;
            let (text, result) =
                run_cyclic(example_310, m, input.as_ref(), &degrees, budget)?;
            emit(common.format, "cyclic", text, result);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

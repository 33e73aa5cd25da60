mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use h4n_core::algebra::{associativity_witness, unit_witness, Algebra, AlgebraSpec, Family, MAX_N};
use h4n_core::coalgebra::{AxiomMode, StructureMaps};
use h4n_core::green::{presentation_for, verify_closed_forms, verify_presentation, FusionTable};
use h4n_core::quasitriangular::certify;
use h4n_core::report::{Check, Status};
use h4n_core::representation::{
    decompose, make_indecomposable, parse_product, full_catalog, tensor_representation, Decomposition,
    IndecLabel, Representation,
};
use h4n_core::scalar::{parse_rational, rational_to_string, Rational};
use h4n_core::Error;
use serde_json::json;

use output::{status_word, Format, Outcome, Sections};

#[derive(Parser)]
#[command(name = "h4n", version, about = "Exact computations in H_4n, its dual and their weak variants")]
struct Cli {
    /// Algebra family.
    #[arg(long, global = true, default_value = "h4n", value_parser = parse_family)]
    family: Family,
    /// Half the order of the root of unity q.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=MAX_N as i64))]
    n: u32,
    /// Structure constant a, as an integer or p/q.
    #[arg(long, global = true, default_value = "1", value_parser = parse_a, allow_hyphen_values = true)]
    a: Rational,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "H4N_THREADS", value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the (weak) Hopf axioms and the algebra invariants.
    Verify,
    /// Certify the universal R-matrix (h4n only).
    Rmatrix,
    /// Decompose a tensor product of catalog modules, e.g. `tensor M0 M1` or `tensor 'M0*M1*S2'`.
    Tensor {
        #[arg(required = true, num_args = 1.., value_name = "LABEL")]
        labels: Vec<String>,
        /// Include the change-of-basis matrix.
        #[arg(long)]
        certificate: bool,
    },
    /// Decompose a module given as JSON (`{"dim", "g", "x"}`); `-` reads stdin.
    Decompose {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        certificate: bool,
    },
    /// Print the Green-ring multiplication table.
    GreenTable,
    /// Check the product rules and the ring presentation against the computed table.
    Presentation,
    /// List the indecomposable modules with their dimensions.
    Catalog,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_a(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(if status == Status::Pass { 0 } else { 1 }),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Bad input is a usage error (2); anything else means a computation went wrong (1).
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse(_)
            | Error::InvalidLabel { .. }
            | Error::UnsupportedFamily { .. }
            | Error::InvalidParameter(_)
            | Error::SpecMismatch { .. }
            | Error::DimensionMismatch(_)
            | Error::InvalidRepresentation(_),
        ) => 2,
        Some(_) => 1,
        None if err.downcast_ref::<std::io::Error>().is_some() => 2,
        None => 1,
    }
}

fn run(cli: &Cli) -> Result<Status> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    let spec = AlgebraSpec::new(cli.family, cli.n, cli.a.clone())?;
    if spec.a_is_zero() {
        eprintln!("notice: a = 0; the representation theory and Green rings assume a ≠ 0");
    }
    let alg = Algebra::new(spec)?;
    let outcome = match &cli.command {
        Command::Verify => verify(&alg)?,
        Command::Rmatrix => rmatrix(&alg)?,
        Command::Tensor { labels, certificate } => tensor(&alg, labels, *certificate)?,
        Command::Decompose { input, certificate } => decompose_file(&alg, input, *certificate)?,
        Command::GreenTable => green_table(&alg)?,
        Command::Presentation => presentation(&alg)?,
        Command::Catalog => catalog(&alg)?,
    };
    outcome.emit(cli.format, cli.output.as_deref())?;
    Ok(outcome.status)
}

fn header(alg: &Arc<Algebra>, command: &str) -> serde_json::Value {
    json!({
        "command": command,
        "family": alg.family(),
        "n": alg.n(),
        "a": rational_to_string(&alg.spec().a),
    })
}

fn from_sections(alg: &Arc<Algebra>, command: &str, sections: Sections) -> Outcome {
    let mut json = header(alg, command);
    json["sections"] = sections.json();
    Outcome { status: sections.status(), text: sections.text(), json, csv: sections.csv() }
}

fn verify(alg: &Arc<Algebra>) -> Result<Outcome> {
    let maps = StructureMaps::new(alg);
    let mut s = Sections::new(format!("verify {}", alg.spec()));
    s.push(
        "algebra",
        vec![
            Check::from_witness("associativity of the multiplication table", associativity_witness(alg)),
            Check::from_witness("1 is a two-sided unit", unit_witness(alg)),
        ],
    );
    s.push("axioms", maps.verify_axioms(AxiomMode::for_family(alg.family()))?);
    if alg.family() == Family::H {
        s.push("idempotents", alg.idempotent_checks()?);
        s.push("coalgebra decomposition", maps.coalgebra_decomposition()?);
    }
    if alg.family().is_weak() {
        s.push("peirce decomposition", alg.peirce_decomposition()?.checks);
    }
    Ok(from_sections(alg, "verify", s))
}

fn rmatrix(alg: &Arc<Algebra>) -> Result<Outcome> {
    let cert = certify(alg)?;
    let mut s = Sections::new(format!("rmatrix {}", alg.spec()));
    s.push("conditions", cert.checks.clone());
    // standard consequences that are not claimed: flagged, not failed
    let props: Vec<Check> = cert
        .properties
        .iter()
        .map(|c| if c.passed() { c.clone() } else { Check { status: Status::Deviation, ..c.clone() } })
        .collect();
    s.push("properties", props);
    let mut text = s.text();
    text.push_str(&format!("\nR = {}\n", cert.r));
    let mut json = header(alg, "rmatrix");
    let body = cert.to_json();
    for key in ["conditions", "properties", "R"] {
        json[key] = body[key].clone();
    }
    Ok(Outcome { status: s.status(), text, json, csv: s.csv() })
}

fn decomposition_outcome(
    alg: &Arc<Algebra>,
    command: &str,
    what: String,
    d: &Decomposition,
    certificate: bool,
) -> Outcome {
    let mut text = format!("{what} = {}\n", d.summary());
    if certificate {
        text.push_str("certificate (columns are the new basis):\n");
        for row in d.basis.rows_as_strings() {
            text.push_str(&format!("  [{}]\n", row.join(", ")));
        }
    }
    let mut json = header(alg, command);
    json["module"] = json!(what);
    let body = d.to_json(certificate);
    json["summands"] = body["summands"].clone();
    if certificate {
        json["certificate"] = body["certificate"].clone();
    }
    let mut csv = vec![vec!["label".to_owned(), "multiplicity".to_owned()]];
    csv.extend(d.multiplicities().into_iter().map(|(l, m)| vec![l.to_string(), m.to_string()]));
    Outcome { status: Status::Pass, text, json, csv }
}

fn tensor(alg: &Arc<Algebra>, args: &[String], certificate: bool) -> Result<Outcome> {
    let mut labels: Vec<IndecLabel> = Vec::new();
    for a in args {
        labels.extend(parse_product(a, alg.family(), alg.n())?);
    }
    let maps = StructureMaps::new(alg);
    let mut rep = make_indecomposable(alg, labels[0])?;
    for l in &labels[1..] {
        rep = tensor_representation(&maps, &rep, &make_indecomposable(alg, *l)?)?;
    }
    let word: Vec<String> = labels.iter().map(ToString::to_string).collect();
    let d = decompose(&rep)?;
    Ok(decomposition_outcome(alg, "tensor", word.join(" ⊗ "), &d, certificate))
}

fn decompose_file(alg: &Arc<Algebra>, input: &PathBuf, certificate: bool) -> Result<Outcome> {
    let raw = if input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| {
            anyhow::Error::new(std::io::Error::new(e.kind(), format!("reading {}: {e}", input.display())))
        })?
    };
    let value: serde_json::Value =
        serde_json::from_str(&raw).map_err(|e| Error::Parse(format!("input is not JSON: {e}")))?;
    let rep = Representation::from_json(alg, &value)?;
    let broken: Vec<String> = rep.verify().into_iter().filter(|c| !c.passed()).map(|c| c.axiom).collect();
    if !broken.is_empty() {
        return Err(Error::InvalidRepresentation(format!("violated: {}", broken.join(", "))).into());
    }
    let d = decompose(&rep)?;
    Ok(decomposition_outcome(alg, "decompose", format!("module of dimension {}", rep.dim()), &d, certificate))
}

fn green_table(alg: &Arc<Algebra>) -> Result<Outcome> {
    let table = FusionTable::build(alg)?;
    let mut json = header(alg, "green-table");
    let body = table.to_json();
    for key in ["labels", "basis", "products"] {
        json[key] = body[key].clone();
    }
    Ok(Outcome { status: Status::Pass, text: table.to_text(), json, csv: table.grid() })
}

fn presentation(alg: &Arc<Algebra>) -> Result<Outcome> {
    let table = FusionTable::build(alg)?;
    let closed = verify_closed_forms(&table);
    let pres = verify_presentation(&table, &presentation_for(alg.family(), alg.n()));
    let mut s = Sections::new(format!("presentation {}", alg.spec()));
    s.push("ring", table.ring_checks());
    let items: Vec<Check> = closed
        .items
        .iter()
        .map(|i| {
            let name = format!("{} ({} case{})", i.statement, i.cases, if i.cases == 1 { "" } else { "s" });
            let witness = i.mismatches.first().map(|m| {
                let more = i.mismatches.len() - 1;
                let note = if i.status == Status::Deviation { "; agrees after substituting the computed splitting" } else { "" };
                if more > 0 { format!("{m} (+{more} more){note}") } else { format!("{m}{note}") }
            });
            Check { axiom: name, status: i.status, witness }
        })
        .collect();
    s.push("product rules", items);
    s.push("relations", pres.relations.clone());
    s.push("basis", vec![pres.basis.clone()]);
    s.push("commutativity", vec![pres.commutativity.clone()]);
    let mut text = s.text();
    let gens: Vec<String> = pres.generators.iter().map(|(n, e)| format!("{n} = [{e}]")).collect();
    text.push_str(&format!("generators: {}\n", gens.join(", ")));
    if !closed.splittings.is_empty() {
        let sp: Vec<String> = closed.splittings.iter().map(|(l, e)| format!("{l} ≅ {e}")).collect();
        text.push_str(&format!("splittings: {}\n", sp.join(", ")));
        text.push_str(&format!("product rules consistent after substitution: {}\n", closed.consistent));
    }
    let mut json = header(alg, "presentation");
    json["sections"] = s.json();
    json["closed_forms"] = serde_json::to_value(&closed)?;
    json["presentation"] = serde_json::to_value(&pres)?;
    Ok(Outcome { status: s.status(), text, json, csv: s.csv() })
}

fn catalog(alg: &Arc<Algebra>) -> Result<Outcome> {
    let family = alg.family();
    let mut rows = Vec::new();
    for l in full_catalog(family, alg.n()) {
        let d = decompose(&make_indecomposable(alg, l)?)?;
        let status = if d.blocks == [l] { Status::Pass } else { Status::Deviation };
        rows.push((l, l.dim_in(family), d.summary(), status));
    }
    let status = rows.iter().map(|r| r.3).max().unwrap_or(Status::Pass);
    let mut text = format!("catalog {}\n", alg.spec());
    for (l, dim, summary, st) in &rows {
        text.push_str(&format!("  {:<8} dim {dim}", l.to_string()));
        if *st != Status::Pass {
            text.push_str(&format!("  [deviation] decomposes as {summary}"));
        }
        text.push('\n');
    }
    text.push_str(&format!("\n{} labels; overall: {}\n", rows.len(), status_word(status)));
    let mut json = header(alg, "catalog");
    json["labels"] = rows
        .iter()
        .map(|(l, dim, summary, st)| json!({"label": l, "dim": dim, "decomposition": summary, "status": st}))
        .collect();
    let mut csv = vec![vec!["label".into(), "dim".into(), "decomposition".into(), "status".into()]];
    csv.extend(rows.iter().map(|(l, dim, summary, st)| {
        vec![l.to_string(), dim.to_string(), summary.clone(), status_word(*st).to_owned()]
    }));
    Ok(Outcome { status, text, json, csv })
}

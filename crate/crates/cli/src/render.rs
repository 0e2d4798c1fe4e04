//! Plain, JSON and CSV renderings of command results.
//!
//! Every JSON document is an object carrying `"schema": "1"` and a `"kind"`.
//! Rationals and big integers are strings so nothing is lost to floats.

use std::io::Write;

use anyhow::Result;
use gwsym::eta::{EtaChoice, EtaLabel};
use gwsym::hurwitz::{CharacterTable, ClassAlgebra, TupleCount, TupleSpec};
use gwsym::integrator::{BracketValue, TermAudit};
use gwsym::oracle::IdentityViolation;
use gwsym::strata::ContractionTerm;
use gwsym::{BracketQuery, Rational};
use serde::Serialize;

pub const SCHEMA: &str = "1";

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: &'static str,
    kind: &'static str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(out: &mut impl Write, kind: &'static str, body: T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, &Envelope { schema: SCHEMA, kind, body })?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

/// A short stable tag for a canonical key (FNV-1a), for plain output.
fn short_key(key: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Serialize)]
struct TermRow {
    key: String,
    edges: usize,
    aut_count: u64,
    prefactor: String,
    chi: Vec<Vec<String>>,
    contribution: String,
}

impl From<&TermAudit> for TermRow {
    fn from(t: &TermAudit) -> Self {
        TermRow {
            key: t.key.clone(),
            edges: t.edges,
            aut_count: t.aut_count,
            prefactor: t.prefactor.to_string(),
            chi: t.chi.iter().map(|v| v.iter().map(|c| c.to_string()).collect()).collect(),
            contribution: t.contribution.to_string(),
        }
    }
}

impl TermRow {
    fn chi_text(&self) -> String {
        let groups: Vec<String> = self.chi.iter().map(|v| format!("[{}]", v.join(" "))).collect();
        groups.join("")
    }
}

#[derive(Serialize)]
struct BracketDoc {
    genus: u32,
    powers: Vec<u32>,
    poles: Option<String>,
    value: String,
    eta_degree: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermRow>>,
}

pub fn bracket(
    out: &mut impl Write,
    format: Format,
    q: &BracketQuery,
    choice: Option<&EtaChoice>,
    value: &BracketValue,
    audit: bool,
) -> Result<()> {
    let rows: Vec<TermRow> = value.terms.iter().map(TermRow::from).collect();
    match format {
        Format::Plain => {
            writeln!(out, "{}", value.value)?;
            if audit {
                writeln!(out, "query: {q}")?;
                if let Some(c) = choice {
                    writeln!(out, "poles: {c}")?;
                }
                if let Some(n) = &value.eta_degree {
                    writeln!(out, "eta degree: {n}")?;
                }
                writeln!(out, "terms: {}", rows.len())?;
                for r in &rows {
                    writeln!(
                        out,
                        "  {:>14}  edges={} aut={} prefactor={} chi={}  {}",
                        r.contribution,
                        r.edges,
                        r.aut_count,
                        r.prefactor,
                        r.chi_text(),
                        short_key(&r.key)
                    )?;
                }
            }
        }
        Format::Json => json(
            out,
            "bracket",
            BracketDoc {
                genus: q.genus(),
                powers: q.powers().to_vec(),
                poles: choice.map(|c| c.to_string()),
                value: value.value.to_string(),
                eta_degree: value.eta_degree.as_ref().map(|r| r.to_string()),
                terms: audit.then_some(rows),
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            if audit {
                w.write_record(["key", "edges", "aut_count", "prefactor", "chi", "contribution"])?;
                for r in &rows {
                    w.write_record([
                        r.key.clone(),
                        r.edges.to_string(),
                        r.aut_count.to_string(),
                        r.prefactor.clone(),
                        r.chi_text(),
                        r.contribution.clone(),
                    ])?;
                }
            } else {
                w.write_record(["genus", "powers", "value"])?;
                w.write_record([q.genus().to_string(), join(q.powers(), ","), value.value.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StratumRow {
    key: String,
    edges: usize,
    aut_count: u64,
    norm: String,
    tail_weights: Vec<String>,
    edge_weights: Vec<String>,
    vertex_classes: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct StrataDoc {
    genus: u32,
    powers: Vec<u32>,
    poles: String,
    eta_degree: String,
    terms: Vec<StratumRow>,
}

pub fn strata(
    out: &mut impl Write,
    format: Format,
    q: &BracketQuery,
    eta: &EtaLabel,
    terms: &[ContractionTerm],
) -> Result<()> {
    let rows: Vec<StratumRow> = terms
        .iter()
        .map(|t| StratumRow {
            key: t.key.clone(),
            edges: t.num_edges(),
            aut_count: t.aut_count,
            norm: t.norm.to_string(),
            tail_weights: t.tail_weights.iter().map(|w| w.weight.to_string()).collect(),
            edge_weights: t.edge_weights.iter().map(|w| w.weight.to_string()).collect(),
            vertex_classes: t
                .vertices
                .iter()
                .map(|v| v.chi_inputs.iter().map(|s| format!("{}:{}", s.degree, join(&s.classes, ";"))).collect())
                .collect(),
        })
        .collect();
    let n_eta = gwsym::eta::eta_degree(eta);
    match format {
        Format::Plain => {
            writeln!(out, "query: {q}")?;
            writeln!(out, "poles: {}", eta.choice)?;
            writeln!(out, "eta degree: {n_eta}")?;
            writeln!(out, "terms: {}", rows.len())?;
            for (i, r) in rows.iter().enumerate() {
                writeln!(
                    out,
                    "#{i} edges={} aut={} norm={} tails=[{}] edge_weights=[{}] sheets={}  {}",
                    r.edges,
                    r.aut_count,
                    r.norm,
                    r.tail_weights.join(", "),
                    r.edge_weights.join(", "),
                    r.vertex_classes.iter().map(|v| format!("[{}]", v.join(" "))).collect::<String>(),
                    short_key(&r.key)
                )?;
            }
        }
        Format::Json => json(
            out,
            "strata",
            StrataDoc {
                genus: q.genus(),
                powers: q.powers().to_vec(),
                poles: eta.choice.to_string(),
                eta_degree: n_eta.to_string(),
                terms: rows,
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["key", "edges", "aut_count", "norm", "tail_weights", "edge_weights"])?;
            for r in &rows {
                w.write_record([
                    r.key.clone(),
                    r.edges.to_string(),
                    r.aut_count.to_string(),
                    r.norm.clone(),
                    r.tail_weights.join(";"),
                    r.edge_weights.join(";"),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CountDoc {
    value: String,
    brute: Option<String>,
    character: Option<String>,
}

impl From<&TupleCount> for CountDoc {
    fn from(c: &TupleCount) -> Self {
        CountDoc {
            value: c.value.to_string(),
            brute: c.brute.as_ref().map(|v| v.to_string()),
            character: c.character.as_ref().map(|v| v.to_string()),
        }
    }
}

#[derive(Serialize)]
struct HurwitzDoc {
    degree: u32,
    classes: Vec<String>,
    all: CountDoc,
    transitive: CountDoc,
}

pub fn hurwitz(
    out: &mut impl Write,
    format: Format,
    spec: &TupleSpec,
    all: &TupleCount,
    transitive: &TupleCount,
) -> Result<()> {
    let doc = HurwitzDoc {
        degree: spec.degree,
        classes: spec.classes.iter().map(|c| c.to_string()).collect(),
        all: all.into(),
        transitive: transitive.into(),
    };
    let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
    match format {
        Format::Plain => {
            writeln!(out, "all={} transitive={}", doc.all.value, doc.transitive.value)?;
            writeln!(out, "brute force: all={} transitive={}", opt(&doc.all.brute), opt(&doc.transitive.brute))?;
            writeln!(
                out,
                "characters: all={} transitive={}",
                opt(&doc.all.character),
                opt(&doc.transitive.character)
            )?;
        }
        Format::Json => json(out, "hurwitz", doc)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["count", "value", "brute", "character"])?;
            for (name, c) in [("all", &doc.all), ("transitive", &doc.transitive)] {
                w.write_record([name.to_string(), c.value.clone(), opt(&c.brute), opt(&c.character)])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TableDoc {
    degree: u32,
    classes: Vec<String>,
    rows: Vec<TableRow>,
}

#[derive(Serialize)]
struct TableRow {
    irreducible: String,
    values: Vec<String>,
}

pub fn chartable(out: &mut impl Write, format: Format, table: &CharacterTable) -> Result<()> {
    let classes: Vec<String> = table.partitions.iter().map(|p| p.to_string()).collect();
    let rows: Vec<TableRow> = table
        .partitions
        .iter()
        .zip(&table.values)
        .map(|(p, v)| TableRow { irreducible: p.to_string(), values: v.iter().map(|x| x.to_string()).collect() })
        .collect();
    match format {
        Format::Plain => {
            let width = classes
                .iter()
                .chain(rows.iter().flat_map(|r| r.values.iter().chain(std::iter::once(&r.irreducible))))
                .map(String::len)
                .max()
                .unwrap_or(1);
            write!(out, "{:>width$}", "")?;
            for c in &classes {
                write!(out, " {c:>width$}")?;
            }
            writeln!(out)?;
            for r in &rows {
                write!(out, "{:>width$}", r.irreducible)?;
                for v in &r.values {
                    write!(out, " {v:>width$}")?;
                }
                writeln!(out)?;
            }
        }
        Format::Json => json(out, "chartable", TableDoc { degree: table.degree, classes, rows })?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(std::iter::once("irreducible".to_string()).chain(classes))?;
            for r in rows {
                w.write_record(std::iter::once(r.irreducible).chain(r.values))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantRow {
    left: String,
    right: String,
    result: String,
    coefficient: u64,
}

#[derive(Serialize)]
struct ClassAlgDoc {
    degree: u32,
    classes: Vec<String>,
    constants: Vec<ConstantRow>,
}

pub fn classalg(out: &mut impl Write, format: Format, alg: &ClassAlgebra) -> Result<()> {
    let p = &alg.partitions;
    let mut constants = Vec::new();
    for (a, row) in alg.constants.iter().enumerate() {
        for (b, col) in row.iter().enumerate() {
            for (c, &coefficient) in col.iter().enumerate() {
                if coefficient != 0 {
                    constants.push(ConstantRow {
                        left: p[a].to_string(),
                        right: p[b].to_string(),
                        result: p[c].to_string(),
                        coefficient,
                    });
                }
            }
        }
    }
    match format {
        Format::Plain => {
            for r in &constants {
                writeln!(out, "[{}] * [{}] -> {} [{}]", r.left, r.right, r.coefficient, r.result)?;
            }
        }
        Format::Json => json(
            out,
            "classalg",
            ClassAlgDoc { degree: alg.degree, classes: p.iter().map(|x| x.to_string()).collect(), constants },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["left", "right", "result", "coefficient"])?;
            for r in &constants {
                w.write_record([r.left.clone(), r.right.clone(), r.result.clone(), r.coefficient.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub struct VerifyRow {
    pub query: BracketQuery,
    pub value: Rational,
    pub oracle: Rational,
}

#[derive(Serialize)]
struct VerifyEntry {
    genus: u32,
    powers: Vec<u32>,
    value: String,
    oracle: String,
    agree: bool,
}

#[derive(Serialize)]
struct VerifyDoc {
    checked: usize,
    mismatches: usize,
    identity_checks: usize,
    identity_violations: Vec<String>,
    results: Vec<VerifyEntry>,
}

pub fn verify(
    out: &mut impl Write,
    format: Format,
    rows: &[VerifyRow],
    identities: &Result<usize, Vec<IdentityViolation>>,
) -> Result<()> {
    let entries: Vec<VerifyEntry> = rows
        .iter()
        .map(|r| VerifyEntry {
            genus: r.query.genus(),
            powers: r.query.powers().to_vec(),
            value: r.value.to_string(),
            oracle: r.oracle.to_string(),
            agree: r.value == r.oracle,
        })
        .collect();
    let mismatches = entries.iter().filter(|e| !e.agree).count();
    let (identity_checks, violations) = match identities {
        Ok(n) => (*n, Vec::new()),
        Err(v) => (0, v.iter().map(|x| x.to_string()).collect()),
    };
    match format {
        Format::Plain => {
            for (r, e) in rows.iter().zip(&entries) {
                let tag = if e.agree { "ok" } else { "MISMATCH" };
                writeln!(out, "{tag:<8} {} = {} (recursion {})", r.query, e.value, e.oracle)?;
            }
            for v in &violations {
                writeln!(out, "identity {v}")?;
            }
            writeln!(
                out,
                "checked {} brackets, {} mismatches; {} identity checks, {} violations",
                entries.len(),
                mismatches,
                identity_checks,
                violations.len()
            )?;
        }
        Format::Json => json(
            out,
            "verify",
            VerifyDoc {
                checked: entries.len(),
                mismatches,
                identity_checks,
                identity_violations: violations,
                results: entries,
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["genus", "powers", "value", "oracle", "agree"])?;
            for e in &entries {
                w.write_record([
                    e.genus.to_string(),
                    join(&e.powers, ","),
                    e.value.clone(),
                    e.oracle.clone(),
                    e.agree.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

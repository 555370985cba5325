//! CPLEX LP text for [`IlpModel`].

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::exact::ilp::IlpModel;

const WRAP: usize = 200;

/// Appends ` + c name` terms, breaking lines before they exceed the wrap width.
struct LineWriter<'a, W: Write> {
    out: &'a mut W,
    len: usize,
}

impl<W: Write> LineWriter<'_, W> {
    fn push(&mut self, token: &str) -> std::io::Result<()> {
        if self.len + token.len() + 1 > WRAP {
            write!(self.out, "\n ")?;
            self.len = 1;
        }
        write!(self.out, " {token}")?;
        self.len += token.len() + 1;
        Ok(())
    }
}

fn term(first: bool, coef: f64, name: &str) -> String {
    let sign = if coef < 0.0 { "-" } else if first { "" } else { "+" };
    let mag = coef.abs();
    let body = if mag == 1.0 {
        name.to_string()
    } else {
        format!("{mag} {name}")
    };
    if sign.is_empty() {
        body
    } else {
        format!("{sign} {body}")
    }
}

fn write_section<W: Write>(w: &mut W, header: &str, names: &[String]) -> std::io::Result<()> {
    if names.is_empty() {
        return Ok(());
    }
    writeln!(w, "{header}")?;
    let mut lw = LineWriter { out: w, len: 0 };
    for name in names {
        lw.push(name)?;
    }
    writeln!(w)
}

pub fn write_lp_to(model: &IlpModel, mut w: impl Write) -> Result<()> {
    let names: Vec<String> = model.vars.iter().map(|v| v.name()).collect();
    writeln!(
        w,
        "\\ kρ-MSP model: variant {:?}, k = {}, rho = {}, n = {}",
        model.variant, model.k, model.rho, model.n
    )?;
    writeln!(w, "Minimize")?;
    write!(w, " obj:")?;
    {
        let mut lw = LineWriter { out: &mut w, len: 5 };
        let mut first = true;
        for i in model.objective() {
            lw.push(&term(first, 1.0, &names[i]))?;
            first = false;
        }
        if first {
            // Keep the objective syntactically non-empty.
            if let Some(name) = names.first() {
                lw.push(&format!("0 {name}"))?;
            }
        }
    }
    writeln!(w)?;
    writeln!(w, "Subject To")?;
    for row in &model.rows {
        write!(w, " {}:", row.name)?;
        let mut lw = LineWriter {
            out: &mut w,
            len: row.name.len() + 2,
        };
        for (j, &(i, c)) in row.terms.iter().enumerate() {
            lw.push(&term(j == 0, c, &names[i]))?;
        }
        if row.terms.is_empty() {
            lw.push(&format!("0 {}", names.first().map_or("x", |s| s.as_str())))?;
        }
        lw.push(&format!("{} {}", row.sense, row.rhs))?;
        writeln!(w)?;
    }
    let binaries: Vec<String> = model
        .vars
        .iter()
        .filter(|v| v.is_binary())
        .map(|v| v.name())
        .collect();
    let generals: Vec<String> = model
        .vars
        .iter()
        .filter(|v| !v.is_binary())
        .map(|v| v.name())
        .collect();
    // A unit flow never repeats an arc: every arc weighs at least d(u, v) > 0.
    if !generals.is_empty() {
        writeln!(w, "Bounds")?;
        for name in &generals {
            writeln!(w, " 0 <= {name} <= 1")?;
        }
    }
    write_section(&mut w, "Binary", &binaries)?;
    write_section(&mut w, "General", &generals)?;
    writeln!(w, "End")?;
    Ok(())
}

pub fn write_lp(model: &IlpModel, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_lp_to(model, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Structure recovered from an LP file written by [`write_lp`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpSummary {
    pub objective_terms: usize,
    pub rows: Vec<String>,
    pub variables: BTreeSet<String>,
    pub binaries: BTreeSet<String>,
    pub generals: BTreeSet<String>,
}

#[derive(PartialEq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Binary,
    General,
    Bounds,
    End,
}

fn is_name(tok: &str) -> bool {
    tok.chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

/// Reads the subset of the LP format that [`write_lp`] produces.
pub fn read_lp(reader: impl BufRead) -> Result<LpSummary> {
    let mut out = LpSummary::default();
    let mut section = Section::Start;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('\\') {
            continue;
        }
        let next = match t.to_ascii_lowercase().as_str() {
            "minimize" | "minimise" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "binary" | "binaries" => Some(Section::Binary),
            "general" | "generals" => Some(Section::General),
            "bounds" => Some(Section::Bounds),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            section = s;
            continue;
        }
        let body = match t.split_once(':') {
            Some((name, rest)) => {
                if section == Section::Constraints {
                    out.rows.push(name.trim().to_string());
                }
                rest
            }
            None => t,
        };
        for tok in body.split_whitespace() {
            if !is_name(tok) {
                continue;
            }
            match section {
                Section::Objective => {
                    out.objective_terms += 1;
                    out.variables.insert(tok.to_string());
                }
                Section::Constraints | Section::Bounds => {
                    out.variables.insert(tok.to_string());
                }
                Section::Binary => {
                    out.binaries.insert(tok.to_string());
                }
                Section::General => {
                    out.generals.insert(tok.to_string());
                }
                Section::Start | Section::End => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "content outside LP sections".into(),
                    })
                }
            }
        }
    }
    out.variables.extend(out.binaries.iter().cloned());
    out.variables.extend(out.generals.iter().cloned());
    Ok(out)
}

/// Writes `model` and returns its text.
pub fn lp_string(model: &IlpModel) -> String {
    let mut buf = Vec::new();
    write_lp_to(model, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("LP text is UTF-8")
}

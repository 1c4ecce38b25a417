//! Free-format MPS reader and writer.
//!
//! The writer emits every section (`ROWS`, `COLUMNS`, `RHS`, `RANGES`,
//! `BOUNDS`) even when empty, wraps integer columns in `INTORG`/`INTEND`
//! markers and prints numbers in shortest round-trip form, so that
//! `parse(write(p)) == p` holds exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::MilpError;
use crate::problem::{Column, Problem, Row, Sense, VarKind};

const OBJ_ROW: &str = "OBJ";
const RESERVED: [&str; 3] = [OBJ_ROW, "MARKER", "RHS"];

fn check_name(name: &str) -> Result<(), MilpError> {
    let ok = !name.is_empty()
        && name.len() <= 255
        && !name.chars().any(char::is_whitespace)
        && !name.starts_with('$')
        && !name.starts_with('*')
        && !RESERVED.contains(&name);
    if ok {
        Ok(())
    } else {
        Err(MilpError::IllegalName(name.to_string()))
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_mps(problem: &Problem) -> Result<String, MilpError> {
    problem.validate()?;
    if !problem.name.is_empty() && problem.name.chars().any(char::is_whitespace) {
        return Err(MilpError::IllegalName(problem.name.clone()));
    }
    for c in &problem.columns {
        check_name(&c.name)?;
    }
    for r in &problem.rows {
        check_name(&r.name)?;
    }
    let mut out = String::new();
    if problem.name.is_empty() {
        out.push_str("NAME\n");
    } else {
        let _ = writeln!(out, "NAME {}", problem.name);
    }
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for r in &problem.rows {
        let s = match r.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {s}  {}", r.name);
    }

    out.push_str("COLUMNS\n");
    let by_col = problem.column_major();
    let mut in_int = false;
    let mut marker = 0;
    for (j, col) in problem.columns.iter().enumerate() {
        let integral = col.kind.is_integral();
        if integral != in_int {
            let tag = if integral { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    MARKER{marker}  'MARKER'  {tag}");
            marker += 1;
            in_int = integral;
        }
        let _ = writeln!(out, "    {}  {OBJ_ROW}  {}", col.name, num(problem.objective[j]));
        for &(i, v) in &by_col[j] {
            let _ = writeln!(out, "    {}  {}  {}", col.name, problem.rows[i].name, num(v));
        }
    }
    if in_int {
        let _ = writeln!(out, "    MARKER{marker}  'MARKER'  'INTEND'");
    }

    out.push_str("RHS\n");
    for r in &problem.rows {
        if r.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", r.name, num(r.rhs));
        }
    }
    out.push_str("RANGES\n");
    for r in &problem.rows {
        if let Some(range) = r.range {
            let _ = writeln!(out, "    RNG  {}  {}", r.name, num(range));
        }
    }
    out.push_str("BOUNDS\n");
    for c in &problem.columns {
        write_bounds(&mut out, c);
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

fn write_bounds(out: &mut String, c: &Column) {
    let name = &c.name;
    let (lo, hi) = (c.lower, c.upper);
    match c.kind {
        VarKind::Binary => {
            let _ = writeln!(out, " BV BND {name}");
            if lo != 0.0 {
                let _ = writeln!(out, " LO BND {name} {}", num(lo));
            }
            if hi != 1.0 {
                let _ = writeln!(out, " UP BND {name} {}", num(hi));
            }
        }
        VarKind::Integer => {
            if lo == f64::NEG_INFINITY {
                let _ = writeln!(out, " MI BND {name}");
            } else {
                let _ = writeln!(out, " LI BND {name} {}", num(lo));
            }
            if hi == f64::INFINITY {
                let _ = writeln!(out, " PL BND {name}");
            } else {
                let _ = writeln!(out, " UI BND {name} {}", num(hi));
            }
        }
        VarKind::Continuous => {
            if lo == hi {
                let _ = writeln!(out, " FX BND {name} {}", num(lo));
            } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                let _ = writeln!(out, " FR BND {name}");
            } else {
                if hi != f64::INFINITY && hi < 0.0 && lo == 0.0 {
                    // some readers move the lower bound to -inf on a negative UP
                    let _ = writeln!(out, " UP BND {name} {}", num(hi));
                    let _ = writeln!(out, " LO BND {name} 0.0");
                    return;
                }
                if lo == f64::NEG_INFINITY {
                    let _ = writeln!(out, " MI BND {name}");
                } else if lo != 0.0 {
                    let _ = writeln!(out, " LO BND {name} {}", num(lo));
                }
                if hi != f64::INFINITY {
                    let _ = writeln!(out, " UP BND {name} {}", num(hi));
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

pub fn parse_mps(text: &str) -> Result<Problem, MilpError> {
    let mut p = Problem::new("");
    let mut section = Section::None;
    let mut obj_name: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut free_rows: Vec<String> = Vec::new();
    let mut in_int = false;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let err = |msg: String| MilpError::MpsParse { line: lineno, msg };
        if line.starts_with('*') || line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !line.starts_with(' ') && !line.starts_with('\t') {
            section = match toks[0] {
                "NAME" => {
                    p.name = toks.get(1).map(|s| s.to_string()).unwrap_or_default();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                "OBJSENSE" if toks.get(1).is_none_or(|s| *s == "MIN") => section,
                other => return Err(err(format!("unsupported section {other}"))),
            };
            continue;
        }
        let parse_num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}")));
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(err("expected `<type> <name>`".into()));
                }
                let sense = match toks[0] {
                    "N" => {
                        if obj_name.is_none() {
                            obj_name = Some(toks[1].to_string());
                        } else {
                            free_rows.push(toks[1].to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(err(format!("unknown row type {t}"))),
                };
                if row_index.insert(toks[1].to_string(), p.rows.len()).is_some() {
                    return Err(err(format!("duplicate row {}", toks[1])));
                }
                p.rows.push(Row { name: toks[1].to_string(), coeffs: Vec::new(), sense, rhs: 0.0, range: None });
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        t => return Err(err(format!("unknown marker {t}"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err("expected `<col> <row> <value> [<row> <value>]`".into()));
                }
                let j = match col_index.get(toks[0]) {
                    Some(&j) => j,
                    None => {
                        let kind = if in_int { VarKind::Integer } else { VarKind::Continuous };
                        let j = p.add_column(toks[0], 0.0, f64::INFINITY, kind, 0.0);
                        col_index.insert(toks[0].to_string(), j);
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1])?;
                    if Some(pair[0]) == obj_name.as_deref() {
                        p.objective[j] = v;
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        if v != 0.0 {
                            p.rows[i].coeffs.push((j, v));
                        }
                    } else if !free_rows.iter().any(|r| r == pair[0]) {
                        return Err(err(format!("unknown row {}", pair[0])));
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                let body = if toks.len() % 2 == 1 { &toks[1..] } else { &toks[..] };
                for pair in body.chunks(2) {
                    if pair.len() != 2 {
                        return Err(err("dangling entry".into()));
                    }
                    let v = parse_num(pair[1])?;
                    if Some(pair[0]) == obj_name.as_deref() {
                        if v != 0.0 {
                            return Err(err("objective constant is not supported".into()));
                        }
                        continue;
                    }
                    let &i = row_index.get(pair[0]).ok_or_else(|| err(format!("unknown row {}", pair[0])))?;
                    if section == Section::Rhs {
                        p.rows[i].rhs = v;
                    } else {
                        p.rows[i].range = Some(v);
                    }
                }
            }
            Section::Bounds => {
                let kind = toks[0];
                let needs_value = !matches!(kind, "FR" | "MI" | "PL" | "BV");
                let (col, val) = match (needs_value, toks.len()) {
                    (true, 4) => (toks[2], Some(parse_num(toks[3])?)),
                    (true, 3) => (toks[1], Some(parse_num(toks[2])?)),
                    (false, 3) => (toks[2], None),
                    (false, 2) => (toks[1], None),
                    // BV may carry an (ignored) value
                    (false, 4) if kind == "BV" => (toks[2], None),
                    _ => return Err(err("malformed bound".into())),
                };
                let &j = col_index.get(col).ok_or_else(|| err(format!("unknown column {col}")))?;
                let c = &mut p.columns[j];
                match (kind, val) {
                    ("UP", Some(v)) | ("UI", Some(v)) => c.upper = v,
                    ("LO", Some(v)) | ("LI", Some(v)) => c.lower = v,
                    ("FX", Some(v)) => {
                        c.lower = v;
                        c.upper = v;
                    }
                    ("FR", None) => {
                        c.lower = f64::NEG_INFINITY;
                        c.upper = f64::INFINITY;
                    }
                    ("MI", None) => c.lower = f64::NEG_INFINITY,
                    ("PL", None) => c.upper = f64::INFINITY,
                    ("BV", None) => {
                        c.kind = VarKind::Binary;
                        c.lower = 0.0;
                        c.upper = 1.0;
                    }
                    (k, _) => return Err(err(format!("unsupported bound type {k}"))),
                }
                if matches!(kind, "LI" | "UI") && c.kind == VarKind::Continuous {
                    c.kind = VarKind::Integer;
                }
            }
            Section::None | Section::End => {
                return Err(err("data outside of a section".into()));
            }
        }
    }
    if section != Section::End {
        return Err(MilpError::MpsParse { line: text.lines().count(), msg: "missing ENDATA".into() });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_round_trip() {
        let p = Problem::new("empty");
        let text = write_mps(&p).unwrap();
        assert!(text.contains("ROWS") && text.contains("BOUNDS") && text.ends_with("ENDATA\n"));
        assert_eq!(parse_mps(&text).unwrap(), p);
    }

    #[test]
    fn binary_column_written_as_bv() {
        let mut p = Problem::new("b");
        p.add_column("z", 0.0, 1.0, VarKind::Binary, 3.5);
        p.add_column("x", -1.0, 2.5, VarKind::Continuous, 0.1);
        p.add_row(Row::new("c1", vec![(0, 1.0), (1, -0.3)], Sense::Ge, 0.7));
        let text = write_mps(&p).unwrap();
        assert!(text.contains(" BV BND z"));
        assert!(text.contains("'INTORG'") && text.contains("'INTEND'"));
        assert_eq!(parse_mps(&text).unwrap(), p);
    }

    #[test]
    fn rejects_whitespace_names() {
        let mut p = Problem::new("n");
        p.add_column("bad name", 0.0, 1.0, VarKind::Continuous, 0.0);
        match write_mps(&p) {
            Err(MilpError::IllegalName(n)) => assert_eq!(n, "bad name"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_ranges_and_negative_upper() {
        let mut p = Problem::new("r");
        p.add_column("x", 0.0, -1.0, VarKind::Continuous, 1.0);
        let mut r = Row::new("c", vec![(0, 2.0)], Sense::Eq, 1.0);
        r.range = Some(-3.0);
        p.add_row(r);
        // lower > upper is invalid for validate(); use a valid negative upper instead
        p.columns[0].lower = f64::NEG_INFINITY;
        let text = write_mps(&p).unwrap();
        assert_eq!(parse_mps(&text).unwrap(), p);
    }
}

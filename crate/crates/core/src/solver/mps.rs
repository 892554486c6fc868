//! Fixed-format MPS export and import.
//!
//! Rows and columns are emitted under generated names (`R%06d` / `C%06d`);
//! the semantic names live in a sidecar CSV so external tooling never sees
//! a name longer than eight characters. Values are printed in shortest
//! round-trip form, so write → parse reproduces the matrix bit-exactly.

use crate::lp::{LpProblem, ProblemMeta, RowKey, Sense, VarKey, VariableIndex};
use std::collections::HashMap;
use std::io::Write;

pub const OBJECTIVE_ROW: &str = "COST";

#[derive(Debug, thiserror::Error)]
pub enum MpsError {
    #[error("value {0} cannot be encoded in an MPS numeric field")]
    Unencodable(f64),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("RANGES entries are not supported")]
    RangesUnsupported,
}

fn parse_err(line: usize, message: impl Into<String>) -> MpsError {
    MpsError::Parse {
        line,
        message: message.into(),
    }
}

/// Shortest decimal string that parses back to exactly `v`. Never longer
/// than 25 characters (the worst-case shortest round-trip double is 24).
fn fmt_value(v: f64) -> Result<String, MpsError> {
    if !v.is_finite() {
        return Err(MpsError::Unencodable(v));
    }
    let plain = format!("{v}");
    let exp = format!("{v:e}");
    let s = if plain.len() <= exp.len() { plain } else { exp };
    debug_assert!(s.len() <= 25, "{s}");
    Ok(s)
}

fn row_name(i: usize) -> String {
    format!("R{i:06}")
}

fn col_name(j: usize) -> String {
    format!("C{j:06}")
}

/// Write the problem as fixed-format MPS.
pub fn write_mps<W: Write>(problem: &LpProblem, out: &mut W) -> Result<(), MpsError> {
    let m = problem.num_rows();
    let n = problem.num_cols();

    writeln!(out, "NAME          {}", sanitize_name(&problem.meta.name))?;
    writeln!(out, "ROWS")?;
    writeln!(out, " N  {OBJECTIVE_ROW}")?;
    for i in 0..m {
        let s = match problem.senses[i] {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        writeln!(out, " {s}  {}", row_name(i))?;
    }

    writeln!(out, "COLUMNS")?;
    let columns = problem.to_columns();
    for (j, col) in columns.iter().enumerate() {
        let cname = col_name(j);
        if problem.objective[j] != 0.0 {
            writeln!(
                out,
                "    {:<10}{:<10}{}",
                cname,
                OBJECTIVE_ROW,
                fmt_value(problem.objective[j])?
            )?;
        }
        for &(r, v) in col {
            writeln!(out, "    {:<10}{:<10}{}", cname, row_name(r), fmt_value(v)?)?;
        }
    }

    writeln!(out, "RHS")?;
    // MPS convention: the objective constant enters as a negated RHS entry
    // on the objective row.
    if problem.objective_offset != 0.0 {
        writeln!(
            out,
            "    {:<10}{:<10}{}",
            "RHS",
            OBJECTIVE_ROW,
            fmt_value(-problem.objective_offset)?
        )?;
    }
    for i in 0..m {
        if problem.rhs[i] != 0.0 {
            writeln!(
                out,
                "    {:<10}{:<10}{}",
                "RHS",
                row_name(i),
                fmt_value(problem.rhs[i])?
            )?;
        }
    }

    writeln!(out, "RANGES")?;

    writeln!(out, "BOUNDS")?;
    for j in 0..n {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        if l == 0.0 && u == f64::INFINITY {
            continue; // MPS default
        }
        let cname = col_name(j);
        if l == u {
            writeln!(
                out,
                " FX {:<10}{:<10}{}",
                "BND",
                cname,
                fmt_value(l)?
            )?;
            continue;
        }
        if l == f64::NEG_INFINITY && u == f64::INFINITY {
            writeln!(out, " FR {:<10}{:<10}", "BND", cname)?;
            continue;
        }
        // Emit the lower bound explicitly whenever any bound line exists,
        // to dodge the ambiguity of a lone negative UP entry.
        if l == f64::NEG_INFINITY {
            writeln!(out, " MI {:<10}{:<10}", "BND", cname)?;
        } else {
            writeln!(out, " LO {:<10}{:<10}{}", "BND", cname, fmt_value(l)?)?;
        }
        if u != f64::INFINITY {
            writeln!(out, " UP {:<10}{:<10}{}", "BND", cname, fmt_value(u)?)?;
        }
    }

    writeln!(out, "ENDATA")?;
    Ok(())
}

/// Sidecar CSV mapping generated MPS names to semantic model names.
pub fn write_name_map<W: Write>(problem: &LpProblem, out: &mut W) -> Result<(), MpsError> {
    writeln!(out, "generated_name,semantic_name")?;
    writeln!(out, "{OBJECTIVE_ROW},objective")?;
    for i in 0..problem.num_rows() {
        writeln!(out, "{},\"{}\"", row_name(i), problem.index.row_key(i))?;
    }
    for j in 0..problem.num_cols() {
        writeln!(out, "{},\"{}\"", col_name(j), problem.index.col_key(j))?;
    }
    Ok(())
}

/// Write `<stem>.mps` and `<stem>.names.csv` under `dir`; returns the two
/// paths.
pub fn write_interchange(
    problem: &LpProblem,
    dir: &std::path::Path,
    stem: &str,
) -> Result<(std::path::PathBuf, std::path::PathBuf), MpsError> {
    std::fs::create_dir_all(dir)?;
    let mps_path = dir.join(format!("{stem}.mps"));
    let map_path = dir.join(format!("{stem}.names.csv"));
    let mut mps = std::io::BufWriter::new(std::fs::File::create(&mps_path)?);
    write_mps(problem, &mut mps)?;
    mps.flush()?;
    let mut map = std::io::BufWriter::new(std::fs::File::create(&map_path)?);
    write_name_map(problem, &mut map)?;
    map.flush()?;
    Ok((mps_path, map_path))
}

fn sanitize_name(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .take(60)
        .collect();
    if cleaned.is_empty() {
        "MEDEA".to_string()
    } else {
        cleaned
    }
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Done,
}

/// Parse fixed-format MPS back into a canonical problem. Rows keep their
/// file order; columns keep first-appearance order.
pub fn parse_mps(text: &str) -> Result<LpProblem, MpsError> {
    let mut name = String::from("MEDEA");
    let mut section = Section::None;

    let mut senses: Vec<Sense> = Vec::new();
    let mut row_ids: HashMap<String, usize> = HashMap::new();
    let mut row_names: Vec<String> = Vec::new();
    let mut objective_row: Option<String> = None;

    let mut col_ids: HashMap<String, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    let mut objective: Vec<f64> = Vec::new();
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut offset = 0.0f64;
    let mut lower: Vec<f64> = Vec::new();
    let mut upper: Vec<f64> = Vec::new();

    let parse_num = |tok: &str, line_no: usize| -> Result<f64, MpsError> {
        tok.parse::<f64>()
            .map_err(|_| parse_err(line_no, format!("bad number `{tok}`")))
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let is_header = !raw.starts_with(' ');
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if is_header {
            section = match fields[0] {
                "NAME" => {
                    if fields.len() > 1 {
                        name = fields[1].to_string();
                    }
                    section
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                other => return Err(parse_err(line_no, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::None | Section::Done => {
                return Err(parse_err(line_no, "data outside any section"))
            }
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(parse_err(line_no, "expected `<sense> <name>`"));
                }
                let rname = fields[1].to_string();
                match fields[0] {
                    "N" => {
                        if objective_row.is_none() {
                            objective_row = Some(rname);
                        }
                        // Additional free rows are legal MPS; ignore them.
                    }
                    s => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            "E" => Sense::Eq,
                            _ => return Err(parse_err(line_no, format!("bad row sense `{s}`"))),
                        };
                        if row_ids.insert(rname.clone(), senses.len()).is_some() {
                            return Err(parse_err(line_no, format!("duplicate row `{rname}`")));
                        }
                        senses.push(sense);
                        row_names.push(rname);
                        rhs.push(0.0);
                    }
                }
            }
            Section::Columns => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(parse_err(line_no, "expected `<col> (<row> <value>)+`"));
                }
                let cname = fields[0];
                let j = *col_ids.entry(cname.to_string()).or_insert_with(|| {
                    col_names.push(cname.to_string());
                    objective.push(0.0);
                    lower.push(0.0);
                    upper.push(f64::INFINITY);
                    col_names.len() - 1
                });
                for pair in fields[1..].chunks(2) {
                    let v = parse_num(pair[1], line_no)?;
                    if Some(pair[0]) == objective_row.as_deref() {
                        objective[j] = v;
                    } else {
                        let r = *row_ids
                            .get(pair[0])
                            .ok_or_else(|| parse_err(line_no, format!("unknown row `{}`", pair[0])))?;
                        triplets.push((r as u32, j as u32, v));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(parse_err(line_no, "expected `<set> (<row> <value>)+`"));
                }
                for pair in fields[1..].chunks(2) {
                    let v = parse_num(pair[1], line_no)?;
                    if Some(pair[0]) == objective_row.as_deref() {
                        offset = -v;
                    } else {
                        let r = *row_ids
                            .get(pair[0])
                            .ok_or_else(|| parse_err(line_no, format!("unknown row `{}`", pair[0])))?;
                        rhs[r] = v;
                    }
                }
            }
            Section::Ranges => return Err(MpsError::RangesUnsupported),
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(parse_err(line_no, "expected `<type> <set> <col> [value]`"));
                }
                let j = *col_ids
                    .get(fields[2])
                    .ok_or_else(|| parse_err(line_no, format!("unknown column `{}`", fields[2])))?;
                let need_value = matches!(fields[0], "LO" | "UP" | "FX");
                if need_value && fields.len() < 4 {
                    return Err(parse_err(line_no, "bound type requires a value"));
                }
                match fields[0] {
                    "LO" => lower[j] = parse_num(fields[3], line_no)?,
                    "UP" => upper[j] = parse_num(fields[3], line_no)?,
                    "FX" => {
                        let v = parse_num(fields[3], line_no)?;
                        lower[j] = v;
                        upper[j] = v;
                    }
                    "FR" => {
                        lower[j] = f64::NEG_INFINITY;
                        upper[j] = f64::INFINITY;
                    }
                    "MI" => lower[j] = f64::NEG_INFINITY,
                    "PL" => upper[j] = f64::INFINITY,
                    other => {
                        return Err(parse_err(line_no, format!("bound type `{other}` unsupported")))
                    }
                }
            }
        }
    }
    if section != Section::Done {
        return Err(parse_err(text.lines().count(), "missing ENDATA"));
    }

    let mut index = VariableIndex::default();
    for (i, rname) in row_names.iter().enumerate() {
        index.insert_row(RowKey::Named(rname.clone()), i);
    }
    for (j, cname) in col_names.iter().enumerate() {
        index.insert_col(VarKey::Named(cname.clone()), j);
    }

    Ok(LpProblem {
        triplets,
        senses,
        rhs,
        objective,
        objective_offset: offset,
        lower,
        upper,
        index,
        meta: ProblemMeta {
            name,
            scenario_hash: String::new(),
            horizon: 0,
        },
    })
}

/// Structural conformance check on emitted MPS text: section order, name
/// lengths, indicator placement, numeric fields.
pub fn check_mps_conformance(text: &str) -> Result<(), MpsError> {
    let expected_order = ["ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"];
    let mut next_expected = 0usize;
    let mut seen_name = false;
    let mut current = "";
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') {
            let head = raw.split_whitespace().next().unwrap();
            if head == "NAME" {
                if seen_name {
                    return Err(parse_err(line_no, "duplicate NAME"));
                }
                seen_name = true;
                continue;
            }
            let pos = expected_order
                .iter()
                .position(|&s| s == head)
                .ok_or_else(|| parse_err(line_no, format!("unknown section `{head}`")))?;
            if pos < next_expected {
                return Err(parse_err(line_no, format!("section `{head}` out of order")));
            }
            next_expected = pos + 1;
            current = head;
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match current {
            "ROWS" => {
                if fields.len() != 2
                    || !matches!(fields[0], "N" | "L" | "G" | "E")
                    || fields[1].len() > 8
                {
                    return Err(parse_err(line_no, "malformed ROWS entry"));
                }
            }
            "COLUMNS" | "RHS" => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(parse_err(line_no, "malformed data entry"));
                }
                if fields[0].len() > 8 {
                    return Err(parse_err(line_no, "name exceeds 8 characters"));
                }
                for pair in fields[1..].chunks(2) {
                    if pair[0].len() > 8 || pair[1].parse::<f64>().is_err() {
                        return Err(parse_err(line_no, "malformed (name, value) pair"));
                    }
                }
            }
            "RANGES" => return Err(MpsError::RangesUnsupported),
            "BOUNDS" => {
                let typed = matches!(fields[0], "LO" | "UP" | "FX" | "FR" | "MI" | "PL" | "BV");
                if !typed || fields.len() < 3 || fields[2].len() > 8 {
                    return Err(parse_err(line_no, "malformed BOUNDS entry"));
                }
                if matches!(fields[0], "LO" | "UP" | "FX")
                    && (fields.len() < 4 || fields[3].parse::<f64>().is_err())
                {
                    return Err(parse_err(line_no, "bound value missing or malformed"));
                }
            }
            _ => return Err(parse_err(line_no, "data outside any section")),
        }
    }
    if next_expected != expected_order.len() {
        return Err(parse_err(text.lines().count(), "missing ENDATA"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LpProblem, Sense};

    fn sample_problem() -> LpProblem {
        let mut lp = LpProblem::default();
        lp.meta.name = "sample".to_string();
        lp.objective_offset = -3.25;
        let a = lp.named_col("a", 1.5, 0.0, f64::INFINITY); // default bounds
        let b = lp.named_col("b", -0.1, 0.25, 10.0);
        let c = lp.named_col("c", 0.0, f64::NEG_INFINITY, f64::INFINITY);
        let d = lp.named_col("d", 2.0, 1.0, 1.0); // fixed
        let e = lp.named_col("e", 0.3, f64::NEG_INFINITY, 4.0);
        let r0 = lp.named_row("le", Sense::Le, 7.5);
        let r1 = lp.named_row("ge", Sense::Ge, -2.0);
        let r2 = lp.named_row("eq", Sense::Eq, 0.125);
        lp.set_coeff(r0, a, 1.0);
        lp.set_coeff(r0, b, -2.5);
        lp.set_coeff(r1, b, 0.1);
        lp.set_coeff(r1, c, 3.0);
        lp.set_coeff(r2, c, 1.0 / 3.0);
        lp.set_coeff(r2, d, 1e-9);
        lp.set_coeff(r2, e, 1.0);
        lp
    }

    #[test]
    fn roundtrip_is_exact() {
        let lp = sample_problem();
        let mut buf = Vec::new();
        write_mps(&lp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = parse_mps(&text).unwrap();

        assert_eq!(back.num_rows(), lp.num_rows());
        assert_eq!(back.num_cols(), lp.num_cols());
        assert_eq!(back.senses, lp.senses);
        // Bit-exact matrix, rhs, bounds and costs.
        assert_eq!(back.to_columns(), lp.to_columns());
        assert_eq!(back.rhs, lp.rhs);
        assert_eq!(back.objective, lp.objective);
        assert_eq!(back.lower, lp.lower);
        assert_eq!(back.upper, lp.upper);
        assert_eq!(back.objective_offset, lp.objective_offset);
    }

    #[test]
    fn emitted_file_is_conformant() {
        let lp = sample_problem();
        let mut buf = Vec::new();
        write_mps(&lp, &mut buf).unwrap();
        check_mps_conformance(std::str::from_utf8(&buf).unwrap()).unwrap();
    }

    #[test]
    fn name_map_covers_all_entities() {
        let lp = sample_problem();
        let mut buf = Vec::new();
        write_name_map(&lp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "generated_name,semantic_name");
        // header + objective + rows + cols
        assert_eq!(lines.len(), 1 + 1 + lp.num_rows() + lp.num_cols());
        assert!(lines.iter().any(|l| l.starts_with("R000002,")));
        assert!(lines.iter().any(|l| l.starts_with("C000004,")));
    }

    #[test]
    fn shortest_roundtrip_values_survive() {
        // Values notorious for sloppy formatting.
        for v in [0.1, 1.0 / 3.0, 1e-12, 123456.789, -9.81e7] {
            let s = fmt_value(v).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn rejects_unencodable_magnitudes() {
        assert!(fmt_value(f64::NAN).is_err());
        assert!(fmt_value(f64::INFINITY).is_err());
        assert!(fmt_value(f64::NEG_INFINITY).is_err());
        // Worst-case shortest round-trip stays within the field width.
        let awkward = 1.2345678901234567e-300;
        assert!(fmt_value(awkward).unwrap().len() <= 25);
    }

    #[test]
    fn parser_flags_garbage() {
        assert!(parse_mps("ROWS\n L  r0\n").is_err()); // no ENDATA
        assert!(matches!(
            parse_mps("ROWS\n L  r0\nCOLUMNS\n    x  r1  1.0\nENDATA\n"),
            Err(MpsError::Parse { .. })
        ));
        assert!(parse_mps("NOSUCH\nENDATA\n").is_err());
    }
}

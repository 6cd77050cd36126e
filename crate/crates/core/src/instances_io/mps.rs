//! MPS reader and writer.
//!
//! Both free and fixed format are read. Fixed format takes fields from the
//! classic column positions (1-based, inclusive):
//!
//! | field | columns | contents                       |
//! |-------|---------|--------------------------------|
//! | 1     | 2–3     | row type / bound type          |
//! | 2     | 5–12    | column, set or row name        |
//! | 3     | 15–22   | row or column name             |
//! | 4     | 25–36   | value                          |
//! | 5     | 40–47   | row name                       |
//! | 6     | 50–61   | value                          |
//!
//! The result is an instance in `max ⟨c,x⟩, Ax ≤ b, 0 ≤ x ≤ u` form:
//! minimization objectives are negated, `G` rows are negated, `E` rows and
//! ranged rows become a pair of opposite `≤` rows, and nonzero lower bounds are
//! shifted out of the variables (the shift is folded into `b` and into
//! [`MpsModel::objective_offset`]). Columns whose bounds pin them to a single
//! value are removed and listed in [`MpsModel::fixed_columns`].

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::Result;
use crate::lp_model::LpInstance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MpsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown row {name:?}")]
    UnknownRow { line: usize, name: String },

    #[error("line {line}: unknown column {name:?}")]
    UnknownColumn { line: usize, name: String },

    #[error("line {line}: duplicate {what} {name:?}")]
    Duplicate { line: usize, what: &'static str, name: String },

    #[error("line {line}: unsupported: {message}")]
    Unsupported { line: usize, message: String },

    #[error("input ended inside section {section} without ENDATA")]
    MissingEndata { section: String },

    #[error("no objective (N) row")]
    NoObjective,

    #[error("column {column:?}: {message}")]
    Bounds { column: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpsFormat {
    /// Whitespace-separated fields; names may not contain blanks.
    Free,
    /// Fields taken from fixed column positions.
    Fixed,
}

/// A parsed MPS model in maximization, `≤`-only form.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsModel {
    pub name: String,
    pub instance: LpInstance,
    /// Name of the objective row.
    pub objective_name: String,
    /// One name per row of `instance`.
    pub row_names: Vec<String>,
    /// One name per column of `instance`.
    pub col_names: Vec<String>,
    /// The file minimizes; `instance` holds the negated objective.
    pub minimize: bool,
    /// Constant added to `⟨c, x⟩` of `instance` to get the maximization-form value.
    pub objective_offset: f64,
    /// Columns removed because their bounds coincide, with their value.
    pub fixed_columns: Vec<(String, f64)>,
}

impl MpsModel {
    /// Objective value in the file's own sense for a point of `instance`.
    pub fn original_objective(&self, max_form_value: f64) -> f64 {
        let v = max_form_value + self.objective_offset;
        if self.minimize {
            -v
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

impl Section {
    fn label(self) -> &'static str {
        match self {
            Section::None => "(start)",
            Section::Name => "NAME",
            Section::ObjSense => "OBJSENSE",
            Section::Rows => "ROWS",
            Section::Columns => "COLUMNS",
            Section::Rhs => "RHS",
            Section::Ranges => "RANGES",
            Section::Bounds => "BOUNDS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    L,
    G,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowRef {
    Objective,
    Free,
    Constraint(usize),
}

struct RowDef {
    name: String,
    kind: RowKind,
    rhs: f64,
    range: Option<f64>,
}

struct ColDef {
    name: String,
    entries: Vec<(usize, f64)>,
    obj: f64,
    lower: f64,
    upper: f64,
}

/// Positional fields 1–6 of a data line.
type Fields<'a> = [Option<&'a str>; 6];

fn fixed_fields(line: &str) -> Fields<'_> {
    const SPANS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    let mut out = [None; 6];
    for (slot, &(lo, hi)) in out.iter_mut().zip(&SPANS) {
        if lo >= line.len() {
            continue;
        }
        let hi = hi.min(line.len());
        if let Some(s) = line.get(lo..hi) {
            let s = s.trim();
            if !s.is_empty() {
                *slot = Some(s);
            }
        }
    }
    out
}

fn bound_needs_value(kind: &str) -> bool {
    matches!(kind, "UP" | "LO" | "FX" | "LI" | "UI")
}

/// Maps whitespace tokens to the fixed-format field positions for a section.
fn free_fields<'a>(section: Section, tokens: &[&'a str]) -> Fields<'a> {
    let mut f: Fields<'a> = [None; 6];
    let put = |f: &mut Fields<'a>, start: usize, toks: &[&'a str]| {
        for (k, t) in toks.iter().enumerate() {
            if start + k < 6 {
                f[start + k] = Some(*t);
            }
        }
    };
    match section {
        Section::Rows => put(&mut f, 0, tokens),
        Section::Columns => put(&mut f, 1, tokens),
        Section::Rhs | Section::Ranges => {
            if tokens.len() % 2 == 1 {
                put(&mut f, 1, tokens);
            } else {
                put(&mut f, 2, tokens);
            }
        }
        Section::Bounds => {
            if let Some((kind, rest)) = tokens.split_first() {
                f[0] = Some(kind);
                let with_set = if bound_needs_value(kind) {
                    rest.len() >= 3
                } else {
                    rest.len() >= 2 && !(kind == &"BV" && rest.len() == 2 && rest[1].parse::<f64>().is_ok())
                };
                if with_set {
                    put(&mut f, 1, rest);
                } else {
                    put(&mut f, 2, rest);
                }
            }
        }
        _ => put(&mut f, 0, tokens),
    }
    f
}

struct Parser {
    format: MpsFormat,
    name: String,
    minimize: bool,
    objective: Option<String>,
    row_index: HashMap<String, RowRef>,
    rows: Vec<RowDef>,
    col_index: HashMap<String, usize>,
    cols: Vec<ColDef>,
    objective_constant: f64,
    rhs_set: Option<String>,
    range_set: Option<String>,
    bound_set: Option<String>,
    seen_rhs: HashMap<usize, ()>,
    seen_obj_rhs: bool,
}

fn syntax(line: usize, message: impl Into<String>) -> MpsError {
    MpsError::Syntax { line, message: message.into() }
}

fn number(line: usize, field: Option<&str>) -> Result<f64, MpsError> {
    let s = field.ok_or_else(|| syntax(line, "missing numeric field"))?;
    let v: f64 = s.parse().map_err(|_| syntax(line, format!("invalid number {s:?}")))?;
    if v.is_nan() {
        return Err(syntax(line, "NaN value"));
    }
    Ok(v)
}

fn required<'a>(line: usize, field: Option<&'a str>, what: &str) -> Result<&'a str, MpsError> {
    field.ok_or_else(|| syntax(line, format!("missing {what}")))
}

impl Parser {
    fn new(format: MpsFormat) -> Self {
        Self {
            format,
            name: String::new(),
            minimize: true,
            objective: None,
            row_index: HashMap::new(),
            rows: Vec::new(),
            col_index: HashMap::new(),
            cols: Vec::new(),
            objective_constant: 0.0,
            rhs_set: None,
            range_set: None,
            bound_set: None,
            seen_rhs: HashMap::new(),
            seen_obj_rhs: false,
        }
    }

    fn row(&self, line: usize, name: &str) -> Result<RowRef, MpsError> {
        self.row_index
            .get(name)
            .copied()
            .ok_or_else(|| MpsError::UnknownRow { line, name: name.to_string() })
    }

    fn set_sense(&mut self, line: usize, word: &str) -> Result<(), MpsError> {
        self.minimize = match word.to_ascii_uppercase().as_str() {
            "MIN" | "MINIMIZE" => true,
            "MAX" | "MAXIMIZE" => false,
            other => return Err(syntax(line, format!("unknown objective sense {other:?}"))),
        };
        Ok(())
    }

    fn row_line(&mut self, line: usize, f: &Fields<'_>) -> Result<(), MpsError> {
        let kind = required(line, f[0], "row type")?;
        let name = required(line, f[1], "row name")?;
        if self.row_index.contains_key(name) {
            return Err(MpsError::Duplicate { line, what: "row", name: name.into() });
        }
        let r = match kind.to_ascii_uppercase().as_str() {
            "N" if self.objective.is_none() => {
                self.objective = Some(name.to_string());
                RowRef::Objective
            }
            "N" => RowRef::Free,
            k @ ("L" | "G" | "E") => {
                let kind = match k {
                    "L" => RowKind::L,
                    "G" => RowKind::G,
                    _ => RowKind::E,
                };
                self.rows.push(RowDef { name: name.to_string(), kind, rhs: 0.0, range: None });
                RowRef::Constraint(self.rows.len() - 1)
            }
            other => return Err(syntax(line, format!("unknown row type {other:?}"))),
        };
        self.row_index.insert(name.to_string(), r);
        Ok(())
    }

    fn column_line(&mut self, line: usize, f: &Fields<'_>) -> Result<(), MpsError> {
        let col_name = required(line, f[1], "column name")?;
        let j = match self.col_index.get(col_name) {
            Some(&j) if j + 1 == self.cols.len() => j,
            Some(_) => return Err(MpsError::Duplicate { line, what: "column block", name: col_name.into() }),
            None => {
                self.cols.push(ColDef {
                    name: col_name.to_string(),
                    entries: Vec::new(),
                    obj: 0.0,
                    lower: 0.0,
                    upper: f64::INFINITY,
                });
                self.col_index.insert(col_name.to_string(), self.cols.len() - 1);
                self.cols.len() - 1
            }
        };
        let pairs = [(f[2], f[3]), (f[4], f[5])];
        for (k, (row, value)) in pairs.into_iter().enumerate() {
            let Some(row) = row else {
                if k == 0 {
                    return Err(syntax(line, "missing row name"));
                }
                continue;
            };
            let v = number(line, value)?;
            match self.row(line, row)? {
                RowRef::Objective => self.cols[j].obj = v,
                RowRef::Free => {}
                RowRef::Constraint(i) => {
                    if self.cols[j].entries.iter().any(|&(r, _)| r == i) {
                        return Err(MpsError::Duplicate { line, what: "matrix entry", name: format!("{col_name}/{row}") });
                    }
                    self.cols[j].entries.push((i, v));
                }
            }
        }
        Ok(())
    }

    /// Only the first named set of a section is used; later sets are skipped.
    fn accept_set(slot: &mut Option<String>, set: Option<&str>) -> bool {
        let set = set.unwrap_or("");
        match slot {
            None => {
                *slot = Some(set.to_string());
                true
            }
            Some(s) => s == set,
        }
    }

    fn rhs_line(&mut self, line: usize, f: &Fields<'_>) -> Result<(), MpsError> {
        if !Self::accept_set(&mut self.rhs_set, f[1]) {
            return Ok(());
        }
        for (k, (row, value)) in [(f[2], f[3]), (f[4], f[5])].into_iter().enumerate() {
            let Some(row) = row else {
                if k == 0 {
                    return Err(syntax(line, "missing row name"));
                }
                continue;
            };
            let v = number(line, value)?;
            match self.row(line, row)? {
                RowRef::Objective => {
                    if self.seen_obj_rhs {
                        return Err(MpsError::Duplicate { line, what: "rhs entry", name: row.into() });
                    }
                    self.seen_obj_rhs = true;
                    self.objective_constant = -v;
                }
                RowRef::Free => {}
                RowRef::Constraint(i) => {
                    if self.seen_rhs.insert(i, ()).is_some() {
                        return Err(MpsError::Duplicate { line, what: "rhs entry", name: row.into() });
                    }
                    self.rows[i].rhs = v;
                }
            }
        }
        Ok(())
    }

    fn range_line(&mut self, line: usize, f: &Fields<'_>) -> Result<(), MpsError> {
        if !Self::accept_set(&mut self.range_set, f[1]) {
            return Ok(());
        }
        for (k, (row, value)) in [(f[2], f[3]), (f[4], f[5])].into_iter().enumerate() {
            let Some(row) = row else {
                if k == 0 {
                    return Err(syntax(line, "missing row name"));
                }
                continue;
            };
            let v = number(line, value)?;
            match self.row(line, row)? {
                RowRef::Constraint(i) => {
                    if self.rows[i].range.replace(v).is_some() {
                        return Err(MpsError::Duplicate { line, what: "range entry", name: row.into() });
                    }
                }
                _ => return Err(syntax(line, format!("range on non-constraint row {row:?}"))),
            }
        }
        Ok(())
    }

    fn bound_line(&mut self, line: usize, f: &Fields<'_>) -> Result<(), MpsError> {
        let kind = required(line, f[0], "bound type")?.to_ascii_uppercase();
        if !Self::accept_set(&mut self.bound_set, f[1]) {
            return Ok(());
        }
        let col = required(line, f[2], "column name")?;
        let j = *self
            .col_index
            .get(col)
            .ok_or_else(|| MpsError::UnknownColumn { line, name: col.into() })?;
        let c = &mut self.cols[j];
        match kind.as_str() {
            "UP" | "UI" => {
                let v = number(line, f[3])?;
                if v < 0.0 && c.lower == 0.0 {
                    return Err(MpsError::Unsupported {
                        line,
                        message: format!("negative upper bound on {col:?} implies a free lower bound"),
                    });
                }
                c.upper = v;
            }
            "LO" | "LI" => c.lower = number(line, f[3])?,
            "FX" => {
                let v = number(line, f[3])?;
                c.lower = v;
                c.upper = v;
            }
            "BV" => {
                c.lower = 0.0;
                c.upper = 1.0;
            }
            "PL" => c.upper = f64::INFINITY,
            "MI" | "FR" => c.lower = f64::NEG_INFINITY,
            other => {
                return Err(MpsError::Unsupported { line, message: format!("bound type {other:?}") });
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<MpsModel> {
        let objective_name = self.objective.ok_or(MpsError::NoObjective)?;
        let mut shift = vec![0.0; self.rows.len()];
        let mut offset = self.objective_constant;
        let mut kept: Vec<&ColDef> = Vec::new();
        let mut fixed_columns = Vec::new();
        for c in &self.cols {
            let bad = |message: &str| MpsError::Bounds { column: c.name.clone(), message: message.into() };
            if !c.lower.is_finite() {
                return Err(bad("no finite lower bound (free variables are not supported)").into());
            }
            if c.upper < c.lower {
                return Err(bad("upper bound below lower bound").into());
            }
            if c.lower != 0.0 {
                for &(i, a) in &c.entries {
                    shift[i] += a * c.lower;
                }
                offset += c.obj * c.lower;
            }
            if c.upper == c.lower {
                fixed_columns.push((c.name.clone(), c.lower));
            } else {
                kept.push(c);
            }
        }

        // Each source row produces an upper side (+a, hi) and/or a lower side (−a, −lo).
        let mut row_names = Vec::new();
        let mut rhs = Vec::new();
        let mut sides: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.rows.len()];
        for (i, r) in self.rows.iter().enumerate() {
            let b = r.rhs - shift[i];
            let (lo, hi) = match (r.kind, r.range) {
                (RowKind::L, None) => (None, Some(b)),
                (RowKind::L, Some(w)) => (Some(b - w.abs()), Some(b)),
                (RowKind::G, None) => (Some(b), None),
                (RowKind::G, Some(w)) => (Some(b), Some(b + w.abs())),
                (RowKind::E, None) => (Some(b), Some(b)),
                (RowKind::E, Some(w)) if w >= 0.0 => (Some(b), Some(b + w)),
                (RowKind::E, Some(w)) => (Some(b + w), Some(b)),
            };
            if let Some(hi) = hi {
                sides[i].push((rhs.len(), 1.0));
                rhs.push(hi);
                row_names.push(r.name.clone());
            }
            if let Some(lo) = lo {
                sides[i].push((rhs.len(), -1.0));
                rhs.push(-lo);
                row_names.push(if hi.is_some() { format!("{}.lo", r.name) } else { r.name.clone() });
            }
        }

        let sign = if self.minimize { -1.0 } else { 1.0 };
        let columns: Vec<Vec<(usize, f64)>> = kept
            .iter()
            .map(|c| {
                c.entries
                    .iter()
                    .flat_map(|&(i, a)| sides[i].iter().map(move |&(row, s)| (row, s * a)))
                    .collect()
            })
            .collect();
        let obj = kept.iter().map(|c| sign * c.obj).collect();
        let upper = kept.iter().map(|c| c.upper - c.lower).collect();
        let num_rows = rhs.len();
        let instance = LpInstance::from_columns(num_rows, columns, rhs, obj, upper)?;
        Ok(MpsModel {
            name: self.name,
            instance,
            objective_name,
            row_names,
            col_names: kept.iter().map(|c| c.name.clone()).collect(),
            minimize: self.minimize,
            objective_offset: sign * offset,
            fixed_columns,
        })
    }
}

/// Parses free-format MPS.
pub fn parse_mps(text: &str) -> Result<MpsModel> {
    parse_mps_with(text, MpsFormat::Free)
}

pub fn parse_mps_with(text: &str, format: MpsFormat) -> Result<MpsModel> {
    let mut p = Parser::new(format);
    let mut section = Section::None;
    let mut done = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            let mut tokens = raw.split_whitespace();
            let head = tokens.next().unwrap_or_default().to_ascii_uppercase();
            section = match head.as_str() {
                "NAME" => {
                    p.name = raw[4..].trim().to_string();
                    Section::Name
                }
                "OBJSENSE" => {
                    if let Some(word) = tokens.next() {
                        p.set_sense(line, word)?;
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    done = true;
                    break;
                }
                other => return Err(syntax(line, format!("unknown section {other:?}")).into()),
            };
            continue;
        }

        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if section == Section::ObjSense {
            p.set_sense(line, tokens[0])?;
            continue;
        }
        if section == Section::Columns && tokens.iter().any(|t| t.eq_ignore_ascii_case("'MARKER'")) {
            continue;
        }
        let fields = match p.format {
            MpsFormat::Free => free_fields(section, &tokens),
            MpsFormat::Fixed => fixed_fields(raw),
        };
        match section {
            Section::Rows => p.row_line(line, &fields)?,
            Section::Columns => p.column_line(line, &fields)?,
            Section::Rhs => p.rhs_line(line, &fields)?,
            Section::Ranges => p.range_line(line, &fields)?,
            Section::Bounds => p.bound_line(line, &fields)?,
            Section::None | Section::Name | Section::ObjSense => {
                return Err(syntax(line, format!("data line outside a data section ({})", section.label())).into())
            }
        }
    }
    if !done {
        return Err(MpsError::MissingEndata { section: section.label().into() }.into());
    }
    p.finish()
}

/// Writes `model` as free-format MPS that parses back to the same model
/// (without its fixed columns, which are already folded into the data).
pub fn write_mps(model: &MpsModel) -> String {
    let inst = &model.instance;
    let sign = if model.minimize { -1.0 } else { 1.0 };
    let obj_name = &model.objective_name;
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {}", model.name);
    let _ = writeln!(out, "OBJSENSE\n    {}", if model.minimize { "MIN" } else { "MAX" });
    let _ = writeln!(out, "ROWS\n N  {obj_name}");
    for name in &model.row_names {
        let _ = writeln!(out, " L  {name}");
    }
    out.push_str("COLUMNS\n");
    for j in 0..inst.num_cols() {
        let col = inst.column(j);
        let name = &model.col_names[j];
        let c = inst.obj()[j];
        if c != 0.0 || col.nnz() == 0 {
            let _ = writeln!(out, "    {name}  {obj_name}  {:?}", sign * c);
        }
        for (i, a) in col.iter() {
            let _ = writeln!(out, "    {name}  {}  {a:?}", model.row_names[i]);
        }
    }
    out.push_str("RHS\n");
    for (i, b) in inst.rhs().iter().enumerate() {
        if *b != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {b:?}", model.row_names[i]);
        }
    }
    let constant = sign * model.objective_offset;
    if constant != 0.0 {
        let _ = writeln!(out, "    RHS  {obj_name}  {:?}", -constant);
    }
    out.push_str("BOUNDS\n");
    for (j, u) in inst.upper().iter().enumerate() {
        if u.is_finite() {
            let _ = writeln!(out, " UP BND  {}  {u:?}", model.col_names[j]);
        }
    }
    out.push_str("ENDATA\n");
    out
}

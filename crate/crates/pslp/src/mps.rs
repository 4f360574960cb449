//! MPS reader and writer.
//!
//! Free layout (whitespace separated) is the default. With
//! [`MpsOptions::fixed`] data lines are cut at the classic column positions,
//! which allows names with embedded spaces. Gzip input is detected by its
//! magic bytes. Maximization problems are negated on input; the writer always
//! emits a minimization.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;

use pslp_core::LpProblem;

const INF: f64 = f64::INFINITY;
/// Magnitude written for infinite row sides.
const WRITE_INF: f64 = 1e30;

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct MpsError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, MpsError> {
    Err(MpsError { line, message: message.into() })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MpsOptions {
    /// Honour fixed column positions on data lines.
    pub fixed: bool,
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
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    L,
    G,
    E,
}

#[derive(Default)]
struct Builder {
    name: String,
    maximize: bool,
    objective_row: Option<String>,
    /// Extra `N` rows; their entries are dropped.
    free_rows: Vec<String>,
    row_index: HashMap<String, usize>,
    row_names: Vec<String>,
    row_kinds: Vec<RowKind>,
    rhs: Vec<f64>,
    range: Vec<Option<f64>>,
    col_index: HashMap<String, usize>,
    col_names: Vec<String>,
    objective: Vec<f64>,
    offset: f64,
    triplets: Vec<(usize, usize, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn number(line: usize, s: &str) -> Result<f64, MpsError> {
    match s.parse::<f64>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => err(line, format!("invalid number '{s}'")),
    }
}

/// Data-line fields at the fixed MPS column positions (1-based 2-3, 5-12,
/// 15-22, 25-36, 40-47, 50-61), with empty fields kept as empty strings.
fn fixed_fields(line: &str) -> Vec<&str> {
    const SPANS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    let mut out = Vec::new();
    for (a, b) in SPANS {
        if a >= line.len() {
            break;
        }
        let end = b.min(line.len());
        out.push(line.get(a..end).unwrap_or("").trim());
    }
    while out.last() == Some(&"") {
        out.pop();
    }
    out
}

impl Builder {
    fn row(&self, line: usize, name: &str) -> Result<Option<usize>, MpsError> {
        if let Some(&i) = self.row_index.get(name) {
            return Ok(Some(i));
        }
        if self.objective_row.as_deref() == Some(name) || self.free_rows.iter().any(|r| r == name) {
            return Ok(None);
        }
        err(line, format!("unknown row '{name}'"))
    }

    fn column(&mut self, name: &str) -> usize {
        if let Some(&k) = self.col_index.get(name) {
            return k;
        }
        let k = self.col_names.len();
        self.col_index.insert(name.to_string(), k);
        self.col_names.push(name.to_string());
        self.objective.push(0.0);
        self.lower.push(0.0);
        self.upper.push(INF);
        k
    }

    fn rows_line(&mut self, line: usize, f: &[&str]) -> Result<(), MpsError> {
        let [kind, name] = f else { return err(line, "ROWS entry needs a type and a name") };
        let kind = match kind.to_ascii_uppercase().as_str() {
            "N" => {
                if self.objective_row.is_none() {
                    self.objective_row = Some(name.to_string());
                } else {
                    self.free_rows.push(name.to_string());
                }
                return Ok(());
            }
            "L" => RowKind::L,
            "G" => RowKind::G,
            "E" => RowKind::E,
            other => return err(line, format!("unknown row type '{other}'")),
        };
        if self.row_index.contains_key(*name) || self.objective_row.as_deref() == Some(*name) {
            return err(line, format!("duplicate row name '{name}'"));
        }
        self.row_index.insert(name.to_string(), self.row_names.len());
        self.row_names.push(name.to_string());
        self.row_kinds.push(kind);
        self.rhs.push(0.0);
        self.range.push(None);
        Ok(())
    }

    fn columns_line(&mut self, line: usize, f: &[&str]) -> Result<(), MpsError> {
        if f.iter().any(|t| t.trim_matches('\'').eq_ignore_ascii_case("MARKER")) {
            return err(line, "integer markers are not supported (LP only)");
        }
        if f.len() != 3 && f.len() != 5 {
            return err(line, "COLUMNS entry needs a column and one or two row/value pairs");
        }
        let k = self.column(f[0]);
        for pair in f[1..].chunks(2) {
            let v = number(line, pair[1])?;
            if self.objective_row.as_deref() == Some(pair[0]) {
                self.objective[k] += v;
            } else if let Some(i) = self.row(line, pair[0])? {
                self.triplets.push((i, k, v));
            }
        }
        Ok(())
    }

    /// Handles RHS and RANGES entries, given as `[set, row, value, (row, value)]`.
    fn vector_line(&mut self, line: usize, f: &[&str], ranges: bool) -> Result<(), MpsError> {
        if f.len() != 3 && f.len() != 5 {
            return err(line, "expected one or two row/value pairs");
        }
        for pair in f[1..].chunks(2) {
            let v = number(line, pair[1])?;
            match self.row(line, pair[0])? {
                Some(i) if ranges => self.range[i] = Some(v),
                Some(i) => self.rhs[i] = v,
                None if ranges && self.objective_row.as_deref() == Some(pair[0]) => {
                    return err(line, "RANGES entry on the objective row");
                }
                None if !ranges && self.objective_row.as_deref() == Some(pair[0]) => self.offset = -v,
                None => {}
            }
        }
        Ok(())
    }

    /// Handles BOUNDS entries, given as `[type, set, column, (value)]`.
    fn bounds_line(&mut self, line: usize, f: &[&str]) -> Result<(), MpsError> {
        let kind = f[0].to_ascii_uppercase();
        let needs_value = matches!(kind.as_str(), "LO" | "UP" | "FX");
        match kind.as_str() {
            "LO" | "UP" | "FX" | "FR" | "MI" | "PL" => {}
            "BV" | "LI" | "UI" | "SC" => return err(line, format!("integer bound type '{kind}' is not supported")),
            other => return err(line, format!("unknown bound type '{other}'")),
        }
        if f.len() < if needs_value { 4 } else { 3 } {
            return err(line, format!("malformed {kind} bound"));
        }
        let Some(&k) = self.col_index.get(f[2]) else { return err(line, format!("unknown column '{}'", f[2])) };
        let value = if needs_value { number(line, f[3])? } else { 0.0 };
        match kind.as_str() {
            "LO" => self.lower[k] = value,
            "UP" => {
                if value < 0.0 && self.lower[k] == 0.0 {
                    log::warn!(
                        "line {line}: negative upper bound on '{}' with zero lower bound; lower set to -inf",
                        f[2]
                    );
                    self.lower[k] = -INF;
                }
                self.upper[k] = value;
            }
            "FX" => {
                self.lower[k] = value;
                self.upper[k] = value;
            }
            "FR" => {
                self.lower[k] = -INF;
                self.upper[k] = INF;
            }
            "MI" => self.lower[k] = -INF,
            _ => self.upper[k] = INF,
        }
        Ok(())
    }

    fn finish(self) -> Result<LpProblem, MpsError> {
        let m = self.row_names.len();
        let mut rl = vec![0.0; m];
        let mut ru = vec![0.0; m];
        for i in 0..m {
            let b = self.rhs[i];
            let (lo, up) = match (self.row_kinds[i], self.range[i]) {
                (RowKind::L, None) => (-INF, b),
                (RowKind::G, None) => (b, INF),
                (RowKind::E, None) => (b, b),
                (RowKind::L, Some(r)) => (b - r.abs(), b),
                (RowKind::G, Some(r)) => (b, b + r.abs()),
                (RowKind::E, Some(r)) if r >= 0.0 => (b, b + r),
                (RowKind::E, Some(r)) => (b + r, b),
            };
            rl[i] = lo;
            ru[i] = up;
        }
        let n = self.col_names.len();
        let sign = if self.maximize { -1.0 } else { 1.0 };
        let c: Vec<f64> = self.objective.iter().map(|v| sign * v).collect();
        let mut p = LpProblem::new(m, n, &self.triplets, c, rl, ru, self.lower, self.upper)
            .map_err(|e| MpsError { line: 0, message: e.to_string() })?;
        p.objective_offset = sign * self.offset;
        p.row_names = Some(self.row_names);
        p.col_names = Some(self.col_names);
        Ok(p)
    }
}

/// Parses MPS text or gzip-compressed MPS.
pub fn read_mps(source: &[u8], opts: MpsOptions) -> Result<LpProblem, MpsError> {
    let decoded;
    let bytes = if source.starts_with(&[0x1f, 0x8b]) {
        let mut buf = Vec::new();
        flate2::read::MultiGzDecoder::new(source)
            .read_to_end(&mut buf)
            .map_err(|e| MpsError { line: 0, message: format!("gzip: {e}") })?;
        decoded = buf;
        &decoded[..]
    } else {
        source
    };
    let text = std::str::from_utf8(bytes).map_err(|e| MpsError { line: 0, message: format!("not UTF-8: {e}") })?;
    parse(text, opts)
}

fn parse(text: &str, opts: MpsOptions) -> Result<LpProblem, MpsError> {
    let mut b = Builder::default();
    let mut section = Section::None;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let indented = raw.starts_with(' ') || raw.starts_with('\t');
        if !indented {
            let mut toks = raw.split_whitespace();
            let head = toks.next().unwrap().to_ascii_uppercase();
            let rest: Vec<&str> = toks.collect();
            section = match head.as_str() {
                "NAME" => {
                    b.name = rest.join(" ");
                    Section::Name
                }
                "OBJSENSE" => {
                    if let Some(v) = rest.first() {
                        b.maximize = sense(line, v)?;
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => return err(line, format!("unknown section '{other}'")),
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        let owned: Vec<&str>;
        let f: &[&str] = if opts.fixed {
            owned = fixed_fields(raw);
            &owned
        } else {
            owned = raw.split_whitespace().collect();
            &owned
        };
        match section {
            Section::None | Section::Name | Section::End => return err(line, "data line outside of a section"),
            Section::ObjSense => b.maximize = sense(line, f.iter().find(|t| !t.is_empty()).unwrap_or(&""))?,
            Section::Rows => {
                let f: Vec<&str> =
                    if opts.fixed { f.iter().copied().filter(|t| !t.is_empty()).collect() } else { f.to_vec() };
                b.rows_line(line, &f)?
            }
            Section::Columns => {
                let f = if opts.fixed { drop_first_empty(f) } else { f.to_vec() };
                b.columns_line(line, &f)?
            }
            Section::Rhs | Section::Ranges => {
                let f = if opts.fixed {
                    drop_first_empty(f)
                } else if f.len().is_multiple_of(2) {
                    // no set name
                    std::iter::once("").chain(f.iter().copied()).collect()
                } else {
                    f.to_vec()
                };
                b.vector_line(line, &f, section == Section::Ranges)?
            }
            Section::Bounds => {
                let f: Vec<&str> = if opts.fixed {
                    f.to_vec()
                } else {
                    let valued =
                        f.first().is_some_and(|t| matches!(t.to_ascii_uppercase().as_str(), "LO" | "UP" | "FX"));
                    let full = if valued { 4 } else { 3 };
                    if f.len() == full - 1 {
                        [&f[..1], &[""], &f[1..]].concat()
                    } else {
                        f.to_vec()
                    }
                };
                if f.len() < 3 {
                    return err(line, "malformed bound");
                }
                b.bounds_line(line, &f)?
            }
        }
    }
    if b.objective_row.is_none() && !b.row_names.is_empty() {
        log::debug!("no objective row; objective is zero");
    }
    b.finish()
}

/// In fixed layout, field 1 is unused in COLUMNS/RHS/RANGES.
fn drop_first_empty<'a>(f: &[&'a str]) -> Vec<&'a str> {
    let mut v: Vec<&str> = f.iter().skip(1).copied().collect();
    while v.last() == Some(&"") {
        v.pop();
    }
    v
}

fn sense(line: usize, v: &str) -> Result<bool, MpsError> {
    match v.to_ascii_uppercase().as_str() {
        "MAX" | "MAXIMIZE" => Ok(true),
        "MIN" | "MINIMIZE" => Ok(false),
        other => err(line, format!("unknown objective sense '{other}'")),
    }
}

fn fmt_num(v: f64) -> String {
    if v == INF {
        format!("{WRITE_INF:e}")
    } else if v == -INF {
        format!("{:e}", -WRITE_INF)
    } else {
        format!("{v:?}")
    }
}

/// Writes `p` in free MPS layout. Missing names become `R<i>` / `C<k>`.
pub fn write_mps(p: &LpProblem) -> String {
    let row_name = |i: usize| p.row_names.as_ref().map_or_else(|| format!("R{i}"), |v| v[i].clone());
    let col_name = |k: usize| p.col_names.as_ref().map_or_else(|| format!("C{k}"), |v| v[k].clone());
    let obj = "OBJ";
    let mut s = String::new();
    let _ = writeln!(s, "NAME          PSLP");
    let _ = writeln!(s, "ROWS");
    let _ = writeln!(s, " N  {obj}");
    let mut rhs = Vec::new();
    let mut ranges = Vec::new();
    for i in 0..p.num_rows {
        let (lo, up) = (p.row_lower[i], p.row_upper[i]);
        let (kind, b) = if lo == up {
            ("E", lo)
        } else if lo == -INF && up == INF {
            ("G", -INF)
        } else if up == INF {
            ("G", lo)
        } else if lo == -INF {
            ("L", up)
        } else {
            ranges.push((i, up - lo));
            ("L", up)
        };
        if b != 0.0 {
            rhs.push((i, b));
        }
        let _ = writeln!(s, " {kind}  {}", row_name(i));
    }
    let _ = writeln!(s, "COLUMNS");
    for k in 0..p.num_cols {
        let name = col_name(k);
        let mut entries: Vec<(usize, f64)> = p.matrix.col(k).to_vec();
        entries.sort_unstable_by_key(|e| e.0);
        if p.objective[k] != 0.0 || entries.is_empty() {
            let _ = writeln!(s, "    {name}  {obj}  {}", fmt_num(p.objective[k]));
        }
        for (i, v) in entries {
            let _ = writeln!(s, "    {name}  {}  {}", row_name(i), fmt_num(v));
        }
    }
    let _ = writeln!(s, "RHS");
    if p.objective_offset != 0.0 {
        let _ = writeln!(s, "    RHS  {obj}  {}", fmt_num(-p.objective_offset));
    }
    for (i, b) in rhs {
        let _ = writeln!(s, "    RHS  {}  {}", row_name(i), fmt_num(b));
    }
    if !ranges.is_empty() {
        let _ = writeln!(s, "RANGES");
        for (i, r) in ranges {
            let _ = writeln!(s, "    RNG  {}  {}", row_name(i), fmt_num(r));
        }
    }
    let _ = writeln!(s, "BOUNDS");
    for k in 0..p.num_cols {
        let name = col_name(k);
        let (l, u) = (p.col_lower[k], p.col_upper[k]);
        if l == u {
            let _ = writeln!(s, " FX BND  {name}  {}", fmt_num(l));
            continue;
        }
        match (l == -INF, u == INF) {
            (true, true) => {
                let _ = writeln!(s, " FR BND  {name}");
            }
            (true, false) => {
                let _ = writeln!(s, " MI BND  {name}");
                let _ = writeln!(s, " UP BND  {name}  {}", fmt_num(u));
            }
            (false, up_inf) => {
                if !up_inf {
                    let _ = writeln!(s, " UP BND  {name}  {}", fmt_num(u));
                }
                // LO after UP so a negative upper bound cannot relax a zero lower one.
                if l != 0.0 || (!up_inf && u < 0.0) {
                    let _ = writeln!(s, " LO BND  {name}  {}", fmt_num(l));
                }
            }
        }
    }
    let _ = writeln!(s, "ENDATA");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> LpProblem {
        read_mps(text.as_bytes(), MpsOptions::default()).unwrap()
    }

    const TINY: &str = "\
NAME          TINY
ROWS
 N  COST
 G  LIM
COLUMNS
    X  COST  1.0  LIM  1.0
    Y  COST  2.0  LIM  2.0
RHS
    RHS  LIM  5.0
ENDATA
";

    #[test]
    fn minimal_fixture() {
        let p = read(TINY);
        let want = LpProblem::new(
            1,
            2,
            &[(0, 0, 1.0), (0, 1, 2.0)],
            vec![1.0, 2.0],
            vec![5.0],
            vec![INF],
            vec![0.0; 2],
            vec![INF; 2],
        )
        .unwrap();
        assert_eq!(p.matrix, want.matrix);
        assert_eq!(
            (p.objective.clone(), p.row_lower.clone(), p.row_upper.clone()),
            (want.objective, want.row_lower, want.row_upper)
        );
        assert_eq!((p.col_lower.clone(), p.col_upper.clone()), (want.col_lower, want.col_upper));
        assert_eq!(p.row_names, Some(vec!["LIM".to_string()]));
        assert_eq!(p.col_names, Some(vec!["X".to_string(), "Y".to_string()]));
    }

    #[test]
    fn range_conventions() {
        let text = "NAME\nROWS\n N obj\n E e1\n E e2\n L l\n G g\nCOLUMNS\n x e1 1 e2 1\n x l 1 g 1\nRHS\n rhs e1 5 e2 5\n rhs l 4 g 4\nRANGES\n rng e1 -2 e2 2\n rng l -3 g -3\nENDATA\n";
        let p = read(text);
        assert_eq!(p.row_lower, vec![3.0, 5.0, 1.0, 4.0]);
        assert_eq!(p.row_upper, vec![5.0, 7.0, 4.0, 7.0]);
    }

    #[test]
    fn bound_types() {
        let text = "NAME\nROWS\n N obj\nCOLUMNS\n a obj 1\n b obj 1\n c obj 1\n d obj 1\n e obj 1\nBOUNDS\n FR B a\n MI B b\n UP B b 4\n FX B c 2.5\n UP B d -1\n LO e 1\n PL e\nENDATA\n";
        let p = read(text);
        assert_eq!(p.col_lower, vec![-INF, -INF, 2.5, -INF, 1.0]);
        assert_eq!(p.col_upper, vec![INF, 4.0, 2.5, -1.0, INF]);
    }

    #[test]
    fn offset_and_sense() {
        let text =
            "NAME\nOBJSENSE\n    MAX\nROWS\n N obj\nCOLUMNS\n x obj 3\nRHS\n rhs obj 2\nBOUNDS\n UP b x 1\nENDATA\n";
        let p = read(text);
        assert_eq!(p.objective, vec![-3.0]);
        assert_eq!(p.objective_offset, 2.0);
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        let cases = [
            ("NAME\nROWS\n N obj\nCOLUMNS\n M1 'MARKER' 'INTORG'\n x obj 1\nENDATA\n", 5),
            ("NAME\nROWS\n N obj\nCOLUMNS\n x obj 1\nBOUNDS\n BV B x\nENDATA\n", 7),
            ("NAME\nROWS\n N obj\n L r\n G r\nENDATA\n", 5),
            ("NAME\nFOO\nENDATA\n", 2),
            ("NAME\nROWS\n N obj\nCOLUMNS\n x nope 1\nENDATA\n", 5),
            ("NAME\nROWS\n N obj\nCOLUMNS\n x obj abc\nENDATA\n", 5),
        ];
        for (text, line) in cases {
            let e = read_mps(text.as_bytes(), MpsOptions::default()).unwrap_err();
            assert_eq!(e.line, line, "{text}: {e}");
        }
    }

    /// Places fields at the fixed-layout start columns.
    fn fixed_line(fields: &[&str]) -> String {
        const STARTS: [usize; 6] = [1, 4, 14, 24, 39, 49];
        let mut line = String::new();
        for (f, &at) in fields.iter().zip(&STARTS) {
            while line.len() < at {
                line.push(' ');
            }
            line.push_str(f);
        }
        line
    }

    #[test]
    fn fixed_layout_allows_spaces_in_names() {
        let lines = [
            "NAME          FIXED".to_string(),
            "ROWS".to_string(),
            fixed_line(&["N", "COST"]),
            fixed_line(&["L", "ROW 1"]),
            "COLUMNS".to_string(),
            fixed_line(&["", "X 1", "COST", "1.0", "ROW 1", "2.0"]),
            "RHS".to_string(),
            fixed_line(&["", "RHS", "ROW 1", "4.0"]),
            "BOUNDS".to_string(),
            fixed_line(&["UP", "BND", "X 1", "3.0"]),
            "ENDATA".to_string(),
        ];
        let text = lines.join("\n");
        let p = read_mps(text.as_bytes(), MpsOptions { fixed: true }).unwrap();
        assert_eq!(p.col_names, Some(vec!["X 1".to_string()]));
        assert_eq!(p.row_names, Some(vec!["ROW 1".to_string()]));
        assert_eq!(p.row_upper, vec![4.0]);
        assert_eq!(p.col_upper, vec![3.0]);
        assert_eq!(p.matrix.get(0, 0), 2.0);
    }

    #[test]
    fn gzip_input() {
        use std::io::Write;
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(TINY.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();
        assert_eq!(read_mps(&gz, MpsOptions::default()).unwrap(), read(TINY));
    }

    #[test]
    fn empty_problem_roundtrips() {
        let p = LpProblem::new(0, 0, &[], vec![], vec![], vec![], vec![], vec![]).unwrap();
        let text = write_mps(&p);
        assert!(text.contains("COLUMNS\nRHS"));
        let q = read(&text);
        assert_eq!((q.num_rows, q.num_cols), (0, 0));
    }

    #[test]
    fn free_rows_and_offset_roundtrip() {
        let mut p = LpProblem::new(
            2,
            3,
            &[(0, 0, 1.5), (1, 2, -2.0)],
            vec![1.0, 0.0, -1.0],
            vec![-INF, 1.0],
            vec![INF, 4.0],
            vec![-INF, 0.0, -2.0],
            vec![INF, -1.0, 5.0],
        )
        .unwrap();
        p.objective_offset = -7.25;
        let q = read(&write_mps(&p));
        assert_eq!(q.row_lower, p.row_lower);
        assert_eq!(q.row_upper, p.row_upper);
        assert_eq!(q.col_lower, p.col_lower);
        assert_eq!(q.col_upper, p.col_upper);
        assert_eq!(q.objective, p.objective);
        assert_eq!(q.objective_offset, p.objective_offset);
        assert_eq!(q.matrix, p.matrix);
    }
}

//! Versioned little-endian binary files: the postsolve journal and solutions.
//! Solutions also have a line-oriented text form.

use std::fmt::Write as _;

use pslp_core::{
    FixCause, PostsolveJournal, PrimalDualSolution, ReductionRecord, RemoveCause, RowSnapshot, SideOrigin,
    SolutionStatus,
};

pub const JOURNAL_MAGIC: &[u8; 8] = b"PSLPJRNL";
pub const SOLUTION_MAGIC: &[u8; 8] = b"PSLPSOLN";
pub const FORMAT_VERSION: u32 = 1;
const TEXT_HEADER: &str = "pslp-solution 1";

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("not a {0} file (bad magic)")]
    BadMagic(&'static str),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("unexpected end of data at byte {0}")]
    Truncated(usize),
    #[error("unknown tag {tag} at byte {at}")]
    Tag { tag: u8, at: usize },
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u64(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u64).to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn flag(&mut self, b: bool) {
        self.u8(b as u8);
    }
    fn indices(&mut self, v: &[usize]) {
        self.u64(v.len());
        v.iter().for_each(|&i| self.u64(i));
    }
    fn entries(&mut self, v: &[(usize, f64)]) {
        self.u64(v.len());
        for &(i, a) in v {
            self.u64(i);
            self.f64(a);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or(CodecError::Truncated(self.pos))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<usize, CodecError> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| CodecError::Truncated(self.pos))
    }
    fn f64(&mut self) -> Result<f64, CodecError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn flag(&mut self) -> Result<bool, CodecError> {
        let at = self.pos;
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            tag => Err(CodecError::Tag { tag, at }),
        }
    }
    /// Reads a length and checks that `len * unit` bytes remain.
    fn len(&mut self, unit: usize) -> Result<usize, CodecError> {
        let n = self.u64()?;
        if n.saturating_mul(unit) > self.buf.len() - self.pos {
            return Err(CodecError::Truncated(self.pos));
        }
        Ok(n)
    }
    fn indices(&mut self) -> Result<Vec<usize>, CodecError> {
        let n = self.len(8)?;
        (0..n).map(|_| self.u64()).collect()
    }
    fn entries(&mut self) -> Result<Vec<(usize, f64)>, CodecError> {
        let n = self.len(16)?;
        (0..n).map(|_| Ok((self.u64()?, self.f64()?))).collect()
    }
    fn header(&mut self, magic: &[u8; 8], what: &'static str) -> Result<(), CodecError> {
        if self.buf.len() < 8 || &self.buf[..8] != magic {
            return Err(CodecError::BadMagic(what));
        }
        self.pos = 8;
        match self.u32()? {
            FORMAT_VERSION => Ok(()),
            v => Err(CodecError::Version(v)),
        }
    }
    fn end(&self) -> Result<(), CodecError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            n => Err(CodecError::Trailing(n)),
        }
    }
}

pub fn encode_journal(j: &PostsolveJournal) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(JOURNAL_MAGIC);
    w.0.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    w.u64(j.original_rows);
    w.u64(j.original_cols);
    w.indices(&j.row_map);
    w.indices(&j.col_map);
    w.u64(j.records.len());
    for r in &j.records {
        match r {
            ReductionRecord::FixVariable { k, value, cost, saved_column, cause } => {
                w.u8(0);
                w.u64(*k);
                w.f64(*value);
                w.f64(*cost);
                w.entries(saved_column);
                match cause {
                    FixCause::AtLower => w.u8(0),
                    FixCause::AtUpper => w.u8(1),
                    FixCause::Interior => w.u8(2),
                    FixCause::SingletonRow { row, coeff } => {
                        w.u8(3);
                        w.u64(*row);
                        w.f64(*coeff);
                    }
                }
            }
            ReductionRecord::RemoveConstraint { i, saved_row, lower, upper, cause } => {
                w.u8(1);
                w.u64(*i);
                w.entries(saved_row);
                w.f64(*lower);
                w.f64(*upper);
                match cause {
                    RemoveCause::Redundant => w.u8(0),
                    RemoveCause::Empty => w.u8(1),
                    RemoveCause::ParallelTo { row, scale, lower_from_removed, upper_from_removed } => {
                        w.u8(2);
                        w.u64(*row);
                        w.f64(*scale);
                        w.flag(*lower_from_removed);
                        w.flag(*upper_from_removed);
                    }
                    RemoveCause::ForcedSingleton => w.u8(3),
                }
            }
            ReductionRecord::AddScaledEqualityRow { src, dst, lambda } => {
                w.u8(2);
                w.u64(*src);
                w.u64(*dst);
                w.f64(*lambda);
            }
            ReductionRecord::SubstituteSingleton { k, row, coeff, cost, saved_row, rhs } => {
                w.u8(3);
                w.u64(*k);
                w.u64(*row);
                w.f64(*coeff);
                w.f64(*cost);
                w.entries(saved_row);
                w.f64(*rhs);
            }
            ReductionRecord::ChangeBounds { k, old_lb, old_ub, new_lb, new_ub, inducing } => {
                w.u8(4);
                w.u64(*k);
                for v in [old_lb, old_ub, new_lb, new_ub] {
                    w.f64(*v);
                }
                w.flag(inducing.is_some());
                if let Some(s) = inducing {
                    w.u64(s.row);
                    w.entries(&s.entries);
                }
            }
            ReductionRecord::ChangeRowSides { i, old_lower, old_upper, new_lower, new_upper, origin } => {
                w.u8(5);
                w.u64(*i);
                for v in [old_lower, old_upper, new_lower, new_upper] {
                    w.f64(*v);
                }
                w.u8(match origin {
                    SideOrigin::RedundantSide => 0,
                    SideOrigin::DualTightening => 1,
                    SideOrigin::ParallelMerge => 2,
                });
            }
            ReductionRecord::AggregateParallelColumns {
                kept,
                removed,
                scale,
                removed_bounds,
                removed_cost,
                kept_old_bounds,
            } => {
                w.u8(6);
                w.u64(*kept);
                w.u64(*removed);
                w.f64(*scale);
                w.f64(removed_bounds.0);
                w.f64(removed_bounds.1);
                w.f64(*removed_cost);
                w.f64(kept_old_bounds.0);
                w.f64(kept_old_bounds.1);
            }
        }
    }
    w.0
}

pub fn decode_journal(buf: &[u8]) -> Result<PostsolveJournal, CodecError> {
    let mut r = Reader { buf, pos: 0 };
    r.header(JOURNAL_MAGIC, "journal")?;
    let original_rows = r.u64()?;
    let original_cols = r.u64()?;
    let row_map = r.indices()?;
    let col_map = r.indices()?;
    let count = r.len(1)?;
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let at = r.pos;
        let record = match r.u8()? {
            0 => {
                let (k, value, cost, saved_column) = (r.u64()?, r.f64()?, r.f64()?, r.entries()?);
                let at = r.pos;
                let cause = match r.u8()? {
                    0 => FixCause::AtLower,
                    1 => FixCause::AtUpper,
                    2 => FixCause::Interior,
                    3 => FixCause::SingletonRow { row: r.u64()?, coeff: r.f64()? },
                    tag => return Err(CodecError::Tag { tag, at }),
                };
                ReductionRecord::FixVariable { k, value, cost, saved_column, cause }
            }
            1 => {
                let (i, saved_row, lower, upper) = (r.u64()?, r.entries()?, r.f64()?, r.f64()?);
                let at = r.pos;
                let cause = match r.u8()? {
                    0 => RemoveCause::Redundant,
                    1 => RemoveCause::Empty,
                    2 => RemoveCause::ParallelTo {
                        row: r.u64()?,
                        scale: r.f64()?,
                        lower_from_removed: r.flag()?,
                        upper_from_removed: r.flag()?,
                    },
                    3 => RemoveCause::ForcedSingleton,
                    tag => return Err(CodecError::Tag { tag, at }),
                };
                ReductionRecord::RemoveConstraint { i, saved_row, lower, upper, cause }
            }
            2 => ReductionRecord::AddScaledEqualityRow { src: r.u64()?, dst: r.u64()?, lambda: r.f64()? },
            3 => ReductionRecord::SubstituteSingleton {
                k: r.u64()?,
                row: r.u64()?,
                coeff: r.f64()?,
                cost: r.f64()?,
                saved_row: r.entries()?,
                rhs: r.f64()?,
            },
            4 => {
                let (k, old_lb, old_ub, new_lb, new_ub) = (r.u64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?);
                let inducing =
                    if r.flag()? { Some(RowSnapshot { row: r.u64()?, entries: r.entries()? }) } else { None };
                ReductionRecord::ChangeBounds { k, old_lb, old_ub, new_lb, new_ub, inducing }
            }
            5 => {
                let (i, old_lower, old_upper, new_lower, new_upper) =
                    (r.u64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?);
                let at = r.pos;
                let origin = match r.u8()? {
                    0 => SideOrigin::RedundantSide,
                    1 => SideOrigin::DualTightening,
                    2 => SideOrigin::ParallelMerge,
                    tag => return Err(CodecError::Tag { tag, at }),
                };
                ReductionRecord::ChangeRowSides { i, old_lower, old_upper, new_lower, new_upper, origin }
            }
            6 => ReductionRecord::AggregateParallelColumns {
                kept: r.u64()?,
                removed: r.u64()?,
                scale: r.f64()?,
                removed_bounds: (r.f64()?, r.f64()?),
                removed_cost: r.f64()?,
                kept_old_bounds: (r.f64()?, r.f64()?),
            },
            tag => return Err(CodecError::Tag { tag, at }),
        };
        records.push(record);
    }
    r.end()?;
    Ok(PostsolveJournal { original_rows, original_cols, records, row_map, col_map })
}

fn status_code(s: SolutionStatus) -> u8 {
    match s {
        SolutionStatus::Optimal => 0,
        SolutionStatus::PrimalInfeasible => 1,
        SolutionStatus::DualInfeasibleOrUnbounded => 2,
        SolutionStatus::Unknown => 3,
    }
}

pub fn status_name(s: SolutionStatus) -> &'static str {
    match s {
        SolutionStatus::Optimal => "optimal",
        SolutionStatus::PrimalInfeasible => "infeasible",
        SolutionStatus::DualInfeasibleOrUnbounded => "unbounded",
        SolutionStatus::Unknown => "unknown",
    }
}

fn status_from_name(s: &str) -> Option<SolutionStatus> {
    [
        SolutionStatus::Optimal,
        SolutionStatus::PrimalInfeasible,
        SolutionStatus::DualInfeasibleOrUnbounded,
        SolutionStatus::Unknown,
    ]
    .into_iter()
    .find(|&t| status_name(t) == s)
}

pub fn encode_solution(s: &PrimalDualSolution) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(SOLUTION_MAGIC);
    w.0.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    w.u8(status_code(s.status));
    w.u64(s.y.len());
    w.u64(s.x.len());
    s.x.iter().chain(&s.y).chain(&s.z).for_each(|&v| w.f64(v));
    w.0
}

fn decode_binary_solution(buf: &[u8]) -> Result<PrimalDualSolution, CodecError> {
    let mut r = Reader { buf, pos: 0 };
    r.header(SOLUTION_MAGIC, "solution")?;
    let at = r.pos;
    let status = match r.u8()? {
        0 => SolutionStatus::Optimal,
        1 => SolutionStatus::PrimalInfeasible,
        2 => SolutionStatus::DualInfeasibleOrUnbounded,
        3 => SolutionStatus::Unknown,
        tag => return Err(CodecError::Tag { tag, at }),
    };
    let m = r.u64()?;
    let n = r.u64()?;
    let mut vec = |len: usize| -> Result<Vec<f64>, CodecError> { (0..len).map(|_| r.f64()).collect() };
    let x = vec(n)?;
    let y = vec(m)?;
    let z = vec(n)?;
    r.end()?;
    Ok(PrimalDualSolution { x, y, z, status })
}

/// Text form: a header, the status and dimensions, then one value per line
/// under `x`, `y` and `z` markers.
pub fn solution_to_text(s: &PrimalDualSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{TEXT_HEADER}");
    let _ = writeln!(out, "status {}", status_name(s.status));
    let _ = writeln!(out, "rows {}", s.y.len());
    let _ = writeln!(out, "cols {}", s.x.len());
    for (tag, v) in [("x", &s.x), ("y", &s.y), ("z", &s.z)] {
        let _ = writeln!(out, "{tag}");
        for value in v.iter() {
            let _ = writeln!(out, "{value:?}");
        }
    }
    out
}

fn solution_from_text(text: &str) -> Result<PrimalDualSolution, CodecError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, message: &str| CodecError::Text { line, message: message.to_string() };
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, &format!("missing {what}")));
    let (l, head) = next("header")?;
    if head != TEXT_HEADER {
        return Err(bad(l, "not a solution file"));
    }
    let mut field = |key: &str| -> Result<(usize, String), CodecError> {
        let (l, line) = next(key)?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((l, v.trim().to_string())),
            _ => Err(bad(l, &format!("expected '{key}'"))),
        }
    };
    let (l, st) = field("status")?;
    let status = status_from_name(&st).ok_or_else(|| bad(l, "unknown status"))?;
    let (l, m) = field("rows")?;
    let m: usize = m.parse().map_err(|_| bad(l, "bad row count"))?;
    let (l, n) = field("cols")?;
    let n: usize = n.parse().map_err(|_| bad(l, "bad column count"))?;
    let mut section = |tag: &str, len: usize| -> Result<Vec<f64>, CodecError> {
        let (l, t) = next(tag)?;
        if t != tag {
            return Err(bad(l, &format!("expected '{tag}'")));
        }
        (0..len)
            .map(|_| {
                let (l, v) = next("value")?;
                v.parse::<f64>().map_err(|_| bad(l, "bad number"))
            })
            .collect()
    };
    let x = section("x", n)?;
    let y = section("y", m)?;
    let z = section("z", n)?;
    if let Some((l, _)) = lines.next() {
        return Err(bad(l, "trailing data"));
    }
    Ok(PrimalDualSolution { x, y, z, status })
}

/// Reads either solution form, chosen by the leading bytes.
pub fn decode_solution(buf: &[u8]) -> Result<PrimalDualSolution, CodecError> {
    if buf.starts_with(SOLUTION_MAGIC) {
        return decode_binary_solution(buf);
    }
    let text = std::str::from_utf8(buf).map_err(|_| CodecError::BadMagic("solution"))?;
    solution_from_text(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pslp_core::oracle::{random_lp, Feasibility, GeneratorConfig};
    use pslp_core::{presolve, PresolveConfig};

    #[test]
    fn journal_roundtrip_on_presolved_instances() {
        let cfg = GeneratorConfig::default();
        for seed in 0..30 {
            let p = random_lp(seed, 14, 14, 0.3, Feasibility::ForcedFeasible, &cfg);
            let j = presolve(&p, &PresolveConfig::default()).unwrap().journal;
            let bytes = encode_journal(&j);
            assert_eq!(decode_journal(&bytes).unwrap(), j);
        }
    }

    #[test]
    fn journal_rejects_damage() {
        let p = random_lp(3, 10, 10, 0.3, Feasibility::ForcedFeasible, &GeneratorConfig::default());
        let bytes = encode_journal(&presolve(&p, &PresolveConfig::default()).unwrap().journal);
        assert!(matches!(decode_journal(&bytes[..bytes.len() - 3]), Err(CodecError::Truncated(_))));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(decode_journal(&extra), Err(CodecError::Trailing(1))));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(decode_journal(&magic), Err(CodecError::BadMagic(_))));
        let mut version = bytes;
        version[8] = 9;
        assert!(matches!(decode_journal(&version), Err(CodecError::Version(9))));
    }

    #[test]
    fn solution_roundtrips_in_both_forms() {
        let s = PrimalDualSolution {
            x: vec![1.0, -0.1, f64::INFINITY],
            y: vec![1e-300],
            z: vec![0.0, -0.0, 3.5],
            status: SolutionStatus::Optimal,
        };
        let b = decode_solution(&encode_solution(&s)).unwrap();
        let t = decode_solution(solution_to_text(&s).as_bytes()).unwrap();
        for got in [b, t] {
            assert_eq!(got.status, s.status);
            assert_eq!(
                got.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                s.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
            assert_eq!(got.y, s.y);
            assert_eq!(
                got.z.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                s.z.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn text_solution_errors_name_lines() {
        let text = "pslp-solution 1\nstatus optimal\nrows 0\ncols 1\nx\nabc\ny\nz\n0\n";
        match decode_solution(text.as_bytes()) {
            Err(CodecError::Text { line: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}

//! CSV formats.
//!
//! Time series: header `series_id,t,x1,...,xd`, rows grouped by series and
//! sorted by strictly increasing `t`. Targets: `series_id,label` (class
//! indices) or `series_id,y1,...,yk` (regression vectors). Group elements:
//! `series_id,step,z_0_0,...` with the matrix flattened row-major.
//!
//! Floats are written as shortest round-trip decimals with LF line endings.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Terminator, Trim, WriterBuilder};
use pathdev::matexp::SquareMatrix;
use pathdev::sigpath::TimeSeries;
use pathdev::train::{Dataset, Sample, Split, Target};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    pub id: String,
    pub series: TimeSeries,
}

/// One group element of a development trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRow {
    pub id: String,
    pub step: usize,
    pub matrix: SquareMatrix,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Opens a file, or stdin for `-`.
pub fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(Box::new(BufReader::new(file)))
}

/// Creates a file, or stdout when `path` is `None` or `-`.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn source_name(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

struct Lines<'a> {
    source: &'a str,
}

impl Lines<'_> {
    fn err(&self, line: u64, message: impl Into<String>) -> CliError {
        CliError::Csv {
            source_name: self.source.to_string(),
            line,
            message: message.into(),
        }
    }

    fn csv(&self, e: csv::Error) -> CliError {
        let line = e.position().map_or(0, |p| p.line());
        let message = match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                format!("expected {expected_len} fields, found {len}")
            }
            _ => e.to_string(),
        };
        self.err(line, message)
    }

    fn float(&self, line: u64, column: &str, text: &str) -> Result<f64> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(self.err(line, format!("non-finite value `{text}` in column {column}"))),
            Err(_) => Err(self.err(line, format!("cannot parse `{text}` as a number in column {column}"))),
        }
    }
}

fn reader(input: impl Read) -> csv::Reader<impl Read> {
    ReaderBuilder::new().has_headers(true).trim(Trim::All).from_reader(input)
}

fn writer<W: Write>(output: W) -> csv::Writer<W> {
    WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(output)
}

fn record_line(rec: &StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn expect_header(lines: &Lines, header: &StringRecord, fixed: &[&str], prefix: &str) -> Result<usize> {
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < fixed.len() + 1 || cols[..fixed.len()] != *fixed {
        return Err(lines.err(
            1,
            format!("header must start with `{}` followed by {prefix}1..", fixed.join(",")),
        ));
    }
    for (k, name) in cols[fixed.len()..].iter().enumerate() {
        if *name != format!("{prefix}{}", k + 1) {
            return Err(lines.err(1, format!("expected column `{prefix}{}`, found `{name}`", k + 1)));
        }
    }
    Ok(cols.len() - fixed.len())
}

/// Reads time series in file order.
pub fn read_series(input: impl Read, source: &str) -> Result<Vec<NamedSeries>> {
    let lines = Lines { source };
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| lines.csv(e))?.clone();
    if header.is_empty() {
        return Err(lines.err(1, "missing header"));
    }
    let dim = expect_header(&lines, &header, &["series_id", "t"], "x")?;

    struct Partial {
        id: String,
        times: Vec<f64>,
        values: Vec<f64>,
    }
    let finish = |p: Partial| -> Result<NamedSeries> {
        let series = TimeSeries::from_flat(dim, p.values)?.with_timestamps(p.times)?;
        Ok(NamedSeries { id: p.id, series })
    };

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<Partial> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| lines.csv(e))?;
        let line = record_line(&rec);
        let id = &rec[0];
        if id.is_empty() {
            return Err(lines.err(line, "empty series_id"));
        }
        let t = lines.float(line, "t", &rec[1])?;
        if current.as_ref().is_none_or(|c| c.id != id) {
            if !seen.insert(id.to_string()) {
                return Err(lines.err(line, format!("rows of series `{id}` are not contiguous")));
            }
            if let Some(done) = current.take() {
                out.push(finish(done)?);
            }
            current = Some(Partial {
                id: id.to_string(),
                times: Vec::new(),
                values: Vec::new(),
            });
        }
        let cur = current.as_mut().expect("series started");
        if cur.times.last().is_some_and(|&prev| t <= prev) {
            return Err(lines.err(line, format!("t must be strictly increasing within series `{id}`")));
        }
        cur.times.push(t);
        for k in 0..dim {
            cur.values.push(lines.float(line, &format!("x{}", k + 1), &rec[k + 2])?);
        }
    }
    if let Some(done) = current.take() {
        out.push(finish(done)?);
    }
    if out.is_empty() {
        return Err(lines.err(2, "no data rows"));
    }
    Ok(out)
}

pub fn write_series(output: impl Write, series: &[NamedSeries]) -> Result<()> {
    let dim = series.first().map_or(1, |s| s.series.dim());
    let mut w = writer(output);
    let mut header = vec!["series_id".to_string(), "t".to_string()];
    header.extend((1..=dim).map(|k| format!("x{k}")));
    write_record(&mut w, &header)?;
    for s in series {
        for (t, p) in s.series.times().iter().zip(s.series.points()) {
            let mut row = vec![s.id.clone(), fmt_f64(*t)];
            row.extend(p.iter().map(|v| fmt_f64(*v)));
            write_record(&mut w, &row)?;
        }
    }
    flush(w)
}

/// Reads targets keyed by series id.
pub fn read_targets(input: impl Read, source: &str) -> Result<Vec<(String, Target)>> {
    let lines = Lines { source };
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| lines.csv(e))?.clone();
    let classes = header.len() == 2 && &header[0] == "series_id" && &header[1] == "label";
    if !classes {
        expect_header(&lines, &header, &["series_id"], "y")?;
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| lines.csv(e))?;
        let line = record_line(&rec);
        let id = rec[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(lines.err(line, format!("duplicate target for series `{id}`")));
        }
        let target = if classes {
            let label = rec[1]
                .parse::<usize>()
                .map_err(|_| lines.err(line, format!("label `{}` is not a non-negative integer", &rec[1])))?;
            Target::Class(label)
        } else {
            let values = (1..rec.len())
                .map(|k| lines.float(line, &format!("y{k}"), &rec[k]))
                .collect::<Result<_>>()?;
            Target::Vector(values)
        };
        out.push((id, target));
    }
    Ok(out)
}

pub fn write_targets(output: impl Write, targets: &[(String, Target)]) -> Result<()> {
    let mut w = writer(output);
    match targets.first().map(|t| &t.1) {
        Some(Target::Vector(v)) => {
            let mut header = vec!["series_id".to_string()];
            header.extend((1..=v.len()).map(|k| format!("y{k}")));
            write_record(&mut w, &header)?;
        }
        _ => write_record(&mut w, &["series_id".to_string(), "label".to_string()])?,
    }
    for (id, target) in targets {
        let mut row = vec![id.clone()];
        match target {
            Target::Class(c) => row.push(c.to_string()),
            Target::Vector(v) => row.extend(v.iter().map(|x| fmt_f64(*x))),
        }
        write_record(&mut w, &row)?;
    }
    flush(w)
}

/// Pairs series with their targets, keeping series order.
pub fn join_dataset(series: Vec<NamedSeries>, targets: Vec<(String, Target)>) -> Result<Dataset> {
    let mut by_id: HashMap<String, Target> = targets.into_iter().collect();
    let samples = series
        .into_iter()
        .map(|s| {
            let target = by_id
                .remove(&s.id)
                .ok_or_else(|| CliError::Input(format!("no target for series `{}`", s.id)))?;
            Ok(Sample {
                series: s.series,
                target,
                split: Split::Train,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset::new(samples)?)
}

fn state_header(order: usize) -> Vec<String> {
    let mut header = vec!["series_id".to_string(), "step".to_string()];
    for i in 0..order {
        for j in 0..order {
            header.push(format!("z_{i}_{j}"));
        }
    }
    header
}

pub fn write_states(output: impl Write, rows: &[StateRow]) -> Result<()> {
    let order = rows.first().map_or(1, |r| r.matrix.order());
    let mut w = writer(output);
    write_record(&mut w, &state_header(order))?;
    for r in rows {
        let mut row = vec![r.id.clone(), r.step.to_string()];
        row.extend(r.matrix.as_slice().iter().map(|v| fmt_f64(*v)));
        write_record(&mut w, &row)?;
    }
    flush(w)
}

pub fn read_states(input: impl Read, source: &str) -> Result<Vec<StateRow>> {
    let lines = Lines { source };
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| lines.csv(e))?.clone();
    let entries = header.len().saturating_sub(2);
    let order = (entries as f64).sqrt().round() as usize;
    let names: Vec<&str> = header.iter().collect();
    if order == 0 || order * order != entries || names != state_header(order) {
        return Err(lines.err(1, "header must be `series_id,step,z_0_0,...` with m² matrix columns"));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| lines.csv(e))?;
        let line = record_line(&rec);
        let step = rec[1]
            .parse::<usize>()
            .map_err(|_| lines.err(line, format!("step `{}` is not a non-negative integer", &rec[1])))?;
        let data = (2..rec.len())
            .map(|k| lines.float(line, names[k], &rec[k]))
            .collect::<Result<Vec<_>>>()?;
        out.push(StateRow {
            id: rec[0].to_string(),
            step,
            matrix: SquareMatrix::from_row_major(order, data)?,
        });
    }
    Ok(out)
}

/// `series_id` followed by one column per signature word. The empty word
/// is `sig`; word `(i, j, ...)` is `sig_i_j_...` with 1-based letters.
pub fn signature_header(dim: usize, depth: usize, include_constant: bool) -> Vec<String> {
    let mut header = vec!["series_id".to_string()];
    if include_constant {
        header.push("sig".into());
    }
    let mut words: Vec<String> = vec![String::new()];
    for _ in 0..depth {
        words = words
            .iter()
            .flat_map(|w| (1..=dim).map(move |i| format!("{w}_{i}")))
            .collect();
        header.extend(words.iter().map(|w| format!("sig{w}")));
    }
    header
}

pub fn write_signatures(
    output: impl Write,
    header: &[String],
    rows: &[(String, Vec<f64>)],
) -> Result<()> {
    let mut w = writer(output);
    write_record(&mut w, header)?;
    for (id, values) in rows {
        let mut row = Vec::with_capacity(values.len() + 1);
        row.push(id.clone());
        row.extend(values.iter().map(|v| fmt_f64(*v)));
        write_record(&mut w, &row)?;
    }
    flush(w)
}

fn write_error(e: io::Error) -> CliError {
    CliError::io("<output>", e)
}

fn write_record<W: Write>(w: &mut csv::Writer<W>, row: &[String]) -> Result<()> {
    w.write_record(row).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => write_error(io),
        other => CliError::Input(format!("cannot write CSV: {other:?}")),
    })
}

fn flush<W: Write>(w: csv::Writer<W>) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| write_error(e.into_error()))?;
    inner.flush().map_err(write_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<NamedSeries>> {
        read_series(text.as_bytes(), "test.csv")
    }

    fn line_of(err: CliError) -> u64 {
        match err {
            CliError::Csv { line, .. } => line,
            other => panic!("expected a CSV error, got {other:?}"),
        }
    }

    #[test]
    fn reads_grouped_series() {
        let s = parse("series_id,t,x1,x2\na,0,1,2\na,1,3,4\nb,0.5,0,0\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].id, "a");
        assert_eq!(s[0].series.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s[0].series.timestamps(), Some(&[0.0, 1.0][..]));
        assert_eq!(s[1].series.len(), 1);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        assert_eq!(line_of(parse("series_id,t,x1\na,0,1\na,1,oops\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("series_id,t,x1\na,0,1\na,1\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("series_id,t,x1\na,0,1\na,0,2\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("series_id,t,x1\na,0,1\nb,0,1\na,1,1\n").unwrap_err()), 4);
        assert_eq!(line_of(parse("series_id,t,x1\na,0,NaN\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("id,t,x1\na,0,1\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("series_id,t,x2\na,0,1\n").unwrap_err()), 1);
        assert!(matches!(parse("series_id,t,x1\n"), Err(CliError::Csv { .. })));
    }

    #[test]
    fn float_formatting_round_trips() {
        for v in [0.1, -2.5e-300, 1e21, 1.0 / 3.0, 0.0, -0.0, f64::MAX, f64::MIN_POSITIVE] {
            let text = fmt_f64(v);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{text}");
        }
        assert_eq!(fmt_f64(1.0), "1.0");
    }

    #[test]
    fn targets_both_kinds() {
        let c = read_targets("series_id,label\na,1\nb,0\n".as_bytes(), "l").unwrap();
        assert_eq!(c[0], ("a".into(), Target::Class(1)));
        let v = read_targets("series_id,y1,y2\na,0.5,-1\n".as_bytes(), "l").unwrap();
        assert_eq!(v[0], ("a".into(), Target::Vector(vec![0.5, -1.0])));
        assert!(read_targets("series_id,label\na,1\na,0\n".as_bytes(), "l").is_err());
        assert!(read_targets("series_id,label\na,-1\n".as_bytes(), "l").is_err());
    }

    #[test]
    fn states_round_trip() {
        let rows = vec![StateRow {
            id: "s".into(),
            step: 3,
            matrix: SquareMatrix::from_rows(&[[0.1, 0.2], [-0.3, 1e-9]]).unwrap(),
        }];
        let mut buf = Vec::new();
        write_states(&mut buf, &rows).unwrap();
        assert_eq!(read_states(buf.as_slice(), "s").unwrap(), rows);
        assert!(!buf.contains(&b'\r'));
    }

    #[test]
    fn signature_header_names() {
        assert_eq!(
            signature_header(2, 2, true),
            ["series_id", "sig", "sig_1", "sig_2", "sig_1_1", "sig_1_2", "sig_2_1", "sig_2_2"]
        );
        assert_eq!(signature_header(20, 3, false).len(), 8421);
    }
}

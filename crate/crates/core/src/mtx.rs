//! Matrix Market reading and writing.
//!
//! Sparse operators use the `coordinate` format (`real`, `integer`,
//! `pattern` or `complex`, with `general`, `symmetric`, `skew-symmetric` or
//! `hermitian` storage). Blocks use the `array` format, though a coordinate
//! file is accepted for a block too. Values are written with 17 significant
//! digits so a write/read round trip is exact.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{FunmvError, Result};
use crate::linalg::{DenseBlock, SparseMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

#[derive(Debug, Clone)]
struct Header {
    format: Format,
    field: Field,
    symmetry: Symmetry,
}

/// Raw contents: shape and `(row, col, value)` entries, 0-based, with
/// symmetric storage already expanded and duplicates summed.
#[derive(Debug, Clone)]
struct Entries {
    rows: usize,
    cols: usize,
    complex: bool,
    values: BTreeMap<(usize, usize), Complex64>,
}

/// A sparse operator as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum MtxMatrix {
    Real(SparseMatrix<f64>),
    Complex(SparseMatrix<Complex64>),
}

impl MtxMatrix {
    pub fn n(&self) -> usize {
        match self {
            MtxMatrix::Real(a) => a.n(),
            MtxMatrix::Complex(a) => a.n(),
        }
    }

    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        match self {
            MtxMatrix::Real(a) => a.to_complex(),
            MtxMatrix::Complex(a) => a.clone(),
        }
    }
}

/// A block as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum MtxBlock {
    Real(DenseBlock<f64>),
    Complex(DenseBlock<Complex64>),
}

impl MtxBlock {
    pub fn nrows(&self) -> usize {
        match self {
            MtxBlock::Real(b) => b.nrows(),
            MtxBlock::Complex(b) => b.nrows(),
        }
    }

    pub fn to_complex(&self) -> DenseBlock<Complex64> {
        match self {
            MtxBlock::Real(b) => b.to_complex(),
            MtxBlock::Complex(b) => b.clone(),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> FunmvError {
    FunmvError::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str, lineno: usize) -> Result<Header> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(perr(
            lineno,
            "expected `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    let format = match words[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(perr(lineno, format!("unknown format `{other}`"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        "complex" => Field::Complex,
        other => return Err(perr(lineno, format!("unknown field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(perr(lineno, format!("unknown symmetry `{other}`"))),
    };
    if format == Format::Array && field == Field::Pattern {
        return Err(perr(lineno, "pattern field needs coordinate format"));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(perr(lineno, "hermitian storage needs a complex field"));
    }
    Ok(Header {
        format,
        field,
        symmetry,
    })
}

fn parse_num(tok: Option<&str>, lineno: usize, what: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| perr(lineno, format!("missing {what}")))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(lineno, format!("cannot parse {what} `{tok}`")))?;
    if !v.is_finite() {
        return Err(perr(lineno, format!("{what} is not finite")));
    }
    Ok(v)
}

fn parse_index(tok: Option<&str>, lineno: usize, what: &str, bound: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| perr(lineno, format!("missing {what}")))?;
    let v: usize = tok
        .parse()
        .map_err(|_| perr(lineno, format!("cannot parse {what} `{tok}`")))?;
    if v == 0 || v > bound {
        return Err(perr(lineno, format!("{what} {v} outside 1..={bound}")));
    }
    Ok(v - 1)
}

fn parse_value<'a>(it: &mut impl Iterator<Item = &'a str>, field: Field, lineno: usize) -> Result<Complex64> {
    Ok(match field {
        Field::Pattern => Complex64::new(1.0, 0.0),
        Field::Real | Field::Integer => Complex64::new(parse_num(it.next(), lineno, "value")?, 0.0),
        Field::Complex => Complex64::new(
            parse_num(it.next(), lineno, "real part")?,
            parse_num(it.next(), lineno, "imaginary part")?,
        ),
    })
}

fn read_entries<R: BufRead>(reader: R) -> Result<Entries> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (lineno, first) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let header = parse_header(&first?, lineno)?;

    let mut data = lines.filter_map(|(i, l)| match l {
        Ok(l) => {
            let t = l.trim();
            (!t.is_empty() && !t.starts_with('%')).then(|| Ok((i, t.to_string())))
        }
        Err(e) => Some(Err(FunmvError::Io(e))),
    });

    let (size_line, size) = data.next().ok_or_else(|| perr(lineno + 1, "missing size line"))??;
    let mut it = size.split_whitespace();
    let rows = parse_num(it.next(), size_line, "row count")? as usize;
    let cols = parse_num(it.next(), size_line, "column count")? as usize;
    let mut values: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    let insert = |i: usize, j: usize, v: Complex64, values: &mut BTreeMap<_, _>| {
        *values.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += v;
    };
    let sym = header.symmetry;
    if sym != Symmetry::General && rows != cols {
        return Err(perr(size_line, "symmetric storage needs a square matrix"));
    }

    match header.format {
        Format::Coordinate => {
            let nnz = parse_num(it.next(), size_line, "entry count")? as usize;
            let mut count = 0;
            for item in data.by_ref() {
                let (ln, text) = item?;
                if count == nnz {
                    return Err(perr(ln, format!("more than the declared {nnz} entries")));
                }
                let mut tok = text.split_whitespace();
                let i = parse_index(tok.next(), ln, "row index", rows)?;
                let j = parse_index(tok.next(), ln, "column index", cols)?;
                let v = parse_value(&mut tok, header.field, ln)?;
                if sym != Symmetry::General && j > i {
                    return Err(perr(ln, "symmetric storage holds the lower triangle only"));
                }
                if sym == Symmetry::Skew && i == j {
                    return Err(perr(ln, "skew-symmetric storage has no diagonal"));
                }
                insert(i, j, v, &mut values);
                if i != j {
                    match sym {
                        Symmetry::General => {}
                        Symmetry::Symmetric => insert(j, i, v, &mut values),
                        Symmetry::Skew => insert(j, i, -v, &mut values),
                        Symmetry::Hermitian => insert(j, i, v.conj(), &mut values),
                    }
                }
                count += 1;
            }
            if count != nnz {
                return Err(perr(size_line, format!("declared {nnz} entries, found {count}")));
            }
        }
        Format::Array => {
            // column-major; symmetric kinds store the lower triangle
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = match sym {
                    Symmetry::General => 0,
                    Symmetry::Skew => j + 1,
                    _ => j,
                };
                slots.extend((start..rows).map(|i| (i, j)));
            }
            let mut slot = slots.into_iter();
            for item in data.by_ref() {
                let (ln, text) = item?;
                let (i, j) = slot
                    .next()
                    .ok_or_else(|| perr(ln, "more values than the declared size"))?;
                let mut tok = text.split_whitespace();
                let v = parse_value(&mut tok, header.field, ln)?;
                insert(i, j, v, &mut values);
                if i != j {
                    match sym {
                        Symmetry::General => {}
                        Symmetry::Symmetric => insert(j, i, v, &mut values),
                        Symmetry::Skew => insert(j, i, -v, &mut values),
                        Symmetry::Hermitian => insert(j, i, v.conj(), &mut values),
                    }
                }
            }
            if slot.next().is_some() {
                return Err(perr(size_line, "fewer values than the declared size"));
            }
        }
    }
    Ok(Entries {
        rows,
        cols,
        complex: header.field == Field::Complex,
        values,
    })
}

fn to_sparse<F: Scalar>(e: &Entries, conv: impl Fn(Complex64) -> F) -> Result<SparseMatrix<F>> {
    let t: Vec<(usize, usize, F)> = e
        .values
        .iter()
        .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
        .map(|(&(i, j), &v)| (i, j, conv(v)))
        .collect();
    SparseMatrix::from_triplets(e.rows, &t)
}

fn to_block<F: Scalar>(e: &Entries, conv: impl Fn(Complex64) -> F) -> Result<DenseBlock<F>> {
    let mut b = DenseBlock::zeros(e.rows, e.cols);
    for (&(i, j), &v) in &e.values {
        b.set(i, j, conv(v));
    }
    Ok(b)
}

/// Reads a square sparse operator.
pub fn read_matrix<R: BufRead>(reader: R) -> Result<MtxMatrix> {
    let e = read_entries(reader)?;
    if e.rows != e.cols {
        return Err(FunmvError::Dimension(format!(
            "operator must be square, file holds {} x {}",
            e.rows, e.cols
        )));
    }
    if e.complex {
        Ok(MtxMatrix::Complex(to_sparse(&e, |v| v)?))
    } else {
        Ok(MtxMatrix::Real(to_sparse(&e, |v| v.re)?))
    }
}

/// Reads an `n x n0` block.
pub fn read_block<R: BufRead>(reader: R) -> Result<MtxBlock> {
    let e = read_entries(reader)?;
    if e.complex {
        Ok(MtxBlock::Complex(to_block(&e, |v| v)?))
    } else {
        Ok(MtxBlock::Real(to_block(&e, |v| v.re)?))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| FunmvError::InvalidInput(format!("cannot open {}: {e}", path.display())))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<MtxMatrix> {
    read_matrix(open(path.as_ref())?)
}

pub fn load_block(path: impl AsRef<Path>) -> Result<MtxBlock> {
    read_block(open(path.as_ref())?)
}

fn field_name<F: Scalar>() -> &'static str {
    if F::IS_COMPLEX {
        "complex"
    } else {
        "real"
    }
}

fn write_value<F: Scalar, W: Write>(w: &mut W, v: F) -> std::io::Result<()> {
    if F::IS_COMPLEX {
        write!(w, "{:.16e} {:.16e}", v.re(), v.im())
    } else {
        write!(w, "{:.16e}", v.re())
    }
}

pub fn write_matrix<F: Scalar, W: Write>(a: &SparseMatrix<F>, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate {} general", field_name::<F>())?;
    writeln!(w, "{} {} {}", a.n(), a.n(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        write!(w, "{} {} ", i + 1, j + 1)?;
        write_value(&mut w, v)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_block<F: Scalar, W: Write>(b: &DenseBlock<F>, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array {} general", field_name::<F>())?;
    writeln!(w, "{} {}", b.nrows(), b.ncols())?;
    for &v in b.data() {
        write_value(&mut w, v)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| FunmvError::InvalidInput(format!("cannot create {}: {e}", path.display())))
}

pub fn save_matrix<F: Scalar>(a: &SparseMatrix<F>, path: impl AsRef<Path>) -> Result<()> {
    write_matrix(a, create(path.as_ref())?)
}

pub fn save_block<F: Scalar>(b: &DenseBlock<F>, path: impl AsRef<Path>) -> Result<()> {
    write_block(b, create(path.as_ref())?)
}

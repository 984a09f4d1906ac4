//! Reading and writing Matrix Market files: a symmetric-tagged matrix is
//! expanded, a complex matrix round-trips exactly, and a malformed line is
//! reported with its position.

use std::io::Cursor;

use funmv::mtx::{read_matrix, write_block, write_matrix, MtxMatrix};
use funmv::{funmv, Complex64, DenseBlock, FunmvConfig, FunmvOption, Result, SparseMatrix};

const SYMMETRIC: &str = "%%MatrixMarket matrix coordinate real symmetric
% lower triangle only
3 3 4
1 1 2.0
2 1 -1.0
2 2 2.0
3 3 2.0
";

fn main() -> Result<()> {
    let a = match read_matrix(Cursor::new(SYMMETRIC))? {
        MtxMatrix::Real(a) => a,
        MtxMatrix::Complex(_) => unreachable!(),
    };
    println!("symmetric file: {} stored entries, dense = {:?}", a.nnz(), a.to_dense());

    let z = SparseMatrix::from_triplets(
        3,
        &[
            (0, 0, Complex64::new(1.0 / 3.0, -2.0)),
            (1, 2, Complex64::new(0.1, 1e-300)),
            (2, 1, Complex64::new(-7.25e12, 0.0)),
        ],
    )?;
    let mut text = Vec::new();
    write_matrix(&z, &mut text)?;
    let back = read_matrix(Cursor::new(&text))?;
    println!("complex round trip exact: {}", back.to_complex() == z);

    let b = DenseBlock::from_column(vec![1.0, 0.0, 1.0]);
    let r = funmv(0.5, &a, &b, FunmvOption::CosSin, &FunmvConfig::default(), None)?;
    let mut out = Vec::new();
    write_block(&r.c, &mut out)?;
    print!("cos(A/2) b as an array file:\n{}", String::from_utf8_lossy(&out));

    let bad = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 three 4.0\n";
    match read_matrix(Cursor::new(bad)) {
        Err(e) => println!("malformed file: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

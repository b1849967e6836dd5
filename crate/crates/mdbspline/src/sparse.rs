//! Row-major compressed sparse matrices and the few kernels the extraction
//! pipeline needs: products, transposition, a banded Cholesky right-inverse
//! solve, and Matrix Market coordinate I/O.
//!
//! Constructors prune entries that are exactly zero. Arithmetic results keep
//! every produced entry, including zeros from cancellation; the null-space
//! construction depends on that stored-entry bookkeeping.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed; entries that end up exactly zero are dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= n_rows || c >= n_cols {
                return Err(Error::DimensionMismatch {
                    context: "triplet outside matrix bounds",
                    left: r,
                    right: c,
                });
            }
        }
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut it = sorted.into_iter().peekable();
        while let Some((r, c, mut v)) = it.next() {
            while let Some(&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    it.next();
                } else {
                    break;
                }
            }
            if v != 0.0 {
                row_offsets[r + 1] += 1;
                col_indices.push(c);
                values.push(v);
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(c, v)| (i, *c, *v))
        })
    }

    /// Stored entries of column `j`, sorted by row index. Stored zeros are
    /// reported like any other entry.
    pub fn column(&self, j: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            if let Ok(pos) = cols.binary_search(&j) {
                out.push((i, vals[pos]));
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for i in 0..self.n_cols {
            counts[i + 1] += counts[i];
        }
        let row_offsets = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = counts;
        for (i, c, v) in self.iter() {
            let pos = next[c];
            col_indices[pos] = i;
            values[pos] = v;
            next[c] += 1;
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Cyclically moves every row down by `shift` positions.
    pub fn rotate_rows_down(&self, shift: usize) -> SparseMatrix {
        let q = self.n_rows;
        if q == 0 || shift.is_multiple_of(q) {
            return self.clone();
        }
        let shift = shift % q;
        let mut row_offsets = Vec::with_capacity(q + 1);
        let mut col_indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_offsets.push(0);
        for new_row in 0..q {
            let old_row = (new_row + q - shift) % q;
            let (cols, vals) = self.row(old_row);
            col_indices.extend_from_slice(cols);
            values.extend_from_slice(vals);
            row_offsets.push(col_indices.len());
        }
        SparseMatrix {
            n_rows: q,
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// `y = A x` for a dense vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(c, v)| v * x[*c]).sum();
        }
        y
    }

    /// `y = v A` for a dense row vector `v`.
    pub fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n_rows);
        let mut y = vec![0.0; self.n_cols];
        for (i, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (c, a) in cols.iter().zip(vals) {
                y[*c] += vi * a;
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }
}

/// Sparse-sparse product. Result rows are sorted by column; every produced
/// entry is stored, with no magnitude thresholding. Row accumulation is
/// compensated, so entries that cancel toward zero keep their small residual
/// accurate instead of drowning in rounding noise.
pub fn spmm(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.n_cols != b.n_rows {
        return Err(Error::DimensionMismatch {
            context: "spmm inner dimensions",
            left: a.n_cols,
            right: b.n_rows,
        });
    }
    let mut row_offsets = Vec::with_capacity(a.n_rows + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_offsets.push(0);
    let mut accum = vec![0.0; b.n_cols];
    let mut carry = vec![0.0; b.n_cols];
    let mut touched = vec![false; b.n_cols];
    let mut active: Vec<usize> = Vec::new();
    for i in 0..a.n_rows {
        let (acols, avals) = a.row(i);
        for (k, av) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(*k);
            for (j, bv) in bcols.iter().zip(bvals) {
                if !touched[*j] {
                    touched[*j] = true;
                    active.push(*j);
                }
                let term = av * bv;
                let sum = accum[*j] + term;
                carry[*j] += if accum[*j].abs() >= term.abs() {
                    (accum[*j] - sum) + term
                } else {
                    (term - sum) + accum[*j]
                };
                accum[*j] = sum;
            }
        }
        active.sort_unstable();
        for &j in &active {
            col_indices.push(j);
            values.push(accum[j] + carry[j]);
            accum[j] = 0.0;
            carry[j] = 0.0;
            touched[j] = false;
        }
        active.clear();
        row_offsets.push(col_indices.len());
    }
    Ok(SparseMatrix {
        n_rows: a.n_rows,
        n_cols: b.n_cols,
        row_offsets,
        col_indices,
        values,
    })
}

/// Block-diagonal assembly of the given matrices.
pub fn block_diag(blocks: &[&SparseMatrix]) -> SparseMatrix {
    let n_rows = blocks.iter().map(|b| b.n_rows).sum();
    let n_cols = blocks.iter().map(|b| b.n_cols).sum();
    let nnz = blocks.iter().map(|b| b.nnz()).sum();
    let mut row_offsets = Vec::with_capacity(n_rows + 1);
    let mut col_indices = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_offsets.push(0);
    let mut col_base = 0;
    for block in blocks {
        for i in 0..block.n_rows {
            let (cols, vals) = block.row(i);
            col_indices.extend(cols.iter().map(|c| c + col_base));
            values.extend_from_slice(vals);
            row_offsets.push(col_indices.len());
        }
        col_base += block.n_cols;
    }
    SparseMatrix {
        n_rows,
        n_cols,
        row_offsets,
        col_indices,
        values,
    }
}

const CHOLESKY_PIVOT_REL_TOL: f64 = 1e-13;
const RESIDUAL_REL_TOL: f64 = 1e-10;

// Cholesky factor of a banded SPD matrix, stored as a dense band.
struct BandCholesky {
    n: usize,
    bandwidth: usize,
    // data[i * (bandwidth + 1) + d] = L[i][i - d]
    data: Vec<f64>,
}

impl BandCholesky {
    fn factor(g: &SparseMatrix) -> Result<Self> {
        let n = g.n_rows();
        assert_eq!(n, g.n_cols());
        let mut bandwidth = 0usize;
        let mut max_diag = 0.0f64;
        for (i, j, v) in g.iter() {
            bandwidth = bandwidth.max(i.abs_diff(j));
            if i == j {
                max_diag = max_diag.max(v);
            }
        }
        let threshold = CHOLESKY_PIVOT_REL_TOL * max_diag;
        let w = bandwidth;
        let stride = w + 1;
        let mut band = vec![0.0; n * stride];
        for (i, j, v) in g.iter() {
            if j <= i {
                band[i * stride + (i - j)] = v;
            }
        }
        let mut data = vec![0.0; n * stride];
        for i in 0..n {
            let lo = i.saturating_sub(w);
            for j in lo..=i {
                let mut sum = band[i * stride + (i - j)];
                let t0 = lo.max(j.saturating_sub(w));
                for t in t0..j {
                    sum -= data[i * stride + (i - t)] * data[j * stride + (j - t)];
                }
                if j < i {
                    data[i * stride + (i - j)] = sum / data[j * stride];
                } else {
                    if sum <= threshold {
                        return Err(Error::RankDeficient {
                            index: i,
                            pivot: sum,
                            threshold,
                        });
                    }
                    data[i * stride] = sum.sqrt();
                }
            }
        }
        Ok(Self {
            n,
            bandwidth: w,
            data,
        })
    }

    // Solves G x = b in place.
    #[allow(clippy::needless_range_loop)]
    fn solve(&self, b: &mut [f64]) {
        let w = self.bandwidth;
        let stride = w + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(w);
            let mut sum = b[i];
            for t in lo..i {
                sum -= self.data[i * stride + (i - t)] * b[t];
            }
            b[i] = sum / self.data[i * stride];
        }
        for i in (0..self.n).rev() {
            let hi = (i + w).min(self.n - 1);
            let mut sum = b[i];
            for t in i + 1..=hi {
                sum -= self.data[t * stride + (t - i)] * b[t];
            }
            b[i] = sum / self.data[i * stride];
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn right_lsq_impl(v: &[f64], a: &SparseMatrix, chol: &BandCholesky) -> (Vec<f64>, f64) {
    let b = a.mul_vec(v);
    let mut x = b;
    chol.solve(&mut x);
    let xa = a.left_mul(&x);
    let residual = xa
        .iter()
        .zip(v)
        .fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));
    (x, residual)
}

/// Solves `min ||x A - v||` through the normal equations, returning
/// `x = v A^T (A A^T)^{-1}` along with the residual `||x A - v||_inf`.
///
/// The Gram matrix `A A^T` is factored with a banded sparse Cholesky, so `A`
/// should have full row rank. Forming the Gram matrix squares `A`'s condition
/// number; the intended inputs (extraction operators and their refinement
/// products) are banded and well conditioned, which is why this route is
/// preferred over a sparse QR here. No consistency check is applied; the
/// residual is zero up to rounding exactly when `v` lies in the row space of
/// `A`.
pub fn right_lsq_residual(v: &[f64], a: &SparseMatrix) -> Result<(Vec<f64>, f64)> {
    if v.len() != a.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "right_lsq vector length",
            left: v.len(),
            right: a.n_cols(),
        });
    }
    let g = spmm(a, &a.transpose())?;
    let chol = BandCholesky::factor(&g)?;
    Ok(right_lsq_impl(v, a, &chol))
}

/// Residual-checked right-inverse action: fails with
/// [`Error::ResidualTooLarge`] when `v` is not in the row space of `A`.
pub fn right_lsq(v: &[f64], a: &SparseMatrix) -> Result<Vec<f64>> {
    let (x, residual) = right_lsq_residual(v, a)?;
    let bound = RESIDUAL_REL_TOL * max_abs(v);
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    Ok(x)
}

/// Row-wise right-inverse action `M A^T (A A^T)^{-1}` with the Gram factor
/// computed once. Each row is residual-checked like [`right_lsq`].
pub fn right_lsq_matrix(m: &SparseMatrix, a: &SparseMatrix) -> Result<SparseMatrix> {
    if m.n_cols() != a.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "right_lsq_matrix column counts",
            left: m.n_cols(),
            right: a.n_cols(),
        });
    }
    let g = spmm(a, &a.transpose())?;
    let chol = BandCholesky::factor(&g)?;
    let mut triplets = Vec::new();
    let mut dense_row = vec![0.0; m.n_cols()];
    for i in 0..m.n_rows() {
        dense_row.iter_mut().for_each(|x| *x = 0.0);
        let (cols, vals) = m.row(i);
        for (c, v) in cols.iter().zip(vals) {
            dense_row[*c] = *v;
        }
        let (x, residual) = right_lsq_impl(&dense_row, a, &chol);
        let bound = RESIDUAL_REL_TOL * max_abs(&dense_row);
        if residual > bound {
            return Err(Error::ResidualTooLarge { residual, bound });
        }
        for (j, xj) in x.iter().enumerate() {
            if *xj != 0.0 {
                triplets.push((i, j, *xj));
            }
        }
    }
    SparseMatrix::from_triplets(m.n_rows(), a.n_rows(), &triplets)
}

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn format_f64(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{v:.16e}").unwrap();
    s
}

const MATRIX_MARKET_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Writes the stored entries in coordinate format with 1-based indices, in
/// row-major order.
pub fn write_matrix_market<W: Write>(m: &SparseMatrix, out: &mut W) -> Result<()> {
    writeln!(out, "{MATRIX_MARKET_HEADER}")?;
    writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(out, "{} {} {}", i + 1, j + 1, format_f64(v))?;
    }
    Ok(())
}

pub fn write_matrix_market_file<P: AsRef<Path>>(m: &SparseMatrix, path: P) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_matrix_market(m, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Reads a coordinate-format `real general` matrix with 1-based indices.
pub fn read_matrix_market<R: Read>(input: R) -> Result<SparseMatrix> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::MatrixMarketParse {
            line: 1,
            msg: "empty input".into(),
        })
        .and_then(|(i, l)| Ok((i + 1, l?)))?;
    let normalized = header.split_whitespace().collect::<Vec<_>>().join(" ");
    if !normalized.eq_ignore_ascii_case(MATRIX_MARKET_HEADER) {
        return Err(Error::MatrixMarketParse {
            line: line_no,
            msg: format!("unsupported header: {header}"),
        });
    }
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match dims {
            None => {
                if fields.len() != 3 {
                    return Err(Error::MatrixMarketParse {
                        line: line_no,
                        msg: "size line must hold rows, cols, and entry count".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|e| Error::MatrixMarketParse {
                        line: line_no,
                        msg: format!("bad size field {s:?}: {e}"),
                    })
                };
                dims = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some((n_rows, n_cols, _)) => {
                if fields.len() != 3 {
                    return Err(Error::MatrixMarketParse {
                        line: line_no,
                        msg: "entry line must hold row, col, and value".into(),
                    });
                }
                let row: usize = fields[0].parse().map_err(|e| Error::MatrixMarketParse {
                    line: line_no,
                    msg: format!("bad row index {:?}: {e}", fields[0]),
                })?;
                let col: usize = fields[1].parse().map_err(|e| Error::MatrixMarketParse {
                    line: line_no,
                    msg: format!("bad column index {:?}: {e}", fields[1]),
                })?;
                let value: f64 = fields[2].parse().map_err(|e| Error::MatrixMarketParse {
                    line: line_no,
                    msg: format!("bad value {:?}: {e}", fields[2]),
                })?;
                if row == 0 || col == 0 || row > n_rows || col > n_cols {
                    return Err(Error::MatrixMarketParse {
                        line: line_no,
                        msg: format!("index ({row}, {col}) outside {n_rows} x {n_cols}"),
                    });
                }
                triplets.push((row - 1, col - 1, value));
            }
        }
    }
    let (n_rows, n_cols, nnz) = dims.ok_or(Error::MatrixMarketParse {
        line: 0,
        msg: "missing size line".into(),
    })?;
    if triplets.len() != nnz {
        return Err(Error::MatrixMarketParse {
            line: 0,
            msg: format!("expected {nnz} entries, found {}", triplets.len()),
        });
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

pub fn read_matrix_market_file<P: AsRef<Path>>(path: P) -> Result<SparseMatrix> {
    read_matrix_market(File::open(path)?)
}

//! Dense matrices over GF(p).
//!
//! All local coding matrices, transfer blocks and decode blocks are
//! `FieldMatrix` values. Entries are canonical residues in `[0, p)` stored
//! row-major. Elimination always pivots on the first nonzero entry of a
//! column, scanning rows top to bottom, so reduced forms are reproducible.

use std::fmt;

use thiserror::Error;

use crate::field::PrimeModulus;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{op}: shape mismatch {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op}: modulus mismatch ({left} vs {right})")]
    ModulusMismatch {
        op: &'static str,
        left: u64,
        right: u64,
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("entry {value} at ({row},{col}) is not a residue modulo {p}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: u64,
        p: u64,
    },
    #[error("row {row} has {len} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("block grid is empty")]
    EmptyGrid,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    modulus: PrimeModulus,
}

/// Result of Gauss-Jordan elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub reduced: FieldMatrix,
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: PrimeModulus) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn identity(dim: usize, modulus: PrimeModulus) -> Self {
        let mut m = Self::zeros(dim, dim, modulus);
        for i in 0..dim {
            m.entries[i * dim + i] = 1 % modulus.get();
        }
        m
    }

    /// `scalar * I`, with the scalar reduced mod p.
    pub fn scalar(dim: usize, value: i64, modulus: PrimeModulus) -> Self {
        let v = modulus.reduce(value);
        let mut m = Self::zeros(dim, dim, modulus);
        for i in 0..dim {
            m.entries[i * dim + i] = v;
        }
        m
    }

    /// Builds from signed integer rows, reducing every entry mod p.
    pub fn from_i64_rows(rows: &[Vec<i64>], modulus: PrimeModulus) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows {
                    row: r,
                    len: row.len(),
                    expected: cols,
                });
            }
            entries.extend(row.iter().map(|&x| modulus.reduce(x)));
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            entries,
            modulus,
        })
    }

    /// Builds from rows that must already be canonical residues.
    pub fn from_residue_rows(rows: &[Vec<u64>], modulus: PrimeModulus) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows {
                    row: r,
                    len: row.len(),
                    expected: cols,
                });
            }
            for (c, &x) in row.iter().enumerate() {
                if x >= modulus.get() {
                    return Err(LinalgError::EntryOutOfRange {
                        row: r,
                        col: c,
                        value: x,
                        p: modulus.get(),
                    });
                }
                entries.push(x);
            }
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            entries,
            modulus,
        })
    }

    /// Row-major residues; panics if the length does not match the shape.
    pub fn from_flat(rows: usize, cols: usize, entries: Vec<u64>, modulus: PrimeModulus) -> Self {
        assert_eq!(entries.len(), rows * cols, "flat entry count");
        let p = modulus.get();
        let entries = entries.into_iter().map(|x| x % p).collect();
        FieldMatrix {
            rows,
            cols,
            entries,
            modulus,
        }
    }

    /// `rows x cols` matrix with a single 1 at `(row, col)`.
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize, modulus: PrimeModulus) -> Self {
        let mut m = Self::zeros(rows, cols, modulus);
        m.set(row, col, 1);
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u64) {
        self.entries[r * self.cols + c] = value % self.modulus.get();
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| self.get(r, c) == u64::from(r == c))
            })
    }

    fn check_modulus(&self, other: &Self, op: &'static str) -> Result<(), LinalgError> {
        if self.modulus != other.modulus {
            return Err(LinalgError::ModulusMismatch {
                op,
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<(), LinalgError> {
        self.check_modulus(other, op)?;
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other, "add")?;
        let f = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(FieldMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other, "sub")?;
        let f = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(FieldMatrix {
            entries,
            ..self.clone()
        })
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Self) -> Result<(), LinalgError> {
        self.check_same_shape(other, "add")?;
        let f = self.modulus;
        for (a, &b) in self.entries.iter_mut().zip(&other.entries) {
            *a = f.add(*a, b);
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let f = self.modulus;
        FieldMatrix {
            entries: self.entries.iter().map(|&a| f.neg(a)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.modulus;
        let c = c % f.get();
        FieldMatrix {
            entries: self.entries.iter().map(|&a| f.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_modulus(other, "mul")?;
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let p = self.modulus.get();
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.entries[i * self.cols + l];
                if a == 0 {
                    continue;
                }
                let brow = &other.entries[l * other.cols..(l + 1) * other.cols];
                let orow = &mut out[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = (*o + a * b) % p;
                }
            }
        }
        Ok(FieldMatrix {
            rows: self.rows,
            cols: other.cols,
            entries: out,
            modulus: self.modulus,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Reduced row echelon form with first-nonzero pivoting.
    pub fn rref(&self) -> Echelon {
        let f = self.modulus;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            m.swap_rows(found, pivot_row);
            let inv = f.inv(m.get(pivot_row, col)).expect("pivot is nonzero");
            m.scale_row(pivot_row, inv);
            for r in 0..m.rows {
                if r != pivot_row {
                    let factor = m.get(r, col);
                    if factor != 0 {
                        m.sub_row_multiple(r, pivot_row, factor);
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let aug = Self::hstack(&[self.clone(), Self::identity(n, self.modulus)])?;
        let ech = aug.rref();
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        Ok(ech.reduced.submatrix(0, n, n, n))
    }

    /// Finds `X` with `self * X = rhs`; `Ok(None)` when the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve_right(&self, rhs: &Self) -> Result<Option<Self>, LinalgError> {
        self.check_modulus(rhs, "solve_right")?;
        if self.rows != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "solve_right",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let n = self.cols;
        let aug = Self::hstack(&[self.clone(), rhs.clone()])?;
        let ech = aug.rref();
        if ech.pivots.iter().any(|&c| c >= n) {
            return Ok(None);
        }
        let mut x = Self::zeros(n, rhs.cols, self.modulus);
        for (r, &pc) in ech.pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                x.set(pc, c, ech.reduced.get(r, n + c));
            }
        }
        Ok(Some(x))
    }

    pub fn submatrix(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        let mut s = Self::zeros(rows, cols, self.modulus);
        for r in 0..rows {
            for c in 0..cols {
                s.entries[r * cols + c] = self.get(row + r, col + c);
            }
        }
        s
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn write_block(&mut self, row: usize, col: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.entries[(row + r) * self.cols + col + c] = block.get(r, c);
            }
        }
    }

    /// Assembles a flat matrix from a grid of blocks. Every block in a grid
    /// row shares a height, every block in a grid column shares a width.
    pub fn block_compose(grid: &[Vec<FieldMatrix>]) -> Result<Self, LinalgError> {
        let first = grid.first().and_then(|r| r.first()).ok_or(LinalgError::EmptyGrid)?;
        let modulus = first.modulus;
        let width = grid[0].len();
        let heights: Vec<usize> = grid.iter().map(|r| r.first().map_or(0, |b| b.rows)).collect();
        let widths: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        for (i, row) in grid.iter().enumerate() {
            if row.len() != width {
                return Err(LinalgError::RaggedRows {
                    row: i,
                    len: row.len(),
                    expected: width,
                });
            }
            for (j, b) in row.iter().enumerate() {
                first.check_modulus(b, "block_compose")?;
                if b.rows != heights[i] || b.cols != widths[j] {
                    return Err(LinalgError::ShapeMismatch {
                        op: "block_compose",
                        left: (heights[i], widths[j]),
                        right: b.shape(),
                    });
                }
            }
        }
        let mut out = Self::zeros(heights.iter().sum(), widths.iter().sum(), modulus);
        let mut r0 = 0;
        for (i, row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (j, b) in row.iter().enumerate() {
                out.write_block(r0, c0, b);
                c0 += widths[j];
            }
            r0 += heights[i];
        }
        Ok(out)
    }

    pub fn vstack(blocks: &[FieldMatrix]) -> Result<Self, LinalgError> {
        let grid: Vec<Vec<FieldMatrix>> = blocks.iter().map(|b| vec![b.clone()]).collect();
        Self::block_compose(&grid)
    }

    pub fn hstack(blocks: &[FieldMatrix]) -> Result<Self, LinalgError> {
        Self::block_compose(&[blocks.to_vec()])
    }

    /// Checks `A_i B_j = δ_ij I_d` for row blocks `A_i` (d x dn) and column
    /// blocks `B_j` (dn x d).
    pub fn block_identity_check(a_blocks: &[FieldMatrix], b_blocks: &[FieldMatrix]) -> Result<bool, LinalgError> {
        if a_blocks.len() != b_blocks.len() {
            return Err(LinalgError::ShapeMismatch {
                op: "block_identity_check",
                left: (a_blocks.len(), 0),
                right: (b_blocks.len(), 0),
            });
        }
        let Some(first) = a_blocks.first() else {
            return Ok(true);
        };
        let d = first.rows;
        let dn = d * a_blocks.len();
        for a in a_blocks {
            if a.shape() != (d, dn) {
                return Err(LinalgError::ShapeMismatch {
                    op: "block_identity_check",
                    left: (d, dn),
                    right: a.shape(),
                });
            }
        }
        for b in b_blocks {
            if b.shape() != (dn, d) {
                return Err(LinalgError::ShapeMismatch {
                    op: "block_identity_check",
                    left: (dn, d),
                    right: b.shape(),
                });
            }
        }
        for (i, a) in a_blocks.iter().enumerate() {
            for (j, b) in b_blocks.iter().enumerate() {
                let prod = a.mul(b)?;
                let ok = if i == j { prod.is_identity() } else { prod.is_zero() };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, factor: u64) {
        let f = self.modulus;
        for x in &mut self.entries[r * self.cols..(r + 1) * self.cols] {
            *x = f.mul(*x, factor);
        }
    }

    /// row[target] -= factor * row[source]
    fn sub_row_multiple(&mut self, target: usize, source: usize, factor: u64) {
        let f = self.modulus;
        for c in 0..self.cols {
            let s = f.mul(self.entries[source * self.cols + c], factor);
            let t = &mut self.entries[target * self.cols + c];
            *t = f.sub(*t, s);
        }
    }
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

//! Dense matrices over polynomials and over the coefficient field.

use std::collections::HashMap;
use std::fmt;

use crate::cyclo::{CycloElem, CycloField};
use crate::error::{Error, Result};
use crate::poly::{Polynomial, Ring};

/// Row-major matrix of polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Polynomial>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl PolyMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> PolyMatrix {
        PolyMatrix::scalar(ring, n, &ring.one())
    }

    /// `p · I_n`.
    pub fn scalar(ring: &Ring, n: usize, p: &Polynomial) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, p.clone());
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Polynomial>>) -> Result<PolyMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged rows".into()));
            }
            for p in row {
                if p.ring() != ring {
                    return Err(Error::RingMismatch);
                }
                data.push(p);
            }
        }
        Ok(PolyMatrix {
            ring: ring.clone(),
            rows: r,
            cols: c,
            data,
        })
    }

    /// Parse a row-major array of expression strings.
    pub fn parse<S: AsRef<str>>(ring: &Ring, rows: &[Vec<S>]) -> Result<PolyMatrix> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| ring.parse(s.as_ref())).collect())
            .collect::<Result<Vec<Vec<Polynomial>>>>()?;
        PolyMatrix::from_rows(ring, parsed)
    }

    /// Permutation matrix sending basis vector `i` to `perm[i]`.
    pub fn permutation(ring: &Ring, perm: &[usize]) -> PolyMatrix {
        let n = perm.len();
        let mut m = PolyMatrix::zeros(ring, n, n);
        for (i, &p) in perm.iter().enumerate() {
            m.set(p, i, ring.one());
        }
        m
    }

    /// Diagonal matrix with the given field entries.
    pub fn diagonal(ring: &Ring, diag: &[CycloElem]) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(ring, diag.len(), diag.len());
        for (i, c) in diag.iter().enumerate() {
            m.set(i, i, ring.constant(c.clone()));
        }
        m
    }

    pub fn from_field(ring: &Ring, a: &FieldMatrix) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(ring, a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, ring.constant(a.get(i, j).clone()));
            }
        }
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.data[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Polynomial> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<Polynomial>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Polynomial::is_zero)
    }

    /// Whether this is `p · I`.
    pub fn is_scalar(&self, p: &Polynomial) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e == p
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    fn same_shape(&self, other: &PolyMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other)?;
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other)?;
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &CycloElem) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, q: &Polynomial) -> PolyMatrix {
        self.map(|p| p * q)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.mul_inner(other, None)
    }

    /// Product with every entry truncated below total degree `n`.
    pub fn mul_trunc(&self, other: &PolyMatrix, n: u32) -> Result<PolyMatrix> {
        self.mul_inner(other, Some(n))
    }

    fn mul_inner(&self, other: &PolyMatrix, bound: Option<u32>) -> Result<PolyMatrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = match bound {
                        Some(n) => a.mul_trunc(b, n)?,
                        None => a * b,
                    };
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &prod;
                }
            }
        }
        Ok(out)
    }

    /// Product of a nonempty chain of matrices.
    pub fn product<'a, I: IntoIterator<Item = &'a PolyMatrix>>(mats: I) -> Result<PolyMatrix> {
        let mut it = mats.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Shape("empty product".into()))?
            .clone();
        it.try_fold(first, |acc, m| acc.mul(m))
    }

    /// Kronecker product; the index of `self` varies slower.
    pub fn kron(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let (r2, c2) = (other.rows, other.cols);
        let mut out = PolyMatrix::zeros(&self.ring, self.rows * r2, self.cols * c2);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * r2 + k, j * c2 + l, a * b);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn block_diag(ring: &Ring, blocks: &[&PolyMatrix]) -> Result<PolyMatrix> {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = PolyMatrix::zeros(ring, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            if &b.ring != ring {
                return Err(Error::RingMismatch);
            }
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &PolyMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(&self.ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Submatrix on the listed rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(&self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn hcat(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.rows != other.rows {
            return Err(Error::Shape("row counts differ".into()));
        }
        let mut out = PolyMatrix::zeros(&self.ring, self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        Ok(out)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn truncate(&self, n: u32) -> PolyMatrix {
        self.map(|p| p.truncate(n))
    }

    pub fn reduce_mod_indices(&self, kill: &[usize]) -> PolyMatrix {
        self.map(|p| p.reduce_mod_indices(kill))
    }

    pub fn embed(&self, target: &Ring) -> Result<PolyMatrix> {
        let data = self
            .data
            .iter()
            .map(|p| p.embed(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Matrix of constant terms.
    pub fn constant_part(&self) -> FieldMatrix {
        FieldMatrix {
            field: self.ring.field().clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Polynomial::constant_term).collect(),
        }
    }

    /// Whether every entry lies in the maximal ideal.
    pub fn is_reduced(&self) -> bool {
        self.data.iter().all(|p| p.constant_term().is_zero())
    }

    pub fn max_degree(&self) -> u32 {
        self.data
            .iter()
            .filter_map(Polynomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Least order among nonzero entries.
    pub fn min_order(&self) -> Option<u32> {
        self.data.iter().filter_map(|p| p.order().ok()).min()
    }

    /// Exact determinant by row-by-row minor expansion memoized on the set of
    /// used columns.
    pub fn det(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.ring.one());
        }
        if n > 128 {
            return Err(Error::Shape(format!("determinant of size {n} is out of reach")));
        }
        let nonzero: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| !self.get(i, j).is_zero()).collect())
            .collect();
        // columns that can no longer be used after row r
        let mut last_row = vec![None; n];
        for (i, cols) in nonzero.iter().enumerate() {
            for &j in cols {
                last_row[j] = Some(i);
            }
        }
        if last_row.iter().any(Option::is_none) {
            return Ok(self.ring.zero());
        }
        let mut must_have = vec![0u128; n];
        for (j, lr) in last_row.iter().enumerate() {
            must_have[lr.unwrap()] |= 1u128 << j;
        }
        let mut required = 0u128;
        let mut level: HashMap<u128, Polynomial> = HashMap::new();
        level.insert(0, self.ring.one());
        for (r, cols) in nonzero.iter().enumerate() {
            required |= must_have[r];
            let mut next: HashMap<u128, Polynomial> = HashMap::new();
            for (&mask, val) in &level {
                for &c in cols {
                    let bit = 1u128 << c;
                    if mask & bit != 0 {
                        continue;
                    }
                    let nm = mask | bit;
                    if nm & required != required {
                        continue;
                    }
                    let higher = (mask >> c >> 1).count_ones();
                    let mut term = val * self.get(r, c);
                    if higher % 2 == 1 {
                        term = -term;
                    }
                    match next.get_mut(&nm) {
                        Some(acc) => *acc = &*acc + &term,
                        None => {
                            next.insert(nm, term);
                        }
                    }
                }
            }
            next.retain(|_, v| !v.is_zero());
            level = next;
            if level.is_empty() {
                return Ok(self.ring.zero());
            }
        }
        Ok(level.into_values().next().unwrap_or_else(|| self.ring.zero()))
    }

    /// Inverse modulo total degree `n`; needs an invertible constant part.
    pub fn jet_inverse(&self, n: u32) -> Result<PolyMatrix> {
        let a0 = self.constant_part();
        let a0inv = a0.inverse()?;
        let a0inv = PolyMatrix::from_field(&self.ring, &a0inv);
        let a1 = self.sub(&PolyMatrix::from_field(&self.ring, &a0))?;
        let step = a0inv.mul(&a1)?.neg().truncate(n);
        let mut term = a0inv.clone();
        let mut sum = PolyMatrix::zeros(&self.ring, self.rows, self.cols);
        for _ in 0..n.max(1) {
            sum = sum.add(&term)?;
            term = step.mul_trunc(&term, n)?;
            if term.is_zero() {
                break;
            }
        }
        Ok(sum.truncate(n))
    }
}

/// Row-major matrix over the coefficient field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: CycloField,
    rows: usize,
    cols: usize,
    data: Vec<CycloElem>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl FieldMatrix {
    pub fn zeros(field: &CycloField, rows: usize, cols: usize) -> FieldMatrix {
        FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &CycloField, n: usize) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn field(&self) -> &CycloField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycloElem::is_zero)
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape("inner dimensions differ".into()));
        }
        let mut out = FieldMatrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and pivot columns, pivots chosen leftmost
    /// and topmost.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inverse().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(row, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<CycloElem> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = self.field.one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inverse()?;
            for i in col + 1..m.rows {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col) * &inv;
                for j in col..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(col, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = FieldMatrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NotUnit("matrix is singular at the origin".into()));
        }
        let mut out = FieldMatrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(out)
    }
}

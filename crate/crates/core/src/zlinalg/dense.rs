use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<IntMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> IntMatrix {
        let mut m = IntMatrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone().into();
        }
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] -= k * row[source]`
    pub(crate) fn sub_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[source * self.cols + j] * k;
            self.data[target * self.cols + j] -= v;
        }
    }

    /// `col[target] -= k * col[source]`
    pub(crate) fn sub_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + source] * k;
            self.data[i * self.cols + target] -= v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[i * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "entry ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "entry ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Row Hermite form `H = U·M`: echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut pivot_row = 0;
    for col in 0..m.cols() {
        if pivot_row == m.rows() {
            break;
        }
        let mut found = false;
        loop {
            let candidate = (pivot_row..m.rows())
                .filter(|&r| !h[(r, col)].is_zero())
                .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()).then(a.cmp(&b)));
            let Some(r) = candidate else { break };
            found = true;
            h.swap_rows(pivot_row, r);
            u.swap_rows(pivot_row, r);
            let pivot = h[(pivot_row, col)].clone();
            let mut clean = true;
            for r in pivot_row + 1..m.rows() {
                if h[(r, col)].is_zero() {
                    continue;
                }
                let q = h[(r, col)].div_floor(&pivot);
                h.sub_row_multiple(r, pivot_row, &q);
                u.sub_row_multiple(r, pivot_row, &q);
                if !h[(r, col)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for r in 0..pivot_row {
            let q = h[(r, col)].div_floor(&pivot);
            h.sub_row_multiple(r, pivot_row, &q);
            u.sub_row_multiple(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// `S = U·M·V` with `S` diagonal and `d₁ | d₂ | ⋯`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `S`, length `min(rows, cols)`, zeros last.
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }

    /// Checks `S = U·M·V`, unimodularity of `U` and `V`, and the divisibility chain.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        let Ok(um) = self.u.mul(m) else { return false };
        let Ok(umv) = um.mul(&self.v) else { return false };
        if umv != self.s || !self.u.is_unimodular() || !self.v.is_unimodular() {
            return false;
        }
        for i in 0..self.s.rows() {
            for j in 0..self.s.cols() {
                if i != j && !self.s[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        self.invariant_factors.windows(2).all(|w| {
            !w[0].is_negative()
                && if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() }
        })
    }
}

pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_snf(s, u, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let pivot = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = s[(i, t)].div_floor(&pivot);
                s.sub_row_multiple(i, t, &q);
                u.sub_row_multiple(i, t, &q);
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = s[(t, j)].div_floor(&pivot);
                s.sub_col_multiple(j, t, &q);
                v.sub_col_multiple(j, t, &q);
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !(&s[(i, j)] % &pivot).is_zero()));
            match offender {
                Some(i) => {
                    // row_t += row_i brings the offending entry into row t
                    let minus_one = BigInt::from(-1);
                    s.sub_row_multiple(t, i, &minus_one);
                    u.sub_row_multiple(t, i, &minus_one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_snf(s, u, v)
}

fn finish_snf(mut s: IntMatrix, mut u: IntMatrix, v: IntMatrix) -> SmithDecomposition {
    let n = s.rows().min(s.cols());
    for t in 0..n {
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    let invariant_factors = (0..n).map(|t| s[(t, t)].clone()).collect();
    SmithDecomposition { s, u, v, invariant_factors }
}

/// `ℤ^rows / im(M) ≅ ℤ^free_rank ⊕ ⨁ ℤ/dᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
}

pub fn coker_invariants(m: &IntMatrix) -> Cokernel {
    let decomposition = snf(m);
    Cokernel {
        free_rank: m.rows() - decomposition.rank(),
        torsion: decomposition
            .invariant_factors
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect(),
    }
}

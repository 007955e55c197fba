use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dense::IntMatrix;
use crate::error::{Error, Result};

/// Sorted `(index, value)` pairs with no stored zeros.
pub type SparseVec = Vec<(usize, BigInt)>;

pub(crate) fn sparse_from_dense(v: &[BigInt]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub(crate) fn dense_from_sparse(v: &SparseVec, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// `a·x + b·y`.
pub(crate) fn combine(a: &BigInt, x: &SparseVec, b: &BigInt, y: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let push = |out: &mut SparseVec, k: usize, v: BigInt| {
        if !v.is_zero() {
            out.push((k, v));
        }
    };
    while i < x.len() || j < y.len() {
        match (x.get(i), y.get(j)) {
            (Some((ki, vi)), Some((kj, vj))) if ki == kj => {
                push(&mut out, *ki, a * vi + b * vj);
                i += 1;
                j += 1;
            }
            (Some((ki, vi)), Some((kj, _))) if ki < kj => {
                push(&mut out, *ki, a * vi);
                i += 1;
            }
            (Some((ki, vi)), None) => {
                push(&mut out, *ki, a * vi);
                i += 1;
            }
            (_, Some((kj, vj))) => {
                push(&mut out, *kj, b * vj);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Column-major sparse integer matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(rows: usize) -> SparseMatrix {
        SparseMatrix { rows, columns: Vec::new() }
    }

    pub fn zeros(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    /// Appends a column given as unsorted `(row, value)` entries; repeated
    /// rows are summed.
    pub fn push_column(&mut self, mut entries: Vec<(usize, BigInt)>) -> Result<()> {
        entries.sort_by_key(|(i, _)| *i);
        let mut column: SparseVec = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange { index: i, depth: self.rows });
            }
            match column.last_mut() {
                Some((k, acc)) if *k == i => *acc += v,
                _ => column.push((i, v)),
            }
        }
        column.retain(|(_, v)| !v.is_zero());
        self.columns.push(column);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn nonzeros(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.columns[j]
            .binary_search_by_key(&i, |(k, _)| *k)
            .map(|p| self.columns[j][p].1.clone())
            .unwrap_or_default()
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch { expected: self.cols(), found: x.len() });
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for (column, xj) in self.columns.iter().zip(x) {
            if xj.is_zero() {
                continue;
            }
            for (i, v) in column {
                out[*i] += v * xj;
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols());
        for (j, column) in self.columns.iter().enumerate() {
            for (i, v) in column {
                m[(*i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_dense(m: &IntMatrix) -> SparseMatrix {
        SparseMatrix {
            rows: m.rows(),
            columns: (0..m.cols()).map(|j| sparse_from_dense(&m.column(j))).collect(),
        }
    }
}

impl PartialEq for SparseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.columns == other.columns
    }
}

impl Eq for SparseMatrix {}

impl PartialEq<IntMatrix> for SparseMatrix {
    fn eq(&self, other: &IntMatrix) -> bool {
        self.to_dense() == *other
    }
}

impl PartialEq<SparseMatrix> for IntMatrix {
    fn eq(&self, other: &SparseMatrix) -> bool {
        *self == other.to_dense()
    }
}

/// Matrices that can hand out their columns sparsely.
pub trait ColumnMatrix {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn sparse_column(&self, j: usize) -> SparseVec;
}

impl ColumnMatrix for SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn sparse_column(&self, j: usize) -> SparseVec {
        self.columns[j].clone()
    }
}

impl ColumnMatrix for IntMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn sparse_column(&self, j: usize) -> SparseVec {
        sparse_from_dense(&self.column(j))
    }
}

#[derive(Clone, Debug)]
struct Pivot {
    /// Lattice vector with leading entry at its lead row, positive.
    image: SparseVec,
    /// Coefficients expressing `image` in the columns of `M`.
    transform: SparseVec,
}

/// Echelon basis of the column lattice `M·ℤ^n`, with every basis vector
/// expressed in the columns of `M`, plus a ℤ-basis of `ker(M)`.
///
/// Built by inserting the columns one at a time and clearing leading
/// entries with unimodular 2×2 steps, so the transforms of all basis and
/// kernel vectors together form a unimodular matrix.
#[derive(Clone, Debug)]
pub struct ColumnLattice {
    rows: usize,
    cols: usize,
    pivots: Vec<Pivot>,
    pivot_at: Vec<Option<usize>>,
    kernel: Vec<SparseVec>,
}

impl ColumnLattice {
    pub fn new<M: ColumnMatrix + ?Sized>(m: &M) -> ColumnLattice {
        let mut lattice = ColumnLattice {
            rows: m.nrows(),
            cols: m.ncols(),
            pivots: Vec::new(),
            pivot_at: vec![None; m.nrows()],
            kernel: Vec::new(),
        };
        for j in 0..m.ncols() {
            lattice.insert(m.sparse_column(j), vec![(j, BigInt::one())]);
        }
        lattice
    }

    fn insert(&mut self, mut image: SparseVec, mut transform: SparseVec) {
        loop {
            let Some((lead, a)) = image.first().cloned() else {
                self.kernel.push(transform);
                return;
            };
            let Some(p) = self.pivot_at[lead] else {
                if a.is_negative() {
                    let minus = BigInt::from(-1);
                    image = combine(&minus, &image, &BigInt::zero(), &Vec::new());
                    transform = combine(&minus, &transform, &BigInt::zero(), &Vec::new());
                }
                self.pivot_at[lead] = Some(self.pivots.len());
                self.pivots.push(Pivot { image, transform });
                return;
            };
            let pivot = &self.pivots[p];
            let b = pivot.image[0].1.clone();
            if (&a % &b).is_zero() {
                let q = -(&a / &b);
                let one = BigInt::one();
                image = combine(&one, &image, &q, &pivot.image);
                transform = combine(&one, &transform, &q, &pivot.transform);
                continue;
            }
            // g = x·a + y·b; the pair (v, p) becomes (x·v + y·p, (b/g)·v - (a/g)·p).
            let egcd = a.extended_gcd(&b);
            let (g, x, y) = (egcd.gcd, egcd.x, egcd.y);
            let (bg, ag) = (&b / &g, -(&a / &g));
            let new_image = combine(&x, &image, &y, &pivot.image);
            let new_transform = combine(&x, &transform, &y, &pivot.transform);
            let rest_image = combine(&bg, &image, &ag, &pivot.image);
            let rest_transform = combine(&bg, &transform, &ag, &pivot.transform);
            debug_assert!(new_image[0].0 == lead && new_image[0].1.is_positive());
            self.pivots[p] = Pivot { image: new_image, transform: new_transform };
            image = rest_image;
            transform = rest_transform;
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// ℤ-basis of `{x : Mx = 0}`, as dense vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        self.kernel.iter().map(|v| dense_from_sparse(v, self.cols)).collect()
    }

    pub fn kernel_sparse(&self) -> &[SparseVec] {
        &self.kernel
    }

    /// Some `x` with `Mx = b`, or `None` when `b ∉ im(M)`.
    pub fn solve(&self, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        let mut residual = sparse_from_dense(b);
        let mut x: SparseVec = Vec::new();
        let one = BigInt::one();
        while let Some((lead, a)) = residual.first().cloned() {
            let Some(p) = self.pivot_at[lead] else {
                return Ok(None);
            };
            let pivot = &self.pivots[p];
            let (q, r) = a.div_rem(&pivot.image[0].1);
            if !r.is_zero() {
                return Ok(None);
            }
            residual = combine(&one, &residual, &-&q, &pivot.image);
            x = combine(&one, &x, &q, &pivot.transform);
        }
        Ok(Some(dense_from_sparse(&x, self.cols)))
    }
}

/// ℤ-basis of `ker(M)`; its length is `cols - rank`.
pub fn kernel_basis<M: ColumnMatrix + ?Sized>(m: &M) -> Vec<Vec<BigInt>> {
    ColumnLattice::new(m).kernel_basis()
}

/// Integer solution of `Mx = b` if one exists.
pub fn solve<M: ColumnMatrix + ?Sized>(m: &M, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: b.len() });
    }
    ColumnLattice::new(m).solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&mat(&[vec![1, 1]])), vec![ints(&[-1, 1])]);
        assert!(kernel_basis(&IntMatrix::identity(3)).is_empty());
        let m = mat(&[vec![2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).unwrap().iter().all(Zero::is_zero));
        // primitive: gcd of entries is one, so the kernel index is 1
        let g = k[0].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        assert!(g.is_one());
    }

    #[test]
    fn solve_examples() {
        let m = mat(&[vec![2]]);
        assert_eq!(solve(&m, &ints(&[4])).unwrap(), Some(ints(&[2])));
        assert_eq!(solve(&m, &ints(&[3])).unwrap(), None);
        assert!(solve(&m, &ints(&[1, 2])).is_err());
    }

    #[test]
    fn sparse_dense_conversions() {
        let m = mat(&[vec![0, 2, 0], vec![-1, 0, 3]]);
        let s = SparseMatrix::from_dense(&m);
        assert_eq!(s.nonzeros(), 3);
        assert_eq!(s, m);
        assert_eq!(s.get(1, 2), BigInt::from(3));
        assert_eq!(s.mul_vec(&ints(&[1, 1, 1])).unwrap(), m.mul_vec(&ints(&[1, 1, 1])).unwrap());
        let mut built = SparseMatrix::new(2);
        built.push_column(vec![(1, BigInt::from(-1))]).unwrap();
        built.push_column(vec![(0, BigInt::from(1)), (0, BigInt::from(1))]).unwrap();
        built.push_column(vec![(1, BigInt::from(3)), (0, BigInt::from(0))]).unwrap();
        assert_eq!(built, s);
        assert!(built.push_column(vec![(2, BigInt::one())]).is_err());
    }

    #[test]
    fn combine_merges() {
        let x = vec![(0, BigInt::from(1)), (2, BigInt::from(2))];
        let y = vec![(1, BigInt::from(5)), (2, BigInt::from(1))];
        let z = combine(&BigInt::from(1), &x, &BigInt::from(-2), &y);
        assert_eq!(z, vec![(0, BigInt::from(1)), (1, BigInt::from(-10))]);
    }
}

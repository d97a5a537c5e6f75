//! Exact rational arithmetic and linear algebra over ℚ.
//!
//! Dense matrices go through fraction-free (Bareiss) elimination on a common
//! integer scaling; large sparse matrices use rational row reduction with a
//! sparsest-row pivot rule. Both are exact and deterministic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Arbitrary precision rational number; always reduced, denominator positive.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Dense matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![Q::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        Matrix {
            rows: r,
            cols: c,
            data: rows
                .iter()
                .map(|v| v.iter().map(|&x| q(x)).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if !other.data[k][j].is_zero() {
                        let t = &self.data[i][k] * &other.data[k][j];
                        out.data[i][j] += t;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Scales every row to integers (row scaling does not change rank or kernel).
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.data
            .iter()
            .map(|row| {
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| (x * Q::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect()
    }

    /// Bareiss elimination. Returns the echelon integer matrix and pivot columns.
    fn bareiss(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut a = self.integer_rows();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    a[i][j] = v / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (a, pivots) = self.bareiss();
        let mut m = Matrix::zeros(pivots.len(), self.cols);
        for (i, row) in a.iter().take(pivots.len()).enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.data[i][j] = Q::from_integer(x.clone());
            }
        }
        for i in (0..pivots.len()).rev() {
            let pc = pivots[i];
            let inv = m.data[i][pc].recip();
            for j in 0..self.cols {
                m.data[i][j] *= &inv;
            }
            for k in 0..i {
                let f = m.data[k][pc].clone();
                if !f.is_zero() {
                    for j in 0..self.cols {
                        let t = &f * &m.data[i][j];
                        m.data[k][j] -= t;
                    }
                }
            }
        }
        (m, pivots)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.data {
            let cells: Vec<String> = row.iter().map(fmt_q).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Basis of the right kernel, one vector per free column, from the RREF.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Q>> {
    let (r, pivots) = m.rref();
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); m.cols];
        v[free] = Q::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -r.data[i][free].clone();
        }
        out.push(v);
    }
    out
}

/// Sparse matrix stored as column-indexed rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BTreeMap<usize, Q>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: vec![BTreeMap::new(); rows],
        }
    }

    pub fn add(&mut self, r: usize, c: usize, v: Q) {
        let e = self.entries[r].entry(c).or_insert_with(Q::zero);
        *e += v;
        if e.is_zero() {
            self.entries[r].remove(&c);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.entries[r].get(&c).cloned().unwrap_or_else(Q::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(BTreeMap::len).sum()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (&j, v) in row {
                m.data[i][j] = v.clone();
            }
        }
        m
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut s = SparseMatrix::new(m.rows, m.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                if !m.data[i][j].is_zero() {
                    s.entries[i].insert(j, m.data[i][j].clone());
                }
            }
        }
        s
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for (i, row) in self.entries.iter().enumerate() {
            let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
            for (&k, a) in row {
                for (&j, b) in &other.entries[k] {
                    *acc.entry(j).or_insert_with(Q::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.entries[i] = acc;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BTreeMap::is_empty)
    }

    /// Exact rank. Dense Bareiss below 64×64, sparse elimination above.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if self.rows <= 64 && self.cols <= 64 {
            return self.to_dense().rank();
        }
        sparse_rank(
            self.entries
                .iter()
                .filter(|r| !r.is_empty())
                .cloned()
                .collect(),
        )
    }
}

/// Rank by sparse elimination: pivot on the sparsest remaining row, eliminate its
/// leading column from every other row holding that column.
fn sparse_rank(mut rows: Vec<BTreeMap<usize, Q>>) -> usize {
    let mut rank = 0;
    // column -> set of row indices containing it
    let mut col_rows: BTreeMap<usize, std::collections::BTreeSet<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        for &c in r.keys() {
            col_rows.entry(c).or_default().insert(i);
        }
    }
    let mut alive: std::collections::BTreeSet<(usize, usize)> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| (r.len(), i))
        .collect();
    while let Some(&(len, p)) = alive.iter().next() {
        alive.remove(&(len, p));
        let prow = std::mem::take(&mut rows[p]);
        for &c in prow.keys() {
            if let Some(s) = col_rows.get_mut(&c) {
                s.remove(&p);
            }
        }
        if prow.is_empty() {
            continue;
        }
        rank += 1;
        // choose pivot column with fewest other rows
        let (pc, pv) = prow
            .iter()
            .min_by_key(|(c, v)| {
                (
                    col_rows.get(c).map_or(0, |s| s.len()),
                    v.numer().abs().bits() + v.denom().bits(),
                )
            })
            .map(|(c, v)| (*c, v.clone()))
            .unwrap();
        let targets: Vec<usize> = col_rows
            .get(&pc)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for t in targets {
            let f = &rows[t][&pc] / &pv;
            alive.remove(&(rows[t].len(), t));
            for (&c, v) in &prow {
                let e = rows[t].entry(c).or_insert_with(Q::zero);
                *e -= &f * v;
                if e.is_zero() {
                    rows[t].remove(&c);
                    if let Some(s) = col_rows.get_mut(&c) {
                        s.remove(&t);
                    }
                } else {
                    col_rows.entry(c).or_default().insert(t);
                }
            }
            if !rows[t].is_empty() {
                alive.insert((rows[t].len(), t));
            }
        }
    }
    rank
}

/// Finite chain complex with degree −1 differentials.
///
/// `diff[k]` maps degree k to degree k−1: rows index the degree k−1 basis,
/// columns the degree k basis. Missing degrees are zero.
#[derive(Clone, Debug, Default)]
pub struct GradedComplex {
    pub basis: BTreeMap<i64, Vec<String>>,
    pub diff: BTreeMap<i64, SparseMatrix>,
}

impl GradedComplex {
    pub fn dim(&self, k: i64) -> usize {
        self.basis.get(&k).map_or(0, Vec::len)
    }

    fn d(&self, k: i64) -> SparseMatrix {
        match self.diff.get(&k) {
            Some(m) => m.clone(),
            None => SparseMatrix::new(self.dim(k - 1), self.dim(k)),
        }
    }

    fn rank_d(&self, k: i64) -> usize {
        self.diff.get(&k).map_or(0, SparseMatrix::rank)
    }

    /// Checks d_{k−1} ∘ d_k = 0 for the given k.
    pub fn check_square_zero(&self, k: i64) -> Result<(), Error> {
        let a = self.d(k - 1);
        let b = self.d(k);
        if a.cols != b.rows {
            return Err(Error::Structure(format!(
                "differential shape mismatch at degree {k}"
            )));
        }
        if !a.mul(&b).is_zero() {
            return Err(Error::Structure(format!("d² ≠ 0 starting at degree {k}")));
        }
        Ok(())
    }

    pub fn homology_dims(
        &self,
        degrees: std::ops::RangeInclusive<i64>,
    ) -> Result<BTreeMap<i64, usize>, Error> {
        for k in *degrees.start()..=*degrees.end() + 1 {
            self.check_square_zero(k)?;
        }
        let mut out = BTreeMap::new();
        for k in degrees {
            let dim = self.dim(k);
            let z = dim - self.rank_d(k);
            out.insert(k, z - self.rank_d(k + 1));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&Matrix::identity(2)).is_empty());
        assert_eq!(kernel_basis(&Matrix::zeros(2, 3)).len(), 3);
        let k = kernel_basis(&Matrix::from_i64(&[vec![1, 2], vec![2, 4]]));
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] / &k[0][1], q(-2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(fmt_q(&qr(-3, 6)), "-1/2");
        assert_eq!(parse_q("-1/2").unwrap(), qr(-1, 2));
        assert_eq!(parse_q("7").unwrap(), q(7));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn triangle_boundary_homology() {
        // vertices 0,1,2 and edges 01, 02, 12
        let mut c = GradedComplex::default();
        c.basis.insert(0, vec!["0".into(), "1".into(), "2".into()]);
        c.basis
            .insert(1, vec!["01".into(), "02".into(), "12".into()]);
        let mut d = SparseMatrix::new(3, 3);
        for (e, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            d.add(b, e, q(1));
            d.add(a, e, q(-1));
        }
        c.diff.insert(1, d);
        let h = c.homology_dims(0..=1).unwrap();
        assert_eq!(h[&0], 1);
        assert_eq!(h[&1], 1);
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let mut s = SparseMatrix::new(70, 70);
        for i in 0..70 {
            s.add(i, i, q(1));
            s.add(i, (i + 1) % 70, q(-1));
        }
        // cyclic difference operator has rank n−1
        assert_eq!(s.rank(), 69);
        assert_eq!(s.to_dense().rank(), 69);
    }
}

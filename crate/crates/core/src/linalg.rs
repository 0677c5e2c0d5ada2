//! Exact rational matrices and integer lattices.
//!
//! Everything in the combinatorial layer runs on `Ratio<i128>`; ranks are at
//! most 8 so dense Gauss-Jordan elimination is all we need.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// Render a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int =
        |t: &str| t.trim().parse::<i128>().map_err(|_| Error::Parse(format!("not a rational number: `{s}`")));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(parse_int(n)?, d))
        }
        None => Ok(q(parse_int(s)?)),
    }
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn vadd(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(a: &[Q], s: Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

pub fn vneg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

pub fn vzero(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

pub fn vto_f64(a: &[Q]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows).map(|i| self.row(i).iter().map(fmt_q).collect()).collect();
        write!(f, "{rows:?}")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_int_rows(rows: &[Vec<i128>]) -> Self {
        let rows: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Q> {
        self.row(i).to_vec()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Q::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += *vi * self[(i, j)];
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| *a * *b).sum()).collect()
    }

    pub fn scale(&self, s: Q) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let pivot = a[(c, c)];
            det *= pivot;
            for r in c + 1..n {
                let f = a[(r, c)] / pivot;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = a[(c, k)];
                    a[(r, k)] -= f * v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let pivot = a[(c, c)];
            for k in 0..n {
                a[(c, k)] /= pivot;
                inv[(c, k)] /= pivot;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let av = a[(c, k)];
                    let iv = inv[(c, k)];
                    a[(r, k)] -= f * av;
                    inv[(r, k)] -= f * iv;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Integer entries, if every entry is integral.
    pub fn to_integer_rows(&self) -> Option<Vec<Vec<i128>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.is_integer().then(|| x.to_integer())).collect::<Option<Vec<_>>>())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-style Hermite normal form: upper triangular, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m).filter(|&i| a[i][col] != 0).min_by_key(|&i| a[i][col].abs());
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..m {
                if a[i][col] == 0 {
                    continue;
                }
                let f = a[i][col] / a[r][col];
                for k in col..n {
                    let v = a[r][k];
                    a[i][k] -= f * v;
                }
                if a[i][col] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[r][col] == 0 {
            continue;
        }
        if a[r][col] < 0 {
            for k in col..n {
                a[r][k] = -a[r][k];
            }
        }
        for i in 0..r {
            let f = Integer::div_floor(&a[i][col], &a[r][col]);
            if f != 0 {
                for k in col..n {
                    let v = a[r][k];
                    a[i][k] -= f * v;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// A full-rank lattice given by generator rows in fundamental-weight
/// coordinates.
#[derive(Clone, Debug)]
pub struct Lattice {
    name: String,
    basis: QMatrix,
    inv: QMatrix,
}

impl Lattice {
    pub fn new(name: impl Into<String>, basis: QMatrix) -> Result<Self> {
        let name = name.into();
        let inv =
            basis.inverse().ok_or_else(|| Error::Inconsistent(format!("lattice {name} has degenerate generators")))?;
        Ok(Self { name, basis, inv })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn generator(&self, i: usize) -> Vec<Q> {
        self.basis.row_vec(i)
    }

    pub fn scaled(&self, s: i128) -> Lattice {
        let basis = self.basis.scale(q(s));
        let inv = self.inv.scale(qr(1, s));
        Lattice { name: format!("{s}{}", self.name), basis, inv }
    }

    /// Coordinates of `v` with respect to the generators.
    pub fn coords(&self, v: &[Q]) -> Vec<Q> {
        self.inv.left_apply(v)
    }

    pub fn integer_coords(&self, v: &[Q]) -> Option<Vec<i128>> {
        self.coords(v).iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.integer_coords(v).is_some()
    }

    pub fn point(&self, coords: &[i128]) -> Vec<Q> {
        let c: Vec<Q> = coords.iter().map(|&x| q(x)).collect();
        self.basis.left_apply(&c)
    }

    pub fn require(&self, v: &[Q], what: &str) -> Result<Vec<i128>> {
        self.integer_coords(v).ok_or_else(|| Error::NotInLattice { what: what.to_string(), lattice: self.name.clone() })
    }

    /// Dual lattice `{v : (v, L) ⊂ Z}` for the form with matrix `gram`.
    pub fn dual(&self, gram: &QMatrix) -> Result<Lattice> {
        let gb = gram.mul(&self.basis.transpose());
        let d = gb.inverse().ok_or_else(|| Error::Inconsistent(format!("form is degenerate on {}", self.name)))?;
        Lattice::new(format!("{}*", self.name), d)
    }

    /// Absolute determinant of the generator matrix, relative to the weight
    /// lattice.
    pub fn covolume(&self) -> Q {
        self.basis.det().abs()
    }

    /// Generator matrix of `sub` expressed in this lattice's coordinates.
    fn relative_basis(&self, sub: &Lattice) -> Result<Vec<Vec<i128>>> {
        sub.basis
            .mul(&self.inv)
            .to_integer_rows()
            .ok_or_else(|| Error::NotInLattice { what: format!("lattice {}", sub.name), lattice: self.name.clone() })
    }

    /// `|self / sub|` for a sublattice `sub`.
    pub fn index_of(&self, sub: &Lattice) -> Result<u128> {
        self.relative_basis(sub)?;
        let ratio = sub.covolume() / self.covolume();
        if !ratio.is_integer() {
            return Err(Error::Inconsistent(format!(
                "non-integral index |{}/{}| = {}",
                self.name,
                sub.name,
                fmt_q(&ratio)
            )));
        }
        Ok(ratio.to_integer() as u128)
    }

    /// A complete, deterministic system of representatives of `self / sub`.
    pub fn coset_reps(&self, sub: &Lattice) -> Result<Vec<Vec<Q>>> {
        let h = hermite_normal_form(&self.relative_basis(sub)?);
        let diag: Vec<i128> = (0..h.len()).map(|i| h[i][i]).collect();
        let mut out = Vec::new();
        let mut c = vec![0i128; diag.len()];
        loop {
            out.push(self.point(&c));
            let mut i = diag.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                c[i] += 1;
                if c[i] < diag[i] {
                    break;
                }
                c[i] = 0;
            }
        }
    }

    /// Canonical representative of `v + sub` inside the box used by
    /// [`Lattice::coset_reps`].
    pub fn reduce_mod(&self, v: &[Q], sub: &Lattice) -> Result<Vec<Q>> {
        let h = hermite_normal_form(&self.relative_basis(sub)?);
        let mut c = self.require(v, "vector to reduce")?;
        for (i, row) in h.iter().enumerate() {
            let f = Integer::div_floor(&c[i], &row[i]);
            if f != 0 {
                for (cj, rj) in c.iter_mut().zip(row) {
                    *cj -= f * rj;
                }
            }
        }
        Ok(self.point(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let m = QMatrix::from_int_rows(&[vec![2, -1], vec![-1, 2]]);
        assert_eq!(m.det(), q(3));
        let inv = m.inverse().unwrap();
        assert_eq!(inv, QMatrix::from_rows(&[vec![qr(2, 3), qr(1, 3)], vec![qr(1, 3), qr(2, 3)]]));
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = QMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.det(), q(0));
    }

    #[test]
    fn hnf_is_upper_triangular() {
        let h = hermite_normal_form(&[vec![4, 6], vec![2, 8]]);
        assert_eq!(h.len(), 2);
        assert_eq!(h[1][0], 0);
        assert!(h[0][0] > 0 && h[1][1] > 0);
        assert_eq!(h[0][0] * h[1][1], 20);
        assert!(h[0][1] >= 0 && h[0][1] < h[1][1]);
    }

    #[test]
    fn coset_reps_cover_the_quotient() {
        let z2 = Lattice::new("Z2", QMatrix::identity(2)).unwrap();
        let sub = Lattice::new("L", QMatrix::from_int_rows(&[vec![2, 1], vec![0, 3]])).unwrap();
        assert_eq!(z2.index_of(&sub).unwrap(), 6);
        let reps = z2.coset_reps(&sub).unwrap();
        assert_eq!(reps.len(), 6);
        for (i, a) in reps.iter().enumerate() {
            for b in &reps[i + 1..] {
                let d: Vec<Q> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                assert!(!sub.contains(&d));
            }
            assert_eq!(&z2.reduce_mod(a, &sub).unwrap(), a);
        }
        let far = vec![q(17), q(-5)];
        let r = z2.reduce_mod(&far, &sub).unwrap();
        assert!(reps.contains(&r));
        let d: Vec<Q> = far.iter().zip(&r).map(|(x, y)| x - y).collect();
        assert!(sub.contains(&d));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("1/2").unwrap(), qr(1, 2));
        assert_eq!(parse_q(" -3 ").unwrap(), q(-3));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&qr(-6, 4)), "-3/2");
    }
}

//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rat;

/// A list of linearly independent vectors in a fixed ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Rat>>,
}

impl SubspaceBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct RankNullspace {
    pub rank: usize,
    pub nullspace: SubspaceBasis,
}

/// Rank and a nullspace basis of an exact rational matrix given by rows.
///
/// Rows are cleared of denominators and reduced with Bareiss' fraction-free
/// elimination; the nullspace is read off the resulting echelon form.
pub fn rank_and_nullspace(rows: &[Vec<Rat>], ncols: usize) -> RankNullspace {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    for r in &m {
        assert_eq!(r.len(), ncols, "ragged matrix");
    }
    let pivots = bareiss_echelon(&mut m, ncols);
    let rank = pivots.len();

    // Back-substitute on the echelon rows to get RREF over Q.
    let mut rref: Vec<Vec<Rat>> = m[..rank]
        .iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let inv = rref[i][pc].recip();
        for x in rref[i].iter_mut() {
            *x *= &inv;
        }
        for k in 0..i {
            let factor = rref[k][pc].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..ncols {
                let v = &rref[i][c] * &factor;
                rref[k][c] -= v;
            }
        }
    }

    let is_pivot: Vec<bool> = (0..ncols).map(|c| pivots.contains(&c)).collect();
    let mut vectors = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rref[i][free].clone();
        }
        vectors.push(v);
    }
    RankNullspace {
        rank,
        nullspace: SubspaceBasis {
            ambient_dim: ncols,
            vectors,
        },
    }
}

/// Determinant of a square matrix, by elimination over Q.
pub fn determinant(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    det
}

/// Exact rank only.
pub fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    bareiss_echelon(&mut m, ncols).len()
}

fn clear_denominators(row: &[Rat]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// In-place Bareiss elimination to row echelon form. Returns pivot columns.
fn bareiss_echelon(m: &mut [Vec<BigInt>], ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        // smallest nonzero entry keeps intermediate sizes down
        let Some(p) = (row..nrows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].abs())
        else {
            continue;
        };
        m.swap(row, p);
        for r in row + 1..nrows {
            for c in col + 1..ncols {
                let v = (&m[row][col] * &m[r][c] - &m[r][col] * &m[row][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Incrementally built echelon form used to pick independent vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot column of each stored row, in insertion order.
    pub fn pivot_positions(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    fn reduce(&self, mut v: Vec<Rat>) -> Vec<Rat> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the stored vectors; returns whether
    /// it was added.
    pub fn insert(&mut self, v: Vec<Rat>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((p, v));
        true
    }
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn invert(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let v = &m[col][c] * &f;
                m[r][c] -= v;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Fraction-free Gauss–Jordan on an integer matrix. Returns `(X, D)` with
/// `A·X = D·I` and `D = ±det A`, or `None` if `A` is singular.
pub fn integer_inverse(a: &[Vec<BigInt>]) -> Option<(Vec<Vec<BigInt>>, BigInt)> {
    let n = a.len();
    if n == 0 {
        return Some((Vec::new(), BigInt::one()));
    }
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, p);
        let pivot_row = m[k].clone();
        let akk = pivot_row[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let aik = row[k].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                let v = &akk * &*x - &aik * y;
                *x = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = akk;
    }
    Some((m.into_iter().map(|r| r[n..].to_vec()).collect(), prev))
}

/// Primes below `2⁶³` for [`ModEchelon`].
pub const PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847, 9_223_372_036_854_775_783];

/// Row echelon form over `Z/p` for a prime `p < 2⁶³`, used to pick
/// candidate pivots before exact work.
#[derive(Clone, Debug)]
pub struct ModEchelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModEchelon {
    pub fn new(p: u64) -> Self {
        ModEchelon { p, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_positions(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn reduce(&self, x: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = x.mod_floor(&p);
        r.iter_u64_digits().next().unwrap_or(0)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: u64) -> u64 {
        // Fermat
        let (mut base, mut e, mut acc) = (a, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Insert an integer vector; `true` if it was independent mod `p`.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        let mut v: Vec<u64> = v.iter().map(|x| self.reduce(x)).collect();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                let t = self.mul(c, *y);
                *x = if *x >= t { *x - t } else { *x + self.p - t };
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.inv(v[piv]);
        for x in v.iter_mut() {
            *x = self.mul(*x, inv);
        }
        self.rows.push((piv, v));
        true
    }
}

/// Matrix–vector product over Q.
pub fn mat_vec(a: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_inverse_scales_identity() {
        let a: Vec<Vec<BigInt>> = [[2, 1, 0], [0, 3, 4], [5, 0, 0]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let (x, d) = integer_inverse(&a).unwrap();
        assert_eq!(d.abs(), BigInt::from(20));
        for i in 0..3 {
            for j in 0..3 {
                let s: BigInt = (0..3).map(|k| &a[i][k] * &x[k][j]).sum();
                assert_eq!(s, if i == j { d.clone() } else { BigInt::zero() });
            }
        }
        let sing = vec![vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(2), BigInt::from(4)]];
        assert!(integer_inverse(&sing).is_none());
    }

    #[test]
    fn mod_echelon_rank() {
        let rows: Vec<Vec<BigInt>> = [[1, 2, 3], [2, 4, 6], [0, 1, -1], [1, 3, 2]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let mut e = ModEchelon::new(PRIMES[0]);
        let kept: Vec<bool> = rows.iter().map(|r| e.insert(r)).collect();
        assert_eq!(kept, vec![true, false, true, false]);
        assert_eq!(e.pivot_positions(), vec![0, 1]);
    }

    fn ri(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| ri(x)).collect()).collect()
    }

    #[test]
    fn identity_full_rank() {
        let m = mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let rn = rank_and_nullspace(&m, 3);
        assert_eq!(rn.rank, 3);
        assert!(rn.nullspace.is_empty());
    }

    #[test]
    fn zero_matrix() {
        let m = mat(&[&[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let rn = rank_and_nullspace(&m, 4);
        assert_eq!(rn.rank, 0);
        assert_eq!(rn.nullspace.len(), 4);
    }

    #[test]
    fn vandermonde_nodes_012() {
        // det = (1-0)(2-0)(2-1) = 2
        let m = mat(&[&[1, 0, 0], &[1, 1, 1], &[1, 2, 4]]);
        assert_eq!(rank(&m, 3), 3);
    }

    #[test]
    fn nullspace_annihilates() {
        let m: Vec<Vec<Rat>> = vec![
            vec![ri(1), Rat::new(1.into(), 2.into()), ri(3), ri(0)],
            vec![ri(2), ri(1), ri(6), ri(0)],
            vec![ri(0), ri(1), ri(-1), ri(5)],
        ];
        let rn = rank_and_nullspace(&m, 4);
        assert_eq!(rn.rank, 2);
        assert_eq!(rn.nullspace.len(), 2);
        for v in &rn.nullspace.vectors {
            assert!(mat_vec(&m, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn echelon_detects_dependence() {
        let mut e = Echelon::new();
        assert!(e.insert(vec![ri(1), ri(2), ri(3)]));
        assert!(e.insert(vec![ri(0), ri(1), ri(1)]));
        assert!(!e.insert(vec![ri(2), ri(5), ri(7)]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&mat(&[&[2, 1], &[7, 4]])), ri(1));
        assert_eq!(determinant(&mat(&[&[0, 1], &[1, 0]])), ri(-1));
        let v = mat(&[&[1, 0, 0], &[1, 1, 1], &[1, 2, 4]]);
        assert_eq!(determinant(&v), ri(2));
        assert_eq!(determinant(&[]), ri(1));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = mat(&[&[2, 1], &[7, 4]]);
        let inv = invert(&m).unwrap();
        assert_eq!(inv, mat(&[&[4, -1], &[-7, 2]]));
        assert!(invert(&mat(&[&[1, 2], &[2, 4]])).is_none());
    }
}

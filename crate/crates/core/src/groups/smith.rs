use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Presentation;

type Matrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `u * a * v = d` with `d` diagonal, each diagonal entry dividing the next,
/// and `u`, `v` unimodular; the inverses are kept alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub d: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub u_inv: Matrix,
    pub v_inv: Matrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.len().min(self.d.first().map_or(0, |r| r.len()))).map(|i| self.d[i][i].clone()).collect()
    }
}

struct Work {
    a: Matrix,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    // row_i += q * row_t
    fn add_row(&mut self, i: usize, t: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[t].clone();
            for (x, s) in m[i].iter_mut().zip(src) {
                *x += q * s;
            }
        }
        for row in &mut self.u_inv {
            let v = &row[i] * q;
            row[t] -= v;
        }
    }

    // col_j += q * col_t
    fn add_col(&mut self, j: usize, t: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                let v = &row[t] * q;
                row[j] += v;
            }
        }
        let src = self.v_inv[j].clone();
        for (x, s) in self.v_inv[t].iter_mut().zip(src) {
            *x -= q * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -x.clone();
        }
        for row in &mut self.u_inv {
            row[i] = -row[i].clone();
        }
    }
}

pub fn smith_normal_form(a: &[Vec<BigInt>]) -> SmithForm {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut w = Work { a: a.to_vec(), u: identity(m), u_inv: identity(m), v: identity(n), v_inv: identity(n) };
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the remaining block becomes the pivot
            let mut piv: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !w.a[i][j].is_zero() && piv.is_none_or(|(pi, pj)| w.a[i][j].abs() < w.a[pi][pj].abs()) {
                        piv = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = piv else { break };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let mut dirty = false;
            for i in t + 1..m {
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                if !q.is_zero() {
                    w.add_row(i, t, &-q);
                }
                dirty |= !w.a[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                if !q.is_zero() {
                    w.add_col(j, t, &-q);
                }
                dirty |= !w.a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !w.a[i][j].is_multiple_of(&w.a[t][t])));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    SmithForm { d: w.a, u: w.u, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv }
}

/// Invariant factors of the abelianization: entries 1 dropped, a 0 for
/// each free generator.
pub fn abelianization(pres: &Presentation) -> Vec<BigInt> {
    let rank = pres.rank();
    let rows: Matrix = pres
        .relators()
        .iter()
        .map(|r| r.exponent_sums().into_iter().map(BigInt::from).collect())
        .collect();
    let diag = if rows.is_empty() { Vec::new() } else { smith_normal_form(&rows).diagonal() };
    let mut out: Vec<BigInt> = diag.iter().filter(|x| !x.is_zero() && !x.is_one()).cloned().collect();
    let nonzero = diag.iter().filter(|x| !x.is_zero()).count();
    out.extend(std::iter::repeat_n(BigInt::zero(), rank - nonzero));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(a: &Matrix) {
        let s = smith_normal_form(a);
        assert_eq!(matmul(&matmul(&s.u, a), &s.v), s.d);
        assert_eq!(matmul(&matmul(&s.u_inv, &s.d), &s.v_inv), *a);
        assert_eq!(determinant(&s.u).abs(), BigInt::one());
        assert_eq!(determinant(&s.v).abs(), BigInt::one());
        assert_eq!(matmul(&s.u, &s.u_inv), identity(a.len()));
        for (i, row) in s.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!(i == j || x.is_zero());
            }
        }
        let diag = s.diagonal();
        for k in 1..diag.len() {
            assert!(diag[k - 1].is_zero() && diag[k].is_zero() || !diag[k - 1].is_zero() && diag[k].is_multiple_of(&diag[k - 1]));
        }
    }

    #[test]
    fn small_examples() {
        let s = smith_normal_form(&mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        let id = mat(&[&[1, 0], &[0, 1]]);
        assert_eq!(smith_normal_form(&id).d, id);
        let s = smith_normal_form(&mat(&[&[1, -1], &[3, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        check(&mat(&[&[0, 0, 0], &[0, 4, 6]]));
        check(&mat(&[&[]]));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&mat(&[&[2, 1], &[7, 4]])), BigInt::from(1));
        assert_eq!(determinant(&mat(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]])), BigInt::from(-3));
        assert_eq!(determinant(&mat(&[&[1, 2], &[2, 4]])), BigInt::from(0));
    }

    #[test]
    fn abelianizations() {
        let ab = |s: &str| abelianization(&Presentation::parse(s).unwrap());
        assert_eq!(ab("< a b | a^2, b^3 >"), vec![BigInt::from(6)]);
        assert_eq!(ab("< a b c | >"), vec![BigInt::zero(); 3]);
        assert_eq!(ab("< a b | a b a b^-1 a^-1 b^-1, (b a)^3 >"), vec![BigInt::from(6)]);
        assert_eq!(ab("< a b | a^4, b^6 >"), vec![BigInt::from(2), BigInt::from(12)]);
    }

    proptest! {
        #[test]
        fn smith_properties(rows in 1usize..=4, cols in 1usize..=4, seed in prop::collection::vec(-20i64..=20, 16)) {
            let a: Matrix = (0..rows).map(|i| (0..cols).map(|j| BigInt::from(seed[i * 4 + j])).collect()).collect();
            check(&a);
        }
    }
}

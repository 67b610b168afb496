use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{PolyError, SparsePolynomial};

/// Parameters of the curve family `x^(aN) y^(bN) + (x^N + y^N + x^m y^m z)^d`
/// with `N = 2m + 1` and `d = a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CurveParams {
    n: u32,
    a: u32,
    b: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(rename = "N")]
    n: u32,
    a: u32,
    b: u32,
}

impl TryFrom<RawParams> for CurveParams {
    type Error = PolyError;
    fn try_from(r: RawParams) -> Result<Self, PolyError> {
        CurveParams::new(r.n, r.a, r.b)
    }
}

impl From<CurveParams> for RawParams {
    fn from(p: CurveParams) -> Self {
        RawParams { n: p.n, a: p.a, b: p.b }
    }
}

impl CurveParams {
    pub fn new(n: u32, a: u32, b: u32) -> Result<Self, PolyError> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(PolyError::InvalidParams(format!("N = {n} must be odd and at least 3")));
        }
        if a == 0 || b == 0 {
            return Err(PolyError::InvalidParams("a and b must be positive".into()));
        }
        if a.gcd(&b) != 1 {
            return Err(PolyError::InvalidParams(format!("gcd(a, b) = gcd({a}, {b}) != 1")));
        }
        let d = a + b;
        if n.gcd(&d) != 1 {
            return Err(PolyError::InvalidParams(format!("gcd(N, d) = gcd({n}, {d}) != 1")));
        }
        Ok(CurveParams { n, a, b })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn m(&self) -> u32 {
        (self.n - 1) / 2
    }

    pub fn d(&self) -> u32 {
        self.a + self.b
    }

    pub fn degree(&self) -> u32 {
        self.d() * self.n
    }
}

/// Expanded homogeneous equation of the curve in variables `x, y, z`.
pub fn build_curve(params: &CurveParams) -> SparsePolynomial {
    let vars = ["x", "y", "z"];
    let x = SparsePolynomial::var(&vars, 0);
    let y = SparsePolynomial::var(&vars, 1);
    let z = SparsePolynomial::var(&vars, 2);
    let (n, m) = (params.n(), params.m());
    let inner = &(&x.pow(n) + &y.pow(n)) + &(&(&x.pow(m) * &y.pow(m)) * &z);
    let lead = &x.pow(params.a() * n) * &y.pow(params.b() * n);
    &lead + &inner.pow(params.d())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::collections::HashMap;

    // Independent expansion: sum over multinomial indices of (x^N + y^N + x^m y^m z)^d.
    fn multinomial_oracle(n: u32, a: u32, b: u32) -> HashMap<Vec<u32>, BigInt> {
        let (m, d) = ((n - 1) / 2, a + b);
        let fact = |k: u32| (1..=k).fold(BigInt::from(1), |acc, i| acc * i);
        let mut out: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for i in 0..=d {
            for j in 0..=d - i {
                let k = d - i - j;
                let c = fact(d) / (fact(i) * fact(j) * fact(k));
                *out.entry(vec![n * i + m * k, n * j + m * k, k]).or_default() += c;
            }
        }
        *out.entry(vec![a * n, b * n, 0]).or_default() += 1;
        out.retain(|_, c| *c != BigInt::from(0));
        out
    }

    fn as_map(p: &SparsePolynomial) -> HashMap<Vec<u32>, BigInt> {
        p.terms().map(|(e, c)| (e.clone(), c.to_integer())).collect()
    }

    #[test]
    fn smallest_member_support() {
        let f = build_curve(&CurveParams::new(3, 1, 1).unwrap());
        let support: Vec<Vec<u32>> = f.support().cloned().collect();
        let mut expected = vec![
            vec![3, 3, 0],
            vec![6, 0, 0],
            vec![0, 6, 0],
            vec![2, 2, 2],
            vec![4, 1, 1],
            vec![1, 4, 1],
        ];
        expected.sort();
        assert_eq!(support, expected);
        assert_eq!(f.coeff(&[3, 3, 0]), rat(3));
        assert!(f.is_homogeneous());
        assert_eq!(f.total_degree(), Some(6));
    }

    #[test]
    fn matches_multinomial_expansion() {
        for (n, a, b) in [(5, 1, 2), (3, 1, 1), (7, 2, 3), (5, 3, 1)] {
            let f = build_curve(&CurveParams::new(n, a, b).unwrap());
            assert_eq!(as_map(&f), multinomial_oracle(n, a, b), "N={n} a={a} b={b}");
            assert!(f.is_homogeneous());
            assert_eq!(f.total_degree(), Some((a + b) * n));
        }
        let f = build_curve(&CurveParams::new(5, 1, 2).unwrap());
        // 1 from x^5 y^10 plus 3 from the multinomial (1,2,0)
        assert_eq!(f.coeff(&[5, 10, 0]), BigRational::from_integer(4.into()));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CurveParams::new(3, 1, 2).is_err()); // gcd(3, 3)
        assert!(CurveParams::new(4, 1, 2).is_err());
        assert!(CurveParams::new(5, 2, 4).is_err());
        assert!(CurveParams::new(5, 0, 1).is_err());
        assert!(CurveParams::new(1, 1, 1).is_err());
        let p = CurveParams::new(5, 1, 2).unwrap();
        assert_eq!((p.m(), p.d(), p.degree()), (2, 3, 15));
    }
}

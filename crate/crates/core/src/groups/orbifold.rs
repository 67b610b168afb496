use num_integer::Integer;
use serde::Serialize;

use super::{GroupError, Presentation};
use crate::braid::FreeWord;
use crate::exactpoly::{rat, SparsePolynomial};

/// Sphere with `punctures` removed points and cone points of the given
/// multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbifoldSpec {
    pub punctures: usize,
    pub cone_points: Vec<u32>,
}

impl OrbifoldSpec {
    pub fn new(punctures: usize, cone_points: Vec<u32>) -> Result<OrbifoldSpec, GroupError> {
        if let Some(&m) = cone_points.iter().find(|&&m| m < 2) {
            return Err(GroupError::BadOrders { p: m, q: m });
        }
        Ok(OrbifoldSpec { punctures, cone_points })
    }
}

/// Generators `u1..u(n+k)`, cone points first; the global relator
/// `u(n+k) ... u1` and `uj^mj` for each cone point.
pub fn orbifold_pi1(spec: &OrbifoldSpec) -> Presentation {
    let n = spec.cone_points.len() + spec.punctures;
    let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    let mut relators = vec![FreeWord::descending_product(n)];
    for (j, &m) in spec.cone_points.iter().enumerate() {
        relators.push(FreeWord::generator(n, j + 1).unwrap().pow(m as i64));
    }
    Presentation::new(names, relators)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PencilFiber {
    pub point: String,
    pub member: String,
    pub multiplicity: u32,
}

/// Members of the pencil `t F_p^q - s F_q^p` over special points of the
/// base, with multiplicities read off from the exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PencilCertificate {
    pub fibers: Vec<PencilFiber>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusPencil {
    pub p: u32,
    pub q: u32,
    pub spec: OrbifoldSpec,
    pub certificate: PencilCertificate,
}

fn member(p: u32, q: u32, s: i64, t: i64) -> SparsePolynomial {
    let vars = ["F_p", "F_q"];
    let a = SparsePolynomial::monomial(&vars, vec![q, 0], rat(t));
    let b = SparsePolynomial::monomial(&vars, vec![0, p], rat(-s));
    SparsePolynomial::from_terms(&vars, a.terms().chain(b.terms()).map(|(e, c)| (e.clone(), c.clone())))
}

/// A single-term member `c F^e` is an `e`-fold fiber; anything else counts once.
fn fiber_multiplicity(f: &SparsePolynomial) -> u32 {
    match f.num_terms() {
        1 => f.support().next().unwrap().iter().fold(0, |g, &e| g.gcd(&e)),
        _ => 1,
    }
}

/// Orbifold base of `[x:y:z] -> [F_p^q : F_q^p]`: the curve `F_p^q + F_q^p = 0`
/// is the fiber over `[1:-1]` and becomes the puncture, the other two
/// special fibers become cone points unless their multiplicity is 1.
pub fn torus_pencil_orbifold(p: u32, q: u32) -> Result<TorusPencil, GroupError> {
    if p == 0 || q == 0 || p.gcd(&q) != 1 {
        return Err(GroupError::NonCoprime { p, q });
    }
    let special = [("[0:1]", 0, 1), ("[1:0]", 1, 0), ("[1:-1]", 1, -1)];
    let fibers: Vec<PencilFiber> = special
        .iter()
        .map(|&(point, s, t)| {
            let f = member(p, q, s, t);
            PencilFiber { point: point.into(), member: f.to_string(), multiplicity: fiber_multiplicity(&f) }
        })
        .collect();
    let cone_points = fibers[..2].iter().map(|f| f.multiplicity).filter(|&m| m > 1).collect();
    Ok(TorusPencil { p, q, spec: OrbifoldSpec { punctures: 1, cone_points }, certificate: PencilCertificate { fibers } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{tietze_simplify, TietzeOptions};

    #[test]
    fn presentation_shape() {
        let spec = OrbifoldSpec::new(1, vec![2, 3]).unwrap();
        assert_eq!(orbifold_pi1(&spec).to_string(), "< u1 u2 u3 | u3 u2 u1, u1^2, u2^3 >");
        assert!(OrbifoldSpec::new(0, vec![1]).is_err());
    }

    #[test]
    fn punctured_spheres_are_free() {
        for k in 1..5 {
            let r = tietze_simplify(&orbifold_pi1(&OrbifoldSpec::new(k, vec![]).unwrap()), &TietzeOptions::default());
            assert_eq!(r.presentation.rank(), k - 1);
            assert!(r.presentation.relators().is_empty());
        }
    }

    #[test]
    fn pencil_multiplicities() {
        let t = torus_pencil_orbifold(2, 3).unwrap();
        assert_eq!(t.spec, OrbifoldSpec { punctures: 1, cone_points: vec![3, 2] });
        let m: Vec<u32> = t.certificate.fibers.iter().map(|f| f.multiplicity).collect();
        assert_eq!(m, vec![3, 2, 1]);
        assert_eq!(torus_pencil_orbifold(1, 4).unwrap().spec.cone_points, vec![4]);
        let c = torus_pencil_orbifold(3, 5).unwrap();
        assert_eq!(c.spec.cone_points, vec![5, 3]);
        assert!(torus_pencil_orbifold(2, 4).is_err());
    }
}

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use zvk_core::exactpoly::{rat, CurveParams, SparsePolynomial};
use zvk_core::newton::{quasi_type, QuasiType, Tangent};
use zvk_core::resolve::*;

fn params(n: u32, a: u32, b: u32) -> CurveParams {
    CurveParams::new(n, a, b).unwrap()
}

fn full() -> ResolveOptions {
    ResolveOptions { stop_at_quasi_type: false, max_steps: 256 }
}

#[test]
fn strict_transform_at_vertical_direction() {
    // x^3 y^2 + (x^3 y + y + x)^2, exceptional y = 0
    let p = params(3, 1, 1);
    let mut chart = LocalChart::new(affine_curve(&p));
    assert_eq!(chart.blow_up(&Tangent::Vertical, "E", 0).unwrap(), 4);
    let xy = ["x", "y"];
    let x = SparsePolynomial::var(&xy, 0);
    let y = SparsePolynomial::var(&xy, 1);
    let inner = &(&(&x.pow(3) * &y) + &y) + &x;
    let expected = &(&x.pow(3) * &y.pow(2)) + &inner.pow(2);
    assert_eq!(chart.equation(), &expected.with_vars(chart.equation().vars()));
    // shift y1 = y + x^m exposes the (d, aN + md) edge
    chart.shift_y(&rat(-1), 1).unwrap();
    assert_eq!(quasi_type(chart.equation()).unwrap(), QuasiType::Conclusive { p: 2, q: 5 });
}

#[test]
fn family_branches_match_hand_iteration() {
    let f = affine_curve(&params(3, 1, 1));
    let r = resolve_branch(&f, &Tangent::Vertical).unwrap();
    assert_eq!(r.mult_sequence, vec![2, 2, 2]);
    assert_eq!(r.char_exponents, vec![2, 7]);
    assert_eq!(r.delta, 3);

    let f = affine_curve(&params(5, 1, 2));
    let inf = resolve_branch(&f, &Tangent::Vertical).unwrap();
    assert_eq!(inf.mult_sequence, vec![6, 3, 3, 3, 2]);
    assert_eq!(inf.delta, 25);
    assert_eq!(inf.char_exponents, vec![6, 9, 14]);
    let zero = resolve_branch(&f, &Tangent::horizontal()).unwrap();
    assert_eq!(zero.mult_sequence, vec![6, 3, 3, 3, 3, 3]);
    assert_eq!(zero.delta, 30);
    assert_eq!(zero.char_exponents, vec![6, 9, 19]);
}

#[test]
fn early_stop_agrees_with_full_blowups() {
    for (n, a, b) in [(3, 1, 1), (5, 1, 2), (5, 2, 1), (7, 1, 1)] {
        let f = affine_curve(&params(n, a, b));
        for dir in [Tangent::Vertical, Tangent::horizontal()] {
            let quick = resolve_branch(&f, &dir).unwrap();
            let slow = resolve_branch_with(&f, &dir, &full()).unwrap();
            assert_eq!(quick.mult_sequence, slow.mult_sequence, "({n},{a},{b}) {dir}");
            assert_eq!(slow.tail_type, None);
            // every measured contact with the newest divisor is the previous multiplicity
            let m = &slow.mult_sequence;
            for (k, c) in slow.exceptional_contacts.iter().enumerate() {
                assert_eq!(*c, m[k]);
            }
        }
    }
}

// (1 - w)^e as a truncated series in w
fn binomial(e: &BigRational, t: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for k in 1..t {
        let prev = out[k - 1].clone();
        let kk = BigRational::from_integer((k as i64).into());
        out.push(-prev * (e - &kk + BigRational::one()) / kk);
    }
    out
}

fn mul(a: &[BigRational], b: &[BigRational], t: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); t];
    for i in 0..t.min(a.len()) {
        for j in 0..(t - i).min(b.len()) {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

fn compose(coeffs: &[BigRational], w: &[BigRational], t: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); t];
    let mut pw = vec![BigRational::zero(); t];
    pw[0] = BigRational::one();
    for c in coeffs {
        for (o, v) in out.iter_mut().zip(&pw) {
            *o += c * v;
        }
        pw = mul(&pw, w, t);
    }
    out
}

// Branch model y = -t^n (1 - t^X), x = -t^(n+d) (1 - t^X) with n = md.
// Rewrites it as y = -s^n and reads the characteristic exponents of x(s).
fn puiseux_char_exponents(n: u32, d: u32, big_x: u32) -> Vec<u32> {
    let t_ord = 40usize;
    let e = BigRational::new((-1).into(), (n as i64).into());
    let binom = binomial(&e, t_ord);
    // t = s * (1 - t^X)^(-1/n), iterate to a fixed point
    let mut tser = vec![BigRational::zero(); t_ord];
    tser[1] = BigRational::one();
    for _ in 0..t_ord {
        let mut tx = vec![BigRational::zero(); t_ord];
        tx[0] = BigRational::one();
        for _ in 0..big_x {
            tx = mul(&tx, &tser, t_ord);
        }
        let factor = compose(&binom, &tx, t_ord);
        let mut s = vec![BigRational::zero(); t_ord];
        s[1] = BigRational::one();
        tser = mul(&s, &factor, t_ord);
    }
    let mut xs = vec![BigRational::zero(); t_ord];
    xs[0] = BigRational::one();
    for _ in 0..n + d {
        xs = mul(&xs, &tser, t_ord);
    }
    let mut tx = vec![BigRational::zero(); t_ord];
    tx[0] = BigRational::one();
    for _ in 0..big_x {
        tx = mul(&tx, &tser, t_ord);
    }
    let one_minus: Vec<BigRational> = tx.iter().enumerate().map(|(k, c)| if k == 0 { BigRational::one() - c } else { -c.clone() }).collect();
    let xs = mul(&xs, &one_minus, t_ord);
    let mut exps = vec![n];
    let mut g = n;
    for (k, c) in xs.iter().enumerate() {
        if !c.is_zero() && !(k as u32).is_multiple_of(g) {
            exps.push(k as u32);
            g = g.gcd(&(k as u32));
            if g == 1 {
                break;
            }
        }
    }
    assert_eq!(g, 1, "truncation too short");
    exps
}

#[test]
fn char_exponents_match_puiseux_oracle() {
    for (nn, a, b) in [(3, 1, 1), (5, 1, 2), (5, 2, 1)] {
        let p = params(nn, a, b);
        let f = affine_curve(&p);
        let audit = audit_family(&p).unwrap();
        for dir in [Tangent::Vertical, Tangent::horizontal()] {
            let res = resolve_branch(&f, &dir).unwrap();
            let side = audit.sides.iter().find(|s| s.direction == dir).unwrap();
            let big_x = if side.carries == "bN" { b * nn } else { a * nn };
            let oracle = puiseux_char_exponents(p.m() * p.d(), p.d(), big_x);
            assert_eq!(res.char_exponents, oracle, "({nn},{a},{b}) {dir}");
        }
    }
}

#[test]
fn audit_smallest_member() {
    let audit = audit_family(&params(3, 1, 1)).unwrap();
    assert_eq!(audit.multiplicity_at_p, 4);
    for c in audit.claims_in(&["i", "ii", "iii", "iv", "v", "vi", "vii"]) {
        assert!(c.matches(), "{} {:?}", c.id(), c.verdict());
    }
    for c in audit.claims_in(&["viii"]) {
        assert!(!c.matches());
        assert_eq!(c.measured(), &serde_json::json!([2, 7]));
        assert_eq!(c.claimed(), &serde_json::json!([5, 7]));
    }
}

#[test]
fn audit_five_one_two() {
    let audit = audit_family(&params(5, 1, 2)).unwrap();
    assert_eq!(audit.claim("iii").unwrap().measured(), &serde_json::json!([[3, 11], [3, 16]]));
    for c in audit.claims_in(&["i", "ii", "iii", "iv", "v", "vi", "vii"]) {
        assert!(c.matches(), "{} {:?}", c.id(), c.verdict());
    }
    let a_side = audit.sides.iter().find(|s| s.carries == "aN").unwrap();
    let types: Vec<_> = a_side.stages.iter().map(|s| s.quasi_type.map(|(p, q)| (p.min(q), p.max(q)))).collect();
    assert_eq!(types, vec![Some((3, 11)), Some((3, 8)), Some((3, 5))]);
    let json = serde_json::to_value(&audit).unwrap();
    assert!(json["claims"][0]["verdict"]["status"].is_string());
}

#[test]
fn genus_of_family_members() {
    let g = genus_check(&params(3, 1, 1)).unwrap();
    assert_eq!((g.delta_total, g.arithmetic_genus_bound, g.equality), (10, 10, true));
    let g = genus_check(&params(5, 1, 2)).unwrap();
    assert_eq!(g.delta_total, 25 + 30 + 36);
    assert_eq!(g.arithmetic_genus_bound, 91);
}

#[test]
fn one_pair_germs_follow_euclid() {
    let xy = ["x", "y"];
    for q in 2..=12u32 {
        for p in 1..q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let f = SparsePolynomial::parse(&format!("y^{p} - x^{q}"), &xy).unwrap();
            let r = resolve_branch_with(&f, &Tangent::horizontal(), &full()).unwrap();
            assert_eq!(r.mult_sequence, euclid_sequence(p, q).unwrap(), "({p},{q})");
            let expected = if p == 1 { vec![1] } else { vec![p, q] };
            assert_eq!(r.char_exponents, expected);
        }
    }
}

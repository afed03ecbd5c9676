use modpimage::{Field, FieldParams, Fq, LocalAlgebra, TElem};
use proptest::prelude::*;

/// Schoolbook arithmetic on coefficient vectors, independent of the library.
struct Naive {
    p: u32,
    modulus: Vec<u32>,
}

impl Naive {
    fn of(f: &Field) -> Self {
        Naive {
            p: f.p(),
            modulus: f.params().modulus.clone(),
        }
    }

    fn d(&self) -> usize {
        self.modulus.len() - 1
    }

    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let d = self.d();
        let mut prod = vec![0u32; 2 * d];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus.iter().enumerate() {
                let idx = k - d + i;
                prod[idx] = (prod[idx] + self.p * self.p - c * m % self.p) % self.p;
            }
        }
        prod.truncate(d);
        prod
    }

    fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }
}

fn coeffs(f: &Field, a: Fq) -> Vec<u32> {
    let mut c = f.coeffs(a);
    c.resize(f.d() as usize, 0);
    c
}

const FIELDS: [(u32, u32); 7] = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (7, 1)];

#[test]
fn field_arithmetic_matches_schoolbook() {
    for (p, d) in FIELDS {
        let f = Field::standard(p, d).unwrap();
        let n = Naive::of(&f);
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(coeffs(&f, f.mul(a, b)), n.mul(&coeffs(&f, a), &coeffs(&f, b)));
                assert_eq!(coeffs(&f, f.add(a, b)), n.add(&coeffs(&f, a), &coeffs(&f, b)));
            }
        }
    }
}

#[test]
fn field_axioms_exhaustive() {
    for (p, d) in FIELDS {
        let f = Field::standard(p, d).unwrap();
        let q = f.q() as u64;
        let all: Vec<Fq> = f.elements().collect();
        for &a in &all {
            assert_eq!(f.pow(a, q), a, "Frobenius fixes {a:?}");
            assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                assert_eq!((q - 1) % f.order(a).unwrap() as u64, 0);
            }
            for &b in &all {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &all {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                }
            }
        }
        assert!(f.inv(Fq::ZERO).is_err());
    }
}

#[test]
fn field_examples() {
    let f4 = Field::standard(2, 2).unwrap();
    let x = f4.x();
    let xp1 = f4.add(x, Fq::ONE);
    assert_eq!(f4.mul(x, x), xp1);
    assert_eq!(f4.mul(x, xp1), Fq::ONE);
    assert_eq!(f4.inv(x).unwrap(), xp1);
    let f7 = Field::standard(7, 1).unwrap();
    assert_eq!(f7.inv(f7.from_int(3)).unwrap(), f7.from_int(5));

    assert_eq!(
        Field::standard(2, 1).unwrap().enumerate(256).unwrap(),
        vec![Fq::ZERO, Fq::ONE]
    );
    let f16 = Field::standard(2, 4).unwrap();
    let e = f16.enumerate(256).unwrap();
    assert_eq!(e, f16.enumerate(256).unwrap());
    assert_eq!(e.len(), 16);
    assert!(e.windows(2).all(|w| w[0] < w[1]));
    assert!(f16.enumerate(8).is_err());
}

#[test]
fn unit_subgroups() {
    let f4 = Field::standard(2, 2).unwrap();
    assert_eq!(f4.subgroup_of_units(Fq::ONE).unwrap().order(), 1);
    let full = f4.subgroup_of_units(f4.x()).unwrap();
    assert_eq!(full.order(), 3);
    assert!(f4.subgroup_of_units(Fq::ZERO).is_err());
    let f7 = Field::standard(7, 1).unwrap();
    let d = f7.subgroup_of_units(f7.from_int(2)).unwrap();
    let mut got: Vec<Fq> = d.elements().to_vec();
    got.sort();
    assert_eq!(got, vec![f7.from_int(1), f7.from_int(2), f7.from_int(4)]);
}

#[test]
fn field_params_are_validated() {
    assert!(FieldParams::new(4, 1, vec![0, 1]).is_err());
    assert!(
        FieldParams::new(2, 2, vec![1, 0, 1]).is_err(),
        "x^2 + 1 is reducible over F_2"
    );
    assert!(Field::new(FieldParams::new(2, 3, vec![1, 1, 0, 1]).unwrap()).is_ok());
    assert_eq!(FieldParams::standard(2, 4).unwrap().modulus, vec![1, 1, 0, 0, 1]);
}

/// Dual-number style oracle: `(a0 + sum a_i X_i)(b0 + sum b_i X_i)
/// = a0 b0 + sum (a0 b_i + a_i b0) X_i`.
fn naive_t_mul(f: &Field, a: &TElem, b: &TElem) -> Vec<Fq> {
    let (a, b) = (a.coords(), b.coords());
    let mut out = vec![f.mul(a[0], b[0])];
    for i in 1..a.len() {
        out.push(f.add(f.mul(a[0], b[i]), f.mul(a[i], b[0])));
    }
    out
}

#[test]
fn local_algebra_multiplication_matches_oracle() {
    for (p, d, m) in [(2, 2, 1), (2, 1, 2), (3, 1, 2)] {
        let f = Field::standard(p, d).unwrap();
        let t = LocalAlgebra::new(f.clone(), m);
        let all = t.elements(1 << 16).unwrap();
        assert_eq!(all.len() as u128, t.size());
        for a in &all {
            for b in &all {
                assert_eq!(t.mul(a, b).coords(), naive_t_mul(&f, a, b).as_slice());
            }
            match t.inv(a) {
                Ok(ai) => assert_eq!(t.mul(a, &ai), t.constant(Fq::ONE)),
                Err(_) => assert!(a.in_ideal()),
            }
        }
    }
}

#[test]
fn local_algebra_examples() {
    let f = Field::standard(2, 2).unwrap();
    let x = f.x();
    let xp1 = f.add(x, Fq::ONE);
    let t = LocalAlgebra::new(f.clone(), 2);
    let (x1, x2) = (t.generator(1).unwrap(), t.generator(2).unwrap());
    assert_eq!(t.mul(&x1, &x2), t.constant(Fq::ZERO));
    let one = t.constant(Fq::ONE);
    let u = t.add(&one, &x1);
    assert_eq!(t.mul(&u, &u), one);
    assert_eq!(t.inv(&u).unwrap(), t.add(&one, &t.neg(&x1)));

    let t1 = LocalAlgebra::new(f.clone(), 1);
    let a = t1.element(x, &[Fq::ONE]).unwrap();
    let b = t1.element(x, &[x]).unwrap();
    // (x + X)(x + xX) = x^2 + (x^2 + x)X = (x+1) + X.
    assert_eq!(t1.mul(&a, &b), t1.element(xp1, &[Fq::ONE]).unwrap());
    assert_eq!(t1.inv(&a).unwrap(), t1.element(xp1, &[x]).unwrap());
    assert_eq!(t1.inv(&t1.constant(x)).unwrap(), t1.constant(xp1));
    assert!(t1.inv(&t1.generator(1).unwrap()).is_err());
}

#[test]
fn subalgebra_examples() {
    let f = Field::standard(2, 2).unwrap();
    let t = LocalAlgebra::new(f.clone(), 2);
    assert_eq!(t.subalgebra_generated(&[], 1 << 16).unwrap().dim, 1);
    let gens = [t.generator(1).unwrap(), t.generator(2).unwrap()];
    assert_eq!(t.subalgebra_generated(&gens, 1 << 16).unwrap().dim, 3);
    let g = t.element(Fq::ONE, &[Fq::ONE, f.x()]).unwrap();
    let s = t.subalgebra_generated(&[g], 1 << 16).unwrap();
    assert_eq!(s.dim, 2);
    assert_eq!(s.elements.len(), 16);
}

#[test]
fn wire_round_trip_and_validation() {
    let f = Field::standard(2, 3).unwrap();
    let t = LocalAlgebra::new(f, 2);
    for a in t.elements(1 << 16).unwrap().iter().step_by(37) {
        assert_eq!(&t.from_wire(&t.to_wire(a)).unwrap(), a);
    }
    assert!(t.from_wire(&[vec![1]]).is_err());
    assert!(t.from_wire(&[vec![2], vec![0], vec![0]]).is_err());
}

fn arb_field() -> impl Strategy<Value = Field> {
    prop::sample::select(vec![(2u32, 4u32), (2, 6), (3, 3), (5, 2), (13, 1)])
        .prop_map(|(p, d)| Field::standard(p, d).unwrap())
}

proptest! {
    #[test]
    fn larger_fields_agree_with_schoolbook(f in arb_field(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = f.q();
        let (a, b, c) = (f.from_value(a % q).unwrap(), f.from_value(b % q).unwrap(), f.from_value(c % q).unwrap());
        let n = Naive::of(&f);
        prop_assert_eq!(coeffs(&f, f.mul(a, b)), n.mul(&coeffs(&f, a), &coeffs(&f, b)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.pow(a, q as u64), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
        }
    }

    #[test]
    fn local_algebra_is_a_commutative_ring(m in 1usize..4, raw in prop::collection::vec(0u32..16, 12)) {
        let f = Field::standard(2, 4).unwrap();
        let t = LocalAlgebra::new(f.clone(), m);
        let mk = |o: usize| {
            let c: Vec<Fq> = (0..=m).map(|i| f.from_value(raw[o + i]).unwrap()).collect();
            t.from_coords(&c).unwrap()
        };
        let (a, b, c) = (mk(0), mk(4), mk(8));
        prop_assert_eq!(t.mul(&a, &b), t.mul(&b, &a));
        prop_assert_eq!(t.mul(&t.mul(&a, &b), &c), t.mul(&a, &t.mul(&b, &c)));
        prop_assert_eq!(t.mul(&a, &t.add(&b, &c)), t.add(&t.mul(&a, &b), &t.mul(&a, &c)));
        prop_assert_eq!(t.residue(&t.mul(&a, &b)), f.mul(t.residue(&a), t.residue(&b)));
        prop_assert_eq!(t.is_unit(&a), !t.residue(&a).is_zero());
    }
}

//! Twisted products `M x_x G` of a finite group by an F_p-module, with law
//! `(m1, g1)(m2, g2) = (x(g1, g2) + m1 + g1 m2, g1 g2)`.
//!
//! Everything is index-based: group elements are rows of a Cayley table,
//! module elements are packed F_p-digit vectors, and a product element
//! `(m, g)` has index `m |G| + g`.

use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};

/// Multiplication table of a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    identity: u32,
    table: Vec<u32>,
    inverse: Vec<u32>,
}

impl GroupTable {
    /// Table of `elements` under `mul`. Fails if the set is not a group.
    pub fn from_elements<T, F>(elements: &[T], mut mul: F) -> Result<Self>
    where
        T: Clone + Eq + Hash,
        F: FnMut(&T, &T) -> T,
    {
        let n = elements.len();
        let index = index_map(elements);
        if index.len() != n {
            return Err(Error::Contract("group element list has repeats".into()));
        }
        let mut table = vec![0u32; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let Some(&k) = index.get(&mul(a, b)) else {
                    return Err(Error::Contract(format!(
                        "product of elements {i} and {j} leaves the set"
                    )));
                };
                table[i * n + j] = k;
            }
        }
        GroupTable::from_table(n, table)
    }

    /// Wraps a raw `n x n` table, checking identity and inverses.
    /// Associativity is the caller's responsibility.
    pub fn from_table(n: usize, table: Vec<u32>) -> Result<Self> {
        if table.len() != n * n || table.iter().any(|&k| k as usize >= n) {
            return Err(Error::Contract("malformed group table".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .ok_or_else(|| Error::Contract("group table has no identity".into()))? as u32;
        let mut inverse = vec![0u32; n];
        for (x, slot) in inverse.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&y| table[x * n + y] == identity)
                .ok_or_else(|| Error::Contract(format!("element {x} has no inverse")))? as u32;
        }
        Ok(GroupTable {
            n,
            identity,
            table,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// Exhaustive associativity check over all triples.
    pub fn is_associative(&self) -> bool {
        let n = self.n as u32;
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }
}

/// Position of each element in a list.
pub fn index_map<T: Clone + Eq + Hash>(elements: &[T]) -> FxHashMap<T, u32> {
    elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i as u32))
        .collect()
}

/// F_p^dim with elements packed as `sum v_k p^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuleSpace {
    p: u32,
    dim: usize,
    size: u32,
}

impl ModuleSpace {
    pub fn new(p: u32, dim: usize) -> Result<Self> {
        let size = (p as u64)
            .checked_pow(dim as u32)
            .filter(|&s| s <= 1 << 24)
            .ok_or_else(|| Error::capacity("module size", (p as u128).pow(dim as u32), 1 << 24))?;
        Ok(ModuleSpace {
            p,
            dim,
            size: size as u32,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn decode(&self, mut v: u32) -> Vec<u32> {
        (0..self.dim)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    /// Unit vectors.
    pub fn basis(&self) -> Vec<u32> {
        (0..self.dim).map(|k| self.p.pow(k as u32)).collect()
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let s: Vec<u32> = self.decode(a).iter().map(|&u| (self.p - u) % self.p).collect();
        self.encode(&s)
    }
}

/// Outcome of an associativity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociativityReport {
    pub order: u64,
    /// Size of the generating set used (all elements for the exhaustive check).
    pub generators: usize,
    pub triples_checked: u64,
    pub method: &'static str,
}

#[derive(Clone, Debug)]
pub struct TwistedProduct {
    group: GroupTable,
    module: ModuleSpace,
    /// `action[g |M| + m] = g . m`.
    action: Vec<u32>,
    /// `cocycle[g |G| + h] = x(g, h)`.
    cocycle: Vec<u32>,
    group_generators: Vec<u32>,
}

impl TwistedProduct {
    /// Checks that `action` is a linear action, that `cocycle` is normalized,
    /// and that the cocycle condition holds on every triple; a failure names
    /// the first offending triple. `group_generators` must generate the group
    /// and are used by the associativity test.
    pub fn new(
        group: GroupTable,
        module: ModuleSpace,
        action: Vec<u32>,
        cocycle: Vec<u32>,
        group_generators: Vec<u32>,
    ) -> Result<Self> {
        let n = group.order();
        let ms = module.size() as usize;
        if action.len() != n * ms || cocycle.len() != n * n {
            return Err(Error::Contract("action or cocycle table has the wrong size".into()));
        }
        if action.iter().chain(&cocycle).any(|&v| v as usize >= ms) {
            return Err(Error::Contract("table entry outside the module".into()));
        }
        if group_generators.iter().any(|&g| g as usize >= n) {
            return Err(Error::Contract("generator outside the group".into()));
        }
        let tp = TwistedProduct {
            group,
            module,
            action,
            cocycle,
            group_generators,
        };
        tp.check_action()?;
        tp.check_cocycle()?;
        let generated = super::closure_by(
            tp.group.identity(),
            &tp.group_generators,
            |a, b| tp.group.mul(*a, *b),
            n,
        )
        .map_or(0, |c| c.len());
        if generated != n {
            return Err(Error::Contract(format!(
                "group generators span {generated} of {n} elements"
            )));
        }
        Ok(tp)
    }

    /// Direct product: trivial action, zero cocycle.
    pub fn direct(group: GroupTable, module: ModuleSpace, group_generators: Vec<u32>) -> Result<Self> {
        let n = group.order();
        let ms = module.size();
        let action = (0..n).flat_map(|_| 0..ms).collect();
        TwistedProduct::new(group, module, action, vec![0; n * n], group_generators)
    }

    fn check_action(&self) -> Result<()> {
        let g = &self.group;
        let n = g.order() as u32;
        let ms = self.module.size();
        let basis = self.module.basis();
        for m in 0..ms {
            if self.act(g.identity(), m) != m {
                return Err(Error::Contract(format!("identity moves module element {m}")));
            }
        }
        for a in 0..n {
            for m in 0..ms {
                for &b in &basis {
                    let lhs = self.act(a, self.module.add(m, b));
                    if lhs != self.module.add(self.act(a, m), self.act(a, b)) {
                        return Err(Error::Contract(format!("group element {a} does not act additively")));
                    }
                }
            }
        }
        for a in 0..n {
            for c in 0..n {
                for &b in &basis {
                    if self.act(g.mul(a, c), b) != self.act(a, self.act(c, b)) {
                        return Err(Error::Contract(format!("action is not a homomorphism at ({a}, {c})")));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_cocycle(&self) -> Result<()> {
        let g = &self.group;
        let n = g.order() as u32;
        let e = g.identity();
        for a in 0..n {
            if self.x(e, a) != 0 || self.x(a, e) != 0 {
                return Err(Error::Contract(format!("cocycle is not normalized at {a}")));
            }
        }
        let md = &self.module;
        for a in 0..n {
            for b in 0..n {
                let ab = g.mul(a, b);
                let xab = self.x(a, b);
                for c in 0..n {
                    // a.x(b,c) - x(ab,c) + x(a,bc) - x(a,b)
                    let lhs = md.add(self.act(a, self.x(b, c)), self.x(a, g.mul(b, c)));
                    let rhs = md.add(self.x(ab, c), xab);
                    if lhs != rhs {
                        return Err(Error::Contract(format!(
                            "cocycle condition fails on the triple ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn module(&self) -> &ModuleSpace {
        &self.module
    }

    pub fn group_generators(&self) -> &[u32] {
        &self.group_generators
    }

    /// `|M| |G|`.
    pub fn order(&self) -> u64 {
        self.module.size() as u64 * self.group.order() as u64
    }

    #[inline]
    pub fn act(&self, g: u32, m: u32) -> u32 {
        self.action[g as usize * self.module.size() as usize + m as usize]
    }

    #[inline]
    pub fn x(&self, g: u32, h: u32) -> u32 {
        self.cocycle[g as usize * self.group.order() + h as usize]
    }

    #[inline]
    pub fn element(&self, m: u32, g: u32) -> u32 {
        m * self.group.order() as u32 + g
    }

    #[inline]
    pub fn parts(&self, e: u32) -> (u32, u32) {
        let n = self.group.order() as u32;
        (e / n, e % n)
    }

    pub fn identity(&self) -> u32 {
        self.element(0, self.group.identity())
    }

    #[inline]
    pub fn mul(&self, e1: u32, e2: u32) -> u32 {
        let (m1, g1) = self.parts(e1);
        let (m2, g2) = self.parts(e2);
        let md = &self.module;
        let m = md.add(md.add(self.x(g1, g2), m1), self.act(g1, m2));
        self.element(m, self.group.mul(g1, g2))
    }

    /// `(m, g)^-1 = (g^-1 . (-m - x(g, g^-1)), g^-1)`.
    pub fn inv(&self, e: u32) -> u32 {
        let (m, g) = self.parts(e);
        let gi = self.group.inv(g);
        let md = &self.module;
        let inner = md.neg(md.add(m, self.x(g, gi)));
        self.element(self.act(gi, inner), gi)
    }

    /// The quotient map to G.
    pub fn project(&self, e: u32) -> u32 {
        self.parts(e).1
    }

    /// Image of the module under a homomorphism `map` (indexed by module
    /// element) onto `target`. The map must be additive and equivariant, so
    /// that the action descends; the pushed-forward cocycle is `map o x`.
    pub fn push_forward(&self, target: ModuleSpace, map: &[u32]) -> Result<TwistedProduct> {
        let ms = self.module.size() as usize;
        if map.len() != ms || map.iter().any(|&v| v >= target.size()) {
            return Err(Error::Contract("module map has the wrong shape".into()));
        }
        if map[0] != 0 {
            return Err(Error::Contract("module map does not fix zero".into()));
        }
        let mut image_of: Vec<Option<u32>> = vec![None; target.size() as usize];
        for (m, &t) in map.iter().enumerate() {
            image_of[t as usize].get_or_insert(m as u32);
        }
        let Some(preimage) = image_of.into_iter().collect::<Option<Vec<u32>>>() else {
            return Err(Error::Contract("module map is not surjective".into()));
        };
        for m in 0..ms as u32 {
            for &b in &self.module.basis() {
                if map[self.module.add(m, b) as usize] != target.add(map[m as usize], map[b as usize]) {
                    return Err(Error::Contract("module map is not additive".into()));
                }
            }
        }
        let n = self.group.order();
        let mut action = vec![0u32; n * target.size() as usize];
        for g in 0..n as u32 {
            for m in 0..ms as u32 {
                let t = map[m as usize];
                let gt = map[self.act(g, m) as usize];
                let slot = &mut action[g as usize * target.size() as usize + t as usize];
                if m == preimage[t as usize] {
                    *slot = gt;
                } else if *slot != gt {
                    return Err(Error::Contract("module map is not equivariant".into()));
                }
            }
        }
        let cocycle = self.cocycle.iter().map(|&v| map[v as usize]).collect();
        TwistedProduct::new(
            self.group.clone(),
            target,
            action,
            cocycle,
            self.group_generators.clone(),
        )
    }

    /// Generating set for the associativity test: the group generators with
    /// zero module part, plus the module basis over the identity.
    pub fn generating_set(&self) -> Vec<u32> {
        let e = self.group.identity();
        self.group_generators
            .iter()
            .map(|&g| self.element(0, g))
            .chain(self.module.basis().into_iter().map(|b| self.element(b, e)))
            .collect()
    }

    /// Light's associativity test: with `S` generating the magma,
    /// associativity holds iff `(x a) y = x (a y)` for all `x, y` and all
    /// `a` in `S`. The generation of the whole product by `S` is checked
    /// first; the cost is `|S| |E|^2`.
    pub fn check_associativity(&self) -> Result<AssociativityReport> {
        let order = self.order();
        let s = self.generating_set();
        let generated = super::closure_by(self.identity(), &s, |a, b| self.mul(*a, *b), order as usize)
            .map_or(0, |c| c.len() as u64);
        if generated != order {
            return Err(Error::Contract(format!(
                "generating set spans {generated} of {order} elements"
            )));
        }
        let all = 0..order as u32;
        for &a in &s {
            let xa: Vec<u32> = all.clone().map(|x| self.mul(x, a)).collect();
            let ay: Vec<u32> = all.clone().map(|y| self.mul(a, y)).collect();
            for x in all.clone() {
                for y in all.clone() {
                    if self.mul(xa[x as usize], y) != self.mul(x, ay[y as usize]) {
                        return Err(Error::Contract(format!("associativity fails on ({x}, {a}, {y})")));
                    }
                }
            }
        }
        Ok(AssociativityReport {
            order,
            generators: s.len(),
            triples_checked: s.len() as u64 * order * order,
            method: "light",
        })
    }

    /// Associativity on every triple through a full Cayley table. Refuses
    /// products with more than `max_triples` triples.
    pub fn check_associativity_exhaustive(&self, max_triples: u64) -> Result<AssociativityReport> {
        let order = self.order();
        let triples = order.saturating_mul(order).saturating_mul(order);
        if triples > max_triples {
            return Err(Error::capacity(
                "exhaustive associativity",
                triples as u128,
                max_triples as u128,
            ));
        }
        let n = order as usize;
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.mul(a as u32, b as u32);
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(Error::Contract(format!("associativity fails on ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(AssociativityReport {
            order,
            generators: n,
            triples_checked: triples,
            method: "exhaustive",
        })
    }
}

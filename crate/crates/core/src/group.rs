//! Finite abelian groups as products of prime-power cyclic groups.
//!
//! A group is an ordered list of prime-power orders `(n_1, …, n_r)`, stored
//! in canonical order (sorted by prime, then exponent), so structural
//! equality coincides with labelled isomorphism. The dual group is carried
//! by the same value: under the standard pairing a finite product of cyclic
//! groups is canonically self-dual, and element versus character is a usage
//! role, not a type distinction.
//!
//! All values are immutable after construction and every operation is a
//! pure function; concurrent use needs no synchronization.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::cyclotomic::CyclotomicValue;
use crate::error::{Error, Result};

/// Default bound on the group order; exhaustive suites must stay desk-scale.
pub const DEFAULT_ORDER_CAP: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    exponent: u64,
    order: u64,
}

/// An element, as a vector of residues `t_i` with `0 ≤ t_i < n_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    residues: Vec<u64>,
}

impl Element {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Concatenate coordinates of elements of `G` and `H` into an element of
/// the direct product `G × H`.
pub fn pair(a: &Element, b: &Element) -> Element {
    let mut residues = a.residues.clone();
    residues.extend_from_slice(&b.residues);
    Element { residues }
}

/// Split an element of a direct product back into its two blocks.
pub fn unpair(e: &Element, left_rank: usize) -> (Element, Element) {
    (
        Element {
            residues: e.residues[..left_rank].to_vec(),
        },
        Element {
            residues: e.residues[left_rank..].to_vec(),
        },
    )
}

pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = n;
            let mut k = 0;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            return if m == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

impl FiniteAbelianGroup {
    /// Build a group from a list of prime-power orders, canonicalized and
    /// checked against the default desk-scale cap.
    pub fn make(orders: &[u64]) -> Result<Self> {
        Self::make_with_cap(orders, DEFAULT_ORDER_CAP)
    }

    pub fn make_with_cap(orders: &[u64], cap: u64) -> Result<Self> {
        let mut keyed: Vec<(u64, u32, u64)> = Vec::with_capacity(orders.len());
        let mut order: u128 = 1;
        for &n in orders {
            let (p, k) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
            order *= n as u128;
            if order > cap as u128 {
                return Err(Error::CapExceeded { order, cap });
            }
            keyed.push((p, k, n));
        }
        keyed.sort();
        let factors: Vec<u64> = keyed.into_iter().map(|(_, _, n)| n).collect();
        let exponent = factors.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        Ok(FiniteAbelianGroup {
            factors,
            exponent,
            order: order as u64,
        })
    }

    /// Direct product with block coordinate order preserved (left block
    /// first). Used for joint laws, where marginal bookkeeping needs the
    /// factors to stay put; canonical sorting is the contract of [`make`].
    ///
    /// [`make`]: FiniteAbelianGroup::make
    pub fn direct_product(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        let exponent = self.exponent.lcm(&other.exponent);
        let order = self
            .order
            .checked_mul(other.order)
            .expect("product group order overflows u64");
        FiniteAbelianGroup {
            factors,
            exponent,
            order,
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn zero(&self) -> Element {
        Element {
            residues: vec![0; self.factors.len()],
        }
    }

    /// An element from raw residues, reduced coordinatewise.
    pub fn element(&self, residues: Vec<u64>) -> Result<Element> {
        if residues.len() != self.factors.len() {
            return Err(Error::ElementShape {
                got: residues.len(),
                expected: self.factors.len(),
            });
        }
        let residues = residues
            .iter()
            .zip(&self.factors)
            .map(|(&t, &n)| t % n)
            .collect();
        Ok(Element { residues })
    }

    pub fn check_element(&self, e: &Element) -> Result<()> {
        if e.residues.len() != self.factors.len()
            || e.residues.iter().zip(&self.factors).any(|(&t, &n)| t >= n)
        {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        debug_assert_eq!(a.residues.len(), self.factors.len());
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.factors)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Element { residues }
    }

    pub fn neg(&self, a: &Element) -> Element {
        let residues = a
            .residues
            .iter()
            .zip(&self.factors)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Element { residues }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    /// All elements in lexicographic residue order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let r = self.factors.len();
        let mut current: Option<Vec<u64>> = Some(vec![0; r]);
        std::iter::from_fn(move || {
            let out = current.clone()?;
            let cur = current.as_mut().unwrap();
            let mut i = r;
            loop {
                if i == 0 {
                    current = None;
                    break;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.factors[i] {
                    break;
                }
                cur[i] = 0;
            }
            Some(Element { residues: out })
        })
    }

    /// Lexicographic rank of an element; inverse of [`element_at`].
    ///
    /// [`element_at`]: FiniteAbelianGroup::element_at
    pub fn index_of(&self, e: &Element) -> u64 {
        let mut idx = 0u64;
        for (&t, &n) in e.residues.iter().zip(&self.factors) {
            idx = idx * n + t;
        }
        idx
    }

    pub fn element_at(&self, mut idx: u64) -> Element {
        let mut residues = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            residues[i] = idx % self.factors[i];
            idx /= self.factors[i];
        }
        Element { residues }
    }

    /// Exponent `e` such that the pairing of `x` and `y` is `ζ_N^e`,
    /// with `N` the group exponent.
    pub fn pairing_exponent(&self, x: &Element, y: &Element) -> u64 {
        let n = self.exponent as u128;
        let mut acc: u128 = 0;
        for ((&a, &b), &f) in x.residues.iter().zip(&y.residues).zip(&self.factors) {
            let w = n / f as u128;
            acc = (acc + w * (a as u128) % n * (b as u128)) % n;
        }
        acc as u64
    }

    /// The value of the character `y` at the element `x`: a root of unity
    /// in the `N`-th cyclotomic field. Bi-additive and non-degenerate.
    pub fn pairing(&self, x: &Element, y: &Element) -> Result<CyclotomicValue> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(CyclotomicValue::root_of_unity(
            self.exponent,
            self.pairing_exponent(x, y),
        ))
    }

    pub fn has_order2_elements(&self) -> bool {
        self.factors.iter().any(|&n| n.is_multiple_of(2))
    }

    pub fn is_odd_order(&self) -> bool {
        self.order % 2 == 1
    }

    /// The subgroup generated by all elements of order 2, i.e. everything
    /// killed by doubling.
    pub fn two_torsion_subgroup(&self) -> Subgroup {
        let members: Vec<Element> = self
            .elements()
            .filter(|e| {
                e.residues
                    .iter()
                    .zip(&self.factors)
                    .all(|(&t, &n)| (2 * t).is_multiple_of(n))
            })
            .collect();
        Subgroup::from_member_list(self.clone(), members)
    }

    /// Split into the 2-part and the odd part, by factor parity.
    pub fn split_two_odd(&self) -> GroupSplit {
        let two_idx: Vec<usize> = (0..self.factors.len())
            .filter(|&i| self.factors[i].is_multiple_of(2))
            .collect();
        let odd_idx: Vec<usize> = (0..self.factors.len())
            .filter(|&i| !self.factors[i].is_multiple_of(2))
            .collect();
        let pick = |idx: &[usize]| {
            let factors: Vec<u64> = idx.iter().map(|&i| self.factors[i]).collect();
            let exponent = factors.iter().fold(1u64, |acc, &n| acc.lcm(&n));
            let order = factors.iter().product::<u64>();
            FiniteAbelianGroup {
                factors,
                exponent,
                order,
            }
        };
        GroupSplit {
            whole: self.clone(),
            two_part: pick(&two_idx),
            odd_part: pick(&odd_idx),
            two_idx,
            odd_idx,
        }
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z1");
        }
        for (i, n) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

/// Decomposition of a group into its 2-part and odd part.
pub struct GroupSplit {
    pub whole: FiniteAbelianGroup,
    pub two_part: FiniteAbelianGroup,
    pub odd_part: FiniteAbelianGroup,
    two_idx: Vec<usize>,
    odd_idx: Vec<usize>,
}

impl GroupSplit {
    pub fn project_two(&self, e: &Element) -> Element {
        Element {
            residues: self.two_idx.iter().map(|&i| e.residues[i]).collect(),
        }
    }

    pub fn project_odd(&self, e: &Element) -> Element {
        Element {
            residues: self.odd_idx.iter().map(|&i| e.residues[i]).collect(),
        }
    }

    /// Assemble a whole-group element from its two blocks.
    pub fn combine(&self, two: &Element, odd: &Element) -> Element {
        let mut residues = vec![0u64; self.whole.rank()];
        for (slot, &i) in self.two_idx.iter().enumerate() {
            residues[i] = two.residues[slot];
        }
        for (slot, &i) in self.odd_idx.iter().enumerate() {
            residues[i] = odd.residues[slot];
        }
        Element { residues }
    }
}

/// A subgroup, stored as its full member set together with a generating
/// set that witnesses it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    members: Vec<Element>,
    generators: Vec<Element>,
}

impl Subgroup {
    pub fn trivial(parent: FiniteAbelianGroup) -> Self {
        let zero = parent.zero();
        Subgroup {
            parent,
            members: vec![zero],
            generators: vec![],
        }
    }

    pub fn full(parent: FiniteAbelianGroup) -> Self {
        let members: Vec<Element> = parent.elements().collect();
        Self::from_member_list(parent, members)
    }

    /// Smallest subgroup of `parent` containing `gens`.
    pub fn generated_by(parent: FiniteAbelianGroup, gens: &[Element]) -> Result<Self> {
        for g in gens {
            parent.check_element(g)?;
        }
        let mut set: BTreeSet<Element> = BTreeSet::new();
        set.insert(parent.zero());
        let mut queue: Vec<Element> = vec![parent.zero()];
        while let Some(e) = queue.pop() {
            for g in gens {
                let next = parent.add(&e, g);
                if set.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        // closing under the generators also closes under negation: each
        // generator has finite order, so -g is a positive multiple of g
        let members: Vec<Element> = set.into_iter().collect();
        Ok(Subgroup {
            generators: minimal_generators(&parent, &members),
            parent,
            members,
        })
    }

    /// Wrap a member list that is already known to be a subgroup.
    pub(crate) fn from_member_list(parent: FiniteAbelianGroup, mut members: Vec<Element>) -> Self {
        members.sort();
        members.dedup();
        debug_assert!(is_closed(&parent, &members));
        Subgroup {
            generators: minimal_generators(&parent, &members),
            parent,
            members,
        }
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    /// Members, sorted lexicographically.
    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.members.binary_search(e).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// The annihilator: all characters equal to 1 on the whole subgroup.
    /// Lives in the dual carrier, which is the same group value.
    pub fn annihilator(&self) -> Subgroup {
        let g = &self.parent;
        let members: Vec<Element> = g
            .elements()
            .filter(|y| {
                self.generators
                    .iter()
                    .all(|k| g.pairing_exponent(k, y) == 0)
            })
            .collect();
        Subgroup::from_member_list(g.clone(), members)
    }
}

pub(crate) fn is_closed(parent: &FiniteAbelianGroup, members: &[Element]) -> bool {
    let set: BTreeSet<&Element> = members.iter().collect();
    members.iter().any(|m| *m == parent.zero())
        && members
            .iter()
            .all(|a| members.iter().all(|b| set.contains(&parent.add(a, b))))
}

fn minimal_generators(parent: &FiniteAbelianGroup, members: &[Element]) -> Vec<Element> {
    let zero = parent.zero();
    let mut gens: Vec<Element> = Vec::new();
    let mut closure: BTreeSet<Element> = BTreeSet::new();
    closure.insert(zero.clone());
    for m in members {
        if *m == zero || closure.contains(m) {
            continue;
        }
        gens.push(m.clone());
        // extend the closure by the new generator
        let snapshot: Vec<Element> = closure.iter().cloned().collect();
        for base in snapshot {
            let mut cur = base;
            loop {
                cur = parent.add(&cur, m);
                if !closure.insert(cur.clone()) {
                    break;
                }
            }
        }
    }
    gens
}

/// All distinct subgroups, produced once each, in deterministic order
/// (by order, then by member list).
pub fn enumerate_subgroups(g: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let all: Vec<Element> = g.elements().collect();
    let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
    let trivial = Subgroup::trivial(g.clone());
    seen.insert(trivial.members.clone());
    let mut queue: Vec<Subgroup> = vec![trivial];
    let mut head = 0;
    while head < queue.len() {
        let current = queue[head].clone();
        head += 1;
        for e in &all {
            if current.contains(e) {
                continue;
            }
            let mut gens = current.generators.clone();
            gens.push(e.clone());
            let bigger = Subgroup::generated_by(g.clone(), &gens).expect("members are valid");
            if seen.insert(bigger.members.clone()) {
                queue.push(bigger);
            }
        }
    }
    queue.sort_by(|a, b| {
        (a.members.len(), &a.members).cmp(&(b.members.len(), &b.members))
    });
    queue
}

/// A homomorphism given by an integer matrix: coordinate `i` of the image
/// is `Σ_j A[i][j]·t_j mod n_i` in the target group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    matrix: Vec<Vec<u64>>,
}

impl Homomorphism {
    /// Validates well-definedness: every entry must satisfy
    /// `A[i][j]·n_j^src ≡ 0 (mod n_i^tgt)`. Entries are stored reduced.
    pub fn new(
        source: FiniteAbelianGroup,
        target: FiniteAbelianGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if matrix.len() != target.rank() {
            return Err(Error::InvalidHomomorphism(format!(
                "matrix has {} rows, target rank is {}",
                matrix.len(),
                target.rank()
            )));
        }
        let mut reduced = Vec::with_capacity(matrix.len());
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != source.rank() {
                return Err(Error::InvalidHomomorphism(format!(
                    "row {} has {} columns, source rank is {}",
                    i,
                    row.len(),
                    source.rank()
                )));
            }
            let n_i = target.factors[i];
            let mut out = Vec::with_capacity(row.len());
            for (j, &a) in row.iter().enumerate() {
                let a = a.rem_euclid(n_i as i64) as u64;
                let n_j = source.factors[j];
                if !(a as u128 * n_j as u128).is_multiple_of(n_i as u128) {
                    return Err(Error::InvalidHomomorphism(format!(
                        "entry ({i},{j}) = {a} is not well defined: {a}*{n_j} != 0 mod {n_i}"
                    )));
                }
                out.push(a);
            }
            reduced.push(out);
        }
        Ok(Homomorphism {
            source,
            target,
            matrix: reduced,
        })
    }

    pub fn identity(g: &FiniteAbelianGroup) -> Self {
        Self::scaling(g, 1)
    }

    /// Multiplication by `c`, always well defined.
    pub fn scaling(g: &FiniteAbelianGroup, c: i64) -> Self {
        let r = g.rank();
        let matrix = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        if i == j {
                            c.rem_euclid(g.factors[i] as i64) as u64
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Homomorphism {
            source: g.clone(),
            target: g.clone(),
            matrix,
        }
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Element {
        debug_assert_eq!(x.residues.len(), self.source.rank());
        let residues = self
            .matrix
            .iter()
            .zip(&self.target.factors)
            .map(|(row, &n_i)| {
                let mut acc: u128 = 0;
                for (&a, &t) in row.iter().zip(&x.residues) {
                    acc = (acc + a as u128 * t as u128) % n_i as u128;
                }
                acc as u64
            })
            .collect();
        Element { residues }
    }

    /// Entrywise sum; both maps must share source and target.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.source, other.source, "source groups differ");
        assert_eq!(self.target, other.target, "target groups differ");
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .zip(&self.target.factors)
            .map(|((ra, rb), &n_i)| {
                ra.iter()
                    .zip(rb)
                    .map(|(&a, &b)| (a + b) % n_i)
                    .collect()
            })
            .collect();
        Homomorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix,
        }
    }

    pub fn neg(&self) -> Self {
        let matrix = self
            .matrix
            .iter()
            .zip(&self.target.factors)
            .map(|(row, &n_i)| row.iter().map(|&a| (n_i - a) % n_i).collect())
            .collect();
        Homomorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(
            inner.target, self.source,
            "composition chain does not match"
        );
        let matrix = (0..self.target.rank())
            .map(|i| {
                let n_i = self.target.factors[i] as u128;
                (0..inner.source.rank())
                    .map(|k| {
                        let mut acc: u128 = 0;
                        for j in 0..self.source.rank() {
                            acc = (acc
                                + self.matrix[i][j] as u128 * inner.matrix[j][k] as u128)
                                % n_i;
                        }
                        acc as u64
                    })
                    .collect()
            })
            .collect();
        Homomorphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix,
        }
    }

    /// The unique adjoint map `α̃` with `(αx, y) = (x, α̃y)` for all `x, y`.
    ///
    /// Each entry is solved from the pairing identity on basis pairs, and
    /// the identity is then re-checked on all basis pairs, which is a
    /// complete verification because the pairing is bi-additive.
    pub fn adjoint(&self) -> Self {
        let src = &self.source;
        let tgt = &self.target;
        let matrix: Vec<Vec<u64>> = (0..src.rank())
            .map(|j| {
                let n_j = src.factors[j];
                (0..tgt.rank())
                    .map(|i| {
                        let n_i = tgt.factors[i];
                        let a = self.matrix[i][j];
                        // well-definedness gives n_i | a*n_j
                        ((a as u128 * n_j as u128 / n_i as u128) % n_j as u128) as u64
                    })
                    .collect()
            })
            .collect();
        let adj = Homomorphism {
            source: tgt.clone(),
            target: src.clone(),
            matrix,
        };
        for j in 0..src.rank() {
            for i in 0..tgt.rank() {
                let mut ej = src.zero();
                ej.residues[j] = 1 % src.factors[j];
                let mut ei = tgt.zero();
                ei.residues[i] = 1 % tgt.factors[i];
                let lhs = tgt
                    .pairing(&self.apply(&ej), &ei)
                    .expect("basis elements are valid");
                let rhs = src
                    .pairing(&ej, &adj.apply(&ei))
                    .expect("basis elements are valid");
                assert_eq!(lhs, rhs, "adjoint identity failed on basis pair");
            }
        }
        adj
    }

    pub fn kernel(&self) -> Subgroup {
        let zero = self.target.zero();
        let members: Vec<Element> = self
            .source
            .elements()
            .filter(|x| self.apply(x) == zero)
            .collect();
        Subgroup::from_member_list(self.source.clone(), members)
    }

    pub fn image(&self) -> Subgroup {
        let set: BTreeSet<Element> = self.source.elements().map(|x| self.apply(&x)).collect();
        Subgroup::from_member_list(self.target.clone(), set.into_iter().collect())
    }

    /// Image of a subgroup of the source; again a subgroup.
    pub fn apply_subgroup(&self, k: &Subgroup) -> Subgroup {
        let set: BTreeSet<Element> = k.members().iter().map(|x| self.apply(x)).collect();
        Subgroup::from_member_list(self.target.clone(), set.into_iter().collect())
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    /// Bijectivity, decided by image cardinality.
    pub fn is_automorphism(&self) -> bool {
        if !self.is_endomorphism() {
            return false;
        }
        let mut seen = vec![false; self.source.order() as usize];
        let mut count = 0u64;
        for x in self.source.elements() {
            let idx = self.target.index_of(&self.apply(&x)) as usize;
            if !seen[idx] {
                seen[idx] = true;
                count += 1;
            }
        }
        count == self.source.order()
    }
}

/// All automorphisms of `g`, in deterministic (matrix-lexicographic) order.
///
/// Candidate matrices are enumerated with per-entry well-definedness
/// pruning: entry `(i,j)` ranges over the multiples of
/// `n_i / gcd(n_i, n_j)`, which are exactly the well-defined values.
pub fn enumerate_automorphisms(g: &FiniteAbelianGroup) -> Vec<Homomorphism> {
    let r = g.rank();
    if r == 0 {
        return vec![Homomorphism::identity(g)];
    }
    let mut choices: Vec<Vec<u64>> = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            let n_i = g.factors[i];
            let n_j = g.factors[j];
            let step = n_i / n_i.gcd(&n_j);
            choices.push((0..n_i.gcd(&n_j)).map(|t| t * step).collect());
        }
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; r * r];
    'outer: loop {
        let matrix: Vec<Vec<u64>> = (0..r)
            .map(|i| (0..r).map(|j| choices[i * r + j][pick[i * r + j]]).collect())
            .collect();
        let h = Homomorphism {
            source: g.clone(),
            target: g.clone(),
            matrix,
        };
        if h.is_automorphism() {
            out.push(h);
        }
        let mut slot = r * r;
        loop {
            if slot == 0 {
                break 'outer;
            }
            slot -= 1;
            pick[slot] += 1;
            if pick[slot] < choices[slot].len() {
                break;
            }
            pick[slot] = 0;
        }
    }
    out
}

/// Condition (1): `Ker(I + α) = {0}`.
pub fn condition_1_holds(alpha: &Homomorphism) -> Result<bool> {
    if !alpha.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let i_plus = Homomorphism::identity(alpha.source()).add(alpha);
    Ok(i_plus.kernel().is_trivial())
}

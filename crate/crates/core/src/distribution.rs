//! Exact probability distributions on finite abelian groups.
//!
//! Masses are arbitrary precision rationals summing to exactly 1; zero-mass
//! entries are dropped. Characteristic functions (Fourier transforms) take
//! values in the cyclotomic field of the group exponent, so every spectral
//! statement in this module is an equality of canonical forms. No floating
//! point is used anywhere: tolerance would manufacture false theorems.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cyclotomic::CyclotomicValue;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup, Subgroup};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    group: FiniteAbelianGroup,
    mass: BTreeMap<Element, Rational>,
}

/// The characteristic function of a distribution, tabulated over the dual
/// carrier (the same group value).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharFunction {
    group: FiniteAbelianGroup,
    values: BTreeMap<Element, CyclotomicValue>,
}

impl Distribution {
    /// Validates that masses are nonnegative and sum to exactly 1.
    pub fn new(group: FiniteAbelianGroup, mass: BTreeMap<Element, Rational>) -> Result<Self> {
        let mut total = Rational::zero();
        let mut cleaned = BTreeMap::new();
        for (e, m) in mass {
            group
                .check_element(&e)
                .map_err(|_| Error::InvalidDistribution(format!("element {e} not in group")))?;
            if m.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative mass {m} at {e}"
                )));
            }
            if m.is_zero() {
                continue;
            }
            total += &m;
            cleaned.insert(e, m);
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Distribution {
            group,
            mass: cleaned,
        })
    }

    /// The Haar distribution of a subgroup: uniform mass `1/|K|` on `K`.
    pub fn haar(k: &Subgroup) -> Self {
        let w = Rational::new(1.into(), (k.order() as i64).into());
        let mass = k.members().iter().map(|e| (e.clone(), w.clone())).collect();
        Distribution {
            group: k.parent().clone(),
            mass,
        }
    }

    /// The degenerate distribution concentrated at `x`.
    pub fn degenerate(group: &FiniteAbelianGroup, x: &Element) -> Result<Self> {
        group.check_element(x)?;
        let mut mass = BTreeMap::new();
        mass.insert(x.clone(), Rational::one());
        Ok(Distribution {
            group: group.clone(),
            mass,
        })
    }

    /// Uniform distribution on an arbitrary nonempty element set.
    pub fn uniform_on(group: &FiniteAbelianGroup, points: &[Element]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let set: BTreeSet<Element> = points.iter().cloned().collect();
        let w = Rational::new(1.into(), (set.len() as i64).into());
        Self::new(
            group.clone(),
            set.into_iter().map(|e| (e, w.clone())).collect(),
        )
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// Nonzero masses, keyed by element in lexicographic order.
    pub fn mass(&self) -> &BTreeMap<Element, Rational> {
        &self.mass
    }

    pub fn mass_at(&self, e: &Element) -> Rational {
        self.mass.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.mass.keys()
    }

    /// `(μ*ν)(z) = Σ_x μ(x) ν(z−x)`, exact.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let g = &self.group;
        let mut mass: BTreeMap<Element, Rational> = BTreeMap::new();
        for (x, mx) in &self.mass {
            for (y, my) in &other.mass {
                let z = g.add(x, y);
                *mass.entry(z).or_insert_with(Rational::zero) += mx * my;
            }
        }
        Ok(Distribution {
            group: g.clone(),
            mass,
        })
    }

    /// The reflection `μ̄`: mass at `x` moves to `−x`.
    pub fn reflect(&self) -> Self {
        let g = &self.group;
        let mass = self
            .mass
            .iter()
            .map(|(x, m)| (g.neg(x), m.clone()))
            .collect();
        Distribution {
            group: g.clone(),
            mass,
        }
    }

    /// Independent product law on the direct product carrier.
    pub fn product(&self, other: &Self) -> Self {
        let g = self.group.direct_product(&other.group);
        let mut mass = BTreeMap::new();
        for (x, mx) in &self.mass {
            for (y, my) in &other.mass {
                mass.insert(crate::group::pair(x, y), mx * my);
            }
        }
        Distribution { group: g, mass }
    }

    /// Pushforward along an arbitrary coordinate map into `target`.
    pub fn map_elements(
        &self,
        target: &FiniteAbelianGroup,
        f: impl Fn(&Element) -> Element,
    ) -> Self {
        let mut mass: BTreeMap<Element, Rational> = BTreeMap::new();
        for (x, m) in &self.mass {
            let y = f(x);
            debug_assert!(target.check_element(&y).is_ok());
            *mass.entry(y).or_insert_with(Rational::zero) += m;
        }
        Distribution {
            group: target.clone(),
            mass,
        }
    }

    /// `μ̂(y) = Σ_x μ(x)·(x, y)`, tabulated over the whole dual.
    pub fn char_function(&self) -> CharFunction {
        let g = &self.group;
        let n = g.exponent();
        let values = g
            .elements()
            .map(|y| {
                let mut acc = CyclotomicValue::zero(n);
                for (x, m) in &self.mass {
                    let root = CyclotomicValue::root_of_unity(n, g.pairing_exponent(x, &y));
                    acc = acc.add(&root.scale(m));
                }
                (y, acc)
            })
            .collect();
        CharFunction {
            group: g.clone(),
            values,
        }
    }

    /// Decide membership in the class of Haar shifts: returns `(K, x)` with
    /// `μ = m_K * E_x` when they exist.
    ///
    /// Procedure: the set `E` of unit-modulus spectrum points must be a
    /// subgroup, the transform must vanish off `E`, and on `E` it must agree
    /// with the character of some `x` (the lexicographically smallest such
    /// shift is returned; it is only unique modulo `K`).
    pub fn as_haar_shift(&self) -> Option<(Subgroup, Element)> {
        let g = &self.group;
        let f = self.char_function();
        let mut e_members = Vec::new();
        for y in g.elements() {
            let v = f.value(&y);
            if v.abs_squared().is_one() {
                e_members.push(y);
            } else if !v.is_zero() {
                return None;
            }
        }
        if !crate::group::is_closed(g, &e_members) {
            return None;
        }
        let x = g.elements().find(|x| {
            e_members.iter().all(|y| {
                *f.value(y) == CyclotomicValue::root_of_unity(g.exponent(), g.pairing_exponent(x, y))
            })
        })?;
        let e_sub = Subgroup::from_member_list(g.clone(), e_members);
        let k = e_sub.annihilator();
        let rebuilt = Distribution::haar(&k)
            .convolve(&Distribution::degenerate(g, &x).ok()?)
            .ok()?;
        (rebuilt == *self).then_some((k, x))
    }

    /// The unit set `E = {y : μ̂(y) = 1}`, which is always a subgroup, with
    /// the support check `σ(μ) ⊆ A(X, E)`. Failure of either assertion
    /// signals an arithmetic bug, not a data error, and panics.
    pub fn unit_set(&self) -> Subgroup {
        let g = &self.group;
        let f = self.char_function();
        let members: Vec<Element> = g
            .elements()
            .filter(|y| f.value(y).is_one())
            .collect();
        assert!(
            crate::group::is_closed(g, &members),
            "unit set is not a subgroup"
        );
        let e = Subgroup::from_member_list(g.clone(), members);
        for x in self.support() {
            for y in e.members() {
                assert_eq!(
                    g.pairing_exponent(x, y),
                    0,
                    "support escapes the annihilator of the unit set"
                );
            }
        }
        e
    }

    /// Deterministic pseudo-random distribution, reproducible from `seed`.
    ///
    /// A support mask keeps roughly three quarters of the elements, then
    /// integer weights below `denominator_bound` are normalized exactly.
    pub fn sample(group: &FiniteAbelianGroup, seed: u64, denominator_bound: u64) -> Self {
        assert!(
            denominator_bound >= group.order(),
            "denominator bound below group order"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<Element> = group.elements().collect();
        loop {
            let mut mass: BTreeMap<Element, Rational> = BTreeMap::new();
            let mut total: u64 = 0;
            for e in &all {
                if rng.gen_range(0..4u8) == 0 {
                    continue;
                }
                let w = rng.gen_range(1..=denominator_bound);
                total += w;
                mass.insert(e.clone(), Rational::new((w as i64).into(), 1.into()));
            }
            if total == 0 {
                continue;
            }
            let t = Rational::new((total as i64).into(), 1.into());
            for m in mass.values_mut() {
                *m /= &t;
            }
            return Distribution {
                group: group.clone(),
                mass,
            };
        }
    }
}

impl CharFunction {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn value(&self, y: &Element) -> &CyclotomicValue {
        self.values
            .get(y)
            .expect("characteristic function is total on the dual")
    }

    pub fn values(&self) -> &BTreeMap<Element, CyclotomicValue> {
        &self.values
    }

    /// Assemble a transform from explicit values (used by model restrictions
    /// and by tests; `inverse` validates the result).
    pub fn from_values(
        group: FiniteAbelianGroup,
        values: BTreeMap<Element, CyclotomicValue>,
    ) -> Result<Self> {
        if values.len() as u64 != group.order() {
            return Err(Error::InvalidCharFunction(
                "transform must be total on the dual".into(),
            ));
        }
        for y in values.keys() {
            group
                .check_element(y)
                .map_err(|_| Error::InvalidCharFunction(format!("element {y} not in dual")))?;
        }
        Ok(CharFunction { group, values })
    }

    /// Fourier inversion: `mass(x) = (1/|G|)·Σ_y f(y)·conj((x, y))`.
    ///
    /// Rejects transforms whose inverse has a negative, non-rational, or
    /// non-normalized mass; this doubles as a validity check in tests.
    pub fn inverse(&self) -> Result<Distribution> {
        let g = &self.group;
        let n = g.exponent();
        let inv_order = Rational::new(1.into(), (g.order() as i64).into());
        let mut mass = BTreeMap::new();
        for x in g.elements() {
            let mut acc = CyclotomicValue::zero(n);
            for (y, v) in &self.values {
                let e = g.pairing_exponent(&x, y);
                let root = CyclotomicValue::root_of_unity(n, (n - e) % n);
                acc = acc.add(&v.mul(&root));
            }
            let m = acc
                .as_rational()
                .ok_or_else(|| Error::InvalidCharFunction(format!("non-rational mass at {x}")))?
                * &inv_order;
            if m.is_negative() {
                return Err(Error::InvalidCharFunction(format!(
                    "negative mass {m} at {x}"
                )));
            }
            if !m.is_zero() {
                mass.insert(x, m);
            }
        }
        Distribution::new(g.clone(), mass)
            .map_err(|e| Error::InvalidCharFunction(e.to_string()))
    }
}

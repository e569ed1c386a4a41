//! The Heyde symmetry condition for two independent group-valued random
//! variables: is the conditional distribution of `L2 = ξ1 + αξ2` given
//! `L1 = ξ1 + ξ2` symmetric?
//!
//! Two independent checkers decide the condition exactly:
//!
//! * the joint-law oracle compares the laws of `(L1, L2)` and `(L1, −L2)`
//!   as exact mass functions on the product carrier;
//! * the dual checker tests the functional equation
//!   `μ̂1(u+v)·μ̂2(u+α̃v) = μ̂1(u−v)·μ̂2(u−α̃v)` over the whole dual.
//!
//! The two must always agree; a disagreement is an arithmetic bug. On top
//! of the checkers sit the Haar-shift conclusion, counterexample
//! generators for groups with 2-torsion and for automorphisms with
//! `Ker(I+α) ≠ {0}`, and a seeded random search.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::{CharFunction, Distribution};
use crate::error::{Error, Result};
use crate::group::{
    condition_1_holds, enumerate_automorphisms, pair, unpair, Element, FiniteAbelianGroup,
    Homomorphism, Subgroup,
};
use crate::rational::{rat, Rational};

/// One problem instance: a group, an automorphism and the two laws.
#[derive(Clone, Debug)]
pub struct HeydeInstance {
    group: FiniteAbelianGroup,
    alpha: Homomorphism,
    mu1: Distribution,
    mu2: Distribution,
}

/// The outcome of a check, with a reproducible witness on failure and the
/// Haar-shift decomposition when one was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub decomposition: Option<Decomposition>,
}

/// Either a dual pair `(u, v)` where the functional equation fails, or a
/// point of the product carrier where the two joint laws differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub u: Element,
    pub v: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub subgroup: Subgroup,
    pub x1: Element,
    pub x2: Element,
}

/// The factorization over the 2-part and odd part of the group.
#[derive(Clone, Debug)]
pub struct TwoOddFactorization {
    /// Distributions on the 2-part, one per variable.
    pub rho1: Distribution,
    pub rho2: Distribution,
    /// A subgroup of the odd part.
    pub subgroup: Subgroup,
    /// Shifts in the odd part.
    pub g1: Element,
    pub g2: Element,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
            decomposition: None,
        }
    }

    fn fail(u: Element, v: Element) -> Self {
        Verdict {
            holds: false,
            witness: Some(Witness { u, v }),
            decomposition: None,
        }
    }
}

impl HeydeInstance {
    pub fn new(
        group: FiniteAbelianGroup,
        alpha: Homomorphism,
        mu1: Distribution,
        mu2: Distribution,
    ) -> Result<Self> {
        if alpha.source() != &group || alpha.target() != &group {
            return Err(Error::GroupMismatch);
        }
        if !alpha.is_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        if mu1.group() != &group || mu2.group() != &group {
            return Err(Error::GroupMismatch);
        }
        Ok(HeydeInstance {
            group,
            alpha,
            mu1,
            mu2,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn alpha(&self) -> &Homomorphism {
        &self.alpha
    }

    pub fn mu1(&self) -> &Distribution {
        &self.mu1
    }

    pub fn mu2(&self) -> &Distribution {
        &self.mu2
    }

    /// Exact law of `(a·ξ1 + b·ξ2, c·ξ1 + d·ξ2)` on the product carrier.
    fn linear_forms_law(
        &self,
        a: &Homomorphism,
        b: &Homomorphism,
        c: &Homomorphism,
        d: &Homomorphism,
    ) -> Distribution {
        let g = &self.group;
        let gg = g.direct_product(g);
        let mut mass: BTreeMap<Element, Rational> = BTreeMap::new();
        for (x1, m1) in self.mu1.mass() {
            let ax1 = a.apply(x1);
            let cx1 = c.apply(x1);
            for (x2, m2) in self.mu2.mass() {
                let left = g.add(&ax1, &b.apply(x2));
                let right = g.add(&cx1, &d.apply(x2));
                *mass
                    .entry(pair(&left, &right))
                    .or_insert_with(Rational::zero) += m1 * m2;
            }
        }
        Distribution::new(gg, mass).expect("image of a product law is a law")
    }

    /// Exact law of `(L1, L2) = (ξ1 + ξ2, ξ1 + αξ2)`.
    pub fn joint_distribution(&self) -> Distribution {
        let id = Homomorphism::identity(&self.group);
        self.linear_forms_law(&id, &id, &id, &self.alpha)
    }

    /// The joint-law oracle: `(L1, L2)` and `(L1, −L2)` must be identically
    /// distributed. The witness is the lexicographically first point of the
    /// product carrier where the masses differ.
    pub fn symmetry_holds(&self) -> Verdict {
        let id = Homomorphism::identity(&self.group);
        let plus = self.linear_forms_law(&id, &id, &id, &self.alpha);
        let minus = self.linear_forms_law(&id, &id, &id.neg(), &self.alpha.neg());
        if plus == minus {
            return Verdict::pass();
        }
        let r = self.group.rank();
        let keys = plus.mass().keys().chain(minus.mass().keys());
        let first = keys
            .filter(|e| plus.mass_at(e) != minus.mass_at(e))
            .min()
            .expect("laws differ at some point")
            .clone();
        let (u, v) = unpair(&first, r);
        Verdict::fail(u, v)
    }

    /// The dual checker applied to this instance's own transforms.
    pub fn dual_equation(&self) -> Verdict {
        dual_symmetry_equation(
            &self.mu1.char_function(),
            &self.mu2.char_function(),
            &self.alpha.adjoint(),
        )
        .expect("instance transforms share the dual carrier")
    }

    /// The two checkers must coincide on every instance; `false` signals an
    /// implementation bug, not a property of the input.
    pub fn checkers_agree(&self) -> bool {
        self.symmetry_holds().holds == self.dual_equation().holds
    }

    /// When symmetry holds, try to write both laws as shifts of a common
    /// Haar distribution `m_K` with `α(K) = K`.
    ///
    /// On odd-order groups with `Ker(I+α) = {0}` this always succeeds; on
    /// other groups emptiness is informative.
    pub fn haar_shift_conclusion(&self) -> Result<Option<Decomposition>> {
        if !self.symmetry_holds().holds {
            return Err(Error::Precondition(
                "conclusion requires the symmetry condition to hold".into(),
            ));
        }
        let Some((k1, x1)) = self.mu1.as_haar_shift() else {
            return Ok(None);
        };
        let Some((k2, x2)) = self.mu2.as_haar_shift() else {
            return Ok(None);
        };
        if k1.members() != k2.members() {
            return Ok(None);
        }
        if self.alpha.apply_subgroup(&k1).members() != k1.members() {
            return Ok(None);
        }
        Ok(Some(Decomposition {
            subgroup: k1,
            x1,
            x2,
        }))
    }

    /// Whether the derived forms `M1 = (I+α)ξ1 + 2αξ2` and
    /// `M2 = 2ξ1 + (I+α)ξ2` are independent, by exact product
    /// factorization of their joint law.
    pub fn derived_forms_independent(&self) -> bool {
        let g = &self.group;
        let id = Homomorphism::identity(g);
        let i_plus = id.add(&self.alpha);
        let two = Homomorphism::scaling(g, 2);
        let two_alpha = two.compose(&self.alpha);
        let joint = self.linear_forms_law(&i_plus, &two_alpha, &two, &i_plus);
        let r = g.rank();
        let m1 = joint.map_elements(g, |e| unpair(e, r).0);
        let m2 = joint.map_elements(g, |e| unpair(e, r).1);
        joint == m1.product(&m2)
    }

    /// Factor both laws as `μ_j = ρ_j * m_K * E_{g_j}` with `ρ_j` on the
    /// 2-part and `K`, `g_j` in the odd part, verified by exact
    /// reconstruction.
    pub fn factorize_two_odd(&self) -> Result<Option<TwoOddFactorization>> {
        if !self.symmetry_holds().holds {
            return Err(Error::Precondition(
                "factorization requires the symmetry condition to hold".into(),
            ));
        }
        let split = self.group.split_two_odd();
        let odd1 = self.mu1.map_elements(&split.odd_part, |e| split.project_odd(e));
        let odd2 = self.mu2.map_elements(&split.odd_part, |e| split.project_odd(e));
        let Some((k1, g1)) = odd1.as_haar_shift() else {
            return Ok(None);
        };
        let Some((k2, g2)) = odd2.as_haar_shift() else {
            return Ok(None);
        };
        if k1.members() != k2.members() {
            return Ok(None);
        }
        let rho1 = self.mu1.map_elements(&split.two_part, |e| split.project_two(e));
        let rho2 = self.mu2.map_elements(&split.two_part, |e| split.project_two(e));
        // reconstruct and verify: the blocks must be exactly independent
        let haar_shift1 = Distribution::haar(&k1)
            .convolve(&Distribution::degenerate(&split.odd_part, &g1)?)?;
        let haar_shift2 = Distribution::haar(&k2)
            .convolve(&Distribution::degenerate(&split.odd_part, &g2)?)?;
        for (mu, rho, odd) in [(&self.mu1, &rho1, &haar_shift1), (&self.mu2, &rho2, &haar_shift2)] {
            let mut rebuilt: BTreeMap<Element, Rational> = BTreeMap::new();
            for (a, ma) in rho.mass() {
                for (b, mb) in odd.mass() {
                    rebuilt.insert(split.combine(a, b), ma * mb);
                }
            }
            if Distribution::new(self.group.clone(), rebuilt)? != *mu {
                return Ok(None);
            }
        }
        Ok(Some(TwoOddFactorization {
            rho1,
            rho2,
            subgroup: k1,
            g1,
            g2,
        }))
    }
}

/// The functional equation on characteristic functions over the dual:
/// `f1(u+v)·f2(u+α̃v) = f1(u−v)·f2(u−α̃v)` for all dual `u, v`.
/// The witness is the lexicographically first failing pair.
pub fn dual_symmetry_equation(
    f1: &CharFunction,
    f2: &CharFunction,
    alpha_tilde: &Homomorphism,
) -> Result<Verdict> {
    let g = f1.group();
    if f2.group() != g || alpha_tilde.source() != g || alpha_tilde.target() != g {
        return Err(Error::GroupMismatch);
    }
    if !alpha_tilde.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    for u in g.elements() {
        for v in g.elements() {
            let av = alpha_tilde.apply(&v);
            let lhs = {
                let a = f1.value(&g.add(&u, &v));
                if a.is_zero() {
                    None
                } else {
                    let b = f2.value(&g.add(&u, &av));
                    if b.is_zero() {
                        None
                    } else {
                        Some(a.mul(b))
                    }
                }
            };
            let rhs = {
                let a = f1.value(&g.sub(&u, &v));
                if a.is_zero() {
                    None
                } else {
                    let b = f2.value(&g.sub(&u, &av));
                    if b.is_zero() {
                        None
                    } else {
                        Some(a.mul(b))
                    }
                }
            };
            let equal = match (&lhs, &rhs) {
                (None, None) => true,
                (Some(a), Some(b)) => a == b,
                (Some(a), None) => a.is_zero(),
                (None, Some(b)) => b.is_zero(),
            };
            if !equal {
                return Ok(Verdict::fail(u, v));
            }
        }
    }
    Ok(Verdict::pass())
}

/// For iid Haar(`K`) inputs, symmetry is equivalent to `(I−α)(K) = K`.
/// Both sides are computed independently, must agree (a mismatch panics as
/// an arithmetic bug), and the shared truth value is returned.
///
/// Preconditions: `α` is an automorphism of the odd-order parent of `K`
/// satisfying `Ker(I+α) = {0}`.
pub fn haar_symmetry_biconditional(k: &Subgroup, alpha: &Homomorphism) -> Result<bool> {
    let g = k.parent();
    if alpha.source() != g || alpha.target() != g {
        return Err(Error::GroupMismatch);
    }
    if !condition_1_holds(alpha)? {
        return Err(Error::Precondition("Ker(I + alpha) must be trivial".into()));
    }
    if !g.is_odd_order() {
        return Err(Error::Precondition("group must have odd order".into()));
    }
    let haar = Distribution::haar(k);
    let inst = HeydeInstance::new(g.clone(), alpha.clone(), haar.clone(), haar)?;
    let symmetric = inst.symmetry_holds().holds;
    let i_minus = Homomorphism::identity(g).sub(alpha);
    let moved = i_minus.apply_subgroup(k);
    let surjective_on_k = moved.members() == k.members();
    assert_eq!(
        symmetric, surjective_on_k,
        "iid Haar biconditional failed on {g}"
    );
    Ok(symmetric)
}

/// A symmetric instance supported on the subgroup generated by the
/// elements of order 2, with laws that are not Haar shifts.
///
/// On that subgroup every element is its own negative, so `−L2 = L2`
/// identically and symmetry holds for any masses; skewed two-point masses
/// keep the laws outside the Haar-shift class.
pub fn order2_counterexample(g: &FiniteAbelianGroup) -> Result<HeydeInstance> {
    if !g.has_order2_elements() {
        return Err(Error::Precondition("group has no elements of order 2".into()));
    }
    let torsion = g.two_torsion_subgroup();
    let t0 = torsion.members()[1].clone();
    let mut mass = BTreeMap::new();
    mass.insert(g.zero(), rat(3, 4));
    mass.insert(t0, rat(1, 4));
    let mu = Distribution::new(g.clone(), mass)?;
    HeydeInstance::new(
        g.clone(),
        Homomorphism::identity(g),
        mu.clone(),
        mu,
    )
}

/// A symmetric iid instance supported on `K = Ker(I+α)` when that kernel
/// is nontrivial. There `αk = −k`, so `L2 = ξ1 − ξ2` and any iid law is
/// symmetric; the law is chosen outside the Haar-shift class whenever
/// `|K| > 2` allows.
pub fn kernel_counterexample(g: &FiniteAbelianGroup, alpha: &Homomorphism) -> Result<HeydeInstance> {
    if alpha.source() != g || alpha.target() != g {
        return Err(Error::GroupMismatch);
    }
    if !alpha.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let kernel = Homomorphism::identity(g).add(alpha).kernel();
    if kernel.is_trivial() {
        return Err(Error::Precondition("Ker(I + alpha) is trivial".into()));
    }
    let k0 = kernel.members()[1].clone();
    let mut mass = BTreeMap::new();
    if kernel.order() > 2 {
        // two-point support {0, k0} with ord(k0) > 2 is not a coset of a
        // subgroup, so the law cannot be a Haar shift
        mass.insert(g.zero(), rat(1, 2));
        mass.insert(k0, rat(1, 2));
    } else {
        mass.insert(g.zero(), rat(3, 4));
        mass.insert(k0, rat(1, 4));
    }
    let mu = Distribution::new(g.clone(), mass)?;
    HeydeInstance::new(g.clone(), alpha.clone(), mu.clone(), mu)
}

/// Seeded random sweep: sample `(α, μ1, μ2)` and retain the instances that
/// pass symmetry without admitting a Haar-shift conclusion.
///
/// Candidates are sharded by index and may be evaluated concurrently;
/// results are merged in index order, so parallel and serial runs agree.
/// Half of the candidates are sampled iid (`μ2 = μ1`), which is the regime
/// where kernel-type counterexamples live.
pub fn search_counterexamples(
    g: &FiniteAbelianGroup,
    seed: u64,
    budget: u64,
) -> Vec<HeydeInstance> {
    let autos = enumerate_automorphisms(g);
    let bound = 4 * g.order().max(1);
    (0..budget)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let alpha = autos[rng.gen_range(0..autos.len())].clone();
            let mu1 = Distribution::sample(g, rng.gen::<u64>(), bound);
            let mu2 = if rng.gen_range(0..2u8) == 0 {
                mu1.clone()
            } else {
                Distribution::sample(g, rng.gen::<u64>(), bound)
            };
            let inst = HeydeInstance::new(g.clone(), alpha, mu1, mu2).ok()?;
            if inst.symmetry_holds().holds
                && inst
                    .haar_shift_conclusion()
                    .expect("symmetry just verified")
                    .is_none()
            {
                Some(inst)
            } else {
                None
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::make(&[n]).unwrap()
    }

    fn el(g: &FiniteAbelianGroup, r: &[u64]) -> Element {
        g.element(r.to_vec()).unwrap()
    }

    fn iid_haar_full(g: &FiniteAbelianGroup, c: i64) -> HeydeInstance {
        let haar = Distribution::haar(&Subgroup::full(g.clone()));
        HeydeInstance::new(g.clone(), Homomorphism::scaling(g, c), haar.clone(), haar).unwrap()
    }

    #[test]
    fn joint_distribution_examples() {
        // mult-by-2 on Z5: (xi1, xi2) -> (L1, L2) is bijective, so the
        // joint law of iid uniforms is uniform on the whole product
        let g = z(5);
        let inst = iid_haar_full(&g, 2);
        let joint = inst.joint_distribution();
        assert_eq!(joint.mass().len(), 25);
        assert!(joint.mass().values().all(|m| *m == rat(1, 25)));

        // degenerate inputs give a point mass at (a1+a2, a1+alpha a2)
        let a1 = el(&g, &[3]);
        let a2 = el(&g, &[4]);
        let inst = HeydeInstance::new(
            g.clone(),
            Homomorphism::scaling(&g, 2),
            Distribution::degenerate(&g, &a1).unwrap(),
            Distribution::degenerate(&g, &a2).unwrap(),
        )
        .unwrap();
        let joint = inst.joint_distribution();
        let expected = pair(&el(&g, &[2]), &el(&g, &[1]));
        assert_eq!(joint.mass_at(&expected), rat(1, 1));
        assert_eq!(joint.mass().len(), 1);

        // identity on Z3 concentrates the joint law on the diagonal
        let g3 = z(3);
        let inst = iid_haar_full(&g3, 1);
        let joint = inst.joint_distribution();
        for t in g3.elements() {
            assert_eq!(joint.mass_at(&pair(&t, &t)), rat(1, 3));
        }
        assert_eq!(joint.mass().len(), 3);
    }

    #[test]
    fn symmetry_examples() {
        let g5 = z(5);
        assert!(iid_haar_full(&g5, 2).symmetry_holds().holds);

        let g3 = z(3);
        let v = iid_haar_full(&g3, 1).symmetry_holds();
        assert!(!v.holds);
        // diagonal vs anti-diagonal laws first differ at (1, 1)
        let w = v.witness.unwrap();
        assert_eq!((w.u, w.v), (el(&g3, &[1]), el(&g3, &[1])));

        // on Z2 negation is the identity, so symmetry always holds
        let g2 = z(2);
        for seed in 0..5 {
            let mu1 = Distribution::sample(&g2, seed, 8);
            let mu2 = Distribution::sample(&g2, seed + 100, 8);
            let inst =
                HeydeInstance::new(g2.clone(), Homomorphism::identity(&g2), mu1, mu2).unwrap();
            assert!(inst.symmetry_holds().holds);
        }
    }

    #[test]
    fn dual_equation_examples() {
        // v = 0 makes both sides identical for any transforms
        let g = z(5);
        let f1 = Distribution::sample(&g, 1, 20).char_function();
        let f2 = Distribution::sample(&g, 2, 20).char_function();
        for alpha in enumerate_automorphisms(&g) {
            let verdict = dual_symmetry_equation(&f1, &f2, &alpha.adjoint()).unwrap();
            if let Some(w) = verdict.witness {
                assert_ne!(w.v, g.zero(), "v = 0 can never witness a failure");
            }
        }

        // indicator spectrum of the full Haar law on Z3, identity map:
        // fails first at (u, v) = (1, 1)
        let g3 = z(3);
        let haar = Distribution::haar(&Subgroup::full(g3.clone()));
        let f = haar.char_function();
        let verdict =
            dual_symmetry_equation(&f, &f, &Homomorphism::identity(&g3)).unwrap();
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        assert_eq!((w.u, w.v), (el(&g3, &[1]), el(&g3, &[1])));

        // mult-by-2 on Z5 with the full Haar law holds on all 25 pairs
        let g5 = z(5);
        let haar5 = Distribution::haar(&Subgroup::full(g5.clone()));
        let f5 = haar5.char_function();
        let alpha = Homomorphism::scaling(&g5, 2);
        assert!(dual_symmetry_equation(&f5, &f5, &alpha.adjoint())
            .unwrap()
            .holds);
    }

    #[test]
    fn checkers_agree_on_seeded_instances() {
        for g in [z(3), z(5), FiniteAbelianGroup::make(&[2, 9]).unwrap()] {
            let autos = enumerate_automorphisms(&g);
            for (i, alpha) in autos.iter().enumerate() {
                for seed in 0..4u64 {
                    let mu1 = Distribution::sample(&g, seed * 31 + i as u64, 4 * g.order());
                    let mu2 = Distribution::sample(&g, seed * 57 + i as u64, 4 * g.order());
                    let inst =
                        HeydeInstance::new(g.clone(), alpha.clone(), mu1, mu2).unwrap();
                    assert!(inst.checkers_agree());
                }
            }
        }
    }

    #[test]
    fn haar_shift_conclusion_examples() {
        let g5 = z(5);
        let inst = iid_haar_full(&g5, 2);
        let d = inst.haar_shift_conclusion().unwrap().unwrap();
        assert_eq!(d.subgroup.order(), 5);
        assert_eq!(d.x1, g5.zero());
        assert_eq!(d.x2, g5.zero());

        // 2-torsion: symmetric but not a Haar shift
        let g2 = z(2);
        let inst = order2_counterexample(&g2).unwrap();
        assert!(inst.symmetry_holds().holds);
        assert!(inst.haar_shift_conclusion().unwrap().is_none());

        // shifted Haar laws on Z9 with x1 + alpha(x2) = 0
        let g9 = z(9);
        let k = Subgroup::generated_by(g9.clone(), &[el(&g9, &[3])]).unwrap();
        let alpha = Homomorphism::scaling(&g9, 2);
        let x2 = el(&g9, &[1]);
        let x1 = g9.neg(&alpha.apply(&x2));
        let mu1 = Distribution::haar(&k)
            .convolve(&Distribution::degenerate(&g9, &x1).unwrap())
            .unwrap();
        let mu2 = Distribution::haar(&k)
            .convolve(&Distribution::degenerate(&g9, &x2).unwrap())
            .unwrap();
        let inst = HeydeInstance::new(g9.clone(), alpha, mu1.clone(), mu2.clone()).unwrap();
        assert!(inst.symmetry_holds().holds);
        let d = inst.haar_shift_conclusion().unwrap().unwrap();
        assert_eq!(d.subgroup.members(), k.members());
        // exact reconstruction of both laws from the decomposition
        let rebuilt1 = Distribution::haar(&d.subgroup)
            .convolve(&Distribution::degenerate(&g9, &d.x1).unwrap())
            .unwrap();
        let rebuilt2 = Distribution::haar(&d.subgroup)
            .convolve(&Distribution::degenerate(&g9, &d.x2).unwrap())
            .unwrap();
        assert_eq!(rebuilt1, mu1);
        assert_eq!(rebuilt2, mu2);
    }

    #[test]
    fn conclusion_requires_symmetry() {
        let inst = iid_haar_full(&z(3), 1);
        assert!(matches!(
            inst.haar_shift_conclusion(),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn haar_biconditional_examples() {
        let g5 = z(5);
        let full5 = Subgroup::full(g5.clone());
        assert!(haar_symmetry_biconditional(&full5, &Homomorphism::scaling(&g5, 2)).unwrap());

        // mult-by-4 on Z9: (I - alpha) = mult-by-(-3), image {0,3,6} != Z9
        let g9 = z(9);
        let full9 = Subgroup::full(g9.clone());
        assert!(!haar_symmetry_biconditional(&full9, &Homomorphism::scaling(&g9, 4)).unwrap());

        let trivial = Subgroup::trivial(g9.clone());
        assert!(haar_symmetry_biconditional(&trivial, &Homomorphism::scaling(&g9, 4)).unwrap());

        // precondition violations
        assert!(haar_symmetry_biconditional(&full9, &Homomorphism::scaling(&g9, 8)).is_err());
        let g2 = z(2);
        let full2 = Subgroup::full(g2.clone());
        assert!(haar_symmetry_biconditional(&full2, &Homomorphism::identity(&g2)).is_err());
    }

    #[test]
    fn order2_counterexample_examples() {
        for orders in [vec![2], vec![4], vec![2, 9]] {
            let g = FiniteAbelianGroup::make(&orders).unwrap();
            let inst = order2_counterexample(&g).unwrap();
            assert!(inst.symmetry_holds().holds);
            assert!(inst.checkers_agree());
            assert!(inst.mu1.as_haar_shift().is_none());
            // supported on the subgroup generated by order-2 elements
            let torsion = g.two_torsion_subgroup();
            assert!(inst.mu1.support().all(|x| torsion.contains(x)));
        }
        assert!(order2_counterexample(&z(9)).is_err());
    }

    #[test]
    fn kernel_counterexample_examples() {
        // alpha = -I on Z3: kernel is the whole group
        let g3 = z(3);
        let inst = kernel_counterexample(&g3, &Homomorphism::scaling(&g3, 2)).unwrap();
        assert!(inst.symmetry_holds().holds);
        assert!(inst.mu1.as_haar_shift().is_none());
        assert_eq!(inst.mu1.mass_at(&g3.zero()), rat(1, 2));

        let g9 = z(9);
        let inst = kernel_counterexample(&g9, &Homomorphism::scaling(&g9, 8)).unwrap();
        assert!(inst.symmetry_holds().holds);
        assert!(inst.mu1.as_haar_shift().is_none());

        let g5 = z(5);
        let inst = kernel_counterexample(&g5, &Homomorphism::scaling(&g5, 4)).unwrap();
        assert!(inst.symmetry_holds().holds);
        assert!(inst.mu1.as_haar_shift().is_none());

        // trivial kernel is rejected
        assert!(kernel_counterexample(&g5, &Homomorphism::scaling(&g5, 2)).is_err());
    }

    #[test]
    fn derived_forms_independent_examples() {
        let g5 = z(5);
        assert!(iid_haar_full(&g5, 2).derived_forms_independent());

        // every symmetric instance encountered must factor
        let g3 = z(3);
        let symmetric = kernel_counterexample(&g3, &Homomorphism::scaling(&g3, 2)).unwrap();
        assert!(symmetric.derived_forms_independent());
        let g2 = z(2);
        let symmetric2 = order2_counterexample(&g2).unwrap();
        assert!(symmetric2.derived_forms_independent());
    }

    #[test]
    fn two_odd_factorization_examples() {
        // X = Z2 x Z9, alpha = identity on Z2 and mult-by-2 on Z9
        let g = FiniteAbelianGroup::make(&[2, 9]).unwrap();
        let alpha = Homomorphism::new(g.clone(), g.clone(), vec![vec![1, 0], vec![0, 2]]).unwrap();
        let split = g.split_two_odd();
        let rho = {
            let mut mass = BTreeMap::new();
            mass.insert(split.two_part.element(vec![0]).unwrap(), rat(3, 4));
            mass.insert(split.two_part.element(vec![1]).unwrap(), rat(1, 4));
            Distribution::new(split.two_part.clone(), mass).unwrap()
        };
        let k = Subgroup::generated_by(
            split.odd_part.clone(),
            &[split.odd_part.element(vec![3]).unwrap()],
        )
        .unwrap();
        let block = rho.product(&Distribution::haar(&k));
        // the product carrier has the same coordinates as g here
        let mu = Distribution::new(g.clone(), block.mass().clone()).unwrap();
        let inst = HeydeInstance::new(g.clone(), alpha, mu.clone(), mu).unwrap();
        assert!(inst.symmetry_holds().holds);
        let f = inst.factorize_two_odd().unwrap().unwrap();
        assert_eq!(f.rho1, rho);
        assert_eq!(f.rho2, rho);
        assert_eq!(f.subgroup.members(), k.members());
        assert_eq!(f.g1, split.odd_part.zero());

        // odd-order group: the factorization reduces to the conclusion
        let g5 = z(5);
        let inst = iid_haar_full(&g5, 2);
        let f = inst.factorize_two_odd().unwrap().unwrap();
        assert_eq!(f.subgroup.order(), 5);
        assert!(f.rho1.group().rank() == 0);

        // degenerate laws factor with trivial K
        let x = el(&g5, &[2]);
        let alpha5 = Homomorphism::scaling(&g5, 2);
        let x2 = el(&g5, &[1]);
        let x1 = g5.neg(&alpha5.apply(&x2));
        let _ = x;
        let inst = HeydeInstance::new(
            g5.clone(),
            alpha5,
            Distribution::degenerate(&g5, &x1).unwrap(),
            Distribution::degenerate(&g5, &x2).unwrap(),
        )
        .unwrap();
        assert!(inst.symmetry_holds().holds);
        let f = inst.factorize_two_odd().unwrap().unwrap();
        assert!(f.subgroup.is_trivial());
        assert_eq!(f.g1, x1);
        assert_eq!(f.g2, x2);
    }

    #[test]
    fn search_examples() {
        // condition-(1) automorphisms on Z5 never yield counterexamples
        let g5 = z(5);
        let found = search_counterexamples(&g5, 42, 10_000);
        for inst in &found {
            // anything retained must violate condition (1)
            assert!(!condition_1_holds(&inst.alpha).unwrap());
        }

        // Z2 finds them immediately
        let g2 = z(2);
        assert!(!search_counterexamples(&g2, 42, 100).is_empty());

        // Z3 with alpha = -I admitted finds the kernel construction
        let g3 = z(3);
        let found3 = search_counterexamples(&g3, 42, 1000);
        assert!(!found3.is_empty());
        assert!(found3
            .iter()
            .all(|i| !condition_1_holds(&i.alpha).unwrap()));

        // determinism and sharded merge: same seed, same instances
        let again = search_counterexamples(&g3, 42, 1000);
        assert_eq!(found3.len(), again.len());
        for (a, b) in found3.iter().zip(&again) {
            assert_eq!(a.alpha, b.alpha);
            assert_eq!(a.mu1, b.mu1);
            assert_eq!(a.mu2, b.mu2);
        }
    }

    #[test]
    fn symmetrization_preserves_symmetry() {
        // if symmetry holds for (mu1, mu2, alpha) it holds for the
        // symmetrized pair as well
        let g = z(5);
        let inst = iid_haar_full(&g, 2);
        assert!(inst.symmetry_holds().holds);
        let nu1 = inst.mu1.convolve(&inst.mu1.reflect()).unwrap();
        let nu2 = inst.mu2.convolve(&inst.mu2.reflect()).unwrap();
        let sym = HeydeInstance::new(g, inst.alpha.clone(), nu1, nu2).unwrap();
        assert!(sym.symmetry_holds().holds);
    }

    #[test]
    fn symmetrizations_collapse_to_a_common_haar_law() {
        // on odd-order groups under Ker(I+alpha) = {0}, a symmetric
        // instance has both symmetrizations equal to one Haar law, with
        // a 0/1-valued spectrum
        for g in [z(5), z(9), FiniteAbelianGroup::make(&[3, 3]).unwrap()] {
            for alpha in enumerate_automorphisms(&g) {
                if !condition_1_holds(&alpha).unwrap() {
                    continue;
                }
                for k in crate::group::enumerate_subgroups(&g) {
                    let haar = Distribution::haar(&k);
                    let x2 = g.element_at(1 % g.order());
                    let x1 = g.neg(&alpha.apply(&x2));
                    let mu1 = haar
                        .convolve(&Distribution::degenerate(&g, &x1).unwrap())
                        .unwrap();
                    let mu2 = haar
                        .convolve(&Distribution::degenerate(&g, &x2).unwrap())
                        .unwrap();
                    let inst =
                        HeydeInstance::new(g.clone(), alpha.clone(), mu1, mu2).unwrap();
                    if !inst.symmetry_holds().holds {
                        continue;
                    }
                    let nu1 = inst.mu1.convolve(&inst.mu1.reflect()).unwrap();
                    let nu2 = inst.mu2.convolve(&inst.mu2.reflect()).unwrap();
                    assert_eq!(nu1, nu2);
                    let d = inst.haar_shift_conclusion().unwrap().unwrap();
                    assert_eq!(nu1, Distribution::haar(&d.subgroup));
                    let f = nu1.char_function();
                    for y in g.elements() {
                        let v = f.value(&y);
                        assert!(v.is_zero() || v.is_one());
                    }
                }
            }
        }
    }

    #[test]
    fn shift_covariance_preserves_verdict() {
        // replacing mu_j by mu_j * E_{x_j} with x1 + alpha(x2) = 0 keeps
        // the symmetry verdict
        for g in [z(5), z(9)] {
            for alpha in enumerate_automorphisms(&g).into_iter().take(4) {
                for seed in 0..3u64 {
                    let mu1 = Distribution::sample(&g, seed, 4 * g.order());
                    let mu2 = Distribution::sample(&g, seed + 9, 4 * g.order());
                    let base =
                        HeydeInstance::new(g.clone(), alpha.clone(), mu1.clone(), mu2.clone())
                            .unwrap();
                    let x2 = g.element(vec![seed % 3 + 1; g.rank()]).unwrap();
                    let x1 = g.neg(&alpha.apply(&x2));
                    let shifted = HeydeInstance::new(
                        g.clone(),
                        alpha.clone(),
                        mu1.convolve(&Distribution::degenerate(&g, &x1).unwrap())
                            .unwrap(),
                        mu2.convolve(&Distribution::degenerate(&g, &x2).unwrap())
                            .unwrap(),
                    )
                    .unwrap();
                    assert_eq!(
                        base.symmetry_holds().holds,
                        shifted.symmetry_holds().holds
                    );
                }
            }
        }
    }
}

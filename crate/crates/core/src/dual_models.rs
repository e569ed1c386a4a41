//! Countable discrete dual groups with closed-form rational characteristic
//! functions.
//!
//! The compact groups behind these models are never materialized; the
//! functional equation lives entirely on the dual side, where elements are
//! either finitely supported sequences or exact rationals and every
//! characteristic-function value is a rational from a small finite set.
//!
//! Three models ship:
//!
//! * [`SequenceModel`]: the dual is the weak direct product of
//!   `Z(p^{k_n})` for an odd prime `p` and a nondecreasing ladder
//!   `k_1 ≤ k_2 ≤ …`; the transform is `1` at zero, `1−a` on the rest of
//!   the first level, `0` elsewhere. Verified exhaustively on the finite
//!   levels `B_m`.
//! * [`DyadicModel`]: the dual is `Z[1/2]`, the transform is supported on
//!   `{0, ±y0}`, and the map is multiplication by `−(p−1)`.
//! * [`RationalModel`]: the dual is `Q` with the distinguished subgroup
//!   `H = {m/5^n}`; the transform is `1` on `H^{(2)}`, `c` on the rest of
//!   `H`, `0` off `H`, and the equation reduces to
//!   `f(u+4v)f(u−v) = f(u−4v)f(u+v)`.
//!
//! Each verifier records the case split its proof uses and fails with a
//! witness if any pair violates either the equation or the case's expected
//! vanishing, so single-point mutations of the transform are always caught.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cyclotomic::CyclotomicValue;
use crate::distribution::CharFunction;
use crate::error::{Error, Result};
use crate::group::{prime_power, FiniteAbelianGroup, Homomorphism, Subgroup, DEFAULT_ORDER_CAP};
use crate::rational::{rat, strictly_between_zero_and_one, Rational};

/// Largest finite level that the exhaustive sequence verifier will accept.
const LEVEL_CAP: u64 = 5_000;

/// Outcome of a model verification, with the case tally of the underlying
/// argument and a reproducible witness on failure.
#[derive(Clone, Debug)]
pub struct ModelVerdict<P> {
    pub holds: bool,
    pub witness: Option<ModelWitness<P>>,
    pub pairs_checked: u64,
    pub case_counts: BTreeMap<&'static str, u64>,
}

#[derive(Clone, Debug)]
pub struct ModelWitness<P> {
    pub u: P,
    pub v: P,
    pub reason: String,
}

/// A closed-form characteristic function on a countable discrete dual:
/// total, rational-valued, and even.
pub trait ClosedFormCharFn {
    type Point;
    fn value(&self, y: &Self::Point) -> Rational;
    fn double(&self, y: &Self::Point) -> Self::Point;
}

/// Necessary-condition check for membership in the class
/// Gaussian * Haar-shift: any transform of that class satisfies
/// `|f(2y)| = |f(y)|⁴` wherever `f(y) ≠ 0` (the Gaussian factor's exponent
/// is quadratic, the Haar-shift factor's modulus is an indicator).
/// Returns `true` when `y` certifies a violation.
pub fn gaussian_haar_violation<F: ClosedFormCharFn>(f: &F, y: &F::Point) -> bool {
    let fy = f.value(y);
    if fy.is_zero() {
        return false;
    }
    let f2y = f.value(&f.double(y));
    let fy_abs = fy.abs();
    let fourth = (&fy_abs * &fy_abs) * (&fy_abs * &fy_abs);
    f2y.abs() != fourth
}

// ---------------------------------------------------------------------------
// Sequence model
// ---------------------------------------------------------------------------

/// The weak direct product of `Z(p^{k_n})`, `n = 1..=ladder.len()`, as far
/// as the finite ladder reaches. Elements are finitely supported sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceDual {
    p: u64,
    ladder: Vec<u32>,
    moduli: Vec<u64>,
}

/// A finitely supported sequence with `s_n ∈ Z(p^{k_n})`; trailing zeros
/// are trimmed so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqElement {
    coords: Vec<u64>,
}

impl SeqElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Supported on the first coordinate only (the subgroup `Z(p^{k_1})`).
    pub fn in_first_level(&self) -> bool {
        self.coords.len() <= 1
    }

    fn trim(mut coords: Vec<u64>) -> Self {
        while coords.last() == Some(&0) {
            coords.pop();
        }
        SeqElement { coords }
    }
}

impl SequenceDual {
    pub fn new(p: u64, ladder: &[u32]) -> Result<Self> {
        if p == 2 || prime_power(p) != Some((p, 1)) {
            return Err(Error::InvalidModel(format!("p = {p} must be an odd prime")));
        }
        if ladder.is_empty() || ladder.windows(2).any(|w| w[0] > w[1]) || ladder[0] == 0 {
            return Err(Error::InvalidModel(
                "ladder must be a nonempty nondecreasing sequence of positive exponents".into(),
            ));
        }
        let mut moduli = Vec::with_capacity(ladder.len());
        for &k in ladder {
            let m = p
                .checked_pow(k)
                .ok_or_else(|| Error::InvalidModel(format!("p^{k} overflows")))?;
            moduli.push(m);
        }
        Ok(SequenceDual {
            p,
            ladder: ladder.to_vec(),
            moduli,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ladder(&self) -> &[u32] {
        &self.ladder
    }

    pub fn depth(&self) -> usize {
        self.ladder.len()
    }

    pub fn modulus(&self, level: usize) -> u64 {
        self.moduli[level]
    }

    pub fn zero(&self) -> SeqElement {
        SeqElement { coords: vec![] }
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<SeqElement> {
        if coords.len() > self.depth() {
            return Err(Error::InvalidModel(format!(
                "sequence has {} coordinates, ladder depth is {}",
                coords.len(),
                self.depth()
            )));
        }
        let coords = coords
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &m)| c % m)
            .collect();
        Ok(SeqElement::trim(coords))
    }

    pub fn add(&self, a: &SeqElement, b: &SeqElement) -> SeqElement {
        let len = a.coords.len().max(b.coords.len());
        let coords = (0..len)
            .map(|i| {
                let x = a.coords.get(i).copied().unwrap_or(0);
                let y = b.coords.get(i).copied().unwrap_or(0);
                (x + y) % self.moduli[i]
            })
            .collect();
        SeqElement::trim(coords)
    }

    pub fn neg(&self, a: &SeqElement) -> SeqElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| (m - x) % m)
            .collect();
        SeqElement::trim(coords)
    }

    pub fn sub(&self, a: &SeqElement, b: &SeqElement) -> SeqElement {
        self.add(a, &self.neg(b))
    }

    /// Order of the finite level subgroup `B_m = {s : s_n = 0 for n > m}`.
    pub fn level_order(&self, m: usize) -> u64 {
        self.moduli[..m].iter().product()
    }

    /// All of `B_m`, in odometer order on the raw coordinates.
    pub fn level_elements(&self, m: usize) -> Vec<SeqElement> {
        let mut out = Vec::with_capacity(self.level_order(m) as usize);
        let mut cur = vec![0u64; m];
        loop {
            out.push(SeqElement::trim(cur.clone()));
            let mut i = m;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.moduli[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

/// The adjoint map on the sequence dual:
/// `u_n = (s_{n+1} mod p^{k_n} + p^{k_n} − s_n) mod p^{k_n}`.
/// Additive, bijective on each level, and negation on the first-level
/// subgroup.
#[derive(Clone, Debug)]
pub struct SequenceAutomorphism {
    dual: SequenceDual,
}

impl SequenceAutomorphism {
    pub fn new(dual: SequenceDual) -> Self {
        SequenceAutomorphism { dual }
    }

    pub fn apply(&self, s: &SeqElement) -> SeqElement {
        let d = &self.dual;
        let len = s.coords.len();
        if len == 0 {
            return d.zero();
        }
        let coords = (0..len)
            .map(|n| {
                let m = d.moduli[n];
                let next = s.coords.get(n + 1).copied().unwrap_or(0) % m;
                let own = s.coords[n];
                (next + m - own) % m
            })
            .collect();
        SeqElement::trim(coords)
    }
}

/// Characteristic-function values for the sequence model: `1` at zero,
/// `1 − a` on the rest of the first level, `0` elsewhere. The override
/// table supports mutation testing.
#[derive(Clone, Debug)]
pub struct SequenceForm {
    a: Rational,
    overrides: BTreeMap<SeqElement, Rational>,
}

impl SequenceForm {
    pub fn value(&self, s: &SeqElement) -> Rational {
        if let Some(v) = self.overrides.get(s) {
            return v.clone();
        }
        if s.is_zero() {
            Rational::one()
        } else if s.in_first_level() {
            Rational::one() - &self.a
        } else {
            Rational::zero()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SequenceModel {
    pub dual: SequenceDual,
    pub form: SequenceForm,
}

/// Assemble the sequence model for an odd prime `p`, ladder of exponents,
/// and mixture weight `0 < a < 1`.
pub fn sequence_model(p: u64, ladder: &[u32], a: Rational) -> Result<SequenceModel> {
    if !strictly_between_zero_and_one(&a) {
        return Err(Error::InvalidModel(format!(
            "weight a = {a} must lie strictly between 0 and 1"
        )));
    }
    let dual = SequenceDual::new(p, ladder)?;
    Ok(SequenceModel {
        dual,
        form: SequenceForm {
            a,
            overrides: BTreeMap::new(),
        },
    })
}

impl SequenceModel {
    pub fn adjoint(&self) -> SequenceAutomorphism {
        SequenceAutomorphism::new(self.dual.clone())
    }

    pub fn weight(&self) -> &Rational {
        &self.form.a
    }

    /// Replace the transform's value at one point (mutation testing).
    pub fn with_override(mut self, point: SeqElement, value: Rational) -> Self {
        self.form.overrides.insert(point, value);
        self
    }

    /// A dual point where the transform's modulus is neither 0 nor 1,
    /// certifying that the underlying law is not a Haar shift.
    pub fn non_haar_witness(&self) -> (SeqElement, Rational) {
        let s = self.dual.element(vec![1]).expect("first level is nonempty");
        let v = self.form.value(&s);
        debug_assert!(!v.is_zero() && !v.is_one());
        (s, v)
    }

    /// For every `v` in `B_m`: if `(I − α̃)v` lands in the first level then
    /// `v` was in the first level already. This is the recursion that keeps
    /// the equation's outside case vanishing; it needs `p > 2`.
    pub fn level_recursion_holds(&self, m: usize) -> bool {
        let adj = self.adjoint();
        self.dual.level_elements(m).into_iter().all(|v| {
            let moved = self.dual.sub(&v, &adj.apply(&v));
            !moved.in_first_level() || v.in_first_level()
        })
    }

    /// Restriction of the transform to the finite level `B_m`, as a
    /// characteristic function on the matching finite group (used for
    /// positive-definiteness spot checks via Fourier inversion).
    pub fn level_char_function(&self, m: usize) -> Result<CharFunction> {
        let orders: Vec<u64> = (0..m).map(|i| self.dual.modulus(i)).collect();
        let order = self.dual.level_order(m);
        let group = FiniteAbelianGroup::make_with_cap(&orders, order.max(DEFAULT_ORDER_CAP))?;
        let n = group.exponent();
        let values = group
            .elements()
            .map(|e| {
                let s = SeqElement::trim(e.residues().to_vec());
                let v = CyclotomicValue::from_rational_in(self.form.value(&s), n);
                (e, v)
            })
            .collect();
        CharFunction::from_values(group, values)
    }
}

impl ClosedFormCharFn for SequenceModel {
    type Point = SeqElement;

    fn value(&self, y: &SeqElement) -> Rational {
        self.form.value(y)
    }

    fn double(&self, y: &SeqElement) -> SeqElement {
        self.dual.add(y, y)
    }
}

/// Exhaustive check of `f(u+v)f(u+α̃v) = f(u−v)f(u−α̃v)` over `B_m × B_m`,
/// recording the three-case split of the underlying argument: both points
/// in the first level, mixed, or both outside. In the mixed and outside
/// cases both sides must vanish.
pub fn verify_sequence_model(model: &SequenceModel, m: usize) -> Result<ModelVerdict<SeqElement>> {
    if m == 0 || m > model.dual.depth() {
        return Err(Error::Precondition(format!(
            "level {m} outside 1..={}",
            model.dual.depth()
        )));
    }
    if model.dual.level_order(m) > LEVEL_CAP {
        return Err(Error::CapExceeded {
            order: model.dual.level_order(m) as u128,
            cap: LEVEL_CAP,
        });
    }
    let dual = &model.dual;
    let adj = model.adjoint();
    let elements = dual.level_elements(m);
    let adjoints: Vec<SeqElement> = elements.iter().map(|v| adj.apply(v)).collect();

    type StripResult = (Option<(usize, usize, String)>, BTreeMap<&'static str, u64>);
    let strip = |i: usize| -> StripResult {
        let u = &elements[i];
        let mut counts: BTreeMap<&'static str, u64> = BTreeMap::new();
        for (j, v) in elements.iter().enumerate() {
            let av = &adjoints[j];
            let case = match (u.in_first_level(), v.in_first_level()) {
                (true, true) => "both_first_level",
                (false, false) => "both_outside",
                _ => "mixed",
            };
            *counts.entry(case).or_insert(0) += 1;
            let lhs = model.form.value(&dual.add(u, v)) * model.form.value(&dual.add(u, av));
            let rhs = model.form.value(&dual.sub(u, v)) * model.form.value(&dual.sub(u, av));
            if lhs != rhs {
                return (Some((i, j, format!("sides differ: {lhs} vs {rhs}"))), counts);
            }
            if case != "both_first_level" && (!lhs.is_zero() || !rhs.is_zero()) {
                return (
                    Some((i, j, format!("{case} pair must vanish, got {lhs}"))),
                    counts,
                );
            }
        }
        (None, counts)
    };

    let per_strip: Vec<_> = (0..elements.len()).into_par_iter().map(strip).collect();
    let mut case_counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut pairs_checked = 0u64;
    let mut witness: Option<(usize, usize, String)> = None;
    for (w, counts) in per_strip {
        for (k, c) in counts {
            *case_counts.entry(k).or_insert(0) += c;
            pairs_checked += c;
        }
        if witness.is_none() {
            witness = w;
        }
    }
    Ok(ModelVerdict {
        holds: witness.is_none(),
        witness: witness.map(|(i, j, reason)| ModelWitness {
            u: elements[i].clone(),
            v: elements[j].clone(),
            reason,
        }),
        pairs_checked,
        case_counts,
    })
}

/// Truncate the primal map to the first `n` coordinates and return
/// `Ker(I + α_n)`, which is nontrivial (the top coordinate is free). This
/// is why the sequence counterexample cannot be truncated to a finite
/// group while keeping `Ker(I+α) = {0}`.
pub fn truncated_kernel(p: u64, ladder: &[u32], n: usize) -> Result<Subgroup> {
    if n < 2 || n > ladder.len() {
        return Err(Error::Precondition(format!(
            "truncation depth {n} outside 2..={}",
            ladder.len()
        )));
    }
    let dual = SequenceDual::new(p, ladder)?;
    let orders: Vec<u64> = (0..n).map(|i| dual.modulus(i)).collect();
    let order: u64 = orders.iter().product();
    let group = FiniteAbelianGroup::make_with_cap(&orders, order.max(DEFAULT_ORDER_CAP))?;
    let mut matrix = vec![vec![0i64; n]; n];
    for (i, row) in matrix.iter_mut().enumerate() {
        row[i] = -1;
        if i > 0 {
            row[i - 1] = (orders[i] / orders[i - 1]) as i64;
        }
    }
    let alpha = Homomorphism::new(group.clone(), group.clone(), matrix)?;
    debug_assert!(alpha.is_automorphism());
    Ok(Homomorphism::identity(&group).add(&alpha).kernel())
}

// ---------------------------------------------------------------------------
// Rational duals
// ---------------------------------------------------------------------------

/// A subgroup of the rationals given by an allowed-denominator rule:
/// membership holds when the lowest-terms denominator factors entirely
/// into the allowed primes (`None` allows everything, i.e. all of `Q`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalDual {
    allowed_primes: Option<Vec<u64>>,
}

impl RationalDual {
    pub fn dyadic() -> Self {
        RationalDual {
            allowed_primes: Some(vec![2]),
        }
    }

    pub fn five_power() -> Self {
        RationalDual {
            allowed_primes: Some(vec![5]),
        }
    }

    pub fn all_rationals() -> Self {
        RationalDual {
            allowed_primes: None,
        }
    }

    pub fn contains(&self, y: &Rational) -> bool {
        match &self.allowed_primes {
            None => true,
            Some(primes) => {
                let mut den = y.denom().clone();
                for &p in primes {
                    let big = BigInt::from(p);
                    while (&den % &big).is_zero() {
                        den /= &big;
                    }
                }
                den.is_one()
            }
        }
    }
}

fn half(y: &Rational) -> Rational {
    y / Rational::from_integer(2.into())
}

// ---------------------------------------------------------------------------
// Dyadic model
// ---------------------------------------------------------------------------

/// Transform supported on `{0, ±y0}` inside the dyadic rationals, paired
/// with the map `y ↦ −(p−1)·y` (multiplication maps are self-adjoint, so
/// the dual action is the same map).
#[derive(Clone, Debug)]
pub struct DyadicModel {
    p: u64,
    y0: Rational,
    carrier: RationalDual,
    overrides: BTreeMap<Rational, Rational>,
}

pub fn dyadic_model(p: u64, y0: Rational) -> Result<DyadicModel> {
    if p == 2 || prime_power(p) != Some((p, 1)) {
        return Err(Error::InvalidModel(format!("p = {p} must be an odd prime")));
    }
    let carrier = RationalDual::dyadic();
    if !carrier.contains(&y0) {
        return Err(Error::InvalidModel(format!(
            "y0 = {y0} is not a dyadic rational"
        )));
    }
    // y0 and 2*y0 must avoid p*Z[1/2]; for odd p both reduce to
    // "p does not divide the numerator"
    let big_p = BigInt::from(p);
    if (y0.numer() % &big_p).is_zero() {
        return Err(Error::InvalidModel(format!("y0 = {y0} lies in {p}*Z[1/2]")));
    }
    let twice = &y0 * Rational::from_integer(2.into());
    if (twice.numer() % &big_p).is_zero() {
        return Err(Error::InvalidModel(format!(
            "2*y0 = {twice} lies in {p}*Z[1/2]"
        )));
    }
    Ok(DyadicModel {
        p,
        y0,
        carrier,
        overrides: BTreeMap::new(),
    })
}

impl DyadicModel {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn y0(&self) -> &Rational {
        &self.y0
    }

    pub fn with_override(mut self, point: Rational, value: Rational) -> Self {
        self.overrides.insert(point, value);
        self
    }

    /// The dual action of the chosen automorphism: `y ↦ −(p−1)·y`.
    pub fn adjoint_apply(&self, y: &Rational) -> Rational {
        -(y * Rational::from_integer(BigInt::from(self.p - 1)))
    }

    fn base_value(&self, y: &Rational) -> Rational {
        debug_assert!(self.carrier.contains(y), "{y} outside the dyadic carrier");
        if y.is_zero() {
            Rational::one()
        } else if *y == self.y0 || *y == -self.y0.clone() {
            rat(1, 2)
        } else {
            Rational::zero()
        }
    }
}

impl ClosedFormCharFn for DyadicModel {
    type Point = Rational;

    fn value(&self, y: &Rational) -> Rational {
        if let Some(v) = self.overrides.get(y) {
            return v.clone();
        }
        self.base_value(y)
    }

    fn double(&self, y: &Rational) -> Rational {
        y * Rational::from_integer(2.into())
    }
}

/// Sampling plan shared by the rational-dual verifiers: a structured grid
/// plus seeded random pairs, all exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub m_bound: i64,
    pub n_max: u32,
    pub random_pairs: u64,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            m_bound: 64,
            n_max: 6,
            random_pairs: 10_000,
            seed: 0,
        }
    }
}

fn power(base: u64, e: u32) -> BigInt {
    BigInt::from(base).pow(e)
}

fn check_rational_pairs(
    pairs_and_cases: impl Iterator<Item = ((Rational, Rational), &'static str)>,
    check: impl Fn(&Rational, &Rational) -> (Rational, Rational, bool),
) -> ModelVerdict<Rational> {
    let mut case_counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut pairs_checked = 0u64;
    for ((u, v), case) in pairs_and_cases {
        *case_counts.entry(case).or_insert(0) += 1;
        pairs_checked += 1;
        let (lhs, rhs, must_vanish) = check(&u, &v);
        if lhs != rhs {
            return ModelVerdict {
                holds: false,
                witness: Some(ModelWitness {
                    u,
                    v,
                    reason: format!("sides differ: {lhs} vs {rhs}"),
                }),
                pairs_checked,
                case_counts,
            };
        }
        if must_vanish && !lhs.is_zero() {
            return ModelVerdict {
                holds: false,
                witness: Some(ModelWitness {
                    u,
                    v,
                    reason: format!("{case} pair must vanish, got {lhs}"),
                }),
                pairs_checked,
                case_counts,
            };
        }
    }
    ModelVerdict {
        holds: true,
        witness: None,
        pairs_checked,
        case_counts,
    }
}

/// Exhaustive grid `{m/2^n : |m| ≤ M, n ≤ n_max}` squared, plus seeded
/// random dyadic pairs, checking `f(u+v)f(u+α̃v) = f(u−v)f(u−α̃v)`.
/// For `v ≠ 0` both sides must vanish.
pub fn verify_dyadic_model(model: &DyadicModel, grid: &GridSpec) -> ModelVerdict<Rational> {
    let mut values: BTreeSet<Rational> = BTreeSet::new();
    for n in 0..=grid.n_max {
        let den = power(2, n);
        for m in -grid.m_bound..=grid.m_bound {
            values.insert(Rational::new(BigInt::from(m), den.clone()));
        }
    }
    let values: Vec<Rational> = values.into_iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut random_pairs = Vec::with_capacity(grid.random_pairs as usize);
    for _ in 0..grid.random_pairs {
        let draw = |rng: &mut ChaCha8Rng| {
            let m = rng.gen_range(-(1i64 << 20)..=(1i64 << 20));
            let n = rng.gen_range(0..=grid.n_max + 6);
            Rational::new(BigInt::from(m), power(2, n))
        };
        random_pairs.push((draw(&mut rng), draw(&mut rng)));
    }

    let grid_pairs = values
        .iter()
        .flat_map(|u| values.iter().map(move |v| (u.clone(), v.clone())));
    let all = grid_pairs
        .map(|(u, v)| {
            let case = if v.is_zero() { "v_zero" } else { "v_nonzero" };
            ((u, v), case)
        })
        .chain(random_pairs.into_iter().map(|(u, v)| {
            let case = if v.is_zero() {
                "random_v_zero"
            } else {
                "random_v_nonzero"
            };
            ((u, v), case)
        }));

    check_rational_pairs(all, |u, v| {
        let av = model.adjoint_apply(v);
        let lhs = model.value(&(u + v)) * model.value(&(u + &av));
        let rhs = model.value(&(u - v)) * model.value(&(u - &av));
        (lhs, rhs, !v.is_zero())
    })
}

// ---------------------------------------------------------------------------
// Rational (solenoid-dual) model
// ---------------------------------------------------------------------------

/// Transform on `Q`: `1` on `H^{(2)}`, `c` on `H ∖ H^{(2)}`, `0` off
/// `H = {m/5^n}`. The verification equation is
/// `f(u+4v)f(u−v) = f(u−4v)f(u+v)`.
#[derive(Clone, Debug)]
pub struct RationalModel {
    c: Rational,
    h: RationalDual,
    overrides: BTreeMap<Rational, Rational>,
}

pub fn rational_model(c: Rational) -> Result<RationalModel> {
    if c.is_zero() || c.abs() >= Rational::one() {
        return Err(Error::InvalidModel(format!(
            "c = {c} must be nonzero with |c| < 1"
        )));
    }
    Ok(RationalModel {
        c,
        h: RationalDual::five_power(),
        overrides: BTreeMap::new(),
    })
}

impl RationalModel {
    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn h(&self) -> &RationalDual {
        &self.h
    }

    pub fn with_override(mut self, point: Rational, value: Rational) -> Self {
        self.overrides.insert(point, value);
        self
    }

    pub fn in_h(&self, y: &Rational) -> bool {
        self.h.contains(y)
    }

    /// Membership in `H^{(2)} = 2H`: halving must stay in `H`.
    pub fn in_h2(&self, y: &Rational) -> bool {
        self.h.contains(&half(y))
    }
}

impl ClosedFormCharFn for RationalModel {
    type Point = Rational;

    fn value(&self, y: &Rational) -> Rational {
        if let Some(v) = self.overrides.get(y) {
            return v.clone();
        }
        if !self.in_h(y) {
            Rational::zero()
        } else if self.in_h2(y) {
            Rational::one()
        } else {
            self.c.clone()
        }
    }

    fn double(&self, y: &Rational) -> Rational {
        y * Rational::from_integer(2.into())
    }
}

/// Structured grid over `{m/5^n}` and off-`H` rationals, squared, plus
/// seeded random pairs, checking `f(u+4v)f(u−v) = f(u−4v)f(u+v)`.
///
/// Case split: for `u, v ∈ H` the two sides agree factor by factor
/// (`4v` and `2v` lie in `H^{(2)}`); if exactly one of `u, v` lies in `H`
/// every factor vanishes; if neither does, a nonzero side would force
/// `5v ∈ H` and hence `v ∈ H`, a contradiction.
pub fn verify_rational_model(model: &RationalModel, grid: &GridSpec) -> ModelVerdict<Rational> {
    let mut values: BTreeSet<Rational> = BTreeSet::new();
    for n in 0..=grid.n_max {
        let den = power(5, n);
        for m in -grid.m_bound..=grid.m_bound {
            values.insert(Rational::new(BigInt::from(m), den.clone()));
        }
    }
    // off-H rationals with small non-5 denominators
    let off_bound = grid.m_bound.clamp(2, 8);
    for d in [2i64, 3, 6, 7, 12] {
        for m in -off_bound..=off_bound {
            if m % d != 0 {
                values.insert(Rational::new(BigInt::from(m), BigInt::from(d)));
            }
        }
    }
    let values: Vec<Rational> = values.into_iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut random_pairs = Vec::with_capacity(grid.random_pairs as usize);
    for _ in 0..grid.random_pairs {
        let draw = |rng: &mut ChaCha8Rng| {
            let m = rng.gen_range(-(1i64 << 20)..=(1i64 << 20));
            match rng.gen_range(0..3u8) {
                0 => Rational::new(BigInt::from(m), power(5, rng.gen_range(0..=grid.n_max))),
                1 => Rational::new(
                    BigInt::from(m),
                    BigInt::from([2i64, 3, 6, 7, 11, 12][rng.gen_range(0..6usize)]),
                ),
                _ => Rational::new(
                    BigInt::from(m),
                    power(5, rng.gen_range(0..=grid.n_max))
                        * BigInt::from(2 + rng.gen_range(0..5u8)),
                ),
            }
        };
        random_pairs.push((draw(&mut rng), draw(&mut rng)));
    }

    let classify = |u: &Rational, v: &Rational| match (model.in_h(u), model.in_h(v)) {
        (true, true) => "both_in_h",
        (false, false) => "both_outside",
        _ => "mixed",
    };
    let grid_pairs = values
        .iter()
        .flat_map(|u| values.iter().map(move |v| (u.clone(), v.clone())));
    let all = grid_pairs
        .map(|(u, v)| {
            let case = classify(&u, &v);
            ((u, v), case)
        })
        .chain(random_pairs.into_iter().map(|(u, v)| {
            let case = classify(&u, &v);
            ((u, v), case)
        }));

    let four = Rational::from_integer(4.into());
    check_rational_pairs(all, |u, v| {
        let fourv = v * &four;
        let lhs = model.value(&(u + &fourv)) * model.value(&(u - v));
        let rhs = model.value(&(u - &fourv)) * model.value(&(u + v));
        let must_vanish = !(model.in_h(u) && model.in_h(v));
        (lhs, rhs, must_vanish)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model34() -> SequenceModel {
        sequence_model(3, &[1, 2, 3, 4], rat(1, 2)).unwrap()
    }

    #[test]
    fn sequence_model_form_values() {
        let m = model34();
        let d = &m.dual;
        assert!(m.form.value(&d.zero()).is_one());
        assert_eq!(m.form.value(&d.element(vec![1]).unwrap()), rat(1, 2));
        assert_eq!(m.form.value(&d.element(vec![0, 1]).unwrap()), rat(0, 1));
        // a = 1/3 gives 1 - a = 2/3 on the first level
        let m3 = sequence_model(3, &[1, 2], rat(1, 3)).unwrap();
        assert_eq!(m3.form.value(&m3.dual.element(vec![2]).unwrap()), rat(2, 3));
    }

    #[test]
    fn sequence_model_rejects_bad_parameters() {
        assert!(sequence_model(2, &[1, 2], rat(1, 2)).is_err());
        assert!(sequence_model(9, &[1, 2], rat(1, 2)).is_err());
        assert!(sequence_model(3, &[2, 1], rat(1, 2)).is_err());
        assert!(sequence_model(3, &[1, 2], rat(0, 1)).is_err());
        assert!(sequence_model(3, &[1, 2], rat(1, 1)).is_err());
        assert!(sequence_model(3, &[1, 2], rat(3, 2)).is_err());
    }

    #[test]
    fn adjoint_apply_examples() {
        let m = model34();
        let d = &m.dual;
        let adj = m.adjoint();
        // first level: negation
        let s = d.element(vec![2]).unwrap();
        assert_eq!(adj.apply(&s), d.neg(&s));
        assert!(adj.apply(&d.zero()).is_zero());
        // s = (0,1,0,...) -> (1, 8, 0, ...)
        let s = d.element(vec![0, 1]).unwrap();
        assert_eq!(adj.apply(&s), d.element(vec![1, 8]).unwrap());
    }

    #[test]
    fn adjoint_additive_and_bijective_on_levels() {
        let m = model34();
        let d = &m.dual;
        let adj = m.adjoint();
        for level in 1..=2usize {
            let elems = d.level_elements(level);
            let mut images = BTreeSet::new();
            for a in &elems {
                assert!(images.insert(adj.apply(a)));
                for b in &elems {
                    assert_eq!(adj.apply(&d.add(a, b)), d.add(&adj.apply(a), &adj.apply(b)));
                }
            }
            assert_eq!(images.len(), elems.len());
        }
    }

    #[test]
    fn sequence_verification_holds_small_levels() {
        let m = model34();
        for level in 1..=2usize {
            let verdict = verify_sequence_model(&m, level).unwrap();
            assert!(verdict.holds, "level {level}: {:?}", verdict.witness);
            let order = m.dual.level_order(level);
            assert_eq!(verdict.pairs_checked, order * order);
        }
        let v2 = verify_sequence_model(&m, 2).unwrap();
        assert_eq!(v2.pairs_checked, 27 * 27);
        assert_eq!(v2.case_counts["both_first_level"], 9);
    }

    #[test]
    fn sequence_verification_catches_mutations() {
        let m = model34();
        // value 1 - a planted at one point outside the first level
        let bad_point = m.dual.element(vec![0, 1]).unwrap();
        let mutated = m.with_override(bad_point, rat(1, 2));
        let verdict = verify_sequence_model(&mutated, 2).unwrap();
        assert!(!verdict.holds);
        assert!(verdict.witness.is_some());
    }

    #[test]
    fn level_recursion_and_cap() {
        let m = model34();
        for level in 1..=3usize {
            assert!(m.level_recursion_holds(level));
        }
        assert!(matches!(
            verify_sequence_model(&m, 4),
            Err(Error::CapExceeded { .. })
        ));
        assert!(verify_sequence_model(&m, 0).is_err());
    }

    #[test]
    fn non_haar_witness_values() {
        let m = model34();
        let (point, value) = m.non_haar_witness();
        assert_eq!(point, m.dual.element(vec![1]).unwrap());
        assert_eq!(value, rat(1, 2));
        let m3 = sequence_model(3, &[1, 2], rat(1, 3)).unwrap();
        assert_eq!(m3.non_haar_witness().1, rat(2, 3));
    }

    #[test]
    fn truncated_kernel_is_top_coordinate() {
        // enumeration confirms: kernel = {(0, ..., 0, t)} of order p^{k_n}
        for n in 2..=4usize {
            let k = truncated_kernel(3, &[1, 2, 3, 4], n).unwrap();
            assert_eq!(k.order(), 3u64.pow(n as u32));
            for e in k.members() {
                assert!(e.residues()[..n - 1].iter().all(|&t| t == 0));
            }
        }
        assert!(truncated_kernel(3, &[1, 2], 1).is_err());
    }

    #[test]
    fn level_restriction_inverts_to_a_distribution() {
        let m = model34();
        for level in 1..=2usize {
            let f = m.level_char_function(level).unwrap();
            let mu = f.inverse().unwrap();
            // a mixture of two Haar laws: full support, exact masses
            assert_eq!(mu.mass().len() as u64, m.dual.level_order(level));
        }
    }

    #[test]
    fn dyadic_model_examples() {
        let m = dyadic_model(3, rat(1, 1)).unwrap();
        assert_eq!(m.value(&rat(1, 1)), rat(1, 2));
        assert_eq!(m.value(&rat(-1, 1)), rat(1, 2));
        assert_eq!(m.value(&rat(3, 2)), rat(0, 1));
        assert!(m.value(&rat(0, 1)).is_one());
        // y0 inside 3*Z[1/2] is rejected, as is a non-dyadic y0
        assert!(dyadic_model(3, rat(3, 2)).is_err());
        assert!(dyadic_model(3, rat(1, 5)).is_err());
        assert!(dyadic_model(2, rat(1, 1)).is_err());
    }

    #[test]
    fn dyadic_verification_small_grid() {
        let m = dyadic_model(3, rat(1, 1)).unwrap();
        let grid = GridSpec {
            m_bound: 8,
            n_max: 3,
            random_pairs: 500,
            seed: 7,
        };
        let verdict = verify_dyadic_model(&m, &grid);
        assert!(verdict.holds, "{:?}", verdict.witness);
        assert!(verdict.case_counts.contains_key("v_zero"));

        let mutated = m.with_override(rat(5, 2), rat(1, 2));
        let bad = verify_dyadic_model(&mutated, &grid);
        assert!(!bad.holds);
    }

    #[test]
    fn rational_model_examples() {
        let m = rational_model(rat(1, 2)).unwrap();
        assert!(m.value(&rat(0, 1)).is_one());
        assert_eq!(m.value(&rat(1, 1)), rat(1, 2));
        assert_eq!(m.value(&rat(1, 3)), rat(0, 1));
        assert!(m.value(&rat(2, 5)).is_one());
        assert_eq!(m.value(&rat(1, 5)), rat(1, 2));
        assert!(rational_model(rat(0, 1)).is_err());
        assert!(rational_model(rat(3, 2)).is_err());
        assert!(rational_model(rat(-1, 1)).is_err());
    }

    #[test]
    fn rational_verification_small_grid() {
        let m = rational_model(rat(1, 2)).unwrap();
        let grid = GridSpec {
            m_bound: 10,
            n_max: 2,
            random_pairs: 500,
            seed: 11,
        };
        let verdict = verify_rational_model(&m, &grid);
        assert!(verdict.holds, "{:?}", verdict.witness);
        assert!(verdict.case_counts.contains_key("both_in_h"));
        assert!(verdict.case_counts.contains_key("mixed"));
        assert!(verdict.case_counts.contains_key("both_outside"));

        // (u, v) = (1/5, 1/5): both sides reduce to c
        let u = rat(1, 5);
        let fourv = rat(4, 5);
        let lhs = m.value(&(&u + &fourv)) * m.value(&(&u - &rat(1, 5)));
        let rhs = m.value(&(&u - &fourv)) * m.value(&(&u + &rat(1, 5)));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, rat(1, 2));

        let mutated = m.with_override(rat(1, 3), rat(1, 2));
        assert!(!verify_rational_model(&mutated, &grid).holds);
    }

    #[test]
    fn gaussian_haar_violations() {
        let dy = dyadic_model(3, rat(1, 1)).unwrap();
        assert!(gaussian_haar_violation(&dy, &rat(1, 1)));
        assert!(!gaussian_haar_violation(&dy, &rat(0, 1)));
        assert!(!gaussian_haar_violation(&dy, &rat(7, 4)));

        let rm = rational_model(rat(1, 2)).unwrap();
        assert!(gaussian_haar_violation(&rm, &rat(1, 5)));

        // the sequence transform violates at its first-level witness
        let m = model34();
        let y = m.dual.element(vec![1]).unwrap();
        assert!(gaussian_haar_violation(&m, &y));

        // an indicator of a subgroup admits no violation anywhere
        let seq = model34();
        let indicator = SequenceModel {
            dual: seq.dual.clone(),
            form: SequenceForm {
                a: rat(1, 2),
                overrides: seq
                    .dual
                    .level_elements(2)
                    .into_iter()
                    .map(|s| {
                        let v = if s.in_first_level() {
                            Rational::one()
                        } else {
                            Rational::zero()
                        };
                        (s, v)
                    })
                    .collect(),
            },
        };
        for y in seq.dual.level_elements(2) {
            assert!(!gaussian_haar_violation(&indicator, &y));
        }
    }
}

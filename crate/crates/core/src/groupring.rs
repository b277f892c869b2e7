//! Group rings `ℚ[F]` and `ℚ[F/⟨⟨r⟩⟩]`, Fox derivatives, and relator chains.
//!
//! Elements of a one-relator quotient are keyed by a representative word;
//! a [`QuotientContext`] keeps the first representative seen for each
//! element and resolves new keys through the word-problem solver.

use std::cell::RefCell;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{BudgetExceeded, WordError};
use crate::magnus::WordProblemSolver;
use crate::words::{exponent_vector, Alphabet, ExponentVector, Letter, ReducedWord};

/// Finite formal sum of group elements with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<ReducedWord, BigRational>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement::default()
    }

    pub fn one() -> Self {
        GroupRingElement::monomial(ReducedWord::identity(), BigRational::one())
    }

    pub fn monomial(g: ReducedWord, c: BigRational) -> Self {
        let mut e = GroupRingElement::zero();
        e.add_term(g, c);
        e
    }

    pub fn scalar(c: i64) -> Self {
        GroupRingElement::monomial(ReducedWord::identity(), BigRational::from_integer(c.into()))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ReducedWord, BigRational)>) -> Self {
        let mut e = GroupRingElement::zero();
        for (g, c) in terms {
            e.add_term(g, c);
        }
        e
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_terms(terms: impl IntoIterator<Item = (ReducedWord, i64)>) -> Self {
        GroupRingElement::from_terms(
            terms
                .into_iter()
                .map(|(g, c)| (g, BigRational::from_integer(c.into()))),
        )
    }

    pub fn add_term(&mut self, g: ReducedWord, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ReducedWord, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, g: &ReducedWord) -> BigRational {
        self.terms.get(g).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> BTreeSet<ReducedWord> {
        self.terms.keys().cloned().collect()
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> GroupRingElement {
        self.scale(&BigRational::from_integer(BigInt::from(-1)))
    }

    pub fn sub(&self, other: &GroupRingElement) -> GroupRingElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> GroupRingElement {
        if k.is_zero() {
            return GroupRingElement::zero();
        }
        GroupRingElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect(),
        }
    }

    /// Product in `ℚ[F]` (keys multiplied as free-group words).
    pub fn mul_free(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (g, c) in &self.terms {
            for (h, d) in &other.terms {
                out.add_term(g.mul(h), c * d);
            }
        }
        out
    }

    /// Renders with an alphabet, e.g. `1 - aba^-1`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a GroupRingElement, &'a Alphabet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_zero() {
                    return write!(f, "0");
                }
                for (i, (g, c)) in self.0.terms.iter().enumerate() {
                    let neg = c < &BigRational::zero();
                    let mag = if neg { -c.clone() } else { c.clone() };
                    match (i, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    let word = g.display(self.1).to_string();
                    if g.is_empty() {
                        write!(f, "{mag}")?;
                    } else if mag.is_one() {
                        write!(f, "{word}")?;
                    } else {
                        write!(f, "{mag}{word}")?;
                    }
                }
                Ok(())
            }
        }
        D(self, alphabet)
    }
}

/// The group whose ring elements live in: the free group, or a one-relator
/// quotient identified through its word-problem solver.
pub enum QuotientContext {
    FreeGroup(Alphabet),
    OneRelatorQuotient(Box<QuotientKeys>),
}

/// First-seen representatives of quotient elements, with memoized lookups.
pub struct QuotientKeys {
    solver: WordProblemSolver,
    relator_image: ExponentVector,
    reps: RefCell<HashMap<ExponentVector, Vec<ReducedWord>>>,
    resolved: RefCell<HashMap<ReducedWord, ReducedWord>>,
}

impl QuotientContext {
    pub fn free(alphabet: Alphabet) -> Self {
        QuotientContext::FreeGroup(alphabet)
    }

    pub fn one_relator(solver: WordProblemSolver) -> Self {
        let p = solver.presentation();
        let relator_image = exponent_vector(&p.relator, &p.alphabet);
        QuotientContext::OneRelatorQuotient(Box::new(QuotientKeys {
            solver,
            relator_image,
            reps: RefCell::new(HashMap::new()),
            resolved: RefCell::new(HashMap::new()),
        }))
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            QuotientContext::FreeGroup(a) => a,
            QuotientContext::OneRelatorQuotient(k) => k.solver.alphabet(),
        }
    }

    pub fn solver(&self) -> Option<&WordProblemSolver> {
        match self {
            QuotientContext::FreeGroup(_) => None,
            QuotientContext::OneRelatorQuotient(k) => Some(&k.solver),
        }
    }

    /// Canonical key of the group element represented by `g`.
    pub fn normalize(&self, g: &ReducedWord) -> Result<ReducedWord, BudgetExceeded> {
        match self {
            QuotientContext::FreeGroup(_) => Ok(g.clone()),
            QuotientContext::OneRelatorQuotient(k) => k.normalize(g),
        }
    }
}

impl QuotientKeys {
    fn normalize(&self, g: &ReducedWord) -> Result<ReducedWord, BudgetExceeded> {
        if let Some(hit) = self.resolved.borrow().get(g) {
            return Ok(hit.clone());
        }
        let image = exponent_vector(g, self.solver.alphabet()).reduce_mod(&self.relator_image);
        let candidates = self.reps.borrow().get(&image).cloned().unwrap_or_default();
        let mut found = None;
        for rep in candidates {
            if self.solver.equal(g, &rep)? {
                found = Some(rep);
                break;
            }
        }
        let key = match found {
            Some(rep) => rep,
            None => {
                self.reps
                    .borrow_mut()
                    .entry(image)
                    .or_default()
                    .push(g.clone());
                g.clone()
            }
        };
        self.resolved.borrow_mut().insert(g.clone(), key.clone());
        Ok(key)
    }
}

/// Re-keys `e` by quotient representatives, merging equal elements.
pub fn project_to_quotient(
    e: &GroupRingElement,
    ctx: &QuotientContext,
) -> Result<GroupRingElement, BudgetExceeded> {
    let mut out = GroupRingElement::zero();
    for (g, c) in e.terms() {
        out.add_term(ctx.normalize(g)?, c.clone());
    }
    Ok(out)
}

/// Ring product in the context's group.
pub fn gr_multiply(
    a: &GroupRingElement,
    b: &GroupRingElement,
    ctx: &QuotientContext,
) -> Result<GroupRingElement, BudgetExceeded> {
    project_to_quotient(&a.mul_free(b), ctx)
}

/// `∂w/∂s` in `ℤ[F]`: each `s` read after prefix `u` contributes `u`, each
/// `s⁻¹` contributes `−u·s⁻¹`.
pub fn fox_derivative(
    w: &ReducedWord,
    s: usize,
    alphabet: &Alphabet,
) -> Result<GroupRingElement, WordError> {
    if s >= alphabet.len() {
        return Err(WordError::UnknownGenerator(format!("#{s}")));
    }
    let mut out = GroupRingElement::zero();
    let mut prefix = ReducedWord::identity();
    let one = BigRational::one();
    for &l in w.letters() {
        let next = prefix.mul(&ReducedWord::from_letters([l]));
        if l.gen == s {
            if l.inv {
                out.add_term(next.clone(), -one.clone());
            } else {
                out.add_term(prefix.clone(), one.clone());
            }
        }
        prefix = next;
    }
    Ok(out)
}

/// `(π(∂w/∂s))_s`: the 1-chain of the path spelling `w` from the identity.
pub fn chain_vector(
    w: &ReducedWord,
    ctx: &QuotientContext,
) -> Result<Vec<GroupRingElement>, BudgetExceeded> {
    let alphabet = ctx.alphabet();
    (0..alphabet.len())
        .map(|s| {
            let d = fox_derivative(w, s, alphabet).expect("generator in range");
            project_to_quotient(&d, ctx)
        })
        .collect()
}

/// Whether `[supp(ab) ⊆ supp(b)] ⇔ [supp(a) = {1}]` holds in `ℚ[F]`.
pub fn support_lemma_probe(a: &GroupRingElement, b: &GroupRingElement) -> bool {
    let ab = a.mul_free(b);
    let contained = ab.support().is_subset(&b.support());
    let scalar = a.len() == 1 && a.coefficient(&ReducedWord::identity()) != BigRational::zero();
    contained == scalar
}

/// `Σ_s (∂w/∂s)(s − 1)` in `ℤ[F]`; equals `w − 1` for every word.
pub fn fox_fundamental_sum(w: &ReducedWord, alphabet: &Alphabet) -> GroupRingElement {
    let mut total = GroupRingElement::zero();
    for s in 0..alphabet.len() {
        let d = fox_derivative(w, s, alphabet).expect("generator in range");
        let s_minus_one = GroupRingElement::from_int_terms([
            (ReducedWord::from_letters([Letter::new(s, false)]), 1),
            (ReducedWord::identity(), -1),
        ]);
        total = total.add(&d.mul_free(&s_minus_one));
    }
    total
}

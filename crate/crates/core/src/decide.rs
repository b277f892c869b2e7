//! Witness search and the residual rational solvability verdict.
//!
//! For `w` the search looks for a cyclic word `r` with `|r| ≤ |w|`, a
//! conjugator `g` and `k ≥ 1` such that `w = 1` in `F/⟨⟨r⟩⟩` and the relator
//! chains satisfy `chain(w) = k · chain(g r g⁻¹)` in `ℤ[F/⟨⟨r⟩⟩]^S`, then
//! keeps a passing `r` whose normal closure contains all the others.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{BudgetExceeded, DecideError, Exhausted};
use crate::groupring::{chain_vector, gr_multiply, GroupRingElement, QuotientContext};
use crate::magnus::{build_solver, in_normal_closure, ResourceBudget};
use crate::words::{enumerate_candidates, is_conjugate, Alphabet, ReducedWord};
use crate::Presentation;

/// `k ≠ 0` with `chain(w) = k · chain(r)` read from the identity, provided
/// `w ∈ ⟨⟨r⟩⟩`. Negative `k` means `r⁻¹` divides with `|k|`.
pub fn divisibility(
    w: &ReducedWord,
    r: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> Result<Option<i64>, BudgetExceeded> {
    Ok(match chains(w, r, alphabet, budget)? {
        Closure::Inside(_, cw, cr) => chain_ratio(&cw, &cr),
        Closure::Outside { .. } => None,
    })
}

enum Closure {
    Outside {
        calls: u64,
    },
    Inside(
        QuotientContext,
        Vec<GroupRingElement>,
        Vec<GroupRingElement>,
    ),
}

fn chains(
    w: &ReducedWord,
    r: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> Result<Closure, BudgetExceeded> {
    let solver = build_solver(&Presentation::new(alphabet.clone(), r.clone()), budget)?;
    if !solver.is_trivial(w)? {
        return Ok(Closure::Outside {
            calls: solver.usage().oracle_calls,
        });
    }
    let ctx = QuotientContext::one_relator(solver);
    // seed the identity key first so it is keyed by the empty word
    ctx.normalize(&ReducedWord::identity())?;
    let cw = chain_vector(w, &ctx)?;
    let cr = chain_vector(r, &ctx)?;
    Ok(Closure::Inside(ctx, cw, cr))
}

/// The nonzero integer `k` with `a = k · b` componentwise.
fn chain_ratio(a: &[GroupRingElement], b: &[GroupRingElement]) -> Option<i64> {
    let (s, (h, c)) = b
        .iter()
        .enumerate()
        .find_map(|(s, e)| e.terms().next().map(|t| (s, t)))?;
    let k = a[s].coefficient(h) / c;
    if k.is_zero() || !k.is_integer() {
        return None;
    }
    a.iter()
        .zip(b)
        .all(|(x, y)| *x == y.scale(&k))
        .then(|| k.to_integer().to_i64())
        .flatten()
}

/// Result of testing one candidate class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    NotInNormalClosure,
    ChainMismatch,
    /// `w` has chain `k · chain(conjugator · r · conjugator⁻¹)` with `r` a
    /// rotation of the candidate; `k` is signed here.
    Passed {
        r: ReducedWord,
        conjugator: ReducedWord,
        k: i64,
    },
    Exhausted(Exhausted),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub candidate: ReducedWord,
    pub outcome: Outcome,
    pub oracle_calls: u64,
}

/// Tests the candidate class of `c` against `w`, allowing any translate of
/// the relator cycle.
pub fn test_candidate(
    w: &ReducedWord,
    c: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> TraceEntry {
    let mut calls = 0;
    let outcome = match candidate_outcome(w, c, alphabet, budget, &mut calls) {
        Ok(o) => o,
        Err(BudgetExceeded(e)) => Outcome::Exhausted(e),
    };
    TraceEntry {
        candidate: c.clone(),
        outcome,
        oracle_calls: calls,
    }
}

fn candidate_outcome(
    w: &ReducedWord,
    c: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
    calls: &mut u64,
) -> Result<Outcome, BudgetExceeded> {
    let (ctx, cw, cc) = match chains(w, c, alphabet, budget)? {
        Closure::Inside(ctx, cw, cc) => (ctx, cw, cc),
        Closure::Outside { calls: n } => {
            *calls = n;
            return Ok(Outcome::NotInNormalClosure);
        }
    };
    let found = translate_ratio(&cw, &cc, &ctx)?;
    *calls = ctx.solver().map_or(0, |s| s.usage().oracle_calls);
    let Some((g, k)) = found else {
        return Ok(Outcome::ChainMismatch);
    };
    // g·chain(c) = chain(p⁻¹ c p) when g = p⁻¹ for a prefix p of c
    for i in 0..c.len() {
        let p = ReducedWord::from_letters(c.letters()[..i].iter().copied());
        if ctx.normalize(&p.inverse())? == ctx.normalize(&g)? {
            return Ok(Outcome::Passed {
                r: c.rotate(i),
                conjugator: ReducedWord::identity(),
                k,
            });
        }
    }
    Ok(Outcome::Passed {
        r: c.clone(),
        conjugator: g,
        k,
    })
}

/// `(g, k)` with `a = k · g · b`. Any such `g` carries the first support term
/// `h` of `b` onto the support of `a`, so the translates are finite in number.
fn translate_ratio(
    a: &[GroupRingElement],
    b: &[GroupRingElement],
    ctx: &QuotientContext,
) -> Result<Option<(ReducedWord, i64)>, BudgetExceeded> {
    let Some((s, h)) = b
        .iter()
        .enumerate()
        .find_map(|(s, e)| e.terms().next().map(|(h, _)| (s, h.clone())))
    else {
        return Ok(None);
    };
    let mut shifts = vec![ReducedWord::identity()];
    shifts.extend(a[s].terms().map(|(x, _)| x.mul(&h.inverse())));
    let one = BigRational::from_integer(1.into());
    for g in shifts {
        let gm = GroupRingElement::monomial(g.clone(), one.clone());
        let moved = b
            .iter()
            .map(|e| gr_multiply(&gm, e, ctx))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(k) = chain_ratio(a, &moved) {
            return Ok(Some((g, k)));
        }
    }
    Ok(None)
}

/// `w ∈ (g r g⁻¹)ᵏ [⟨⟨r⟩⟩, ⟨⟨r⟩⟩]` with `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub r: ReducedWord,
    pub conjugator: ReducedWord,
    pub k: i64,
    /// Whether `r` was inverted to make `k` positive.
    pub k_sign_folded: bool,
    pub class_rep: ReducedWord,
}

impl Witness {
    fn trivial() -> Self {
        Witness {
            r: ReducedWord::identity(),
            conjugator: ReducedWord::identity(),
            k: 1,
            k_sign_folded: false,
            class_rep: ReducedWord::identity(),
        }
    }

    fn from_outcome(candidate: &ReducedWord, outcome: &Outcome) -> Option<Self> {
        let Outcome::Passed { r, conjugator, k } = outcome else {
            return None;
        };
        Some(Witness {
            r: if *k < 0 { r.inverse() } else { r.clone() },
            conjugator: conjugator.clone(),
            k: k.abs(),
            k_sign_folded: *k < 0,
            class_rep: candidate.clone(),
        })
    }

    /// `g r g⁻¹`, the word whose chain divides that of `w`.
    pub fn conjugated_relator(&self) -> ReducedWord {
        self.conjugator.mul(&self.r).mul(&self.conjugator.inverse())
    }

    /// The maximal residually ℚ-solvable quotient `⟨S | r⟩`.
    pub fn max_quotient(&self, alphabet: &Alphabet) -> Presentation {
        Presentation::new(alphabet.clone(), self.r.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Longest candidate examined; `None` means `|core(w)|`.
    pub max_r_len: Option<usize>,
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_r_len: None,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Witness),
    NoneFound,
    Inconclusive(Exhausted),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub candidates: usize,
    pub passing: usize,
    pub oracle_calls: u64,
    pub max_r_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSearch {
    pub outcome: SearchOutcome,
    pub trace: Vec<TraceEntry>,
    pub report: SearchReport,
}

pub fn find_witness(
    w: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
    opts: &SearchOptions,
) -> Result<WitnessSearch, DecideError> {
    let core = w.cyclic_core();
    let max_len = opts.max_r_len.unwrap_or(core.len());
    let mut report = SearchReport {
        max_r_len: max_len,
        ..SearchReport::default()
    };
    if core.is_empty() {
        return Ok(WitnessSearch {
            outcome: SearchOutcome::Found(Witness::trivial()),
            trace: Vec::new(),
            report,
        });
    }

    let candidates = enumerate_candidates(&core, alphabet, max_len);
    let screen = || -> Vec<TraceEntry> {
        candidates
            .par_iter()
            .map(|c| test_candidate(&core, c, alphabet, budget))
            .collect()
    };
    let trace = if opts.threads <= 1 {
        candidates
            .iter()
            .map(|c| test_candidate(&core, c, alphabet, budget))
            .collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| DecideError::InternalContradiction(format!("thread pool: {e}")))?
            .install(screen)
    };

    report.candidates = trace.len();
    report.oracle_calls = trace.iter().map(|t| t.oracle_calls).sum();
    if let Some(e) = trace.iter().find_map(|t| match t.outcome {
        Outcome::Exhausted(e) => Some(e),
        _ => None,
    }) {
        return Ok(WitnessSearch {
            outcome: SearchOutcome::Inconclusive(e),
            trace,
            report,
        });
    }

    let passing: Vec<Witness> = trace
        .iter()
        .filter_map(|t| Witness::from_outcome(&t.candidate, &t.outcome))
        .collect();
    report.passing = passing.len();
    if passing.is_empty() {
        return Ok(WitnessSearch {
            outcome: SearchOutcome::NoneFound,
            trace,
            report,
        });
    }

    let outcome = match select_maximal(&passing, alphabet, budget) {
        Ok(Some(wit)) => SearchOutcome::Found(wit),
        Ok(None) => {
            return Err(DecideError::InternalContradiction(
                "no passing candidate contains the others in its normal closure".into(),
            ))
        }
        Err(BudgetExceeded(e)) => SearchOutcome::Inconclusive(e),
    };
    Ok(WitnessSearch {
        outcome,
        trace,
        report,
    })
}

/// First passing class (length, then shortlex) whose normal closure holds
/// every other passing class.
fn select_maximal(
    passing: &[Witness],
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> Result<Option<Witness>, BudgetExceeded> {
    for cand in passing {
        let solver = build_solver(&Presentation::new(alphabet.clone(), cand.r.clone()), budget)?;
        let mut contains_all = true;
        for other in passing {
            if other.class_rep != cand.class_rep && !solver.is_trivial(&other.r)? {
                contains_all = false;
                break;
            }
        }
        if contains_all {
            return Ok(Some(cand.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ResiduallyQSolvable(Witness),
    NotResiduallyQSolvable(Witness),
    Inconclusive {
        reason: String,
        witness: Option<Witness>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub trace: Vec<TraceEntry>,
    pub report: SearchReport,
    /// The candidate bound was below `|core(w)|`.
    pub bounded: bool,
}

pub fn decide(
    w: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> Result<Decision, DecideError> {
    decide_with(w, alphabet, budget, &SearchOptions::default())
}

pub fn decide_with(
    w: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
    opts: &SearchOptions,
) -> Result<Decision, DecideError> {
    let core = w.cyclic_core();
    let bounded = opts.max_r_len.is_some_and(|m| m < core.len());
    let search = find_witness(&core, alphabet, budget, opts)?;
    let verdict = match search.outcome {
        SearchOutcome::Inconclusive(e) => Verdict::Inconclusive {
            reason: format!("budget exceeded: {e}"),
            witness: None,
        },
        SearchOutcome::NoneFound if bounded => Verdict::Inconclusive {
            reason: format!("no witness of length at most {}", search.report.max_r_len),
            witness: None,
        },
        SearchOutcome::NoneFound => {
            return Err(DecideError::InternalContradiction(
                "the class of w itself failed the divisibility test".into(),
            ))
        }
        SearchOutcome::Found(wit) => {
            let yes = is_conjugate(&core, &wit.r) || is_conjugate(&core, &wit.r.inverse());
            match (yes, bounded) {
                (false, _) => Verdict::NotResiduallyQSolvable(wit),
                (true, false) => Verdict::ResiduallyQSolvable(wit),
                (true, true) => Verdict::Inconclusive {
                    reason: "bounded search: longer candidates were not examined".into(),
                    witness: Some(wit),
                },
            }
        }
    };
    Ok(Decision {
        verdict,
        trace: search.trace,
        report: search.report,
        bounded,
    })
}

/// Recheck of a witness that does not trust the search.
pub fn verify_witness(
    w: &ReducedWord,
    wit: &Witness,
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> Result<bool, BudgetExceeded> {
    let core = w.cyclic_core();
    if core.is_empty() {
        return Ok(wit.r.is_empty());
    }
    Ok(wit.k >= 1
        && wit.r.len() <= core.len()
        && in_normal_closure(&core, &wit.r, alphabet, budget)?
        && divisibility(&core, &wit.conjugated_relator(), alphabet, budget)? == Some(wit.k))
}

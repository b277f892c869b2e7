//! Decide residual rational solvability of one-relator groups `F(S)/⟨⟨w⟩⟩`.
//!
//! The decision looks for a word `r` no longer than `w` and an integer
//! `k ≥ 1` with `w ∈ rᵏ[⟨⟨r⟩⟩,⟨⟨r⟩⟩]` whose normal closure is maximal; the
//! group is residually ℚ-solvable exactly when that `r` is conjugate to
//! `w^{±1}`. Membership in `⟨⟨r⟩⟩` is decided by a Magnus breakdown
//! ([`magnus`]), and the divisibility test is carried out twice, once with
//! Fox derivatives ([`groupring`]) and once on an explicit Cayley ball
//! ([`cayley`]).

pub mod cayley;
pub mod decide;
pub mod error;
pub mod groupring;
pub mod intlin;
pub mod magnus;
pub mod words;

pub use error::{BudgetExceeded, CayleyError, DecideError, Exhausted, WordError};
pub use magnus::{ResourceBudget, WordProblemSolver};
pub use words::{Alphabet, ExponentVector, Letter, ReducedWord};

/// An alphabet with a single relator (possibly empty).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relator: ReducedWord,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relator: ReducedWord) -> Self {
        Presentation { alphabet, relator }
    }

    /// Parses `gens` (e.g. `"ab"`) and a relator in letter syntax.
    pub fn parse(gens: &str, relator: &str) -> Result<Self, WordError> {
        let alphabet = Alphabet::from_letters(gens)?;
        let relator = ReducedWord::parse(relator, &alphabet)?;
        Ok(Presentation { alphabet, relator })
    }
}

//! Free-group words over a finite alphabet.
//!
//! Text syntax: a lowercase letter names a generator, the matching uppercase
//! letter its inverse, whitespace is ignored and the empty string is the
//! identity.

use std::cmp::Ordering;
use std::fmt;

use crate::error::WordError;

/// A generator or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }

    /// Position in the ordered signed alphabet `a < A < b < B < ...`.
    pub fn rank(self) -> usize {
        2 * self.gen + self.inv as usize
    }

    pub fn exponent(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// Ordered list of distinct generator names.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(WordError::BadGeneratorName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(WordError::DuplicateGenerator(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    /// Alphabet from a string of distinct lowercase ASCII letters, e.g. `"ab"`.
    pub fn from_letters(letters: &str) -> Result<Self, WordError> {
        let mut names = Vec::new();
        for c in letters.chars().filter(|c| !c.is_whitespace()) {
            if !c.is_ascii_lowercase() {
                return Err(WordError::BadGeneratorName(c.to_string()));
            }
            names.push(c.to_string());
        }
        Alphabet::new(names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Compact letter string, e.g. `"ab"`. Only meaningful for single-letter names.
    pub fn letters(&self) -> String {
        self.names.concat()
    }

    fn render(&self, l: Letter) -> String {
        let name = &self.names[l.gen];
        if !l.inv {
            name.clone()
        } else if name.chars().count() == 1 {
            name.to_uppercase()
        } else {
            format!("{name}^-1")
        }
    }
}

/// A freely reduced word. Ordered shortlex by letter rank.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

/// Free reduction of `letters`, checking generators against `alphabet`.
pub fn reduce(letters: &[Letter], alphabet: &Alphabet) -> Result<ReducedWord, WordError> {
    if let Some(bad) = letters.iter().find(|l| l.gen >= alphabet.len()) {
        return Err(WordError::UnknownGenerator(format!("#{}", bad.gen)));
    }
    Ok(ReducedWord::from_letters(letters.iter().copied()))
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord::default()
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|&top| top.is_inverse_of(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord { letters: out }
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            let lower = c.to_ascii_lowercase().to_string();
            let gen = alphabet
                .index_of(&lower)
                .filter(|_| c.is_ascii_alphabetic())
                .ok_or_else(|| WordError::UnknownGenerator(c.to_string()))?;
            letters.push(Letter::new(gen, c.is_ascii_uppercase()));
        }
        Ok(ReducedWord::from_letters(letters))
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.letters.iter().map(|&l| alphabet.render(l)).collect()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a ReducedWord, &'a Alphabet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_empty() {
                    write!(f, "1")
                } else {
                    write!(f, "{}", self.0.to_text(self.1))
                }
            }
        }
        D(self, alphabet)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn mul(&self, other: &ReducedWord) -> Self {
        ReducedWord::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let reps = n.unsigned_abs() as usize;
        ReducedWord::from_letters(std::iter::repeat_n(base.letters.iter().copied(), reps).flatten())
    }

    /// Largest generator index mentioned, plus one.
    pub fn rank_bound(&self) -> usize {
        self.letters.iter().map(|l| l.gen + 1).max().unwrap_or(0)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.len() == 1 || !f.is_inverse_of(l),
            _ => true,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.inv)
    }

    /// Splits `w = conjugator⁻¹ · core · conjugator` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (ReducedWord, ReducedWord) {
        let n = self.len();
        let mut peel = 0;
        while 2 * peel + 1 < n && self.letters[peel].is_inverse_of(self.letters[n - 1 - peel]) {
            peel += 1;
        }
        let core = ReducedWord {
            letters: self.letters[peel..n - peel].to_vec(),
        };
        let conjugator = ReducedWord {
            letters: self.letters[n - peel..].to_vec(),
        };
        (core, conjugator)
    }

    pub fn cyclic_core(&self) -> ReducedWord {
        self.cyclic_reduce().0
    }

    /// Rotation starting at letter `i`. Only a conjugate when the word is cyclically reduced.
    pub fn rotate(&self, i: usize) -> ReducedWord {
        if self.is_empty() {
            return self.clone();
        }
        let i = i % self.len();
        let mut letters = self.letters[i..].to_vec();
        letters.extend_from_slice(&self.letters[..i]);
        ReducedWord { letters }
    }

    /// Distinct rotations of a cyclically reduced word, in rotation order.
    pub fn rotations(&self) -> Vec<ReducedWord> {
        let mut out: Vec<ReducedWord> = Vec::new();
        for i in 0..self.len().max(1) {
            let r = self.rotate(i);
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// Shortlex-least word among the rotations of the cyclic core and of its inverse.
    pub fn canonical_class_rep(&self) -> ReducedWord {
        let core = self.cyclic_core();
        if core.is_empty() {
            return core;
        }
        let inv = core.inverse();
        (0..core.len())
            .flat_map(|i| [core.rotate(i), inv.rotate(i)])
            .min()
            .expect("nonempty")
    }

    /// Renames generators through `perm` (old index → new index).
    pub fn relabel(&self, perm: &[usize]) -> ReducedWord {
        ReducedWord {
            letters: self
                .letters
                .iter()
                .map(|l| Letter::new(perm[l.gen], l.inv))
                .collect(),
        }
    }

    pub fn mentions(&self, gen: usize) -> bool {
        self.letters.iter().any(|l| l.gen == gen)
    }

    /// Signed 1-based encoding used by the decision engines.
    pub(crate) fn to_signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| encode(*l)).collect()
    }

    pub(crate) fn from_signed(word: &[i32]) -> ReducedWord {
        ReducedWord::from_letters(word.iter().map(|&x| decode(x)))
    }
}

pub(crate) fn encode(l: Letter) -> i32 {
    let g = l.gen as i32 + 1;
    if l.inv {
        -g
    } else {
        g
    }
}

pub(crate) fn decode(x: i32) -> Letter {
    Letter::new(x.unsigned_abs() as usize - 1, x < 0)
}

/// True iff `u` and `v` are conjugate in the free group.
pub fn is_conjugate(u: &ReducedWord, v: &ReducedWord) -> bool {
    let cu = u.cyclic_core();
    let cv = v.cyclic_core();
    if cu.len() != cv.len() {
        return false;
    }
    if cu.is_empty() {
        return true;
    }
    (0..cu.len()).any(|i| cu.rotate(i) == cv)
}

/// `w = pⁿ` with `n` maximal.
pub fn primitive_root(w: &ReducedWord) -> Result<(ReducedWord, usize), WordError> {
    if w.is_empty() {
        return Err(WordError::EmptyWord);
    }
    let n = w.len();
    let period = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (d..n).all(|i| w.letters[i] == w.letters[i - d]))
        .expect("n is always a period");
    let root = ReducedWord {
        letters: w.letters[..period].to_vec(),
    };
    Ok((root, n / period))
}

/// Image of a word in the free abelianization.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// The nonzero integer `k` with `self = k · other`, if any.
    pub fn multiple_of(&self, other: &ExponentVector) -> Option<i64> {
        let i = other.0.iter().position(|&e| e != 0)?;
        if self.0[i] % other.0[i] != 0 {
            return None;
        }
        let k = self.0[i] / other.0[i];
        (k != 0 && self.0.iter().zip(&other.0).all(|(&a, &b)| a == k * b)).then_some(k)
    }

    /// Canonical representative of `self + ℤ·other`.
    pub fn reduce_mod(&self, other: &ExponentVector) -> ExponentVector {
        let Some(i) = other.0.iter().position(|&e| e != 0) else {
            return self.clone();
        };
        let q = self.0[i].div_euclid(other.0[i].abs()) * other.0[i].signum();
        ExponentVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a - q * b)
                .collect(),
        )
    }
}

pub fn exponent_vector(w: &ReducedWord, alphabet: &Alphabet) -> ExponentVector {
    let mut v = vec![0i64; alphabet.len().max(w.rank_bound())];
    for l in w.letters() {
        v[l.gen] += l.exponent();
    }
    ExponentVector(v)
}

/// Cyclically reduced class representatives `r` with `1 ≤ |r| ≤ max_len` that
/// pass the abelianization filter for `w`, ordered by length then shortlex.
pub fn enumerate_candidates(
    w: &ReducedWord,
    alphabet: &Alphabet,
    max_len: usize,
) -> Vec<ReducedWord> {
    if w.is_empty() {
        return Vec::new();
    }
    let target = exponent_vector(w, alphabet);
    let passes = |r: &ReducedWord| {
        let e = exponent_vector(r, alphabet);
        if target.is_zero() {
            e.is_zero()
        } else {
            target.multiple_of(&e).is_some()
        }
    };
    let signed: Vec<Letter> = (0..alphabet.len())
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = Vec::new();
    let mut buf: Vec<Letter> = Vec::new();
    for len in 1..=max_len {
        extend_words(&signed, len, &mut buf, &mut |letters| {
            let last = letters[len - 1];
            if len > 1 && letters[0].is_inverse_of(last) {
                return;
            }
            let r = ReducedWord {
                letters: letters.to_vec(),
            };
            if r.canonical_class_rep() == r && passes(&r) {
                out.push(r);
            }
        });
    }
    out
}

fn extend_words(
    signed: &[Letter],
    len: usize,
    buf: &mut Vec<Letter>,
    visit: &mut dyn FnMut(&[Letter]),
) {
    if buf.len() == len {
        visit(buf);
        return;
    }
    for &l in signed {
        if buf.last().is_some_and(|&top| top.is_inverse_of(l)) {
            continue;
        }
        // the canonical representative starts with the least letter it uses
        if buf.first().is_some_and(|&f| l < f) {
            continue;
        }
        buf.push(l);
        extend_words(signed, len, buf, visit);
        buf.pop();
    }
}

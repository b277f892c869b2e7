//! Word problem for one-relator groups `F(S)/⟨⟨r⟩⟩` by Magnus breakdown.
//!
//! The engine answers a single question recursively: given a word `g` and a
//! Magnus subset `Y` of the generators (one omitting a generator that the
//! relator mentions), is `g` in the subgroup `⟨Y⟩`, and if so, which reduced
//! word over `Y` spells it? Triviality is the case `Y = ∅`. Each node of the
//! breakdown is one of:
//!
//! * a free group, possibly with one generator killed by the relator;
//! * `F * ℤ/n` when the relator is a power of a single generator;
//! * an HNN extension over a stable letter `t` with zero exponent sum, whose
//!   base group is presented on the subscripted generators `x_j = tʲ x t⁻ʲ`
//!   and whose associated subgroups are the Magnus subgroups below the top
//!   and above the bottom subscript of every generator;
//! * a change of variables `z ↦ u·v^{−β}`, `x ↦ v^{α}` (`α`, `β` the exponent
//!   sums of `z`, `x`) embedding the group into one whose relator has zero
//!   exponent sum in `v`.
//!
//! Children are built lazily and memoized, as are membership verdicts.

use std::cell::{Cell, OnceCell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{BudgetExceeded, Exhausted, WordError};
use crate::words::{Alphabet, ReducedWord};
use crate::Presentation;

/// Resource caps for one solver. Exhaustion surfaces as [`BudgetExceeded`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceBudget {
    pub max_depth: usize,
    pub max_length: usize,
    pub max_calls: u64,
}

impl Default for ResourceBudget {
    fn default() -> Self {
        ResourceBudget {
            max_depth: 64,
            max_length: 1_000_000,
            max_calls: 10_000_000,
        }
    }
}

/// Shape of the breakdown used for the word problem.
///
/// Generator indices are local to each node. Subscripted generators of an
/// HNN base are listed as `(generator, lowest level, highest level)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BreakdownNode {
    FreeBase {
        gens: usize,
        killed: Option<usize>,
    },
    TorsionBase {
        gens: usize,
        generator: usize,
        order: u32,
    },
    HnnStep {
        gens: usize,
        stable: usize,
        ranges: Vec<(usize, i64, i64)>,
        base: Box<BreakdownNode>,
    },
    ChangeOfVariables {
        gens: usize,
        substituted: usize,
        rooted: usize,
        alpha: i64,
        beta: i64,
        inner: Box<BreakdownNode>,
    },
}

impl BreakdownNode {
    pub fn depth(&self) -> usize {
        match self {
            BreakdownNode::FreeBase { .. } | BreakdownNode::TorsionBase { .. } => 0,
            BreakdownNode::HnnStep { base, .. } => 1 + base.depth(),
            BreakdownNode::ChangeOfVariables { inner, .. } => 1 + inner.depth(),
        }
    }
}

type Word = Vec<i32>;

fn gen_of(x: i32) -> usize {
    x.unsigned_abs() as usize - 1
}

fn letter(gen: usize, sign: i32) -> i32 {
    (gen as i32 + 1) * sign
}

fn push_reduced(out: &mut Word, x: i32) {
    if out.last() == Some(&-x) {
        out.pop();
    } else {
        out.push(x);
    }
}

fn free_reduce(w: &[i32]) -> Word {
    let mut out = Vec::with_capacity(w.len());
    for &x in w {
        push_reduced(&mut out, x);
    }
    out
}

fn cyclically_reduce(w: &[i32]) -> Word {
    let w = free_reduce(w);
    let n = w.len();
    let mut k = 0;
    while 2 * k + 1 < n && w[k] == -w[n - 1 - k] {
        k += 1;
    }
    w[k..n - k].to_vec()
}

fn exponent_sums(w: &[i32], ngens: usize) -> Vec<i64> {
    let mut e = vec![0i64; ngens];
    for &x in w {
        e[gen_of(x)] += x.signum() as i64;
    }
    e
}

fn support(w: &[i32], ngens: usize) -> Vec<usize> {
    let mut seen = vec![false; ngens];
    for &x in w {
        seen[gen_of(x)] = true;
    }
    (0..ngens).filter(|&g| seen[g]).collect()
}

struct Shared {
    budget: ResourceBudget,
    calls: Cell<u64>,
    max_seen_depth: Cell<usize>,
    registry: RefCell<HashMap<(usize, Word), Rc<Node>>>,
}

impl Shared {
    fn tick(&self) -> Result<(), BudgetExceeded> {
        let c = self.calls.get() + 1;
        self.calls.set(c);
        if c > self.budget.max_calls {
            return Err(BudgetExceeded(Exhausted::Calls));
        }
        Ok(())
    }

    fn check_len(&self, n: usize) -> Result<(), BudgetExceeded> {
        if n > self.budget.max_length {
            return Err(BudgetExceeded(Exhausted::Length));
        }
        Ok(())
    }

    fn node(&self, ngens: usize, relator: Word, depth: usize) -> Result<Rc<Node>, BudgetExceeded> {
        let relator = cyclically_reduce(&relator);
        if let Some(n) = self.registry.borrow().get(&(ngens, relator.clone())) {
            return Ok(n.clone());
        }
        if depth > self.budget.max_depth {
            return Err(BudgetExceeded(Exhausted::Depth));
        }
        self.check_len(relator.len())?;
        self.max_seen_depth
            .set(self.max_seen_depth.get().max(depth));
        let node = Rc::new(Node::new(ngens, relator.clone(), depth));
        self.registry
            .borrow_mut()
            .insert((ngens, relator), node.clone());
        Ok(node)
    }
}

type Memo = HashMap<(Word, Vec<usize>), Option<Word>>;

struct Node {
    ngens: usize,
    relator: Word,
    depth: usize,
    kind: Kind,
    memo: RefCell<Memo>,
}

enum Kind {
    Free { killed: Option<usize> },
    Torsion { gen: usize, order: u32 },
    Hnn(Hnn),
    Cov(RefCell<HashMap<(usize, usize), Rc<Cov>>>),
}

struct Hnn {
    stable: usize,
    /// Lowest and highest subscript of each non-stable relator generator.
    levels: Vec<Option<(i64, i64)>>,
    lowest: i64,
    exact: OnceCell<Rc<Split>>,
    anchored: OnceCell<Rc<Split>>,
}

/// The base group of an HNN node for one choice of subscript ranges.
struct Split {
    base: Rc<Node>,
    ranges: Vec<Option<(i64, i64)>>,
    offset: Vec<usize>,
    owner: Vec<(usize, i64)>,
    /// Generators of the associated subgroup below the top subscript.
    lower: Vec<usize>,
    /// Generators of the associated subgroup above the bottom subscript.
    upper: Vec<usize>,
}

struct Cov {
    target: Rc<Node>,
    substituted: usize,
    rooted: usize,
    alpha: i64,
    beta: i64,
}

impl Node {
    fn new(ngens: usize, relator: Word, depth: usize) -> Node {
        let supp = support(&relator, ngens);
        let kind = if relator.is_empty() {
            Kind::Free { killed: None }
        } else if supp.len() == 1 {
            if relator.len() == 1 {
                Kind::Free {
                    killed: Some(supp[0]),
                }
            } else {
                Kind::Torsion {
                    gen: supp[0],
                    order: relator.len() as u32,
                }
            }
        } else {
            let sums = exponent_sums(&relator, ngens);
            match supp.iter().copied().find(|&g| sums[g] == 0) {
                Some(t) => Kind::Hnn(Hnn::new(&relator, ngens, t)),
                None => Kind::Cov(RefCell::new(HashMap::new())),
            }
        };
        Node {
            ngens,
            relator,
            depth,
            kind,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn relator_support(&self) -> Vec<usize> {
        support(&self.relator, self.ngens)
    }

    /// Reduced word over `y` equal to `g`, or `None` when `g ∉ ⟨y⟩`.
    /// `y` is sorted and must omit a relator generator.
    fn member(&self, sh: &Shared, g: &[i32], y: &[usize]) -> Result<Option<Word>, BudgetExceeded> {
        sh.tick()?;
        sh.check_len(g.len())?;
        let g = free_reduce(g);
        if g.iter().all(|&x| y.binary_search(&gen_of(x)).is_ok()) {
            return Ok(Some(g));
        }
        let key = (g, y.to_vec());
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let g = &key.0;
        let out = match &self.kind {
            Kind::Free { killed } => {
                let kept: Word = g
                    .iter()
                    .copied()
                    .filter(|&x| Some(gen_of(x)) != *killed)
                    .collect();
                let kept = free_reduce(&kept);
                kept.iter()
                    .all(|&x| y.binary_search(&gen_of(x)).is_ok())
                    .then_some(kept)
            }
            Kind::Torsion { gen, order } => torsion_member(g, *gen, *order, y),
            Kind::Hnn(h) => {
                if y.binary_search(&h.stable).is_ok() {
                    self.hnn_member_with_stable(sh, h, g, y)?
                } else {
                    self.hnn_member_without_stable(sh, h, g, y)?
                }
            }
            Kind::Cov(_) => self.cov_member(sh, g, y)?,
        };
        self.memo.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn exact_split(&self, sh: &Shared, h: &Hnn) -> Result<Rc<Split>, BudgetExceeded> {
        if let Some(s) = h.exact.get() {
            return Ok(s.clone());
        }
        let ranges = (0..self.ngens)
            .map(|x| {
                if x == h.stable {
                    None
                } else {
                    Some(h.levels[x].unwrap_or((0, 0)))
                }
            })
            .collect();
        let s = Rc::new(self.build_split(sh, h, ranges)?);
        Ok(h.exact.get_or_init(|| s).clone())
    }

    fn anchored_split(&self, sh: &Shared, h: &Hnn) -> Result<Rc<Split>, BudgetExceeded> {
        if let Some(s) = h.anchored.get() {
            return Ok(s.clone());
        }
        let c = h.lowest;
        let ranges = (0..self.ngens)
            .map(|x| {
                if x == h.stable {
                    None
                } else {
                    Some(h.levels[x].map_or((c, c), |(_, hi)| (c, hi)))
                }
            })
            .collect();
        let s = Rc::new(self.build_split(sh, h, ranges)?);
        Ok(h.anchored.get_or_init(|| s).clone())
    }

    fn build_split(
        &self,
        sh: &Shared,
        h: &Hnn,
        ranges: Vec<Option<(i64, i64)>>,
    ) -> Result<Split, BudgetExceeded> {
        let mut offset = vec![usize::MAX; self.ngens];
        let mut owner = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for x in 0..self.ngens {
            let Some((lo, hi)) = ranges[x] else { continue };
            offset[x] = owner.len();
            for j in lo..=hi {
                if j < hi {
                    lower.push(owner.len());
                }
                if j > lo {
                    upper.push(owner.len());
                }
                owner.push((x, j));
            }
        }
        let mut level = 0i64;
        let mut base_rel = Vec::new();
        for &l in &self.relator {
            let x = gen_of(l);
            if x == h.stable {
                level += l.signum() as i64;
            } else {
                let lo = ranges[x].expect("non-stable generator").0;
                let idx = offset[x] + (level - lo) as usize;
                base_rel.push(letter(idx, l.signum()));
            }
        }
        let base = sh.node(owner.len(), base_rel, self.depth + 1)?;
        Ok(Split {
            base,
            ranges,
            offset,
            owner,
            lower,
            upper,
        })
    }

    /// `g ∈ ⟨Y⟩` with the stable letter outside `Y`: conjugate into the
    /// anchor level, Britton-reduce, and test in the base group.
    fn hnn_member_without_stable(
        &self,
        sh: &Shared,
        h: &Hnn,
        g: &[i32],
        y: &[usize],
    ) -> Result<Option<Word>, BudgetExceeded> {
        let split = self.anchored_split(sh, h)?;
        let c = h.lowest;
        let mut br = Britton::new(&split, sh);
        br.push_t_power(c)?;
        br.push_word(g, h.stable, c)?;
        br.push_t_power(-c)?;
        if !br.ts.is_empty() {
            return Ok(None);
        }
        let seg = br.segs.pop().expect("one segment");
        let mut anchored: Vec<usize> = y.iter().map(|&x| split.index(x, c)).collect();
        anchored.sort_unstable();
        Ok(split.base.member(sh, &seg, &anchored)?.map(|v| {
            v.iter()
                .map(|&l| letter(split.owner[gen_of(l)].0, l.signum()))
                .collect()
        }))
    }

    /// `g ∈ ⟨Y⟩` with the stable letter inside `Y`. `⟨Y⟩` is itself an HNN
    /// extension of `K = ⟨x_j : x ∈ Y⟩`; syllables are peeled from the right,
    /// each split as (associated-subgroup part)(K part) inside the Magnus
    /// subgroup they generate together.
    fn hnn_member_with_stable(
        &self,
        sh: &Shared,
        h: &Hnn,
        g: &[i32],
        y: &[usize],
    ) -> Result<Option<Word>, BudgetExceeded> {
        let split = self.exact_split(sh, h)?;
        let mut br = Britton::new(&split, sh);
        br.push_word(g, h.stable, 0)?;
        let Britton { mut segs, ts, .. } = br;
        let k_gens: Vec<usize> = {
            let mut v: Vec<usize> = (0..split.owner.len())
                .filter(|&i| {
                    let x = split.owner[i].0;
                    y.binary_search(&x).is_ok()
                })
                .collect();
            v.sort_unstable();
            v
        };
        let mut pieces: Vec<Word> = vec![Vec::new(); ts.len()];
        for i in (1..segs.len()).rev() {
            let e = ts[i - 1];
            let assoc = if e > 0 { &split.lower } else { &split.upper };
            let mut union: Vec<usize> = assoc.iter().chain(k_gens.iter()).copied().collect();
            union.sort_unstable();
            union.dedup();
            let Some(v) = split.base.member(sh, &segs[i], &union)? else {
                return Ok(None);
            };
            let cut = v
                .iter()
                .position(|&l| assoc.binary_search(&gen_of(l)).is_err())
                .unwrap_or(v.len());
            let (head, tail) = v.split_at(cut);
            if tail
                .iter()
                .any(|&l| k_gens.binary_search(&gen_of(l)).is_err())
            {
                return Ok(None);
            }
            pieces[i - 1] = tail.to_vec();
            let moved = split.shift(head, e as i64);
            for x in moved {
                push_reduced(&mut segs[i - 1], x);
            }
            sh.check_len(segs[i - 1].len())?;
        }
        let Some(first) = split.base.member(sh, &segs[0], &k_gens)? else {
            return Ok(None);
        };
        let mut out = Vec::new();
        split.lift_into(&first, h.stable, &mut out);
        for (e, piece) in ts.iter().zip(&pieces) {
            push_reduced(&mut out, letter(h.stable, *e as i32));
            split.lift_into(piece, h.stable, &mut out);
        }
        debug_assert!(out.iter().all(|&l| y.binary_search(&gen_of(l)).is_ok()));
        Ok(Some(out))
    }

    fn cov_member(
        &self,
        sh: &Shared,
        g: &[i32],
        y: &[usize],
    ) -> Result<Option<Word>, BudgetExceeded> {
        let Kind::Cov(variants) = &self.kind else {
            unreachable!()
        };
        let supp = self.relator_support();
        let z = supp
            .iter()
            .copied()
            .find(|g| y.binary_search(g).is_err())
            .expect("Magnus subset omits a relator generator");
        let x = supp
            .iter()
            .copied()
            .find(|&g| g != z)
            .expect("two generators");
        let existing = variants.borrow().get(&(z, x)).cloned();
        let cov = match existing {
            Some(c) => c,
            None => {
                let c = Rc::new(self.build_cov(sh, z, x)?);
                variants.borrow_mut().insert((z, x), c.clone());
                c
            }
        };
        let image = cov.substitute(g);
        sh.check_len(image.len())?;
        let Some(v) = cov.target.member(sh, &image, y)? else {
            return Ok(None);
        };
        // v-syllables must be multiples of α to come from x
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            if gen_of(v[i]) != cov.rooted {
                push_reduced(&mut out, v[i]);
                i += 1;
                continue;
            }
            let mut e = 0i64;
            while i < v.len() && gen_of(v[i]) == cov.rooted {
                e += v[i].signum() as i64;
                i += 1;
            }
            if e % cov.alpha != 0 {
                return Ok(None);
            }
            let q = e / cov.alpha;
            for _ in 0..q.unsigned_abs() {
                push_reduced(&mut out, letter(cov.rooted, q.signum() as i32));
            }
        }
        Ok(Some(out))
    }

    fn build_cov(&self, sh: &Shared, z: usize, x: usize) -> Result<Cov, BudgetExceeded> {
        let sums = exponent_sums(&self.relator, self.ngens);
        let (alpha, beta) = (sums[z], sums[x]);
        let rel = substitute(&self.relator, z, x, alpha, beta);
        Ok(Cov {
            target: sh.node(self.ngens, rel, self.depth + 1)?,
            substituted: z,
            rooted: x,
            alpha,
            beta,
        })
    }

    fn breakdown(&self, sh: &Shared) -> Result<BreakdownNode, BudgetExceeded> {
        Ok(match &self.kind {
            Kind::Free { killed } => BreakdownNode::FreeBase {
                gens: self.ngens,
                killed: *killed,
            },
            Kind::Torsion { gen, order } => BreakdownNode::TorsionBase {
                gens: self.ngens,
                generator: *gen,
                order: *order,
            },
            Kind::Hnn(h) => {
                let split = self.anchored_split(sh, h)?;
                BreakdownNode::HnnStep {
                    gens: self.ngens,
                    stable: h.stable,
                    ranges: split
                        .ranges
                        .iter()
                        .enumerate()
                        .filter_map(|(x, r)| r.map(|(lo, hi)| (x, lo, hi)))
                        .collect(),
                    base: Box::new(split.base.breakdown(sh)?),
                }
            }
            Kind::Cov(variants) => {
                let supp = self.relator_support();
                let (z, x) = (supp[0], supp[1]);
                let existing = variants.borrow().get(&(z, x)).cloned();
                let cov = match existing {
                    Some(c) => c,
                    None => {
                        let c = Rc::new(self.build_cov(sh, z, x)?);
                        variants.borrow_mut().insert((z, x), c.clone());
                        c
                    }
                };
                BreakdownNode::ChangeOfVariables {
                    gens: self.ngens,
                    substituted: cov.substituted,
                    rooted: cov.rooted,
                    alpha: cov.alpha,
                    beta: cov.beta,
                    inner: Box::new(cov.target.breakdown(sh)?),
                }
            }
        })
    }
}

impl Hnn {
    fn new(relator: &[i32], ngens: usize, stable: usize) -> Hnn {
        let mut levels: Vec<Option<(i64, i64)>> = vec![None; ngens];
        let mut level = 0i64;
        for &l in relator {
            let x = gen_of(l);
            if x == stable {
                level += l.signum() as i64;
                continue;
            }
            levels[x] = Some(match levels[x] {
                None => (level, level),
                Some((lo, hi)) => (lo.min(level), hi.max(level)),
            });
        }
        let lowest = levels.iter().flatten().map(|r| r.0).min().unwrap_or(0);
        Hnn {
            stable,
            levels,
            lowest,
            exact: OnceCell::new(),
            anchored: OnceCell::new(),
        }
    }
}

impl Split {
    fn index(&self, x: usize, j: i64) -> usize {
        let (lo, _) = self.ranges[x].expect("non-stable generator");
        self.offset[x] + (j - lo) as usize
    }

    /// Conjugation by `t^e` on the associated subgroups: subscripts move by `e`.
    fn shift(&self, w: &[i32], e: i64) -> Word {
        w.iter()
            .map(|&l| {
                let (x, j) = self.owner[gen_of(l)];
                letter(self.index(x, j + e), l.signum())
            })
            .collect()
    }

    /// Appends `tʲ x tʲ⁻¹` for each subscripted letter `x_j`.
    fn lift_into(&self, w: &[i32], stable: usize, out: &mut Word) {
        for &l in w {
            let (x, j) = self.owner[gen_of(l)];
            let t = letter(stable, j.signum() as i32);
            for _ in 0..j.unsigned_abs() {
                push_reduced(out, t);
            }
            push_reduced(out, letter(x, l.signum()));
            for _ in 0..j.unsigned_abs() {
                push_reduced(out, -t);
            }
        }
    }
}

impl Cov {
    fn substitute(&self, w: &[i32]) -> Word {
        substitute(w, self.substituted, self.rooted, self.alpha, self.beta)
    }
}

/// Image of `w` under `z ↦ z·x^{−β}`, `x ↦ x^{α}`; in the target `z` plays
/// the role of `u` and `x` the role of the root `v`.
fn substitute(w: &[i32], z: usize, x: usize, alpha: i64, beta: i64) -> Word {
    let mut out = Vec::with_capacity(w.len() * 2);
    let root_power = |e: i64, out: &mut Word| {
        for _ in 0..e.unsigned_abs() {
            push_reduced(out, letter(x, e.signum() as i32));
        }
    };
    for &l in w {
        let g = gen_of(l);
        if g == z {
            if l > 0 {
                push_reduced(&mut out, l);
                root_power(-beta, &mut out);
            } else {
                root_power(beta, &mut out);
                push_reduced(&mut out, l);
            }
        } else if g == x {
            root_power(alpha * l.signum() as i64, &mut out);
        } else {
            push_reduced(&mut out, l);
        }
    }
    out
}

/// Britton reduction over a split: alternating base segments and stable letters.
struct Britton<'a> {
    split: &'a Split,
    sh: &'a Shared,
    segs: Vec<Word>,
    ts: Vec<i8>,
}

impl<'a> Britton<'a> {
    fn new(split: &'a Split, sh: &'a Shared) -> Self {
        Britton {
            split,
            sh,
            segs: vec![Vec::new()],
            ts: Vec::new(),
        }
    }

    fn push_h(&mut self, x: i32) -> Result<(), BudgetExceeded> {
        let seg = self.segs.last_mut().expect("segment");
        push_reduced(seg, x);
        self.sh.check_len(seg.len())
    }

    fn push_t(&mut self, e: i8) -> Result<(), BudgetExceeded> {
        if self.ts.last() == Some(&-e) {
            let seg = self.segs.last().expect("segment");
            if seg.is_empty() {
                self.segs.pop();
                self.ts.pop();
                return Ok(());
            }
            // t h t⁻¹ with h below the top, or t⁻¹ h t with h above the bottom
            let (assoc, shift) = if e < 0 {
                (&self.split.lower, 1)
            } else {
                (&self.split.upper, -1)
            };
            if let Some(v) = self.split.base.member(self.sh, seg, assoc)? {
                self.segs.pop();
                self.ts.pop();
                for x in self.split.shift(&v, shift) {
                    self.push_h(x)?;
                }
                return Ok(());
            }
        }
        self.ts.push(e);
        self.segs.push(Vec::new());
        self.sh.check_len(self.ts.len())
    }

    fn push_t_power(&mut self, n: i64) -> Result<(), BudgetExceeded> {
        for _ in 0..n.unsigned_abs() {
            self.push_t(n.signum() as i8)?;
        }
        Ok(())
    }

    /// Pushes `g`, rewriting each non-stable letter `x` met at stable-letter
    /// height `p` as `t^{-j} x_j t^{j}` with `j` the nearest subscript in range.
    fn push_word(&mut self, g: &[i32], stable: usize, start: i64) -> Result<(), BudgetExceeded> {
        let mut level = start;
        for &l in g {
            let x = gen_of(l);
            if x == stable {
                self.push_t(l.signum() as i8)?;
                level += l.signum() as i64;
                continue;
            }
            let (lo, hi) = self.split.ranges[x].expect("non-stable generator");
            let j = level.clamp(lo, hi);
            self.push_t_power(-j)?;
            self.push_h(letter(self.split.index(x, j), l.signum()))?;
            self.push_t_power(j)?;
        }
        Ok(())
    }
}

fn torsion_member(g: &[i32], gen: usize, order: u32, y: &[usize]) -> Option<Word> {
    // free-product normal form of F(others) * ℤ/order
    enum Syl {
        Free(i32),
        Power(i64),
    }
    let n = order as i64;
    let mut stack: Vec<Syl> = Vec::new();
    for &l in g {
        if gen_of(l) == gen {
            let e = l.signum() as i64;
            match stack.last_mut() {
                Some(Syl::Power(k)) => {
                    *k = (*k + e).rem_euclid(n);
                    if *k == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push(Syl::Power(e.rem_euclid(n))),
            }
        } else {
            match stack.last() {
                Some(Syl::Free(top)) if *top == -l => {
                    stack.pop();
                }
                _ => stack.push(Syl::Free(l)),
            }
        }
    }
    let mut out = Vec::with_capacity(stack.len());
    for s in stack {
        match s {
            Syl::Power(_) => return None,
            Syl::Free(l) => {
                if y.binary_search(&gen_of(l)).is_err() {
                    return None;
                }
                out.push(l);
            }
        }
    }
    Some(out)
}

/// Decision structure for triviality in `F(S)/⟨⟨r⟩⟩`.
///
/// Holds memo caches behind `RefCell`; use one instance per thread.
pub struct WordProblemSolver {
    presentation: Presentation,
    conjugator: ReducedWord,
    shared: Shared,
    root: Rc<Node>,
}

impl std::fmt::Debug for WordProblemSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WordProblemSolver")
            .field("presentation", &self.presentation)
            .field("calls", &self.shared.calls.get())
            .finish()
    }
}

/// Counters reported alongside inconclusive answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BudgetUsage {
    pub oracle_calls: u64,
    pub depth: usize,
    pub nodes: usize,
}

/// Builds the solver and expands the breakdown used for the word problem.
pub fn build_solver(
    p: &Presentation,
    budget: ResourceBudget,
) -> Result<WordProblemSolver, BudgetExceeded> {
    let (core, conjugator) = p.relator.cyclic_reduce();
    let shared = Shared {
        budget,
        calls: Cell::new(0),
        max_seen_depth: Cell::new(0),
        registry: RefCell::new(HashMap::new()),
    };
    let root = shared.node(p.alphabet.len(), core.to_signed(), 0)?;
    root.breakdown(&shared)?;
    Ok(WordProblemSolver {
        presentation: Presentation::new(p.alphabet.clone(), core),
        conjugator,
        shared,
        root,
    })
}

impl WordProblemSolver {
    /// Cyclically reduced relator actually used.
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// `c` with original relator `= c⁻¹ · core · c`.
    pub fn relator_conjugator(&self) -> &ReducedWord {
        &self.conjugator
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.presentation.alphabet
    }

    pub fn breakdown(&self) -> Result<BreakdownNode, BudgetExceeded> {
        self.root.breakdown(&self.shared)
    }

    pub fn usage(&self) -> BudgetUsage {
        BudgetUsage {
            oracle_calls: self.shared.calls.get(),
            depth: self.shared.max_seen_depth.get(),
            nodes: self.shared.registry.borrow().len(),
        }
    }

    fn check_word(&self, w: &ReducedWord) -> Result<(), WordError> {
        if w.rank_bound() > self.presentation.alphabet.len() {
            return Err(WordError::UnknownGenerator(format!(
                "#{}",
                w.rank_bound() - 1
            )));
        }
        Ok(())
    }

    /// Whether `w = 1` in the quotient.
    pub fn is_trivial(&self, w: &ReducedWord) -> Result<bool, BudgetExceeded> {
        self.check_word(w).expect("word over the solver's alphabet");
        Ok(self
            .root
            .member(&self.shared, &w.to_signed(), &[])?
            .is_some())
    }

    pub fn equal(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool, BudgetExceeded> {
        self.is_trivial(&u.mul(&v.inverse()))
    }

    /// If `w` lies in the Magnus subgroup generated by `gens`, the unique
    /// reduced word over `gens` equal to it. `gens` must omit a generator
    /// mentioned by the relator.
    pub fn magnus_rewrite(
        &self,
        w: &ReducedWord,
        gens: &[usize],
    ) -> Result<Option<ReducedWord>, BudgetExceeded> {
        self.check_word(w).expect("word over the solver's alphabet");
        let mut y = gens.to_vec();
        y.sort_unstable();
        y.dedup();
        assert!(
            self.presentation.relator.is_empty()
                || self
                    .presentation
                    .relator
                    .letters()
                    .iter()
                    .any(|l| y.binary_search(&l.gen).is_err()),
            "generating set must omit a relator generator"
        );
        Ok(self
            .root
            .member(&self.shared, &w.to_signed(), &y)?
            .map(|v| ReducedWord::from_signed(&v)))
    }
}

/// Whether `w ∈ ⟨⟨r⟩⟩` in the free group on `alphabet`.
pub fn in_normal_closure(
    w: &ReducedWord,
    r: &ReducedWord,
    alphabet: &Alphabet,
    budget: ResourceBudget,
) -> Result<bool, BudgetExceeded> {
    let solver = build_solver(&Presentation::new(alphabet.clone(), r.clone()), budget)?;
    solver.is_trivial(w)
}

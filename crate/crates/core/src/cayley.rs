//! Balls in the Cayley graph of `F(S)/⟨⟨r⟩⟩` and cellular 1-chains of paths.

use std::collections::{BTreeMap, HashMap};

use crate::error::CayleyError;
use crate::magnus::{build_solver, ResourceBudget};
use crate::words::{exponent_vector, Alphabet, Letter, ReducedWord};
use crate::Presentation;

pub const DEFAULT_VERTEX_CAP: usize = 100_000;

/// A finite piece of the Cayley graph around the identity.
///
/// Vertex 0 is the basepoint. Edges are labelled by generator indices and
/// point from `g` to `g·s`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub vertices: Vec<ReducedWord>,
    pub distances: Vec<usize>,
    pub edges: Vec<(usize, usize, usize)>,
    pub radius: usize,
    alphabet: Alphabet,
    outgoing: HashMap<(usize, usize), usize>,
    incoming: HashMap<(usize, usize), usize>,
}

impl Ball {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge leaving `v` labelled `gen`, if it lies in the ball.
    pub fn edge_from(&self, v: usize, gen: usize) -> Option<usize> {
        self.outgoing.get(&(v, gen)).copied()
    }

    /// Edge entering `v` labelled `gen`, if it lies in the ball.
    pub fn edge_into(&self, v: usize, gen: usize) -> Option<usize> {
        self.incoming.get(&(v, gen)).copied()
    }

    /// Follows a path from the basepoint, returning its endpoint and chain.
    pub fn trace(&self, w: &ReducedWord) -> Result<(usize, EdgeChain), CayleyError> {
        let mut at = 0;
        let mut chain = EdgeChain::default();
        for &l in w.letters() {
            let step = if l.inv {
                self.edge_into(at, l.gen).map(|e| (e, self.edges[e].0, -1))
            } else {
                self.edge_from(at, l.gen).map(|e| (e, self.edges[e].2, 1))
            };
            let (e, next, sign) = step.ok_or(CayleyError::PathEscapesBall(self.radius))?;
            chain.add(e, sign);
            at = next;
        }
        Ok((at, chain))
    }
}

/// Integer combination of ball edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeChain {
    pub coefficients: BTreeMap<usize, i64>,
}

impl EdgeChain {
    fn add(&mut self, edge: usize, c: i64) {
        let slot = self.coefficients.entry(edge).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.coefficients.remove(&edge);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The nonzero integer `k` with `self = k · other`, if any.
    pub fn multiple_of(&self, other: &EdgeChain) -> Option<i64> {
        let (&e, &c) = other.coefficients.iter().next()?;
        let mine = self.coefficients.get(&e).copied().unwrap_or(0);
        if mine == 0 || mine % c != 0 || self.coefficients.len() != other.coefficients.len() {
            return None;
        }
        let k = mine / c;
        other
            .coefficients
            .iter()
            .all(|(e, c)| self.coefficients.get(e) == Some(&(k * c)))
            .then_some(k)
    }
}

pub fn build_ball(
    r: &ReducedWord,
    alphabet: &Alphabet,
    radius: usize,
    budget: ResourceBudget,
) -> Result<Ball, CayleyError> {
    build_ball_capped(r, alphabet, radius, budget, DEFAULT_VERTEX_CAP)
}

/// Breadth-first ball; new words are compared against the existing vertices
/// with the same abelian image modulo `r`.
pub fn build_ball_capped(
    r: &ReducedWord,
    alphabet: &Alphabet,
    radius: usize,
    budget: ResourceBudget,
    cap: usize,
) -> Result<Ball, CayleyError> {
    let solver = build_solver(&Presentation::new(alphabet.clone(), r.clone()), budget)?;
    let r_image = exponent_vector(r, alphabet);
    let image = |w: &ReducedWord| exponent_vector(w, alphabet).reduce_mod(&r_image);

    let mut vertices = vec![ReducedWord::identity()];
    let mut distances = vec![0];
    let mut buckets: HashMap<_, Vec<usize>> = HashMap::new();
    buckets.entry(image(&vertices[0])).or_default().push(0);

    let lookup = |w: &ReducedWord,
                  vertices: &[ReducedWord],
                  buckets: &HashMap<_, Vec<usize>>|
     -> Result<Option<usize>, CayleyError> {
        if let Some(vs) = buckets.get(&image(w)) {
            for &v in vs {
                if solver.equal(w, &vertices[v])? {
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    };

    let mut head = 0;
    while head < vertices.len() {
        let d = distances[head];
        if d < radius {
            for gen in 0..alphabet.len() {
                for inv in [false, true] {
                    let w = vertices[head].mul(&ReducedWord::from_letters([Letter::new(gen, inv)]));
                    if lookup(&w, &vertices, &buckets)?.is_none() {
                        if vertices.len() >= cap {
                            return Err(CayleyError::BallTooLarge(cap));
                        }
                        buckets.entry(image(&w)).or_default().push(vertices.len());
                        vertices.push(w);
                        distances.push(d + 1);
                    }
                }
            }
        }
        head += 1;
    }

    let mut edges = Vec::new();
    let mut outgoing = HashMap::new();
    let mut incoming = HashMap::new();
    for v in 0..vertices.len() {
        for gen in 0..alphabet.len() {
            let w = vertices[v].mul(&ReducedWord::from_letters([Letter::new(gen, false)]));
            if let Some(t) = lookup(&w, &vertices, &buckets)? {
                outgoing.insert((v, gen), edges.len());
                incoming.insert((t, gen), edges.len());
                edges.push((v, gen, t));
            }
        }
    }

    Ok(Ball {
        vertices,
        distances,
        edges,
        radius,
        alphabet: alphabet.clone(),
        outgoing,
        incoming,
    })
}

/// `k ≠ 0` with chain(w) = k · chain(r), both read from the basepoint.
///
/// Returns `None` when `w` does not close up, when its chain vanishes, or when
/// the chains are not proportional.
pub fn chain_multiple_check(
    w: &ReducedWord,
    r: &ReducedWord,
    ball: &Ball,
) -> Result<Option<i64>, CayleyError> {
    let (end, cw) = ball.trace(w)?;
    if end != 0 || cw.is_zero() {
        return Ok(None);
    }
    let (_, cr) = ball.trace(r)?;
    Ok(cw.multiple_of(&cr))
}

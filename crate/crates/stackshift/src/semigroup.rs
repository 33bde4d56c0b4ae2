//! The graph inverse semigroup of a finite directed graph, used as an
//! independent admissibility oracle for Dyck and Markov-Dyck languages.
//!
//! For a graph `G` the semigroup is generated by symbols `e-` and `e+` (one
//! pair per edge) together with vertex idempotents `1_V`, subject to
//!
//! ```text
//! 1_V 1_V = 1_V            1_U 1_W = 0                 (U != W)
//! f- g+   = 1_{s(f)}       f- g+   = 0                 (f != g)
//! 1_{s(f)} f- = f- 1_{t(f)}        1_{t(f)} f+ = f+ 1_{s(f)}
//! ```
//!
//! A word over the signed edge symbols is admissible for the Markov-Dyck
//! shift of `G` exactly when its product is nonzero. Since `f- g+`
//! adjacencies are the only reducible ones, a nonzero product normalizes to
//! a plus-run followed by a minus-run; both runs spell paths of `G` starting
//! at a common anchor vertex (the plus-run traverses its path backwards in
//! word order).

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::ids::{EdgeId, Symbol, VertexId};

/// Whether an edge symbol is a minus (push-like) or plus (pop-like)
/// generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

/// An edge of the base graph with a sign, e.g. `e1-` or `e1+`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEdge {
    pub edge: EdgeId,
    pub sign: Sign,
}

impl SignedEdge {
    pub fn minus(edge: impl Into<EdgeId>) -> Self {
        SignedEdge {
            edge: edge.into(),
            sign: Sign::Minus,
        }
    }

    pub fn plus(edge: impl Into<EdgeId>) -> Self {
        SignedEdge {
            edge: edge.into(),
            sign: Sign::Plus,
        }
    }

    /// Parses `<edge>-` or `<edge>+`.
    pub fn parse(s: &str) -> Result<Self> {
        let (edge, sign) = match s.strip_suffix('-') {
            Some(edge) => (edge, Sign::Minus),
            None => match s.strip_suffix('+') {
                Some(edge) => (edge, Sign::Plus),
                None => return Err(Error::BadSignedSymbol(s.to_owned())),
            },
        };
        if edge.is_empty() {
            return Err(Error::BadSignedSymbol(s.to_owned()));
        }
        Ok(SignedEdge {
            edge: edge.into(),
            sign,
        })
    }

    pub fn parse_symbol(s: &Symbol) -> Result<Self> {
        Self::parse(s.as_str())
    }
}

impl fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Minus => write!(f, "{}-", self.edge),
            Sign::Plus => write!(f, "{}+", self.edge),
        }
    }
}

/// A nonzero element in normal form, or zero.
///
/// The normal form `(minus, plus, anchor)` denotes the product
/// `plus_k+ ... plus_1+ minus_1- ... minus_n-` where `plus = plus_1 .. plus_k`
/// and `minus = minus_1 .. minus_n` are paths of the base graph and both
/// start at `anchor`. The idempotent `1_V` is `(ε, ε, V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemigroupElement {
    Zero,
    NormalForm {
        minus: Vec<EdgeId>,
        plus: Vec<EdgeId>,
        anchor: VertexId,
    },
}

impl SemigroupElement {
    pub fn is_zero(&self) -> bool {
        matches!(self, SemigroupElement::Zero)
    }

    pub fn idempotent(v: impl Into<VertexId>) -> Self {
        SemigroupElement::NormalForm {
            minus: Vec::new(),
            plus: Vec::new(),
            anchor: v.into(),
        }
    }
}

impl fmt::Display for SemigroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemigroupElement::Zero => write!(f, "0"),
            SemigroupElement::NormalForm {
                minus,
                plus,
                anchor,
            } => {
                if minus.is_empty() && plus.is_empty() {
                    return write!(f, "1_{anchor}");
                }
                for e in plus.iter().rev() {
                    write!(f, "{e}+")?;
                }
                for e in minus {
                    write!(f, "{e}-")?;
                }
                Ok(())
            }
        }
    }
}

/// Left-to-right product of the generators named by `word`, with the
/// defining relations applied eagerly. The word must be nonempty (the
/// semigroup has no identity element).
pub fn semigroup_reduce<'a, I>(base: &DirectedGraph, word: I) -> Result<SemigroupElement>
where
    I: IntoIterator<Item = &'a SignedEdge>,
{
    // Running normal form. `minus` is the open minus-run (a path from
    // `anchor`); `plus` is the closed plus-run (a path from `anchor`,
    // traversed backwards in word order). The right end of the product is
    // the target of the last minus edge, or `anchor` when the minus-run is
    // empty.
    let mut state: Option<(Vec<EdgeId>, Vec<EdgeId>, VertexId)> = None;
    for gen in word {
        if !base.has_edge(&gen.edge) {
            return Err(Error::NoSuchEdge(gen.edge.clone()));
        }
        let src = base.source(&gen.edge)?.clone();
        let tgt = base.target(&gen.edge)?.clone();
        let Some((minus, plus, anchor)) = &mut state else {
            state = Some(match gen.sign {
                Sign::Minus => (vec![gen.edge.clone()], Vec::new(), src),
                Sign::Plus => (Vec::new(), vec![gen.edge.clone()], src),
            });
            continue;
        };
        let right_end = match minus.last() {
            Some(last) => base.target(last)?.clone(),
            None => anchor.clone(),
        };
        match gen.sign {
            Sign::Minus => {
                // appending f-: needs 1_{right_end} 1_{s(f)} nonzero
                if right_end != src {
                    return Ok(SemigroupElement::Zero);
                }
                minus.push(gen.edge.clone());
            }
            Sign::Plus => match minus.pop() {
                // f- g+ reduces to 1_{s(f)} when f = g and to 0 otherwise
                Some(last) => {
                    if last != gen.edge {
                        return Ok(SemigroupElement::Zero);
                    }
                }
                None => {
                    // appending g+ after a plus-run: needs right_end = t(g);
                    // the anchor moves to s(g)
                    if right_end != tgt {
                        return Ok(SemigroupElement::Zero);
                    }
                    plus.insert(0, gen.edge.clone());
                    *anchor = src;
                }
            },
        }
    }
    match state {
        Some((minus, plus, anchor)) => Ok(SemigroupElement::NormalForm {
            minus,
            plus,
            anchor,
        }),
        None => Err(Error::EmptyWord),
    }
}

/// True iff the product of `word` is nonzero. The empty word is admissible
/// by convention (it is in every subshift language).
pub fn semigroup_admissible<'a, I>(base: &DirectedGraph, word: I) -> Result<bool>
where
    I: IntoIterator<Item = &'a SignedEdge>,
{
    let mut iter = word.into_iter().peekable();
    if iter.peek().is_none() {
        return Ok(true);
    }
    Ok(!semigroup_reduce(base, iter)?.is_zero())
}

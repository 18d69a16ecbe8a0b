//! Derivation certificates: the algebraic form of van Kampen diagrams.
//!
//! A certificate asserts that its boundary word equals, in the free group, a
//! product of conjugated relators `U_1^{-1} R_1^{e_1} U_1 ... U_k^{-1} R_k^{e_k} U_k`;
//! its area is the number of factors. Certificates are stored as shared
//! trees so that gluing, mirroring, conjugating and shifting are cheap and
//! builders never re-copy quadratically; bulk constructions (conjugation
//! bands, smooth-word columns) are dedicated run nodes that expand to their
//! individual steps on demand.

mod banded;
mod json;

pub use banded::{Band, BandedDiagram, ChainError, Wedge};
pub use json::JsonError;

use crate::words::{Letter, Word};
use once_cell::sync::Lazy;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Group presentation a certificate lives over.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Presentation {
    /// The infinite presentation with relators `x_j^{x_i} = x_{j+1}` for
    /// `0 < j - i <= r`.
    Pr { r: u32 },
    /// The two-relator finite presentation on `x_0, x_1`.
    Finite,
}

/// The presentation used by every builder in this crate.
pub const P5: Presentation = Presentation::Pr { r: 5 };

/// Relator identifier. For `Pr`, the pair `(i, j)` names the relator word
/// `x_i^{-1} x_j x_i x_{j+1}^{-1}`; for the finite presentation the index 1
/// or 2 names the expanded two-generator relator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelatorId {
    Pr { i: u32, j: u32 },
    Finite(u8),
}

/// Finite relator 1: `x_1^{x_0^2} (x_1^{x_0 x_1})^{-1}`, freely reduced.
pub static FINITE_RELATOR_1: Lazy<Word> = Lazy::new(|| {
    let lhs = conj_word(&Word::power(1, 1), &Word::power(0, 2));
    let rhs = conj_word(&Word::power(1, 1), &"x0 x1".parse().unwrap());
    Word::concat(&[&lhs, &rhs.inverse()]).freely_reduced()
});

/// Finite relator 2: `x_1^{x_0^3} (x_1^{x_0^2 x_1})^{-1}`, freely reduced.
pub static FINITE_RELATOR_2: Lazy<Word> = Lazy::new(|| {
    let lhs = conj_word(&Word::power(1, 1), &Word::power(0, 3));
    let rhs = conj_word(&Word::power(1, 1), &"x0 x0 x1".parse().unwrap());
    Word::concat(&[&lhs, &rhs.inverse()]).freely_reduced()
});

fn conj_word(w: &Word, g: &Word) -> Word {
    Word::concat(&[&g.inverse(), w, g])
}

impl RelatorId {
    pub fn word(self) -> Word {
        match self {
            RelatorId::Pr { i, j } => Word::from_letters(vec![
                Letter::neg(i),
                Letter::pos(j),
                Letter::pos(i),
                Letter::neg(j + 1),
            ]),
            RelatorId::Finite(1) => FINITE_RELATOR_1.clone(),
            RelatorId::Finite(2) => FINITE_RELATOR_2.clone(),
            RelatorId::Finite(k) => panic!("finite relator index {k} out of range"),
        }
    }

    fn valid_for(self, p: Presentation) -> bool {
        match (self, p) {
            (RelatorId::Pr { i, j }, Presentation::Pr { r }) => j > i && j - i <= r,
            (RelatorId::Finite(k), Presentation::Finite) => k == 1 || k == 2,
            _ => false,
        }
    }

    fn shifted(self, k: u32) -> RelatorId {
        match self {
            RelatorId::Pr { i, j } => RelatorId::Pr { i: i + k, j: j + k },
            RelatorId::Finite(_) => panic!("cannot shift a finite relator"),
        }
    }
}

/// One conjugated-relator factor `U^{-1} R^e U`.
#[derive(Clone, Debug)]
pub struct CertStep {
    pub conjugator: Word,
    pub relator: RelatorId,
    pub exponent: i8,
}

impl CertStep {
    /// The factor as a word of the free group.
    pub fn word(&self) -> Word {
        let r = self.relator.word();
        let r = if self.exponent == 1 { r } else { r.inverse() };
        conj_word(&r, &self.conjugator)
    }
}

#[derive(Debug, Error)]
pub enum CertError {
    #[error("presentation mismatch")]
    PresentationMismatch,
    #[error("the shift is not defined over the finite presentation")]
    ShiftFinite,
    #[error("letter {letter} cannot be conjugated by x{conjugator}: difference outside 1..={radius}")]
    SubscriptRange {
        letter: Letter,
        conjugator: u32,
        radius: u32,
    },
    #[error("commutation band requires subscripts in 2..=5, got {0}")]
    CommutationRange(Letter),
    #[error("relator {0:?} is not valid for the presentation")]
    BadRelator(RelatorId),
    #[error("to_finite requires a certificate over P5")]
    NotOverP5,
    #[error("to_finite requires a boundary over x0, x1; found subscript {0}")]
    BoundarySubscript(u32),
}

#[derive(Clone)]
struct NodeRef {
    area: u64,
    node: Arc<Node>,
}

enum Node {
    Empty,
    Step(CertStep),
    Concat(Vec<NodeRef>),
    Conj { inner: NodeRef, by: Word },
    Mirror(NodeRef),
    Shift { inner: NodeRef, k: u32 },
    /// All `|v|` cells of the band conjugating `v` by `x_i`:
    /// boundary `x_i^{-1} v x_i psi(v)^{-1}`.
    BandRun { top: Word, conj_index: u32 },
    /// The `|t|` cells conjugating `x_start` down a smooth word `t`:
    /// boundary `t^{-1} x_start t x_{start+h}^{-1}` with `h` the height.
    SmoothRun { t: Word, start: u32 },
    /// A P5 certificate reinterpreted over the finite presentation via the
    /// substitution `x_{k+1} := x_1^{x_0^k}`.
    FiniteImage(NodeRef),
}

static EMPTY_NODE: Lazy<Arc<Node>> = Lazy::new(|| Arc::new(Node::Empty));

fn empty_ref() -> NodeRef {
    NodeRef {
        area: 0,
        node: EMPTY_NODE.clone(),
    }
}

impl Node {
    fn take_children(&mut self, out: &mut Vec<NodeRef>) {
        match self {
            Node::Empty | Node::Step(_) | Node::BandRun { .. } | Node::SmoothRun { .. } => {}
            Node::Concat(cs) => out.extend(cs.drain(..)),
            Node::Conj { inner, .. } | Node::Mirror(inner) | Node::Shift { inner, .. } => {
                out.push(std::mem::replace(inner, empty_ref()));
            }
            Node::FiniteImage(inner) => out.push(std::mem::replace(inner, empty_ref())),
        }
    }
}

// Trees can be thousands of levels deep; dismantle iteratively instead of
// letting the compiler-generated recursive drop overflow the stack.
impl Drop for Node {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        self.take_children(&mut stack);
        while let Some(nr) = stack.pop() {
            if let Ok(mut inner) = Arc::try_unwrap(nr.node) {
                inner.take_children(&mut stack);
            }
        }
    }
}

fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    match stack.last() {
        Some(&top) if top.cancels(l) => {
            stack.pop();
        }
        _ => stack.push(l),
    }
}

fn push_reduced_word(stack: &mut Vec<Letter>, w: &[Letter]) {
    for &l in w {
        push_reduced(stack, l);
    }
}

fn push_reduced_inverse(stack: &mut Vec<Letter>, w: &[Letter]) {
    for &l in w.iter().rev() {
        push_reduced(stack, l.inverse());
    }
}

/// The finite-presentation substitution: `x_0 -> x_0`,
/// `x_k -> x_0^{-(k-1)} x_1 x_0^{k-1}` for `k >= 1`, extended to words.
fn push_phi_reduced(stack: &mut Vec<Letter>, w: &[Letter]) {
    for &l in w {
        let k = l.index();
        if k == 0 {
            push_reduced(stack, l);
        } else {
            for _ in 0..k - 1 {
                push_reduced(stack, Letter::neg(0));
            }
            push_reduced(stack, Letter::new(1, l.sign()));
            for _ in 0..k - 1 {
                push_reduced(stack, Letter::pos(0));
            }
        }
    }
}

pub fn phi(w: &Word) -> Word {
    let mut stack = Vec::new();
    push_phi_reduced(&mut stack, w.letters());
    Word::from_letters(stack)
}

/// The smooth-run cell progression: for letter `r` (0-based) of `t`, the
/// relator is `(j_r, s_r)` used with exponent `+1` when the letter is
/// positive and `(j_r, s_r - 1)` with exponent `-1` otherwise, where `s_r`
/// is the running subscript before the letter acts.
fn smooth_cells(t: &Word, start: u32) -> Vec<(RelatorId, i8, u32)> {
    let mut cells = Vec::with_capacity(t.len());
    let mut s = start;
    for &l in t.letters() {
        let j = l.index();
        if l.is_positive() {
            cells.push((RelatorId::Pr { i: j, j: s }, 1, s));
            s += 1;
        } else {
            cells.push((RelatorId::Pr { i: j, j: s - 1 }, -1, s));
            s -= 1;
        }
    }
    cells
}

/// A derivation certificate over a fixed presentation.
#[derive(Clone)]
pub struct Certificate {
    presentation: Presentation,
    boundary: Word,
    root: NodeRef,
}

impl Certificate {
    pub fn presentation(&self) -> Presentation {
        self.presentation
    }

    pub fn boundary(&self) -> &Word {
        &self.boundary
    }

    /// Number of conjugated-relator factors (cells).
    pub fn area(&self) -> u64 {
        self.root.area
    }

    /// Zero steps with the given boundary (which must be freely trivial for
    /// the certificate to verify).
    pub fn empty(presentation: Presentation, boundary: Word) -> Certificate {
        Certificate {
            presentation,
            boundary,
            root: empty_ref(),
        }
    }

    /// A single factor. The recorded boundary is the factor itself.
    pub fn single(
        presentation: Presentation,
        conjugator: Word,
        relator: RelatorId,
        exponent: i8,
    ) -> Result<Certificate, CertError> {
        if !relator.valid_for(presentation) {
            return Err(CertError::BadRelator(relator));
        }
        assert!(exponent == 1 || exponent == -1);
        let step = CertStep {
            conjugator,
            relator,
            exponent,
        };
        let boundary = step.word();
        Ok(Certificate {
            presentation,
            boundary,
            root: NodeRef {
                area: 1,
                node: Arc::new(Node::Step(step)),
            },
        })
    }

    /// Replace the recorded boundary by a freely equal word.
    pub(crate) fn with_boundary(mut self, boundary: Word) -> Certificate {
        self.boundary = boundary;
        self
    }

    /// Concatenate factor sequences; the boundary is the free reduction of
    /// the concatenated boundaries.
    pub fn glue(a: Certificate, b: Certificate) -> Result<Certificate, CertError> {
        if a.presentation != b.presentation {
            return Err(CertError::PresentationMismatch);
        }
        let boundary = Word::concat(&[&a.boundary, &b.boundary]).freely_reduced();
        Ok(Certificate {
            presentation: a.presentation,
            boundary,
            root: concat_refs(vec![a.root, b.root]),
        })
    }

    /// Concatenation of factor sequences with an explicitly chosen boundary;
    /// the builders use it to keep the paper's unreduced boundary words.
    pub(crate) fn concat_parts(parts: Vec<Certificate>, boundary: Word) -> Certificate {
        let presentation = parts.first().map(|c| c.presentation).unwrap_or(P5);
        debug_assert!(parts.iter().all(|c| c.presentation == presentation));
        Certificate {
            presentation,
            boundary,
            root: concat_refs(parts.into_iter().map(|c| c.root).collect()),
        }
    }

    /// The certificate for the inverse boundary: factors reversed with
    /// exponents negated.
    pub fn mirror(self) -> Certificate {
        let boundary = self.boundary.inverse();
        Certificate {
            presentation: self.presentation,
            boundary,
            root: NodeRef {
                area: self.root.area,
                node: Arc::new(Node::Mirror(self.root)),
            },
        }
    }

    /// The certificate for `g^{-1} (boundary) g`.
    pub fn conjugate(self, g: Word) -> Certificate {
        if g.is_empty() {
            return self;
        }
        let boundary = conj_word(&self.boundary, &g);
        Certificate {
            presentation: self.presentation,
            boundary,
            root: NodeRef {
                area: self.root.area,
                node: Arc::new(Node::Conj {
                    inner: self.root,
                    by: g,
                }),
            },
        }
    }

    /// The shift `psi^k` applied to everything; defined over `Pr` only.
    pub fn shift_cert(self, k: u32) -> Result<Certificate, CertError> {
        match self.presentation {
            Presentation::Finite => Err(CertError::ShiftFinite),
            Presentation::Pr { .. } => {
                if k == 0 {
                    return Ok(self);
                }
                let boundary = self.boundary.shift(k);
                Ok(Certificate {
                    presentation: self.presentation,
                    boundary,
                    root: NodeRef {
                        area: self.root.area,
                        node: Arc::new(Node::Shift {
                            inner: self.root,
                            k,
                        }),
                    },
                })
            }
        }
    }

    /// The band of `|v|` cells realizing `v^{x_i} = psi(v)` over P5:
    /// boundary `x_i^{-1} v x_i psi(v)^{-1}`. Every letter `x_h^{±1}` of `v`
    /// must satisfy `0 < h - i <= 5`.
    pub fn band_conjugate(v: &Word, i: u32) -> Result<Certificate, CertError> {
        for &l in v.letters() {
            let h = l.index();
            if h <= i || h - i > 5 {
                return Err(CertError::SubscriptRange {
                    letter: l,
                    conjugator: i,
                    radius: 5,
                });
            }
        }
        let xi = Word::one(Letter::pos(i));
        let boundary = Word::concat(&[&xi.inverse(), v, &xi, &v.shift(1).inverse()]);
        Ok(Certificate {
            presentation: P5,
            boundary,
            root: NodeRef {
                area: v.len() as u64,
                node: Arc::new(Node::BandRun {
                    top: v.clone(),
                    conj_index: i,
                }),
            },
        })
    }

    /// The `|t|`-cell column conjugating `x_start` by a smooth word `t`:
    /// boundary `t^{-1} x_start t x_{start+h}^{-1}`. The caller guarantees
    /// smoothness; relator differences are validated here.
    pub(crate) fn smooth_run(t: &Word, start: u32) -> Result<Certificate, CertError> {
        let cells = smooth_cells(t, start);
        for &(rel, _, _) in &cells {
            if !rel.valid_for(P5) {
                return Err(CertError::BadRelator(rel));
            }
        }
        let end = cells
            .last()
            .map_or(start, |&(_, e, s)| if e == 1 { s + 1 } else { s - 1 });
        let boundary = Word::concat(&[
            &t.inverse(),
            &Word::one(Letter::pos(start)),
            t,
            &Word::one(Letter::neg(end)),
        ]);
        Ok(Certificate {
            presentation: P5,
            boundary,
            root: NodeRef {
                area: t.len() as u64,
                node: Arc::new(Node::SmoothRun {
                    t: t.clone(),
                    start,
                }),
            },
        })
    }

    /// Proof that `v` commutes with `(x_0 x_1^{-1})^l`, in `2 l |v|` cells.
    /// `v` may use subscripts 2..=5 with any signs.
    pub fn commutation_band(v: &Word, l: u32) -> Result<Certificate, CertError> {
        for &letter in v.letters() {
            if !(2..=5).contains(&letter.index()) {
                return Err(CertError::CommutationRange(letter));
            }
        }
        let g = Word::from_letters(vec![Letter::pos(0), Letter::neg(1)]);
        let x1inv = Word::one(Letter::neg(1));
        let single = Certificate::concat_parts(
            vec![
                Certificate::band_conjugate(v, 0)?.conjugate(x1inv.clone()),
                Certificate::band_conjugate(v, 1)?.mirror().conjugate(x1inv),
            ],
            Word::concat(&[&g.inverse(), v, &g, &v.inverse()]),
        );
        let mut parts = Vec::with_capacity(l as usize);
        for j in (0..l).rev() {
            let mut gj = Word::empty();
            for _ in 0..j {
                gj = Word::concat(&[&gj, &g]);
            }
            parts.push(single.clone().conjugate(gj));
        }
        let mut gl = Word::empty();
        for _ in 0..l {
            gl = Word::concat(&[&gl, &g]);
        }
        let boundary = Word::concat(&[&gl.inverse(), v, &gl, &v.inverse()]);
        Ok(Certificate::concat_parts(parts, boundary))
    }

    /// Free reduction of the factor product, computed without materializing
    /// individual steps.
    pub fn residual(&self) -> Word {
        enum Task<'a> {
            Enter(&'a Node),
            Exit(&'a Node),
        }
        let mut tasks = vec![Task::Enter(&self.root.node)];
        let mut vals: Vec<Vec<Letter>> = Vec::new();
        let mut arity: Vec<usize> = Vec::new();
        while let Some(task) = tasks.pop() {
            match task {
                Task::Enter(n) => match n {
                    Node::Empty => vals.push(Vec::new()),
                    Node::Step(step) => {
                        let mut s = Vec::new();
                        push_reduced_inverse(&mut s, step.conjugator.letters());
                        let r = step.relator.word();
                        if step.exponent == 1 {
                            push_reduced_word(&mut s, r.letters());
                        } else {
                            push_reduced_inverse(&mut s, r.letters());
                        }
                        push_reduced_word(&mut s, step.conjugator.letters());
                        vals.push(s);
                    }
                    Node::BandRun { top, conj_index } => {
                        let mut s = Vec::new();
                        push_reduced(&mut s, Letter::neg(*conj_index));
                        push_reduced_word(&mut s, top.letters());
                        push_reduced(&mut s, Letter::pos(*conj_index));
                        push_reduced_inverse(&mut s, top.shift(1).letters());
                        vals.push(s);
                    }
                    Node::SmoothRun { t, start } => {
                        let height: i64 = t.letters().iter().map(|l| l.sign() as i64).sum();
                        let end = (*start as i64 + height) as u32;
                        let mut s = Vec::new();
                        push_reduced_inverse(&mut s, t.letters());
                        push_reduced(&mut s, Letter::pos(*start));
                        push_reduced_word(&mut s, t.letters());
                        push_reduced(&mut s, Letter::neg(end));
                        vals.push(s);
                    }
                    Node::Concat(cs) => {
                        tasks.push(Task::Exit(n));
                        arity.push(cs.len());
                        for c in cs.iter().rev() {
                            tasks.push(Task::Enter(&c.node));
                        }
                    }
                    Node::Conj { inner, .. }
                    | Node::Mirror(inner)
                    | Node::Shift { inner, .. }
                    | Node::FiniteImage(inner) => {
                        tasks.push(Task::Exit(n));
                        tasks.push(Task::Enter(&inner.node));
                    }
                },
                Task::Exit(n) => match n {
                    Node::Concat(_) => {
                        let k = arity.pop().expect("arity stack");
                        let tail = vals.split_off(vals.len() - k);
                        let mut acc = tail.first().cloned().unwrap_or_default();
                        for v in &tail[1.min(tail.len())..] {
                            push_reduced_word(&mut acc, v);
                        }
                        vals.push(acc);
                    }
                    Node::Conj { by, .. } => {
                        let v = vals.pop().expect("value stack");
                        let mut s = Vec::new();
                        push_reduced_inverse(&mut s, by.letters());
                        push_reduced_word(&mut s, &v);
                        push_reduced_word(&mut s, by.letters());
                        vals.push(s);
                    }
                    Node::Mirror(_) => {
                        let v = vals.pop().expect("value stack");
                        vals.push(v.iter().rev().map(|l| l.inverse()).collect());
                    }
                    Node::Shift { k, .. } => {
                        let v = vals.pop().expect("value stack");
                        vals.push(v.into_iter().map(|l| l.shifted(*k)).collect());
                    }
                    Node::FiniteImage(_) => {
                        let v = vals.pop().expect("value stack");
                        let mut s = Vec::new();
                        push_phi_reduced(&mut s, &v);
                        vals.push(s);
                    }
                    _ => unreachable!(),
                },
            }
        }
        debug_assert_eq!(vals.len(), 1);
        Word::from_letters(vals.pop().unwrap())
    }

    /// VALIDITY: the factor product freely equals the recorded boundary.
    pub fn verify(&self) -> bool {
        self.residual() == self.boundary.freely_reduced()
    }

    /// Like [`Certificate::verify`], reporting the residual
    /// `product * boundary^{-1}` on failure.
    pub fn verify_report(&self) -> Result<(), Word> {
        let mut s: Vec<Letter> = self.residual().letters().to_vec();
        push_reduced_inverse(&mut s, self.boundary.letters());
        if s.is_empty() {
            Ok(())
        } else {
            Err(Word::from_letters(s))
        }
    }

    /// Walk the materialized steps in product order.
    pub fn for_each_step<F: FnMut(CertStep)>(&self, f: &mut F) {
        walk_steps(
            &self.root.node,
            &StepCtx {
                shift: 0,
                mirrored: false,
            },
            &mut Vec::new(),
            &mut |s| f(s),
        );
    }

    pub fn collect_steps(&self) -> Vec<CertStep> {
        let mut out = Vec::new();
        self.for_each_step(&mut |s| out.push(s));
        out
    }

    /// Verification on the fully materialized step list; used by tests and
    /// the JSON checker to cross-validate the structured representation.
    pub fn verify_materialized(&self) -> bool {
        let mut s: Vec<Letter> = Vec::new();
        self.for_each_step(&mut |step| {
            push_reduced_inverse(&mut s, step.conjugator.letters());
            let r = step.relator.word();
            if step.exponent == 1 {
                push_reduced_word(&mut s, r.letters());
            } else {
                push_reduced_inverse(&mut s, r.letters());
            }
            push_reduced_word(&mut s, step.conjugator.letters());
        });
        push_reduced_inverse(&mut s, self.boundary.letters());
        s.is_empty()
    }

    /// Convert a P5 certificate whose boundary involves only `x_0, x_1` into
    /// a certificate over the finite presentation with the same boundary and
    /// area at most 13 times larger.
    pub fn to_finite(&self) -> Result<Certificate, CertError> {
        if self.presentation != P5 {
            return Err(CertError::NotOverP5);
        }
        if let Some(l) = self.boundary.letters().iter().find(|l| l.index() > 1) {
            return Err(CertError::BoundarySubscript(l.index()));
        }
        let area = finite_area(&self.root.node, 0);
        debug_assert!(area <= 13 * self.root.area);
        Ok(Certificate {
            presentation: Presentation::Finite,
            boundary: self.boundary.clone(),
            root: NodeRef {
                area,
                node: Arc::new(Node::FiniteImage(self.root.clone())),
            },
        })
    }

    /// Build a flat certificate from explicit steps (the JSON reader).
    pub fn from_steps(
        presentation: Presentation,
        boundary: Word,
        steps: Vec<CertStep>,
    ) -> Result<Certificate, CertError> {
        let mut parts = Vec::with_capacity(steps.len());
        for s in steps {
            if !s.relator.valid_for(presentation) {
                return Err(CertError::BadRelator(s.relator));
            }
            parts.push(NodeRef {
                area: 1,
                node: Arc::new(Node::Step(s)),
            });
        }
        Ok(Certificate {
            presentation,
            boundary,
            root: concat_refs(parts),
        })
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Certificate({:?}, area {}, boundary {})",
            self.presentation,
            self.area(),
            self.boundary
        )
    }
}

fn concat_refs(parts: Vec<NodeRef>) -> NodeRef {
    let area = parts.iter().map(|p| p.area).sum();
    NodeRef {
        area,
        node: Arc::new(Node::Concat(parts)),
    }
}

/// Finite conversion cost of one P5 cell `(i, j)`: zero cells when `i = 0`
/// (the substituted boundary is freely trivial), one finite relator when the
/// difference is 1 or 2, and the 5/9/13-step derivations for differences
/// 3, 4, 5.
fn finite_cell_factor(i: u32, j: u32) -> u64 {
    if i == 0 {
        0
    } else {
        match j - i {
            1 | 2 => 1,
            3 => 5,
            4 => 9,
            5 => 13,
            d => panic!("difference {d} outside P5"),
        }
    }
}

fn finite_area(node: &Node, shift: u32) -> u64 {
    match node {
        Node::Empty => 0,
        Node::Step(step) => match step.relator {
            RelatorId::Pr { i, j } => finite_cell_factor(i + shift, j + shift),
            RelatorId::Finite(_) => panic!("finite step inside a P5 certificate"),
        },
        Node::Concat(cs) => cs.iter().map(|c| finite_area(&c.node, shift)).sum(),
        Node::Conj { inner, .. } | Node::Mirror(inner) => finite_area(&inner.node, shift),
        Node::Shift { inner, k } => finite_area(&inner.node, shift + k),
        Node::BandRun { top, conj_index } => top
            .letters()
            .iter()
            .map(|l| finite_cell_factor(conj_index + shift, l.index() + shift))
            .sum(),
        Node::SmoothRun { t, start } => smooth_cells(t, *start)
            .iter()
            .map(|&(rel, _, _)| match rel {
                RelatorId::Pr { i, j } => finite_cell_factor(i + shift, j + shift),
                _ => unreachable!(),
            })
            .sum(),
        Node::FiniteImage(_) => panic!("nested finite image"),
    }
}

struct StepCtx {
    shift: u32,
    mirrored: bool,
}

/// Materialize steps. `suffix` holds the conjugator words contributed by
/// enclosing `Conj` nodes; a step's final conjugator is its local conjugator
/// followed by the suffix words innermost-first.
fn walk_steps(
    node: &Node,
    ctx: &StepCtx,
    suffix: &mut Vec<Word>,
    f: &mut dyn FnMut(CertStep),
) {
    match node {
        Node::Empty => {}
        Node::Step(step) => {
            let rel = match step.relator {
                RelatorId::Pr { .. } => step.relator.shifted(ctx.shift),
                r @ RelatorId::Finite(_) => {
                    debug_assert_eq!(ctx.shift, 0);
                    r
                }
            };
            emit_step(
                step.conjugator.shift(ctx.shift),
                rel,
                step.exponent,
                ctx,
                suffix,
                f,
            );
        }
        Node::Concat(cs) => {
            if ctx.mirrored {
                for c in cs.iter().rev() {
                    walk_steps(&c.node, ctx, suffix, f);
                }
            } else {
                for c in cs {
                    walk_steps(&c.node, ctx, suffix, f);
                }
            }
        }
        Node::Conj { inner, by } => {
            suffix.push(by.shift(ctx.shift));
            walk_steps(&inner.node, ctx, suffix, f);
            suffix.pop();
        }
        Node::Mirror(inner) => {
            let ctx2 = StepCtx {
                shift: ctx.shift,
                mirrored: !ctx.mirrored,
            };
            walk_steps(&inner.node, &ctx2, suffix, f);
        }
        Node::Shift { inner, k } => {
            let ctx2 = StepCtx {
                shift: ctx.shift + k,
                mirrored: ctx.mirrored,
            };
            walk_steps(&inner.node, &ctx2, suffix, f);
        }
        Node::BandRun { top, conj_index } => {
            let i = conj_index + ctx.shift;
            let n = top.len();
            let order: Box<dyn Iterator<Item = usize>> = if ctx.mirrored {
                Box::new((0..n).rev())
            } else {
                Box::new(0..n)
            };
            for t in order {
                let l = top.letters()[t].shifted(ctx.shift);
                let h = l.index();
                let mut conj = Word::empty();
                if !l.is_positive() {
                    conj.push(Letter::pos(h + 1));
                }
                for &pl in top.letters()[..t].iter().rev() {
                    conj.push(pl.shifted(ctx.shift + 1).inverse());
                }
                emit_step(
                    conj,
                    RelatorId::Pr { i, j: h },
                    if l.is_positive() { 1 } else { -1 },
                    ctx,
                    suffix,
                    f,
                );
            }
        }
        Node::SmoothRun { t, start } => {
            let cells = smooth_cells(t, *start);
            let n = cells.len();
            let order: Box<dyn Iterator<Item = usize>> = if ctx.mirrored {
                Box::new((0..n).rev())
            } else {
                Box::new(0..n)
            };
            for r in order {
                let (rel, e, _) = cells[r];
                let letter = t.letters()[r];
                let mut conj = Word::empty();
                if !letter.is_positive() {
                    conj.push(letter.shifted(ctx.shift));
                }
                for &sl in &t.letters()[r + 1..] {
                    conj.push(sl.shifted(ctx.shift));
                }
                emit_step(conj, rel.shifted(ctx.shift), e, ctx, suffix, f);
            }
        }
        Node::FiniteImage(inner) => {
            // The finite image is only ever the root; expand each P5 step.
            let mut inner_suffix = Vec::new();
            walk_steps(&inner.node, ctx, &mut inner_suffix, &mut |step| {
                expand_finite_step(&step, f);
            });
        }
    }
}

fn emit_step(
    conj: Word,
    rel: RelatorId,
    exponent: i8,
    ctx: &StepCtx,
    suffix: &[Word],
    f: &mut dyn FnMut(CertStep),
) {
    let mut parts: Vec<&Word> = vec![&conj];
    parts.extend(suffix.iter().rev());
    f(CertStep {
        conjugator: Word::concat(&parts),
        relator: rel,
        exponent: if ctx.mirrored { -exponent } else { exponent },
    });
}

/// Chains expressing `x_k = x_3^{u_k}` with `u_4 = x_2`, `u_5 = x_2 x_3`,
/// `u_6 = x_2 x_2 x_3`; every cell has conjugating index >= 2 and
/// difference <= 2.
fn expansion_chain(k: u32) -> &'static [u32] {
    match k {
        4 => &[2],
        5 => &[2, 3],
        6 => &[2, 2, 3],
        _ => panic!("no expansion chain for x_{k}"),
    }
}

fn chain_certificate(k: u32) -> Certificate {
    let u: Vec<u32> = expansion_chain(k).to_vec();
    let mut parts = Vec::new();
    for (t, &a) in u.iter().enumerate() {
        let conj = Word::from_letters(u[t + 1..].iter().map(|&c| Letter::pos(c)).collect());
        parts.push(
            Certificate::single(
                P5,
                conj,
                RelatorId::Pr {
                    i: a,
                    j: t as u32 + 3,
                },
                1,
            )
            .unwrap(),
        );
    }
    let uw = Word::from_letters(u.iter().map(|&c| Letter::pos(c)).collect());
    let boundary = Word::concat(&[
        &uw.inverse(),
        &Word::one(Letter::pos(3)),
        &uw,
        &Word::one(Letter::neg(k)),
    ]);
    Certificate::concat_parts(parts, boundary)
}

/// The derivation of `x_k^{x_1} = x_{k+1}` from small cells, following the
/// expand / conjugate-by-`x_1` / contract recipe; 4(k-3)+1 cells
/// (5, 9, 13 for k = 4, 5, 6), every cell with index >= 1 and difference <= 2.
fn derivation_xk_x1(k: u32) -> Certificate {
    let e_k = chain_certificate(k);
    let uw = Word::from_letters(expansion_chain(k).iter().map(|&c| Letter::pos(c)).collect());
    let v = Word::concat(&[&uw.inverse(), &Word::one(Letter::pos(3)), &uw]);
    let x1 = Word::one(Letter::pos(1));
    let a = e_k.clone().mirror().conjugate(x1);
    let b = Certificate::band_conjugate(&v, 1).unwrap();
    let c = e_k.shift_cert(1).unwrap();
    let boundary = Word::from_letters(vec![
        Letter::neg(1),
        Letter::pos(k),
        Letter::pos(1),
        Letter::neg(k + 1),
    ]);
    let cert = Certificate::concat_parts(vec![a, b, c], boundary);
    debug_assert!(cert.verify());
    cert
}

/// Step lists of the three derivations, frozen at startup with their counts
/// asserted to be 5, 9, 13.
static FINITE_DERIVATIONS: Lazy<[Vec<CertStep>; 3]> = Lazy::new(|| {
    let make = |k: u32| -> Vec<CertStep> {
        let cert = derivation_xk_x1(k);
        assert!(cert.verify());
        let steps = cert.collect_steps();
        assert_eq!(steps.len() as u64, 4 * (k as u64 - 3) + 1);
        for s in &steps {
            match s.relator {
                RelatorId::Pr { i, j } => {
                    assert!(i >= 1 && j - i <= 2, "derivation cell outside the small range")
                }
                _ => unreachable!(),
            }
        }
        steps
    };
    [make(4), make(5), make(6)]
});

/// Map one small P5 step (index >= 1, difference <= 2) to its single finite
/// step: `phi(R_{i,j})` freely equals `x_0^{-(i-1)} rel_d^{-1} x_0^{i-1}`
/// with `d = j - i`.
fn finite_step_of_small(step: &CertStep) -> CertStep {
    let RelatorId::Pr { i, j } = step.relator else {
        unreachable!()
    };
    debug_assert!(i >= 1 && j - i <= 2);
    let mut conj = Word::power(0, (i - 1) as i64);
    for &l in phi(&step.conjugator).letters() {
        conj.push(l);
    }
    CertStep {
        conjugator: conj,
        relator: RelatorId::Finite((j - i) as u8),
        exponent: -step.exponent,
    }
}

fn expand_finite_step(step: &CertStep, f: &mut dyn FnMut(CertStep)) {
    let RelatorId::Pr { i, j } = step.relator else {
        panic!("finite step inside a P5 certificate")
    };
    if i == 0 {
        return;
    }
    let d = j - i;
    if d <= 2 {
        f(finite_step_of_small(step));
        return;
    }
    let derivation = &FINITE_DERIVATIONS[(d - 3) as usize];
    let emit_one = |small: &CertStep, exp: i8, f: &mut dyn FnMut(CertStep)| {
        let inner = CertStep {
            conjugator: Word::concat(&[&small.conjugator.shift(i - 1), &step.conjugator]),
            relator: small.relator.shifted(i - 1),
            exponent: exp,
        };
        f(finite_step_of_small(&inner));
    };
    if step.exponent == 1 {
        for small in derivation {
            emit_one(small, small.exponent, f);
        }
    } else {
        for small in derivation.iter().rev() {
            emit_one(small, -small.exponent, f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn rel01() -> Certificate {
        Certificate::single(P5, Word::empty(), RelatorId::Pr { i: 0, j: 1 }, 1).unwrap()
    }

    #[test]
    fn finite_relators_golden() {
        assert_eq!(
            *FINITE_RELATOR_1,
            w("x0^-1 x0^-1 x1 x0 x0 x1^-1 x0^-1 x1^-1 x0 x1")
        );
        assert_eq!(
            *FINITE_RELATOR_2,
            w("x0^-1 x0^-1 x0^-1 x1 x0 x0 x0 x1^-1 x0^-1 x0^-1 x1^-1 x0 x0 x1")
        );
        assert_eq!(FINITE_RELATOR_1.len(), 10);
        assert_eq!(FINITE_RELATOR_2.len(), 14);
    }

    #[test]
    fn verify_single_step_examples() {
        let c = rel01();
        assert_eq!(c.boundary(), &w("x0^-1 x1 x0 x2^-1"));
        assert!(c.verify());
        assert_eq!(c.area(), 1);

        let empty = Certificate::empty(P5, Word::empty());
        assert!(empty.verify());

        let bad = rel01().with_boundary(w("x0"));
        assert!(!bad.verify());
        assert!(bad.verify_report().is_err());
    }

    #[test]
    fn glue_examples() {
        let a = rel01();
        let b = rel01().mirror();
        let g = Certificate::glue(a, b).unwrap();
        assert_eq!(g.area(), 2);
        assert!(g.verify());
        assert!(g.boundary().is_empty());

        let c = Certificate::glue(rel01(), Certificate::empty(P5, Word::empty())).unwrap();
        assert!(c.verify());
        assert_eq!(c.area(), 1);
    }

    #[test]
    fn mirror_examples() {
        let m = rel01().mirror();
        assert_eq!(m.boundary(), &w("x2 x0^-1 x1^-1 x0"));
        assert_eq!(m.area(), 1);
        assert!(m.verify());
        let mm = rel01().mirror().mirror();
        assert!(mm.boundary().freely_equal(rel01().boundary()));
    }

    #[test]
    fn conjugate_examples() {
        let c = rel01().conjugate(w("x0"));
        assert_eq!(c.boundary(), &w("x0^-1 x0^-1 x1 x0 x2^-1 x0"));
        assert!(c.verify());
        assert_eq!(
            rel01().conjugate(Word::empty()).boundary(),
            rel01().boundary()
        );
    }

    #[test]
    fn shift_examples() {
        let c = rel01().shift_cert(3).unwrap();
        assert_eq!(c.boundary(), &w("x3^-1 x4 x3 x5^-1"));
        assert!(c.verify());
        assert_eq!(c.area(), 1);
        let fin = Certificate::glue(rel01(), rel01().mirror())
            .unwrap()
            .to_finite()
            .unwrap();
        assert!(matches!(fin.shift_cert(1), Err(CertError::ShiftFinite)));
    }

    #[test]
    fn band_examples() {
        let band = Certificate::band_conjugate(&w("x1 x2"), 0).unwrap();
        assert_eq!(band.boundary(), &w("x0^-1 x1 x2 x0 x3^-1 x2^-1"));
        assert_eq!(band.area(), 2);
        assert!(band.verify());
        assert!(band.verify_materialized());

        let empty = Certificate::band_conjugate(&Word::empty(), 3).unwrap();
        assert_eq!(empty.area(), 0);
        assert_eq!(empty.boundary(), &w("x3^-1 x3"));
        assert!(empty.verify());

        let one = Certificate::band_conjugate(&w("x5"), 0).unwrap();
        assert_eq!(one.area(), 1);
        assert!(one.verify());

        assert!(Certificate::band_conjugate(&w("x6"), 0).is_err());
        assert!(Certificate::band_conjugate(&w("x1"), 1).is_err());

        let band = Certificate::band_conjugate(&w("x2^-1 x3 x2"), 1).unwrap();
        assert!(band.verify());
        assert!(band.verify_materialized());
    }

    #[test]
    fn commutation_examples() {
        let c = Certificate::commutation_band(&w("x2"), 1).unwrap();
        assert_eq!(c.area(), 2);
        assert!(c.verify());
        assert!(c.verify_materialized());

        let c = Certificate::commutation_band(&Word::empty(), 4).unwrap();
        assert_eq!(c.area(), 0);
        assert!(c.verify());

        let c = Certificate::commutation_band(&w("x3 x5^-1 x2"), 3).unwrap();
        assert_eq!(c.area(), 2 * 3 * 3);
        assert!(c.verify());
        assert!(c.verify_materialized());

        assert!(Certificate::commutation_band(&w("x1"), 1).is_err());
        assert!(Certificate::commutation_band(&w("x6"), 1).is_err());
    }

    #[test]
    fn derivation_counts_are_5_9_13() {
        for (k, expect) in [(4u32, 5u64), (5, 9), (6, 13)] {
            let d = derivation_xk_x1(k);
            assert_eq!(d.area(), expect);
            assert!(d.verify());
            assert!(d.verify_materialized());
        }
    }

    #[test]
    fn phi_of_small_relators_matches_finite_relators() {
        let r12 = RelatorId::Pr { i: 1, j: 2 }.word();
        assert_eq!(phi(&r12), FINITE_RELATOR_1.inverse());
        let r13 = RelatorId::Pr { i: 1, j: 3 }.word();
        assert_eq!(phi(&r13), FINITE_RELATOR_2.inverse());
    }

    #[test]
    fn to_finite_i0_is_free() {
        let c = Certificate::glue(rel01(), rel01().mirror())
            .unwrap()
            .to_finite()
            .unwrap();
        assert_eq!(c.area(), 0);
        assert!(c.verify());
        assert!(c.verify_materialized());
        assert_eq!(c.collect_steps().len(), 0);
    }

    #[test]
    fn to_finite_expansion_counts() {
        for (d, expect) in [(1u32, 1u64), (2, 1), (3, 5), (4, 9), (5, 13)] {
            let c = Certificate::single(
                P5,
                w("x0 x1^-1"),
                RelatorId::Pr { i: 1, j: 1 + d },
                -1,
            )
            .unwrap();
            // pair with the mirror so the boundary stays over x0, x1
            let paired = Certificate::glue(c.clone(), c.mirror()).unwrap();
            let fin = paired.to_finite().unwrap();
            assert_eq!(fin.area(), 2 * expect);
            assert!(fin.verify());
            assert!(fin.verify_materialized());
        }
    }

    #[test]
    fn smooth_run_basic() {
        let c = Certificate::smooth_run(&w("x0"), 1).unwrap();
        assert_eq!(c.area(), 1);
        assert_eq!(c.boundary(), &w("x0^-1 x1 x0 x2^-1"));
        assert!(c.verify());
        assert!(c.verify_materialized());

        // L = x0 (x0 x1^-1)^2, rank 1, height 1.
        let l = w("x0 x0 x1^-1 x0 x1^-1");
        let c = Certificate::smooth_run(&l, 1).unwrap();
        assert_eq!(c.area(), 5);
        assert!(c.verify());
        assert!(c.verify_materialized());
        let exp = Word::concat(&[&l.inverse(), &w("x1"), &l, &w("x2^-1")]);
        assert!(c.boundary().freely_equal(&exp));
    }

    #[test]
    fn to_finite_rejects_large_boundary_subscripts() {
        assert!(matches!(
            rel01().to_finite(),
            Err(CertError::BoundarySubscript(2))
        ));
    }

    #[test]
    fn mirror_of_band_materializes_correctly() {
        let band = Certificate::band_conjugate(&w("x1 x3^-1 x2"), 0).unwrap();
        let m = band.mirror().conjugate(w("x4 x0^-1"));
        assert!(m.verify());
        assert!(m.verify_materialized());
        let s = m.clone().shift_cert(2).unwrap();
        assert!(s.verify());
        assert!(s.verify_materialized());
    }
}

//! The bilinear pairings: glue two diagrams along their marked boundary and
//! read off each resulting closed loop as a curve class on the doubled
//! surface.
//!
//! For the Möbius band the doubled surface is the Klein bottle.  Loops are
//! traced through both diagram copies, collecting a letter each time an arc
//! passes through a crosscap (`t1`/`t2` for the inner/outer copy) or crosses
//! the reference ray of its copy (`r1`/`r2`).  The letter word is evaluated
//! in the fundamental group `⟨a, b | b a b⁻¹ = a⁻¹⟩`, where `b` is the core
//! of the inner crosscap and `a` the product of the two crosscap cores:
//! `t1 ↦ b`, `t2 ↦ a⁻¹b⁻¹`, `r1 ↦ b²`, `r2 ↦ (a⁻¹b⁻¹)²`, each raised to a
//! fixed calibration sign times the traversal direction.  Words reduce to
//! the normal form `a^m b^k`, whose conjugacy-and-inversion class picks one
//! of the five loop variables.
//!
//! The annular pairings are the ray-only special case of the same engine.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::diagrams::{
    compose_rect, AnnularDiagram, BoundaryArc, DiscDiagram, MobiusArcs, MobiusDiagram,
};
use crate::polyring::{Monomial, Polynomial, Variable};

/// Where a letter was picked up.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LetterKind {
    InnerCrosscap,
    OuterCrosscap,
    InnerRay,
    OuterRay,
}

impl LetterKind {
    fn code(self) -> &'static str {
        match self {
            LetterKind::InnerCrosscap => "t1",
            LetterKind::OuterCrosscap => "t2",
            LetterKind::InnerRay => "r1",
            LetterKind::OuterRay => "r2",
        }
    }
}

/// One crosscap pass or ray crossing, with its traversal direction relative
/// to the arc's canonical (opener-to-closer, antipodal-forward) direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Letter {
    pub kind: LetterKind,
    pub sign: i8,
}

/// The letters met along one glued loop, in traversal order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LoopWord(pub Vec<Letter>);

impl LoopWord {
    /// Cyclic rotation, for invariance checks.
    pub fn rotated(&self, k: usize) -> LoopWord {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        LoopWord(v)
    }

    /// Reversal with all signs flipped: the same loop walked backwards.
    pub fn inverted(&self) -> LoopWord {
        LoopWord(
            self.0
                .iter()
                .rev()
                .map(|l| Letter { kind: l.kind, sign: -l.sign })
                .collect(),
        )
    }

    fn display(&self) -> String {
        self.0
            .iter()
            .map(|l| format!("{}{}", l.kind.code(), if l.sign > 0 { "+" } else { "-" }))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Per-copy orientation conventions for the four letter kinds.  The gluing
/// reverses the outer copy's frame, so the geometric signs are only pinned
/// up to these four choices; the calibration below fixes them.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SignConvention {
    pub inner_crosscap: i8,
    pub outer_crosscap: i8,
    pub inner_ray: i8,
    pub outer_ray: i8,
}

impl SignConvention {
    pub fn all() -> Vec<SignConvention> {
        let mut out = Vec::with_capacity(16);
        for &t1 in &[-1i8, 1] {
            for &t2 in &[-1i8, 1] {
                for &r1 in &[-1i8, 1] {
                    for &r2 in &[-1i8, 1] {
                        out.push(SignConvention {
                            inner_crosscap: t1,
                            outer_crosscap: t2,
                            inner_ray: r1,
                            outer_ray: r2,
                        });
                    }
                }
            }
        }
        out
    }

    fn sign_for(&self, kind: LetterKind) -> i8 {
        match kind {
            LetterKind::InnerCrosscap => self.inner_crosscap,
            LetterKind::OuterCrosscap => self.outer_crosscap,
            LetterKind::InnerRay => self.inner_ray,
            LetterKind::OuterRay => self.outer_ray,
        }
    }

    /// The convention with every sign flipped.  Flipping all four signs is
    /// an automorphism of the group (`a ↦ a⁻¹, b ↦ b⁻¹`), so both members
    /// of such a pair produce identical pairings.
    pub fn flipped(&self) -> SignConvention {
        SignConvention {
            inner_crosscap: -self.inner_crosscap,
            outer_crosscap: -self.outer_crosscap,
            inner_ray: -self.inner_ray,
            outer_ray: -self.outer_ray,
        }
    }
}

/// The convention singled out by calibration: it is the lexicographically
/// first of the two (related by a global flip) that reproduce the 3x3
/// pairing matrix at n = 1 and the printed 11x11 matrix at n = 2.  The
/// calibration test re-runs the search and pins this value.
pub const CALIBRATED: SignConvention = SignConvention {
    inner_crosscap: -1,
    outer_crosscap: 1,
    inner_ray: 1,
    outer_ray: -1,
};

/// Element `a^m b^k` of the Klein bottle group in normal form.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct KleinNormalForm {
    pub a_exp: i64,
    pub b_exp: i64,
}

impl KleinNormalForm {
    /// Right-multiplies by `a^e`, using `b^k a^e = a^((-1)^k e) b^k`.
    fn append_a(&mut self, e: i64) {
        if self.b_exp.rem_euclid(2) == 0 {
            self.a_exp += e;
        } else {
            self.a_exp -= e;
        }
    }

    /// Right-multiplies by `b^e`.
    fn append_b(&mut self, e: i64) {
        self.b_exp += e;
    }
}

/// Evaluates a loop word in the group under the given convention.
pub fn normal_form(word: &LoopWord, conv: SignConvention) -> KleinNormalForm {
    let mut nf = KleinNormalForm::default();
    for letter in &word.0 {
        let e = (letter.sign * conv.sign_for(letter.kind)) as i64;
        match letter.kind {
            LetterKind::InnerCrosscap => nf.append_b(e),
            LetterKind::InnerRay => nf.append_b(2 * e),
            LetterKind::OuterCrosscap => append_outer_core(&mut nf, e),
            LetterKind::OuterRay => {
                append_outer_core(&mut nf, e);
                append_outer_core(&mut nf, e);
            }
        }
    }
    nf
}

/// Appends `(a⁻¹ b⁻¹)^e` for `e = ±1`: the core of the outer crosscap.
fn append_outer_core(nf: &mut KleinNormalForm, e: i64) {
    debug_assert!(e == 1 || e == -1);
    if e == 1 {
        nf.append_a(-1);
        nf.append_b(-1);
    } else {
        nf.append_b(1);
        nf.append_a(1);
    }
}

/// The five unoriented free-homotopy classes a glued loop may land in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LoopClass {
    D,
    Z,
    X,
    Y,
    W,
}

impl LoopClass {
    pub fn variable(self) -> Variable {
        match self {
            LoopClass::D => Variable::D,
            LoopClass::Z => Variable::Z,
            LoopClass::X => Variable::X,
            LoopClass::Y => Variable::Y,
            LoopClass::W => Variable::W,
        }
    }
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum PairingError {
    #[error("diagrams have different strand counts: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("glued loop falls outside the five curve classes: normal form a^{a_exp} b^{b_exp}, letters [{word}]")]
    UnclassifiableLoop {
        a_exp: i64,
        b_exp: i64,
        word: String,
    },
}

/// Classifies a glued loop.  Anything outside the five recognized classes is
/// a hard error — it would mean the traced loop cannot be embedded, i.e. a
/// bug upstream, and must never be silently mapped to a variable.
pub fn classify_klein_loop(
    word: &LoopWord,
    conv: SignConvention,
) -> Result<LoopClass, PairingError> {
    let nf = normal_form(word, conv);
    let (m, k) = (nf.a_exp, nf.b_exp);
    let class = match (m, k) {
        (0, 0) => LoopClass::D,
        _ if k.abs() == 1 && m.rem_euclid(2) == 0 => LoopClass::X,
        _ if k.abs() == 1 => LoopClass::Y,
        _ if k.abs() == 2 && m.rem_euclid(2) == 0 => LoopClass::Z,
        _ if k == 0 && m.abs() == 1 => LoopClass::W,
        _ => {
            return Err(PairingError::UnclassifiableLoop {
                a_exp: m,
                b_exp: k,
                word: word.display(),
            })
        }
    };
    Ok(class)
}

/// One copy's contribution to the glued surface: an involution on the
/// boundary points plus the letter collected when an arc is traversed
/// starting from a given point.
struct Region {
    partner: Vec<usize>,
    letter: Vec<Option<Letter>>,
}

impl Region {
    fn from_boundary_arcs(arcs: &[BoundaryArc], two_n: usize, inner: bool) -> Region {
        let ray = if inner { LetterKind::InnerRay } else { LetterKind::OuterRay };
        let mut region = Region {
            partner: vec![usize::MAX; two_n],
            letter: vec![None; two_n],
        };
        for arc in arcs {
            region.partner[arc.opener] = arc.closer;
            region.partner[arc.closer] = arc.opener;
            if arc.wraps {
                region.letter[arc.opener] = Some(Letter { kind: ray, sign: 1 });
                region.letter[arc.closer] = Some(Letter { kind: ray, sign: -1 });
            }
        }
        region
    }

    fn from_mobius_arcs(arcs: &MobiusArcs, two_n: usize, inner: bool) -> Region {
        let crosscap = if inner { LetterKind::InnerCrosscap } else { LetterKind::OuterCrosscap };
        let mut region = Region::from_boundary_arcs(&arcs.trivial, two_n, inner);
        for &(u, v) in &arcs.crosscap {
            region.partner[u] = v;
            region.partner[v] = u;
            region.letter[u] = Some(Letter { kind: crosscap, sign: 1 });
            region.letter[v] = Some(Letter { kind: crosscap, sign: -1 });
        }
        region
    }
}

/// Walks the glued loops.  Each loop starts at its smallest unvisited point
/// and leaves through the inner copy first, so the produced words are
/// deterministic; classification is invariant under the rotation and
/// reversal this choice hides.
fn trace_loops(inner: &Region, outer: &Region) -> Vec<LoopWord> {
    let two_n = inner.partner.len();
    debug_assert_eq!(outer.partner.len(), two_n);
    let mut visited = vec![false; two_n];
    let mut words = Vec::new();
    for start in 0..two_n {
        if visited[start] {
            continue;
        }
        let mut word = Vec::new();
        let mut p = start;
        loop {
            visited[p] = true;
            if let Some(l) = inner.letter[p] {
                word.push(l);
            }
            let q = inner.partner[p];
            visited[q] = true;
            if let Some(l) = outer.letter[q] {
                word.push(l);
            }
            p = outer.partner[q];
            if p == start {
                break;
            }
        }
        words.push(LoopWord(word));
    }
    words
}

fn monomial_of_classes(classes: &[LoopClass]) -> Polynomial {
    let mut mono = Monomial::ONE;
    for c in classes {
        mono = mono.mul(&Monomial::var(c.variable()));
    }
    Polynomial::monomial(mono, BigInt::one())
}

/// Disc pairing: gluing two disc diagrams along the boundary circle yields
/// `d` per closed loop, i.e. `d^(orbit count)` of the two matchings.
pub fn pair_disc(a: &DiscDiagram, b: &DiscDiagram) -> Polynomial {
    assert_eq!(a.n(), b.n(), "strand counts differ");
    let two_n = 2 * a.n();
    let mut visited = vec![false; two_n];
    let mut orbits = 0u32;
    for start in 0..two_n {
        if visited[start] {
            continue;
        }
        orbits += 1;
        let mut p = start;
        loop {
            visited[p] = true;
            let q = a.partner(p);
            visited[q] = true;
            p = b.partner(q);
            if p == start {
                break;
            }
        }
    }
    Polynomial::var(Variable::D).pow(orbits)
}

/// Annular trace pairing of rectangle diagrams: stack `a` over the vertical
/// mirror of `b`, close top column `j` onto bottom column `j` around the
/// annulus, and weigh each loop `z` (wraps the core) or `d` (bounds).
pub fn pair_trace_annular(a: &DiscDiagram, b: &DiscDiagram) -> Polynomial {
    assert_eq!(a.n(), b.n(), "strand counts differ");
    let n = a.n();
    let two_n = 2 * n;
    let (composite, interior_loops) = compose_rect(a, &b.flip());

    // Closure strands all cross the reference cut once, top to bottom.
    let mut closure = Region {
        partner: vec![usize::MAX; two_n],
        letter: vec![None; two_n],
    };
    for j in 0..n {
        let (top, bottom) = (j, two_n - 1 - j);
        closure.partner[top] = bottom;
        closure.partner[bottom] = top;
        closure.letter[top] = Some(Letter { kind: LetterKind::OuterRay, sign: 1 });
        closure.letter[bottom] = Some(Letter { kind: LetterKind::OuterRay, sign: -1 });
    }
    let diagram = Region {
        partner: composite.matching().to_vec(),
        letter: vec![None; two_n],
    };

    let classes: Vec<LoopClass> = trace_loops(&diagram, &closure)
        .iter()
        .map(|w| {
            classify_klein_loop(w, CALIBRATED)
                .expect("closed annular loop winds more than once")
        })
        .collect();
    &monomial_of_classes(&classes) * &Polynomial::var(Variable::D).pow(interior_loops as u32)
}

/// Annular gluing pairing: glue two annular diagrams along the boundary and
/// classify each loop by its winding around the annulus.
pub fn pair_annulus(a: &AnnularDiagram, b: &AnnularDiagram) -> Polynomial {
    assert_eq!(a.n(), b.n(), "strand counts differ");
    let two_n = 2 * a.n();
    let inner = Region::from_boundary_arcs(&a.arcs(), two_n, true);
    let outer = Region::from_boundary_arcs(&b.arcs(), two_n, false);
    let classes: Vec<LoopClass> = trace_loops(&inner, &outer)
        .iter()
        .map(|w| {
            classify_klein_loop(w, CALIBRATED)
                .expect("glued annular loop winds more than once")
        })
        .collect();
    monomial_of_classes(&classes)
}

/// Möbius pairing under an explicit sign convention.
pub fn pair_mobius_with(
    a: &MobiusDiagram,
    b: &MobiusDiagram,
    conv: SignConvention,
) -> Result<Polynomial, PairingError> {
    if a.n() != b.n() {
        return Err(PairingError::SizeMismatch(a.n(), b.n()));
    }
    let two_n = 2 * a.n();
    let inner = Region::from_mobius_arcs(&a.arcs(), two_n, true);
    let outer = Region::from_mobius_arcs(&b.arcs(), two_n, false);
    let mut classes = Vec::new();
    for word in trace_loops(&inner, &outer) {
        classes.push(classify_klein_loop(&word, conv)?);
    }
    Ok(monomial_of_classes(&classes))
}

/// Möbius pairing: glue two Möbius diagrams into the Klein bottle and read
/// each loop's curve class off its fundamental-group normal form.
pub fn pair_mobius(a: &MobiusDiagram, b: &MobiusDiagram) -> Result<Polynomial, PairingError> {
    pair_mobius_with(a, b, CALIBRATED)
}

/// Number of loops formed by the gluing; the total degree of every pairing
/// monomial equals this.
pub fn mobius_loop_count(a: &MobiusDiagram, b: &MobiusDiagram) -> usize {
    let two_n = 2 * a.n();
    let inner = Region::from_mobius_arcs(&a.arcs(), two_n, true);
    let outer = Region::from_mobius_arcs(&b.arcs(), two_n, false);
    trace_loops(&inner, &outer).len()
}

/// Closes a rectangle diagram around the annulus (top column `j` to bottom
/// column `j`) and returns the number of resulting loops.
pub fn close_markov(d: &DiscDiagram) -> usize {
    let n = d.n();
    let two_n = 2 * n;
    let mut visited = vec![false; two_n];
    let mut loops = 0;
    for start in 0..two_n {
        if visited[start] {
            continue;
        }
        loops += 1;
        let mut p = start;
        loop {
            visited[p] = true;
            let q = d.partner(p);
            visited[q] = true;
            p = two_n - 1 - q; // closure: column j top <-> column j bottom
            if p == start {
                break;
            }
        }
    }
    loops
}

/// Closes a rectangle diagram around the annulus and splits the loops into
/// (bounding, core-parallel) counts by winding number.
pub fn close_annular(d: &DiscDiagram) -> (usize, usize) {
    let n = d.n();
    let two_n = 2 * n;
    let mut closure = Region {
        partner: vec![usize::MAX; two_n],
        letter: vec![None; two_n],
    };
    for j in 0..n {
        let (top, bottom) = (j, two_n - 1 - j);
        closure.partner[top] = bottom;
        closure.partner[bottom] = top;
        closure.letter[top] = Some(Letter { kind: LetterKind::OuterRay, sign: 1 });
        closure.letter[bottom] = Some(Letter { kind: LetterKind::OuterRay, sign: -1 });
    }
    let diagram = Region {
        partner: d.matching().to_vec(),
        letter: vec![None; two_n],
    };
    let mut bounding = 0;
    let mut core = 0;
    for word in trace_loops(&diagram, &closure) {
        match classify_klein_loop(&word, CALIBRATED)
            .expect("closed annular loop winds more than once")
        {
            LoopClass::D => bounding += 1,
            LoopClass::Z => core += 1,
            _ => unreachable!("ray-only words only reach d or z"),
        }
    }
    (bounding, core)
}

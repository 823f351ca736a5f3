//! The Temperley–Lieb algebra over rational functions in `d`: rectangle
//! morphisms under stacking, Jones–Wenzl idempotents by the Wenzl recursion,
//! Markov and annular closures, theta nets, and the orthogonal ladder basis.
//!
//! Morphisms may have different numbers of bottom and top points, which is
//! what lets trivalent vertices (idempotent-dressed merges) and their
//! mirrors compose into ladders and theta nets.  Everything here is exact:
//! coefficients are quotients of integer polynomials and all identities are
//! checked by cross-multiplication upstream.

use std::collections::BTreeMap;
use std::fmt;

use crate::polyring::{chebyshev_s, delta, delta_factorial, Polynomial, RationalFunction, Variable};
use crate::report::{Status, VerificationReport};

/// A crossingless matching between `src` bottom points and `dst` top points
/// of a rectangle.  Points are indexed `0..src` along the bottom and
/// `src..src+dst` along the top, both left to right.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TLMor {
    src: usize,
    dst: usize,
    partner: Vec<usize>,
}

impl TLMor {
    pub fn new(src: usize, dst: usize, partner: Vec<usize>) -> TLMor {
        assert_eq!(partner.len(), src + dst, "matching must cover all points");
        assert_eq!((src + dst) % 2, 0, "odd point count cannot be matched");
        for (p, &q) in partner.iter().enumerate() {
            assert!(q < src + dst && q != p && partner[q] == p, "not an involution");
        }
        // Planarity: walking the rectangle boundary (bottom left-to-right,
        // then top right-to-left) must nest properly.
        let boundary = (0..src).chain((src..src + dst).rev());
        let mut stack = Vec::new();
        let mut seen = vec![false; src + dst];
        for p in boundary {
            if seen[partner[p]] {
                assert_eq!(stack.pop(), Some(partner[p]), "matching has a crossing");
            } else {
                seen[p] = true;
                stack.push(p);
            }
        }
        TLMor { src, dst, partner }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn identity(n: usize) -> TLMor {
        let mut partner = vec![0; 2 * n];
        for i in 0..n {
            partner[i] = n + i;
            partner[n + i] = i;
        }
        TLMor { src: n, dst: n, partner }
    }

    /// The hook generator `e_i` (1-based): bottom and top caps on columns
    /// `i-1, i`, all other strands vertical.
    pub fn generator(n: usize, i: usize) -> TLMor {
        assert!((1..n).contains(&i), "generator index out of range");
        let mut partner = TLMor::identity(n).partner;
        let (a, b) = (i - 1, i);
        partner[a] = b;
        partner[b] = a;
        partner[n + a] = n + b;
        partner[n + b] = n + a;
        TLMor { src: n, dst: n, partner }
    }

    /// The raw merge `(y+z) + (z+x) -> y+x`: the left group's first `y`
    /// points and the right group's last `x` points ascend, and the `z`
    /// facing points of each group join in a nested elbow.
    pub fn merge(y: usize, z: usize, x: usize) -> TLMor {
        let (a, b, c) = (y + z, z + x, y + x);
        let mut partner = vec![usize::MAX; a + b + c];
        let join = |partner: &mut Vec<usize>, p: usize, q: usize| {
            partner[p] = q;
            partner[q] = p;
        };
        for j in 0..y {
            join(&mut partner, j, a + b + j);
        }
        for t in 0..z {
            join(&mut partner, y + t, a + (z - 1 - t));
        }
        for k in 0..x {
            join(&mut partner, a + z + k, a + b + y + k);
        }
        TLMor::new(a + b, c, partner)
    }

    /// Vertical mirror: top and bottom rows exchanged, columns kept.
    pub fn mirror(&self) -> TLMor {
        let map = |p: usize| {
            if p < self.src {
                self.dst + p
            } else {
                p - self.src
            }
        };
        let mut partner = vec![0; self.src + self.dst];
        for (p, &q) in self.partner.iter().enumerate() {
            partner[map(p)] = map(q);
        }
        TLMor { src: self.dst, dst: self.src, partner }
    }

    /// Side-by-side placement, `self` on the left.
    pub fn tensor(&self, right: &TLMor) -> TLMor {
        let (a, b) = (self.src, self.dst);
        let (c, d) = (right.src, right.dst);
        let map_left = |p: usize| if p < a { p } else { (p - a) + a + c };
        let map_right = |p: usize| if p < c { a + p } else { (p - c) + a + c + b };
        let mut partner = vec![0; a + b + c + d];
        for (p, &q) in self.partner.iter().enumerate() {
            partner[map_left(p)] = map_left(q);
        }
        for (p, &q) in right.partner.iter().enumerate() {
            partner[map_right(p)] = map_right(q);
        }
        TLMor { src: a + c, dst: b + d, partner }
    }

    /// Stacks `upper` onto `self` (`self`'s top glued to `upper`'s bottom)
    /// and counts the closed loops swallowed by the gluing.
    pub fn stack(&self, upper: &TLMor) -> (TLMor, usize) {
        assert_eq!(self.dst, upper.src, "interface sizes differ");
        let (a, b, c) = (self.src, self.dst, upper.dst);

        // Walks across the interface; lower points are `self`'s, upper
        // points are `upper`'s own indices.  Marks every interface port
        // crossed so untouched ports can be grouped into closed loops.
        let walk = |mut in_lower: bool, start: usize, mark: &mut [bool]| -> usize {
            let mut p = start;
            loop {
                if in_lower {
                    let q = self.partner[p];
                    if q < a {
                        return q;
                    }
                    let port = q - a;
                    mark[port] = true;
                    in_lower = false;
                    p = port;
                } else {
                    let q = upper.partner[p];
                    if q >= b {
                        return a + (q - b);
                    }
                    mark[q] = true;
                    in_lower = true;
                    p = a + q;
                }
            }
        };

        let mut crossed = vec![false; b];
        let mut partner = vec![usize::MAX; a + c];
        for start in 0..a + c {
            if partner[start] != usize::MAX {
                continue;
            }
            let end = if start < a {
                walk(true, start, &mut crossed)
            } else {
                walk(false, b + (start - a), &mut crossed)
            };
            partner[start] = end;
            partner[end] = start;
        }

        let mut loops = 0;
        for port in 0..b {
            if crossed[port] {
                continue;
            }
            loops += 1;
            crossed[port] = true;
            let (mut in_lower, mut p) = (false, port);
            loop {
                let q = if in_lower { self.partner[p] } else { upper.partner[p] };
                let next = if in_lower { q - a } else { q };
                if next == port {
                    break;
                }
                crossed[next] = true;
                if in_lower {
                    in_lower = false;
                    p = next;
                } else {
                    in_lower = true;
                    p = a + next;
                }
            }
        }

        (TLMor { src: a, dst: c, partner }, loops)
    }

    /// Number of loops after closing top column `j` onto bottom column `j`
    /// around the disc.
    pub fn markov_loops(&self) -> usize {
        assert_eq!(self.src, self.dst, "closure needs a square morphism");
        let n = self.src;
        let mut visited = vec![false; 2 * n];
        let mut loops = 0;
        for start in 0..2 * n {
            if visited[start] {
                continue;
            }
            loops += 1;
            let mut p = start;
            loop {
                visited[p] = true;
                let q = self.partner[p];
                visited[q] = true;
                p = if q < n { q + n } else { q - n };
                if p == start {
                    break;
                }
            }
        }
        loops
    }

    /// Loop counts `(trivial, essential)` after closing around the annulus:
    /// a loop is essential exactly when its net winding through the closure
    /// strands is nonzero.
    pub fn annular_loops(&self) -> (usize, usize) {
        assert_eq!(self.src, self.dst, "closure needs a square morphism");
        let n = self.src;
        let mut visited = vec![false; 2 * n];
        let (mut trivial, mut essential) = (0, 0);
        for start in 0..2 * n {
            if visited[start] {
                continue;
            }
            let mut winding = 0i64;
            let mut p = start;
            loop {
                visited[p] = true;
                let q = self.partner[p];
                visited[q] = true;
                if q < n {
                    winding -= 1;
                    p = q + n;
                } else {
                    winding += 1;
                    p = q - n;
                }
                if p == start {
                    break;
                }
            }
            debug_assert!(winding.abs() <= 1, "embedded closure winds at most once");
            if winding == 0 {
                trivial += 1;
            } else {
                essential += 1;
            }
        }
        (trivial, essential)
    }
}

impl fmt::Display for TLMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |p: usize| {
            if p < self.src {
                format!("b{p}")
            } else {
                format!("t{}", p - self.src)
            }
        };
        let mut first = true;
        for (p, &q) in self.partner.iter().enumerate() {
            if q > p {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{}-{}", name(p), name(q))?;
            }
        }
        Ok(())
    }
}

/// Formal linear combination of morphisms with a common shape, over
/// rational functions in `d`.
#[derive(Clone, PartialEq, Debug)]
pub struct TLElement {
    src: usize,
    dst: usize,
    terms: BTreeMap<TLMor, RationalFunction>,
}

impl TLElement {
    pub fn zero(src: usize, dst: usize) -> TLElement {
        TLElement { src, dst, terms: BTreeMap::new() }
    }

    pub fn from_mor(m: TLMor) -> TLElement {
        let (src, dst) = (m.src, m.dst);
        let mut terms = BTreeMap::new();
        terms.insert(m, RationalFunction::one());
        TLElement { src, dst, terms }
    }

    pub fn identity(n: usize) -> TLElement {
        TLElement::from_mor(TLMor::identity(n))
    }

    pub fn generator(n: usize, i: usize) -> TLElement {
        TLElement::from_mor(TLMor::generator(n, i))
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TLMor, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &TLMor) -> RationalFunction {
        self.terms.get(m).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: TLMor, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &TLElement) -> TLElement {
        assert_eq!((self.src, self.dst), (other.src, other.dst), "shape mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TLElement) -> TLElement {
        self.add(&other.scale(&RationalFunction::from_int(-1)))
    }

    pub fn scale(&self, c: &RationalFunction) -> TLElement {
        if c.is_zero() {
            return TLElement::zero(self.src, self.dst);
        }
        TLElement {
            src: self.src,
            dst: self.dst,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Stacks `upper` onto `self`, turning each swallowed loop into a
    /// factor `d`.
    pub fn then(&self, upper: &TLElement) -> TLElement {
        assert_eq!(self.dst, upper.src, "interface sizes differ");
        let d = RationalFunction::from_poly(Polynomial::var(Variable::D));
        let mut out = TLElement::zero(self.src, upper.dst);
        for (ml, cl) in &self.terms {
            for (mu, cu) in &upper.terms {
                let (m, loops) = ml.stack(mu);
                let mut c = cl * cu;
                for _ in 0..loops {
                    c = &c * &d;
                }
                out.insert(m, c);
            }
        }
        out
    }

    pub fn tensor(&self, right: &TLElement) -> TLElement {
        let mut out = TLElement::zero(self.src + right.src, self.dst + right.dst);
        for (ml, cl) in &self.terms {
            for (mr, cr) in &right.terms {
                out.insert(ml.tensor(mr), cl * cr);
            }
        }
        out
    }

    pub fn mirror(&self) -> TLElement {
        TLElement {
            src: self.dst,
            dst: self.src,
            terms: self.terms.iter().map(|(m, c)| (m.mirror(), c.clone())).collect(),
        }
    }
}

/// The algebra product `u · v`: `u` stacked on top of `v`.
pub fn tl_mul(u: &TLElement, v: &TLElement) -> TLElement {
    v.then(u)
}

/// The Jones–Wenzl idempotent `f_n`, built solely by the Wenzl recursion
/// `f_(k+1) = ι(f_k) - (Δ_(k-1)/Δ_k) ι(f_k) e_k ι(f_k)`.
pub fn jones_wenzl(n: usize) -> TLElement {
    let mut f = TLElement::identity(n.min(1));
    for k in 1..n {
        let widened = f.tensor(&TLElement::identity(1));
        let ek = TLElement::generator(k + 1, k);
        let ratio = RationalFunction::new(delta(k - 1), delta(k));
        let correction = widened.then(&ek).then(&widened).scale(&ratio);
        f = widened.sub(&correction);
    }
    f
}

/// Markov trace: close every diagram in the disc, each loop a factor `d`.
pub fn markov_trace(u: &TLElement) -> RationalFunction {
    let d = Polynomial::var(Variable::D);
    let mut acc = RationalFunction::zero();
    for (m, c) in u.terms() {
        let weight = RationalFunction::from_poly(d.pow(m.markov_loops() as u32));
        acc = &acc + &(c * &weight);
    }
    acc
}

/// Annular trace: close every diagram around the annulus; essential loops
/// contribute `z`, trivial loops `d`.
pub fn annular_trace(u: &TLElement) -> RationalFunction {
    let d = Polynomial::var(Variable::D);
    let z = Polynomial::var(Variable::Z);
    let mut acc = RationalFunction::zero();
    for (m, c) in u.terms() {
        let (trivial, essential) = m.annular_loops();
        let weight = &d.pow(trivial as u32) * &z.pow(essential as u32);
        acc = &acc + &(c * &RationalFunction::from_poly(weight));
    }
    acc
}

/// The bilinear form behind the annular-trace Gram matrix: stack `u` on the
/// vertical mirror of `v` and close around the annulus.
pub fn gen_pairing(u: &TLElement, v: &TLElement) -> RationalFunction {
    annular_trace(&v.mirror().then(u))
}

/// Strand counts of the trivalent vertex with legs `(a, b, c)`: between
/// legs b,c / a,c / a,b respectively.  `None` when the triple is not
/// admissible.
pub fn admissible_strands(a: usize, b: usize, c: usize) -> Option<(usize, usize, usize)> {
    if (a + b + c) % 2 != 0 || b + c < a || a + c < b || a + b < c {
        return None;
    }
    Some(((b + c - a) / 2, (a + c - b) / 2, (a + b - c) / 2))
}

/// The idempotent-dressed trivalent vertex `a ⊗ b -> c`: Jones–Wenzl boxes
/// on all three legs around the raw merge.
pub fn vertex(a: usize, b: usize, c: usize) -> TLElement {
    let (x, y, z) = admissible_strands(a, b, c).expect("admissible triple");
    let legs = jones_wenzl(a).tensor(&jones_wenzl(b));
    let merged = legs.then(&TLElement::from_mor(TLMor::merge(y, z, x)));
    merged.then(&jones_wenzl(c))
}

/// The theta net evaluated by the delta-factorial quotient.
pub fn theta_formula(x: usize, y: usize, z: usize) -> RationalFunction {
    let (x, y, z) = (x as i64, y as i64, z as i64);
    let num = [
        delta_factorial(x + y + z),
        delta_factorial(x - 1),
        delta_factorial(y - 1),
        delta_factorial(z - 1),
    ];
    let den = [
        delta_factorial(x + y - 1),
        delta_factorial(x + z - 1),
        delta_factorial(y + z - 1),
    ];
    let prod = |ps: &[Polynomial]| ps.iter().fold(Polynomial::one(), |acc, p| &acc * p);
    RationalFunction::new(prod(&num), prod(&den))
}

/// The theta net evaluated diagrammatically: two mirrored vertices traced in
/// the disc.  Independent oracle for `theta_formula`.
pub fn theta_direct(x: usize, y: usize, z: usize) -> RationalFunction {
    assert!(x + y + z <= 5, "theta expansion bound");
    let (a, b, c) = (y + z, z + x, x + y);
    let v = vertex(a, b, c);
    markov_trace(&v.mirror().then(&v))
}

/// The annular theta net: the planar value dressed by `S_(x+y)` in the
/// essential-curve variable over `Δ_(x+y)`.
pub fn annular_theta(x: usize, y: usize, z: usize) -> RationalFunction {
    let ratio = RationalFunction::new(chebyshev_s(x + y, Variable::Z), delta(x + y));
    &ratio * &theta_formula(x, y, z)
}

/// Spine labels `a_1..a_(2n-1)` of a ladder basis element: a ±1 walk from
/// 1 to 1 through nonnegative integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DSequence(Vec<usize>);

impl DSequence {
    pub fn new(values: Vec<usize>) -> Result<DSequence, String> {
        if values.len() % 2 != 1 {
            return Err("sequence length must be odd (2n - 1)".into());
        }
        if *values.first().unwrap() != 1 || *values.last().unwrap() != 1 {
            return Err("sequence must start and end at 1".into());
        }
        for w in values.windows(2) {
            if w[0].abs_diff(w[1]) != 1 {
                return Err(format!("steps must be ±1, got {} -> {}", w[0], w[1]));
            }
        }
        Ok(DSequence(values))
    }

    pub fn n(&self) -> usize {
        (self.0.len() + 1) / 2
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// The Dyck word of the padded walk `0, a_1, …, a_(2n-1), 0`, encoded
    /// as the set of up-step positions.
    pub fn dyck_mask(&self) -> u64 {
        let mut mask = 1u64; // the implicit opening 0 -> 1 step
        for (i, w) in self.0.windows(2).enumerate() {
            if w[1] > w[0] {
                mask |= 1 << (i + 1);
            }
        }
        mask
    }
}

impl fmt::Display for DSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All valid spine-label sequences for `n` strands, in lexicographic order;
/// there are Catalan-many.
pub fn enum_dsequences(n: usize) -> Vec<DSequence> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut cur = vec![1usize];
    fn rec(cur: &mut Vec<usize>, len: usize, out: &mut Vec<DSequence>) {
        if cur.len() == len {
            if *cur.last().unwrap() == 1 {
                out.push(DSequence(cur.clone()));
            }
            return;
        }
        let last = *cur.last().unwrap();
        if last > 0 {
            cur.push(last - 1);
            rec(cur, len, out);
            cur.pop();
        }
        cur.push(last + 1);
        rec(cur, len, out);
        cur.pop();
    }
    rec(&mut cur, 2 * n - 1, &mut out);
    out
}

/// The ladder basis element for a spine-label sequence: top strands merge
/// into the spine left to right (spine left, new strand right), and bottom
/// strands exit left to right (strand left, spine right).
pub fn d_basis_element(seq: &DSequence) -> TLElement {
    let n = seq.n();
    let a = |i: usize| seq.0[i - 1]; // 1-based spine labels
    // Upper half, built bottom-up and mirrored: strand i enters at spine
    // value a_i.
    let mut upper = TLElement::identity(1);
    for i in 2..=n {
        upper = upper
            .tensor(&TLElement::identity(1))
            .then(&vertex(a(i - 1), 1, a(i)));
    }
    // Lower half: the boundary walk continues across the bottom row right
    // to left, so reading the bottom columns left to right runs the spine
    // labels a_(2n-1) back down to the waist value a_n, with each new
    // column entering on the right.
    let mut lower = TLElement::identity(1);
    for j in 2..=n {
        lower = lower
            .tensor(&TLElement::identity(1))
            .then(&vertex(a(2 * n - j + 1), 1, a(2 * n - j)));
    }
    lower.then(&upper.mirror())
}

/// Compares two disc diagrams (as opener masks) in Dyck-word order: at the
/// first differing boundary position, the diagram with the opener comes
/// first.
pub fn dyck_lex(mask_a: u64, mask_b: u64, two_n: usize) -> std::cmp::Ordering {
    for p in 0..two_n {
        let (a, b) = (mask_a >> p & 1, mask_b >> p & 1);
        if a != b {
            return b.cmp(&a); // opener (1) first
        }
    }
    std::cmp::Ordering::Equal
}

/// Opener mask of a square morphism read along the disc boundary (top row
/// left to right, then bottom row right to left), matching the disc
/// diagram encoding.
pub fn boundary_mask(m: &TLMor) -> u64 {
    assert_eq!(m.src, m.dst);
    let n = m.src;
    // Circle position of a morphism point: top column j sits at position j,
    // bottom column j at position 2n-1-j.
    let circle = |p: usize| if p < n { 2 * n - 1 - p } else { p - n };
    let mut partner_c = vec![0usize; 2 * n];
    for (p, &q) in m.partner.iter().enumerate() {
        partner_c[circle(p)] = circle(q);
    }
    let mut mask = 0u64;
    for (p, &q) in partner_c.iter().enumerate() {
        if q > p {
            mask |= 1 << p;
        }
    }
    mask
}

fn note_line(out: &mut String, line: impl AsRef<str>) {
    out.push_str(line.as_ref());
    out.push_str("; ");
}

/// Idempotence, annihilation by every generator, and unit identity
/// coefficient of `f_n` for `n <= n_max`.
pub fn check_idempotent(n_max: usize) -> VerificationReport {
    let mut ok = true;
    let mut note = String::new();
    for n in 1..=n_max {
        let f = jones_wenzl(n);
        if f.then(&f) != f {
            ok = false;
            note_line(&mut note, format!("f_{n} is not idempotent"));
        }
        let id_coeff = f.coeff(&TLMor::identity(n));
        if id_coeff != RationalFunction::one() {
            ok = false;
            note_line(&mut note, format!("f_{n} identity coefficient is {id_coeff}"));
        }
        for i in 1..n {
            let e = TLElement::generator(n, i);
            if !tl_mul(&e, &f).is_zero() || !tl_mul(&f, &e).is_zero() {
                ok = false;
                note_line(&mut note, format!("e_{i} does not annihilate f_{n}"));
            }
        }
    }
    let status = if ok { Status::Verified } else { Status::Failed };
    VerificationReport::new("wenzl-idempotent", n_max, status).with_note(if ok {
        format!("f_n idempotent, killed by every e_i, unit identity coefficient, n <= {n_max}")
    } else {
        note
    })
}

/// Markov and annular traces of `f_n` against the Chebyshev families, and
/// the specialization law `z := d` on sample elements.
pub fn check_traces(n_max: usize) -> VerificationReport {
    let d_poly = Polynomial::var(Variable::D);
    let mut ok = true;
    let mut note = String::new();
    for n in 1..=n_max {
        let f = jones_wenzl(n);
        if markov_trace(&f) != RationalFunction::from_poly(delta(n)) {
            ok = false;
            note_line(&mut note, format!("markov trace of f_{n} is not Δ_{n}"));
        }
        if annular_trace(&f) != RationalFunction::from_poly(chebyshev_s(n, Variable::Z)) {
            ok = false;
            note_line(&mut note, format!("annular trace of f_{n} is not S_{n}(z)"));
        }
    }
    // The annular trace specializes to the Markov trace at z := d.
    let samples: Vec<TLElement> = vec![
        jones_wenzl(3.min(n_max)),
        tl_mul(&TLElement::generator(3, 1), &TLElement::generator(3, 2)),
        TLElement::generator(4, 2).add(&TLElement::identity(4).scale(&RationalFunction::from_int(3))),
    ];
    for (i, u) in samples.iter().enumerate() {
        let specialized = RationalFunction::new(
            annular_trace(u).numerator().substitute(Variable::Z, &d_poly),
            annular_trace(u).denominator().substitute(Variable::Z, &d_poly),
        );
        if specialized != markov_trace(u) {
            ok = false;
            note_line(&mut note, format!("z := d specialization fails on sample {i}"));
        }
    }
    let status = if ok { Status::Verified } else { Status::Failed };
    VerificationReport::new("wenzl-traces", n_max, status).with_note(if ok {
        format!("traces of f_n match Δ_n and S_n(z) for n <= {n_max}; z := d specialization holds")
    } else {
        note
    })
}

/// Diagrammatic theta evaluation against the delta-factorial quotient for
/// all strand triples with `x + y + z <= max_sum`.
pub fn check_theta(max_sum: usize) -> VerificationReport {
    let mut ok = true;
    let mut note = String::new();
    for x in 0..=max_sum {
        for y in 0..=max_sum - x {
            for z in 0..=max_sum - x - y {
                if theta_direct(x, y, z) != theta_formula(x, y, z) {
                    ok = false;
                    note_line(&mut note, format!("theta mismatch at ({x}, {y}, {z})"));
                }
            }
        }
    }
    // Annular dressing: the degenerate net is the annular trace of f_n.
    for n in 1..=max_sum {
        if annular_theta(0, n, 0) != RationalFunction::from_poly(chebyshev_s(n, Variable::Z)) {
            ok = false;
            note_line(&mut note, format!("annular theta (0, {n}, 0) is not S_{n}(z)"));
        }
    }
    let status = if ok { Status::Verified } else { Status::Failed };
    VerificationReport::new("wenzl-theta", max_sum, status).with_note(if ok {
        format!("theta_direct = theta_formula for x + y + z <= {max_sum}")
    } else {
        note
    })
}

fn det_rational(m: &[Vec<RationalFunction>]) -> RationalFunction {
    let size = m.len();
    if size == 0 {
        return RationalFunction::one();
    }
    if size == 1 {
        return m[0][0].clone();
    }
    let mut det = RationalFunction::zero();
    for j in 0..size {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RationalFunction>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &det_rational(&minor);
        det = if j % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

/// Orthogonality of the ladder basis under the annular-trace form, the
/// diagonal product against the corresponding Gram determinant, and the
/// change-of-basis shape in Dyck-word order.
pub fn dbasis_checks(n: usize) -> VerificationReport {
    assert!((1..=3).contains(&n), "ladder expansion bound");
    let seqs = enum_dsequences(n);
    let elements: Vec<TLElement> = seqs.iter().map(d_basis_element).collect();
    let mut ok = true;
    let mut note = String::new();

    // (i) Off-diagonal pairings vanish.
    for i in 0..elements.len() {
        for j in 0..elements.len() {
            if i != j && !gen_pairing(&elements[i], &elements[j]).is_zero() {
                ok = false;
                note_line(&mut note, format!("pairing ({}, {}) is nonzero", seqs[i], seqs[j]));
            }
        }
    }

    // (ii) The diagonal product equals the annular-trace Gram determinant,
    // compared by cross-multiplication.
    let mut diag = RationalFunction::one();
    for el in &elements {
        diag = &diag * &gen_pairing(el, el);
    }
    let gram = crate::gram::build_gram(crate::gram::GramKind::GenA, n, &crate::gram::Limits::default())
        .expect("within bounds");
    let det = RationalFunction::from_poly(crate::gram::bareiss_det(&gram.entries));
    if diag != det {
        ok = false;
        note_line(&mut note, "diagonal pairing product differs from the Gram determinant");
    }

    // (iii) Change of basis to the diagram basis, rows and columns in
    // Dyck-word order, should be unitriangular; its determinant being 1 is
    // the property the determinant transfer rests on.
    let mut order: Vec<usize> = (0..seqs.len()).collect();
    order.sort_by(|&i, &j| dyck_lex(seqs[i].dyck_mask(), seqs[j].dyck_mask(), 2 * n));
    let mut masks: Vec<u64> = seqs.iter().map(|s| s.dyck_mask()).collect();
    masks.sort_by(|&a, &b| dyck_lex(a, b, 2 * n));
    let change: Vec<Vec<RationalFunction>> = order
        .iter()
        .map(|&i| {
            masks
                .iter()
                .map(|&m| {
                    elements[i]
                        .terms()
                        .find(|(mor, _)| boundary_mask(mor) == m)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(RationalFunction::zero)
                })
                .collect()
        })
        .collect();
    let mut unitriangular = true;
    for (r, row) in change.iter().enumerate() {
        if row[r] != RationalFunction::one() {
            unitriangular = false;
        }
        for (c, v) in row.iter().enumerate() {
            if c < r && !v.is_zero() {
                unitriangular = false;
            }
        }
    }
    if unitriangular {
        note_line(&mut note, "change of basis is unitriangular in Dyck-word order");
    } else {
        note_line(&mut note, "change of basis is NOT unitriangular in Dyck-word order");
    }
    if det_rational(&change) != RationalFunction::one() {
        ok = false;
        note_line(&mut note, "change-of-basis determinant differs from 1");
    }

    let status = if ok { Status::Verified } else { Status::Failed };
    VerificationReport::new("wenzl-dbasis", n, status).with_note(note.trim_end_matches("; ").to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(p: Polynomial) -> RationalFunction {
        RationalFunction::from_poly(p)
    }

    fn d() -> Polynomial {
        Polynomial::var(Variable::D)
    }

    #[test]
    fn generators_satisfy_the_relations() {
        let e1 = TLElement::generator(3, 1);
        let e2 = TLElement::generator(3, 2);
        let d_rf = RationalFunction::from_poly(d());
        assert_eq!(tl_mul(&e1, &e1), e1.scale(&d_rf));
        assert_eq!(tl_mul(&tl_mul(&e1, &e2), &e1), e1);
        assert_eq!(tl_mul(&TLElement::identity(3), &e2), e2);
        // Distant generators commute.
        let e1_4 = TLElement::generator(4, 1);
        let e3_4 = TLElement::generator(4, 3);
        assert_eq!(tl_mul(&e1_4, &e3_4), tl_mul(&e3_4, &e1_4));
    }

    #[test]
    fn mirror_and_tensor_compose_coherently() {
        let e1 = TLMor::generator(2, 1);
        assert_eq!(e1.mirror(), e1);
        let id = TLMor::identity(1);
        assert_eq!(id.tensor(&id), TLMor::identity(2));
        // A cup stacked on a cap makes the hook, swallowing no loop.
        let cap = TLMor::new(2, 0, vec![1, 0]);
        let cup = cap.mirror();
        let (hook, loops) = cap.stack(&cup);
        assert_eq!((hook, loops), (TLMor::generator(2, 1), 0));
        // Cap on cup closes a loop.
        let (empty, loops) = cup.stack(&cap);
        assert_eq!(empty.src() + empty.dst(), 0);
        assert_eq!(loops, 1);
    }

    #[test]
    fn wenzl_recursion_gives_f2() {
        let f2 = jones_wenzl(2);
        assert_eq!(f2.num_terms(), 2);
        assert_eq!(f2.coeff(&TLMor::identity(2)), RationalFunction::one());
        let minus_inv_d = RationalFunction::new(Polynomial::constant(-1), d());
        assert_eq!(f2.coeff(&TLMor::generator(2, 1)), minus_inv_d);
    }

    #[test]
    fn idempotents_are_idempotent_and_annihilated() {
        for n in 1..=4 {
            let f = jones_wenzl(n);
            assert_eq!(f.then(&f), f, "f_{n} squared");
            assert_eq!(f.coeff(&TLMor::identity(n)), RationalFunction::one());
            for i in 1..n {
                let e = TLElement::generator(n, i);
                assert!(tl_mul(&e, &f).is_zero(), "e_{i} f_{n}");
                assert!(tl_mul(&f, &e).is_zero(), "f_{n} e_{i}");
            }
        }
    }

    #[test]
    fn traces_follow_the_chebyshev_families() {
        assert_eq!(markov_trace(&TLElement::identity(3)), rf(d().pow(3)));
        let e1 = TLElement::generator(2, 1);
        assert_eq!(markov_trace(&e1), rf(d()));
        for n in 1..=4 {
            let f = jones_wenzl(n);
            assert_eq!(markov_trace(&f), rf(delta(n)), "markov f_{n}");
            assert_eq!(
                annular_trace(&f),
                rf(chebyshev_s(n, Variable::Z)),
                "annular f_{n}"
            );
        }
        let z = Polynomial::var(Variable::Z);
        assert_eq!(annular_trace(&TLElement::identity(2)), rf(z.pow(2)));
    }

    #[test]
    fn theta_nets_match_the_closed_form() {
        assert_eq!(theta_formula(0, 0, 0), RationalFunction::one());
        assert_eq!(theta_formula(1, 1, 0), rf(delta(2)));
        // (1,1,1): Δ_3 Δ_2 Δ_1 / Δ_1^3.
        let expect = RationalFunction::new(&(&delta(3) * &delta(2)) * &delta(1), delta(1).pow(3));
        assert_eq!(theta_formula(1, 1, 1), expect);
        for x in 0..=3 {
            for y in 0..=3 - x {
                for z in 0..=3 - x - y {
                    assert_eq!(
                        theta_direct(x, y, z),
                        theta_formula(x, y, z),
                        "({x}, {y}, {z})"
                    );
                }
            }
        }
    }

    #[test]
    fn annular_theta_degenerates_to_the_annular_trace() {
        for n in 1..=4 {
            assert_eq!(annular_theta(0, n, 0), rf(chebyshev_s(n, Variable::Z)));
        }
        // S_2(z) / Δ_2 times Δ_3 Δ_2 Δ_1 / Δ_1^3 collapses to S_2(z) (d^2 - 2) / d.
        let expect = RationalFunction::new(
            &chebyshev_s(2, Variable::Z) * &delta(3).try_div_exact(&delta(1)).unwrap(),
            delta(1),
        );
        assert_eq!(annular_theta(1, 1, 1), expect);
    }

    #[test]
    fn dsequences_count_catalan() {
        let expected = [1usize, 2, 5, 14, 42, 132];
        for (i, &c) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(enum_dsequences(n).len(), c, "n = {n}");
        }
        assert!(DSequence::new(vec![1, 1, 1]).is_err());
        assert!(DSequence::new(vec![1, 2]).is_err());
        assert!(DSequence::new(vec![2, 1, 2]).is_err());
    }

    #[test]
    fn ladder_elements_match_known_identities() {
        let f2 = DSequence::new(vec![1, 2, 1]).unwrap();
        assert_eq!(d_basis_element(&f2), jones_wenzl(2));
        let e1 = DSequence::new(vec![1, 0, 1]).unwrap();
        assert_eq!(d_basis_element(&e1), TLElement::generator(2, 1));
        let zigzag = DSequence::new(vec![1, 0, 1, 0, 1]).unwrap();
        assert_eq!(d_basis_element(&zigzag), TLElement::generator(3, 1));
        // Lifting the fourth label off the floor leads with the two-step
        // diagram and picks up a nested correction along e_1.
        let lifted = DSequence::new(vec![1, 0, 1, 2, 1]).unwrap();
        let e1e2 = tl_mul(&TLElement::generator(3, 1), &TLElement::generator(3, 2));
        let minus_inv_d = RationalFunction::new(Polynomial::constant(-1), d());
        let expected = e1e2.add(&TLElement::generator(3, 1).scale(&minus_inv_d));
        assert_eq!(d_basis_element(&lifted), expected);
    }

    #[test]
    fn ladder_orthogonality_small() {
        let f2 = d_basis_element(&DSequence::new(vec![1, 2, 1]).unwrap());
        let e1 = d_basis_element(&DSequence::new(vec![1, 0, 1]).unwrap());
        assert!(gen_pairing(&f2, &e1).is_zero());
        let z = Polynomial::var(Variable::Z);
        assert_eq!(gen_pairing(&f2, &f2), rf(&z.pow(2) - &Polynomial::one()));
        assert_eq!(gen_pairing(&e1, &e1), rf(d().pow(2)));
    }

    #[test]
    fn report_suites_verify() {
        assert!(check_idempotent(4).is_verified());
        assert!(check_traces(3).is_verified());
        assert!(check_theta(3).is_verified());
        assert!(dbasis_checks(2).is_verified());
    }
}

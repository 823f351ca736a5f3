//! The crossingless-connection bases.
//!
//! All three surfaces carry `2n` marked boundary points, indexed `0..2n-1`
//! counterclockwise around the boundary circle.  For rectangle pictures of
//! disc diagrams the same indices read: top row `0..n-1` left to right,
//! bottom row `n..2n-1` right to left, so the rectangle's left edge sits in
//! the gap between point `2n-1` and point `0`.
//!
//! * Disc diagrams are fixed-point-free noncrossing involutions (no arc
//!   wraps past the gap).
//! * Annular and Möbius diagrams are encoded by their opener sets; arcs are
//!   recovered by cyclic matching, and on the Möbius band the leftover
//!   points run through the crosscap, joined antipodally.
//!
//! Basis orderings are fixed once and for all: opener sets are read as the
//! binary number `Σ 2^p` and listed ascending, and the Möbius basis is
//! grouped by crosscap arc count, fewest first.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which surface a diagram lives on.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SurfaceKind {
    Disc,
    Annulus,
    Mobius,
}

/// Noncrossing perfect matching on the disc.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscDiagram {
    n: usize,
    /// `partner[p]` is the point joined to `p`; a fixed-point-free involution.
    partner: Vec<usize>,
}

impl DiscDiagram {
    pub fn new(n: usize, partner: Vec<usize>) -> DiscDiagram {
        assert!(n >= 1, "need at least one strand");
        assert_eq!(partner.len(), 2 * n, "matching must cover 2n points");
        for (p, &q) in partner.iter().enumerate() {
            assert!(q < 2 * n && q != p && partner[q] == p, "not an involution");
        }
        // Noncrossing means properly nested in the linear order 0..2n-1.
        let mut stack: Vec<usize> = Vec::new();
        for (p, &q) in partner.iter().enumerate() {
            if q > p {
                stack.push(p);
            } else {
                assert_eq!(stack.pop(), Some(q), "matching has a crossing");
            }
        }
        DiscDiagram { n, partner }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partner(&self, p: usize) -> usize {
        self.partner[p]
    }

    pub fn matching(&self) -> &[usize] {
        &self.partner
    }

    /// Points that open an arc (their partner lies ahead of them).
    pub fn opener_mask(&self) -> u64 {
        let mut mask = 0u64;
        for (p, &q) in self.partner.iter().enumerate() {
            if q > p {
                mask |= 1 << p;
            }
        }
        mask
    }

    /// Rebuilds the matching from an opener set: each closer joins the
    /// nearest unmatched opener before it.  `None` when the set is not
    /// balanced.
    pub fn from_opener_mask(n: usize, mask: u64) -> Option<DiscDiagram> {
        let mut partner = vec![usize::MAX; 2 * n];
        let mut stack: Vec<usize> = Vec::new();
        for p in 0..2 * n {
            if mask & (1 << p) != 0 {
                stack.push(p);
            } else {
                let q = stack.pop()?;
                partner[p] = q;
                partner[q] = p;
            }
        }
        if !stack.is_empty() {
            return None;
        }
        Some(DiscDiagram { n, partner })
    }

    /// The identity rectangle diagram: top column `j` joined to bottom
    /// column `j`.
    pub fn identity(n: usize) -> DiscDiagram {
        let mut partner = vec![0; 2 * n];
        for j in 0..n {
            let (top, bottom) = (j, 2 * n - 1 - j);
            partner[top] = bottom;
            partner[bottom] = top;
        }
        DiscDiagram { n, partner }
    }

    /// The hook generator `e_i` (1-based, `1 <= i < n`): caps columns
    /// `i, i+1` on top and on the bottom, all other strands vertical.
    pub fn generator(n: usize, i: usize) -> DiscDiagram {
        assert!((1..n).contains(&i), "generator index out of range");
        let mut partner = DiscDiagram::identity(n).partner;
        let (a, b) = (i - 1, i); // 0-based columns
        partner[a] = b;
        partner[b] = a;
        let (ba, bb) = (2 * n - 1 - a, 2 * n - 1 - b);
        partner[ba] = bb;
        partner[bb] = ba;
        DiscDiagram::new(n, partner)
    }

    /// Vertical mirror of a rectangle diagram (top row swapped with bottom,
    /// columns kept).
    pub fn flip(&self) -> DiscDiagram {
        let two_n = 2 * self.n;
        let rho = |p: usize| two_n - 1 - p;
        let mut partner = vec![0; two_n];
        for p in 0..two_n {
            partner[rho(p)] = rho(self.partner[p]);
        }
        DiscDiagram { n: self.n, partner }
    }
}

impl fmt::Display for DiscDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, &q) in self.partner.iter().enumerate() {
            if q > p {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{p}-{q}")?;
            }
        }
        Ok(())
    }
}

/// Stacks `upper` over `lower` (upper's bottom row glued to lower's top row,
/// column to column) and returns the composite rectangle diagram together
/// with the number of closed loops swallowed by the gluing.
pub fn compose_rect(upper: &DiscDiagram, lower: &DiscDiagram) -> (DiscDiagram, usize) {
    assert_eq!(upper.n, lower.n, "strand counts differ");
    let n = upper.n;
    let two_n = 2 * n;

    // Walk helper.  Layer `true` is the upper diagram.  Interface column j
    // is upper's point 2n-1-j and lower's point j; composite endpoints are
    // upper's top row (p < n) and lower's bottom row (p >= n).  Returns the
    // composite endpoint reached, marking every interface column crossed.
    let walk = |mut layer: bool, mut p: usize, mark: &mut [bool]| -> usize {
        loop {
            let q = if layer { upper.partner[p] } else { lower.partner[p] };
            if layer && q < n {
                return q;
            }
            if !layer && q >= n {
                return q;
            }
            let col = if layer { two_n - 1 - q } else { q };
            mark[col] = true;
            if layer {
                layer = false;
                p = col;
            } else {
                layer = true;
                p = two_n - 1 - col;
            }
        }
    };

    let mut crossed = vec![false; n];
    let mut partner = vec![usize::MAX; two_n];
    for start in (0..n).chain(n..two_n) {
        if partner[start] != usize::MAX {
            continue;
        }
        let end = walk(start < n, start, &mut crossed);
        partner[start] = end;
        partner[end] = start;
    }

    // Interface columns never crossed from a boundary endpoint belong to
    // closed loops.
    let mut loops = 0;
    for c in 0..n {
        if crossed[c] {
            continue;
        }
        loops += 1;
        crossed[c] = true;
        let (mut layer, mut p) = (false, c); // lower's top point in column c
        loop {
            let q = if layer { upper.partner[p] } else { lower.partner[p] };
            debug_assert!(if layer { q >= n } else { q < n }, "closed loop hit the boundary");
            let col = if layer { two_n - 1 - q } else { q };
            if col == c {
                break;
            }
            crossed[col] = true;
            if layer {
                layer = false;
                p = col;
            } else {
                layer = true;
                p = two_n - 1 - col;
            }
        }
    }

    (DiscDiagram::new(n, partner), loops)
}

/// An arc that stays clear of the crosscap, running counterclockwise from
/// its opener to its closer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BoundaryArc {
    pub opener: usize,
    pub closer: usize,
    /// True when the counterclockwise span from opener to closer passes the
    /// reference cut between point `2n-1` and point `0`.
    pub wraps: bool,
}

/// Cyclic nearest matching: every closer joins the nearest available opener
/// behind it, wrapping around the circle.  Two laps suffice.  Returns the
/// arcs plus the never-matched points in ascending order.
fn cyclic_match(two_n: usize, openers: u64) -> (Vec<BoundaryArc>, Vec<usize>) {
    let mut matched = vec![false; two_n];
    let mut pushed = vec![false; two_n];
    let mut stack: Vec<usize> = Vec::new();
    let mut arcs = Vec::new();
    for _lap in 0..2 {
        for p in 0..two_n {
            if openers & (1 << p) != 0 {
                if !pushed[p] {
                    pushed[p] = true;
                    stack.push(p);
                }
            } else if !matched[p] {
                if let Some(u) = stack.pop() {
                    matched[u] = true;
                    matched[p] = true;
                    arcs.push(BoundaryArc { opener: u, closer: p, wraps: p < u });
                }
            }
        }
    }
    let leftover = (0..two_n).filter(|&p| !matched[p] && !pushed[p]).collect();
    (arcs, leftover)
}

/// Diagram on the annulus, encoded by its `n` openers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AnnularDiagram {
    n: usize,
    openers: u64,
}

impl AnnularDiagram {
    pub fn new(n: usize, openers: u64) -> AnnularDiagram {
        assert!(n >= 1 && 2 * n <= 64);
        assert_eq!(openers >> (2 * n), 0, "opener out of range");
        assert_eq!(openers.count_ones() as usize, n, "need exactly n openers");
        AnnularDiagram { n, openers }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn opener_mask(&self) -> u64 {
        self.openers
    }

    pub fn openers(&self) -> Vec<usize> {
        (0..2 * self.n).filter(|&p| self.openers & (1 << p) != 0).collect()
    }

    /// The arcs, each running counterclockwise from opener to closer.
    pub fn arcs(&self) -> Vec<BoundaryArc> {
        let (arcs, leftover) = cyclic_match(2 * self.n, self.openers);
        debug_assert!(leftover.is_empty());
        debug_assert_eq!(arcs.len(), self.n);
        arcs
    }
}

/// Decomposition of a Möbius diagram into boundary-parallel arcs and arcs
/// through the crosscap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MobiusArcs {
    pub trivial: Vec<BoundaryArc>,
    /// Antipodal pairs `(q_j, q_{j+m})` of the `2m` leftover points, `j < m`.
    pub crosscap: Vec<(usize, usize)>,
}

/// Diagram on the Möbius band: `k <= n` openers determine the cyclically
/// matched arcs; the `2(n-k)` leftover points run through the crosscap.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MobiusDiagram {
    n: usize,
    openers: u64,
}

impl MobiusDiagram {
    pub fn new(n: usize, openers: u64) -> MobiusDiagram {
        assert!(n >= 1 && 2 * n <= 64);
        assert_eq!(openers >> (2 * n), 0, "opener out of range");
        assert!(openers.count_ones() as usize <= n, "at most n openers");
        MobiusDiagram { n, openers }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn opener_mask(&self) -> u64 {
        self.openers
    }

    pub fn openers(&self) -> Vec<usize> {
        (0..2 * self.n).filter(|&p| self.openers & (1 << p) != 0).collect()
    }

    /// Number of arcs through the crosscap.
    pub fn crosscap_arcs(&self) -> usize {
        self.n - self.openers.count_ones() as usize
    }

    pub fn arcs(&self) -> MobiusArcs {
        let (trivial, leftover) = cyclic_match(2 * self.n, self.openers);
        let m = leftover.len() / 2;
        debug_assert_eq!(leftover.len(), 2 * m);
        let crosscap = (0..m).map(|j| (leftover[j], leftover[j + m])).collect();
        MobiusArcs { trivial, crosscap }
    }
}

/// All disc diagrams on `2n` points, ordered by opener set.
pub fn enum_disc(n: usize) -> Vec<DiscDiagram> {
    assert!(n >= 1 && 2 * n <= 24, "disc enumeration bound");
    let mut out = Vec::new();
    for mask in 0..(1u64 << (2 * n)) {
        if mask.count_ones() as usize != n {
            continue;
        }
        if let Some(d) = DiscDiagram::from_opener_mask(n, mask) {
            out.push(d);
        }
    }
    out
}

/// All annular diagrams on `2n` points, ordered by opener set.
pub fn enum_annulus(n: usize) -> Vec<AnnularDiagram> {
    assert!(n >= 1 && 2 * n <= 24, "annulus enumeration bound");
    (0..(1u64 << (2 * n)))
        .filter(|m| m.count_ones() as usize == n)
        .map(|m| AnnularDiagram::new(n, m))
        .collect()
}

/// All Möbius diagrams on `2n` points, grouped by crosscap arc count
/// (fewest first), opener sets ascending within each group.
pub fn enum_mobius(n: usize) -> Vec<MobiusDiagram> {
    assert!(n >= 1 && 2 * n <= 24, "Möbius enumeration bound");
    let mut out = Vec::new();
    for k in (0..=n).rev() {
        for mask in 0..(1u64 << (2 * n)) {
            if mask.count_ones() as usize == k {
                out.push(MobiusDiagram::new(n, mask));
            }
        }
    }
    out
}

/// `C(n, k)` as an exact `u64`; zero for `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> u64 {
    if k < 0 || k as u64 > n {
        return 0;
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// The Catalan number `C(2n, n) / (n + 1)`.
pub fn catalan(n: u64) -> u64 {
    binomial(2 * n, n as i64) / (n + 1)
}

/// Basis size for each surface.
pub fn basis_size(kind: SurfaceKind, n: usize) -> u64 {
    let n = n as u64;
    match kind {
        SurfaceKind::Disc => catalan(n),
        SurfaceKind::Annulus => binomial(2 * n, n as i64),
        SurfaceKind::Mobius => (0..=n).map(|k| binomial(2 * n, k as i64)).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_counts_are_catalan() {
        let expected = [1u64, 2, 5, 14, 42, 132];
        for (i, &c) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(enum_disc(n).len() as u64, c, "n = {n}");
            assert_eq!(basis_size(SurfaceKind::Disc, n), c);
        }
    }

    #[test]
    fn annulus_counts_are_central_binomials() {
        let expected = [2u64, 6, 20, 70, 252, 924];
        for (i, &c) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(enum_annulus(n).len() as u64, c, "n = {n}");
            assert_eq!(basis_size(SurfaceKind::Annulus, n), c);
        }
    }

    #[test]
    fn mobius_counts_match_partial_binomial_sums() {
        let expected = [3u64, 11, 42, 163, 638, 2510];
        for (i, &c) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(enum_mobius(n).len() as u64, c, "n = {n}");
            assert_eq!(basis_size(SurfaceKind::Mobius, n), c);
        }
    }

    #[test]
    fn mobius_ordering_groups_by_crosscap_count() {
        let basis = enum_mobius(2);
        let crosscaps: Vec<usize> = basis.iter().map(|m| m.crosscap_arcs()).collect();
        assert_eq!(crosscaps, vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2]);
        let masks: Vec<u64> = basis[..6].iter().map(|m| m.opener_mask()).collect();
        assert_eq!(masks, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
    }

    #[test]
    fn annular_decode_nests_and_wraps() {
        // n = 2, openers {0, 1}: nested arcs, no wrap.
        let d = AnnularDiagram::new(2, 0b0011);
        let mut arcs = d.arcs();
        arcs.sort_by_key(|a| a.opener);
        assert_eq!(
            arcs,
            vec![
                BoundaryArc { opener: 0, closer: 3, wraps: false },
                BoundaryArc { opener: 1, closer: 2, wraps: false },
            ]
        );
        // n = 1, openers {1}: the arc runs 1 -> 0 past the cut.
        let d = AnnularDiagram::new(1, 0b10);
        assert_eq!(d.arcs(), vec![BoundaryArc { opener: 1, closer: 0, wraps: true }]);
    }

    #[test]
    fn mobius_decode_splits_trivial_and_crosscap() {
        // n = 1, no openers: one crosscap arc (0, 1).
        let d = MobiusDiagram::new(1, 0);
        assert_eq!(d.arcs(), MobiusArcs { trivial: vec![], crosscap: vec![(0, 1)] });
        // n = 2, opener {0}: trivial arc (0, 1), crosscap arc (2, 3).
        let d = MobiusDiagram::new(2, 0b0001);
        assert_eq!(
            d.arcs(),
            MobiusArcs {
                trivial: vec![BoundaryArc { opener: 0, closer: 1, wraps: false }],
                crosscap: vec![(2, 3)],
            }
        );
    }

    #[test]
    fn mobius_with_full_openers_matches_annular_decode() {
        for n in 1..=3 {
            for a in enum_annulus(n) {
                let m = MobiusDiagram::new(n, a.opener_mask());
                let arcs = m.arcs();
                assert!(arcs.crosscap.is_empty());
                assert_eq!(arcs.trivial, a.arcs());
            }
        }
    }

    #[test]
    fn decode_reconstructs_openers() {
        // Openers re-derive from the arc list, witnessing injectivity of the
        // opener-set encoding.
        for n in 1..=3 {
            for m in enum_mobius(n) {
                let arcs = m.arcs();
                let mut mask = 0u64;
                for a in &arcs.trivial {
                    mask |= 1 << a.opener;
                }
                assert_eq!(mask, m.opener_mask());
                for &(u, v) in &arcs.crosscap {
                    assert_eq!(m.opener_mask() & (1 << u), 0);
                    assert_eq!(m.opener_mask() & (1 << v), 0);
                }
            }
        }
    }

    fn span_of(arc: &BoundaryArc, two_n: usize) -> Vec<usize> {
        let mut ps = Vec::new();
        let mut p = (arc.opener + 1) % two_n;
        while p != arc.closer {
            ps.push(p);
            p = (p + 1) % two_n;
        }
        ps
    }

    #[test]
    fn decoded_arcs_are_noncrossing() {
        for n in 1..=3 {
            for m in enum_mobius(n) {
                let arcs = m.arcs();
                let two_n = 2 * n;
                for i in 0..arcs.trivial.len() {
                    let sa = span_of(&arcs.trivial[i], two_n);
                    for j in i + 1..arcs.trivial.len() {
                        let b = &arcs.trivial[j];
                        let sb = span_of(b, two_n);
                        let a = &arcs.trivial[i];
                        let a_in_b = sb.contains(&a.opener) && sb.contains(&a.closer);
                        let b_in_a = sa.contains(&b.opener) && sa.contains(&b.closer);
                        let disjoint = !sb.contains(&a.opener)
                            && !sb.contains(&a.closer)
                            && !sa.contains(&b.opener)
                            && !sa.contains(&b.closer);
                        assert!(a_in_b || b_in_a || disjoint, "crossing arcs in {m:?}");
                    }
                    // Crosscap endpoints never sit under a trivial arc.
                    for &(u, v) in &arcs.crosscap {
                        assert!(!sa.contains(&u) && !sa.contains(&v), "crosscap endpoint under an arc");
                    }
                }
            }
        }
    }

    #[test]
    fn disc_roundtrip_through_opener_masks() {
        for n in 1..=4 {
            for d in enum_disc(n) {
                let back = DiscDiagram::from_opener_mask(n, d.opener_mask()).unwrap();
                assert_eq!(back, d);
            }
        }
        assert!(DiscDiagram::from_opener_mask(1, 0b10).is_none());
    }

    #[test]
    fn identity_and_generators_take_rectangle_form() {
        let id = DiscDiagram::identity(2);
        assert_eq!(id.matching(), &[3, 2, 1, 0]);
        let e1 = DiscDiagram::generator(2, 1);
        assert_eq!(e1.matching(), &[1, 0, 3, 2]);
    }

    #[test]
    fn composition_counts_loops() {
        // e_1 e_1 = (loop) e_1.
        let e1 = DiscDiagram::generator(2, 1);
        let (comp, loops) = compose_rect(&e1, &e1);
        assert_eq!(comp, e1);
        assert_eq!(loops, 1);
        // e_1 e_2 e_1 = e_1 with no loops along the way.
        let e1_3 = DiscDiagram::generator(3, 1);
        let e2_3 = DiscDiagram::generator(3, 2);
        let (c1, l1) = compose_rect(&e1_3, &e2_3);
        assert_eq!(l1, 0);
        let (c2, l2) = compose_rect(&c1, &e1_3);
        assert_eq!(l2, 0);
        assert_eq!(c2, e1_3);
        // The identity is neutral.
        let id = DiscDiagram::identity(3);
        let (c3, l3) = compose_rect(&id, &e2_3);
        assert_eq!((c3, l3), (e2_3, 0));
    }

    #[test]
    fn flip_mirrors_rectangles() {
        // Generators are symmetric under the vertical flip.
        let e1 = DiscDiagram::generator(3, 1);
        assert_eq!(e1.flip(), e1);
        // Top arc 0-1, through strand, bottom arc: not symmetric.
        let asym = DiscDiagram::new(3, vec![1, 0, 5, 4, 3, 2]);
        let flipped = asym.flip();
        assert_ne!(flipped, asym);
        assert_eq!(flipped.flip(), asym);
    }
}

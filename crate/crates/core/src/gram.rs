//! Gram matrices of the four bilinear forms, exact determinants, and the
//! divisibility checks built on top of them.
//!
//! Entries are filled in parallel (they are independent monomials);
//! elimination is sequential.  Determinants use single-step fraction-free
//! Bareiss elimination, whose intermediate divisions are exact over an
//! integral domain — a failed division is a hard bug, never a rounding
//! concern.  A cofactor expansion up to size 7 serves as an independent
//! oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::diagrams::{
    enum_annulus, enum_disc, enum_mobius, AnnularDiagram, DiscDiagram, MobiusDiagram,
};
use crate::pairing::{pair_annulus, pair_disc, pair_mobius, pair_trace_annular};
use crate::polyring::Polynomial;
use crate::report::{Status, VerificationReport};

/// Which bilinear form a Gram matrix is built over.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum GramKind {
    /// Disc diagrams glued in the disc.
    Disc,
    /// Disc diagrams traced around the annulus.
    GenA,
    /// Annular diagrams glued in the annulus.
    Annulus,
    /// Möbius diagrams glued into the Klein bottle.
    Mobius,
}

impl GramKind {
    pub const ALL: [GramKind; 4] = [
        GramKind::Disc,
        GramKind::GenA,
        GramKind::Annulus,
        GramKind::Mobius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GramKind::Disc => "disc",
            GramKind::GenA => "genA",
            GramKind::Annulus => "annulus",
            GramKind::Mobius => "mobius",
        }
    }
}

impl fmt::Display for GramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GramKind {
    type Err = String;

    fn from_str(s: &str) -> Result<GramKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "disc" => Ok(GramKind::Disc),
            "gena" => Ok(GramKind::GenA),
            "annulus" => Ok(GramKind::Annulus),
            "mobius" => Ok(GramKind::Mobius),
            _ => Err(format!(
                "unknown kind '{s}' (expected disc, genA, annulus, or mobius)"
            )),
        }
    }
}

/// Size ceilings per surface; building past them is refused rather than
/// silently attempted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Limits {
    pub disc: usize,
    pub annulus: usize,
    pub mobius: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { disc: 6, annulus: 5, mobius: 4 }
    }
}

impl Limits {
    pub fn unbounded() -> Limits {
        Limits {
            disc: usize::MAX,
            annulus: usize::MAX,
            mobius: usize::MAX,
        }
    }

    pub fn max_for(&self, kind: GramKind) -> usize {
        match kind {
            GramKind::Disc | GramKind::GenA => self.disc,
            GramKind::Annulus => self.annulus,
            GramKind::Mobius => self.mobius,
        }
    }
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum GramError {
    #[error("refusing {kind} at n = {n}: the default ceiling is n <= {max} (raise the limit explicitly to proceed)")]
    ResourceBound {
        kind: GramKind,
        n: usize,
        max: usize,
    },
}

/// A Gram matrix together with the basis (as opener masks) it was built on.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GramMatrix {
    pub kind: GramKind,
    pub n: usize,
    /// Opener-mask encodings of the basis diagrams, in basis order.
    pub basis: Vec<u64>,
    pub entries: Vec<Vec<Polynomial>>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn determinant(&self) -> Polynomial {
        bareiss_det(&self.entries)
    }

    /// Human-readable label of basis element `i`: arcs as `opener-closer`
    /// pairs, crosscap arcs prefixed `c`.
    pub fn basis_label(&self, i: usize) -> String {
        diagram_label(self.kind, self.n, self.basis[i])
    }

    /// CSV rendering: header row of basis labels, then one row per basis
    /// element with its label in the first column.
    pub fn to_csv(&self) -> String {
        let size = self.size();
        let labels: Vec<String> = (0..size).map(|i| self.basis_label(i)).collect();
        let mut out = String::new();
        out.push_str("basis");
        for l in &labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for i in 0..size {
            out.push_str(&labels[i]);
            for j in 0..size {
                out.push(',');
                out.push_str(&self.entries[i][j].to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Opener-mask encodings of the basis a form of this kind is built on, in
/// basis order.
pub fn basis_codes(kind: GramKind, n: usize) -> Vec<u64> {
    match kind {
        GramKind::Disc | GramKind::GenA => enum_disc(n).iter().map(|d| d.opener_mask()).collect(),
        GramKind::Annulus => enum_annulus(n).iter().map(|d| d.opener_mask()).collect(),
        GramKind::Mobius => enum_mobius(n).iter().map(|d| d.opener_mask()).collect(),
    }
}

/// Label for a basis diagram given by its opener mask: arcs as
/// `opener-closer` pairs, crosscap arcs prefixed `c`.
pub fn diagram_label(kind: GramKind, n: usize, mask: u64) -> String {
    match kind {
        GramKind::Disc | GramKind::GenA => DiscDiagram::from_opener_mask(n, mask)
            .expect("stored mask decodes")
            .to_string(),
        GramKind::Annulus => {
            let arcs = AnnularDiagram::new(n, mask).arcs();
            arcs.iter()
                .map(|a| format!("{}-{}", a.opener, a.closer))
                .collect::<Vec<_>>()
                .join(" ")
        }
        GramKind::Mobius => {
            let arcs = MobiusDiagram::new(n, mask).arcs();
            let mut parts: Vec<String> = arcs
                .trivial
                .iter()
                .map(|a| format!("{}-{}", a.opener, a.closer))
                .collect();
            parts.extend(arcs.crosscap.iter().map(|&(u, v)| format!("c{u}-{v}")));
            if parts.is_empty() {
                "empty".to_string()
            } else {
                parts.join(" ")
            }
        }
    }
}

/// Builds the Gram matrix of the given form, refusing sizes beyond `limits`.
pub fn build_gram(kind: GramKind, n: usize, limits: &Limits) -> Result<GramMatrix, GramError> {
    let max = limits.max_for(kind);
    if n > max {
        return Err(GramError::ResourceBound { kind, n, max });
    }
    let (basis, entries) = match kind {
        GramKind::Disc => {
            let b = enum_disc(n);
            let masks = b.iter().map(|d| d.opener_mask()).collect();
            (masks, fill(&b, |a, c| pair_disc(a, c)))
        }
        GramKind::GenA => {
            let b = enum_disc(n);
            let masks = b.iter().map(|d| d.opener_mask()).collect();
            (masks, fill(&b, |a, c| pair_trace_annular(a, c)))
        }
        GramKind::Annulus => {
            let b = enum_annulus(n);
            let masks = b.iter().map(|d| d.opener_mask()).collect();
            (masks, fill(&b, |a, c| pair_annulus(a, c)))
        }
        GramKind::Mobius => {
            let b = enum_mobius(n);
            let masks = b.iter().map(|d| d.opener_mask()).collect();
            (masks, fill(&b, |a, c| pair_mobius(a, c).expect("glued loop classifies")))
        }
    };
    Ok(GramMatrix { kind, n, basis, entries })
}

fn fill<T, F>(basis: &[T], pair: F) -> Vec<Vec<Polynomial>>
where
    T: Sync,
    F: Fn(&T, &T) -> Polynomial + Sync,
{
    (0..basis.len())
        .into_par_iter()
        .map(|i| basis.iter().map(|b| pair(&basis[i], b)).collect())
        .collect()
}

/// Exact determinant by single-step fraction-free Bareiss elimination.
/// Pivoting takes the first nonzero entry down each column; a column with no
/// pivot means an exactly zero determinant.
pub fn bareiss_det(rows: &[Vec<Polynomial>]) -> Polynomial {
    let size = rows.len();
    assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
    if size == 0 {
        return Polynomial::one();
    }
    let mut a: Vec<Vec<Polynomial>> = rows.to_vec();
    let mut prev = Polynomial::one();
    let mut negate = false;
    for k in 0..size - 1 {
        let pivot = match (k..size).find(|&r| !a[r][k].is_zero()) {
            Some(r) => r,
            None => return Polynomial::zero(),
        };
        if pivot != k {
            a.swap(pivot, k);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .try_div_exact(&prev)
                    .expect("Bareiss division must be exact over a domain");
            }
            a[i][k] = Polynomial::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Independent determinant oracle by minor expansion along the first row.
pub fn cofactor_det(rows: &[Vec<Polynomial>]) -> Polynomial {
    let size = rows.len();
    assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
    assert!(size <= 7, "cofactor oracle is capped at size 7");
    let m: Vec<Vec<Polynomial>> = rows.to_vec();
    cofactor_rec(&m)
}

fn cofactor_rec(m: &[Vec<Polynomial>]) -> Polynomial {
    let size = m.len();
    if size == 0 {
        return Polynomial::one();
    }
    if size == 1 {
        return m[0][0].clone();
    }
    let mut det = Polynomial::zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = entry * &cofactor_rec(&minor);
        det = if j % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

/// Checks that `f^e` divides `p` by `e` rounds of exact division.  The
/// witness is the final quotient.
pub fn divides_power(p: &Polynomial, f: &Polynomial, e: u32) -> VerificationReport {
    assert!(!f.is_zero(), "divisor must be nonzero");
    let claim = "divides-power";
    let mut q = p.clone();
    for step in 1..=e {
        match q.try_div_exact(f) {
            Some(next) => q = next,
            None => {
                return VerificationReport::new(claim, 0, Status::Failed)
                    .with_witness(vec![q])
                    .with_note(format!("division failed at step {step} of {e}"));
            }
        }
    }
    VerificationReport::new(claim, 0, Status::Verified)
        .with_witness(vec![q])
        .with_note(format!("divided exactly {e} times"))
}

/// Checks that `q` divides `p` after inverting `s`: searches for the least
/// `k <= k_max` with `s^k * p` exactly divisible by `q`.  Exhausting `k_max`
/// is indeterminate — it bounds the search, it does not refute the claim.
pub fn localized_divides(
    p: &Polynomial,
    q: &Polynomial,
    s: &Polynomial,
    k_max: u32,
) -> VerificationReport {
    assert!(!q.is_zero() && !s.is_zero(), "divisor and localizer must be nonzero");
    let claim = "localized-divides";
    let mut scaled = p.clone();
    for k in 0..=k_max {
        if let Some(quot) = scaled.try_div_exact(q) {
            return VerificationReport::new(claim, 0, Status::Verified)
                .with_witness(vec![quot])
                .with_exponents(vec![(0, k)])
                .with_note(format!("exact after multiplying by the localizer {k} time(s)"));
        }
        if k < k_max {
            scaled = &scaled * s;
        }
    }
    VerificationReport::new(claim, 0, Status::Indeterminate)
        .with_note(format!("no localizer power up to {k_max} clears the division"))
}

//! Rotation symmetry of the Gram forms and the block determinant it buys.
//!
//! Rotating the boundary circle by one position is an isometry of every
//! pairing here, so each Gram matrix commutes with the permutation the
//! rotation induces on its basis.  Splitting the basis into the rational
//! isotypic components of that cyclic action block-diagonalizes the matrix;
//! the determinant is then the product of small block determinants, which
//! sidesteps the intermediate-entry blowup of a direct elimination on the
//! full matrix.
//!
//! Nothing is taken on faith per instance: the rotation invariance of the
//! entries, the invariance of each component under the matrix, and the
//! dimension count are all checked before the product is returned, and any
//! failure falls back to `None` so callers can use plain elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

use crate::diagrams::DiscDiagram;
use crate::gram::{bareiss_det, GramKind, GramMatrix};
use crate::polyring::{Monomial, Polynomial};

/// Rotates a basis diagram one boundary position counterclockwise and
/// returns its encoding.
pub fn rotate_code(kind: GramKind, n: usize, code: u64) -> u64 {
    let two_n = 2 * n;
    match kind {
        // Disc arcs do not wrap, so which endpoint opens an arc depends on
        // the linear order and must be recomputed after rotating.
        GramKind::Disc | GramKind::GenA => {
            let d = DiscDiagram::from_opener_mask(n, code).expect("basis code decodes");
            let mut partner = vec![0usize; two_n];
            for p in 0..two_n {
                partner[(p + 1) % two_n] = (d.partner(p) + 1) % two_n;
            }
            DiscDiagram::new(n, partner).opener_mask()
        }
        // Annular and Möbius arcs carry their opener intrinsically (it is
        // the winding data), so the opener set itself rotates.
        GramKind::Annulus | GramKind::Mobius => {
            let wrapped = code >> (two_n - 1) & 1;
            (code << 1 | wrapped) & ((1 << two_n) - 1)
        }
    }
}

/// The permutation the rotation induces on the stored basis: entry `i` is
/// the basis index of the rotated `i`-th diagram.
fn rotation_perm(m: &GramMatrix) -> Option<Vec<usize>> {
    let index: HashMap<u64, usize> =
        m.basis.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    m.basis
        .iter()
        .map(|&c| index.get(&rotate_code(m.kind, m.n, c)).copied())
        .collect()
}

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m % d == 0).collect()
}

fn euler_phi(mut k: usize) -> usize {
    let mut phi = k;
    let mut p = 2;
    while p * p <= k {
        if k % p == 0 {
            while k % p == 0 {
                k /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if k > 1 {
        phi -= phi / k;
    }
    phi
}

fn moebius_mu(mut k: usize) -> i64 {
    let mut mu = 1i64;
    let mut p = 2;
    while p * p <= k {
        if k % p == 0 {
            k /= p;
            if k % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if k > 1 {
        mu = -mu;
    }
    mu
}

/// Sum of the `r`-th powers of the primitive `d`-th roots of unity; always
/// an integer.
fn ramanujan_sum(d: usize, r: usize) -> i64 {
    let g = gcd(d, r % d);
    let q = d / g;
    moebius_mu(q) * (euler_phi(d) / euler_phi(q)) as i64
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a.max(1) } else { gcd(b, a % b) }
}

type IMat = Vec<Vec<BigInt>>;

/// Column indices of a maximal independent set, by fraction-free
/// elimination.
fn column_rank_profile(mat: &IMat) -> Vec<usize> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut a: IMat = mat.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        for i in row + 1..rows {
            for j in col + 1..cols {
                let num = &a[row][col] * &a[i][j] - &a[i][col] * &a[row][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero());
                a[i][j] = q;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Exact determinant of a square integer matrix by Bareiss elimination.
fn int_det(mat: &IMat) -> BigInt {
    let size = mat.len();
    if size == 0 {
        return BigInt::one();
    }
    let mut a = mat.clone();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..size - 1 {
        let Some(p) = (k..size).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero());
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if negate { -det } else { det }
}

/// Adjugate of a square integer matrix, entry by entry from minors.
fn int_adjugate(mat: &IMat) -> IMat {
    let s = mat.len();
    let mut adj = vec![vec![BigInt::zero(); s]; s];
    for i in 0..s {
        for j in 0..s {
            let minor: IMat = (0..s)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..s).filter(|&c| c != j).map(|c| mat[r][c].clone()).collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = int_det(&minor) * sign;
        }
    }
    adj
}

fn scale_poly(p: &Polynomial, c: &BigInt) -> Polynomial {
    if c.is_zero() {
        Polynomial::zero()
    } else {
        p.mul_term(&Monomial::ONE, c)
    }
}

/// Determinant through the rotation-symmetry block decomposition, or `None`
/// when the matrix fails any of the structural checks.
pub fn sym_det(m: &GramMatrix) -> Option<Polynomial> {
    let size = m.size();
    if size == 0 {
        return Some(Polynomial::one());
    }
    let order = 2 * m.n;
    let perm = rotation_perm(m)?;

    // The pairing must actually be rotation invariant entry by entry.
    for i in 0..size {
        for j in 0..size {
            if m.entries[perm[i]][perm[j]] != m.entries[i][j] {
                return None;
            }
        }
    }

    // Iterated permutation powers: perm_pow[r][j] = pi^r(j).
    let mut perm_pow = vec![(0..size).collect::<Vec<usize>>()];
    for r in 1..order {
        let last = &perm_pow[r - 1];
        perm_pow.push((0..size).map(|j| perm[last[j]]).collect());
    }

    let mut det = Polynomial::one();
    let mut denominator = BigInt::one();
    let mut dims = 0usize;
    for d in divisors(order) {
        // Integer multiple of the isotypic projector: sum of Ramanujan-sum
        // weighted permutation powers.
        let mut proj = vec![vec![BigInt::zero(); size]; size];
        for (r, pow) in perm_pow.iter().enumerate() {
            let c = ramanujan_sum(d, r);
            if c == 0 {
                continue;
            }
            for j in 0..size {
                proj[pow[j]][j] += c;
            }
        }
        let cols = column_rank_profile(&proj);
        let s = cols.len();
        if s == 0 {
            continue;
        }
        dims += s;
        let basis: IMat = (0..size)
            .map(|i| cols.iter().map(|&c| proj[i][c].clone()).collect())
            .collect();
        let transpose: IMat = (0..s)
            .map(|k| (0..size).map(|i| basis[i][k].clone()).collect())
            .collect();
        let rows = column_rank_profile(&transpose);
        if rows.len() != s {
            return None;
        }
        let square: IMat = rows
            .iter()
            .map(|&r| basis[r].clone())
            .collect();
        let q = int_det(&square);
        if q.is_zero() {
            return None;
        }

        // Image of the component under the Gram matrix, restricted to the
        // chosen rows.
        let image: Vec<Vec<Polynomial>> = (0..size)
            .map(|i| {
                (0..s)
                    .map(|k| {
                        let mut acc = Polynomial::zero();
                        for j in 0..size {
                            if !basis[j][k].is_zero() {
                                acc = &acc + &scale_poly(&m.entries[i][j], &basis[j][k]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let restricted: Vec<Vec<Polynomial>> =
            rows.iter().map(|&r| image[r].clone()).collect();

        // The restriction matrix is adj(square) * restricted / q; confirm
        // the component really is invariant by checking
        // basis * (adj * restricted) = q * image exactly.
        let adj = int_adjugate(&square);
        let lifted: Vec<Vec<Polynomial>> = (0..s)
            .map(|a| {
                (0..s)
                    .map(|b| {
                        let mut acc = Polynomial::zero();
                        for k in 0..s {
                            if !adj[a][k].is_zero() {
                                acc = &acc + &scale_poly(&restricted[k][b], &adj[a][k]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        for i in 0..size {
            for b in 0..s {
                let mut acc = Polynomial::zero();
                for a in 0..s {
                    if !basis[i][a].is_zero() {
                        acc = &acc + &scale_poly(&lifted[a][b], &basis[i][a]);
                    }
                }
                if acc != scale_poly(&image[i][b], &q) {
                    return None;
                }
            }
        }

        // det of the restriction is det(restricted) / q.
        det = &det * &bareiss_det(&restricted);
        denominator *= q;
    }

    if dims != size {
        return None;
    }
    // The block determinants multiply to an integer polynomial; an inexact
    // division here would mean the decomposition was wrong.
    for (_, c) in det.terms() {
        if !(c % &denominator).is_zero() {
            return None;
        }
    }
    Some(det.div_scalar(&denominator.abs()).mul_term(
        &Monomial::ONE,
        &BigInt::from(if denominator.is_negative() { -1 } else { 1 }),
    ))
}

/// Exact Gram determinant: the symmetry decomposition for larger matrices,
/// plain fraction-free elimination otherwise (or if a check declines).
pub fn gram_det_auto(m: &GramMatrix) -> Polynomial {
    if m.size() > 16 {
        if let Some(det) = sym_det(m) {
            return det;
        }
    }
    m.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{build_gram, Limits};

    #[test]
    fn rotation_permutes_every_basis() {
        let limits = Limits::unbounded();
        for (kind, n) in [
            (GramKind::Disc, 3),
            (GramKind::GenA, 3),
            (GramKind::Annulus, 3),
            (GramKind::Mobius, 2),
        ] {
            let m = build_gram(kind, n, &limits).unwrap();
            let perm = rotation_perm(&m).expect("rotation stays inside the basis");
            let mut seen = vec![false; m.size()];
            for &p in &perm {
                assert!(!seen[p]);
                seen[p] = true;
            }
            // Applying the rotation 2n times is the identity.
            let mut current: Vec<usize> = (0..m.size()).collect();
            for _ in 0..2 * n {
                current = current.iter().map(|&j| perm[j]).collect();
            }
            assert_eq!(current, (0..m.size()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ramanujan_sums_are_character_sums() {
        // c_1(r) = 1, c_2(r) = (-1)^r, and c_d(0) = phi(d).
        for r in 0..6 {
            assert_eq!(ramanujan_sum(1, r), 1);
            assert_eq!(ramanujan_sum(2, r), if r % 2 == 0 { 1 } else { -1 });
        }
        for d in 1..=12 {
            assert_eq!(ramanujan_sum(d, 0), euler_phi(d) as i64);
        }
        assert_eq!(ramanujan_sum(6, 1), 1);
        assert_eq!(ramanujan_sum(6, 2), -1);
        assert_eq!(ramanujan_sum(6, 3), -2);
        assert_eq!(ramanujan_sum(4, 2), -2);
    }

    #[test]
    fn block_determinant_matches_direct_elimination() {
        let limits = Limits::unbounded();
        for (kind, n_max) in [
            (GramKind::Disc, 4),
            (GramKind::Annulus, 3),
            (GramKind::Mobius, 2),
        ] {
            for n in 1..=n_max {
                let m = build_gram(kind, n, &limits).unwrap();
                let direct = m.determinant();
                let blocked = sym_det(&m).expect("decomposition applies");
                assert_eq!(blocked, direct, "{} n={n}", kind.name());
            }
        }
    }

    #[test]
    fn annular_trace_form_is_not_rotation_invariant() {
        // Rotating a disc diagram moves points between the rows of the
        // square picture, which the annular closure does not commute with;
        // the entry check must veto the decomposition.
        let m = build_gram(GramKind::GenA, 2, &Limits::default()).unwrap();
        assert_eq!(sym_det(&m), None);
    }

    #[test]
    fn integer_helpers_agree_with_small_cases() {
        let m: IMat = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(7), BigInt::from(4)],
        ];
        assert_eq!(int_det(&m), BigInt::from(1));
        let adj = int_adjugate(&m);
        assert_eq!(adj[0][0], BigInt::from(4));
        assert_eq!(adj[0][1], BigInt::from(-1));
        assert_eq!(adj[1][0], BigInt::from(-7));
        assert_eq!(adj[1][1], BigInt::from(2));
        let wide: IMat = vec![
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(7)],
        ];
        assert_eq!(column_rank_profile(&wide), vec![0, 2]);
    }
}

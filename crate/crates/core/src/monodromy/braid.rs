//! Braid group action on Stokes and central connection matrices.

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::QMatrix;
use crate::error::{Error, Result};

/// `σ_i` (positive) or `σ_i^{-1}` (negative), 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BraidGenerator(pub i64);

impl BraidGenerator {
    pub fn index(&self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.0 < 0
    }
}

/// Parses `"1,-2,1"`.
pub fn parse_word(s: &str) -> Result<Vec<BraidGenerator>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let k: i64 = t.parse().map_err(|_| Error::Invalid(format!("braid letter {t:?} is not an integer")))?;
            if k == 0 {
                return Err(Error::Invalid("braid letters are nonzero".into()));
            }
            Ok(BraidGenerator(k))
        })
        .collect()
}

/// The move matrix for `σ_i^{±1}` at `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct BraidMove {
    pub generator: BraidGenerator,
    pub k: QMatrix,
}

pub fn braid_move(s: &QMatrix, g: BraidGenerator) -> Result<BraidMove> {
    let n = s.rows();
    let i = g.index();
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, arity: n.saturating_sub(1) });
    }
    let (a, b) = (i - 1, i);
    let sab = s[(a, b)].clone();
    let k = QMatrix::from_fn(n, n, |r, c| {
        if (r, c) == (a, b) || (r, c) == (b, a) {
            Rational::one()
        } else if r == c && r == a {
            if g.is_inverse() {
                Rational::zero()
            } else {
                -sab.clone()
            }
        } else if r == c && r == b {
            if g.is_inverse() {
                -sab.clone()
            } else {
                Rational::zero()
            }
        } else if r == c {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    Ok(BraidMove { generator: g, k })
}

fn check_stokes(s: &QMatrix) -> Result<()> {
    if !s.is_unit_upper_triangular() {
        return Err(Error::Invalid("Stokes matrix must be unit upper triangular".into()));
    }
    Ok(())
}

pub fn cmatrix_mul_q(c: &[Vec<Complex64>], k: &QMatrix) -> Vec<Vec<Complex64>> {
    let kf = k.to_f64();
    c.iter()
        .map(|row| (0..k.cols()).map(|j| row.iter().enumerate().map(|(l, x)| x * kf[l][j]).sum()).collect())
        .collect()
}

/// `S′ = K S K`, `C′ = C K`.
pub fn braid_act(
    s: &QMatrix,
    c: Option<&[Vec<Complex64>]>,
    g: BraidGenerator,
) -> Result<(QMatrix, Option<Vec<Vec<Complex64>>>)> {
    check_stokes(s)?;
    if let Some(c) = c {
        if c.len() != s.rows() || c.iter().any(|r| r.len() != s.rows()) {
            return Err(Error::Invalid("C must be square of the same size as S".into()));
        }
    }
    let mv = braid_move(s, g)?;
    let s2 = &(&mv.k * s) * &mv.k;
    if !s2.is_unit_upper_triangular() {
        return Err(Error::Invalid("braid move left the upper-triangular cone".into()));
    }
    Ok((s2, c.map(|c| cmatrix_mul_q(c, &mv.k))))
}

pub fn braid_word(
    s: &QMatrix,
    c: Option<&[Vec<Complex64>]>,
    word: &[BraidGenerator],
) -> Result<(QMatrix, Option<Vec<Vec<Complex64>>>)> {
    let mut cur = (s.clone(), c.map(<[Vec<Complex64>]>::to_vec));
    for g in word {
        cur = braid_act(&cur.0, cur.1.as_deref(), *g)?;
    }
    Ok(cur)
}

/// Sign diagonal `D` making `DSD` canonical: within each connected component
/// of the off-diagonal pattern, spanning-tree entries are positive; the
/// component's overall sign makes the first nonzero entry of `C` in its
/// columns positive.
pub fn canonical_signs(s: &QMatrix, c: Option<&[Vec<Complex64>]>) -> Vec<i8> {
    let n = s.rows();
    let mut sign = vec![0i8; n];
    for root in 0..n {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                if w == v || sign[w] != 0 {
                    continue;
                }
                let e = if v < w { &s[(v, w)] } else { &s[(w, v)] };
                if !e.is_zero() {
                    sign[w] = if e.is_positive() { sign[v] } else { -sign[v] };
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        if let Some(c) = c {
            comp.sort_unstable();
            let first = c.iter().flat_map(|row| comp.iter().map(move |&j| (row[j], j))).find(|(z, _)| z.norm() > 1e-12);
            if let Some((z, j)) = first {
                let lead = if z.re.abs() > 1e-12 { z.re } else { z.im };
                if lead * f64::from(sign[j]) < 0.0 {
                    for &k in &comp {
                        sign[k] = -sign[k];
                    }
                }
            }
        }
    }
    sign
}

pub fn apply_signs(
    s: &QMatrix,
    c: Option<&[Vec<Complex64>]>,
    d: &[i8],
) -> (QMatrix, Option<Vec<Vec<Complex64>>>) {
    let n = s.rows();
    let s2 = QMatrix::from_fn(n, n, |i, j| {
        let x = s[(i, j)].clone();
        if d[i] * d[j] < 0 {
            -x
        } else {
            x
        }
    });
    let c2 = c.map(|c| c.iter().map(|row| row.iter().zip(d).map(|(z, &k)| z * f64::from(k)).collect()).collect());
    (s2, c2)
}

pub fn canonicalize(s: &QMatrix, c: Option<&[Vec<Complex64>]>) -> (QMatrix, Option<Vec<Vec<Complex64>>>) {
    let d = canonical_signs(s, c);
    apply_signs(s, c, &d)
}

/// `S₁ = D S₂ D` for some sign diagonal `D`.
pub fn equal_mod_signs(a: &QMatrix, b: &QMatrix) -> bool {
    canonicalize(a, None).0 == canonicalize(b, None).0
}

/// Characteristic polynomial of `S^{-T} S`, lowest degree first.
pub fn monodromy_char_poly(s: &QMatrix) -> Result<Vec<Rational>> {
    let m = &s.transpose().inverse()? * s;
    m.char_poly()
}

#[derive(Clone, Debug)]
pub struct OrbitEntry {
    pub s: QMatrix,
    pub c: Option<Vec<Vec<Complex64>>>,
    /// A shortest word reaching this class.
    pub word: Vec<BraidGenerator>,
}

#[derive(Clone, Debug)]
pub struct BraidOrbit {
    pub entries: Vec<OrbitEntry>,
    pub depth: usize,
    pub truncated: bool,
}

fn orbit_key(s: &QMatrix, c: Option<&[Vec<Complex64>]>) -> String {
    let mut key: Vec<String> = s.to_rows().iter().flatten().map(rational::format_rational).collect();
    if let Some(c) = c {
        for z in c.iter().flatten() {
            key.push(format!("{:.9e}|{:.9e}", z.re + 0.0, z.im + 0.0));
        }
    }
    key.join(",")
}

/// Breadth-first closure under `σ_i^{±1}` modulo sign diagonals.
pub fn braid_orbit(s: &QMatrix, c: Option<&[Vec<Complex64>]>, depth: usize, cap: usize) -> Result<BraidOrbit> {
    check_stokes(s)?;
    let n = s.rows();
    let (s0, c0) = canonicalize(s, c);
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    seen.insert(orbit_key(&s0, c0.as_deref()), ());
    let mut entries = vec![OrbitEntry { s: s0, c: c0, word: Vec::new() }];
    let mut frontier = vec![0usize];
    let mut truncated = false;
    'levels: for _ in 0..depth {
        let mut next = Vec::new();
        for &idx in &frontier {
            for i in 1..n as i64 {
                for g in [BraidGenerator(i), BraidGenerator(-i)] {
                    let e = &entries[idx];
                    let (s1, c1) = braid_act(&e.s, e.c.as_deref(), g)?;
                    let (s1, c1) = canonicalize(&s1, c1.as_deref());
                    let key = orbit_key(&s1, c1.as_deref());
                    if seen.contains_key(&key) {
                        continue;
                    }
                    if entries.len() >= cap {
                        truncated = true;
                        break 'levels;
                    }
                    seen.insert(key, ());
                    let mut word = e.word.clone();
                    word.push(g);
                    entries.push(OrbitEntry { s: s1, c: c1, word });
                    next.push(entries.len() - 1);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(BraidOrbit { entries, depth, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn m(rows: &[Vec<i64>]) -> QMatrix {
        QMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn two_by_two_flips_sign() {
        let s = m(&[vec![1, 2], vec![0, 1]]);
        let (s1, _) = braid_act(&s, None, BraidGenerator(1)).unwrap();
        assert_eq!(s1, m(&[vec![1, -2], vec![0, 1]]));
        let (back, _) = braid_act(&s1, None, BraidGenerator(-1)).unwrap();
        assert_eq!(back, s);
        let orbit = braid_orbit(&s, None, 4, 100).unwrap();
        assert_eq!(orbit.entries.len(), 1);
    }

    #[test]
    fn identity_orbit() {
        let s = QMatrix::identity(4);
        let orbit = braid_orbit(&s, None, 3, 100).unwrap();
        assert_eq!(orbit.entries.len(), 1);
        assert!(!orbit.truncated);
    }

    #[test]
    fn p2_moves_preserve_invariants() {
        let s = m(&[vec![1, 3, 3], vec![0, 1, 3], vec![0, 0, 1]]);
        let cp = monodromy_char_poly(&s).unwrap();
        let (s1, _) = braid_act(&s, None, BraidGenerator(1)).unwrap();
        assert_eq!(s1, m(&[vec![1, -3, -6], vec![0, 1, 3], vec![0, 0, 1]]));
        assert_eq!(monodromy_char_poly(&s1).unwrap(), cp);
        let orbit = braid_orbit(&s, None, 3, 1000).unwrap();
        for e in &orbit.entries {
            assert_eq!(monodromy_char_poly(&e.s).unwrap(), cp);
            assert_eq!(e.s.det().unwrap(), int(1));
        }
        // Markov triples (3a, 3b, 3c) with a² + b² + c² = 3abc up to signs.
        assert!(orbit.entries.len() > 1);
    }

    #[test]
    fn inverse_undoes_move() {
        let s = m(&[vec![1, -1, 4, 2], vec![0, 1, 3, 0], vec![0, 0, 1, -2], vec![0, 0, 0, 1]]);
        for i in 1..4 {
            let (a, _) = braid_act(&s, None, BraidGenerator(i)).unwrap();
            let (b, _) = braid_act(&a, None, BraidGenerator(-i)).unwrap();
            assert!(equal_mod_signs(&b, &s), "σ_{i}");
        }
    }

    #[test]
    fn canonical_signs_fix_c() {
        let s = m(&[vec![1, -2], vec![0, 1]]);
        let c = vec![vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)], vec![Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0)]];
        let (s1, c1) = canonicalize(&s, Some(&c));
        assert!(s1[(0, 1)].is_positive());
        assert!(c1.unwrap()[0][0].re > 0.0);
    }

    #[test]
    fn words_parse() {
        assert_eq!(parse_word("1,-2, 1").unwrap(), vec![BraidGenerator(1), BraidGenerator(-2), BraidGenerator(1)]);
        assert!(parse_word("1,0").is_err());
        assert!(parse_word("x").is_err());
    }
}

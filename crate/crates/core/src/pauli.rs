//! Pauli strings in symplectic form.
//!
//! A string on `n` qubits is stored as an x-mask, a z-mask and a quarter
//! phase `i^phase_exp`. Bit `i` of each mask belongs to site `i`. A site
//! decodes as `(0,0) -> I`, `(1,0) -> X`, `(1,1) -> Y`, `(0,1) -> Z`, and
//! a string with `phase_exp == 0` is exactly the Hermitian tensor product of
//! its letters.
//!
//! # Text format
//!
//! ```text
//! string := [phase] letter+          letter := 'I' | 'X' | 'Y' | 'Z'
//! phase  := '+' | '-' | 'i' | '+i' | '-i'
//! ```
//!
//! A [`PauliSum`] is written one term per line as `coeff letters`, where
//! `coeff` is a real number or a complex literal such as `0.5-0.25i`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{ensure_dim, Error, Result};
use crate::{Matrix, C64, DEFAULT_DENSE_QUBIT_CAP};

/// Largest qubit count representable by the 64-bit masks.
pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    /// `(x, z)` symplectic bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn anticommutes_with(self, other: Letter) -> bool {
        self != Letter::I && other != Letter::I && self != other
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

fn site_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Reverse the low `n` bits so that site 0 lands on the most significant
/// bit of a computational-basis index.
pub(crate) fn sites_to_index_bits(mask: u64, n: usize) -> usize {
    debug_assert!(n <= 63);
    let mut out = 0usize;
    for site in 0..n {
        if mask >> site & 1 == 1 {
            out |= 1 << (n - 1 - site);
        }
    }
    out
}

fn i_pow(e: u8) -> C64 {
    match e % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn check_dense_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 30 {
        Err(Error::CapExceeded {
            what: "dense qubit",
            requested: n,
            limit: cap.min(30),
        })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase_exp: u8,
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let m = site_mask(n_qubits);
        if x_mask & !m != 0 || z_mask & !m != 0 {
            return Err(Error::invalid("mask has bits beyond n_qubits"));
        }
        Ok(Self {
            n_qubits,
            x_mask,
            z_mask,
            phase_exp: phase_exp % 4,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, 0, 0)
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (site, l) in letters.iter().enumerate().take(MAX_QUBITS) {
            let (bx, bz) = l.bits();
            x |= (bx as u64) << site;
            z |= (bz as u64) << site;
        }
        Self::new(letters.len(), x, z, 0)
    }

    /// `letter` on `site`, identity elsewhere.
    pub fn single(n_qubits: usize, site: usize, letter: Letter) -> Result<Self> {
        if site >= n_qubits {
            return Err(Error::invalid(format!(
                "site {site} out of range for {n_qubits} qubits"
            )));
        }
        let (bx, bz) = letter.bits();
        Self::new(n_qubits, (bx as u64) << site, (bz as u64) << site, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn letter(&self, site: usize) -> Letter {
        Letter::from_bits(self.x_mask >> site & 1 == 1, self.z_mask >> site & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n_qubits).map(|s| self.letter(s)).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Same string with the phase set to `+1`.
    pub fn stripped(&self) -> Self {
        Self { phase_exp: 0, ..*self }
    }

    pub fn with_phase(&self, phase_exp: u8) -> Self {
        Self {
            phase_exp: phase_exp % 4,
            ..*self
        }
    }

    /// Parity of the symplectic inner product; `true` means the strings commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let s = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        s.is_multiple_of(2)
    }

    /// Apply a site permutation: site `i` of `self` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        ensure_dim(self.n_qubits, perm.len())?;
        let mut letters = vec![Letter::I; self.n_qubits];
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.n_qubits {
                return Err(Error::invalid("permutation index out of range"));
            }
            letters[p] = self.letter(i);
        }
        Ok(PauliString::from_letters(&letters)?.with_phase(self.phase_exp))
    }

    pub fn to_dense(&self) -> Result<Matrix> {
        self.to_dense_capped(DEFAULT_DENSE_QUBIT_CAP)
    }

    /// Dense `2^n x 2^n` matrix, `cap` bounding `n`.
    pub fn to_dense_capped(&self, cap: usize) -> Result<Matrix> {
        check_dense_cap(self.n_qubits, cap)?;
        let d = 1usize << self.n_qubits;
        let mut m = Array2::zeros((d, d));
        self.for_each_entry(|row, col, v| m[[row, col]] = v);
        Ok(m)
    }

    /// Visit the `2^n` nonzero entries `(row, col, value)`.
    pub(crate) fn for_each_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        let n = self.n_qubits;
        let d = 1usize << n;
        let xi = sites_to_index_bits(self.x_mask, n);
        let zi = sites_to_index_bits(self.z_mask, n);
        let y_count = (self.x_mask & self.z_mask).count_ones() as u8;
        // Y = i X Z, so each Y contributes one quarter turn on top of X^x Z^z.
        let base = i_pow(self.phase_exp.wrapping_add(y_count));
        for col in 0..d {
            let sign = if (zi & col).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            f(col ^ xi, col, base * sign);
        }
    }
}

/// Group product `P * Q` with exact phase tracking.
pub fn pauli_product(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    ensure_dim(p.n_qubits, q.n_qubits)?;
    let x = p.x_mask ^ q.x_mask;
    let z = p.z_mask ^ q.z_mask;
    // sigma(x,z) = i^{xz} X^x Z^z and Z^z X^x = (-1)^{xz} X^x Z^z per site.
    let phase = p.phase_exp as u32
        + q.phase_exp as u32
        + (p.x_mask & p.z_mask).count_ones()
        + (q.x_mask & q.z_mask).count_ones()
        + 2 * (p.z_mask & q.x_mask).count_ones()
        + 3 * (x & z).count_ones();
    Ok(PauliString {
        n_qubits: p.n_qubits,
        x_mask: x,
        z_mask: z,
        phase_exp: (phase % 4) as u8,
    })
}

/// `[P, Q] = c * R` with `R` phase-stripped, or `None` when they commute.
pub fn pauli_commutator(p: &PauliString, q: &PauliString) -> Result<Option<(C64, PauliString)>> {
    ensure_dim(p.n_qubits, q.n_qubits)?;
    if p.commutes_with(q) {
        return Ok(None);
    }
    let r = pauli_product(p, q)?;
    Ok(Some((i_pow(r.phase_exp) * 2.0, r.stripped())))
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase_exp {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string in {s:?}")));
        }
        let letters = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters)?.with_phase(phase))
    }
}

/// 1-local phase-embedding generator `G = scale * sum_i sigma_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalGenerator {
    letters: Vec<Letter>,
    scale: f64,
}

impl LocalGenerator {
    pub fn new(letters: Vec<Letter>, scale: f64) -> Result<Self> {
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(Error::invalid("generator needs between 1 and 64 sites"));
        }
        if letters.contains(&Letter::I) {
            return Err(Error::invalid("generator letters must be non-identity"));
        }
        if !scale.is_finite() {
            return Err(Error::invalid("generator scale must be finite"));
        }
        Ok(Self { letters, scale })
    }

    pub fn uniform(n_qubits: usize, letter: Letter, scale: f64) -> Result<Self> {
        Self::new(vec![letter; n_qubits], scale)
    }

    /// `S_z = (1/2) sum_i Z_i`.
    pub fn collective_z(n_qubits: usize) -> Result<Self> {
        Self::uniform(n_qubits, Letter::Z, 0.5)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The common letter when the generator is site-uniform.
    pub fn uniform_letter(&self) -> Option<Letter> {
        let first = self.letters[0];
        self.letters.iter().all(|&l| l == first).then_some(first)
    }

    /// Symplectic masks of the per-site letters.
    pub fn masks(&self) -> (u64, u64) {
        let p = PauliString::from_letters(&self.letters).expect("validated letters");
        (p.x_mask, p.z_mask)
    }

    /// `Tr(G^2) = scale^2 * n * 2^n` (as a float; cross terms are traceless).
    pub fn trace_sq(&self) -> f64 {
        let n = self.n_qubits() as f64;
        self.scale * self.scale * n * 2f64.powf(n)
    }

    pub fn to_dense(&self) -> Result<Matrix> {
        self.to_dense_capped(DEFAULT_DENSE_QUBIT_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<Matrix> {
        self.to_pauli_sum()?.to_dense_capped(cap)
    }

    pub fn to_pauli_sum(&self) -> Result<PauliSum> {
        let n = self.n_qubits();
        let mut sum = PauliSum::new(n)?;
        for (site, &l) in self.letters.iter().enumerate() {
            sum.add_term(C64::new(self.scale, 0.0), PauliString::single(n, site, l)?)?;
        }
        Ok(sum)
    }

    /// Human-readable label such as `0.5*ZZZZ`.
    pub fn label(&self) -> String {
        let s: String = self.letters.iter().map(|l| l.as_char()).collect();
        format!("{}*{}", self.scale, s)
    }
}

/// Number of sites where the letter of `p` anticommutes with the letter of `g`.
pub fn anticommute_count(p: &PauliString, g: &LocalGenerator) -> Result<usize> {
    ensure_dim(g.n_qubits(), p.n_qubits())?;
    let (gx, gz) = g.masks();
    Ok(((p.x_mask & gz) ^ (p.z_mask & gx)).count_ones() as usize)
}

/// Permutation-symmetrised string labelled by its letter composition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetrizedPauli {
    pub p_x: usize,
    pub p_y: usize,
    pub p_z: usize,
    pub p_i: usize,
}

impl SymmetrizedPauli {
    pub fn new(n_qubits: usize, p_x: usize, p_y: usize, p_z: usize, p_i: usize) -> Result<Self> {
        if p_x + p_y + p_z + p_i != n_qubits {
            return Err(Error::invalid(format!(
                "composition ({p_x},{p_y},{p_z},{p_i}) does not sum to {n_qubits}"
            )));
        }
        Ok(Self { p_x, p_y, p_z, p_i })
    }

    pub fn n_qubits(&self) -> usize {
        self.p_x + self.p_y + self.p_z + self.p_i
    }

    /// All weak compositions of `n` into four parts.
    pub fn all(n_qubits: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for p_x in 0..=n_qubits {
            for p_y in 0..=n_qubits - p_x {
                for p_z in 0..=n_qubits - p_x - p_y {
                    let p_i = n_qubits - p_x - p_y - p_z;
                    out.push(Self { p_x, p_y, p_z, p_i });
                }
            }
        }
        out
    }

    /// Anticommutation count against a site-uniform generator letter.
    pub fn class_index(&self, generator_letter: Letter) -> usize {
        match generator_letter {
            Letter::X => self.p_y + self.p_z,
            Letter::Y => self.p_x + self.p_z,
            Letter::Z | Letter::I => self.p_x + self.p_y,
        }
    }

    /// `X^{p_x} Y^{p_y} Z^{p_z} I^{p_i}` in site order.
    pub fn representative(&self) -> Result<PauliString> {
        let mut letters = Vec::with_capacity(self.n_qubits());
        letters.extend(std::iter::repeat_n(Letter::X, self.p_x));
        letters.extend(std::iter::repeat_n(Letter::Y, self.p_y));
        letters.extend(std::iter::repeat_n(Letter::Z, self.p_z));
        letters.extend(std::iter::repeat_n(Letter::I, self.p_i));
        PauliString::from_letters(&letters)
    }

    /// Number of distinct strings in the permutation orbit (multinomial).
    pub fn orbit_size(&self) -> f64 {
        let ln = |k: usize| (1..=k).map(|v| (v as f64).ln()).sum::<f64>();
        (ln(self.n_qubits()) - ln(self.p_x) - ln(self.p_y) - ln(self.p_z) - ln(self.p_i))
            .exp()
            .round()
    }
}

/// Linear combination of phase-stripped Pauli strings on a common register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), C64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Result<Self> {
        PauliString::identity(n_qubits)?;
        Ok(Self {
            n_qubits,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (C64, PauliString)>) -> Result<Self> {
        let mut sum = Self::new(n_qubits)?;
        for (c, p) in terms {
            sum.add_term(c, p)?;
        }
        Ok(sum)
    }

    /// Add `coeff * p`, folding the phase of `p` into the coefficient.
    pub fn add_term(&mut self, coeff: C64, p: PauliString) -> Result<()> {
        ensure_dim(self.n_qubits, p.n_qubits)?;
        let c = coeff * i_pow(p.phase_exp);
        *self.terms.entry((p.x_mask, p.z_mask)).or_insert(C64::new(0.0, 0.0)) += c;
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (mask) order with phase-0 strings.
    pub fn terms(&self) -> impl Iterator<Item = (C64, PauliString)> + '_ {
        self.terms.iter().map(move |(&(x, z), &c)| {
            (
                c,
                PauliString {
                    n_qubits: self.n_qubits,
                    x_mask: x,
                    z_mask: z,
                    phase_exp: 0,
                },
            )
        })
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn to_dense(&self) -> Result<Matrix> {
        self.to_dense_capped(DEFAULT_DENSE_QUBIT_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<Matrix> {
        check_dense_cap(self.n_qubits, cap)?;
        let d = 1usize << self.n_qubits;
        let mut m = Array2::zeros((d, d));
        for (c, p) in self.terms() {
            p.for_each_entry(|r, col, v| m[[r, col]] += c * v);
        }
        Ok(m)
    }
}

fn format_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 || c.im.is_sign_negative() {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, p) in self.terms() {
            writeln!(f, "{} {}", format_coeff(c), p)?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sum: Option<PauliSum> = None;
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (coeff, letters) = match (parts.next(), parts.next(), parts.next()) {
                (Some(c), Some(l), None) => (c, l),
                _ => return Err(Error::Parse(format!("line {}: expected `coeff letters`", lineno + 1))),
            };
            let c: C64 = coeff
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad coefficient {coeff:?}", lineno + 1)))?;
            let p: PauliString = letters.parse()?;
            let target = match &mut sum {
                Some(t) => t,
                None => sum.insert(PauliSum::new(p.n_qubits())?),
            };
            target.add_term(c, p)?;
        }
        sum.ok_or_else(|| Error::Parse("empty Pauli sum".into()))
    }
}

/// Every phase-0 string on `n` qubits (`4^n` of them); `n <= 10`.
pub fn all_strings(n_qubits: usize) -> Result<impl Iterator<Item = PauliString>> {
    if n_qubits == 0 || n_qubits > 10 {
        return Err(Error::CapExceeded {
            what: "exhaustive enumeration qubit",
            requested: n_qubits,
            limit: 10,
        });
    }
    let side = 1u64 << n_qubits;
    Ok((0..side * side).map(move |k| PauliString {
        n_qubits,
        x_mask: k % side,
        z_mask: k / side,
        phase_exp: 0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::linalg::kron;

    fn single_dense(l: Letter) -> Matrix {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let v = match l {
            Letter::I => [o, z, z, o],
            Letter::X => [z, o, o, z],
            Letter::Y => [z, -i, i, z],
            Letter::Z => [o, z, z, -o],
        };
        Array2::from_shape_vec((2, 2), v.to_vec()).unwrap()
    }

    /// Tensor-product oracle with site 0 as the leftmost factor.
    fn kron_oracle(p: &PauliString) -> Matrix {
        let mut m = Array2::from_elem((1, 1), i_pow(p.phase_exp()));
        for l in p.letters() {
            m = kron(&m, &single_dense(l));
        }
        m
    }

    fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_y_is_i_z() {
        let r = pauli_product(&p("X"), &p("Y")).unwrap();
        assert_eq!(r, p("+iZ"));
        assert_eq!(r.phase_exp(), 1);
    }

    #[test]
    fn self_product_is_identity() {
        for s in ["XZYI", "-iYY", "Z"] {
            let q = p(s);
            let r = pauli_product(&q.stripped(), &q.stripped()).unwrap();
            assert!(r.is_identity());
            assert_eq!(r.phase_exp(), 0);
        }
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let a = p("XZ");
        let b = p("ZI");
        let r = pauli_product(&a, &b).unwrap();
        let dense = a.to_dense().unwrap().dot(&b.to_dense().unwrap());
        assert!(max_diff(&r.to_dense().unwrap(), &dense) < 1e-15);
        // XZ * ZI = (XZ) (x) Z = -iY (x) Z
        assert_eq!(r, p("-iYZ"));
    }

    #[test]
    fn dense_expansion_matches_kron_oracle_exhaustively() {
        for n in 1..=3 {
            for q in all_strings(n).unwrap() {
                for ph in 0..4 {
                    let q = q.with_phase(ph);
                    assert!(max_diff(&q.to_dense().unwrap(), &kron_oracle(&q)) < 1e-15, "{q}");
                }
            }
        }
    }

    #[test]
    fn product_is_dense_faithful_exhaustive() {
        for n in 1..=3 {
            let all: Vec<_> = all_strings(n).unwrap().collect();
            let dense: Vec<_> = all.iter().map(|q| q.to_dense().unwrap()).collect();
            for (a, da) in all.iter().zip(&dense) {
                for (b, db) in all.iter().zip(&dense) {
                    let r = pauli_product(a, b).unwrap();
                    assert!(max_diff(&r.to_dense().unwrap(), &da.dot(db)) < 1e-15);
                    let ab = da.dot(db);
                    let ba = db.dot(da);
                    let sign = if a.commutes_with(b) { 1.0 } else { -1.0 };
                    assert!(max_diff(&ab, &ba.mapv(|v| v * sign)) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn product_is_associative() {
        let all: Vec<_> = all_strings(2).unwrap().collect();
        for a in &all {
            for b in all.iter().step_by(3) {
                for c in all.iter().step_by(5) {
                    let l = pauli_product(&pauli_product(a, b).unwrap(), c).unwrap();
                    let r = pauli_product(a, &pauli_product(b, c).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn commutator_examples() {
        assert!(pauli_commutator(&p("Z"), &p("Z")).unwrap().is_none());
        let (c, r) = pauli_commutator(&p("X"), &p("Y")).unwrap().unwrap();
        assert_eq!(r, p("Z"));
        assert!((c - C64::new(0.0, 2.0)).norm() < 1e-15);

        let (a, b) = (p("XX"), p("ZI"));
        let (c, r) = pauli_commutator(&a, &b).unwrap().unwrap();
        assert_eq!(r, p("YX"));
        assert!((c - C64::new(0.0, -2.0)).norm() < 1e-15);
        let (da, db) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        let comm = da.dot(&db) - db.dot(&da);
        assert!(max_diff(&comm, &r.to_dense().unwrap().mapv(|v| v * c)) < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            pauli_product(&p("X"), &p("XX")),
            Err(Error::DimensionMismatch { .. })
        ));
        let g = LocalGenerator::collective_z(3).unwrap();
        assert!(anticommute_count(&p("XX"), &g).is_err());
    }

    #[test]
    fn anticommute_count_examples() {
        let g4 = LocalGenerator::collective_z(4).unwrap();
        assert_eq!(anticommute_count(&p("IIII"), &g4).unwrap(), 0);
        assert_eq!(anticommute_count(&p("XXXX"), &g4).unwrap(), 4);
        assert_eq!(anticommute_count(&p("XZYI"), &g4).unwrap(), 2);
        let gx = LocalGenerator::uniform(3, Letter::X, 1.0).unwrap();
        assert_eq!(anticommute_count(&p("XYZ"), &gx).unwrap(), 2);
    }

    #[test]
    fn class_counts_by_enumeration() {
        for n in 1..=6usize {
            let g = LocalGenerator::collective_z(n).unwrap();
            let mut counts = vec![0u64; n + 1];
            for q in all_strings(n).unwrap() {
                counts[anticommute_count(&q, &g).unwrap()] += 1;
            }
            for (k, &c) in counts.iter().enumerate() {
                let binom = (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64);
                assert_eq!(c, binom << n, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn dense_identity_and_collective_z() {
        let id = p("III").to_dense().unwrap();
        assert!(max_diff(&id, &Array2::eye(8)) == 0.0);
        let sz = LocalGenerator::collective_z(1).unwrap().to_dense().unwrap();
        assert_eq!(sz[[0, 0]], C64::new(0.5, 0.0));
        assert_eq!(sz[[1, 1]], C64::new(-0.5, 0.0));
        assert_eq!(sz[[0, 1]], C64::new(0.0, 0.0));
    }

    #[test]
    fn site_zero_is_leftmost_factor() {
        // Z on site 0 of two qubits is Z (x) I = diag(1, 1, -1, -1).
        let m = p("ZI").to_dense().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[[i, i]].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn pauli_sum_dense_is_hermitian_with_term_trace() {
        let sum = PauliSum::from_terms(
            3,
            [
                (C64::new(0.7, 0.0), p("XYZ")),
                (C64::new(-1.2, 0.0), p("IZI")),
                (C64::new(0.3, 0.0), p("III")),
            ],
        )
        .unwrap();
        assert!(sum.is_hermitian());
        let m = sum.to_dense().unwrap();
        let herm = m.t().mapv(|v| v.conj());
        assert!(max_diff(&m, &herm) < 1e-15);
        let tr: C64 = m.diag().sum();
        assert!((tr - C64::new(0.3 * 8.0, 0.0)).norm() < 1e-12);
        let mut oracle = Array2::zeros((8, 8));
        for (c, q) in sum.terms() {
            oracle = oracle + kron_oracle(&q).mapv(|v| v * c);
        }
        assert!(max_diff(&m, &oracle) < 1e-14);
    }

    #[test]
    fn pauli_sum_folds_phase_and_merges() {
        let mut sum = PauliSum::new(2).unwrap();
        sum.add_term(C64::new(1.0, 0.0), p("-XZ")).unwrap();
        sum.add_term(C64::new(3.0, 0.0), p("XZ")).unwrap();
        sum.add_term(C64::new(1.0, 0.0), p("+iYY")).unwrap();
        assert_eq!(sum.len(), 2);
        let terms: Vec<_> = sum.terms().collect();
        assert!(terms.iter().all(|(_, q)| q.phase_exp() == 0));
        assert!(terms.contains(&(C64::new(2.0, 0.0), p("XZ"))));
        assert!(terms.contains(&(C64::new(0.0, 1.0), p("YY"))));
    }

    #[test]
    fn text_format_parses_and_prints() {
        assert_eq!(p("-iXZ").phase_exp(), 3);
        assert_eq!(p("iXZ").phase_exp(), 1);
        assert_eq!(p("+XZ").phase_exp(), 0);
        assert_eq!(p("-XZ").to_string(), "-XZ");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-i".parse::<PauliString>().is_err());

        let text = "# Hamiltonian\n0.5 XX\n-1.25 ZI\n\n0.5-0.25i YZ\n";
        let sum: PauliSum = text.parse().unwrap();
        assert_eq!(sum.len(), 3);
        let again: PauliSum = sum.to_string().parse().unwrap();
        assert_eq!(sum, again);
        assert!("0.5 XX\n1 XXX\n".parse::<PauliSum>().is_err());
        assert!("abc XX\n".parse::<PauliSum>().is_err());
    }

    #[test]
    fn symmetrized_compositions() {
        let all = SymmetrizedPauli::all(2);
        assert_eq!(all.len(), 10);
        let total: f64 = all.iter().map(|b| b.orbit_size()).sum();
        assert_eq!(total, 16.0);
        assert!(SymmetrizedPauli::new(3, 1, 1, 1, 1).is_err());
        let b = SymmetrizedPauli::new(4, 1, 1, 1, 1).unwrap();
        assert_eq!(b.class_index(Letter::Z), 2);
        assert_eq!(b.representative().unwrap(), p("XYZI"));
    }

    #[test]
    fn generator_rejects_identity_letters() {
        assert!(LocalGenerator::new(vec![Letter::Z, Letter::I], 0.5).is_err());
        let g = LocalGenerator::collective_z(3).unwrap();
        assert_eq!(g.uniform_letter(), Some(Letter::Z));
        assert!((g.trace_sq() - 3.0 * 8.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let q = PauliString::identity(13).unwrap();
        assert!(matches!(q.to_dense(), Err(Error::CapExceeded { .. })));
        assert!(PauliString::identity(4).unwrap().to_dense_capped(3).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn string(n: usize) -> impl Strategy<Value = PauliString> {
            let side = 1u64 << n;
            (0..side, 0..side, 0u8..4).prop_map(move |(x, z, ph)| PauliString::new(n, x, z, ph).unwrap())
        }

        proptest! {
            #[test]
            fn text_round_trip(q in (1usize..12).prop_flat_map(string)) {
                let back: PauliString = q.to_string().parse().unwrap();
                prop_assert_eq!(back, q);
            }

            #[test]
            fn anticommute_count_is_permutation_invariant(
                q in string(6),
                perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
            ) {
                let g = LocalGenerator::collective_z(6).unwrap();
                let k = anticommute_count(&q, &g).unwrap();
                prop_assert_eq!(anticommute_count(&q.permuted(&perm).unwrap(), &g).unwrap(), k);
            }
        }
    }
}

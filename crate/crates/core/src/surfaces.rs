//! Surface presentations from trace coordinates, free-group word enumeration,
//! conjugacy-class reduction, and the oriented primitive length spectrum.
//!
//! Conjugacy classes of a free group correspond to necklaces: cyclic words
//! that are cyclically reduced, taken up to rotation. The enumerator walks
//! all freely reduced words up to a letter cap and keeps exactly one
//! representative per class — the lexicographically minimal rotation — so no
//! dedup table is needed and the output is deterministic. Inverse classes are
//! kept as separate records and cross-linked, because the trace-formula sums
//! run over *oriented* geodesics.

use crate::error::{Error, Result};
use crate::hyperbolic::{
    classify, translation_length, IsometryClass, UnimodularMatrix, CLASSIFY_TOL,
};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

/// Entry-size cap beyond which enumeration sets the overflow flag instead of
/// recording infinities.
pub const TRACE_OVERFLOW_CAP: f64 = 1e150;

/// Unit letter: generator index and orientation packed as 2·gen (+1 for the
/// inverse), so `l ^ 1` is the inverse letter.
pub(crate) type Letter = u8;

#[inline]
fn make_letter(gen: usize, inverse: bool) -> Letter {
    (2 * gen + usize::from(inverse)) as Letter
}

#[inline]
fn letter_inverse(l: Letter) -> Letter {
    l ^ 1
}

/// Freely reduced word over the generators of a presentation, stored as runs
/// (generator index, nonzero exponent).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    runs: Vec<(usize, i64)>,
}

impl Word {
    /// Builds a word from runs, freely reducing (merging adjacent runs of the
    /// same generator and dropping empty ones).
    pub fn new(runs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut stack: Vec<(usize, i64)> = Vec::new();
        for (g, e) in runs {
            if e == 0 {
                continue;
            }
            match stack.last_mut() {
                Some((top, te)) if *top == g => {
                    *te += e;
                    if *te == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push((g, e)),
            }
        }
        Word { runs: stack }
    }

    pub fn empty() -> Self {
        Word { runs: Vec::new() }
    }

    pub fn generator(g: usize) -> Self {
        Word { runs: vec![(g, 1)] }
    }

    /// The commutator [u, v] = u v u⁻¹ v⁻¹.
    pub fn commutator(u: &Word, v: &Word) -> Self {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    pub fn runs(&self) -> &[(usize, i64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of unit letters (sum of |exponents|).
    pub fn len(&self) -> usize {
        self.runs.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn inverse(&self) -> Self {
        Word {
            runs: self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Self {
        Word::new(self.runs.iter().chain(other.runs.iter()).copied())
    }

    pub fn repeat(&self, n: usize) -> Self {
        let mut w = Word::empty();
        for _ in 0..n {
            w = w.concat(self);
        }
        w
    }

    /// Net exponent of each generator (image in the abelianization).
    pub fn exponent_sums(&self, n_generators: usize) -> Vec<i64> {
        let mut sums = vec![0i64; n_generators];
        for &(g, e) in &self.runs {
            sums[g] += e;
        }
        sums
    }

    pub(crate) fn unit_letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.runs {
            let l = make_letter(g, e < 0);
            for _ in 0..e.unsigned_abs() {
                out.push(l);
            }
        }
        out
    }

    pub(crate) fn from_unit_letters(letters: &[Letter]) -> Self {
        Word::new(letters.iter().map(|&l| {
            let g = (l >> 1) as usize;
            (g, if l & 1 == 1 { -1i64 } else { 1i64 })
        }))
    }

    /// Parses the compact letter notation: `A`–`Z` are generators 0–25 and
    /// `a`–`z` their inverses, e.g. `"ABab"` is the commutator of the first
    /// two generators.
    pub fn parse(s: &str) -> Result<Self> {
        let mut runs = Vec::new();
        for ch in s.chars() {
            if ch.is_ascii_uppercase() {
                runs.push((ch as usize - 'A' as usize, 1i64));
            } else if ch.is_ascii_lowercase() {
                runs.push((ch as usize - 'a' as usize, -1i64));
            } else if !ch.is_whitespace() {
                return Err(Error::Domain(format!("word parse: unexpected character {ch:?}")));
            }
        }
        Ok(Word::new(runs))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        for &(g, e) in &self.runs {
            if g < 26 {
                let ch = if e > 0 {
                    (b'A' + g as u8) as char
                } else {
                    (b'a' + g as u8) as char
                };
                for _ in 0..e.unsigned_abs() {
                    write!(f, "{ch}")?;
                }
            } else {
                write!(f, "(g{g}^{e})")?;
            }
        }
        Ok(())
    }
}

/// A model surface Γ\ℍ given by explicit generators of Γ ⊂ SL(2,ℝ).
#[derive(Debug, Clone)]
pub struct SurfacePresentation {
    pub generators: Vec<UnimodularMatrix>,
    /// One primitive parabolic word per cusp.
    pub parabolic_words: Vec<Word>,
    /// Relation words (empty for the free presentations constructed here;
    /// kept so spin-structure validation can check them uniformly).
    pub relations: Vec<Word>,
    pub genus: usize,
    pub cusps: usize,
    /// Hyperbolic area 2π(2·genus − 2 + cusps).
    pub area: f64,
    /// Human-readable construction tag echoed into serialized documents.
    pub label: String,
}

impl SurfacePresentation {
    fn validate(&self) -> Result<()> {
        let expected = 2.0 * PI * (2.0 * self.genus as f64 - 2.0 + self.cusps as f64);
        if !(self.area > 0.0) || (self.area - expected).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "area {} violates Gauss-Bonnet value {expected}",
                self.area
            )));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if classify(g, CLASSIFY_TOL) == IsometryClass::Identity {
                return Err(Error::Domain(format!("generator {i} is the identity")));
            }
        }
        if self.parabolic_words.len() != self.cusps {
            return Err(Error::Domain(format!(
                "{} parabolic words for {} cusps",
                self.parabolic_words.len(),
                self.cusps
            )));
        }
        for w in &self.parabolic_words {
            let m = self.word_matrix(w);
            if classify(&m, CLASSIFY_TOL) != IsometryClass::Parabolic {
                return Err(Error::Domain(format!(
                    "cusp word {w} is not parabolic (tr = {})",
                    m.trace()
                )));
            }
        }
        Ok(())
    }

    /// Product of generator matrices along a word.
    pub fn word_matrix(&self, word: &Word) -> UnimodularMatrix {
        let mut m = UnimodularMatrix::identity();
        for &(g, e) in word.runs() {
            m = m.mul(&self.generators[g].pow(e));
        }
        m
    }

    /// Once-punctured torus from Fricke trace coordinates (x, y, z) =
    /// (tr A, tr B, tr AB) with x² + y² + z² = xyz.
    ///
    /// A is diagonal; B is solved entrywise with its lower-left entry
    /// normalized to 1. The commutator [A, B] then has trace −2 and generates
    /// the single cusp. Genus 1, one cusp, area 2π.
    pub fn punctured_torus(x: f64, y: f64, z: f64) -> Result<Self> {
        for &t in &[x, y, z] {
            if !(t > 2.0) {
                return Err(Error::NonDiscrete(t));
            }
        }
        let residual = x * x + y * y + z * z - x * y * z;
        if residual.abs() > 1e-9 * (x * y * z).abs().max(1.0) {
            return Err(Error::FrickeViolation { x, y, z, residual });
        }
        let alpha = 0.5 * (x + (x * x - 4.0).sqrt());
        let a = UnimodularMatrix::new(alpha, 0.0, 0.0, 1.0 / alpha)?;
        let p = (z * alpha - y) / (alpha * alpha - 1.0);
        let r = y - p;
        let q = p * r - 1.0;
        let b = UnimodularMatrix::new(p, q, 1.0, r)?;

        let commutator = Word::commutator(&Word::generator(0), &Word::generator(1));
        let surface = SurfacePresentation {
            generators: vec![a, b],
            parabolic_words: vec![commutator.clone()],
            relations: Vec::new(),
            genus: 1,
            cusps: 1,
            area: 2.0 * PI,
            label: format!("punctured-torus x={x} y={y} z={z}"),
        };
        let tr_comm = surface.word_matrix(&commutator).trace();
        if (tr_comm + 2.0).abs() > 1e-7 {
            return Err(Error::Domain(format!(
                "commutator trace {tr_comm} differs from -2; trace data inconsistent"
            )));
        }
        surface.validate()?;
        Ok(surface)
    }

    /// The thrice-punctured sphere Γ = ⟨P, Q⟩ with P = [[1,2],[0,1]] and
    /// Q = [[1,0],[2,1]]; cusp words P, Q and PQ⁻¹. Genus 0, three cusps,
    /// area 2π.
    pub fn thrice_punctured_sphere() -> Self {
        let p = UnimodularMatrix::new(1.0, 2.0, 0.0, 1.0).unwrap();
        let q = UnimodularMatrix::new(1.0, 0.0, 2.0, 1.0).unwrap();
        let w_p = Word::generator(0);
        let w_q = Word::generator(1);
        let w_pq_inv = w_p.concat(&w_q.inverse());
        let surface = SurfacePresentation {
            generators: vec![p, q],
            parabolic_words: vec![w_p, w_q, w_pq_inv],
            relations: Vec::new(),
            genus: 0,
            cusps: 3,
            area: 2.0 * PI,
            label: "thrice-punctured-sphere".into(),
        };
        surface.validate().expect("reference surface is valid");
        surface
    }
}

/// Oriented conjugacy class of a hyperbolic element.
#[derive(Debug, Clone)]
pub struct ConjugacyClassRecord {
    /// Canonical representative: the lexicographically minimal rotation of
    /// the cyclically reduced word.
    pub word: Word,
    pub matrix: UnimodularMatrix,
    /// Geodesic length l = 2·arccosh(|tr|/2).
    pub length: f64,
    pub trace: f64,
    pub primitive: bool,
    /// Set exactly when `primitive` is false: the class is
    /// `primitive_root^n` for some n ≥ 2.
    pub primitive_root: Option<Word>,
    /// Index of the inverse (opposite-orientation) class in the same record
    /// list.
    pub inverse_index: Option<usize>,
}

/// Oriented length spectrum with a truncation certificate.
///
/// `complete_up_to` is a *heuristic* watermark: every class of length below
/// it is present, justified by the shortest translation length seen among
/// frontier (cap-length) primitive words. A rigorous certificate would need
/// fundamental-domain machinery, so this stays labeled a heuristic in
/// serialized output.
#[derive(Debug, Clone)]
pub struct LengthSpectrum {
    /// Records sorted by (length, word), deduplicated by conjugacy.
    pub records: Vec<ConjugacyClassRecord>,
    pub complete_up_to: f64,
    pub word_length_cap: usize,
    /// Fitted constant C with L(r) ≤ C·eʳ over the enumerated range.
    pub tail_constant: f64,
    pub requested_r_max: f64,
    /// True when the word cap was too small to certify out to `r_max`.
    pub incomplete: bool,
    /// True when some word product exceeded the entry cap and was dropped.
    pub overflow: bool,
    /// Primitive parabolic classes met during enumeration (cusp classes).
    pub parabolic_classes: Vec<Word>,
}

impl LengthSpectrum {
    pub fn primitive_records(&self) -> impl Iterator<Item = &ConjugacyClassRecord> {
        self.records.iter().filter(|r| r.primitive)
    }

    /// L(r): number of enumerated oriented closed geodesics of length ≤ r.
    pub fn count_up_to(&self, r: f64) -> usize {
        self.records.iter().take_while(|rec| rec.length <= r).count()
    }

    /// Shortest primitive length (the systole), if anything was enumerated.
    pub fn systole(&self) -> Option<f64> {
        self.primitive_records()
            .map(|r| r.length)
            .fold(None, |m, l| Some(m.map_or(l, |m: f64| m.min(l))))
    }
}

/// True when `w` is the lexicographically smallest among its rotations.
fn is_minimal_rotation(w: &[Letter]) -> bool {
    let n = w.len();
    for r in 1..n {
        for i in 0..n {
            let a = w[(r + i) % n];
            let b = w[i];
            if a < b {
                return false;
            }
            if a > b {
                break;
            }
        }
    }
    true
}

/// True when `w` is not a proper power of a shorter block (exact in a free
/// group for cyclically reduced words).
fn is_primitive_necklace(w: &[Letter]) -> bool {
    let n = w.len();
    for p in 1..n {
        if n % p != 0 {
            continue;
        }
        if (p..n).all(|i| w[i] == w[i - p]) {
            return false;
        }
    }
    true
}

struct Enumerator {
    letter_mats: Vec<UnimodularMatrix>,
    cap: usize,
    r_max: f64,
    word: Vec<Letter>,
    prefix: Vec<UnimodularMatrix>,
    found: Vec<(Vec<Letter>, UnimodularMatrix, f64)>,
    parabolic: Vec<Word>,
    /// Min translation length of primitive hyperbolic necklaces per word
    /// length (index = length − 1).
    frontier_min: Vec<f64>,
    overflow: bool,
}

impl Enumerator {
    fn visit(&mut self) -> Result<()> {
        let depth = self.word.len();
        let m = self.prefix[depth];
        if m.max_entry() > TRACE_OVERFLOW_CAP || !m.is_finite() {
            self.overflow = true;
        } else if self.word[0] != letter_inverse(self.word[depth - 1])
            && is_minimal_rotation(&self.word)
            && is_primitive_necklace(&self.word)
        {
            match classify(&m, CLASSIFY_TOL) {
                IsometryClass::Hyperbolic => {
                    let l = translation_length(&m)?;
                    let lvl = &mut self.frontier_min[depth - 1];
                    *lvl = lvl.min(l);
                    if l <= self.r_max {
                        self.found.push((self.word.clone(), m, l));
                    }
                }
                IsometryClass::Parabolic => {
                    self.parabolic.push(Word::from_unit_letters(&self.word));
                }
                // the surfaces in scope are torsion-free; a genuine elliptic
                // or nontrivial identity word means bad input data
                IsometryClass::Elliptic | IsometryClass::Identity => {
                    return Err(Error::EllipticClass(m.trace().abs()));
                }
            }
        }
        Ok(())
    }

    fn dfs(&mut self) -> Result<()> {
        let depth = self.word.len();
        if depth == self.cap {
            return Ok(());
        }
        for l in 0..self.letter_mats.len() as Letter {
            if depth > 0 && l == letter_inverse(self.word[depth - 1]) {
                continue; // keep the word freely reduced
            }
            self.word.push(l);
            let m = self.prefix[depth].mul(&self.letter_mats[l as usize]);
            self.prefix.push(m);
            self.visit()?;
            self.dfs()?;
            self.word.pop();
            self.prefix.pop();
        }
        Ok(())
    }
}

/// Enumerates the oriented length spectrum of `surface` out to geodesic
/// length `r_max`, searching words of up to `word_cap` letters.
///
/// One record per conjugacy class; non-primitive classes are synthesized as
/// powers of the enumerated primitive roots so that every class with length
/// below the watermark is present. Inverse classes are cross-linked.
pub fn enumerate_length_spectrum(
    surface: &SurfacePresentation,
    r_max: f64,
    word_cap: usize,
) -> Result<LengthSpectrum> {
    if !(r_max > 0.0) {
        return Err(Error::Domain(format!("r_max = {r_max} must be positive")));
    }
    if word_cap < 1 {
        return Err(Error::Domain("word_cap must be at least 1".into()));
    }
    let mut letter_mats = Vec::with_capacity(2 * surface.generators.len());
    for g in &surface.generators {
        letter_mats.push(*g);
        letter_mats.push(g.inverse());
    }
    let mut en = Enumerator {
        letter_mats,
        cap: word_cap,
        r_max,
        word: Vec::with_capacity(word_cap),
        prefix: vec![UnimodularMatrix::identity()],
        found: Vec::new(),
        parabolic: Vec::new(),
        frontier_min: vec![f64::INFINITY; word_cap],
        overflow: false,
    };
    en.dfs()?;

    let mut records: Vec<ConjugacyClassRecord> = Vec::with_capacity(2 * en.found.len());
    for (letters, m, l) in &en.found {
        records.push(ConjugacyClassRecord {
            word: Word::from_unit_letters(letters),
            matrix: *m,
            length: *l,
            trace: m.trace(),
            primitive: true,
            primitive_root: None,
            inverse_index: None,
        });
        // powers of the primitive root, out to the requested length
        let mut n = 2usize;
        while *l * n as f64 <= r_max {
            let mp = m.pow(n as i64);
            if mp.max_entry() > TRACE_OVERFLOW_CAP || !mp.is_finite() {
                break;
            }
            let root = Word::from_unit_letters(letters);
            records.push(ConjugacyClassRecord {
                word: root.repeat(n),
                matrix: mp,
                length: translation_length(&mp)?,
                trace: mp.trace(),
                primitive: false,
                primitive_root: Some(root),
                inverse_index: None,
            });
            n += 1;
        }
    }

    records.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.word.unit_letters().cmp(&b.word.unit_letters()))
    });

    // orientation pairing: the inverse class is the minimal rotation of the
    // reversed, letter-inverted word
    let index: HashMap<Vec<Letter>, usize> = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.word.unit_letters(), i))
        .collect();
    let mut inverse_of = vec![None; records.len()];
    for (i, rec) in records.iter().enumerate() {
        let inv = canonical_letters(&rec.word.inverse().unit_letters());
        inverse_of[i] = index.get(&inv).copied();
    }
    for (i, rec) in records.iter_mut().enumerate() {
        rec.inverse_index = inverse_of[i];
    }

    // Watermark: unseen classes have minimal word length > cap, and the
    // shortest of them belong to cusp-winding families (powers of a
    // parabolic block times a short word) whose word length advances in
    // steps of the parabolic block length while the geodesic length grows
    // only logarithmically. Taking the frontier minimum over a window of
    // the last `window` letter-levels — one full parabolic period — tracks
    // those families; a single-level minimum demonstrably over-certifies
    // (the window keeps the certificate honest under cap refinement).
    let window = en
        .parabolic
        .iter()
        .map(Word::len)
        .max()
        .unwrap_or(4)
        .max(4)
        .min(word_cap);
    let frontier = en.frontier_min[word_cap - window..word_cap]
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let watermark = if frontier.is_finite() {
        // strictly below the shortest frontier class so that "length ≤
        // watermark" certifies presence even at ties
        frontier * (1.0 - 1e-12) - 1e-12
    } else {
        0.0
    };
    let complete_up_to = watermark.min(r_max);
    let incomplete = watermark < r_max;

    let mut fitted: f64 = 0.0;
    for (i, rec) in records.iter().enumerate() {
        fitted = fitted.max((i + 1) as f64 / rec.length.exp());
    }
    let tail_constant = if records.is_empty() { 1.0 } else { 2.0 * fitted };

    Ok(LengthSpectrum {
        records,
        complete_up_to,
        word_length_cap: word_cap,
        tail_constant,
        requested_r_max: r_max,
        incomplete,
        overflow: en.overflow,
        parabolic_classes: en.parabolic,
    })
}

/// Minimal rotation of a cyclic word (helper for conjugacy keys).
fn canonical_letters(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    let mut best = 0usize;
    for r in 1..n {
        for i in 0..n {
            let a = w[(r + i) % n];
            let b = w[(best + i) % n];
            if a < b {
                best = r;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    (0..n).map(|i| w[(best + i) % n]).collect()
}

/// Conjugacy-class key of an arbitrary word: cyclically reduce, then take the
/// minimal rotation. Two words are conjugate iff their keys agree.
pub fn conjugacy_key(word: &Word) -> Vec<u8> {
    let mut letters = word.unit_letters();
    while letters.len() >= 2 && letters[0] == letter_inverse(*letters.last().unwrap()) {
        letters.remove(0);
        letters.pop();
    }
    if letters.is_empty() {
        return Vec::new();
    }
    canonical_letters(&letters)
}

/// Upper bound C·eʳ on the number of closed geodesics of length ≤ r, with C
/// fitted on the enumerated spectrum (max of L(rᵢ)/e^{rᵢ}) times a safety
/// factor of two.
pub fn counting_bound(spectrum: &LengthSpectrum, r: f64) -> Result<f64> {
    if spectrum.records.is_empty() {
        return Err(Error::Domain("counting_bound: empty spectrum".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("counting_bound: r = {r} must be positive")));
    }
    Ok(spectrum.tail_constant * r.exp())
}

/// A family of punctured tori pinching the A generator: for each target
/// length l the Fricke coordinates are x = 2cosh(l/2), y = z = x/√(x−2).
#[derive(Debug, Clone)]
pub struct PinchFamily {
    /// Normalized grid t = l / l_first, inside (0, 1].
    pub t: Vec<f64>,
    pub surfaces: Vec<SurfacePresentation>,
    /// Classes whose geodesics shrink along the family (here: generator A).
    pub pinched_classes: Vec<Word>,
    /// `pinched_lengths[i][j]` = length of pinched class j on surface i.
    pub pinched_lengths: Vec<Vec<f64>>,
}

/// Builds the symmetric pinch family for a strictly decreasing list of
/// pinched-geodesic lengths.
pub fn pinch_family_symmetric(l_values: &[f64]) -> Result<PinchFamily> {
    if l_values.is_empty() {
        return Err(Error::Domain("pinch family needs at least one length".into()));
    }
    for w in l_values.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Domain(
                "pinch family lengths must be strictly decreasing".into(),
            ));
        }
    }
    if !(l_values[l_values.len() - 1] > 0.0) {
        return Err(Error::Domain("pinch family lengths must be positive".into()));
    }
    let l0 = l_values[0];
    let mut surfaces = Vec::with_capacity(l_values.len());
    let mut lengths = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let x = 2.0 * (l / 2.0).cosh();
        let y = x / (x - 2.0).sqrt();
        let surface = SurfacePresentation::punctured_torus(x, y, y)?;
        let got = translation_length(&surface.generators[0])?;
        debug_assert!((got - l).abs() < 1e-9 * l.max(1.0));
        lengths.push(vec![got]);
        surfaces.push(surface);
    }
    Ok(PinchFamily {
        t: l_values.iter().map(|&l| l / l0).collect(),
        surfaces,
        pinched_classes: vec![Word::generator(0)],
        pinched_lengths: lengths,
    })
}

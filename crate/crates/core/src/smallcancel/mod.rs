//! Symmetrized relator sets, piece analysis, `C'(λ)` certification, Dehn's
//! algorithm, and geodesic certificates.
//!
//! The `C'(λ)` check sorts the symmetrized set and inspects adjacent pairs:
//! for sorted words the longest common prefix of any pair is the minimum of
//! the adjacent prefixes between them, and for any pair the adjacent pair on
//! the shorter word's side realizes at least the same piece ratio, so the
//! maximal ratio over all pairs is attained on neighbours.
//!
//! Dehn rewriting scans with the factor index and replaces, at the leftmost
//! end position admitting a match of more than half a relator, the longest
//! such match `alpha` by `beta^-1` where `alpha beta` is the rotated
//! relator; each step shortens the word, and on a `C'(1/6)` presentation the
//! loop reaches the empty word exactly for trivial elements.

mod index;

pub use index::FactorIndex;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::rips::{self, GroupKind, Presentation, RipsError, RipsParams};
use crate::words::{word_from_codes, Alphabet, Word, WordError};

#[derive(Debug, Error)]
pub enum SmallCancelError {
    #[error("presentation fails C'(1/6): max piece ratio {0}")]
    NotC16(PieceReport),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Rips(#[from] RipsError),
}

/// Exact nonnegative fraction, compared by cross-multiplication.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Fraction {
        assert!(den > 0, "fraction denominator must be positive");
        Fraction { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parse "1/6" or "0.5"-free integer ratios ("1/2", "3/4").
    pub fn parse(s: &str) -> Option<Fraction> {
        let (num, den) = s.split_once('/')?;
        let num = num.trim().parse().ok()?;
        let den: u64 = den.trim().parse().ok()?;
        if den == 0 {
            return None;
        }
        Some(Fraction { num, den })
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Fraction) -> Option<std::cmp::Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl Fraction {
    fn cmp_exact(&self, other: &Fraction) -> std::cmp::Ordering {
        let left = self.num as u128 * other.den as u128;
        let right = other.num as u128 * self.den as u128;
        left.cmp(&right)
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub const LAMBDA_C16: Fraction = Fraction { num: 1, den: 6 };
pub const LAMBDA_HALF: Fraction = Fraction { num: 1, den: 2 };

/// The deduplicated set of all cyclic permutations of all relators and their
/// inverses, with the pattern index used for subword queries.
pub struct SymmetrizedRelatorSet {
    alphabet: Arc<Alphabet>,
    /// Sorted letter-lexicographically; binary-searchable.
    elements: Vec<Word>,
    index: FactorIndex,
}

impl SymmetrizedRelatorSet {
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements
            .binary_search_by(|e| e.cmp_lex(w))
            .is_ok()
    }

    pub fn index(&self) -> &FactorIndex {
        &self.index
    }

    pub fn max_relator_len(&self) -> u64 {
        self.index.max_rel_len()
    }

    pub fn min_relator_len(&self) -> Option<u64> {
        self.index.relators().iter().map(|r| r.len).min()
    }
}

/// Close the relators of `p` under cyclic permutation and inversion.
pub fn symmetrize(p: &Presentation) -> SymmetrizedRelatorSet {
    let mut seen = std::collections::HashSet::new();
    for rel in &p.relators {
        for word in [rel.clone(), rel.invert()] {
            for rot in word.cyclic_permutations() {
                seen.insert(rot);
            }
        }
    }
    let mut elements: Vec<Word> = seen.into_iter().collect();
    elements.sort_by(|a, b| a.cmp_lex(b));
    SymmetrizedRelatorSet {
        alphabet: Arc::clone(&p.alphabet),
        elements,
        index: FactorIndex::build(&p.relators),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceWitness {
    #[serde(serialize_with = "ser_word")]
    pub element1: Word,
    #[serde(serialize_with = "ser_word")]
    pub element2: Word,
    #[serde(serialize_with = "ser_word")]
    pub prefix: Word,
    pub prefix_len: u64,
}

fn ser_word<S: serde::Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

/// Outcome of the piece analysis: the maximal ratio `|prefix| / min(|s1|,
/// |s2|)` over distinct pairs of the symmetrized set, with a realizing pair.
#[derive(Clone, Debug, Serialize)]
pub struct PieceReport {
    pub element_count: u64,
    pub pairs_examined: u64,
    pub max_ratio: Option<Fraction>,
    pub witness: Option<PieceWitness>,
}

impl std::fmt::Display for PieceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (&self.max_ratio, &self.witness) {
            (Some(r), Some(w)) => write!(
                f,
                "{} (= {:.6}); prefix `{}` shared by `{}` and `{}`",
                r,
                r.as_f64(),
                w.prefix,
                w.element1,
                w.element2
            ),
            _ => write!(f, "no pieces (fewer than two symmetrized elements)"),
        }
    }
}

/// Check the `C'(lambda)` condition: every common prefix of two distinct
/// symmetrized elements is strictly shorter than `lambda` times the length
/// of each.
pub fn check_cprime(p: &Presentation, lambda: Fraction) -> (bool, PieceReport) {
    let set = symmetrize(p);
    check_cprime_set(&set, lambda)
}

pub fn check_cprime_set(set: &SymmetrizedRelatorSet, lambda: Fraction) -> (bool, PieceReport) {
    let elements = &set.elements;
    let mut max: Option<(Fraction, usize, usize, u64)> = None;
    let mut pairs = 0u64;
    for i in 1..elements.len() {
        let a = &elements[i - 1];
        let b = &elements[i];
        pairs += 1;
        let lcp = a.common_prefix_len(b);
        let den = a.len().min(b.len());
        let ratio = Fraction::new(lcp, den);
        let better = match &max {
            None => true,
            Some((best, ..)) => ratio.cmp_exact(best) == std::cmp::Ordering::Greater,
        };
        if better {
            max = Some((ratio, i - 1, i, lcp));
        }
    }
    let report = PieceReport {
        element_count: elements.len() as u64,
        pairs_examined: pairs,
        max_ratio: max.as_ref().map(|(r, ..)| *r),
        witness: max.as_ref().map(|&(_, i, j, lcp)| {
            let (prefix, _) = elements[i].split_at(lcp);
            PieceWitness {
                element1: elements[i].clone(),
                element2: elements[j].clone(),
                prefix,
                prefix_len: lcp,
            }
        }),
    };
    let ok = match &report.max_ratio {
        None => true,
        Some(r) => r.cmp_exact(&lambda) == std::cmp::Ordering::Less,
    };
    (ok, report)
}

/// Least `r` in `[r_lo, r_hi]` whose presentation passes `C'(lambda)`. Every
/// `r` below the answer is checked; nothing is assumed about monotonicity.
pub fn find_min_r(
    lambda: Fraction,
    r_lo: u32,
    r_hi: u32,
    kind: GroupKind,
    l: u32,
) -> Result<Option<(u32, PieceReport)>, SmallCancelError> {
    for r in r_lo..=r_hi {
        let params = RipsParams::new(r, l)?;
        let p = rips::presentation(kind, params)?;
        let (ok, report) = check_cprime(&p, lambda);
        if ok {
            return Ok(Some((r, report)));
        }
    }
    Ok(None)
}

/// One rewrite step of Dehn's algorithm.
#[derive(Clone, Debug)]
pub struct DehnStep {
    /// Letter index, in the word before this step, where the match begins.
    pub position: u64,
    /// The matched prefix `alpha` of a rotated relator.
    pub matched: Word,
    /// The rotated relator `alpha * beta`.
    pub relator: Word,
    /// The replacement `beta^-1`.
    pub replacement: Word,
}

#[derive(Clone, Debug, Default)]
pub struct DehnTrace {
    pub steps: Vec<DehnStep>,
}

/// Greedy Dehn rewriting: repeatedly replace the leftmost-ending, longest
/// match `alpha` with `|alpha| > |rho|/2` by the complementary `beta^-1`,
/// freely reducing in place. Deterministic; terminates because every step
/// strictly shortens the word.
pub fn dehn_reduce(w: &Word, set: &SymmetrizedRelatorSet) -> (Word, DehnTrace) {
    let reduced = w.free_reduce();
    let mut letters: Vec<u32> = reduced.iter_letters().map(|l| l.code()).collect();
    let mut trace = DehnTrace::default();
    let window = 2 * set.index.max_rel_len();
    let mut begin_clean: u64 = 0;
    loop {
        let feed_from = begin_clean.saturating_sub(window) as usize;
        let mut cursor = set.index.cursor();
        let mut fired: Option<(usize, index::Fire)> = None;
        for (p, &code) in letters.iter().enumerate().skip(feed_from) {
            cursor = set.index.advance(cursor, code);
            if (p as u64) < begin_clean {
                continue;
            }
            if let Some(fire) = set.index.check_fire(cursor) {
                fired = Some((p, fire));
                break;
            }
        }
        let Some((end, fire)) = fired else { break };
        let start = end + 1 - fire.len as usize;
        let alpha_codes = letters[start..=end].to_vec();
        let (rotated, beta) = set.index.split_relator(fire.rel, &alpha_codes);
        let beta_inv: Vec<u32> = beta
            .iter_letters()
            .map(|l| l.code())
            .rev()
            .map(|c| c ^ 1)
            .collect();
        trace.steps.push(DehnStep {
            position: start as u64,
            matched: word_from_codes(&set.alphabet, &alpha_codes),
            relator: rotated,
            replacement: word_from_codes(&set.alphabet, &beta_inv),
        });
        // Splice beta^-1 over alpha with free cancellation at the junctions.
        let mut out: Vec<u32> = Vec::with_capacity(letters.len());
        out.extend_from_slice(&letters[..start]);
        let mut min_len = out.len();
        for &code in &beta_inv {
            if out.last() == Some(&(code ^ 1)) {
                out.pop();
                min_len = min_len.min(out.len());
            } else {
                out.push(code);
            }
        }
        let mut idx = end + 1;
        while idx < letters.len() {
            let code = letters[idx];
            if out.last() == Some(&(code ^ 1)) {
                out.pop();
                min_len = min_len.min(out.len());
                idx += 1;
            } else {
                break;
            }
        }
        out.extend_from_slice(&letters[idx..]);
        assert!(out.len() < letters.len(), "Dehn step must shorten the word");
        begin_clean = (min_len as u64).min(start as u64);
        letters = out;
    }
    (word_from_codes(&set.alphabet, &letters), trace)
}

/// A subword of the scanned word that is a prefix of a symmetrized element.
#[derive(Clone, Debug)]
pub struct MatchInfo {
    pub subword: Word,
    pub len: u64,
    /// Letter index where the match starts.
    pub position: u64,
    /// The cyclic representative it matches into.
    pub relator: Word,
    pub relator_len: u64,
}

/// Diagnostics from a full scan: the longest matching subword anywhere, and
/// the pair maximizing `|alpha| / |rho|`.
#[derive(Clone, Debug, Default)]
pub struct MatchReport {
    pub longest: Option<MatchInfo>,
    pub tightest: Option<MatchInfo>,
}

impl MatchReport {
    pub fn max_ratio(&self) -> Option<Fraction> {
        self.tightest
            .as_ref()
            .map(|t| Fraction::new(t.len, t.relator_len))
    }
}

/// Scan `w` recording every maximal relator-prefix subword.
pub fn analyze_matches(w: &Word, set: &SymmetrizedRelatorSet) -> MatchReport {
    debug_assert!(w.is_freely_reduced());
    let letters: Vec<u32> = w.iter_letters().map(|l| l.code()).collect();
    let mut cursor = set.index.cursor();
    let mut report = MatchReport::default();
    for (p, &code) in letters.iter().enumerate() {
        cursor = set.index.advance(cursor, code);
        set.index.suffix_matches(cursor, |len, rel| {
            let rel_len = set.index.relators()[rel].len;
            let longer = report
                .longest
                .as_ref()
                .map_or(true, |best| len > best.len);
            let tighter = report.tightest.as_ref().map_or(true, |best| {
                (len as u128) * (best.relator_len as u128)
                    > (best.len as u128) * (rel_len as u128)
            });
            if longer || tighter {
                let start = p as u64 + 1 - len;
                let info = MatchInfo {
                    subword: word_from_codes(&set.alphabet, &letters[start as usize..=p]),
                    len,
                    position: start,
                    relator: set.index.relators()[rel].word.clone(),
                    relator_len: rel_len,
                };
                if longer {
                    report.longest = Some(info.clone());
                }
                if tighter {
                    report.tightest = Some(info);
                }
            }
        });
    }
    report
}

/// Dehn-reduced: every relator-prefix subword `alpha` has `|alpha| <=
/// |rho|/2`.
pub fn is_dehn_reduced(w: &Word, set: &SymmetrizedRelatorSet) -> (bool, MatchReport) {
    let report = analyze_matches(w, set);
    let ok = report
        .tightest
        .as_ref()
        .map_or(true, |t| 2 * t.len <= t.relator_len);
    (ok, report)
}

/// Strongly Dehn-reduced: every relator-prefix subword `alpha` has
/// `|alpha| <= |rho|/6`.
pub fn is_strongly_dehn_reduced(w: &Word, set: &SymmetrizedRelatorSet) -> (bool, MatchReport) {
    let report = analyze_matches(w, set);
    let ok = report
        .tightest
        .as_ref()
        .map_or(true, |t| 6 * t.len <= t.relator_len);
    (ok, report)
}

/// A word-problem oracle for a certified `C'(1/6)` presentation.
pub struct DehnOracle {
    presentation: Presentation,
    set: SymmetrizedRelatorSet,
    certificate: PieceReport,
}

impl DehnOracle {
    /// Certify `C'(1/6)` and build the oracle; refuses otherwise.
    pub fn new(p: &Presentation) -> Result<DehnOracle, SmallCancelError> {
        let set = symmetrize(p);
        let (ok, certificate) = check_cprime_set(&set, LAMBDA_C16);
        if !ok {
            return Err(SmallCancelError::NotC16(certificate));
        }
        Ok(DehnOracle { presentation: p.clone(), set, certificate })
    }

    pub fn set(&self) -> &SymmetrizedRelatorSet {
        &self.set
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn certificate(&self) -> &PieceReport {
        &self.certificate
    }

    /// Decide the word problem: `w` is trivial in the group iff its Dehn
    /// reduction is empty (Greendlinger's lemma makes the greedy loop
    /// complete on `C'(1/6)` input).
    pub fn is_trivial(&self, w: &Word) -> bool {
        let (reduced, _) = dehn_reduce(w, &self.set);
        reduced.is_empty()
    }

    pub fn reduce(&self, w: &Word) -> (Word, DehnTrace) {
        dehn_reduce(w, &self.set)
    }

    /// A strongly Dehn-reduced word is the unique geodesic for its element;
    /// `false` means the certificate does not apply, not that the word is
    /// non-geodesic.
    pub fn certify_geodesic(&self, w: &Word) -> bool {
        is_strongly_dehn_reduced(w, &self.set).0
    }
}

/// Gated word problem, building a throwaway oracle.
pub fn is_trivial(w: &Word, p: &Presentation) -> Result<bool, SmallCancelError> {
    Ok(DehnOracle::new(p)?.is_trivial(w))
}

/// Gated geodesic certificate.
pub fn certify_geodesic(w: &Word, p: &Presentation) -> Result<bool, SmallCancelError> {
    Ok(DehnOracle::new(p)?.certify_geodesic(w))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AbelianVerdict {
    /// The exponent-sum difference is not in the relator row span: the words
    /// differ already in the abelianization, hence in the group.
    DistinctCertified,
    /// The abelianization cannot separate the words.
    Inconclusive,
}

/// Integer-homology check: decide exactly whether `vec(u) - vec(v)` lies in
/// the integer row span of the relator exponent matrix.
pub fn abelianized_equal(u: &Word, v: &Word, p: &Presentation) -> AbelianVerdict {
    let eu = u.exponent_vector();
    let ev = v.exponent_vector();
    let diff: Vec<i64> = eu.iter().zip(&ev).map(|(a, b)| a - b).collect();
    abelianized_diff_in_span(&diff, p)
}

/// Same decision on a precomputed difference vector (for words too large to
/// materialize).
pub fn abelianized_diff_in_span(diff: &[i64], p: &Presentation) -> AbelianVerdict {
    let rows: Vec<Vec<i128>> = p
        .relators
        .iter()
        .map(|r| r.exponent_vector().iter().map(|&x| x as i128).collect())
        .collect();
    let v: Vec<i128> = diff.iter().map(|&x| x as i128).collect();
    if in_row_span(rows, v) {
        AbelianVerdict::Inconclusive
    } else {
        AbelianVerdict::DistinctCertified
    }
}

/// Exact membership of `v` in the integer row span via row echelon reduction
/// over the integers.
fn in_row_span(mut rows: Vec<Vec<i128>>, mut v: Vec<i128>) -> bool {
    let cols = v.len();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let mut pivot_rows: Vec<Vec<i128>> = Vec::new();
    for col in 0..cols {
        loop {
            let mut best: Option<usize> = None;
            for (i, row) in rows.iter().enumerate() {
                if row[col] != 0 {
                    best = match best {
                        None => Some(i),
                        Some(b) if row[col].abs() < rows[b][col].abs() => Some(i),
                        other => other,
                    };
                }
            }
            let Some(b) = best else { break };
            let pivot = rows.swap_remove(b);
            let mut done = true;
            for row in rows.iter_mut() {
                if row[col] != 0 {
                    let q = row[col].div_euclid(pivot[col]);
                    for (x, p) in row.iter_mut().zip(&pivot) {
                        *x -= q * p;
                    }
                    if row[col] != 0 {
                        done = false;
                    }
                }
            }
            rows.push(pivot);
            if done {
                // Exactly one row with a nonzero entry in this column
                // remains; move it to the pivot list.
                let idx = rows.iter().position(|r| r[col] != 0).unwrap();
                let pivot = rows.swap_remove(idx);
                pivot_rows.push(pivot);
                rows.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
    }
    // Reduce v against the echelon rows.
    for pivot in &pivot_rows {
        let col = pivot.iter().position(|&x| x != 0).unwrap();
        if v[col] % pivot[col] != 0 {
            return false;
        }
        let q = v[col] / pivot[col];
        for (x, p) in v.iter_mut().zip(pivot) {
            *x -= q * p;
        }
    }
    v.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests;

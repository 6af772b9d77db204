//! Free-group word arithmetic over run-length-encoded words.
//!
//! Words are sequences of signed generator letters stored as maximal runs
//! `(letter, multiplicity)`. All arithmetic (reduction, inversion,
//! concatenation, substitution, cyclic operations) works directly on runs, so
//! words with long power blocks like `c2^40` stay compact. Every word carries
//! a reference to its alphabet; combining words from different alphabets is a
//! hard error, and materializations beyond the alphabet's length cap fail
//! with an explicit overflow instead of exhausting memory.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Default cap on the total letter count of any materialized word (2^27).
pub const DEFAULT_LENGTH_CAP: u64 = 1 << 27;

#[derive(Debug, Error)]
pub enum WordError {
    #[error("words use different alphabets ({0} vs {1})")]
    AlphabetMismatch(String, String),
    #[error("materialized length {attempted} exceeds the length cap {cap}")]
    LengthCap { attempted: u128, cap: u64 },
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("malformed word literal near `{0}`")]
    BadLiteral(String),
    #[error("no image supplied for generator `{0}`")]
    MissingImage(String),
    #[error("generator index {0} out of range for alphabet")]
    BadGenerator(u16),
}

/// An immutable table of generator names. Generator ids are dense indices
/// into this table. Words referencing different alphabets never mix.
pub struct Alphabet {
    names: Vec<String>,
    by_name: HashMap<String, u16>,
    length_cap: u64,
    fingerprint: u64,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Alphabet>, WordError> {
        Self::with_length_cap(names, DEFAULT_LENGTH_CAP)
    }

    pub fn with_length_cap<S: AsRef<str>>(
        names: &[S],
        length_cap: u64,
    ) -> Result<Arc<Alphabet>, WordError> {
        let mut by_name = HashMap::new();
        let mut stored = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref().to_string();
            if by_name.insert(name.clone(), i as u16).is_some() {
                return Err(WordError::DuplicateGenerator(name));
            }
            stored.push(name);
        }
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        stored.hash(&mut hasher);
        length_cap.hash(&mut hasher);
        let fingerprint = hasher.finish();
        Ok(Arc::new(Alphabet {
            names: stored,
            by_name,
            length_cap,
            fingerprint,
        }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn length_cap(&self) -> u64 {
        self.length_cap
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator(&self, name: &str) -> Option<Generator> {
        self.by_name.get(name).map(|&i| Generator(i))
    }

    pub fn name(&self, g: Generator) -> &str {
        &self.names[g.0 as usize]
    }

    fn compatible(&self, other: &Alphabet) -> bool {
        self.fingerprint == other.fingerprint && self.names == other.names
    }

    /// Same generator table (and length cap); words over equal alphabets
    /// interoperate even across separately constructed tables.
    pub fn same(&self, other: &Alphabet) -> bool {
        self.compatible(other)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({})", self.names.join(" "))
    }
}

fn mismatch(a: &Alphabet, b: &Alphabet) -> WordError {
    WordError::AlphabetMismatch(a.names.join(" "), b.names.join(" "))
}

/// Index of a generator in its alphabet.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Generator(pub u16);

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A signed generator occurrence.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter {
    pub gen: Generator,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: Generator, sign: Sign) -> Letter {
        Letter { gen, sign }
    }

    pub fn positive(gen: Generator) -> Letter {
        Letter::new(gen, Sign::Plus)
    }

    pub fn negative(gen: Generator) -> Letter {
        Letter::new(gen, Sign::Minus)
    }

    pub fn inverse(self) -> Letter {
        Letter::new(self.gen, self.sign.flip())
    }

    /// Dense code: `2*gen` for positive, `2*gen + 1` for negative. Codes give
    /// the total letter order used for lexicographic word comparison.
    pub fn code(self) -> u32 {
        (self.gen.0 as u32) * 2 + if self.sign == Sign::Minus { 1 } else { 0 }
    }

    pub fn from_code(code: u32) -> Letter {
        Letter::new(
            Generator((code / 2) as u16),
            if code % 2 == 0 { Sign::Plus } else { Sign::Minus },
        )
    }
}

/// A maximal run of one letter.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Run {
    pub letter: Letter,
    pub count: u64,
}

/// A word over an alphabet, stored as maximal runs. Not necessarily freely
/// reduced; `free_reduce` gives the reduced form and most constructors that
/// combine words reduce their result.
#[derive(Clone)]
pub struct Word {
    alpha: Arc<Alphabet>,
    runs: Vec<Run>,
    len: u64,
}

impl PartialEq for Word {
    fn eq(&self, other: &Word) -> bool {
        self.alpha.compatible(&other.alpha) && self.runs == other.runs
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alpha.fingerprint.hash(state);
        self.runs.hash(state);
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for run in &self.runs {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let name = self.alpha.name(run.letter.gen);
            match (run.letter.sign, run.count) {
                (Sign::Plus, 1) => write!(f, "{name}")?,
                (Sign::Plus, k) => write!(f, "{name}^{k}")?,
                (Sign::Minus, k) => write!(f, "{name}^-{k}")?,
            }
        }
        Ok(())
    }
}

/// Run accumulator enforcing the maximal-run invariant.
struct RunBuilder {
    runs: Vec<Run>,
    len: u64,
}

impl RunBuilder {
    fn new() -> RunBuilder {
        RunBuilder { runs: Vec::new(), len: 0 }
    }

    fn push(&mut self, letter: Letter, count: u64) {
        if count == 0 {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.letter == letter {
                last.count += count;
                self.len += count;
                return;
            }
        }
        self.runs.push(Run { letter, count });
        self.len += count;
    }

    /// Push with free cancellation against the current tail.
    fn push_reduced(&mut self, letter: Letter, mut count: u64) {
        while count > 0 {
            match self.runs.last_mut() {
                Some(last) if last.letter == letter.inverse() => {
                    let cancel = last.count.min(count);
                    last.count -= cancel;
                    count -= cancel;
                    self.len -= cancel;
                    if last.count == 0 {
                        self.runs.pop();
                    }
                }
                _ => {
                    self.push(letter, count);
                    return;
                }
            }
        }
    }

    fn finish(self, alpha: Arc<Alphabet>) -> Word {
        Word { alpha, runs: self.runs, len: self.len }
    }
}

impl Word {
    pub fn empty(alpha: &Arc<Alphabet>) -> Word {
        Word { alpha: Arc::clone(alpha), runs: Vec::new(), len: 0 }
    }

    pub fn letter(alpha: &Arc<Alphabet>, letter: Letter) -> Word {
        Word::from_run(alpha, letter, 1)
    }

    pub fn from_run(alpha: &Arc<Alphabet>, letter: Letter, count: u64) -> Word {
        if count == 0 {
            return Word::empty(alpha);
        }
        Word {
            alpha: Arc::clone(alpha),
            runs: vec![Run { letter, count }],
            len: count,
        }
    }

    pub fn from_letters<I>(alpha: &Arc<Alphabet>, letters: I) -> Result<Word, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut b = RunBuilder::new();
        for letter in letters {
            if letter.gen.0 as usize >= alpha.len() {
                return Err(WordError::BadGenerator(letter.gen.0));
            }
            b.push(letter, 1);
        }
        let w = b.finish(Arc::clone(alpha));
        w.check_cap()?;
        Ok(w)
    }

    pub fn from_runs<I>(alpha: &Arc<Alphabet>, runs: I) -> Result<Word, WordError>
    where
        I: IntoIterator<Item = (Letter, u64)>,
    {
        let mut b = RunBuilder::new();
        for (letter, count) in runs {
            if letter.gen.0 as usize >= alpha.len() {
                return Err(WordError::BadGenerator(letter.gen.0));
            }
            b.push(letter, count);
        }
        let w = b.finish(Arc::clone(alpha));
        w.check_cap()?;
        Ok(w)
    }

    /// Parse the word literal syntax: whitespace-separated `name`, `name^k`,
    /// `name^-k` terms; `1` is the empty word.
    pub fn parse(alpha: &Arc<Alphabet>, text: &str) -> Result<Word, WordError> {
        let mut b = RunBuilder::new();
        for term in text.split_whitespace() {
            if term == "1" {
                continue;
            }
            let (name, exp) = match term.split_once('^') {
                None => (term, 1i64),
                Some((name, exp)) => {
                    let exp: i64 = exp
                        .parse()
                        .map_err(|_| WordError::BadLiteral(term.to_string()))?;
                    (name, exp)
                }
            };
            if exp == 0 {
                return Err(WordError::BadLiteral(term.to_string()));
            }
            let gen = alpha
                .generator(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            let sign = if exp > 0 { Sign::Plus } else { Sign::Minus };
            b.push(Letter::new(gen, sign), exp.unsigned_abs());
        }
        let w = b.finish(Arc::clone(alpha));
        w.check_cap()?;
        Ok(w)
    }

    fn check_cap(&self) -> Result<(), WordError> {
        if self.len > self.alpha.length_cap {
            return Err(WordError::LengthCap {
                attempted: self.len as u128,
                cap: self.alpha.length_cap,
            });
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alpha
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn iter_letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.runs
            .iter()
            .flat_map(|run| std::iter::repeat(run.letter).take(run.count as usize))
    }

    pub fn first_letter(&self) -> Option<Letter> {
        self.runs.first().map(|r| r.letter)
    }

    pub fn last_letter(&self) -> Option<Letter> {
        self.runs.last().map(|r| r.letter)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.runs
            .windows(2)
            .all(|w| w[0].letter != w[1].letter.inverse())
    }

    /// The unique freely reduced word equal to this one in the free group.
    pub fn free_reduce(&self) -> Word {
        let mut b = RunBuilder::new();
        for run in &self.runs {
            b.push_reduced(run.letter, run.count);
        }
        b.finish(Arc::clone(&self.alpha))
    }

    pub fn invert(&self) -> Word {
        let runs: Vec<Run> = self
            .runs
            .iter()
            .rev()
            .map(|r| Run { letter: r.letter.inverse(), count: r.count })
            .collect();
        Word { alpha: Arc::clone(&self.alpha), runs, len: self.len }
    }

    /// Concatenation, freely reduced at the junction (fully reduced whenever
    /// both inputs are reduced).
    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        if !self.alpha.compatible(&other.alpha) {
            return Err(mismatch(&self.alpha, &other.alpha));
        }
        let attempted = self.len as u128 + other.len as u128;
        if attempted > self.alpha.length_cap as u128 {
            return Err(WordError::LengthCap { attempted, cap: self.alpha.length_cap });
        }
        let mut b = RunBuilder::new();
        for run in &self.runs {
            b.push(run.letter, run.count);
        }
        for run in &other.runs {
            b.push_reduced(run.letter, run.count);
        }
        Ok(b.finish(Arc::clone(&self.alpha)))
    }

    pub fn pow(&self, k: u64) -> Result<Word, WordError> {
        let attempted = self.len as u128 * k as u128;
        if attempted > self.alpha.length_cap as u128 {
            return Err(WordError::LengthCap { attempted, cap: self.alpha.length_cap });
        }
        let mut b = RunBuilder::new();
        for _ in 0..k {
            for run in &self.runs {
                b.push_reduced(run.letter, run.count);
            }
        }
        Ok(b.finish(Arc::clone(&self.alpha)))
    }

    pub fn is_positive(&self) -> bool {
        self.runs.iter().all(|r| r.letter.sign == Sign::Plus)
    }

    /// Occurrence count per generator, ignoring signs.
    pub fn letter_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.alpha.len()];
        for run in &self.runs {
            counts[run.letter.gen.0 as usize] += run.count;
        }
        counts
    }

    /// Signed exponent sum per generator (the abelianization image).
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.alpha.len()];
        for run in &self.runs {
            let delta = run.count as i64;
            match run.letter.sign {
                Sign::Plus => v[run.letter.gen.0 as usize] += delta,
                Sign::Minus => v[run.letter.gen.0 as usize] -= delta,
            }
        }
        v
    }

    /// Apply the homomorphism sending each generator to `images[gen]` and
    /// freely reduce. Inverse letters map to inverted images.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        if images.len() != self.alpha.len() {
            return Err(WordError::MissingImage(format!(
                "{} images for {} generators",
                images.len(),
                self.alpha.len()
            )));
        }
        let target = match images.first() {
            Some(w) => Arc::clone(&w.alpha),
            None => Arc::clone(&self.alpha),
        };
        for img in images {
            if !img.alpha.compatible(&target) {
                return Err(mismatch(&img.alpha, &target));
            }
        }
        let mut attempted: u128 = 0;
        for run in &self.runs {
            attempted += run.count as u128 * images[run.letter.gen.0 as usize].len as u128;
        }
        if attempted > target.length_cap as u128 {
            return Err(WordError::LengthCap { attempted, cap: target.length_cap });
        }
        let mut b = RunBuilder::new();
        for run in &self.runs {
            let img = &images[run.letter.gen.0 as usize];
            match run.letter.sign {
                Sign::Plus => {
                    for _ in 0..run.count {
                        for r in &img.runs {
                            b.push_reduced(r.letter, r.count);
                        }
                    }
                }
                Sign::Minus => {
                    for _ in 0..run.count {
                        for r in img.runs.iter().rev() {
                            b.push_reduced(r.letter.inverse(), r.count);
                        }
                    }
                }
            }
        }
        Ok(b.finish(target))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        if !self.is_freely_reduced() {
            return false;
        }
        match (self.first_letter(), self.last_letter()) {
            (Some(f), Some(l)) => f != l.inverse(),
            _ => true,
        }
    }

    /// Split a freely reduced word as `conjugator * core * conjugator^-1`
    /// with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        debug_assert!(self.is_freely_reduced());
        let mut runs = self.runs.clone();
        let mut conj = RunBuilder::new();
        loop {
            if runs.len() < 2 {
                break;
            }
            let first = runs[0];
            let last = runs[runs.len() - 1];
            if first.letter != last.letter.inverse() {
                break;
            }
            let strip = first.count.min(last.count);
            conj.push(first.letter, strip);
            if first.count == strip {
                runs.remove(0);
            } else {
                runs[0].count -= strip;
            }
            let last_idx = runs.len() - 1;
            if runs[last_idx].count == strip {
                runs.pop();
            } else {
                runs[last_idx].count -= strip;
            }
            if runs.len() == 1 {
                // One run left cannot cancel with itself: its two ends carry
                // the same letter.
                break;
            }
        }
        let len = runs.iter().map(|r| r.count).sum();
        let core = Word { alpha: Arc::clone(&self.alpha), runs, len };
        (core, conj.finish(Arc::clone(&self.alpha)))
    }

    /// Rotate left by `k` letters (indices into the flat letter sequence).
    pub fn rotate(&self, k: u64) -> Word {
        if self.len == 0 {
            return self.clone();
        }
        let k = k % self.len;
        if k == 0 {
            return self.clone();
        }
        let (head, tail) = self.split_at(k);
        let mut b = RunBuilder::new();
        for run in &tail.runs {
            b.push(run.letter, run.count);
        }
        for run in &head.runs {
            b.push(run.letter, run.count);
        }
        b.finish(Arc::clone(&self.alpha))
    }

    /// Split at flat letter index `k` (0 <= k <= len).
    pub fn split_at(&self, k: u64) -> (Word, Word) {
        assert!(k <= self.len);
        let mut head = RunBuilder::new();
        let mut tail = RunBuilder::new();
        let mut seen = 0u64;
        for run in &self.runs {
            if seen >= k {
                tail.push(run.letter, run.count);
            } else if seen + run.count <= k {
                head.push(run.letter, run.count);
            } else {
                let split = k - seen;
                head.push(run.letter, split);
                tail.push(run.letter, run.count - split);
            }
            seen += run.count;
        }
        (
            head.finish(Arc::clone(&self.alpha)),
            tail.finish(Arc::clone(&self.alpha)),
        )
    }

    /// All distinct rotations of a cyclically reduced word, in order of
    /// rotation offset.
    pub fn cyclic_permutations(&self) -> Vec<Word> {
        if self.len == 0 {
            return vec![self.clone()];
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for k in 0..self.len {
            let rot = self.rotate(k);
            if seen.insert(rot.clone()) {
                out.push(rot);
            }
        }
        out
    }

    /// Length of the longest common prefix with `other`, in letters.
    pub fn common_prefix_len(&self, other: &Word) -> u64 {
        let mut total = 0u64;
        let mut i = 0;
        let mut j = 0;
        let mut left: Option<Run> = None;
        let mut right: Option<Run> = None;
        loop {
            let a = match left.take() {
                Some(r) => r,
                None => match self.runs.get(i) {
                    Some(r) => {
                        i += 1;
                        *r
                    }
                    None => return total,
                },
            };
            let b = match right.take() {
                Some(r) => r,
                None => match other.runs.get(j) {
                    Some(r) => {
                        j += 1;
                        *r
                    }
                    None => return total,
                },
            };
            if a.letter != b.letter {
                return total;
            }
            let step = a.count.min(b.count);
            total += step;
            if a.count > step {
                left = Some(Run { letter: a.letter, count: a.count - step });
            }
            if b.count > step {
                right = Some(Run { letter: b.letter, count: b.count - step });
            }
        }
    }

    /// Letter-lexicographic comparison by `Letter::code`, then by length for
    /// proper prefixes.
    pub fn cmp_lex(&self, other: &Word) -> std::cmp::Ordering {
        let common = self.common_prefix_len(other);
        if common == self.len && common == other.len {
            return std::cmp::Ordering::Equal;
        }
        if common == self.len {
            return std::cmp::Ordering::Less;
        }
        if common == other.len {
            return std::cmp::Ordering::Greater;
        }
        let a = self.letter_at(common);
        let b = other.letter_at(common);
        a.code().cmp(&b.code())
    }

    /// Letter at flat index `i` (must be < len).
    pub fn letter_at(&self, i: u64) -> Letter {
        let mut seen = 0u64;
        for run in &self.runs {
            if i < seen + run.count {
                return run.letter;
            }
            seen += run.count;
        }
        panic!("letter index {i} out of range (len {})", self.len);
    }

    /// Re-express this word over another alphabet by generator name. Every
    /// generator occurring in the word must exist in the target alphabet.
    pub fn embed(&self, target: &Arc<Alphabet>) -> Result<Word, WordError> {
        let mut b = RunBuilder::new();
        for run in &self.runs {
            let name = self.alpha.name(run.letter.gen);
            let gen = target
                .generator(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            b.push(Letter::new(gen, run.letter.sign), run.count);
        }
        let w = b.finish(Arc::clone(target));
        w.check_cap()?;
        Ok(w)
    }
}

/// Build a word from letter codes (used by scanners that work on flat
/// buffers). Does not reduce.
pub fn word_from_codes(alpha: &Arc<Alphabet>, codes: &[u32]) -> Word {
    let mut b = RunBuilder::new();
    for &c in codes {
        b.push(Letter::from_code(c), 1);
    }
    b.finish(Arc::clone(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> Arc<Alphabet> {
        Alphabet::new(&["a", "b", "c"]).unwrap()
    }

    fn gcd_alpha() -> Arc<Alphabet> {
        Alphabet::new(&["c1", "c2", "d1", "d2"]).unwrap()
    }

    fn w(alpha: &Arc<Alphabet>, s: &str) -> Word {
        Word::parse(alpha, s).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        let alpha = gcd_alpha();
        for text in ["1", "c1", "c1 c2^3 d1^-2", "d2^5 d2^-5", "c1^2 c1^-1"] {
            let word = w(&alpha, text);
            let printed = word.to_string();
            let reparsed = Word::parse(&alpha, &printed).unwrap();
            assert_eq!(word, reparsed, "round-trip through `{printed}`");
        }
        assert_eq!(w(&alpha, "1").to_string(), "1");
        assert_eq!(w(&alpha, "c1 c2^3 d1^-2").to_string(), "c1 c2^3 d1^-2");
    }

    #[test]
    fn parse_rejects_garbage() {
        let alpha = gcd_alpha();
        assert!(Word::parse(&alpha, "q").is_err());
        assert!(Word::parse(&alpha, "c1^0").is_err());
        assert!(Word::parse(&alpha, "c1^x").is_err());
    }

    #[test]
    fn free_reduce_examples() {
        let alpha = gcd_alpha();
        assert_eq!(w(&alpha, "c1 c1^-1").free_reduce(), w(&alpha, "1"));
        let g = Alphabet::new(&["b", "d1", "d2"]).unwrap();
        assert_eq!(
            w(&g, "b^-1 d1 d1^-1 b d2").free_reduce(),
            w(&g, "d2"),
            "nested cancellation"
        );
    }

    #[test]
    fn cyclic_reduce_examples() {
        let alpha = abc();
        let (core, conj) = w(&alpha, "a b a^-1").cyclic_reduce();
        assert_eq!(core, w(&alpha, "b"));
        assert_eq!(conj, w(&alpha, "a"));

        let (core, conj) = w(&alpha, "a b a b").cyclic_reduce();
        assert_eq!(core, w(&alpha, "a b a b"));
        assert!(conj.is_empty());

        let (core, conj) = w(&alpha, "a^3 b a^-1").cyclic_reduce();
        assert_eq!(core, w(&alpha, "a^2 b"));
        assert_eq!(conj, w(&alpha, "a"));
    }

    #[test]
    fn invert_example() {
        let alpha = abc();
        assert_eq!(w(&alpha, "a b").invert(), w(&alpha, "b^-1 a^-1"));
    }

    #[test]
    fn concat_reduces_and_is_capped() {
        let alpha = abc();
        let u = w(&alpha, "a b");
        let v = w(&alpha, "b^-1 a");
        assert_eq!(u.concat(&v).unwrap(), w(&alpha, "a^2"));

        let small = Alphabet::with_length_cap(&["a"], 10).unwrap();
        let x = Word::parse(&small, "a^6").unwrap();
        assert!(matches!(
            x.concat(&x),
            Err(WordError::LengthCap { attempted: 12, cap: 10 })
        ));
    }

    #[test]
    fn alphabets_do_not_mix() {
        let a1 = abc();
        let a2 = gcd_alpha();
        let u = w(&a1, "a");
        let v = w(&a2, "c1");
        assert!(matches!(u.concat(&v), Err(WordError::AlphabetMismatch(..))));
    }

    #[test]
    fn substitute_single_letter() {
        let alpha = gcd_alpha();
        let images = vec![
            w(&alpha, "c1 c2^2"),
            w(&alpha, "c1 c2^3"),
            w(&alpha, "d1"),
            w(&alpha, "d2"),
        ];
        assert_eq!(
            w(&alpha, "c1").substitute(&images).unwrap(),
            w(&alpha, "c1 c2^2")
        );
        assert_eq!(
            w(&alpha, "c1^-1").substitute(&images).unwrap(),
            w(&alpha, "c2^-2 c1^-1")
        );
    }

    #[test]
    fn cyclic_permutations_examples() {
        let alpha = abc();
        let perms = w(&alpha, "a b a b").cyclic_permutations();
        assert_eq!(perms.len(), 2, "period-2 word has 2 distinct rotations");
        let perms = w(&alpha, "a b c").cyclic_permutations();
        assert_eq!(perms.len(), 3);
        assert!(perms.contains(&w(&alpha, "b c a")));
        assert!(perms.contains(&w(&alpha, "c a b")));
    }

    #[test]
    fn letter_counts_and_exponents() {
        let alpha = gcd_alpha();
        let word = w(&alpha, "d1 d2^2");
        assert_eq!(word.letter_counts(), vec![0, 0, 1, 2]);
        let word = w(&alpha, "c1^-2 d2^3");
        assert_eq!(word.letter_counts(), vec![2, 0, 0, 3]);
        assert_eq!(word.exponent_vector(), vec![-2, 0, 0, 3]);
    }

    #[test]
    fn embed_by_name() {
        let small = Alphabet::new(&["b", "d1", "d2"]).unwrap();
        let big = Alphabet::new(&["a", "b", "c1", "c2", "d1", "d2"]).unwrap();
        let word = w(&small, "b^-1 d1 b");
        let embedded = word.embed(&big).unwrap();
        assert_eq!(embedded.to_string(), "b^-1 d1 b");
        assert_eq!(embedded.letter_counts(), vec![0, 2, 0, 0, 1, 0]);
    }

    // Naive flat-letter reduction, the oracle for the RLE implementation.
    fn naive_reduce(letters: &[Letter]) -> Vec<Letter> {
        let mut stack: Vec<Letter> = Vec::new();
        for &l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        stack
    }

    fn letter_vec_strategy(gens: u16, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(
            (0..gens, prop::bool::ANY).prop_map(|(g, neg)| {
                Letter::new(Generator(g), if neg { Sign::Minus } else { Sign::Plus })
            }),
            0..max_len,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn free_reduce_matches_naive_oracle(letters in letter_vec_strategy(3, 100)) {
            let alpha = abc();
            let word = Word::from_letters(&alpha, letters.iter().copied()).unwrap();
            let reduced = word.free_reduce();
            let expected = naive_reduce(&letters);
            let expected = Word::from_letters(&alpha, expected).unwrap();
            prop_assert_eq!(reduced.clone(), expected);
            // Idempotence and length monotonicity.
            prop_assert_eq!(reduced.free_reduce(), reduced.clone());
            prop_assert!(reduced.len() <= word.len());
            // RLE and flat representations agree on length and counts.
            prop_assert_eq!(word.len() as usize, letters.len());
            prop_assert_eq!(
                word.iter_letters().collect::<Vec<_>>(),
                letters
            );
        }

        #[test]
        fn reduce_of_w_winv_is_empty(letters in letter_vec_strategy(3, 60)) {
            let alpha = abc();
            let word = Word::from_letters(&alpha, letters).unwrap();
            let prod = word.concat(&word.invert()).unwrap();
            prop_assert!(prod.free_reduce().is_empty());
        }

        #[test]
        fn concat_is_associative_up_to_reduction(
            a in letter_vec_strategy(3, 40),
            b in letter_vec_strategy(3, 40),
            c in letter_vec_strategy(3, 40),
        ) {
            let alpha = abc();
            let u = Word::from_letters(&alpha, a).unwrap().free_reduce();
            let v = Word::from_letters(&alpha, b).unwrap().free_reduce();
            let x = Word::from_letters(&alpha, c).unwrap().free_reduce();
            let left = u.concat(&v).unwrap().concat(&x).unwrap();
            let right = u.concat(&v.concat(&x).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn substitute_identity_is_identity(letters in letter_vec_strategy(3, 60)) {
            let alpha = abc();
            let word = Word::from_letters(&alpha, letters).unwrap().free_reduce();
            let identity: Vec<Word> = (0..3)
                .map(|i| Word::letter(&alpha, Letter::positive(Generator(i))))
                .collect();
            prop_assert_eq!(word.substitute(&identity).unwrap(), word);
        }

        #[test]
        fn substitute_is_homomorphism(
            a in letter_vec_strategy(2, 30),
            b in letter_vec_strategy(2, 30),
        ) {
            let two = Alphabet::new(&["c1", "c2"]).unwrap();
            let target = gcd_alpha();
            let images = vec![
                Word::parse(&target, "c1 c2^2").unwrap(),
                Word::parse(&target, "c1 c2^3").unwrap(),
            ];
            let u = Word::from_letters(&two, a).unwrap().free_reduce();
            let v = Word::from_letters(&two, b).unwrap().free_reduce();
            let uv = u.concat(&v).unwrap();
            let lhs = uv.substitute(&images).unwrap();
            let rhs = u
                .substitute(&images)
                .unwrap()
                .concat(&v.substitute(&images).unwrap())
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conjugate_recovers_cyclic_core(
            g in letter_vec_strategy(3, 20),
            core in letter_vec_strategy(3, 20),
        ) {
            let alpha = abc();
            let g = Word::from_letters(&alpha, g).unwrap().free_reduce();
            let word = Word::from_letters(&alpha, core).unwrap().free_reduce();
            let conjugate = g
                .concat(&word)
                .unwrap()
                .concat(&g.invert())
                .unwrap();
            let (conj_core, conjugator) = conjugate.cyclic_reduce();
            let (word_core, _) = word.cyclic_reduce();
            // The core of g w g^-1 is a rotation of the core of w.
            let rotations = word_core.cyclic_permutations();
            prop_assert!(rotations.contains(&conj_core));
            // And the decomposition reassembles to the conjugate.
            let rebuilt = conjugator
                .concat(&conj_core)
                .unwrap()
                .concat(&conjugator.invert())
                .unwrap();
            prop_assert_eq!(rebuilt, conjugate);
        }

        #[test]
        fn cyclic_permutation_count_is_len_over_period(
            letters in letter_vec_strategy(2, 24),
        ) {
            let alpha = abc();
            let word = Word::from_letters(&alpha, letters).unwrap();
            let perms = word.cyclic_permutations();
            // Naive oracle: rotate letter vectors and dedup.
            let flat: Vec<Letter> = word.iter_letters().collect();
            let mut seen = std::collections::HashSet::new();
            for k in 0..flat.len().max(1) {
                let mut rot = flat[k..].to_vec();
                rot.extend_from_slice(&flat[..k]);
                seen.insert(rot);
            }
            prop_assert_eq!(perms.len(), seen.len().max(1));
        }

        #[test]
        fn split_and_rotate_are_consistent(
            letters in letter_vec_strategy(3, 40),
            k in 0u64..40,
        ) {
            let alpha = abc();
            let word = Word::from_letters(&alpha, letters).unwrap().free_reduce();
            if word.len() > 0 {
                let k = k % word.len();
                let (head, tail) = word.split_at(k);
                let mut letters: Vec<Letter> = tail.iter_letters().collect();
                letters.extend(head.iter_letters());
                let expected = Word::from_letters(&alpha, letters).unwrap();
                prop_assert_eq!(word.rotate(k), expected);
                let glued = head.concat(&tail).unwrap();
                prop_assert_eq!(glued, word);
            }
        }
    }
}

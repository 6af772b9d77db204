//! The parameterized word families and the presentations built from them.
//!
//! The group `G` is presented on `a, b, c1, c2, d1, d2` by nine relations
//! conjugating generators into positive words with staircase exponent
//! patterns: `C` and `C_i` on the c-side, `D_j` and `D_ij` on the d-side. The
//! exponent blocks of the different families occupy pairwise disjoint
//! intervals, which is what drives the small-cancellation estimates. The
//! subgroups `G_bcd`, `G_cd`, `G_c1d` are presented by the obvious relator
//! subsets.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::words::{Alphabet, Word, WordError};

#[derive(Debug, Error)]
pub enum RipsError {
    #[error("r must be >= 1 (got {0})")]
    BadR(u32),
    #[error("l must be >= 2 so exponent ranges stay disjoint (got {0})")]
    BadL(u32),
    #[error("index {0} out of range (must be 1 or 2)")]
    BadIndex(u32),
    #[error("relator reduces to the empty word")]
    EmptyRelator,
    #[error("malformed presentation file near `{0}`")]
    BadFile(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Scale parameters: `r` is the small-cancellation scale, `l` spreads the
/// `D_ij` exponent base `r(il + j)` away from the `D_j` base `rj`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RipsParams {
    pub r: u32,
    pub l: u32,
}

impl RipsParams {
    pub fn new(r: u32, l: u32) -> Result<RipsParams, RipsError> {
        if r < 1 {
            return Err(RipsError::BadR(r));
        }
        if l < 2 {
            return Err(RipsError::BadL(l));
        }
        Ok(RipsParams { r, l })
    }

    /// Default `l = 2`: the least value keeping every `D_j`/`D_ij` exponent
    /// interval disjoint.
    pub fn with_r(r: u32) -> Result<RipsParams, RipsError> {
        RipsParams::new(r, 2)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GroupKind {
    G,
    Gbcd,
    Gcd,
    Gc1d,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::G => "G",
            GroupKind::Gbcd => "Gbcd",
            GroupKind::Gcd => "Gcd",
            GroupKind::Gc1d => "Gc1d",
        }
    }

    pub fn parse(s: &str) -> Option<GroupKind> {
        match s {
            "G" => Some(GroupKind::G),
            "Gbcd" => Some(GroupKind::Gbcd),
            "Gcd" => Some(GroupKind::Gcd),
            "Gc1d" => Some(GroupKind::Gc1d),
            _ => None,
        }
    }
}

/// Generators plus relators, each stored as a single freely and cyclically
/// reduced word `LHS * RHS^-1`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub alphabet: Arc<Alphabet>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Arc<Alphabet>, relators: Vec<Word>) -> Result<Presentation, RipsError> {
        let mut reduced = Vec::with_capacity(relators.len());
        for rel in relators {
            let (core, _) = rel.free_reduce().cyclic_reduce();
            if core.is_empty() {
                return Err(RipsError::EmptyRelator);
            }
            reduced.push(core);
        }
        Ok(Presentation { alphabet, relators: reduced })
    }

    /// File format: `gens: a b c1 ...` then one `rel: <word literal>` line
    /// per relator.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "gens: {}", self.alphabet.names().join(" "));
        for rel in &self.relators {
            let _ = writeln!(out, "rel: {rel}");
        }
        out
    }

    pub fn parse_file(text: &str) -> Result<Presentation, RipsError> {
        let mut alphabet: Option<Arc<Alphabet>> = None;
        let mut relators = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                let names: Vec<&str> = rest.split_whitespace().collect();
                alphabet = Some(Alphabet::new(&names)?);
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let alpha = alphabet
                    .as_ref()
                    .ok_or_else(|| RipsError::BadFile("rel before gens".into()))?;
                relators.push(Word::parse(alpha, rest)?);
            } else {
                return Err(RipsError::BadFile(line.to_string()));
            }
        }
        let alphabet = alphabet.ok_or_else(|| RipsError::BadFile("missing gens line".into()))?;
        Presentation::new(alphabet, relators)
    }
}

pub fn g_alphabet() -> Arc<Alphabet> {
    Alphabet::new(&["a", "b", "c1", "c2", "d1", "d2"]).expect("fixed alphabet")
}

pub fn gbcd_alphabet() -> Arc<Alphabet> {
    Alphabet::new(&["b", "c1", "c2", "d1", "d2"]).expect("fixed alphabet")
}

pub fn gcd_alphabet() -> Arc<Alphabet> {
    Alphabet::new(&["c1", "c2", "d1", "d2"]).expect("fixed alphabet")
}

pub fn gc1d_alphabet() -> Arc<Alphabet> {
    Alphabet::new(&["c1", "d1", "d2"]).expect("fixed alphabet")
}

pub fn alphabet_for(kind: GroupKind) -> Arc<Alphabet> {
    match kind {
        GroupKind::G => g_alphabet(),
        GroupKind::Gbcd => gbcd_alphabet(),
        GroupKind::Gcd => gcd_alphabet(),
        GroupKind::Gc1d => gc1d_alphabet(),
    }
}

/// The staircase word `x1 xb^(base+1) x1 xb^(base+2) ... x1 xb^(base+r)` over
/// the named pair of generators.
fn staircase(
    alpha: &Arc<Alphabet>,
    unit: &str,
    block: &str,
    base: u64,
    r: u32,
) -> Result<Word, RipsError> {
    let unit = alpha
        .generator(unit)
        .ok_or_else(|| WordError::UnknownGenerator(unit.to_string()))?;
    let block = alpha
        .generator(block)
        .ok_or_else(|| WordError::UnknownGenerator(block.to_string()))?;
    let mut runs = Vec::with_capacity(2 * r as usize);
    for k in 1..=r as u64 {
        runs.push((crate::words::Letter::positive(unit), 1));
        runs.push((crate::words::Letter::positive(block), base + k));
    }
    Ok(Word::from_runs(alpha, runs)?)
}

/// `C = c1 c2 c1 c2^2 ... c1 c2^r`.
pub fn word_c(alpha: &Arc<Alphabet>, params: RipsParams) -> Result<Word, RipsError> {
    staircase(alpha, "c1", "c2", 0, params.r)
}

/// `C_i = c1 c2^(ri+1) ... c1 c2^(ri+r)`.
pub fn word_ci(alpha: &Arc<Alphabet>, params: RipsParams, i: u32) -> Result<Word, RipsError> {
    if !(1..=2).contains(&i) {
        return Err(RipsError::BadIndex(i));
    }
    staircase(alpha, "c1", "c2", params.r as u64 * i as u64, params.r)
}

/// `D_j = d1 d2^(rj+1) ... d1 d2^(rj+r)`.
pub fn word_dj(alpha: &Arc<Alphabet>, params: RipsParams, j: u32) -> Result<Word, RipsError> {
    if !(1..=2).contains(&j) {
        return Err(RipsError::BadIndex(j));
    }
    staircase(alpha, "d1", "d2", params.r as u64 * j as u64, params.r)
}

/// `D_ij = d1 d2^(r(il+j)+1) ... d1 d2^(r(il+j)+r)`.
pub fn word_dij(
    alpha: &Arc<Alphabet>,
    params: RipsParams,
    i: u32,
    j: u32,
) -> Result<Word, RipsError> {
    if !(1..=2).contains(&i) {
        return Err(RipsError::BadIndex(i));
    }
    if !(1..=2).contains(&j) {
        return Err(RipsError::BadIndex(j));
    }
    let base = params.r as u64 * (i as u64 * params.l as u64 + j as u64);
    staircase(alpha, "d1", "d2", base, params.r)
}

fn conjugation_relator(
    alpha: &Arc<Alphabet>,
    conjugator: &str,
    target: &str,
    rhs: &Word,
) -> Result<Word, RipsError> {
    // conjugator^-1 target conjugator rhs^-1
    let conj = Word::parse(alpha, conjugator)?;
    let target = Word::parse(alpha, target)?;
    let word = conj
        .invert()
        .concat(&target)?
        .concat(&conj)?
        .concat(&rhs.invert())?;
    Ok(word)
}

/// The nine-relator presentation of `G` over `a, b, c1, c2, d1, d2`.
pub fn presentation_g(params: RipsParams) -> Result<Presentation, RipsError> {
    let alpha = g_alphabet();
    let c = word_c(&alpha, params)?;
    let mut relators = Vec::with_capacity(9);
    // a^-1 b^-1 a b = C, i.e. [a, b] = C with the commutator convention
    // written exactly as displayed.
    let ab_comm = Word::parse(&alpha, "a^-1 b^-1 a b")?.concat(&c.invert())?;
    relators.push(ab_comm);
    for i in 1..=2 {
        let ci = word_ci(&alpha, params, i)?;
        relators.push(conjugation_relator(&alpha, "b", &format!("c{i}"), &ci)?);
    }
    for j in 1..=2 {
        let dj = word_dj(&alpha, params, j)?;
        relators.push(conjugation_relator(&alpha, "a b", &format!("d{j}"), &dj)?);
    }
    for i in 1..=2 {
        for j in 1..=2 {
            let dij = word_dij(&alpha, params, i, j)?;
            relators.push(conjugation_relator(
                &alpha,
                &format!("c{i}"),
                &format!("d{j}"),
                &dij,
            )?);
        }
    }
    Presentation::new(alpha, relators)
}

/// `G_bcd = < c1, c2, d1, d2, b | b^-1 c_i b = C_i, c_i^-1 d_j c_i = D_ij >`.
pub fn presentation_gbcd(params: RipsParams) -> Result<Presentation, RipsError> {
    let alpha = gbcd_alphabet();
    let mut relators = Vec::with_capacity(6);
    for i in 1..=2 {
        let ci = word_ci(&alpha, params, i)?;
        relators.push(conjugation_relator(&alpha, "b", &format!("c{i}"), &ci)?);
    }
    for i in 1..=2 {
        for j in 1..=2 {
            let dij = word_dij(&alpha, params, i, j)?;
            relators.push(conjugation_relator(
                &alpha,
                &format!("c{i}"),
                &format!("d{j}"),
                &dij,
            )?);
        }
    }
    Presentation::new(alpha, relators)
}

/// `G_cd = < c1, c2, d1, d2 | c_i^-1 d_j c_i = D_ij >`.
pub fn presentation_gcd(params: RipsParams) -> Result<Presentation, RipsError> {
    let alpha = gcd_alphabet();
    let mut relators = Vec::with_capacity(4);
    for i in 1..=2 {
        for j in 1..=2 {
            let dij = word_dij(&alpha, params, i, j)?;
            relators.push(conjugation_relator(
                &alpha,
                &format!("c{i}"),
                &format!("d{j}"),
                &dij,
            )?);
        }
    }
    Presentation::new(alpha, relators)
}

/// `G_c1d = < c1, d1, d2 | c1^-1 d_j c1 = D_1j >`.
pub fn presentation_gc1d(params: RipsParams) -> Result<Presentation, RipsError> {
    let alpha = gc1d_alphabet();
    let mut relators = Vec::with_capacity(2);
    for j in 1..=2 {
        let d1j = word_dij(&alpha, params, 1, j)?;
        relators.push(conjugation_relator(&alpha, "c1", &format!("d{j}"), &d1j)?);
    }
    Presentation::new(alpha, relators)
}

pub fn presentation(kind: GroupKind, params: RipsParams) -> Result<Presentation, RipsError> {
    match kind {
        GroupKind::G => presentation_g(params),
        GroupKind::Gbcd => presentation_gbcd(params),
        GroupKind::Gcd => presentation_gcd(params),
        GroupKind::Gc1d => presentation_gc1d(params),
    }
}

/// The `d2` (resp. `c2`) exponent interval `[base+1, base+r]` of each family
/// word, used to check the disjointness invariant.
pub fn exponent_intervals(params: RipsParams) -> Vec<(String, u64, u64)> {
    let r = params.r as u64;
    let l = params.l as u64;
    let mut out = vec![("C".to_string(), 1, r)];
    for i in 1..=2u64 {
        out.push((format!("C{i}"), r * i + 1, r * i + r));
    }
    for j in 1..=2u64 {
        out.push((format!("D{j}"), r * j + 1, r * j + r));
    }
    for i in 1..=2u64 {
        for j in 1..=2u64 {
            out.push((format!("D{i}{j}"), r * (i * l + j) + 1, r * (i * l + j) + r));
        }
    }
    out
}

//! Multi-pattern index over the symmetrized relator set.
//!
//! A subword of `w` is a prefix of some element of the symmetrized set `S`
//! exactly when it is a factor of length at most `|rho|` of the doubled word
//! `rho rho` for one of the cyclic relator representatives `rho` (the base
//! relators and their inverses). The index is a generalized suffix automaton
//! over all doubled representatives, with per-state bookkeeping of which
//! representatives contain each factor. Scanning a word left to right then
//! yields, at every end position, the longest suffix that is a relator
//! prefix, in amortized constant time per letter.

use crate::words::Word;

const NO_STATE: i32 = -1;

#[derive(Clone)]
struct State {
    len: u32,
    link: i32,
    trans: Vec<(u32, u32)>,
    /// Which cyclic representatives contain this factor.
    mask: u64,
    /// Minimal match length `m` at this state that qualifies as a Dehn
    /// rewrite (more than half of some relator), `u32::MAX` if none.
    fire_from: u32,
    /// Deepest proper suffix-link ancestor with a qualifying window.
    fire_anc: i32,
}

impl State {
    fn new(len: u32) -> State {
        State {
            len,
            link: NO_STATE,
            trans: Vec::new(),
            mask: 0,
            fire_from: u32::MAX,
            fire_anc: NO_STATE,
        }
    }

    fn get(&self, code: u32) -> Option<u32> {
        self.trans
            .iter()
            .find(|&&(c, _)| c == code)
            .map(|&(_, s)| s)
    }

    fn set(&mut self, code: u32, state: u32) {
        for entry in self.trans.iter_mut() {
            if entry.0 == code {
                entry.1 = state;
                return;
            }
        }
        self.trans.push((code, state));
    }
}

/// One cyclic representative: a base relator or the inverse of one.
pub struct CyclicRelator {
    pub word: Word,
    pub len: u64,
    codes_doubled: Vec<u32>,
}

pub struct FactorIndex {
    states: Vec<State>,
    relators: Vec<CyclicRelator>,
    max_rel_len: u64,
}

/// A qualifying Dehn match: `len` trailing letters at the scan position form
/// a cyclic-word prefix covering more than half of relator `rel`.
#[derive(Copy, Clone, Debug)]
pub struct Fire {
    pub len: u64,
    pub rel: usize,
}

/// Scanner state while feeding letters.
#[derive(Copy, Clone)]
pub struct Cursor {
    state: u32,
    pub matched: u64,
}

impl FactorIndex {
    pub fn build(base_relators: &[Word]) -> FactorIndex {
        let mut relators = Vec::with_capacity(base_relators.len() * 2);
        for rel in base_relators {
            for word in [rel.clone(), rel.invert()] {
                let codes: Vec<u32> = word.iter_letters().map(|l| l.code()).collect();
                let mut codes_doubled = codes.clone();
                codes_doubled.extend_from_slice(&codes);
                relators.push(CyclicRelator { len: word.len(), word, codes_doubled });
            }
        }
        assert!(relators.len() <= 64, "factor index supports at most 32 relators");

        let mut index = FactorIndex {
            states: vec![State::new(0)],
            max_rel_len: relators.iter().map(|r| r.len).max().unwrap_or(0),
            relators,
        };
        index.build_automaton();
        index.annotate();
        index
    }

    fn build_automaton(&mut self) {
        // Separator codes sit above all letter codes, one per string, so no
        // factor can span two representatives.
        let sep_base = self
            .relators
            .iter()
            .flat_map(|r| r.codes_doubled.iter())
            .max()
            .map_or(0, |&c| c + 1);
        let mut last = 0u32;
        for t in 0..self.relators.len() {
            for i in 0..self.relators[t].codes_doubled.len() {
                let code = self.relators[t].codes_doubled[i];
                last = self.extend(last, code);
                self.states[last as usize].mask |= 1 << t;
            }
            last = self.extend(last, sep_base + t as u32);
        }
        // Propagate containment masks up the suffix-link tree.
        let mut order: Vec<u32> = (1..self.states.len() as u32).collect();
        order.sort_by_key(|&s| std::cmp::Reverse(self.states[s as usize].len));
        for s in order {
            let link = self.states[s as usize].link;
            if link > 0 {
                let mask = self.states[s as usize].mask;
                self.states[link as usize].mask |= mask;
            }
        }
    }

    fn extend(&mut self, last: u32, code: u32) -> u32 {
        let cur = self.states.len() as u32;
        let cur_len = self.states[last as usize].len + 1;
        self.states.push(State::new(cur_len));
        let mut p = last as i32;
        while p != NO_STATE && self.states[p as usize].get(code).is_none() {
            self.states[p as usize].set(code, cur);
            p = self.states[p as usize].link;
        }
        if p == NO_STATE {
            self.states[cur as usize].link = 0;
            return cur;
        }
        let q = self.states[p as usize].get(code).unwrap();
        if self.states[q as usize].len == self.states[p as usize].len + 1 {
            self.states[cur as usize].link = q as i32;
            return cur;
        }
        let clone = self.states.len() as u32;
        let mut cloned = self.states[q as usize].clone();
        cloned.len = self.states[p as usize].len + 1;
        cloned.mask = 0;
        self.states.push(cloned);
        self.states[q as usize].link = clone as i32;
        self.states[cur as usize].link = clone as i32;
        let mut p = p;
        while p != NO_STATE && self.states[p as usize].get(code) == Some(q) {
            self.states[p as usize].set(code, clone);
            p = self.states[p as usize].link;
        }
        cur
    }

    /// Precompute, per state, the smallest qualifying match length and the
    /// deepest firing ancestor.
    fn annotate(&mut self) {
        for s in 0..self.states.len() {
            let lo = self.interval_lo(s as u32);
            let hi = self.states[s].len as u64;
            let mut best = u32::MAX;
            let mut mask = self.states[s].mask;
            while mask != 0 {
                let t = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                let rlen = self.relators[t].len;
                let fire_lo = rlen / 2 + 1; // strictly more than half
                let window_lo = fire_lo.max(lo);
                let window_hi = hi.min(rlen);
                if window_lo <= window_hi {
                    best = best.min(window_lo as u32);
                }
            }
            self.states[s].fire_from = best;
        }
        let mut order: Vec<u32> = (1..self.states.len() as u32).collect();
        order.sort_by_key(|&s| self.states[s as usize].len);
        for s in order {
            let link = self.states[s as usize].link;
            if link >= 0 {
                let anc = if self.states[link as usize].fire_from != u32::MAX {
                    link
                } else {
                    self.states[link as usize].fire_anc
                };
                self.states[s as usize].fire_anc = anc;
            }
        }
    }

    fn interval_lo(&self, s: u32) -> u64 {
        let link = self.states[s as usize].link;
        if link < 0 {
            1
        } else {
            self.states[link as usize].len as u64 + 1
        }
    }

    pub fn relators(&self) -> &[CyclicRelator] {
        &self.relators
    }

    pub fn max_rel_len(&self) -> u64 {
        self.max_rel_len
    }

    pub fn cursor(&self) -> Cursor {
        Cursor { state: 0, matched: 0 }
    }

    /// Advance the cursor by one letter; afterwards `matched` is the length
    /// of the longest suffix of the text read so far that is a factor of
    /// some doubled representative.
    pub fn advance(&self, cursor: Cursor, code: u32) -> Cursor {
        let mut state = cursor.state as i32;
        if let Some(next) = self.states[state as usize].get(code) {
            return Cursor { state: next, matched: cursor.matched + 1 };
        }
        while state != NO_STATE && self.states[state as usize].get(code).is_none() {
            state = self.states[state as usize].link;
        }
        if state == NO_STATE {
            return Cursor { state: 0, matched: 0 };
        }
        let matched = self.states[state as usize].len as u64 + 1;
        let next = self.states[state as usize].get(code).unwrap();
        Cursor { state: next, matched }
    }

    /// The longest qualifying Dehn match ending at the cursor, if any. Among
    /// equal lengths the shortest relator wins, then the lowest index.
    pub fn check_fire(&self, cursor: Cursor) -> Option<Fire> {
        let state = cursor.state as usize;
        let fire_state;
        let m_eff;
        if (self.states[state].fire_from as u64) <= cursor.matched {
            fire_state = state;
            m_eff = cursor.matched;
        } else {
            let anc = self.states[state].fire_anc;
            if anc < 0 {
                return None;
            }
            fire_state = anc as usize;
            m_eff = self.states[fire_state].len as u64;
        }
        let lo = self.interval_lo(fire_state as u32);
        let mut best: Option<Fire> = None;
        let mut mask = self.states[fire_state].mask;
        while mask != 0 {
            let t = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let rlen = self.relators[t].len;
            let fire_lo = (rlen / 2 + 1).max(lo);
            let j = m_eff.min(rlen);
            if j < fire_lo {
                continue;
            }
            let cand = Fire { len: j, rel: t };
            best = Some(match best {
                None => cand,
                Some(b) => {
                    if cand.len > b.len
                        || (cand.len == b.len && rlen < self.relators[b.rel].len)
                    {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
        best
    }

    /// All (length, relator) pairs for suffix factors at the cursor: for
    /// each relator containing some suffix, the longest such suffix capped
    /// to the relator length. Walks the suffix-link chain; use for
    /// diagnostics, not the hot rewrite loop.
    pub fn suffix_matches(&self, cursor: Cursor, mut visit: impl FnMut(u64, usize)) {
        let mut state = cursor.state as i32;
        let mut m = cursor.matched;
        let mut seen = 0u64;
        while state > 0 && m > 0 {
            let s = state as usize;
            let hi = m.min(self.states[s].len as u64);
            let mut mask = self.states[s].mask & !seen;
            while mask != 0 {
                let t = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                let j = hi.min(self.relators[t].len);
                if j >= 1 {
                    visit(j, t);
                }
            }
            // Deeper states already reported a longer (hence no worse)
            // match for these relators.
            seen |= self.states[s].mask;
            state = self.states[s].link;
            if state >= 0 {
                m = self.states[state as usize].len as u64;
            }
        }
    }

    /// Locate `alpha` (a known cyclic factor of relator `rel`) and return
    /// the rotated relator `alpha * beta` together with `beta`.
    pub fn split_relator(&self, rel: usize, alpha_codes: &[u32]) -> (Word, Word) {
        let info = &self.relators[rel];
        let text = &info.codes_doubled;
        let offset = find_sub(text, alpha_codes)
            .expect("qualifying match must occur in its relator");
        let offset = (offset as u64) % info.len;
        let rotated = info.word.rotate(offset);
        let (alpha, beta) = rotated.split_at(alpha_codes.len() as u64);
        debug_assert_eq!(
            alpha.iter_letters().map(|l| l.code()).collect::<Vec<_>>(),
            alpha_codes
        );
        (rotated, beta)
    }
}

/// First occurrence of `pat` in `text` (Knuth-Morris-Pratt).
fn find_sub(text: &[u32], pat: &[u32]) -> Option<usize> {
    if pat.is_empty() {
        return Some(0);
    }
    let mut fail = vec![0usize; pat.len()];
    let mut k = 0;
    for i in 1..pat.len() {
        while k > 0 && pat[i] != pat[k] {
            k = fail[k - 1];
        }
        if pat[i] == pat[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let mut k = 0;
    for (i, &c) in text.iter().enumerate() {
        while k > 0 && c != pat[k] {
            k = fail[k - 1];
        }
        if c == pat[k] {
            k += 1;
        }
        if k == pat.len() {
            return Some(i + 1 - k);
        }
    }
    None
}

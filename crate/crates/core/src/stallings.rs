//! Folded subgroup graphs for free groups, with membership and basis
//! rewriting, plus the Nielsen free-basis conditions.
//!
//! The graph is built as a bouquet of loops at the basepoint and folded until
//! no vertex carries two equally labeled edges in the same direction. Every
//! edge carries an output word over fresh expression letters `e1..ek`; folds
//! keep the invariant that reading a basepoint loop and multiplying edge
//! outputs yields a preimage of the loop word under `e_i -> basis[i]`. When
//! two parallel edges merge, the identification is performed after a gauge
//! adjustment at the merged vertex, so the invariant survives and
//! `express_in_basis` is a plain graph walk.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::smallcancel::{self, Fraction};
use crate::words::{Alphabet, Generator, Letter, Word, WordError};

#[derive(Debug, Error)]
pub enum StallingsError {
    #[error("word is not a member of the subgroup")]
    NotMember,
    #[error(transparent)]
    Word(#[from] WordError),
}

struct BuildEdge {
    tail: u32,
    head: u32,
    gen: u16,
    output: Word,
    alive: bool,
}

struct Builder {
    expr_alpha: Arc<Alphabet>,
    edges: Vec<BuildEdge>,
    out_adj: Vec<HashMap<u16, Vec<u32>>>,
    in_adj: Vec<HashMap<u16, Vec<u32>>>,
    alive: Vec<bool>,
    queue: VecDeque<u32>,
}

const BASE: u32 = 0;

impl Builder {
    fn new_vertex(&mut self) -> u32 {
        self.out_adj.push(HashMap::new());
        self.in_adj.push(HashMap::new());
        self.alive.push(true);
        (self.alive.len() - 1) as u32
    }

    fn add_edge(&mut self, tail: u32, head: u32, gen: u16, output: Word) {
        let id = self.edges.len() as u32;
        self.edges.push(BuildEdge { tail, head, gen, output, alive: true });
        self.out_adj[tail as usize].entry(gen).or_default().push(id);
        self.in_adj[head as usize].entry(gen).or_default().push(id);
    }

    fn remove_edge(&mut self, id: u32) {
        let edge = &self.edges[id as usize];
        let (tail, head, gen) = (edge.tail, edge.head, edge.gen);
        for (adj, v) in [(&mut self.out_adj, tail), (&mut self.in_adj, head)] {
            if let Some(ids) = adj[v as usize].get_mut(&gen) {
                ids.retain(|&e| e != id);
            }
        }
        self.edges[id as usize].alive = false;
    }

    /// Apply a gauge element at `v`: incoming outputs pick up `alpha` on the
    /// right, outgoing outputs `alpha^-1` on the left. Loop outputs through
    /// `v` are unchanged, so the rewriting invariant is preserved.
    fn gauge(&mut self, v: u32, alpha: &Word) {
        let mut ids: Vec<u32> = Vec::new();
        for map in [&self.out_adj[v as usize], &self.in_adj[v as usize]] {
            for list in map.values() {
                ids.extend_from_slice(list);
            }
        }
        ids.sort_unstable();
        ids.dedup();
        let alpha_inv = alpha.invert();
        for id in ids {
            let edge = &mut self.edges[id as usize];
            let mut output = edge.output.clone();
            if edge.head == v {
                output = output.concat(alpha).expect("expression words stay small");
            }
            if edge.tail == v {
                output = alpha_inv.concat(&output).expect("expression words stay small");
            }
            edge.output = output;
        }
    }

    /// Merge vertex `drop` into `keep`, rewriting edge endpoints.
    fn merge(&mut self, keep: u32, drop: u32) {
        debug_assert_ne!(keep, drop);
        let out_map = std::mem::take(&mut self.out_adj[drop as usize]);
        for (gen, ids) in out_map {
            for &id in &ids {
                self.edges[id as usize].tail = keep;
            }
            self.out_adj[keep as usize].entry(gen).or_default().extend(ids);
        }
        let in_map = std::mem::take(&mut self.in_adj[drop as usize]);
        for (gen, ids) in in_map {
            for &id in &ids {
                self.edges[id as usize].head = keep;
            }
            self.in_adj[keep as usize].entry(gen).or_default().extend(ids);
        }
        self.alive[drop as usize] = false;
        self.queue.push_back(keep);
    }

    /// Fold one duplicate pair at `v` if any; report whether a fold happened.
    fn fold_step(&mut self, v: u32) -> bool {
        for outgoing in [true, false] {
            let adj = if outgoing { &self.out_adj } else { &self.in_adj };
            let mut pick: Option<(u32, u32)> = None;
            for ids in adj[v as usize].values() {
                if ids.len() >= 2 {
                    pick = Some((ids[0], ids[1]));
                    break;
                }
            }
            let Some((e1, e2)) = pick else { continue };
            let (far1, far2) = if outgoing {
                (self.edges[e1 as usize].head, self.edges[e2 as usize].head)
            } else {
                (self.edges[e1 as usize].tail, self.edges[e2 as usize].tail)
            };
            let o1 = self.edges[e1 as usize].output.clone();
            let o2 = self.edges[e2 as usize].output.clone();
            if far1 == far2 {
                // Parallel duplicates: either output is a valid preimage of
                // the same group element, keep the first.
                self.remove_edge(e2);
                self.queue.push_back(v);
                return true;
            }
            // Identify e2 with e1 after gauging one endpoint so the outputs
            // agree; never gauge the basepoint.
            if far2 != BASE {
                let alpha = if outgoing {
                    o2.invert().concat(&o1).expect("small")
                } else {
                    o2.concat(&o1.invert()).expect("small")
                };
                self.gauge(far2, &alpha);
                self.remove_edge(e2);
                self.merge(far1, far2);
            } else {
                let alpha = if outgoing {
                    o1.invert().concat(&o2).expect("small")
                } else {
                    o1.concat(&o2.invert()).expect("small")
                };
                self.gauge(far1, &alpha);
                self.remove_edge(e1);
                self.merge(far2, far1);
            }
            return true;
        }
        false
    }

    fn fold_all(&mut self) {
        while let Some(v) = self.queue.pop_front() {
            if !self.alive[v as usize] {
                continue;
            }
            while self.fold_step(v) {
                if !self.alive[v as usize] {
                    break;
                }
            }
        }
    }

    fn degree(&self, v: u32) -> usize {
        let mut deg = 0;
        for map in [&self.out_adj[v as usize], &self.in_adj[v as usize]] {
            for ids in map.values() {
                deg += ids.len();
            }
        }
        deg
    }

    /// Remove non-basepoint vertices of degree at most one.
    fn prune_hairs(&mut self) {
        let mut queue: VecDeque<u32> = (0..self.alive.len() as u32)
            .filter(|&v| v != BASE && self.alive[v as usize])
            .collect();
        while let Some(v) = queue.pop_front() {
            if v == BASE || !self.alive[v as usize] || self.degree(v) > 1 {
                continue;
            }
            let mut incident: Vec<u32> = Vec::new();
            for map in [&self.out_adj[v as usize], &self.in_adj[v as usize]] {
                for ids in map.values() {
                    incident.extend_from_slice(ids);
                }
            }
            for id in incident {
                let edge = &self.edges[id as usize];
                let other = if edge.tail == v { edge.head } else { edge.tail };
                self.remove_edge(id);
                queue.push_back(other);
            }
            self.alive[v as usize] = false;
        }
    }
}

/// A folded basepointed core graph of a subgroup of a free group.
pub struct SubgroupGraph {
    alphabet: Arc<Alphabet>,
    expr_alphabet: Arc<Alphabet>,
    basis: Vec<Word>,
    /// `out[v][gen]` is the head of the unique outgoing `gen`-edge, with its
    /// edge id; `inc` the tail of the incoming one.
    out: Vec<Vec<Option<(u32, u32)>>>,
    inc: Vec<Vec<Option<(u32, u32)>>>,
    outputs: Vec<Word>,
    /// Parent edge id in the breadth-first spanning tree, per vertex.
    tree_parent: Vec<Option<u32>>,
    edge_count: usize,
}

/// Fold the basepoint loops spelled by `basis`; empty or trivial basis words
/// contribute nothing.
pub fn build_subgroup_graph(
    alpha: &Arc<Alphabet>,
    basis: &[Word],
) -> Result<SubgroupGraph, StallingsError> {
    let expr_names: Vec<String> = (1..=basis.len()).map(|i| format!("e{i}")).collect();
    let expr_alpha = Alphabet::new(&expr_names)?;
    let mut b = Builder {
        expr_alpha: Arc::clone(&expr_alpha),
        edges: Vec::new(),
        out_adj: Vec::new(),
        in_adj: Vec::new(),
        alive: Vec::new(),
        queue: VecDeque::new(),
    };
    b.new_vertex(); // basepoint
    for (i, word) in basis.iter().enumerate() {
        if !word.alphabet().same(alpha) {
            return Err(WordError::AlphabetMismatch(
                word.alphabet().names().join(" "),
                alpha.names().join(" "),
            )
            .into());
        }
        let word = word.free_reduce();
        if word.is_empty() {
            continue;
        }
        let expr = Word::letter(&expr_alpha, Letter::positive(Generator(i as u16)));
        let letters: Vec<Letter> = word.iter_letters().collect();
        let mut prev = BASE;
        for (k, letter) in letters.iter().enumerate() {
            let next = if k + 1 == letters.len() { BASE } else { b.new_vertex() };
            let output = if k == 0 {
                match letter.sign {
                    crate::words::Sign::Plus => expr.clone(),
                    crate::words::Sign::Minus => expr.invert(),
                }
            } else {
                Word::empty(&expr_alpha)
            };
            match letter.sign {
                crate::words::Sign::Plus => b.add_edge(prev, next, letter.gen.0, output),
                crate::words::Sign::Minus => b.add_edge(next, prev, letter.gen.0, output),
            }
            prev = next;
        }
        b.queue.push_back(BASE);
        b.fold_all();
    }
    b.queue.push_back(BASE);
    b.fold_all();
    b.prune_hairs();

    // Compact with a breadth-first renumbering from the basepoint, exploring
    // labels in order and outgoing before incoming. The numbering is
    // canonical for the folded graph, so equal subgroups built from
    // different generator lists compact to identical tables.
    let gens = alpha.len();
    let mut number: HashMap<u32, u32> = HashMap::new();
    let mut order: Vec<u32> = Vec::new();
    number.insert(BASE, 0);
    order.push(BASE);
    let mut tree_parent_raw: Vec<Option<u32>> = vec![None];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for gen in 0..gens as u16 {
            for (outgoing, map) in [(true, &b.out_adj), (false, &b.in_adj)] {
                if let Some(ids) = map[v as usize].get(&gen) {
                    for &id in ids {
                        let edge = &b.edges[id as usize];
                        let far = if outgoing { edge.head } else { edge.tail };
                        if !number.contains_key(&far) {
                            number.insert(far, order.len() as u32);
                            order.push(far);
                            tree_parent_raw.push(Some(id));
                        }
                    }
                }
            }
        }
    }

    let mut edge_number: HashMap<u32, u32> = HashMap::new();
    let mut outputs: Vec<Word> = Vec::new();
    let mut out = vec![vec![None; gens]; order.len()];
    let mut inc = vec![vec![None; gens]; order.len()];
    for (new_v, &old_v) in order.iter().enumerate() {
        for gen in 0..gens as u16 {
            if let Some(ids) = b.out_adj[old_v as usize].get(&gen) {
                debug_assert!(ids.len() <= 1, "folded graph");
                if let Some(&id) = ids.first() {
                    let eid = *edge_number.entry(id).or_insert_with(|| {
                        outputs.push(b.edges[id as usize].output.clone());
                        (outputs.len() - 1) as u32
                    });
                    let head = number[&b.edges[id as usize].head];
                    out[new_v][gen as usize] = Some((head, eid));
                    inc[head as usize][gen as usize] = Some((new_v as u32, eid));
                }
            }
        }
    }
    let tree_parent: Vec<Option<u32>> = tree_parent_raw
        .iter()
        .map(|p| p.map(|id| edge_number[&id]))
        .collect();

    Ok(SubgroupGraph {
        alphabet: Arc::clone(alpha),
        expr_alphabet: expr_alpha,
        basis: basis.to_vec(),
        out,
        inc,
        edge_count: outputs.len(),
        outputs,
        tree_parent,
    })
}

impl SubgroupGraph {
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn expr_alphabet(&self) -> &Arc<Alphabet> {
        &self.expr_alphabet
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Rank of the subgroup: edges minus vertices plus one.
    pub fn rank(&self) -> usize {
        self.edge_count + 1 - self.out.len()
    }

    fn check_alpha(&self, w: &Word) -> Result<(), StallingsError> {
        if !w.alphabet().same(&self.alphabet) {
            return Err(WordError::AlphabetMismatch(
                w.alphabet().names().join(" "),
                self.alphabet.names().join(" "),
            )
            .into());
        }
        Ok(())
    }

    fn step(&self, v: u32, letter: Letter) -> Option<(u32, u32, bool)> {
        match letter.sign {
            crate::words::Sign::Plus => self.out[v as usize][letter.gen.0 as usize]
                .map(|(head, eid)| (head, eid, false)),
            crate::words::Sign::Minus => self.inc[v as usize][letter.gen.0 as usize]
                .map(|(tail, eid)| (tail, eid, true)),
        }
    }

    /// Does `w` label a basepoint loop? Invariant under free reduction of
    /// the query.
    pub fn contains(&self, w: &Word) -> Result<bool, StallingsError> {
        self.check_alpha(w)?;
        let mut v = 0u32;
        for letter in w.free_reduce().iter_letters() {
            match self.step(v, letter) {
                Some((next, _, _)) => v = next,
                None => return Ok(false),
            }
        }
        Ok(v == 0)
    }

    /// Rewrite a member over the expression letters: the result satisfies
    /// `substitute(expression, basis) = w` in the free group.
    pub fn express_in_basis(&self, w: &Word) -> Result<Word, StallingsError> {
        self.check_alpha(w)?;
        let mut v = 0u32;
        let mut pieces: Vec<Word> = Vec::new();
        for letter in w.free_reduce().iter_letters() {
            let Some((next, eid, backwards)) = self.step(v, letter) else {
                return Err(StallingsError::NotMember);
            };
            let output = &self.outputs[eid as usize];
            if !output.is_empty() {
                pieces.push(if backwards { output.invert() } else { output.clone() });
            }
            v = next;
        }
        if v != 0 {
            return Err(StallingsError::NotMember);
        }
        let mut acc = Word::empty(&self.expr_alphabet);
        for piece in pieces {
            acc = acc.concat(&piece)?;
        }
        Ok(acc)
    }

    /// The structural signature: vertex count plus the sorted labeled edge
    /// set under the canonical numbering. Two builds of the same subgroup
    /// agree on this.
    pub fn canonical_signature(&self) -> (usize, Vec<(u32, u16, u32)>) {
        let mut edges = Vec::new();
        for (v, row) in self.out.iter().enumerate() {
            for (gen, slot) in row.iter().enumerate() {
                if let Some((head, _)) = slot {
                    edges.push((v as u32, gen as u16, *head));
                }
            }
        }
        edges.sort_unstable();
        (self.out.len(), edges)
    }

    /// Loop words of the non-tree edges, read through the spanning tree.
    pub fn tree_basis(&self) -> Vec<Word> {
        let tree_edges: std::collections::HashSet<u32> =
            self.tree_parent.iter().flatten().copied().collect();
        // Path word from basepoint to each vertex along tree edges.
        let mut path: Vec<Option<Word>> = vec![None; self.out.len()];
        path[0] = Some(Word::empty(&self.alphabet));
        // Vertices were numbered in BFS order, so parents precede children.
        for v in 1..self.out.len() {
            let parent_edge = self.tree_parent[v].expect("non-root has a tree parent");
            // Find the orientation of the parent edge relative to v.
            'search: for (u, row) in self.out.iter().enumerate() {
                for (gen, slot) in row.iter().enumerate() {
                    if let Some((head, eid)) = slot {
                        if *eid != parent_edge {
                            continue;
                        }
                        let letter = Letter::positive(Generator(gen as u16));
                        if *head == v as u32 && path[u].is_some() {
                            let p = path[u].clone().unwrap();
                            path[v] = Some(
                                p.concat(&Word::letter(&self.alphabet, letter)).unwrap(),
                            );
                            break 'search;
                        }
                        if u == v && path[*head as usize].is_some() {
                            let p = path[*head as usize].clone().unwrap();
                            path[v] = Some(
                                p.concat(&Word::letter(&self.alphabet, letter.inverse()))
                                    .unwrap(),
                            );
                            break 'search;
                        }
                    }
                }
            }
        }
        let mut basis = Vec::new();
        for (u, row) in self.out.iter().enumerate() {
            for (gen, slot) in row.iter().enumerate() {
                if let Some((head, eid)) = slot {
                    if tree_edges.contains(eid) {
                        continue;
                    }
                    let letter = Word::letter(&self.alphabet, Letter::positive(Generator(gen as u16)));
                    let word = path[u]
                        .clone()
                        .unwrap()
                        .concat(&letter)
                        .unwrap()
                        .concat(&path[*head as usize].clone().unwrap().invert())
                        .unwrap();
                    basis.push(word);
                }
            }
        }
        basis
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NielsenCondition {
    N0,
    N1,
    N2,
}

#[derive(Clone, Debug)]
pub struct NielsenViolation {
    pub condition: NielsenCondition,
    pub words: Vec<Word>,
}

/// Verdicts for the three Nielsen conditions over `U^{+-1}`, with the first
/// violating tuple when one exists.
#[derive(Clone, Debug)]
pub struct NielsenReport {
    pub n0: bool,
    pub n1: bool,
    pub n2: bool,
    pub violation: Option<NielsenViolation>,
}

impl NielsenReport {
    pub fn passed(&self) -> bool {
        self.n0 && self.n1 && self.n2
    }
}

/// Check N0, N1, N2 exactly as quantified: all tuples from `U^{+-1}`.
/// Passing certifies that `U` is a free basis of the subgroup it generates.
pub fn nielsen_check(u: &[Word]) -> NielsenReport {
    assert!(!u.is_empty(), "nielsen_check needs a nonempty set");
    let mut signed: Vec<Word> = Vec::with_capacity(u.len() * 2);
    for w in u {
        signed.push(w.clone());
        signed.push(w.invert());
    }
    let mut report = NielsenReport { n0: true, n1: true, n2: true, violation: None };
    let mut record = |report: &mut NielsenReport, cond, words: Vec<Word>| {
        if report.violation.is_none() {
            report.violation = Some(NielsenViolation { condition: cond, words });
        }
    };
    for v in &signed {
        if v.is_empty() {
            report.n0 = false;
            record(&mut report, NielsenCondition::N0, vec![v.clone()]);
        }
    }
    for v1 in &signed {
        for v2 in &signed {
            let prod = v1.concat(v2).expect("same alphabet");
            if prod.is_empty() {
                continue;
            }
            if prod.len() < v1.len() || prod.len() < v2.len() {
                report.n1 = false;
                record(&mut report, NielsenCondition::N1, vec![v1.clone(), v2.clone()]);
            }
        }
    }
    for v1 in &signed {
        for v2 in &signed {
            let v12 = v1.concat(v2).expect("same alphabet");
            if v12.is_empty() {
                continue;
            }
            for v3 in &signed {
                let v23 = v2.concat(v3).expect("same alphabet");
                if v23.is_empty() {
                    continue;
                }
                let v123 = v12.concat(v3).expect("same alphabet");
                let bound = v1.len() as i128 - v2.len() as i128 + v3.len() as i128;
                if (v123.len() as i128) <= bound {
                    report.n2 = false;
                    record(
                        &mut report,
                        NielsenCondition::N2,
                        vec![v1.clone(), v2.clone(), v3.clone()],
                    );
                }
            }
        }
    }
    report
}

/// Sufficient condition: if the symmetrized closure of `U` satisfies
/// `C'(1/2)`, then N0-N2 hold. Evaluated literally via the piece machinery.
pub fn cprime_half_sufficient(u: &[Word]) -> bool {
    if u.is_empty() {
        return false;
    }
    let alpha = Arc::clone(u[0].alphabet());
    let relators: Vec<Word> = u.iter().map(|w| w.free_reduce()).collect();
    if relators.iter().any(|w| {
        let (core, _) = w.cyclic_reduce();
        core.is_empty()
    }) {
        return false;
    }
    let p = match crate::rips::Presentation::new(alpha, relators) {
        Ok(p) => p,
        Err(_) => return false,
    };
    smallcancel::check_cprime(&p, Fraction::new(1, 2)).0
}

#[cfg(test)]
mod tests;

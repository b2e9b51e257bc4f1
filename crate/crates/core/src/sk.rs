//! Finite-alphabet approximation in SU(2).
//!
//! A [`BasicNet`] enumerates every word up to a fixed length over a gate set
//! and its inverses, keeping one (shortest, then lexicographically first) word
//! per group element. [`sk_approximate`] refines the nearest net word with the
//! Solovay-Kitaev recursion: the residual `Δ = V·U⁻¹` is written as a balanced
//! group commutator `A B A⁻¹ B⁻¹`, and `A`, `B` are approximated one level down.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{AccuracyReport, Error, Result};
use crate::numeric::{default_tol, MatrixJson};
use crate::su2::Su2;

/// Net entries closer than this in operator norm are merged.
pub const DEDUP_TOL: f64 = 1e-6;
/// Default ceiling on the number of net entries.
pub const DEFAULT_NET_CAP: usize = 2_000_000;
pub const DEFAULT_NET_MAX_LEN: usize = 12;
pub const DEFAULT_SK_DEPTH: usize = 5;
/// Nets up to this size are scanned exhaustively.
pub const EXHAUSTIVE_SCAN_LIMIT: usize = 100_000;
/// Largest residual rotation angle accepted by [`group_commutator_decompose`].
pub const COMMUTATOR_MAX_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

/// Up to 127 letters, so a letter and its inversion flag fit in one byte.
const MAX_LETTERS: usize = 127;

#[derive(Debug, Clone, PartialEq)]
pub struct GateSet {
    labels: Vec<String>,
    elements: Vec<Su2>,
    inverse_closed: bool,
}

impl GateSet {
    pub fn new(letters: Vec<(String, Su2)>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("gate set is empty".into()));
        }
        if letters.len() > MAX_LETTERS {
            return Err(Error::InvalidInput(format!("gate set has more than {MAX_LETTERS} letters")));
        }
        let mut seen = std::collections::HashSet::new();
        for (label, _) in &letters {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate label `{label}`")));
            }
        }
        let (labels, elements): (Vec<_>, Vec<_>) = letters.into_iter().unzip();
        let inverse_closed = elements
            .iter()
            .all(|g| elements.iter().any(|h| h.distance(&g.inverse()) < 1e-12));
        Ok(Self { labels, elements, inverse_closed })
    }

    /// `H` and `T` normalized into SU(2): a π rotation about `(x+z)/√2` and a
    /// π/4 rotation about `z`. Density of the generated subgroup is assumed, not checked.
    pub fn default_set() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = Su2::from_quaternion([0.0, s, 0.0, s]).expect("unit");
        let t = Su2::rotation([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_4);
        Self::new(vec![("H".into(), h), ("T".into(), t)]).expect("valid default set")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn element(&self, index: usize) -> Option<Su2> {
        self.elements.get(index).copied()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn letter_element(&self, letter: Letter) -> Result<Su2> {
        let g = self
            .element(letter.index)
            .ok_or_else(|| Error::UnknownLetter(format!("#{}", letter.index)))?;
        Ok(if letter.inverted { g.inverse() } else { g })
    }

    pub fn to_json(&self) -> GateSetJson {
        GateSetJson {
            letters: self
                .labels
                .iter()
                .zip(&self.elements)
                .map(|(l, g)| GateLetterJson { label: l.clone(), matrix: g.to_matrix().to_json().expect("2x2") })
                .collect(),
        }
    }

    pub fn from_json(j: &GateSetJson) -> Result<Self> {
        let letters = j
            .letters
            .iter()
            .map(|l| Ok((l.label.clone(), Su2::from_matrix(&l.matrix.to_matrix()?, default_tol(2) * 10.0)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// `{"letters": [{"label": str, "matrix": <2×2 matrix JSON>}, ...]}`
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GateSetJson {
    pub letters: Vec<GateLetterJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GateLetterJson {
    pub label: String,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub inverted: bool,
}

impl Letter {
    pub fn new(index: usize, inverted: bool) -> Self {
        Self { index, inverted }
    }

    pub fn inverse(self) -> Self {
        Self { inverted: !self.inverted, ..self }
    }

    fn code(self) -> u8 {
        (self.index as u8) << 1 | self.inverted as u8
    }

    fn from_code(c: u8) -> Self {
        Self { index: (c >> 1) as usize, inverted: c & 1 == 1 }
    }
}

/// Word over the gate set and its inverses; evaluates left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GateWord {
    pub letters: Vec<Letter>,
}

impl GateWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reversed with every flag flipped; evaluates to the inverse element.
    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn to_json(&self, g: &GateSet) -> Result<GateWordJson> {
        let letters = self
            .letters
            .iter()
            .map(|l| {
                let label = g.label(l.index).ok_or_else(|| Error::UnknownLetter(format!("#{}", l.index)))?;
                Ok(WordLetterJson { label: label.to_string(), inv: l.inverted })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GateWordJson { letters })
    }

    pub fn from_json(j: &GateWordJson, g: &GateSet) -> Result<Self> {
        let letters = j
            .letters
            .iter()
            .map(|l| {
                let index = g.index_of(&l.label).ok_or_else(|| Error::UnknownLetter(l.label.clone()))?;
                Ok(Letter::new(index, l.inv))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { letters })
    }
}

/// `{"letters": [{"label": str, "inv": bool}, ...]}`
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GateWordJson {
    pub letters: Vec<WordLetterJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WordLetterJson {
    pub label: String,
    pub inv: bool,
}

/// Left-to-right product of the word's letters.
pub fn evaluate_word(w: &GateWord, g: &GateSet) -> Result<Su2> {
    w.letters
        .iter()
        .try_fold(Su2::identity(), |acc, &l| Ok(acc * g.letter_element(l)?))
}

#[derive(Debug, Clone, Copy)]
struct NetNode {
    element: Su2,
    /// `u32::MAX` for the root (empty word).
    parent: u32,
    letter: u8,
    len: u8,
}

/// ε-net of SU(2) made of all words up to `max_word_length`.
#[derive(Debug, Clone)]
pub struct BasicNet {
    gate_set: GateSet,
    max_word_length: usize,
    /// Breadth-first order: shorter words first, lexicographic within a length.
    nodes: Vec<NetNode>,
    /// Node ids sorted by the scalar quaternion part (i.e. by trace).
    sorted: Vec<u32>,
    sorted_q0: Vec<f64>,
}

fn cell_key(q: &[f64; 4], cell: f64) -> [i64; 4] {
    q.map(|x| (x / cell).floor() as i64)
}

impl BasicNet {
    fn from_nodes(gate_set: GateSet, max_word_length: usize, nodes: Vec<NetNode>) -> Self {
        let mut sorted: Vec<u32> = (0..nodes.len() as u32).collect();
        sorted.sort_by(|&a, &b| {
            nodes[a as usize].element.quaternion()[0].total_cmp(&nodes[b as usize].element.quaternion()[0])
        });
        let sorted_q0 = sorted.iter().map(|&i| nodes[i as usize].element.quaternion()[0]).collect();
        Self { gate_set, max_word_length, nodes, sorted, sorted_q0 }
    }

    pub fn gate_set(&self) -> &GateSet {
        &self.gate_set
    }

    pub fn max_word_length(&self) -> usize {
        self.max_word_length
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn word_of(&self, id: usize) -> GateWord {
        let mut letters = Vec::with_capacity(self.nodes[id].len as usize);
        let mut cur = id;
        while self.nodes[cur].parent != u32::MAX {
            letters.push(Letter::from_code(self.nodes[cur].letter));
            cur = self.nodes[cur].parent as usize;
        }
        letters.reverse();
        GateWord { letters }
    }

    /// All entries in breadth-first order.
    pub fn entries(&self) -> impl Iterator<Item = (GateWord, Su2)> + '_ {
        (0..self.nodes.len()).map(move |i| (self.word_of(i), self.nodes[i].element))
    }

    /// Id of the nearest entry; ties go to the earlier (shorter, lexicographically
    /// smaller) word.
    fn nearest(&self, v: &Su2) -> (usize, f64) {
        let better = |d: f64, id: usize, best: (usize, f64)| d < best.1 || (d == best.1 && id < best.0);
        let mut best = (usize::MAX, f64::INFINITY);
        if self.nodes.len() <= EXHAUSTIVE_SCAN_LIMIT {
            for (id, n) in self.nodes.iter().enumerate() {
                let d = n.element.distance(v);
                if better(d, id, best) {
                    best = (id, d);
                }
            }
            return best;
        }
        // |q − e| ≥ |q0 − e0|: walk outward from q0 until the slab excludes everything.
        let x0 = v.quaternion()[0];
        let pos = self.sorted_q0.partition_point(|&e| e < x0);
        let (mut lo, mut hi) = (pos, pos);
        loop {
            let gap_lo = if lo > 0 { x0 - self.sorted_q0[lo - 1] } else { f64::INFINITY };
            let gap_hi = if hi < self.sorted.len() { self.sorted_q0[hi] - x0 } else { f64::INFINITY };
            let gap = gap_lo.min(gap_hi);
            if gap > best.1 || gap == f64::INFINITY {
                break;
            }
            let slot = if gap_lo <= gap_hi {
                lo -= 1;
                lo
            } else {
                hi += 1;
                hi - 1
            };
            let id = self.sorted[slot] as usize;
            let d = self.nodes[id].element.distance(v);
            if better(d, id, best) {
                best = (id, d);
            }
        }
        best
    }

    /// Largest base-case distance over `samples` Haar-random targets.
    pub fn measured_covering_radius(&self, samples: usize, rng: &mut impl rand::Rng) -> f64 {
        (0..samples)
            .map(|_| {
                let v = Su2::from_unitary(&crate::random::random_special_unitary(2, rng)).expect("SU(2)");
                self.nearest(&v).1
            })
            .fold(0.0, f64::max)
    }

    const MAGIC: &'static [u8; 8] = b"TLVLNET1";

    /// Serializes the net (word tree and elements) to a compact binary stream.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.max_word_length as u64).to_le_bytes())?;
        w.write_all(&(self.nodes.len() as u64).to_le_bytes())?;
        for n in &self.nodes {
            w.write_all(&n.parent.to_le_bytes())?;
            w.write_all(&[n.letter, n.len])?;
            for x in n.element.quaternion() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a net written by [`BasicNet::write_to`] for the same gate set.
    pub fn read_from(mut r: impl Read, gate_set: GateSet) -> Result<Self> {
        let io = |e: std::io::Error| Error::Parse(format!("net cache: {e}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != Self::MAGIC {
            return Err(Error::Parse("net cache: bad magic".into()));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8).map_err(io)?;
        let max_len = u64::from_le_bytes(buf8) as usize;
        r.read_exact(&mut buf8).map_err(io)?;
        let count = u64::from_le_bytes(buf8) as usize;
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            let mut head = [0u8; 6];
            r.read_exact(&mut head).map_err(io)?;
            let parent = u32::from_le_bytes([head[0], head[1], head[2], head[3]]);
            let mut q = [0f64; 4];
            for x in q.iter_mut() {
                r.read_exact(&mut buf8).map_err(io)?;
                *x = f64::from_le_bytes(buf8);
            }
            let letter = head[4];
            let norm = q.iter().map(|x| x * x).sum::<f64>();
            if (norm - 1.0).abs().is_nan() || (norm - 1.0).abs() >= 1e-9 || (letter >> 1) as usize >= gate_set.len() || (parent != u32::MAX && parent as usize >= nodes.len()) {
                return Err(Error::Parse("net cache: inconsistent entry".into()));
            }
            nodes.push(NetNode { element: Su2::from_raw(q), parent, letter, len: head[5] });
        }
        Ok(Self::from_nodes(gate_set, max_len, nodes))
    }
}

/// [`build_net_with_cap`] with the default cap.
pub fn build_net(g: &GateSet, max_len: usize) -> Result<BasicNet> {
    build_net_with_cap(g, max_len, DEFAULT_NET_CAP)
}

/// Breadth-first enumeration of words of length `≤ max_len` over `g ∪ g⁻¹`.
///
/// Only one representative per element is extended, which yields the same
/// set of shortest representatives as enumerating every word.
pub fn build_net_with_cap(g: &GateSet, max_len: usize, cap: usize) -> Result<BasicNet> {
    if max_len > u8::MAX as usize {
        return Err(Error::InvalidInput(format!("max word length {max_len} too large")));
    }
    let alphabet: Vec<(Letter, Su2)> = (0..g.len())
        .flat_map(|i| [Letter::new(i, false), Letter::new(i, true)])
        .map(|l| (l, g.letter_element(l).expect("valid index")))
        .collect();

    let cell = 10.0 * DEDUP_TOL;
    let mut buckets: HashMap<[i64; 4], Vec<u32>> = HashMap::new();
    let mut nodes = vec![NetNode { element: Su2::identity(), parent: u32::MAX, letter: 0, len: 0 }];
    buckets.entry(cell_key(&Su2::identity().quaternion(), cell)).or_default().push(0);

    let mut frontier = 0..1usize;
    for len in 1..=max_len {
        let start = nodes.len();
        for parent in frontier.clone() {
            let base = nodes[parent].element;
            for &(letter, el) in &alphabet {
                let e = base * el;
                let q = e.quaternion();
                let key = cell_key(&q, cell);
                if is_duplicate(&buckets, &nodes, &q, key, cell) {
                    continue;
                }
                if nodes.len() >= cap {
                    return Err(Error::NetTooLarge { cap });
                }
                let id = nodes.len() as u32;
                nodes.push(NetNode { element: e, parent: parent as u32, letter: letter.code(), len: len as u8 });
                buckets.entry(key).or_default().push(id);
            }
        }
        frontier = start..nodes.len();
        if frontier.is_empty() {
            break;
        }
    }
    Ok(BasicNet::from_nodes(g.clone(), max_len, nodes))
}

fn is_duplicate(
    buckets: &HashMap<[i64; 4], Vec<u32>>,
    nodes: &[NetNode],
    q: &[f64; 4],
    key: [i64; 4],
    cell: f64,
) -> bool {
    // neighbouring cells only matter along coordinates within DEDUP_TOL of a cell wall
    let mut offsets: [Vec<i64>; 4] = Default::default();
    for k in 0..4 {
        offsets[k].push(0);
        let frac = q[k] / cell - key[k] as f64;
        if frac * cell < DEDUP_TOL {
            offsets[k].push(-1);
        }
        if (1.0 - frac) * cell < DEDUP_TOL {
            offsets[k].push(1);
        }
    }
    let target = Su2::from_quaternion(*q).expect("unit");
    for &a in &offsets[0] {
        for &b in &offsets[1] {
            for &c in &offsets[2] {
                for &d in &offsets[3] {
                    let k = [key[0] + a, key[1] + b, key[2] + c, key[3] + d];
                    if let Some(ids) = buckets.get(&k) {
                        if ids.iter().any(|&i| nodes[i as usize].element.distance(&target) < DEDUP_TOL) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Word, its value and its operator-norm distance to the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub word: GateWord,
    pub element: Su2,
    pub error: f64,
}

/// Nearest net word to `v`.
pub fn base_approx(v: &Su2, net: &BasicNet) -> GateWord {
    base_approximation(v, net).word
}

fn base_approximation(v: &Su2, net: &BasicNet) -> Approximation {
    let (id, d) = net.nearest(v);
    Approximation { word: net.word_of(id), element: net.nodes[id].element, error: d }
}

/// Balanced commutator: returns `A`, `B` with `A B A⁻¹ B⁻¹ = Δ`.
///
/// `A` and `B` are conjugates of `x`- and `y`-axis rotations by the same angle
/// `φ = 2·asin(√sin(θ/4))`, where `θ` is the rotation angle of `Δ`.
pub fn group_commutator_decompose(delta: &Su2) -> Result<(Su2, Su2)> {
    let theta = delta.rotation_angle();
    if theta > COMMUTATOR_MAX_ANGLE {
        return Err(Error::OutOfRegime { angle: theta });
    }
    let Some(target_axis) = delta.axis() else {
        return Ok((Su2::identity(), Su2::identity()));
    };
    if theta == 0.0 {
        return Ok((Su2::identity(), Su2::identity()));
    }
    let phi = 2.0 * (theta / 4.0).sin().sqrt().asin();
    let v = Su2::rotation([1.0, 0.0, 0.0], phi);
    let w = Su2::rotation([0.0, 1.0, 0.0], phi);
    let comm = v * w * v.inverse() * w.inverse();
    let comm_axis = comm.axis().unwrap_or(target_axis);
    let s = rotation_between(comm_axis, target_axis);
    let si = s.inverse();
    Ok((s * v * si, s * w * si))
}

/// Rotation taking unit vector `a` onto unit vector `b`.
fn rotation_between(a: [f64; 3], b: [f64; 3]) -> Su2 {
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cn = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
    if cn < 1e-15 {
        if dot > 0.0 {
            return Su2::identity();
        }
        // antiparallel: half turn about any axis orthogonal to a
        let pick = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let perp = [a[1] * pick[2] - a[2] * pick[1], a[2] * pick[0] - a[0] * pick[2], a[0] * pick[1] - a[1] * pick[0]];
        return Su2::rotation(perp, std::f64::consts::PI);
    }
    Su2::rotation(cross, cn.atan2(dot))
}

fn compose(parts: &[(&GateWord, bool)], cap: usize) -> GateWord {
    let mut letters = Vec::with_capacity(cap);
    for (w, inv) in parts {
        if *inv {
            letters.extend(w.letters.iter().rev().map(|l| l.inverse()));
        } else {
            letters.extend_from_slice(&w.letters);
        }
    }
    GateWord { letters }
}

/// One Solovay-Kitaev refinement of `prev ≈ v` at recursion level `level ≥ 1`.
/// Keeps `prev` when the refined word is not strictly closer.
fn improve(v: &Su2, prev: Approximation, level: usize, net: &BasicNet) -> Approximation {
    let delta = *v * prev.element.inverse();
    let Ok((a, b)) = group_commutator_decompose(&delta) else {
        return prev;
    };
    let wa = sk_at_depth(&a, level - 1, net);
    let wb = sk_at_depth(&b, level - 1, net);
    let element = wa.element * wb.element * wa.element.inverse() * wb.element.inverse() * prev.element;
    let error = element.distance(v);
    if error >= prev.error {
        return prev;
    }
    let cap = 2 * (wa.word.len() + wb.word.len()) + prev.word.len();
    let word = compose(&[(&wa.word, false), (&wb.word, false), (&wa.word, true), (&wb.word, true), (&prev.word, false)], cap);
    Approximation { word, element, error }
}

/// Solovay-Kitaev approximation at a fixed recursion depth (0 = base net).
pub fn sk_at_depth(v: &Su2, depth: usize, net: &BasicNet) -> Approximation {
    let base = base_approximation(v, net);
    (1..=depth).fold(base, |prev, level| {
        if prev.error == 0.0 {
            prev
        } else {
            improve(v, prev, level, net)
        }
    })
}

/// Raises the recursion depth until the word is within `eps` of `v` or `depth`
/// is exhausted. The returned error is recomputed from the word itself.
pub fn sk_approximate(v: &Su2, eps: f64, net: &BasicNet, depth: usize) -> Result<Approximation> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("epsilon {eps} outside (0, 1)")));
    }
    let mut approx = base_approximation(v, net);
    let mut level = 1;
    while approx.error > eps && level <= depth {
        approx = improve(v, approx, level, net);
        level += 1;
    }
    let element = evaluate_word(&approx.word, net.gate_set())?;
    let error = element.distance(v);
    if error > eps {
        return Err(Error::AccuracyNotReached(AccuracyReport { target: eps, achieved: error, blocks: vec![] }));
    }
    Ok(Approximation { word: approx.word, element, error })
}

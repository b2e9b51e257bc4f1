//! End-to-end compilation of an `N × N` unitary into a word over the
//! coordinate-embedded alphabet `⋃_{p<q} φ_{p,q}(G)`.
//!
//! `U` is factored exactly into two-level blocks, each block is approximated in
//! SU(2) at budget `δ = ε/K`, and the per-block words are lifted back. The
//! certified bound is the sum of the per-block errors, which dominates the true
//! error by the telescoping inequality for products of unitaries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagonal::{synth_special_diagonal, DiagonalUnitary};
use crate::error::{AccuracyReport, BlockReport, Error, Result};
use crate::givens::factor;
use crate::numeric::{operator_norm, wrap_angle, ComplexMatrix, UnitaryMatrix, C64};
use crate::sk::{sk_approximate, BasicNet, GateSet, GateWord, DEFAULT_SK_DEPTH};
use crate::su2::{split_phase_u2, Su2};
use crate::two_level::{block_entries, right_apply};

/// Gate-set letter acting on coordinates `(p, q)` (1-based, `p < q`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiftedLetter {
    pub label: String,
    pub inverted: bool,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationResult {
    pub dim: usize,
    pub word: Vec<LiftedLetter>,
    pub diagonal: DiagonalUnitary,
    pub global_phase: f64,
    pub requested_eps: f64,
    pub certified_bound: f64,
    pub achieved_error: f64,
    pub word_length: usize,
    pub block_count: usize,
}

/// Serialized form; `diagonal` holds `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompilationResultJson {
    pub dim: usize,
    pub word: Vec<LiftedLetter>,
    pub diagonal: Vec<[f64; 2]>,
    pub global_phase: f64,
    pub requested_eps: f64,
    pub certified_bound: f64,
    pub achieved_error: f64,
    pub word_length: usize,
    pub block_count: usize,
}

impl CompilationResult {
    pub fn to_json(&self) -> CompilationResultJson {
        CompilationResultJson {
            dim: self.dim,
            word: self.word.clone(),
            diagonal: self.diagonal.entries().iter().map(|z| [z.re, z.im]).collect(),
            global_phase: self.global_phase,
            requested_eps: self.requested_eps,
            certified_bound: self.certified_bound,
            achieved_error: self.achieved_error,
            word_length: self.word_length,
            block_count: self.block_count,
        }
    }
}

impl CompilationResultJson {
    pub fn to_result(&self) -> Result<CompilationResult> {
        if self.diagonal.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: self.diagonal.len() });
        }
        if let Some(l) = self.word.iter().find(|l| l.p == 0 || l.p >= l.q || l.q > self.dim) {
            return Err(Error::InvalidIndex(format!("letter at ({},{}) in dimension {}", l.p, l.q, self.dim)));
        }
        let entries: Vec<C64> = self.diagonal.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ok(CompilationResult {
            dim: self.dim,
            word: self.word.clone(),
            diagonal: DiagonalUnitary::from_entries(&entries),
            global_phase: self.global_phase,
            requested_eps: self.requested_eps,
            certified_bound: self.certified_bound,
            achieved_error: self.achieved_error,
            word_length: self.word_length,
            block_count: self.block_count,
        })
    }
}

/// Tags every letter of `w` with the coordinate pair `(p, q)`.
pub fn lift_word(w: &GateWord, g: &GateSet, p: usize, q: usize) -> Result<Vec<LiftedLetter>> {
    if p == 0 || p >= q {
        return Err(Error::InvalidIndex(format!("coordinate pair ({p},{q})")));
    }
    w.letters
        .iter()
        .map(|l| {
            let label = g.label(l.index).ok_or_else(|| Error::UnknownLetter(format!("#{}", l.index)))?;
            Ok(LiftedLetter { label: label.to_string(), inverted: l.inverted, p, q })
        })
        .collect()
}

/// Left-to-right product of the embedded letters.
pub fn evaluate_lifted(word: &[LiftedLetter], g: &GateSet, n: usize) -> Result<UnitaryMatrix> {
    let blocks: Vec<[[C64; 4]; 2]> = (0..g.len())
        .map(|i| {
            let e = g.element(i).expect("index in range");
            [su2_entries(&e), su2_entries(&e.inverse())]
        })
        .collect();
    let mut m = ComplexMatrix::identity(n);
    for l in word {
        if l.p == 0 || l.p >= l.q || l.q > n {
            return Err(Error::InvalidIndex(format!("letter at ({},{}) in dimension {n}", l.p, l.q)));
        }
        let i = g.index_of(&l.label).ok_or_else(|| Error::UnknownLetter(l.label.clone()))?;
        right_apply(&mut m, l.p - 1, l.q - 1, blocks[i][l.inverted as usize]);
    }
    Ok(UnitaryMatrix::new_unchecked(m))
}

fn su2_entries(e: &Su2) -> [C64; 4] {
    let m = e.to_matrix();
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// `‖U − e^{iθ}·W·D‖` recomputed from the word alone.
pub fn verify(u: &UnitaryMatrix, r: &CompilationResult, g: &GateSet) -> Result<f64> {
    let n = u.dim();
    if r.dim != n || r.diagonal.dim() != n {
        return Err(Error::DimMismatch { expected: n, found: r.dim });
    }
    let mut m = evaluate_lifted(&r.word, g, n)?.into_matrix();
    let phase = C64::from_polar(1.0, r.global_phase);
    let d = r.diagonal.entries();
    for c in 0..n {
        let s = d[c] * phase;
        for row in 0..n {
            m[(row, c)] *= s;
        }
    }
    operator_norm(&u.matrix().sub(&m)?)
}

/// Tuning knobs for [`Compiler`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    pub sk_depth: usize,
    pub parallel: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self { sk_depth: DEFAULT_SK_DEPTH, parallel: true }
    }
}

/// Two-level compiler bound to a prebuilt net.
#[derive(Debug, Clone, Copy)]
pub struct Compiler<'a> {
    net: &'a BasicNet,
    options: CompileOptions,
}

struct Block {
    p: usize,
    q: usize,
    target: Su2,
}

struct BlockOutcome {
    word: GateWord,
    error: f64,
    report: BlockReport,
    reached: bool,
}

impl<'a> Compiler<'a> {
    pub fn new(net: &'a BasicNet) -> Self {
        Self { net, options: CompileOptions::default() }
    }

    pub fn with_options(net: &'a BasicNet, options: CompileOptions) -> Self {
        Self { net, options }
    }

    pub fn gate_set(&self) -> &GateSet {
        self.net.gate_set()
    }

    /// Returns `W`, `D` with `‖U − W·D‖ ≤ eps`; `D` is left uncompiled.
    pub fn compile(&self, u: &UnitaryMatrix, eps: f64) -> Result<CompilationResult> {
        check_eps(eps)?;
        let (blocks, diagonal) = self.split_blocks(u)?;
        let k = blocks.len();
        let budget = if k == 0 { eps } else { eps / k as f64 };
        let outcomes = self.approximate_all(&blocks, budget)?;
        let mut r = self.assemble(u.dim(), eps, &[(&blocks, &outcomes)])?;
        r.diagonal = DiagonalUnitary::from_entries(&diagonal);
        r.achieved_error = verify(u, &r, self.gate_set())?;
        Ok(r)
    }

    /// Like [`Compiler::compile`] but also approximates the determinant-one part
    /// of `D`, leaving only a global phase: `‖U − e^{iθ}·W‖ ≤ eps`.
    ///
    /// Half the budget goes to the factorization blocks and half to the phase
    /// rotations, unless one of the two groups is empty.
    pub fn compile_pure(&self, u: &UnitaryMatrix, eps: f64) -> Result<CompilationResult> {
        check_eps(eps)?;
        let n = u.dim();
        let (blocks, diagonal) = self.split_blocks(u)?;
        let (theta, d0) = nearest_phase_split(&DiagonalUnitary::from_entries(&diagonal));
        let program = synth_special_diagonal(&d0)?;
        let phase_blocks: Vec<Block> = program
            .effective_rotations()
            .map(|r| {
                let half = r.t / 2.0;
                Block { p: 1, q: r.j, target: Su2::from_raw([half.cos(), 0.0, 0.0, -half.sin()]) }
            })
            .filter(|b| b.target != Su2::identity())
            .collect();

        let share = match (blocks.is_empty(), phase_blocks.is_empty()) {
            (false, false) => eps / 2.0,
            _ => eps,
        };
        let givens_out = self.approximate_all(&blocks, share / blocks.len().max(1) as f64)?;
        let phase_out = self.approximate_all(&phase_blocks, share / phase_blocks.len().max(1) as f64)?;
        let mut r = self.assemble(n, eps, &[(&blocks, &givens_out), (&phase_blocks, &phase_out)])?;
        r.diagonal = DiagonalUnitary::identity(n);
        r.global_phase = theta;
        r.achieved_error = verify(u, &r, self.gate_set())?;
        Ok(r)
    }

    /// Exact factorization with every block pushed into SU(2); the stripped
    /// U(1) phases are carried rightward into the diagonal remainder.
    fn split_blocks(&self, u: &UnitaryMatrix) -> Result<(Vec<Block>, Vec<C64>)> {
        let f = factor(u)?;
        let n = f.dim;
        let mut acc = vec![0.0f64; n];
        let mut blocks = Vec::with_capacity(f.factors.len());
        for t in &f.factors {
            let (a, b) = (t.p - 1, t.q - 1);
            // conjugate by the accumulated diagonal restricted to (p, q)
            let shift = acc[a] - acc[b];
            let e = block_entries(&t.block);
            let rot = C64::from_polar(1.0, shift);
            let conj = [e[0], e[1] * rot, e[2] * rot.conj(), e[3]];
            let v = UnitaryMatrix::new_unchecked(ComplexMatrix::new(2, 2, conj.to_vec())?);
            let (theta, s) = split_phase_u2(&v)?;
            acc[a] += theta;
            acc[b] += theta;
            blocks.push(Block { p: t.p, q: t.q, target: s });
        }
        let diagonal = f
            .diagonal
            .iter()
            .zip(&acc)
            .map(|(&d, &phi)| d * C64::from_polar(1.0, phi))
            .collect();
        Ok((blocks, diagonal))
    }

    fn approximate_all(&self, blocks: &[Block], budget: f64) -> Result<Vec<BlockOutcome>> {
        let run = |b: &Block| self.approximate_block(b, budget);
        if self.options.parallel {
            blocks.par_iter().map(run).collect()
        } else {
            blocks.iter().map(run).collect()
        }
    }

    fn approximate_block(&self, b: &Block, budget: f64) -> Result<BlockOutcome> {
        let to_identity = b.target.distance(&Su2::identity());
        let (word, error, reached) = if to_identity < budget {
            (GateWord::empty(), to_identity, true)
        } else {
            match sk_approximate(&b.target, budget, self.net, self.options.sk_depth) {
                Ok(a) => (a.word, a.error, true),
                Err(Error::AccuracyNotReached(r)) => (GateWord::empty(), r.achieved, false),
                Err(e) => return Err(e),
            }
        };
        Ok(BlockOutcome { word, error, report: BlockReport { p: b.p, q: b.q, budget, achieved: error }, reached })
    }

    fn assemble(&self, n: usize, eps: f64, groups: &[(&[Block], &[BlockOutcome])]) -> Result<CompilationResult> {
        let all_ok = groups.iter().all(|(_, o)| o.iter().all(|x| x.reached));
        let certified: f64 = groups.iter().flat_map(|(_, o)| o.iter().map(|x| x.error)).sum();
        if !all_ok || certified.is_nan() || certified > eps {
            return Err(Error::AccuracyNotReached(AccuracyReport {
                target: eps,
                achieved: certified,
                blocks: groups.iter().flat_map(|(_, o)| o.iter().map(|x| x.report.clone())).collect(),
            }));
        }
        let mut word = Vec::new();
        let mut block_count = 0;
        for (blocks, outcomes) in groups {
            for (b, o) in blocks.iter().zip(outcomes.iter()) {
                word.extend(lift_word(&o.word, self.gate_set(), b.p, b.q)?);
            }
            block_count += blocks.len();
        }
        Ok(CompilationResult {
            dim: n,
            word_length: word.len(),
            word,
            diagonal: DiagonalUnitary::identity(n),
            global_phase: 0.0,
            requested_eps: eps,
            certified_bound: certified,
            achieved_error: f64::NAN,
            block_count,
        })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon {eps} outside (0, 1)")))
    }
}

/// `D = e^{iθ} D₀` with `det D₀ = 1`, choosing among the `N` admissible `θ`
/// the one that keeps `D₀` closest to the identity.
fn nearest_phase_split(d: &DiagonalUnitary) -> (f64, DiagonalUnitary) {
    let n = d.dim();
    let sum: f64 = d.angles().iter().sum();
    let base = wrap_angle(sum) / n as f64;
    let cost = |theta: f64| d.angles().iter().map(|&a| wrap_angle(a - theta).abs()).sum::<f64>();
    let theta = (0..n)
        .map(|k| wrap_angle(base + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
        .unwrap_or(0.0);
    (theta, DiagonalUnitary::from_angles(d.angles().iter().map(|&a| a - theta)))
}

/// [`Compiler::compile`] with default options.
pub fn compile(u: &UnitaryMatrix, eps: f64, net: &BasicNet) -> Result<CompilationResult> {
    Compiler::new(net).compile(u, eps)
}

/// [`Compiler::compile_pure`] with default options.
pub fn compile_pure(u: &UnitaryMatrix, eps: f64, net: &BasicNet) -> Result<CompilationResult> {
    Compiler::new(net).compile_pure(u, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_diagonal, random_special_unitary, random_unitary};
    use crate::sk::{build_net, evaluate_word, Letter};
    use crate::two_level::embed_coordinate;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::sync::OnceLock;

    fn net() -> &'static BasicNet {
        static NET: OnceLock<BasicNet> = OnceLock::new();
        NET.get_or_init(|| build_net(&GateSet::default_set(), 12).unwrap())
    }

    fn dist(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
        operator_norm(&a.matrix().sub(b.matrix()).unwrap()).unwrap()
    }

    #[test]
    fn identity_compiles_to_nothing() {
        let r = compile(&UnitaryMatrix::identity(4), 0.1, net()).unwrap();
        assert!(r.word.is_empty());
        assert!(r.diagonal.is_identity());
        assert_eq!((r.certified_bound, r.achieved_error, r.block_count), (0.0, 0.0, 0));
    }

    #[test]
    fn diagonal_input_is_kept_exactly() {
        let mut rng = StdRng::seed_from_u64(1);
        let d = random_diagonal(4, &mut rng);
        let u = UnitaryMatrix::new(ComplexMatrix::from_diag(&d)).unwrap();
        let r = compile(&u, 0.1, net()).unwrap();
        assert!(r.word.is_empty());
        assert_eq!(r.certified_bound, 0.0);
        assert!(r.achieved_error < 1e-12);
    }

    #[test]
    fn random_su4_within_eps() {
        let mut rng = StdRng::seed_from_u64(2);
        let u = random_special_unitary(4, &mut rng);
        let r = compile(&u, 0.1, net()).unwrap();
        assert_eq!(r.block_count, 6);
        assert!(r.certified_bound <= 0.1);
        assert!(r.achieved_error <= r.certified_bound + 1e-9);
        assert_eq!(r.word_length, r.word.len());
    }

    #[test]
    fn phases_are_absorbed_into_diagonal() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in [2, 3, 5] {
            let u = random_unitary(n, &mut rng);
            let r = Compiler::with_options(net(), CompileOptions { parallel: false, ..Default::default() })
                .compile(&u, 0.2)
                .unwrap();
            assert!(r.achieved_error <= r.certified_bound + 1e-9);
        }
    }

    #[test]
    fn flipping_a_letter_increases_error() {
        let mut rng = StdRng::seed_from_u64(4);
        let u = random_unitary(3, &mut rng);
        let g = net().gate_set();
        let r = compile(&u, 0.1, net()).unwrap();
        let base = verify(&u, &r, g).unwrap();
        let mut bad = r.clone();
        bad.word[0].inverted = !bad.word[0].inverted;
        assert!(verify(&u, &bad, g).unwrap() > base);
    }

    #[test]
    fn lift_examples() {
        let g = GateSet::default_set();
        assert!(lift_word(&GateWord::empty(), &g, 1, 2).unwrap().is_empty());
        let w = GateWord::new(vec![Letter::new(0, false)]);
        let lifted = lift_word(&w, &g, 1, 2).unwrap();
        assert_eq!(lifted.len(), 1);
        let expect = embed_coordinate(1, 2, &g.element(0).unwrap().to_unitary(), 4).unwrap();
        assert!(dist(&evaluate_lifted(&lifted, &g, 4).unwrap(), &expect) < 1e-12);

        let mut rng = StdRng::seed_from_u64(5);
        let w = GateWord::new((0..15).map(|i| Letter::new(i % 2, i % 3 == 0)).collect());
        let v = random_special_unitary(2, &mut rng);
        let wv = evaluate_word(&w, &g).unwrap().to_unitary();
        let lifted = lift_word(&w, &g, 2, 4).unwrap();
        let lhs = dist(&embed_coordinate(2, 4, &v, 5).unwrap(), &evaluate_lifted(&lifted, &g, 5).unwrap());
        assert!((lhs - dist(&v, &wv)).abs() < 1e-12);
    }

    #[test]
    fn pure_examples() {
        let mut rng = StdRng::seed_from_u64(6);
        let alpha = 1.1;
        let u = UnitaryMatrix::new(ComplexMatrix::identity(4).scale(C64::from_polar(1.0, alpha))).unwrap();
        let r = compile_pure(&u, 0.1, net()).unwrap();
        assert!(r.word.is_empty());
        assert!((r.global_phase - alpha).abs() < 1e-12);

        let d = DiagonalUnitary::from_angles([0.4, -1.0, 2.0, 0.3]);
        let r = compile_pure(&d.to_unitary(), 0.1, net()).unwrap();
        assert!(!r.word.is_empty());
        assert!(r.word.iter().all(|l| l.p == 1));
        assert!(r.diagonal.is_identity());
        assert!(r.achieved_error <= 0.1);

        let u = random_special_unitary(4, &mut rng);
        let r = compile_pure(&u, 0.1, net()).unwrap();
        assert!(r.achieved_error <= r.certified_bound + 1e-9);
        assert!(r.certified_bound <= 0.1);
    }

    #[test]
    fn unreachable_budget_reports_blocks() {
        let h = GateSet::default_set().element(0).unwrap();
        let g = GateSet::new(vec![("H".into(), h)]).unwrap();
        let poor = build_net(&g, 4).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let u = random_unitary(3, &mut rng);
        match compile(&u, 0.1, &poor) {
            Err(Error::AccuracyNotReached(rep)) => {
                assert_eq!(rep.blocks.len(), 3);
                assert!(rep.blocks.iter().any(|b| b.achieved > b.budget));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = StdRng::seed_from_u64(8);
        let u = random_unitary(3, &mut rng);
        let r = compile(&u, 0.2, net()).unwrap();
        let s = serde_json::to_string(&r.to_json()).unwrap();
        let back: CompilationResultJson = serde_json::from_str(&s).unwrap();
        let back = back.to_result().unwrap();
        assert_eq!(back.word, r.word);
        assert!((verify(&u, &back, net().gate_set()).unwrap() - r.achieved_error).abs() < 1e-12);
    }
}

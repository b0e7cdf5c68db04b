//! Polar encoding and successive-cancellation decoding on the code tree.
//!
//! Bits are `u8` values in `{0, 1}`; LLRs are natural-log ratios with
//! positive values favouring bit 0. Indexing is natural order: the
//! codeword is `x = u · F^{⊗n}` with no bit reversal, so the first half of
//! `u` sits under the check-node (left) child of the root.
//!
//! The three decoders share one depth-first traversal and differ only in
//! where it stops:
//!
//! * SC visits every node down to the leaves;
//! * SSC stops at Rate-0 (β = 0) and Rate-1 (hard decisions) nodes;
//! * Fast-SSC additionally stops at repetition and single-parity-check
//!   nodes.
//!
//! An LLR of exactly zero decides bit 0, everywhere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::PolarCode;

/// Magnitude used in place of an infinite LLR (noiseless observations).
pub const LLR_SATURATION: f64 = 40.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("node (level {level}, offset {offset}) is outside a code of length {len}")]
    NodeOutOfRange { level: usize, offset: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Rate0,
    Rate1,
    Rep,
    Spc,
    Branch,
}

/// Decoder family, ordered by how aggressively the tree is pruned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Sc,
    Ssc,
    FastSsc,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Sc, Variant::Ssc, Variant::FastSsc];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Sc => "sc",
            Variant::Ssc => "ssc",
            Variant::FastSsc => "fastssc",
        }
    }

    /// Whether a node of this kind ends the traversal for this variant.
    pub fn is_terminal(self, kind: NodeKind) -> bool {
        match (self, kind) {
            (_, NodeKind::Branch) => false,
            (Variant::Sc, _) => false,
            (Variant::Ssc, k) => matches!(k, NodeKind::Rate0 | NodeKind::Rate1),
            (Variant::FastSsc, _) => true,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "sc" => Ok(Variant::Sc),
            "ssc" => Ok(Variant::Ssc),
            "fastssc" => Ok(Variant::FastSsc),
            other => Err(format!("unknown decoder variant '{other}' (expected sc, ssc or fastssc)")),
        }
    }
}

/// Check-node update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRule {
    #[default]
    Exact,
    MinSum,
}

/// Hard decision: 1 iff the LLR is negative (zero decides 0).
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    (llr < 0.0) as u8
}

/// Exact check-node combination `ln((1 + e^(a+b)) / (e^a + e^b))`.
///
/// Evaluated as `sign · (min − ln(1+e^−|a−b|) + ln(1+e^−(|a|+|b|)))` when
/// both magnitudes are at least 1 and through `2 atanh(tanh(a/2) tanh(b/2))`
/// otherwise; the sign is always exactly `sign(a) sign(b)`.
pub fn f_left(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (x, y) = (a.abs(), b.abs());
    let m = x.min(y);
    let mut r = if m >= 1.0 {
        let diff = if x == y { 0.0 } else { (x - y).abs() };
        m - (-diff).exp().ln_1p() + (-(x + y)).exp().ln_1p()
    } else {
        2.0 * ((x / 2.0).tanh() * (y / 2.0).tanh()).atanh()
    };
    if r <= 0.0 {
        // underflow for tiny inputs: keep the sign
        r = f64::from_bits(1);
    }
    if (a < 0.0) != (b < 0.0) {
        -r
    } else {
        r
    }
}

/// Min-sum approximation `sign(a) sign(b) min(|a|, |b|)`.
pub fn f_left_min_sum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Variable-node combination `b + (1 − 2c) a`.
#[inline]
pub fn f_right(a: f64, b: f64, c: u8) -> f64 {
    if c == 0 {
        b + a
    } else {
        b - a
    }
}

/// In-place `x ↦ x · F^{⊗n}` over GF(2). The transform is an involution.
pub fn polar_transform_bits(bits: &mut [u8]) {
    let len = bits.len();
    let mut h = 1;
    while h < len {
        for block in bits.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (l, r) in lo.iter_mut().zip(hi.iter()) {
                *l ^= *r;
            }
        }
        h *= 2;
    }
}

/// Encode `info_bits` (one per information position, in increasing index
/// order) with frozen positions set to 0.
pub fn encode(info_bits: &[u8], code: &PolarCode) -> Result<Vec<u8>, CodecError> {
    let info = code.info_positions();
    if info.len() != info_bits.len() {
        return Err(CodecError::LengthMismatch { expected: info.len(), found: info_bits.len() });
    }
    let mut u = vec![0u8; code.len()];
    for (&pos, &bit) in info.iter().zip(info_bits) {
        u[pos] = bit & 1;
    }
    polar_transform_bits(&mut u);
    Ok(u)
}

/// Per-node shape summary used for classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Shape {
    all_frozen: bool,
    all_info: bool,
    /// all frozen except an information rightmost leaf
    rep: bool,
    /// all information except a frozen leftmost leaf
    spc: bool,
}

impl Shape {
    pub(crate) fn leaf(frozen: bool) -> Self {
        Shape { all_frozen: frozen, all_info: !frozen, rep: !frozen, spc: frozen }
    }

    pub(crate) fn join(left: Shape, right: Shape) -> Self {
        Shape {
            all_frozen: left.all_frozen && right.all_frozen,
            all_info: left.all_info && right.all_info,
            rep: left.all_frozen && right.rep,
            spc: left.spc && right.all_info,
        }
    }

    pub(crate) fn kind(self) -> NodeKind {
        if self.all_frozen {
            NodeKind::Rate0
        } else if self.all_info {
            NodeKind::Rate1
        } else if self.rep {
            NodeKind::Rep
        } else if self.spc {
            NodeKind::Spc
        } else {
            NodeKind::Branch
        }
    }
}

/// Classify the node covering leaves `offset·2^level .. (offset+1)·2^level`.
/// `offset` counts nodes of the given level from the left.
pub fn classify(code: &PolarCode, level: usize, offset: usize) -> Result<NodeKind, CodecError> {
    if level > code.n() || offset >= code.len() >> level {
        return Err(CodecError::NodeOutOfRange { level, offset, len: code.len() });
    }
    Ok(classify_mask(&code.frozen()[offset << level..(offset + 1) << level]))
}

/// Classification of an arbitrary power-of-two frozen mask.
pub fn classify_mask(frozen: &[bool]) -> NodeKind {
    shape_of(frozen).kind()
}

fn shape_of(frozen: &[bool]) -> Shape {
    if frozen.len() == 1 {
        return Shape::leaf(frozen[0]);
    }
    let (l, r) = frozen.split_at(frozen.len() / 2);
    Shape::join(shape_of(l), shape_of(r))
}

/// Node kinds of the whole tree in heap order: index 1 is the root, node
/// `k` has children `2k` and `2k + 1`, and the leaves occupy `N..2N`.
pub(crate) fn kind_tree(frozen: &[bool]) -> Vec<NodeKind> {
    let len = frozen.len();
    let mut shapes = vec![Shape::leaf(true); 2 * len];
    for (i, &f) in frozen.iter().enumerate() {
        shapes[len + i] = Shape::leaf(f);
    }
    for k in (1..len).rev() {
        shapes[k] = Shape::join(shapes[2 * k], shapes[2 * k + 1]);
    }
    shapes.into_iter().map(Shape::kind).collect()
}

/// Decoder output: the leaf estimates û and the codeword estimate x̂ (the
/// root β).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
}

impl Decoded {
    /// û restricted to the information positions of `code`.
    pub fn info_bits(&self, code: &PolarCode) -> Vec<u8> {
        code.info_positions().into_iter().map(|i| self.u_hat[i]).collect()
    }
}

/// Reusable decoder for one code and variant. Holds its own workspace, so
/// one instance per thread.
#[derive(Debug, Clone)]
pub struct Decoder {
    variant: Variant,
    rule: CheckRule,
    frozen: Vec<bool>,
    kinds: Vec<NodeKind>,
    // level l occupies alpha[2^l .. 2^(l+1)]
    alpha: Vec<f64>,
    beta: Vec<u8>,
    u: Vec<u8>,
}

impl Decoder {
    pub fn new(code: &PolarCode, variant: Variant) -> Self {
        Self::with_rule(code, variant, CheckRule::Exact)
    }

    pub fn with_rule(code: &PolarCode, variant: Variant, rule: CheckRule) -> Self {
        let len = code.len();
        Decoder {
            variant,
            rule,
            frozen: code.frozen().to_vec(),
            kinds: kind_tree(code.frozen()),
            alpha: vec![0.0; 2 * len],
            beta: vec![0; len],
            u: vec![0; len],
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    pub fn decode(&mut self, llr: &[f64]) -> Result<Decoded, CodecError> {
        let len = self.len();
        if llr.len() != len {
            return Err(CodecError::LengthMismatch { expected: len, found: llr.len() });
        }
        self.alpha[len..].copy_from_slice(llr);
        let n = len.trailing_zeros() as usize;
        self.node(n, 0, 1);
        Ok(Decoded { u_hat: self.u.clone(), x_hat: self.beta.clone() })
    }

    fn node(&mut self, level: usize, offset: usize, heap: usize) {
        let size = 1usize << level;
        if level == 0 {
            let bit = if self.frozen[offset] { 0 } else { hard_decision(self.alpha[1]) };
            self.beta[offset] = bit;
            self.u[offset] = bit;
            return;
        }
        let kind = self.kinds[heap];
        if self.variant.is_terminal(kind) && self.terminal(kind, size, offset) {
            return;
        }

        let h = size / 2;
        let (lower, upper) = self.alpha.split_at_mut(size);
        let parent = &upper[..size];
        for i in 0..h {
            lower[h + i] = match self.rule {
                CheckRule::Exact => f_left(parent[i], parent[i + h]),
                CheckRule::MinSum => f_left_min_sum(parent[i], parent[i + h]),
            };
        }
        self.node(level - 1, offset, 2 * heap);

        let (lower, upper) = self.alpha.split_at_mut(size);
        let parent = &upper[..size];
        for i in 0..h {
            lower[h + i] = f_right(parent[i], parent[i + h], self.beta[offset + i]);
        }
        self.node(level - 1, offset + h, 2 * heap + 1);

        let (left, right) = self.beta[offset..offset + size].split_at_mut(h);
        for (l, r) in left.iter_mut().zip(right.iter()) {
            *l ^= *r;
        }
    }

    /// Decode a terminal node in one step. Returns false when the node
    /// must be decoded by recursion instead (a Rate-1 node holding an LLR
    /// of exactly zero, where hard decisions and SC can differ).
    fn terminal(&mut self, kind: NodeKind, size: usize, offset: usize) -> bool {
        let alpha = &self.alpha[size..2 * size];
        let beta = &mut self.beta[offset..offset + size];
        match kind {
            NodeKind::Rate0 => beta.fill(0),
            NodeKind::Rate1 => {
                if alpha.iter().any(|&a| a == 0.0) {
                    return false;
                }
                for (b, &a) in beta.iter_mut().zip(alpha) {
                    *b = hard_decision(a);
                }
            }
            NodeKind::Rep => {
                let bit = hard_decision(rep_sum(alpha));
                beta.fill(bit);
            }
            NodeKind::Spc => wagner(alpha, beta),
            NodeKind::Branch => unreachable!("branch nodes are never terminal"),
        }
        let u = &mut self.u[offset..offset + size];
        u.copy_from_slice(beta);
        polar_transform_bits(u);
        true
    }
}

/// Sum of a repetition node's LLRs, accumulated in the same pairwise order
/// SC uses (`v_i + v_{i+h}`, halving `h`), so the decision is bit-identical
/// to the leaf-by-leaf recursion.
pub fn rep_sum(alpha: &[f64]) -> f64 {
    let mut v = alpha.to_vec();
    let mut h = v.len() / 2;
    while h > 0 {
        for i in 0..h {
            v[i] = v[i + h] + v[i];
        }
        h /= 2;
    }
    v[0]
}

/// Wagner decoding of a single parity-check codeword: hard decisions,
/// then on odd parity flip the least reliable position (first on ties).
pub fn wagner(alpha: &[f64], beta: &mut [u8]) {
    let mut parity = 0u8;
    let mut weakest = 0;
    for (i, (&a, b)) in alpha.iter().zip(beta.iter_mut()).enumerate() {
        *b = hard_decision(a);
        parity ^= *b;
        if a.abs() < alpha[weakest].abs() {
            weakest = i;
        }
    }
    if parity != 0 {
        beta[weakest] ^= 1;
    }
}

pub fn sc_decode(llr: &[f64], code: &PolarCode) -> Result<Decoded, CodecError> {
    Decoder::new(code, Variant::Sc).decode(llr)
}

pub fn ssc_decode(llr: &[f64], code: &PolarCode, variant: Variant) -> Result<Decoded, CodecError> {
    Decoder::new(code, variant).decode(llr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn code(mask: &[u8]) -> PolarCode {
        PolarCode::from_frozen_mask(mask.iter().map(|&b| b == 1).collect()).unwrap()
    }

    // Oracle: direct evaluation of ln((1 + e^(a+b)) / (e^a + e^b)).
    fn boxplus_direct(a: f64, b: f64) -> f64 {
        ((1.0 + (a + b).exp()) / (a.exp() + b.exp())).ln()
    }

    #[test]
    fn f_left_examples() {
        assert_eq!(f_left(0.0, 7.0), 0.0);
        assert_eq!(f_left(-2.0, 0.0), 0.0);
        assert!((f_left(3.0, -1.0) - (-0.891_221_916_874_837)).abs() < 1e-12);
        assert_eq!(f_left_min_sum(3.0, -1.0), -1.0);
        // stable at the saturation magnitude
        assert!((f_left(40.0, 40.0) - (40.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((f_left(-40.0, 39.0) + 39.0 - (-1.0f64).exp().ln_1p()).abs() < 1e-12);
        assert!(f_left(1e-200, -1e-200) < 0.0);
    }

    #[test]
    fn f_right_examples() {
        assert_eq!(f_right(1.5, 2.0, 0), 3.5);
        assert_eq!(f_right(2.5, -1.0, 1), -3.5);
        assert_eq!(f_right(0.0, -4.0, 1), -4.0);
        assert_eq!(f_right(0.0, -4.0, 0), -4.0);
    }

    #[test]
    fn encode_examples() {
        let full2 = code(&[0, 0]);
        assert_eq!(encode(&[0, 1], &full2).unwrap(), vec![1, 1]);
        let full4 = code(&[0, 0, 0, 0]);
        assert_eq!(encode(&[0, 0, 0, 1], &full4).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(encode(&[0, 0, 0, 0], &full4).unwrap(), vec![0; 4]);
        assert!(matches!(encode(&[1], &full4), Err(CodecError::LengthMismatch { .. })));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_mask(&[true; 4]), NodeKind::Rate0);
        assert_eq!(classify_mask(&[false; 4]), NodeKind::Rate1);
        assert_eq!(classify_mask(&[true, true, true, false]), NodeKind::Rep);
        assert_eq!(classify_mask(&[true, false, false, false]), NodeKind::Spc);
        assert_eq!(classify_mask(&[true, false]), NodeKind::Rep);
        assert_eq!(classify_mask(&[false, true]), NodeKind::Branch);
        assert_eq!(classify_mask(&[true, true, false, false]), NodeKind::Branch);
        let c = code(&[1, 1, 1, 0, 1, 0, 0, 0]);
        assert_eq!(classify(&c, 2, 0).unwrap(), NodeKind::Rep);
        assert_eq!(classify(&c, 2, 1).unwrap(), NodeKind::Spc);
        assert_eq!(classify(&c, 3, 0).unwrap(), NodeKind::Branch);
        assert!(classify(&c, 2, 2).is_err());
        assert!(classify(&c, 4, 0).is_err());
    }

    #[test]
    fn kind_tree_agrees_with_classify() {
        let c = code(&[1, 1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0]);
        let kinds = kind_tree(c.frozen());
        for level in 0..=4 {
            for offset in 0..(16 >> level) {
                let heap = (16 >> level) + offset;
                assert_eq!(kinds[heap], classify(&c, level, offset).unwrap());
            }
        }
    }

    #[test]
    fn sc_worked_examples() {
        let c = code(&[1, 0]);
        let d = sc_decode(&[-1.0, 3.0], &c).unwrap();
        assert_eq!(d.u_hat, vec![0, 0]);
        assert_eq!(d.x_hat, vec![0, 0]);

        let frozen = code(&[1; 8]);
        let d = sc_decode(&[-1.0, 2.0, -3.0, 4.0, -5.0, 6.0, -7.0, 8.0], &frozen).unwrap();
        assert_eq!(d.u_hat, vec![0; 8]);

        let full = code(&[0; 8]);
        let d = sc_decode(&[1.0; 8], &full).unwrap();
        assert_eq!(d.u_hat, vec![0; 8]);
        assert!(sc_decode(&[1.0; 4], &full).is_err());
    }

    #[test]
    fn fast_ssc_node_examples() {
        let rep = code(&[1, 1, 1, 0]);
        let d = ssc_decode(&[1.0, -2.0, 0.5, 0.3], &rep, Variant::FastSsc).unwrap();
        assert_eq!(d.x_hat, vec![1, 1, 1, 1]);
        assert_eq!(d.u_hat, vec![0, 0, 0, 1]);

        let spc = code(&[1, 0, 0, 0]);
        let d = ssc_decode(&[3.0, 1.0, -0.5, 2.0], &spc, Variant::FastSsc).unwrap();
        assert_eq!(d.x_hat, vec![0, 0, 0, 0]);
    }

    #[test]
    fn exact_zero_llr_decides_zero() {
        let full = code(&[0, 0]);
        for v in [Variant::Sc, Variant::Ssc, Variant::FastSsc] {
            assert_eq!(ssc_decode(&[0.0, -5.0], &full, v).unwrap(), sc_decode(&[0.0, -5.0], &full).unwrap());
        }
        let rep = code(&[1, 1, 1, 0]);
        let d = ssc_decode(&[1.0, -1.0, 0.0, 0.0], &rep, Variant::FastSsc).unwrap();
        assert_eq!(d.x_hat, vec![0; 4]);
    }

    // Brute-force ML over the even-weight codewords of length `len`.
    fn spc_ml(alpha: &[f64]) -> Vec<u8> {
        let len = alpha.len();
        let mut best = (f64::NEG_INFINITY, 0u32);
        for word in 0u32..(1 << len) {
            if word.count_ones() % 2 != 0 {
                continue;
            }
            let metric: f64 = (0..len)
                .map(|i| if word >> i & 1 == 1 { -alpha[i] } else { alpha[i] })
                .sum();
            if metric > best.0 {
                best = (metric, word);
            }
        }
        (0..len).map(|i| (best.1 >> i & 1) as u8).collect()
    }

    fn llr_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![
                8 => -12.0f64..12.0,
                1 => Just(0.0),
                1 => prop::sample::select(vec![-LLR_SATURATION, LLR_SATURATION, 1.0, -1.0]),
            ],
            len,
        )
    }

    fn code_and_llr() -> impl Strategy<Value = (PolarCode, Vec<f64>)> {
        (1usize..=7).prop_flat_map(|n| {
            let len = 1usize << n;
            (
                prop::collection::vec(prop::bool::weighted(0.5), len)
                    .prop_map(|m| PolarCode::from_frozen_mask(m).unwrap()),
                llr_vec(len),
            )
        })
    }

    proptest! {
        #[test]
        fn boxplus_matches_direct_form(a in -15.0f64..15.0, b in -15.0f64..15.0) {
            let direct = boxplus_direct(a, b);
            prop_assert!((f_left(a, b) - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
            if a != 0.0 && b != 0.0 {
                prop_assert_eq!(f_left(a, b) < 0.0, (a < 0.0) != (b < 0.0));
            }
        }

        #[test]
        fn ssc_equals_sc((c, llr) in code_and_llr()) {
            let sc = sc_decode(&llr, &c).unwrap();
            prop_assert_eq!(ssc_decode(&llr, &c, Variant::Ssc).unwrap(), sc);
        }

        #[test]
        fn reencode_consistency((c, llr) in code_and_llr()) {
            for v in Variant::ALL {
                let d = ssc_decode(&llr, &c, v).unwrap();
                prop_assert_eq!(encode(&d.info_bits(&c), &c).unwrap(), d.x_hat.clone());
            }
        }

        #[test]
        fn rep_rule_equals_sc(k in 1usize..=5, llr in llr_vec(32)) {
            let len = 1usize << k;
            let mut mask = vec![true; len];
            mask[len - 1] = false;
            let c = PolarCode::from_frozen_mask(mask).unwrap();
            let llr = &llr[..len];
            prop_assert_eq!(ssc_decode(llr, &c, Variant::FastSsc).unwrap(), sc_decode(llr, &c).unwrap());
        }

        #[test]
        fn wagner_is_ml(k in 2usize..=4, llr in prop::collection::vec(-8.0f64..8.0, 16)) {
            let len = 1usize << k;
            let alpha = &llr[..len];
            let mut beta = vec![0u8; len];
            wagner(alpha, &mut beta);
            let ml = spc_ml(alpha);
            let metric = |w: &[u8]| -> f64 {
                w.iter().zip(alpha).map(|(&b, &a)| if b == 1 { -a } else { a }).sum()
            };
            prop_assert!((metric(&beta) - metric(&ml)).abs() < 1e-12);
        }

        #[test]
        fn encode_then_noiseless_decode(n in 1usize..=8, seed in any::<u64>()) {
            let len = 1usize << n;
            let mask: Vec<bool> = (0..len).map(|i| (seed.rotate_left(i as u32) & 3) == 0).collect();
            let c = PolarCode::from_frozen_mask(mask).unwrap();
            let info: Vec<u8> = (0..c.info_len()).map(|i| (seed >> (i % 64) & 1) as u8).collect();
            let x = encode(&info, &c).unwrap();
            let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { LLR_SATURATION } else { -LLR_SATURATION }).collect();
            for v in Variant::ALL {
                let d = ssc_decode(&llr, &c, v).unwrap();
                prop_assert_eq!(&d.x_hat, &x);
                prop_assert_eq!(d.info_bits(&c), info.clone());
            }
        }
    }
}

//! Structural cut bounds: the crossing-count functional `T`, the
//! link-capacity relaxation of the min cut used by single-route guarantees,
//! and the per-class cut bound families for the `L = 2, N = 3` network.
//!
//! The common theme is replacing MIMO crossing terms with few-link
//! expressions whose cost is a dimension-only constant, so that a cut's
//! value can be charged against individual links and, from there, against
//! small subnetworks.

use num_integer::Integer;

use crate::capacity_core::{
    cut_value, decode_masks, link_capacity, mimo_capacity_sub, min_over_cuts,
};
use crate::network_model::{full_mask, mask_indices, Cut, LayeredNetwork};
use crate::{domain_err, Fraction, Result};

/// Per-layer source-side cardinalities `|y_l|` of a cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityProfile {
    pub s: Vec<usize>,
}

impl CardinalityProfile {
    pub fn new(s: Vec<usize>, n: usize) -> Result<Self> {
        if s.is_empty() {
            return domain_err("cardinality profile needs at least one layer");
        }
        if s.iter().any(|&v| v > n) {
            return domain_err(format!("cardinality profile entry exceeds {n}"));
        }
        Ok(Self { s })
    }

    pub fn of_cut(cut: &Cut) -> Self {
        Self {
            s: cut.masks().iter().map(|m| m.count_ones() as usize).collect(),
        }
    }
}

/// Number of crossing "lanes" of a cut:
/// `T = sum_{l=0..L} min(|y_l|, |y^c_{l+1}|)` with the convention that the
/// source side of layer 0 is `{S}` and the destination side of layer `L+1`
/// is `{D}` (both of size 1). Depends only on the cardinality profile.
pub fn t_of_profile(profile: &CardinalityProfile, n: usize) -> usize {
    let s = &profile.s;
    let l = s.len();
    let mut t = 1usize.min(n - s[0]);
    for li in 1..l {
        t += s[li - 1].min(n - s[li]);
    }
    t + s[l - 1].min(1)
}

/// [`t_of_profile`] evaluated on a concrete cut.
pub fn t_of_cut(cut: &Cut, n: usize) -> usize {
    t_of_profile(&CardinalityProfile::of_cut(cut), n)
}

/// Exact maximum of `T` over all cardinality profiles, with the closed-form
/// bound it is compared against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxT {
    pub max_t: usize,
    /// `(L-1)N/2 + 2` for odd `L`, `LN/2 + 2` for even `L`. The brute-force
    /// maximum never exceeds it; for even `L` it can sit strictly below.
    pub closed_form_bound: usize,
    pub argmax: CardinalityProfile,
}

/// Maximizes `T` by enumerating all `(N+1)^L` cardinality profiles (cuts
/// with equal profiles have equal `T`, so cut-level enumeration would be
/// redundant). Refuses when the profile count exceeds `2^24`.
pub fn max_t(l: usize, n: usize) -> Result<MaxT> {
    if l < 1 || n < 1 {
        return domain_err(format!("max_t needs l >= 1 and n >= 1, got l={l}, n={n}"));
    }
    let base = n as u64 + 1;
    let total = base
        .checked_pow(l as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| {
            crate::Error::Budget(format!(
                "enumerating ({base})^{l} cardinality profiles exceeds the 2^24 budget"
            ))
        })?;

    let mut best = 0usize;
    let mut arg = vec![0usize; l];
    let mut profile = CardinalityProfile { s: vec![0; l] };
    for idx in 0..total {
        // Decode idx in base N+1, first layer most significant, so the
        // argmax is the lexicographically smallest profile among ties.
        let mut rest = idx;
        for j in (0..l).rev() {
            profile.s[j] = (rest % base) as usize;
            rest /= base;
        }
        let t = t_of_profile(&profile, n);
        if t > best || idx == 0 {
            best = t;
            arg.copy_from_slice(&profile.s);
        }
    }

    let closed_form_bound = if l.is_odd() {
        (l - 1) * n / 2 + 2
    } else {
        l * n / 2 + 2
    };
    Ok(MaxT {
        max_t: best,
        closed_form_bound,
        argmax: CardinalityProfile { s: arg },
    })
}

/// Guaranteed capacity fraction for the best single-relay-per-layer route:
/// `2/((L-1)N + 4)` when `L` is odd, `2/(LN + 2)` when `L` is even.
pub fn alpha(l: usize, n: usize) -> Fraction {
    assert!(l >= 1 && n >= 1, "alpha needs l >= 1 and n >= 1");
    if l.is_odd() {
        Fraction::new(2, ((l - 1) * n + 4) as u64)
    } else {
        Fraction::new(2, (l * n + 2) as u64)
    }
}

/// Link-capacity relaxation of the min cut: for each cut, every MIMO
/// crossing term is replaced by `min(|y_l|, |y^c_{l+1}|)` times the best
/// single link across the crossing, and the minimum over all `2^(L*N)` cuts
/// is returned. The min cut is within `(2 + 2N(L-1)) * log2(N)` of it.
pub fn c_tilde_k1(net: &LayeredNetwork, limit: usize) -> Result<f64> {
    let l = net.l();
    let n = net.n();
    let full = full_mask(n);
    // Per-matrix link capacities, indexed [rx * n_tx + tx].
    let caps: Vec<Vec<f64>> = net
        .matrices()
        .iter()
        .map(|m| {
            (0..m.n_rx() * m.n_tx())
                .map(|idx| link_capacity(m.get(idx / m.n_tx(), idx % m.n_tx())))
                .collect()
        })
        .collect();

    let best_link = |caps: &[f64], n_tx: usize, tx_mask: u32, rx_mask: u32| -> f64 {
        let mut mx = 0.0f64;
        let mut rx = rx_mask;
        while rx != 0 {
            let j = rx.trailing_zeros() as usize;
            rx &= rx - 1;
            let mut tx = tx_mask;
            while tx != 0 {
                let i = tx.trailing_zeros() as usize;
                tx &= tx - 1;
                mx = mx.max(caps[j * n_tx + i]);
            }
        }
        mx
    };

    let (value, _, _) = min_over_cuts(l, n, limit, |code| {
        let mut masks = [0u32; 64];
        decode_masks(code, l, n, &mut masks);
        // S side: min(1, |y1^c|) lanes, so just the best crossing link.
        let mut total = best_link(&caps[0], 1, 0b1, !masks[0] & full);
        for li in 1..l {
            let tx_mask = masks[li - 1];
            let rx_mask = !masks[li] & full;
            if tx_mask != 0 && rx_mask != 0 {
                let lanes = (tx_mask.count_ones().min(rx_mask.count_ones())) as f64;
                total += lanes * best_link(&caps[li], n, tx_mask, rx_mask);
            }
        }
        total + best_link(&caps[l], n, masks[l - 1], 0b1)
    })?;
    Ok(value)
}

// --- L = 2, N = 3 cut classes ----------------------------------------------

/// Relabeling that maps a cut onto its class representative: `layer1[i]` is
/// the actual relay (0-based) playing the role of representative relay `i`
/// in the first layer, likewise `layer2`; applied after reflecting the
/// network when `reflected` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassParams {
    pub layer1: [usize; 3],
    pub layer2: [usize; 3],
    pub reflected: bool,
}

/// One of the eight cut classes of the `L = 2, N = 3` network. Classes 1-7
/// carry the relabeling/reflection taking the cut to the class
/// representative; class 8 ("everything else") carries none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutClass {
    pub id: u8,
    pub params: Option<ClassParams>,
}

/// Bound family of one cut: every member value, the class constant, and the
/// family minimum. `cut_value <= f + g_y_bits` holds for every member `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct FBoundResult {
    pub class_id: u8,
    pub f_values: Vec<f64>,
    pub g_y_bits: f64,
    pub min_f_bits: f64,
}

/// Representative source-side masks per class (relay 1 is bit 0).
fn representative_masks(id: u8) -> [u32; 2] {
    match id {
        1 => [0b000, 0b000],
        2 => [0b100, 0b000],
        3 => [0b100, 0b001],
        4 => [0b100, 0b011],
        5 => [0b110, 0b000],
        6 => [0b110, 0b001],
        7 => [0b111, 0b000],
        _ => unreachable!("class 8 has no representative"),
    }
}

/// Class id and whether reflection is needed, keyed by `(|y1|, |y2|)`.
/// `None` means class 8. Reflection maps shape `(a, b)` to `(3-b, 3-a)`;
/// the class-8 shape set is closed under it.
fn shape_class(a: usize, b: usize) -> Option<(u8, bool)> {
    match (a, b) {
        (0, 0) => Some((1, false)),
        (3, 3) => Some((1, true)),
        (1, 0) => Some((2, false)),
        (3, 2) => Some((2, true)),
        (1, 1) => Some((3, false)),
        (2, 2) => Some((3, true)),
        (1, 2) => Some((4, false)),
        (2, 0) => Some((5, false)),
        (3, 1) => Some((5, true)),
        (2, 1) => Some((6, false)),
        (3, 0) => Some((7, false)),
        _ => None,
    }
}

/// Per-layer relabeling: representative subset positions map onto the actual
/// subset in ascending order, and the remaining positions fill with the
/// remaining relays, also ascending.
fn layer_relabel(representative_mask: u32, actual_mask: u32) -> [usize; 3] {
    let canon = mask_indices(representative_mask);
    let actual = mask_indices(actual_mask);
    debug_assert_eq!(canon.len(), actual.len());
    let mut perm = [usize::MAX; 3];
    for (c, a) in canon.iter().zip(&actual) {
        perm[*c] = *a;
    }
    let mut rest = (0..3usize).filter(|i| !actual.contains(i));
    for slot in perm.iter_mut() {
        if *slot == usize::MAX {
            *slot = rest.next().expect("three relays total");
        }
    }
    perm
}

fn check_l2n3_cut(cut: &Cut) -> Result<()> {
    if cut.masks().len() != 2 || cut.masks().iter().any(|&m| m > 0b111) {
        return domain_err("cut classification requires an L=2, N=3 cut");
    }
    Ok(())
}

fn check_l2n3_net(net: &LayeredNetwork) -> Result<()> {
    if net.l() != 2 || net.n() != 3 {
        return domain_err(format!(
            "cut-class bounds are defined for L=2, N=3 networks, got L={}, N={}",
            net.l(),
            net.n()
        ));
    }
    Ok(())
}

/// Classifies an `L = 2, N = 3` cut into one of the eight classes. The class
/// is determined by the pair `(|y1|, |y2|)` up to relay relabeling within
/// each layer and the reflection `Y^r = {S, y2^c, y1^c}`; the returned
/// parameters relabel the (possibly reflected) cut onto the representative.
pub fn classify_cut_l2n3(cut: &Cut) -> Result<CutClass> {
    check_l2n3_cut(cut)?;
    let a = cut.layer(0).count_ones() as usize;
    let b = cut.layer(1).count_ones() as usize;
    let Some((id, reflected)) = shape_class(a, b) else {
        return Ok(CutClass { id: 8, params: None });
    };
    let oriented = if reflected { cut.reflected(3) } else { cut.clone() };
    let rep = representative_masks(id);
    let params = ClassParams {
        layer1: layer_relabel(rep[0], oriented.layer(0)),
        layer2: layer_relabel(rep[1], oriented.layer(1)),
        reflected,
    };
    Ok(CutClass { id, params: Some(params) })
}

/// The network as seen through a class's parameters: reflected if required,
/// then relays relabeled per layer so that the classified cut becomes the
/// class representative. Cut values are invariant under both steps.
fn canonical_view(net: &LayeredNetwork, params: &ClassParams) -> LayeredNetwork {
    let base = if params.reflected {
        net.reflected()
    } else {
        net.clone()
    };
    let p1 = params.layer1.to_vec();
    let p2 = params.layer2.to_vec();
    let m0 = base.matrix(0).submatrix(&p1, &[0]).expect("permutation in range");
    let m1 = base.matrix(1).submatrix(&p2, &p1).expect("permutation in range");
    let m2 = base.matrix(2).submatrix(&[0], &p2).expect("permutation in range");
    LayeredNetwork::new(2, 3, vec![m0, m1, m2]).expect("shape preserved")
}

/// Additive constant `G_Y` of each class, in bits. These are the constants
/// under which `cut_value <= f + G_Y` holds for every family member: each
/// SIMO/MISO crossing replaced by its best link costs `log2(#links)`, and
/// the 3x3 crossing of class 7 scaled down to 2x2 subchannels costs
/// `(3/2) * log2(3 choose 2)^2 = 3 log2(3)`.
fn class_gap_bits(id: u8) -> f64 {
    let log2_3 = 3.0f64.log2();
    match id {
        1 => log2_3,
        // Class 2 bounds a 2-receiver SIMO term (costs 1 bit) and a
        // 3-receiver one (costs log2(3)): log2(6) altogether.
        2 => 6.0f64.log2(),
        3 | 4 | 6 => 2.0,
        5 => 2.0 * log2_3,
        7 => 3.0 * log2_3,
        8 => 0.0,
        _ => unreachable!(),
    }
}

/// All members of the cut's bound family, evaluated on the relabeled
/// network. Member order is fixed per class; rows with a free relay
/// parameter `p` contribute one member per `p` in `{1, 2, 3}`. Class 8 has
/// the exact cut value as its only member and a zero constant.
pub fn f_bound_l2n3(net: &LayeredNetwork, cut: &Cut) -> Result<FBoundResult> {
    check_l2n3_net(net)?;
    let class = classify_cut_l2n3(cut)?;

    let f_values = match &class.params {
        None => vec![cut_value(net, cut)?],
        Some(params) => {
            let cn = canonical_view(net, params);
            family_members(class.id, &cn)
        }
    };
    let min_f_bits = f_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FBoundResult {
        class_id: class.id,
        g_y_bits: class_gap_bits(class.id),
        f_values,
        min_f_bits,
    })
}

/// Family members per class, written against the class representative (relay
/// indices are 0-based, so representative relay "3" is index 2).
fn family_members(id: u8, cn: &LayeredNetwork) -> Vec<f64> {
    let r0 = |i: usize| link_capacity(cn.matrix(0).get(i, 0));
    let r1 = |tx: usize, rx: usize| link_capacity(cn.matrix(1).get(rx, tx));
    let r2 = |i: usize| link_capacity(cn.matrix(2).get(0, i));
    let m1 = |rows: &[usize], cols: &[usize]| mimo_capacity_sub(cn.matrix(1), rows, cols);
    let pairs: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
    let without = |p: usize| -> Vec<usize> { (0..3).filter(|&i| i != p).collect() };

    match id {
        // y = ({}, {}): the single S-side SIMO crossing.
        1 => vec![r0(0).max(r0(1)).max(r0(2))],
        // y = ({3}, {}): S -> {1,2} plus relay 3 -> everyone.
        2 => vec![r0(0).max(r0(1)) + r1(2, 0).max(r1(2, 1)).max(r1(2, 2))],
        // y = ({3}, {1}): S -> {1,2}, relay 3 -> {2,3}, relay 1 -> D.
        3 => vec![r0(0).max(r0(1)) + r1(2, 1).max(r1(2, 2)) + r2(0)],
        // y = ({3}, {1,2}): S -> {1,2}, the 3->3 link, {1,2} -> D.
        4 => vec![r0(0).max(r0(1)) + r1(2, 2) + r2(0).max(r2(1))],
        // y = ({2,3}, {}): S -> {1} plus the {2,3} -> everyone crossing,
        // bounded three ways: best receiver pair; per-transmitter best
        // links; peel one receiver p off the MIMO term.
        5 => {
            let base = r0(0);
            let mut fs = vec![
                base + pairs.iter().map(|v| m1(v, &[1, 2])).fold(f64::MIN, f64::max),
                base + (0..3).map(|i| r1(1, i)).fold(f64::MIN, f64::max)
                    + (0..3).map(|i| r1(2, i)).fold(f64::MIN, f64::max),
            ];
            for p in 0..3 {
                fs.push(base + r1(1, p).max(r1(2, p)) + m1(&without(p), &[1, 2]));
            }
            fs
        }
        // y = ({2,3}, {1}): the 2x2 crossing bounded by transmitter split,
        // receiver split, or kept exact.
        6 => {
            let ends = r0(0) + r2(0);
            vec![
                ends + r1(1, 1).max(r1(1, 2)) + r1(2, 1).max(r1(2, 2)),
                ends + r1(1, 1).max(r1(2, 1)) + r1(1, 2).max(r1(2, 2)),
                ends + m1(&[1, 2], &[1, 2]),
            ]
        }
        // y = ({1,2,3}, {}): the full 3x3 crossing, scaled to the best 2x2
        // subchannel or split by peeling one transmitter p.
        7 => {
            let best_pair = pairs
                .iter()
                .flat_map(|u| pairs.iter().map(move |v| m1(v, u)))
                .fold(f64::MIN, f64::max);
            let mut fs = vec![1.5 * best_pair];
            for p in 0..3 {
                let peel = (0..3).map(|i| r1(p, i)).fold(f64::MIN, f64::max);
                let rest = pairs
                    .iter()
                    .map(|v| m1(v, &without(p)))
                    .fold(f64::MIN, f64::max);
                fs.push(peel + rest);
            }
            fs
        }
        _ => unreachable!("class 8 is handled by the caller"),
    }
}

/// Family-minimum relaxation of the min cut for `L = 2, N = 3`: the minimum
/// over all 64 cuts of the smallest family member (constants not added).
/// The min cut satisfies `c_bar <= c_tilde_k2 + 3 log2(3)`; the reverse
/// direction is not claimed and must not be assumed.
pub fn c_tilde_k2(net: &LayeredNetwork) -> Result<f64> {
    check_l2n3_net(net)?;
    let mut best = f64::INFINITY;
    for code in 0..(1u64 << 6) {
        let cut = Cut::from_lex_code(code, 2, 3);
        best = best.min(f_bound_l2n3(net, &cut)?.min_f_bits);
    }
    Ok(best)
}

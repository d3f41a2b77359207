//! Selection and decomposition bounds on MIMO capacity.
//!
//! Three families of results, all certified numerically rather than assumed:
//!
//! - *Antenna selection*: the best `kt x kr` subchannel retains at least a
//!   `min(kt, kr) / min(n_tx, n_rx)` share of the full capacity up to an
//!   additive constant that depends only on the dimensions
//!   ([`selection_bound`], [`eigen_retention_check`]).
//! - *Decomposition*: splitting either side of the channel into a subset and
//!   its complement can only overcount capacity ([`decomposition_bound`]),
//!   with equality on block-diagonal channels.
//! - *Split bound functions* [`g1`], [`g2`], [`g3`]: the forms the cut
//!   analysis composes per layer — column split, row split, and the scaled
//!   best-square-subchannel bound with its additive constant.

use itertools::Itertools;
use num_integer::binomial;

use crate::capacity_core::{mimo_capacity, mimo_capacity_sub};
use crate::network_model::ChannelMatrix;
use crate::{domain_err, Fraction, Result, TOLERANCE_BITS};

/// Which side of the channel a subset refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Transmitters,
    Receivers,
}

/// Both sides of the antenna-selection inequality
/// `C_full <= scale * C_best_sub + gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionBoundReport {
    pub full_capacity: f64,
    pub best_sub_capacity: f64,
    pub kt: usize,
    pub kr: usize,
    /// Exact scale `min(n_tx, n_rx) / min(kt, kr)`.
    pub scale: Fraction,
    /// Additive constant: `scale * log2(C(n_tx, kt) * C(n_rx, kr))`.
    pub gap_constant_bits: f64,
    pub holds: bool,
}

/// Both sides of the split inequality `C_full <= C_part + C_complement`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub full_bits: f64,
    pub part_bits: f64,
    pub complement_bits: f64,
    pub holds: bool,
}

fn check_subset(len: usize, side_len: usize, what: &str) -> Result<()> {
    if len == 0 || len >= side_len {
        return domain_err(format!(
            "{what} subset must be proper and nonempty (matrix side has {side_len})"
        ));
    }
    Ok(())
}

fn validated_subset(subset: &[usize], side_len: usize, what: &str) -> Result<Vec<usize>> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    if sorted.iter().any(|&i| i >= side_len) {
        return domain_err(format!("{what} subset index out of range (side has {side_len})"));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return domain_err(format!("{what} subset repeats an index"));
    }
    check_subset(sorted.len(), side_len, what)?;
    Ok(sorted)
}

fn complement(sorted_subset: &[usize], side_len: usize) -> Vec<usize> {
    let mut iter = sorted_subset.iter().peekable();
    (0..side_len)
        .filter(|i| {
            if iter.peek() == Some(&i) {
                iter.next();
                false
            } else {
                true
            }
        })
        .collect()
}

/// Exhaustively finds the `kt`-column x `kr`-row submatrix of maximum MIMO
/// capacity. Returns `(rows, cols, capacity)`; ties go to the
/// lexicographically smallest `(rows, cols)` pair.
pub fn best_subchannel(
    h: &ChannelMatrix,
    kt: usize,
    kr: usize,
) -> Result<(Vec<usize>, Vec<usize>, f64)> {
    if kt == 0 || kt > h.n_tx() || kr == 0 || kr > h.n_rx() {
        return domain_err(format!(
            "subchannel size {kt}x{kr} (tx x rx) out of range for a {}x{} matrix",
            h.n_rx(),
            h.n_tx()
        ));
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg: (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    for rows in (0..h.n_rx()).combinations(kr) {
        for cols in (0..h.n_tx()).combinations(kt) {
            let v = mimo_capacity_sub(h, &rows, &cols);
            if v > best {
                best = v;
                arg = (rows.clone(), cols);
            }
        }
    }
    Ok((arg.0, arg.1, best))
}

/// Evaluates the antenna-selection inequality: the full capacity is at most
/// `min(n_tx, n_rx) / min(kt, kr)` times the best `kt x kr` subchannel
/// capacity plus a dimension-only constant. This is a theorem; `holds` being
/// false on valid input signals an implementation bug.
pub fn selection_bound(h: &ChannelMatrix, kt: usize, kr: usize) -> Result<SelectionBoundReport> {
    let (_, _, best_sub) = best_subchannel(h, kt, kr)?;
    let full = mimo_capacity(h);
    let scale = Fraction::new(h.n_tx().min(h.n_rx()) as u64, kt.min(kr) as u64);
    let choices = binomial(h.n_tx() as u64, kt as u64) * binomial(h.n_rx() as u64, kr as u64);
    let gap = scale.as_f64() * (choices as f64).log2();
    let holds = full <= scale.as_f64() * best_sub + gap + TOLERANCE_BITS;
    Ok(SelectionBoundReport {
        full_capacity: full,
        best_sub_capacity: best_sub,
        kt,
        kr,
        scale,
        gap_constant_bits: gap,
        holds,
    })
}

/// Greedy decremental receive-row selection: repeatedly drops the row whose
/// removal costs the least capacity until `k` rows remain. Returns the kept
/// rows (ascending) and their capacity with all columns. Never beats the
/// brute-force [`best_subchannel`] with `kt = n_tx`, and carries no hard
/// guarantee here — it is an empirical comparator for the selection bound.
pub fn greedy_decremental_selection(h: &ChannelMatrix, k: usize) -> Result<(Vec<usize>, f64)> {
    if k == 0 || k > h.n_rx() {
        return domain_err(format!(
            "selection size {k} out of range for {} receive rows",
            h.n_rx()
        ));
    }
    let cols: Vec<usize> = (0..h.n_tx()).collect();
    let mut rows: Vec<usize> = (0..h.n_rx()).collect();
    while rows.len() > k {
        let mut best_pos = 0;
        let mut best_val = f64::NEG_INFINITY;
        for pos in 0..rows.len() {
            let mut remaining = rows.clone();
            remaining.remove(pos);
            let v = mimo_capacity_sub(h, &remaining, &cols);
            if v > best_val {
                best_val = v;
                best_pos = pos;
            }
        }
        rows.remove(best_pos);
    }
    let value = mimo_capacity_sub(h, &rows, &cols);
    Ok((rows, value))
}

/// Verifies eigenvalue retention under row selection: the best `k`-row
/// submatrix (all columns kept) has capacity at least
/// `(k / min(n_rx, n_tx)) * C_full - log2(G_v)` with
/// `G_v = prod_{i=1..k} (max_dim - i + 1)(min_dim - i + 1)`.
/// Must return true for every finite matrix.
pub fn eigen_retention_check(h: &ChannelMatrix, k: usize) -> Result<bool> {
    let n_min = h.n_rx().min(h.n_tx());
    if k == 0 || k > n_min {
        return domain_err(format!(
            "retention check needs 1 <= k <= {n_min}, got {k}"
        ));
    }
    let full = mimo_capacity(h);
    let cols: Vec<usize> = (0..h.n_tx()).collect();
    let best_rows = (0..h.n_rx())
        .combinations(k)
        .map(|rows| mimo_capacity_sub(h, &rows, &cols))
        .fold(f64::NEG_INFINITY, f64::max);
    let n_max = h.n_rx().max(h.n_tx());
    let log2_gv: f64 = (1..=k)
        .map(|i| (((n_max - i + 1) * (n_min - i + 1)) as f64).log2())
        .sum();
    let bound = (k as f64 / n_min as f64) * full - log2_gv;
    Ok(best_rows >= bound - TOLERANCE_BITS)
}

/// Evaluates the split inequality `C_full <= C_part + C_complement`, where
/// `part` is a proper nonempty subset of the transmitters (columns) or
/// receivers (rows). Always holds; equality on block-diagonal channels.
pub fn decomposition_bound(
    h: &ChannelMatrix,
    side: Side,
    part: &[usize],
) -> Result<DecompositionReport> {
    let (side_len, what) = match side {
        Side::Transmitters => (h.n_tx(), "transmitter"),
        Side::Receivers => (h.n_rx(), "receiver"),
    };
    let part = validated_subset(part, side_len, what)?;
    let rest = complement(&part, side_len);
    let full = mimo_capacity(h);
    let all_rows: Vec<usize> = (0..h.n_rx()).collect();
    let all_cols: Vec<usize> = (0..h.n_tx()).collect();
    let (part_bits, complement_bits) = match side {
        Side::Transmitters => (
            mimo_capacity_sub(h, &all_rows, &part),
            mimo_capacity_sub(h, &all_rows, &rest),
        ),
        Side::Receivers => (
            mimo_capacity_sub(h, &part, &all_cols),
            mimo_capacity_sub(h, &rest, &all_cols),
        ),
    };
    Ok(DecompositionReport {
        full_bits: full,
        part_bits,
        complement_bits,
        holds: full <= part_bits + complement_bits + TOLERANCE_BITS,
    })
}

/// Column-split bound: capacity of the columns in `tx_subset` plus capacity
/// of the remaining columns (all rows kept). Upper-bounds the full capacity
/// with no additive constant.
pub fn g1(h: &ChannelMatrix, tx_subset: &[usize]) -> Result<f64> {
    let r = decomposition_bound(h, Side::Transmitters, tx_subset)?;
    Ok(r.part_bits + r.complement_bits)
}

/// Row-split bound: same as [`g1`] with the receiver side split instead.
pub fn g2(h: &ChannelMatrix, rx_subset: &[usize]) -> Result<f64> {
    let r = decomposition_bound(h, Side::Receivers, rx_subset)?;
    Ok(r.part_bits + r.complement_bits)
}

/// Scaled best-square-subchannel bound: returns
/// `(min(n_rx, n_tx) / k) * C*_{k x k}` together with its additive constant
/// `G_k = (min(n_rx, n_tx) / k) * log2(C(n_tx, k) * C(n_rx, k))`.
/// The full capacity is at most the sum of the two.
pub fn g3(h: &ChannelMatrix, k: usize) -> Result<(f64, f64)> {
    let n_min = h.n_rx().min(h.n_tx());
    if k == 0 || k > n_min {
        return domain_err(format!("square subchannel size must be in 1..={n_min}, got {k}"));
    }
    let (_, _, best) = best_subchannel(h, k, k)?;
    let scale = n_min as f64 / k as f64;
    let choices = binomial(h.n_tx() as u64, k as u64) * binomial(h.n_rx() as u64, k as u64);
    let gap = scale * (choices as f64).log2();
    Ok((scale * best, gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity_core::mimo_capacity_svd;
    use crate::network_model::{gain_from_capacity, mask_indices};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn make_matrix(seed: u64, n_rx: usize, n_tx: usize) -> ChannelMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..n_rx * n_tx)
            .map(|_| Complex64::new(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        ChannelMatrix::new(n_rx, n_tx, entries).unwrap()
    }

    fn diag(gains: &[f64]) -> ChannelMatrix {
        let n = gains.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, &g) in gains.iter().enumerate() {
            entries[i * n + i] = gain_from_capacity(g).unwrap();
        }
        ChannelMatrix::new(n, n, entries).unwrap()
    }

    /// Independent enumerator over bitmask pairs; evaluated with the SVD path.
    fn oracle_best(h: &ChannelMatrix, kt: usize, kr: usize) -> (Vec<usize>, Vec<usize>, f64) {
        let mut best = f64::NEG_INFINITY;
        let mut arg = (Vec::new(), Vec::new());
        for rmask in 0u32..1 << h.n_rx() {
            if rmask.count_ones() as usize != kr {
                continue;
            }
            for cmask in 0u32..1 << h.n_tx() {
                if cmask.count_ones() as usize != kt {
                    continue;
                }
                let rows = mask_indices(rmask);
                let cols = mask_indices(cmask);
                let v = mimo_capacity_svd(&h.submatrix(&rows, &cols).unwrap());
                if v > best {
                    best = v;
                    arg = (rows, cols);
                }
            }
        }
        (arg.0, arg.1, best)
    }

    #[test]
    fn best_subchannel_tie_breaks_lexicographically() {
        let h = diag(&[1.5, 1.5]);
        let (rows, cols, v) = best_subchannel(&h, 1, 1).unwrap();
        assert_eq!((rows, cols), (vec![0], vec![0]));
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn best_subchannel_full_selection_is_identity() {
        let h = make_matrix(1, 3, 4);
        let (rows, cols, v) = best_subchannel(&h, 4, 3).unwrap();
        assert_eq!(rows, vec![0, 1, 2]);
        assert_eq!(cols, vec![0, 1, 2, 3]);
        assert_eq!(v, mimo_capacity(&h));
    }

    #[test]
    fn best_subchannel_matches_independent_enumerator() {
        for seed in 0..10u64 {
            let h = make_matrix(seed, 4, 4);
            let (rows, cols, v) = best_subchannel(&h, 2, 2).unwrap();
            let (orows, ocols, ov) = oracle_best(&h, 2, 2);
            assert!((v - ov).abs() <= 1e-9 * ov.max(1.0), "seed {seed}");
            assert_eq!((rows, cols), (orows, ocols), "seed {seed}");
        }
    }

    #[test]
    fn best_subchannel_rejects_out_of_range() {
        let h = make_matrix(2, 2, 3);
        assert!(best_subchannel(&h, 0, 1).is_err());
        assert!(best_subchannel(&h, 4, 1).is_err());
        assert!(best_subchannel(&h, 1, 3).is_err());
    }

    #[test]
    fn selection_bound_diagonal_example() {
        let h = diag(&[2.0, 2.0]);
        let r = selection_bound(&h, 1, 1).unwrap();
        assert!((r.full_capacity - 4.0).abs() < 1e-12);
        assert!((r.best_sub_capacity - 2.0).abs() < 1e-12);
        assert_eq!((r.scale.num(), r.scale.den()), (2, 1));
        assert!((r.gap_constant_bits - 2.0 * 2.0).abs() < 1e-12, "2*log2(4)");
        assert!(r.holds);
    }

    #[test]
    fn selection_bound_scalar_is_tight() {
        let h = ChannelMatrix::new(1, 1, vec![Complex64::new(0.7, 1.1)]).unwrap();
        let r = selection_bound(&h, 1, 1).unwrap();
        assert_eq!(r.full_capacity, r.best_sub_capacity);
        assert_eq!(r.gap_constant_bits, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn selection_bound_holds_across_shapes_and_sizes() {
        for seed in 0..25u64 {
            for (m, n) in [(2, 2), (3, 2), (2, 4), (4, 4), (3, 4)] {
                let h = make_matrix(1000 + seed, n, m);
                for kt in 1..=m {
                    for kr in 1..=n {
                        let r = selection_bound(&h, kt, kr).unwrap();
                        assert!(r.holds, "seed {seed} {m}x{n} kt={kt} kr={kr}");
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_keeps_all_rows_when_k_is_full() {
        let h = make_matrix(5, 3, 3);
        let (rows, v) = greedy_decremental_selection(&h, 3).unwrap();
        assert_eq!(rows, vec![0, 1, 2]);
        assert_eq!(v, mimo_capacity(&h));
    }

    #[test]
    fn greedy_on_diagonal_keeps_largest_gains() {
        let h = diag(&[1.0, 2.0, 3.0]);
        let (rows, v) = greedy_decremental_selection(&h, 2).unwrap();
        assert_eq!(rows, vec![1, 2]);
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_never_beats_brute_force() {
        for seed in 0..20u64 {
            let h = make_matrix(300 + seed, 4, 4);
            for k in 1..=4 {
                let (_, greedy) = greedy_decremental_selection(&h, k).unwrap();
                let (_, _, brute) = best_subchannel(&h, 4, k).unwrap();
                assert!(greedy <= brute + 1e-12, "seed {seed} k={k}");
            }
        }
    }

    #[test]
    fn eigen_retention_scalar_equality() {
        let h = ChannelMatrix::new(1, 1, vec![Complex64::new(1.0, -2.0)]).unwrap();
        assert!(eigen_retention_check(&h, 1).unwrap());
    }

    #[test]
    fn eigen_retention_holds_on_random_matrices() {
        for seed in 0..100u64 {
            let h = make_matrix(7000 + seed, 3, 3);
            for k in 1..=3 {
                assert!(eigen_retention_check(&h, k).unwrap(), "seed {seed} k={k}");
            }
        }
        for seed in 0..50u64 {
            for (n_rx, n_tx) in [(4, 2), (2, 4), (3, 5)] {
                let h = make_matrix(9000 + seed, n_rx, n_tx);
                for k in 1..=n_rx.min(n_tx) {
                    assert!(
                        eigen_retention_check(&h, k).unwrap(),
                        "seed {seed} {n_rx}x{n_tx} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn decomposition_equality_on_block_diagonal() {
        // 4x4 block-diagonal: columns {0,1} only reach rows {0,1}.
        let a = make_matrix(11, 2, 2);
        let b = make_matrix(12, 2, 2);
        let zero = Complex64::new(0.0, 0.0);
        let mut entries = vec![zero; 16];
        for r in 0..2 {
            for c in 0..2 {
                entries[r * 4 + c] = a.get(r, c);
                entries[(r + 2) * 4 + (c + 2)] = b.get(r, c);
            }
        }
        let h = ChannelMatrix::new(4, 4, entries).unwrap();
        let r = decomposition_bound(&h, Side::Transmitters, &[0, 1]).unwrap();
        assert!(r.holds);
        assert!(
            (r.full_bits - r.part_bits - r.complement_bits).abs() < 1e-9,
            "block-diagonal split must be tight: {} vs {} + {}",
            r.full_bits,
            r.part_bits,
            r.complement_bits
        );
        assert!((g1(&h, &[0, 1]).unwrap() - r.full_bits).abs() < 1e-9);
    }

    #[test]
    fn decomposition_strict_on_rank_one() {
        let g = Complex64::new(1.0, 0.0);
        let h = ChannelMatrix::new(2, 2, vec![g, g, g, g]).unwrap();
        let r = decomposition_bound(&h, Side::Transmitters, &[0]).unwrap();
        assert!(r.holds);
        assert!(r.part_bits + r.complement_bits > r.full_bits + 0.5);
    }

    #[test]
    fn decomposition_holds_for_every_proper_subset() {
        for seed in 0..20u64 {
            let h = make_matrix(400 + seed, 4, 4);
            for mask in 1u32..15 {
                let subset = mask_indices(mask);
                assert!(decomposition_bound(&h, Side::Transmitters, &subset).unwrap().holds);
                assert!(decomposition_bound(&h, Side::Receivers, &subset).unwrap().holds);
            }
        }
    }

    #[test]
    fn decomposition_rejects_degenerate_subsets() {
        let h = make_matrix(3, 3, 3);
        assert!(decomposition_bound(&h, Side::Transmitters, &[]).is_err());
        assert!(decomposition_bound(&h, Side::Transmitters, &[0, 1, 2]).is_err());
        assert!(decomposition_bound(&h, Side::Receivers, &[5]).is_err());
        assert!(decomposition_bound(&h, Side::Receivers, &[1, 1]).is_err());
    }

    #[test]
    fn g_bounds_dominate_capacity() {
        for seed in 0..20u64 {
            let h = make_matrix(600 + seed, 3, 3);
            let full = mimo_capacity(&h);
            for mask in 1u32..7 {
                let subset = mask_indices(mask);
                assert!(full <= g1(&h, &subset).unwrap() + TOLERANCE_BITS);
                assert!(full <= g2(&h, &subset).unwrap() + TOLERANCE_BITS);
            }
            for k in 1..=3 {
                let (bound, gap) = g3(&h, k).unwrap();
                assert!(full <= bound + gap + TOLERANCE_BITS, "seed {seed} k={k}");
            }
        }
    }

    #[test]
    fn g3_full_square_selection_is_exact_with_known_gap() {
        let h = make_matrix(800, 3, 3);
        let (bound, _) = g3(&h, 3).unwrap();
        assert!((bound - mimo_capacity(&h)).abs() < 1e-12);
        let (_, gap1) = g3(&h, 1).unwrap();
        assert!((gap1 - 3.0 * 9.0f64.log2()).abs() < 1e-12);
    }
}

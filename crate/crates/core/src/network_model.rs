//! Network model: channel matrices, layered networks, cuts and subnetwork
//! selections, plus generators (random and adversarial) and the on-disk
//! JSON document format.
//!
//! Conventions used throughout the crate:
//! - Relays are indexed `0..N` internally; human-facing output numbers them
//!   from 1.
//! - `ChannelMatrix` entries are stored receiver-major: the entry at row `j`,
//!   column `i` is the gain from transmitter `i` to receiver `j`.
//! - A network with `L` relay layers has `L + 1` matrices: matrix `0` is
//!   `N×1` (source into layer 1), matrices `1..L-1` are `N×N`, matrix `L`
//!   is `1×N` (layer `L` into the destination).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::Deserialize;

use crate::{domain_err, Error, Result};

/// Complex amplitude gain of a single link.
pub type ComplexGain = Complex64;

/// Dense complex gain matrix between two adjacent layers.
///
/// Rows are receivers, columns are transmitters; all entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_rx: usize,
    n_tx: usize,
    entries: Vec<ComplexGain>,
}

impl ChannelMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(n_rx: usize, n_tx: usize, entries: Vec<ComplexGain>) -> Result<Self> {
        if n_rx == 0 || n_tx == 0 {
            return domain_err(format!("channel matrix dimensions must be positive, got {n_rx}x{n_tx}"));
        }
        if entries.len() != n_rx * n_tx {
            return domain_err(format!(
                "channel matrix {n_rx}x{n_tx} needs {} entries, got {}",
                n_rx * n_tx,
                entries.len()
            ));
        }
        if let Some(pos) = entries.iter().position(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return domain_err(format!(
                "channel matrix entry at row {}, column {} is not finite",
                pos / n_tx,
                pos % n_tx
            ));
        }
        Ok(Self { n_rx, n_tx, entries })
    }

    /// All-zero matrix of the given shape.
    pub fn zeros(n_rx: usize, n_tx: usize) -> Self {
        Self::new(n_rx, n_tx, vec![Complex64::new(0.0, 0.0); n_rx * n_tx])
            .expect("zero matrix is always valid")
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Gain from transmitter `tx` to receiver `rx` (0-based).
    #[inline]
    pub fn get(&self, rx: usize, tx: usize) -> ComplexGain {
        self.entries[rx * self.n_tx + tx]
    }

    /// Row-major entries, receivers outermost.
    pub fn entries(&self) -> &[ComplexGain] {
        &self.entries
    }

    /// Submatrix restricted to the given receiver rows and transmitter columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.n_rx) || cols.iter().any(|&c| c >= self.n_tx) {
            return domain_err("submatrix index out of range");
        }
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                entries.push(self.get(r, c));
            }
        }
        Self::new(rows.len(), cols.len(), entries)
    }

    /// Plain transpose (no conjugation). MIMO capacity is invariant under it.
    pub fn transposed(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.n_tx {
            for r in 0..self.n_rx {
                entries.push(self.get(r, c));
            }
        }
        Self {
            n_rx: self.n_tx,
            n_tx: self.n_rx,
            entries,
        }
    }
}

/// A layered Gaussian relay network: `L` relay layers of `N` relays and the
/// `L + 1` channel matrices connecting consecutive layers.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredNetwork {
    l: usize,
    n: usize,
    matrices: Vec<ChannelMatrix>,
}

impl LayeredNetwork {
    /// Validates matrix shapes against `(l, n)` and builds the network.
    pub fn new(l: usize, n: usize, matrices: Vec<ChannelMatrix>) -> Result<Self> {
        if l < 1 || n < 1 {
            return domain_err(format!("network needs l >= 1 relay layers and n >= 1 relays, got l={l}, n={n}"));
        }
        if matrices.len() != l + 1 {
            return domain_err(format!("network with {l} relay layers needs {} matrices, got {}", l + 1, matrices.len()));
        }
        for (idx, m) in matrices.iter().enumerate() {
            let (want_rx, want_tx) = if idx == 0 {
                (n, 1)
            } else if idx == l {
                (1, n)
            } else {
                (n, n)
            };
            if m.n_rx != want_rx || m.n_tx != want_tx {
                return domain_err(format!(
                    "matrix {idx}: expected {want_rx}x{want_tx}, got {}x{}",
                    m.n_rx, m.n_tx
                ));
            }
        }
        Ok(Self { l, n, matrices })
    }

    /// Number of relay layers.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Relays per layer.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Channel matrix `idx` (0 = source side, `l` = destination side).
    pub fn matrix(&self, idx: usize) -> &ChannelMatrix {
        &self.matrices[idx]
    }

    pub fn matrices(&self) -> &[ChannelMatrix] {
        &self.matrices
    }

    /// The reflected network: matrices reversed and transposed, so that data
    /// flows through the original network backwards. Cut values are preserved
    /// when a cut is reflected alongside (see [`Cut::reflected`]).
    pub fn reflected(&self) -> Self {
        let matrices = self
            .matrices
            .iter()
            .rev()
            .map(ChannelMatrix::transposed)
            .collect();
        Self {
            l: self.l,
            n: self.n,
            matrices,
        }
    }
}

/// A cut: for each relay layer, the subset of relays on the source side,
/// stored as a bitmask (bit `i` set means relay `i+1` is on the source side).
/// The source is implicitly on the source side and the destination on the
/// destination side.
///
/// The derived ordering is lexicographic over the per-layer masks, which is
/// the tie-break order used for argmin cuts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    masks: Vec<u32>,
}

impl Cut {
    /// Builds a cut from per-layer masks, checking each uses only `n` bits.
    pub fn new(masks: Vec<u32>, n: usize) -> Result<Self> {
        if n == 0 || n > 32 {
            return domain_err(format!("cut masks support 1..=32 relays per layer, got {n}"));
        }
        if masks.is_empty() {
            return domain_err("a cut needs at least one relay layer");
        }
        let full = full_mask(n);
        if let Some(idx) = masks.iter().position(|&m| m & !full != 0) {
            return domain_err(format!("cut mask for layer {} uses bits above relay {n}", idx + 1));
        }
        Ok(Self { masks })
    }

    /// Decodes a cut from an integer code laid out so that numeric code order
    /// equals the lexicographic order of the mask tuple: layer 1 occupies the
    /// topmost `n` bits of the code, layer `l` the lowest.
    pub fn from_lex_code(code: u64, l: usize, n: usize) -> Self {
        debug_assert!(l >= 1 && n >= 1 && l * n <= 64);
        let full = full_mask(n) as u64;
        let masks = (0..l)
            .map(|layer| ((code >> ((l - 1 - layer) * n)) & full) as u32)
            .collect();
        Self { masks }
    }

    /// The code that [`Cut::from_lex_code`] decodes to this cut.
    pub fn lex_code(&self, n: usize) -> u64 {
        self.masks
            .iter()
            .fold(0u64, |acc, &m| (acc << n) | m as u64)
    }

    /// Per-layer source-side masks, layer 1 first.
    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    /// Source-side mask of relay layer `layer` (0-based).
    pub fn layer(&self, layer: usize) -> u32 {
        self.masks[layer]
    }

    /// Relay indices (0-based) on the source side of the given layer.
    pub fn layer_indices(&self, layer: usize) -> Vec<usize> {
        mask_indices(self.masks[layer])
    }

    /// The cut playing this cut's role in the reflected network: layer order
    /// reversed and each side complemented.
    pub fn reflected(&self, n: usize) -> Self {
        let full = full_mask(n);
        let masks = self.masks.iter().rev().map(|&m| !m & full).collect();
        Self { masks }
    }
}

/// Mask with the low `n` bits set.
#[inline]
pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Indices of the set bits, ascending.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// A choice of `K` relays in each layer, 0-based and sorted within a layer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubnetworkSelection {
    per_layer: Vec<Vec<usize>>,
}

impl SubnetworkSelection {
    /// Validates that every layer picks the same number of distinct in-range
    /// relays; indices are sorted for a canonical representation.
    pub fn new(per_layer: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        if per_layer.is_empty() {
            return domain_err("selection needs at least one layer");
        }
        let k = per_layer[0].len();
        if k == 0 || k > n {
            return domain_err(format!("selection size must be in 1..={n}, got {k}"));
        }
        let mut canon = Vec::with_capacity(per_layer.len());
        for (li, layer) in per_layer.into_iter().enumerate() {
            if layer.len() != k {
                return domain_err(format!(
                    "selection layer {} picks {} relays, expected {k}",
                    li + 1,
                    layer.len()
                ));
            }
            let mut sorted = layer;
            sorted.sort_unstable();
            if sorted.iter().any(|&i| i >= n) {
                return domain_err(format!("selection layer {} has a relay index >= {n}", li + 1));
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return domain_err(format!("selection layer {} repeats a relay", li + 1));
            }
            canon.push(sorted);
        }
        Ok(Self { per_layer: canon })
    }

    /// Selection keeping every relay of every layer.
    pub fn full(l: usize, n: usize) -> Self {
        Self {
            per_layer: vec![(0..n).collect(); l],
        }
    }

    /// Relays picked per layer.
    pub fn k(&self) -> usize {
        self.per_layer[0].len()
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.per_layer
    }

    pub fn layer(&self, layer: usize) -> &[usize] {
        &self.per_layer[layer]
    }
}

/// Real nonnegative gain realizing exactly the given link capacity in bits:
/// `sqrt(2^r - 1)`, so that `link_capacity(gain_from_capacity(r)) == r`.
pub fn gain_from_capacity(r_bits: f64) -> Result<ComplexGain> {
    if !r_bits.is_finite() || r_bits < 0.0 {
        return domain_err(format!("link capacity must be finite and nonnegative, got {r_bits}"));
    }
    // exp_m1 keeps 2^r - 1 accurate for small r, which makes the round trip
    // with link_capacity (ln_1p) exact to machine precision.
    let pow = (r_bits * std::f64::consts::LN_2).exp_m1();
    Ok(Complex64::new(pow.sqrt(), 0.0))
}

/// Entry distributions for [`random_network`].
#[derive(Debug, Clone, PartialEq)]
pub enum GainDistribution {
    /// Circularly-symmetric complex Gaussian entries: real and imaginary
    /// parts i.i.d. `N(0, sigma^2)`, so the envelope is Rayleigh(sigma).
    Rayleigh { sigma: f64 },
    /// Real gain drawn uniformly from `[lo, hi]`, zero imaginary part.
    UniformGain { lo: f64, hi: f64 },
    /// Link capacity in bits drawn uniformly from `[lo, hi]`, then mapped
    /// through [`gain_from_capacity`].
    UniformCapacity { lo: f64, hi: f64 },
}

impl GainDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            GainDistribution::Rayleigh { sigma } => {
                if !sigma.is_finite() || sigma < 0.0 {
                    return domain_err(format!("rayleigh sigma must be finite and nonnegative, got {sigma}"));
                }
            }
            GainDistribution::UniformGain { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return domain_err(format!("uniform gain range [{lo}, {hi}] is invalid"));
                }
            }
            GainDistribution::UniformCapacity { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi || lo < 0.0 {
                    return domain_err(format!("uniform capacity range [{lo}, {hi}] is invalid"));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> ComplexGain {
        match *self {
            GainDistribution::Rayleigh { sigma } => {
                let normal = Normal::new(0.0, sigma).expect("validated sigma");
                Complex64::new(normal.sample(rng), normal.sample(rng))
            }
            GainDistribution::UniformGain { lo, hi } => {
                let uniform = Uniform::new_inclusive(lo, hi);
                Complex64::new(uniform.sample(rng), 0.0)
            }
            GainDistribution::UniformCapacity { lo, hi } => {
                let uniform = Uniform::new_inclusive(lo, hi);
                gain_from_capacity(uniform.sample(rng)).expect("nonnegative capacity")
            }
        }
    }
}

/// Network with all `L + 1` matrices drawn i.i.d. from `dist`, deterministic
/// given the seed. Equivalent to [`random_network_with_stream`] on stream 0.
pub fn random_network(l: usize, n: usize, dist: &GainDistribution, seed: u64) -> Result<LayeredNetwork> {
    random_network_with_stream(l, n, dist, seed, 0)
}

/// Like [`random_network`], but drawing from an independent ChaCha stream.
///
/// Monte Carlo campaigns give trial `t` stream `t` under one campaign seed;
/// trials then reproduce individually and identically under any parallel
/// schedule. Entries are drawn matrix by matrix in receiver-major order.
pub fn random_network_with_stream(
    l: usize,
    n: usize,
    dist: &GainDistribution,
    seed: u64,
    stream: u64,
) -> Result<LayeredNetwork> {
    if l < 1 || n < 1 {
        return domain_err(format!("network needs l >= 1 and n >= 1, got l={l}, n={n}"));
    }
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut matrices = Vec::with_capacity(l + 1);
    for idx in 0..=l {
        let (n_rx, n_tx) = matrix_shape(idx, l, n);
        let entries = (0..n_rx * n_tx).map(|_| dist.sample(&mut rng)).collect();
        matrices.push(ChannelMatrix::new(n_rx, n_tx, entries)?);
    }
    LayeredNetwork::new(l, n, matrices)
}

pub(crate) fn matrix_shape(idx: usize, l: usize, n: usize) -> (usize, usize) {
    if idx == 0 {
        (n, 1)
    } else if idx == l {
        (1, n)
    } else {
        (n, n)
    }
}

/// Worst-case network for single-path selection with an odd number of relay
/// layers: the best route retains exactly the fraction `2/((L-1)N+4)` of the
/// network capacity. `c` is the capacity (in bits) of the strong links; the
/// unique weakest cut has value exactly `c`.
pub fn construct_adversarial_odd(l: usize, n: usize, c: f64) -> Result<LayeredNetwork> {
    if l % 2 == 0 {
        return domain_err(format!("odd construction needs an odd layer count, got l={l}"));
    }
    construct_adversarial(l, n, c)
}

/// Even-layer-count companion of [`construct_adversarial_odd`]; the retained
/// fraction is `2/(LN+2)`.
pub fn construct_adversarial_even(l: usize, n: usize, c: f64) -> Result<LayeredNetwork> {
    if l % 2 == 1 {
        return domain_err(format!("even construction needs an even layer count, got l={l}"));
    }
    if l == 0 {
        return domain_err("even construction needs l >= 2");
    }
    construct_adversarial(l, n, c)
}

/// Shared body of the adversarial constructions. Relay `N` of each layer is
/// a hub: both parities wire `R_iN = R_Ni = c` across every inner matrix, and
/// the remaining capacities alternate so that exactly one cut avoids every
/// strong link, with total value exactly `c`, while every source-destination
/// path crosses a link of capacity `alpha * c`.
fn construct_adversarial(l: usize, n: usize, c: f64) -> Result<LayeredNetwork> {
    if n < 2 {
        return domain_err(format!("adversarial construction needs n >= 2, got n={n}"));
    }
    if !c.is_finite() || c <= 0.0 {
        return domain_err(format!("base capacity must be positive and finite, got {c}"));
    }
    let denom = if l % 2 == 1 { (l - 1) * n + 4 } else { l * n + 2 };
    let weak = 2.0 * c / denom as f64;

    let mut matrices = Vec::with_capacity(l + 1);

    // Matrix 0 (source into layer 1): strong to relays 1..N-1, weak to the hub.
    let mut caps0 = vec![0.0; n];
    for (i, cap) in caps0.iter_mut().enumerate() {
        *cap = if i < n - 1 { c } else { weak };
    }
    matrices.push(matrix_from_capacities(n, 1, |rx, _| caps0[rx])?);

    // Inner matrices alternate between a sparse "weak diagonal + hub" layer
    // and a dense all-strong layer with a weak hub-to-hub link.
    for li in 1..l {
        let m = if li % 2 == 1 {
            matrix_from_capacities(n, n, |rx, tx| {
                if tx == n - 1 || rx == n - 1 {
                    if tx == rx {
                        0.0 // hub-to-hub is absent on sparse layers
                    } else {
                        c
                    }
                } else if tx == rx {
                    weak
                } else {
                    0.0
                }
            })?
        } else {
            matrix_from_capacities(n, n, |rx, tx| if tx == n - 1 && rx == n - 1 { weak } else { c })?
        };
        matrices.push(m);
    }

    // Terminal matrix (layer L into destination).
    let caps_l: Vec<f64> = (0..n)
        .map(|i| {
            if l % 2 == 1 {
                // Odd parity: only the hub reaches D strongly; relay 1 weakly.
                if i == n - 1 {
                    c
                } else if i == 0 {
                    weak
                } else {
                    0.0
                }
            } else if i < n - 1 {
                c
            } else {
                weak
            }
        })
        .collect();
    matrices.push(matrix_from_capacities(1, n, |_, tx| caps_l[tx])?);

    LayeredNetwork::new(l, n, matrices)
}

fn matrix_from_capacities(
    n_rx: usize,
    n_tx: usize,
    cap: impl Fn(usize, usize) -> f64,
) -> Result<ChannelMatrix> {
    let mut entries = Vec::with_capacity(n_rx * n_tx);
    for rx in 0..n_rx {
        for tx in 0..n_tx {
            entries.push(gain_from_capacity(cap(rx, tx))?);
        }
    }
    ChannelMatrix::new(n_rx, n_tx, entries)
}

/// The `(L, K)` network induced by keeping only the selected relays.
pub fn extract_subnetwork(net: &LayeredNetwork, sel: &SubnetworkSelection) -> Result<LayeredNetwork> {
    if sel.layers().len() != net.l() {
        return domain_err(format!(
            "selection has {} layers, network has {}",
            sel.layers().len(),
            net.l()
        ));
    }
    if sel.layers().iter().flatten().any(|&i| i >= net.n()) {
        return domain_err("selection index exceeds the network's relay count");
    }
    let l = net.l();
    let k = sel.k();
    let mut matrices = Vec::with_capacity(l + 1);
    matrices.push(net.matrix(0).submatrix(sel.layer(0), &[0])?);
    for li in 1..l {
        matrices.push(net.matrix(li).submatrix(sel.layer(li), sel.layer(li - 1))?);
    }
    matrices.push(net.matrix(l).submatrix(&[0], sel.layer(l - 1))?);
    LayeredNetwork::new(l, k, matrices)
}

// --- On-disk format -------------------------------------------------------
//
// {"version":1,"L":2,"N":3,"layers":[{"n_rx":3,"n_tx":1,"entries":[[re,im],...]},...]}
//
// Exactly L+1 layer objects, entries row-major, numbers written with 17
// significant digits so parsing reproduces every f64 bit-for-bit.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    version: u32,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "N")]
    n: usize,
    layers: Vec<LayerDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    n_rx: usize,
    n_tx: usize,
    entries: Vec<[f64; 2]>,
}

/// Serializes a network to its JSON document (UTF-8 text).
pub fn serialize(net: &LayeredNetwork) -> String {
    let mut out = String::with_capacity(64 + net.matrices().len() * 64);
    out.push_str(&format!("{{\"version\":1,\"L\":{},\"N\":{},\"layers\":[", net.l(), net.n()));
    for (idx, m) in net.matrices().iter().enumerate() {
        if idx > 0 {
            out.push(',');
        }
        out.push_str(&format!("{{\"n_rx\":{},\"n_tx\":{},\"entries\":[", m.n_rx(), m.n_tx()));
        for (eidx, g) in m.entries().iter().enumerate() {
            if eidx > 0 {
                out.push(',');
            }
            // 17 significant digits: lossless decimal round trip for f64.
            out.push_str(&format!("[{:.16e},{:.16e}]", g.re, g.im));
        }
        out.push_str("]}");
    }
    out.push_str("]}");
    out
}

/// Parses and validates a network document produced by [`serialize`] (or
/// written by hand). Errors name the offending layer or entry.
pub fn parse(text: &str) -> Result<LayeredNetwork> {
    let doc: NetworkDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.version != 1 {
        return Err(Error::Parse(format!("unsupported document version {}", doc.version)));
    }
    if doc.l < 1 || doc.n < 1 {
        return Err(Error::Parse(format!("document needs L >= 1 and N >= 1, got L={}, N={}", doc.l, doc.n)));
    }
    if doc.layers.len() != doc.l + 1 {
        return Err(Error::Parse(format!(
            "document with L={} must have {} layer objects, found {}",
            doc.l,
            doc.l + 1,
            doc.layers.len()
        )));
    }
    let mut matrices = Vec::with_capacity(doc.layers.len());
    for (idx, layer) in doc.layers.iter().enumerate() {
        let (want_rx, want_tx) = matrix_shape(idx, doc.l, doc.n);
        if layer.n_rx != want_rx || layer.n_tx != want_tx {
            return Err(Error::Parse(format!(
                "layer {idx}: expected {want_rx}x{want_tx}, got {}x{}",
                layer.n_rx, layer.n_tx
            )));
        }
        if layer.entries.len() != want_rx * want_tx {
            return Err(Error::Parse(format!(
                "layer {idx}: expected {} entries, found {}",
                want_rx * want_tx,
                layer.entries.len()
            )));
        }
        if let Some(pos) = layer.entries.iter().position(|e| !e[0].is_finite() || !e[1].is_finite()) {
            return Err(Error::Parse(format!("layer {idx}: entry {pos} is not finite")));
        }
        let entries = layer.entries.iter().map(|e| Complex64::new(e[0], e[1])).collect();
        matrices.push(ChannelMatrix::new(want_rx, want_tx, entries).map_err(|e| Error::Parse(e.to_string()))?);
    }
    LayeredNetwork::new(doc.l, doc.n, matrices).map_err(|e| Error::Parse(e.to_string()))
}

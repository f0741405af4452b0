use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Network;
use crate::bitmatrix::BitMatrix;
use crate::combin::Colex;
use crate::error::{Error, Result};
use crate::gf2m::{Field, FieldElem, FieldMatrix};

/// Largest `C*E*m` for which [`mds_family`] enumerates every candidate matrix.
pub const MAX_FAMILY_BITS: u32 = 16;

/// A network together with one local coding coefficient per adjacent edge pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedNetwork {
    network: Network,
    field: Field,
    coeffs: BTreeMap<(usize, usize), FieldElem>,
    seed: u64,
}

impl CodedNetwork {
    /// Uses explicit coefficients; every adjacent pair `(incoming, outgoing)` must be present.
    pub fn with_coefficients(
        network: Network,
        field: Field,
        coeffs: BTreeMap<(usize, usize), FieldElem>,
    ) -> Result<Self> {
        network.validate()?;
        let pairs = adjacent_pairs(&network);
        if pairs.len() != coeffs.len() || pairs.iter().any(|p| !coeffs.contains_key(p)) {
            return Err(Error::Invalid(
                "coefficients must cover exactly the adjacent edge pairs".into(),
            ));
        }
        if let Some(v) = coeffs.values().find(|v| v.value() >= field.order()) {
            return Err(Error::NotInField {
                value: v.value(),
                m: field.m(),
            });
        }
        Ok(CodedNetwork {
            network,
            field,
            coeffs,
            seed: 0,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, usize), FieldElem> {
        &self.coeffs
    }

    /// Coefficient from incoming edge `from` to outgoing edge `to`.
    pub fn coefficient(&self, from: usize, to: usize) -> Option<FieldElem> {
        self.coeffs.get(&(from, to)).copied()
    }

    /// Pushes source packets `x` (`C x n` symbols) and per-edge noise `z`
    /// (`E x n` symbols) through the network edge by edge, returning the
    /// `C x n` symbols arriving at the sink.
    pub fn simulate(&self, x: &FieldMatrix, z: &FieldMatrix) -> Result<FieldMatrix> {
        let net = &self.network;
        let f = &self.field;
        let src = net.source_edges();
        let (c, e) = (src.len(), net.num_edges());
        if x.rows() != c || z.rows() != e || x.cols() != z.cols() {
            return Err(Error::shape(
                format!("X {c}xn and Z {e}xn"),
                format!("X {}x{}, Z {}x{}", x.rows(), x.cols(), z.rows(), z.cols()),
            ));
        }
        let n = x.cols();
        let mut packets: Vec<Vec<FieldElem>> = vec![Vec::new(); e];
        for ei in net.edges_in_topological_order()? {
            let tail = net.edges()[ei].0;
            let mut p = if tail == net.source() {
                let row = src.iter().position(|&s| s == ei).expect("source edge");
                (0..n).map(|k| x.get(row, k)).collect()
            } else {
                let mut acc = vec![FieldElem::ZERO; n];
                for inc in net.in_edges(tail) {
                    let coef = self.coeffs[&(inc, ei)];
                    for (a, &s) in acc.iter_mut().zip(&packets[inc]) {
                        *a = f.add(*a, f.mul(coef, s));
                    }
                }
                acc
            };
            for (k, s) in p.iter_mut().enumerate() {
                *s = f.add(*s, z.get(ei, k));
            }
            packets[ei] = p;
        }
        let sink = net.sink_edges();
        Ok(FieldMatrix::from_fn(c, n, |i, k| packets[sink[i]][k]))
    }

    /// Binary-domain counterpart of [`CodedNetwork::simulate`]: every symbol is
    /// an `m`-bit column segment and every coefficient acts as its `m x m`
    /// matrix. `x` is `Cm x n`, `z` is `Em x n`.
    pub fn simulate_binary(&self, x: &BitMatrix, z: &BitMatrix) -> Result<BitMatrix> {
        let net = &self.network;
        let m = self.field.m() as usize;
        let src = net.source_edges();
        let (c, e) = (src.len(), net.num_edges());
        if x.rows() != c * m || z.rows() != e * m || x.cols() != z.cols() {
            return Err(Error::shape(
                format!("X {}xn and Z {}xn", c * m, e * m),
                format!("X {}x{}, Z {}x{}", x.rows(), x.cols(), z.rows(), z.cols()),
            ));
        }
        let mats: BTreeMap<(usize, usize), BitMatrix> = self
            .coeffs
            .iter()
            .map(|(&k, &v)| (k, self.field.elem_to_matrix(v)))
            .collect();
        let mut packets: Vec<Option<BitMatrix>> = vec![None; e];
        for ei in net.edges_in_topological_order()? {
            let tail = net.edges()[ei].0;
            let mut p = if tail == net.source() {
                let row = src.iter().position(|&s| s == ei).expect("source edge");
                x.row_block(row * m, m)
            } else {
                let mut acc = BitMatrix::zeros(m, x.cols());
                for inc in net.in_edges(tail) {
                    let incoming = packets[inc].as_ref().expect("processed in order");
                    acc ^= &(&mats[&(inc, ei)] * incoming);
                }
                acc
            };
            p ^= &z.row_block(ei * m, m);
            packets[ei] = Some(p);
        }
        let sink = net.sink_edges();
        let mut y = BitMatrix::zeros(c * m, x.cols());
        for (i, &se) in sink.iter().enumerate() {
            let p = packets[se].as_ref().expect("sink edge processed");
            for b in 0..m {
                for k in 0..x.cols() {
                    y.set(i * m + b, k, p.get(b, k));
                }
            }
        }
        Ok(y)
    }
}

fn adjacent_pairs(net: &Network) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (ei, &(tail, _)) in net.edges().iter().enumerate() {
        if tail == net.source() {
            continue;
        }
        for inc in net.in_edges(tail) {
            pairs.push((inc, ei));
        }
    }
    pairs
}

/// Draws every coefficient independently and uniformly from the field.
///
/// Draw order is outgoing edge index, then incoming edge index, so a seed
/// fixes the assignment.
pub fn assign_coefficients(net: &Network, field: &Field, seed: u64) -> Result<CodedNetwork> {
    net.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = adjacent_pairs(net)
        .into_iter()
        .map(|pair| (pair, field.random(&mut rng)))
        .collect();
    Ok(CodedNetwork {
        network: net.clone(),
        field: *field,
        coeffs,
        seed,
    })
}

/// Transfer matrix `T` (`C x C`) and impulse-response matrix `T̂` (`C x E`).
///
/// Rows index the sink's incoming edges, columns of `T̂` index all edges, and
/// `T` is the column subset of `T̂` at the source's outgoing edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransferPair {
    t: FieldMatrix,
    that: FieldMatrix,
    source_edges: Vec<usize>,
}

impl TransferPair {
    pub fn from_impulse(that: FieldMatrix, source_edges: Vec<usize>) -> Result<Self> {
        let c = that.rows();
        if source_edges.len() != c {
            return Err(Error::LengthMismatch {
                expected: c,
                found: source_edges.len(),
            });
        }
        if c > that.cols() {
            return Err(Error::shape(format!("C <= E with C={c}"), format!("E={}", that.cols())));
        }
        if let Some(&bad) = source_edges.iter().find(|&&s| s >= that.cols()) {
            return Err(Error::OutOfRange {
                index: bad,
                len: that.cols(),
            });
        }
        let mut sorted = source_edges.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != c {
            return Err(Error::Invalid("duplicate source edge index".into()));
        }
        Ok(TransferPair {
            t: that.select_columns(&source_edges),
            that,
            source_edges,
        })
    }

    pub fn t(&self) -> &FieldMatrix {
        &self.t
    }

    pub fn that(&self) -> &FieldMatrix {
        &self.that
    }

    pub fn source_edges(&self) -> &[usize] {
        &self.source_edges
    }

    pub fn c(&self) -> usize {
        self.that.rows()
    }

    pub fn e(&self) -> usize {
        self.that.cols()
    }

    pub fn is_mds(&self, field: &Field) -> bool {
        check_every_square_submatrix_invertible(field, &self.that)
    }
}

/// Propagates a unit injection on every edge to the sink in topological order.
pub fn compute_transfer(cn: &CodedNetwork) -> Result<TransferPair> {
    let net = &cn.network;
    let f = &cn.field;
    let e = net.num_edges();
    let mut global: Vec<Vec<FieldElem>> = vec![Vec::new(); e];
    for ei in net.edges_in_topological_order()? {
        let tail = net.edges()[ei].0;
        let mut g = vec![FieldElem::ZERO; e];
        g[ei] = FieldElem::ONE;
        if tail != net.source() {
            for inc in net.in_edges(tail) {
                let coef = cn.coeffs[&(inc, ei)];
                for (a, &b) in g.iter_mut().zip(&global[inc]) {
                    *a = f.add(*a, f.mul(coef, b));
                }
            }
        }
        global[ei] = g;
    }
    let sink = net.sink_edges();
    let that = FieldMatrix::from_fn(sink.len(), e, |i, j| global[sink[i]][j]);
    TransferPair::from_impulse(that, net.source_edges())
}

/// True iff every `C x C` column submatrix of `that` is invertible.
pub fn check_every_square_submatrix_invertible(field: &Field, that: &FieldMatrix) -> bool {
    let (c, e) = (that.rows(), that.cols());
    if c > e {
        return false;
    }
    Colex::new(e, c).all(|cols| that.select_columns(&cols).is_invertible(field))
}

/// Resamples coefficients with seeds `seed, seed + 1, ...` until `T̂` is MDS.
pub fn sample_until_mds(
    net: &Network,
    field: &Field,
    seed: u64,
    max_retries: u32,
) -> Result<(CodedNetwork, TransferPair)> {
    if max_retries == 0 {
        return Err(Error::Invalid("max_retries must be at least 1".into()));
    }
    for attempt in 0..max_retries {
        let cn = assign_coefficients(net, field, seed.wrapping_add(attempt as u64))?;
        let tp = compute_transfer(&cn)?;
        if tp.is_mds(field) {
            return Ok((cn, tp));
        }
    }
    Err(Error::RetriesExhausted {
        retries: max_retries,
    })
}

/// Cauchy impulse response `1 / (x_i + y_j)` with `x_i = i`, `y_j = C + j`;
/// the source edges are the first `C` columns. Needs `2^m >= C + E`.
pub fn cauchy_transfer(field: &Field, c: usize, e: usize) -> Result<TransferPair> {
    if c == 0 || c > e {
        return Err(Error::Invalid(format!("need 1 <= C <= E, got C={c}, E={e}")));
    }
    if (c + e) as u64 > field.order() as u64 {
        return Err(Error::Invalid(format!(
            "Cauchy construction needs 2^m >= C + E = {}, field has {} elements",
            c + e,
            field.order()
        )));
    }
    let mut that = FieldMatrix::zeros(c, e);
    for i in 0..c {
        for j in 0..e {
            let s = field.add(field.elem(i as u32)?, field.elem((c + j) as u32)?);
            that.set(i, j, field.inv(s)?);
        }
    }
    TransferPair::from_impulse(that, (0..c).collect())
}

/// Random `C x E` impulse response with source edges `0..C`, resampled until MDS.
pub fn random_mds_transfer(
    field: &Field,
    c: usize,
    e: usize,
    seed: u64,
    max_retries: u32,
) -> Result<TransferPair> {
    if c == 0 || c > e {
        return Err(Error::Invalid(format!("need 1 <= C <= E, got C={c}, E={e}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries.max(1) {
        let that = FieldMatrix::random(field, c, e, &mut rng);
        if check_every_square_submatrix_invertible(field, &that) {
            return TransferPair::from_impulse(that, (0..c).collect());
        }
    }
    Err(Error::RetriesExhausted {
        retries: max_retries,
    })
}

/// Every MDS `C x E` matrix over the field, in increasing order of the
/// row-major digit string (entry `(0, 0)` most significant).
pub fn mds_family(field: &Field, c: usize, e: usize, source_edges: &[usize]) -> Result<Vec<TransferPair>> {
    let bits = (c * e) as u32 * field.m();
    if bits > MAX_FAMILY_BITS {
        return Err(Error::Guard(format!(
            "enumerating all 2^{bits} candidate matrices exceeds 2^{MAX_FAMILY_BITS}; supply a family file"
        )));
    }
    let m = field.m();
    let cells = c * e;
    let mask = field.order() - 1;
    let mut family = Vec::new();
    for code in 0u64..(1u64 << bits) {
        let that = FieldMatrix::from_fn(c, e, |i, j| {
            let pos = cells - 1 - (i * e + j);
            field.elem(((code >> (pos as u32 * m)) as u32) & mask).expect("masked to m bits")
        });
        if check_every_square_submatrix_invertible(field, &that) {
            family.push(TransferPair::from_impulse(that, source_edges.to_vec())?);
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(m: u32) -> Field {
        Field::new(m).unwrap()
    }

    #[test]
    fn direct_edges_give_identity() {
        let f = field(3);
        let cn = assign_coefficients(&Network::direct(3), &f, 1).unwrap();
        assert!(cn.coefficients().is_empty());
        let tp = compute_transfer(&cn).unwrap();
        assert_eq!(tp.t(), &FieldMatrix::identity(3));
        assert_eq!(tp.that(), &FieldMatrix::identity(3));
        assert!(tp.is_mds(&f));
        let (_, tp2) = sample_until_mds(&Network::direct(3), &f, 9, 1).unwrap();
        assert_eq!(tp2, tp);
    }

    #[test]
    fn single_path_by_hand() {
        let f = field(4);
        let net = Network::new(3, 0, 2, vec![(0, 1), (1, 2)]).unwrap();
        let coef = f.elem(7).unwrap();
        let cn = CodedNetwork::with_coefficients(net, f, BTreeMap::from([((0, 1), coef)])).unwrap();
        let tp = compute_transfer(&cn).unwrap();
        assert_eq!(tp.t().values(), vec![7]);
        assert_eq!(tp.that().values(), vec![7, 1]);
    }

    #[test]
    fn parallel_paths_are_diagonal() {
        let f = field(4);
        let net = Network::parallel_paths(3);
        let cn = assign_coefficients(&net, &f, 5).unwrap();
        let tp = compute_transfer(&cn).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j {
                    cn.coefficient(2 * i, 2 * i + 1).unwrap()
                } else {
                    FieldElem::ZERO
                };
                assert_eq!(tp.t().get(i, j), expect);
            }
        }
        assert_eq!(tp.source_edges(), &[0, 2, 4]);
    }

    #[test]
    fn coefficients_deterministic_and_in_range() {
        let net = Network::diamond();
        let a = assign_coefficients(&net, &field(4), 42).unwrap();
        let b = assign_coefficients(&net, &field(4), 42).unwrap();
        assert_eq!(a, b);
        let bin = assign_coefficients(&Network::parallel_paths(5), &field(1), 3).unwrap();
        assert!(bin.coefficients().values().all(|v| v.value() <= 1));
    }

    #[test]
    fn coefficient_histogram_is_uniform() {
        // 10^4 draws over GF(16); chi-square with 15 dof, 0.999 quantile ~ 37.7
        let f = field(4);
        let net = Network::parallel_paths(1000);
        let mut counts = [0u32; 16];
        for seed in 0..10 {
            let cn = assign_coefficients(&net, &f, seed).unwrap();
            for v in cn.coefficients().values() {
                counts[v.value() as usize] += 1;
            }
        }
        let total: u32 = counts.iter().sum();
        assert_eq!(total, 10_000);
        let expected = total as f64 / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }

    #[test]
    fn mds_checker_cases() {
        let f = field(2);
        let good = FieldMatrix::from_values(&f, 2, 3, &[1, 0, 1, 0, 1, 1]).unwrap();
        assert!(check_every_square_submatrix_invertible(&f, &good));
        let zero_col = FieldMatrix::from_values(&f, 2, 3, &[1, 0, 0, 0, 1, 0]).unwrap();
        assert!(!check_every_square_submatrix_invertible(&f, &zero_col));
        let dup = FieldMatrix::from_values(&f, 2, 3, &[1, 2, 2, 3, 1, 1]).unwrap();
        assert!(!check_every_square_submatrix_invertible(&f, &dup));
    }

    #[test]
    fn relay_network_mds_with_m4() {
        let (cn, tp) = sample_until_mds(&Network::relay(2), &field(4), 0, 20).unwrap();
        assert!(tp.is_mds(cn.field()));
        assert!(cn.seed() < 20);
    }

    #[test]
    fn parallel_paths_are_never_mds() {
        // both edges of a path reach the sink through the same row only
        for m in [4, 8] {
            let err = sample_until_mds(&Network::parallel_paths(2), &field(m), 0, 50).unwrap_err();
            assert!(matches!(err, Error::RetriesExhausted { .. }));
        }
    }

    #[test]
    fn small_field_can_exhaust_retries() {
        // over GF(2) the relay's mixing matrix is singular or has zero entries too often
        let err = sample_until_mds(&Network::relay(3), &field(1), 0, 8).unwrap_err();
        assert!(matches!(err, Error::RetriesExhausted { retries: 8 }));
        assert!(sample_until_mds(&Network::diamond(), &field(2), 0, 0).is_err());
    }

    #[test]
    fn cauchy_is_mds() {
        let f = field(3);
        let tp = cauchy_transfer(&f, 3, 5).unwrap();
        assert!(tp.is_mds(&f));
        assert!(cauchy_transfer(&field(1), 2, 3).is_err());
    }

    #[test]
    fn binary_family_of_two_by_three() {
        let f = field(1);
        let fam = mds_family(&f, 2, 3, &[0, 1]).unwrap();
        // columns must be the three nonzero vectors of GF(2)^2 in some order
        assert_eq!(fam.len(), 6);
        assert_eq!(fam[0].that().values(), vec![0, 1, 1, 1, 0, 1]);
        assert!(fam.iter().all(|tp| tp.t().is_invertible(&f)));
        assert!(mds_family(&field(4), 2, 3, &[0, 1]).is_err());
    }

    #[test]
    fn simulation_matches_transfer_equation() {
        use rand::SeedableRng;
        let f = field(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for net in [Network::direct(2), Network::parallel_paths(3), Network::diamond()] {
            let cn = assign_coefficients(&net, &f, 17).unwrap();
            let tp = compute_transfer(&cn).unwrap();
            for _ in 0..20 {
                let x = FieldMatrix::random(&f, tp.c(), 4, &mut rng);
                let z = FieldMatrix::random(&f, tp.e(), 4, &mut rng);
                let y = cn.simulate(&x, &z).unwrap();
                let expect = tp.t().mul(&f, &x).unwrap().add(&tp.that().mul(&f, &z).unwrap()).unwrap();
                assert_eq!(y, expect);
            }
        }
    }

    #[test]
    fn transfer_invariant_under_node_relabelling() {
        let f = field(4);
        let net = Network::new(
            5,
            0,
            4,
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (3, 4)],
        )
        .unwrap();
        let cn = assign_coefficients(&net, &f, 3).unwrap();
        let tp = compute_transfer(&cn).unwrap();
        let relabelled = net.relabel(&[0, 3, 1, 2, 4]).unwrap();
        let cn2 = CodedNetwork::with_coefficients(relabelled, f, cn.coefficients().clone()).unwrap();
        assert_eq!(compute_transfer(&cn2).unwrap(), tp);
    }
}

use binec::bounds::{gv_rate, hamming_bound, hamming_size_bound};
use binec::channel::{noise_uniform, noise_worst_exhaustive, transmit, ChannelParams, Probability};
use binec::codes::{self, Codebook, Decoder};
use binec::metric::{ball_volume_exact, sphere_count_lower, CosetLeaderTable};
use binec::network::{
    cauchy_transfer, compute_transfer, random_mds_transfer, sample_until_mds, CodedNetwork, Network,
};
use binec::{BitMatrix, Error, Field, FieldElem};
use num_bigint::BigUint;
use proptest::prelude::*;
use std::collections::{BTreeMap, HashSet};

fn desk() -> (Field, ChannelParams) {
    (
        Field::new(1).unwrap(),
        ChannelParams::new(2, 3, 1, 6, Probability::new(1, 18).unwrap()).unwrap(),
    )
}

#[test]
fn network_text_roundtrip_and_rejections() {
    let net = Network::relay(3);
    let back = Network::parse(&net.to_text()).unwrap();
    assert_eq!(back.edges(), net.edges());
    let cap = back.validate().unwrap();
    assert_eq!((cap.c, cap.e), (3, 6));

    let cyclic = Network::parse("net 3\nsource 0\nsink 2\nedge 0 1\nedge 1 1\nedge 1 2\n");
    assert!(cyclic.is_err() || cyclic.unwrap().validate().is_err());
    let bottleneck = Network::parse("net 3\nsource 0\nsink 2\nedge 0 1\nedge 0 1\nedge 1 2\n").unwrap();
    assert!(matches!(bottleneck.validate(), Err(Error::CapacityMismatch { .. })));
}

#[test]
fn explicit_coefficients_give_known_transfer() {
    let field = Field::new(2).unwrap();
    let net = Network::relay(2);
    let g = FieldElem::ONE;
    let a = field.elem(2).unwrap();
    // relay: out-edge 2 = in0 + in1, out-edge 3 = in0 + a*in1
    let coeffs = BTreeMap::from([((0, 2), g), ((1, 2), g), ((0, 3), g), ((1, 3), a)]);
    let cn = CodedNetwork::with_coefficients(net, field, coeffs).unwrap();
    let tp = compute_transfer(&cn).unwrap();
    assert_eq!(tp.that().values(), vec![1, 1, 1, 0, 1, 2, 0, 1]);
    assert_eq!(tp.t().values(), vec![1, 1, 1, 2]);
    assert!(tp.is_mds(&field));
}

#[test]
fn sampled_networks_are_mds() {
    let field = Field::new(3).unwrap();
    let (cn, tp) = sample_until_mds(&Network::relay(3), &field, 1, 500).unwrap();
    assert!(tp.is_mds(&field));
    assert_eq!(compute_transfer(&cn).unwrap(), tp);
}

/// Volume of the noise image ball, by enumerating every noise pattern.
fn image_ball(b: &BitMatrix, radius: u64, n: usize) -> usize {
    let rows = b.cols();
    let total = rows * n;
    let mut seen = HashSet::new();
    for bits in 0u64..(1 << total) {
        if bits.count_ones() as u64 > radius {
            continue;
        }
        let z = BitMatrix::from_fn(rows, n, |i, j| bits >> (i * n + j) & 1 == 1);
        seen.insert(b.mul_mat(&z).to_column_index());
    }
    seen.len()
}

#[test]
fn ball_volume_matches_enumeration() {
    let field = Field::new(1).unwrap();
    let tp = random_mds_transfer(&field, 2, 3, 5, 100).unwrap();
    let b = field.lift_matrix(tp.that());
    let table = CosetLeaderTable::build(&b).unwrap();
    for n in 1..=3 {
        for r in 0..=4 {
            assert_eq!(ball_volume_exact(&table, r, n), BigUint::from(image_ball(&b, r, n)));
        }
    }
}

#[test]
fn counted_sphere_fits_in_ball() {
    let field = Field::new(2).unwrap();
    let tp = random_mds_transfer(&field, 2, 3, 1, 200).unwrap();
    let table = CosetLeaderTable::build(&field.lift_matrix(tp.that())).unwrap();
    let p = Probability::new(1, 6).unwrap();
    for n in 1..=3 {
        let lower = sphere_count_lower(3, 2, n, p).unwrap();
        let b = p.floor_times(6 * n as u64);
        assert!(lower <= ball_volume_exact(&table, b, n));
    }
}

#[test]
fn desk_resists_every_adversary() {
    let (field, params) = desk();
    let tp = random_mds_transfer(&field, 2, 3, 5, 100).unwrap();
    let cb = codes::gv_construct_coherent(&tp, &field, &params, 2).unwrap();
    for x in cb.codewords() {
        assert!(noise_worst_exhaustive(&cb, &tp, &field, &x, params.budget()).unwrap().is_none());
    }
    // with twice the budget some codeword breaks
    let broken = cb
        .codewords()
        .filter(|x| noise_worst_exhaustive(&cb, &tp, &field, x, 2).unwrap().is_some())
        .count();
    assert!(broken > 0);
}

#[test]
fn codebook_file_roundtrip() {
    let (field, params) = desk();
    let tp = cauchy_transfer(&Field::new(3).unwrap(), 2, 3).unwrap();
    let f3 = Field::new(3).unwrap();
    let p3 = ChannelParams::new(2, 3, 3, 2, Probability::new(1, 9).unwrap()).unwrap();
    let cb3 = codes::gv_construct_coherent(&tp, &f3, &p3, 7).unwrap();
    let family = binec::network::mds_family(&field, 2, 3, &[0, 1]).unwrap();
    let nc = codes::gv_construct_noncoherent(&family, &field, &params, 1).unwrap();
    let dir = std::env::temp_dir().join(format!("binec-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, cb) in [("wide", &cb3), ("nc", &nc)] {
        let path = dir.join(name);
        cb.write(&path).unwrap();
        let back = Codebook::read(&path).unwrap();
        assert_eq!(back.packed_codewords(), cb.packed_codewords());
        assert_eq!(back.family().len(), cb.family().len());
        assert_eq!(back.to_text(), cb.to_text());
    }
}

#[test]
fn uniform_noise_decodes_within_budget() {
    let field = Field::new(2).unwrap();
    let params = ChannelParams::new(2, 4, 2, 3, Probability::new(1, 24).unwrap()).unwrap();
    let (_, tp) = sample_until_mds(&Network::relay(2), &field, 0, 500).unwrap();
    let cb = codes::gv_construct_coherent(&tp, &field, &params, 3).unwrap();
    let dec = Decoder::new(&cb, Some(&tp)).unwrap();
    for seed in 0..200u64 {
        let msg = seed as usize % cb.len();
        let z = noise_uniform(&params, seed);
        let y = transmit(&tp, &field, &cb.encode(msg).unwrap(), &z).unwrap();
        assert_eq!(dec.decode(&y).unwrap().message, msg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codebook_rate_between_bounds(seed in 0u64..1000, n in 2usize..=8, frac in 0.0f64..1.0) {
        let field = Field::new(1).unwrap();
        // budget b = pEmn exactly, with 1 <= b < n keeping p below C/(2Em)
        let b = 1 + (frac * (n - 1) as f64) as u64;
        let p = Probability::new(b, 3 * n as u64).unwrap();
        let params = ChannelParams::new(2, 3, 1, n, p).unwrap();
        let tp = random_mds_transfer(&field, 2, 3, seed, 100).unwrap();
        let cb = codes::gv_construct_coherent(&tp, &field, &params, seed).unwrap();
        let pf = p.to_f64();
        let lower = gv_rate(pf, 3, 2, Some(n), Some(1), false).unwrap();
        let upper = hamming_bound(pf, 3, 2, Some(1), Some(n)).unwrap();
        prop_assert!(cb.rate() >= lower, "rate {} below {}", cb.rate(), lower);
        prop_assert!(cb.rate() <= upper, "rate {} above {}", cb.rate(), upper);
        prop_assert!(BigUint::from(cb.len()) >= codes::coherent_guarantee(&tp, &field, &params).unwrap());
        prop_assert!(BigUint::from(cb.len()) <= hamming_size_bound(&params).unwrap());
    }

    #[test]
    fn uniform_noise_respects_budget(seed in any::<u64>(), n in 1usize..=10, den in 2u64..=60) {
        let params = ChannelParams::new(2, 5, 2, n, Probability::new(1, den).unwrap()).unwrap();
        let z = noise_uniform(&params, seed);
        prop_assert_eq!(z.weight(), params.budget());
        prop_assert_eq!(z.matrix().shape(), (10, n));
    }
}

use super::*;
use crate::channel::{transmit, NoiseMatrix, Probability};
use crate::combin::Colex;
use crate::gf2m::FieldMatrix;
use crate::network::{cauchy_transfer, mds_family};

fn desk() -> (Field, TransferPair, ChannelParams) {
    let f = Field::new(1).unwrap();
    let that = FieldMatrix::from_values(&f, 2, 3, &[1, 0, 1, 0, 1, 1]).unwrap();
    let tp = TransferPair::from_impulse(that, vec![0, 1]).unwrap();
    let params = ChannelParams::new(2, 3, 1, 6, Probability::new(1, 18).unwrap()).unwrap();
    (f, tp, params)
}

fn all_noise(params: &ChannelParams, budget: u64) -> Vec<NoiseMatrix> {
    let rows = params.e * params.m as usize;
    let total = rows * params.n;
    let mut out = Vec::new();
    for w in 0..=budget as usize {
        for support in Colex::new(total, w) {
            let mut z = BitMatrix::zeros(rows, params.n);
            for pos in support {
                z.set(pos / params.n, pos % params.n, true);
            }
            out.push(NoiseMatrix::new(z, budget).unwrap());
        }
    }
    out
}

#[test]
fn desk_coherent_codebook() {
    let (f, tp, params) = desk();
    let cb = gv_construct_coherent(&tp, &f, &params, 5).unwrap();
    assert_eq!(cb.radius(), 2);
    assert!(cb.len() >= 9, "size {}", cb.len());
    // every nonzero column has weight 1: |Ball(2)| = 1 + 6*3 + 15*9 = 154
    assert_eq!(coherent_guarantee(&tp, &f, &params).unwrap(), BigUint::from(27u8));
    assert!(cb.len() >= 27);
    assert!(min_distance(&cb, std::slice::from_ref(&tp)).unwrap() > Distance::Finite(2));
    let noise = all_noise(&params, 1);
    assert_eq!(noise.len(), 19);
    let dec = Decoder::new(&cb, Some(&tp)).unwrap();
    for (msg, x) in cb.codewords().enumerate() {
        for z in &noise {
            let y = transmit(&tp, &f, &x, z).unwrap();
            let d = dec.decode(&y).unwrap();
            assert_eq!(d.message, msg);
            assert!(d.unique);
        }
        let y = transmit(&tp, &f, &x, &noise[0]).unwrap();
        let d = decode_coherent(&cb, &tp, &f, &y).unwrap();
        assert_eq!((d.message, d.distance, d.unique), (msg, Distance::Finite(0), true));
    }
}

#[test]
fn zero_noise_takes_every_matrix() {
    let (f, tp, _) = desk();
    let params = ChannelParams::new(2, 3, 1, 2, Probability::ZERO).unwrap();
    let cb = gv_construct_coherent(&tp, &f, &params, 0).unwrap();
    assert_eq!(cb.radius(), 0);
    assert_eq!(cb.len(), 16);
    assert_eq!(cb.rate(), 1.0);
    assert_eq!(min_distance(&cb, &[tp]).unwrap(), Distance::Finite(1));
}

#[test]
fn single_codeword_distance_is_infinite() {
    let (f, tp, _) = desk();
    let params = ChannelParams::new(2, 3, 1, 1, Probability::new(2, 3).unwrap()).unwrap();
    let cb = gv_construct_coherent(&tp, &f, &params, 0).unwrap();
    assert_eq!(cb.len(), 1);
    assert_eq!(min_distance(&cb, &[tp]).unwrap(), Distance::Infinite);
}

#[test]
fn construction_is_seeded() {
    let (f, tp, params) = desk();
    let a = gv_construct_coherent(&tp, &f, &params, 11).unwrap();
    let b = gv_construct_coherent(&tp, &f, &params, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.encode(0).unwrap(), b.encode(0).unwrap());
    let c = gv_construct_coherent(&tp, &f, &params, 12).unwrap();
    assert_ne!(a.packed_codewords(), c.packed_codewords());
}

#[test]
fn encode_and_position() {
    let (f, tp, params) = desk();
    let cb = gv_construct_coherent(&tp, &f, &params, 1).unwrap();
    let mut seen = HashSet::new();
    for msg in 0..cb.len() {
        let x = cb.encode(msg).unwrap();
        assert_eq!(cb.position(&x), Some(msg));
        assert!(seen.insert(x));
    }
    assert!(matches!(cb.encode(cb.len()), Err(Error::OutOfRange { .. })));
    assert_eq!(cb.position(&BitMatrix::zeros(3, 6)), None);
}

#[test]
fn singleton_family_matches_coherent() {
    let (f, tp, params) = desk();
    for seed in 0..5 {
        let coh = gv_construct_coherent(&tp, &f, &params, seed).unwrap();
        let non = gv_construct_noncoherent(std::slice::from_ref(&tp), &f, &params, seed).unwrap();
        assert_eq!(coh.packed_codewords(), non.packed_codewords());
        let x = coh.encode(3 % coh.len()).unwrap();
        let z = &all_noise(&params, 1)[4];
        let y = transmit(&tp, &f, &x, z).unwrap();
        let a = decode_coherent(&coh, &tp, &f, &y).unwrap();
        let b = decode_noncoherent(&non, &f, &y).unwrap();
        assert_eq!(a, b);
    }
    assert_eq!(
        noncoherent_guarantee(std::slice::from_ref(&tp), &f, &params).unwrap(),
        coherent_guarantee(&tp, &f, &params).unwrap()
    );
}

#[test]
fn noncoherent_desk_hides_the_network() {
    let (f, _, params) = desk();
    let family = mds_family(&f, 2, 3, &[0, 1]).unwrap();
    assert_eq!(family.len(), 6);
    assert!(family.len() <= 1 << 6);
    let cb = gv_construct_noncoherent(&family, &f, &params, 3).unwrap();
    assert!(!cb.is_empty());
    assert!(min_distance(&cb, &family).unwrap() > Distance::Finite(2));
    let dec = Decoder::new(&cb, None).unwrap();
    let noise = all_noise(&params, 1);
    for truth in &family {
        for (msg, x) in cb.codewords().enumerate() {
            for z in &noise {
                let y = transmit(truth, &f, &x, z).unwrap();
                let d = dec.decode(&y).unwrap();
                assert_eq!(d.message, msg);
                assert!(d.unique);
                if z.weight() == 0 {
                    assert_eq!(d.distance, Distance::Finite(0));
                }
            }
        }
    }
}

#[test]
fn noncoherent_long_block_nonempty() {
    let f = Field::new(1).unwrap();
    let family = mds_family(&f, 2, 3, &[0, 1]).unwrap();
    let params = ChannelParams::new(2, 3, 1, 12, Probability::new(1, 18).unwrap()).unwrap();
    let cb = gv_construct_noncoherent(&family, &f, &params, 0).unwrap();
    let guarantee = noncoherent_guarantee(&family, &f, &params).unwrap();
    assert!(BigUint::from(cb.len()) >= guarantee);
    assert!(min_distance(&cb, &family).unwrap() > Distance::Finite(cb.radius()));
}

#[test]
fn far_received_matrix_decodes_to_nearest() {
    let (f, tp, params) = desk();
    let cb = gv_construct_coherent(&tp, &f, &params, 2).unwrap();
    let lifted_t = f.lift_matrix(tp.t());
    let table = CosetLeaderTable::build(&f.lift_matrix(tp.that())).unwrap();
    let images: Vec<u64> = cb
        .packed_codewords()
        .iter()
        .map(|&x| map_columns(&lifted_t, x, 2, 6))
        .collect();
    let dec = Decoder::new(&cb, Some(&tp)).unwrap();
    let mut saw_tie = false;
    for y in 0u64..1 << 12 {
        let dists: Vec<Distance> = images.iter().map(|&u| table.packed_distance(u, y, 6)).collect();
        let best = *dists.iter().min().unwrap();
        let first = dists.iter().position(|&d| d == best).unwrap();
        let ties = dists.iter().filter(|&&d| d == best).count();
        let got = dec.decode(&BitMatrix::from_column_index(2, 6, y)).unwrap();
        assert_eq!((got.message, got.distance, got.unique), (first, best, ties == 1));
        saw_tie |= ties > 1 && best > Distance::Finite(1);
    }
    assert!(saw_tie);
}

#[test]
fn guards_and_preconditions() {
    let f = Field::new(2).unwrap();
    let tp = cauchy_transfer(&f, 2, 2).unwrap();
    let big = ChannelParams::new(2, 2, 2, 8, Probability::ZERO).unwrap();
    assert!(matches!(gv_construct_coherent(&tp, &f, &big, 0), Err(Error::Guard(_))));

    let g = Field::new(1).unwrap();
    let singular = TransferPair::from_impulse(
        FieldMatrix::from_values(&g, 2, 3, &[1, 1, 0, 1, 1, 1]).unwrap(),
        vec![0, 1],
    )
    .unwrap();
    let params = ChannelParams::new(2, 3, 1, 2, Probability::ZERO).unwrap();
    assert!(gv_construct_coherent(&singular, &g, &params, 0).is_err());
    assert!(matches!(gv_construct_noncoherent(&[], &g, &params, 0), Err(Error::EmptyFamily)));
    assert!(gv_construct_coherent(&tp, &g, &params, 0).is_err());
}

#[test]
fn decode_shape_checked() {
    let (f, tp, params) = desk();
    let cb = gv_construct_coherent(&tp, &f, &params, 0).unwrap();
    assert!(decode_coherent(&cb, &tp, &f, &BitMatrix::zeros(2, 5)).is_err());
    assert!(decode_noncoherent(&cb, &f, &BitMatrix::zeros(2, 6)).is_err());
}

#[test]
fn text_roundtrip() {
    let (f, tp, params) = desk();
    let cb = gv_construct_coherent(&tp, &f, &params, 9).unwrap();
    let text = cb.to_text();
    assert!(text.starts_with("binec-codebook v1\nparams C=2 E=3 m=1 n=6 p=1/18\nmode coherent\nradius 2\nseed 9\n"));
    assert_eq!(Codebook::from_text(&text).unwrap(), cb);

    let family = mds_family(&f, 2, 3, &[0, 1]).unwrap();
    let nc = gv_construct_noncoherent(&family, &f, &params, 9).unwrap();
    let text = nc.to_text();
    assert!(text.contains("family 6\nthat 0,1 011101\n"), "{text}");
    assert_eq!(Codebook::from_text(&text).unwrap(), nc);

    assert_eq!(parse_family(&family_to_text(&family, 1), &params).unwrap(), family);
    assert!(matches!(parse_family("# none\n", &params), Err(Error::EmptyFamily)));
    assert!(Codebook::from_text("binec-codebook v2\n").is_err());
    let truncated: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
    assert!(Codebook::from_text(&truncated).is_err());
    assert!(Codebook::from_text(&format!("{text}junk\n")).is_err());
}

#[test]
fn wider_field_roundtrip_and_decoding() {
    let f = Field::new(3).unwrap();
    let tp = cauchy_transfer(&f, 1, 3).unwrap();
    let params = ChannelParams::new(1, 3, 3, 4, Probability::new(1, 12).unwrap()).unwrap();
    let cb = gv_construct_coherent(&tp, &f, &params, 4).unwrap();
    assert!(min_distance(&cb, std::slice::from_ref(&tp)).unwrap() > Distance::Finite(cb.radius()));
    let family = vec![tp.clone()];
    let nc = gv_construct_noncoherent(&family, &f, &params, 4).unwrap();
    assert_eq!(Codebook::from_text(&nc.to_text()).unwrap(), nc);
}

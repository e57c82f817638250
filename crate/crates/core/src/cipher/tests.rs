use super::*;
use crate::ca_rules::build_rule_matrix;

fn noise(w: usize, h: usize, channels: usize, seed: u64) -> PixelImage {
    let mut g = SplitMix64::new(seed);
    let samples = (0..w * h * channels).map(|_| g.next_u64() as u8).collect();
    PixelImage::new(w, h, channels, samples).unwrap()
}

fn rule(v: u32) -> RuleId {
    RuleId::new(v).unwrap()
}

#[test]
fn round_trip_all_modes() {
    for mode in CipherMode::ALL {
        for (w, h, ch, seed) in [(1, 1, 1, 1), (17, 9, 1, 2), (20, 15, 3, 3)] {
            let img = noise(w, h, ch, seed);
            let key = CipherKey::generate_for(mode, seed * 31, &img);
            let c = encrypt_image(&img, &key).unwrap();
            assert_eq!(c.channels(), ch);
            assert_eq!(decrypt_image(&c, &key).unwrap(), img, "{mode} {w}x{h}");
        }
    }
}

#[test]
fn round_trip_column_axis_and_steps() {
    let img = noise(12, 11, 1, 5);
    for mode in [CipherMode::W2, CipherMode::W5] {
        let mut key = CipherKey::generate_for(mode, 8, &img);
        key.axis = LineAxis::Column;
        key.steps = 3;
        let c = encrypt_image(&img, &key).unwrap();
        assert_eq!(decrypt_image(&c, &key).unwrap(), img);
    }
}

#[test]
fn round_trip_other_block_sizes() {
    let img = noise(9, 7, 1, 6);
    for b in [1, 2, 3, 4, 8] {
        let key = CipherKey::generate_for(CipherMode::W3, 4, &img).with_block_size(b);
        let c = encrypt_image(&img, &key).unwrap();
        assert_eq!(decrypt_image(&c, &key).unwrap(), img, "b={b}");
    }
    let key = CipherKey::generate_for(CipherMode::W1, 4, &img).with_block_size(9);
    assert!(matches!(encrypt_image(&img, &key), Err(Error::Key(_))));
}

#[test]
fn identity_key_is_identity() {
    let img = noise(6, 5, 1, 7);
    let key = CipherKey {
        scramble_seed: None,
        rules: RuleSpec::Rules(vec![rule(1)]),
        ..CipherKey::generate_for(CipherMode::W1, 0, &img)
    };
    let bp = binarize(&img, 5).unwrap();
    assert_eq!(encrypt_plane(&bp, &key).unwrap(), bp);
}

#[test]
fn single_block_matches_matrix_oracle() {
    // One 5x5 block: a single pixel row padded to 5 rows and 10 columns.
    let img = PixelImage::gray(1, 1, vec![0b1011_0010]).unwrap();
    let key = CipherKey {
        scramble_seed: None,
        rules: RuleSpec::Rules(vec![rule(15)]),
        ..CipherKey::generate_for(CipherMode::W1, 0, &img)
    };
    let bp = binarize(&img, 5).unwrap();
    let out = encrypt_plane(&bp, &key).unwrap();
    let r = build_rule_matrix(rule(15), 5, 5).unwrap().matrix;
    for c in 0..2 {
        let v = BitVector::from_bits(
            &(0..25)
                .map(|k| bp.bits().get(k / 5, c * 5 + k % 5) as u8)
                .collect::<Vec<_>>(),
        );
        let want = r.multiply_vec(&v).unwrap();
        for k in 0..25 {
            assert_eq!(out.bits().get(k / 5, c * 5 + k % 5), want.get(k));
        }
    }
}

#[test]
fn linear_without_scramble() {
    let x = noise(10, 10, 1, 8);
    let y = noise(10, 10, 1, 9);
    let xy = PixelImage::gray(
        10,
        10,
        x.samples()
            .iter()
            .zip(y.samples())
            .map(|(a, b)| a ^ b)
            .collect(),
    )
    .unwrap();
    for mode in [CipherMode::W3, CipherMode::W6] {
        let key = CipherKey {
            scramble_seed: None,
            ..CipherKey::generate_for(mode, 10, &x)
        };
        let e = |img: &PixelImage| encrypt_image(img, &key).unwrap().into_samples();
        let lhs = e(&xy);
        let rhs: Vec<u8> = e(&x).iter().zip(e(&y)).map(|(a, b)| a ^ b).collect();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn schedule_shapes() {
    let key = CipherKey::generate(CipherMode::W1, 3, 256, 256, 1);
    let s = derive_schedule(&key, (52, 410)).unwrap();
    assert_eq!(s.slot_count(), 1);
    assert_eq!(s.matrices().len(), 1);
    assert_eq!(s.matrix_index(0, 0), s.matrix_index(51, 409));

    let w2 = derive_schedule(
        &CipherKey {
            mode: CipherMode::W2,
            ..key.clone()
        },
        (52, 410),
    )
    .unwrap();
    assert_eq!(w2.slot_count(), 52);
    assert_eq!(w2.matrix_index(3, 0), w2.matrix_index(3, 400));

    let w3 = derive_schedule(
        &CipherKey {
            mode: CipherMode::W3,
            ..key.clone()
        },
        (52, 410),
    )
    .unwrap();
    assert_eq!(w3.slot_count(), 52 * 410);
    assert!(
        w3.matrices().len() > 50,
        "W3 should use many distinct rules"
    );
    assert_eq!(
        w3,
        derive_schedule(
            &CipherKey {
                mode: CipherMode::W3,
                ..key
            },
            (52, 410)
        )
        .unwrap()
    );
}

#[test]
fn explicit_rule_lists() {
    let mut key = CipherKey::generate(CipherMode::W1, 0, 5, 2, 1);
    key.rules = RuleSpec::Rules(vec![rule(15)]);
    let s = derive_schedule(&key, (1, 4)).unwrap();
    assert_eq!(
        s.rule_at(0, 3).kind,
        crate::ca_rules::RuleKind::Uniform(rule(15))
    );

    key.rules = RuleSpec::Rules(vec![rule(2)]);
    assert!(matches!(derive_schedule(&key, (1, 4)), Err(Error::Key(_))));

    key.mode = CipherMode::W2;
    key.rules = RuleSpec::Rules(vec![rule(15), rule(15)]);
    assert!(matches!(derive_schedule(&key, (1, 4)), Err(Error::Key(_))));

    key.mode = CipherMode::W4;
    assert!(matches!(derive_schedule(&key, (1, 4)), Err(Error::Key(_))));
    key.rules = RuleSpec::HybridSeeds(vec![42]);
    assert_eq!(derive_schedule(&key, (1, 4)).unwrap().matrices().len(), 1);
}

#[test]
fn schedule_space_grows_with_granularity() {
    let grid = (52, 410);
    let log = |m| schedule_space_log2(m, LineAxis::Row, grid, 5).unwrap();
    assert!((log(CipherMode::W1) - 101f64.log2()).abs() < 1e-9);
    assert!(log(CipherMode::W1) < log(CipherMode::W2));
    assert!(log(CipherMode::W2) < log(CipherMode::W3));
    assert!(log(CipherMode::W4) < log(CipherMode::W5));
    assert!(log(CipherMode::W5) < log(CipherMode::W6));
    for (u, h) in [
        (CipherMode::W1, CipherMode::W4),
        (CipherMode::W3, CipherMode::W6),
    ] {
        assert!(log(u) < log(h));
    }
    // |GL(2,2)| = 6
    let gl2 = schedule_space_log2(CipherMode::W4, LineAxis::Row, (1, 1), 1).unwrap();
    assert!((gl2 - 0.0).abs() < 1e-9);
    let gl = schedule_space_log2(CipherMode::W4, LineAxis::Row, (1, 1), 2).unwrap();
    assert!((gl - 20160f64.log2()).abs() < 1e-9, "|GL(4,2)| = 20160");
}

#[test]
fn scramble_is_a_permutation() {
    let bp = binarize(&noise(9, 8, 1, 11), 5).unwrap();
    let s = scramble(&bp, 77).unwrap();
    assert_ne!(s, bp);
    assert_eq!(s.bits().count_ones(), bp.bits().count_ones());
    assert_eq!(unscramble(&s, 77).unwrap(), bp);
    let (p1, p2) = bp.padded();
    assert_eq!(
        ScramblePermutation::identity(p1, p2).apply(&bp).unwrap(),
        bp
    );
    assert!(ScramblePermutation::identity(p1 + 1, p2)
        .apply(&bp)
        .is_err());
}

#[test]
fn wrong_key_does_not_decrypt() {
    let img = noise(16, 16, 1, 12);
    let k1 = CipherKey::generate_for(CipherMode::W3, 100, &img);
    let k2 = CipherKey::generate_for(CipherMode::W3, 101, &img);
    let c = encrypt_image(&img, &k1).unwrap();
    assert_ne!(decrypt_image(&c, &k2).unwrap(), img);
    assert_ne!(c, encrypt_image(&img, &k2).unwrap());
}

#[test]
fn modes_give_different_ciphertexts() {
    let img = noise(16, 16, 1, 13);
    let a = encrypt_image(&img, &CipherKey::generate_for(CipherMode::W1, 5, &img)).unwrap();
    let b = encrypt_image(&img, &CipherKey::generate_for(CipherMode::W3, 5, &img)).unwrap();
    assert_ne!(a, b);
}

#[test]
fn geometry_mismatch_is_reported() {
    let img = noise(16, 16, 1, 14);
    let key = CipherKey::generate(CipherMode::W1, 1, 20, 16, 1);
    match encrypt_image(&img, &key) {
        Err(Error::Geometry(msg)) => {
            assert!(msg.contains("20x16") && msg.contains("16x16"), "{msg}")
        }
        other => panic!("{other:?}"),
    }
    let rgb_key = CipherKey::generate(CipherMode::W1, 1, 16, 16, 3);
    assert!(matches!(
        encrypt_image(&img, &rgb_key),
        Err(Error::Geometry(_))
    ));
    let good = CipherKey::generate_for(CipherMode::W1, 1, &img);
    assert!(matches!(
        decrypt_image(&img, &good),
        Err(Error::Geometry(_))
    ));
}

#[test]
fn canvas_and_footprint_sizes() {
    let img = noise(256, 256, 1, 15);
    let key = CipherKey::generate_for(CipherMode::W1, 1, &img);
    let c = encrypt_image(&img, &key).unwrap();
    assert_eq!((c.width(), c.height()), (257, 260));
    let f = ciphertext_footprint(&c, &key).unwrap();
    assert_eq!((f.width(), f.height()), (256, 256));
}

#[test]
fn mode_names() {
    for (i, m) in CipherMode::ALL.iter().enumerate() {
        assert_eq!(m.to_string(), format!("W{}", i + 1));
        assert_eq!(
            m.to_string().to_lowercase().parse::<CipherMode>().unwrap(),
            *m
        );
    }
    assert!("W7".parse::<CipherMode>().is_err());
}

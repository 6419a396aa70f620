use bmst_ht::hadamard::{row_weight, HadamardSiso};
use bmst_ht::{complementary_pairs, exact_extrinsic, fht, hadamard_matrix, siso_fht, BinaryVector, SoftMessage};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `H_N` built by the Kronecker recursion `H_2N = [[H, H], [0, H]]`.
fn kron_hadamard(p: u32) -> Vec<Vec<u8>> {
    let mut h = vec![vec![1u8]];
    for _ in 0..p {
        let n = h.len();
        let mut next = vec![vec![0u8; 2 * n]; 2 * n];
        for r in 0..n {
            for c in 0..n {
                next[r][c] = h[r][c];
                next[r][c + n] = h[r][c];
                next[r + n][c + n] = h[r][c];
            }
        }
        h = next;
    }
    h
}

fn vec_times_matrix(u: &[u8], h: &[Vec<u8>]) -> Vec<u8> {
    let n = u.len();
    (0..n)
        .map(|c| (0..n).fold(0u8, |acc, r| acc ^ (u[r] & h[r][c])))
        .collect()
}

fn bits_of(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((x >> i) & 1) as u8).collect()
}

/// Extrinsics by direct summation over all inputs with an explicit matrix.
fn brute_extrinsic(prior_u0: &[SoftMessage], prior_up: &[SoftMessage]) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let n = prior_u0.len();
    let h = kron_hadamard(n.trailing_zeros());
    let mut e0 = vec![[0.0; 2]; n];
    let mut ep = vec![[0.0; 2]; n];
    for x in 0..1usize << n {
        let u = bits_of(x, n);
        let v = vec_times_matrix(&u, &h);
        for j in 0..n {
            let mut w0 = 1.0;
            let mut wp = 1.0;
            for k in 0..n {
                let pu = prior_u0[k].prob(u[k] == 1);
                let pv = prior_up[k].prob(v[k] == 1);
                wp *= pv;
                w0 *= pu;
                if k == j {
                    wp /= pv;
                    w0 /= pu;
                }
            }
            let all_u: f64 = (0..n).map(|k| prior_u0[k].prob(u[k] == 1)).product();
            let all_v: f64 = (0..n).map(|k| prior_up[k].prob(v[k] == 1)).product();
            e0[j][u[j] as usize] += all_v * w0;
            ep[j][v[j] as usize] += all_u * wp;
        }
    }
    let norm = |a: [f64; 2]| [a[0] / (a[0] + a[1]), a[1] / (a[0] + a[1])];
    (e0.into_iter().map(norm).collect(), ep.into_iter().map(norm).collect())
}

fn random_messages(rng: &mut ChaCha8Rng, n: usize) -> Vec<SoftMessage> {
    (0..n)
        .map(|_| {
            let p: f64 = rng.random_range(0.02..0.98);
            SoftMessage::new(1.0 - p, p)
        })
        .collect()
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> BinaryVector {
    BinaryVector::from_bools((0..n).map(|_| rng.random::<bool>()))
}

#[test]
fn complementary_pair_examples() {
    let pairs = complementary_pairs(1, 0).unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!((pairs[0].j, pairs[0].j_prime), (0, 1));
    let has = |p, s, a, b| complementary_pairs(p, s).unwrap().iter().any(|x| x.j == a && x.j_prime == b);
    assert!(has(3, 1, 4, 6));
    assert!(has(3, 2, 3, 7));
    assert!(complementary_pairs(3, 3).is_err());
}

#[test]
fn complementary_pairs_partition_indices() {
    for p in 1..=6u32 {
        for s in 0..p {
            let pairs = complementary_pairs(p, s).unwrap();
            assert_eq!(pairs.len(), 1 << (p - 1));
            let mut seen = vec![false; 1 << p];
            for pr in &pairs {
                assert!(pr.j < pr.j_prime);
                assert_eq!(pr.j ^ pr.j_prime, 1 << s);
                assert!(!seen[pr.j] && !seen[pr.j_prime]);
                seen[pr.j] = true;
                seen[pr.j_prime] = true;
            }
            assert!(seen.iter().all(|&b| b));
        }
    }
}

#[test]
fn matrix_matches_kronecker_recursion() {
    for p in 1..=7u32 {
        let h = hadamard_matrix(p).unwrap();
        let k = kron_hadamard(p);
        for (r, row) in h.iter().enumerate() {
            assert_eq!(row.to_bits(), k[r], "p={p} row {r}");
        }
    }
    assert!(hadamard_matrix(0).is_err());
}

#[test]
fn h8_row_weights() {
    let h = hadamard_matrix(3).unwrap();
    let w: Vec<usize> = h.iter().map(|r| r.weight()).collect();
    assert_eq!(w, vec![8, 4, 4, 2, 4, 2, 2, 1]);
    for (r, &wr) in w.iter().enumerate() {
        assert_eq!(row_weight(3, r), wr);
    }
    assert_eq!(hadamard_matrix(1).unwrap()[0].to_bits(), vec![1, 1]);
    assert_eq!(hadamard_matrix(1).unwrap()[1].to_bits(), vec![0, 1]);
}

#[test]
fn matrix_squares_to_identity() {
    for p in 1..=8u32 {
        let h = kron_hadamard(p);
        let n = h.len();
        for r in 0..n {
            let sq = vec_times_matrix(&h[r], &h);
            for (c, &x) in sq.iter().enumerate() {
                assert_eq!(x, (r == c) as u8, "p={p}");
            }
        }
    }
}

#[test]
fn fht_examples() {
    let e0 = BinaryVector::from_bits(&[1, 0, 0, 0, 0, 0, 0, 0]).unwrap();
    assert_eq!(fht(&e0).unwrap().to_bits(), vec![1; 8]);
    assert_eq!(fht(&BinaryVector::zeros(16)).unwrap(), BinaryVector::zeros(16));
    assert_eq!(fht(&BinaryVector::from_bits(&[1, 1]).unwrap()).unwrap().to_bits(), vec![1, 0]);
    assert!(fht(&BinaryVector::zeros(6)).is_err());
}

#[test]
fn fht_matches_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in 1..=9u32 {
        let n = 1usize << p;
        let h = kron_hadamard(p);
        for _ in 0..20 {
            let u = random_bits(&mut rng, n);
            assert_eq!(fht(&u).unwrap().to_bits(), vec_times_matrix(&u.to_bits(), &h), "p={p}");
        }
    }
}

#[test]
fn fht_involution_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2usize, 4, 8, 16, 32] {
        for _ in 0..1000 {
            let u = random_bits(&mut rng, n);
            assert_eq!(fht(&fht(&u).unwrap()).unwrap(), u);
        }
    }
}

proptest! {
    #[test]
    fn prop_fht_involution(p in 1u32..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_bits(&mut rng, 1 << p);
        prop_assert_eq!(fht(&fht(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn prop_fht_linear(p in 1u32..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_bits(&mut rng, 1 << p);
        let b = random_bits(&mut rng, 1 << p);
        prop_assert_eq!(fht(&a.xor(&b)).unwrap(), fht(&a).unwrap().xor(&fht(&b).unwrap()));
    }

    #[test]
    fn prop_extrinsic_ignores_own_prior(p in 1u32..=3, j in 0usize..8, seed in any::<u64>(), q in 0.01f64..0.99) {
        let n = 1usize << p;
        let j = j % n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pu = random_messages(&mut rng, n);
        let pv = random_messages(&mut rng, n);
        let (a0, ap) = exact_extrinsic(&pu, &pv).unwrap();
        let mut pu2 = pu.clone();
        pu2[j] = SoftMessage::new(q, 1.0 - q);
        let (b0, _) = exact_extrinsic(&pu2, &pv).unwrap();
        prop_assert!((a0[j].p0 - b0[j].p0).abs() < 1e-12);
        let mut pv2 = pv.clone();
        pv2[j] = SoftMessage::new(1.0 - q, q);
        let (_, bp) = exact_extrinsic(&pu, &pv2).unwrap();
        prop_assert!((ap[j].p0 - bp[j].p0).abs() < 1e-12);
    }

    #[test]
    fn prop_siso_outputs_normalized(p in 1u32..=6, iters in 1usize..5, seed in any::<u64>()) {
        let n = 1usize << p;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pu = random_messages(&mut rng, n);
        let pv = random_messages(&mut rng, n);
        let (e0, ep) = siso_fht(&pu, &pv, iters).unwrap();
        for m in e0.iter().chain(ep.iter()) {
            prop_assert!(m.p0 >= 0.0 && m.p1 >= 0.0);
            prop_assert!((m.p0 + m.p1 - 1.0).abs() < 1e-9);
            prop_assert!(m.p0.min(m.p1) >= 1e-12);
        }
    }
}

#[test]
fn exact_extrinsic_matches_direct_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in 1..=3u32 {
        let n = 1usize << p;
        for _ in 0..20 {
            let pu = random_messages(&mut rng, n);
            let pv = random_messages(&mut rng, n);
            let (e0, ep) = exact_extrinsic(&pu, &pv).unwrap();
            let (b0, bp) = brute_extrinsic(&pu, &pv);
            for j in 0..n {
                assert!((e0[j].p0 - b0[j][0]).abs() < 1e-10);
                assert!((ep[j].p0 - bp[j][0]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn exact_extrinsic_single_butterfly_closed_form() {
    // v0 = u0, v1 = u0 ^ u1
    let pu = [SoftMessage::new(0.8, 0.2), SoftMessage::new(0.3, 0.7)];
    let pv = [SoftMessage::new(0.6, 0.4), SoftMessage::new(0.1, 0.9)];
    let (e0, ep) = exact_extrinsic(&pu, &pv).unwrap();
    let mut want = [0.0; 2];
    for u0 in 0..2 {
        for u1 in 0..2 {
            want[u0] += pu[1].prob(u1 == 1) * pv[0].prob(u0 == 1) * pv[1].prob((u0 ^ u1) == 1);
        }
    }
    assert!((e0[0].p0 - want[0] / (want[0] + want[1])).abs() < 1e-12);
    assert!(ep[0].p0.is_finite());
}

#[test]
fn exact_extrinsic_rejects_large_or_mismatched() {
    let u = vec![SoftMessage::UNIFORM; 32];
    assert!(matches!(exact_extrinsic(&u, &u), Err(bmst_ht::Error::Capability(_))));
    assert!(exact_extrinsic(&u[..4], &u[..8]).is_err());
}

#[test]
fn siso_exact_on_single_butterfly() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let pu = random_messages(&mut rng, 2);
        let pv = random_messages(&mut rng, 2);
        let (e0, ep) = exact_extrinsic(&pu, &pv).unwrap();
        for iters in [1, 3] {
            let (s0, sp) = siso_fht(&pu, &pv, iters).unwrap();
            for j in 0..2 {
                assert!((s0[j].p0 - e0[j].p0).abs() < 1e-9);
                assert!((sp[j].p0 - ep[j].p0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn siso_uniform_priors_stay_uniform() {
    let u = vec![SoftMessage::UNIFORM; 64];
    let (e0, ep) = siso_fht(&u, &u, 3).unwrap();
    assert!(e0.iter().chain(ep.iter()).all(|m| (m.p0 - 0.5).abs() < 1e-12));
}

#[test]
fn siso_certain_priors_propagate() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let u = random_bits(&mut rng, 16);
    let v = fht(&u).unwrap();
    let pu = bmst_ht::MessageVector::certain(&u);
    let pv = vec![SoftMessage::UNIFORM; 16];
    let (_, ep) = siso_fht(&pu, &pv, 1).unwrap();
    assert_eq!(ep.hard_decision(), v);
}

#[test]
fn siso_reusable_state_matches_fresh_calls() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut siso = HadamardSiso::new(8).unwrap();
    for _ in 0..5 {
        let pu = random_messages(&mut rng, 8);
        let pv = random_messages(&mut rng, 8);
        let (f0, fp) = siso_fht(&pu, &pv, 2).unwrap();
        let mut e0 = vec![SoftMessage::UNIFORM; 8];
        let mut ep = vec![SoftMessage::UNIFORM; 8];
        siso.run(&pu, &pv, 2, &mut e0, &mut ep);
        assert_eq!(&e0[..], &f0[..]);
        assert_eq!(&ep[..], &fp[..]);
    }
    assert!(siso_fht(&[SoftMessage::UNIFORM; 2], &[SoftMessage::UNIFORM; 2], 0).is_err());
}

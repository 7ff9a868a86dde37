use classpoly_oracle::{brute, hilbert_class_poly as oracle};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::SeedableRng;

use super::*;
use crate::arith::{is_prime, PrimeField};
use crate::classgroup::{default_generator_norms, polycyclic_presentation};
use crate::polyring::{roots, ModPoly};
use crate::primeselect::rank_torsion;
use num_rational::Ratio;

fn crt_prime(p: u64, t: u64, v: u64) -> CrtPrime {
    CrtPrime {
        p,
        t,
        v,
        rho_inv: Ratio::from_integer(1),
        plan: rank_torsion(p, t),
        benefit: (p as f64).log2(),
    }
}

fn reduce(c: &[BigInt], m: u64) -> Vec<u64> {
    c.iter().map(|x| x.mod_floor(&BigInt::from(m)).try_into().unwrap()).collect()
}

fn db() -> &'static ModPolyDb {
    ModPolyDb::global().unwrap()
}

fn over_z(d: i64, seed: u64, jobs: usize) -> HilbertResult {
    let mut c = JobConfig::new(d, BigUint::zero());
    c.seed = seed;
    c.jobs = jobs;
    hilbert_class_poly(&c).unwrap()
}

#[test]
fn single_prime_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pres = polycyclic_presentation(-7, &[]).unwrap();
    let r = hilbert_mod_p(&crt_prime(23, 8, 2), &pres, db(), &TraceSearchOptions::default(), &mut rng).unwrap();
    assert_eq!(r.coeffs, vec![17, 1]);

    let pres = polycyclic_presentation(-71, &default_generator_norms(-71).unwrap()).unwrap();
    let want = reduce(&oracle(-71), 107);
    let f = PrimeField::new(107).unwrap();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = hilbert_mod_p(&crt_prime(107, 12, 2), &pres, db(), &TraceSearchOptions::default(), &mut rng).unwrap();
        assert_eq!(r.coeffs, want);
        let rs = roots(&f, &ModPoly::from_u64s(&f, &r.coeffs));
        assert_eq!(rs.len(), 7);
        assert!(rs.iter().all(|x| x.multiplicity == 1));
    }
}

#[test]
fn small_discriminants_over_z() {
    for d in [-7i64, -8, -11, -15, -20, -23, -71, -84, -95, -420, -1155, -11 * 169, -7 * 9, -15 * 4] {
        if check_discriminant(d, db()).is_err() {
            continue;
        }
        let r = over_z(d, 3, 2);
        assert_eq!(r.coeffs, oracle(d), "D={d}");
        assert_eq!(r.h as usize + 1, r.coeffs.len());
    }
    assert_eq!(over_z(-7, 0, 1).coeffs, vec![BigInt::from(3375), BigInt::from(1)]);
}

#[test]
fn reduction_mod_p() {
    let mut c = JobConfig::new(-71, BigUint::from(1009u32));
    c.jobs = 3;
    let r = hilbert_class_poly(&c).unwrap();
    let want: Vec<BigInt> = reduce(&oracle(-71), 1009).into_iter().map(BigInt::from).collect();
    assert_eq!(r.coeffs, want);
    assert_eq!(r.stats.crt_mode, Some(CrtMode::Explicit));

    let mut c = JobConfig::new(-71, BigUint::one());
    c.seed = 5;
    assert!(hilbert_class_poly(&c).unwrap().coeffs.iter().all(Zero::is_zero));
}

#[test]
fn rejected_discriminants() {
    for d in [-3i64, -4, -12, -16, -27, -36, -5, 1] {
        assert!(check_discriminant(d, db()).is_err(), "D={d}");
    }
    // conductor 53 is beyond the database
    let err = check_discriminant(-7 * 53 * 53, db()).unwrap_err();
    assert!(matches!(err, Error::UnsupportedDiscriminant { .. }));
    assert!(check_discriminant(-7 * 47 * 47, db()).is_ok());
}

#[test]
fn independent_of_seed_and_workers() {
    let d = -3299;
    let p = BigUint::parse_bytes(b"115792089237316195423570985008687907853269984665640564039457584007908834671663", 10).unwrap();
    let mut base = None;
    for (seed, jobs) in [(1u64, 1usize), (2, 4), (99, 7)] {
        let mut c = JobConfig::new(d, p.clone());
        c.seed = seed;
        c.jobs = jobs;
        let r = hilbert_class_poly(&c).unwrap().coeffs;
        match &base {
            None => base = Some(r),
            Some(b) => assert_eq!(&r, b),
        }
    }
    let want: Vec<BigInt> = oracle(d).iter().map(|c| c.mod_floor(&BigInt::from(p.clone()))).collect();
    assert_eq!(base.unwrap(), want);
}

#[test]
fn disjoint_prime_sets_agree() {
    for d in [-1155i64, -4 * 1401, -3 * 1637] {
        if check_discriminant(d, db()).is_err() {
            continue;
        }
        let first = over_z(d, 1, 2);
        let hb = height_bound(d).unwrap();
        let used = select_usable_primes(d, hb.b, &SelectionConfig::default(), db()).unwrap();
        let mut c = JobConfig::new(d, BigUint::zero());
        c.selection.exclude = used.primes.iter().map(|c| c.p).collect();
        c.jobs = 2;
        let second = hilbert_class_poly(&c).unwrap();
        assert_eq!(first.coeffs, second.coeffs, "D={d}");
        // a prime outside both sets splits the result completely
        let second_used = select_usable_primes(d, hb.b, &c.selection, db()).unwrap();
        let taken: BTreeSet<u64> = used.primes.iter().chain(&second_used.primes).map(|c| c.p).collect();
        let fresh = crate::primeselect::enumerate_sz(d, 4 * second_used.z)
            .unwrap()
            .into_iter()
            .map(|c| c.p)
            .filter(|p| !taken.contains(p))
            .max()
            .unwrap();
        let f = PrimeField::new(fresh).unwrap();
        let poly = ModPoly::from_u64s(&f, &reduce(&first.coeffs, fresh));
        let rs = roots(&f, &poly);
        assert_eq!(rs.len() as u64, first.h, "D={d} p={fresh}");
        assert!(rs.iter().all(|r| r.multiplicity == 1));
    }
}

#[test]
fn cost_order_prefers_cheap_walks() {
    let d = -71;
    let base = cost_order(d, 1, db());
    assert!(base.windows(2).all(|w| w[0] < w[1]));
    let with_two = cost_order(d, 2, db());
    assert_eq!(*with_two.last().unwrap(), 2);
    assert!(cost_order(-420, 1, db()).iter().all(|&l| kronecker(-420, l) != -1));
}

#[test]
fn output_format() {
    let r = over_z(-15, 0, 1);
    assert_eq!(r.to_text(), "D -15 P 0 h 2\n0 -121287375\n1 191025\n2 1\n");
}

#[test]
fn cm_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = cm_construct(-71, 107, CmSign::Plus, 1, &mut rng).unwrap();
    assert_eq!((c.t, c.order), (12, 96));
    let f = PrimeField::new(107).unwrap();
    assert_eq!(brute::point_count(107, c.a, c.b), 96);
    assert!(!f.is_zero(c.curve.j_invariant(&f)));

    let c = cm_construct(-7, 23, CmSign::Plus, 1, &mut rng).unwrap();
    assert_eq!(c.order, 16);
    assert_eq!(brute::point_count(23, c.a, c.b), 16);
    let c = cm_construct(-7, 23, CmSign::Minus, 1, &mut rng).unwrap();
    assert_eq!(brute::point_count(23, c.a, c.b), 32);

    assert!(matches!(cm_construct(-71, 109, CmSign::Plus, 1, &mut rng), Err(Error::NoCmSolution { .. })));
    assert!(cm_construct(-71, 100, CmSign::Plus, 1, &mut rng).is_err());
}

#[test]
fn cm_larger_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = -3299i64;
    let mut found = 0;
    for v in 1..200u64 {
        for t in [2 * v + 1, 4 * v + 1, 7 * v + 3] {
            let n = (t * t) as i128 + (v * v) as i128 * 3299;
            if n % 4 != 0 {
                continue;
            }
            let q = (n / 4) as u64;
            if q < 1 << 20 || !is_prime(&BigUint::from(q)) {
                continue;
            }
            let c = cm_construct(d, q, CmSign::Minus, 2, &mut rng).unwrap();
            let f = PrimeField::new(q).unwrap();
            for _ in 0..20 {
                let pt = c.curve.random_point(&f, &mut rng);
                assert!(c.curve.scalar_mul(&f, c.order, pt).is_infinity());
            }
            found += 1;
        }
        if found >= 3 {
            break;
        }
    }
    assert!(found >= 3);
}

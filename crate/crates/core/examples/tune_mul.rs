//! Times schoolbook, Karatsuba and NTT multiplication over a range of
//! lengths and reports where each overtakes the previous one.
//!
//! cargo run --release --example tune_mul [-- <p>]

use std::hint::black_box;
use std::time::{Duration, Instant};

use classpoly::arith::{Fe, PrimeField};
use classpoly::polyring::{mul_karatsuba, mul_ntt, mul_schoolbook, KARATSUBA_THRESHOLD, NTT_THRESHOLD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn time(f: impl Fn() -> Vec<Fe>) -> Duration {
    let mut reps = 1u32;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(f());
        }
        let t = start.elapsed();
        if t > Duration::from_millis(50) {
            return t / reps;
        }
        reps *= 2;
    }
}

fn main() {
    let p: u64 = std::env::args().nth(1).map_or(1_000_000_007, |s| s.parse().expect("prime"));
    let field = PrimeField::new(p).expect("prime modulus below 2^62");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut karatsuba_wins = None;
    let mut ntt_wins = None;
    println!("{:>6} {:>12} {:>12} {:>12}", "len", "schoolbook", "karatsuba", "ntt");
    let mut n = 8;
    while n <= 4096 {
        let a: Vec<Fe> = (0..n).map(|_| field.random(&mut rng)).collect();
        let b: Vec<Fe> = (0..n).map(|_| field.random(&mut rng)).collect();
        let ts = time(|| mul_schoolbook(&field, &a, &b));
        let tk = time(|| mul_karatsuba(&field, &a, &b));
        let tn = time(|| mul_ntt(&field, &a, &b));
        println!("{n:>6} {:>12.2?} {:>12.2?} {:>12.2?}", ts, tk, tn);
        if karatsuba_wins.is_none() && tk < ts {
            karatsuba_wins = Some(n);
        }
        if ntt_wins.is_none() && tn < tk.min(ts) {
            ntt_wins = Some(n);
        }
        n += n / 2;
    }
    println!("karatsuba first faster at {karatsuba_wins:?} (current threshold {KARATSUBA_THRESHOLD})");
    println!("ntt first faster at {ntt_wins:?} (current threshold {NTT_THRESHOLD})");
}

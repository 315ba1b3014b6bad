use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotorwalk::{RotorSequence, UTable};

fn config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

/// Non-degenerate word of degree `d`: every symbol once plus `extra`, shuffled.
fn nondegenerate_word(d: u32, extra: Vec<u8>, shuffle: u64) -> Vec<u8> {
    let mut w: Vec<u8> = (0..=d as u8).chain(extra).collect();
    w.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
    w
}

fn periodic_strategy(max_degree: u32, max_len: usize) -> impl Strategy<Value = RotorSequence> {
    (1..=max_degree).prop_flat_map(move |d| {
        let room = max_len - (d as usize + 1);
        (prop::collection::vec(0..=d as u8, 0..=room), any::<u64>())
            .prop_map(move |(extra, sh)| RotorSequence::periodic(d, nondegenerate_word(d, extra, sh)).unwrap())
    })
}

fn sequence_strategy(max_degree: u32, max_len: usize) -> impl Strategy<Value = RotorSequence> {
    (periodic_strategy(max_degree, max_len), prop::collection::vec(0..=9u8, 0..5)).prop_map(|(s, pre)| {
        let d = s.degree() as u8;
        let pre = pre.into_iter().map(|b| b % (d + 1)).collect();
        RotorSequence::new(s.degree(), pre, s.period().to_vec()).unwrap()
    })
}

fn balanced_strategy(max_degree: u32, max_n: usize) -> impl Strategy<Value = RotorSequence> {
    (1..=max_degree, 1..=max_n, any::<u64>()).prop_map(|(d, n, sh)| {
        let mut w: Vec<u8> = (0..=d as u8).flat_map(|s| std::iter::repeat_n(s, n)).collect();
        w.shuffle(&mut ChaCha8Rng::seed_from_u64(sh));
        RotorSequence::periodic(d, w).unwrap()
    })
}

proptest! {
    #![proptest_config(config(256, 11))]

    #[test]
    fn format_round_trips(s in sequence_strategy(9, 16)) {
        let text = s.format(false);
        prop_assert_eq!(RotorSequence::parse(&text, s.degree()).unwrap(), s.clone());
        if s.degree() == 1 {
            prop_assert_eq!(RotorSequence::parse(&s.format(true), 1).unwrap(), s);
        }
    }

    #[test]
    fn canonical_form_describes_the_same_word(s in sequence_strategy(4, 12), reps in 1usize..4) {
        let mut period = Vec::new();
        for _ in 0..reps {
            period.extend_from_slice(s.period());
        }
        let mut pre = s.preperiod().to_vec();
        pre.extend_from_slice(s.period());
        let long = RotorSequence::new(s.degree(), pre, period).unwrap();
        prop_assert_eq!(&long, &s);
        for t in 0..100 {
            prop_assert_eq!(long.symbol(t), s.symbol(t));
        }
    }

    #[test]
    fn rotations_form_a_group(s in sequence_strategy(5, 16), i in 0u32..6, j in 0u32..6) {
        let d = s.degree();
        let (i, j) = (i % (d + 1), j % (d + 1));
        prop_assert_eq!(s.rotate(i).unwrap().rotate(j).unwrap(), s.rotate((i + j) % (d + 1)).unwrap());
        let mut r = s.clone();
        for _ in 0..=d {
            r = r.rotate(1).unwrap();
        }
        prop_assert_eq!(&r, &s);
        prop_assert_eq!(s.rotate(0).unwrap(), s.clone());
        prop_assert_eq!(s.rotate(i).unwrap().period_len(), s.period_len());
        prop_assert!(s.rotate(d + 1).is_err());
    }

    #[test]
    fn shifts_form_a_semigroup(s in sequence_strategy(4, 16), i in 0u64..40, j in 0u64..40) {
        prop_assert_eq!(s.shift(i).shift(j), s.shift(i + j));
        for t in 0..50 {
            prop_assert_eq!(s.shift(i).symbol(t), s.symbol(i + t));
        }
        if s.is_purely_periodic() {
            prop_assert_eq!(s.shift(s.period_len() as u64), s.clone());
        }
        prop_assert_eq!(s.shift(0), s);
    }

    #[test]
    fn u_value_is_monotone(s in sequence_strategy(4, 24)) {
        let l = s.period_len() as u64 + s.preperiod().len() as u64;
        for i in 1..=s.degree() {
            let mut prev = 0;
            for x in 0..=10 * l {
                let u = s.u_value(i, x).unwrap();
                prop_assert!(u >= prev);
                prev = u;
            }
        }
    }

    #[test]
    fn subduality_on_the_line(s in sequence_strategy(1, 24)) {
        let tau = s.rotate(1).unwrap();
        prop_assert_eq!(tau.u_value(1, s.u_value(1, 0).unwrap()).unwrap(), 0);
        let l = (s.period_len() + s.preperiod().len()) as u64;
        for x in 1..=10 * l {
            prop_assert!(tau.u_value(1, s.u_value(1, x).unwrap()).unwrap() < x);
            prop_assert!(s.u_value(1, tau.u_value(1, x).unwrap()).unwrap() < x);
        }
    }

    #[test]
    fn balanced_values_stay_below_n(s in balanced_strategy(4, 6)) {
        let n = s.balance_parameter().unwrap();
        for i in 1..=s.degree() {
            for beta in 1..=n {
                prop_assert!(s.u_value(i, beta).unwrap() <= n);
            }
        }
    }

    #[test]
    fn table_with_preperiod_matches_scan(s in sequence_strategy(4, 12)) {
        let t = UTable::new(&s).unwrap();
        let l = (s.period_len() + s.preperiod().len()) as u64;
        for i in 1..=s.degree() {
            for x in 0..=10 * l {
                prop_assert_eq!(t.eval(i, x), s.u_value(i, x).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(200, 12))]

    #[test]
    fn table_matches_scan(s in periodic_strategy(4, 24)) {
        let t = UTable::new(&s).unwrap();
        let l = s.period_len() as u64;
        prop_assert_eq!(t.zeros_per_period() + t.counts_per_period().iter().sum::<u64>(), l);
        for i in 1..=s.degree() {
            for x in 0..=10 * l {
                prop_assert_eq!(t.eval(i, x), s.u_value(i, x).unwrap());
            }
        }
        if s.is_balanced() {
            prop_assert!(t.is_drift_free());
        }
    }
}

use fluct_core::distributions::{occupation_pdf_exact_with, LevelSelection};
use fluct_core::enumeration::{microstate_count, oracle_moment, oracle_pdf};
use fluct_core::identities::{check_joint_normalization, Verdict};
use fluct_core::moments::{exact_moment, MomentSpec};
use fluct_core::monte_carlo::{empirical_stats_with, sample_microstate, SamplerConfig};
use fluct_core::{Execution, ExactRational, SystemParams};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(n: u64, m: u64) -> SystemParams {
    SystemParams::new(n, m).unwrap()
}

#[test]
fn moments_and_pdfs_agree_with_enumeration_on_a_grid() {
    for n in 1..=6 {
        for m in 0..=8 {
            let p = params(n, m);
            for j in 0..=m {
                for order in 0..=3 {
                    assert_eq!(
                        exact_moment(&p, MomentSpec::new(j, order)).unwrap(),
                        oracle_moment(&p, j, order).unwrap(),
                        "N={n} M={m} j={j} order={order}"
                    );
                }
                for exec in [Execution::Sequential, Execution::Parallel] {
                    let table = occupation_pdf_exact_with(&p, j, exec).unwrap();
                    assert_eq!(table, oracle_pdf(&p, j).unwrap());
                    assert!(table.total().is_one());
                }
            }
        }
    }
}

#[test]
fn hand_counted_small_system() {
    let p = params(2, 2);
    assert_eq!(microstate_count(&p), BigInt::from(3));
    assert_eq!(
        exact_moment(&p, MomentSpec::new(0, 1)).unwrap(),
        ExactRational::new(2.into(), 3.into())
    );
    let pdf = oracle_pdf(&p, 1).unwrap();
    assert_eq!(pdf.probabilities()[0], ExactRational::new(2.into(), 3.into()));
}

#[test]
fn empirical_stats_do_not_depend_on_policy() {
    let cfg = SamplerConfig::new(params(20, 30), 40_000, 7).unwrap();
    assert_eq!(
        empirical_stats_with(&cfg, Execution::Sequential),
        empirical_stats_with(&cfg, Execution::Parallel)
    );
}

proptest! {
    #[test]
    fn sampled_microstates_conserve_particles_and_energy(n in 1u64..40, m in 0u64..80, seed: u64) {
        let p = params(n, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = sample_microstate(&p, &mut rng);
        prop_assert_eq!(state.particles(), n);
        prop_assert_eq!(state.energy(), m);
    }

    #[test]
    fn joint_tables_normalize(n in 1u64..6, m in 1u64..8, x in 0u64..64, y in 0u64..64) {
        let a = x % m;
        let b = a + 1 + y % (m - a);
        let p = params(n, m);
        let levels = LevelSelection::new(vec![a, b], &p).unwrap();
        let report = check_joint_normalization(&p, &levels).unwrap();
        prop_assert_eq!(report.verdict, Verdict::ExactEqual);
    }
}

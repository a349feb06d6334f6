use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hcfsim::channel::{assign_pilots, ChannelStatistics};
use hcfsim::combining::{CentralizedCombiner, CombinerSet, HierarchicalCombiner, Scheme};
use hcfsim::cost::{complexity_table, CostParams};
use hcfsim::performance::{error_aggregate, sinr_centralized_with};
use hcfsim::{Architecture, Drop, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(architecture: Architecture) -> (SystemConfig, Drop) {
    let cfg = SystemConfig::for_architecture(architecture);
    let drop = Drop::generate(&cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    (cfg, drop)
}

fn drop_statistics(c: &mut Criterion) {
    let mut group = c.benchmark_group("drop");
    group.sample_size(10);
    for arch in [Architecture::Hcf, Architecture::Cf] {
        let cfg = SystemConfig::for_architecture(arch);
        group.bench_function(format!("generate {}", arch.label()), |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            b.iter(|| Drop::generate(&cfg, &mut rng).unwrap())
        });
        let (cfg, drop) = setup(arch);
        let pilots = assign_pilots(cfg.k, cfg.tau_p);
        group.bench_function(format!("statistics {}", arch.label()), |b| {
            b.iter(|| ChannelStatistics::new(&drop, &pilots, cfg.p_u, cfg.noise_power_w()).unwrap())
        });
    }
    group.finish();
}

fn realization(c: &mut Criterion) {
    let (cfg, drop) = setup(Architecture::Hcf);
    let sigma2 = cfg.noise_power_w();
    let stats = ChannelStatistics::new(&drop, &assign_pilots(cfg.k, cfg.tau_p), cfg.p_u, sigma2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eta = vec![1.0; cfg.k];
    let state = stats.realize(&mut rng).unwrap();
    let h_hat = state.stacked_h_hat();
    let aggregate = error_aggregate(stats.theta_all(), &eta).unwrap();

    c.bench_function("realize HCF", |b| b.iter(|| stats.realize(&mut rng).unwrap()));
    for scheme in [Scheme::MR, Scheme::ZF, Scheme::MMSE] {
        let builder = CentralizedCombiner::new(stats.theta_all(), &eta, cfg.p_u, sigma2, scheme).unwrap();
        c.bench_function(&format!("centralized {} combiner", scheme.label()), |b| {
            b.iter(|| builder.build(black_box(&h_hat)).unwrap())
        });
        let CombinerSet::Centralized { d, .. } = builder.build(&h_hat).unwrap() else { unreachable!() };
        c.bench_function(&format!("centralized {} SINR", scheme.label()), |b| {
            b.iter(|| sinr_centralized_with(&d, &h_hat, stats.theta_all(), &aggregate, &eta, cfg.p_u, sigma2).unwrap())
        });
    }
    let local = HierarchicalCombiner::new(stats.theta_all(), &eta, cfg.p_u, sigma2, Scheme::MMSE).unwrap();
    c.bench_function("local MMSE combiners", |b| b.iter(|| local.build(black_box(&state.h_hat)).unwrap()));
}

fn cost(c: &mut Criterion) {
    let p = CostParams::default();
    c.bench_function("complexity table", |b| b.iter(|| complexity_table(black_box(&p)).unwrap()));
}

criterion_group!(benches, drop_statistics, realization, cost);
criterion_main!(benches);

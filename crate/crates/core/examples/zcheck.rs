fn main() {
    for spec in ["pareto:alpha=2", "pareto:alpha=1.5", "logtail:beta=2"] {
        let m = cannings::Model::parse(spec).unwrap();
        let cfg = cannings::QuadratureConfig::default();
        let n = 1_000_000u64;
        let t0 = std::time::Instant::now();
        let mut fails = 0;
        for seed in 0..5u64 {
            let rows = cannings::verifier::cn_curve(&m, &[n], &cfg, 64, 200_000_000, seed).unwrap();
            if !rows[0].mc_agrees {
                fails += 1;
            }
        }
        println!("{spec} N=1e6: {fails}/5 disagreement flags ({:?})", t0.elapsed());
    }
}

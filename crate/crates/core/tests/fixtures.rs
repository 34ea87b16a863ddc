//! The bundled mean tables are the seeded Dirichlet draws they claim to be.
//! Set `BELIEFVAR_REGEN_FIXTURES=1` to rewrite them.

use beliefvar::harness::{draw_mean_network, Benchmark};
use beliefvar::io::network_to_string;

#[test]
fn fixtures_match_seeded_draw() {
    let regen = std::env::var_os("BELIEFVAR_REGEN_FIXTURES").is_some();
    for bench in Benchmark::ALL {
        let drawn = draw_mean_network(bench);
        if regen {
            let path = format!(
                "{}/fixtures/{}.json",
                env!("CARGO_MANIFEST_DIR"),
                bench.name()
            );
            std::fs::write(path, network_to_string(&drawn) + "\n").unwrap();
            continue;
        }
        assert_eq!(bench.mean_network(), drawn, "{bench}");
    }
}

#[test]
fn fixture_rows_are_normalized() {
    for bench in Benchmark::ALL {
        let net = bench.mean_network();
        for v in 0..net.len() {
            for row in net.rows(v) {
                assert!((row.alpha_sum() - 1.0).abs() < 1e-12);
            }
        }
    }
}

use hpsym_cli::config::{merge, parse_config_json, ConfigMap, RunConfig};
use hpsym_cli::grid::parse_grid;
use hpsym_cli::Command;
use proptest::prelude::*;

proptest! {
    #[test]
    fn parse_grid_never_panics(s in "\\PC{0,24}") {
        let _ = parse_grid(&s);
    }

    #[test]
    fn ranges_are_inclusive_and_evenly_spaced(start in -100i32..100, steps in 0usize..200, step_milli in 1u32..5000) {
        let step = step_milli as f64 / 1000.0;
        let start = start as f64 / 4.0;
        let stop = start + steps as f64 * step;
        let g = parse_grid(&format!("{start}:{stop}:{step}")).unwrap();
        prop_assert_eq!(g.len(), steps + 1);
        prop_assert!((g[steps] - stop).abs() <= 1e-9 * (1.0 + stop.abs()));
        for w in g.windows(2) {
            prop_assert!((w[1] - w[0] - step).abs() < 1e-9);
        }
    }

    #[test]
    fn lists_round_trip(xs in prop::collection::vec(-1e6f64..1e6, 1..10)) {
        let text: Vec<String> = xs.iter().map(|x| format!("{x:?}")).collect();
        prop_assert_eq!(parse_grid(&text.join(",")).unwrap(), xs);
    }

    #[test]
    fn config_text_never_panics(s in "\\PC{0,64}") {
        if let Ok(file) = parse_config_json(&s) {
            if let Ok(m) = merge(file, ConfigMap::new()) {
                let _ = RunConfig::resolve(Command::Bounds, &m);
            }
        }
    }

    #[test]
    fn flags_win_over_the_file(file_n in 1usize..500, flag_n in 1usize..500) {
        let file = parse_config_json(&format!(r#"{{"N": {file_n}, "k": 2}}"#)).unwrap();
        let flags: ConfigMap = [("N".to_string(), serde_json::Value::from(flag_n.to_string()))].into_iter().collect();
        let cfg = RunConfig::resolve(Command::Remnant, &merge(file, flags).unwrap()).unwrap();
        prop_assert_eq!(cfg.n, Some(flag_n));
        prop_assert_eq!(cfg.k, 2);
    }
}

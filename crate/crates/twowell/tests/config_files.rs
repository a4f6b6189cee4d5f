use proptest::prelude::*;
use twowell::config::{MethodChoice, Pairing, SigmaChoice};
use twowell::{parse_config, ExperimentConfig};

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        2.0f64..6.0,
        0.0f64..1.0,
        prop::collection::vec(0.5f64..12.0, 1..5),
        prop::collection::vec(2usize..5000, 1..5),
        (32usize..2000).prop_map(|k| 2 * k + 1),
        prop::collection::btree_set(1usize..64, 1..5),
        prop_oneof![Just(SigmaChoice::SqrtGapN), Just(SigmaChoice::SqrtN), Just(SigmaChoice::Fixed)],
        prop::option::of(1usize..16),
        any::<bool>(),
    )
        .prop_map(|(s, lambda, ls, ns, n, ladder, rule, workers, symplectic)| {
            let mut c = ExperimentConfig::new(s, lambda, ls, ns);
            c.grid.n = n;
            c.bogoliubov.m_ladder = ladder.into_iter().collect();
            if symplectic {
                c.bogoliubov.method = MethodChoice::Symplectic;
            }
            c.trial.sigma_rule = rule;
            if rule == SigmaChoice::Fixed {
                c.trial.sigma_sq = Some(2.5);
            }
            c.workers = workers;
            c
        })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(c in arb_config()) {
        c.validate().unwrap();
        let text = c.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml_string().unwrap(), text);
    }

    #[test]
    fn points_are_sorted_unique(c in arb_config()) {
        let pts = c.points();
        for w in pts.windows(2) {
            prop_assert!(w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1));
        }
    }
}

#[test]
fn parse_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "s = 2\nlambda = 0.1\nL = [4, 6]\nN = [4, 6]\npairing = \"zip\"\n\n[kernel]\namplitude = 2.0\n",
    )
    .unwrap();
    let c = parse_config(&path).unwrap();
    assert_eq!(c.pairing, Pairing::Zip);
    assert_eq!(c.kernel.amplitude, 2.0);
    assert_eq!(c.points(), vec![(4.0, 4), (6.0, 6)]);

    let missing = parse_config(dir.path().join("absent.toml")).unwrap_err();
    assert!(missing.to_string().contains("absent.toml"));
}

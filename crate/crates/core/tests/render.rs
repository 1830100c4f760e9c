use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scitrend::cluster::ElbowCurve;
use scitrend::render::{emit_chart_data, emit_svg, layout_cloud, Canvas, ChartData, CloudStyle, WordCloudLayout};
use scitrend::trends::{TermFrequencyTable, YearSeries};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/golden_cloud.svg");

fn random_table(rng: &mut ChaCha8Rng, n: usize) -> TermFrequencyTable {
    let mut rows: Vec<(String, u64)> = (0..n)
        .map(|i| {
            let len = rng.random_range(3..12);
            let stem: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
            (format!("{stem}{i}"), rng.random_range(1..500))
        })
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    TermFrequencyTable { rows }
}

fn assert_valid(layout: &WordCloudLayout) {
    let items = &layout.items;
    for (i, a) in items.iter().enumerate() {
        assert!(a.bbox.inside(layout.canvas), "{} leaves the canvas", a.stem);
        for b in &items[i + 1..] {
            assert!(!a.bbox.intersects(&b.bbox), "{} overlaps {}", a.stem, b.stem);
        }
    }
    for a in items {
        for b in items {
            if a.frequency > b.frequency {
                assert!(a.font_size > b.font_size);
            } else if a.frequency == b.frequency {
                assert_eq!(a.font_size, b.font_size);
            }
        }
    }
}

#[test]
fn twenty_random_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let style = CloudStyle::default();
    for case in 0..20 {
        let table = random_table(&mut rng, 100);
        let layout = layout_cloud(&table, 100, Canvas::default(), case, &style).unwrap();
        assert_valid(&layout);
        assert_eq!(layout.items.len() + layout.dropped.len(), 100);
        let again = layout_cloud(&table, 100, Canvas::default(), case, &style).unwrap();
        assert_eq!(emit_svg(&layout).unwrap(), emit_svg(&again).unwrap());
    }
}

#[test]
fn golden_cloud_svg() {
    let table = TermFrequencyTable {
        rows: [
            ("manufactur", 120),
            ("product", 96),
            ("system", 80),
            ("schedul", 61),
            ("suppli", 55),
            ("chain", 54),
            ("cost", 40),
            ("group", 33),
            ("machin", 30),
            ("oper", 22),
            ("qualiti", 14),
            ("cell", 9),
            ("lean", 4),
            ("r&d", 2),
        ]
        .iter()
        .map(|(s, c)| (s.to_string(), *c))
        .collect(),
    };
    let layout = layout_cloud(&table, 100, Canvas::default(), 42, &CloudStyle::default()).unwrap();
    assert_valid(&layout);
    let svg = emit_svg(&layout).unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN, &svg).unwrap();
    }
    let golden = std::fs::read_to_string(GOLDEN).expect("golden file; regenerate with UPDATE_GOLDEN=1");
    assert_eq!(svg, golden);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn clouds_never_overlap(seed in any::<u64>(), n in 1usize..120, w in 300.0..1200.0f64, h in 200.0..900.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = random_table(&mut rng, n);
        match layout_cloud(&table, 100, Canvas::new(w, h), seed, &CloudStyle::default()) {
            Ok(layout) => assert_valid(&layout),
            Err(e) => prop_assert_eq!(e, scitrend::render::RenderError::CanvasTooSmall),
        }
    }

    #[test]
    fn series_csv_round_trips(start in 1900..2000i32, values in prop::collection::vec(0u32..10_000, 1..40)) {
        let s = YearSeries {
            label: "docs".into(),
            points: values.iter().enumerate().map(|(i, &v)| (start + i as i32, v as f64)).collect(),
        };
        let out = emit_chart_data(ChartData::Series(&s), "t");
        prop_assert_eq!(YearSeries::from_csv("docs", &out.csv).unwrap(), s);
        prop_assert!(out.svg.starts_with("<?xml"));
    }

    #[test]
    fn terms_csv_round_trips(counts in prop::collection::vec(1u64..1000, 0..50)) {
        let mut counts = counts;
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let t = TermFrequencyTable { rows: counts.iter().enumerate().map(|(i, &c)| (format!("stem{i:02}"), c)).collect() };
        let out = emit_chart_data(ChartData::Terms(&t), "t");
        prop_assert_eq!(TermFrequencyTable::from_csv(&out.csv).unwrap(), t);
    }

    #[test]
    fn elbow_csv_round_trips(inertias in prop::collection::vec(0.0..1e6f64, 2..9), pick in 0usize..8) {
        let points: Vec<(usize, f64)> = inertias.iter().enumerate().map(|(i, &x)| (i + 1, x)).collect();
        let curve = ElbowCurve { selected_k: 1 + pick % points.len(), points };
        let out = emit_chart_data(ChartData::Elbow(&curve), "t");
        prop_assert_eq!(ElbowCurve::from_csv(&out.csv).unwrap(), curve);
    }
}

use dexgrasp::knowledge_base::{EncodedFeatures, KnowledgeBase};
use dexgrasp::learner::{
    feasibility_score, labeled_examples, match_score, read_labels, select_grasp, train,
    ClassifierModel, GraspClass, GraspDistribution, GraspLabel, TrainConfig, INPUT_WIDTH,
};
use proptest::prelude::*;

fn data(file: &str) -> String {
    format!("{}/data/{file}", env!("CARGO_MANIFEST_DIR"))
}

fn label() -> impl Strategy<Value = GraspLabel> {
    prop::array::uniform9(0u32..6)
        .prop_filter("needs a positive count", |f| f.iter().any(|&c| c > 0))
        .prop_map(|f| GraspLabel::new(0, f).unwrap())
}

fn distribution() -> impl Strategy<Value = GraspDistribution> {
    prop::array::uniform9(0.0f64..1.0)
        .prop_filter("needs positive mass", |w| w.iter().sum::<f64>() > 1e-6)
        .prop_map(|w| GraspDistribution::from_weights(w).unwrap())
}

proptest! {
    #[test]
    fn match_never_exceeds_feasibility(
        pairs in prop::collection::vec((label(), distribution()), 1..20)
    ) {
        let (labels, preds): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let fl = feasibility_score(&labels, &preds).unwrap();
        let fm = match_score(&labels, &preds).unwrap();
        prop_assert!(fm <= fl);
        prop_assert!((0.0..=1.0).contains(&fl));
    }

    #[test]
    fn predictions_are_distributions(
        x in prop::array::uniform32(-5.0f64..5.0),
        seed in 0u64..1000,
    ) {
        let mut input = [0.0; INPUT_WIDTH];
        input[..32].copy_from_slice(&x);
        let p = ClassifierModel::new(&[6, 5], seed).predict_input(&input).unwrap();
        let sum: f64 = p.probabilities().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(p.probabilities().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn gradient_matches_finite_differences(seed in 0u64..500) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let hidden: Vec<usize> = (0..rng.gen_range(1..3)).map(|_| rng.gen_range(2..6)).collect();
        let mut model = ClassifierModel::new(&hidden, seed);
        let mut params = model.parameters();
        for p in params.iter_mut() {
            *p += rng.gen_range(-0.1..0.1);
        }
        model.set_parameters(&params).unwrap();
        let x: [f64; INPUT_WIDTH] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let truth = GraspDistribution::from_weights(std::array::from_fn(|_| rng.gen_range(0.0..1.0))).unwrap();
        let (_, grad) = model.loss_and_gradient(&x, &truth).unwrap();
        let h = 1e-6;
        for i in (0..params.len()).step_by(7) {
            let mut plus = params.clone();
            plus[i] += h;
            let mut minus = params.clone();
            minus[i] -= h;
            let mut m = model.clone();
            m.set_parameters(&plus).unwrap();
            let lp = m.loss_and_gradient(&x, &truth).unwrap().0;
            m.set_parameters(&minus).unwrap();
            let lm = m.loss_and_gradient(&x, &truth).unwrap().0;
            let numeric = (lp - lm) / (2.0 * h);
            let scale = grad[i].abs().max(numeric.abs()).max(1e-3);
            prop_assert!((grad[i] - numeric).abs() / scale < 1e-4, "param {i}: {} vs {numeric}", grad[i]);
        }
    }
}

#[test]
fn calculator_gets_a_palmar_pinch() {
    let kb = KnowledgeBase::load(data("kb.csv")).unwrap();
    let labels = read_labels(data("grasp_labels.csv")).unwrap();
    let examples = labeled_examples(&kb, &labels).unwrap();
    let outcome = train(&examples, &TrainConfig::default()).unwrap();
    let calculator = &examples.iter().find(|(_, l)| l.object_id == 1).unwrap().0;
    let p = outcome.model.predict(calculator).unwrap();
    assert_eq!(select_grasp(&p), GraspClass::RpB);
}

#[test]
fn empty_features_still_predict() {
    let model = ClassifierModel::new(&[4], 1);
    let p = model.predict(&EncodedFeatures::zeros()).unwrap();
    assert!((p.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

use edrm_core::{ConfusionMatrix, Label};
use proptest::prelude::*;

fn labels(pairs: &[(Label, Label, usize)]) -> (Vec<Label>, Vec<Label>) {
    let mut truth = Vec::new();
    let mut pred = Vec::new();
    for &(t, p, n) in pairs {
        truth.extend(std::iter::repeat_n(t, n));
        pred.extend(std::iter::repeat_n(p, n));
    }
    (truth, pred)
}

#[test]
fn two_hundred_label_fixture() {
    use Label::*;
    let (truth, pred) = labels(&[
        (Positive, Positive, 44),
        (Positive, Negative, 6),
        (Negative, Positive, 15),
        (Negative, Negative, 135),
    ]);
    assert_eq!(truth.len(), 200);
    let cm = ConfusionMatrix::from_predictions(&truth, &pred).unwrap();
    assert_eq!(cm, ConfusionMatrix::new(44, 6, 15, 135));
}

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Positive), Just(Label::Negative)]
}

proptest! {
    #[test]
    fn metric_identities(pairs in prop::collection::vec((label(), label()), 1..200)) {
        let (truth, pred): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let cm = ConfusionMatrix::from_predictions(&truth, &pred).unwrap();
        let m = cm.metrics().unwrap();
        let total = cm.total() as f64;
        prop_assert!((m.accuracy * total - (cm.true_pos + cm.true_neg) as f64).abs() <= 1e-12 * total);
        prop_assert!(m.f1 >= 0.0);
        prop_assert!(m.f1 <= 2.0 * m.precision.min(m.recall) + 1e-15);
        for v in m.values() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn joint_shuffle_leaves_counts_unchanged(
        pairs in prop::collection::vec((label(), label()), 1..100),
        perm in any::<prop::sample::Index>(),
    ) {
        let (truth, pred): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
        let mut shuffled = pairs.clone();
        let k = perm.index(shuffled.len());
        shuffled.rotate_left(k);
        shuffled.reverse();
        let (t2, p2): (Vec<_>, Vec<_>) = shuffled.into_iter().unzip();
        prop_assert_eq!(
            ConfusionMatrix::from_predictions(&truth, &pred).unwrap(),
            ConfusionMatrix::from_predictions(&t2, &p2).unwrap()
        );
    }
}

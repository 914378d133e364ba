mod common;

use common::*;
use peelmap::codec::PeeledMapStack;
use peelmap::fusion::ResidualDeformationStack;
use peelmap::objectives::{
    loss_peel, loss_rd, loss_rgb, loss_smooth, total_loss, LossInputs, LossWeights,
};
use peelmap::Error;
use proptest::prelude::*;

fn f64s(v: &[f32]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn masked(rd: &ResidualDeformationStack) -> Vec<f64> {
    rd.delta()
        .iter()
        .zip(rd.validity())
        .map(|(&d, &ok)| if ok { d } else { 0.0 })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn peel_and_rgb_match_loops(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let cam = small_camera(8, 8);
        let a = random_stack(&mut rng, cam, 4, 0.2, true);
        let b = random_stack(&mut rng, cam, 4, 0.2, true);
        let peel = loss_peel(&a, &b).unwrap();
        let want = oracle_layer_l1(&f64s(a.depth()), &f64s(b.depth()), 4, 8, 8);
        for (g, w) in peel.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12);
        }
        let rgb = loss_rgb(&a, &b).unwrap();
        let want = oracle_layer_l1(&f64s(a.rgb().unwrap()), &f64s(b.rgb().unwrap()), 4, 24, 8);
        prop_assert_eq!(rgb[0], 0.0);
        for l in 1..4 {
            prop_assert!((rgb[l] - want[l]).abs() <= 1e-12);
        }
    }

    #[test]
    fn rd_and_smoothness_match_loops(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let cam = small_camera(7, 5);
        let p = random_rd(&mut rng, cam, 3, 0.15);
        let g = random_rd(&mut rng, cam, 3, 0.15);
        let smpl = random_stack(&mut rng, cam, 3, 0.2, false);
        let rd = loss_rd(&p, &g).unwrap();
        let want = oracle_layer_l1(&masked(&p), &masked(&g), 3, 7, 5);
        for (a, b) in rd.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let sm = loss_smooth(&p, &g, &smpl).unwrap();
        let (pd, gd, sd) = (masked(&p), masked(&g), f64s(smpl.depth()));
        for l in 0..3 {
            let comp = |d: &[f64]| (0..35).map(|i| d[l * 35 + i] + sd[l * 35 + i]).collect::<Vec<_>>();
            let (gxa, gya) = oracle_gradients(&comp(&gd), 7, 5);
            let (gxb, gyb) = oracle_gradients(&comp(&pd), 7, 5);
            let want = oracle_layer_l1(&gxa, &gxb, 1, 7, 5)[0] + oracle_layer_l1(&gya, &gyb, 1, 7, 5)[0];
            prop_assert!((sm[l] - want).abs() <= 1e-12);
            prop_assert!(sm[l] >= 0.0);
        }
    }

    #[test]
    fn smoothness_ignores_constant_offsets(seed in any::<u64>(), c in -0.1f64..0.1) {
        let mut rng = rng(seed);
        let cam = small_camera(6, 6);
        let g = random_rd(&mut rng, cam, 2, 0.05);
        let smpl = random_stack(&mut rng, cam, 2, 0.0, false);
        let shifted: Vec<f64> = masked(&g).iter().map(|d| d + c).collect();
        let p = ResidualDeformationStack::new(cam, 2, shifted, vec![true; 72]).unwrap();
        for v in loss_smooth(&p, &g, &smpl).unwrap() {
            prop_assert!(v.abs() < 1e-12);
        }
    }
}

#[test]
fn weighted_total() {
    let mut rng = rng(2);
    let cam = small_camera(8, 8);
    let pred = random_stack(&mut rng, cam, 4, 0.2, true);
    let gt = random_stack(&mut rng, cam, 4, 0.2, true);
    let smpl = random_stack(&mut rng, cam, 4, 0.2, false);
    let (p, g) = (
        random_rd(&mut rng, cam, 4, 0.15),
        random_rd(&mut rng, cam, 4, 0.15),
    );
    let inputs = LossInputs {
        pred_peel: &pred,
        gt_peel: &gt,
        pred_rd: &p,
        gt_rd: &g,
        smpl: &smpl,
    };

    let zero = total_loss(&inputs, &LossWeights::new(0.0, 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(zero.total, zero.l_peel);

    let r = total_loss(&inputs, &LossWeights::default()).unwrap();
    let want = r.l_peel + r.l_rd + 0.1 * r.l_rgb + 0.001 * r.l_sm;
    assert!((r.total - want).abs() <= 1e-12 * want);
    assert_eq!(r.per_layer.peel.len(), 4);
    let json: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["l_peel", "l_rd", "l_sm", "l_rgb", "total", "per_layer"] {
        assert!(json.get(key).is_some(), "{key}");
    }

    let same = LossInputs {
        pred_peel: &gt,
        gt_peel: &gt,
        pred_rd: &g,
        gt_rd: &g,
        smpl: &smpl,
    };
    assert_eq!(
        total_loss(&same, &LossWeights::default()).unwrap().total,
        0.0
    );
}

#[test]
fn errors() {
    let a = PeeledMapStack::background(small_camera(4, 4), 2, false).unwrap();
    let b = PeeledMapStack::background(small_camera(4, 3), 2, false).unwrap();
    assert!(matches!(
        loss_peel(&a, &b),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(loss_rgb(&a, &a), Err(Error::MissingRgb)));
    assert!(LossWeights::new(-1.0, 0.0, 0.0).is_err());
}

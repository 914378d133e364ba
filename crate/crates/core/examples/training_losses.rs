// Evaluate the combined training objective on a prediction that is a
// slightly shifted copy of the ground truth.

use peelmap::codec::PeeledMapStack;
use peelmap::fusion::ResidualDeformationStack;
use peelmap::geometry::PinholeCamera;
use peelmap::objectives::{total_loss, LossInputs, LossWeights};

pub fn run_example() -> peelmap::Result<()> {
    let camera = PinholeCamera::centered(10.0, 16, 16)?;
    let n = 4 * 16 * 16;
    let gt_depth: Vec<f32> = (0..n).map(|i| 1.0 + (i % 16) as f32 * 0.01).collect();
    let gt = PeeledMapStack::new(camera, 4, gt_depth.clone(), Some(vec![0.5; 3 * n]))?;
    let pred = PeeledMapStack::new(
        camera,
        4,
        gt_depth.iter().map(|d| d + 0.02).collect(),
        Some(vec![0.55; 3 * n]),
    )?;
    let smpl = PeeledMapStack::new(camera, 4, vec![1.0; n], None)?;
    let gt_rd = ResidualDeformationStack::new(camera, 4, vec![0.05; n], vec![true; n])?;
    let pred_rd = ResidualDeformationStack::new(camera, 4, vec![0.04; n], vec![true; n])?;

    let report = total_loss(
        &LossInputs {
            pred_peel: &pred,
            gt_peel: &gt,
            pred_rd: &pred_rd,
            gt_rd: &gt_rd,
            smpl: &smpl,
        },
        &LossWeights::default(),
    )?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serialisable")
    );
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}

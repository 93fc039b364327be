use pathdev::train::{gen_rigid_motion_dataset, gen_rotation_dataset, Dataset, RigidMotionParams};

use crate::cli::{GenerateArgs, GenerateKind, GenerateOutput};
use crate::csvio::{open_output, write_series, write_targets, NamedSeries};
use crate::error::Result;

fn write(data: &Dataset, out: &GenerateOutput) -> Result<()> {
    let width = data.len().saturating_sub(1).to_string().len();
    let ids: Vec<String> = (0..data.len()).map(|i| format!("s{i:0width$}")).collect();
    let series: Vec<NamedSeries> = data
        .samples()
        .iter()
        .zip(&ids)
        .map(|(s, id)| NamedSeries {
            id: id.clone(),
            series: s.series.clone(),
        })
        .collect();
    let targets: Vec<_> = data.samples().iter().zip(&ids).map(|(s, id)| (id.clone(), s.target.clone())).collect();
    write_series(open_output(Some(&out.output))?, &series)?;
    write_targets(open_output(Some(&out.targets))?, &targets)
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    match &args.kind {
        GenerateKind::Rotation { n, noise, seed, out } => write(&gen_rotation_dataset(*n, *noise, *seed)?, out),
        GenerateKind::RigidMotion {
            n,
            horizon,
            noise,
            seed,
            out,
        } => {
            let params = RigidMotionParams {
                noise: *noise,
                ..Default::default()
            };
            write(&gen_rigid_motion_dataset(*n, *horizon, params, *seed)?, out)
        }
    }
}

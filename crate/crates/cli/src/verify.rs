//! The `verify` subcommand.

use anyhow::Result;
use monoplane::data::LabelConvention;
use monoplane::eval;
use monoplane::report::render_verification;

use crate::setup::{emit, load_dataset, write, write_manifest, RunManifest};
use crate::{Outcome, VerifyArgs};

pub fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let data = load_dataset(&args.data)?;
    let labels = LabelConvention::from_flip(args.data.flip_labels);
    let verification = eval::verify(&data.train, &data.test, labels, args.jobs.max(1))?;
    let text = render_verification(&verification, args.format, args.raw_eq8);
    match &args.out {
        Some(dir) => {
            let name = format!("verification.{}", args.format.extension());
            write(dir, &name, &text)?;
            write_manifest(
                dir,
                &RunManifest {
                    command: "verify",
                    dataset: args.data.dataset.display().to_string(),
                    split: data.split_source.clone(),
                    part: None,
                    scale: None,
                    stats_from: None,
                    flip_labels: args.data.flip_labels,
                    config: None,
                    seed: None,
                    max_hidden: None,
                    format: args.format,
                    artifacts: vec![name],
                },
            )?;
        }
        None => emit(&text)?,
    }
    if verification.success() {
        Ok(Outcome::Success)
    } else {
        let closest = verification.selected();
        eprintln!(
            "no standardization mode reproduces the published misclassified sets; closest: {} (set distance {})",
            closest.mode,
            closest.distance()
        );
        Ok(Outcome::Mismatch)
    }
}

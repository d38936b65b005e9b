use clap::Args;
use replicator_core::{classify_limit_behavior, ClassifyOptions, RecurrenceOptions};

use crate::common::{initial_profile, write_file, Common};
use crate::failure::{to_json_text, Failure};

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Initial profile; uniform if omitted.
    #[arg(long)]
    pub x0: Option<String>,
    /// Recurrence radius in the max norm.
    #[arg(long, default_value_t = RecurrenceOptions::default().eps)]
    pub eps: f64,
}

pub fn run(args: &ClassifyArgs) -> Result<(), Failure> {
    let loaded = args.common.load()?;
    let x0 = initial_profile(args.x0.as_deref(), &loaded.game)?;
    let defaults = ClassifyOptions::default();
    let opts = ClassifyOptions {
        integrator: args.common.integrator(defaults.integrator.max_time)?,
        recurrence: RecurrenceOptions {
            eps: args.eps,
            ..defaults.recurrence
        },
        ..defaults
    };
    let verdict = classify_limit_behavior(&loaded.game, &x0, &opts)?;
    let text = to_json_text(&serde_json::json!({
        "game": loaded.name,
        "x0": x0,
        "verdict": verdict,
    }));
    if let Some(dir) = args.common.out_dir()? {
        write_file(dir, "classify.json", text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

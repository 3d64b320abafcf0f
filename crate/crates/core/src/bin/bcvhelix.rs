use std::process::ExitCode;

use bcvhelix::cli::{load_config, output_dir, run, Args};
use clap::Parser;

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load_config(&args.config, &args.overrides)
        .and_then(|cfg| run(args.command, &cfg, &output_dir(args.out.as_deref(), &cfg)));
    match outcome {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.report).expect("reports are plain JSON values"));
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bcvhelix: {e}");
            ExitCode::from(2)
        }
    }
}

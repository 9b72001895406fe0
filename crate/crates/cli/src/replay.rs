use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use capstream_core::replay::{parse_control_script, run_replay_with, ReplayError, ReplayScript};
use capstream_core::snapshot::emit_snapshot;
use capstream_core::FaceAnchor;
use clap::Args;

use crate::engine_args::EngineArgs;
use crate::exit::{fail, Classify, CliResult, INPUT};
use crate::io::{read_input, Output};

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Transcript log (JSON lines); `-` for stdin
    #[arg(long, default_value = "-")]
    pub log: String,
    /// Control script (JSON lines of {"t_ms", "action", "payload"})
    #[arg(long)]
    pub controls: Option<PathBuf>,
    /// Frame log destination; `-` for stdout
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Where to write the metrics summary; stderr when omitted
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Playback rate relative to the log's clock; 0 runs as fast as possible
    #[arg(long, default_value_t = 0.0)]
    pub speed: f64,
    /// Comprehension grade (0 to 10) used for reading efficiency
    #[arg(long, default_value_t = 0.0)]
    pub comprehension: f64,
    /// Face anchor as cx,cy,w,h
    #[arg(long)]
    pub anchor: Option<FaceAnchor>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn run(args: &ReplayArgs) -> CliResult {
    if !(args.speed >= 0.0 && args.speed.is_finite()) {
        return Err(fail(INPUT, format!("speed {} must be finite and >= 0", args.speed)));
    }
    let config = args.engine.to_config()?;
    let log = read_input(&args.log)?;
    let controls = match &args.controls {
        Some(p) => parse_control_script(&std::fs::read_to_string(p).input()?).map_err(replay_failure)?,
        None => Vec::new(),
    };
    let script = ReplayScript {
        events: capstream_core::ingest::parse_log(&log).input()?,
        config,
        controls,
        anchor: args.anchor.unwrap_or_default(),
        comprehension: args.comprehension,
    };

    let mut out = Output::open(&args.out)?;
    let mut write_error = None;
    let start = Instant::now();
    let mut origin: Option<u64> = None;
    let result =
        run_replay_with(&script, |frames| {
            for f in frames {
                if args.speed > 0.0 {
                    let t0 = *origin.get_or_insert(f.t_ms);
                    let due = Duration::from_secs_f64((f.t_ms - t0) as f64 / 1000.0 / args.speed);
                    if let Some(wait) = due.checked_sub(start.elapsed()) {
                        std::thread::sleep(wait);
                    }
                }
                if write_error.is_none() {
                    if let Err(e) = writeln!(out, "{}", f.to_json_line()).and_then(|_| {
                        if args.speed > 0.0 {
                            out.flush()
                        } else {
                            Ok(())
                        }
                    }) {
                        write_error = Some(e);
                    }
                }
            }
        })
        .map_err(replay_failure)?;
    if let Some(e) = write_error {
        return Err(e).input();
    }
    out.flush().input()?;

    let summary = serde_json::to_string(&result.metrics).expect("metrics serialize");
    match &args.metrics {
        Some(p) => std::fs::write(p, summary + "\n").input()?,
        None => eprintln!("{summary}"),
    }
    Ok(())
}

fn replay_failure(e: ReplayError) -> crate::exit::Failure {
    fail(INPUT, e)
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    /// Frame log produced by `replay`; `-` for stdin
    #[arg(long, default_value = "-")]
    pub frames: String,
    /// 0-based frame position in the log
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

pub fn snapshot(args: &SnapshotArgs) -> CliResult {
    let text = read_input(&args.frames)?;
    let art = emit_snapshot(&text, args.index).input()?;
    print!("{art}");
    Ok(())
}

//! The frame loop: acquire, inject, execute, evaluate, gate, audit.

use crate::inputs::{scan_stereo_directory, FrameSource};
use crate::{compile_rules, load_setup, RunArgs};
use anyhow::{bail, Context};
use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use vismon::faults::{inject, load_scene_config, FaultSpec};
use vismon::monitor::{evaluate, gate, run_frame, AuditWriter, Outcome, PipelineDecision, Verdict};
use vismon::pipeline::CameraSide;

fn latch_path(log: &Path) -> PathBuf {
    let mut name = log.file_name().unwrap_or_default().to_os_string();
    name.push(".latch");
    log.with_file_name(name)
}

fn dump_pair(
    dir: &Path,
    frame_id: u64,
    left: &vismon::vision::RawImage,
    right: &vismon::vision::RawImage,
) -> anyhow::Result<()> {
    for (suffix, img) in [("L", left), ("R", right)] {
        let path = dir.join(format!("{frame_id:06}_{suffix}.pgm"));
        let mut file = std::fs::File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        vismon::vision::pgm::write_raw(&mut file, img)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> anyhow::Result<u8> {
    let setup = load_setup(&args.pipeline)?;
    let rules = match compile_rules(&args.rules, &setup)? {
        Ok(rules) => rules,
        Err(diagnostic) => {
            eprintln!("{diagnostic}");
            return Ok(1);
        }
    };

    let faults = args
        .inject
        .iter()
        .map(|text| FaultSpec::parse(text))
        .collect::<Result<Vec<_>, _>>()
        .context("bad --inject flag")?;

    let source = match (&args.input, &args.synthetic) {
        (Some(dir), None) => {
            if args.bit_depth.is_some() {
                bail!("--bit-depth only applies to --synthetic scenes");
            }
            scan_stereo_directory(dir, args.frames)?
        }
        (None, Some(scene_path)) => {
            let mut cfg = load_scene_config(scene_path, *setup.graph.calibration())
                .with_context(|| format!("scene configuration {}", scene_path.display()))?;
            if let Some(depth) = args.bit_depth {
                cfg.bit_depth = depth;
                cfg.validate().context("after --bit-depth override")?;
            }
            FrameSource::Synthetic {
                cfg,
                frames: args.frames.unwrap_or(1),
            }
        }
        _ => bail!("select exactly one input mode: --input DIR or --synthetic PATH"),
    };

    // The protective stop persists across runs through the latch file until
    // an operator clears it with --reset.
    let latch = latch_path(&args.log);
    if args.reset && latch.exists() {
        std::fs::remove_file(&latch)
            .with_context(|| format!("cannot clear latch {}", latch.display()))?;
        println!("latch cleared: {}", latch.display());
    }
    if latch.exists() {
        let detail = std::fs::read_to_string(&latch).unwrap_or_default();
        eprintln!(
            "protective stop latched by a previous run ({}); run with --reset to clear",
            detail.trim().replace('\n', ", ")
        );
        return Ok(2);
    }

    let log_file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&args.log)
        .with_context(|| format!("cannot open audit log {}", args.log.display()))?;
    let mut audit = AuditWriter::new(BufWriter::new(log_file), !args.no_timestamp);

    if let Some(dir) = &args.dump_frames {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create dump directory {}", dir.display()))?;
    }

    let mut decision = PipelineDecision::new();
    let total = source.frame_count();
    for frame_id in 0..total {
        let (mut left, mut right) = source.frame(frame_id)?;
        for fault in &faults {
            match fault.target {
                CameraSide::Left => left = inject(&left, fault),
                CameraSide::Right => right = inject(&right, fault),
            }
        }
        if let Some(dir) = &args.dump_frames {
            dump_pair(dir, frame_id, &left, &right)?;
        }

        // Execution failures are fail-safe: every rule gets an ERROR
        // verdict and the gate latches.
        let verdicts = match run_frame(&setup.graph, left, right, frame_id) {
            Ok(store) => evaluate(&rules, &store),
            Err(err) => rules
                .rules
                .iter()
                .map(|rule| Verdict {
                    rule_id: rule.id.clone(),
                    frame_id,
                    outcome: Outcome::Error,
                    evaluated: BTreeMap::new(),
                    operands: None,
                    message: err.to_string(),
                })
                .collect(),
        };

        decision = gate(&verdicts, decision);
        audit
            .append(frame_id, &verdicts, &decision)
            .context("audit log write failed")?;

        for verdict in &verdicts {
            if verdict.outcome != Outcome::Pass {
                eprintln!(
                    "frame {frame_id}: {} {} {}",
                    verdict.rule_id,
                    verdict.outcome.as_str(),
                    verdict.message
                );
            }
        }

        if decision.is_stopped() {
            let tripped: Vec<String> = decision
                .tripped_by
                .iter()
                .map(|(f, r)| format!("{f}:{r}"))
                .collect();
            std::fs::write(&latch, tripped.join("\n"))
                .with_context(|| format!("cannot write latch {}", latch.display()))?;
            println!(
                "PROTECTIVE_STOP latched at frame {frame_id} ({})",
                tripped.join(", ")
            );
            return Ok(2);
        }
    }

    println!("CONTINUE: {total} frame(s) clean");
    Ok(0)
}

//! The subcommand bodies.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::net::TcpStream;
use std::path::Path;
use std::time::{Duration, Instant};

use frameguard::agents::{run_client, AgentMode, NativeAgent, VariantSpec};
use frameguard::csvio::{read_records, write_records};
use frameguard::probe::{
    calibrate_delay, per_round_stats, stability_warning, stable_mean, write_round_latency_csv,
    RoundLatency,
};
use frameguard::score::{summarize, ScoreParams};
use frameguard::server::{
    bind, read_results_csv, run_match, write_results_csv, write_samples_csv, AgentLink, ClockMode,
    MatchConfig, MatchOutcome, ServerError,
};

use crate::plan::{check_label, ExperimentPlan};
use crate::scored::{PlotRow, ScoredRow, SummaryRow};
use crate::spawn::{spawn_and_accept, AgentCommand};
use crate::summary::{resolve_mean, ProbeSummary};
use crate::{AgentArgs, CalibrateArgs, CliError, ProbeArgs, ReportArgs, RunArgs, ScoreArgs};

/// Time an agent gets to exit on its own after MATCH_END.
const AGENT_EXIT_GRACE: Duration = Duration::from_secs(5);

pub fn agent(args: AgentArgs) -> Result<(), CliError> {
    let mut agent = match args.mode {
        AgentMode::Sandbox => {
            if args.processing_us > 0 || args.delay_us > 0 {
                log::warn!("sandbox mode ignores --processing-us and --delay-us");
            }
            NativeAgent::sandbox(args.extra_transport_us)
        }
        AgentMode::FixedLoad => NativeAgent::fixedload(VariantSpec::new(
            "",
            args.processing_us,
            args.extra_transport_us,
            args.delay_us,
        )),
    };
    agent.spec.label = args.label;
    agent.spin_guard = Duration::from_micros(args.guard_us);

    let stream = connect_with_retry(
        &args.host,
        args.port,
        Duration::from_millis(args.connect_timeout_ms),
    )?;
    let report = run_client(stream, &agent)?;
    log::info!(
        "agent `{}`: {} frames over {} round(s)",
        agent.spec.label,
        report.frames_handled,
        report.rounds_ended
    );
    Ok(())
}

fn connect_with_retry(host: &str, port: u16, timeout: Duration) -> Result<TcpStream, CliError> {
    let deadline = Instant::now() + timeout;
    loop {
        match TcpStream::connect((host, port)) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() < deadline => {
                log::debug!("connect to {host}:{port}: {e}; retrying");
                std::thread::sleep(Duration::from_millis(50));
            }
            Err(e) => {
                return Err(CliError::Handshake(format!(
                    "cannot connect to {host}:{port}: {e}"
                )))
            }
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn probe(args: ProbeArgs) -> Result<(), CliError> {
    check_label(&args.label).map_err(CliError::Usage)?;
    let config = MatchConfig {
        frame_period_us: args.frame_period_us,
        frames_per_round: args.frames_per_round,
        rounds: args.rounds,
        warmup_rounds: args.warmup,
        clock_mode: ClockMode::Realtime,
        listen_port: args
            .serve
            .port
            .unwrap_or(frameguard::protocol::DEFAULT_PORT),
        ..MatchConfig::default()
    };
    config.validate()?;
    if config.warmup_rounds >= config.rounds {
        return Err(CliError::Usage(format!(
            "--warmup {} leaves no rounds out of {}",
            config.warmup_rounds, config.rounds
        )));
    }
    let cmd = AgentCommand::from_option(args.serve.agent_cmd.as_deref())?;
    let spec = VariantSpec::new(args.label.clone(), 0, args.extra_transport_us, 0);

    // nothing touches the file system until the port and the agent are ready
    let listener = bind(config.listen_port)?;
    let timeout = Duration::from_millis(args.serve.handshake_timeout_ms);
    let (process, conn) =
        spawn_and_accept(&listener, &config, &cmd, AgentMode::Sandbox, &spec, timeout)?;
    let result = run_match(&config, AgentLink::Remote(conn));
    process.finish(AGENT_EXIT_GRACE);

    create_dir(&args.out_dir)?;
    let samples_path = args.out_dir.join(format!("{}.samples.csv", args.label));
    let latency_path = args.out_dir.join(format!("{}.latency.csv", args.label));
    let outcome = match result {
        Ok(o) => o,
        Err(ServerError::Aborted { cause, partial }) => {
            write_samples_csv(&samples_path, &partial.samples)
                .map_err(|e| CliError::csv(&samples_path, e))?;
            write_round_latency_csv(&latency_path, &per_round_stats(&partial.samples))
                .map_err(|e| CliError::csv(&latency_path, e))?;
            return Err(CliError::Aborted {
                label: args.label,
                source: ServerError::Aborted { cause, partial },
            });
        }
        Err(e) => return Err(e.into()),
    };

    let rounds = per_round_stats(&outcome.samples);
    write_samples_csv(&samples_path, &outcome.samples)
        .map_err(|e| CliError::csv(&samples_path, e))?;
    write_round_latency_csv(&latency_path, &rounds).map_err(|e| CliError::csv(&latency_path, e))?;
    if let Some(warning) = stability_warning(&rounds, config.warmup_rounds) {
        log::warn!("{warning}");
    }
    let mean = stable_mean(&rounds, config.warmup_rounds).map_err(CliError::Probe)?;
    let summary = ProbeSummary {
        label: args.label.clone(),
        stable_mean_us: mean,
        rounds: config.rounds,
        warmup_rounds: config.warmup_rounds,
        retained_rounds: retained(&rounds, config.warmup_rounds),
        samples: outcome.samples.len(),
    };
    let summary_path = args.out_dir.join(format!("{}.summary", args.label));
    write_text(&summary_path, &summary.to_text())?;
    println!(
        "{}: stable mean overhead {:.1} us over {} round(s) after {} warm-up round(s)",
        args.label, mean, summary.retained_rounds, config.warmup_rounds
    );
    println!("summary written to {}", summary_path.display());
    Ok(())
}

fn retained(rounds: &[RoundLatency], warmup: u32) -> usize {
    rounds.iter().filter(|r| r.round_id > warmup).count()
}

pub fn calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let fast = resolve_mean(&args.fast)?;
    let slow = resolve_mean(&args.slow)?;
    let result = calibrate_delay(fast, slow, args.granularity).map_err(CliError::Calibration)?;
    println!("gap = {} us", result.gap_us);
    println!("delay = {} us (inject on the fast side)", result.delay_us);

    let line = serde_json::to_string(&result).expect("calibration result serializes");
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&args.record)
        .map_err(|e| CliError::io(&args.record, e))?;
    writeln!(file, "{line}").map_err(|e| CliError::io(&args.record, e))
}

fn build_plan(args: &RunArgs) -> Result<ExperimentPlan, CliError> {
    let mut plan = match &args.plan {
        Some(path) => ExperimentPlan::from_file(path)?,
        None => ExperimentPlan::default(),
    };
    plan.variants.extend(args.variants.iter().cloned());
    let c = &mut plan.config;
    if let Some(v) = args.clock_mode {
        c.clock_mode = v;
    }
    if let Some(v) = args.rounds {
        c.rounds = v;
    }
    if let Some(v) = args.frames_per_round {
        c.frames_per_round = v;
    }
    if let Some(v) = args.warmup {
        c.warmup_rounds = v;
    }
    if let Some(v) = args.frame_period_us {
        c.frame_period_us = v;
    }
    if let Some(v) = args.serve.port {
        c.listen_port = v;
    }
    if let Some(v) = &args.out_dir {
        plan.out_dir = v.clone();
    }
    plan.validate().map_err(|e| match &args.plan {
        Some(path) if e.line > 0 => CliError::Parse {
            path: path.clone(),
            line: e.line,
            message: e.message,
        },
        _ => CliError::Usage(e.message),
    })?;
    Ok(plan)
}

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let plan = build_plan(&args)?;
    let config = &plan.config;
    let cmd = AgentCommand::from_option(args.serve.agent_cmd.as_deref())?;
    let listener = match config.clock_mode {
        ClockMode::Realtime => Some(bind(config.listen_port)?),
        ClockMode::Virtual => None,
    };
    create_dir(&plan.out_dir)?;

    for spec in &plan.variants {
        let results_path = plan.out_dir.join(format!("{}.csv", spec.label));
        let result = match &listener {
            None => {
                let mut agent = NativeAgent::fixedload(spec.clone());
                run_match(config, AgentLink::Virtual(&mut agent))
            }
            Some(listener) => {
                let timeout = Duration::from_millis(args.serve.handshake_timeout_ms);
                let (process, conn) =
                    spawn_and_accept(listener, config, &cmd, AgentMode::FixedLoad, spec, timeout)?;
                let result = run_match(config, AgentLink::Remote(conn));
                process.finish(AGENT_EXIT_GRACE);
                result
            }
        };
        match result {
            Ok(outcome) => {
                write_outcome(&plan.out_dir, &spec.label, &outcome, config.clock_mode)?;
                println!(
                    "{}: {} round(s) -> {}",
                    spec.label,
                    outcome.rounds.len(),
                    results_path.display()
                );
            }
            Err(ServerError::Aborted { cause, partial }) => {
                write_outcome(&plan.out_dir, &spec.label, &partial, config.clock_mode)?;
                return Err(CliError::Aborted {
                    label: spec.label.clone(),
                    source: ServerError::Aborted { cause, partial },
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn write_outcome(
    dir: &Path,
    label: &str,
    outcome: &MatchOutcome,
    mode: ClockMode,
) -> Result<(), CliError> {
    let results_path = dir.join(format!("{label}.csv"));
    write_results_csv(&results_path, &outcome.rounds)
        .map_err(|e| CliError::csv(&results_path, e))?;
    // the virtual clock measures nothing, so there are no samples to keep
    if mode == ClockMode::Realtime {
        let samples_path = dir.join(format!("{label}.samples.csv"));
        write_samples_csv(&samples_path, &outcome.samples)
            .map_err(|e| CliError::csv(&samples_path, e))?;
    }
    Ok(())
}

/// `results/fast.csv` → `fast`; `fast.scored.csv` → `fast`.
fn variant_name(path: &Path) -> String {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("variant");
    let name = name.strip_suffix(".csv").unwrap_or(name);
    name.strip_suffix(".scored").unwrap_or(name).to_owned()
}

pub fn score(args: ScoreArgs) -> Result<(), CliError> {
    let params = ScoreParams::new(args.hp_total, args.time_total)?;
    for input in &args.inputs {
        let rounds = read_results_csv(input).map_err(|e| CliError::csv(input, e))?;
        let rows = rounds
            .iter()
            .enumerate()
            .map(|(i, r)| {
                ScoredRow::new(r, &params).map_err(|e| CliError::Parse {
                    path: input.clone(),
                    line: i as u64 + 2,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let dir = match &args.out_dir {
            Some(d) => d.clone(),
            None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        create_dir_if_named(&dir)?;
        let out = dir.join(format!("{}.scored.csv", variant_name(input)));
        write_records(&out, &rows).map_err(|e| CliError::csv(&out, e))?;
        println!("{} -> {}", input.display(), out.display());
    }
    Ok(())
}

fn create_dir_if_named(dir: &Path) -> Result<(), CliError> {
    if dir.as_os_str().is_empty() {
        Ok(())
    } else {
        create_dir(dir)
    }
}

/// One variant's line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantReport {
    pub variant: String,
    pub rounds: usize,
    pub summary: SummaryRow,
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    let mut plot = Vec::new();
    let mut reports = Vec::new();
    for input in &args.inputs {
        let rows: Vec<ScoredRow> = read_records(input).map_err(|e| CliError::csv(input, e))?;
        let variant = variant_name(input);
        let kept: Vec<&ScoredRow> = rows.iter().filter(|r| r.round_id > args.warmup).collect();
        let scores: Vec<f64> = kept.iter().map(|r| r.score).collect();
        let stats = summarize(&scores).ok_or_else(|| {
            CliError::Usage(format!(
                "{}: no rounds left after discarding round_id <= {}",
                input.display(),
                args.warmup
            ))
        })?;
        plot.extend(kept.iter().map(|r| PlotRow {
            variant: variant.clone(),
            round_id: r.round_id,
            score: r.score,
        }));
        reports.push(VariantReport {
            variant: variant.clone(),
            rounds: rows.len(),
            summary: SummaryRow {
                variant,
                mean: stats.mean,
                stddev: stats.stddev,
                n: stats.n,
            },
        });
    }

    create_dir(&args.out_dir)?;
    let plot_path = args.out_dir.join("plot.csv");
    let summary_path = args.out_dir.join("summary.csv");
    write_records(&plot_path, &plot).map_err(|e| CliError::csv(&plot_path, e))?;
    let summaries: Vec<SummaryRow> = reports.iter().map(|r| r.summary.clone()).collect();
    write_records(&summary_path, &summaries).map_err(|e| CliError::csv(&summary_path, e))?;

    print!("{}", format_table(&reports, args.rounds_per_game));
    println!("plot data: {}", plot_path.display());
    println!("summary:   {}", summary_path.display());
    Ok(())
}

/// The comparison table printed by `report`.
pub fn format_table(reports: &[VariantReport], rounds_per_game: u32) -> String {
    let width = reports
        .iter()
        .map(|r| r.variant.len())
        .max()
        .unwrap_or(0)
        .max("variant".len());
    let mut out = format!(
        "{:<width$}  {:>6}  {:>6}  {:>4}  {:>8}  {:>8}\n",
        "variant", "rounds", "games", "n", "mean", "stddev"
    );
    for r in reports {
        let games = r.rounds as f64 / f64::from(rounds_per_game.max(1));
        out.push_str(&format!(
            "{:<width$}  {:>6}  {:>6.1}  {:>4}  {:>8.4}  {:>8.4}\n",
            r.variant, r.rounds, games, r.summary.n, r.summary.mean, r.summary.stddev
        ));
    }
    out
}

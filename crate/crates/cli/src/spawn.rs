//! Starting agent processes and accepting them on the match listener.

use std::net::TcpListener;
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use frameguard::agents::{AgentMode, VariantSpec};
use frameguard::server::{accept_agent, AgentConnection, MatchConfig};

use crate::CliError;

/// How an agent process is started. The runner flags are appended either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentCommand {
    /// This executable's own `agent` subcommand.
    Native,
    /// An external program, split on whitespace, e.g. `python3 -m pyclient`.
    External(Vec<String>),
}

impl AgentCommand {
    pub fn from_option(cmd: Option<&str>) -> Result<Self, CliError> {
        match cmd {
            None => Ok(AgentCommand::Native),
            Some(s) => {
                let words: Vec<String> = s.split_whitespace().map(str::to_owned).collect();
                if words.is_empty() {
                    return Err(CliError::Usage("--agent-cmd is empty".into()));
                }
                Ok(AgentCommand::External(words))
            }
        }
    }

    fn command(&self) -> Result<Command, CliError> {
        match self {
            AgentCommand::Native => {
                let exe =
                    std::env::current_exe().map_err(|e| CliError::io("current executable", e))?;
                let mut cmd = Command::new(exe);
                cmd.arg("agent");
                Ok(cmd)
            }
            AgentCommand::External(words) => {
                let mut cmd = Command::new(&words[0]);
                cmd.args(&words[1..]);
                Ok(cmd)
            }
        }
    }
}

/// The shared agent runner flags.
pub fn runner_args(port: u16, mode: AgentMode, spec: &VariantSpec) -> Vec<String> {
    vec![
        "--host".into(),
        "127.0.0.1".into(),
        "--port".into(),
        port.to_string(),
        "--mode".into(),
        mode.to_string(),
        "--processing-us".into(),
        spec.processing_us.to_string(),
        "--extra-transport-us".into(),
        spec.extra_transport_us.to_string(),
        "--delay-us".into(),
        spec.injected_delay_us.to_string(),
        "--label".into(),
        spec.label.clone(),
    ]
}

/// A running agent process; killed on drop unless it has been waited for.
pub struct AgentProcess {
    child: Option<Child>,
}

impl AgentProcess {
    pub fn spawn(
        cmd: &AgentCommand,
        port: u16,
        mode: AgentMode,
        spec: &VariantSpec,
    ) -> Result<Self, CliError> {
        let mut command = cmd.command()?;
        command
            .args(runner_args(port, mode, spec))
            .stdin(Stdio::null())
            .env("FRAMEGUARD_PORT", port.to_string());
        log::debug!("spawning agent: {command:?}");
        let child = command
            .spawn()
            .map_err(|e| CliError::Handshake(format!("cannot start agent {command:?}: {e}")))?;
        Ok(Self { child: Some(child) })
    }

    /// Waits for the agent to exit after its match; a lingering process is
    /// killed after `grace`.
    pub fn finish(mut self, grace: Duration) {
        let Some(mut child) = self.child.take() else {
            return;
        };
        let deadline = std::time::Instant::now() + grace;
        loop {
            match child.try_wait() {
                Ok(Some(status)) => {
                    if !status.success() {
                        log::warn!("agent exited with {status}");
                    }
                    return;
                }
                Ok(None) if std::time::Instant::now() < deadline => {
                    std::thread::sleep(Duration::from_millis(10))
                }
                _ => {
                    log::warn!("agent still running after the match; killing it");
                    let _ = child.kill();
                    let _ = child.wait();
                    return;
                }
            }
        }
    }
}

impl Drop for AgentProcess {
    fn drop(&mut self) {
        if let Some(mut child) = self.child.take() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Starts an agent and waits for it to complete the handshake.
pub fn spawn_and_accept(
    listener: &TcpListener,
    config: &MatchConfig,
    cmd: &AgentCommand,
    mode: AgentMode,
    spec: &VariantSpec,
    timeout: Duration,
) -> Result<(AgentProcess, AgentConnection), CliError> {
    let port = listener
        .local_addr()
        .map_err(|e| CliError::io("listener", e))?
        .port();
    let process = AgentProcess::spawn(cmd, port, mode, spec)?;
    let conn = accept_agent(listener, config, timeout)?;
    log::info!(
        "agent `{}` ({:?}) connected from {}",
        conn.hello.name,
        conn.hello.role,
        conn.peer
    );
    Ok((process, conn))
}

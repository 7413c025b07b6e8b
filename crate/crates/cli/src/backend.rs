//! Capability wiring for the oracle and remote backends.

use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use clap::Args;
use smrc_core::domain::{AnswerJudge, ContainmentJudge, Generator, Scorer};
use smrc_core::llm::{EndpointConfig, PromptSet, RemoteBackend, ENV_API_BASE, ENV_MODEL};
use smrc_core::synth::{OracleAnswerJudge, OracleContainmentJudge, OracleGenerator, OracleScorer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BackendKind {
    /// Exact oracle over synthetic arithmetic problems.
    Oracle,
    /// Chat-completions endpoint for generation and judging. Scoring still
    /// uses the oracle, so the questions must be synthetic expressions;
    /// plug a custom `Scorer` through the library API for other data.
    Remote,
}

#[derive(Args, Clone, Debug, Default)]
pub struct RemoteFlags {
    /// Endpoint base URL (overrides SMRC_API_BASE).
    #[arg(long)]
    pub api_base: Option<String>,
    /// Model name (overrides SMRC_MODEL).
    #[arg(long)]
    pub model: Option<String>,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// Maximum retries per request.
    #[arg(long, default_value_t = 3)]
    pub max_retries: u32,
    /// Sampling temperature.
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
    /// Maximum concurrent in-flight requests.
    #[arg(long, default_value_t = 4)]
    pub max_in_flight: usize,
}

/// The four capabilities a run needs, behind shared handles.
pub struct Backend {
    pub generator: Arc<dyn Generator>,
    pub scorer: Arc<dyn Scorer>,
    pub answer_judge: Arc<dyn AnswerJudge>,
    pub containment_judge: Arc<dyn ContainmentJudge>,
}

impl Backend {
    pub fn build(kind: BackendKind, remote: &RemoteFlags, jitter_seed: u64) -> anyhow::Result<Self> {
        match kind {
            BackendKind::Oracle => Ok(Self {
                generator: Arc::new(OracleGenerator),
                scorer: Arc::new(OracleScorer),
                answer_judge: Arc::new(OracleAnswerJudge),
                containment_judge: Arc::new(OracleContainmentJudge),
            }),
            BackendKind::Remote => {
                let remote = Arc::new(build_remote(remote, jitter_seed)?);
                Ok(Self {
                    generator: remote.clone(),
                    scorer: Arc::new(OracleScorer),
                    answer_judge: remote.clone(),
                    containment_judge: remote,
                })
            }
        }
    }

    /// True when every capability tolerates concurrent calls; otherwise the
    /// batch runner drops to a single worker to serialize access.
    pub fn supports_concurrency(&self) -> bool {
        self.generator.supports_concurrency()
            && self.scorer.supports_concurrency()
            && self.answer_judge.supports_concurrency()
            && self.containment_judge.supports_concurrency()
    }
}

pub fn build_remote(flags: &RemoteFlags, jitter_seed: u64) -> anyhow::Result<RemoteBackend> {
    let mut config = match (&flags.api_base, &flags.model) {
        (Some(base), Some(model)) => EndpointConfig::new(base, model),
        _ => {
            let mut config = EndpointConfig::from_env().with_context(|| {
                format!("remote backend needs --api-base/--model or {ENV_API_BASE}/{ENV_MODEL}")
            })?;
            if let Some(base) = &flags.api_base {
                config.base_url = base.clone();
            }
            if let Some(model) = &flags.model {
                config.model_name = model.clone();
            }
            config
        }
    };
    if config.api_key.is_empty() {
        if let Ok(key) = std::env::var(smrc_core::llm::ENV_API_KEY) {
            config.api_key = key;
        }
    }
    config.timeout = Duration::from_secs(flags.timeout);
    config.max_retries = flags.max_retries;
    config.temperature = flags.temperature;
    config.max_in_flight = flags.max_in_flight;
    config.jitter_seed = jitter_seed;
    RemoteBackend::new(config, PromptSet::default()).context("remote backend init failed")
}

//! Chat-completions adapter: endpoint client, prompt templates, and the
//! remote generator/judge/decomposer implementations.

mod adapter;
mod client;
mod prompts;

pub use adapter::RemoteBackend;
pub use client::{
    ChatClient, ChatMessage, EndpointConfig, LlmError, ENV_API_BASE, ENV_API_KEY, ENV_MODEL,
};
pub use prompts::{
    PromptSet, ACC_JUDGE_PROMPT, CONTAINMENT_JUDGE_PROMPT, DECOMPOSITION_PROMPT, FEEDBACK_PROMPT,
    NODE_GENERATION_PROMPT,
};

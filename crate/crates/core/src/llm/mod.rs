//! Language-model mean proposals: prompt construction, response parsing,
//! a chat-completions client with retries, and an offline mock.

mod client;
mod mock;
mod parse;
mod prompt;

pub use client::{
    AuditLog, ChatMessage, ChatRequest, ChatTransport, HttpTransport, LlmConfig, LlmProposer,
};
pub use mock::{mock_propose, MockProposer};
pub use parse::{format_integer_list, parse_mean_response};
pub use prompt::{build_prompt, PromptBundle};

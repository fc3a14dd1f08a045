//! Model adapters that talk to chat-completion endpoints, used when
//! collecting rollout groups from a live policy server.

use std::time::Duration;

use cot_core::grpo::ModelAdapter;
use cot_core::Error as CoreError;
use serde::Deserialize;
use serde_json::json;

/// Connection settings for a chat-completion policy endpoint.
#[derive(Debug, Clone)]
pub struct HttpModelConfig {
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token, read per request.
    pub api_key_env: String,
    pub timeout_s: u64,
    pub temperature: f64,
}

impl Default for HttpModelConfig {
    fn default() -> Self {
        HttpModelConfig {
            endpoint: String::new(),
            model: "policy-model".to_string(),
            api_key_env: "COT_MODEL_API_KEY".to_string(),
            timeout_s: 120,
            temperature: 1.0,
        }
    }
}

/// Adapter that asks a chat endpoint for one rollout per call. The seed is
/// forwarded in the request body so servers that support seeded sampling
/// produce distinct, reproducible rollouts per group slot.
#[derive(Debug)]
pub struct HttpModelAdapter {
    cfg: HttpModelConfig,
    http: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

impl HttpModelAdapter {
    pub fn new(cfg: HttpModelConfig) -> Result<Self, CoreError> {
        if cfg.endpoint.is_empty() {
            return Err(CoreError::Adapter("model endpoint is empty".to_string()));
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_s))
            .build()
            .map_err(|e| CoreError::Adapter(e.to_string()))?;
        Ok(HttpModelAdapter { cfg, http })
    }
}

impl ModelAdapter for HttpModelAdapter {
    fn generate(&self, video_reference: &str, question: &str, seed: u64) -> Result<String, CoreError> {
        let prompt = format!(
            "Video: {video_reference}\nQuestion: {question}\n\
             Think through the video step by step, citing timestamps, inside \
             <thinking></thinking>, then give the final answer inside <answer></answer>."
        );
        let body = json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
            "seed": seed,
        });
        let mut req = self.http.post(&self.cfg.endpoint).json(&body);
        if let Ok(key) = std::env::var(&self.cfg.api_key_env) {
            if !key.is_empty() {
                req = req.bearer_auth(key);
            }
        }
        let resp = req.send().map_err(|e| CoreError::Adapter(format!("rollout request failed: {e}")))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(CoreError::Adapter(format!("policy endpoint returned {status}")));
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| CoreError::Adapter(format!("bad rollout response: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| CoreError::Adapter("rollout response had no choices".to_string()))
    }
}

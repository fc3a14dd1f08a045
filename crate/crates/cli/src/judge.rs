//! External answer judge spoken to over a chat-completion style HTTP API,
//! plus a deterministic mock for offline runs and tests.
//!
//! Transport rules:
//! * at most `max_in_flight` requests are ever outstanding at once,
//! * a failed request is retried with exponential backoff
//!   (`backoff_initial_ms`, doubling by default) up to `max_attempts`,
//! * after the final attempt the error is surfaced as a transport error so
//!   callers can mark the sample unscored — a judge outage must never be
//!   silently read as "incorrect".

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use cot_core::reward::{normalize_answer, AnswerJudge};
use cot_core::{Error as CoreError, JudgeVerdict};
use serde::Deserialize;
use serde_json::json;

use crate::config::JudgeSettings;

/// Counting semaphore bounding concurrent judge requests.
#[derive(Debug)]
struct Semaphore {
    permits: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(n: usize) -> Self {
        Semaphore { permits: Mutex::new(n), cv: Condvar::new() }
    }

    fn acquire(&self) -> SemaphoreGuard<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.cv.wait(permits).unwrap();
        }
        *permits -= 1;
        SemaphoreGuard { sem: self }
    }
}

struct SemaphoreGuard<'a> {
    sem: &'a Semaphore,
}

impl Drop for SemaphoreGuard<'_> {
    fn drop(&mut self) {
        let mut permits = self.sem.permits.lock().unwrap();
        *permits += 1;
        self.sem.cv.notify_one();
    }
}

/// A judge backed by either a live endpoint or the built-in mock.
#[derive(Debug)]
pub struct JudgeClient {
    settings: JudgeSettings,
    http: Option<reqwest::blocking::Client>,
    gate: Semaphore,
    /// Identifier recorded in verdicts ("mock" or the model name).
    judge_id: String,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: Option<ChatMessage>,
    text: Option<String>,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

impl JudgeClient {
    pub fn new(settings: JudgeSettings) -> Result<Self, CoreError> {
        let judge_id = if settings.mock { "mock".to_string() } else { settings.model.clone() };
        let http = if settings.mock {
            None
        } else {
            if settings.endpoint.is_empty() {
                return Err(CoreError::MissingJudge);
            }
            let client = reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(settings.timeout_s))
                .build()
                .map_err(|e| CoreError::JudgeTransport(e.to_string()))?;
            Some(client)
        };
        let gate = Semaphore::new(settings.max_in_flight.max(1));
        Ok(JudgeClient { settings, http, gate, judge_id })
    }

    pub fn judge_id(&self) -> &str {
        &self.judge_id
    }

    pub fn is_mock(&self) -> bool {
        self.settings.mock
    }

    /// Grades one answer and wraps the result in a [`JudgeVerdict`].
    pub fn verdict(
        &self,
        sample_id: &str,
        question: &str,
        reference: &str,
        prediction: &str,
    ) -> Result<JudgeVerdict, CoreError> {
        let correct = self.grade(question, reference, prediction)?;
        Ok(JudgeVerdict { sample_id: sample_id.to_string(), judge_id: self.judge_id.clone(), correct })
    }

    fn grade(&self, question: &str, reference: &str, prediction: &str) -> Result<bool, CoreError> {
        if self.settings.mock {
            // Deterministic stand-in: exact match after normalization.
            return Ok(normalize_answer(prediction) == normalize_answer(reference));
        }
        let prompt = self
            .settings
            .prompt_template
            .replace("{question}", question)
            .replace("{reference}", reference)
            .replace("{prediction}", prediction);
        let body = json!({
            "model": self.settings.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
            "max_tokens": 4,
        });

        let _permit = self.gate.acquire();
        let mut last_err = String::new();
        for attempt in 0..self.settings.max_attempts {
            if attempt > 0 {
                let factor = self.settings.backoff_factor.max(1.0).powi(attempt as i32 - 1);
                let wait = (self.settings.backoff_initial_ms as f64 * factor) as u64;
                std::thread::sleep(Duration::from_millis(wait));
            }
            match self.try_request(&body) {
                Ok(text) => match parse_verdict(&text) {
                    Some(v) => return Ok(v),
                    None => last_err = format!("unparseable judge reply: {text:?}"),
                },
                Err(e) => last_err = e,
            }
        }
        Err(CoreError::JudgeTransport(last_err))
    }

    fn try_request(&self, body: &serde_json::Value) -> Result<String, String> {
        let http = self.http.as_ref().expect("live mode has a client");
        let mut req = http.post(&self.settings.endpoint).json(body);
        if let Ok(key) = std::env::var(&self.settings.api_key_env) {
            if !key.is_empty() {
                req = req.bearer_auth(key);
            }
        }
        let resp = req.send().map_err(|e| format!("request failed: {e}"))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(format!("judge endpoint returned {status}"));
        }
        let parsed: ChatResponse = resp.json().map_err(|e| format!("bad judge response body: {e}"))?;
        let choice = parsed.choices.into_iter().next().ok_or_else(|| "judge response had no choices".to_string())?;
        match (choice.message, choice.text) {
            (Some(m), _) => Ok(m.content),
            (None, Some(t)) => Ok(t),
            (None, None) => Err("judge choice had neither message nor text".to_string()),
        }
    }
}

/// Reads the judge's reply. "INCORRECT" is checked before "CORRECT" because
/// the latter is a substring of the former; anything containing neither is
/// unparseable and triggers a retry.
pub fn parse_verdict(text: &str) -> Option<bool> {
    let upper = text.to_ascii_uppercase();
    if upper.contains("INCORRECT") {
        Some(false)
    } else if upper.contains("CORRECT") {
        Some(true)
    } else {
        None
    }
}

impl AnswerJudge for JudgeClient {
    fn judge(&self, question: &str, reference_answer: &str, pred_answer: &str) -> Result<bool, CoreError> {
        self.grade(question, reference_answer, pred_answer)
    }
}

//! Generator, judges, and decomposer backed by a chat-completions
//! endpoint.

use crate::domain::{
    decompose_attempt_with, normalize_step, AnswerJudge, ContainmentJudge, DecomposeError,
    DecomposePolicy, FeedbackRound, Generator, GeneratorError, JudgeError, Problem, ReasoningPath,
    ReasoningStep, StepDecomposer, TerminalDetector, Verdict,
};

use super::client::{ChatClient, ChatMessage, EndpointConfig, LlmError};
use super::prompts::PromptSet;

/// Remote implementation of the generation, judging, and decomposition
/// capabilities. Concurrency-tolerant: the client's permit limit bounds
/// in-flight requests.
pub struct RemoteBackend {
    client: ChatClient,
    prompts: PromptSet,
    detector: TerminalDetector,
}

impl RemoteBackend {
    pub fn new(config: EndpointConfig, prompts: PromptSet) -> Result<Self, LlmError> {
        Ok(Self {
            client: ChatClient::new(config)?,
            prompts,
            detector: TerminalDetector::default(),
        })
    }

    pub fn with_detector(mut self, detector: TerminalDetector) -> Self {
        self.detector = detector;
        self
    }

    pub fn client(&self) -> &ChatClient {
        &self.client
    }

    /// The message sequence for a generation call: the rendered template,
    /// then one assistant/feedback exchange per prior rejected round.
    pub fn generation_messages(
        &self,
        problem: &Problem,
        prefix: &ReasoningPath,
        feedback: &[FeedbackRound],
    ) -> Vec<ChatMessage> {
        let rendered = self
            .prompts
            .node_generation
            .replace("{question}", &problem.question)
            .replace("{student_solution}", &prefix.render_lines());
        let mut messages = vec![ChatMessage::user(rendered)];
        for round in feedback {
            if let Some(attempt) = &round.attempt_text {
                messages.push(ChatMessage::assistant(attempt.clone()));
            }
            messages.push(ChatMessage::user(self.prompts.feedback.clone()));
        }
        messages
    }

    fn parse_verdict(reply: &str) -> Result<Verdict, JudgeError> {
        let first = reply
            .split_whitespace()
            .next()
            .unwrap_or("")
            .trim_matches(|c: char| !c.is_ascii_alphabetic())
            .to_ascii_uppercase();
        match first.as_str() {
            "YES" => Ok(Verdict::valid()),
            "NO" => Ok(Verdict::invalid(reply.trim().to_string())),
            _ => Err(JudgeError::UnparsableVerdict(reply.trim().to_string())),
        }
    }
}

fn generator_error(e: LlmError) -> GeneratorError {
    match e {
        LlmError::EmptyCompletion => GeneratorError::EmptyCompletion,
        other => GeneratorError::Failed(other.to_string()),
    }
}

fn judge_error(e: LlmError) -> JudgeError {
    JudgeError::Failed(e.to_string())
}

impl Generator for RemoteBackend {
    /// Renders the node-generation prompt with the question and the
    /// current path, parses the reply line-by-line, and returns the steps
    /// beyond any restated prefix.
    fn generate(
        &self,
        problem: &Problem,
        prefix: &ReasoningPath,
        feedback: &[FeedbackRound],
    ) -> Result<Vec<ReasoningStep>, GeneratorError> {
        let messages = self.generation_messages(problem, prefix, feedback);
        let reply = self.client.complete(&messages).map_err(generator_error)?;
        let steps = decompose_attempt_with(&reply, &DecomposePolicy::LineSplit, &self.detector)
            .map_err(|e| GeneratorError::Failed(e.to_string()))?;

        // The template asks for the complete corrected solution, so the
        // reply usually restates the retained prefix; drop that overlap.
        let prefix_normalized: Vec<String> =
            prefix.texts().map(normalize_step).collect();
        let mut skip = 0;
        for (i, step) in steps.iter().enumerate() {
            if i < prefix_normalized.len() && normalize_step(&step.text) == prefix_normalized[i] {
                skip = i + 1;
            } else {
                break;
            }
        }
        let continuation: Vec<ReasoningStep> = steps
            .into_iter()
            .skip(skip)
            .filter(|s| normalize_step(&s.text) != "solution:")
            .enumerate()
            .map(|(i, s)| ReasoningStep {
                index: i + 1,
                ..s
            })
            .collect();
        if continuation.is_empty() {
            return Err(GeneratorError::EmptyCompletion);
        }
        Ok(continuation)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl AnswerJudge for RemoteBackend {
    fn judge(&self, problem: &Problem, path: &ReasoningPath) -> Result<Verdict, JudgeError> {
        let rendered = self
            .prompts
            .acc_judge
            .replace("{question}", &problem.question)
            .replace("{reference}", &problem.reference_answer)
            .replace("{corrected_solution}", &path.render_lines());
        let reply = self
            .client
            .complete(&[ChatMessage::user(rendered)])
            .map_err(judge_error)?;
        Self::parse_verdict(&reply)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl ContainmentJudge for RemoteBackend {
    fn contains(
        &self,
        original_step: &str,
        corrected: &ReasoningPath,
    ) -> Result<Verdict, JudgeError> {
        let rendered = self
            .prompts
            .containment_judge
            .replace("{original_step}", original_step)
            .replace("{corrected_solution}", &corrected.render_lines());
        let reply = self
            .client
            .complete(&[ChatMessage::user(rendered)])
            .map_err(judge_error)?;
        Self::parse_verdict(&reply)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl StepDecomposer for RemoteBackend {
    /// Runs the decomposition prompt and parses the `Steps N:` reply.
    fn decompose(&self, raw: &str) -> Result<Vec<String>, DecomposeError> {
        let rendered = self.prompts.decomposition.replace("{student_answer}", raw);
        let reply = self
            .client
            .complete(&[ChatMessage::user(rendered)])
            .map_err(|e| DecomposeError::External(e.to_string()))?;
        let steps =
            decompose_attempt_with(&reply, &DecomposePolicy::NumberedMarkers, &self.detector)?;
        Ok(steps.into_iter().map(|s| s.text).collect())
    }
}

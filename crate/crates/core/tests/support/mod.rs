//! Minimal scripted HTTP mock for chat-completions tests.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug)]
pub enum MockResponse {
    /// 200 with a chat-completions body whose first choice holds `content`.
    Chat(String),
    /// Arbitrary status with a raw body.
    Status(u16, String),
}

#[derive(Clone, Debug)]
pub struct CapturedRequest {
    pub path: String,
    pub authorization: Option<String>,
    pub body: serde_json::Value,
}

pub struct MockServer {
    addr: SocketAddr,
    requests: Arc<Mutex<Vec<CapturedRequest>>>,
}

impl MockServer {
    /// Serves the scripted responses one per request; extra requests get a
    /// 500. Each response closes its connection so every request is
    /// observable.
    pub fn spawn(responses: Vec<MockResponse>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        let addr = listener.local_addr().expect("local addr");
        let requests: Arc<Mutex<Vec<CapturedRequest>>> = Arc::default();
        let captured = requests.clone();
        std::thread::spawn(move || {
            let queue = Mutex::new(responses.into_iter());
            for stream in listener.incoming() {
                let Ok(stream) = stream else { break };
                let response = queue
                    .lock()
                    .unwrap()
                    .next()
                    .unwrap_or(MockResponse::Status(500, "mock exhausted".into()));
                if let Err(e) = serve_one(stream, &response, &captured) {
                    eprintln!("mock server error: {e}");
                }
            }
        });
        Self { addr, requests }
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests(&self) -> Vec<CapturedRequest> {
        self.requests.lock().unwrap().clone()
    }
}

fn serve_one(
    stream: TcpStream,
    response: &MockResponse,
    captured: &Arc<Mutex<Vec<CapturedRequest>>>,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();

    let mut authorization = None;
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            let value = value.trim();
            match name.to_ascii_lowercase().as_str() {
                "authorization" => authorization = Some(value.to_string()),
                "content-length" => content_length = value.parse().unwrap_or(0),
                _ => {}
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body: serde_json::Value =
        serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null);
    captured.lock().unwrap().push(CapturedRequest {
        path,
        authorization,
        body,
    });

    let (status, reason, payload) = match response {
        MockResponse::Chat(content) => (
            200,
            "OK",
            serde_json::json!({
                "id": "chatcmpl-mock",
                "object": "chat.completion",
                "choices": [{
                    "index": 0,
                    "message": {"role": "assistant", "content": content},
                    "finish_reason": "stop"
                }]
            })
            .to_string(),
        ),
        MockResponse::Status(status, body) => (*status, "Scripted", body.clone()),
    };
    let mut stream = reader.into_inner();
    write!(
        stream,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    )?;
    stream.flush()
}

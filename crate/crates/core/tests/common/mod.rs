#![allow(dead_code)]

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

/// What the mock sends back for one request.
pub type Responder = Box<dyn FnMut(&Request) -> u16 + Send>;

#[derive(Debug, Clone)]
pub struct Request {
    pub method: String,
    pub path: String,
    pub body: String,
}

/// Minimal block-placement endpoint: serves a fixed build area and records
/// every request.
pub struct MockServer {
    pub url: String,
    pub requests: Arc<Mutex<Vec<Request>>>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start(area: [i64; 6], mut put_status: Responder) -> Self {
        let server = tiny_http::Server::http("127.0.0.1:0").expect("bind mock server");
        let url = format!("http://{}", server.server_addr().to_ip().expect("ip listener"));
        let requests = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));
        let (log, flag) = (Arc::clone(&requests), Arc::clone(&stop));
        let handle = thread::spawn(move || {
            while !flag.load(Ordering::SeqCst) {
                let Ok(Some(mut rq)) = server.recv_timeout(Duration::from_millis(20)) else {
                    continue;
                };
                let mut body = String::new();
                let _ = rq.as_reader().read_to_string(&mut body);
                let req = Request {
                    method: rq.method().to_string(),
                    path: rq.url().to_string(),
                    body,
                };
                let response = if req.path == "/buildarea" {
                    let [x0, y0, z0, x1, y1, z1] = area;
                    let json =
                        format!(r#"{{"xFrom":{x0},"yFrom":{y0},"zFrom":{z0},"xTo":{x1},"yTo":{y1},"zTo":{z1}}}"#);
                    tiny_http::Response::from_string(json).with_status_code(200)
                } else {
                    let code = put_status(&req);
                    tiny_http::Response::from_string("").with_status_code(code)
                };
                log.lock().unwrap().push(req);
                let _ = rq.respond(response);
            }
        });
        MockServer {
            url,
            requests,
            stop,
            handle: Some(handle),
        }
    }

    pub fn requests(&self) -> Vec<Request> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

pub fn accept_all() -> Responder {
    Box::new(|_| 200)
}

/// Fail the first attempt of the `n`-th PUT (1-based), accept the rest.
pub fn fail_once(n: usize) -> Responder {
    let mut seen = 0;
    Box::new(move |_| {
        seen += 1;
        if seen == n {
            500
        } else {
            200
        }
    })
}

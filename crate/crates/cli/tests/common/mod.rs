#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::Duration;

use imgany_backend::synthetic_lexicon;
use imgany_core::{save_bank, EmbeddingBank, Feature, LexiconKind};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_imgany")
}

pub fn imgany<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin()).args(args).output().expect("spawn imgany")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub nouns: PathBuf,
    pub adjectives: PathBuf,
    pub noun_bank: EmbeddingBank,
    pub adjective_bank: EmbeddingBank,
}

impl Fixture {
    /// Synthetic banks of the given sizes written to a temp dir.
    pub fn new(n: usize, dim: usize, dropped: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let noun_bank = synthetic_lexicon(LexiconKind::Noun, n, dim, 0).unwrap();
        let adjective_bank = synthetic_lexicon(LexiconKind::Adjective, n, dim, dropped).unwrap();
        let nouns = dir.path().join("nouns.imgb");
        let adjectives = dir.path().join("adjectives.imgb");
        save_bank(&noun_bank, &nouns).unwrap();
        save_bank(&adjective_bank, &adjectives).unwrap();
        Self { dir, nouns, adjectives, noun_bank, adjective_bank }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Writes `features` as a fresh directory of feature files.
    pub fn feature_dir(&self, name: &str, features: &[Feature]) -> PathBuf {
        let d = self.path(name);
        std::fs::create_dir_all(&d).unwrap();
        for f in features {
            write_feature(&d.join(format!("{}.json", f.tag().name().to_lowercase())), f);
        }
        d
    }

    pub fn fuse_args(&self, features: &Path) -> Vec<String> {
        vec![
            "fuse".into(),
            "--features".into(),
            features.display().to_string(),
            "--nouns".into(),
            self.nouns.display().to_string(),
            "--adjectives".into(),
            self.adjectives.display().to_string(),
        ]
    }

    pub fn service_config(&self, extra: &str) -> PathBuf {
        let p = self.path("service.toml");
        let text = format!(
            "listen = \"127.0.0.1:0\"\nnouns = {:?}\nadjectives = {:?}\n{extra}",
            self.nouns.display().to_string(),
            self.adjectives.display().to_string()
        );
        std::fs::write(&p, text).unwrap();
        p
    }
}

pub fn write_feature(path: &Path, f: &Feature) {
    let v = serde_json::json!({
        "modality": f.tag().name(),
        "dim": f.dim(),
        "embedding": f.embedding().as_slice(),
    });
    std::fs::write(path, serde_json::to_vec(&v).unwrap()).unwrap();
}

/// A running `imgany serve`, killed on drop if still alive.
pub struct Server {
    pub child: Child,
    pub addr: SocketAddr,
}

impl Server {
    /// Starts the service and waits until it reports ready.
    pub fn start(config: &Path) -> Self {
        let mut child = Command::new(bin())
            .args(["serve", "--config"])
            .arg(config)
            .env("RUST_LOG", "info")
            .env("NO_COLOR", "1")
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .expect("spawn serve");
        let stderr = child.stderr.take().unwrap();
        let (tx, rx) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stderr).lines().map_while(Result::ok) {
                let _ = tx.send(line);
            }
        });
        let mut addr = None;
        loop {
            let line = rx.recv_timeout(Duration::from_secs(30)).expect("serve produced no readiness log");
            if let Some(rest) = line.split("addr=").nth(1) {
                addr = Some(rest.split_whitespace().next().unwrap().parse().unwrap());
            }
            if line.contains("ready") {
                break;
            }
        }
        // Keep draining so the child never blocks on a full pipe.
        std::thread::spawn(move || while rx.recv().is_ok() {});
        Self { child, addr: addr.expect("listening address logged") }
    }

    pub fn request(&self, method: &str, path: &str, body: &[u8]) -> (u16, Vec<u8>) {
        http(self.addr, method, path, body)
    }

    pub fn terminate(&self) {
        let status = Command::new("kill").args(["-TERM", &self.child.id().to_string()]).status().unwrap();
        assert!(status.success());
    }

    pub fn wait(mut self) -> std::process::ExitStatus {
        for _ in 0..500 {
            if let Some(s) = self.child.try_wait().unwrap() {
                return s;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        panic!("server did not exit");
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn request_head(addr: SocketAddr, method: &str, path: &str, len: usize) -> String {
    format!(
        "{method} {path} HTTP/1.1\r\nhost: {addr}\r\ncontent-type: application/json\r\ncontent-length: {len}\r\nconnection: close\r\n\r\n"
    )
}

/// Parses a `connection: close` HTTP/1.1 response.
pub fn parse_response(raw: &[u8]) -> (u16, Vec<u8>) {
    let split = raw.windows(4).position(|w| w == b"\r\n\r\n").expect("response head");
    let head = String::from_utf8_lossy(&raw[..split]);
    let status = head.split_whitespace().nth(1).unwrap().parse().unwrap();
    let body = raw[split + 4..].to_vec();
    let chunked = head.lines().any(|l| l.to_ascii_lowercase().starts_with("transfer-encoding: chunked"));
    (status, if chunked { dechunk(&body) } else { body })
}

fn dechunk(mut b: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    loop {
        let eol = b.windows(2).position(|w| w == b"\r\n").unwrap();
        let n = usize::from_str_radix(std::str::from_utf8(&b[..eol]).unwrap().trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.extend_from_slice(&b[eol + 2..eol + 2 + n]);
        b = &b[eol + 4 + n..];
    }
}

/// Minimal blocking HTTP/1.1 client.
pub fn http(addr: SocketAddr, method: &str, path: &str, body: &[u8]) -> (u16, Vec<u8>) {
    let mut s = TcpStream::connect(addr).unwrap();
    s.write_all(request_head(addr, method, path, body.len()).as_bytes()).unwrap();
    s.write_all(body).unwrap();
    let mut raw = Vec::new();
    s.read_to_end(&mut raw).unwrap();
    parse_response(&raw)
}

use sha2::{Digest, Sha256};

/// SHA-256 of the config text with CRLF line endings normalized, so the
/// digest does not depend on the platform that wrote the file.
pub fn config_digest(text: &str) -> String {
    let normalized = text.replace("\r\n", "\n");
    hex::encode(Sha256::digest(normalized.as_bytes()))
}

pub fn bytes_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskStatus {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct RunManifest {
    pub config_digest: String,
    pub version: &'static str,
    pub subcommand: String,
    pub seeds: Vec<u64>,
    pub start_unix: f64,
    pub end_unix: f64,
    pub tasks: Vec<TaskStatus>,
    /// `(file name, sha256)` of every output, in write order.
    pub outputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.tasks.iter().all(|t| t.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("config_digest {}\n", self.config_digest));
        s.push_str(&format!("artifact_version {}\n", self.version));
        s.push_str(&format!("subcommand {}\n", self.subcommand));
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        s.push_str(&format!("seeds {}\n", seeds.join(" ")));
        s.push_str(&format!("start_unix {:.3}\n", self.start_unix));
        s.push_str(&format!("end_unix {:.3}\n", self.end_unix));
        for t in &self.tasks {
            let status = if t.pass { "pass" } else { "fail" };
            s.push_str(&format!("task {} {status} {}\n", t.name, t.detail));
        }
        for (name, digest) in &self.outputs {
            s.push_str(&format!("output {name} {digest}\n"));
        }
        s
    }
}

//! Length-prefixed JSON over a Unix socket.

use super::protocol::Response;
use super::SessionCache;
use std::io::{self, Read, Write};
use std::os::unix::net::{UnixListener, UnixStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

/// Largest accepted frame body in bytes.
pub const MAX_FRAME: usize = 16 << 20;

enum Frame {
    Body(Vec<u8>),
    /// Announced length over the limit; the body was skipped.
    TooLarge(usize),
}

fn next_frame(r: &mut impl Read) -> io::Result<Option<Frame>> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let n = u32::from_be_bytes(len) as usize;
    if n > MAX_FRAME {
        let skipped = io::copy(&mut r.take(n as u64), &mut io::sink())?;
        if skipped < n as u64 {
            return Err(io::ErrorKind::UnexpectedEof.into());
        }
        return Ok(Some(Frame::TooLarge(n)));
    }
    let mut body = vec![0; n];
    r.read_exact(&mut body)?;
    Ok(Some(Frame::Body(body)))
}

/// Reads one frame. `Ok(None)` on a clean end of stream.
pub fn read_frame(r: &mut impl Read) -> io::Result<Option<Vec<u8>>> {
    match next_frame(r)? {
        None => Ok(None),
        Some(Frame::Body(b)) => Ok(Some(b)),
        Some(Frame::TooLarge(n)) => {
            Err(io::Error::new(io::ErrorKind::InvalidData, format!("frame of {n} bytes exceeds the limit")))
        }
    }
}

pub fn write_frame(w: &mut impl Write, body: &[u8]) -> io::Result<()> {
    let n = u32::try_from(body.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "frame too large"))?;
    w.write_all(&n.to_be_bytes())?;
    w.write_all(body)?;
    w.flush()
}

/// Sends one request on `socket` and waits for the reply.
pub fn request_frame(socket: &Path, body: &[u8]) -> io::Result<Vec<u8>> {
    let mut s = UnixStream::connect(socket)?;
    write_frame(&mut s, body)?;
    read_frame(&mut s)?.ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "daemon closed the connection"))
}

fn is_shutdown(body: &[u8]) -> bool {
    serde_json::from_slice::<serde_json::Value>(body).is_ok_and(|v| v["command"] == "shutdown")
}

fn serve(mut stream: UnixStream, cache: Arc<SessionCache>, stop: Arc<AtomicBool>, path: PathBuf) {
    while let Ok(Some(frame)) = next_frame(&mut stream) {
        let body = match frame {
            Frame::Body(b) => b,
            Frame::TooLarge(n) => {
                let err = Response::error(format!("frame of {n} bytes exceeds the limit of {MAX_FRAME}"));
                if write_frame(&mut stream, err.to_json().as_bytes()).is_err() {
                    return;
                }
                continue;
            }
        };
        if is_shutdown(&body) {
            stop.store(true, Ordering::SeqCst);
            let ok = Response { ok: true, value: serde_json::json!("shutdown"), notifications: 0 };
            let _ = write_frame(&mut stream, ok.to_json().as_bytes());
            // Wake the accept loop.
            let _ = UnixStream::connect(&path);
            return;
        }
        let reply = cache.answer(&body);
        if write_frame(&mut stream, reply.to_json().as_bytes()).is_err() {
            return;
        }
    }
}

/// A running daemon bound to a socket path.
pub struct Daemon {
    path: PathBuf,
    stop: Arc<AtomicBool>,
    accept: Option<JoinHandle<()>>,
}

impl Daemon {
    /// Binds `path` and serves connections on background threads.
    pub fn spawn(path: impl AsRef<Path>) -> io::Result<Daemon> {
        let path = path.as_ref().to_path_buf();
        if path.exists() {
            std::fs::remove_file(&path)?;
        }
        let listener = UnixListener::bind(&path)?;
        let stop = Arc::new(AtomicBool::new(false));
        let cache = Arc::new(SessionCache::new());
        let (p, s) = (path.clone(), stop.clone());
        let accept = thread::spawn(move || {
            for conn in listener.incoming() {
                if s.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(conn) = conn else { continue };
                let (c, s2, p2) = (cache.clone(), s.clone(), p.clone());
                thread::spawn(move || serve(conn, c, s2, p2));
            }
        });
        Ok(Daemon { path, stop, accept: Some(accept) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Blocks until a client sends `shutdown`.
    pub fn wait(mut self) {
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }

    pub fn stop(mut self) {
        self.shutdown();
    }

    fn shutdown(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = UnixStream::connect(&self.path);
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
        let _ = std::fs::remove_file(&self.path);
    }
}

impl Drop for Daemon {
    fn drop(&mut self) {
        if self.accept.is_some() {
            self.shutdown();
        } else {
            let _ = std::fs::remove_file(&self.path);
        }
    }
}

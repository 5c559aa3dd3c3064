use std::io;
use std::num::NonZeroU64;
use std::time::Duration;

use bytes::Bytes;
use futures::{Stream, StreamExt};
use tokio::time::Instant;

/// Paces a byte stream to at most `bytes_per_sec`.
///
/// Each piece is released only once the cumulative byte count is due, so a
/// stream of `n` bytes takes at least `n / bytes_per_sec` seconds from the
/// first poll. Pieces are kept to roughly 20 ms worth of data.
pub fn throttle<S>(inner: S, bytes_per_sec: NonZeroU64) -> impl Stream<Item = io::Result<Bytes>>
where
    S: Stream<Item = io::Result<Bytes>> + Unpin,
{
    let rate = bytes_per_sec.get();
    let piece_len = (rate / 50).clamp(256, 64 * 1024) as usize;

    struct State<S> {
        inner: S,
        pending: Bytes,
        sent: u64,
        start: Option<Instant>,
    }

    futures::stream::unfold(
        State { inner, pending: Bytes::new(), sent: 0, start: None },
        move |mut st| async move {
            while st.pending.is_empty() {
                match st.inner.next().await? {
                    Ok(b) => st.pending = b,
                    Err(e) => return Some((Err(e), st)),
                }
            }
            let start = *st.start.get_or_insert_with(Instant::now);
            let piece = st.pending.split_to(piece_len.min(st.pending.len()));
            st.sent += piece.len() as u64;
            let due = start + Duration::from_secs_f64(st.sent as f64 / rate as f64);
            tokio::time::sleep_until(due).await;
            Some((Ok(piece), st))
        },
    )
}

/// Splits an in-memory object into a stream of shared chunks.
pub fn chunked(data: Bytes, chunk: usize) -> impl Stream<Item = io::Result<Bytes>> + Unpin {
    let chunk = chunk.max(1);
    let mut offsets = (0..data.len()).step_by(chunk);
    futures::stream::iter(std::iter::from_fn(move || {
        offsets.next().map(|at| Ok(data.slice(at..(at + chunk).min(data.len()))))
    }))
}

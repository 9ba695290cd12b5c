//! OEIS lookups by linear-recurrence signature, with a file cache, and
//! verification of cataloged ratio limits against the dominant root.

use std::cell::Cell;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use nfib_core::charpoly::analyze;
use nfib_core::{ApproxComplex, ExactComplex, Recurrence, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SEARCH_URL: &str = "https://oeis.org/search";
/// Results per page served by the search endpoint.
const PAGE_SIZE: usize = 10;
/// Minimum spacing between live requests.
pub const MIN_REQUEST_SPACING: Duration = Duration::from_secs(1);
pub const DEFAULT_TAIL_TOL: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum OeisError {
    #[error("network unavailable: {0}")]
    NetworkUnavailable(String),
    #[error("malformed OEIS response: {message}")]
    Parse { message: String, raw: String },
    #[error("{id} has {have} terms; at least {need} are needed for signature length {order}")]
    InsufficientTerms { id: String, have: usize, need: usize, order: usize },
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("cache error: {0}")]
    Cache(String),
}

/// A cataloged sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OeisEntry {
    pub id: String,
    pub name: String,
    #[serde(serialize_with = "serialize_terms")]
    pub terms: Vec<BigInt>,
    /// Signature quoted in the entry's own metadata, if any.
    pub signature: Option<Vec<i64>>,
}

fn serialize_terms<S: serde::Serializer>(terms: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(terms.iter().map(|t| t.to_string()))
}

/// HTTP GET returning the response body.
pub trait Transport {
    fn get(&self, url: &str, query: &[(&str, String)]) -> Result<String, String>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new() -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(30))).build();
        HttpTransport { agent: config.into() }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str, query: &[(&str, String)]) -> Result<String, String> {
        let mut req = self.agent.get(url);
        for (k, v) in query {
            req = req.query(*k, v);
        }
        let mut resp = req.call().map_err(|e| e.to_string())?;
        resp.body_mut().read_to_string().map_err(|e| e.to_string())
    }
}

pub trait Clock {
    /// Monotonic time since an arbitrary origin.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
    fn unix_seconds(&self) -> u64;
}

pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }

    fn unix_seconds(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    }
}

/// On-disk form of one cached query.
#[derive(Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub query: String,
    pub fetched_at: u64,
    /// No further pages exist beyond `entries`.
    pub complete: bool,
    /// Raw result objects as served.
    pub entries: Vec<Value>,
}

pub fn signature_query(signature: &[i64]) -> String {
    let parts: Vec<String> = signature.iter().map(i64::to_string).collect();
    format!("signature ({})", parts.join(","))
}

pub fn cache_file_name(query: &str) -> String {
    format!("{}.json", hex::encode(Sha256::digest(query.as_bytes())))
}

pub struct OeisClient<T: Transport, C: Clock> {
    transport: T,
    clock: C,
    cache_dir: PathBuf,
    offline: bool,
    last_request: Cell<Option<Duration>>,
}

impl OeisClient<HttpTransport, SystemClock> {
    pub fn live(cache_dir: impl Into<PathBuf>, offline: bool) -> Self {
        OeisClient::new(HttpTransport::new(), SystemClock::new(), cache_dir, offline)
    }
}

impl<T: Transport, C: Clock> OeisClient<T, C> {
    pub fn new(transport: T, clock: C, cache_dir: impl Into<PathBuf>, offline: bool) -> Self {
        OeisClient { transport, clock, cache_dir: cache_dir.into(), offline, last_request: Cell::new(None) }
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    /// Entries found by searching for the phrase `signature (b1,...,bn)`.
    /// Cached results are used whenever they cover `limit`.
    pub fn search_by_signature(&self, signature: &[i64], limit: usize) -> Result<Vec<OeisEntry>, OeisError> {
        if signature.is_empty() {
            return Err(OeisError::InvalidSignature("empty signature".into()));
        }
        if limit == 0 {
            return Err(OeisError::InvalidSignature("limit must be at least 1".into()));
        }
        let query = signature_query(signature);
        let path = self.cache_dir.join(cache_file_name(&query));
        let cached = read_cache(&path)?;
        let usable = cached.as_ref().is_some_and(|c| c.complete || c.entries.len() >= limit);
        let raw = match cached {
            Some(c) if usable || self.offline => c.entries,
            _ if self.offline => {
                return Err(OeisError::NetworkUnavailable(format!(
                    "offline and no cached result for \"{query}\" in {}; run without --offline or point --cache-dir at a fixtures directory",
                    self.cache_dir.display()
                )));
            }
            stale => match self.fetch(&query, limit) {
                Ok((entries, complete)) => {
                    let file = CacheFile { query: query.clone(), fetched_at: self.clock.unix_seconds(), complete, entries };
                    write_cache(&path, &file)?;
                    file.entries
                }
                Err(e) => match stale {
                    Some(c) => c.entries,
                    None => return Err(e),
                },
            },
        };
        raw.iter().take(limit).map(entry_from_raw).collect()
    }

    fn fetch(&self, query: &str, limit: usize) -> Result<(Vec<Value>, bool), OeisError> {
        let mut entries = Vec::new();
        loop {
            self.pace();
            let params = [("q", query.to_string()), ("fmt", "json".to_string()), ("start", entries.len().to_string())];
            let body = self.transport.get(SEARCH_URL, &params).map_err(OeisError::NetworkUnavailable)?;
            let page = parse_search_response(&body)?;
            let short = page.len() < PAGE_SIZE;
            entries.extend(page);
            if short {
                return Ok((entries, true));
            }
            if entries.len() >= limit {
                return Ok((entries, false));
            }
        }
    }

    /// Waits until the previous live request is at least one second old.
    fn pace(&self) {
        if let Some(last) = self.last_request.get() {
            let elapsed = self.clock.now().saturating_sub(last);
            if elapsed < MIN_REQUEST_SPACING {
                self.clock.sleep(MIN_REQUEST_SPACING - elapsed);
            }
        }
        self.last_request.set(Some(self.clock.now()));
    }
}

fn read_cache(path: &Path) -> Result<Option<CacheFile>, OeisError> {
    match fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| OeisError::Cache(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(OeisError::Cache(format!("{}: {e}", path.display()))),
    }
}

fn write_cache(path: &Path, file: &CacheFile) -> Result<(), OeisError> {
    let err = |e: &dyn std::fmt::Display| OeisError::Cache(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| err(&e))?;
    }
    let mut text = serde_json::to_string_pretty(file).map_err(|e| err(&e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| err(&e))
}

/// Result objects from a search response. Both the bare-array form and the
/// older `{"results": [...]}` envelope are accepted; `null` means no hits.
pub fn parse_search_response(body: &str) -> Result<Vec<Value>, OeisError> {
    let parse_err = |message: String| OeisError::Parse { message, raw: body.to_string() };
    let value: Value = serde_json::from_str(body).map_err(|e| parse_err(e.to_string()))?;
    match value {
        Value::Null => Ok(Vec::new()),
        Value::Array(items) => Ok(items),
        Value::Object(mut map) => match map.remove("results") {
            Some(Value::Array(items)) => Ok(items),
            Some(Value::Null) | None => Ok(Vec::new()),
            Some(_) => Err(parse_err("\"results\" is not a list".into())),
        },
        _ => Err(parse_err("expected a list of results".into())),
    }
}

pub fn entry_from_raw(raw: &Value) -> Result<OeisEntry, OeisError> {
    let parse_err = |message: &str| OeisError::Parse { message: message.to_string(), raw: raw.to_string() };
    let number = raw.get("number").and_then(Value::as_u64).ok_or_else(|| parse_err("missing \"number\""))?;
    let name = raw.get("name").and_then(Value::as_str).unwrap_or_default().to_string();
    let data = raw.get("data").and_then(Value::as_str).ok_or_else(|| parse_err("missing \"data\""))?;
    let terms = data
        .split(',')
        .map(|t| t.trim().parse::<BigInt>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| parse_err("non-integer term in \"data\""))?;
    if terms.is_empty() {
        return Err(parse_err("no terms"));
    }
    let signature = ["link", "comment", "formula"]
        .iter()
        .filter_map(|field| raw.get(*field).and_then(Value::as_array))
        .flatten()
        .filter_map(Value::as_str)
        .find_map(signature_in_text);
    Ok(OeisEntry { id: format!("A{number:06}"), name, terms, signature })
}

/// Parses the first `signature (c1,...,cn)` phrase in a line of text.
pub fn signature_in_text(text: &str) -> Option<Vec<i64>> {
    let start = text.find("signature (")? + "signature (".len();
    let len = text[start..].find(')')?;
    text[start..start + len].split(',').map(|s| s.trim().parse().ok()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub id: String,
    pub name: String,
    pub signature_used: Vec<i64>,
    /// The terms obey the recurrence from some index `s + n` on, with `s ≤ n`.
    pub recurrence_consistent: bool,
    /// Number of leading terms exempted from the recurrence check.
    pub exempt_prefix: Option<usize>,
    pub measured_tail_ratio: Option<ApproxComplex>,
    pub lambda0: Option<ApproxComplex>,
    pub tail_tolerance: f64,
    pub agrees: bool,
    pub detail: String,
}

pub fn signature_recurrence(signature: &[i64]) -> Result<Recurrence<ExactComplex>, OeisError> {
    Recurrence::new(signature.iter().map(|&b| ExactComplex::from_integer(b)).collect())
        .map_err(|e| OeisError::InvalidSignature(format!("{signature:?}: {e}")))
}

/// Checks the recurrence on the cataloged terms and compares the ratio of the
/// last two nonzero terms with the dominant root of the signature.
pub fn verify_entry(entry: &OeisEntry, signature: &[i64], tail_tol: f64) -> Result<VerificationRecord, OeisError> {
    let rec = signature_recurrence(signature)?;
    let n = signature.len();
    let need = 2 * n + 4;
    if entry.terms.len() < need {
        return Err(OeisError::InsufficientTerms { id: entry.id.clone(), have: entry.terms.len(), need, order: n });
    }
    let exempt_prefix = (0..=n).find(|&s| obeys_from(&entry.terms, signature, s + n));
    let recurrence_consistent = exempt_prefix.is_some();
    let measured_tail_ratio = tail_ratio(&entry.terms);
    let lambda0 = analyze(&rec).ok().and_then(|(_, d)| d.lambda0.filter(|_| d.is_asymptotically_simple));
    let mut detail = String::new();
    let agrees = match (recurrence_consistent, measured_tail_ratio, lambda0) {
        (false, ..) => {
            let bad = first_violation(&entry.terms, signature).unwrap_or(0);
            let _ = write!(detail, "terms do not satisfy the recurrence (first failure at term {bad})");
            false
        }
        (true, None, _) => {
            detail.push_str("fewer than two nonzero terms");
            false
        }
        (true, _, None) => {
            detail.push_str("characteristic polynomial is not asymptotically simple");
            false
        }
        (true, Some(r), Some(l)) => {
            let gap = (r - l).norm();
            let ok = gap <= tail_tol * (1.0 + l.norm());
            let _ = write!(detail, "|tail ratio - lambda0| = {gap:.3e}");
            ok
        }
    };
    Ok(VerificationRecord {
        id: entry.id.clone(),
        name: entry.name.clone(),
        signature_used: signature.to_vec(),
        recurrence_consistent,
        exempt_prefix,
        measured_tail_ratio,
        lambda0,
        tail_tolerance: tail_tol,
        agrees,
        detail,
    })
}

fn predicted(terms: &[BigInt], signature: &[i64], k: usize) -> BigInt {
    signature.iter().enumerate().map(|(i, &b)| BigInt::from(b) * &terms[k - 1 - i]).sum()
}

fn obeys_from(terms: &[BigInt], signature: &[i64], from: usize) -> bool {
    (from..terms.len()).all(|k| predicted(terms, signature, k) == terms[k])
}

fn first_violation(terms: &[BigInt], signature: &[i64]) -> Option<usize> {
    (signature.len()..terms.len()).find(|&k| predicted(terms, signature, k) != terms[k])
}

fn tail_ratio(terms: &[BigInt]) -> Option<ApproxComplex> {
    let mut nonzero = terms.iter().rev().filter(|t| !t.is_zero());
    let last = nonzero.next()?;
    let prev = nonzero.next()?;
    Some(ExactComplex::real(BigRational::new(last.clone(), prev.clone())).to_approx())
}

/// Outcome for one entry (or one failed search) in a batch run.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BatchOutcome {
    Verified(VerificationRecord),
    /// Search hit whose terms do not follow the signature; filtered out.
    Inconsistent(VerificationRecord),
    InsufficientTerms { id: String, have: usize, need: usize },
    Unavailable { message: String },
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchItem {
    pub signature: Vec<i64>,
    #[serde(flatten)]
    pub outcome: BatchOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OeisBatchSummary {
    pub signatures: usize,
    pub entries: usize,
    pub agrees: usize,
    /// Consistent with the signature, but the tail ratio is off.
    pub disagrees: usize,
    /// Search hits whose terms do not follow the signature.
    pub inconsistent: usize,
    pub insufficient: usize,
    pub unavailable: usize,
    pub errors: usize,
}

/// Signatures `(m, ..., m)` for every `m` in `ms` and length in `lengths`.
pub fn constant_signatures(ms: impl IntoIterator<Item = i64>, lengths: impl IntoIterator<Item = usize> + Clone) -> Vec<Vec<i64>> {
    ms.into_iter().flat_map(|m| lengths.clone().into_iter().map(move |n| vec![m; n])).collect()
}

/// Searches and verifies every signature in order. Failures are recorded per
/// entry and never stop the batch.
pub fn batch_verify<T: Transport, C: Clock>(
    client: &OeisClient<T, C>,
    signatures: &[Vec<i64>],
    limit: usize,
    tail_tol: f64,
) -> (Vec<BatchItem>, OeisBatchSummary) {
    let mut items = Vec::new();
    let mut summary = OeisBatchSummary { signatures: signatures.len(), ..Default::default() };
    for signature in signatures {
        let entries = match client.search_by_signature(signature, limit) {
            Ok(entries) => entries,
            Err(e) => {
                let outcome = match e {
                    OeisError::NetworkUnavailable(_) => {
                        summary.unavailable += 1;
                        BatchOutcome::Unavailable { message: e.to_string() }
                    }
                    _ => {
                        summary.errors += 1;
                        BatchOutcome::Error { message: e.to_string() }
                    }
                };
                items.push(BatchItem { signature: signature.clone(), outcome });
                continue;
            }
        };
        for entry in &entries {
            summary.entries += 1;
            let outcome = match verify_entry(entry, signature, tail_tol) {
                Ok(record) if !record.recurrence_consistent => {
                    summary.inconsistent += 1;
                    BatchOutcome::Inconsistent(record)
                }
                Ok(record) => {
                    if record.agrees {
                        summary.agrees += 1;
                    } else {
                        summary.disagrees += 1;
                    }
                    BatchOutcome::Verified(record)
                }
                Err(OeisError::InsufficientTerms { id, have, need, .. }) => {
                    summary.insufficient += 1;
                    BatchOutcome::InsufficientTerms { id, have, need }
                }
                Err(e) => {
                    summary.errors += 1;
                    BatchOutcome::Error { message: e.to_string() }
                }
            };
            items.push(BatchItem { signature: signature.clone(), outcome });
        }
    }
    (items, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::rc::Rc;

    fn fib_entry(count: usize) -> OeisEntry {
        let mut terms = vec![BigInt::from(0), BigInt::from(1)];
        while terms.len() < count {
            let next = &terms[terms.len() - 1] + &terms[terms.len() - 2];
            terms.push(next);
        }
        OeisEntry { id: "A000045".into(), name: "Fibonacci numbers".into(), terms, signature: Some(vec![1, 1]) }
    }

    #[test]
    fn parses_both_response_shapes() {
        let item = r#"{"number": 45, "name": "Fibonacci numbers", "data": "0,1,1,2,3,5",
            "link": ["<a href=\"/index/Rec\">Index entries for linear recurrences with constant coefficients</a>, signature (1,1)."]}"#;
        let bare = format!("[{item}]");
        let wrapped = format!(r#"{{"greeting": "Greetings", "count": 1, "results": [{item}]}}"#);
        for body in [bare, wrapped] {
            let raw = parse_search_response(&body).unwrap();
            let entry = entry_from_raw(&raw[0]).unwrap();
            assert_eq!(entry.id, "A000045");
            assert_eq!(entry.terms.len(), 6);
            assert_eq!(entry.signature, Some(vec![1, 1]));
        }
        assert!(parse_search_response("null").unwrap().is_empty());
        assert!(parse_search_response(r#"{"results": null}"#).unwrap().is_empty());
        match parse_search_response("<html>") {
            Err(OeisError::Parse { raw, .. }) => assert_eq!(raw, "<html>"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn signature_phrases() {
        assert_eq!(signature_in_text("..., signature (2,-1,0,3)."), Some(vec![2, -1, 0, 3]));
        assert_eq!(signature_in_text("no phrase"), None);
        assert_eq!(signature_query(&[1, 1, 1]), "signature (1,1,1)");
    }

    #[test]
    fn verifies_fibonacci_and_rejects_inconsistent_terms() {
        let rec = verify_entry(&fib_entry(41), &[1, 1], DEFAULT_TAIL_TOL).unwrap();
        assert!(rec.recurrence_consistent && rec.agrees);
        assert_eq!(rec.exempt_prefix, Some(0));

        let mut shifted = fib_entry(41);
        for t in &mut shifted.terms {
            *t -= 1;
        }
        let rec = verify_entry(&shifted, &[1, 1], DEFAULT_TAIL_TOL).unwrap();
        assert!(!rec.recurrence_consistent && !rec.agrees);
        assert!(rec.detail.contains("do not satisfy"));

        // A prefix of up to n terms may break the rule.
        let mut odd_head = fib_entry(41);
        odd_head.terms[0] = BigInt::from(7);
        assert_eq!(verify_entry(&odd_head, &[1, 1], DEFAULT_TAIL_TOL).unwrap().exempt_prefix, Some(1));

        match verify_entry(&fib_entry(7), &[1, 1], DEFAULT_TAIL_TOL) {
            Err(OeisError::InsufficientTerms { need: 8, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    struct FakeTransport {
        calls: Rc<RefCell<Vec<(Duration, String)>>>,
        clock: FakeClock,
        fail: bool,
    }

    impl Transport for FakeTransport {
        fn get(&self, _url: &str, query: &[(&str, String)]) -> Result<String, String> {
            let start = query.iter().find(|(k, _)| *k == "start").map(|(_, v)| v.clone()).unwrap_or_default();
            self.calls.borrow_mut().push((self.clock.now(), start.clone()));
            if self.fail {
                return Err("connection refused".into());
            }
            // Two full pages, then a short one.
            let first: usize = start.parse().unwrap();
            let count = if first < 20 { PAGE_SIZE } else { 3 };
            let items: Vec<String> = (first..first + count)
                .map(|i| format!(r#"{{"number": {}, "name": "seq {i}", "data": "1,2,3"}}"#, 100 + i))
                .collect();
            Ok(format!("[{}]", items.join(",")))
        }
    }

    #[derive(Clone, Default)]
    struct FakeClock {
        now: Rc<Cell<Duration>>,
    }

    impl Clock for FakeClock {
        fn now(&self) -> Duration {
            self.now.get()
        }

        fn sleep(&self, d: Duration) {
            self.now.set(self.now.get() + d);
        }

        fn unix_seconds(&self) -> u64 {
            1_700_000_000
        }
    }

    fn client(dir: &Path, offline: bool, fail: bool) -> (OeisClient<FakeTransport, FakeClock>, Rc<RefCell<Vec<(Duration, String)>>>) {
        let clock = FakeClock::default();
        let calls = Rc::new(RefCell::new(Vec::new()));
        let transport = FakeTransport { calls: calls.clone(), clock: clock.clone(), fail };
        (OeisClient::new(transport, clock, dir, offline), calls)
    }

    #[test]
    fn live_requests_are_spaced_and_cached() {
        let dir = tempfile::tempdir().unwrap();
        let (c, calls) = client(dir.path(), false, false);
        let entries = c.search_by_signature(&[1, 1], 25).unwrap();
        assert_eq!(entries.len(), 23);
        let times: Vec<Duration> = calls.borrow().iter().map(|(t, _)| *t).collect();
        assert_eq!(times.len(), 3);
        assert!(times.windows(2).all(|w| w[1] - w[0] >= MIN_REQUEST_SPACING));

        // Second search is served from the cache, identically.
        let again = c.search_by_signature(&[1, 1], 25).unwrap();
        assert_eq!(calls.borrow().len(), 3);
        assert_eq!(again, entries);
        let path = dir.path().join(cache_file_name("signature (1,1)"));
        let file: CacheFile = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(file.query, "signature (1,1)");
        assert!(file.complete);
    }

    #[test]
    fn offline_and_network_failures() {
        let dir = tempfile::tempdir().unwrap();
        let (c, calls) = client(dir.path(), true, false);
        match c.search_by_signature(&[1, 1], 5) {
            Err(OeisError::NetworkUnavailable(msg)) => assert!(msg.contains("--offline")),
            other => panic!("{other:?}"),
        }
        assert!(calls.borrow().is_empty());

        let (c, _) = client(dir.path(), false, true);
        assert!(matches!(c.search_by_signature(&[1, 1], 5), Err(OeisError::NetworkUnavailable(_))));

        let (items, summary) = batch_verify(&c, &[vec![1, 1], vec![2, 2]], 5, DEFAULT_TAIL_TOL);
        assert_eq!(items.len(), 2);
        assert_eq!(summary.unavailable, 2);
        let (items, summary) = batch_verify(&c, &[], 5, DEFAULT_TAIL_TOL);
        assert!(items.is_empty());
        assert_eq!(summary, OeisBatchSummary::default());
    }

    #[test]
    fn constant_signature_family() {
        assert_eq!(constant_signatures(1..=2, 2..=3), vec![vec![1, 1], vec![1, 1, 1], vec![2, 2], vec![2, 2, 2]]);
    }
}

use async_trait::async_trait;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;
use vsearch_core::scoring::AnswerKind;
use vsearch_core::{build_dataset, DatasetSpec, Family, Mode};
use vsearch_harness::mock::{OutOfRange, Refuser, UniformRandomCell};
use vsearch_harness::{
    mock_adapters, run_trials, score_trials, LoadedDataset, ModelAdapter, ModelRequest, ResponseCache, RetryPolicy,
    TransportError,
};

fn small(family: Family) -> LoadedDataset {
    let mut spec = DatasetSpec::full(family, 1, 42);
    spec.set_sizes = vec![0, 3, 7, 12];
    LoadedDataset::from_dataset(&build_dataset(&spec).unwrap())
}

fn fast_retry() -> RetryPolicy {
    RetryPolicy { base_delay: Duration::from_millis(1), max_delay: Duration::from_millis(4), ..RetryPolicy::default() }
}

/// Counts calls and tracks the peak number of concurrent sends.
struct Instrumented {
    in_flight: AtomicUsize,
    peak: AtomicUsize,
    calls: AtomicUsize,
}

impl Instrumented {
    fn new() -> Self {
        Self { in_flight: AtomicUsize::new(0), peak: AtomicUsize::new(0), calls: AtomicUsize::new(0) }
    }
}

#[async_trait]
impl ModelAdapter for Instrumented {
    fn model_id(&self) -> &str {
        "instrumented"
    }

    async fn send(&self, _req: &ModelRequest<'_>) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        tokio::time::sleep(Duration::from_millis(5)).await;
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        Ok("Cell (1,1)".into())
    }
}

#[tokio::test]
async fn concurrency_is_bounded() {
    let data = small(Family::CircleSizes);
    for limit in [1, 3, 8] {
        let adapter = Instrumented::new();
        let cache = ResponseCache::in_memory();
        let records = run_trials(&adapter, &data, Mode::Cells, limit, &cache, &fast_retry()).await.unwrap();
        assert_eq!(records.len(), data.manifest.entries.len());
        let peak = adapter.peak.load(Ordering::SeqCst);
        assert!(peak <= limit, "peak {peak} > {limit}");
        assert!(peak >= 1);
    }
}

#[tokio::test]
async fn warm_cache_makes_no_calls() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let data = small(Family::TwoAmongFive);
    let adapter = Instrumented::new();
    {
        let cache = ResponseCache::open(&path).unwrap();
        run_trials(&adapter, &data, Mode::Cells, 4, &cache, &fast_retry()).await.unwrap();
    }
    let first = adapter.calls.load(Ordering::SeqCst);
    assert_eq!(first, data.manifest.entries.len());
    let cache = ResponseCache::open(&path).unwrap();
    let records = run_trials(&adapter, &data, Mode::Cells, 4, &cache, &fast_retry()).await.unwrap();
    assert_eq!(adapter.calls.load(Ordering::SeqCst), first);
    assert!(records.iter().all(|r| r.cached));
    // A different mode means different prompts, hence misses.
    run_trials(&adapter, &data, Mode::Coordinates, 4, &cache, &fast_retry()).await.unwrap();
    assert_eq!(adapter.calls.load(Ordering::SeqCst), 2 * first);
}

#[tokio::test]
async fn oracle_is_perfect_and_idempotent() {
    let data = small(Family::LightPriors);
    let mocks = mock_adapters(&data.manifest, 1);
    for mode in [Mode::Cells, Mode::Coordinates] {
        let a = run_trials(&mocks.oracle, &data, mode, 4, &ResponseCache::in_memory(), &fast_retry()).await.unwrap();
        let b = run_trials(&mocks.oracle, &data, mode, 2, &ResponseCache::in_memory(), &fast_retry()).await.unwrap();
        let strip = |v: &[vsearch_harness::TrialRecord]| v.iter().map(|r| r.without_timestamps()).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        let scores = score_trials(&a, &data.manifest).unwrap();
        match mode {
            Mode::Cells => assert!(scores.iter().all(|s| s.correct == Some(true))),
            Mode::Coordinates => assert!(scores.iter().all(|s| s.error_px == Some(0.0))),
        }
    }
}

#[tokio::test]
async fn refuser_and_out_of_range_flags() {
    let data = small(Family::CircleSizes);
    let cache = ResponseCache::in_memory();
    let records = run_trials(&Refuser, &data, Mode::Coordinates, 4, &cache, &fast_retry()).await.unwrap();
    for r in &records {
        let parsed = vsearch_core::scoring::parse(r.response.as_deref().unwrap(), Mode::Coordinates);
        assert_eq!(parsed.kind, AnswerKind::Refusal);
    }
    let records = run_trials(&OutOfRange, &data, Mode::Coordinates, 4, &cache, &fast_retry()).await.unwrap();
    let scores = score_trials(&records, &data.manifest).unwrap();
    assert!(scores.iter().all(|s| s.flags.out_of_range));
}

#[tokio::test]
async fn uniform_random_is_seeded() {
    let data = small(Family::CircleSizes);
    let run = |seed| {
        let data = &data;
        async move {
            let m = UniformRandomCell::new(seed);
            run_trials(&m, data, Mode::Cells, 1, &ResponseCache::in_memory(), &fast_retry()).await.unwrap()
        }
    };
    let a: Vec<_> = run(5).await.into_iter().map(|r| r.response).collect();
    let b: Vec<_> = run(5).await.into_iter().map(|r| r.response).collect();
    assert_eq!(a, b);
}

/// Fails a fixed number of times per trial before answering.
struct Flaky {
    failures_before_success: usize,
    retryable: bool,
    calls: Arc<AtomicUsize>,
}

#[async_trait]
impl ModelAdapter for Flaky {
    fn model_id(&self) -> &str {
        "flaky"
    }

    async fn send(&self, _req: &ModelRequest<'_>) -> Result<String, TransportError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n < self.failures_before_success {
            Err(TransportError { message: "boom".into(), status: Some(503), retryable: self.retryable })
        } else {
            Ok("Cell (2,1)".into())
        }
    }
}

#[tokio::test]
async fn retries_then_records_failure() {
    let mut spec = DatasetSpec::full(Family::CircleSizes, 1, 42);
    spec.conditions.truncate(1);
    spec.set_sizes = vec![4];
    let data = LoadedDataset::from_dataset(&build_dataset(&spec).unwrap());

    let calls = Arc::new(AtomicUsize::new(0));
    let flaky = Flaky { failures_before_success: 3, retryable: true, calls: calls.clone() };
    let r = run_trials(&flaky, &data, Mode::Cells, 1, &ResponseCache::in_memory(), &fast_retry()).await.unwrap();
    assert_eq!(r[0].retries, 3);
    assert_eq!(r[0].response.as_deref(), Some("Cell (2,1)"));

    let calls = Arc::new(AtomicUsize::new(0));
    let hopeless = Flaky { failures_before_success: 100, retryable: true, calls: calls.clone() };
    let cache = ResponseCache::in_memory();
    let r = run_trials(&hopeless, &data, Mode::Cells, 1, &cache, &fast_retry()).await.unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 5);
    assert_eq!(r[0].response, None);
    assert!(r[0].error.as_deref().unwrap().contains("boom"));
    assert!(cache.is_empty());
    let scores = score_trials(&r, &data.manifest).unwrap();
    assert!(scores[0].flags.unparseable);

    let calls = Arc::new(AtomicUsize::new(0));
    let fatal = Flaky { failures_before_success: 100, retryable: false, calls: calls.clone() };
    run_trials(&fatal, &data, Mode::Cells, 1, &ResponseCache::in_memory(), &fast_retry()).await.unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 1);
}

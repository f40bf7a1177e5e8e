use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;

use proptest::prelude::*;
use shapeopt_core::llm::{
    mock_propose, AuditLog, ChatRequest, ChatTransport, HttpTransport, LlmConfig, LlmProposer,
    MockProposer,
};
use shapeopt_core::persist::{RunWriter, TimestampMode, RECORDS_FILE};
use shapeopt_core::{
    encode_design, generation_rng, run_ga, run_optimization, sample_generation, Bounds,
    DesignVector, EsConfig, EvalError, EvalStatus, GaConfig, MeanProposer, MeanSource, Objective,
    ProposalRequest, ProposerError, QuadraticObjective, SearchState,
};

fn quadratic(dim: usize) -> QuadraticObjective {
    QuadraticObjective {
        center: (0..dim).map(|j| 0.35 - 0.1 * j as f64).collect(),
        bounds: Bounds::uniform(dim, -1.0, 1.0).unwrap(),
    }
}

/// Plays a model that always answers with the strongest design it was shown.
struct EchoBest {
    calls: usize,
}

impl ChatTransport for EchoBest {
    fn send(&mut self, request: &ChatRequest) -> Result<String, String> {
        self.calls += 1;
        let prompt = &request.messages.last().unwrap().content;
        let best = prompt
            .lines()
            .filter_map(|l| l.strip_prefix("design: "))
            .next_back()
            .ok_or("no designs in prompt")?;
        let list = &best[..=best.find(']').unwrap()];
        Ok(format!("Next mean: {list}"))
    }
}

#[test]
fn llm_loop_with_scripted_model() {
    let obj = quadratic(3);
    let cfg = EsConfig {
        generations: 12,
        seed: 4,
        ..EsConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let audit = AuditLog::open(&dir.path().join("audit.jsonl")).unwrap();
    let mut proposer =
        LlmProposer::new(LlmConfig::new("http://unused", "scripted"), EchoBest { calls: 0 })
            .with_audit(audit);
    let out = run_optimization(&obj, &mut proposer, &cfg, &mut (), None).unwrap();
    assert_eq!(out.buffer.len(), 12);
    assert_eq!(proposer.transport().calls, 10);
    let audit = fs::read_to_string(dir.path().join("audit.jsonl")).unwrap();
    assert_eq!(audit.lines().count(), 10);

    // Each proposed mean is the encoded best-so-far design.
    for (g, state) in out.history.iter().enumerate().skip(2) {
        assert_eq!(state.source, MeanSource::Proposed);
        let prev = out.buffer.generations()[..g]
            .iter()
            .flatten()
            .max_by(|a, b| a.score.total_cmp(&b.score))
            .unwrap();
        assert_eq!(
            encode_design(&state.mean, &obj.bounds).unwrap(),
            encode_design(&prev.design, &obj.bounds).unwrap(),
            "generation {g}"
        );
    }
    let traj = out.buffer.trajectory();
    assert!(traj.last().unwrap().1 > traj[1].1);
}

/// Minimal HTTP/1.1 server answering each request with the next canned
/// response body and status.
fn serve(responses: Vec<(u16, String)>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for (status, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
            }
            let mut payload = vec![0; length];
            reader.read_exact(&mut payload).unwrap();
            let request: serde_json::Value = serde_json::from_slice(&payload).unwrap();
            assert_eq!(request["model"], "test-model");
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    format!("http://{addr}/v1/chat/completions")
}

fn completion(text: &str) -> String {
    serde_json::json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string()
}

fn request_for<'a>(records: &'a [shapeopt_core::ScoredRecord], bounds: &'a Bounds) -> ProposalRequest<'a> {
    ProposalRequest {
        records,
        bounds,
        description: "maximize a test function",
        generation: 3,
    }
}

fn sample_records() -> Vec<shapeopt_core::ScoredRecord> {
    vec![shapeopt_core::ScoredRecord {
        design: DesignVector(vec![0.1, -0.2]),
        score: -1.0,
        generation: 0,
        status: EvalStatus::Ok,
    }]
}

#[test]
fn http_transport_retries_after_server_error_and_bad_reply() {
    let url = serve(vec![
        (500, "overloaded".into()),
        (200, completion("I think [1, 2, 3] is good")),
        (200, completion("[250, 750]")),
    ]);
    let mut cfg = LlmConfig::new(url, "test-model");
    cfg.max_retries = 2;
    cfg.timeout_secs = 10;
    let transport = HttpTransport::new(&cfg).unwrap();
    let mut p = LlmProposer::new(cfg, transport);
    let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
    let records = sample_records();
    let mean = p.propose(&request_for(&records, &bounds)).unwrap();
    assert_eq!(mean.encoded, vec![250, 750]);
    assert_eq!(p.attempts_made(), 3);
}

#[test]
fn http_transport_gives_up() {
    let url = serve(vec![(200, "{\"choices\": []}".into()), (200, completion("no numbers"))]);
    let mut cfg = LlmConfig::new(url, "test-model");
    cfg.max_retries = 1;
    let mut p = LlmProposer::new(cfg.clone(), HttpTransport::new(&cfg).unwrap());
    let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
    let records = sample_records();
    let err = p.propose(&request_for(&records, &bounds)).unwrap_err();
    assert!(matches!(err, ProposerError::RetriesExhausted { attempts: 2, .. }), "{err}");
}

#[test]
fn resumed_llm_run_skips_finished_generations() {
    let obj = quadratic(2);
    let cfg = EsConfig {
        generations: 6,
        seed: 9,
        ..EsConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let mut w = RunWriter::create(dir.path(), obj.bounds.clone(), TimestampMode::Logical).unwrap();
    let full = run_optimization(&obj, &mut MockProposer, &cfg, &mut w, None).unwrap();
    drop(w);

    let (mut w, buf) = RunWriter::resume(dir.path(), obj.bounds.clone(), TimestampMode::Logical, 8).unwrap();
    let mut echo = LlmProposer::new(LlmConfig::new("http://unused", "m"), EchoBest { calls: 0 });
    let more = EsConfig { generations: 8, ..cfg };
    let out = run_optimization(&obj, &mut echo, &more, &mut w, Some(buf)).unwrap();
    assert_eq!(echo.transport().calls, 2);
    assert_eq!(out.history.len(), 2);
    assert_eq!(out.buffer.generations()[..6], full.buffer.generations()[..]);
    let text = fs::read_to_string(dir.path().join(RECORDS_FILE)).unwrap();
    assert_eq!(text.lines().count(), 8 * 8);
}

/// Every evaluation errors.
struct Broken(Bounds);

impl Objective for Broken {
    fn bounds(&self) -> &Bounds {
        &self.0
    }
    fn evaluate(&self, _: &DesignVector) -> Result<f64, EvalError> {
        Err(EvalError("solver crashed".into()))
    }
    fn penalty(&self) -> f64 {
        -7.0
    }
    fn description(&self) -> String {
        "nothing".into()
    }
}

#[test]
fn failures_score_the_penalty() {
    let obj = Broken(Bounds::uniform(2, 0.0, 1.0).unwrap());
    let cfg = GaConfig {
        generations: 3,
        ..GaConfig::default()
    };
    let out = run_ga(&obj, &cfg, &mut (), None).unwrap();
    assert!(out
        .buffer
        .records()
        .all(|r| r.score == -7.0 && r.status == EvalStatus::Failed));
}

#[test]
fn ga_and_es_are_deterministic_per_seed() {
    let obj = quadratic(4);
    let es = |seed| {
        let cfg = EsConfig {
            generations: 5,
            seed,
            ..EsConfig::default()
        };
        run_optimization(&obj, &mut MockProposer, &cfg, &mut (), None)
            .unwrap()
            .buffer
    };
    let ga = |seed| {
        let cfg = GaConfig {
            generations: 5,
            seed,
            ..GaConfig::default()
        };
        run_ga(&obj, &cfg, &mut (), None).unwrap().buffer
    };
    assert_eq!(es(1), es(1));
    assert_ne!(es(1), es(2));
    assert_eq!(ga(1), ga(1));
    assert_ne!(ga(1), ga(2));
}

#[test]
fn ga_best_never_regresses_with_elitism() {
    let obj = quadratic(3);
    let cfg = GaConfig {
        generations: 25,
        seed: 5,
        ..GaConfig::default()
    };
    let out = run_ga(&obj, &cfg, &mut (), None).unwrap();
    let per_gen: Vec<f64> = out.buffer.trajectory().iter().map(|t| t.0).collect();
    assert!(per_gen.windows(2).all(|w| w[1] >= w[0]), "{per_gen:?}");
    assert!(per_gen[24] > -0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_stay_in_bounds(
        seed in any::<u64>(),
        generation in 0usize..50,
        sigma in 0.01f64..3.0,
        mean in prop::collection::vec(-2.0f64..5.0, 3),
    ) {
        let b = Bounds::new(vec![-2.0, 0.0, 1.0], vec![0.0, 5.0, 1.5]).unwrap();
        let mut m = mean;
        b.clamp(&mut m);
        let mut rng = generation_rng(seed, generation);
        let state = SearchState {
            mean: DesignVector(m),
            sigma,
            generation,
            population_size: 16,
            source: MeanSource::Proposed,
        };
        let xs = sample_generation(&state, &b, &mut rng);
        prop_assert_eq!(xs.len(), 16);
        for x in &xs {
            prop_assert!(b.contains(&x.0));
        }
    }

    #[test]
    fn mock_mean_stays_in_encoded_range(
        scores in prop::collection::vec(-100.0f64..100.0, 1..10),
        seed in any::<u64>(),
    ) {
        let b = Bounds::uniform(2, -3.0, 3.0).unwrap();
        let mut rng = generation_rng(seed, 0);
        let records: Vec<_> = scores
            .iter()
            .map(|&score| shapeopt_core::ScoredRecord {
                design: DesignVector(vec![
                    rand::Rng::random_range(&mut rng, -3.0..=3.0),
                    rand::Rng::random_range(&mut rng, -3.0..=3.0),
                ]),
                score,
                generation: 0,
                status: EvalStatus::Ok,
            })
            .collect();
        let m = mock_propose(&records, &b).unwrap();
        prop_assert!(m.encoded.iter().all(|v| (0..=1000).contains(v)));
    }
}

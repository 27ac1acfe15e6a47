//! Thin command-line front end over the bewa library. State lives in a
//! directory (default `./bewa-state`) holding the engine snapshot and the
//! binary ledger file.

use bewa::api::{self, QueryRequest};
use bewa::claim::Timestamp;
use bewa::config::EngineConfig;
use bewa::engine::Engine;
use bewa::error::BewaError;
use bewa::kernel::{EvidenceKind, EvidenceUnit};
use bewa::ledger::ChainVerdict;
use bewa::sim::{self, SimConfig};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "bewa", version, about = "belief-graph engine for scientific claims")]
struct Cli {
    /// State directory (engine snapshot + ledger file).
    #[arg(long, global = true, default_value = "bewa-state")]
    state: PathBuf,
    /// Engine config file (TOML or JSON); defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a corpus file of claims.
    Ingest {
        file: PathBuf,
        /// Write rejection traces to this JSON file.
        #[arg(long)]
        reject_log: Option<PathBuf>,
        /// Ingestion timestamp (RFC 3339); defaults to now.
        #[arg(long)]
        now: Option<String>,
    },
    /// Score an author or a claim.
    Score {
        #[command(subcommand)]
        target: ScoreTarget,
    },
    /// Apply evidence from a fixture file to a claim.
    Update {
        ccs: String,
        #[arg(long)]
        evidence: PathBuf,
    },
    /// Apply temporal decay to all claims.
    DecayTick {
        #[arg(long)]
        now: String,
    },
    /// Propagate beliefs to a fixpoint.
    Propagate {
        #[arg(long)]
        max_iters: Option<u32>,
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Conflict inspection.
    Conflicts {
        #[arg(long)]
        list: bool,
    },
    /// Rank claims for an application class.
    Rank {
        #[arg(long)]
        app: String,
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(short)]
        k: usize,
    },
    /// Run a structured query.
    Query {
        #[arg(short, long)]
        filters: PathBuf,
    },
    /// Print the audit trajectory of a claim.
    Audit { ccs: String },
    /// Export the belief-evolution document of a claim.
    ExportViz { ccs: String },
    /// Ledger operations.
    Ledger {
        #[command(subcommand)]
        op: LedgerOp,
    },
    /// Run a synthetic simulation.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the belief matrix as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Serve the HTTP query/audit API.
    Serve {
        #[arg(long)]
        bind: Option<String>,
    },
}

#[derive(Subcommand)]
enum ScoreTarget {
    Author { caid: String },
    Claim { ccs: String },
}

#[derive(Subcommand)]
enum LedgerOp {
    /// Verify every hash link and signature.
    Verify,
    /// Produce a Merkle membership proof for a claim in an epoch.
    Prove {
        ccs: String,
        #[arg(long)]
        epoch: u64,
    },
    /// Export an epoch root and its commitment.
    ExportRoot {
        #[arg(long)]
        epoch: u64,
    },
    /// Seal the current epoch.
    Seal {
        #[arg(long)]
        now: Option<String>,
        #[arg(long, default_value = "0")]
        nonce: u64,
    },
}

fn engine_path(state: &Path) -> PathBuf {
    state.join("engine.json")
}

fn load_engine(cli_state: &Path, config: &Option<PathBuf>) -> Result<Engine, BewaError> {
    let path = engine_path(cli_state);
    if path.exists() {
        Engine::load(&path)
    } else {
        let cfg = match config {
            Some(p) => EngineConfig::load(p)?,
            None => EngineConfig::default(),
        };
        Ok(Engine::new(cfg))
    }
}

fn save_engine(engine: &Engine, state: &Path) -> Result<(), BewaError> {
    std::fs::create_dir_all(state)?;
    engine.save(&engine_path(state))?;
    engine.ledger.write_to(&state.join("ledger.bin"))?;
    Ok(())
}

fn parse_now(now: &Option<String>) -> Result<Timestamp, BewaError> {
    match now {
        Some(text) => bewa::corpus::parse_rfc3339(text),
        None => Ok(chrono::Utc::now().timestamp()),
    }
}

fn run() -> Result<(), BewaError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest {
            file,
            reject_log,
            now,
        } => {
            let mut engine = load_engine(&cli.state, &cli.config)?;
            let now = parse_now(&now)?;
            let report = engine.ingest_corpus_file(&file, now)?;
            println!(
                "accepted {} claim(s), rejected {}",
                report.accepted.len(),
                report.rejected.len()
            );
            for ccs in &report.accepted {
                println!("  + {ccs}");
            }
            for r in &report.rejected {
                println!("  - [{}] {}: {:?}", r.index, r.normalized_form, r.reasons);
            }
            if let Some(path) = reject_log {
                std::fs::write(
                    path,
                    serde_json::to_vec_pretty(&report.rejected)
                        .map_err(|e| BewaError::Io(e.to_string()))?,
                )?;
            }
            save_engine(&engine, &cli.state)
        }
        Command::Score { target } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            match target {
                ScoreTarget::Author { caid } => match engine.author_score_of(&caid) {
                    Some(score) => {
                        println!("author {caid}\n  score: {score:.6}");
                        Ok(())
                    }
                    None => Err(BewaError::UnknownKey),
                },
                ScoreTarget::Claim { ccs } => {
                    let now = chrono::Utc::now().timestamp();
                    let scores = engine.claim_scores(&ccs, now)?;
                    println!("{}", serde_json::to_string_pretty(&scores).unwrap());
                    Ok(())
                }
            }
        }
        Command::Update { ccs, evidence } => {
            let mut engine = load_engine(&cli.state, &cli.config)?;
            let fixtures = bewa::corpus::load_evidence(&evidence)?;
            let mut applied = 0;
            for fixture in &fixtures {
                let target = match fixture {
                    bewa::corpus::EvidenceFixture::Citation { target_ccs, .. } => target_ccs,
                    bewa::corpus::EvidenceFixture::Replication { target_ccs, .. } => target_ccs,
                    bewa::corpus::EvidenceFixture::Support { target_ccs, .. } => target_ccs,
                };
                if target == &ccs {
                    engine.apply_evidence_fixture(fixture)?;
                    applied += 1;
                }
            }
            println!(
                "applied {applied} evidence event(s); belief now {:.6}",
                engine.state(&ccs)?.pi
            );
            save_engine(&engine, &cli.state)
        }
        Command::DecayTick { now } => {
            let mut engine = load_engine(&cli.state, &cli.config)?;
            let t = bewa::corpus::parse_rfc3339(&now)?;
            let changed = engine.decay_tick(t)?;
            println!("decayed {changed} claim(s)");
            save_engine(&engine, &cli.state)
        }
        Command::Propagate {
            max_iters,
            schedule,
        } => {
            let mut engine = load_engine(&cli.state, &cli.config)?;
            if let Some(n) = max_iters {
                engine.config.graph.max_iters = n;
            }
            if let Some(s) = schedule {
                engine.config.graph.schedule = match s.as_str() {
                    "deterministic" => bewa::config::Schedule::Deterministic,
                    "priority" => bewa::config::Schedule::Priority,
                    other => {
                        return Err(BewaError::BadFilter(format!("unknown schedule {other}")))
                    }
                };
            }
            let report = engine.propagate();
            println!(
                "converged={} after {} iteration(s)",
                report.converged, report.iterations
            );
            save_engine(&engine, &cli.state)
        }
        Command::Conflicts { list: _ } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            let listing = api::conflict_listing(&engine);
            println!("{}", serde_json::to_string_pretty(&listing).unwrap());
            Ok(())
        }
        Command::Rank { app, query, k } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            let app_class: bewa::utility::ApplicationClass = match query {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    serde_json::from_str(&text).map_err(|e| BewaError::BadFilter(e.to_string()))?
                }
                None => bewa::utility::ApplicationClass {
                    id: app.clone(),
                    relevance: Default::default(),
                    risk_threshold: 1.0,
                    output: bewa::utility::OutputFunctional::TopK,
                    u_tp: engine.config.utility.u_tp,
                    lambda_fp: engine.config.utility.lambda_fp_default,
                },
            };
            let claims: std::collections::BTreeMap<_, _> = engine
                .store
                .claims
                .values()
                .map(|r| {
                    (
                        r.ccs.clone(),
                        (
                            r.domain_set.clone(),
                            Some(r.context.concept.clone()),
                            r.asserted_at,
                        ),
                    )
                })
                .collect();
            let ranked = bewa::utility::prioritize(
                &engine.graph,
                &claims,
                &app_class,
                &Default::default(),
                &engine.domain_risk,
                &Default::default(),
                chrono::Utc::now().timestamp(),
                k,
                &engine.config.utility,
            );
            println!("{}", serde_json::to_string_pretty(&ranked).unwrap());
            Ok(())
        }
        Command::Query { filters } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            let text = std::fs::read_to_string(&filters)?;
            let req: QueryRequest =
                serde_json::from_str(&text).map_err(|e| BewaError::BadFilter(e.to_string()))?;
            let resp = api::query(&engine, &req)?;
            println!("{}", serde_json::to_string_pretty(&resp).unwrap());
            Ok(())
        }
        Command::Audit { ccs } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            let trajectory = api::audit(&engine, &ccs)?;
            println!("{}", serde_json::to_string_pretty(&trajectory).unwrap());
            Ok(())
        }
        Command::ExportViz { ccs } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            let doc = api::export_trajectory(&engine, &ccs)?;
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(())
        }
        Command::Ledger { op } => {
            let mut engine = load_engine(&cli.state, &cli.config)?;
            match op {
                LedgerOp::Verify => match engine.verify_ledger() {
                    ChainVerdict::Ok => {
                        println!("ok: {} entries verified", engine.ledger.len());
                        Ok(())
                    }
                    ChainVerdict::Broken(seq) => {
                        println!("BROKEN at seq {seq}");
                        std::process::exit(2);
                    }
                },
                LedgerOp::Prove { ccs, epoch } => {
                    let proof = engine.ledger.prove_claim(&ccs, epoch)?;
                    println!("{}", serde_json::to_string_pretty(&proof).unwrap());
                    println!("verified: {}", bewa::merkle::verify(&proof));
                    Ok(())
                }
                LedgerOp::ExportRoot { epoch } => {
                    let root = engine
                        .ledger
                        .epoch(epoch)
                        .ok_or(BewaError::UnknownLeaf)?;
                    println!("{}", serde_json::to_string_pretty(root).unwrap());
                    Ok(())
                }
                LedgerOp::Seal { now, nonce } => {
                    let t = parse_now(&now)?;
                    let epoch = engine.seal_epoch(t, nonce)?;
                    println!("sealed epoch {epoch}");
                    save_engine(&engine, &cli.state)
                }
            }
        }
        Command::Simulate {
            config,
            seed,
            out,
            csv,
        } => {
            let mut sim_cfg = match config {
                Some(p) => SimConfig::load(&p)?,
                None => SimConfig::default(),
            };
            if let Some(s) = seed {
                sim_cfg.seed = s;
            }
            let engine_cfg = match &cli.config {
                Some(p) => EngineConfig::load(p)?,
                None => EngineConfig::default(),
            };
            let report = sim::simulate(&sim_cfg, engine_cfg)?;
            println!(
                "simulated {} node(s) x {} epoch(s): kappa={:?} final true deviation={:.4}",
                sim_cfg.n_nodes,
                sim_cfg.epochs,
                report.metrics.kappa,
                report.metrics.final_deviation_true
            );
            if let Some(path) = out {
                std::fs::write(
                    &path,
                    serde_json::to_vec_pretty(&report).map_err(|e| BewaError::Io(e.to_string()))?,
                )?;
                println!("report written to {}", path.display());
            }
            if let Some(path) = csv {
                std::fs::write(&path, sim::matrix_csv(&report))?;
                println!("matrix written to {}", path.display());
            }
            Ok(())
        }
        Command::Serve { bind } => {
            let engine = load_engine(&cli.state, &cli.config)?;
            let bind = bind
                .or_else(|| std::env::var("BEWA_BIND").ok())
                .unwrap_or_else(|| engine.config.api.bind.clone());
            let state = bewa::api::http::AppState::from_engine(engine);
            println!("serving on {bind}");
            let runtime = tokio::runtime::Runtime::new().map_err(|e| BewaError::Io(e.to_string()))?;
            runtime.block_on(bewa::api::http::serve(state, &bind))
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

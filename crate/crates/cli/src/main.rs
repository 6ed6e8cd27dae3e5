mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use stallings::echelon::CertificateJson;
use stallings::endo::FixCertificateJson;
use stallings::lab::{test_compressed_with, CompressionOptions};
use stallings::{
    build_via_pipeline, change_coordinates, echelon_certificate, hn_bound_scan, intersect,
    is_echelon_wrt, rank_profile, test_inert, verify_fix_structure, Alphabet, EchelonCertificate,
    Endomorphism, EnumBudget, FixCertificate, OneGenEndo, OrderedBasis, StallingsGraph, Word,
};

use input::{
    input_error, parse_graph_file, parse_list, parse_subgroup_text, parse_word, read, Failure,
    Outcome,
};

#[derive(Parser)]
#[command(
    name = "stallings",
    version,
    about = "Finitely generated subgroups of free groups via core graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct SubgroupArgs {
    /// Generator words, e.g. `xxyyxx`, `aB` or `x1 X2`
    words: Vec<String>,
    /// Rank of the ambient free group
    #[arg(short = 'n', long = "rank")]
    n: Option<usize>,
    /// Comma-separated generator words
    #[arg(long)]
    subgroup: Option<String>,
    /// Subgroup file: `n=<int>`, then one word per line
    #[arg(long)]
    file: Option<PathBuf>,
    /// Graph JSON, or DOT written by `export-dot`
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct LabArgs {
    /// Largest vertex count of the enumerated subgroups
    #[arg(long, default_value_t = 3)]
    budget_vertices: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    /// Random seed, required in sampled mode
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on the number of distinct subgroups
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of the subgroup
    Rank(SubgroupArgs),
    /// A free basis read off a spanning tree
    Basis(SubgroupArgs),
    /// Membership of a word; exit 1 when it is not a member
    Member {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        #[arg(long)]
        word: String,
    },
    /// Intersection with a second subgroup
    Intersect {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        /// Comma-separated generators of the second subgroup
        #[arg(long)]
        with: Option<String>,
        #[arg(long)]
        with_file: Option<PathBuf>,
        #[arg(long)]
        with_graph: Option<PathBuf>,
    },
    /// Ranks of the prefix intersections
    Profile {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        /// Ordered basis, comma-separated
        #[arg(long)]
        order: Option<String>,
    },
    /// Echelon test against an ordered basis; exit 1 when not echelon
    EchelonCheck {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        #[arg(long)]
        order: Option<String>,
    },
    /// Echelon certificate in basis coordinates; exit 1 when not echelon
    Certificate {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        #[arg(long)]
        order: Option<String>,
    },
    /// Rebuild an echelon subgroup by 1-generator endomorphisms
    Pipeline {
        #[arg(short = 'n', long = "rank")]
        n: usize,
        /// Certificate JSON as printed by `certificate --format json`
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Comma-separated certificate indices
        #[arg(long)]
        indices: Option<String>,
        /// Comma-separated certificate words
        #[arg(long)]
        words: Option<String>,
    },
    /// Image subgroup of an endomorphism
    EndoImage {
        #[arg(short = 'n', long = "rank")]
        n: usize,
        /// Comma-separated images of x1..xn (empty entries are 1)
        #[arg(long)]
        images: Option<String>,
        /// Generator moved by a 1-generator endomorphism
        #[arg(long)]
        moved: Option<usize>,
        /// Its image
        #[arg(long)]
        image: Option<String>,
    },
    /// Check the shape of a fixed-subgroup certificate; exit 1 when it fails
    FixVerify {
        /// Certificate JSON
        #[arg(long)]
        cert: PathBuf,
    },
    /// Search for G with rk(H ∩ G) > rk(G); exit 1 on a violation
    InertTest {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        #[command(flatten)]
        lab: LabArgs,
    },
    /// Minimum rank over folded quotients; exit 1 when not compressed
    CompressTest {
        #[command(flatten)]
        subgroup: SubgroupArgs,
        /// Enumerate quotients even when the abelianized rank settles it
        #[arg(long)]
        no_abelian_bound: bool,
        #[arg(long, default_value_t = 500_000)]
        quotient_budget: usize,
    },
    /// Hanna Neumann bound over pairs of enumerated subgroups; exit 1 on a violation
    HnScan {
        #[arg(short = 'n', long = "rank")]
        n: usize,
        #[command(flatten)]
        lab: LabArgs,
    },
    /// Graphviz (or, with --format json, graph JSON) of the core graph
    ExportDot(SubgroupArgs),
}

struct Report {
    text: String,
    json: String,
    dot: Option<String>,
    holds: bool,
}

impl Report {
    fn new(text: String, json: serde_json::Value) -> Self {
        Report {
            text,
            json: pretty(&json),
            dot: None,
            holds: true,
        }
    }

    fn graph(mut self, g: &StallingsGraph) -> Self {
        self.dot = Some(g.to_dot());
        self
    }

    fn holds(mut self, holds: bool) -> Self {
        self.holds = holds;
        self
    }
}

fn pretty<T: serde::Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn show(w: &Word) -> String {
    if w.is_identity() {
        "1".into()
    } else {
        w.to_string()
    }
}

fn show_list(words: &[Word]) -> String {
    words.iter().map(show).collect::<Vec<_>>().join(", ")
}

fn strings(words: &[Word]) -> Vec<String> {
    words.iter().map(Word::to_string).collect()
}

impl SubgroupArgs {
    fn load(&self) -> Outcome<StallingsGraph> {
        let inline = !self.words.is_empty() || self.subgroup.is_some();
        let sources = [inline, self.file.is_some(), self.graph.is_some()]
            .iter()
            .filter(|&&s| s)
            .count();
        if sources > 1 {
            return Err(input_error(
                "give generator words, --file or --graph, not several",
            ));
        }
        if let Some(path) = &self.graph {
            return parse_graph_file(path, self.n);
        }
        let (alphabet, words) = match &self.file {
            Some(path) => {
                let (alphabet, words) = parse_subgroup_text(&read(path)?)?;
                if self.n.is_some_and(|n| n != alphabet.rank()) {
                    return Err(input_error(format!(
                        "-n disagrees with n={} in {}",
                        alphabet.rank(),
                        path.display()
                    )));
                }
                (alphabet, words)
            }
            None => {
                let n = self.n.ok_or_else(|| input_error("-n <rank> is required"))?;
                let alphabet = Alphabet::new(n)?;
                let mut words = self
                    .words
                    .iter()
                    .map(|t| parse_word(t, alphabet))
                    .collect::<Outcome<Vec<_>>>()?;
                if let Some(list) = &self.subgroup {
                    words.extend(parse_list(list, alphabet)?);
                }
                (alphabet, words)
            }
        };
        Ok(StallingsGraph::subgroup_graph(&words, alphabet)?)
    }
}

impl LabArgs {
    fn budget(&self) -> Outcome<EnumBudget> {
        let mut budget = match self.mode {
            Mode::Exhaustive => EnumBudget::exhaustive(self.budget_vertices),
            Mode::Sampled => {
                let seed = self
                    .seed
                    .ok_or_else(|| input_error("--mode sampled requires --seed"))?;
                EnumBudget::sampled(self.budget_vertices, EnumBudget::DEFAULT_SAMPLES, seed)
            }
        };
        if let Some(seed) = self.seed {
            budget.seed = seed;
        }
        if let Some(samples) = self.samples {
            budget.max_graphs = Some(samples);
        }
        Ok(budget)
    }

    fn pool(&self) -> Outcome<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()
            .map_err(|e| input_error(format!("cannot start worker pool: {e}")))
    }
}

fn ordered_basis(order: &Option<String>, alphabet: Alphabet) -> Outcome<OrderedBasis> {
    match order {
        Some(text) => Ok(OrderedBasis::new(parse_list(text, alphabet)?, alphabet)?),
        None => Ok(OrderedBasis::identity(alphabet)),
    }
}

fn graph_summary(g: &StallingsGraph) -> Report {
    let basis = g.basis();
    Report::new(
        format!("rank: {}\nbasis: {}", g.rank(), show_list(&basis)),
        json!({ "rank": g.rank(), "basis": strings(&basis), "code": g.canonical_code().to_hex() }),
    )
    .graph(g)
}

fn run(command: Command) -> Outcome<Report> {
    match command {
        Command::Rank(sub) => {
            let g = sub.load()?;
            Ok(Report::new(g.rank().to_string(), json!({ "rank": g.rank() })).graph(&g))
        }
        Command::Basis(sub) => {
            let g = sub.load()?;
            let basis = g.basis();
            let text = basis.iter().map(show).collect::<Vec<_>>().join("\n");
            Ok(Report::new(text, json!({ "rank": g.rank(), "basis": strings(&basis) })).graph(&g))
        }
        Command::Member { subgroup, word } => {
            let g = subgroup.load()?;
            let w = parse_word(&word, g.alphabet())?;
            let member = g.contains(&w)?;
            Ok(Report::new(
                member.to_string(),
                json!({ "word": w.to_string(), "member": member }),
            )
            .holds(member))
        }
        Command::Intersect {
            subgroup,
            with,
            with_file,
            with_graph,
        } => {
            let g = subgroup.load()?;
            let other = SubgroupArgs {
                words: Vec::new(),
                n: Some(g.alphabet().rank()),
                subgroup: with,
                file: with_file,
                graph: with_graph,
            };
            if other.subgroup.is_none() && other.file.is_none() && other.graph.is_none() {
                return Err(input_error(
                    "intersect needs --with, --with-file or --with-graph",
                ));
            }
            Ok(graph_summary(&intersect(&g, &other.load()?)?))
        }
        Command::Profile { subgroup, order } => {
            let g = subgroup.load()?;
            let basis = ordered_basis(&order, g.alphabet())?;
            let profile = rank_profile(&change_coordinates(&g, &basis)?);
            Ok(Report::new(
                profile.to_string(),
                json!({ "profile": profile.values(), "echelon": profile.is_echelon() }),
            ))
        }
        Command::EchelonCheck { subgroup, order } => {
            let g = subgroup.load()?;
            let basis = ordered_basis(&order, g.alphabet())?;
            let (echelon, profile) = is_echelon_wrt(&g, &basis)?;
            Ok(Report::new(
                format!("echelon: {echelon}\nprofile: {profile}"),
                json!({ "echelon": echelon, "profile": profile.values() }),
            )
            .holds(echelon))
        }
        Command::Certificate { subgroup, order } => {
            let g = subgroup.load()?;
            let basis = ordered_basis(&order, g.alphabet())?;
            match echelon_certificate(&g, &basis)? {
                Some(cert) => {
                    let indices: Vec<String> = cert.indices.iter().map(usize::to_string).collect();
                    Ok(Report {
                        text: format!(
                            "indices: {}\nwords: {}",
                            indices.join(","),
                            show_list(&cert.words)
                        ),
                        json: pretty(&cert.to_json()),
                        dot: None,
                        holds: true,
                    })
                }
                None => {
                    let profile = rank_profile(&change_coordinates(&g, &basis)?);
                    Ok(Report::new(
                        format!("not echelon\nprofile: {profile}"),
                        json!({ "echelon": false, "profile": profile.values() }),
                    )
                    .holds(false))
                }
            }
        }
        Command::Pipeline {
            n,
            certificate,
            indices,
            words,
        } => {
            let alphabet = Alphabet::new(n)?;
            let json: CertificateJson = match (certificate, indices, words) {
                (Some(path), None, None) => serde_json::from_str(&read(&path)?)
                    .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
                (None, Some(indices), Some(words)) => CertificateJson {
                    indices: indices
                        .split(',')
                        .map(|t| {
                            t.trim()
                                .parse()
                                .map_err(|_| input_error(format!("bad index `{t}`")))
                        })
                        .collect::<Outcome<_>>()?,
                    words: words.split(',').map(str::to_string).collect(),
                },
                _ => {
                    return Err(input_error(
                        "give --certificate, or both --indices and --words",
                    ))
                }
            };
            let cert = EchelonCertificate::from_json(&json, alphabet)?;
            let pipeline = build_via_pipeline(&cert, alphabet)?;
            let image = pipeline.image()?;
            let basis = pipeline.run()?;
            let mut text: Vec<String> = pipeline
                .steps
                .iter()
                .map(|s| format!("x{} -> {}", s.moved(), show(s.image())))
                .collect();
            text.push(format!("rank: {}", image.rank()));
            text.push(format!("basis: {}", show_list(&basis)));
            let steps: Vec<serde_json::Value> = pipeline
                .steps
                .iter()
                .map(|s| json!({ "moved": s.moved(), "image": s.image().to_string() }))
                .collect();
            Ok(Report::new(
                text.join("\n"),
                json!({ "steps": steps, "basis": strings(&basis), "rank": image.rank() }),
            )
            .graph(&image))
        }
        Command::EndoImage {
            n,
            images,
            moved,
            image,
        } => {
            let alphabet = Alphabet::new(n)?;
            let endo = match (images, moved, image) {
                (Some(list), None, None) => {
                    Endomorphism::new(alphabet, parse_list(&list, alphabet)?)?
                }
                (None, Some(m), Some(w)) => {
                    OneGenEndo::new(alphabet, m, parse_word(&w, alphabet)?)?.to_endomorphism()
                }
                _ => return Err(input_error("give --images, or both --moved and --image")),
            };
            let g = endo.image();
            let basis = g.basis();
            let one_gen = endo
                .as_one_generator()
                .filter(|e| !e.is_identity())
                .map(|e| e.moved());
            let automorphism = endo.is_automorphism();
            Ok(Report::new(
                format!(
                    "rank: {}\nbasis: {}\nautomorphism: {automorphism}\none-generator: {}",
                    g.rank(),
                    show_list(&basis),
                    one_gen.map_or("no".to_string(), |m| format!("moves x{m}"))
                ),
                json!({
                    "rank": g.rank(),
                    "basis": strings(&basis),
                    "automorphism": automorphism,
                    "moved": one_gen,
                }),
            )
            .graph(&g))
        }
        Command::FixVerify { cert } => {
            let json: FixCertificateJson = serde_json::from_str(&read(&cert)?)
                .map_err(|e| input_error(format!("{}: {e}", cert.display())))?;
            let cert = FixCertificate::from_json(&json)?;
            let valid = verify_fix_structure(&cert)?;
            let gens = if valid {
                cert.generators()?
            } else {
                Vec::new()
            };
            let text = if valid {
                format!(
                    "valid: true\nrank: {}\ngenerators: {}",
                    gens.len(),
                    show_list(&gens)
                )
            } else {
                "valid: false".to_string()
            };
            Ok(Report::new(
                text,
                json!({ "valid": valid, "generators": strings(&gens) }),
            )
            .holds(valid))
        }
        Command::InertTest { subgroup, lab } => {
            let g = subgroup.load()?;
            let budget = lab.budget()?;
            let report = lab.pool()?.install(|| test_inert(&g, &budget))?;
            let mut text = vec![
                format!("tested: {}", report.tested),
                format!("violations: {}", report.violations.len()),
            ];
            text.extend(
                report
                    .violations
                    .iter()
                    .map(|v| format!("  G={} rk(H∩G)={} rk(G)={}", v.g, v.rk_cap, v.rk_g)),
            );
            text.push(format!("elapsed: {:.3}s", report.elapsed.as_secs_f64()));
            Ok(Report {
                text: text.join("\n"),
                json: pretty(&report),
                dot: None,
                holds: report.violations.is_empty(),
            })
        }
        Command::CompressTest {
            subgroup,
            no_abelian_bound,
            quotient_budget,
        } => {
            let g = subgroup.load()?;
            let options = CompressionOptions {
                abelian_bound: !no_abelian_bound,
                quotient_budget,
                ..Default::default()
            };
            let report = test_compressed_with(&g, options)?;
            let mut text = vec![
                format!("compressed: {}", report.compressed),
                format!(
                    "method: {}",
                    serde_json::to_value(report.method)
                        .expect("serializable")
                        .as_str()
                        .unwrap_or("")
                ),
                format!("rank: {}", report.rank),
                format!("min overgroup rank: {}", report.min_overgroup_rank),
                format!("quotients tested: {}", report.quotients_tested),
            ];
            if let Some(w) = &report.witness {
                text.push(format!("witness: {w}"));
            }
            Ok(Report {
                text: text.join("\n"),
                json: pretty(&report),
                dot: None,
                holds: report.compressed,
            })
        }
        Command::HnScan { n, lab } => {
            let alphabet = Alphabet::new(n)?;
            let budget = lab.budget()?;
            let report = lab.pool()?.install(|| hn_bound_scan(alphabet, &budget))?;
            let mut text = vec![
                format!("subgroups: {}", report.graphs),
                format!("pairs: {}", report.tested),
                format!("violations: {}", report.violations.len()),
            ];
            text.extend(
                report
                    .violations
                    .iter()
                    .map(|v| format!("  {} {} rk={} bound={}", v.g1, v.g2, v.rk_cap, v.bound)),
            );
            text.push(format!("elapsed: {:.3}s", report.elapsed.as_secs_f64()));
            Ok(Report {
                text: text.join("\n"),
                json: pretty(&report),
                dot: None,
                holds: report.violations.is_empty(),
            })
        }
        Command::ExportDot(sub) => {
            let g = sub.load()?;
            let dot = g.to_dot();
            Ok(Report {
                text: dot.trim_end().to_string(),
                json: pretty(&g.to_json()),
                dot: Some(dot),
                holds: true,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.command) {
        Ok(report) => {
            let out = match format {
                Format::Text => report.text,
                Format::Json => report.json,
                Format::Dot => match report.dot {
                    Some(dot) => dot.trim_end().to_string(),
                    None => {
                        eprintln!("error: this command has no DOT output");
                        return ExitCode::from(2);
                    }
                },
            };
            println!("{out}");
            ExitCode::from(if report.holds { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}

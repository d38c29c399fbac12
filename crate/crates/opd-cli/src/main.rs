//! Command-line front end: decomposition, cost, positivity studies,
//! semigroup propagation and the end-to-end verification suite.
//!
//! Exit codes: 0 on success, 2 on input errors (unreadable or invalid
//! files, bad parameters), 3 on internal-consistency failures (cost/rank
//! mismatch, failed verification).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use opd_core::dynamics::{default_time_grid, trajectory};
use opd_core::io::{
    load_bipartite, rates_from_text, save_opd, two_map_from_text, write_domain_csv_header,
    write_domain_csv_rows, write_trajectory_csv, ClassificationEntry, ContainmentEntry,
    PositivitySummary,
};
use opd_core::{
    basis_induced_family, cost, decompose, ellipsoid_ball_containment, hs_inner, pauli_frame,
    reduce, sample_domain, verify_duality, Error, OperatorFrame, PauliChannelFamily, TwoMapRates,
};

#[derive(Parser)]
#[command(name = "opd", version, about = "One-sided positive decompositions of bipartite quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameChoice {
    Pauli,
    Basis,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleChoice {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "II", alias = "ii")]
    II,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a bipartite density operator over a positive frame
    Decompose {
        /// JSON state file (matrix with dim_s/dim_e fields)
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = FrameChoice::Pauli)]
        frame: FrameChoice,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also reduce to the minimal term count
        #[arg(long)]
        reduce: bool,
        /// Output JSON path for the decomposition
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the cost of a state: minimal OPD terms = operator Schmidt rank
    Cost {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Positivity-domain study for the two-map semigroup setup
    Positivity {
        /// Built-in rate presets
        #[arg(long, value_enum)]
        example: Option<ExampleChoice>,
        /// Overall rate scale for the presets
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Plain-text rate config (1, 2 or 4 rows of three rates)
        #[arg(long)]
        rates_file: Option<PathBuf>,
        /// Dimensionless times gamma*t to analyze
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 2.0])]
        gt: Vec<f64>,
        /// Grid points per axis for the sampled cloud
        #[arg(long, default_value_t = 9)]
        resolution: usize,
        /// Classify a single initial point "v1,v2,v3"
        #[arg(long)]
        classify: Option<String>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Output prefix; writes <out>.csv and <out>.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a state or a v-point through Pauli-channel semigroups
    Evolve {
        #[arg(long, conflicts_with = "v")]
        state: Option<PathBuf>,
        /// Initial point "v1,v2,v3" of the two-map parametrization
        #[arg(long)]
        v: Option<String>,
        #[arg(long, value_enum)]
        example: Option<ExampleChoice>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        rates_file: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Trajectory CSV output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the end-to-end verification suite
    Verify {
        #[arg(long, default_value_t = 12345)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, hide = true)]
        corrupt_dual: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::CostMismatch { .. } | Error::Inconsistency(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn parse_v(text: &str) -> Result<[f64; 3], Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "expected three comma-separated components, got {text:?}"
        )));
    }
    let mut v = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("component {}: {e}", i + 1)))?;
    }
    Ok(v)
}

fn build_frame(choice: FrameChoice, dim: usize) -> Result<OperatorFrame, Error> {
    match choice {
        FrameChoice::Pauli => pauli_frame(dim),
        FrameChoice::Basis => basis_induced_family(dim),
    }
}

fn two_map_rates(
    example: Option<ExampleChoice>,
    gamma: f64,
    rates_file: &Option<PathBuf>,
) -> Result<TwoMapRates, Error> {
    match (example, rates_file) {
        (Some(_), Some(_)) => Err(Error::InvalidParameter(
            "give either --example or --rates-file, not both".into(),
        )),
        (Some(ExampleChoice::I), None) => TwoMapRates::example_i(gamma),
        (Some(ExampleChoice::II), None) => TwoMapRates::example_ii(gamma),
        (None, Some(path)) => two_map_from_text(&std::fs::read_to_string(path)?),
        (None, None) => Err(Error::InvalidParameter(
            "rates required: pass --example {i|ii} or --rates-file".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Decompose { state, frame, tol, reduce: do_reduce, out } => {
            let rho = load_bipartite(&state)?;
            let frame = build_frame(frame, rho.dim_s())?;
            let mut opd = decompose(&rho, &frame, tol)?;
            if do_reduce {
                opd = reduce(&opd, tol)?;
            }
            println!("terms: {}", opd.term_count());
            for term in &opd.terms {
                let purity = hs_inner(&term.env_state, &term.env_state)?.re;
                println!(
                    "  alpha={} omega={:.12} env_purity={:.12}",
                    term.label, term.weight, purity
                );
            }
            if let Some(cert) = &opd.reduction {
                println!(
                    "reduced: {} -> {} terms",
                    cert.original_count, cert.final_count
                );
            }
            if let Some(path) = out {
                save_opd(&path, &opd)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }

        Command::Cost { state, tol } => {
            let rho = load_bipartite(&state)?;
            let n = cost(&rho, tol)?;
            println!("{n}");
            Ok(())
        }

        Command::Positivity {
            example,
            gamma,
            rates_file,
            gt,
            resolution,
            classify,
            horizon,
            grid,
            out,
        } => {
            let rates = two_map_rates(example, gamma, &rates_file)?;
            let ref_rate = rates.mean_nonzero_rate().max(f64::MIN_POSITIVE);
            let times: Vec<f64> = gt.iter().map(|g| g / ref_rate).collect();

            let mut summary = PositivitySummary {
                rates,
                times: times.clone(),
                containment: Vec::new(),
                classifications: Vec::new(),
            };

            let mut csv = Vec::new();
            write_domain_csv_header(&mut csv)?;
            for (&gt_val, &t) in gt.iter().zip(&times) {
                let containment = ellipsoid_ball_containment(&rates, t)?;
                println!(
                    "gamma_t={gt_val} t={t:.6} contained={} max_distance_sq={:.9}",
                    containment.contained, containment.max_distance_sq
                );
                summary
                    .containment
                    .push(ContainmentEntry { t, result: containment });
                let samples = sample_domain(&rates, t, resolution)?;
                write_domain_csv_rows(&mut csv, t, &samples)?;
            }

            if let Some(text) = classify {
                let v = parse_v(&text)?;
                let horizon = horizon.unwrap_or_else(|| rates.default_horizon());
                let verdict = opd_core::classify(v, &rates, horizon, grid)?;
                println!(
                    "classify v=({}, {}, {}): {} asymptotic_g={:.9} first_exit={:?} reentry={:?}",
                    v[0], v[1], v[2], verdict.kind, verdict.asymptotic_g,
                    verdict.first_exit_time, verdict.reentry_time
                );
                summary
                    .classifications
                    .push(ClassificationEntry { v, verdict });
            }

            match out {
                Some(prefix) => {
                    let csv_path = prefix.with_extension("csv");
                    let json_path = prefix.with_extension("json");
                    std::fs::write(&csv_path, csv)?;
                    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)?;
                    println!("wrote {} and {}", csv_path.display(), json_path.display());
                }
                None => {
                    println!("{}", serde_json::to_string_pretty(&summary)?);
                }
            }
            Ok(())
        }

        Command::Evolve { state, v, example, gamma, rates_file, points, tol, out } => {
            let family: PauliChannelFamily = if example.is_some() {
                two_map_rates(example, gamma, &None)?.family()
            } else if let Some(path) = &rates_file {
                rates_from_text(&std::fs::read_to_string(path)?)?
            } else {
                return Err(Error::InvalidParameter(
                    "rates required: pass --example {i|ii} or --rates-file".into(),
                ));
            };

            let opd = match (state, v) {
                (Some(path), None) => {
                    let rho = load_bipartite(&path)?;
                    decompose(&rho, &pauli_frame(rho.dim_s())?, tol)?
                }
                (None, Some(text)) => opd_core::opd_from_v(parse_v(&text)?)?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "give exactly one of --state or --v".into(),
                    ))
                }
            };

            let times = default_time_grid(family.mean_nonzero_rate(), points);
            let rows = trajectory(&opd, &family, &times)?;
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_trajectory_csv(&mut buf, &rows)?;
                    std::fs::write(&path, buf)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    write_trajectory_csv(std::io::stdout().lock(), &rows)?;
                }
            }
            Ok(())
        }

        Command::Verify { seed, trials, corrupt_dual } => verify(seed, trials, corrupt_dual),
    }
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn verify(seed: u64, trials: usize, corrupt_dual: bool) -> Result<(), Error> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    use opd_core::random::{random_bipartite_density, random_hermitian, random_operator, rng_from_seed};
    use opd_core::{
        evolved_violation, exact_reduced_evolution, microscopic_map, opd_from_v,
        schmidt_decompose, semigroup_compose_check, tensor, BipartiteOperator, HsOperator,
        MicroscopicModel, PauliChannel,
    };
    use rand::Rng;

    let mut rng = rng_from_seed(seed);
    let mut checks: Vec<Check> = Vec::new();

    // frame reconstruction for both constructions
    {
        let mut worst: f64 = 0.0;
        for d in 2..=6 {
            for frame in [pauli_frame(d)?, basis_induced_family(d)?] {
                let dual = frame.dual().expect("construction ships a dual");
                for _ in 0..10 {
                    let a = random_operator(d, &mut rng);
                    let mut acc = HsOperator::zeros(d);
                    for (f, du) in frame.elements().iter().zip(dual) {
                        acc = &acc + &du.scale(hs_inner(f, &a)?);
                    }
                    worst = worst.max((&acc - &a).hs_norm());
                }
            }
        }
        checks.push(Check {
            name: "frame-reconstruction",
            passed: worst <= 1e-10,
            detail: format!("worst residual {worst:.3e}"),
        });
    }

    // positivity of the primal elements and biorthogonality of the pair
    {
        let mut min_eig = f64::INFINITY;
        let mut worst_bio: f64 = 0.0;
        for d in 2..=6 {
            for frame in [pauli_frame(d)?, basis_induced_family(d)?] {
                for f in frame.elements() {
                    min_eig = min_eig.min(f.min_eigenvalue());
                }
            }
            let frame = pauli_frame(d)?;
            let gram = frame.dual_primal_gram()?;
            for a in 0..frame.len() {
                for b in 0..frame.len() {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    worst_bio = worst_bio.max((gram[(a, b)] - expect).abs());
                }
            }
        }
        checks.push(Check {
            name: "frame-positivity",
            passed: min_eig >= -1e-12 && worst_bio <= 1e-10,
            detail: format!("min eigenvalue {min_eig:.3e}, biorthogonality {worst_bio:.3e}"),
        });
    }

    // decomposition validity on random states
    {
        let frame = pauli_frame(2)?;
        let mut ok = true;
        let mut detail = String::from("all states valid");
        for i in 0..trials {
            let rho = random_bipartite_density(2, 2, &mut rng);
            let opd = decompose(&rho, &frame, 1e-10)?;
            let recon = (&opd_core::reconstruct(&opd)? - &rho).hs_norm();
            let marginal = (&opd.terms[0].env_state - &rho.partial_trace_s()).hs_norm();
            let weights_ok = opd.terms.iter().all(|t| t.weight >= -1e-12);
            let states_ok = opd
                .terms
                .iter()
                .all(|t| t.weight <= 1e-10 || t.env_state.is_density(1e-10));
            if recon > 1e-10 || marginal > 1e-10 || !weights_ok || !states_ok {
                ok = false;
                detail = format!("state {i}: recon={recon:.3e} marginal={marginal:.3e}");
                break;
            }
        }
        checks.push(Check { name: "opd-validity", passed: ok, detail });
    }

    // reduction count vs Schmidt rank
    {
        let mut ok = true;
        let mut detail = String::from("cost equals Schmidt rank");
        for i in 0..trials {
            let rho = random_bipartite_density(2, 2, &mut rng);
            match cost(&rho, 1e-8) {
                Ok(_) => {}
                Err(e) => {
                    ok = false;
                    detail = format!("state {i}: {e}");
                    break;
                }
            }
        }
        checks.push(Check { name: "cost-vs-schmidt-rank", passed: ok, detail });
    }

    // term-wise propagation against exact reduced dynamics
    {
        let frame = pauli_frame(2)?;
        let mut worst: f64 = 0.0;
        for _ in 0..trials.min(20) {
            let h = random_hermitian(4, &mut rng);
            let joint_h = BipartiteOperator::new(2, 2, h.matrix().clone())?;
            let rho = random_bipartite_density(2, 2, &mut rng);
            let model = MicroscopicModel::new(joint_h, rho.clone(), 1e-9)?;
            let opd = decompose(&rho, &frame, 1e-10)?;
            for k in 0..5 {
                let t = 0.5 * k as f64;
                let mut acc = HsOperator::zeros(2);
                for term in &opd.terms {
                    let moved = microscopic_map(&model, &term.env_state, t, &term.system_op)?;
                    acc = &acc + &moved.scale_re(term.weight);
                }
                worst = worst.max((&acc - &exact_reduced_evolution(&model, t)?).hs_norm());
            }
        }
        checks.push(Check {
            name: "microscopic-identity",
            passed: worst <= 1e-8,
            detail: format!("worst residual {worst:.3e}"),
        });
    }

    // semigroup laws, probability vectors, complete positivity
    {
        let mut worst_comp: f64 = 0.0;
        let mut worst_prob: f64 = 0.0;
        let mut worst_choi = f64::INFINITY;
        let mut worst_eig: f64 = 0.0;
        for _ in 0..trials.min(20) {
            let rates = [
                2.0 * rng.random::<f64>(),
                2.0 * rng.random::<f64>(),
                2.0 * rng.random::<f64>(),
            ];
            let family = PauliChannelFamily::uniform(rates)?;
            let t = 2.0 * rng.random::<f64>();
            let s = 2.0 * rng.random::<f64>();
            worst_comp = worst_comp.max(semigroup_compose_check(&family, 0, t, s)?);
            let ch = PauliChannel::new(rates)?;
            let p = ch.probabilities(t);
            worst_prob = worst_prob.max((p.iter().sum::<f64>() - 1.0).abs());
            worst_prob = worst_prob.max(-p.iter().copied().fold(f64::INFINITY, f64::min).min(0.0));
            worst_choi = worst_choi.min(ch.choi(t)?.min_eigenvalue());
            let lam = ch.eigenvalues(t);
            let sigmas = opd_core::pauli_matrices();
            for (j, sig) in sigmas.iter().enumerate() {
                worst_eig = worst_eig.max((&ch.apply(t, sig)? - &sig.scale_re(lam[j])).hs_norm());
            }
        }
        checks.push(Check {
            name: "channel-laws",
            passed: worst_comp <= 1e-12
                && worst_prob <= 1e-12
                && worst_choi >= -1e-10
                && worst_eig <= 1e-12,
            detail: format!(
                "composition {worst_comp:.3e}, probabilities {worst_prob:.3e}, choi {worst_choi:.3e}, eigen {worst_eig:.3e}"
            ),
        });
    }

    // sign of 1 - g against the spectrum of the evolved matrix
    {
        let mut ok = true;
        let mut detail = String::from("200 probes consistent");
        for i in 0..200 {
            let rates = TwoMapRates::new(
                [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()],
                [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()],
            )?;
            let v = [
                2.0 * rng.random::<f64>(),
                2.0 * rng.random::<f64>(),
                2.0 * rng.random::<f64>(),
            ];
            let t = 3.0 * rng.random::<f64>();
            let g = evolved_violation(v, &rates, t)?;
            let evolved = opd_core::evolve_opd(&opd_from_v(v)?, &rates.family(), t)?;
            let consistent = if g < 1.0 - 1e-9 {
                evolved.min_eigenvalue >= -1e-12
            } else if g > 1.0 + 1e-9 {
                evolved.min_eigenvalue < 1e-12
            } else {
                true
            };
            if !consistent {
                ok = false;
                detail = format!("probe {i}: g={g:.6}, min_eig={:.3e}", evolved.min_eigenvalue);
                break;
            }
        }
        checks.push(Check { name: "geometry-vs-spectrum", passed: ok, detail });
    }

    // duality of the shipped frames (the hidden flag corrupts one element)
    {
        let frame = pauli_frame(3)?;
        let mut dual = frame.dual().expect("pauli frame ships a dual").to_vec();
        if corrupt_dual {
            dual[1] = &dual[1] + &HsOperator::identity(3).scale_re(0.1);
        }
        let check = verify_duality(frame.elements(), &dual, 1e-10)?;
        checks.push(Check {
            name: "duality",
            passed: check.ok,
            detail: format!("max residual {:.3e}", check.max_residual),
        });
    }

    // schmidt reconstruction sanity on a product state
    {
        let mut rng2 = rng_from_seed(seed ^ 0x5eed);
        let rho_s = opd_core::random::random_density(2, &mut rng2);
        let rho_e = opd_core::random::random_density(3, &mut rng2);
        let joint = tensor(&rho_s, &rho_e);
        let dec = schmidt_decompose(&joint, 1e-10)?;
        checks.push(Check {
            name: "schmidt-product-rank",
            passed: dec.rank == 1,
            detail: format!("rank {}", dec.rank),
        });
    }

    let mut all_ok = true;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {name}: {detail}", name = c.name, detail = c.detail);
        all_ok &= c.passed;
    }
    if all_ok {
        println!("verify: all {} checks passed (seed {seed}, trials {trials})", checks.len());
        Ok(())
    } else {
        Err(Error::Inconsistency("verification failed".into()))
    }
}

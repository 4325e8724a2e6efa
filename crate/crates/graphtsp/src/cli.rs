//! Command line front end. Exit codes: 0 on success, 1 on usage errors,
//! 2 on runtime failures (unreadable input, solver errors).

use crate::graph::Graph;
use crate::harness::{
    bench, gen_gap_path, gen_gap_tour, gen_grid, gen_random_2vc, gen_random_cubic, oracle_opt_path,
    oracle_opt_tour, selftest, InstanceSpec, ORACLE_HARD_CAP,
};
use crate::lp::{solve_lp, support_graph, LpMode};
use crate::pipeline::{
    path_certificate_text, path_solution_text, tour_certificate_text, tour_solution_text, tsp_path,
    tsp_tour, DEFAULT_ORACLE_CUTOFF,
};
use clap::{Parser, Subcommand};
use std::io::{Read, Write};

#[derive(Parser)]
#[command(
    name = "graphtsp",
    about = "closed and open walk covers of unweighted graphs with certified edge-count bounds",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed spanning walk with its certificate ("-" reads stdin)
    Solve { input: String },
    /// Open spanning walk between two endpoints
    Path {
        input: String,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        /// Below this vertex count the exact oracle joins the candidates
        /// (0 disables it)
        #[arg(long, default_value_t = DEFAULT_ORACLE_CUTOFF)]
        oracle_cutoff: usize,
    },
    /// Exact relaxation value and its support
    Lp {
        input: String,
        /// Open-walk variant with these endpoints
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        path: Option<Vec<usize>>,
    },
    /// Brute-force optimum for small instances
    Oracle {
        input: String,
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        path: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CUTOFF)]
        cutoff: usize,
    },
    /// Print a generated instance: gap-tour K | gap-path K |
    /// random-cubic N SEED | random-2vc N M SEED | grid A B
    Gen {
        family: String,
        args: Vec<u64>,
    },
    /// Solve a spec file of instances and emit one CSV row per instance
    Bench {
        specfile: String,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CUTOFF)]
        oracle_cutoff: usize,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<String>,
    },
    /// Rerun the built-in invariant corpus
    Selftest,
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {}", e))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path, e))
    }
}

fn load_graph(path: &str) -> Result<Graph, String> {
    Graph::parse(&read_input(path)?).map_err(|e| e.to_string())
}

fn endpoint_pair(v: &[usize]) -> (usize, usize) {
    (v[0], v[1])
}

/// Stdout writer that ends the run quietly when the reader closes the pipe
/// early (`graphtsp gen ... | head`). Other write errors surface as usual.
struct Stdout;

impl Write for Stdout {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        match std::io::stdout().write(buf) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
            r => r,
        }
    }

    fn flush(&mut self) -> std::io::Result<()> {
        match std::io::stdout().flush() {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
            r => r,
        }
    }
}

fn emit(text: &str) -> Result<(), String> {
    Stdout.write_all(text.as_bytes()).map_err(|e| format!("stdout: {}", e))
}

fn execute(cmd: Cmd) -> Result<(), String> {
    match cmd {
        Cmd::Solve { input } => {
            let g = load_graph(&input)?;
            let sol = tsp_tour(&g).map_err(|e| e.to_string())?;
            emit(&tour_solution_text(&sol))?;
            emit("\n")?;
            emit(&tour_certificate_text(&sol.certificate))?;
            Ok(())
        }
        Cmd::Path { input, s, t, oracle_cutoff } => {
            let g = load_graph(&input)?;
            let sol = tsp_path(&g, s, t, oracle_cutoff).map_err(|e| e.to_string())?;
            emit(&path_solution_text(&sol))?;
            emit("\n")?;
            emit(&path_certificate_text(&sol.certificate))?;
            Ok(())
        }
        Cmd::Lp { input, path } => {
            let g = load_graph(&input)?;
            let mode = match path {
                None => LpMode::Tour,
                Some(v) => {
                    let (s, t) = endpoint_pair(&v);
                    LpMode::Path { s, t }
                }
            };
            let sol = solve_lp(&g, mode).map_err(|e| e.to_string())?;
            emit(&format!("{}/{}\n", sol.value.numer(), sol.value.denom()))?;
            let (sup, emap) = support_graph(&g, &sol).map_err(|e| e.to_string())?;
            for e in 0..sup.edge_count() {
                let (u, v) = sup.endpoints(e);
                let x = &sol.x[emap[e]];
                emit(&format!("{} {} {}/{}\n", u, v, x.numer(), x.denom()))?;
            }
            Ok(())
        }
        Cmd::Oracle { input, path, cutoff } => {
            let g = load_graph(&input)?;
            let opt = match path {
                None => oracle_opt_tour(&g, cutoff),
                Some(v) => {
                    let (s, t) = endpoint_pair(&v);
                    oracle_opt_path(&g, s, t, cutoff)
                }
            }
            .map_err(|e| e.to_string())?;
            emit(&format!("{}\n", opt))?;
            Ok(())
        }
        Cmd::Gen { family, args } => {
            let need = |n: usize| -> Result<(), String> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(format!("{} takes {} argument(s), got {}", family, n, args.len()))
                }
            };
            match family.as_str() {
                "gap-tour" => {
                    need(1)?;
                    if args[0] == 0 {
                        return Err("the family starts at k = 1".into());
                    }
                    emit(&gen_gap_tour(args[0] as usize).to_text())?;
                }
                "gap-path" => {
                    need(1)?;
                    if args[0] == 0 {
                        return Err("the family starts at k = 1".into());
                    }
                    let (g, s, t) = gen_gap_path(args[0] as usize);
                    emit(&g.to_text())?;
                    emit(&format!("# walk endpoints: s={} t={}\n", s, t))?;
                }
                "random-cubic" => {
                    need(2)?;
                    let g = gen_random_cubic(args[0] as usize, args[1]).map_err(|e| e.to_string())?;
                    emit(&g.to_text())?;
                }
                "random-2vc" => {
                    need(3)?;
                    let g = gen_random_2vc(args[0] as usize, args[1] as usize, args[2])
                        .map_err(|e| e.to_string())?;
                    emit(&g.to_text())?;
                }
                "grid" => {
                    need(2)?;
                    let g = gen_grid(args[0] as usize, args[1] as usize).map_err(|e| e.to_string())?;
                    emit(&g.to_text())?;
                }
                other => return Err(format!("unknown family {:?}", other)),
            }
            Ok(())
        }
        Cmd::Bench { specfile, oracle_cutoff, workers, out } => {
            let text = read_input(&specfile)?;
            let specs = InstanceSpec::parse_corpus(&text).map_err(|e| e.to_string())?;
            let cutoff = oracle_cutoff.min(ORACLE_HARD_CAP);
            match out {
                None => {
                    bench(&specs, &mut Stdout, cutoff, workers).map_err(|e| e.to_string())?;
                }
                Some(p) => {
                    let mut f = std::fs::File::create(&p).map_err(|e| format!("{}: {}", p, e))?;
                    bench(&specs, &mut f, cutoff, workers).map_err(|e| e.to_string())?;
                }
            }
            Ok(())
        }
        Cmd::Selftest => selftest(&mut Stdout),
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.cmd) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {}", msg);
            2
        }
    }
}

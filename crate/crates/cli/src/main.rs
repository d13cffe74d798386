use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use septree::bench::{default_bins, run_benchmark, BenchConfig, DistanceBin, HeuristicKind};
use septree::dimacs::{load_dimacs_files, write_dimacs_files, CoordinateSystem, LoadOptions};
use septree::index::load_index;
use septree::search::{astar_traced, shortest_distance, Heuristic, NoHeuristic};
use septree::synth::{generate_synthetic, SyntheticParams};
use septree::{
    Axis, CostScope, Error, GlobalIndex, LocalIndex, RoadGraph, SeparatorIndex, VertexId,
};

#[derive(Parser)]
#[command(
    name = "septree",
    version,
    about = "Separator-tree heuristics for shortest paths on road graphs"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "SEPTREE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic grid road map as <out>.gr and <out>.co.
    Generate(GenerateArgs),
    /// Build an index for a map.
    Preprocess(PreprocessArgs),
    /// Answer one query and report its cost and search statistics.
    Query(QueryArgs),
    /// Run the binned quality/efficiency benchmark.
    Bench(BenchArgs),
    /// Print an index file's header and statistics.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordsArg {
    /// Use the file's `c coordinates` hint, else geographic.
    Auto,
    Planar,
    Geographic,
}

#[derive(Args)]
struct MapArgs {
    /// Map path prefix; reads <map>.gr and <map>.co.
    #[arg(long)]
    map: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    coords: CoordsArg,
    /// File units per meter (planar) or per degree (geographic).
    #[arg(long)]
    coord_scale: Option<f64>,
}

impl MapArgs {
    fn load(&self) -> Result<RoadGraph, CliError> {
        let coordinates = match (self.coords, self.coord_scale) {
            (CoordsArg::Auto, None) => None,
            (CoordsArg::Auto | CoordsArg::Geographic, Some(s)) => {
                Some(CoordinateSystem::Geographic {
                    units_per_degree: s,
                })
            }
            (CoordsArg::Geographic, None) => Some(CoordinateSystem::default()),
            (CoordsArg::Planar, s) => Some(CoordinateSystem::Planar {
                units_per_meter: s.unwrap_or(1.0),
            }),
        };
        let (gr, co) = map_paths(&self.map);
        load_dimacs_files(&gr, &co, &LoadOptions { coordinates })
            .map_err(|e| CliError::with_path(e, &self.map))
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    /// Grid spacing in meters.
    #[arg(long, default_value_t = 100.0)]
    cell_size: f64,
    /// Comma-separated speed classes in km/h.
    #[arg(long, value_delimiter = ',', default_values_t = [30.0, 50.0, 80.0, 110.0])]
    speeds: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    drop_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path prefix.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexKind {
    Lsh,
    Gsh,
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Tree depth (lsh) or lines per axis (gsh).
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "lsh")]
    kind: IndexKind,
    /// Compute separator costs inside each tree node's strip only.
    #[arg(long)]
    subgraph_costs: bool,
    /// Index output file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum HeuristicArg {
    Dijkstra,
    Gsh,
    Lsh,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long)]
    index: Option<PathBuf>,
    /// Source vertex (0-based).
    #[arg(long)]
    s: VertexId,
    /// Target vertex (0-based).
    #[arg(long)]
    t: VertexId,
    /// Evaluation depth for lsh (default: the index depth).
    #[arg(long)]
    d: Option<usize>,
    /// Default: the kind of the given index, else dijkstra.
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicArg>,
    /// Check the cost against plain Dijkstra.
    #[arg(long)]
    verify: bool,
    /// Write the settled vertices, one id per line in settle order.
    #[arg(long)]
    dump_traversal: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Distance bins in meters as `lo-hi`, comma separated (default: 1-5,
    /// 5-10, 10-20, 20-50, 50-100 km clipped to the map).
    #[arg(long, value_delimiter = ',', value_parser = parse_bin)]
    bins: Vec<DistanceBin>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [HeuristicArg::Dijkstra, HeuristicArg::Gsh, HeuristicArg::Lsh])]
    heuristics: Vec<HeuristicArg>,
    /// Depths as a list or range, e.g. `1,3,5` or `1-9`.
    #[arg(long, default_value = "1-9", value_parser = parse_depths)]
    depths: DepthList,
    #[arg(long, default_value_t = 3000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    subgraph_costs: bool,
    /// CSV summary output (default: stdout).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON report output.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Include per-pair records in the JSON report.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct InspectArgs {
    index: PathBuf,
    /// Also check the index against this map.
    #[command(flatten)]
    map: Option<OptionalMap>,
    /// Dump the full index as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OptionalMap {
    #[arg(long = "map", required = false)]
    map: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    coords: CoordsArg,
    #[arg(long)]
    coord_scale: Option<f64>,
}

#[derive(Clone, Debug)]
struct DepthList(Vec<usize>);

fn parse_depths(s: &str) -> Result<DepthList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (
                    a.parse().map_err(|e| format!("{e}"))?,
                    b.parse().map_err(|e| format!("{e}"))?,
                );
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|e| format!("{e}"))?),
        }
    }
    if out.is_empty() {
        return Err("no depths given".into());
    }
    Ok(DepthList(out))
}

fn parse_bin(s: &str) -> Result<DistanceBin, String> {
    let (lo, hi) = s
        .split_once('-')
        .ok_or_else(|| format!("expected lo-hi, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    DistanceBin::new(lo, hi).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn with_path(e: Error, path: &Path) -> Self {
        match e {
            Error::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
            other => CliError::Validation(format!("{}: {other}", path.display())),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

fn map_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    (with(".gr"), with(".co"))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_index(path: &Path) -> Result<SeparatorIndex<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_index(BufReader::new(file)).map_err(|e| CliError::with_path(e, path))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let params = SyntheticParams {
        rows: a.rows,
        cols: a.cols,
        cell_size: a.cell_size,
        speed_classes: a.speeds.iter().map(|kmh| kmh / 3.6).collect(),
        drop_prob: a.drop_prob,
        seed: a.seed,
    };
    let g: RoadGraph = generate_synthetic(&params)?;
    let (gr, co) = map_paths(&a.out);
    write_dimacs_files(&g, &gr, &co, 1.0).map_err(|e| CliError::with_path(e, &a.out))?;
    println!("vertices: {}", g.vertex_count());
    println!("edges: {}", g.edge_count());
    println!("wrote {} and {}", gr.display(), co.display());
    Ok(())
}

fn cmd_preprocess(a: &PreprocessArgs) -> Result<(), CliError> {
    let g = a.map.load()?;
    let scope = if a.subgraph_costs {
        CostScope::Subgraph
    } else {
        CostScope::FullGraph
    };
    let index = match a.kind {
        IndexKind::Lsh => {
            let (index, stats) = LocalIndex::build_with(&g, a.k, scope)?;
            println!(
                "kind: lsh  depth: {}  vertices: {}  cost scope: {scope:?}",
                a.k,
                g.vertex_count()
            );
            println!("axis level nodes separators separator_vertices");
            for (axis, s) in [(Axis::X, &stats.x), (Axis::Y, &stats.y)] {
                for (i, l) in s.levels.iter().enumerate() {
                    println!(
                        "{axis} {} {} {} {}",
                        i + 1,
                        l.nodes,
                        l.nonempty_separators,
                        l.separator_vertices
                    );
                }
            }
            let runs = stats.x.dijkstra_runs + stats.y.dijkstra_runs;
            let seps = stats.x.nonempty_separators() + stats.y.nonempty_separators();
            println!("separators: {seps}  dijkstra runs: {runs}");
            SeparatorIndex::Local(index)
        }
        IndexKind::Gsh => {
            if a.subgraph_costs {
                return Err(CliError::Validation(
                    "--subgraph-costs applies to lsh indexes only".into(),
                ));
            }
            let (index, sizes) = GlobalIndex::build_with_stats(&g, a.k)?;
            println!(
                "kind: gsh  lines per axis: {}  vertices: {}",
                a.k,
                g.vertex_count()
            );
            println!("axis line position separator_vertices");
            for (j, line) in index.lines().iter().enumerate() {
                println!(
                    "{} {} {} {}",
                    line.axis,
                    j % a.k + 1,
                    line.position,
                    sizes[j]
                );
            }
            println!("separators: {}", sizes.len());
            SeparatorIndex::Global(index)
        }
    };
    let mut out = create(&a.out)?;
    index
        .save(&mut out)
        .map_err(|e| CliError::with_path(e, &a.out))?;
    out.flush().map_err(io_err(&a.out))?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn cmd_query(a: &QueryArgs) -> Result<(), CliError> {
    let g = a.map.load()?;
    g.check_vertex(a.s)?;
    g.check_vertex(a.t)?;
    let index = a.index.as_deref().map(read_index).transpose()?;
    let heuristic = a.heuristic.unwrap_or(match &index {
        Some(SeparatorIndex::Local(_)) => HeuristicArg::Lsh,
        Some(SeparatorIndex::Global(_)) => HeuristicArg::Gsh,
        None => HeuristicArg::Dijkstra,
    });
    match (heuristic, &index) {
        (HeuristicArg::Dijkstra, _) => report_query(a, &g, "dijkstra", &NoHeuristic),
        (HeuristicArg::Lsh, Some(SeparatorIndex::Local(index))) => {
            let h = index.heuristic(&g, a.d.unwrap_or(index.depth()))?;
            report_query(a, &g, "lsh", &h)
        }
        (HeuristicArg::Gsh, Some(SeparatorIndex::Global(index))) => {
            if a.d.is_some() {
                return Err(CliError::Validation(
                    "--d applies to lsh indexes only".into(),
                ));
            }
            report_query(a, &g, "gsh", &index.heuristic(&g)?)
        }
        (_, None) => Err(CliError::Validation("this heuristic needs --index".into())),
        (_, Some(other)) => Err(CliError::Validation(format!(
            "index is of kind {}, not the requested heuristic",
            other.kind_name()
        ))),
    }
}

fn report_query<H: Heuristic<f64>>(
    a: &QueryArgs,
    g: &RoadGraph,
    name: &str,
    h: &H,
) -> Result<(), CliError> {
    let (result, settled) = astar_traced(g, a.s, a.t, h)?;
    if let Some(path) = &a.dump_traversal {
        let mut out = create(path)?;
        for v in &settled {
            writeln!(out, "{v}").map_err(io_err(path))?;
        }
        out.flush().map_err(io_err(path))?;
    }
    let hv = h.estimate(a.s, a.t);
    println!("heuristic: {name}");
    println!("h(s,t): {hv}");
    let Some(r) = result else {
        println!("no path from {} to {}", a.s, a.t);
        println!("settled: {}", settled.len());
        if a.verify && shortest_distance(g, a.s, a.t)?.is_some() {
            return Err(CliError::Verification(
                "A* found no path but Dijkstra did".into(),
            ));
        }
        return Ok(());
    };
    println!("cost: {}", r.cost);
    println!("path vertices: {}", r.stats.path_vertex_count);
    println!("settled: {}", r.stats.settled_count);
    println!("relaxed edges: {}", r.stats.relaxed_edge_count);
    if r.cost > 0.0 {
        println!("qual: {}", hv / r.cost);
    }
    println!(
        "eff: {}",
        r.stats.path_vertex_count as f64 / r.stats.settled_count as f64
    );
    if a.verify {
        let reference = shortest_distance(g, a.s, a.t)?;
        if reference != Some(r.cost) {
            return Err(CliError::Verification(format!(
                "A* cost {} but Dijkstra cost {reference:?}",
                r.cost
            )));
        }
        println!("verified: cost matches Dijkstra");
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let loaded = a.map.load()?;
    let g = if loaded.is_connected() {
        loaded
    } else {
        let (lcc, _) = loaded.largest_connected_component();
        eprintln!(
            "note: using the largest component ({} of {} vertices)",
            lcc.vertex_count(),
            loaded.vertex_count()
        );
        lcc
    };
    let bins = if a.bins.is_empty() {
        default_bins(g.bounding_box()?.diagonal())
    } else {
        a.bins.clone()
    };
    let config = BenchConfig {
        bins,
        heuristics: a
            .heuristics
            .iter()
            .map(|h| match h {
                HeuristicArg::Dijkstra => HeuristicKind::Dijkstra,
                HeuristicArg::Gsh => HeuristicKind::Gsh,
                HeuristicArg::Lsh => HeuristicKind::Lsh,
            })
            .collect(),
        depths: a.depths.0.clone(),
        pairs_per_bin: a.pairs,
        seed: a.seed,
        keep_raw: a.raw,
        cost_scope: if a.subgraph_costs {
            CostScope::Subgraph
        } else {
            CostScope::FullGraph
        },
    };
    let report = run_benchmark(&g, &config)?;
    for b in report.bins.iter().filter(|b| b.exhausted) {
        eprintln!(
            "warning: bin {}-{} m yielded {} of {} pairs within the draw budget",
            b.bin.lo, b.bin.hi, b.sampled, b.requested
        );
    }
    match &a.csv {
        Some(path) => {
            let mut out = create(path)?;
            report
                .write_csv(&mut out)
                .map_err(|e| CliError::with_path(e, path))?;
            out.flush().map_err(io_err(path))?;
        }
        None => report.write_csv(std::io::stdout().lock())?,
    }
    if let Some(path) = &a.json {
        let mut out = create(path)?;
        report
            .write_json(&mut out)
            .map_err(|e| CliError::with_path(e, path))?;
        out.flush().map_err(io_err(path))?;
    }
    Ok(())
}

fn cmd_inspect(a: &InspectArgs) -> Result<(), CliError> {
    let index = read_index(&a.index)?;
    if a.json {
        println!("{:#}", index.to_debug_json());
        return Ok(());
    }
    let fp = index.fingerprint();
    println!("kind: {}", index.kind_name());
    println!("depth: {}", index.depth());
    println!("vertices: {}", fp.vertex_count);
    println!("edges: {}", fp.edge_count);
    println!("graph checksum: {:#010x}", fp.checksum);
    match &index {
        SeparatorIndex::Local(i) => {
            println!("cost scope: {:?}", i.cost_scope());
            let b = i.bounding_box();
            println!(
                "bounding box: x [{}, {}] y [{}, {}]",
                b.x_min, b.x_max, b.y_min, b.y_max
            );
            println!("axis level vertices_with_finite_cost");
            for axis in Axis::BOTH {
                let labels = i.labels(axis);
                for level in 1..=i.depth() {
                    let finite = (0..i.vertex_count())
                        .filter(|&v| labels.costs(v)[level - 1].is_finite())
                        .count();
                    println!("{axis} {level} {finite}");
                }
            }
        }
        SeparatorIndex::Global(i) => {
            println!("separators: {}", 2 * i.depth());
            for line in i.lines() {
                println!("line {} = {}", line.axis, line.position);
            }
        }
    }
    if let Some(OptionalMap {
        map: Some(map),
        coords,
        coord_scale,
    }) = &a.map
    {
        let g = MapArgs {
            map: map.clone(),
            coords: *coords,
            coord_scale: *coord_scale,
        }
        .load()?;
        let fresh = match &index {
            SeparatorIndex::Local(i) => i.check_graph(&g),
            SeparatorIndex::Global(i) => i.check_graph(&g),
        };
        match fresh {
            Ok(()) => println!("map: matches"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}

//! One function per subcommand. Every handler builds its full output in
//! memory, echoes the resolved config to stderr, and hands the bytes to
//! `write_output`.

use std::collections::BTreeMap;

use aidlab_core::aid::{
    information_delta, reconstruct_time_order, row_impact_profile, Perturbation, ProfileMode,
};
use aidlab_core::bench::{
    class_stats, export_rows, load_class_table, load_rows_csv, run_benchmark_threaded,
    BenchConfig, InitialCondition, Measure, WolframClassTable,
};
use aidlab_core::bits::{parse_bits, render_pbm, BitGrid, BitString};
use aidlab_core::complexity::{bdm_grid, bdm_string, CtmEstimator, FallbackPolicy};
use aidlab_core::eca::{interact, lambda, rule_from_number, simplify, EcaRule};
use aidlab_core::io::{
    export_results, fmt_sig6, save_ctm_table, BdmSummaryRow, ExportFormat, ExportRecord, Field,
    LoadedTable, OrderRow, ProfileRow,
};
use aidlab_core::turing::{
    build_ctm_table_parallel, default_cutoff, merge_ctm_tables, sample_ctm_table, TmSpace,
};

use crate::support::{
    data, echo_config, load_block_table, load_grid, load_table, read_input, usage, write_output,
    Failure, InputObject, IntoData,
};
use crate::{
    AidCmd, BdmArgs, BenchCmd, BuildArgs, Cli, Command, CtmCmd, DeltaArgs, EcaCmd, EvolveArgs,
    Fallback, Format, Globals, Init, InteractArgs, LambdaArgs, MergeArgs, Mode, ProfileArgs,
    QueryArgs, RunArgs, SimplifyArgs, StatsArgs,
};

pub fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.globals;
    match cli.command {
        Command::Eca(EcaCmd::Evolve(a)) => eca_evolve(g, a),
        Command::Eca(EcaCmd::Simplify(a)) => eca_simplify(g, a),
        Command::Eca(EcaCmd::Lambda(a)) => eca_lambda(g, a),
        Command::Eca(EcaCmd::Interact(a)) => eca_interact(g, a),
        Command::Ctm(CtmCmd::Build(a)) => ctm_build(g, a),
        Command::Ctm(CtmCmd::Merge(a)) => ctm_merge(g, a),
        Command::Ctm(CtmCmd::Query(a)) => ctm_query(g, a),
        Command::Bdm(a) => bdm(g, a),
        Command::Aid(AidCmd::Delta(a)) => aid_delta(g, a),
        Command::Aid(AidCmd::Profile(a)) => aid_profile(g, a, false),
        Command::Aid(AidCmd::Order(a)) => aid_profile(g, a, true),
        Command::Bench(BenchCmd::Run(a)) => bench_run(g, a),
        Command::Bench(BenchCmd::Stats(a)) => bench_stats(g, a),
    }
}

impl From<Fallback> for FallbackPolicy {
    fn from(f: Fallback) -> Self {
        match f {
            Fallback::Error => FallbackPolicy::Error,
            Fallback::MaxPlusOne => FallbackPolicy::MaxPlusOne,
        }
    }
}

impl From<Init> for InitialCondition {
    fn from(i: Init) -> Self {
        match i {
            Init::Single => InitialCondition::SingleOne,
            Init::Random => InitialCondition::SeededRandom,
        }
    }
}

impl From<Mode> for ProfileMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FlipAll => ProfileMode::FlipAll,
            Mode::ReplaceRandom => ProfileMode::ReplaceRandom { seed: 0 },
        }
    }
}

/// csv unless json was asked for; pbm never fits tabular output.
fn tabular_format(g: &Globals) -> Result<ExportFormat, Failure> {
    match g.format {
        None | Some(Format::Csv) => Ok(ExportFormat::Csv),
        Some(Format::Json) => Ok(ExportFormat::Json),
        Some(Format::Pbm) => Err(usage("this command writes csv or json, not pbm")),
    }
}

fn format_name(f: ExportFormat) -> &'static str {
    match f {
        ExportFormat::Csv => "csv",
        ExportFormat::Json => "json",
    }
}

fn out_name(g: &Globals) -> String {
    g.output
        .as_deref()
        .map_or_else(|| "stdout".to_string(), |p| p.display().to_string())
}

fn initial_row(init: Init, width: usize, seed: u64) -> Result<BitString, Failure> {
    if width == 0 {
        return Err(usage("--width must be at least 1"));
    }
    let cfg =
        BenchConfig { width, steps: 0, seed, initial: init.into(), d: 1 };
    Ok(cfg.initial_row())
}

fn init_name(init: Init) -> &'static str {
    match init {
        Init::Single => "single",
        Init::Random => "random",
    }
}

fn grid_bytes(g: &Globals, grid: &BitGrid) -> Result<(Vec<u8>, &'static str), Failure> {
    match g.format {
        None | Some(Format::Pbm) => Ok((render_pbm(grid), "pbm")),
        Some(Format::Csv) => {
            let mut text = String::new();
            for r in 0..grid.rows() {
                let cells: Vec<String> =
                    (0..grid.cols()).map(|c| grid.get(r, c).to_string()).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            Ok((text.into_bytes(), "csv"))
        }
        Some(Format::Json) => Err(usage("grids are written as pbm or csv, not json")),
    }
}

fn eca_evolve(g: &Globals, a: EvolveArgs) -> Result<(), Failure> {
    let rule = rule_from_number(u32::from(a.rule)).or_data()?;
    let seed = g.seed.unwrap_or(0);
    let init = initial_row(a.init, a.width, seed)?;
    let grid = interact(&rule, &rule, &init, a.steps, 0).or_data()?;
    let (bytes, fmt) = grid_bytes(g, &grid)?;
    echo_config(
        "eca evolve",
        &[
            ("rule", a.rule.to_string()),
            ("width", a.width.to_string()),
            ("steps", a.steps.to_string()),
            ("init", init_name(a.init).to_string()),
            ("seed", seed.to_string()),
            ("format", fmt.to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn eca_interact(g: &Globals, a: InteractArgs) -> Result<(), Failure> {
    if a.split > a.width {
        return Err(usage("--split must not exceed --width"));
    }
    let rule_a = rule_from_number(u32::from(a.rule_a)).or_data()?;
    let rule_b = rule_from_number(u32::from(a.rule_b)).or_data()?;
    let seed = g.seed.unwrap_or(0);
    let init = initial_row(a.init, a.width, seed)?;
    let grid = interact(&rule_a, &rule_b, &init, a.steps, a.split).or_data()?;
    let (bytes, fmt) = grid_bytes(g, &grid)?;
    echo_config(
        "eca interact",
        &[
            ("rule_a", a.rule_a.to_string()),
            ("rule_b", a.rule_b.to_string()),
            ("split", a.split.to_string()),
            ("width", a.width.to_string()),
            ("steps", a.steps.to_string()),
            ("init", init_name(a.init).to_string()),
            ("seed", seed.to_string()),
            ("format", fmt.to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

struct SimplifyRow {
    rule: u8,
    icon_count: usize,
    specified_cells: usize,
    bits_upper_bound: f64,
    icons: String,
}

impl SimplifyRow {
    fn new(rule: &EcaRule) -> Self {
        let s = simplify(rule);
        let icons: Vec<String> = s.icons.iter().map(|i| i.to_string()).collect();
        SimplifyRow {
            rule: rule.number(),
            icon_count: s.icon_count,
            specified_cells: s.specified_cells,
            bits_upper_bound: s.bits_upper_bound,
            icons: icons.join("|"),
        }
    }
}

impl ExportRecord for SimplifyRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("rule", Field::UInt(u64::from(self.rule))),
            ("icon_count", Field::UInt(self.icon_count as u64)),
            ("specified_cells", Field::UInt(self.specified_cells as u64)),
            ("bits_upper_bound", Field::Float(self.bits_upper_bound)),
            ("icons", Field::Text(self.icons.clone())),
        ]
    }
}

fn eca_simplify(g: &Globals, a: SimplifyArgs) -> Result<(), Failure> {
    let fmt = tabular_format(g)?;
    let rules: Vec<u8> = match a.rule {
        Some(r) => vec![r],
        None => (0..=255).collect(),
    };
    let rows: Vec<SimplifyRow> = rules
        .iter()
        .map(|&r| Ok(SimplifyRow::new(&rule_from_number(u32::from(r)).or_data()?)))
        .collect::<Result<_, Failure>>()?;
    let mut bytes = Vec::new();
    export_results(&rows, fmt, &mut bytes).or_data()?;
    echo_config(
        "eca simplify",
        &[
            ("rules", if a.all { "all".to_string() } else { rules[0].to_string() }),
            ("format", format_name(fmt).to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

struct LambdaRow {
    rule: u8,
    lambda: f64,
}

impl ExportRecord for LambdaRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("rule", Field::UInt(u64::from(self.rule))),
            ("lambda", Field::Float(self.lambda)),
        ]
    }
}

fn eca_lambda(g: &Globals, _a: LambdaArgs) -> Result<(), Failure> {
    let rows: Vec<LambdaRow> = (0..=255u16)
        .map(|r| {
            let rule = rule_from_number(u32::from(r)).expect("0..=255 in range");
            LambdaRow { rule: r as u8, lambda: lambda(&rule) }
        })
        .collect();
    let fmt = tabular_format(g)?;
    let bytes = match fmt {
        // headerless: one line per rule
        ExportFormat::Csv => {
            let mut text = String::new();
            for row in &rows {
                text.push_str(&format!("{},{}\n", row.rule, fmt_sig6(row.lambda)));
            }
            text.into_bytes()
        }
        ExportFormat::Json => {
            let mut bytes = Vec::new();
            export_results(&rows, fmt, &mut bytes).or_data()?;
            bytes
        }
    };
    echo_config(
        "eca lambda",
        &[("format", format_name(fmt).to_string()), ("output", out_name(g))],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn ctm_build(g: &Globals, a: BuildArgs) -> Result<(), Failure> {
    let cutoff = match a.cutoff.or_else(|| default_cutoff(a.states)) {
        Some(c) => c,
        None => {
            return Err(usage(format!(
                "no certified step bound for states={}; pass --cutoff",
                a.states
            )))
        }
    };
    let space = TmSpace::new(a.states, cutoff).map_err(|e| usage(e.to_string()))?;
    let threads = g.threads();
    let seed = g.seed.unwrap_or(0);
    let table = match a.sample {
        Some(n) => sample_ctm_table(&space, n, seed).or_data()?,
        None => build_ctm_table_parallel(&space, a.range, threads).or_data()?,
    };
    let mut bytes = Vec::new();
    save_ctm_table(&table, &mut bytes).or_data()?;
    echo_config(
        "ctm build",
        &[
            ("states", a.states.to_string()),
            ("cutoff", cutoff.to_string()),
            (
                "range",
                a.range.map_or_else(|| "full".to_string(), |(lo, hi)| format!("{lo}..{hi}")),
            ),
            ("sample", a.sample.map_or_else(|| "no".to_string(), |n| n.to_string())),
            ("seed", seed.to_string()),
            ("threads", threads.to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn ctm_merge(g: &Globals, a: MergeArgs) -> Result<(), Failure> {
    let mut merged: Option<aidlab_core::turing::CtmTable> = None;
    for path in &a.files {
        let table = match load_table(path)? {
            LoadedTable::OneD(t) => t,
            LoadedTable::TwoD(_) => {
                return Err(data(anyhow::anyhow!(
                    "{} is a 2D table; merge handles 1D machine ranges",
                    path.display()
                )))
            }
        };
        merged = Some(match merged {
            None => table,
            Some(prev) => merge_ctm_tables(&prev, &table).or_data()?,
        });
    }
    let merged = merged.expect("clap requires at least one file");
    let mut bytes = Vec::new();
    save_ctm_table(&merged, &mut bytes).or_data()?;
    echo_config(
        "ctm merge",
        &[("files", a.files.len().to_string()), ("output", out_name(g))],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn ctm_query(g: &Globals, a: QueryArgs) -> Result<(), Failure> {
    let table = match load_table(&a.table)? {
        LoadedTable::OneD(t) => t,
        LoadedTable::TwoD(_) => {
            return Err(data(anyhow::anyhow!("query takes a 1D table and a bit string")))
        }
    };
    let est = CtmEstimator::new(
        aidlab_core::complexity::BlockTable::OneD(table),
        FallbackPolicy::Error,
    )
    .or_data()?;
    let bits = parse_bits(&a.string).or_data()?;
    let value = est.ctm_value(&bits).or_data()?;
    echo_config(
        "ctm query",
        &[
            ("table", a.table.display().to_string()),
            ("string", a.string.clone()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), format!("{}\n", fmt_sig6(value)).as_bytes())
}

fn bdm(g: &Globals, a: BdmArgs) -> Result<(), Failure> {
    if a.d == 0 {
        return Err(usage("--d must be at least 1"));
    }
    let fmt = tabular_format(g)?;
    let est = CtmEstimator::new(load_block_table(&a.table)?, a.fallback.into()).or_data()?;
    let report = match read_input(&a.input)? {
        InputObject::Str(s) => bdm_string(&est, &s, a.d).or_data()?,
        InputObject::Grid(grid) => bdm_grid(&est, &grid, a.d).or_data()?,
    };
    let row = BdmSummaryRow::from(&report);
    let mut bytes = Vec::new();
    export_results(&[row], fmt, &mut bytes).or_data()?;
    echo_config(
        "bdm",
        &[
            ("table", a.table.display().to_string()),
            ("d", a.d.to_string()),
            ("fallback", report.fallback_policy.to_string()),
            ("row_flatten", report.row_flatten.to_string()),
            ("format", format_name(fmt).to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn aid_delta(g: &Globals, a: DeltaArgs) -> Result<(), Failure> {
    if a.d == 0 {
        return Err(usage("--d must be at least 1"));
    }
    let fmt = tabular_format(g)?;
    let perturbation = if !a.flips.is_empty() {
        Perturbation::BitFlip { cells: a.flips.clone() }
    } else if let (Some(row), Some(bits)) = (a.replace_row, a.row.as_deref()) {
        Perturbation::RowReplace { row, replacement: parse_bits(bits).or_data()? }
    } else {
        return Err(usage("pass --flip row,col (repeatable) or --replace-row N --row BITS"));
    };
    let est = CtmEstimator::new(load_block_table(&a.table)?, a.fallback.into()).or_data()?;
    let grid = load_grid(&a.grid)?;
    let report = information_delta(&est, &grid, &perturbation, a.d).or_data()?;
    let mut bytes = Vec::new();
    export_results(std::slice::from_ref(&report), fmt, &mut bytes).or_data()?;
    echo_config(
        "aid delta",
        &[
            ("table", a.table.display().to_string()),
            ("grid", a.grid.display().to_string()),
            ("d", a.d.to_string()),
            ("classification", report.classification.to_string()),
            ("format", format_name(fmt).to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn aid_profile(g: &Globals, a: ProfileArgs, order: bool) -> Result<(), Failure> {
    if a.d == 0 {
        return Err(usage("--d must be at least 1"));
    }
    let fmt = tabular_format(g)?;
    let seed = g.seed.unwrap_or(0);
    let mode = match a.mode {
        Mode::FlipAll => ProfileMode::FlipAll,
        Mode::ReplaceRandom => ProfileMode::ReplaceRandom { seed },
    };
    let est = CtmEstimator::new(load_block_table(&a.table)?, a.fallback.into()).or_data()?;
    let grid = load_grid(&a.grid)?;
    let mut bytes = Vec::new();
    if order {
        let perm = reconstruct_time_order(&est, &grid, a.d, mode).or_data()?;
        let rows: Vec<OrderRow> = perm
            .iter()
            .enumerate()
            .map(|(position, &row)| OrderRow { position: position as u64, row: row as u64 })
            .collect();
        export_results(&rows, fmt, &mut bytes).or_data()?;
    } else {
        let impacts = row_impact_profile(&est, &grid, a.d, mode).or_data()?;
        let rows: Vec<ProfileRow> = impacts
            .iter()
            .enumerate()
            .map(|(row, &impact)| ProfileRow { row: row as u64, impact })
            .collect();
        export_results(&rows, fmt, &mut bytes).or_data()?;
    }
    echo_config(
        if order { "aid order" } else { "aid profile" },
        &[
            ("table", a.table.display().to_string()),
            ("grid", a.grid.display().to_string()),
            ("d", a.d.to_string()),
            ("mode", if a.mode == Mode::FlipAll { "flip-all" } else { "replace-random" }.into()),
            ("seed", seed.to_string()),
            ("format", format_name(fmt).to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

fn bench_run(g: &Globals, a: RunArgs) -> Result<(), Failure> {
    if a.d == 0 {
        return Err(usage("--d must be at least 1"));
    }
    let fmt = tabular_format(g)?;
    let est = CtmEstimator::new(load_block_table(&a.table)?, a.fallback.into()).or_data()?;
    let classes = match &a.classes {
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| data(anyhow::anyhow!("opening {}: {e}", path.display())))?;
            load_class_table(std::io::BufReader::new(file)).or_data()?
        }
        None => WolframClassTable::builtin(),
    };
    // seed 7 is the recorded reference config
    let seed = g.seed.unwrap_or(7);
    let threads = g.threads();
    let cfg = BenchConfig {
        width: a.width,
        steps: a.steps,
        seed,
        initial: a.init.into(),
        d: a.d,
    };
    let rows = run_benchmark_threaded(&cfg, &est, &classes, threads).or_data()?;
    let export = export_rows(&rows).or_data()?;
    let mut bytes = Vec::new();
    export_results(&export, fmt, &mut bytes).or_data()?;
    echo_config(
        "bench run",
        &[
            ("table", a.table.display().to_string()),
            ("classes", a.classes.as_ref().map_or("builtin".into(), |p| p.display().to_string())),
            ("width", a.width.to_string()),
            ("steps", a.steps.to_string()),
            ("init", init_name(a.init).to_string()),
            ("seed", seed.to_string()),
            ("d", a.d.to_string()),
            ("threads", threads.to_string()),
            ("format", format_name(fmt).to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

struct ClassStatsRow {
    class: u8,
    count: usize,
    mean: f64,
    min: f64,
    max: f64,
    overlaps_with: String,
}

impl ExportRecord for ClassStatsRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("class", Field::UInt(u64::from(self.class))),
            ("count", Field::UInt(self.count as u64)),
            ("mean", Field::Float(self.mean)),
            ("min", Field::Float(self.min)),
            ("max", Field::Float(self.max)),
            ("overlaps_with", Field::Text(self.overlaps_with.clone())),
        ]
    }
}

fn bench_stats(g: &Globals, a: StatsArgs) -> Result<(), Failure> {
    let fmt = tabular_format(g)?;
    let measure: Measure = a.measure.parse().map_err(|e: aidlab_core::bench::BenchError| {
        usage(e.to_string())
    })?;
    let file = std::fs::File::open(&a.input)
        .map_err(|e| data(anyhow::anyhow!("opening {}: {e}", a.input.display())))?;
    let rows = load_rows_csv(std::io::BufReader::new(file)).or_data()?;
    let stats = class_stats(&rows, measure).or_data()?;
    let mut overlapping: BTreeMap<u8, Vec<u8>> = BTreeMap::new();
    for ((a, b), hit) in &stats.overlaps {
        if *hit {
            overlapping.entry(*a).or_default().push(*b);
            overlapping.entry(*b).or_default().push(*a);
        }
    }
    let out: Vec<ClassStatsRow> = stats
        .per_class
        .iter()
        .map(|s| ClassStatsRow {
            class: s.class,
            count: s.count,
            mean: s.mean,
            min: s.min,
            max: s.max,
            overlaps_with: overlapping
                .get(&s.class)
                .map(|v| {
                    v.iter().map(u8::to_string).collect::<Vec<_>>().join(";")
                })
                .unwrap_or_default(),
        })
        .collect();
    let mut bytes = Vec::new();
    export_results(&out, fmt, &mut bytes).or_data()?;
    echo_config(
        "bench stats",
        &[
            ("input", a.input.display().to_string()),
            ("measure", measure.name().to_string()),
            ("format", format_name(fmt).to_string()),
            ("output", out_name(g)),
        ],
    );
    write_output(g.output.as_deref(), &bytes)
}

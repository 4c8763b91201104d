#include "vpforest/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vpforest/csv.hpp"
#include "vpforest/sweep.hpp"

namespace vpforest {

namespace {

struct RunArgs {
    std::string dataset;
    bool synthetic = false;
    int classes = 10;
    int features = 12;
    std::size_t samples = 20000;
    double separation = 6.0;
    std::string schema = "raw";
    std::size_t window = 50;
    std::vector<int> trees = {5};
    std::vector<double> memory_mb = {0.6};
    std::vector<std::string> modes = {"uninstrumented"};
    std::vector<int> p = {52};
    std::vector<int> e = {11};
    int orderings = 7;
    std::uint64_t seed = 0;
    std::uint64_t report_interval = 50;
    std::string f1 = "macro";
    bool include_class0 = true;
    bool normalize = false;
    std::string out = "report.csv";
    int jobs = 1;
};

struct CompareArgs {
    std::string baseline;
    std::string reduced;
    std::string out = "compare.csv";
};

// Flag units are decimal megabytes (1 MB = 10^6 bytes).
std::size_t mb_to_bytes(double mb) {
    const double bytes = mb * 1e6;
    if (!(bytes >= 1.0) || bytes > 1e15) {
        throw Error("memory budget must be between 1e-6 and 1e9 MB, got " +
                    std::to_string(mb));
    }
    return static_cast<std::size_t>(std::llround(bytes));
}

std::vector<StreamSample> load_stream(const RunArgs& args) {
    if (args.synthetic) {
        return synthesize(args.classes, args.features, args.samples, args.seed,
                          args.separation);
    }
    std::ifstream in(args.dataset, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dataset '" + args.dataset + "'");
    }
    if (args.schema == "raw") {
        return featurize_windows(read_raw_csv(in), args.window);
    }
    return read_featurized_csv(in);
}

int run_command(const RunArgs& args) {
    std::vector<StreamSample> stream = load_stream(args);
    if (args.normalize) {
        normalize_minmax(stream);
    }

    SweepSpec spec;
    spec.trees_grid = args.trees;
    spec.memory_grid.clear();
    for (double mb : args.memory_mb) {
        spec.memory_grid.push_back(mb_to_bytes(mb));
    }
    spec.mode_grid.clear();
    for (const std::string& mode : args.modes) {
        spec.mode_grid.push_back(parse_mode(mode));
    }
    spec.p_grid = args.p;
    spec.e_grid = args.e;
    spec.orderings = args.orderings;
    spec.base_seed = args.seed;
    spec.report_interval = args.report_interval;
    spec.average = args.f1 == "micro" ? F1Average::Micro : F1Average::Macro;
    spec.include_class0 = args.include_class0;
    spec.jobs = args.jobs;

    const int n_classes = count_classes(stream);
    const int n_features = static_cast<int>(stream.front().features.size());
    const std::vector<SweepRow> rows = run_sweep(spec, stream, n_classes, n_features);
    write_report_csv(args.out, rows);

    std::size_t overflow_cells = 0;
    for (const SweepRow& row : rows) {
        overflow_cells += row.status == "overflow";
    }
    std::fprintf(stderr, "wrote %zu rows (%zu overflow cells) to %s\n", rows.size(),
                 overflow_cells, args.out.c_str());
    return 0;
}

int compare_command(const CompareArgs& args) {
    const std::vector<SweepRow> baseline = read_report_csv(args.baseline);
    const std::vector<SweepRow> reduced = read_report_csv(args.reduced);
    const std::vector<CompareRow> rows = compare_reports(baseline, reduced);
    write_compare_csv(args.out, rows);
    std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), args.out.c_str());
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Mondrian forest stream classifier under emulated reduced precision"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand(
        "run", "Run a prequential experiment sweep and write a report CSV");
    CLI::Option* dataset_opt =
        run->add_option("--dataset", run_args.dataset, "Input CSV (see --schema)");
    CLI::Option* synthetic_opt = run->add_flag(
        "--synthetic", run_args.synthetic, "Generate a Gaussian-blob stream instead");
    dataset_opt->excludes(synthetic_opt);
    synthetic_opt->excludes(dataset_opt);
    run->add_option("--classes", run_args.classes, "Synthetic class count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--features", run_args.features, "Synthetic feature count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--samples", run_args.samples, "Synthetic stream length")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--separation", run_args.separation,
                    "Synthetic class-mean separation in feature units")
        ->capture_default_str();
    run->add_option("--schema", run_args.schema, "Dataset layout: raw rows or featurized")
        ->check(CLI::IsMember({"raw", "featurized"}))
        ->capture_default_str();
    run->add_option("--window", run_args.window, "Rows per feature window (raw schema)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--trees", run_args.trees, "Forest sizes to sweep")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--memory-mb", run_args.memory_mb,
                    "Memory budgets to sweep, decimal MB (1 MB = 10^6 bytes)")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--mode", run_args.modes,
                    "Instrumentation modes: uninstrumented, node, whole")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--p", run_args.p, "Mantissa widths to sweep (1..52)")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--e", run_args.e, "Exponent widths to sweep (2..11)")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--orderings", run_args.orderings, "Stream permutations per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--seed", run_args.seed, "Base seed for all derived streams and forests")
        ->capture_default_str();
    run->add_option("--report-interval", run_args.report_interval,
                    "Samples between checkpoints")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--f1", run_args.f1, "F1 averaging")
        ->check(CLI::IsMember({"macro", "micro"}))
        ->capture_default_str();
    run->add_option("--include-class0", run_args.include_class0,
                    "Score class 0 like any other class")
        ->capture_default_str();
    run->add_flag("--normalize", run_args.normalize,
                  "Min-max rescale every feature onto [-1, 1] before running");
    run->add_option("--out", run_args.out, "Report CSV path")->capture_default_str();
    run->add_option("--jobs", run_args.jobs, "Concurrent cells")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand(
        "compare", "Join two report CSVs and write per-cell F1 deltas");
    compare->add_option("baseline", compare_args.baseline, "Baseline report CSV")
        ->required();
    compare->add_option("reduced", compare_args.reduced, "Reduced-precision report CSV")
        ->required();
    compare->add_option("--out", compare_args.out, "Delta CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(run)) {
            if (!run_args.synthetic && run_args.dataset.empty()) {
                std::fprintf(stderr, "error: pass either --dataset PATH or --synthetic\n");
                return 2;
            }
            return run_command(run_args);
        }
        return compare_command(compare_args);
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace vpforest

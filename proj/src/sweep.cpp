#include "vpforest/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "vpforest/csv.hpp"
#include "vpforest/rng.hpp"

namespace vpforest {

namespace {

constexpr std::uint64_t kOrderingTag = 0x4f52444552ull;  // "ORDER"

const char* kReportHeader =
    "run_id,instrumentation,p,e,trees,memory_bytes,seed,ordering,elements_seen,f1,status";
const char* kCompareHeader =
    "run_id,instrumentation,p,e,trees,memory_bytes,seed,ordering,elements_seen,f1,delta_f1,"
    "pct_change";

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

std::string mode_name(InstrumentationMode mode) {
    switch (mode) {
        case InstrumentationMode::Uninstrumented: return "uninstrumented";
        case InstrumentationMode::NodeBounds: return "node";
        case InstrumentationMode::Whole: return "whole";
    }
    throw Error("unknown instrumentation mode");
}

InstrumentationMode parse_mode(const std::string& name) {
    if (name == "uninstrumented") return InstrumentationMode::Uninstrumented;
    if (name == "node") return InstrumentationMode::NodeBounds;
    if (name == "whole") return InstrumentationMode::Whole;
    throw Error("unknown mode '" + name + "' (expected uninstrumented, node or whole)");
}

std::vector<SweepCell> expand_grid(const SweepSpec& spec) {
    if (spec.trees_grid.empty() || spec.memory_grid.empty() || spec.mode_grid.empty() ||
        spec.p_grid.empty() || spec.e_grid.empty()) {
        throw Error("sweep grid must be non-empty on every axis");
    }
    if (spec.orderings < 1) {
        throw Error("orderings must be at least 1");
    }
    const auto trees_grid = sorted_unique(spec.trees_grid);
    const auto memory_grid = sorted_unique(spec.memory_grid);
    const auto p_grid = sorted_unique(spec.p_grid);
    const auto e_grid = sorted_unique(spec.e_grid);
    auto mode_grid = sorted_unique(spec.mode_grid);
    for (int p : p_grid) {
        for (int e : e_grid) {
            make_format(p, e);  // validates ranges, throws Error
        }
    }

    std::vector<SweepCell> cells;
    for (InstrumentationMode mode : mode_grid) {
        // The baseline has no emulated format; report the working one.
        const std::vector<int> ps =
            mode == InstrumentationMode::Uninstrumented ? std::vector<int>{52} : p_grid;
        const std::vector<int> es =
            mode == InstrumentationMode::Uninstrumented ? std::vector<int>{11} : e_grid;
        for (int p : ps) {
            for (int e : es) {
                for (int trees : trees_grid) {
                    for (std::size_t memory : memory_grid) {
                        for (int ordering = 0; ordering < spec.orderings; ++ordering) {
                            SweepCell cell;
                            cell.mode = mode;
                            cell.p = p;
                            cell.e = e;
                            cell.trees = trees;
                            cell.memory_bytes = memory;
                            cell.ordering = ordering;
                            cell.forest_seed = mix_seed(
                                {spec.base_seed, static_cast<std::uint64_t>(trees),
                                 static_cast<std::uint64_t>(memory),
                                 static_cast<std::uint64_t>(ordering)});
                            cell.ordering_seed =
                                mix_seed({spec.base_seed, kOrderingTag,
                                          static_cast<std::uint64_t>(ordering)});
                            cell.expected_overflow =
                                mode == InstrumentationMode::Whole && e == 2;
                            cells.push_back(std::move(cell));
                        }
                    }
                }
            }
        }
    }
    return cells;
}

std::string run_id_for(const SweepCell& cell) {
    return mode_name(cell.mode) + "-p" + std::to_string(cell.p) + "-e" + std::to_string(cell.e) +
           "-t" + std::to_string(cell.trees) + "-m" + std::to_string(cell.memory_bytes) + "-o" +
           std::to_string(cell.ordering);
}

std::vector<SweepRow> run_cell(const SweepCell& cell, const std::vector<StreamSample>& ordered,
                               int n_classes, int n_features, const SweepSpec& spec) {
    SweepRow base;
    base.run_id = run_id_for(cell);
    base.instrumentation = mode_name(cell.mode);
    base.p = cell.p;
    base.e = cell.e;
    base.trees = cell.trees;
    base.memory_bytes = cell.memory_bytes;
    base.seed = cell.forest_seed;
    base.ordering = cell.ordering;

    ForestConfig cfg;
    cfg.n_trees = cell.trees;
    cfg.memory_bytes = cell.memory_bytes;
    apply_default_hyperparams(cfg);
    cfg.n_features = n_features;
    cfg.n_classes = n_classes;
    cfg.seed = cell.forest_seed;
    cfg.mode = cell.mode;
    cfg.fmt = make_format(cell.p, cell.e);

    std::vector<SweepRow> rows;
    PrequentialReport report;
    try {
        MondrianForest forest(cfg);
        report = prequential_run(forest, ordered, spec.report_interval, spec.average,
                                 spec.include_class0);
    } catch (const NonFiniteError&) {
        // Construction-time overflow (hyperparameters unrepresentable): the
        // cell produced no checkpoints at all.
        SweepRow row = base;
        row.elements_seen = 0;
        row.f1 = std::numeric_limits<double>::quiet_NaN();
        row.status = "overflow";
        rows.push_back(std::move(row));
        return rows;
    }

    for (const Checkpoint& c : report.checkpoints) {
        SweepRow row = base;
        row.elements_seen = c.elements_seen;
        row.f1 = c.f1;
        row.status = "ok";
        rows.push_back(std::move(row));
    }
    if (report.status == RunStatus::Overflow) {
        SweepRow row = base;
        row.elements_seen = report.failed_at;
        row.f1 = std::numeric_limits<double>::quiet_NaN();
        row.status = "overflow";
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<StreamSample>& base,
                                int n_classes, int n_features) {
    const std::vector<SweepCell> cells = expand_grid(spec);
    if (base.empty()) {
        throw EmptyStreamError("sweep needs a non-empty stream");
    }

    // One permutation per ordering index, shared by every cell using it.
    std::vector<std::vector<StreamSample>> ordered;
    ordered.reserve(static_cast<std::size_t>(spec.orderings));
    for (int k = 0; k < spec.orderings; ++k) {
        ordered.push_back(shuffle_stream(
            base, mix_seed({spec.base_seed, kOrderingTag, static_cast<std::uint64_t>(k)})));
    }

    std::vector<std::vector<SweepRow>> per_cell(cells.size());
    std::vector<std::exception_ptr> failures(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) {
                return;
            }
            try {
                per_cell[i] =
                    run_cell(cells[i], ordered[static_cast<std::size_t>(cells[i].ordering)],
                             n_classes, n_features, spec);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    for (const std::exception_ptr& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Cells were expanded in canonical order; flattening preserves it, so
    // the output is independent of the job count.
    std::vector<SweepRow> rows;
    for (std::vector<SweepRow>& cell_rows : per_cell) {
        for (SweepRow& row : cell_rows) {
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_report_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << kReportHeader << '\n';
    for (const SweepRow& r : rows) {
        out << r.run_id << ',' << r.instrumentation << ',' << std::to_string(r.p) << ','
            << std::to_string(r.e) << ',' << std::to_string(r.trees) << ','
            << std::to_string(r.memory_bytes) << ',' << std::to_string(r.seed) << ','
            << std::to_string(r.ordering) << ',' << std::to_string(r.elements_seen) << ','
            << format_double(r.f1) << ',' << r.status << '\n';
    }
    if (!out) {
        throw IoError("writing '" + path + "' failed");
    }
}

std::vector<SweepRow> read_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("missing header row", 1);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kReportHeader) {
        throw SchemaError("expected report header '" + std::string(kReportHeader) + "'", 1);
    }
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 11) {
            throw SchemaError("expected 11 fields, got " + std::to_string(f.size()), line_no);
        }
        SweepRow row;
        row.run_id = f[0];
        row.instrumentation = f[1];
        row.p = static_cast<int>(parse_int(f[2], line_no));
        row.e = static_cast<int>(parse_int(f[3], line_no));
        row.trees = static_cast<int>(parse_int(f[4], line_no));
        row.memory_bytes = static_cast<std::size_t>(parse_uint64(f[5], line_no));
        row.seed = parse_uint64(f[6], line_no);
        row.ordering = static_cast<int>(parse_int(f[7], line_no));
        row.elements_seen = parse_uint64(f[8], line_no);
        row.f1 = parse_double(f[9], line_no);
        row.status = f[10];
        if (row.status != "ok" && row.status != "overflow") {
            throw SchemaError("unknown status '" + row.status + "'", line_no);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Final state of one run: its last ok checkpoint, or overflow.
struct FinalCell {
    SweepRow last_ok;
    bool has_ok = false;
    bool overflowed = false;
};

std::map<std::string, FinalCell> finals_by_run(const std::vector<SweepRow>& rows) {
    std::map<std::string, FinalCell> finals;
    for (const SweepRow& row : rows) {
        FinalCell& cell = finals[row.run_id];
        if (row.status == "overflow") {
            cell.overflowed = true;
        } else if (!cell.has_ok || row.elements_seen > cell.last_ok.elements_seen) {
            cell.last_ok = row;
            cell.has_ok = true;
        }
    }
    return finals;
}

std::string describe_key(int trees, int ordering) {
    return "trees=" + std::to_string(trees) + " ordering=" + std::to_string(ordering);
}

}  // namespace

std::vector<CompareRow> compare_reports(const std::vector<SweepRow>& baseline,
                                        const std::vector<SweepRow>& reduced) {
    const auto baseline_finals = finals_by_run(baseline);
    const auto reduced_finals = finals_by_run(reduced);
    if (baseline_finals.empty()) {
        throw GridMismatchError("baseline report is empty");
    }
    if (reduced_finals.empty()) {
        throw GridMismatchError("reduced report is empty");
    }

    // Baseline cells indexed by (trees, ordering); the memory axis joins the
    // key only when one (trees, ordering) slot holds several baseline cells.
    std::map<std::pair<int, int>, std::vector<const FinalCell*>> by_key;
    for (const auto& entry : baseline_finals) {
        const FinalCell& cell = entry.second;
        if (!cell.has_ok) {
            continue;  // an overflowed baseline surfaces as a missing cell below
        }
        by_key[{cell.last_ok.trees, cell.last_ok.ordering}].push_back(&cell);
    }

    std::vector<CompareRow> out;
    for (const auto& entry : reduced_finals) {
        const FinalCell& cell = entry.second;
        if (!cell.has_ok) {
            continue;  // an overflowed reduced cell has no final F1 to compare
        }
        const SweepRow& r = cell.last_ok;
        const auto key_it = by_key.find({r.trees, r.ordering});
        if (key_it == by_key.end()) {
            throw GridMismatchError("no baseline cell for " +
                                    describe_key(r.trees, r.ordering) + " (needed by " +
                                    r.run_id + ")");
        }
        const FinalCell* partner = nullptr;
        if (key_it->second.size() == 1) {
            partner = key_it->second.front();
        } else {
            for (const FinalCell* candidate : key_it->second) {
                if (candidate->last_ok.memory_bytes == r.memory_bytes) {
                    if (partner != nullptr) {
                        throw GridMismatchError("ambiguous baseline for " + r.run_id);
                    }
                    partner = candidate;
                }
            }
            if (partner == nullptr) {
                throw GridMismatchError("no baseline cell for " +
                                        describe_key(r.trees, r.ordering) + " memory_bytes=" +
                                        std::to_string(r.memory_bytes) + " (needed by " +
                                        r.run_id + ")");
            }
        }

        CompareRow row;
        row.run_id = r.run_id;
        row.instrumentation = r.instrumentation;
        row.p = r.p;
        row.e = r.e;
        row.trees = r.trees;
        row.memory_bytes = r.memory_bytes;
        row.seed = r.seed;
        row.ordering = std::to_string(r.ordering);
        row.elements_seen = r.elements_seen;
        row.f1 = r.f1;
        row.delta_f1 = r.f1 - partner->last_ok.f1;
        row.pct_change = partner->last_ok.f1 != 0.0
                             ? 100.0 * row.delta_f1 / partner->last_ok.f1
                             : std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(row));
    }

    // Canonical order, then per-group mean/std rows across orderings.
    auto group_key = [](const CompareRow& row) {
        return std::tuple(row.instrumentation, row.p, row.e, row.trees, row.memory_bytes);
    };
    std::sort(out.begin(), out.end(), [&](const CompareRow& a, const CompareRow& b) {
        const auto ka = group_key(a);
        const auto kb = group_key(b);
        if (ka != kb) {
            return ka < kb;
        }
        return std::stoi(a.ordering) < std::stoi(b.ordering);
    });

    std::vector<CompareRow> with_summaries;
    for (std::size_t i = 0; i < out.size();) {
        std::size_t j = i;
        while (j < out.size() && group_key(out[j]) == group_key(out[i])) {
            ++j;
        }
        double mean_f1 = 0.0;
        double mean_delta = 0.0;
        double mean_pct = 0.0;
        const double n = static_cast<double>(j - i);
        for (std::size_t k = i; k < j; ++k) {
            mean_f1 += out[k].f1;
            mean_delta += out[k].delta_f1;
            mean_pct += out[k].pct_change;
        }
        mean_f1 /= n;
        mean_delta /= n;
        mean_pct /= n;
        double var_f1 = 0.0;
        double var_delta = 0.0;
        double var_pct = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            var_f1 += (out[k].f1 - mean_f1) * (out[k].f1 - mean_f1);
            var_delta += (out[k].delta_f1 - mean_delta) * (out[k].delta_f1 - mean_delta);
            var_pct += (out[k].pct_change - mean_pct) * (out[k].pct_change - mean_pct);
        }

        for (std::size_t k = i; k < j; ++k) {
            with_summaries.push_back(out[k]);
        }
        CompareRow summary = out[i];
        summary.run_id = summary.instrumentation + "-p" + std::to_string(summary.p) + "-e" +
                         std::to_string(summary.e) + "-t" + std::to_string(summary.trees) +
                         "-m" + std::to_string(summary.memory_bytes);
        summary.seed = 0;
        summary.ordering = "mean";
        summary.f1 = mean_f1;
        summary.delta_f1 = mean_delta;
        summary.pct_change = mean_pct;
        with_summaries.push_back(summary);
        summary.ordering = "std";
        summary.f1 = std::sqrt(var_f1 / n);
        summary.delta_f1 = std::sqrt(var_delta / n);
        summary.pct_change = std::sqrt(var_pct / n);
        with_summaries.push_back(summary);
        i = j;
    }
    return with_summaries;
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << kCompareHeader << '\n';
    for (const CompareRow& r : rows) {
        out << r.run_id << ',' << r.instrumentation << ',' << std::to_string(r.p) << ','
            << std::to_string(r.e) << ',' << std::to_string(r.trees) << ','
            << std::to_string(r.memory_bytes) << ',' << std::to_string(r.seed) << ','
            << r.ordering << ',' << std::to_string(r.elements_seen) << ',' << format_double(r.f1)
            << ',' << format_double(r.delta_f1) << ',' << format_double(r.pct_change) << '\n';
    }
    if (!out) {
        throw IoError("writing '" + path + "' failed");
    }
}

}  // namespace vpforest

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vpforest/eval.hpp"
#include "vpforest/forest.hpp"
#include "vpforest/stream.hpp"

namespace vpforest {

/// Canonical text for a mode, used in flags, run ids and report rows.
std::string mode_name(InstrumentationMode mode);
InstrumentationMode parse_mode(const std::string& name);  // throws Error

/// Grid of experiment cells. Every axis is sorted and deduplicated before
/// expansion, so flag order never changes the output.
struct SweepSpec {
    std::vector<int> trees_grid = {5};
    std::vector<std::size_t> memory_grid = {600000};
    std::vector<InstrumentationMode> mode_grid = {InstrumentationMode::Uninstrumented};
    std::vector<int> p_grid = {52};
    std::vector<int> e_grid = {11};
    int orderings = 7;
    std::uint64_t base_seed = 0;
    std::uint64_t report_interval = 50;
    F1Average average = F1Average::Macro;
    bool include_class0 = true;
    int jobs = 1;
};

/// One cell: a forest configuration run against one stream ordering.
/// forest_seed deliberately ignores mode/p/e, so runs that differ only in
/// instrumentation share their random decisions and stay comparable.
struct SweepCell {
    InstrumentationMode mode = InstrumentationMode::Uninstrumented;
    int p = 52;
    int e = 11;
    int trees = 5;
    std::size_t memory_bytes = 600000;
    int ordering = 0;
    std::uint64_t forest_seed = 0;
    std::uint64_t ordering_seed = 0;
    bool expected_overflow = false;  // whole-program instrumentation at e=2
};

/// Expands the grid in canonical order (mode, p, e, trees, memory, ordering).
/// Uninstrumented cells do not multiply over p/e; they always report the
/// working format (52, 11). Throws Error on an empty axis or a bad format.
std::vector<SweepCell> expand_grid(const SweepSpec& spec);

/// One report CSV row: a checkpoint of one cell, or its terminal overflow
/// marker (f1 = NaN, elements_seen = the failing element).
struct SweepRow {
    std::string run_id;
    std::string instrumentation;
    int p = 52;
    int e = 11;
    int trees = 0;
    std::size_t memory_bytes = 0;
    std::uint64_t seed = 0;
    int ordering = 0;
    std::uint64_t elements_seen = 0;
    double f1 = 0.0;
    std::string status;  // "ok" | "overflow"
};

std::string run_id_for(const SweepCell& cell);

/// Runs one cell against its already-permuted stream.
std::vector<SweepRow> run_cell(const SweepCell& cell, const std::vector<StreamSample>& ordered,
                               int n_classes, int n_features, const SweepSpec& spec);

/// Runs every cell of the grid, up to spec.jobs at a time. Output rows are
/// in canonical cell order regardless of parallelism.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<StreamSample>& base,
                                int n_classes, int n_features);

void write_report_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_report_csv(const std::string& path);

/// One compare CSV row: the reduced cell's final checkpoint joined against
/// its baseline partner, plus per-group mean/std rows (ordering column holds
/// "mean" or "std" for those).
struct CompareRow {
    std::string run_id;
    std::string instrumentation;
    int p = 52;
    int e = 11;
    int trees = 0;
    std::size_t memory_bytes = 0;
    std::uint64_t seed = 0;
    std::string ordering;  // ordering index, or "mean"/"std" on summary rows
    std::uint64_t elements_seen = 0;
    double f1 = 0.0;       // reduced final F1
    double delta_f1 = 0.0; // reduced - baseline
    double pct_change = 0.0;
};

/// Joins reduced cells to baseline cells on (trees, ordering), extending the
/// key with memory_bytes only when the baseline is ambiguous without it (so
/// a single-budget baseline supports cross-budget comparisons). Overflowed
/// reduced cells are skipped; a missing or overflowed baseline cell throws
/// GridMismatchError naming the cell.
std::vector<CompareRow> compare_reports(const std::vector<SweepRow>& baseline,
                                        const std::vector<SweepRow>& reduced);

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);

}  // namespace vpforest

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vpforest/forest.hpp"
#include "vpforest/stream.hpp"

namespace vpforest {

/// Cumulative confusion counts; rows are true labels, columns predictions.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int n_classes);

    void record(int true_label, int predicted_label);
    std::uint64_t total() const { return total_; }
    std::uint64_t at(int true_label, int predicted_label) const;
    int n_classes() const { return n_classes_; }

private:
    int n_classes_;
    std::vector<std::uint64_t> counts_;  // row-major n_classes x n_classes
    std::uint64_t total_ = 0;
};

enum class F1Average : std::uint8_t { Macro, Micro };

/// Macro F1: per-class F1 (0 whenever its denominator is 0), averaged over
/// the classes that have appeared as true labels; `include_class0 = false`
/// additionally drops class 0 from the average. Throws EmptyMatrix on an
/// empty matrix or when no class survives the filter.
double macro_f1(const ConfusionMatrix& cm, bool include_class0 = true);

/// Micro F1: correct predictions over total (with class-0 rows dropped
/// entirely when excluded).
double micro_f1(const ConfusionMatrix& cm, bool include_class0 = true);

double f1_score(const ConfusionMatrix& cm, F1Average average, bool include_class0 = true);

struct Checkpoint {
    std::uint64_t elements_seen = 0;
    double f1 = 0.0;
};

enum class RunStatus : std::uint8_t { Ok, Overflow };

/// Outcome of one prequential pass: the cumulative F1 curve, the echo of
/// the forest configuration it ran under, and how the run ended. A run that
/// dies on a rounding-produced non-finite value reports Overflow with the
/// failing element and the error text instead of crashing.
struct PrequentialReport {
    std::vector<Checkpoint> checkpoints;
    double final_f1 = 0.0;
    ForestConfig config;
    std::uint64_t ordering = 0;
    RunStatus status = RunStatus::Ok;
    std::uint64_t failed_at = 0;  // elements_seen when status == Overflow
    std::string error;
};

/// Test-then-train pass over the stream: each sample is predicted, scored
/// into the cumulative confusion matrix, then learned. A checkpoint is
/// appended every `report_interval` samples and at the stream end.
PrequentialReport prequential_run(MondrianForest& forest,
                                  const std::vector<StreamSample>& stream,
                                  std::size_t report_interval = 50,
                                  F1Average average = F1Average::Macro,
                                  bool include_class0 = true);

/// Pointwise F1 difference (reduced minus baseline) at matching checkpoints;
/// negative values mean the reduced-precision run did worse.
std::vector<std::pair<std::uint64_t, double>> delta_f1(const PrequentialReport& reduced,
                                                       const PrequentialReport& baseline);

struct AggregateCurve {
    std::vector<std::uint64_t> elements_seen;
    std::vector<double> mean;
    std::vector<double> stddev;  // population std across reports
};

/// Pointwise mean and population standard deviation of F1 across runs of
/// the same stream under different orderings. Needs at least 2 reports on
/// one checkpoint grid.
AggregateCurve aggregate_orderings(const std::vector<PrequentialReport>& reports);

}  // namespace vpforest

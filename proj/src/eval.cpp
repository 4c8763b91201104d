#include "vpforest/eval.hpp"

#include <cmath>

namespace vpforest {

ConfusionMatrix::ConfusionMatrix(int n_classes) : n_classes_(n_classes) {
    if (n_classes < 1) {
        throw Error("confusion matrix needs at least one class");
    }
    counts_.assign(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(n_classes),
                   0);
}

void ConfusionMatrix::record(int true_label, int predicted_label) {
    if (true_label < 0 || true_label >= n_classes_ || predicted_label < 0 ||
        predicted_label >= n_classes_) {
        throw DimensionMismatchError("label outside the confusion matrix");
    }
    ++counts_[static_cast<std::size_t>(true_label) * static_cast<std::size_t>(n_classes_) +
              static_cast<std::size_t>(predicted_label)];
    ++total_;
}

std::uint64_t ConfusionMatrix::at(int true_label, int predicted_label) const {
    return counts_[static_cast<std::size_t>(true_label) * static_cast<std::size_t>(n_classes_) +
                   static_cast<std::size_t>(predicted_label)];
}

double macro_f1(const ConfusionMatrix& cm, bool include_class0) {
    if (cm.total() == 0) {
        throw EmptyMatrixError("no predictions recorded");
    }
    double sum = 0.0;
    int scored = 0;
    for (int k = include_class0 ? 0 : 1; k < cm.n_classes(); ++k) {
        std::uint64_t tp = cm.at(k, k);
        std::uint64_t fn = 0;
        std::uint64_t fp = 0;
        for (int j = 0; j < cm.n_classes(); ++j) {
            if (j == k) continue;
            fn += cm.at(k, j);
            fp += cm.at(j, k);
        }
        if (tp + fn == 0) {
            continue;  // class never appeared as a true label
        }
        const std::uint64_t denom = 2 * tp + fp + fn;
        sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
        ++scored;
    }
    if (scored == 0) {
        throw EmptyMatrixError("no class appeared as a true label");
    }
    return sum / static_cast<double>(scored);
}

double micro_f1(const ConfusionMatrix& cm, bool include_class0) {
    if (cm.total() == 0) {
        throw EmptyMatrixError("no predictions recorded");
    }
    std::uint64_t correct = 0;
    std::uint64_t considered = 0;
    for (int k = include_class0 ? 0 : 1; k < cm.n_classes(); ++k) {
        correct += cm.at(k, k);
        for (int j = 0; j < cm.n_classes(); ++j) {
            considered += cm.at(k, j);
        }
    }
    if (considered == 0) {
        throw EmptyMatrixError("no class appeared as a true label");
    }
    return static_cast<double>(correct) / static_cast<double>(considered);
}

double f1_score(const ConfusionMatrix& cm, F1Average average, bool include_class0) {
    return average == F1Average::Macro ? macro_f1(cm, include_class0)
                                       : micro_f1(cm, include_class0);
}

PrequentialReport prequential_run(MondrianForest& forest,
                                  const std::vector<StreamSample>& stream,
                                  std::size_t report_interval, F1Average average,
                                  bool include_class0) {
    if (stream.empty()) {
        throw EmptyStreamError("prequential run over an empty stream");
    }
    if (report_interval < 1) {
        throw Error("report interval must be at least 1");
    }
    PrequentialReport report;
    report.config = forest.config();

    ConfusionMatrix cm(forest.config().n_classes);
    std::uint64_t seen = 0;
    for (const StreamSample& sample : stream) {
        const std::uint64_t current = seen + 1;
        try {
            const int predicted = forest.predict(sample.features);
            cm.record(sample.label, predicted);
            seen = current;
            forest.partial_fit(sample);
        } catch (const NonFiniteError& e) {
            report.status = RunStatus::Overflow;
            report.failed_at = current;
            report.error = e.what();
            break;
        }
        if (seen % report_interval == 0) {
            report.checkpoints.push_back({seen, f1_score(cm, average, include_class0)});
        }
    }
    if (cm.total() > 0) {
        report.final_f1 = f1_score(cm, average, include_class0);
        if (report.checkpoints.empty() || report.checkpoints.back().elements_seen != seen) {
            report.checkpoints.push_back({seen, report.final_f1});
        }
    }
    return report;
}

std::vector<std::pair<std::uint64_t, double>> delta_f1(const PrequentialReport& reduced,
                                                       const PrequentialReport& baseline) {
    if (reduced.checkpoints.size() != baseline.checkpoints.size()) {
        throw CheckpointMismatchError("reports have " + std::to_string(reduced.checkpoints.size()) +
                                      " and " + std::to_string(baseline.checkpoints.size()) +
                                      " checkpoints");
    }
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(reduced.checkpoints.size());
    for (std::size_t i = 0; i < reduced.checkpoints.size(); ++i) {
        if (reduced.checkpoints[i].elements_seen != baseline.checkpoints[i].elements_seen) {
            throw CheckpointMismatchError(
                "checkpoint " + std::to_string(i) + " at " +
                std::to_string(reduced.checkpoints[i].elements_seen) + " vs " +
                std::to_string(baseline.checkpoints[i].elements_seen) + " elements");
        }
        out.emplace_back(reduced.checkpoints[i].elements_seen,
                         reduced.checkpoints[i].f1 - baseline.checkpoints[i].f1);
    }
    return out;
}

AggregateCurve aggregate_orderings(const std::vector<PrequentialReport>& reports) {
    if (reports.size() < 2) {
        throw CheckpointMismatchError("aggregation needs at least 2 reports");
    }
    const std::size_t n_points = reports.front().checkpoints.size();
    for (const auto& r : reports) {
        if (r.checkpoints.size() != n_points) {
            throw CheckpointMismatchError("reports disagree on checkpoint count");
        }
        for (std::size_t i = 0; i < n_points; ++i) {
            if (r.checkpoints[i].elements_seen !=
                reports.front().checkpoints[i].elements_seen) {
                throw CheckpointMismatchError("reports disagree on checkpoint positions");
            }
        }
    }

    AggregateCurve curve;
    curve.elements_seen.reserve(n_points);
    curve.mean.reserve(n_points);
    curve.stddev.reserve(n_points);
    const double n = static_cast<double>(reports.size());
    for (std::size_t i = 0; i < n_points; ++i) {
        double mean = 0.0;
        for (const auto& r : reports) {
            mean += r.checkpoints[i].f1;
        }
        mean /= n;
        double var = 0.0;
        for (const auto& r : reports) {
            const double dev = r.checkpoints[i].f1 - mean;
            var += dev * dev;
        }
        curve.elements_seen.push_back(reports.front().checkpoints[i].elements_seen);
        curve.mean.push_back(mean);
        curve.stddev.push_back(std::sqrt(var / n));
    }
    return curve;
}

}  // namespace vpforest

#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "vpforest/eval.hpp"
#include "vpforest/forest.hpp"
#include "vpforest/stream.hpp"

using namespace vpforest;

namespace {

ConfusionMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
    ConfusionMatrix cm(static_cast<int>(rows.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t p = 0; p < rows.size(); ++p) {
            for (std::uint64_t i = 0; i < rows[t][p]; ++i) {
                cm.record(static_cast<int>(t), static_cast<int>(p));
            }
        }
    }
    return cm;
}

ForestConfig eval_config() {
    ForestConfig cfg;
    cfg.n_trees = 3;
    cfg.memory_bytes = 30000;
    cfg.n_features = 3;
    cfg.n_classes = 4;
    cfg.budget = 0.4;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("confusion matrix bookkeeping") {
    ConfusionMatrix cm(3);
    cm.record(0, 1);
    cm.record(2, 2);
    cm.record(2, 2);
    CHECK(cm.total() == 3);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(2, 2) == 2);
    CHECK(cm.at(1, 1) == 0);
    CHECK_THROWS_AS(cm.record(3, 0), DimensionMismatchError);
    CHECK_THROWS_AS(cm.record(0, -1), DimensionMismatchError);
    CHECK_THROWS_AS(ConfusionMatrix{0}, Error);
}

TEST_CASE("macro F1 on the uniform two-class matrix is one half") {
    const ConfusionMatrix cm = from_rows({{1, 1}, {1, 1}});
    // Each class: tp=1, fp=1, fn=1, F1 = 2/(2+1+1) = 0.5.
    CHECK(macro_f1(cm) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(micro_f1(cm) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("perfectly diagonal matrices score one") {
    CHECK(macro_f1(from_rows({{3, 0}, {0, 5}})) == 1.0);
    CHECK(macro_f1(from_rows({{2, 0, 0}, {0, 7, 0}, {0, 0, 1}})) == 1.0);
    CHECK(micro_f1(from_rows({{3, 0}, {0, 5}})) == 1.0);
}

TEST_CASE("macro F1 averages only over classes seen as true labels") {
    // Class 2 never appears as a true label (row of zeros): excluded from the
    // macro average even though it receives predictions.
    const ConfusionMatrix cm = from_rows({{4, 0, 2}, {0, 3, 1}, {0, 0, 0}});
    // class 0: tp=4, fp=0, fn=2 -> 8/10; class 1: tp=3, fp=0, fn=1 -> 6/7.
    CHECK(macro_f1(cm) == doctest::Approx((0.8 + 6.0 / 7.0) / 2).epsilon(1e-15));

    // A class with true labels but no correct or incorrect overlap at all
    // still participates, contributing zero.
    const ConfusionMatrix hard = from_rows({{2, 0}, {2, 0}});
    // class 0: tp=2, fp=2, fn=0 -> 2/3; class 1: tp=0, fp=0, fn=2 -> 0.
    CHECK(macro_f1(hard) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("class zero can be excluded from scoring") {
    const ConfusionMatrix cm = from_rows({{10, 0, 0}, {0, 1, 1}, {0, 1, 1}});
    // Rows 1 and 2 each: tp=1, fp=1, fn=1 -> 0.5.
    CHECK(macro_f1(cm, false) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(micro_f1(cm, false) == doctest::Approx(0.5).epsilon(1e-15));
    // Including the perfect class 0 pulls the macro average up.
    CHECK(macro_f1(cm, true) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const ConfusionMatrix only_zero = from_rows({{5, 0}, {0, 0}});
    CHECK_THROWS_AS(macro_f1(only_zero, false), EmptyMatrixError);
    CHECK_THROWS_AS(macro_f1(ConfusionMatrix{3}), EmptyMatrixError);
}

TEST_CASE("prequential run produces the expected checkpoint grid") {
    ForestConfig cfg = eval_config();
    const auto stream = synthesize(4, 3, 105, 13, 4.0);
    MondrianForest forest(cfg);
    const PrequentialReport report = prequential_run(forest, stream, 50);

    REQUIRE(report.checkpoints.size() == 3);
    CHECK(report.checkpoints[0].elements_seen == 50);
    CHECK(report.checkpoints[1].elements_seen == 100);
    CHECK(report.checkpoints[2].elements_seen == 105);  // trailing partial window
    CHECK(report.checkpoints[2].f1 == report.final_f1);
    CHECK(report.status == RunStatus::Ok);
    CHECK(report.failed_at == 0);

    // A stream length divisible by the interval must not duplicate the final
    // checkpoint.
    MondrianForest exact_forest(cfg);
    const auto exact = prequential_run(
        exact_forest, std::vector<StreamSample>(stream.begin(), stream.begin() + 100), 50);
    REQUIRE(exact.checkpoints.size() == 2);
    CHECK(exact.checkpoints[1].elements_seen == 100);
    CHECK(exact.checkpoints[1].f1 == exact.final_f1);
}

TEST_CASE("prequential scoring is test-then-train") {
    // With a single-leaf forest the first prediction happens before any
    // training, so the first sample is always scored against the uniform
    // argmax (class 0), independent of its label.
    ForestConfig cfg = eval_config();
    cfg.n_trees = 1;
    cfg.n_classes = 2;
    cfg.n_features = 1;
    cfg.memory_bytes = node_footprint(cfg).total;
    cfg.discount = 0.0;

    // Constant stream of label 1: prediction 0 is wrong once, right after.
    std::vector<StreamSample> stream(40, StreamSample{{0.5}, 1});
    MondrianForest forest(cfg);
    const auto report = prequential_run(forest, stream, 10);
    // Confusion: 39 correct on class 1, one miss scored as class 0. Class 0
    // never occurs as a true label, so the macro average is class 1 alone:
    // tp=39, fn=1, fp=0 -> 78/79.
    CHECK(report.final_f1 == doctest::Approx(78.0 / 79.0).epsilon(1e-12));
}

TEST_CASE("prequential run converts non-finite failures into overflow status") {
    ForestConfig cfg = eval_config();
    cfg.mode = InstrumentationMode::Whole;
    cfg.fmt = make_format(52, 2);  // max finite value 3.75, budget rounds to 0.5
    cfg.n_classes = 2;
    cfg.n_features = 2;

    auto stream = synthesize(2, 2, 400, 3, 1.0);
    for (auto& s : stream) {  // keep features themselves in range
        for (double& v : s.features) v = std::clamp(v, -3.5, 3.5);
    }
    MondrianForest forest(cfg);
    const auto report = prequential_run(forest, stream, 50);
    CHECK(report.status == RunStatus::Overflow);
    CHECK(report.failed_at > 0);
    CHECK(report.failed_at <= stream.size());
    CHECK_FALSE(report.error.empty());
    // Checkpoints up to the failing element are preserved; the final partial
    // checkpoint can land on failed_at itself when the element was scored
    // and the failure happened while training on it.
    for (const auto& c : report.checkpoints) {
        CHECK(c.elements_seen <= report.failed_at);
    }
}

TEST_CASE("prequential run validates its inputs") {
    ForestConfig cfg = eval_config();
    MondrianForest forest(cfg);
    CHECK_THROWS_AS(prequential_run(forest, {}, 50), EmptyStreamError);
    const auto stream = synthesize(4, 3, 10, 13, 4.0);
    MondrianForest forest2(cfg);
    CHECK_THROWS_AS(prequential_run(forest2, stream, 0), Error);
}

TEST_CASE("checkpoint deltas subtract pointwise on a shared grid") {
    PrequentialReport a;
    a.checkpoints = {{50, 0.6}, {100, 0.7}};
    PrequentialReport b;
    b.checkpoints = {{50, 0.5}, {100, 0.9}};
    const auto d = delta_f1(a, b);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == std::pair<std::uint64_t, double>{50, 0.6 - 0.5});
    CHECK(d[1].second == doctest::Approx(-0.2).epsilon(1e-15));

    // Identical reports give exact zeros.
    for (const auto& [seen, delta] : delta_f1(a, a)) {
        (void)seen;
        CHECK(delta == 0.0);
    }

    PrequentialReport shifted;
    shifted.checkpoints = {{50, 0.5}, {101, 0.9}};
    CHECK_THROWS_AS(delta_f1(a, shifted), CheckpointMismatchError);
    PrequentialReport shorter;
    shorter.checkpoints = {{50, 0.5}};
    CHECK_THROWS_AS(delta_f1(a, shorter), CheckpointMismatchError);
}

TEST_CASE("aggregating orderings yields the mean and population spread") {
    PrequentialReport a;
    a.checkpoints = {{50, 0.4}, {100, 0.8}};
    PrequentialReport b;
    b.checkpoints = {{50, 0.6}, {100, 0.8}};
    const AggregateCurve agg = aggregate_orderings({a, b});
    REQUIRE(agg.elements_seen.size() == 2);
    CHECK(agg.elements_seen[0] == 50);
    CHECK(agg.mean[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(agg.stddev[0] == doctest::Approx(0.1).epsilon(1e-12));  // population, not sample
    CHECK(agg.mean[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(agg.stddev[1] == 0.0);

    CHECK_THROWS_AS(aggregate_orderings({a}), Error);
    PrequentialReport c;
    c.checkpoints = {{50, 0.4}};
    CHECK_THROWS_AS(aggregate_orderings({a, c}), CheckpointMismatchError);
}

TEST_CASE("truncating the stream replays the shared prefix exactly") {
    ForestConfig cfg = eval_config();
    const auto stream = synthesize(4, 3, 700, 29, 3.0);

    MondrianForest full_forest(cfg);
    const auto full = prequential_run(full_forest, stream, 50);

    Rng pick(1);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t cut =
            50 * (1 + pick.below(static_cast<std::uint64_t>(stream.size() / 50)));
        MondrianForest partial_forest(cfg);
        const auto partial = prequential_run(
            partial_forest, std::vector<StreamSample>(stream.begin(), stream.begin() + cut), 50);
        // Every checkpoint of the truncated run matches the full run: the
        // evaluation is causal in the stream.
        for (std::size_t i = 0; i < partial.checkpoints.size(); ++i) {
            CHECK(partial.checkpoints[i].elements_seen == full.checkpoints[i].elements_seen);
            CHECK(partial.checkpoints[i].f1 == full.checkpoints[i].f1);
        }
    }
}

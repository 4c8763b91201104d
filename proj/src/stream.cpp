#include "vpforest/stream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "vpforest/rng.hpp"

namespace vpforest {

std::vector<StreamSample> featurize_windows(const std::vector<RawSensorRow>& rows,
                                            std::size_t window) {
    if (window < 1) {
        throw Error("window must be at least 1");
    }
    if (rows.size() < window) {
        throw EmptyStreamError("stream has " + std::to_string(rows.size()) +
                               " rows, shorter than one window of " + std::to_string(window));
    }
    const std::size_t n_axes = rows.front().axes.size();
    const std::size_t n_windows = rows.size() / window;

    std::vector<StreamSample> out;
    out.reserve(n_windows);
    for (std::size_t w = 0; w < n_windows; ++w) {
        const std::size_t begin = w * window;
        StreamSample sample;
        sample.features.assign(2 * n_axes, 0.0);

        std::map<int, std::size_t> label_counts;
        for (std::size_t i = begin; i < begin + window; ++i) {
            if (rows[i].axes.size() != n_axes) {
                throw DimensionMismatchError("row " + std::to_string(i + 1) + " has " +
                                             std::to_string(rows[i].axes.size()) +
                                             " axes, expected " + std::to_string(n_axes));
            }
            for (std::size_t d = 0; d < n_axes; ++d) {
                sample.features[d] += rows[i].axes[d];
            }
            ++label_counts[rows[i].label];
        }
        for (std::size_t d = 0; d < n_axes; ++d) {
            sample.features[d] /= static_cast<double>(window);
        }
        for (std::size_t i = begin; i < begin + window; ++i) {
            for (std::size_t d = 0; d < n_axes; ++d) {
                const double dev = rows[i].axes[d] - sample.features[d];
                sample.features[n_axes + d] += dev * dev;
            }
        }
        for (std::size_t d = 0; d < n_axes; ++d) {
            sample.features[n_axes + d] =
                std::sqrt(sample.features[n_axes + d] / static_cast<double>(window));
        }

        // std::map iterates labels in ascending order, so the first maximum
        // is the smallest label id.
        std::size_t best = 0;
        for (const auto& [label, count] : label_counts) {
            if (count > best) {
                best = count;
                sample.label = label;
            }
        }
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<StreamSample> shuffle_stream(std::vector<StreamSample> samples,
                                         std::uint64_t ordering_seed) {
    Rng rng(ordering_seed);
    shuffle(samples, rng);
    return samples;
}

std::vector<StreamSample> synthesize(int n_classes, int n_features, std::size_t n_samples,
                                     std::uint64_t seed, double separation) {
    if (n_classes < 1 || n_features < 1) {
        throw Error("synthesize needs at least one class and one feature");
    }
    if (!(separation >= 0.0)) {
        throw Error("separation must be non-negative");
    }
    Rng rng(mix_seed({seed, 0x53594e54ull}));  // "SYNT"

    std::vector<StreamSample> out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        StreamSample sample;
        sample.label = static_cast<int>(i % static_cast<std::size_t>(n_classes));
        sample.features.resize(n_features);
        const int mean_axis = sample.label % n_features;
        for (int d = 0; d < n_features; ++d) {
            sample.features[d] = rng.gaussian() + (d == mean_axis ? separation : 0.0);
        }
        out.push_back(std::move(sample));
    }
    return out;
}

void normalize_minmax(std::vector<StreamSample>& samples, double lo, double hi) {
    if (samples.empty()) {
        return;
    }
    const std::size_t n_features = samples.front().features.size();
    std::vector<double> mn(n_features, std::numeric_limits<double>::infinity());
    std::vector<double> mx(n_features, -std::numeric_limits<double>::infinity());
    for (const auto& s : samples) {
        if (s.features.size() != n_features) {
            throw DimensionMismatchError("inconsistent feature counts in stream");
        }
        for (std::size_t d = 0; d < n_features; ++d) {
            mn[d] = std::min(mn[d], s.features[d]);
            mx[d] = std::max(mx[d], s.features[d]);
        }
    }
    for (auto& s : samples) {
        for (std::size_t d = 0; d < n_features; ++d) {
            if (mx[d] > mn[d]) {
                s.features[d] = lo + (s.features[d] - mn[d]) * (hi - lo) / (mx[d] - mn[d]);
            } else {
                s.features[d] = 0.5 * (lo + hi);
            }
        }
    }
}

void relabel(std::vector<StreamSample>& samples, const std::unordered_map<int, int>& mapping) {
    for (auto& s : samples) {
        if (auto it = mapping.find(s.label); it != mapping.end()) {
            s.label = it->second;
        }
    }
}

int count_classes(const std::vector<StreamSample>& samples) {
    int top = -1;
    for (const auto& s : samples) {
        top = std::max(top, s.label);
    }
    return top + 1;
}

}  // namespace vpforest

#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "vpforest/errors.hpp"

namespace vpforest {

/// One raw sensor reading: the selected axis columns in file order plus an
/// activity label (0 means "no specific activity").
struct RawSensorRow {
    std::vector<double> axes;
    int label = 0;
};

/// One classifier input: per-axis window means followed by per-axis window
/// standard deviations, plus the window's modal label.
struct StreamSample {
    std::vector<double> features;
    int label = 0;

    friend bool operator==(const StreamSample&, const StreamSample&) = default;
};

/// Collapses consecutive non-overlapping blocks of `window` rows into one
/// sample each: per-axis mean, then per-axis population (1/n) standard
/// deviation; the label is the block's most frequent one, ties toward the
/// smallest id. A trailing partial block is dropped. Throws EmptyStream when
/// fewer than `window` rows arrive.
std::vector<StreamSample> featurize_windows(const std::vector<RawSensorRow>& rows,
                                            std::size_t window = 50);

/// Deterministic permutation of the samples under `ordering_seed`.
std::vector<StreamSample> shuffle_stream(std::vector<StreamSample> samples,
                                         std::uint64_t ordering_seed);

/// Synthetic labelled stream: one isotropic unit-variance Gaussian blob per
/// class, the mean of class k sitting at `separation` along axis
/// (k mod n_features), labels assigned round-robin. Classes beyond
/// n_features reuse axes and become indistinguishable by construction.
std::vector<StreamSample> synthesize(int n_classes, int n_features, std::size_t n_samples,
                                     std::uint64_t seed, double separation);

/// Affine per-feature rescaling of the whole stream onto [lo, hi]; a
/// constant feature maps to the interval midpoint.
void normalize_minmax(std::vector<StreamSample>& samples, double lo = -1.0, double hi = 1.0);

/// Applies an old-label -> new-label mapping; labels absent from the map
/// pass through (used to merge classes of externally published datasets).
void relabel(std::vector<StreamSample>& samples, const std::unordered_map<int, int>& mapping);

/// Smallest class count covering every label in the stream (max label + 1).
int count_classes(const std::vector<StreamSample>& samples);

}  // namespace vpforest

#pragma once

#include <array>
#include <cstdint>

#include "spinal/data.hpp"

namespace spinal::reference {

// Published structural counts. Exact; a mismatch is a bug.
inline constexpr std::uint64_t kRegressionBaselineParams = 22001;
inline constexpr std::uint64_t kRegressionSpinalParams = 14301;
inline constexpr std::uint64_t kRegressionBaselineMults = 21700;
inline constexpr std::uint64_t kRegressionSpinalMults = 14000;
inline constexpr double kRegressionMultReductionPercent = 35.5;  // quoted to one decimal

inline constexpr std::uint64_t kMnistCnnParams = 21840;         // "21.84k"
inline constexpr std::uint64_t kMnistSpinal8Params = 13818;     // "13.82k"
inline constexpr std::uint64_t kMnistSpinal10Params = 16050;    // "16.05k"
inline constexpr double kMnistFcMultReductionPercent = 48.5;    // quoted as a lower bound
inline constexpr std::uint64_t kMnistCnnFcActivations = 50;
inline constexpr std::uint64_t kMnistSpinal8FcActivations = 48;

// Published regression test MSE in units of 1e-3, single run, seed and noise
// level not reported. Shown for comparison only.
struct RegressionRow {
  RegressionTarget target;
  double baseline_100, baseline_200;
  double spinal_100, spinal_200;
};
inline constexpr std::array<RegressionRow, 4> kRegressionMse{{
    {RegressionTarget::sum, 1.178, 0.887, 1.007, 0.855},
    {RegressionTarget::sin_sum, 1.918, 1.086, 1.912, 1.219},
    {RegressionTarget::prod, 3.875, 3.875, 3.966, 2.217},
    {RegressionTarget::sin_prod, 3.403, 1.554, 0.910, 0.910},
}};

// Published MNIST test accuracy after 8 epochs, percent.
inline constexpr double kMnistCnnAccuracy = 98.17;
inline constexpr double kMnistSpinal8Accuracy = 98.44;
inline constexpr double kMnistSpinal10Accuracy = 98.48;

// Acceptance bands used by the reproduction checks.
inline constexpr double kRegressionNoiseSigma = 0.2;
inline constexpr double kRegressionSumMseFactor = 10.0;  // times noise variance
inline constexpr double kRegressionSpinalRatio = 1.5;
inline constexpr std::size_t kRegressionTargetsRequired = 3;
inline constexpr double kMnistSpinalMinAccuracy = 0.970;
inline constexpr double kMnistCnnMinAccuracy = 0.965;
inline constexpr double kMnistSubsetMinAccuracy = 0.93;
inline constexpr std::size_t kMnistSubsetSize = 10000;

}  // namespace spinal::reference

#pragma once

// Population statistics for comparing two groups of measurements: empirical
// PMFs, means, relative error of the means, and proximity association of
// mobile samples to fixed stations.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "urbanaq/domain.hpp"

namespace urbanaq {

class AnalyticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Pmf {
    Quantity quantity = Quantity::Temperature;
    std::vector<double> bin_edges;      ///< ascending, size = probabilities + 1
    std::vector<double> probabilities;  ///< sums to 1
    std::size_t n_samples = 0;          ///< samples that fell inside the edges

    [[nodiscard]] double bin_center(std::size_t i) const {
        return 0.5 * (bin_edges.at(i) + bin_edges.at(i + 1));
    }
};

struct ExplicitEdges {
    std::vector<double> edges;
};
struct UniformBins {
    std::size_t count = 30;
    double min = 0.0;
    double max = 1.0;
};
/// Bins are [e_i, e_{i+1}) except the last, which also includes its right edge.
using Binning = std::variant<ExplicitEdges, UniformBins>;

inline constexpr std::size_t kDefaultBinCount = 30;

/// Histogram normalised to probability mass. Samples outside the edges are
/// not counted. A UniformBins range with min == max collapses to one bin.
/// Throws AnalyticsError("empty sample") when nothing lands in a bin.
Pmf estimate_pmf(std::span<const double> samples, const Binning& bins,
                 Quantity quantity = Quantity::Temperature);

/// |1 - m_a / m_b|. Throws AnalyticsError when m_b == 0.
double relative_error(double m_a, double m_b);

/// Arithmetic mean; throws AnalyticsError on empty input.
double mean_of(std::span<const double> values);

struct Station {
    std::string station_id;
    GeoPoint position;
};

struct Association {
    /// For each input sample: index into the station list, or empty.
    std::vector<std::optional<std::size_t>> assignment;
    std::map<std::string, std::vector<std::size_t>> by_station;
    std::vector<std::size_t> unassociated;
};

inline constexpr double kDefaultAssociationRadiusM = 500.0;

/// Nearest station within `radius_m` (inclusive); equal distances go to the
/// lexicographically lower station id.
Association associate_mobile_to_fixed(std::span<const Measurement> mobile,
                                      std::span<const Station> stations,
                                      double radius_m = kDefaultAssociationRadiusM);

struct ComparisonRow {
    Quantity quantity = Quantity::Temperature;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double eta = 0.0;  ///< relative_error(mean_a, mean_b)
    Pmf pmf_a;
    Pmf pmf_b;
    std::size_t n_a = 0;  ///< samples used for the mean
    std::size_t n_b = 0;
    double below_lod_rate_a = 0.0;  ///< share of samples flagged below LoD
    double below_lod_rate_b = 0.0;
};

struct ComparisonReport {
    std::string label_a;
    std::string label_b;
    std::vector<ComparisonRow> rows;     ///< quantity order
    std::vector<Quantity> incomparable;  ///< usable in only one population

    [[nodiscard]] const ComparisonRow* find(Quantity q) const noexcept;
};

struct CompareOptions {
    std::string label_a = "a";
    std::string label_b = "b";
    /// Applied to every quantity when set; otherwise kDefaultBinCount bins over
    /// the pooled min..max of both populations.
    std::optional<Binning> binning;
};

/// Per-quantity means, eta and PMFs over unflagged samples. Throws
/// AnalyticsError("no overlap") when the populations share no usable quantity.
ComparisonReport compare_populations(std::span<const Measurement> a,
                                     std::span<const Measurement> b,
                                     const CompareOptions& options = {});

}  // namespace urbanaq

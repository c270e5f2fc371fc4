#include "urbanaq/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace urbanaq {

namespace {

std::vector<double> edges_for(const Binning& bins) {
    if (const auto* e = std::get_if<ExplicitEdges>(&bins)) {
        if (e->edges.size() < 2) throw AnalyticsError("binning needs at least two edges");
        for (std::size_t i = 1; i < e->edges.size(); ++i) {
            if (!(e->edges[i] > e->edges[i - 1])) throw AnalyticsError("bin edges must ascend");
        }
        return e->edges;
    }
    const auto& u = std::get<UniformBins>(bins);
    if (u.count == 0) throw AnalyticsError("bin count must be > 0");
    if (!std::isfinite(u.min) || !std::isfinite(u.max) || u.max < u.min) {
        throw AnalyticsError("invalid bin range");
    }
    if (u.max == u.min) {
        const double half = std::max(0.5, std::fabs(u.min) * 1e-6);
        return {u.min - half, u.min + half};
    }
    std::vector<double> edges(u.count + 1);
    const double width = (u.max - u.min) / static_cast<double>(u.count);
    for (std::size_t i = 0; i <= u.count; ++i) edges[i] = u.min + width * static_cast<double>(i);
    edges.back() = u.max;
    return edges;
}

}  // namespace

Pmf estimate_pmf(std::span<const double> samples, const Binning& bins, Quantity quantity) {
    if (samples.empty()) throw AnalyticsError("empty sample");
    Pmf pmf;
    pmf.quantity = quantity;
    pmf.bin_edges = edges_for(bins);
    const std::size_t nbins = pmf.bin_edges.size() - 1;
    std::vector<std::size_t> counts(nbins, 0);
    for (double v : samples) {
        if (!(v >= pmf.bin_edges.front()) || v > pmf.bin_edges.back()) continue;
        auto it = std::upper_bound(pmf.bin_edges.begin(), pmf.bin_edges.end(), v);
        auto bin = static_cast<std::size_t>(it - pmf.bin_edges.begin()) - 1;
        bin = std::min(bin, nbins - 1);
        ++counts[bin];
        ++pmf.n_samples;
    }
    if (pmf.n_samples == 0) throw AnalyticsError("empty sample");
    pmf.probabilities.resize(nbins);
    const auto total = static_cast<double>(pmf.n_samples);
    for (std::size_t i = 0; i < nbins; ++i) {
        pmf.probabilities[i] = static_cast<double>(counts[i]) / total;
    }
    return pmf;
}

double relative_error(double m_a, double m_b) {
    if (m_b == 0.0) throw AnalyticsError("division by zero: reference mean is 0");
    return std::fabs(1.0 - m_a / m_b);
}

double mean_of(std::span<const double> values) {
    if (values.empty()) throw AnalyticsError("mean of empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Association associate_mobile_to_fixed(std::span<const Measurement> mobile,
                                      std::span<const Station> stations, double radius_m) {
    Association out;
    out.assignment.reserve(mobile.size());
    for (std::size_t i = 0; i < mobile.size(); ++i) {
        std::optional<std::size_t> best;
        double best_d = 0.0;
        for (std::size_t s = 0; s < stations.size(); ++s) {
            const double d = haversine_distance(mobile[i].position, stations[s].position);
            if (d > radius_m) continue;
            if (!best || d < best_d ||
                (d == best_d && stations[s].station_id < stations[*best].station_id)) {
                best = s;
                best_d = d;
            }
        }
        out.assignment.push_back(best);
        if (best) {
            out.by_station[stations[*best].station_id].push_back(i);
        } else {
            out.unassociated.push_back(i);
        }
    }
    return out;
}

const ComparisonRow* ComparisonReport::find(Quantity q) const noexcept {
    for (const auto& r : rows) {
        if (r.quantity == q) return &r;
    }
    return nullptr;
}

namespace {

struct Population {
    std::vector<double> usable;
    std::size_t total = 0;
    std::size_t below_lod = 0;
};

std::map<Quantity, Population> split_by_quantity(std::span<const Measurement> ms) {
    std::map<Quantity, Population> out;
    for (const auto& m : ms) {
        Population& p = out[m.quantity];
        ++p.total;
        if (m.flags.has(MeasurementFlag::BelowLoD)) ++p.below_lod;
        if (!m.flags.degraded()) p.usable.push_back(m.value);
    }
    return out;
}

}  // namespace

ComparisonReport compare_populations(std::span<const Measurement> a,
                                     std::span<const Measurement> b,
                                     const CompareOptions& options) {
    ComparisonReport report;
    report.label_a = options.label_a;
    report.label_b = options.label_b;
    const auto pa = split_by_quantity(a);
    const auto pb = split_by_quantity(b);

    for (auto q : kAllQuantities) {
        auto ia = pa.find(q);
        auto ib = pb.find(q);
        const bool in_a = ia != pa.end() && !ia->second.usable.empty();
        const bool in_b = ib != pb.end() && !ib->second.usable.empty();
        if (!in_a && !in_b) continue;
        if (!in_a || !in_b) {
            report.incomparable.push_back(q);
            continue;
        }
        const Population& A = ia->second;
        const Population& B = ib->second;
        ComparisonRow row;
        row.quantity = q;
        row.mean_a = mean_of(A.usable);
        row.mean_b = mean_of(B.usable);
        if (row.mean_b == 0.0) {
            report.incomparable.push_back(q);
            continue;
        }
        row.eta = relative_error(row.mean_a, row.mean_b);
        row.n_a = A.usable.size();
        row.n_b = B.usable.size();
        row.below_lod_rate_a = static_cast<double>(A.below_lod) / static_cast<double>(A.total);
        row.below_lod_rate_b = static_cast<double>(B.below_lod) / static_cast<double>(B.total);

        Binning bins;
        if (options.binning) {
            bins = *options.binning;
        } else {
            const auto [amin, amax] = std::minmax_element(A.usable.begin(), A.usable.end());
            const auto [bmin, bmax] = std::minmax_element(B.usable.begin(), B.usable.end());
            bins = UniformBins{kDefaultBinCount, std::min(*amin, *bmin), std::max(*amax, *bmax)};
        }
        row.pmf_a = estimate_pmf(A.usable, bins, q);
        row.pmf_b = estimate_pmf(B.usable, bins, q);
        report.rows.push_back(std::move(row));
    }
    if (report.rows.empty()) throw AnalyticsError("no overlap: populations share no quantity");
    return report;
}

}  // namespace urbanaq

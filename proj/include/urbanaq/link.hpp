#pragma once

#include <cstdint>
#include <limits>

#include "urbanaq/domain.hpp"

namespace urbanaq {

/// Delivery-contract view of a radio link: range, Bernoulli loss and a fixed latency.
struct LinkModel {
    Radio kind = Radio::ShortRangeFixed;
    double range_m = std::numeric_limits<double>::infinity();
    double loss_prob = 0.0;
    double latency_s = 0.0;
};

/// Throws ValidationError when loss_prob is outside [0, 1], range_m <= 0 or latency_s < 0.
void validate_link(const LinkModel& link);

struct NetworkParams {
    LinkModel short_range_fixed{Radio::ShortRangeFixed, 500.0, 0.0, 0.5};
    LinkModel short_range_mobile{Radio::ShortRangeMobile, 300.0, 0.0, 0.2};
    LinkModel wide_area{Radio::WideArea, std::numeric_limits<double>::infinity(), 0.0, 2.0};
    Timestamp sample_period_s = 300;   ///< T_N
    Timestamp uplink_period_s = 900;   ///< T_I

    [[nodiscard]] const LinkModel& link(Radio r) const noexcept {
        switch (r) {
            case Radio::ShortRangeFixed: return short_range_fixed;
            case Radio::ShortRangeMobile: return short_range_mobile;
            case Radio::WideArea: return wide_area;
        }
        return wide_area;
    }
};

}  // namespace urbanaq

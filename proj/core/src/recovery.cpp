#include "xradar/recovery.hpp"

#include <algorithm>
#include <tuple>

namespace xradar {

void RecoveryResult::sort_by_magnitude() {
  std::stable_sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    if (a.magnitude() != b.magnitude()) return a.magnitude() > b.magnitude();
    return std::tie(a.delay_bin, a.doppler_bin, a.azimuth_bin, a.ambiguity_order) <
           std::tie(b.delay_bin, b.doppler_bin, b.azimuth_bin, b.ambiguity_order);
  });
}

}  // namespace xradar

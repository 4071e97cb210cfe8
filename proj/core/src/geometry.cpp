#include "xradar/geometry.hpp"

#include <stdexcept>
#include <string>

namespace xradar {

double ArrayGeometry::beta(int m, int q, double carrier_hz, bool exact) const {
  if (m < 0 || m >= num_tx() || q < 0 || q >= num_rx()) throw std::out_of_range("ArrayGeometry::beta: bad channel");
  const double position = rx_positions[static_cast<std::size_t>(q)] + tx_positions[static_cast<std::size_t>(m)];
  if (!exact || carriers_hz.empty() || carrier_hz <= 0.0) return position;
  // f_m * lambda / c with lambda = c / carrier reduces to f_m / carrier.
  return position * (carriers_hz[static_cast<std::size_t>(m)] / carrier_hz + 1.0);
}

void ArrayGeometry::validate() const {
  if (virtual_tx < 1 || virtual_rx < 1) throw std::invalid_argument("ArrayGeometry: virtual sizes must be >= 1");
  if (tx_positions.empty() || rx_positions.empty())
    throw std::invalid_argument("ArrayGeometry: need at least one transmitter and one receiver");
  if (!carriers_hz.empty() && carriers_hz.size() != tx_positions.size())
    throw std::invalid_argument("ArrayGeometry: one carrier per transmitter required");
  const double z = aperture();
  const auto check = [z](const std::vector<double>& positions, const char* what) {
    for (double x : positions)
      if (x < 0.0 || x > z)
        throw std::invalid_argument(std::string("ArrayGeometry: ") + what + " position " + std::to_string(x) +
                                    " outside [0, " + std::to_string(z) + "]");
  };
  check(tx_positions, "tx");
  check(rx_positions, "rx");
}

}  // namespace xradar

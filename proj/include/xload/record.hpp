#pragma once

#include <vector>

namespace xload {

// One 10-minute block: mean wind speed, its standard deviation and the
// maximum load.
struct TenMinRecord {
  double v = 0.0;
  double s = 0.0;
  double y = 0.0;
};

using RecordTable = std::vector<TenMinRecord>;

}  // namespace xload

#pragma once

#include <vector>

namespace homog {

// one trajectory sampled on a uniform grid; produced both by the rescaled map
// recursions and by the SDE integrators so downstream statistics can treat
// the two identically
struct rescaled_path {
  std::vector<double> grid;    // times, grid[0] == 0
  std::vector<double> values;  // same length as grid
  double epsilon = 0.0;        // 0 for continuous-time paths
  enum class interp_kind { piecewise_constant, linear };
  interp_kind interpolation = interp_kind::piecewise_constant;
};

}  // namespace homog

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace activemedia {

/// How a cell's firing is read off its state.
struct FiringRule {
  enum class Kind { PhaseCrossing, Threshold };
  Kind kind = Kind::PhaseCrossing;
  std::size_t coordinate = 0;
  /// Phase crossings fire at level + 2*pi*k; thresholds at the level itself.
  double level = 0.0;
};

/// Roles of the cells in an O-E...E-O chain, as indices into per-cell data.
struct ChainLayout {
  std::size_t x = 0;
  std::optional<std::size_t> z;
  std::vector<std::size_t> excitable;
};

}  // namespace activemedia

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "otcimpact/domain.hpp"

namespace otcimpact {

/// Total assignment of trades to a finite, ordered set of categories.
struct CategoryScheme {
  std::string name;
  std::vector<std::string> categories;
  std::function<std::size_t(const Trade&)> assign;

  std::size_t size() const { return categories.size(); }
};

/// ON_SEF / OFF_SEF with UNKNOWN counted as on-SEF.
CategoryScheme venue_scheme();

/// Every trade in one category named "all".
CategoryScheme single_scheme();

/// Category index of each trade under the scheme.
std::vector<std::size_t> assign_all(std::span<const Trade> trades, const CategoryScheme& scheme);
std::vector<std::size_t> assign_all(std::span<const SignedTrade> trades,
                                    const CategoryScheme& scheme);

/// Same assignment with categories that have no trades removed.
CategoryScheme restrict_to_present(const CategoryScheme& scheme, std::span<const Trade> trades);

}  // namespace otcimpact

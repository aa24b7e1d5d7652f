#include "otcimpact/category.hpp"

#include <memory>

namespace otcimpact {

CategoryScheme venue_scheme() {
  return {"venue",
          {"ON_SEF", "OFF_SEF"},
          [](const Trade& t) -> std::size_t { return t.venue == Venue::kOffSef ? 1 : 0; }};
}

CategoryScheme single_scheme() {
  return {"single", {"all"}, [](const Trade&) -> std::size_t { return 0; }};
}

std::vector<std::size_t> assign_all(std::span<const Trade> trades, const CategoryScheme& scheme) {
  std::vector<std::size_t> out;
  out.reserve(trades.size());
  for (const auto& t : trades) {
    const auto c = scheme.assign(t);
    if (c >= scheme.size()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "scheme '" + scheme.name + "' assigned out-of-range category", "category");
    }
    out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> assign_all(std::span<const SignedTrade> trades,
                                    const CategoryScheme& scheme) {
  std::vector<std::size_t> out;
  out.reserve(trades.size());
  for (const auto& st : trades) {
    const auto c = scheme.assign(st.trade);
    if (c >= scheme.size()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "scheme '" + scheme.name + "' assigned out-of-range category", "category");
    }
    out.push_back(c);
  }
  return out;
}

CategoryScheme restrict_to_present(const CategoryScheme& scheme, std::span<const Trade> trades) {
  const auto idx = assign_all(trades, scheme);
  std::vector<bool> seen(scheme.size(), false);
  for (auto c : idx) seen[c] = true;

  auto remap = std::make_shared<std::vector<std::size_t>>(scheme.size(), 0);
  CategoryScheme out;
  out.name = scheme.name;
  for (std::size_t c = 0; c < scheme.size(); ++c) {
    if (!seen[c]) continue;
    (*remap)[c] = out.categories.size();
    out.categories.push_back(scheme.categories[c]);
  }
  out.assign = [remap, inner = scheme.assign](const Trade& t) { return (*remap)[inner(t)]; };
  return out;
}

}  // namespace otcimpact

#pragma once

#include <cstddef>

#include "pfoe/episode.hpp"

namespace fixtures {

// Deterministic synthetic episode: readings vary smoothly along t with a
// different period per channel, actions alternate forward / turn.
inline pfoe::Episode synthetic_episode(std::size_t length) {
  pfoe::Episode ep;
  for (std::size_t t = 1; t <= length; ++t) {
    const auto i = static_cast<std::int32_t>(t);
    pfoe::Observation z{{10 + (i * 7) % 90, 5 + (i * 3) % 40, 200 - (i * 11) % 150, 1 + (i * i) % 60}};
    pfoe::Action a{(t / 10) % 2 == 0 ? 0.2 : 0.0, (t / 10) % 2 == 0 ? 0.0 : 1.5707963267948966};
    ep.record(a, z);
  }
  return ep;
}

}  // namespace fixtures

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "pfoe/episode.hpp"

using namespace pfoe;

TEST_CASE("episode indexing is 1-based") {
  const auto ep = fixtures::synthetic_episode(5);
  CHECK(ep.length() == 5);
  CHECK(ep.at(1) == ep[1]);
  CHECK_THROWS_AS(ep.at(0), std::out_of_range);
  CHECK_THROWS_AS(ep.at(6), std::out_of_range);
  const auto longer = record_event(ep, {0.2, 0.0}, Observation{{1, 2, 3, 4}});
  CHECK(longer.length() == 6);
  CHECK(ep.length() == 5);
}

TEST_CASE("text round trip is exact") {
  auto ep = fixtures::synthetic_episode(40);
  ep.record({-0.2, 0.1 + 0.2}, Observation{{1, 1, 1, 4000}});
  const auto text = serialize(ep);
  CHECK(text.rfind("pfoe-episode v1 cycle=0.1\n", 0) == 0);
  const auto back = deserialize(text);
  CHECK(back == ep);
  CHECK(serialize(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "pfoe_episode_roundtrip.txt";
  save_episode(ep, path.string());
  CHECK(load_episode(path.string()) == ep);
  std::filesystem::remove(path);
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      deserialize(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("hello\n") == 1);
  CHECK(line_of("pfoe-episode v2 cycle=0.1\n") == 1);
  CHECK(line_of("pfoe-episode v1 cycle=-1\n") == 1);
  CHECK(line_of("pfoe-episode v1 cycle=0.1\n1 0 0 1 1 1 1\n3 0 0 1 1 1 1\n") == 3);
  CHECK(line_of("pfoe-episode v1 cycle=0.1\n1 0 0 1 1 0 1\n") == 2);
  CHECK(line_of("pfoe-episode v1 cycle=0.1\n1 0 0 1 1 1\n") == 2);
  CHECK(line_of("pfoe-episode v1 cycle=0.1\n1 nan 0 1 1 1 1\n") == 2);
}

TEST_CASE("trim drops whole cycles from both ends") {
  const auto ep = fixtures::synthetic_episode(120);
  const auto t = trim(ep, 5.0, 5.0);
  CHECK(t.length() == 20);
  CHECK(t[1] == ep[51]);
  CHECK(t[20] == ep[70]);
  CHECK(trim(ep, 0.0, 0.0) == ep);
  CHECK(cycles_in(0.35, 0.1) == 3);
  CHECK_THROWS_AS(trim(ep, 6.0, 6.0), EpisodeTooShort);
  CHECK_THROWS_AS(trim(ep, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("observation clamping and validation") {
  const auto z = clamp_observation({0, -5, 7, 1});
  CHECK(z == Observation{{1, 1, 7, 1}});
  CHECK_THROWS_AS(validate(Observation{{1, 0, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Action{5.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(Action{0.2, -1.5}));
}

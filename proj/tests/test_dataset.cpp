#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "ccprobe/dataset.hpp"
#include "support.hpp"

using namespace ccprobe;

namespace {

const StateSchema& blackjack_schema() {
  static const StateSchema schema = builtin_library("blackjack").schema();
  return schema;
}

/// Trace whose layer-2 neuron i is active in exactly `active[i]` of `n` states.
ActivationTrace trace_with_counts(std::size_t n, const std::vector<std::size_t>& active) {
  ActivationTrace t;
  t.hidden.push_back(Matrix(n, 1));
  t.hidden.push_back(Matrix(n, active.size()));
  for (std::size_t i = 0; i < active.size(); ++i)
    for (std::size_t s = 0; s < n; ++s) t.hidden[1](s, i) = s < active[i] ? 1.0 : -1.0;
  t.outputs = Matrix(n, 1);
  return t;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("ccprobe_test_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("load_states") {
  TEST_CASE("csv with header and one row") {
    const StateTable t = parse_states("player_sum,dealer_card,usable_ace\n20,9,0\n", blackjack_schema(), StateFormat::csv);
    CHECK(t.rows() == 1);
    CHECK(t.cols() == 3);
    CHECK(t.row(0)[0] == 20);
    CHECK(t.row(0)[1] == 9);
  }

  TEST_CASE("header only is an error saying no states") {
    try {
      parse_states("player_sum,dealer_card,usable_ace\n", blackjack_schema(), StateFormat::csv);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("no states") != std::string::npos);
    }
  }

  TEST_CASE("columns are matched by name") {
    const StateTable t = parse_states("usable_ace,player_sum,dealer_card\n1,13,2\n0,20,10\n", blackjack_schema(),
                                      StateFormat::csv);
    CHECK(std::vector<double>(t.values().begin(), t.values().end()) == std::vector<double>{13, 2, 1, 20, 10, 0});
  }

  TEST_CASE("missing, extra or duplicate columns and bad values are rejected") {
    const auto& s = blackjack_schema();
    CHECK_THROWS_AS(parse_states("player_sum,dealer_card\n20,9\n", s, StateFormat::csv), Error);
    CHECK_THROWS_AS(parse_states("player_sum,dealer_card,usable_ace,x\n20,9,0,1\n", s, StateFormat::csv), Error);
    CHECK_THROWS_AS(parse_states("player_sum,player_sum,usable_ace\n20,9,0\n", s, StateFormat::csv), Error);
    CHECK_THROWS_AS(parse_states("player_sum,dealer_card,usable_ace\n20.5,9,0\n", s, StateFormat::csv), Error);
    CHECK_THROWS_AS(parse_states("player_sum,dealer_card,usable_ace\n22,9,0\n", s, StateFormat::csv), Error);
    CHECK_THROWS_AS(parse_states("player_sum,dealer_card,usable_ace\nnan,9,0\n", s, StateFormat::csv), Error);
    CHECK_THROWS_AS(parse_states("player_sum,dealer_card,usable_ace\n20,9\n", s, StateFormat::csv), Error);
  }

  TEST_CASE("json lines keyed by dimension name") {
    const StateTable t = parse_states("{\"player_sum\":20,\"dealer_card\":9,\"usable_ace\":0}\n"
                                      "{\"usable_ace\":1,\"dealer_card\":1,\"player_sum\":12}\n",
                                      blackjack_schema(), StateFormat::jsonl);
    CHECK(t.rows() == 2);
    CHECK(t.at(1, 0) == 12);
    CHECK(t.at(1, 2) == 1);
    CHECK_THROWS_AS(parse_states("{\"player_sum\":20,\"dealer_card\":9}\n", blackjack_schema(), StateFormat::jsonl),
                    Error);
  }

  TEST_CASE("files: format from extension or content, values survive save/load") {
    const StateTable sampled = sample_states(builtin_library("lunarlander").schema(), 64, 3);
    for (const char* ext : {".csv", ".jsonl"}) {
      const auto path = std::filesystem::temp_directory_path() / (std::string("ccprobe_roundtrip") + ext);
      save_states(sampled, path.string());
      const StateTable back = load_states(path.string(), sampled.schema());
      CHECK(back == sampled);
      std::filesystem::remove(path);
    }
    const auto sniffed = temp_file("sniff.txt", "{\"player_sum\":5,\"dealer_card\":2,\"usable_ace\":0}\n");
    CHECK(load_states(sniffed.string(), blackjack_schema()).rows() == 1);
    CHECK_THROWS_AS(load_states("/no/such/states.csv", blackjack_schema()), Error);
  }
}

TEST_SUITE("sample_states") {
  TEST_CASE("blackjack sample covers every player sum within bounds") {
    const StateTable t = sample_states(blackjack_schema(), 10000, 7);
    CHECK(t.rows() == 10000);
    std::set<double> sums, cards, aces;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      sums.insert(t.at(i, 0));
      cards.insert(t.at(i, 1));
      aces.insert(t.at(i, 2));
    }
    CHECK(sums.size() == 21);
    CHECK(*sums.begin() == 1);
    CHECK(*sums.rbegin() == 21);
    CHECK(cards.size() == 10);
    CHECK(aces == std::set<double>{0, 1});
  }

  TEST_CASE("discrete values are roughly uniform") {
    const StateTable t = sample_states(blackjack_schema(), 10000, 8);
    std::vector<double> counts(21, 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) counts[static_cast<std::size_t>(t.at(i, 0)) - 1] += 1;
    const double expected = 10000.0 / 21.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 50.0);  // 20 degrees of freedom; the 0.9999 quantile is about 52
  }

  TEST_CASE("continuous values stay in bounds") {
    const StateSchema& s = builtin_library("lunarlander").schema();
    const StateTable t = sample_states(s, 5000, 1);
    for (std::size_t i = 0; i < t.rows(); ++i)
      for (std::size_t d = 0; d < s.size(); ++d) {
        CHECK(t.at(i, d) >= *s[d].lower);
        CHECK(t.at(i, d) <= *s[d].upper);
      }
  }

  TEST_CASE("single row, determinism per seed, and errors") {
    CHECK(sample_states(blackjack_schema(), 1, 0).rows() == 1);
    CHECK(sample_states(blackjack_schema(), 100, 3) == sample_states(blackjack_schema(), 100, 3));
    CHECK_FALSE(sample_states(blackjack_schema(), 100, 3) == sample_states(blackjack_schema(), 100, 4));
    CHECK_THROWS_AS(sample_states(blackjack_schema(), 0, 0), Error);
    const StateSchema unbounded({{"v", DimensionKind::continuous, 0.0, std::nullopt}});
    CHECK_THROWS_AS(sample_states(unbounded, 10, 0), Error);
  }
}

TEST_SUITE("active_neurons") {
  TEST_CASE("five percent is excluded, one more state is included") {
    const auto active = active_neurons(trace_with_counts(10000, {500, 501, 0, 10000}), 2, 0.0, 0.05);
    REQUIRE(active.size() == 2);
    CHECK(active[0].index == 1);
    CHECK(active[1].index == 3);
  }

  TEST_CASE("dead layer gives no neurons") {
    CHECK(active_neurons(trace_with_counts(100, {0, 0, 0}), 2).empty());
  }

  TEST_CASE("raising the threshold never adds neurons") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> count(0, 1000);
    std::vector<std::size_t> counts(40);
    for (auto& c : counts) c = count(rng);
    const ActivationTrace t = trace_with_counts(1000, counts);
    std::size_t previous = counts.size() + 1;
    for (double frac = 0.0; frac <= 1.0; frac += 0.05) {
      const std::size_t now = active_neurons(t, 2, 0.0, frac).size();
      CHECK(now <= previous);
      previous = now;
    }
  }
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(20) == "20");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

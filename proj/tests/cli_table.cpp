#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "table.hpp"

#include <cmath>
#include <random>

using namespace pkpz_cli;

TEST_CASE("empty table is a header-only file") {
  Table t;
  t.columns = {"a", "prob", "stderr"};
  t.config["seed"] = 7;
  auto s = to_csv(t);
  CHECK(s == "# config: {\"seed\":7}\na,prob,stderr\n");
  auto back = read_csv(s);
  CHECK(back.columns == t.columns);
  CHECK(back.rows.empty());
  CHECK(back.config["seed"] == 7);
  CHECK(to_json(t)["rows"].empty());
}

TEST_CASE("reals survive a CSV round trip bit for bit") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1, 1);
  Table t;
  t.columns = {"x", "re", "im"};
  for (int i = 0; i < 200; ++i) t.rows.push_back({std::ldexp(u(g), int(u(g) * 300)), u(g), 1.0 / 3 + i});
  t.rows.push_back({5e-324, 1.7976931348623157e308, -0.0});
  auto back = read_csv(to_csv(t));
  REQUIRE(back.rows.size() == t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::get<double>(back.rows[i][j]) == std::get<double>(t.rows[i][j]));
}

TEST_CASE("JSON round trip and quoting") {
  Table t;
  t.columns = {"point_spec", "prob"};
  t.rows.push_back({std::string("(1,0.5,0);(1,1,1)"), 0.1 + 0.2});
  t.rows.push_back({std::string("say \"hi\""), 1e-300});
  auto back = read_csv(to_csv(t));
  CHECK(std::get<std::string>(back.rows[0][0]) == "(1,0.5,0);(1,1,1)");
  CHECK(std::get<std::string>(back.rows[1][0]) == "say \"hi\"");
  CHECK(std::get<double>(back.rows[0][1]) == 0.1 + 0.2);
  auto j = nlohmann::ordered_json::parse(dump_json(to_json(t)));
  CHECK(j["rows"][0][1].get<double>() == 0.1 + 0.2);
  CHECK(j["rows"][1][1].get<double>() == 1e-300);
}

TEST_CASE("17 significant digits") { CHECK(fmt_real(0.1) == "0.10000000000000001"); }

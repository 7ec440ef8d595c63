#include <doctest.h>

#include "cos2q/config.hpp"
#include "cos2q/error.hpp"
#include "cos2q/output.hpp"

using namespace cos2q;
using nlohmann::json;

TEST_SUITE("config") {

TEST_CASE("empty document resolves to the defaults") {
  const ExperimentConfig c = parse_config(json::object());
  CHECK(c.n_cut == 15);
  CHECK(c.circuit.alpha_ghz == 20.0);
  CHECK(c.schedule.bound_factor == 1e-3);
  CHECK(c.schedule.m_count == 12);
  CHECK_FALSE(c.circuit.alpha_g_ghz.has_value());
}

TEST_CASE("resolved config round-trips") {
  json doc = {{"circuit", {{"ec_theta_ghz", 0.4}, {"ec_phi_ghz", 0.4}, {"alpha_g_ghz", 3.0}}},
              {"n_cut", 12},
              {"sweep", {{"ec_ghz", {0.1}}}}};
  const ExperimentConfig c = parse_config(doc);
  const json resolved = to_json(c);
  CHECK(to_json(parse_config(resolved)) == resolved);
  CHECK(resolved["circuit"]["alpha_g_ghz"] == 3.0);
  CHECK(resolved["sweep"]["ec_ghz"] == json::array({0.1}));
}

TEST_CASE("GHz inputs become angular frequencies once") {
  ExperimentConfig c;
  c.circuit.alpha_ghz = 1.0;
  c.circuit.ec_theta_ghz = 0.5;
  const CircuitParams p = c.circuit.angular();
  CHECK(p.alpha == doctest::Approx(two_pi));
  CHECK(p.ec_theta == doctest::Approx(pi));
  CHECK_FALSE(p.alpha_g.has_value());
}

TEST_CASE("unknown keys are rejected with their dotted path") {
  CHECK_THROWS_WITH_AS(parse_config({{"circuit", {{"alpha", 1.0}}}}), doctest::Contains("circuit.alpha"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config({{"extra", 1}}), doctest::Contains("'extra'"), InvalidArgument);
}

TEST_CASE("type and range violations are rejected") {
  CHECK_THROWS_AS(parse_config({{"n_cut", 2.5}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"n_cut", "12"}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"n_cut", 0}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"circuit", {{"ec_phi_ghz", -0.1}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"phi_grid", {{"stop_over_pi", 1.5}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"eigenstates", {{"basis", "momentum"}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"gate", {{"phase_samples", 128}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"potential", {{"models", {"circuit", "mystery"}}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"circuit", 3}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config(json::array()), InvalidArgument);
}

TEST_CASE("overrides follow dotted paths and parse JSON values") {
  json doc = json::object();
  apply_override(doc, "circuit.zeta_ghz=5");
  apply_override(doc, "eigenstates.model=sinsin");
  apply_override(doc, "sweep.ec_ghz=[0.4]");
  apply_override(doc, "n_cut=9");
  const ExperimentConfig c = parse_config(doc);
  CHECK(c.circuit.zeta_ghz == 5.0);
  CHECK(c.eigenstates.model == "sinsin");
  CHECK(c.sweep.ec_ghz == std::vector<double>{0.4});
  CHECK(c.n_cut == 9);
  CHECK_THROWS_AS(apply_override(doc, "novalue"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(doc, "n_cut.inner=1"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(doc, "circuit..x=1"), InvalidArgument);
}

TEST_CASE("number formatting is shortest round-trip and rejects non-finite values") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(std::stod(format_number(pi)) == pi);
  CHECK_THROWS_AS(format_number(std::nan("")), NumericalError);
}

TEST_CASE("csv fields are quoted per RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

}  // TEST_SUITE

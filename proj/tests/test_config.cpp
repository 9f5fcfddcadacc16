#include "spectral_lab/config.hpp"
#include "spectral_lab/io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace spectral_lab;
using nlohmann::json;

namespace {

std::string error_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.system.kind == "rotation");
  CHECK(c.system.alpha_golden);
  CHECK(c.numerics.N == 2000);
  CHECK(c.numerics.M == 50);
  CHECK(c.numerics.grid_size == 401);
  CHECK(c.walters.n_list == std::vector<std::size_t>{1000, 10000});
  CHECK(c.construction.eps == 0.5);
  CHECK(c.construction.params.N == c.numerics.N);
  CHECK(default_config_json()["system"]["alpha"] == "golden");
}

TEST_CASE("resolved config reproduces itself") {
  json doc = json::object();
  apply_override(doc, "sampler.kind", "cosine");
  apply_override(doc, "sampler.lambda", "4");
  apply_override(doc, "numerics.grid_lo", "-1");
  apply_override(doc, "numerics.grid_hi", "2.5");
  apply_override(doc, "system.alpha", "0.3819660112501051");
  const RunConfig c = parse_config(doc);
  const json resolved = to_json(c);
  CHECK(to_json(parse_config(resolved)) == resolved);
  CHECK(c.sampler.lambda == 4.0);
  CHECK(*c.numerics.grid_lo == -1.0);
  CHECK(c.system.alpha == 0.3819660112501051);
}

TEST_CASE("alpha forms") {
  CHECK(parse_config(json::parse(R"({"system": {"alpha": "0.25"}})")).system.alpha == 0.25);
  CHECK(parse_config(json::parse(R"({"system": {"alpha": 0.25}})")).system.alpha == 0.25);
  CHECK(error_field(json::parse(R"({"system": {"alpha": "1.5"}})")) == "system.alpha");
  CHECK(error_field(json::parse(R"({"system": {"alpha": 1.5}})")) == "system.alpha");
  CHECK(error_field(json::parse(R"({"system": {"alpha": "x"}})")) == "system.alpha");
  CHECK(error_field(json::parse(R"({"system": {"alpha": 0}})")) == "system.alpha");
}

TEST_CASE("validation names the field") {
  CHECK(error_field(json::parse(R"({"numerics": {"bogus": 1}})")) == "numerics.bogus");
  CHECK(error_field(json::parse(R"({"nope": 1})")) == "nope");
  CHECK(error_field(json::parse(R"({"walters": {"n_list": []}})")) == "walters.n_list");
  CHECK(error_field(json::parse(R"({"walters": {"n_list": [100, 10]}})")) == "walters.n_list");
  CHECK(error_field(json::parse(R"({"walters": {"n_list": [0, 10]}})")) == "walters.n_list");
  CHECK(parse_config({{"walters", {{"n_list", json::array({std::int64_t{500}})}}}}).walters.n_list ==
        std::vector<std::size_t>{500});
  CHECK(error_field(json::parse(R"({"numerics": {"N": -3}})")) == "numerics.N");
  CHECK(error_field(json::parse(R"({"numerics": {"N": "many"}})")) == "numerics.N");
  CHECK(error_field(json::parse(R"({"numerics": {"n": 50}})")) == "numerics.n");
  CHECK(error_field(json::parse(R"({"numerics": {"eps": 0}})")) == "numerics.eps");
  CHECK(error_field(json::parse(R"({"numerics": {"grid_lo": 1}})")) == "numerics.grid_hi");
  CHECK(error_field(json::parse(R"({"numerics": {"grid_lo": 1, "grid_hi": 0}})")) == "numerics.grid_hi");
  CHECK(error_field(json::parse(R"({"sampler": {"kind": "spline"}})")) == "sampler.kind");
  CHECK(error_field(json::parse(R"({"sampler": {"kind": "composed-file"}})")) == "sampler.file");
  CHECK(error_field(json::parse(R"({"system": {"kind": "iid", "probs": [1.0]}})")) == "system.probs");
  CHECK(error_field(json::parse(R"({"system": {"kind": "iid", "probs": [0.4, 0.4]}})")) == "system.probs");
  CHECK(error_field(json::parse(R"({"construction": {"columns_min": 9, "columns_max": 8}})")) ==
        "construction.columns_max");
  CHECK(error_field(json::parse(R"({"system": 3})")) == "system");
}

TEST_CASE("overrides") {
  json doc = json::parse(R"({"numerics": {"N": 10}})");
  apply_override(doc, "numerics.M", "7");
  apply_override(doc, "output.dir", "some/where");
  apply_override(doc, "walters.energies", "[0.5, 1]");
  CHECK(doc["numerics"]["N"] == 10);
  CHECK(doc["numerics"]["M"] == 7);
  CHECK(doc["output"]["dir"] == "some/where");
  CHECK(doc["walters"]["energies"].size() == 2);
  CHECK_THROWS_AS(apply_override(doc, "numerics..M", "1"), ConfigError);
}

TEST_CASE("system and sampler factories") {
  RunConfig c = parse_config(json::parse(R"({"system": {"kind": "iid", "levels": [0, 2], "probs": [0.5, 0.5]}})"));
  CHECK(std::holds_alternative<IidSystem>(make_system(c)));
  c = parse_config(json::parse(R"({"sampler": {"kind": "cosine", "lambda": 2, "phase": 0.25}})"));
  CHECK(std::holds_alternative<RotationSystem>(make_system(c)));
  CHECK(make_sampler(c)(0.0) == doctest::Approx(0.0).scale(1.0));
  c = parse_config(json::parse(R"({"sampler": {"kind": "constant", "c": 1.5}})"));
  CHECK(make_sampler(c)(0.3) == 1.5);

  c = parse_config(json::parse(R"({"sampler": {"kind": "composed-file", "file": "/nonexistent/v.json"}})"));
  try {
    make_sampler(c);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "sampler.file");
  }

  const auto path = std::filesystem::temp_directory_path() / "spectral_lab_cfg_sampler.json";
  write_json(path, sampler_to_json(ComposedSampler::cosine(2.0)));
  c.sampler.file = path.string();
  CHECK(make_sampler(c)(0.0) == 2.0);
}

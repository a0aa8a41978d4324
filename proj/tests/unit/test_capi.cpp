#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "grwalk/grwalk.h"

using Catch::Matchers::ContainsSubstring;
using Json = nlohmann::json;

namespace fs = std::filesystem;

namespace {

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  grw_string_free(s);
  return out;
}

struct Handle {
  grw_decomposition* p = nullptr;
  ~Handle() { grw_decomposition_free(p); }
};

const char* kSpec = R"({"signs": {"model": "markov", "persistence": 0.6},
                        "sizes": {"model": "iid_lognormal", "mu_log": -8, "sigma_log": 0.5},
                        "calendar": {"trading_days": 40}})";

}  // namespace

TEST_CASE("C API: build and inspect a decomposition") {
  const int8_t signs[] = {1, -1, 1};
  const double sizes[] = {0.1, 0.2, 0.3};
  const int64_t day = 11079;  // 2000-05-02
  const int64_t base = day * 86'400'000'000'000LL + 9LL * 3'600'000'000'000LL;
  const int64_t ts[] = {base, base + 1'000'000'000, base + 2'000'000'000};
  const int32_t days[] = {day, day, day};
  Handle h;
  REQUIRE(grw_decomposition_create(signs, sizes, ts, days, 3, &h.p) == GRW_OK);
  CHECK(grw_decomposition_size(h.p) == 3);
  int8_t s = 0;
  double w = 0.0;
  int64_t t = 0;
  REQUIRE(grw_decomposition_get(h.p, 1, &s, &w, &t) == GRW_OK);
  CHECK(s == -1);
  CHECK(w == 0.2);
  CHECK(t == ts[1]);
  CHECK(grw_decomposition_get(h.p, 3, &s, &w, &t) == GRW_ERROR_VALIDATION);

  const double bad[] = {0.1, 0.0, 0.3};
  Handle h2;
  CHECK(grw_decomposition_create(signs, bad, ts, days, 3, &h2.p) == GRW_ERROR_VALIDATION);
  CHECK_THAT(grw_last_error(), ContainsSubstring("zero size at index 1"));
  CHECK(h2.p == nullptr);
}

TEST_CASE("C API: scalar helpers") {
  double v = 0.0;
  REQUIRE(grw_predicted_variance(0.0, 1.0, 1.0, 0.25, 100, 0.0, 0.0, 0.0, &v) == GRW_OK);
  CHECK(v == 125.0);
  double r = 0.0;
  REQUIRE(grw_rho(0.01, 0.0001, &r) == GRW_OK);
  CHECK_THAT(r, Catch::Matchers::WithinRel(1.0, 1e-14));
  CHECK(grw_rho(0.01, 0.0, &r) == GRW_ERROR_VALIDATION);
  CHECK(grw_rho(0.01, 1.0, nullptr) == GRW_ERROR_VALIDATION);
  CHECK(std::string(grw_version()).size() > 0);
}

TEST_CASE("C API: ingest, analyze, model, shuffle, report") {
  const auto dir = fs::temp_directory_path() / "grwalk_capi_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  Handle h;
  char* stats = nullptr;
  REQUIRE(grw_ingest(GRWALK_FIXTURE_DIR "/quotes.csv", nullptr, &h.p, &stats) == GRW_OK);
  const auto st = Json::parse(take(stats));
  CHECK(st["trading_days"] == 10);
  CHECK(st["returns"] == grw_decomposition_size(h.p));

  const auto dec = (dir / "d.csv").string();
  REQUIRE(grw_decomposition_write(h.p, dec.c_str()) == GRW_OK);
  Handle back;
  REQUIRE(grw_decomposition_read(dec.c_str(), &back.p) == GRW_OK);
  CHECK(grw_decomposition_size(back.p) == grw_decomposition_size(h.p));

  char* analysis = nullptr;
  REQUIRE(grw_analyze(h.p, R"({"max_lag": 200})", &analysis) == GRW_OK);
  const auto a = take(analysis);
  CHECK(Json::parse(a)["kind"] == "analysis");
  std::ofstream(dir / "analysis.json") << a;

  char* model = nullptr;
  char* bins = nullptr;
  REQUIRE(grw_model(h.p, R"({"interval": "15m"})", &model, &bins) == GRW_OK);
  const auto m = take(model);
  CHECK(Json::parse(m)["bins"].size() == 10);
  CHECK(take(bins).starts_with("bin_mean_Vhat"));
  std::ofstream(dir / "model.json") << m;

  char* shuffle = nullptr;
  CHECK(grw_shuffle(h.p, R"({"mode": "signs"})", &shuffle, nullptr) == GRW_ERROR_VALIDATION);
  CHECK_THAT(grw_last_error(), ContainsSubstring("seed"));
  REQUIRE(grw_shuffle(h.p, R"({"mode": "block-joint", "block_lengths": [1, 30], "seed": 4,
                              "replicates": 3})",
                      &shuffle, nullptr) == GRW_OK);
  const auto s = take(shuffle);
  CHECK(Json::parse(s)["runs"].size() == 2);
  std::ofstream(dir / "shuffle.json") << s;

  const Json inputs = {{"analysis", (dir / "analysis.json").string()},
                       {"models", {(dir / "model.json").string()}},
                       {"experiments", {(dir / "shuffle.json").string()}},
                       {"out_dir", (dir / "bundle").string()}};
  char* report = nullptr;
  REQUIRE(grw_report(inputs.dump().c_str(), &report) == GRW_OK);
  grw_string_free(report);
  CHECK(fs::exists(dir / "bundle" / "rho_table.csv"));
  CHECK(fs::exists(dir / "bundle" / "rho_vs_L.csv"));

  Json missing = inputs;
  missing["experiments"] = {(dir / "absent.json").string()};
  CHECK(grw_report(missing.dump().c_str(), &report) == GRW_ERROR_VALIDATION);
  CHECK_THAT(grw_last_error(), ContainsSubstring("absent.json"));
  fs::remove_all(dir);
}

TEST_CASE("C API: synth and oracle") {
  Handle a, b;
  REQUIRE(grw_synth(kSpec, 7, &a.p) == GRW_OK);
  REQUIRE(grw_synth(kSpec, 7, &b.p) == GRW_OK);
  REQUIRE(grw_decomposition_size(a.p) == grw_decomposition_size(b.p));
  int8_t s1, s2;
  double w1, w2;
  int64_t t1, t2;
  for (size_t i = 0; i < grw_decomposition_size(a.p); i += 97) {
    grw_decomposition_get(a.p, i, &s1, &w1, &t1);
    grw_decomposition_get(b.p, i, &s2, &w2, &t2);
    REQUIRE((s1 == s2 && w1 == w2 && t1 == t2));
  }
  Handle bad;
  CHECK(grw_synth(R"({"length": 10, "oops": 1})", 7, &bad.p) == GRW_ERROR_VALIDATION);
  CHECK(grw_synth("not json", 7, &bad.p) == GRW_ERROR_VALIDATION);

  char* out = nullptr;
  const char* walk = R"({"length": 10})";
  CHECK(grw_oracle(walk, R"({"n": [10], "replicates": 1000})", &out) == GRW_ERROR_VALIDATION);
  REQUIRE(grw_oracle(walk, R"({"n": [10], "replicates": 20000, "seed": 1})", &out) == GRW_OK);
  const auto j = Json::parse(take(out));
  CHECK(j["kind"] == "oracle");
  CHECK(j["results"][0]["predicted_variance"] == 10.0);
}

TEST_CASE("C API: argument errors") {
  grw_decomposition* p = nullptr;
  CHECK(grw_ingest(nullptr, nullptr, &p, nullptr) == GRW_ERROR_VALIDATION);
  CHECK(grw_ingest("/nonexistent.csv", nullptr, &p, nullptr) == GRW_ERROR_VALIDATION);
  CHECK(grw_decomposition_read("/nonexistent.csv", &p) == GRW_ERROR_VALIDATION);
  CHECK(grw_ingest(GRWALK_FIXTURE_DIR "/quotes.csv", R"({"schema": "tape"})", &p, nullptr) ==
        GRW_ERROR_VALIDATION);
  CHECK(grw_ingest(GRWALK_FIXTURE_DIR "/quotes.csv", R"({"unknown": 1})", &p, nullptr) ==
        GRW_ERROR_VALIDATION);
  CHECK(p == nullptr);
  grw_decomposition_free(nullptr);
  grw_string_free(nullptr);
}

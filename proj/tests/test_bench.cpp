#include "qpoc/bench.hpp"
#include "qpoc/config.hpp"
#include "qpoc/linalg.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace qpoc;

namespace {

const char* const kThreeLevel = R"(
dim = 3
H0 = [0, 0, 0,
      0, 0.515916, 0,
      0, 0, 1]
V = [0, 0.707107, 0,
     0.707107, 0, 1,
     0, 1, 0]
T = 0.5
controls = 3
)";

std::string with(const std::string& extra) { return std::string(kThreeLevel) + extra; }

std::vector<std::string> header_of(const std::string& csv) {
  std::vector<std::string> cols;
  std::istringstream line(csv.substr(0, csv.find('\n')));
  std::string cell;
  while (std::getline(line, cell, ',')) cols.push_back(cell);
  return cols;
}

int line_count(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

/// Message of the ConfigError raised by `text`, or "" when it parses.
std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parses a full bench configuration") {
    const auto cfg = parse_config(with(R"(
mode = "bench-coherent"   # trailing comment
seed = 20240501
samples = 4
magnus_order = 2
chebyshev_order = 4
)"));
    CHECK(cfg.mode == Mode::bench_coherent);
    CHECK(cfg.dim == 3);
    CHECK(cfg.drift(1, 1) == Complex(0.515916, 0.0));
    CHECK(cfg.control(2, 1) == Complex(1.0, 0.0));
    CHECK(cfg.seed == 20240501u);
    CHECK(cfg.samples == 4);
    CHECK(cfg.truncation.magnus_order == 2);
    CHECK(cfg.truncation.chebyshev_order == 4);
    CHECK(cfg.multistart == 16);
    CHECK(cfg.relaxation_order == 0);
  }

  TEST_CASE("complex entries and state targets") {
    const auto cfg = parse_config(R"(
mode = "state"
dim = 2
H0 = [1, 0, 0, -1]
V = [0, [0, -1], [0, 1], 0]
psi0 = [1, 0]
psi_target = [0, [0, 1]]
)");
    CHECK(cfg.control(0, 1) == Complex(0.0, -1.0));
    CHECK((*cfg.psi_target)(1) == Complex(0.0, 1.0));
  }

  TEST_CASE("mode names round trip") {
    for (auto m : {Mode::gate, Mode::state, Mode::min_time_gate, Mode::min_time_state, Mode::identify,
                   Mode::bench_coherent, Mode::bench_identify}) {
      CHECK(parse_mode(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
  }

  TEST_CASE("errors carry line numbers and reasons") {
    CHECK(config_error(with("colour = 3\n")).find("unknown key 'colour'") != std::string::npos);
    CHECK(config_error("mode = \"gate\"\nthis is not valid\n").find("line 2") != std::string::npos);
    CHECK(config_error(with("T = [1,\n")).find("unterminated") != std::string::npos);
    CHECK(config_error(with("T = 0.5\n")).find("duplicate") != std::string::npos);
    CHECK_FALSE(config_error(with("mode = \"bench-coherent\"\nH1 = 2\n")).empty());
  }

  TEST_CASE("invalid matrices are rejected") {
    CHECK_FALSE(config_error("mode = \"gate\"\ndim = 2\nH0 = [1, 2, 3]\n").empty());
    CHECK_FALSE(config_error("mode = \"gate\"\ndim = 2\nH0 = [1, 2, 3, \"x\"]\n").empty());
    CHECK_FALSE(config_error("mode = \"gate\"\nH0 = [1, 0, 0, 1]\ndim = 2\n").empty());
    // Non-Hermitian drift.
    CHECK_FALSE(config_error("mode = \"bench-coherent\"\ndim = 2\nH0 = [1, 2, 0, 1]\nV = [0, 1, 1, 0]\n").empty());
  }

  TEST_CASE("mode-specific requirements") {
    CHECK_FALSE(config_error(with("mode = \"gate\"\n")).empty());
    CHECK_FALSE(config_error(with("mode = \"gate\"\ntarget_from_x = [0, 0]\n")).empty());
    CHECK(config_error(with("mode = \"gate\"\ntarget_from_x = [0, 0, 0]\n")).empty());
    CHECK_FALSE(config_error(with("mode = \"state\"\ntarget_from_x = [0, 0, 0]\n")).empty());
    CHECK_FALSE(config_error("mode = \"bench-identify\"\ndim = 2\nH0 = [1, 0, 0, -1]\ncoupling = [[0, 1, 0]]\n")
                    .empty());
    CHECK(config_error("mode = \"bench-identify\"\ndim = 2\nH0 = [1, 0, 0, -1]\ncoupling = [[0, 1, 0]]\n"
                       "z_true = [0.5]\n")
              .empty());
    CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
  }
}

TEST_SUITE("bench") {
  TEST_CASE("sample seeds are distinct and reproducible") {
    std::set<std::uint64_t> seen;
    for (int id = 0; id < 1000; ++id) seen.insert(sample_seed(42, id));
    CHECK(seen.size() == 1000);
    CHECK(sample_seed(42, 7) == sample_seed(42, 7));
    CHECK(sample_seed(42, 7) != sample_seed(43, 7));
  }

  TEST_CASE("column schema") {
    const auto c = coherent_columns(2);
    const std::vector<std::string> expected{
        "sample",       "x_star_1",         "x_star_2",    "x_hat_1",     "x_hat_2",
        "conv_x_star",  "conv_x_hat",       "conv_ok_x_star", "conv_ok_x_hat", "relaxation_order",
        "sdp_status",   "lower_bound",      "rank_one",    "singular_ratio", "f_x_star",
        "f_x_hat",      "bound_minus_f_x_star", "true_residual", "ok",     "error"};
    CHECK(c == expected);
    const auto i = identify_columns(3, 2);
    CHECK(i.front() == "sample");
    CHECK(i[1] == "control_1");
    CHECK(i[4] == "z_hat_1");
    CHECK(i[6] == "abs_error_1");
    CHECK(i.back() == "error");
  }

  TEST_CASE("sign symmetries of a polynomial") {
    const auto vars = Variables::numbered("z", 2);
    const auto z1 = variable(vars, 0);
    const auto z2 = variable(vars, 1);
    // Even in z1 and in z2 separately: all four sign patterns.
    CHECK(sign_symmetries(z1 * z1 + z2 * z2).size() == 4);
    // z1 z2 survives only the joint flip.
    const auto joint = sign_symmetries(z1 * z2 + z1 * z1);
    REQUIRE(joint.size() == 2);
    CHECK(joint[1] == std::vector<int>{-1, -1});
    CHECK(sign_symmetries(z1 + z2 * z2).size() == 2);
  }

  TEST_CASE("coherent bench: deterministic CSV and sane rows") {
    auto cfg = parse_config(with("mode = \"bench-coherent\"\nsamples = 2\nmultistart = 4\nseed = 11\n"));
    cfg.threads = 2;
    const auto a = run_bench_coherent(cfg);
    cfg.threads = 1;
    const auto b = run_bench_coherent(cfg);
    const std::string csv = to_csv(a);
    CHECK(csv == to_csv(b));
    CHECK(line_count(csv) == 3);
    CHECK(header_of(csv) == coherent_columns(3));
    for (const auto& s : a.samples) {
      CHECK(s.ok);
      CHECK(s.lower_bound <= s.f_x_star + 1e-6);
      CHECK(s.true_residual < 0.05);
    }
    const auto js = summary(a);
    CHECK(js["samples"] == 2);
    CHECK(js["failures"] == 0);
    CHECK(js.contains("timing"));
    CHECK(js["true_residual"].contains("median"));
  }

  TEST_CASE("identify bench: recovers couplings up to sign") {
    auto cfg = parse_config(R"(
mode = "bench-identify"
dim = 3
H0 = [0, 0, 0, 0, 0.515916, 0, 0, 0, 1]
coupling = [[0, 1, 0], [1, 2, 1]]
z_true = [0.707107, 1]
samples = 2
multistart = 4
seed = 5
)");
    const auto r = run_bench_identify(cfg);
    REQUIRE(r.samples.size() == 2);
    for (const auto& s : r.samples) {
      CHECK(s.ok);
      CHECK(s.max_error < 1e-3);
    }
    const auto csv = to_csv(r);
    CHECK(header_of(csv) == identify_columns(3, 2));
    CHECK(csv == to_csv(run_bench_identify(cfg)));
  }

  TEST_CASE("run_single covers every single-problem mode") {
    const auto gate = run_single(parse_config(with("mode = \"gate\"\ntarget_from_x = [0.4, -0.8, 0.6]\n")));
    CHECK(gate["mode"] == "gate");
    CHECK(gate["true_residual"].get<double>() < 1e-3);

    const auto state = run_single(
        parse_config(with("mode = \"state\"\npsi0 = [1, 0, 0]\ntarget_from_x = [0.4, -0.8, 0.6]\n")));
    CHECK(state["true_residual"].get<double>() < 1e-3);

    const auto ident = run_single(parse_config(R"(
mode = "identify"
dim = 3
H0 = [0, 0, 0, 0, 0.515916, 0, 0, 0, 1]
coupling = [[0, 1, 0], [1, 2, 1]]
z_true = [0.707107, 1]
control = [0.5, -0.3, 0.8]
)"));
    CHECK(ident["true_residual"].get<double>() < 1e-3);
  }
}

#include "qpoc/config.hpp"

#include "qpoc/linalg.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qpoc {

namespace {

using json = nlohmann::json;

struct Entry {
  json value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Removes a trailing comment and updates the bracket depth, ignoring both inside strings.
std::string scan_line(std::string_view line, int& depth) {
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '#') return std::string(line.substr(0, i));
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return std::string(line);
}

std::map<std::string, Entry> tokenize(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::string key;
  std::string value;
  int start = 0;
  int depth = 0;
  auto flush = [&] {
    json v;
    try {
      v = json::parse(value);
    } catch (const json::parse_error& e) {
      throw ConfigError("line " + std::to_string(start) + ": bad value for '" + key + "': " + e.what());
    }
    if (!entries.emplace(key, Entry{std::move(v), start}).second) {
      throw ConfigError("line " + std::to_string(start) + ": duplicate key '" + key + "'");
    }
    key.clear();
    value.clear();
  };
  while (std::getline(in, raw)) {
    ++lineno;
    if (!key.empty()) {
      value += "\n" + scan_line(raw, depth);
    } else {
      int d = 0;
      const std::string line = trim(scan_line(raw, d));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
      }
      key = trim(std::string_view(line).substr(0, eq));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      value = line.substr(eq + 1);
      start = lineno;
      depth = d;
    }
    if (depth < 0) throw ConfigError("line " + std::to_string(lineno) + ": unbalanced brackets");
    if (depth == 0) flush();
  }
  if (!key.empty()) throw ConfigError("line " + std::to_string(start) + ": unterminated value for '" + key + "'");
  return entries;
}

const std::set<std::string> kKnownKeys{
    "mode", "dim", "H0", "V", "T", "controls", "magnus_order",
    "chebyshev_order", "relaxation_order", "multistart", "seed", "samples", "box", "radius",
    "oracle_steps", "target", "target_from_x", "psi0", "psi_target", "eps", "t_max",
    "coupling", "z_true", "control", "out", "threads"};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> e) : entries_(std::move(e)) {
    for (const auto& [key, entry] : entries_) {
      if (!kKnownKeys.count(key)) {
        throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
      }
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  template <class T>
  std::optional<T> get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const Entry e = std::move(it->second);
    entries_.erase(it);
    try {
      return convert<T>(e.value, key);
    } catch (const json::exception& ex) {
      throw ConfigError("line " + std::to_string(e.line) + ": bad type for '" + key + "': " + ex.what());
    } catch (const ConfigError& ex) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + ex.what());
    }
  }

  void finish() const {
    if (!entries_.empty()) {
      const auto& [key, e] = *entries_.begin();
      throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + key + "'");
    }
  }

  int dim = 0;

 private:
  template <class T>
  T convert(const json& v, const std::string& key) const {
    if constexpr (std::is_same_v<T, Eigen::MatrixXcd>) {
      return matrix(v, key);
    } else if constexpr (std::is_same_v<T, Eigen::VectorXcd>) {
      return vector(v, key);
    } else if constexpr (std::is_same_v<T, std::vector<CouplingEntry>>) {
      std::vector<CouplingEntry> out;
      for (const auto& item : v) {
        if (!item.is_array() || item.size() != 3) {
          throw ConfigError("'" + key + "' entries must be [row, col, index]");
        }
        out.push_back({item[0].get<int>(), item[1].get<int>(), item[2].get<int>()});
      }
      return out;
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("'" + key + "' must be an integer");
      return v.get<T>();
    } else {
      return v.get<T>();
    }
  }

  static Complex scalar(const json& v, const std::string& key) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError("'" + key + "' entries must be numbers or [re, im] pairs");
  }

  Eigen::MatrixXcd matrix(const json& v, const std::string& key) const {
    if (dim < 1) throw ConfigError("'dim' must be set before '" + key + "'");
    if (!v.is_array() || v.size() != static_cast<std::size_t>(dim * dim)) {
      throw ConfigError("'" + key + "' must be a flat row-major array of dim*dim entries");
    }
    Eigen::MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) m(r, c) = scalar(v[static_cast<std::size_t>(r * dim + c)], key);
    }
    return m;
  }

  Eigen::VectorXcd vector(const json& v, const std::string& key) const {
    if (dim < 1) throw ConfigError("'dim' must be set before '" + key + "'");
    if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
      throw ConfigError("'" + key + "' must have dim entries");
    }
    Eigen::VectorXcd out(dim);
    for (int i = 0; i < dim; ++i) out(i) = scalar(v[static_cast<std::size_t>(i)], key);
    return out;
  }

  std::map<std::string, Entry> entries_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "gate") return Mode::gate;
  if (name == "state") return Mode::state;
  if (name == "min-time-gate") return Mode::min_time_gate;
  if (name == "min-time-state") return Mode::min_time_state;
  if (name == "identify") return Mode::identify;
  if (name == "bench-coherent") return Mode::bench_coherent;
  if (name == "bench-identify") return Mode::bench_identify;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::gate: return "gate";
    case Mode::state: return "state";
    case Mode::min_time_gate: return "min-time-gate";
    case Mode::min_time_state: return "min-time-state";
    case Mode::identify: return "identify";
    case Mode::bench_coherent: return "bench-coherent";
    case Mode::bench_identify: return "bench-identify";
  }
  return "unknown";
}

QuantumSystem RunConfig::system() const { return QuantumSystem(drift, control); }

CouplingPattern RunConfig::pattern() const { return CouplingPattern(dim, coupling, control); }

RunConfig parse_config(std::string_view text) {
  Reader r(tokenize(text));
  RunConfig cfg;
  const auto mode = r.get<std::string>("mode");
  require(mode.has_value(), "missing key 'mode'");
  cfg.mode = parse_mode(*mode);
  const auto dim = r.get<int>("dim");
  require(dim.has_value() && *dim >= 1, "'dim' must be a positive integer");
  cfg.dim = *dim;
  r.dim = cfg.dim;

  const auto drift = r.get<Eigen::MatrixXcd>("H0");
  require(drift.has_value(), "missing key 'H0'");
  cfg.drift = *drift;
  if (auto v = r.get<Eigen::MatrixXcd>("V")) {
    cfg.control = *v;
  } else {
    require(cfg.identification(), "missing key 'V'");
    cfg.control = Eigen::MatrixXcd::Zero(cfg.dim, cfg.dim);
  }

  cfg.horizon = r.get<double>("T").value_or(cfg.horizon);
  cfg.controls = r.get<int>("controls").value_or(cfg.controls);
  cfg.truncation.magnus_order = r.get<int>("magnus_order").value_or(cfg.truncation.magnus_order);
  cfg.truncation.chebyshev_order = r.get<int>("chebyshev_order").value_or(cfg.truncation.chebyshev_order);
  cfg.relaxation_order = r.get<int>("relaxation_order").value_or(cfg.relaxation_order);
  cfg.multistart = r.get<int>("multistart").value_or(cfg.multistart);
  cfg.seed = r.get<std::uint64_t>("seed").value_or(cfg.seed);
  cfg.samples = r.get<int>("samples").value_or(cfg.samples);
  cfg.box = r.get<double>("box").value_or(cfg.box);
  cfg.radius = r.get<double>("radius").value_or(cfg.radius);
  cfg.oracle_steps = r.get<int>("oracle_steps").value_or(cfg.oracle_steps);
  cfg.target = r.get<Eigen::MatrixXcd>("target");
  cfg.target_from_x = r.get<std::vector<double>>("target_from_x");
  cfg.psi0 = r.get<Eigen::VectorXcd>("psi0");
  cfg.psi_target = r.get<Eigen::VectorXcd>("psi_target");
  cfg.eps = r.get<double>("eps").value_or(cfg.eps);
  cfg.t_max = r.get<double>("t_max");
  cfg.coupling = r.get<std::vector<CouplingEntry>>("coupling").value_or(cfg.coupling);
  cfg.z_true = r.get<std::vector<double>>("z_true").value_or(cfg.z_true);
  cfg.control_x = r.get<std::vector<double>>("control").value_or(cfg.control_x);
  cfg.out = r.get<std::string>("out").value_or(cfg.out);
  cfg.threads = r.get<int>("threads").value_or(cfg.threads);
  r.finish();

  require(cfg.horizon > 0.0, "'T' must be positive");
  require(cfg.controls >= 1, "'controls' must be at least 1");
  require(cfg.truncation.magnus_order >= 1 && cfg.truncation.magnus_order <= 3, "'magnus_order' must be 1, 2 or 3");
  require(cfg.truncation.chebyshev_order >= 1, "'chebyshev_order' must be at least 1");
  require(cfg.multistart >= 0, "'multistart' must be nonnegative");
  require(cfg.samples >= 1, "'samples' must be at least 1");
  require(cfg.box > 0.0 && cfg.radius > 0.0, "'box' and 'radius' must be positive");
  require(cfg.oracle_steps >= 1, "'oracle_steps' must be at least 1");
  require(cfg.threads >= 0, "'threads' must be nonnegative");
  require(cfg.eps > 0.0, "'eps' must be positive");
  require(!cfg.t_max || *cfg.t_max > 0.0, "'t_max' must be positive");
  if (cfg.target_from_x) {
    require(cfg.target_from_x->size() == static_cast<std::size_t>(cfg.controls),
            "'target_from_x' must have 'controls' entries");
  }

  try {
    if (cfg.identification()) {
      require(!cfg.coupling.empty(), "identification needs a 'coupling' pattern");
      const CouplingPattern pattern = cfg.pattern();
      require(hermiticity_defect(cfg.drift) < 1e-12, "'H0' is not Hermitian");
      if (!cfg.z_true.empty()) {
        require(cfg.z_true.size() == static_cast<std::size_t>(pattern.unknowns()),
                "'z_true' must have one entry per unknown coupling");
      }
      if (cfg.mode == Mode::bench_identify) {
        require(!cfg.z_true.empty(), "bench-identify needs 'z_true'");
      } else {
        require(cfg.control_x.size() == static_cast<std::size_t>(cfg.controls),
                "identify needs 'control' with 'controls' entries");
        require(cfg.target.has_value() || !cfg.z_true.empty(), "identify needs 'target' or 'z_true'");
      }
    } else {
      (void)cfg.system();
    }
    if (cfg.target) (void)GateTarget(*cfg.target);
    switch (cfg.mode) {
      case Mode::gate:
      case Mode::min_time_gate:
        require(cfg.target.has_value() != cfg.target_from_x.has_value(),
                "give exactly one of 'target' and 'target_from_x'");
        break;
      case Mode::state:
      case Mode::min_time_state:
        require(cfg.psi0.has_value(), "state modes need 'psi0'");
        require(cfg.psi_target.has_value() != cfg.target_from_x.has_value(),
                "give exactly one of 'psi_target' and 'target_from_x'");
        if (cfg.psi_target) (void)StatePair(*cfg.psi0, *cfg.psi_target);
        else (void)StatePair(*cfg.psi0, *cfg.psi0);
        break;
      default:
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace qpoc

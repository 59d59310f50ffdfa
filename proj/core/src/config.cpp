#include "phase_engine/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cctype>
#include <string_view>

#include "phase_engine/io_util.hpp"

namespace phase_engine {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& key, const std::string& detail) {
  throw ConfigError("config key '" + key + "': " + detail);
}

double real_value(const char* key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    fail(key, "'" + v + "' is not a number");
  }
}

double positive(const char* key, const std::string& v) {
  const double x = real_value(key, v);
  if (!(x > 0.0)) fail(key, "must be > 0");
  return x;
}

double non_negative(const char* key, const std::string& v) {
  const double x = real_value(key, v);
  if (!(x >= 0.0)) fail(key, "must be >= 0");
  return x;
}

int int_value(const char* key, const std::string& v, int lo) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) fail(key, "'" + v + "' is not an integer");
  if (x < lo) fail(key, "must be >= " + std::to_string(lo));
  return x;
}

bool bool_value(const char* key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(key, "'" + v + "' is not a boolean (true|false)");
}

std::string word_value(const char* key, const std::string& v,
                       std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::string want;
  for (const char* a : allowed) {
    if (!want.empty()) want += "|";
    want += a;
  }
  fail(key, "'" + v + "' is not one of " + want);
}

CutoffKind cutoff_value(const char* key, const std::string& v) {
  if (v == "exponential") return CutoffKind::exponential;
  if (v == "gaussian") return CutoffKind::gaussian;
  if (v == "hard") return CutoffKind::hard;
  fail(key, "'" + v + "' is not one of exponential|gaussian|hard");
}

std::vector<std::string> emit_value(const char* key, const std::string& v) {
  std::vector<std::string> out;
  std::string_view rest = v;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    word_value(key, item, {"moments", "wigner", "transition", "validate"});
    for (const auto& seen : out)
      if (seen == item) fail(key, "duplicate target '" + item + "'");
    out.push_back(item);
  }
  return out;
}

std::string join_emit(const std::vector<std::string>& emit) {
  std::string out;
  for (const auto& e : emit) {
    if (!out.empty()) out += ", ";
    out += e;
  }
  return out;
}

struct Binding {
  const char* key;
  std::string (*get)(const RunConfig&);
  void (*set)(RunConfig&, const char* key, const std::string&);
};

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = {
      {"system.omega0", [](const RunConfig& c) { return format_double(c.system.omega0); },
       [](RunConfig& c, const char* k, const std::string& v) { c.system.omega0 = positive(k, v); }},
      {"system.mass", [](const RunConfig& c) { return format_double(c.system.mass); },
       [](RunConfig& c, const char* k, const std::string& v) { c.system.mass = positive(k, v); }},
      {"bath.eta", [](const RunConfig& c) { return format_double(c.bath.eta); },
       [](RunConfig& c, const char* k, const std::string& v) { c.bath.eta = non_negative(k, v); }},
      {"bath.s", [](const RunConfig& c) { return format_double(c.bath.s); },
       [](RunConfig& c, const char* k, const std::string& v) { c.bath.s = positive(k, v); }},
      {"bath.omega_c", [](const RunConfig& c) { return format_double(c.bath.omega_c); },
       [](RunConfig& c, const char* k, const std::string& v) { c.bath.omega_c = positive(k, v); }},
      {"bath.cutoff", [](const RunConfig& c) { return std::string(to_string(c.bath.cutoff)); },
       [](RunConfig& c, const char* k, const std::string& v) { c.bath.cutoff = cutoff_value(k, v); }},
      {"bath.n_modes", [](const RunConfig& c) { return std::to_string(c.n_modes); },
       [](RunConfig& c, const char* k, const std::string& v) { c.n_modes = int_value(k, v, 1); }},
      {"bath.omega_max_factor",
       [](const RunConfig& c) { return format_double(c.omega_max_factor); },
       [](RunConfig& c, const char* k, const std::string& v) { c.omega_max_factor = non_negative(k, v); }},
      {"bath.temperature", [](const RunConfig& c) { return format_double(c.temperature); },
       [](RunConfig& c, const char* k, const std::string& v) { c.temperature = non_negative(k, v); }},
      {"bath.scheme", [](const RunConfig& c) { return c.scheme; },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.scheme = word_value(k, v, {"gauss_legendre", "uniform_midpoint"});
       }},
      {"coupling.model", [](const RunConfig& c) { return c.coupling_model; },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.coupling_model = word_value(k, v, {"resonant", "qbm"});
       }},
      {"initial.kind", [](const RunConfig& c) { return c.initial_kind; },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.initial_kind = word_value(k, v, {"vacuum", "coherent", "thermal", "quench_thermal",
                                            "fock", "cat", "collective_fock1"});
       }},
      {"initial.q_bar", [](const RunConfig& c) { return format_double(c.q_bar); },
       [](RunConfig& c, const char* k, const std::string& v) { c.q_bar = real_value(k, v); }},
      {"initial.p_bar", [](const RunConfig& c) { return format_double(c.p_bar); },
       [](RunConfig& c, const char* k, const std::string& v) { c.p_bar = real_value(k, v); }},
      {"initial.n_bar", [](const RunConfig& c) { return format_double(c.n_bar); },
       [](RunConfig& c, const char* k, const std::string& v) { c.n_bar = non_negative(k, v); }},
      {"initial.omega_init", [](const RunConfig& c) { return format_double(c.omega_init); },
       [](RunConfig& c, const char* k, const std::string& v) { c.omega_init = positive(k, v); }},
      {"initial.temperature_init",
       [](const RunConfig& c) { return format_double(c.temperature_init); },
       [](RunConfig& c, const char* k, const std::string& v) { c.temperature_init = non_negative(k, v); }},
      {"initial.n", [](const RunConfig& c) { return std::to_string(c.fock_n); },
       [](RunConfig& c, const char* k, const std::string& v) { c.fock_n = int_value(k, v, 0); }},
      {"initial.alpha_re", [](const RunConfig& c) { return format_double(c.alpha_re); },
       [](RunConfig& c, const char* k, const std::string& v) { c.alpha_re = real_value(k, v); }},
      {"initial.alpha_im", [](const RunConfig& c) { return format_double(c.alpha_im); },
       [](RunConfig& c, const char* k, const std::string& v) { c.alpha_im = real_value(k, v); }},
      {"initial.parity", [](const RunConfig& c) { return std::to_string(c.parity); },
       [](RunConfig& c, const char* k, const std::string& v) {
         const int p = int_value(k, v, -1);
         if (p != 1 && p != -1) fail(k, "must be +1 or -1");
         c.parity = p;
       }},
      {"evolution.t_max", [](const RunConfig& c) { return format_double(c.evolution.t_max); },
       [](RunConfig& c, const char* k, const std::string& v) { c.evolution.t_max = non_negative(k, v); }},
      {"evolution.dt", [](const RunConfig& c) { return format_double(c.evolution.dt); },
       [](RunConfig& c, const char* k, const std::string& v) { c.evolution.dt = non_negative(k, v); }},
      {"evolution.store_every",
       [](const RunConfig& c) { return std::to_string(c.evolution.store_every); },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.evolution.store_every = int_value(k, v, 0);
       }},
      {"evolution.method", [](const RunConfig& c) { return c.method; },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.method = word_value(k, v, {"diagonalization", "volterra"});
       }},
      {"grid.auto", [](const RunConfig& c) { return std::string(c.grid_auto ? "true" : "false"); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid_auto = bool_value(k, v); }},
      {"grid.q_min", [](const RunConfig& c) { return format_double(c.grid.q_min); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid.q_min = real_value(k, v); }},
      {"grid.q_max", [](const RunConfig& c) { return format_double(c.grid.q_max); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid.q_max = real_value(k, v); }},
      {"grid.p_min", [](const RunConfig& c) { return format_double(c.grid.p_min); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid.p_min = real_value(k, v); }},
      {"grid.p_max", [](const RunConfig& c) { return format_double(c.grid.p_max); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid.p_max = real_value(k, v); }},
      {"grid.n_q", [](const RunConfig& c) { return std::to_string(c.grid.n_q); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid.n_q = int_value(k, v, 2); }},
      {"grid.n_p", [](const RunConfig& c) { return std::to_string(c.grid.n_p); },
       [](RunConfig& c, const char* k, const std::string& v) { c.grid.n_p = int_value(k, v, 2); }},
      {"transition.eta_min", [](const RunConfig& c) { return format_double(c.eta_min); },
       [](RunConfig& c, const char* k, const std::string& v) { c.eta_min = positive(k, v); }},
      {"transition.eta_max", [](const RunConfig& c) { return format_double(c.eta_max); },
       [](RunConfig& c, const char* k, const std::string& v) { c.eta_max = positive(k, v); }},
      {"transition.n_eta", [](const RunConfig& c) { return std::to_string(c.n_eta); },
       [](RunConfig& c, const char* k, const std::string& v) { c.n_eta = int_value(k, v, 1); }},
      {"transition.relative",
       [](const RunConfig& c) { return std::string(c.eta_relative ? "true" : "false"); },
       [](RunConfig& c, const char* k, const std::string& v) { c.eta_relative = bool_value(k, v); }},
      {"output.format", [](const RunConfig& c) { return c.format; },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.format = word_value(k, v, {"csv", "json"});
       }},
      {"output.path", [](const RunConfig& c) { return c.path; },
       [](RunConfig& c, const char* k, const std::string& v) {
         if (v.empty()) fail(k, "must be a nonempty path");
         c.path = v;
       }},
      {"output.emit", [](const RunConfig& c) { return join_emit(c.emit); },
       [](RunConfig& c, const char* k, const std::string& v) { c.emit = emit_value(k, v); }},
      {"output.wigner_stride",
       [](const RunConfig& c) { return std::to_string(c.wigner_stride); },
       [](RunConfig& c, const char* k, const std::string& v) {
         c.wigner_stride = int_value(k, v, 0);
       }},
  };
  return table;
}

void apply_json(RunConfig& config, const nlohmann::json& node, const std::string& prefix) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it)
      apply_json(config, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    return;
  }
  std::string value;
  if (node.is_string()) {
    value = node.get<std::string>();
  } else if (node.is_boolean()) {
    value = node.get<bool>() ? "true" : "false";
  } else if (node.is_number_integer()) {
    value = std::to_string(node.get<long long>());
  } else if (node.is_number()) {
    value = format_double(node.get<double>());
  } else if (node.is_array()) {
    for (const auto& entry : node) {
      if (!entry.is_string())
        throw ConfigError("config key '" + prefix + "': array entries must be strings");
      if (!value.empty()) value += ", ";
      value += entry.get<std::string>();
    }
  } else {
    throw ConfigError("config key '" + prefix + "': unsupported value type");
  }
  apply_override(config, prefix, value);
}

DiscretizationScheme scheme_enum(const std::string& word) {
  return word == "uniform_midpoint" ? DiscretizationScheme::uniform_midpoint
                                    : DiscretizationScheme::gauss_legendre;
}

}  // namespace

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  for (const Binding& b : bindings()) {
    if (key == b.key) {
      b.set(config, b.key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json tree;
    try {
      tree = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    if (!tree.is_object()) throw ConfigError("config JSON: top level must be an object");
    apply_json(config, tree, "");
    return config;
  }
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_override(config, trim(std::string_view(line).substr(0, eq)),
                     trim(std::string_view(line).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::string& file_path) {
  std::string text;
  try {
    text = read_text_file(file_path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  return parse_config(text);
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Binding& b : bindings()) {
    out += b.key;
    out += " = ";
    out += b.get(config);
    out += "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& config) {
  return to_hex(fnv1a64(serialize_config(config)));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  keys.reserve(bindings().size());
  for (const Binding& b : bindings()) keys.emplace_back(b.key);
  return keys;
}

DiscreteBath make_bath(const RunConfig& config) {
  config.bath.validate();
  return discretize(config.bath, config.n_modes, config.omega_max_factor,
                    scheme_enum(config.scheme), config.temperature);
}

InitialState make_initial(const RunConfig& config, const DiscreteBath& bath) {
  const bool gaussian = config.initial_kind == "vacuum" || config.initial_kind == "coherent" ||
                        config.initial_kind == "thermal" || config.initial_kind == "quench_thermal";
  if (config.coupling_model == "qbm" && !gaussian)
    throw ConfigError("config key 'initial.kind': '" + config.initial_kind +
                      "' needs coupling.model = resonant");
  if (config.initial_kind == "coherent") return CoherentState{config.q_bar, config.p_bar};
  if (config.initial_kind == "thermal") return ThermalState{config.n_bar};
  if (config.initial_kind == "quench_thermal")
    return QuenchThermalState{config.omega_init, config.temperature_init};
  if (config.initial_kind == "fock") return FockState{config.fock_n};
  if (config.initial_kind == "cat")
    return CatState{config.alpha_re, config.alpha_im, config.parity};
  if (config.initial_kind == "collective_fock1") {
    if (config.temperature > 0.0)
      throw ConfigError("config key 'initial.kind': collective_fock1 needs bath.temperature = 0");
    return make_collective_fock(bath, config.system);
  }
  return VacuumState{};
}

PropagatorRecord make_record(const RunConfig& config, const DiscreteBath& bath) {
  if (config.coupling_model == "qbm") return qbm_propagate(bath, config.system, config.evolution);
  const auto method = config.method == "volterra" ? PropagatorMethod::volterra
                                                  : PropagatorMethod::diagonalization;
  return make_resonant_record(bath, config.system, config.evolution, method);
}

std::vector<double> sweep_etas(const RunConfig& config) {
  if (config.eta_max < config.eta_min)
    throw ConfigError("config key 'transition.eta_max': must be >= transition.eta_min");
  const double scale =
      config.eta_relative ? critical_coupling(config.bath, config.system) : 1.0;
  std::vector<double> etas(config.n_eta);
  const double step =
      config.n_eta > 1 ? (config.eta_max - config.eta_min) / (config.n_eta - 1) : 0.0;
  for (int i = 0; i < config.n_eta; ++i) etas[i] = scale * (config.eta_min + step * i);
  return etas;
}

}  // namespace phase_engine

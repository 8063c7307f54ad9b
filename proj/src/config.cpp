#include "bmc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <json.hpp>

#include "bmc/error.hpp"
#include "bmc/io.hpp"

namespace bmc {

namespace {

const ConfigKey* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : config_schema())
    if (section == k.section && key == k.key) return &k;
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& k : config_schema())
    if (s == k.section) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t c = s.find(',', start);
    out.push_back(trim(s.substr(start, c == std::string::npos ? std::string::npos : c - start)));
    if (c == std::string::npos) break;
    start = c + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const ConfigKey& k, const std::string& v, const char* what) {
  fail(ErrorKind::Config, std::string("[") + k.section + "] " + k.key + " = '" + v + "': " + what);
}

double parse_real(const ConfigKey& k, const std::string& v) {
  double x = 0.0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(k, v, "expected a real number");
  return x;
}

std::int64_t parse_int(const ConfigKey& k, const std::string& v) {
  std::int64_t x = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    // accept integral reals such as 1e4
    double d = parse_real(k, v);
    if (d != std::floor(d) || std::fabs(d) > 9e15) bad_value(k, v, "expected an integer");
    return std::int64_t(d);
  }
  return x;
}

std::string canonical_value(const ConfigKey& k, const std::string& text) {
  std::string v = trim(text);
  switch (k.type) {
    case ValueType::Int:
      return std::to_string(parse_int(k, v));
    case ValueType::UInt: {
      std::uint64_t x = 0;
      auto r = std::from_chars(v.data(), v.data() + v.size(), x);
      if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(k, v, "expected an unsigned integer");
      return std::to_string(x);
    }
    case ValueType::Real:
      return format_double(parse_real(k, v));
    case ValueType::RealOrAuto:
      if (v == "calibrate" || v == "auto") return v;
      return format_double(parse_real(k, v));
    case ValueType::Str:
      if (v.find_first_of("\n\r") != std::string::npos) bad_value(k, v, "line breaks not allowed");
      return v;
    case ValueType::IntList:
    case ValueType::RealList:
    case ValueType::StrList: {
      std::string out;
      for (const auto& item : split_list(v)) {
        if (item.empty()) bad_value(k, v, "empty list item");
        std::string c = k.type == ValueType::IntList    ? std::to_string(parse_int(k, item))
                         : k.type == ValueType::RealList ? format_double(parse_real(k, item))
                                                         : item;
        out += (out.empty() ? "" : ", ") + c;
      }
      return out;
    }
  }
  return v;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"experiment", "kind", ValueType::Str, "mc-rate",
       "mc-rate | mlmc-run | allocate | tensor-norm | counterexample | property-suite"},
      {"experiment", "measure", ValueType::Str, "moment", "mc-rate only: moment (error vs M) | strong (error vs N_l)"},
      {"experiment", "runs", ValueType::Int, "64", "independent repetitions R"},
      {"experiment", "trials", ValueType::Int, "20000", "property-suite: Monte Carlo trials per check (>= 10000)"},
      {"experiment", "seed", ValueType::UInt, "1", "root seed (overridden by --seed)"},

      {"model", "kind", ValueType::Str, "gaussian",
       "gaussian | signed_basis | uniform_basis | constant | elliptic1d_loggauss | elliptic1d_forcing | "
       "elliptic2d_forcing | sde"},
      {"model", "n", ValueType::Int, "4", "dimension for the sequence-space samplers"},
      {"model", "constant", ValueType::RealList, "1", "coefficients of the constant sampler"},
      {"model", "kl_sigma", ValueType::RealList, "0.5, 0.25, 0.125, 0.0625", "KL amplitudes sigma_m"},
      {"model", "kl_length", ValueType::Real, "1", "domain length b"},
      {"model", "kl_breakpoints", ValueType::RealList, "", "partition of [0,b] for piecewise field bounds"},
      {"model", "base_elements", ValueType::Int, "1", "N_l = base_elements * refinement^l"},
      {"model", "forcing_mean", ValueType::Real, "1", "mean of the random forcing"},
      {"model", "forcing_amplitudes", ValueType::RealList, "", "scales of the forcing modes (empty: deterministic)"},
      {"model", "forcing_eta", ValueType::Str, "gaussian", "gaussian | student_t"},
      {"model", "forcing_dof", ValueType::Real, "10", "Student-t degrees of freedom"},
      {"model", "sde_preset", ValueType::Str, "gbm", "gbm | ou | linear | const_drift | zero"},
      {"model", "sde_params", ValueType::RealList, "", "preset parameters"},
      {"model", "sde_x0", ValueType::RealList, "1", "initial value (one entry per component)"},
      {"model", "sde_T", ValueType::Real, "1", "time horizon"},
      {"model", "sde_n1", ValueType::Int, "4", "steps on level 1"},
      {"model", "sde_factor", ValueType::Int, "2", "step refinement factor"},
      {"model", "sde_output_level", ValueType::Int, "10", "level whose grid carries all paths"},

      {"space", "p", ValueType::Real, "2", "integrability exponent of l_p / W^1_p"},
      {"space", "delta", ValueType::Real, "0", "Hölder exponent"},
      {"space", "k", ValueType::Int, "2", "moment order"},
      {"space", "q", ValueType::RealOrAuto, "auto", "L_q exponent of the reported error; auto = max(2, p)"},

      {"estimator", "M", ValueType::IntList, "16, 32, 64, 128, 256, 512, 1024, 2048, 4096", "sample sizes"},
      {"estimator", "level", ValueType::Int, "4", "model level sampled by mc-rate for level models"},
      {"estimator", "levels", ValueType::IntList, "3, 4, 5, 6, 7, 8, 9", "levels of a strong-error sweep"},
      {"estimator", "reference_level", ValueType::Int, "12", "reference level (strong sweep)"},
      {"estimator", "reference_samples", ValueType::Int, "20000", "samples of a fine-level reference moment"},
      {"estimator", "norm", ValueType::Str, "eps_s", "eps_s | pi_upper | hilbert_k2_exact | hilbert_k2_nuclear"},
      {"estimator", "restarts", ValueType::Int, "32", "multi-start count of the norm ascent"},

      {"allocator", "alpha", ValueType::Real, "1", "bias rate"},
      {"allocator", "beta", ValueType::Real, "1", "strong coupling rate"},
      {"allocator", "gamma", ValueType::Real, "1", "cost rate"},
      {"allocator", "C_alpha", ValueType::RealOrAuto, "calibrate", "bias constant or 'calibrate'"},
      {"allocator", "C_star", ValueType::RealOrAuto, "calibrate", "sampling constant or 'calibrate'"},
      {"allocator", "C_ML", ValueType::Real, "1", "multilevel constant used by calibration"},
      {"allocator", "epsilon", ValueType::RealList, "0.25, 0.125, 0.0625, 0.03125", "target accuracies"},
      {"allocator", "max_samples", ValueType::Real, "1e9", "hard cap on any M_l"},
      {"allocator", "max_level", ValueType::Int, "16", "length of the level sequence"},
      {"allocator", "pilot_levels", ValueType::IntList, "2, 3", "levels sampled by calibration"},
      {"allocator", "pilot_samples", ValueType::Int, "4096", "samples per pilot level"},
      {"allocator", "reference_extra", ValueType::Int, "2", "reference at level L + reference_extra"},

      {"tensor", "input", ValueType::Str, "", "tensor JSON file"},
      {"tensor", "norms", ValueType::StrList, "eps_s, pi_upper", "norm kinds to report"},

      {"counterexample", "q", ValueType::Real, "1", "L_q exponent"},
      {"counterexample", "M", ValueType::IntList, "2, 4, 8", "sample sizes evaluated at n*(q, M)"},
      {"counterexample", "eps_n", ValueType::Int, "256", "fixed dimension of the eps-norm sweep"},
      {"counterexample", "eps_M", ValueType::IntList, "256, 512, 1024, 2048, 4096, 8192, 16384",
       "sample sizes of the eps sweep (M >= eps_n gives the asymptotic rate)"},
  };
  return schema;
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : config_schema()) values_[k.section][k.key] = canonical_value(k, k.default_value);
}

void ExperimentConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  require(known_section(section), ErrorKind::Config, "unknown config section [" + section + "]");
  const ConfigKey* k = find_key(section, key);
  require(k != nullptr, ErrorKind::Config, "unknown config key '" + key + "' in [" + section + "]");
  values_[section][key] = canonical_value(*k, value);
}

ExperimentConfig ExperimentConfig::parse_ini(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::map<std::string, int> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = trim(text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string at = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      require(line.back() == ']', ErrorKind::Config, at + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(known_section(section), ErrorKind::Config, at + "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::Config, at + "expected key = value");
    require(!section.empty(), ErrorKind::Config, at + "key outside any section");
    std::string key = trim(line.substr(0, eq));
    std::string id = section + "." + key;
    require(seen[id]++ == 0, ErrorKind::Config, at + "duplicate key " + id);
    try {
      cfg.set(section, key, line.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorKind::Config, at + e.message());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("invalid JSON config: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Config, "JSON config must be an object of sections");
  ExperimentConfig cfg;
  auto scalar_text = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    if (v.is_number()) return format_double(v.get<double>());
    fail(ErrorKind::Config, "unsupported JSON config value " + v.dump());
  };
  for (const auto& [section, body] : j.items()) {
    require(body.is_object(), ErrorKind::Config, "section " + section + " must be an object");
    for (const auto& [key, v] : body.items()) {
      std::string s;
      if (v.is_array()) {
        for (const auto& item : v) s += (s.empty() ? "" : ",") + scalar_text(item);
      } else {
        s = scalar_text(v);
      }
      cfg.set(section, key, s);
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  auto it = std::find_if(text.begin(), text.end(), [](char c) { return !std::isspace((unsigned char)c); });
  return (it != text.end() && *it == '{') ? parse_json(text) : parse_ini(text);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string ExperimentConfig::canonical() const {
  std::string out, section;
  for (const auto& k : config_schema()) {
    if (section != k.section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    const std::string& v = values_.at(k.section).at(k.key);
    out += std::string(k.key) + " =" + (v.empty() ? "" : " " + v) + "\n";
  }
  return out;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& k : config_schema()) j[k.section][k.key] = values_.at(k.section).at(k.key);
  return j.dump(2);
}

const std::string& ExperimentConfig::raw(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  require(s != values_.end() && s->second.count(key), ErrorKind::Config, "no config key " + section + "." + key);
  return s->second.at(key);
}

std::int64_t ExperimentConfig::get_int(const std::string& section, const std::string& key) const {
  return std::stoll(raw(section, key));
}
std::uint64_t ExperimentConfig::get_uint(const std::string& section, const std::string& key) const {
  return std::stoull(raw(section, key));
}
double ExperimentConfig::get_real(const std::string& section, const std::string& key) const {
  const std::string& v = raw(section, key);
  require(v != "calibrate" && v != "auto", ErrorKind::Config, section + "." + key + " is not a number");
  return std::stod(v);
}
std::string ExperimentConfig::get_str(const std::string& section, const std::string& key) const {
  return raw(section, key);
}
bool ExperimentConfig::is_set(const std::string& section, const std::string& key) const {
  const std::string& v = raw(section, key);
  return v != "calibrate" && v != "auto";
}
std::vector<std::int64_t> ExperimentConfig::get_ints(const std::string& section, const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& s : split_list(raw(section, key))) out.push_back(std::stoll(s));
  return out;
}
std::vector<double> ExperimentConfig::get_reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_list(raw(section, key))) out.push_back(std::stod(s));
  return out;
}
std::vector<std::string> ExperimentConfig::get_strs(const std::string& section, const std::string& key) const {
  return split_list(raw(section, key));
}

std::string config_help() {
  std::string out, section;
  for (const auto& k : config_schema()) {
    if (section != k.section) {
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += "  " + std::string(k.key) + " (default '" + k.default_value + "'): " + k.help + "\n";
  }
  return out;
}

}  // namespace bmc

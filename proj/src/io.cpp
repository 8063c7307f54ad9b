#include "bmc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bmc/error.hpp"

namespace bmc {

using nlohmann::ordered_json;

namespace {

ordered_json space_json(const SpaceDescriptor& s) {
  ordered_json j;
  j["kind"] = to_string(s.kind);
  j["p"] = s.p;
  j["delta"] = s.delta;
  j["grid"] = s.grid;
  j["boundary"] = to_string(s.boundary);
  j["seq_dim"] = s.seq_dim;
  j["value_dim"] = s.value_dim;
  return j;
}

SpacePtr space_from(const ordered_json& j) {
  try {
    auto s = std::make_shared<SpaceDescriptor>();
    s->kind = space_kind_from_string(j.at("kind").get<std::string>());
    s->p = j.at("p").get<double>();
    s->delta = j.value("delta", 0.0);
    s->grid = j.value("grid", std::vector<double>{});
    s->boundary = boundary_from_string(j.value("boundary", std::string("none")));
    s->value_dim = j.value("value_dim", std::size_t(1));
    s->seq_dim = j.value("seq_dim", std::size_t(0));
    if (s->kind == SpaceKind::SequenceLp && s->seq_dim == 0 && j.contains("coeffs"))
      s->seq_dim = j["coeffs"].size();
    s->validate();
    return s;
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed space JSON: ") + e.what());
  }
}

ordered_json parse(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string vector_to_json(const BanachVector& v) {
  ordered_json j = space_json(v.space());
  j["coeffs"] = v.coeffs();
  return j.dump();
}

BanachVector vector_from_json(const std::string& text) {
  ordered_json j = parse(text);
  SpacePtr s = space_from(j);
  try {
    return BanachVector(s, j.at("coeffs").get<std::vector<double>>());
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed vector JSON: ") + e.what());
  }
}

std::string tensor_to_json(const SymmetricTensorRep& U) {
  ordered_json j;
  j["k"] = U.k();
  j["space"] = space_json(U.space());
  ordered_json terms = ordered_json::array();
  for (std::size_t t = 0; t < U.rank(); ++t) {
    auto x = U.vector(t);
    terms.push_back({{"c", U.weight(t)}, {"coeffs", std::vector<double>(x.begin(), x.end())}});
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

SymmetricTensorRep tensor_from_json(const std::string& text) {
  ordered_json j = parse(text);
  try {
    SymmetricTensorRep U(j.at("k").get<int>(), space_from(j.at("space")));
    for (const auto& t : j.at("terms"))
      U.add(t.at("c").get<double>(), BanachVector(U.space_ptr(), t.at("coeffs").get<std::vector<double>>()));
    return U;
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed tensor JSON: ") + e.what());
  }
}

std::string plan_to_json(const MlmcPlan& plan) {
  const auto& in = plan.in;
  CostPrediction c = predicted_cost(plan);
  ordered_json j;
  j["alpha"] = in.alpha;
  j["beta"] = in.beta;
  j["gamma"] = in.gamma;
  j["p"] = in.p;
  j["p_prime"] = plan.p_prime;
  j["epsilon"] = in.epsilon;
  j["C_alpha"] = in.C_alpha;
  j["C_star"] = in.C_star;
  j["N_seq"] = in.N;
  j["max_samples"] = in.max_samples;
  j["L"] = plan.L;
  j["M"] = plan.M;
  j["S_L"] = plan.S_L;
  j["regime"] = to_string(plan.regime);
  j["predicted_cost"] = c.cost;
  j["cost_exponent"] = c.exponent;
  j["log_factor"] = c.log_factor;
  j["single_level_exponent"] = c.single_level_exponent;
  j["error_budget"] = error_budget(plan);
  return j.dump(2);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string norm_report_csv(const std::vector<NormRecord>& rows) {
  std::string out = "norm_kind,value,exact_flag,restarts,seed\n";
  for (const auto& r : rows)
    out += r.norm_kind + "," + format_double(r.value) + "," + (r.exact ? "1" : "0") + "," +
           std::to_string(r.restarts) + "," + r.seed + "\n";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorKind::Config, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorKind::Config, "cannot write " + path);
  out << text;
}

}  // namespace bmc

#include "walras/model_io.hpp"

#include <fstream>
#include <sstream>

namespace walras {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, "instance key '" + key + "': " + what);
}

const json& field(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) bad(key, "missing");
  return *it;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

Vector vector_of(const json& v, const std::string& key, Eigen::Index expected) {
  if (!v.is_array()) bad(key, "expected an array");
  if (static_cast<Eigen::Index>(v.size()) != expected) {
    bad(key, "expected length " + std::to_string(expected) + ", got " + std::to_string(v.size()));
  }
  Vector out(expected);
  for (Eigen::Index i = 0; i < expected; ++i) out(i) = number(v[static_cast<std::size_t>(i)], key);
  return out;
}

Matrix matrix_of(const json& v, const std::string& key, Eigen::Index rows, Eigen::Index cols) {
  if (!v.is_array()) bad(key, "expected an array of rows");
  if (static_cast<Eigen::Index>(v.size()) != rows) {
    bad(key, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) out.row(i) = vector_of(v[static_cast<std::size_t>(i)], key, cols);
  return out;
}

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(to_json(Vector(M.row(i).transpose())));
  return rows;
}

json to_json(Interval r) { return json::array({r.lo, r.hi}); }

}  // namespace

ModelInstance instance_from_json(const json& j, std::optional<double> eta) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "instance must be a JSON object");
  const auto& jn = field(j, "n");
  const auto& jm = field(j, "m");
  if (!jn.is_number_integer() || jn.get<long long>() < 1) bad("n", "expected a positive integer");
  if (!jm.is_number_integer() || jm.get<long long>() < 0) bad("m", "expected a nonnegative integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long long>());
  const auto m = static_cast<Eigen::Index>(jm.get<long long>());

  AgentCosts costs;
  costs.C = matrix_of(field(j, "C"), "C", n, n);
  costs.B = matrix_of(field(j, "B"), "B", n, n);
  costs.l = vector_of(field(j, "l"), "l", n);
  costs.M = number(field(j, "M"), "M");

  FeasibleSet X;
  X.A = m > 0 ? matrix_of(field(j, "A"), "A", m, n) : Matrix(0, n);
  X.b = vector_of(field(j, "b"), "b", m);

  const json& jd = field(j, "domain");
  if (!jd.is_object()) bad("domain", "expected an object");
  const json& kind = field(jd, "kind");
  PriceDomain domain = PriceDomain::orthant();
  if (kind == "box") {
    domain = PriceDomain::box(vector_of(field(jd, "lower"), "domain.lower", n),
                              vector_of(field(jd, "upper"), "domain.upper", n));
  } else if (kind != "orthant") {
    bad("domain.kind", "expected \"orthant\" or \"box\"");
  }

  Vector p0 = vector_of(field(j, "p0"), "p0", n);
  return make_instance(std::move(costs), std::move(X), std::move(domain), std::move(p0), eta);
}

json instance_to_json(const ModelInstance& inst, const GenMetadata* meta) {
  json j;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["C"] = to_json(inst.costs.C);
  j["B"] = to_json(inst.costs.B);
  j["l"] = to_json(inst.costs.l);
  j["M"] = inst.costs.M;
  j["A"] = to_json(inst.feasible.A);
  j["b"] = to_json(inst.feasible.b);
  if (inst.domain.kind() == PriceDomain::Kind::Box) {
    j["domain"] = {{"kind", "box"}, {"lower", to_json(inst.domain.lower())}, {"upper", to_json(inst.domain.upper())}};
  } else {
    j["domain"] = {{"kind", "orthant"}};
  }
  j["p0"] = to_json(inst.p0);
  if (meta) {
    const GenConfig& c = meta->config;
    j["gen"] = {
        {"generator", "xoshiro256** 1.0 / splitmix64 streams"},
        {"seed", meta->seed},
        {"ranges",
         {{"factor", to_json(c.factor)},
          {"constraint", to_json(c.constraint)},
          {"p0", to_json(c.p0)},
          {"l", json::array({0.0, c.l_max})},
          {"box", to_json(c.box)}}},
        {"floor_fraction", c.floor_fraction},
        {"min_eigenvalue", c.min_eigenvalue},
        {"factor_redraws", meta->factor_redraws},
        {"attempts", meta->attempts},
        {"note", "l, M, box bounds and eta are generator choices, not reproduced data"},
    };
  }
  return j;
}

ModelInstance load_instance(const std::string& path, std::optional<double> eta) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open instance file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON in '") + path + "': " + e.what());
  }
  return instance_from_json(j, eta);
}

void save_instance(const std::string& path, const ModelInstance& instance, const GenMetadata* meta) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + path + "'");
  out << instance_to_json(instance, meta).dump(2) << "\n";
}

}  // namespace walras

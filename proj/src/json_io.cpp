// Copyright 2026 The dpvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpvi/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace dpvi {

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

namespace {

Json matrix_to_json(const Matrix& m) {
  Json flat = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Matrix matrix_from_json(const Json& flat, int rows, int cols) {
  if (static_cast<int>(flat.size()) != rows * cols)
    throw std::invalid_argument("matrix array has wrong length");
  Matrix m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = flat[k++].get<double>();
  return m;
}

}  // namespace

Json set_to_json(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return Json{{"type", "ball"},
                      {"center", vector_to_json(s.center)},
                      {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return Json{{"type", "box"},
                      {"lower", vector_to_json(s.lower)},
                      {"upper", vector_to_json(s.upper)}};
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return Json{{"type", "simplex"}, {"dim", s.dim}, {"scale", s.scale}};
        } else {
          Json factors = Json::array();
          for (const auto& f : s.factors) factors.push_back(set_to_json(f));
          return Json{{"type", "product"}, {"factors", factors}};
        }
      },
      set.variant());
}

FeasibleSet set_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ball")
    return FeasibleSet::ball(vector_from_json(j.at("center")),
                             j.at("radius").get<double>());
  if (type == "box")
    return FeasibleSet::box(vector_from_json(j.at("lower")),
                            vector_from_json(j.at("upper")));
  if (type == "simplex")
    return FeasibleSet::simplex(j.at("dim").get<int>(),
                                j.at("scale").get<double>());
  if (type == "product") {
    std::vector<FeasibleSet> factors;
    for (const auto& f : j.at("factors")) factors.push_back(set_from_json(f));
    return FeasibleSet::product(std::move(factors));
  }
  throw std::invalid_argument("unknown set type: " + type);
}

Json payload_to_json(const Datapoint& dp) {
  if (const auto* c = std::get_if<ConstantPayload>(&dp))
    return Json{{"beta", vector_to_json(c->beta)}};
  if (const auto* b = std::get_if<BilinearPayload>(&dp))
    return Json{{"d1", b->A.rows()},
                {"d2", b->A.cols()},
                {"A", matrix_to_json(b->A)},
                {"a", vector_to_json(b->a)},
                {"b", vector_to_json(b->b)}};
  const auto& q = std::get<QuadraticPayload>(dp);
  return Json{{"dim", q.Q.rows()},
              {"Q", matrix_to_json(q.Q)},
              {"c", vector_to_json(q.c)}};
}

Datapoint payload_from_json(Family family, const Json& j) {
  switch (family) {
    case Family::kConstantOp:
      return ConstantPayload{vector_from_json(j.at("beta"))};
    case Family::kBilinearSp: {
      const int d1 = j.at("d1").get<int>();
      const int d2 = j.at("d2").get<int>();
      return BilinearPayload{matrix_from_json(j.at("A"), d1, d2),
                             vector_from_json(j.at("a")),
                             vector_from_json(j.at("b"))};
    }
    case Family::kQuadraticVi: {
      const int d = j.at("dim").get<int>();
      return QuadraticPayload{matrix_from_json(j.at("Q"), d, d),
                              vector_from_json(j.at("c"))};
    }
  }
  throw std::logic_error("unreachable");
}

Json distribution_to_json(const DataDistribution& dist) {
  switch (dist.family) {
    case Family::kConstantOp: {
      const auto& law = dist.constant_law();
      return Json{{"dim", law.dim}, {"M", law.M}, {"bias", law.bias}};
    }
    case Family::kBilinearSp: {
      const auto& law = dist.bilinear_law();
      return Json{{"base", payload_to_json(Datapoint{law.base})},
                  {"entry_noise", law.entry_noise},
                  {"a_noise", law.a_noise},
                  {"b_noise", law.b_noise},
                  {"op_norm_cap", law.op_norm_cap}};
    }
    case Family::kQuadraticVi: {
      const auto& law = dist.quadratic_law();
      return Json{{"dim", law.dim},
                  {"op_norm_cap", law.op_norm_cap},
                  {"c_halfwidth", law.c_halfwidth},
                  {"skew_fraction", law.skew_fraction}};
    }
  }
  throw std::logic_error("unreachable");
}

DataDistribution distribution_from_json(Family family, const Json& j) {
  DataDistribution dist;
  dist.family = family;
  switch (family) {
    case Family::kConstantOp:
      dist.law = ConstantOpLaw{j.at("dim").get<int>(), j.at("M").get<double>(),
                               j.at("bias").get<double>()};
      break;
    case Family::kBilinearSp: {
      BilinearLaw law;
      law.base = std::get<BilinearPayload>(
          payload_from_json(family, j.at("base")));
      law.entry_noise = j.at("entry_noise").get<double>();
      law.a_noise = j.at("a_noise").get<double>();
      law.b_noise = j.at("b_noise").get<double>();
      law.op_norm_cap = j.at("op_norm_cap").get<double>();
      dist.law = std::move(law);
      break;
    }
    case Family::kQuadraticVi:
      dist.law = QuadraticLaw{
          j.at("dim").get<int>(), j.at("op_norm_cap").get<double>(),
          j.at("c_halfwidth").get<double>(), j.at("skew_fraction").get<double>()};
      break;
  }
  return dist;
}

Json instance_to_json(const InstanceFile& file) {
  const auto& inst = file.instance;
  Json j{{"family", family_name(inst.family)},
         {"set", set_to_json(inst.set)},
         {"constants", Json{{"M", inst.M}, {"L", inst.L}, {"D", inst.D}}},
         {"distribution", distribution_to_json(file.distribution)}};
  j["population"] = inst.population.has_value()
                        ? payload_to_json(*inst.population)
                        : Json(nullptr);
  return j;
}

InstanceFile instance_from_json(const Json& j) {
  const Family family = family_from_name(j.at("family").get<std::string>());
  FeasibleSet set = set_from_json(j.at("set"));
  const auto& constants = j.at("constants");
  ProblemInstance inst{family, std::move(set), constants.at("M").get<double>(),
                       constants.at("L").get<double>(),
                       constants.at("D").get<double>(), std::nullopt};
  if (j.contains("population") && !j.at("population").is_null())
    inst.population = payload_from_json(family, j.at("population"));
  DataDistribution dist = distribution_from_json(family, j.at("distribution"));
  return InstanceFile{std::move(inst), std::move(dist)};
}

InstanceFile load_instance(const std::string& path) {
  return instance_from_json(load_json(path));
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  Json j;
  in >> j;
  return j;
}

Json nseg_config_to_json(const NsegConfig& cfg) {
  return Json{{"solver", "nseg"},
              {"T", cfg.T},
              {"gamma", cfg.gamma.empty() ? 0.0 : cfg.gamma[0]},
              {"batch_size", cfg.batch_size.empty() ? 0 : cfg.batch_size[0]},
              {"sigma_sq", cfg.sigma_sq.empty() ? 0.0 : cfg.sigma_sq[0]},
              {"sampling_mode", sampling_mode_name(cfg.mode)},
              {"seed", cfg.seed}};
}

Json nispp_config_to_json(const NisppConfig& cfg) {
  return Json{{"solver", "nispp"},
              {"K", cfg.K},
              {"gamma", cfg.gamma.empty() ? 0.0 : cfg.gamma[0]},
              {"lambda", cfg.lambda.empty() ? 0.0 : cfg.lambda[0]},
              {"batch_size", cfg.batch},
              {"nu", cfg.nu},
              {"sigma_sq", cfg.sigma_sq.empty() ? 0.0 : cfg.sigma_sq[0]},
              {"sampling_mode", sampling_mode_name(cfg.mode)},
              {"seed", cfg.seed}};
}

Json calibration_report_to_json(const CalibrationReport& rep) {
  return Json{{"mechanism", rep.mechanism},
              {"sensitivity", rep.sensitivity},
              {"sigma_sq", rep.sigma_sq},
              {"composition", rep.composition},
              {"regime_ok", rep.regime_ok},
              {"eps", rep.budget.eps},
              {"eta", rep.budget.eta}};
}

}  // namespace dpvi

// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/io.hpp"

#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <type_traits>

namespace qoc {

namespace {

using nlohmann::json;

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ParseError(std::string(what) + " lacks \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + " field \"" + key + "\" has the wrong type");
  }
}

json train_json(const PwmTrain& t) {
  json controls = json::array();
  for (const auto& c : t.controls) {
    controls.push_back({{"eps", c.eps}, {"shift", c.shift}, {"widths", c.widths}});
  }
  return {{"tau", t.config.tau},
          {"M", t.config.intervals},
          {"layout", layout_name(t.config.layout)},
          {"scale", t.config.scale},
          {"controls", controls}};
}

PwmTrain train_of(const json& j) {
  if (!j.is_object()) throw ParseError("train must be a JSON object");
  PwmTrain t;
  t.config.tau = field<double>(j, "tau", "train");
  t.config.intervals = field<int>(j, "M", "train");
  t.config.layout = parse_layout(field<std::string>(j, "layout", "train"));
  t.config.scale = j.contains("scale") ? field<double>(j, "scale", "train") : 1.0;
  const auto controls = field<json>(j, "controls", "train");
  if (!controls.is_array()) throw ParseError("train field \"controls\" must be an array");
  for (const auto& c : controls) {
    PulseControl pc;
    pc.eps = field<double>(c, "eps", "control");
    pc.shift = c.contains("shift") ? field<double>(c, "shift", "control") : 0.0;
    pc.widths = field<std::vector<double>>(c, "widths", "control");
    t.controls.push_back(std::move(pc));
  }
  try {
    t.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid train: ") + e.what());
  }
  return t;
}

std::string dump(const json& j) {
  // nlohmann writes doubles in shortest round-trip form.
  return j.dump(2) + "\n";
}

}  // namespace

std::string train_to_json(const PwmTrain& train) { return dump(train_json(train)); }

PwmTrain train_from_json(const std::string& text) { return train_of(parse(text, "train")); }

std::string report_to_json(const OptimizationReport& r) {
  json j;
  j["status"] = status_name(r.status);
  j["seed"] = r.seed;
  j["iterations"] = r.iterations;
  j["trace"] = r.trace;
  j["wall_ms"] = r.wall_ms;
  j["perturbed"] = r.perturbed;
  if (r.final_train) j["final_train"] = train_json(*r.final_train);
  if (r.final_field) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < r.final_field->rows(); ++i) {
      std::vector<double> row(r.final_field->cols());
      for (Eigen::Index k = 0; k < r.final_field->cols(); ++k) row[k] = (*r.final_field)(i, k);
      rows.push_back(row);
    }
    j["final_field"] = rows;
  }
  if (!r.error.empty()) j["error"] = r.error;
  return dump(j);
}

OptimizationReport report_from_json(const std::string& text) {
  const json j = parse(text, "report");
  OptimizationReport r;
  r.status = parse_status(field<std::string>(j, "status", "report"));
  r.seed = j.contains("seed") ? field<std::uint64_t>(j, "seed", "report") : 0;
  r.iterations = field<int>(j, "iterations", "report");
  r.trace = field<std::vector<double>>(j, "trace", "report");
  r.wall_ms = field<std::vector<double>>(j, "wall_ms", "report");
  if (j.contains("perturbed")) r.perturbed = field<std::vector<bool>>(j, "perturbed", "report");
  if (j.contains("final_train")) r.final_train = train_of(j.at("final_train"));
  if (j.contains("final_field")) {
    const auto rows = field<std::vector<std::vector<double>>>(j, "final_field", "report");
    const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd f(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != cols) throw ParseError("ragged final_field");
      for (Eigen::Index k = 0; k < cols; ++k) f(static_cast<Eigen::Index>(i), k) = rows[i][k];
    }
    r.final_field = std::move(f);
  }
  if (j.contains("error")) r.error = field<std::string>(j, "error", "report");
  return r;
}

void write_trace_csv(std::ostream& out, const OptimizationReport& r) {
  const auto old = out.precision(17);
  out << "iteration,infidelity,wall_ms,perturbed\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    out << i << ',' << r.trace[i] << ',' << (i < r.wall_ms.size() ? r.wall_ms[i] : 0.0) << ','
        << (i < r.perturbed.size() && r.perturbed[i] ? 1 : 0) << '\n';
  }
  out.precision(old);
}

void write_spectrum_csv(std::ostream& out, const std::vector<std::pair<double, double>>& spectrum) {
  const auto old = out.precision(17);
  out << "frequency_hz,magnitude\n";
  for (const auto& [f, a] : spectrum) out << f << ',' << a << '\n';
  out.precision(old);
}

BenchGrid bench_grid_from_json(const std::string& text) {
  const json j = parse(text, "bench grid");
  if (!j.is_object()) throw ParseError("bench grid must be a JSON object");
  BenchGrid g;
  auto opt = [&](const char* key, auto& out) {
    if (j.contains(key)) out = field<std::decay_t<decltype(out)>>(j, key, "bench grid");
  };
  opt("horizons", g.horizons);
  opt("exponents", g.exponents);
  if (j.contains("schemes")) {
    g.schemes.clear();
    for (const auto& name : field<std::vector<std::string>>(j, "schemes", "bench grid")) {
      g.schemes.push_back(parse_scheme(name));
    }
  }
  opt("repetitions", g.repetitions);
  opt("spin_table", g.spin_table);
  opt("spins", g.spins);
  opt("eps", g.eps);
  g.amplitude = g.eps;
  opt("amplitude", g.amplitude);
  opt("drive_hz", g.drive_hz);
  opt("max_log2_intervals", g.max_log2_intervals);
  opt("parallelism", g.parallelism);
  try {
    g.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid bench grid: ") + e.what());
  }
  return g;
}

std::string bench_grid_to_json(const BenchGrid& g) {
  std::vector<std::string> schemes;
  for (Scheme s : g.schemes) schemes.push_back(scheme_name(s));
  json j = {{"horizons", g.horizons},
            {"exponents", g.exponents},
            {"schemes", schemes},
            {"repetitions", g.repetitions},
            {"spin_table", g.spin_table},
            {"spins", g.spins},
            {"eps", g.eps},
            {"amplitude", g.amplitude},
            {"drive_hz", g.drive_hz},
            {"max_log2_intervals", g.max_log2_intervals},
            {"parallelism", g.parallelism}};
  return dump(j);
}

void write_bench_log_csv(std::ostream& out, const BenchResult& result) {
  const auto old = out.precision(17);
  out << "order,scheme,T,target_IF,repetition,M,seconds\n";
  for (std::size_t i = 0; i < result.log.size(); ++i) {
    const auto& e = result.log[i];
    out << i << ',' << scheme_name(e.scheme) << ',' << e.horizon << ",1e-" << e.exponent << ','
        << e.repetition << ',' << e.intervals << ',' << e.seconds << '\n';
  }
  out.precision(old);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace qoc

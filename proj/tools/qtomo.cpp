// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qtomo: command-line front end.
//
// Exit codes: 0 ok, 1 violation found or reconstruction rejected, 2 bad
// input, 3 inconclusive (numerical trouble).

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtomo/qtomo.hpp"

namespace {

using namespace qtomo;
using nlohmann::json;

enum Exit : int { kOk = 0, kViolation = 1, kInputError = 2, kInconclusive = 3 };

struct RunConfig {
  std::string subcommand;
  std::string source;
  std::string reference;
  std::string demo;
  std::size_t dim = 0;
  std::uint64_t seed = 42;
  std::string out;
  std::string summary;
  std::string format = "json";
  double xmin = -6.0;
  double xmax = 6.0;
  std::size_t nx = 241;
  std::string rays = "1,0";
  std::size_t trials = 200;
  std::size_t tuple_size = 16;
  double radius = 2.0;
  double fail_tol = 1e-6;
  double disk_radius = 8.0;
  std::size_t nodes = 128;
  double tol = 1e-3;

  json to_json() const {
    return {{"subcommand", subcommand},
            {"source", source},
            {"reference", reference},
            {"demo", demo},
            {"dim", dim},
            {"seed", seed},
            {"out", out},
            {"format", format},
            {"grid", {{"xmin", xmin}, {"xmax", xmax}, {"nx", nx}, {"rays", rays}}},
            {"certify", {{"trials", trials}, {"tuple_size", tuple_size}, {"radius", radius}, {"fail_tol", fail_tol}}},
            {"reconstruct", {{"disk_radius", disk_radius}, {"nodes", nodes}, {"tol", tol}}}};
  }
};

json envelope(const RunConfig& cfg) { return {{"version", kVersion}, {"config", cfg.to_json()}}; }

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) std::cout << text;
  else io::write_text(cfg.out, text);
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw InvalidInput("bad " + what + " '" + s + "'");
}

/// Builtins, JSON state files and tabulated CSV files.
TomogramSource resolve_source(const std::string& spec, std::size_t dim) {
  if (spec.empty()) throw InvalidInput("--source is required");
  if (spec == "builtin:vacuum") return TomogramSource::vacuum();
  if (spec == "builtin:counterexample") return TomogramSource::counterexample();
  if (starts_with(spec, "builtin:fock:")) {
    const double n = parse_number(spec.substr(13), "Fock level");
    if (n < 0 || n != std::floor(n)) throw InvalidInput("Fock level must be a nonnegative integer");
    const auto level = static_cast<std::size_t>(n);
    return TomogramSource::from_state(make_fock(level, std::max(dim, level + 1)));
  }
  if (starts_with(spec, "builtin:thermal:")) {
    const double nbar = parse_number(spec.substr(16), "mean photon number");
    return TomogramSource::from_state(make_thermal(nbar, std::max(dim, thermal_min_dim(nbar))));
  }
  if (starts_with(spec, "builtin:")) throw InvalidInput("unknown builtin source '" + spec + "'");
  if (spec.size() >= 4 && spec.substr(spec.size() - 4) == ".csv")
    return TomogramSource::tabulated(io::load_csv(spec));
  return TomogramSource::from_state(io::load_state(spec));
}

/// The state behind a source, if one is known: state files, Fock and thermal
/// builtins, and the vacuum.
std::optional<DensityState> known_state(const TomogramSource& src) {
  if (src.state()) return *src.state();
  if (src.kind() == SourceKind::analytic_vacuum) return make_fock(0, 1);
  return std::nullopt;
}

std::vector<PhasePoint> parse_rays(const std::string& text) {
  std::vector<PhasePoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw InvalidInput("ray '" + item + "' must be 'mu,nu'");
    const PhasePoint v{parse_number(item.substr(0, comma), "mu"), parse_number(item.substr(comma + 1), "nu")};
    if (v.is_origin()) throw DegenerateRay();
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("--rays lists no rays");
  return out;
}

int cmd_tomogram(const RunConfig& cfg) {
  const auto src = resolve_source(cfg.source, cfg.dim);
  GridSpec grid{cfg.xmin, cfg.xmax, cfg.nx, parse_rays(cfg.rays)};
  grid.validate();
  std::vector<io::TomogramRow> rows;
  json per_ray = json::array();
  bool violation = false;
  for (const auto& v : grid.rays) {
    const double h = grid.step();
    double norm = 0.0, wmin = std::numeric_limits<double>::infinity(), argmin = grid.x_min;
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double X = grid.x(i);
      const double w = src.evaluate(X, v);
      rows.push_back({X, v.mu, v.nu, w});
      norm += (i == 0 || i + 1 == grid.n_x ? 0.5 : 1.0) * h * w;
      if (w < wmin) { wmin = w; argmin = X; }
    }
    const bool negative = wmin < -1e-10;
    const bool bad_norm = std::abs(norm - 1.0) > 1e-6;
    violation = violation || negative || bad_norm;
    per_ray.push_back({{"ray", io::point_json(v)}, {"normalization", norm}, {"min_value", wmin},
                       {"argmin_x", argmin}, {"negative_values", negative}, {"normalization_ok", !bad_norm}});
  }
  json summary = envelope(cfg);
  summary["source"] = src.description();
  summary["rays"] = per_ray;
  summary["violation"] = violation;

  if (cfg.format == "csv") {
    std::ostringstream os;
    io::write_csv(os, rows);
    emit(cfg, os.str());
    const std::string text = io::dump(summary);
    if (!cfg.summary.empty()) io::write_text(cfg.summary, text);
    else std::cerr << text;
  } else {
    json data = json::array();
    for (const auto& r : rows) data.push_back({r.x, r.mu, r.nu, r.w});
    summary["columns"] = {"X", "mu", "nu", "W"};
    summary["rows"] = data;
    emit(cfg, io::dump(summary));
  }
  return violation ? kViolation : kOk;
}

int cmd_certify(const RunConfig& cfg) {
  const auto src = resolve_source(cfg.source, cfg.dim);
  CertifyOptions opt;
  opt.trials = cfg.trials;
  opt.tuple_size = cfg.tuple_size;
  opt.seed = cfg.seed;
  opt.radius = cfg.radius;
  opt.fail_tol = cfg.fail_tol;
  const auto rep = certify(src, opt);
  json j = envelope(cfg);
  j["report"] = io::to_json(rep);
  emit(cfg, io::dump(j));
  std::cerr << "verdict: " << to_string(rep.verdict) << "\n";
  switch (rep.verdict) {
    case Verdict::pass: return kOk;
    case Verdict::fail: return kViolation;
    case Verdict::inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

int cmd_reconstruct(const RunConfig& cfg) {
  const auto src = resolve_source(cfg.source, cfg.dim);
  const std::size_t dim = cfg.dim == 0 ? 32 : cfg.dim;
  const auto res = inverse_radon(src, dim, cfg.disk_radius, cfg.nodes);
  const auto val = validate_as_state(res, cfg.tol);

  std::optional<DensityState> ref;
  if (!cfg.reference.empty()) ref = known_state(resolve_source(cfg.reference, cfg.dim));
  else ref = known_state(src);

  json j = envelope(cfg);
  j["reconstruction"] = io::to_json(res);
  j["raw"] = io::matrix_state_json(res.rho);
  j["validation"] = io::to_json(val);
  if (val.accepted) {
    j["state"] = io::state_json(*val.state, {{"source", res.source},
                                             {"disk_radius", res.quadrature.radius},
                                             {"nodes", res.quadrature.nodes},
                                             {"diagnostics", io::to_json(res)}});
    if (ref) {
      const double f = state_fidelity(*val.state, *ref);
      j["fidelity"] = f;
      std::cerr << "fidelity: " << f << "\n";
    }
  } else {
    for (const auto& r : val.reasons) std::cerr << "rejected: " << r << "\n";
  }
  emit(cfg, io::dump(j));
  return val.accepted ? kOk : kViolation;
}

int cmd_purity(const RunConfig& cfg) {
  const auto src = resolve_source(cfg.source, cfg.dim);
  const double pc = purity_from_characteristic(src, cfg.disk_radius, cfg.nodes);
  const double pt = purity_from_tomogram(src, cfg.disk_radius, cfg.nodes, PurityMode::direct);
  json j = envelope(cfg);
  j["source"] = src.description();
  j["purity_characteristic"] = pc;
  j["purity_tomogram"] = pt;
  if (auto s = known_state(src)) j["purity_exact"] = s->purity();
  const bool in_range = pc > 0.0 && pc <= 1.0 + 1e-3 && pt > 0.0 && pt <= 1.0 + 1e-3;
  j["within_quantum_range"] = in_range;
  emit(cfg, io::dump(j));
  std::cerr << "purity: " << pc << " (characteristic), " << pt << " (tomogram)\n";
  return in_range ? kOk : kViolation;
}

json search_json(const SearchResult& r, double threshold) {
  json j = io::to_json(r);
  j["passed"] = r.min_eigenvalue >= threshold;
  return j;
}

int cmd_demo(const RunConfig& cfg) {
  json j = envelope(cfg);
  CertifyOptions opt;
  opt.trials = cfg.trials;
  opt.tuple_size = cfg.tuple_size;
  opt.seed = cfg.seed;
  opt.radius = cfg.radius;
  opt.fail_tol = cfg.fail_tol;
  const double threshold = -opt.fail_tol * static_cast<double>(opt.tuple_size);

  if (cfg.demo == "counterexample") {
    const auto src = TomogramSource::counterexample();
    const double norm = check_normalization(src, {0.0, 1.0});
    const double p2 = second_moment_P(src);
    const double q2 = second_moment_Q(src);
    const auto rep = certify(src, opt);
    const auto rec = inverse_radon(src, 16, 12.0, 128);
    j["source"] = src.description();
    j["moments"] = {{"normalization_on_momentum_ray", norm},
                    {"P2_raw", p2},
                    {"Q2_raw", q2},
                    {"P2_normalized", p2 / norm},
                    {"P2_claimed", -0.5}};
    j["certification"] = io::to_json(rep);
    j["reconstruction"] = io::to_json(rec);
    j["verdict"] = to_string(rep.verdict);
    emit(cfg, io::dump(j));
    std::cerr << "counterexample: " << to_string(rep.verdict) << ", int f dX = " << norm
              << ", min W = " << rep.property_checks.nonnegativity.min_value
              << ", min Gram eigenvalue = " << rep.min_eigenvalue_overall << "\n";
    return rep.verdict == Verdict::pass ? kOk : kViolation;
  }
  if (cfg.demo == "vacuum") {
    const TomographicCharacteristic psi(TomogramSource::vacuum());
    SearchOptions so{opt.trials, opt.tuple_size, opt.seed, opt.radius, {}};
    const auto quantum = gram_search(psi, GramKind::wh_group, so);
    const auto omega = gram_search(psi, GramKind::omega_twisted, so);
    const auto classical = gram_search(psi, GramKind::classical, so);
    const bool all = quantum.min_eigenvalue >= threshold && omega.min_eigenvalue >= threshold &&
                     classical.min_eigenvalue >= threshold;
    j["source"] = "analytic-vacuum";
    j["fail_threshold"] = threshold;
    j["quantum"] = search_json(quantum, threshold);
    j["omega_positive"] = search_json(omega, threshold);
    j["classical"] = search_json(classical, threshold);
    j["verdict"] = all ? "pass" : "fail";
    emit(cfg, io::dump(j));
    std::cerr << "vacuum: quantum " << quantum.min_eigenvalue << ", omega " << omega.min_eigenvalue
              << ", classical " << classical.min_eigenvalue << " -> " << (all ? "pass" : "fail") << "\n";
    return all ? kOk : kViolation;
  }
  throw InvalidInput("unknown demo '" + cfg.demo + "' (expected counterexample or vacuum)");
}

void add_common(CLI::App* sub, RunConfig& cfg, bool needs_source) {
  auto* s = sub->add_option("--source,--state", cfg.source,
                            "state JSON, tabulated CSV, or builtin:vacuum|counterexample|fock:<n>|thermal:<nbar>");
  if (needs_source) s->required();
  sub->add_option("--dim", cfg.dim, "Fock cutoff");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--out", cfg.out, "output path (default stdout)");
  sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_certify_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--trials", cfg.trials, "number of random tuples")->check(CLI::PositiveNumber);
  sub->add_option("--tuple-size", cfg.tuple_size, "points per tuple")->check(CLI::Range(2, 64));
  sub->add_option("--radius", cfg.radius, "scale of the random points")->check(CLI::PositiveNumber);
  sub->add_option("--fail-tol", cfg.fail_tol, "eigenvalue tolerance per tuple point")->check(CLI::NonNegativeNumber);
}

void add_disk_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--disk-radius", cfg.disk_radius, "radius of the (mu, nu) disk")->check(CLI::PositiveNumber);
  sub->add_option("--nodes", cfg.nodes, "quadrature nodes per axis")->check(CLI::Range(2, 4096));
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Symplectic tomograms: evaluation, certification and reconstruction"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* tom = app.add_subcommand("tomogram", "evaluate W(X, mu, nu) on a grid");
  add_common(tom, cfg, true);
  tom->add_option("--xmin", cfg.xmin);
  tom->add_option("--xmax", cfg.xmax);
  tom->add_option("--nx", cfg.nx)->check(CLI::Range(2, 1000000));
  tom->add_option("--rays", cfg.rays, "rays as \"mu1,nu1;mu2,nu2\"");
  tom->add_option("--summary", cfg.summary, "summary JSON path (default stderr, csv format only)");

  auto* cert = app.add_subcommand("certify", "randomized quantum-tomogram test");
  add_common(cert, cfg, true);
  add_certify_flags(cert, cfg);

  auto* rec = app.add_subcommand("reconstruct", "inverse Radon transform to a density matrix");
  add_common(rec, cfg, true);
  add_disk_flags(rec, cfg);
  rec->add_option("--reference", cfg.reference, "state to compare against (same forms as --source)");
  rec->add_option("--tol", cfg.tol, "validation tolerance")->check(CLI::PositiveNumber);

  auto* pur = app.add_subcommand("purity", "purity from the characteristic function and the tomogram");
  add_common(pur, cfg, true);
  add_disk_flags(pur, cfg);

  auto* demo = app.add_subcommand("demo", "counterexample and vacuum showcases");
  demo->add_option("name", cfg.demo, "counterexample or vacuum")->required();
  add_common(demo, cfg, false);
  add_certify_flags(demo, cfg);

  // Tomogram output defaults to CSV unless --format is given.
  const bool format_given = [&] {
    for (int i = 1; i < argc; ++i)
      if (std::string(argv[i]).rfind("--format", 0) == 0) return true;
    return false;
  }();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (tom->parsed()) {
      cfg.subcommand = "tomogram";
      if (!format_given) cfg.format = "csv";
      return cmd_tomogram(cfg);
    }
    if (cfg.format == "csv") throw InvalidInput("--format csv is only available for tomogram");
    if (cert->parsed()) { cfg.subcommand = "certify"; return cmd_certify(cfg); }
    if (rec->parsed()) { cfg.subcommand = "reconstruct"; return cmd_reconstruct(cfg); }
    if (pur->parsed()) { cfg.subcommand = "purity"; return cmd_purity(cfg); }
    if (demo->parsed()) { cfg.subcommand = "demo"; return cmd_demo(cfg); }
  } catch (const QuadratureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconclusive;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

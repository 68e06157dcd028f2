// Command-line front end: analyze, orbit, quotient, witness, spectrum, reproduce.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "supercyc/presets.hpp"

namespace fs = std::filesystem;
using namespace supercyc;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

// Prints the text report; with an output directory also writes the JSON
// sidecar and every artifact there.
void emit(const Report& r, const std::vector<Artifact>& artifacts, const std::string& out_dir) {
  const auto text = render_text(r);
  std::cout << text;
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "report.txt", text);
  write_file(fs::path(out_dir) / "report.json", render_json(r).dump(2) + "\n");
  for (const auto& a : artifacts) write_file(fs::path(out_dir) / a.filename, a.content);
}

Complex parse_point(const std::string& text, const char* flag) {
  try {
    const auto v = Expression::parse(text).eval(Complex{0.0, 0.0});
    if (v) return *v;
  } catch (const ParseError& e) {
    throw ScenarioError(flag, e.what());
  }
  throw ScenarioError(flag, "point does not evaluate to a finite number");
}

OperatorMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open matrix file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("", path + ": malformed JSON (" + std::string(e.what()) + ")");
  }
  if (!j.is_object() || !j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].empty())
    throw ScenarioError("matrix", "expected a non-empty array of rows");
  const auto& rows = j["matrix"];
  const auto n = static_cast<Eigen::Index>(rows.size());
  OperatorMatrix T{Eigen::MatrixXcd(n, n)};
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    const std::string rp = "matrix[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ScenarioError(rp, "row length must equal the row count");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      const std::string ep = rp + "[" + std::to_string(c) + "]";
      if (e.is_number()) {
        T.entries(r, c) = {e.get<double>(), 0.0};
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        T.entries(r, c) = {e[0].get<double>(), e[1].get<double>()};
      } else {
        throw ScenarioError(ep, "expected a number or [re, im]");
      }
    }
  }
  return T;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointwise supercyclicity diagnostics for weighted composition operators"};
  app.require_subcommand(1);
  std::string out_dir;
  app.add_option("--out", out_dir, "directory for report.txt, report.json and CSV traces");

  std::string scenario_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "run the full pipeline on a scenario");
  analyze_cmd->add_option("scenario", scenario_path)->required();

  auto* orbit_cmd = app.add_subcommand("orbit", "orbit trace as CSV");
  std::string from = "0";
  int steps = 256;
  orbit_cmd->add_option("scenario", scenario_path)->required();
  orbit_cmd->add_option("--from", from, "starting point (expression in i, pi, e)")->required();
  orbit_cmd->add_option("--steps", steps)->check(CLI::PositiveNumber);

  auto* quotient_cmd = app.add_subcommand("quotient", "quotient sequence as CSV with its classification");
  std::string z1s, z2s;
  std::size_t fidx = 0;
  quotient_cmd->add_option("scenario", scenario_path)->required();
  quotient_cmd->add_option("--z1", z1s)->required();
  quotient_cmd->add_option("--z2", z2s)->required();
  quotient_cmd->add_option("--function", fidx, "index into testFunctions");

  auto* witness_cmd = app.add_subcommand("witness", "shift certificate construction and search");
  witness_cmd->add_option("scenario", scenario_path)->required();

  auto* spectrum_cmd = app.add_subcommand("spectrum", "spectral obstruction on a finite matrix");
  std::string matrix_path;
  spectrum_cmd->add_option("matrix", matrix_path, "JSON file {\"matrix\": [[a, [re, im], ...], ...]}")->required();

  auto* reproduce_cmd = app.add_subcommand("reproduce", "run a shipped preset");
  std::string preset;
  int scale = 1;
  reproduce_cmd->add_option("id", preset)->required();
  reproduce_cmd->add_option("--scale", scale, "grid refinement factor")->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze_cmd) {
      const auto s = load_scenario(scenario_path);
      auto r = analyze(s);
      emit({s.name, {r.section}, kOk}, r.artifacts, out_dir);
    } else if (*orbit_cmd) {
      const auto s = load_scenario(scenario_path);
      const auto d = build_grid(s.grid);
      Complex z0 = parse_point(from, "--from");
      if (!d.contains(d.snap(z0))) throw ScenarioError("--from", "starting point is not in the domain");
      if (d.is_discrete()) z0 = d.snap(z0).coordinate();
      const auto t = iterate(Expression::parse(s.symbol), z0, steps, &d, s.tolerances);
      const auto csv = orbit_csv(t);
      if (out_dir.empty()) {
        std::cout << csv;
      } else {
        Verdict v = make_verdict("orbit", Conclusion::Inconclusive);
        v.add("start", z0).add("steps", static_cast<double>(steps)).add("class", std::string(to_string(t.classification)));
        if (t.classification == OrbitClass::ConvergesTo) v.add("limit", t.limit);
        if (t.classification == OrbitClass::Periodic) v.add("period", static_cast<double>(t.period));
        Section sec{s.name, {{"symbol", s.symbol}}, {v}, v};
        emit({s.name, {sec}, kOk}, {{"orbit.csv", csv}}, out_dir);
      }
    } else if (*quotient_cmd) {
      const auto s = load_scenario(scenario_path);
      if (s.test_functions.empty()) throw ScenarioError("testFunctions", "quotient checks need at least one test function");
      if (fidx >= s.test_functions.size()) throw ScenarioError("--function", "index out of range");
      const auto d = build_grid(s.grid);
      const auto phi = Expression::parse(s.symbol);
      require_self_map(d, phi);
      const auto q = quotient_sequence(phi, Expression::parse(s.weight), Expression::parse(s.test_functions[fidx]),
                                       parse_point(z1s, "--z1"), parse_point(z2s, "--z2"), s.horizons.quotient_n);
      const auto csv = quotient_csv(q);
      Verdict v = make_verdict("quotient", Conclusion::Inconclusive);
      v.add("z1", q.z1).add("z2", q.z2).add("class", std::string(to_string(q.classification)));
      v.add("skipped", static_cast<double>(q.skipped.size()));
      if (q.classification == QuotientClass::Bounded) v.add("bound", q.bound);
      if (q.classification == QuotientClass::ConvergesTo) v.add("limit", q.limit);
      if (out_dir.empty()) {
        std::cout << csv;
        std::cerr << "classification: " << to_string(q.classification) << "\n";
      } else {
        Section sec{s.name, {{"symbol", s.symbol}, {"weight", s.weight}, {"function", s.test_functions[fidx]}}, {v}, v};
        emit({s.name, {sec}, kOk}, {{"quotient.csv", csv}}, out_dir);
      }
    } else if (*witness_cmd) {
      const auto s = load_scenario(scenario_path);
      auto w = witness(s);
      emit({s.name, {w.section}, kOk}, w.artifacts, out_dir);
    } else if (*spectrum_cmd) {
      const auto v = spectral_obstruction(load_matrix(matrix_path));
      Section sec{matrix_path, {{"matrix", matrix_path}}, {v}, v};
      emit({"spectrum", {sec}, kOk}, {}, out_dir);
    } else if (*reproduce_cmd) {
      auto run = reproduce(preset, scale);
      emit(run.report, run.artifacts, out_dir);
    }
  } catch (const SelfMapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {  // scenario, parse, domain, precondition, unknown preset
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}

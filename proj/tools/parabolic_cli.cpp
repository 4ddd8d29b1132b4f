// parabolic: solve | analyze | symplectic | deform
//
// Exit codes: 0 ok, 1 invalid input, 2 no convergence, 3 reducible or
// non-smooth point, 4 obstruction found.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "parabolic/io.hpp"

namespace {

using namespace parabolic;
using io::json;

enum ExitCode { kOk = 0, kInvalid = 1, kNoConvergence = 2, kRefused = 3, kObstructed = 4 };

struct Options {
  std::string input;
  std::string output;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int order = 4;
  int restarts = 8;
  int threads = 1;
  int direction = 0;
  std::vector<double> t_samples;
  bool no_timings = false;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("schema error: malformed JSON in ") + path + ": " + e.what());
  }
}

void write_output(const Options& o, const json& doc) {
  const std::string text = io::dump(doc);
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw InvalidInput("cannot write " + o.output);
  out << text;
}

io::RunManifest manifest_for(const Options& o, const std::string& command, const SurfaceData& data) {
  io::RunManifest m;
  m.command = command;
  m.input = data;
  m.seed = o.seed;
  m.record_timings = !o.no_timings;
  return m;
}

int cmd_solve(const Options& o) {
  const SurfaceData data = io::surface_from_json(read_json(o.input));
  SolverConfig cfg;
  cfg.seed = o.seed;
  cfg.tolerance = o.tol;
  cfg.restarts = o.restarts;
  cfg.threads = o.threads;
  cfg.validate();
  io::RunManifest m = manifest_for(o, "solve", data);
  m.config = io::to_json(cfg);
  SolveResult res;
  {
    io::StageTimer t(m, "solve");
    res = solve(data, cfg);
  }
  json doc = io::to_json(res, data);
  doc["manifest"] = m.to_json();
  write_output(o, doc);
  if (!res.success) {
    std::cerr << "no convergence: best residual " << res.residual << "\n";
    return kNoConvergence;
  }
  return kOk;
}

int cmd_analyze(const Options& o) {
  const Representation rho = io::representation_from_json(read_json(o.input));
  io::RunManifest m = manifest_for(o, "analyze", rho.surface());
  m.config = {{"rank_tolerance", kRankTolerance}};
  AnalysisReport rep;
  {
    io::StageTimer t(m, "analyze");
    rep = analyze(rho);
  }
  json doc = io::to_json(rep);
  doc["manifest"] = m.to_json();
  write_output(o, doc);
  return kOk;
}

int cmd_symplectic(const Options& o) {
  const Representation rho = io::representation_from_json(read_json(o.input));
  io::RunManifest m = manifest_for(o, "symplectic", rho.surface());
  m.config = {{"threads", o.threads}, {"rank_tolerance", kRankTolerance}};
  GramMatrix g;
  {
    io::StageTimer t(m, "symplectic");
    const SymplecticPairing pairing(rho);
    g = gram_matrix(pairing, parabolic_tangent_basis(rho), o.threads);
  }
  json doc = io::to_json(g);
  doc["manifest"] = m.to_json();
  write_output(o, doc);
  return kOk;
}

int cmd_deform(const Options& o) {
  const Representation rho = io::representation_from_json(read_json(o.input));
  if (o.order < 1) throw InvalidInput("--order must be >= 1");
  const std::vector<double> ts = o.t_samples.empty() ? default_t_samples() : o.t_samples;
  for (double t : ts)
    if (!(t > 0)) throw InvalidInput("--t-samples must be positive");
  io::RunManifest m = manifest_for(o, "deform", rho.surface());
  m.config = {{"direction", o.direction}, {"order", o.order}, {"t_samples", ts}};

  const Subspace tangent = parabolic_tangent_basis(rho);
  if (o.direction < 0 || o.direction >= tangent.dim())
    throw InvalidInput("--direction " + std::to_string(o.direction) + " out of range: tangent dimension is " +
                       std::to_string(tangent.dim()));
  const Cochain1 u =
      Cochain1::unflatten(tangent.basis.col(o.direction), rho.presentation().free_rank(), rho.rank());
  json doc;
  int code = kOk;
  try {
    io::StageTimer t(m, "deform");
    const DeformationState state = build_deformation(rho, u, o.order);
    doc = {{"status", "success"}, {"state", io::to_json(state)}, {"verification", io::to_json(verify_deformation(state, ts))}};
  } catch (const ObstructionFound& e) {
    doc = {{"status", "obstructed"},
           {"order", e.order()},
           {"residual_norm", e.residual_norm()},
           {"residual", std::vector<double>(e.residual().begin(), e.residual().end())}};
    std::cerr << e.what() << "\n";
    code = kObstructed;
  }
  doc["manifest"] = m.to_json();
  write_output(o, doc);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat unitary connections on punctured surfaces: representation variety, parabolic cohomology, symplectic form, formal deformations."};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, const char* what) {
    sub->add_option("input", o.input, what)->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", o.output, "Output path (stdout if omitted)");
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--no-timings", o.no_timings, "Omit timings from the manifest");
  };

  auto* solve_cmd = app.add_subcommand("solve", "Find a representation with the prescribed classes");
  common(solve_cmd, "Surface data JSON");
  solve_cmd->add_option("--tol", o.tol, "Relation residual tolerance")->capture_default_str();
  solve_cmd->add_option("--restarts", o.restarts, "Restarts")->capture_default_str();

  auto* analyze_cmd = app.add_subcommand("analyze", "Tangent space, smoothness and property P");
  common(analyze_cmd, "solve.json");

  auto* sympl_cmd = app.add_subcommand("symplectic", "Gram matrix of the 2-form on the tangent space");
  common(sympl_cmd, "solve.json");

  auto* deform_cmd = app.add_subcommand("deform", "Formal deformation along a tangent basis vector");
  common(deform_cmd, "solve.json");
  deform_cmd->add_option("--direction", o.direction, "Tangent basis index")->capture_default_str();
  deform_cmd->add_option("--order", o.order, "Truncation order")->capture_default_str();
  deform_cmd->add_option("--t-samples", o.t_samples, "Sample points for the residual fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve_cmd) return cmd_solve(o);
    if (*analyze_cmd) return cmd_analyze(o);
    if (*sympl_cmd) return cmd_symplectic(o);
    if (*deform_cmd) return cmd_deform(o);
  } catch (const Reducible& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const NotSmooth& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const NoConvergence& e) {
    std::cerr << e.what() << "\n";
    return kNoConvergence;
  } catch (const ObstructionFound& e) {
    std::cerr << e.what() << "\n";
    return kObstructed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

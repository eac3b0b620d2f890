// Command-line front end: load an algebra, analyze it, run the flow, split or
// destabilize, and run the geometry checks.
//
// Exit codes: 0 success or minimum, 2 divergent with a certified ideal,
// 3 inconclusive, 1 error.

#include "bracketflow/bracketflow.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

using namespace bracketflow;

namespace {

enum Exit { Ok = 0, Failure = 1, DivergentWithIdeal = 2, Inconclusive = 3 };

struct RunConfig {
  std::string input;
  std::string corpus_name;
  bool complex = false;
  double tol = 1e-9;
  double grad_tol = 1e-7;
  double gap_tol = 1e-6;
  int max_steps = 20000;
  double divergence_radius = 25.0;
  int window = 10;
  std::uint64_t seed = 20240613;
  std::string out;
  std::string trace;
  // verify-geometry
  int dim = 3;
  int samples = 500;
  double slack = 1e-8;
};

struct Loaded {
  LieAlgebra alg;
  json source;
};

Loaded load(const RunConfig& cfg) {
  if (cfg.input.empty() == cfg.corpus_name.empty()) throw PreconditionError("give exactly one of --input or --corpus");
  if (!cfg.corpus_name.empty()) {
    json src{{"corpus", cfg.corpus_name}};
    if (corpus_is_complex(cfg.corpus_name)) {
      if (!cfg.complex) throw StructuralError("'" + cfg.corpus_name + "' is a complex algebra; pass --complex");
      return {realify(complex_corpus(cfg.corpus_name), cfg.tol).algebra, src};
    }
    return {corpus(cfg.corpus_name), src};
  }
  const json doc = read_json_file(cfg.input);
  const bool complex = cfg.complex || doc.value("field", "real") == "complex";
  json src{{"input", cfg.input}};
  if (complex) return {realify(complex_algebra_from_json(doc), cfg.tol).algebra, src};
  LieAlgebra alg = algebra_from_json(doc);
  require_valid(alg, cfg.tol);
  return {std::move(alg), src};
}

void write_report(const RunConfig& cfg, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(cfg.out);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw StructuralError("cannot write " + tmp.string());
    os << text;
    if (!os.flush()) throw StructuralError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

json algebra_summary(const LieAlgebra& alg, const RunConfig& cfg) {
  const SimplicityReport simple = is_simple(alg, cfg.tol, 20, cfg.seed);
  json out{{"dim", alg.dim()},
           {"realified", alg.is_realified()},
           {"simplicity", to_string(simple.verdict)},
           {"killing_signature", to_json(signature(killing_form(alg).matrix))}};
  if (simple.probabilistic) out["simplicity_trials"] = simple.trials;
  if (simple.witness) out["witness_ideal"] = subspace_to_json(*simple.witness);
  return out;
}

MinimizeOptions flow_options(const RunConfig& cfg, std::ofstream* trace) {
  MinimizeOptions opts;
  opts.max_steps = cfg.max_steps;
  opts.grad_tol = cfg.grad_tol;
  opts.divergence_radius = cfg.divergence_radius;
  opts.window = cfg.window;
  if (trace) opts.on_step = [trace](const FlowStep& s) { *trace << step_to_json(s).dump() << '\n' << std::flush; };
  return opts;
}

FlowTrace run_flow(const LieAlgebra& alg, const RunConfig& cfg) {
  std::unique_ptr<std::ofstream> trace;
  if (!cfg.trace.empty()) {
    trace = std::make_unique<std::ofstream>(cfg.trace, std::ios::trunc);
    if (!*trace) throw StructuralError("cannot write " + cfg.trace);
  }
  return minimize(alg, MetricPoint::identity(alg.dim()), flow_options(cfg, trace.get()));
}

// Destabilization payload for a divergent flow and the matching exit code.
int add_destabilization(const LieAlgebra& alg, const FlowTrace& flow, const RunConfig& cfg, json& report) {
  const Destabilization d = destabilize(alg, flow, cfg.gap_tol, cfg.tol);
  report["destabilization"] = to_json(d);
  return d.ideals.empty() ? Inconclusive : DivergentWithIdeal;
}

int cmd_analyze(const RunConfig& cfg, json& report) {
  const Loaded l = load(cfg);
  report["source"] = l.source;
  const LieAlgebra& alg = l.alg;
  report["algebra"] = algebra_summary(alg, cfg);
  report["validation"] = to_json(validate(alg, cfg.tol));
  const LinearSubspace z = center(alg, cfg.tol);
  report["center"] = {{"dim", z.dim()}, {"basis", subspace_to_json(z)}};
  report["derivations_dim"] = derivations(alg, cfg.tol).size();
  report["killing_form"] = matrix_to_json(killing_form(alg).matrix);
  return Ok;
}

int cmd_minimize(const RunConfig& cfg, json& report) {
  const Loaded l = load(cfg);
  report["source"] = l.source;
  const FlowTrace flow = run_flow(l.alg, cfg);
  report["flow"] = verdict_to_json(flow);
  switch (flow.verdict) {
    case FlowTrace::Verdict::Minimum: return Ok;
    case FlowTrace::Verdict::Divergent: return add_destabilization(l.alg, flow, cfg, report);
    case FlowTrace::Verdict::Inconclusive: break;
  }
  return Inconclusive;
}

int cmd_decompose(const RunConfig& cfg, json& report) {
  const Loaded l = load(cfg);
  report["source"] = l.source;
  const LieAlgebra& alg = l.alg;
  report["algebra"] = algebra_summary(alg, cfg);
  const FlowTrace flow = run_flow(alg, cfg);
  report["flow"] = verdict_to_json(flow);
  if (flow.verdict == FlowTrace::Verdict::Divergent) return add_destabilization(alg, flow, cfg, report);
  if (flow.verdict == FlowTrace::Verdict::Inconclusive) return Inconclusive;
  const CartanSplit s = split(alg, *flow.minimum, cfg.gap_tol);
  report["split"] = to_json(s);
  report["inclusions"] = to_json(check_inclusions(alg, s, cfg.gap_tol));
  report["involution_residual"] = involution_residual(alg, s);
  report["classification"] = to_json(classify(alg, s, cfg.gap_tol));
  if (alg.is_realified()) {
    const CompactFormReport cf = check_compact_form(alg, s, cfg.gap_tol);
    report["compact_form"] = to_json(cf);
    if (!cf.passed) return Failure;
  }
  return Ok;
}

int cmd_destabilize(const RunConfig& cfg, json& report) {
  const Loaded l = load(cfg);
  report["source"] = l.source;
  const FlowTrace flow = run_flow(l.alg, cfg);
  report["flow"] = verdict_to_json(flow);
  if (flow.verdict != FlowTrace::Verdict::Divergent) {
    report["note"] = "flow is not divergent; nothing to destabilize";
    return flow.verdict == FlowTrace::Verdict::Minimum ? Ok : Inconclusive;
  }
  return add_destabilization(l.alg, flow, cfg, report);
}

int cmd_verify_geometry(const RunConfig& cfg, json& report) {
  if (cfg.samples < 1) throw PreconditionError("--samples must be at least 1");
  report["exp_distance"] = to_json(property_star_suite(cfg.dim, cfg.samples, cfg.seed, cfg.slack));
  std::mt19937_64 rng(cfg.seed);
  double worst_ode = 0.0, lemma7 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const OdeProblem p{symmetrize(random_gaussian(cfg.dim, cfg.dim, rng)), symmetrize(random_gaussian(cfg.dim, cfg.dim, rng)),
                       1.5, 3000};
    worst_ode = std::max(worst_ode, solve_ode(p).max_mismatch);
    lemma7 = std::min(lemma7, lemma7_check(p, {0.25, 0.5, 1.0, 1.5}).min_margin);
  }
  report["ode"] = {{"suite", "ode-closed-form"}, {"samples", 100}, {"max_relative_mismatch", worst_ode}, {"passed", true}};
  report["trace_inequality"] = {{"suite", "trace-inequality"}, {"samples", 100}, {"min_margin", lemma7}, {"passed", true}};
  return Ok;
}

int cmd_corpus(const RunConfig& cfg, json& report) {
  if (cfg.corpus_name.empty()) {
    report["names"] = corpus_names();
    return Ok;
  }
  report = corpus_is_complex(cfg.corpus_name) ? to_json(complex_corpus(cfg.corpus_name)) : to_json(corpus(cfg.corpus_name));
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie algebra metrics, the bracket-norm flow and Cartan decompositions"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_input = [&](CLI::App* sub) {
    auto* in = sub->add_option("--input", cfg.input, "algebra JSON file");
    auto* co = sub->add_option("--corpus", cfg.corpus_name, "built-in algebra name");
    in->excludes(co);
    sub->add_flag("--complex", cfg.complex, "input is complex; realify on load");
    sub->add_option("--tol", cfg.tol, "algebraic tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
  };
  auto add_flow = [&](CLI::App* sub) {
    add_input(sub);
    sub->add_option("--grad-tol", cfg.grad_tol, "gradient norm for a minimum")->check(CLI::PositiveNumber);
    sub->add_option("--gap-tol", cfg.gap_tol, "eigenvalue gap and split tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-steps", cfg.max_steps, "flow step budget")->check(CLI::PositiveNumber);
    sub->add_option("--divergence-radius", cfg.divergence_radius, "distance before divergence is judged")
        ->check(CLI::PositiveNumber);
    sub->add_option("--window", cfg.window, "iterates in the direction window")->check(CLI::PositiveNumber);
    sub->add_option("--trace", cfg.trace, "stream flow steps as JSON lines to this file");
  };

  struct Command {
    CLI::App* app;
    int (*run)(const RunConfig&, json&);
  };
  std::vector<Command> commands;
  auto* analyze = app.add_subcommand("analyze", "validation, center, derivations, Killing form, simplicity");
  add_input(analyze);
  commands.push_back({analyze, cmd_analyze});
  auto* minimize_cmd = app.add_subcommand("minimize", "run the gradient flow of F from the identity");
  add_flow(minimize_cmd);
  commands.push_back({minimize_cmd, cmd_minimize});
  auto* decompose = app.add_subcommand("decompose", "flow, then Cartan split and classification");
  add_flow(decompose);
  commands.push_back({decompose, cmd_decompose});
  auto* destab = app.add_subcommand("destabilize", "flow, then ideals from the point at infinity");
  add_flow(destab);
  commands.push_back({destab, cmd_destabilize});
  auto* verify = app.add_subcommand("verify-geometry", "distance and ODE checks on the space of metrics");
  verify->add_option("--dim", cfg.dim, "matrix size")->check(CLI::Range(2, 64));
  verify->add_option("--samples", cfg.samples, "random samples")->check(CLI::PositiveNumber);
  verify->add_option("--slack", cfg.slack, "allowed negative margin")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", cfg.seed, "seed");
  verify->add_option("--out", cfg.out, "write the report here instead of stdout");
  commands.push_back({verify, cmd_verify_geometry});
  auto* corpus_cmd = app.add_subcommand("corpus", "list built-in algebras or print one as JSON");
  corpus_cmd->add_option("--corpus,name", cfg.corpus_name, "algebra name");
  corpus_cmd->add_option("--out", cfg.out, "write the JSON here instead of stdout");
  commands.push_back({corpus_cmd, cmd_corpus});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Ok : Failure;
  }

  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    json report{{"command", c.app->get_name()}};
    const auto start = std::chrono::steady_clock::now();
    try {
      const int code = c.run(cfg, report);
      if (c.app != corpus_cmd)
        report["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_report(cfg, report);
      return code;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return Failure;
    }
  }
  return Failure;
}

// mlw: command-line front end to the matching logic workbench.
//
// Exit status: 0 success / true, 1 false / countermodel, 2 error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"

#include "mlw/mlw.hpp"
#include "mlw/service.hpp"

namespace fs = std::filesystem;
using namespace mlw;

namespace {

struct Options {
  bool json = false;
  std::string theory;
  double budget = kDefaultBudget;
};

int report(const Options& o, const json& j, const std::string& text, int code) {
  if (o.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  }
  return code;
}

int fail(const Options& o, const Error& e) {
  if (o.json) {
    std::cout << error_json(e.code(), e.what()).dump(2) << "\n";
  } else {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
  }
  return 2;
}

TheoryPtr load_theory(const TheoryLibrary& lib, const std::string& name) {
  if (name.empty() || name == "empty") return empty_theory();
  if (fs::exists(name) && fs::path(name).extension() == ".mlth") {
    return parse_theory(read_file(name), [&](const std::string& n) { return lib.load(n); });
  }
  return lib.load(name);
}

Model load_model_arg(const TheoryLibrary& lib, const std::string& arg) {
  if (fs::exists(arg)) return load_model(arg);
  if (auto p = lib.locate(arg)) return load_model(*p);
  if (auto p = lib.locate(arg + ".mlmodel")) return load_model(*p);
  throw Error(ErrorCode::UnresolvedName, "no model '" + arg + "'");
}

// The theory's syntax plus every symbol the models interpret.
Theory with_model_symbols(const Theory& th, const std::vector<Model>& models) {
  Theory t = th;
  for (const auto& m : models) {
    for (const auto& [s, v] : m.symbols()) {
      if (!t.signature.contains(s)) t.signature.add(s);
    }
  }
  return t;
}

json set_json(const Model& m, const Subset& s) {
  json out = json::array();
  for (std::size_t i : s.elements()) out.push_back(m.element_name(i));
  return out;
}

std::string valuation_text(const Model& m, const Valuation& v) {
  std::string out;
  for (const auto& [x, a] : v.evars) out += (out.empty() ? "" : ", ") + x + " = " + m.element_name(a);
  for (const auto& [X, s] : v.svars) out += (out.empty() ? "" : ", ") + X + " = " + m.render(s);
  return out.empty() ? "(empty valuation)" : out;
}

json valuation_json(const Model& m, const Valuation& v) {
  json out = json::object();
  for (const auto& [x, a] : v.evars) out[x] = m.element_name(a);
  for (const auto& [X, s] : v.svars) out[X] = set_json(m, s);
  return out;
}

json counterexample_json(const Model& m, const Counterexample& c) {
  return {{"model", c.model}, {"valuation", valuation_json(m, c.valuation)}, {"denotation", set_json(m, c.denotation)}};
}

std::string counterexample_text(const Model& m, const Counterexample& c) {
  return "countermodel " + c.model + " under " + valuation_text(m, c.valuation) + ": denotation " +
         m.render(c.denotation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matching logic workbench"};
  app.require_subcommand(1);
  Options opt;
  if (const char* b = std::getenv("ML_BUDGET")) {
    try {
      opt.budget = std::stod(b);
    } catch (const std::exception&) {
      std::cerr << "error: ML_BUDGET is not a number\n";
      return 2;
    }
  }
  app.add_flag("--json", opt.json, "Machine-readable output");
  app.add_option("--budget", opt.budget, "Cap on enumerated valuations (default from ML_BUDGET)");

  std::string pattern_text, model_arg, valuation_text_arg, models_dir, goal_text, file, export_path, host = "127.0.0.1",
                                                                                                      snapshot_dir;
  bool axioms = false, transcript = false;
  int port = 8080;

  auto* check_wf = app.add_subcommand("check-wf", "Check that a pattern is well-formed");
  check_wf->add_option("pattern", pattern_text)->required();
  check_wf->add_option("--theory", opt.theory);

  auto* eval_cmd = app.add_subcommand("eval", "Denotation of a pattern in a model");
  eval_cmd->add_option("pattern", pattern_text)->required();
  eval_cmd->add_option("--model", model_arg)->required();
  eval_cmd->add_option("--valuation", valuation_text_arg, "e.g. 'x = a, X = {a, b}'");
  eval_cmd->add_option("--theory", opt.theory);

  auto* mc = app.add_subcommand("model-check", "Does a model satisfy a pattern (or the theory's axioms)");
  mc->add_option("pattern", pattern_text);
  mc->add_flag("--axioms", axioms, "Check every axiom of --theory");
  mc->add_option("--model", model_arg)->required();
  mc->add_option("--theory", opt.theory);

  auto* ent = app.add_subcommand("entails", "Entailment relative to a directory of models");
  ent->add_option("--models", models_dir)->required();
  ent->add_option("--theory", opt.theory);
  ent->add_option("--goal", goal_text)->required();

  auto* cp = app.add_subcommand("check-proof", "Kernel-check a proof object");
  cp->add_option("file", file)->required();
  cp->add_option("--theory", opt.theory);

  auto* prove = app.add_subcommand("prove", "Run a tactic script to qed");
  prove->add_option("script", file)->required();
  prove->add_option("--theory", opt.theory);
  prove->add_option("--goal", goal_text);
  prove->add_option("--export", export_path, "Write the proof object here");
  prove->add_flag("--transcript", transcript, "Print the state after every tactic");

  auto* serve = app.add_subcommand("serve", "Run the proof session service");
  serve->add_option("--port", port);
  serve->add_option("--host", host, "Bind address (loopback by default)");
  serve->add_option("--snapshot", snapshot_dir, "Persist sessions as replayable scripts in this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  TheoryLibrary lib;
  EvalOptions eo;
  eo.budget = opt.budget;

  try {
    if (*check_wf) {
      TheoryPtr th = load_theory(lib, opt.theory);
      Pattern p = th->parse(pattern_text);
      bool ex = wf_closed_ex(p, 0), mu_ = wf_closed_mu(p, 0), pos = wf_positive(p);
      bool ok = ex && mu_ && pos;
      std::string text = ok ? "well-formed" : "not well-formed:";
      if (!ex) text += " dangling element index;";
      if (!mu_) text += " dangling set index;";
      if (!pos) text += " negative occurrence of a mu-bound variable;";
      if (!ok) text.pop_back();
      json j = {{"well_formed", ok}, {"closed_ex", ex}, {"closed_mu", mu_}, {"positive", pos},
                {"pattern", print_pattern(p)}};
      return report(opt, j, text, ok ? 0 : 1);
    }

    if (*eval_cmd) {
      Model m = load_model_arg(lib, model_arg);
      Theory th = with_model_symbols(*load_theory(lib, opt.theory), {m});
      Pattern p = th.parse(pattern_text);
      Valuation rho = valuation_text_arg.empty() ? Valuation{} : parse_valuation(valuation_text_arg, m);
      Subset s = eval(m, rho, p, eo);
      return report(opt, {{"model", m.name()}, {"denotation", set_json(m, s)}}, m.render(s), 0);
    }

    if (*mc) {
      Model m = load_model_arg(lib, model_arg);
      Theory th = with_model_symbols(*load_theory(lib, opt.theory), {m});
      std::vector<std::pair<std::string, Pattern>> goals;
      if (axioms) {
        if (!pattern_text.empty()) throw Error(ErrorCode::Syntax, "give a pattern or --axioms, not both");
        goals = th.axioms.axioms();
      } else {
        if (pattern_text.empty()) throw Error(ErrorCode::Syntax, "missing pattern (or --axioms)");
        goals.emplace_back("pattern", th.parse(pattern_text));
      }
      json results = json::array();
      std::string text;
      bool all = true;
      for (const auto& [name, p] : goals) {
        if (!well_formed(p)) throw Error(ErrorCode::PreconditionFailed, name + " is not well-formed");
        auto c = find_counterexample(m, p, eo);
        json r = {{"name", name}, {"holds", !c}};
        if (c) {
          all = false;
          r["counterexample"] = counterexample_json(m, *c);
          text += name + ": fails, " + counterexample_text(m, *c) + "\n";
        } else {
          text += name + ": holds\n";
        }
        results.push_back(r);
      }
      return report(opt, {{"model", m.name()}, {"holds", all}, {"results", results}}, text, all ? 0 : 1);
    }

    if (*ent) {
      std::vector<fs::path> paths;
      for (const auto& e : fs::directory_iterator(models_dir)) {
        if (e.path().extension() == ".mlmodel") paths.push_back(e.path());
      }
      std::sort(paths.begin(), paths.end());
      std::vector<Model> models;
      for (const auto& p : paths) models.push_back(load_model(p));
      Theory th = with_model_symbols(*load_theory(lib, opt.theory), models);
      Pattern goal = th.parse(goal_text);
      std::vector<Pattern> gamma;
      for (const auto& [n, p] : th.axioms.axioms()) gamma.push_back(p);
      eo.parallel = true;
      EntailmentResult r = entails_over(models, gamma, goal, eo);
      json j = {{"entailed", r.entailed}, {"models", models.size()},
                {"models_satisfying_theory", r.models_satisfying_theory}};
      std::string text;
      if (r.entailed) {
        text = "entailed over " + std::to_string(r.models_satisfying_theory) + " of " + std::to_string(models.size()) +
               " models satisfying the theory";
      } else {
        const Model& m = *std::find_if(models.begin(), models.end(),
                                       [&](const Model& x) { return x.name() == r.counterexample->model; });
        j["counterexample"] = counterexample_json(m, *r.counterexample);
        text = "not entailed: " + counterexample_text(m, *r.counterexample);
      }
      return report(opt, j, text, r.entailed ? 0 : 1);
    }

    if (*cp) {
      DecodedProof d = decode_proof(read_file(file));
      std::string name = opt.theory.empty() ? d.theory : opt.theory;
      TheoryPtr th = load_theory(lib, name);
      Theorem t = check(th->axioms, d.root);
      std::string shown = print_pattern(t.conclusion(), true, true);
      json j = {{"valid", true}, {"theory", th->name}, {"conclusion", shown}, {"nodes", proof_size(t.proof())}};
      return report(opt, j, "⊢ " + shown, 0);
    }

    if (*prove) {
      Script sc = parse_script(read_file(file));
      std::string name = !opt.theory.empty() ? opt.theory : sc.theory.value_or("");
      TheoryPtr th = load_theory(lib, name);
      if (goal_text.empty() && !sc.goal) throw Error(ErrorCode::Syntax, "no goal: use --goal or a 'lemma' line");
      Pattern goal = goal_text.empty() ? detail::at_line(sc.goal_line, 1, [&] { return th->parse(*sc.goal); })
                                       : th->parse(goal_text);
      ScriptRun run = run_script(th, goal, sc);
      std::string bytes = export_proof(run.theorem);
      if (!export_path.empty()) {
        std::ofstream out(export_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::UnresolvedName, "cannot write '" + export_path + "'");
        out << bytes;
      }
      std::string shown = print_pattern(run.theorem.conclusion(), true, true);
      std::string text;
      json states = json::array();
      for (const auto& [tac, st] : run.transcript) {
        states.push_back({{"tactic", tac}, {"state", st}});
        if (transcript) text += "> " + tac + "\n" + st + "\n";
      }
      text += "qed: " + th->name + " ⊢ " + print_pattern(goal, true, true);
      json j = {{"qed", true}, {"theory", th->name}, {"goal", print_pattern(goal, true, true)},
                {"conclusion", shown}, {"transcript", states}, {"nodes", proof_size(run.theorem.proof())}};
      return report(opt, j, text, 0);
    }

    if (*serve) {
      std::optional<fs::path> snap;
      if (!snapshot_dir.empty()) snap = snapshot_dir;
      ProofService svc(lib, snap);
      httplib::Server server;
      svc.attach(server);
      std::cerr << "serving on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return 2;
      }
      return 0;
    }
  } catch (const Error& e) {
    return fail(opt, e);
  } catch (const std::exception& e) {
    return fail(opt, Error(ErrorCode::Internal, e.what()));
  }
  return 2;
}

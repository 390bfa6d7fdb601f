#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bt/boxops.hpp"
#include "bt/calculus.hpp"
#include "bt/instantiate.hpp"
#include "bt/model.hpp"
#include "bt/normalize.hpp"
#include "bt/render.hpp"
#include "bt/syntax.hpp"
#include "bt/theory.hpp"
#include "bt/wellformed.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cmd_check(const std::string& file) {
  bt::WfReport report = bt::check_wellformed(bt::parse_tensor(slurp(file)));
  if (report.ok()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const bt::Violation& v : report.violations)
    std::cout << bt::to_string(v) << "\n";
  return 1;
}

int cmd_normalize(const std::string& file) {
  std::cout << bt::print(bt::canonical_form(bt::parse_tensor(slurp(file))))
            << "\n";
  return 0;
}

int cmd_op(const std::string& file, const std::string& exp_b,
           const std::string& kill_b, const std::string& copy_b,
           const std::string& drop_b, const std::string& weaken_b,
           const std::string& with_src) {
  int actions = !exp_b.empty() + !kill_b.empty() + !copy_b.empty() +
                !drop_b.empty() + !weaken_b.empty();
  if (actions != 1)
    throw UsageError(
        "op needs exactly one of --exp, --kill, --copy, --drop, --weaken");
  if (!weaken_b.empty() && with_src.empty())
    throw UsageError("--weaken needs --with EXPR");
  if (weaken_b.empty() && !with_src.empty())
    throw UsageError("--with only applies to --weaken");

  bt::TensorExpr t = bt::parse_tensor(slurp(file));
  bt::TensorExpr result;
  if (!exp_b.empty())
    result = bt::apply(t, bt::BoxOp{bt::OpKind::Exp, exp_b});
  else if (!kill_b.empty())
    result = bt::apply(t, bt::BoxOp{bt::OpKind::Kill, kill_b});
  else if (!copy_b.empty())
    result = bt::apply(t, bt::BoxOp{bt::OpKind::Copy, copy_b});
  else if (!drop_b.empty())
    result = bt::apply(t, bt::BoxOp{bt::OpKind::Drop, drop_b});
  else
    result = bt::weaken(t, weaken_b, bt::parse_tensor(with_src));
  std::cout << bt::print(result) << "\n";
  return 0;
}

int cmd_instantiate(const std::string& file, int bound) {
  bt::TensorExpr t = bt::parse_tensor(slurp(file));
  bt::require_wellformed(t);
  for (const bt::TensorExpr& inst :
       bt::enumerate_instances(t, bt::InstanceBound{bound}))
    std::cout << bt::print(inst) << "\n";
  return 0;
}

int cmd_prove(const std::string& theory_path, const std::string& proof_path) {
  bt::Theory thy = bt::parse_theory(slurp(theory_path));
  bt::validate_theory(thy);
  bt::ProofScript script = bt::parse_proof(slurp(proof_path));
  bt::ProofReport report = bt::check_proof(thy, script);
  std::cout << bt::to_string(report);
  return report.all_accepted() ? 0 : 1;
}

int cmd_eval(const std::string& model_path, int bound,
             const std::string& theory_path, const std::string& eqname) {
  bt::Model model = bt::parse_model(slurp(model_path));
  bt::Theory thy = bt::parse_theory(slurp(theory_path));
  bt::validate_theory(thy);
  const bt::Equation* eq = thy.find_axiom(eqname);
  if (!eq) throw bt::NotFound("no axiom named '" + eqname + "'");
  bt::InstanceReport report =
      bt::check_equation_instances(*eq, model, bt::InstanceBound{bound});
  if (report.ok()) {
    std::cout << "checked " << report.checked << " instances, all hold\n";
    return 0;
  }
  std::cout << "checked " << report.checked << " instances, "
            << report.failures.size() << " failed\n";
  for (const bt::InstanceFailure& f : report.failures)
    std::cout << "failed: " << bt::print(f.instance.lhs) << " = "
              << bt::print(f.instance.rhs) << ": " << f.detail << "\n";
  return 1;
}

int cmd_render(const std::string& file) {
  std::cout << bt::to_dot(bt::parse_tensor(slurp(file)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"!-tensor workbench: well-formedness, box operations, proofs"};
  app.require_subcommand(1);

  std::string file, with_src, model_path, theory_path, proof_path, eqname;
  std::string exp_b, kill_b, copy_b, drop_b, weaken_b;
  int bound = 0;

  CLI::App* check = app.add_subcommand("check", "report well-formedness");
  check->add_option("file", file, "term file")->required();

  CLI::App* normalize =
      app.add_subcommand("normalize", "print the canonical form");
  normalize->add_option("file", file, "term file")->required();

  CLI::App* op = app.add_subcommand("op", "apply one box operation");
  op->add_option("--exp", exp_b, "expand a box");
  op->add_option("--kill", kill_b, "remove a box");
  op->add_option("--copy", copy_b, "duplicate a box");
  op->add_option("--drop", drop_b, "dissolve a box");
  op->add_option("--weaken", weaken_b, "extend a box body");
  op->add_option("--with", with_src, "tensor appended by --weaken");
  op->add_option("file", file, "term file")->required();

  CLI::App* inst =
      app.add_subcommand("instantiate", "list instances within a bound");
  inst->add_option("--bound", bound, "expansions per box")->required();
  inst->add_option("file", file, "term file")->required();

  CLI::App* prove = app.add_subcommand("prove", "check a proof script");
  prove->add_option("theory", theory_path, "theory file")->required();
  prove->add_option("proof", proof_path, "proof file")->required();

  CLI::App* eval =
      app.add_subcommand("eval", "check axiom instances in a model");
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--bound", bound, "expansions per box")->required();
  eval->add_option("theory", theory_path, "theory file")->required();
  eval->add_option("equation", eqname, "axiom name")->required();

  CLI::App* render = app.add_subcommand("render", "emit DOT");
  render->add_option("file", file, "term file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check) return cmd_check(file);
    if (*normalize) return cmd_normalize(file);
    if (*op)
      return cmd_op(file, exp_b, kill_b, copy_b, drop_b, weaken_b, with_src);
    if (*inst) return cmd_instantiate(file, bound);
    if (*prove) return cmd_prove(theory_path, proof_path);
    if (*eval) return cmd_eval(model_path, bound, theory_path, eqname);
    if (*render) return cmd_render(file);
  } catch (const bt::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const bt::BtError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}

// frg: command line front end for the flow machinery.
//
// Exit codes: 0 ok, 1 usage or invalid request, 2 model parse error,
// 3 a check found a mismatch.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "frg/json_io.hpp"
#include "frg/oracle.hpp"
#include "frg/pipeline.hpp"
#include "frg/ribbon.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kParse = 2;
constexpr int kCheckFailed = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string model_path;
  std::optional<unsigned> kmax;
  std::optional<unsigned> order;
  std::optional<std::size_t> degree_max;
  std::optional<int> n;
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> starts;
  std::optional<int> k;
  bool large_n = false;
  bool text = false;
  bool json = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read model file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <class T>
std::string opt_str(const char* flag, const std::optional<T>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(17) << ' ' << flag << '=' << *v;
  return os.str();
}

// Hash of everything that determines the payload: command, model text and
// the flags that were given.
std::string input_hash(const std::string& command, const std::string& model_text, const Settings& s) {
  std::string key = command + '\n' + model_text + '\n';
  key += opt_str("kmax", s.kmax) + opt_str("order", s.order) + opt_str("degree-max", s.degree_max) +
         opt_str("N", s.n) + opt_str("eta", s.eta) + opt_str("seed", s.seed) + opt_str("starts", s.starts) +
         opt_str("k", s.k) + (s.large_n ? " large-n" : "");
  return frg::hex64(frg::fnv1a(key));
}

struct Output {
  frg::Json payload;
  std::string text;
  int code = 0;
};

frg::Model load(const Settings& s, std::string& text) {
  text = read_file(s.model_path);
  frg::Model m = frg::parse_model(text);
  return frg::apply(m, {s.kmax, s.order, s.degree_max, s.seed, s.starts});
}

std::string equations_text(const std::vector<frg::FlowEquation>& eqs, const char* head) {
  std::string out;
  for (const auto& e : eqs) out += std::string(head) + "(" + frg::to_string(e.target) + ") = " + frg::to_string(e.rhs) + "\n";
  return out;
}

Output cmd_hessian(const frg::Model& m) {
  const frg::ActionSeries inter = frg::gamma_int(frg::expanded_action(m));
  const frg::HessMatrix h = frg::hess_sum(inter.operators, inter.alphabet.size());
  Output o;
  o.payload["matrices"] = inter.alphabet.names();
  o.payload["entries"] = frg::to_json(h, inter.alphabet);
  for (const auto& e : o.payload["entries"])
    o.text += "H[" + e["row"].get<std::string>() + "," + e["column"].get<std::string>() + "] = " +
              e["entry"].get<std::string>() + "\n";
  return o;
}

Output cmd_rhs(const frg::Model& m) {
  const frg::Analysis a = frg::analyze(m);
  Output o;
  o.payload["k_max"] = a.rhs_options.k_max;
  o.payload["order"] = a.rhs_options.coupling_order;
  o.payload["degree_max"] = a.rhs_options.degree_max.value_or(0);
  o.payload["terms"] = frg::to_json(a.rhs.terms, a.action.alphabet);
  o.payload["warnings"] = a.rhs.warnings;
  for (const auto& w : a.rhs.warnings) o.text += "warning: " + w + "\n";
  for (const auto& t : o.payload["terms"])
    o.text += t["coefficient"].get<std::string>() + "  " + t["invariant"].get<std::string>() + "\n";
  return o;
}

Output cmd_beta(const frg::Model& m, bool large_n) {
  const frg::Analysis a = frg::analyze(m);
  const frg::BetaSystem* bs = &a.beta;
  if (large_n) {
    if (!a.large_n) {
      std::string msg = "no consistent large-N scaling";
      for (const auto& w : a.scaling.witnesses) msg += "\n  " + w;
      throw UsageError(msg);
    }
    bs = &*a.large_n;
  }
  Output o;
  o.payload = frg::to_json(*bs);
  o.payload["warnings"] = a.rhs.warnings;
  o.text = equations_text(bs->eta, "eta") + equations_text(bs->beta, "beta");
  if (!bs->generated.is_zero()) o.text += "generated: " + frg::to_string(bs->generated, bs->alphabet) + "\n";
  return o;
}

Output cmd_scaling(const frg::Model& m) {
  const frg::Analysis a = frg::analyze(m);
  Output o;
  o.payload = frg::to_json(a.scaling, a.beta);
  o.text = std::string("feasible: ") + (a.scaling.feasible ? "yes" : "no") + "\n";
  for (const auto& [name, k] : o.payload["kappa"].items()) o.text += "kappa(" + name + ") = " + k.get<std::string>() + "\n";
  for (const auto& w : a.scaling.witnesses) o.text += "witness: " + w + "\n";
  for (const auto& n : a.scaling.notes) o.text += "note: " + n + "\n";
  return o;
}

Output cmd_fixed_point(const frg::Model& m) {
  const frg::Analysis a = frg::analyze(m);
  if (!a.large_n) throw UsageError("no consistent large-N scaling; run 'scaling' for witnesses");
  const frg::NumericSystem sys = frg::NumericSystem::from(*a.large_n);
  const frg::MultistartResult res = frg::newton_multistart(sys, frg::newton_options(m));
  Output o;
  o.payload = frg::to_json(res, sys);
  std::ostringstream os;
  os << std::setprecision(8);
  os << res.roots.size() << " fixed points (" << res.converged << "/" << res.attempted << " starts converged)\n";
  for (std::size_t i = 0; i < res.roots.size(); ++i) {
    const auto& r = res.roots[i];
    os << "#" << i << "  relevant directions: " << r.positive_eigenvalues() << "  residual: " << r.residual_norm
       << (r.stability.ill_conditioned ? "  (ill-conditioned)" : "") << "\n";
    for (std::size_t v = 0; v < sys.dim(); ++v)
      if (std::abs(r.values[static_cast<Eigen::Index>(v)]) > 1e-12)
        os << "  " << sys.labels()[v] << " = " << r.values[static_cast<Eigen::Index>(v)] << "\n";
  }
  for (const auto& d : res.diagnostics) os << "diagnostic: " << d << "\n";
  o.text = os.str();
  return o;
}

Output cmd_check_oracle(const frg::Model& m, int size, std::uint64_t seed) {
  if (size < 1 || size > static_cast<int>(frg::oracle::kMaxSize))
    throw UsageError("--N must be between 1 and " + std::to_string(frg::oracle::kMaxSize));
  const frg::ActionSeries act = frg::expanded_action(m);
  const auto sample = frg::oracle::make_sample(act.alphabet.size(), static_cast<std::size_t>(size), seed);
  const auto val = frg::oracle::default_valuation(sample);
  const double tol = 1e-9;
  Output o;
  o.payload["N"] = size;
  o.payload["seed"] = seed;
  o.payload["tolerance"] = tol;
  o.payload["rows"] = frg::Json::array();
  std::ostringstream os;
  os << std::scientific << std::setprecision(3);
  bool ok = true;
  for (const auto& op : act.operators) {
    const auto symbolic = frg::oracle::realize_matrix(frg::hess_operator(op, act.alphabet.size()), sample, val);
    const auto numeric = frg::oracle::assemble_blocks(frg::oracle::numeric_hessian(op, sample, val));
    const double r = frg::oracle::relative_residual(symbolic, numeric);
    const bool pass = r < tol;
    ok = ok && pass;
    o.payload["rows"].push_back({{"coupling", op.coupling.name}, {"residual", r}, {"pass", pass}});
    os << (pass ? "ok   " : "FAIL ") << op.coupling.name << "  " << r << "\n";
  }
  o.payload["pass"] = ok;
  o.text = os.str();
  o.code = ok ? 0 : kCheckFailed;
  return o;
}

Output cmd_check_ribbon(const frg::Model& m) {
  const frg::ActionSeries act = frg::expanded_action(m);
  const frg::RhsOptions ro = frg::rhs_options(m, act);
  const frg::ActionSeries inter = frg::gamma_int(act);
  Output o;
  o.payload["rows"] = frg::Json::array();
  bool ok = true;
  for (unsigned k = 1; k <= ro.k_max; ++k) {
    const auto rep = frg::ribbon::cross_check_flow(inter.operators, act.alphabet.size(), k, ro.degree_max);
    ok = ok && rep.match;
    frg::Json row{{"k", k}, {"match", rep.match}, {"graph_classes", rep.graph_classes},
                  {"labeled_chains", rep.labeled_chains}};
    if (rep.first_difference) row["first_difference"] = frg::to_string(*rep.first_difference, act.alphabet);
    o.payload["rows"].push_back(row);
    o.text += std::string(rep.match ? "ok   " : "FAIL ") + "k=" + std::to_string(k) + "  classes " +
              std::to_string(rep.graph_classes) + "  chains " + std::to_string(rep.labeled_chains) + "\n";
  }
  o.payload["pass"] = ok;
  o.code = ok ? 0 : kCheckFailed;
  return o;
}

Output cmd_hbar(int k, int n, double eta) {
  if (k < 1) throw UsageError("--k must be at least 1");
  if (n < 2) throw UsageError("--N must be at least 2");
  const double disk = frg::compute_hbar(k, n, eta, frg::HbarMode::DiskSum);
  const double integral = frg::compute_hbar(k, n, eta, frg::HbarMode::Integral);
  const double rel = std::abs(disk - integral) / std::abs(integral);
  Output o;
  o.payload = {{"k", k}, {"N", n}, {"eta", eta}, {"disk_sum", disk}, {"integral", integral}, {"relative_difference", rel}};
  std::ostringstream os;
  os << std::setprecision(12) << "disk sum  " << disk << "\nintegral  " << integral << "\nrelative  " << rel << "\n";
  o.text = os.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional renormalization of multi-matrix models"};
  app.set_version_flag("--version", frg::kVersion);
  app.require_subcommand(1);
  Settings s;

  auto output_flags = [&](CLI::App* c) {
    auto* t = c->add_flag("--text", s.text, "Human-readable output");
    auto* j = c->add_flag("--json", s.json, "JSON output (default)");
    t->excludes(j);
  };
  auto truncation_flags = [&](CLI::App* c) {
    c->add_option("--kmax", s.kmax, "Highest Hessian power")->check(CLI::PositiveNumber);
    c->add_option("--order", s.order, "Coupling order kept in the expansion");
    c->add_option("--degree-max", s.degree_max, "Largest field degree kept");
  };
  auto model_arg = [&](CLI::App* c) { c->add_option("model", s.model_path, "Model file")->required(); };

  auto* hessian = app.add_subcommand("hessian", "Hessian of the interaction part");
  model_arg(hessian);
  output_flags(hessian);
  auto* rhs = app.add_subcommand("rhs", "Right-hand side of the flow equation");
  model_arg(rhs);
  truncation_flags(rhs);
  output_flags(rhs);
  auto* beta = app.add_subcommand("beta", "Anomalous dimensions and beta functions");
  model_arg(beta);
  truncation_flags(beta);
  output_flags(beta);
  beta->add_flag("--large-n", s.large_n, "Rescale and take the large-N limit");
  auto* scaling = app.add_subcommand("scaling", "N and wave-function exponents of the couplings");
  model_arg(scaling);
  truncation_flags(scaling);
  output_flags(scaling);
  auto* fixed = app.add_subcommand("fixed-point", "Fixed points of the large-N system");
  model_arg(fixed);
  truncation_flags(fixed);
  output_flags(fixed);
  fixed->add_option("--seed", s.seed, "Seed for the random starts");
  fixed->add_option("--starts", s.starts, "Number of random starts");
  auto* check = app.add_subcommand("check", "Cross-checks against independent oracles");
  check->require_subcommand(1);
  auto* oracle = check->add_subcommand("oracle", "Hessians against numeric second derivatives");
  model_arg(oracle);
  output_flags(oracle);
  oracle->add_option("--N", s.n, "Matrix size")->default_val(4);
  oracle->add_option("--seed", s.seed, "Seed for the random matrices")->default_val(1);
  auto* ribbon = check->add_subcommand("ribbon", "Flow terms against ribbon graph enumeration");
  model_arg(ribbon);
  truncation_flags(ribbon);
  output_flags(ribbon);
  auto* hbar = app.add_subcommand("hbar", "Regulator coefficients: lattice sum and continuum value");
  output_flags(hbar);
  hbar->add_option("--k", s.k, "Power of the propagator")->default_val(1);
  hbar->add_option("--N", s.n, "Matrix size")->default_val(100);
  hbar->add_option("--eta", s.eta, "Anomalous dimension")->default_val(0.0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  std::string command;
  std::string model_text;
  Output out;
  try {
    if (*hbar) {
      command = "hbar";
      out = cmd_hbar(*s.k, *s.n, *s.eta);
    } else {
      const frg::Model m = load(s, model_text);
      if (*hessian) command = "hessian", out = cmd_hessian(m);
      else if (*rhs) command = "rhs", out = cmd_rhs(m);
      else if (*beta) command = "beta", out = cmd_beta(m, s.large_n);
      else if (*scaling) command = "scaling", out = cmd_scaling(m);
      else if (*fixed) command = "fixed-point", out = cmd_fixed_point(m);
      else if (*oracle) command = "check oracle", out = cmd_check_oracle(m, *s.n, *s.seed);
      else command = "check ribbon", out = cmd_check_ribbon(m);
    }
  } catch (const frg::ModelError& e) {
    std::cerr << s.model_path << ":" << e.what() << "\n";
    return kParse;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (s.text) {
    std::cout << out.text;
  } else {
    std::cout << frg::envelope(command, input_hash(command, model_text, s), out.payload).dump(2) << "\n";
  }
  return out.code;
}

// qcont: evaluate entropies, remainders and continuity bounds, and run
// seeded verification campaigns.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcont.hpp"

using namespace qcont;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  std::vector<Index> dims;
  double tol = -1.0;  // negative: use the default of the check
  std::string out;
  std::string format = "json";
  std::string log_base = "e";
};

double display(const Globals& g, double nats) { return g.log_base == "2" ? nats / std::log(2.0) : nats; }

std::ostream& sink(const Globals& g, std::unique_ptr<std::ofstream>& file) {
  if (g.out.empty()) return std::cout;
  file = std::make_unique<std::ofstream>(g.out);
  if (!*file) throw std::runtime_error("cannot write " + g.out);
  return *file;
}

// Rows with identical keys; printed as a JSON array or CSV.
void emit_rows(const Globals& g, const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::unique_ptr<std::ofstream> file;
  std::ostream& os = sink(g, file);
  if (g.format == "csv") {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
    return;
  }
  json arr = json::array();
  for (const auto& r : rows) {
    json o;
    for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = r[i];
    arr.push_back(o);
  }
  os << arr.dump(2) << '\n';
}

void emit_object(const Globals& g, const json& j) {
  std::unique_ptr<std::ofstream> file;
  std::ostream& os = sink(g, file);
  if (g.format == "csv") {
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << (first ? "" : ",") << it.key();
      first = false;
    }
    os << '\n';
    first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << (first ? "" : ",") << it.value().dump();
      first = false;
    }
    os << '\n';
    return;
  }
  os << j.dump(2) << '\n';
}

SubsystemLayout layout_for(const Globals& g, const std::string& layout_file, Index total) {
  if (!layout_file.empty()) return io::layout_from_json(io::read_json_file(layout_file));
  if (!g.dims.empty()) return SubsystemLayout::lettered(g.dims);
  return SubsystemLayout::lettered({total});
}

std::vector<double> p_grid(int points) {
  if (points <= 0) return default_p_grid();
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? 0.0 : static_cast<double>(i) / (points - 1));
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuity bounds and almost concavity of quantum relative entropies"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--trials", g.trials, "Number of trials")->capture_default_str();
  app.add_option("--dims", g.dims, "Factor dimensions, e.g. --dims 2 2")->delimiter(',');
  app.add_option("--tol", g.tol, "Tolerance override");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--log-base", g.log_base, "Display base for entropies")
      ->check(CLI::IsMember({"e", "2"}))
      ->capture_default_str();

  // entropy
  auto* ent = app.add_subcommand("entropy", "Evaluate an entropic quantity on operator files");
  std::string quantity = "umegaki", rho_file, sigma_file, layout_file;
  ent->add_option("quantity", quantity, "von_neumann | umegaki | bs | bs_sigma_form | ce | mi | cmi | bs_ce | bs_mi | bs_cmi")
      ->check(CLI::IsMember({"von_neumann", "umegaki", "bs", "bs_sigma_form", "ce", "mi", "cmi", "bs_ce", "bs_mi",
                             "bs_cmi"}));
  ent->add_option("--rho", rho_file, "State JSON")->required();
  ent->add_option("--sigma", sigma_file, "Second argument JSON (divergences)");
  ent->add_option("--layout", layout_file, "Layout JSON (or use --dims)");

  // remainder
  auto* rem = app.add_subcommand("remainder", "Tabulate f(p) or f^(p) over a p-grid");
  std::string kind = "umegaki", r1f, s1f, r2f, s2f;
  int points = 0;
  rem->add_option("--kind", kind)->check(CLI::IsMember({"umegaki", "bs"}))->capture_default_str();
  rem->add_option("--rho1", r1f)->required();
  rem->add_option("--sigma1", s1f)->required();
  rem->add_option("--rho2", r2f)->required();
  rem->add_option("--sigma2", s2f)->required();
  rem->add_option("--points", points, "Uniform grid size (default: 41 points plus edge refinements)");

  // bound
  auto* bnd = app.add_subcommand("bound", "Evaluate a catalog bound");
  std::string bound_name;
  double eps = 0.0, m = 0.0;
  double c_const = std::nan("");
  std::string rho2_file, sigma2_file;
  bnd->add_option("name", bound_name, "divergence | ce | mi | cmi | second_input | two_input | bs_quantity")
      ->required()
      ->check(CLI::IsMember({"divergence", "ce", "mi", "cmi", "second_input", "two_input", "bs_quantity"}));
  bnd->add_option("--eps", eps, "Trace distance");
  bnd->add_option("--m", m, "m~ (second/two input) or eigenvalue floor m (bs_quantity)");
  bnd->add_option("--C", c_const, "Absolute constant for bs_quantity (no default)");
  bnd->add_option("--rho", rho_file);
  bnd->add_option("--sigma", sigma_file);
  bnd->add_option("--rho2", rho2_file);
  bnd->add_option("--sigma2", sigma2_file);

  // verify
  auto* ver = app.add_subcommand("verify", "Run a seeded campaign for one check");
  std::string check_name, sampler;
  Index rank = 0;
  double floor_m = 0.05;
  double bs_constant = std::nan("");
  unsigned threads = 0;
  ver->add_option("check", check_name, "Check name (see list-checks)")->required();
  ver->add_option("--sampler", sampler, "ginibre | ginibre_rank_k | pure | min_eig_floor | identical");
  ver->add_option("--rank", rank, "Rank for ginibre_rank_k (0 = random)");
  ver->add_option("--floor", floor_m, "Eigenvalue floor for min_eig_floor")->capture_default_str();
  ver->add_option("--bs-constant", bs_constant, "Absolute constant for the BS bounds");
  ver->add_option("--threads", threads, "Worker threads (0 = hardware)");

  // tightness
  auto* tight = app.add_subcommand("tightness", "Tightness example over (t, p) grids");
  std::vector<double> t_values = {0.1, 0.25, 0.4};
  tight->add_option("--t", t_values, "Values of t")->delimiter(',');
  tight->add_option("--points", points, "p-grid size")->capture_default_str();

  // uncertainty
  auto* unc = app.add_subcommand("uncertainty", "Uncertainty relation with quantum memory");
  std::string bases_file;
  bool mub = false;
  unc->add_option("--rho", rho_file)->required();
  unc->add_option("--layout", layout_file);
  unc->add_option("--bases", bases_file, "JSON {\"x\": operator, \"y\": operator}, basis vectors as columns");
  unc->add_flag("--mub", mub, "Computational and Fourier bases");

  // markov
  auto* mkv = app.add_subcommand("markov", "Markov chain sandwich via the Petz recovery");
  mkv->add_option("--rho", rho_file)->required();
  mkv->add_option("--layout", layout_file);

  // optimize
  auto* opt = app.add_subcommand("optimize", "Relative-entropy distance to a convex set");
  std::string set_name = "locally_maximally_mixed";
  SolverConfig solver;
  opt->add_option("--rho", rho_file)->required();
  opt->add_option("--layout", layout_file);
  opt->add_option("--set", set_name)
      ->check(CLI::IsMember({"locally_maximally_mixed", "product_states"}))
      ->capture_default_str();
  opt->add_option("--kind", kind)->check(CLI::IsMember({"umegaki", "bs"}))->capture_default_str();
  opt->add_option("--starts", solver.starts)->capture_default_str();
  opt->add_option("--max-iters", solver.max_iters)->capture_default_str();

  auto* lst = app.add_subcommand("list-checks", "List the registered checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ent->parsed()) {
      const DensityMatrix rho = io::read_state(rho_file);
      json j{{"quantity", quantity}};
      auto divergence_pair = [&](EntropyValue v) {
        j["value"] = display(g, v.value);
        j["near_singular"] = v.near_singular;
        j["singular_reference"] = v.singular_reference;
      };
      if (quantity == "von_neumann") {
        j["value"] = display(g, von_neumann_entropy(rho));
      } else if (quantity == "umegaki" || quantity == "bs" || quantity == "bs_sigma_form") {
        if (sigma_file.empty()) throw std::invalid_argument(quantity + " needs --sigma");
        const DensityMatrix sigma = io::read_state(sigma_file);
        if (quantity == "umegaki") divergence_pair(umegaki(rho.op(), sigma.op()));
        if (quantity == "bs") divergence_pair(bs_entropy(rho.op(), sigma.op()));
        if (quantity == "bs_sigma_form") j["value"] = display(g, bs_entropy_sigma_form(rho.op(), sigma.op()));
      } else {
        const SubsystemLayout layout = layout_for(g, layout_file, rho.dim());
        const auto& l = layout.labels();
        if (quantity == "ce") j["value"] = display(g, conditional_entropy(rho, layout, l.back()));
        if (quantity == "mi") j["value"] = display(g, mutual_information(rho, layout));
        if (quantity == "cmi") j["value"] = display(g, conditional_mutual_information(rho, layout));
        if (quantity == "bs_ce") divergence_pair(bs_conditional_entropy(rho, layout, l.back()));
        if (quantity == "bs_mi") divergence_pair(bs_mutual_information(rho, layout));
        if (quantity == "bs_cmi") divergence_pair(bs_cmi(rho, layout));
      }
      emit_object(g, j);
    } else if (rem->parsed()) {
      const DensityMatrix r1 = io::read_state(r1f), s1 = io::read_state(s1f);
      const DensityMatrix r2 = io::read_state(r2f), s2 = io::read_state(s2f);
      const RemainderFunction f = kind == "umegaki" ? umegaki_remainder(r1, s1, r2, s2) : bs_remainder(r1, s1, r2, s2);
      std::vector<std::vector<double>> rows;
      for (double p : p_grid(points)) rows.push_back({p, display(g, f(p))});
      std::cerr << "c1 = " << f.c1 << ", c2 = " << f.c2 << ", h coefficient = " << f.h_coefficient << '\n';
      emit_rows(g, {"p", "f"}, rows);
    } else if (bnd->parsed()) {
      json j{{"bound", bound_name}};
      auto dim = [&](std::size_t i) {
        if (g.dims.size() <= i) throw std::invalid_argument(bound_name + " needs --dims");
        return g.dims[i];
      };
      if (bound_name == "divergence") {
        const DivergenceBound b = divergence_bound(io::read_state(rho_file), io::read_state(sigma_file));
        j.update({{"epsilon", b.epsilon}, {"m_tilde", b.m_tilde}, {"linear", display(g, b.linear)},
                  {"sqrt_form", display(g, b.sqrt_form)}});
      } else if (bound_name == "ce") {
        j["value"] = display(g, ce_bound(eps, dim(0)));
      } else if (bound_name == "mi") {
        j["value"] = display(g, mi_bound(eps, dim(0), dim(1)));
      } else if (bound_name == "cmi") {
        j["value"] = display(g, cmi_bound(eps, dim(0), dim(1)));
      } else if (bound_name == "second_input") {
        j["value"] = display(g, second_input_bound(io::read_state(rho_file), io::read_state(sigma_file),
                                                   io::read_state(sigma2_file), m));
      } else if (bound_name == "two_input") {
        j["value"] = display(g, two_input_bound(io::read_state(rho_file), io::read_state(rho2_file),
                                                io::read_state(sigma_file), io::read_state(sigma2_file), m));
      } else {
        if (std::isnan(c_const)) throw std::invalid_argument("bs_quantity needs an explicit --C");
        j["value"] = display(g, bs_quantity_bound(eps, m, dim(0), c_const));
      }
      emit_object(g, j);
    } else if (ver->parsed()) {
      CampaignConfig cfg;
      cfg.check_name = check_name;
      cfg.dims = g.dims;
      cfg.trials = g.trials;
      cfg.seed = g.seed;
      if (g.tol >= 0.0) cfg.tolerance = g.tol;
      if (!sampler.empty()) cfg.sampler = sampler_from_string(sampler);
      cfg.rank = rank;
      cfg.floor = floor_m;
      if (!std::isnan(bs_constant)) cfg.bs_constant = bs_constant;
      cfg.threads = threads;
      const CampaignResult r = run_campaign(cfg);
      {
        std::unique_ptr<std::ofstream> file;
        std::ostream& os = sink(g, file);
        if (g.format == "csv") {
          write_csv(os, r.reports);
        } else {
          write_jsonl(os, r.reports);
        }
      }
      const json summary = to_json(r.summary);
      if (!g.out.empty()) {
        std::ofstream(g.out + ".summary.json") << summary.dump(2) << '\n';
      }
      std::cerr << summary.dump() << '\n';
      return r.summary.all_passed() ? 0 : 1;
    } else if (tight->parsed()) {
      std::vector<std::vector<double>> rows;
      for (double t : t_values) {
        const StatePair a{DensityMatrix::basis_state(2, 0), DensityMatrix::diagonal({t, 1.0 - t})};
        const StatePair b{DensityMatrix::basis_state(2, 1), DensityMatrix::diagonal({1.0 - t, t})};
        const RemainderFunction f = umegaki_remainder(a.rho, a.sigma, b.rho, b.sigma);
        for (double p : p_grid(points > 0 ? points : 41)) {
          const double gap = -concavity_defect(DivergenceKind::umegaki, a, b, p);
          rows.push_back({t, p, display(g, f(p)), display(g, gap), std::abs(f(p) - gap)});
        }
      }
      emit_rows(g, {"t", "p", "f", "concavity_gap", "abs_difference"}, rows);
    } else if (unc->parsed()) {
      const DensityMatrix rho = io::read_state(rho_file);
      const SubsystemLayout layout = layout_for(g, layout_file, rho.dim());
      const Index da = layout.dims()[0];
      BasisPair bases = BasisPair::fourier(da);
      if (!bases_file.empty()) {
        const json j = io::read_json_file(bases_file);
        bases = BasisPair(io::matrix_from_json(j.at("x")), io::matrix_from_json(j.at("y")));
      } else if (!mub) {
        bases = BasisPair::computational_and(haar_unitary(da, g.seed));
      }
      const UncertaintyConstants c = uncertainty_constants(bases);
      json j{{"m", c.m}};
      if (!c.xi) {
        j["xi"] = nullptr;
        j["note"] = "m = 0: xi unavailable";
      } else {
        const UncertaintyTerms t = uncertainty_terms(rho, layout, bases);
        j.update({{"H(X|M)", display(g, t.h_x_given_m)},
                  {"H(Y|M)", display(g, t.h_y_given_m)},
                  {"H(A|M)", display(g, t.h_a_given_m)},
                  {"xi", display(g, t.xi)},
                  {"margin", display(g, t.h_x_given_m + t.h_y_given_m + t.xi - t.h_a_given_m)}});
      }
      emit_object(g, j);
    } else if (mkv->parsed()) {
      const DensityMatrix rho = io::read_state(rho_file);
      const SubsystemLayout layout = layout_for(g, layout_file, rho.dim());
      const MarkovSandwich s = markov_sandwich(rho, layout);
      json j{{"cmi", display(g, s.cmi)}, {"upper", display(g, s.upper)}, {"recovery_distance", s.recovery_distance}};
      j["lower"] = s.lower ? json(display(g, *s.lower)) : json(nullptr);
      emit_object(g, j);
    } else if (opt->parsed()) {
      const DensityMatrix rho = io::read_state(rho_file);
      const SubsystemLayout layout = layout_for(g, layout_file, rho.dim());
      const ConvexSet set = set_name == "product_states" ? product_states(layout) : locally_maximally_mixed(layout);
      solver.seed = g.seed;
      const OptimizationResult r =
          optimized_divergence(rho, set, kind == "umegaki" ? DivergenceKind::umegaki : DivergenceKind::bs, solver);
      json j{{"set", set.name},           {"kind", kind},
             {"value", display(g, r.value)}, {"converged", r.converged},
             {"iterations", r.iterations}, {"minimizer", io::matrix_to_json(r.minimizer.matrix())}};
      if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
      emit_object(g, j);
    } else if (lst->parsed()) {
      std::unique_ptr<std::ofstream> file;
      std::ostream& os = sink(g, file);
      if (g.format == "csv") {
        os << "name,inequality\n";
        for (const auto& c : check_registry()) os << c.name << ",\"" << c.inequality << "\"\n";
      } else {
        for (const auto& c : check_registry()) os << c.name << "  " << c.inequality << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

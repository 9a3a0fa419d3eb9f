// dqlab: experiment runner for the nonlocal difference-quotient functional.
// Every command writes a machine-readable JSON report plus CSV traces and
// exits 0 only when all of its checks pass (1: check failure, 2: usage or
// resource error).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#ifdef DQ_HAVE_OPENMP
#include <omp.h>
#endif

#include "dq/engine.hpp"
#include "dq/fixtures.hpp"
#include "dq/levelset.hpp"
#include "dq/report.hpp"

using nlohmann::json;
using namespace dq;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "reports";
  std::string format = "both";  // json | csv | both
  int threads = 0;
  json config;  // parsed --config file (may be empty)

  bool want_json() const { return format == "json" || format == "both"; }
  bool want_csv() const { return format == "csv" || format == "both"; }
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j = json::parse(in, nullptr, true, true);
  if (j.value("schema_version", 1) != 1)
    throw CLI::ValidationError("--config", "unsupported schema_version");
  return j;
}

// config file supplies defaults; explicit command-line flags win
template <class T>
void merge_opt(const CLI::Option* opt, const json& section, const char* key, T& value) {
  if (opt && opt->count() > 0) return;
  if (section.contains(key)) value = section[key].get<T>();
}

void apply_threads(int threads) {
#ifdef DQ_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void emit(const GlobalOpts& g, const std::string& name, const json& report,
          const CsvTable& csv) {
  std::filesystem::path dir(g.out_dir);
  if (g.want_json()) write_json_file(dir / (name + ".json"), report);
  if (g.want_csv()) write_text_file(dir / (name + ".csv"), csv.to_string());
}

json base_report(const GlobalOpts& g, const std::string& experiment) {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment;
  j["seed"] = g.seed;
  return j;
}

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------- counterexample

int cmd_counterexample(const GlobalOpts& g, int jmax, const std::string& preset,
                       int samples) {
  auto t0 = std::chrono::steady_clock::now();
  if (jmax < 2 || jmax > 12) throw CLI::ValidationError("--jmax", "range is 2..12");
  SequencePair seq(SequenceSpec::preset(preset), 64);
  Weight w = Weight::counterexample(seq);
  QuadratureConfig cfg;

  json rep = base_report(g, "counterexample");
  rep["params"] = {{"jmax", jmax}, {"preset", preset}, {"samples", samples}};
  bool pass = true;

  auto cond = check_sequence_conditions(seq, 12);
  json jrows = json::array();
  for (const auto& r : cond.rows)
    jrows.push_back({{"n", r.n},
                     {"mu_growth_ok", r.mu_growth_ok},
                     {"k_step_ok", r.k_step_ok},
                     {"exact", r.exact}});
  rep["sequence_conditions"] = {{"rows", jrows},
                                {"all_ok", cond.all_ok},
                                {"series_summable", cond.series_summable},
                                {"tail_bound_at_12", series_tail_bound(seq, 12)}};
  pass = pass && cond.all_ok && cond.series_summable;

  json qrows = json::array();
  std::uint64_t qseed = splitmix64(g.seed ^ 0xc0ffee);
  for (int i = 1; i <= std::min(jmax, 8); ++i) {
    for (int j = i + 1; j <= std::min(jmax, 8); ++j) {
      auto qb = quotient_bounds_check(seq, i, j, samples, splitmix64(qseed ^ (i * 64 + j)));
      qrows.push_back({{"i", qb.i},
                       {"j", qb.j},
                       {"checked", qb.checked},
                       {"violations", qb.violations},
                       {"min_lower_ratio", qb.min_lower_ratio},
                       {"min_upper_ratio", qb.min_upper_ratio}});
      pass = pass && qb.violations == 0;
    }
  }
  rep["quotient_bounds"] = qrows;

  auto ps = counterexample_partial_sum(seq, w, jmax, cfg);
  rep["partial_sum"] = ps.to_json();
  bool dominated = true;
  for (const auto& row : ps.rows) dominated = dominated && row.S_j <= row.B_j + row.tail_bound;
  rep["partial_sum"]["dominated"] = dominated;
  pass = pass && ps.monotone && ps.cell_bounds_ok && dominated;

  json growth;
  for (double theta : {1.0, 4.0}) {
    // the gap turns increasing past log mu = (4 theta)^4; start beyond it
    double lo = std::max(1e2, 2.0 * std::pow(4.0 * theta, 4.0));
    std::vector<double> grid{lo, 1e2 * lo, 1e4 * lo};
    auto gr = growth_check(w, theta, grid);
    growth[fmt_double(theta)] = {{"grid", grid},
                                 {"strictly_increasing", gr.strictly_increasing},
                                 {"gap", gr.gap}};
    pass = pass && gr.strictly_increasing;
  }
  rep["growth"] = growth;

  json units = json::array();
  for (int i = 1; i <= 12; ++i) {
    double v = w.unit_window_integral(i);
    units.push_back({{"i", i}, {"value", v}});
    pass = pass && std::fabs(v - 1.0) < 1e-9;
  }
  rep["unit_windows"] = units;

  rep["pass"] = pass;
  rep["wall_time_ms"] = wall_since(t0);

  CsvTable csv;
  csv.header = {"j", "S_j", "B_j", "tail_bound"};
  for (const auto& row : ps.rows)
    csv.add_row({std::to_string(row.j), fmt_double(row.S_j), fmt_double(row.B_j),
                 fmt_double(row.tail_bound)});
  emit(g, "counterexample", rep, csv);
  if (!pass) std::cerr << "counterexample: some checks FAILED (see report)\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- heaviside

int cmd_heaviside(const GlobalOpts& g, std::vector<double> thetas, int eps_lo, int eps_hi,
                  bool with_counterexample) {
  auto t0 = std::chrono::steady_clock::now();
  QuadratureConfig cfg;
  Interval dom{Rat(-1), Rat(1)};
  auto u = heaviside(Rat(-1), Rat(1));
  auto schedule = geometric_eps_schedule(eps_lo, eps_hi);
  const double F_half_closed = 16.0 - 8.0 * std::sqrt(2.0);

  json rep = base_report(g, "heaviside");
  rep["params"] = {{"thetas", thetas}, {"eps_lo", eps_lo}, {"eps_hi", eps_hi}};
  bool pass = true;
  json table = json::array();
  CsvTable csv;
  csv.header = {"family", "eps", "F_eps"};

  auto closed_form = [](double th) {
    return 2.0 * (1.0 / (1.0 - th) + 2.0 * (1.0 - std::pow(2.0, -th)) / th -
                  (std::pow(2.0, 1.0 - th) - 1.0) / (1.0 - th));
  };

  auto run_family = [&](const std::string& label, const Weight& w,
                        const std::string& expect, double expected_value) {
    auto res = classify(u, w, dom, schedule, cfg);
    json row;
    row["family"] = label;
    row["result"] = res.to_json();
    bool ok = true;
    if (expect == "finite") {
      ok = res.kind == FunctionalResult::Kind::Finite &&
           std::fabs(res.value - expected_value) < 1e-3;
      row["expected_value"] = expected_value;
    } else if (expect == "divergent-log2") {
      ok = res.kind == FunctionalResult::Kind::Divergent &&
           std::fabs(res.slope - 2.0) <= 0.05 * 2.0;
    } else if (expect == "divergent") {
      ok = res.kind == FunctionalResult::Kind::Divergent;
    }
    row["pass"] = ok;
    pass = pass && ok;
    table.push_back(row);
    for (const auto& p : res.epsilon_trace)
      csv.add_row({label, fmt_double(p.eps), fmt_double(p.value)});
  };

  for (double th : thetas) {
    std::string label = "powerlaw(" + fmt_double(th) + ")";
    if (th < 1.0) {
      double expected = th == 0.5 ? F_half_closed : closed_form(th);
      run_family(label, Weight::power_law(th), "finite", expected);
    } else if (th == 1.0) {
      run_family(label, Weight::linear(), "divergent-log2", 0);
    } else {
      run_family(label, Weight::power_law(th), "divergent", 0);
    }
  }
  if (with_counterexample) {
    SequencePair seq(SequenceSpec::preset("default"), 64);
    run_family("counterexample", Weight::counterexample(seq), "divergent", 0);
  }

  rep["table"] = table;
  rep["pass"] = pass;
  rep["wall_time_ms"] = wall_since(t0);
  emit(g, "heaviside", rep, csv);
  if (!pass) std::cerr << "heaviside: some checks FAILED (see report)\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- locvsglob

int cmd_locvsglob(const GlobalOpts& g, std::vector<double> ells, int randomized) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> deltas;
  for (int k = 8; k <= 20; ++k) deltas.push_back(std::ldexp(1.0, -k));

  json rep = base_report(g, "locvsglob");
  rep["params"] = {{"ells", ells}, {"randomized", randomized}};
  bool pass = true;
  json rows = json::array();
  CsvTable csv;
  csv.header = {"fixture", "delta", "value", "rhs"};

  for (double ell : ells) {
    if (!(ell > 0 && ell < 1)) throw CLI::ValidationError("--ells", "need 0 < ell < 1");
    auto phi = fixtures::toy_contraction(rat_from_double(ell));
    auto A = IntervalUnion::single(phi.domain());
    auto r = loc_vs_glob_check(phi, A, deltas);
    bool equality_ok = std::fabs(r.lhs - r.rhs) <= 0.02 * r.rhs;
    rows.push_back({{"fixture", "toy"},
                    {"ell", ell},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"margin", r.margin},
                    {"pass", r.pass && equality_ok}});
    pass = pass && r.pass && equality_ok;
    std::string label = "toy(" + fmt_double(ell) + ")";
    for (const auto& tp : r.trace)
      csv.add_row({label, fmt_double(tp.delta), fmt_double(tp.value), fmt_double(r.rhs)});
  }

  {
    auto id = single_affine(Interval{Rat(0), Rat(1)}, 1.0, 0.0);
    auto r = loc_vs_glob_check(id, IntervalUnion::single(id.domain()), deltas);
    rows.push_back({{"fixture", "injective"}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}});
    pass = pass && r.pass;
  }

  for (int k = 0; k < randomized; ++k) {
    std::uint64_t seed = splitmix64(g.seed ^ (0x5eedull + k));
    auto phi = fixtures::random_unit_slope_shuffle(seed);
    auto r = loc_vs_glob_check(phi, IntervalUnion::single(phi.domain()), deltas);
    rows.push_back({{"fixture", "shuffle"},
                    {"seed", seed},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"margin", r.margin},
                    {"pass", r.pass}});
    pass = pass && r.pass;
    for (const auto& tp : r.trace)
      csv.add_row({"shuffle#" + std::to_string(k), fmt_double(tp.delta),
                   fmt_double(tp.value), fmt_double(r.rhs)});
  }

  rep["rows"] = rows;
  rep["pass"] = pass;
  rep["wall_time_ms"] = wall_since(t0);
  emit(g, "locvsglob", rep, csv);
  if (!pass) std::cerr << "locvsglob: some checks FAILED (see report)\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- gamma

int cmd_gamma(const GlobalOpts& g, const std::string& preset, std::vector<double> mus,
              double J, double delta, const std::string& family, double theta) {
  auto t0 = std::chrono::steady_clock::now();
  Weight w = family == "counterexample"
                 ? Weight::counterexample(SequencePair(SequenceSpec::preset("default"), 64))
                 : Weight::power_law(theta);

  json rep = base_report(g, "gamma");
  rep["params"] = {{"preset", preset}, {"mus", mus},      {"J", J},
                   {"delta", delta},   {"family", family}, {"theta", theta}};
  bool pass = true;
  CsvTable csv;
  csv.header = {"mu", "gamma_lower", "gamma_mid", "gamma_upper", "bound"};

  if (preset == "constant") {
    auto u = staircase(Interval{Rat(0), Rat(1)}, {Rat(2)});
    json rows = json::array();
    for (double mu : mus) {
      auto est = gamma_estimate(u, u.domain(), w, mu, delta);
      bool ok = est.value == 0.0 && est.upper == 0.0;
      rows.push_back({{"mu", mu}, {"gamma_mid", est.value}, {"pass", ok}});
      pass = pass && ok;
      csv.add_row({fmt_double(mu), fmt_double(est.lower), fmt_double(est.value),
                   fmt_double(est.upper), "0"});
    }
    rep["rows"] = rows;
  } else {
    PiecewiseFunction u = preset == "staircase3" ? fixtures::staircase3()
                                                 : fixtures::centered_heaviside();
    if (preset != "staircase3" && preset != "heaviside")
      throw CLI::ValidationError("--preset", "heaviside | staircase3 | constant");
    double Jeff = J;
    if (Jeff <= 0) Jeff = preset == "staircase3" ? 0.8 : 0.4;  // 80% of the jump amplitude
    auto r = gamma_lower_bound_check(u, u.domain(), w, mus, Jeff, delta);
    rep["report"] = r.to_json();
    pass = pass && r.pass;
    for (const auto& row : r.rows)
      csv.add_row({fmt_double(row.mu), fmt_double(row.gamma_lower),
                   fmt_double(row.gamma_mid), fmt_double(row.gamma_upper),
                   fmt_double(row.bound)});
  }

  rep["pass"] = pass;
  rep["wall_time_ms"] = wall_since(t0);
  emit(g, "gamma", rep, csv);
  if (!pass) std::cerr << "gamma: some checks FAILED (see report)\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- olimpico

int cmd_olimpico(const GlobalOpts& g, long long count, int m_max) {
  auto t0 = std::chrono::steady_clock::now();
  if (count < 1) throw CLI::ValidationError("--count", "count >= 1");
  if (m_max < 2) throw CLI::ValidationError("--mmax", "m_max >= 2");

  json rep = base_report(g, "olimpico");
  rep["params"] = {{"count", count}, {"m_max", m_max}};
  std::mt19937_64 rng(splitmix64(g.seed ^ 0x01177));
  std::uniform_int_distribution<int> msize(2, m_max);
  std::uniform_real_distribution<double> uval(0.0, 1.0);

  Rat min_margin(1000);
  int min_m = 0;
  long long done = 0, rejected = 0;
  CsvTable csv;
  csv.header = {"index", "m", "margin"};
  while (done < count) {
    int m = msize(rng);
    std::vector<Rat> r;
    Rat S = 0;
    for (int k = 0; k < m; ++k) {
      Rat v = rat_from_double(uval(rng));
      r.push_back(v);
      S += v;
    }
    if (S < 1) {
      ++rejected;
      continue;
    }
    Rat margin = olimpico_margin_exact(r);
    if (margin < min_margin) {
      min_margin = margin;
      min_m = m;
    }
    if (done < 1000) csv.add_row({std::to_string(done), std::to_string(m),
                                  fmt_double(to_double(margin))});
    ++done;
  }

  // equality family (1, s) has margin exactly 0
  bool equality_ok = true;
  for (int k = 0; k <= 16; ++k) {
    Rat s = frac(k, 16);
    Rat margin = olimpico_margin_exact(std::vector<Rat>{Rat(1), s});
    equality_ok = equality_ok && margin == 0;
  }

  // the precondition machinery really rejects S < 1
  bool precondition_rejects = false;
  try {
    olimpico_margin_exact(std::vector<Rat>{Rat(1, 4), Rat(1, 4)});
  } catch (const std::invalid_argument&) {
    precondition_rejects = true;
  }

  bool pass = min_margin >= 0 && equality_ok && precondition_rejects;
  rep["min_margin"] = to_double(min_margin);
  rep["min_margin_m"] = min_m;
  rep["rejected_draws"] = rejected;
  rep["equality_family_exact_zero"] = equality_ok;
  rep["precondition_rejects"] = precondition_rejects;
  rep["pass"] = pass;
  rep["wall_time_ms"] = wall_since(t0);
  emit(g, "olimpico", rep, csv);
  if (!pass) std::cerr << "olimpico: some checks FAILED (see report)\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for nonlocal difference-quotient functionals"};
  app.require_subcommand(1);

  GlobalOpts g;
  auto* o_config = app.add_option("--config", g.config_path, "JSON config file");
  auto* o_seed = app.add_option("--seed", g.seed, "master RNG seed");
  auto* o_out = app.add_option("--out", g.out_dir, "output directory");
  auto* o_format = app.add_option("--format", g.format, "json | csv | both")
                       ->check(CLI::IsMember({"json", "csv", "both"}));
  auto* o_threads = app.add_option("--threads", g.threads, "worker threads (0 = default)");

  // counterexample
  int jmax = 10, samples = 360;
  std::string preset = "default";
  auto* c_counter = app.add_subcommand("counterexample",
                                       "sequence conditions, quotient bounds, partial sums")->fallthrough();
  auto* o_jmax = c_counter->add_option("--jmax", jmax, "deepest cantor step (2..12)");
  auto* o_preset = c_counter->add_option("--preset", preset, "default | small | constant");
  auto* o_samples = c_counter->add_option("--samples", samples, "random pairs per (i,j)");

  // heaviside
  std::vector<double> thetas{0.5, 1.0};
  int eps_lo = 6, eps_hi = 20;
  bool no_cex = false;
  auto* c_heavi = app.add_subcommand("heaviside", "finite/divergent dichotomy table")->fallthrough();
  auto* o_thetas = c_heavi->add_option("--thetas", thetas, "power-law exponents");
  auto* o_eps_lo = c_heavi->add_option("--eps-lo", eps_lo, "eps = 2^-k start");
  auto* o_eps_hi = c_heavi->add_option("--eps-hi", eps_hi, "eps = 2^-k end");
  c_heavi->add_flag("--no-counterexample", no_cex, "skip the counterexample weight");

  // locvsglob
  std::vector<double> ells{0.1, 0.25, 0.5, 0.9};
  int randomized = 10;
  auto* c_lvg = app.add_subcommand("locvsglob", "local expansion vs global contraction")->fallthrough();
  auto* o_ells = c_lvg->add_option("--ells", ells, "toy contraction losses in (0,1)");
  auto* o_rand = c_lvg->add_option("--randomized", randomized, "random unit-slope fixtures");

  // gamma
  std::string gpreset = "heaviside", gfamily = "powerlaw";
  std::vector<double> mus{10, 50, 100};
  double J = 0.0, gdelta = 1e-3, gtheta = 0.5;
  auto* c_gamma = app.add_subcommand("gamma", "band density lower bound")->fallthrough();
  auto* o_gpreset = c_gamma->add_option("--preset", gpreset, "heaviside | staircase3 | constant");
  auto* o_mus = c_gamma->add_option("--mus", mus, "band levels");
  auto* o_J = c_gamma->add_option("--jump", J, "J (0 = derive from the fixture)");
  auto* o_gdelta = c_gamma->add_option("--delta", gdelta, "band width");
  auto* o_gfamily = c_gamma->add_option("--family", gfamily, "powerlaw | counterexample");
  auto* o_gtheta = c_gamma->add_option("--theta", gtheta, "power-law exponent");

  // olimpico
  long long count = 100000;
  int m_max = 10;
  auto* c_oli = app.add_subcommand("olimpico", "pairwise-product margin fuzz")->fallthrough();
  auto* o_count = c_oli->add_option("--count", count, "admissible vectors to draw");
  auto* o_mmax = c_oli->add_option("--mmax", m_max, "max vector length");

  CLI11_PARSE(app, argc, argv);

  try {
    g.config = load_config(g.config_path);
    merge_opt(o_seed, g.config, "seed", g.seed);
    merge_opt(o_out, g.config, "out", g.out_dir);
    merge_opt(o_format, g.config, "format", g.format);
    merge_opt(o_threads, g.config, "threads", g.threads);
    (void)o_config;
    apply_threads(g.threads);

    if (c_counter->parsed()) {
      const json sec = g.config.value("counterexample", json::object());
      merge_opt(o_jmax, sec, "jmax", jmax);
      merge_opt(o_preset, sec, "preset", preset);
      merge_opt(o_samples, sec, "samples", samples);
      return cmd_counterexample(g, jmax, preset, samples);
    }
    if (c_heavi->parsed()) {
      const json sec = g.config.value("heaviside", json::object());
      merge_opt(o_thetas, sec, "thetas", thetas);
      merge_opt(o_eps_lo, sec, "eps_lo", eps_lo);
      merge_opt(o_eps_hi, sec, "eps_hi", eps_hi);
      return cmd_heaviside(g, thetas, eps_lo, eps_hi, !no_cex);
    }
    if (c_lvg->parsed()) {
      const json sec = g.config.value("locvsglob", json::object());
      merge_opt(o_ells, sec, "ells", ells);
      merge_opt(o_rand, sec, "randomized", randomized);
      return cmd_locvsglob(g, ells, randomized);
    }
    if (c_gamma->parsed()) {
      const json sec = g.config.value("gamma", json::object());
      merge_opt(o_gpreset, sec, "preset", gpreset);
      merge_opt(o_mus, sec, "mus", mus);
      merge_opt(o_J, sec, "jump", J);
      merge_opt(o_gdelta, sec, "delta", gdelta);
      merge_opt(o_gfamily, sec, "family", gfamily);
      merge_opt(o_gtheta, sec, "theta", gtheta);
      return cmd_gamma(g, gpreset, mus, J, gdelta, gfamily, gtheta);
    }
    if (c_oli->parsed()) {
      const json sec = g.config.value("olimpico", json::object());
      merge_opt(o_count, sec, "count", count);
      merge_opt(o_mmax, sec, "m_max", m_max);
      return cmd_olimpico(g, count, m_max);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

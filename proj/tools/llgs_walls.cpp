// Command-line front end: one subcommand per run, a JSON config in, data files and a manifest out.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <boost/version.hpp>

#include "llgs/io.hpp"
#include "llgs/llgs.hpp"

namespace fs = std::filesystem;
using namespace llgs;
using io::json;

namespace {

constexpr const char* kVersion = "0.3.0";

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

struct Run {
  std::string command;
  json config;
  fs::path out;
  int threads = 1;
  std::string seed_profile;
  json files = json::array();

  void emit(const std::string& name, const std::string& body) {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (out / name).string() + "'");
    f << body;
    files.push_back({{"name", name}, {"bytes", body.size()}, {"sha256", sha256_hex(body)}});
  }
  void emit(const std::string& name, const json& j) { emit(name, j.dump(2) + "\n"); }

  const json& section(const char* key) const {
    static const json empty = json::object();
    return config.contains(key) ? config.at(key) : empty;
  }
  MaterialParams material() const {
    if (!config.contains("material")) throw ConfigError("config: missing 'material'");
    return io::material_from_json(config.at("material"));
  }
};

void check_top_level(const json& cfg) {
  io::require_keys(cfg, {"material", "bvp", "continuation", "center", "shoot", "freeze", "stability_map", "melnikov"},
                   "config");
}

// ---- subcommands

int cmd_classify(Run& r) {
  const MaterialParams mp = r.material();
  const auto [lo, hi] = thresholds(mp.alpha, mp.beta, mp.mu);
  json j;
  j["material"] = io::to_json(mp);
  j["h_star_low"] = lo;
  j["h_star_high"] = hi;
  if (mp.h >= mp.beta / mp.alpha) {
    const Regime rg = classify_regime(mp);
    j["regime"] = to_string(rg.kind);
    j["s0"] = rg.s0;
    j["omega0"] = rg.omega0;
    const auto ev = eigenvalues_homogeneous(mp.alpha, mp.beta, mp.mu, mp.h);
    json z = json::array(), p = json::array();
    for (auto v : ev.zero) z.push_back(cplx_json(v));
    for (auto v : ev.pi) p.push_back(cplx_json(v));
    j["eigenvalues"] = {{"zero", z}, {"pi", p}};
    const WaveFrame wf{rg.s0, rg.omega0};
    for (auto [name, chart] : {std::pair{"zero", ChartId::zero()}, std::pair{"pi", ChartId::pi()}}) {
      const auto [plus, minus] = chart_equilibria(chart, mp, wf);
      j["equilibria"][name] = {{"plus", cplx_json(plus.z)}, {"minus", cplx_json(minus.z)}};
    }
  } else {
    j["regime"] = nullptr;  // no homogeneous wall of this orientation
  }
  const StabilityVerdict sv = stability_verdict(mp);
  j["stability"] = to_string(sv.region);
  r.emit("classify.json", j);
  return 0;
}

int cmd_stability_map(Run& r) {
  const MaterialParams mp = r.material();
  const json& s = r.section("stability_map");
  io::require_keys(s, {"h_min", "h_max", "n_h", "c_min", "c_max", "n_c"}, "stability_map");
  const double h0 = io::get_or(s, "h_min", -2.0, "stability_map"), h1 = io::get_or(s, "h_max", 12.0, "stability_map");
  const double c0 = io::get_or(s, "c_min", -0.99, "stability_map"), c1 = io::get_or(s, "c_max", 0.99, "stability_map");
  const int nh = io::get_or(s, "n_h", 141, "stability_map"), nc = io::get_or(s, "n_c", 199, "stability_map");
  if (nh < 2 || nc < 2 || !(h1 > h0) || !(c1 > c0) || std::abs(c0) >= 1.0 || std::abs(c1) >= 1.0)
    throw ConfigError("stability_map: need n >= 2, increasing ranges and |c| < 1");

  std::vector<std::string> rows(static_cast<std::size_t>(nh));
  auto work = [&](int first, int stride) {
    for (int i = first; i < nh; i += stride) {
      std::string out;
      const double h = h0 + (h1 - h0) * i / (nh - 1);
      for (int k = 0; k < nc; ++k) {
        const double c = c0 + (c1 - c0) * k / (nc - 1);
        std::string label;
        try {
          label = to_string(stability_verdict(mp.with_h(h).with_c_cp(c)).region);
        } catch (const CurvePole&) {
          label = "undefined";
        }
        out += io::fmt(h) + "," + io::fmt(c) + "," + label + "\n";
      }
      rows[std::size_t(i)] = std::move(out);
    }
  };
  const int nt = std::max(1, std::min(r.threads, nh));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work, t, nt);
  work(0, nt);
  for (auto& t : pool) t.join();
  std::string body = "h,c_cp,region\n";
  for (auto& row : rows) body += row;
  r.emit("stability_map.csv", body);
  return 0;
}

int cmd_melnikov(Run& r) {
  const MaterialParams mp = r.material();
  const json& s = r.section("melnikov");
  io::require_keys(s, {"form", "deviations"}, "melnikov");
  const std::string form_s = io::get_or<std::string>(s, "form", "corrected", "melnikov");
  if (form_s != "corrected" && form_s != "published") throw ConfigError("melnikov.form: 'corrected' or 'published'");
  const MelnikovForm form = form_s == "published" ? MelnikovForm::Published : MelnikovForm::Corrected;
  const SplittingMatrix sm = splitting_matrix(mp, form);
  const Regime rg = classify_regime(mp);
  const MelnikovIntegrals I = melnikov_integrals_closed(mp.alpha, mp.mu, rg.s0, form);

  json j;
  j["material"] = io::to_json(mp);
  j["form"] = form_s;
  j["s0"] = rg.s0;
  j["omega0"] = rg.omega0;
  j["integrals"] = {{"I_C", I.i_c}, {"I_S", I.i_s}, {"I_CC", I.i_cc}, {"I_CS", I.i_cs}};
  j["columns"] = {"c_cp", "s", "omega"};
  j["matrix"] = {{sm.m(0, 0), sm.m(0, 1), sm.m(0, 2)}, {sm.m(1, 0), sm.m(1, 1), sm.m(1, 2)}};
  j["kernel"] = {sm.kernel[0], sm.kernel[1], sm.kernel[2]};
  const Eigen::Vector2d per_c = sm.kernel_per_unit_c();
  j["kernel_per_unit_c"] = {per_c[0], per_c[1]};
  json ev = json::array();
  if (s.contains("deviations")) {
    for (const auto& d : s.at("deviations")) {
      if (!d.is_array() || d.size() != 3) throw ConfigError("melnikov.deviations: entries are [c_cp, s, omega]");
      const Eigen::Vector3d dv(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
      const Eigen::Vector2d v = splitting_value(sm, dv);
      ev.push_back({{"deviation", {dv[0], dv[1], dv[2]}}, {"value", {v[0], v[1]}}});
    }
  }
  j["evaluations"] = ev;
  r.emit("melnikov.json", j);
  return 0;
}

int cmd_center(Run& r) {
  const MaterialParams mp = r.material();
  const BvpConfig cfg = io::bvp_from_json(r.section("bvp"));
  const json& s = r.section("center");
  io::require_keys(s, {"sweep", "deviations", "initial_step", "min_step", "max_step", "max_points"}, "center");
  const Param which = param_from_string(io::get_or<std::string>(s, "sweep", "s", "center"));
  if (which != Param::Ccp && which != Param::S && which != Param::H) throw ConfigError("center.sweep: c_cp, s or h");
  const auto devs = io::get_or<std::vector<double>>(
      s, "deviations", {-0.3, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 0.3}, "center");
  const StepPolicy pol = io::policy_from_json(s, "center");

  const Regime rg = classify_regime(mp);
  if (rg.kind != RegimeKind::Center) throw ConfigError("center: material h must equal the center threshold h^*");
  const double base = which == Param::Ccp ? mp.c_cp : which == Param::S ? rg.s0 : mp.h;
  std::vector<double> values;
  for (double d : devs) values.push_back(base + d);
  const auto rows = center_sweep(mp, which, values, cfg, pol);

  std::string body = "parameter,measured,quadratic\n";
  bool all = true;
  for (const auto& row : rows) {
    if (!row.reached) {
      all = false;
      continue;
    }
    body += io::fmt(row.value) + "," + io::fmt(row.measured) + "," + io::fmt(row.quadratic) + "\n";
  }
  r.emit("center_" + to_string(which) + ".csv", body);
  return all ? 0 : 3;
}

int cmd_shoot(Run& r) {
  const MaterialParams mp = r.material();
  const json& s = r.section("shoot");
  io::require_keys(s, {"s", "omega", "epsilon", "tol", "budget", "arrival", "stall", "tail_extension"}, "shoot");
  WaveFrame wf = homogeneous_speed_frequency(mp);
  wf.s = io::get_or(s, "s", wf.s, "shoot");
  wf.omega = io::get_or(s, "omega", wf.omega, "shoot");
  ShootOptions so;
  so.epsilon = io::get_or(s, "epsilon", so.epsilon, "shoot");
  so.tol = io::get_or(s, "tol", so.tol, "shoot");
  so.budget = io::get_or(s, "budget", so.budget, "shoot");
  so.arrival = io::get_or(s, "arrival", so.arrival, "shoot");
  so.stall = io::get_or(s, "stall", so.stall, "shoot");
  so.tail_extension = io::get_or(s, "tail_extension", so.tail_extension, "shoot");

  const ShootResult res = shoot_to_pi_chart(mp, wf, so);
  r.emit("trajectory.csv", io::trajectory_csv(res.trajectory));
  json j;
  j["material"] = io::to_json(mp);
  j["frame"] = {{"s", wf.s}, {"omega", wf.omega}};
  j["source"] = cplx_json(res.source.z);
  j["steps"] = res.trajectory.steps;
  j["xi_end"] = res.trajectory.xs.back();
  j["theta_end"] = res.trajectory.ys.back()[0];
  j["tail"] = {{"kind", to_string(res.tail.kind)},
               {"q_limit_estimate", std::isfinite(res.tail.q_limit_estimate) ? json(res.tail.q_limit_estimate) : json(nullptr)},
               {"oscillation_amplitude", res.tail.oscillation_amplitude}};
  r.emit("shoot.json", j);
  return 0;
}

int cmd_continue(Run& r) {
  const json& s = r.section("continuation");
  io::require_keys(s, {"parameter", "target", "regime", "free", "initial_step", "min_step", "max_step", "max_points"},
                   "continuation");
  if (!s.contains("target")) throw ConfigError("continuation: missing 'target'");
  const Param lambda = param_from_string(io::get_or<std::string>(s, "parameter", "c_cp", "continuation"));
  const double target = io::get_or(s, "target", 0.0, "continuation");
  const StepPolicy pol = io::policy_from_json(s, "continuation");
  const BvpConfig cfg = io::bvp_from_json(r.section("bvp"));

  Profile seed;
  MaterialParams mp;
  if (!r.seed_profile.empty()) {
    seed = io::profile_from_json(io::parse_json(io::read_file(r.seed_profile), r.seed_profile));
    mp = seed.mp;
  } else {
    mp = r.material();
  }
  RegimeKind kind = r.seed_profile.empty() ? classify_regime(mp).kind : seed.regime;
  if (s.contains("regime")) kind = io::regime_from_string(s.at("regime").get<std::string>());
  BvpSpec spec = BvpSpec::defaults(kind);
  if (s.contains("free")) {
    spec.free.clear();
    for (const auto& f : s.at("free")) spec.free.push_back(param_from_string(f.get<std::string>()));
  }
  CollocationBvp bvp(spec, cfg);
  BvpSolution start;
  if (r.seed_profile.empty()) {
    start = solve_homogeneous(bvp, mp);
  } else {
    ParamSet base{seed.mp, seed.wf, seed.htilde};
    start = solve_bvp(bvp, seed, base);
  }
  const Branch br = continue_branch(bvp, start, lambda, target, pol);
  r.emit("branch.json", io::to_json(br));
  Profile last = br.last_profile;
  last.regime = kind;
  r.emit("profile.json", io::to_json(last));
  r.emit("profile.csv", io::profile_csv(last));
  const bool failed = br.terminated == BranchEnd::NewtonFailure || br.terminated == BranchEnd::StepUnderflow;
  return failed ? 3 : 0;
}

int cmd_freeze(Run& r) {
  const MaterialParams mp = r.material();
  const FreezeOptions opt = io::freeze_from_json(r.section("freeze"));
  const FreezeSeries fs = run_selection(mp, opt);
  r.emit("freeze_series.csv", io::series_csv(fs));
  r.emit("freeze_line.csv", io::line_csv(fs.terminal));
  r.emit("freeze_profile.json", io::to_json(io::line_to_profile(fs.terminal, mp)));
  json j;
  j["material"] = io::to_json(mp);
  j["s_selected"] = fs.s_selected;
  j["omega_selected"] = fs.omega_selected;
  j["s_final"] = fs.s.back();
  j["omega_final"] = fs.omega.back();
  j["tail_q_amplitude"] = fs.tail_q_amplitude;
  j["max_norm_defect"] = fs.max_norm_defect;
  r.emit("freeze.json", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain walls of the LLGS nanowire equation"};
  app.require_subcommand(1);
  Run run;
  std::string config_path, out_dir = "out";
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", run.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed-profile", run.seed_profile, "profile JSON used to seed 'continue'");

  using Handler = int (*)(Run&);
  const std::vector<std::pair<std::string, Handler>> commands = {
      {"classify", cmd_classify}, {"melnikov", cmd_melnikov}, {"center", cmd_center}, {"shoot", cmd_shoot},
      {"continue", cmd_continue}, {"freeze", cmd_freeze},     {"stability-map", cmd_stability_map}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    run.command = app.get_subcommands().front()->get_name();
    run.config = config_path.empty() ? json::object() : io::parse_json(io::read_file(config_path), config_path);
    check_top_level(run.config);
    run.out = out_dir;
    fs::create_directories(run.out);
    Handler fn = nullptr;
    for (const auto& [name, h] : commands)
      if (name == run.command) fn = h;
    const int code = fn(run);

    json manifest;
    manifest["command"] = run.command;
    manifest["config"] = run.config;
    manifest["versions"] = {{"llgs_walls", kVersion},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                          "." + std::to_string(EIGEN_MINOR_VERSION)},
                            {"boost", BOOST_LIB_VERSION}};
    manifest["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["exit_code"] = code;
    manifest["files"] = run.files;
    std::ofstream(run.out / "manifest.json") << manifest.dump(2) << "\n";
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
}

#include "run_config.hpp"

#include "ghft/hubbard.hpp"
#include "ghft/parallel.hpp"
#include "ghft/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ghft;
using namespace ghft::cli;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNotConverged = 2, kVerifyFailed = 3, kInputMismatch = 4, kRuntime = 5 };

struct InputError : Error {
  using Error::Error;
};

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<double> t, u, mu, tol, dtau, zero_tol;
  std::optional<int> lx, ly, threads;
  std::optional<long> max_iter;
  std::optional<std::string> mu_sign, dir, prefix;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "config file (key = value sections or JSON)");
  sub->add_option("--set", c.sets, "override: section.key=value (repeatable)");
  sub->add_option("--t", c.t, "hopping amplitude");
  sub->add_option("--u", c.u, "on-site interaction");
  sub->add_option("--mu", c.mu, "chemical potential");
  sub->add_option("--lx", c.lx, "lattice extent x");
  sub->add_option("--ly", c.ly, "lattice extent y");
  sub->add_option("--mu-sign", c.mu_sign, "subtract: -mu sum n, add: +mu sum n");
  sub->add_option("--tol", c.tol, "ground-state residual tolerance");
  sub->add_option("--dtau", c.dtau, "initial imaginary-time step (0: automatic)");
  sub->add_option("--max-iter", c.max_iter, "flow iteration cap");
  sub->add_option("--zero-tol", c.zero_tol, "zero-mode threshold");
  sub->add_option("-o,--out-dir", c.dir, "output directory");
  sub->add_option("--prefix", c.prefix, "output file prefix");
  sub->add_option("-j,--threads", c.threads, "worker threads");
}

std::string fmt(double v, int digits = 17) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

RunConfig resolve(const Common& c) {
  RunConfig r = c.config.empty() ? parse_text("") : load_config(c.config);
  if (const char* env = std::getenv("GHFT_OUTPUT_DIR"); env && *env) r.dir = env;
  auto put = [&](const char* key, const auto& v) {
    if (!v) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>)
      set_value(r, key, *v);
    else if constexpr (std::is_floating_point_v<std::decay_t<decltype(*v)>>)
      set_value(r, key, fmt(*v));
    else
      set_value(r, key, std::to_string(*v));
  };
  put("model.t", c.t);
  put("model.u", c.u);
  put("model.mu", c.mu);
  put("model.lx", c.lx);
  put("model.ly", c.ly);
  put("model.mu_sign", c.mu_sign);
  put("solver.tol", c.tol);
  put("solver.dtau", c.dtau);
  put("solver.max_iter", c.max_iter);
  put("spectrum.zero_tol", c.zero_tol);
  put("output.dir", c.dir);
  put("output.prefix", c.prefix);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    set_value(r, s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.threads) {
    if (*c.threads < 1) throw ConfigError("--threads must be positive");
    setenv("GHFT_THREADS", std::to_string(*c.threads).c_str(), 1);
  }
  try {
    r.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return r;
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.dir);
  return fs::path(c.dir) / (c.prefix + name);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
}

fs::path cm_path(const RunConfig& c) { return out_path(c, c.cm_format == "binary" ? "cm.bin" : "cm.txt"); }

// --- translation-invariant covariance files ----------------------------------
//
//   # ghft-ti-covariance hash=<16 hex> lx=<Lx> ly=<Ly> blocks=<N>
//   # block=<b> k=<k> partner=<k'>
//   <matrix in the covariance-matrix text or binary form>
//   ...

void save_blocks(const fs::path& p, const TiModel& m, const std::vector<Matrix>& blocks, MatrixFileFormat f) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << "# ghft-ti-covariance hash=" << parameter_hash(m.params()) << " lx=" << m.params().lx
     << " ly=" << m.params().ly << " blocks=" << blocks.size() << "\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    os << "# block=" << b << " k=" << m.blocks()[b].k << " partner=" << m.blocks()[b].partner << "\n";
    write_matrix(os, blocks[b], f);
  }
}

std::string header_field(const std::string& line, const std::string& key) {
  const auto pos = line.find(" " + key + "=");
  if (pos == std::string::npos) throw InputError("covariance file: missing '" + key + "' in header");
  const auto start = pos + key.size() + 2;
  return line.substr(start, line.find(' ', start) - start);
}

std::vector<Matrix> load_blocks(const fs::path& p, const TiModel& m) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw InputError("cannot open covariance file " + p.string());
  std::string line;
  std::getline(is, line);
  if (line.rfind("# ghft-ti-covariance", 0) != 0) throw InputError(p.string() + ": not a ghft covariance file");
  const std::string hash = header_field(line, "hash"), expect = parameter_hash(m.params());
  if (hash != expect)
    throw InputError(p.string() + ": parameter hash " + hash + " does not match the configuration (" + expect + ")");
  const std::size_t n = std::stoul(header_field(line, "blocks"));
  if (n != m.blocks().size()) throw InputError(p.string() + ": block count does not match the lattice");
  std::vector<Matrix> out;
  for (std::size_t b = 0; b < n; ++b) {
    std::getline(is, line);
    if (line.rfind("# block=", 0) != 0) throw InputError(p.string() + ": missing block header " + std::to_string(b));
    Matrix g = read_matrix(is);
    if (g.rows() != m.blocks()[b].dim()) throw InputError(p.string() + ": block " + std::to_string(b) + " has wrong size");
    out.push_back(std::move(g));
  }
  for (const auto& g : out)
    if (!validate(g).pure) throw InputError(p.string() + ": covariance block is not a pure state");
  return out;
}

// --- ground -----------------------------------------------------------------

struct GroundRun {
  GroundState gs;
  Observables obs;
  double seconds = 0.0;
};

GroundRun solve(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  TiModel m(c.model);
  GroundRun r;
  r.gs = ti_ground_state(m, c.ground_options());
  r.obs = observables(m, r.gs.blocks);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

nlohmann::json ground_summary(const RunConfig& c, const GroundRun& r) {
  nlohmann::json j;
  j["hash"] = parameter_hash(c.model);
  j["u"] = c.model.u;
  j["mu"] = c.model.mu;
  j["t"] = c.model.t;
  j["Lx"] = c.model.lx;
  j["Ly"] = c.model.ly;
  j["mu_sign"] = to_string(c.model.mu_sign);
  j["n"] = r.obs.n;
  j["p"] = r.obs.p;
  j["magnetization"] = r.obs.magnetization;
  j["energy"] = r.obs.energy;
  j["residual"] = r.gs.report.residual;
  j["iterations"] = r.gs.report.iterations;
  j["rejected"] = r.gs.report.rejected;
  j["converged"] = r.gs.report.converged;
  j["start"] = r.gs.start;
  return j;
}

int run_ground(const RunConfig& c) {
  const auto r = solve(c);
  TiModel m(c.model);
  save_blocks(cm_path(c), m, r.gs.blocks, c.cm_format == "binary" ? MatrixFileFormat::Binary : MatrixFileFormat::Csv);
  const auto j = ground_summary(c, r);
  write_file(out_path(c, "ground.json"), j.dump(2) + "\n");
  write_file(out_path(c, "config.txt"), to_text(c));
  std::cout << j.dump(2) << "\n";
  std::cerr << "ground: " << r.gs.report.iterations << " iterations in " << fmt(r.seconds, 3) << " s\n";
  if (!r.gs.report.converged) {
    std::cerr << "ground: not converged (residual " << r.gs.report.residual << ")\n";
    return kNotConverged;
  }
  return kOk;
}

// --- dispersion -------------------------------------------------------------

std::string csv_header() {
  std::string h = "kx_index,ky_index,kx,ky,branch,omega,real_residual";
  for (int q = 0; q < kChannelCount; ++q) h += std::string(",") + channel_name(q);
  return h + "\n";
}

void csv_rows(std::ostream& os, const TiModel& m, const Dispersion& d, const std::vector<int>& block_of, int k) {
  const auto& g = m.grid();
  const auto& bs = d.blocks[block_of[k]];
  for (std::size_t j = 0; j < bs.branches.size(); ++j) {
    const auto& br = bs.branches[j];
    os << g.nx(k) << "," << g.ny(k) << "," << fmt(g.kx(k), 12) << "," << fmt(g.ky(k), 12) << "," << j + 1 << ","
       << fmt(br.omega, 12) << "," << fmt(br.real_residual, 12);
    for (double v : br.channels) os << "," << fmt(v, 12);
    os << "\n";
  }
}

std::string label(int first, int last) {
  return first == last ? "omega_" + std::to_string(first + 1)
                       : "omega_" + std::to_string(first + 1) + "-" + std::to_string(last + 1);
}

nlohmann::json classification_json(const RunConfig& c, const Dispersion& d, const Classification& cl) {
  nlohmann::json j;
  j["hash"] = parameter_hash(c.model);
  j["u"] = c.model.u;
  j["mu"] = c.model.mu;
  j["branch_count"] = d.branch_count;
  j["nontrivial_count"] = cl.branches.size();
  j["gap"] = d.gap;
  j["gap_threshold"] = d.gap_threshold;
  j["gapless"] = d.gapless;
  j["max_real_residual"] = d.max_real_residual;
  j["scale"] = d.scale;
  double pairing = 0.0;
  for (const auto& bs : d.blocks) pairing = std::max(pairing, bs.pairing_defect);
  j["pairing_defect"] = pairing;
  j["branches"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cl.branches.size(); ++i) {
    const auto& b = cl.branches[i];
    nlohmann::json e;
    e["index"] = i + 1;
    e["block_branch"] = b.branch + 1;
    e["omega_min"] = b.omega_min;
    e["omega_max"] = b.omega_max;
    e["omega_mean"] = b.omega_mean;
    e["omega_std"] = b.omega_std;
    e["flat"] = b.flat;
    nlohmann::json present = nlohmann::json::array();
    for (int q = 0; q < kChannelCount; ++q) {
      e["channels"][channel_name(q)] = b.channels[q];
      if (b.present[q]) present.push_back(channel_name(q));
    }
    e["present"] = present;
    j["branches"].push_back(e);
  }
  j["degenerate_groups"] = nlohmann::json::array();
  std::vector<int> group_end(cl.branches.size());
  for (std::size_t i = 0; i < cl.branches.size(); ++i) group_end[i] = static_cast<int>(i);
  for (const auto& g : cl.degenerate_groups) {
    nlohmann::json e = nlohmann::json::array();
    for (int i : g) {
      e.push_back(i + 1);
      group_end[g.front()] = g.back();
    }
    j["degenerate_groups"].push_back(e);
  }
  // channel -> branch labels, degenerate groups merged when their presence agrees
  for (int q = 0; q < kChannelCount; ++q) {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t i = 0; i < cl.branches.size();) {
      const int end = group_end[i];
      if (cl.branches[i].present[q]) labels.push_back(label(static_cast<int>(i), end));
      i = static_cast<std::size_t>(end) + 1;
    }
    j["table"][channel_name(q)] = labels;
  }
  return j;
}

int run_dispersion(const RunConfig& c, const std::string& cm) {
  TiModel m(c.model);
  const auto blocks = load_blocks(cm.empty() ? cm_path(c) : fs::path(cm), m);
  const auto d = dispersion(m, blocks, c.dispersion_options());
  const auto cl = classify(d, m, c.classification_options());

  std::vector<int> block_of(m.grid().size(), -1);
  for (std::size_t b = 0; b < m.blocks().size(); ++b) {
    block_of[m.blocks()[b].k] = static_cast<int>(b);
    block_of[m.blocks()[b].partner] = static_cast<int>(b);
  }
  const std::string tag = "# hash=" + parameter_hash(c.model) + "\n";
  if (c.momenta != "path") {
    std::ostringstream os;
    os << tag << csv_header();
    for (int k = 0; k < m.grid().size(); ++k) csv_rows(os, m, d, block_of, k);
    write_file(out_path(c, "dispersion_grid.csv"), os.str());
  }
  if (c.momenta != "grid") {
    std::ostringstream os;
    os << tag << csv_header();
    for (int k : k_path(m.grid())) csv_rows(os, m, d, block_of, k);
    write_file(out_path(c, "dispersion_path.csv"), os.str());
  }
  const auto j = classification_json(c, d, cl);
  write_file(out_path(c, "classification.json"), j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// --- verify -----------------------------------------------------------------

int run_verify_cmd(const RunConfig& c) {
  const auto results = run_verify(c.verify);
  nlohmann::json j;
  j["hash"] = parameter_hash(c.verify.lattice);
  bool all = true;
  for (const auto& r : results) {
    nlohmann::json e;
    e["name"] = r.name;
    e["value"] = r.value;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    e["detail"] = r.detail;
    j["properties"].push_back(e);
    all = all && r.pass;
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << " " << r.value << " <= " << r.tolerance << "\n";
  }
  j["pass"] = all;
  write_file(out_path(c, "verify.json"), j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return all ? kOk : kVerifyFailed;
}

// --- sweep ------------------------------------------------------------------

int run_sweep(const RunConfig& c) {
  const auto us = c.sweep_u.empty() ? std::vector<double>{c.model.u} : c.sweep_u;
  const auto mus = c.sweep_mu.empty() ? std::vector<double>{c.model.mu} : c.sweep_mu;
  std::ostringstream csv;
  csv << "u,mu,hash,n,p,magnetization,energy,residual,iterations,converged,start";
  if (c.sweep_dispersion) csv << ",nontrivial,gap,gapless";
  csv << "\n";
  nlohmann::json all = nlohmann::json::array();
  bool converged = true;
  for (double u : us)
    for (double mu : mus) {
      RunConfig p = c;
      p.model.u = u;
      p.model.mu = mu;
      p.model.validate();
      const auto r = solve(p);
      converged = converged && r.gs.report.converged;
      auto j = ground_summary(p, r);
      csv << fmt(u, 12) << "," << fmt(mu, 12) << "," << parameter_hash(p.model) << "," << fmt(r.obs.n, 12) << ","
          << fmt(r.obs.p, 12) << "," << fmt(r.obs.magnetization, 12) << "," << fmt(r.obs.energy, 12) << ","
          << fmt(r.gs.report.residual, 12) << "," << r.gs.report.iterations << ","
          << (r.gs.report.converged ? "true" : "false") << "," << r.gs.start;
      if (c.sweep_dispersion) {
        TiModel m(p.model);
        const auto d = dispersion(m, r.gs.blocks, p.dispersion_options());
        csv << "," << d.nontrivial.size() << "," << fmt(d.gap, 12) << "," << (d.gapless ? "true" : "false");
        j["nontrivial"] = d.nontrivial.size();
        j["gap"] = d.gap;
        j["gapless"] = d.gapless;
      }
      csv << "\n";
      all.push_back(j);
      std::cerr << "sweep: u=" << u << " mu=" << mu << " n=" << r.obs.n << " p=" << r.obs.p
                << (r.gs.report.converged ? "" : " (not converged)") << "\n";
    }
  write_file(out_path(c, "sweep.csv"), csv.str());
  write_file(out_path(c, "sweep.json"), all.dump(2) + "\n");
  std::cout << csv.str();
  return converged ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Hartree-Fock ground states and excitation spectra of the 2D Hubbard model"};
  app.require_subcommand(1);
  Common common;
  std::string cm;

  auto* ground = app.add_subcommand("ground", "imaginary-time ground state, summary JSON and covariance file");
  auto* disp = app.add_subcommand("dispersion", "block spectra, dispersion CSV and classification JSON");
  auto* verify = app.add_subcommand("verify", "cross-module property suite on a small lattice");
  auto* sweep = app.add_subcommand("sweep", "ground states over the cartesian product of u and mu lists");
  auto* config = app.add_subcommand("config", "print the resolved configuration");
  bool as_json = false;
  for (auto* s : {ground, disp, verify, sweep, config}) add_common(s, common);
  disp->add_option("--cm", cm, "covariance file from 'ground' (default: <dir>/<prefix>cm.txt)");
  config->add_flag("--json", as_json, "emit JSON instead of key = value text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    const RunConfig c = resolve(common);
    if (ground->parsed()) return run_ground(c);
    if (disp->parsed()) return run_dispersion(c, cm);
    if (verify->parsed()) return run_verify_cmd(c);
    if (sweep->parsed()) return run_sweep(c);
    std::cout << (as_json ? to_json(c).dump(2) + "\n" : to_text(c));
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

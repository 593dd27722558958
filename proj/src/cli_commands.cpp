#include "cli_commands.hpp"

#include "c1vol/approx.hpp"
#include "c1vol/volumes.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace c1vol::cli {

std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto dots = part.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        int a = std::stoi(part.substr(0, dots)), b = std::stoi(part.substr(dots + 2));
        if (b < a) throw std::invalid_argument("empty range");
        for (int v = a; v <= b; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad range '" + text + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty range '" + text + "'");
  return out;
}

std::vector<int> regularities(const std::string& spec, int p) {
  if (spec == "admissible") {
    std::vector<int> out;
    for (int r = 1; r <= p - 2; ++r) out.push_back(r);
    if (out.empty()) throw ParameterError("no admissible regularity for p=" + std::to_string(p));
    return out;
  }
  return parse_range(spec);
}

int worker_count() {
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("C1VOL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(v, hw);
  }
  return hw;
}

namespace {

template <class F>
void parallel_for(int count, F f) {
  const int workers = std::min(worker_count(), std::max(count, 1));
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < count; i = next++) f(i);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

std::string header(const RunConfig& c) {
  std::ostringstream h;
  h << "# c1vol " << c.command << " volume=" << (c.generic ? "generic:" + std::to_string(c.generic) : c.volume)
    << " p=" << c.p << " r=" << c.r << " k=" << c.k << " L=" << c.L << " mode=" << c.mode << " seed=" << c.seed
    << " samples=" << c.samples;
  return h.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(6) << v;
  return s.str();
}

SplineSpaceConfig first_config(const RunConfig& c) {
  int p = parse_range(c.p).front();
  auto rs = regularities(c.r, p);
  SplineSpaceConfig cfg{p, rs.front(), parse_range(c.k).front()};
  cfg.validate();
  return cfg;
}

struct OutputSink {
  std::ofstream file;
  std::ostream* stream;
  OutputSink(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw ParseError("cannot write " + path);
      stream = &file;
    }
  }
  std::ostream& operator*() { return *stream; }
};

}  // namespace

int cmd_check(const RunConfig& c, std::ostream& out, std::ostream&) {
  auto cfg = first_config(c);
  auto vol = load_volume_file(c.volume, false);
  nlohmann::json j;
  j["config"] = header(c);
  bool ok = true;
  try {
    detail::check_conforming(vol);
    j["conforming"] = true;
  } catch (const TopologyError& e) {
    j["conforming"] = false;
    j["conforming_error"] = e.what();
    ok = false;
  }
  j["patches"] = nlohmann::json::array();
  for (int i = 0; i < vol.num_patches(); ++i) {
    auto rep = check_nonsingular(vol, i);
    const char* st = rep.status == NonsingularReport::Status::certified ? "certified"
                     : rep.status == NonsingularReport::Status::violation ? "violation"
                                                                           : "inconclusive";
    j["patches"].push_back({{"patch", i}, {"status", st}, {"orientation", rep.sign}});
    if (rep.status == NonsingularReport::Status::violation) ok = false;
  }
  j["faces"] = nlohmann::json::array();
  if (ok) {
    auto rep = check_assumption1(vol, cfg);
    for (auto& f : rep.faces) j["faces"].push_back(to_json(f));
    if (!rep.pass()) ok = false;
  }
  j["pass"] = ok;
  OutputSink sink(c.out, out);
  *sink << j.dump(2) << "\n";
  return ok ? ExitCode::ok : ExitCode::validation_failure;
}

int cmd_gluing(const RunConfig& c, std::ostream& out, std::ostream&) {
  auto vol = load_volume_file(c.volume);
  auto cfg = first_config(c);
  nlohmann::json j;
  j["config"] = header(c);
  j["faces"] = nlohmann::json::array();
  bool ok = true;
  for (int f : vol.inc.inner_faces()) {
    auto g = compute_gluing(vol, f);
    auto jf = to_json(g);
    auto rep = check_face_assumption(g, cfg.k);
    jf["assumption"] = to_json(rep);
    if (!rep.pass() || !verify_gluing_identities(g).all()) ok = false;
    j["faces"].push_back(jf);
  }
  j["pass"] = ok;
  OutputSink sink(c.out, out);
  *sink << j.dump(2) << "\n";
  return ok ? ExitCode::ok : ExitCode::validation_failure;
}

namespace {

struct Cell {
  int nu = 0;
  SplineSpaceConfig cfg;
};

std::vector<Cell> grid(const RunConfig& c) {
  std::vector<Cell> cells;
  for (int p : parse_range(c.p))
    for (int r : regularities(c.r, p))
      for (int k : parse_range(c.k)) {
        SplineSpaceConfig cfg{p, r, k};
        cfg.validate();
        cells.push_back({c.generic, cfg});
      }
  return cells;
}

int dim_fixed(const RunConfig& c, std::ostream& out) {
  auto vol = load_volume_file(c.volume);
  const BuildMode mode = parse_build_mode(c.mode);
  auto cells = grid(c);
  std::vector<std::string> rows(cells.size());
  std::atomic<bool> failed{false};
  parallel_for(static_cast<int>(cells.size()), [&](int i) {
    const auto& cfg = cells[i].cfg;
    std::ostringstream row;
    const std::string cell = std::to_string(cfg.p) + "," + std::to_string(cfg.r) + "," + std::to_string(cfg.k) + ",";
    try {
      if (!check_assumption1(vol, cfg).pass()) throw GluingError("assumption-failed");
      auto d = count_dims(vol, cfg, mode);
      row << build_mode_name(d.mode) << "," << cell << d.dim_patch << "," << d.dim_face << "," << d.dim_edge << ","
          << d.total() << "," << d.edge_rank_a << "," << d.edge_rank_b << "," << d.edge_unknowns << ",";
      if (d.edge_rank_a != d.edge_rank_b) row << "rank-differs-between-primes";
    } catch (const std::exception& e) {
      failed = true;
      row.str("");
      row << build_mode_name(resolve_mode(vol, mode)) << "," << cell << ",,,,,,," << e.what();
    }
    rows[i] = row.str();
  });
  out << header(c) << "\n";
  out << "mode,p,r,k,dim_patch,dim_face,dim_edge,dim_total,edge_rank_a,edge_rank_b,edge_unknowns,note\n";
  for (auto& r : rows) out << r << "\n";
  return failed ? ExitCode::validation_failure : ExitCode::ok;
}

int dim_generic(const RunConfig& c, std::ostream& out) {
  auto cells = grid(c);
  std::vector<std::string> rows(cells.size());
  std::atomic<bool> failed{false};
  parallel_for(static_cast<int>(cells.size()), [&](int i) {
    const auto& cell = cells[i];
    const auto& cfg = cell.cfg;
    std::map<int, int> counts;
    int attempts = 0;
    std::string note;
    for (int s = 0; s < c.samples; ++s) {
      std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                        static_cast<std::uint32_t>(cell.nu), static_cast<std::uint32_t>(cfg.p),
                        static_cast<std::uint32_t>(cfg.r), static_cast<std::uint32_t>(cfg.k),
                        static_cast<std::uint32_t>(s)};
      std::mt19937_64 rng(seq);
      try {
        auto g = random_wedge_volume(cell.nu, cfg, rng);
        attempts += g.attempts;
        ++counts[static_cast<int>(count_dims(g.vol, cfg, BuildMode::subclassA).dim_edge)];
      } catch (const std::exception& e) {
        note = e.what();
      }
    }
    int modal = -1, best = 0;
    for (auto& [v, n] : counts)
      if (n > best) {
        best = n;
        modal = v;
      }
    const int formula = generic_edge_dimension(cell.nu, cfg.p, cfg.r, cfg.k);
    std::ostringstream row;
    row << cell.nu << "," << cfg.p << "," << cfg.r << "," << cfg.k << "," << c.samples << "," << modal << ","
        << formula << "," << (modal == formula ? 1 : 0) << "," << (counts.size() == 1 ? 1 : 0) << ",";
    bool first = true;
    for (auto& [v, n] : counts) {
      row << (first ? "" : ";") << v << "x" << n;
      first = false;
    }
    row << "," << attempts << "," << note;
    if (!note.empty() || counts.size() != 1) failed = true;
    rows[i] = row.str();
  });
  out << header(c) << "\n";
  out << "nu,p,r,k,samples,modal_dim_edge,formula,matches_formula,samples_agree,values,attempts,note\n";
  for (auto& r : rows) out << r << "\n";
  return failed ? ExitCode::validation_failure : ExitCode::ok;
}

}  // namespace

int cmd_dim(const RunConfig& c, std::ostream& out, std::ostream&) {
  OutputSink sink(c.out, out);
  return c.generic ? dim_generic(c, *sink) : dim_fixed(c, *sink);
}

namespace {

BuildOptions build_options(const RunConfig& c) {
  BuildOptions o;
  o.mode = parse_build_mode(c.mode);
  if (c.kernel == "mds")
    o.kernel = KernelMode::mds;
  else if (c.kernel == "svd")
    o.kernel = KernelMode::svd;
  else
    throw std::invalid_argument("unknown kernel mode '" + c.kernel + "'");
  o.rank_tol = c.tol_rank;
  return o;
}

}  // namespace

int cmd_basis(const RunConfig& c, std::ostream& out, std::ostream&) {
  auto vol = load_volume_file(c.volume);
  auto cfg = first_config(c);
  auto B = build_space(vol, cfg, build_options(c));
  auto audit = c1_audit(vol, B, c.audit_samples, c.seed);
  nlohmann::json j;
  j["config"] = header(c);
  j["mode"] = build_mode_name(B.mode);
  j["dim_patch"] = B.dim_patch;
  j["dim_face"] = B.dim_face;
  j["dim_edge"] = B.dim_edge;
  j["dim_total"] = B.dim();
  j["kernel"] = {{"exact_rank", B.kernel.exact_rank},
                 {"numerical_rank", B.kernel.numerical_rank},
                 {"warning", B.kernel.warning},
                 {"residual", sci(B.kernel.residual)}};
  j["audit"] = {{"max_value_jump", sci(audit.max_value_jump)},
                {"max_grad_jump_rel", sci(audit.max_grad_jump_rel)},
                {"pass", audit.pass()}};
  if (!c.out.empty()) {
    nlohmann::json fs = nlohmann::json::array();
    for (auto& f : B.functions) {
      nlohmann::json jf;
      jf["family"] = family_name(f.tag.family);
      jf["entity"] = f.tag.entity;
      jf["index"] = f.tag.index;
      nlohmann::json parts = nlohmann::json::object();
      for (auto& [p, co] : f.parts()) {
        nlohmann::json list = nlohmann::json::array();
        for (auto& [idx, v] : co) list.push_back({idx, v});
        parts[std::to_string(p)] = list;
      }
      jf["coefficients"] = parts;
      fs.push_back(jf);
    }
    j["functions"] = fs;
  }
  OutputSink sink(c.out, out);
  *sink << j.dump(2) << "\n";
  return audit.pass() ? ExitCode::ok : ExitCode::validation_failure;
}

int cmd_fit(const RunConfig& c, std::ostream& out, std::ostream&) {
  auto vol = load_volume_file(c.volume);
  auto target = builtin_target(c.target);
  auto opts = build_options(c);
  OutputSink sink(c.out, out);
  std::ostream& o = *sink;
  o << header(c) << " target=" << c.target << "\n";
  o << "p,r,L,dim_total,dim_edge,e_volume,e_faces,e_edge,order_volume,note\n";
  std::vector<std::string> summary;
  for (int p : parse_range(c.p))
    for (int r : regularities(c.r, p)) {
      double prev = -1.0, first = -1.0, last = -1.0;
      int Lfirst = -1, Llast = -1;
      for (int L : parse_range(c.L)) {
        SplineSpaceConfig cfg{p, r, (1 << L) - 1};
        cfg.validate();
        auto d = count_dims(vol, cfg, opts.mode);
        o << p << "," << r << "," << L << "," << d.total() << "," << d.dim_edge << ",";
        if (d.total() > c.max_dim) {
          o << ",,,,skipped: dimension above --max-dim\n";
          prev = -1.0;
          continue;
        }
        auto B = build_space(vol, cfg, opts);
        auto res = l2_fit(vol, B, target);
        o << sci(res.e_volume) << "," << sci(res.e_faces) << "," << sci(res.e_edge) << ",";
        if (prev > 0 && res.e_volume > 0) o << std::fixed << std::setprecision(3) << std::log2(prev / res.e_volume)
                                            << std::defaultfloat;
        o << "," << res.solver << "\n";
        prev = res.e_volume;
        if (first < 0) {
          first = res.e_volume;
          Lfirst = L;
        }
        last = res.e_volume;
        Llast = L;
      }
      if (Llast > Lfirst && first > 0 && last > 0)
        summary.push_back("# p=" + std::to_string(p) + " r=" + std::to_string(r) + " e_volume reduction L" +
                          std::to_string(Lfirst) + "->L" + std::to_string(Llast) + " = " + sci(first / last));
    }
  for (auto& s : summary) o << s << "\n";
  return ExitCode::ok;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"C1 isogeometric spline spaces on trilinear multi-patch volumes"};
  app.require_subcommand(1);
  RunConfig c;
  auto common = [&](CLI::App* s, bool generic) {
    if (generic) {
      s->add_option("--volume", c.volume, "volume JSON file");
      s->add_option("--generic", c.generic, "valency of random wedge volumes")->check(CLI::Range(3, 12));
    } else {
      s->add_option("--volume", c.volume, "volume JSON file")->required();
    }
    s->add_option("--p", c.p, "degree or range (3..5, 3,5)");
    s->add_option("--r", c.r, "regularity or range, or 'admissible'");
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--mode", c.mode, "auto, two-patch, subclassA or general");
    s->add_option("--out", c.out, "output file");
  };
  auto* check = app.add_subcommand("check", "mesh regularity and gluing assumption report");
  common(check, false);
  check->add_option("--k", c.k, "interior knot count used for the grid-root test");
  auto* gluing = app.add_subcommand("gluing", "gluing data of every inner face");
  common(gluing, false);
  gluing->add_option("--k", c.k, "interior knot count");
  auto* dim = app.add_subcommand("dim", "dimension study");
  common(dim, true);
  dim->add_option("--k", c.k, "interior knot count or range");
  dim->add_option("--samples", c.samples, "random volumes per cell")->check(CLI::PositiveNumber);
  auto* basis = app.add_subcommand("basis", "build and audit the basis");
  common(basis, false);
  basis->add_option("--k", c.k, "interior knot count");
  basis->add_option("--kernel", c.kernel, "mds or svd");
  basis->add_option("--tol-rank", c.tol_rank, "relative singular value cut (svd kernel)");
  basis->add_option("--samples", c.audit_samples, "audit points per inner face")->check(CLI::PositiveNumber);
  auto* fit = app.add_subcommand("fit", "L2 fit at the given refinement levels");
  auto* converge = app.add_subcommand("converge", "L2 fits over a range of refinement levels");
  for (auto* s : {fit, converge}) {
    common(s, false);
    s->add_option("--L,--k", c.L, "refinement level or range (k = 2^L - 1)");
    s->add_option("--target", c.target, "builtin:cos-sin-cos, constant:<c>, linear:x1|x2|x3");
    s->add_option("--kernel", c.kernel, "mds or svd");
    s->add_option("--tol-rank", c.tol_rank, "relative singular value cut (svd kernel)");
    s->add_option("--max-dim", c.max_dim, "skip levels with a larger space");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::usage_error;
  }
  const bool defaulted_r = c.r == "admissible";
  try {
    if (*check) {
      c.command = "check";
      if (defaulted_r) c.r = "1";
      return cmd_check(c, out, err);
    }
    if (*gluing) {
      c.command = "gluing";
      if (defaulted_r) c.r = "1";
      return cmd_gluing(c, out, err);
    }
    if (*dim) {
      c.command = "dim";
      if (c.generic == 0 && c.volume.empty()) throw CLI::ValidationError("dim needs --volume or --generic");
      return cmd_dim(c, out, err);
    }
    if (*basis) {
      c.command = "basis";
      if (defaulted_r) c.r = "1";
      return cmd_basis(c, out, err);
    }
    c.command = *fit ? "fit" : "converge";
    if (defaulted_r) c.r = "1";
    if (*converge && c.L == "0") c.L = "0..2";
    return cmd_fit(c, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage_error;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage_error;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::validation_failure;
  }
}

}  // namespace c1vol::cli

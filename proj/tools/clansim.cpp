// clansim: batch driver for the sampler, the couplings and the oracles.
//
// Exit codes: 0 success, 1 usage or validation failure, 2 clan cap
// exceeded, 3 diluteness failure under --strict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clansim/clansim.hpp"

#ifndef CLANSIM_VERSION
#define CLANSIM_VERSION "0.0.0"
#endif

using namespace clansim;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCap = 2;
constexpr int kExitStrict = 3;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + format_real(x);
  return s;
}

// Per-replica clan figures folded into the manifest.
struct ClanSummary {
  std::size_t replicas = 0, total_size = 0, max_size = 0, total_roots = 0;
  int max_depth = 0;

  void add(const ClanStats& s) {
    ++replicas;
    total_size += s.size;
    max_size = std::max(max_size, s.size);
    total_roots += s.roots;
    max_depth = std::max(max_depth, s.depth);
  }
  void write(Manifest& m) const {
    const double n = replicas ? static_cast<double>(replicas) : 1.0;
    m.set("clan_mean_size", static_cast<double>(total_size) / n);
    m.set("clan_max_size", std::to_string(max_size));
    m.set("clan_mean_roots", static_cast<double>(total_roots) / n);
    m.set("clan_max_depth", std::to_string(max_depth));
  }
};

Manifest base_manifest(const std::string& command, std::uint64_t seed) {
  Manifest m;
  m.set("tool_version", CLANSIM_VERSION);
  m.set("command", command);
  m.set("seed", std::to_string(seed));
  m.set("replica_seed", "derive_seed(seed, replica)");
  return m;
}

void add_model(Manifest& m, const ModelSpec& spec, const GasModel& model) {
  m.set("spec", spec.canonical());
  m.set("model_hash", hex64(model_hash(spec)));
  m.set("model", model.describe());
  try {
    const auto q = model.family() == "peierls" ? SizeFunction::kContourLength : SizeFunction::kConstant;
    const auto closed = model.closed_form(q);
    const auto rep = closed ? *closed : model.diluteness(q, Relation::kImpact);
    m.set("alpha", rep.alpha);
    m.set("alpha_method", rep.method);
    m.set("verdict", rep.verdict());
    if (rep.truncated) m.set("lmax", std::to_string(rep.lmax));
  } catch (const Error& e) {
    m.set("alpha", std::string("unavailable: ") + e.what());
  }
}

// --- coeff ---------------------------------------------------------------

struct CoeffArgs {
  std::string spec;
  bool strict = false;
  bool envelope = false;
  std::string size = "auto";
};

int cmd_coeff(const CoeffArgs& a) {
  const auto spec = ModelSpec::load(a.spec);
  const auto model = build_model(spec);
  SizeFunction q = model->family() == "peierls" ? SizeFunction::kContourLength : SizeFunction::kConstant;
  if (a.size == "constant") q = SizeFunction::kConstant;
  if (a.size == "length") q = SizeFunction::kContourLength;

  std::cout << "model        " << model->describe() << "\n";
  std::cout << "model_hash   " << hex64(model_hash(spec)) << "\n";
  std::optional<DilutenessReport> closed;
  try {
    closed = model->closed_form(q);
  } catch (const Error& e) {
    std::cout << "closed_form  error: " << e.what() << "\n";
  }
  if (closed)
    std::cout << "closed_form  " << format_real(closed->alpha) << "  (" << closed->method << ")\n";
  else
    std::cout << "closed_form  none\n";

  const auto rep = model->diluteness(q, a.envelope ? Relation::kEnvelope : Relation::kImpact);
  std::cout << "integrator   " << format_real(rep.alpha) << "  (" << rep.method << (rep.envelope_used ? ", envelope" : "")
            << ")\n";
  if (rep.truncated)
    std::cout << "truncation   lmax=" << rep.lmax << " tail_estimate=" << format_real(rep.tail_estimate)
              << (rep.tail_conclusive ? "" : " (inconclusive)") << "\n";
  const DilutenessReport& verdict_from = closed ? *closed : rep;
  std::cout << "verdict      " << verdict_from.verdict() << "\n";
  if (a.strict && !verdict_from.heavily_diluted()) return kExitStrict;
  return 0;
}

// --- sample --------------------------------------------------------------

struct SampleArgs {
  std::string spec;
  std::string window;
  std::string volume;
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  std::string out = "samples.csv";
  std::size_t cap = kDefaultClanCap;
  double cell_size = 0.5;
  unsigned workers = 0;
};

int cmd_sample(const SampleArgs& a) {
  Timer timer;
  const auto spec = ModelSpec::load(a.spec);
  const auto model = build_model(spec);
  const bool finite = !a.volume.empty();
  if (finite == !a.window.empty())
    throw Error(ErrorCode::kInvalidArgument, "give exactly one of --window and --volume");
  const Region region = Region::box(parse_box(finite ? a.volume : a.window));
  SamplerOptions opts;
  opts.cap = a.cap;
  opts.cell_size = spec.number_or("cell_size", a.cell_size);

  std::vector<std::string> rows(a.replicas);
  std::vector<ClanStats> stats(a.replicas);
  parallel_for(
      a.replicas,
      [&](std::size_t r) {
        const std::uint64_t seed = derive_seed(a.seed, r);
        const auto res = finite ? finite_volume_sample(*model, region, ParticleConfiguration(), seed, opts)
                                : perfect_sample(*model, region, seed, opts);
        std::ostringstream s;
        write_sample_rows(s, {r, 0.0, res.config});
        rows[r] = s.str();
        stats[r] = res.stats;
      },
      a.workers);

  auto out = open_output(a.out);
  write_sample_header(out, model->dim());
  for (const auto& r : rows) out << r;
  ClanSummary summary;
  for (const auto& s : stats) summary.add(s);

  Manifest m = base_manifest("sample", a.seed);
  add_model(m, spec, *model);
  m.set(finite ? "volume" : "window", finite ? a.volume : a.window);
  m.set("replicas", std::to_string(a.replicas));
  m.set("cell_size", opts.cell_size);
  m.set("cap", std::to_string(opts.cap));
  summary.write(m);
  m.set("wall_clock_seconds", timer.seconds());
  m.write_for(a.out);
  return 0;
}

// --- couple --------------------------------------------------------------

struct CoupleArgs {
  std::string spec;
  std::string family = "identity";
  std::string grid = "0.2,0.1,0.05,0.02,0.01,0";
  std::string window;
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  std::string out = "coupled.csv";
  std::string report;
  std::size_t cap = kDefaultClanCap;
  double cell_size = 0.5;
  double delta = 0.01;
  std::string vague_box;
  unsigned workers = 0;
};

CoupledRun make_run(const CoupleArgs& a, const ModelSpec& spec, const std::vector<double>& grid) {
  const int dim = spec.integer_or("dimension", 2);
  const double lambda = spec.number_or("lambda", 0.0);
  const double lp = spec.number_or("lambda_plus", lambda), lm = spec.number_or("lambda_minus", lambda);
  if (a.family == "identity") return identity_run(build_model(spec), grid);
  if (a.family == "fugacity") {
    if (spec.get("family") != "discrete_wr")
      throw Error(ErrorCode::kInvalidArgument, "the fugacity family needs a discrete_wr spec");
    return fugacity_run(dim, lp, lm, spec.integer_or("radius", 1), grid);
  }
  if (a.family == "discretization") {
    if (spec.get("family") != "continuum_wr")
      throw Error(ErrorCode::kInvalidArgument, "the discretization family needs a continuum_wr spec");
    return discretization_run(dim, lp, lm, spec.number_or("radius", 0.5), grid);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown family '" + a.family + "'");
}

std::string text(const std::optional<double>& v) { return v ? format_real(*v) : "none"; }

int cmd_couple(const CoupleArgs& a) {
  Timer timer;
  const auto spec = ModelSpec::load(a.spec);
  auto grid = parse_real_list(a.grid);
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty() || grid.back() != 0.0) grid.push_back(0.0);
  const auto run = make_run(a, spec, grid);
  const Region window = Region::box(parse_box(a.window));
  const std::optional<Region> vague_k =
      a.vague_box.empty() ? std::nullopt : std::optional<Region>(Region::box(parse_box(a.vague_box)));
  CouplingOptions opts;
  opts.cap = a.cap;
  opts.cell_size = spec.number_or("cell_size", a.cell_size);

  std::vector<std::string> rows(a.replicas), reports(a.replicas);
  std::vector<ClanStats> stats(a.replicas);
  parallel_for(
      a.replicas,
      [&](std::size_t r) {
        const auto out = coupled_sample(run, window, derive_seed(a.seed, r), opts);
        std::ostringstream s, rep;
        for (std::size_t l = 0; l < grid.size(); ++l) write_sample_rows(s, {r, grid[l], out.samples[l]});
        const auto star = stabilization_epsilon(run, out);
        const auto smallest = smallest_identity_epsilon(run, out);
        rep << r << ',' << text(star) << ',' << text(smallest);
        if (vague_k) {
          std::optional<double> v;
          if (smallest) {
            const std::vector<double> pair = {*smallest, 0.0};
            v = vague_convergence_check(pair, {out.samples[out.level_of(*smallest)], out.samples.back()}, *vague_k,
                                        a.delta);
          }
          rep << ',' << (v ? "pass" : "fail");
        }
        for (std::size_t l = 0; l < grid.size(); ++l)
          rep << ',' << (out.identity_holds(run.family(), l) ? 1 : 0) << ':' << (out.negligible[l] ? 1 : 0);
        rep << '\n';
        rows[r] = s.str();
        reports[r] = rep.str();
        stats[r] = out.clan.stats();
      },
      a.workers);

  auto out = open_output(a.out);
  write_sample_header(out, run.reference().dim());
  for (const auto& r : rows) out << r;

  Manifest m = base_manifest("couple", a.seed);
  add_model(m, spec, run.reference());
  m.set("family", run.family().describe());
  m.set("eps_grid", join(grid));
  m.set("window", a.window);
  m.set("replicas", std::to_string(a.replicas));
  m.set("cell_size", opts.cell_size);
  m.set("cap", std::to_string(opts.cap));
  ClanSummary summary;
  for (const auto& s : stats) summary.add(s);
  summary.write(m);
  m.set("wall_clock_seconds", timer.seconds());
  m.write_for(a.out);

  if (!a.report.empty()) {
    auto rep = open_output(a.report);
    rep << "replica,eps_star,smallest_identity_eps";
    if (vague_k) rep << ",vague";
    for (double e : grid) rep << ",identity:negligible@" << format_real(e);
    rep << '\n';
    for (const auto& r : reports) rep << r;
    Manifest rm = m;
    rm.set("delta", a.delta);
    if (vague_k) rm.set("vague_box", a.vague_box);
    rm.write_for(a.report);
  }
  return 0;
}

// --- validate ------------------------------------------------------------

struct ValidateArgs {
  std::string suite;
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
};

int cmd_validate(const ValidateArgs& a) {
  if (a.suite == "oracle-wr") {
    auto model = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
    const Region volume = Region::sites({Location{0, 0}, Location{0, 1}, Location{1, 0}, Location{1, 1}});
    const auto exact = enumerate_gibbs(*model, volume, ParticleConfiguration());
    EmpiricalDistribution emp;
    for (std::size_t i = 0; i < a.samples; ++i)
      emp.add(finite_volume_sample(*model, volume, ParticleConfiguration(), derive_seed(a.seed, i)).config);
    const double tv = tv_distance(emp, exact);
    const double p0 = exact.probability(ParticleConfiguration());
    const double f0 = emp.frequency(ParticleConfiguration());
    const double band = 3 * std::sqrt(p0 * (1 - p0) / static_cast<double>(a.samples));
    std::cout << "support      " << exact.support.size() << "\n"
              << "normalizer   " << format_real(exact.normalizer) << "\n"
              << "samples      " << a.samples << "\n"
              << "tv           " << format_real(tv) << "\n"
              << "p_empty      " << format_real(f0) << " (exact " << format_real(p0) << ", band " << format_real(band)
              << ")\n";
    const bool ok = tv <= 0.01 && std::abs(f0 - p0) <= band;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : kExitUsage;
  }
  if (a.suite == "contours") {
    double worst = 0.0;
    for (double beta : {0.5, 0.8, 1.2}) {
      const double e = check_contour_identity(3, beta);
      std::cout << "beta " << format_real(beta) << "  max |ising - contours| = " << format_real(e) << "\n";
      worst = std::max(worst, e);
    }
    std::size_t bad = 0;
    for (std::uint64_t bits = 0; bits < (1u << 16); ++bits) {
      const auto s = SpinSquare::from_bits(4, bits);
      bad += !(contours_to_spins(spins_to_contours(s)) == s);
    }
    std::cout << "round-trip failures on 4x4: " << bad << "\n";
    const bool ok = worst <= 1e-10 && bad == 0;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : kExitUsage;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown suite '" + a.suite + "' (oracle-wr, contours)");
}

// --- contours ------------------------------------------------------------

struct ContoursArgs {
  int lmax = 8;
  double beta = 1.0;
  std::string out;
};

int cmd_contours(const ContoursArgs& a) {
  Timer timer;
  const auto catalog = ContourCatalog::enumerate(a.lmax);
  const auto counts = catalog.counts();
  std::ostringstream table;
  table << "length,count\n";
  for (int l = 4; l <= a.lmax; l += 2) table << l << ',' << counts[static_cast<std::size_t>(l)] << '\n';
  const auto lhs = peierls_lhs(a.beta, catalog);
  const auto site = peierls_alpha_series(a.beta, catalog);
  std::cout << table.str();
  std::cout << "beta " << format_real(a.beta) << "\n"
            << "peierls_sum " << format_real(lhs.value) << " tail_estimate "
            << (lhs.tail_conclusive ? format_real(lhs.tail_estimate) : "inconclusive") << "\n"
            << "per_site_bound " << format_real(site.value)
            << (site.tail_conclusive ? " + " + format_real(site.tail_estimate) : " (tail inconclusive)") << "\n";
  if (!a.out.empty()) {
    auto out = open_output(a.out);
    out << table.str();
    Manifest m = base_manifest("contours", 0);
    m.set("lmax", std::to_string(a.lmax));
    m.set("beta", a.beta);
    m.set("peierls_sum", lhs.value);
    m.set("per_site_bound", site.value);
    m.set("wall_clock_seconds", timer.seconds());
    m.write_for(a.out);
  }
  return 0;
}

// --- dynamics ------------------------------------------------------------

struct DynamicsArgs {
  std::string spec;
  std::string volume;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  std::string out = "dynamics.csv";
};

int cmd_dynamics(const DynamicsArgs& a) {
  Timer timer;
  const auto spec = ModelSpec::load(a.spec);
  const auto model = build_model(spec);
  const Region volume = Region::box(parse_box(a.volume));
  const auto t = forward_dynamics(*model, volume, ParticleConfiguration(), ParticleConfiguration(volume), a.horizon,
                                  a.seed);
  auto out = open_output(a.out);
  out << "time,event";
  for (int i = 0; i < model->dim(); ++i) out << ",x" << i;
  out << ",mark\n";
  for (const auto& e : t.events) {
    out << format_real(e.time) << ',' << (e.kind == DynamicsEvent::Kind::kBirth ? "birth" : "death");
    for (int i = 0; i < e.particle.x.dim; ++i) out << ',' << format_real(e.particle.x[i]);
    out << ',' << mark_text(e.particle.mark) << '\n';
  }
  Manifest m = base_manifest("dynamics", a.seed);
  add_model(m, spec, *model);
  m.set("volume", a.volume);
  m.set("horizon", a.horizon);
  m.set("proposals", std::to_string(t.proposals));
  m.set("final_particles", std::to_string(t.final_state.total()));
  m.set("wall_clock_seconds", timer.seconds());
  m.write_for(a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect sampling and coupling of gas models on clans of ancestors"};
  app.set_version_flag("--version", std::string(CLANSIM_VERSION));
  app.require_subcommand(1);

  CoeffArgs coeff;
  auto* c = app.add_subcommand("coeff", "diluteness coefficients of a model spec");
  c->add_option("spec", coeff.spec, "model spec file")->required();
  c->add_flag("--strict", coeff.strict, "exit 3 unless heavily diluted");
  c->add_flag("--envelope", coeff.envelope, "integrate over envelopes instead of impact regions");
  c->add_option("--size", coeff.size, "size function: auto, constant or length")
      ->check(CLI::IsMember({"auto", "constant", "length"}));

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "perfect samples in a window (or finite volume)");
  s->add_option("spec", sample.spec, "model spec file")->required();
  s->add_option("--window", sample.window, "window box lo:hi,lo:hi");
  s->add_option("--volume", sample.volume, "finite volume box with empty boundary");
  s->add_option("--replicas", sample.replicas, "number of replicas");
  s->add_option("--seed", sample.seed, "base seed");
  s->add_option("--out", sample.out, "CSV output");
  s->add_option("--cap", sample.cap, "clan size cap");
  s->add_option("--cell-size", sample.cell_size, "continuum cell edge");
  s->add_option("--workers", sample.workers, "threads, 0 = hardware");

  CoupleArgs couple;
  auto* k = app.add_subcommand("couple", "coupled samples over an epsilon grid");
  k->add_option("spec", couple.spec, "model spec file")->required();
  k->add_option("--family", couple.family, "identity, fugacity or discretization")
      ->check(CLI::IsMember({"identity", "fugacity", "discretization"}));
  k->add_option("--eps-grid", couple.grid, "comma-separated epsilons; 0 is appended");
  k->add_option("--window", couple.window, "window box lo:hi,lo:hi")->required();
  k->add_option("--replicas", couple.replicas, "number of replicas");
  k->add_option("--seed", couple.seed, "base seed");
  k->add_option("--out", couple.out, "CSV output of samples per level");
  k->add_option("--report", couple.report, "CSV of per-replica identity and stabilization");
  k->add_option("--cap", couple.cap, "clan size cap");
  k->add_option("--cell-size", couple.cell_size, "continuum cell edge");
  k->add_option("--vague-box", couple.vague_box, "box K for the vague convergence check");
  k->add_option("--delta", couple.delta, "delta for the vague convergence check");
  k->add_option("--workers", couple.workers, "threads, 0 = hardware");

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "run an oracle suite");
  v->add_option("suite", validate.suite, "oracle-wr or contours")->required();
  v->add_option("--samples", validate.samples, "samples for oracle-wr");
  v->add_option("--seed", validate.seed, "base seed");

  ContoursArgs contours;
  auto* t = app.add_subcommand("contours", "contour counts and Peierls sums");
  t->add_option("--lmax", contours.lmax, "largest contour length")->check(CLI::Range(4, 40));
  t->add_option("--beta", contours.beta, "inverse temperature")->check(CLI::PositiveNumber);
  t->add_option("--out", contours.out, "CSV output of the counts");

  DynamicsArgs dynamics;
  auto* d = app.add_subcommand("dynamics", "forward birth-death dynamics in a finite volume");
  d->add_option("spec", dynamics.spec, "model spec file")->required();
  d->add_option("--volume", dynamics.volume, "volume box lo:hi,lo:hi")->required();
  d->add_option("--horizon", dynamics.horizon, "time horizon");
  d->add_option("--seed", dynamics.seed, "seed");
  d->add_option("--out", dynamics.out, "CSV output of events");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c) return cmd_coeff(coeff);
    if (*s) return cmd_sample(sample);
    if (*k) return cmd_couple(couple);
    if (*v) return cmd_validate(validate);
    if (*t) return cmd_contours(contours);
    if (*d) return cmd_dynamics(dynamics);
  } catch (const Error& e) {
    std::cerr << "clansim: " << e.what() << "\n";
    return e.code() == ErrorCode::kClanCapExceeded ? kExitCap : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "clansim: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

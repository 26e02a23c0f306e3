#include "spectral_atlas/cli.hpp"

#include "spectral_atlas/frequency.hpp"
#include "spectral_atlas/gd.hpp"
#include "spectral_atlas/io.hpp"
#include "spectral_atlas/operators.hpp"
#include "spectral_atlas/oracles.hpp"
#include "spectral_atlas/spectrum.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <optional>

namespace atlas::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  int threads = 0;
  std::string potential;
  std::string z = "0,0";
  std::string method;
  double eps = 0;
  double lambda = 1;
  std::string box;
  int res = 201;
  std::string out;
  std::string freq;
  int theta_grid = 8, phi_grid = 8;
  std::string alpha = "golden";
  std::string theta = "0";
  double omega = 0;
  long nmax = 100000;
  std::string model = "dual";
  std::string range = "0:63";
  std::string tag;
  int samples = 500;
  std::uint64_t seed = 1;
  double g = 1;
  int terms = 20;
};

enum class Status { Ok = 0, Usage = 1, Numerical = 2 };

std::int64_t parse_int(const std::string& s, const char* what) {
  std::int64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw UsageError(std::string("malformed ") + what + " '" + s + "'");
  return v;
}

std::vector<double> parse_reals(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double v = 0;
    auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || r.ec != std::errc() || r.ptr != part.data() + part.size())
      throw UsageError(std::string("malformed ") + what + " '" + s + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// "p/q" or "p/q,p2/q2"
RationalFrequency parse_rational(const std::string& s) {
  auto one = [&](const std::string& t) {
    const auto slash = t.find('/');
    if (slash == std::string::npos) throw UsageError("frequency must be written p/q");
    return std::pair{parse_int(t.substr(0, slash), "numerator"), parse_int(t.substr(slash + 1), "denominator")};
  };
  RationalFrequency f;
  const auto comma = s.find(',');
  std::tie(f.p, f.q) = one(s.substr(0, comma));
  if (comma != std::string::npos) f.second = one(s.substr(comma + 1));
  if (f.q < 1 || (f.second && f.second->second < 1)) throw UsageError("denominator must be >= 1");
  return f;
}

std::pair<long, long> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("range must be written first:last");
  const long a = parse_int(s.substr(0, colon), "range"), b = parse_int(s.substr(colon + 1), "range");
  if (b < a) throw UsageError("range end precedes its start");
  return {a, b};
}

Potential potential_or_default(const Options& o) {
  if (o.potential.empty()) return Potential(TrigPolynomial1D(1, {1.0}));
  return load_potential(o.potential);
}

GdEvaluator make_evaluator(const Potential& v, const Options& o) {
  if (o.method.empty()) return GdEvaluator::automatic(v, o.eps);
  return GdEvaluator(v, parse_method(o.method), o.eps);
}

Json box_json(const Box& b) { return Json::array({b.x0, b.y0, b.x1, b.y1}); }

// Output file given as a path: its directory receives the manifest.
ArtifactWriter writer_for_file(const std::string& out, std::string& name) {
  const fs::path p(out);
  name = p.filename().string();
  if (name.empty()) throw UsageError("--out needs a file name");
  return ArtifactWriter(p.has_parent_path() ? p.parent_path() : fs::path("."));
}

Json spectrum_summary(const SpectrumSet& s) {
  Json j;
  j["resolvent"] = s.count(Label::Resolvent);
  j["range"] = s.count(Label::Range);
  j["level_set"] = s.count(Label::LevelSet);
  j["failed"] = s.failures();
  j["curves"] = s.curves.size();
  j["unrefined_vertices"] = s.unrefined_vertices;
  return j;
}

void write_spectrum(ArtifactWriter& w, const SpectrumSet& s, const std::vector<Polyline>& overlays) {
  w.write("grid.csv", grid_csv(s));
  Json c;
  c["schema"] = "v1";
  c["lambda"] = s.lambda;
  c["box"] = box_json(s.box);
  c["res"] = s.n;
  c["level_tolerance"] = s.level_tolerance;
  c["range_tolerance"] = s.range_tolerance;
  c["curves"] = polylines_json(s.curves);
  c["range_points"] = complex_array(s.range_points);
  w.write_json("curves.json", c);
  w.write("picture.ppm", ppm_image(s));
  w.write("picture.svg", svg_image(s, overlays));
}

Status gd_eval(const Options& o) {
  const Potential v = load_potential(o.potential);
  const Complex z = parse_complex(o.z);
  const GdEvaluator ev = make_evaluator(v, o);
  const GdValue r = ev(z);
  Json j;
  j["schema"] = "v1";
  j["z"] = complex_json(z);
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["error_bound"] = r.error_bound;
  j["near_singular"] = r.near_singular;
  j["converged"] = r.converged;
  std::cout << dump(j);
  if (!o.out.empty()) {
    ArtifactWriter w(o.out);
    w.write_json("gd.json", j);
    w.write_manifest("gd eval",
                     {{"potential", potential_to_json(v)}, {"z", complex_json(z)},
                      {"method", to_string(ev.method())}, {"eps", ev.accuracy()}},
                     r.converged);
  }
  return r.converged ? Status::Ok : Status::Numerical;
}

Status spectrum_atlas(const Options& o) {
  const Box box = parse_box(o.box);
  if (o.res < 16) throw UsageError("--res must be >= 16");
  if (!(o.lambda >= 0)) throw UsageError("--lambda must be >= 0");
  const Potential v = load_potential(o.potential);
  const GdEvaluator ev = make_evaluator(v, o);
  ArtifactWriter w(o.out);
  const SpectrumSet s = compute_spectrum(ev, o.lambda, box, o.res);
  write_spectrum(w, s, {});
  const bool ok = s.failures() == 0;
  w.write_manifest("spectrum atlas",
                   {{"potential", potential_to_json(v)}, {"lambda", o.lambda}, {"box", box_json(box)},
                    {"res", o.res}, {"method", to_string(ev.method())}, {"eps", ev.accuracy()},
                    {"threads", thread_count()}},
                   ok, {{"summary", spectrum_summary(s)}});
  return ok ? Status::Ok : Status::Numerical;
}

Status op_floquet(const Options& o) {
  const RationalFrequency f = parse_rational(o.freq);
  if (!(o.lambda >= 0)) throw UsageError("--lambda must be >= 0");
  const Potential v = load_potential(o.potential);
  std::string name;
  const auto fs_ = floquet_spectrum(v, o.lambda, f, o.theta_grid, o.phi_grid);
  ArtifactWriter w = writer_for_file(o.out, name);
  std::size_t failed = 0;
  for (auto c : fs_.failed) failed += c;
  Json j;
  j["schema"] = "v1";
  j["p"] = f.p;
  j["q"] = fs_.period;
  j["theta_grid"] = o.theta_grid;
  j["phi_grid"] = o.phi_grid;
  j["roots"] = complex_array(fs_.roots);
  j["residuals"] = fs_.residuals;
  j["failed_cells"] = failed;
  w.write_json(name, j);
  const bool ok = failed == 0 && fs_.max_residual() <= 1e-8;
  w.write_manifest("op floquet",
                   {{"potential", potential_to_json(v)}, {"lambda", o.lambda}, {"freq", o.freq},
                    {"theta_grid", o.theta_grid}, {"phi_grid", o.phi_grid}},
                   ok, {{"max_residual", fs_.max_residual()}});
  return ok ? Status::Ok : Status::Numerical;
}

Status op_weyl(const Options& o) {
  const Potential v = potential_or_default(o);
  const Complex z = parse_complex(o.z);
  const auto cf = frequency_from_spec(o.alpha);
  std::vector<double> theta = parse_reals(o.theta, "theta");
  if (v.dimension() != 1) throw UsageError("op weyl supports one-dimensional potentials");
  std::string name;
  const WeylReport r = weyl_certify(v, o.lambda, z, theta, {cf.alpha}, o.nmax);
  ArtifactWriter w = writer_for_file(o.out, name);
  Json j;
  j["schema"] = "v1";
  j["z"] = complex_json(z);
  j["lambda"] = r.lambda;
  j["theta"] = r.theta;
  j["alpha"] = cf.alpha;
  j["orbit_hit"] = r.orbit_hit;
  j["windows"] = r.windows;
  j["residuals"] = r.residuals;
  j["min_residual"] = r.min_residual;
  j["argmin"] = r.argmin;
  j["min_residual_any"] = r.min_residual_any;
  j["tail_exponent"] = r.tail_exponent;
  j["check_window"] = r.check_window;
  j["check_residual"] = r.check_residual;
  w.write_json(name, j);
  w.write_manifest("op weyl",
                   {{"potential", potential_to_json(v)}, {"lambda", o.lambda}, {"z", complex_json(z)},
                    {"alpha", o.alpha}, {"theta", theta}, {"nmax", o.nmax}},
                   true);
  return Status::Ok;
}

Status op_truncate(const Options& o) {
  const Potential v = potential_or_default(o);
  const auto [first, last] = parse_range(o.range);
  const auto cf = frequency_from_spec(o.alpha);
  BandedOperatorSpec spec{o.model == "primal" ? Model::Primal : Model::Dual, v, o.lambda,
                          std::vector<double>(static_cast<std::size_t>(v.dimension()), cf.alpha),
                          o.omega, parse_reals(o.theta, "theta")};
  if (o.model != "primal" && o.model != "dual") throw UsageError("--model is primal or dual");
  std::string name;
  const ComplexMatrix a = build_matrix(spec, first, last);
  ArtifactWriter w = writer_for_file(o.out, name);
  const EigenResult e = eig_dense(a);
  std::vector<Complex> vals(e.values.data(), e.values.data() + e.values.size());
  Json j;
  j["schema"] = "v1";
  j["model"] = o.model;
  j["first"] = first;
  j["last"] = last;
  j["eigenvalues"] = complex_array(vals);
  j["residual"] = e.residual;
  j["norm"] = e.norm;
  j["triangular"] = e.triangular;
  j["converged"] = e.converged;
  w.write_json(name, j);
  const bool ok = e.converged && e.residual <= 1e-8 * std::max(e.norm, 1e-300);
  w.write_manifest("op truncate",
                   {{"potential", potential_to_json(v)}, {"model", o.model}, {"lambda", o.lambda},
                    {"alpha", o.alpha}, {"theta", spec.theta}, {"omega", o.omega}, {"range", o.range}},
                   ok);
  return ok ? Status::Ok : Status::Numerical;
}

Status oracle_check(const Options& o) {
  const GalleryCase c = gallery_case(o.tag, o.g);
  if (!c.has_oracle(o.lambda)) throw UsageError("no closed-form spectrum for this case at this lambda");
  const GdEvaluator ev = c.evaluator();
  const OracleSpectrum oracle = c.oracle(o.lambda, ev);
  const AgreementReport r = oracle_agreement(ev, oracle, o.samples, o.seed, o.res);
  Json j;
  j["schema"] = "v1";
  j["case"] = o.tag;
  j["lambda"] = o.lambda;
  j["samples"] = o.samples;
  j["seed"] = o.seed;
  j["agree"] = r.agree;
  j["tube"] = r.tube;
  j["disagree"] = r.disagree;
  j["tube_width_max"] = r.tube_width_max;
  j["disagreements"] = complex_array(r.disagreements);
  std::cout << dump(j);
  if (!o.out.empty()) {
    ArtifactWriter w(o.out);
    w.write_json("oracle.json", j);
    w.write_manifest("oracle check",
                     {{"case", o.tag}, {"lambda", o.lambda}, {"g", o.g}, {"samples", o.samples},
                      {"seed", o.seed}, {"res", o.res}},
                     r.disagree == 0);
  }
  return r.disagree == 0 ? Status::Ok : Status::Numerical;
}

Status freq_expand(const Options& o) {
  if (o.terms < 1) throw UsageError("--terms must be >= 1");
  const ContinuedFraction cf = frequency_from_spec(o.alpha, o.terms);
  Json j;
  j["schema"] = "v1";
  j["alpha"] = cf.alpha;
  j["a"] = std::vector<std::int64_t>(cf.a.begin() + 1, cf.a.end());
  j["p"] = cf.p;
  j["q"] = cf.q;
  j["rational"] = cf.rational;
  if (!cf.rational && cf.convergents() >= 3)
    j["beta_estimate"] = beta_estimate(cf);
  else
    j["beta_estimate"] = nullptr;
  std::cout << dump(j);
  if (!o.out.empty()) {
    ArtifactWriter w(o.out);
    w.write_json("freq.json", j);
    w.write_manifest("freq expand", {{"alpha", o.alpha}, {"terms", o.terms}}, true);
  }
  return Status::Ok;
}

Status gallery(const Options& o) {
  if (o.res < 16) throw UsageError("--res must be >= 16");
  if (!(o.lambda >= 0)) throw UsageError("--lambda must be >= 0");
  const GalleryCase c = gallery_case(o.tag, o.g);
  const std::string out = o.out.empty() ? "gallery/" + o.tag : o.out;
  const GdEvaluator ev = c.evaluator();
  const Box box = c.frame(o.lambda);
  ArtifactWriter w(out);
  const SpectrumSet s = compute_spectrum(ev, o.lambda, box, o.res);
  std::vector<Polyline> overlays;
  Json summary;
  summary["schema"] = "v1";
  summary["case"] = o.tag;
  summary["title"] = c.title;
  summary["lambda"] = o.lambda;
  summary["g"] = o.g;
  summary["box"] = box_json(box);
  summary["res"] = o.res;
  summary["labels"] = spectrum_summary(s);
  summary["hole_at_origin"] = encloses_hole(s, 0.0);
  if (c.has_oracle(o.lambda)) {
    const OracleSpectrum oracle = c.oracle(o.lambda, ev);
    overlays = oracle.boundaries;
    // Same tube as the random-point check, without the per-point gradient.
    const double tube = 2 * std::max(s.step(), s.range_tolerance);
    long mismatch = 0, excused = 0;
    for (int j = 0; j < s.n; ++j)
      for (int i = 0; i < s.n; ++i) {
        const Complex z = s.node(i, j);
        if (member(oracle.membership(z)) == in_spectrum(s.label(i, j))) continue;
        (oracle.boundary_distance(z) <= tube ? excused : mismatch) += 1;
      }
    summary["oracle"] = {{"mismatch_outside_tube", mismatch}, {"mismatch_in_tube", excused},
                         {"tube", tube}, {"parameters", Json::object()}};
    for (const auto& [k, v] : oracle.parameters) summary["oracle"]["parameters"][k] = v;
  }
  write_spectrum(w, s, overlays);
  w.write_json("summary.json", summary);
  const bool ok = s.failures() == 0;
  w.write_manifest("gallery",
                   {{"case", o.tag}, {"lambda", o.lambda}, {"g", o.g}, {"res", o.res},
                    {"box", box_json(box)}, {"method", to_string(ev.method())},
                    {"threads", thread_count()}},
                   ok);
  return ok ? Status::Ok : Status::Numerical;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Spectra of quasi-periodic non-self-adjoint operators"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "worker threads (default: SPECTRAL_ATLAS_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::function<Status()> action;

  auto* gd = app.add_subcommand("gd", "evaluate G(z)")->require_subcommand(1);
  auto* gd_ev = gd->add_subcommand("eval", "G at one point");
  gd_ev->add_option("--potential", o.potential)->required();
  gd_ev->add_option("--z", o.z)->required();
  gd_ev->add_option("--method", o.method, "jensen | quad | iterated");
  gd_ev->add_option("--eps", o.eps, "quadrature accuracy");
  gd_ev->add_option("--out", o.out, "directory for gd.json and the manifest");
  gd_ev->callback([&] { action = [&] { return gd_eval(o); }; });

  auto* sp = app.add_subcommand("spectrum", "spectral sets")->require_subcommand(1);
  auto* atlas_cmd = sp->add_subcommand("atlas", "classify a box and trace level curves");
  atlas_cmd->add_option("--potential", o.potential)->required();
  atlas_cmd->add_option("--lambda", o.lambda)->required();
  atlas_cmd->add_option("--box", o.box, "x0,y0,x1,y1")->required();
  atlas_cmd->add_option("--res", o.res);
  atlas_cmd->add_option("--method", o.method);
  atlas_cmd->add_option("--out", o.out)->required();
  atlas_cmd->callback([&] { action = [&] { return spectrum_atlas(o); }; });

  auto* op = app.add_subcommand("op", "finite operators")->require_subcommand(1);
  auto* fl = op->add_subcommand("floquet", "periodic approximant spectrum");
  fl->add_option("--potential", o.potential)->required();
  fl->add_option("--lambda", o.lambda)->required();
  fl->add_option("--freq", o.freq, "p/q or p/q,p2/q2")->required();
  fl->add_option("--theta-grid", o.theta_grid);
  fl->add_option("--phi-grid", o.phi_grid);
  fl->add_option("--out", o.out)->required();
  fl->callback([&] { action = [&] { return op_floquet(o); }; });
  auto* wy = op->add_subcommand("weyl", "Weyl-sequence residuals");
  wy->add_option("--potential", o.potential, "default e^{2 pi i t}");
  wy->add_option("--z", o.z)->required();
  wy->add_option("--lambda", o.lambda)->required();
  wy->add_option("--alpha", o.alpha);
  wy->add_option("--theta", o.theta);
  wy->add_option("--nmax", o.nmax);
  wy->add_option("--out", o.out)->required();
  wy->callback([&] { action = [&] { return op_weyl(o); }; });
  auto* tr = op->add_subcommand("truncate", "eigenvalues of a finite section");
  tr->add_option("--potential", o.potential, "default e^{2 pi i t}");
  tr->add_option("--model", o.model, "dual | primal");
  tr->add_option("--lambda", o.lambda);
  tr->add_option("--alpha", o.alpha);
  tr->add_option("--theta", o.theta);
  tr->add_option("--omega", o.omega);
  tr->add_option("--range", o.range, "first:last, inclusive");
  tr->add_option("--out", o.out)->required();
  tr->callback([&] { action = [&] { return op_truncate(o); }; });

  auto* orc = app.add_subcommand("oracle", "closed-form spectra")->require_subcommand(1);
  auto* chk = orc->add_subcommand("check", "random-point agreement with the classifier");
  chk->add_option("--case", o.tag)->required();
  chk->add_option("--lambda", o.lambda)->required();
  chk->add_option("--samples", o.samples);
  chk->add_option("--seed", o.seed);
  chk->add_option("--g", o.g);
  chk->add_option("--res", o.res, "grid gap used for the tolerance tube");
  chk->add_option("--out", o.out);
  chk->callback([&] { action = [&] { return oracle_check(o); }; });

  auto* fr = app.add_subcommand("freq", "continued fractions")->require_subcommand(1);
  auto* ex = fr->add_subcommand("expand", "partial quotients and convergents");
  ex->add_option("--alpha", o.alpha)->required();
  ex->add_option("--terms", o.terms);
  ex->add_option("--out", o.out);
  ex->callback([&] { action = [&] { return freq_expand(o); }; });

  auto* gal = app.add_subcommand("gallery", "render a reference case by tag");
  gal->add_option("--case", o.tag)->required();
  gal->add_option("--lambda", o.lambda)->required();
  gal->add_option("--g", o.g);
  gal->add_option("--res", o.res);
  gal->add_option("--out", o.out, "default gallery/<case>");
  gal->callback([&] { action = [&] { return gallery(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(Status::Usage);
  }
  try {
    if (o.threads > 0) set_thread_count(o.threads);
    return static_cast<int>(action());
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(Status::Usage);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return static_cast<int>(Status::Numerical);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(Status::Numerical);
  }
}

}  // namespace atlas::cli

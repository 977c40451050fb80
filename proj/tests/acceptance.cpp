// Acceptance checks: one PASS/FAIL line per criterion. With an argument
// (AC1 ... AC8, AC3a, AC3b) only that criterion runs; the exit status is 0
// iff every criterion that ran passed.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gaugeforge/io.hpp"
#include "gaugeforge/reduction.hpp"
#include "support.hpp"

using namespace gaugeforge;
using namespace gaugeforge::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) { return format_double(x); }

std::string data(const std::string& name) { return std::string(GAUGEFORGE_DATA) + "/" + name; }

GrassmannPoint basis_point(int n, std::vector<int> idx) { return GrassmannPoint::from_exact(KVectorQ::basis(n, idx)); }

KVectorQ volume_form(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 1);
  return KVectorQ::basis(n, all);
}

// -- AC1 ---------------------------------------------------------------------

Outcome ac1() {
  Timer timer;
  std::mt19937_64 rng(1001);
  int bad = 0, chains = 0;
  for (int t = 0; t < 1000; ++t) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    int j = std::uniform_int_distribution<int>(0, std::min(3, n))(rng);
    int l = std::uniform_int_distribution<int>(0, std::min(3, n - j))(rng);
    int m = std::uniform_int_distribution<int>(0, std::min(3, n - j - l))(rng);
    auto a = random_kvector(n, j, rng), b = random_kvector(n, l, rng), c = random_kvector(n, m, rng);
    Rational sign((j * l) % 2 ? -1 : 1), hs((j * (n - j)) % 2 ? -1 : 1);
    if (!(wedge(a, b) - sign * wedge(b, a)).is_zero()) ++bad;
    if (!(wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).is_zero()) ++bad;
    if (!(hodge_star(hodge_star(a)) - hs * a).is_zero()) ++bad;
    auto a2 = random_kvector(n, j, rng);
    if (!(wedge(a, hodge_star(a2)) - inner(a, a2) * volume_form(n)).is_zero()) ++bad;
    int k = std::uniform_int_distribution<int>(1, std::min(3, n))(rng);
    MatrixQ f(n, k);
    for (int i = 0; i < n; ++i)
      for (int col = 0; col < k; ++col) f(i, col) = random_rational(rng);
    auto mm = minors(f);
    if (inner(mm, mm) - determinant(f.transposed() * f) != 0) ++bad;
    int cn = std::max(n, 2), ck = std::uniform_int_distribution<int>(2, std::min(3, cn))(rng);
    auto chain = random_chain(cn, ck, 3, rng);
    if (!boundary(boundary(chain)).empty()) ++bad;
    ++chains;
  }
  double s = timer.seconds();
  return {bad == 0 && s < 30, "1000 instances (n <= 6, k <= 3), " + std::to_string(bad) + " nonzero residuals, " +
                                  std::to_string(chains) + " chains, " + fmt(s) + " s"};
}

// -- AC2 ---------------------------------------------------------------------

Outcome ac2() {
  Timer timer;
  std::mt19937_64 rng(2002);
  int bad = 0, runs = 0;
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    int n = std::uniform_int_distribution<int>(2, 6)(rng);
    int k = std::uniform_int_distribution<int>(1, std::min(3, n - 1))(rng);
    auto eta = random_grassmann_point(n, k, rng);
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      ++runs;
      auto z = rational_simple_approx(eta, eps);
      double err = distance(to_double(z.vec()), eta.vec());
      worst = std::max(worst, err / eps);
      auto w = qnk_witness(z);
      if (!(err < eps) || !w.residual_zero || !(z.vec() - w.t * w.xi_f()).is_zero()) ++bad;
    }
  }
  double s = timer.seconds();
  return {bad == 0 && s < 60, std::to_string(runs) + " approximations, " + std::to_string(bad) +
                                  " failures, max |zeta - eta| / eps = " + fmt(worst) + ", " + fmt(s) + " s"};
}

// -- AC3 ---------------------------------------------------------------------

/// Area hull at 50 random points of G(n, k) over nested antipodal samples.
struct HullSweep {
  double max_error = 0;
  bool monotone = true;
  bool below = false;
};

HullSweep hull_sweep(int n, int k, std::size_t total) {
  auto area = Integrand::area(n, k);
  std::mt19937_64 rng(3003 + 10 * n + k);
  std::vector<GrassmannSample> samples;
  for (std::size_t half = total / 16; half <= total / 2; half *= 2) samples.push_back(GrassmannSample::antipodal(n, k, half, 77));
  HullSweep out;
  for (int i = 0; i < 50; ++i) {
    auto xi = random_grassmann_point(n, k, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      double v = conv_hull_value(area, xi.vec(), s).value;
      if (v > prev + 1e-12) out.monotone = false;
      if (v < 1 - 1e-12) out.below = true;
      prev = v;
    }
    out.max_error = std::max(out.max_error, prev - 1);
  }
  return out;
}

Outcome ac3a() {
  Timer timer;
  auto line = hull_sweep(2, 1, 512);
  bool pass = line.max_error <= 1e-3 && line.monotone && !line.below;
  std::string detail = "area hull on G(2,1), 50 points, 512 atoms: max |Conv - 1| = " + fmt(line.max_error) +
                       ", monotone over 64/128/256/512 atoms = " + (line.monotone ? "yes" : "no");
  for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}}) {
    auto s = hull_sweep(n, k, 512);
    detail += "; G(" + std::to_string(n) + "," + std::to_string(k) + ") max error " + fmt(s.max_error) +
              " (monotone " + (s.monotone ? "yes" : "no") + ", informational)";
  }
  detail += ", " + fmt(timer.seconds()) + " s";
  return {pass, detail};
}

/// e1 ^ (cos t e2 + sin t e3) in R^4.
GrassmannPoint slice_point(double t) {
  KVectorD v(4, 2);
  v.at(MultiIndex::from_entries(4, {1, 2})) = std::cos(t);
  v.at(MultiIndex::from_entries(4, {1, 3})) = std::sin(t);
  return GrassmannPoint(v);
}

/// Largest sampled gap F - Conv_F at the brute-force witness, with the LP
/// hull on the same atoms compared against the independent oracle.
struct GapWitness {
  double oracle_gap = -std::numeric_limits<double>::infinity();
  double lp_gap = 0;
  double disagreement = 0;
  double f_value = 0;
  std::size_t probes = 0;
};

GapWitness gap_witness(const Integrand& f) {
  std::mt19937_64 rng(3333);
  std::vector<GrassmannPoint> atoms, probes;
  for (int i = 0; i <= 16; ++i) atoms.push_back(slice_point(i * M_PI / 16));
  for (int i = 0; i < 8; ++i) atoms.push_back(random_grassmann_point(4, 2, rng));
  std::size_t half = atoms.size();
  for (std::size_t i = 0; i < half; ++i) atoms.push_back(-atoms[i]);
  for (int i = 0; i < 16; ++i) probes.push_back(slice_point((i + 0.5) * M_PI / 16));
  for (int i = 0; i < 8; ++i) probes.push_back(atoms[i * 3]);
  for (int i = 0; i < 8; ++i) probes.push_back(random_grassmann_point(4, 2, rng));
  auto sample = GrassmannSample::from_points(atoms);
  GapWitness w;
  for (const auto& xi : probes) {
    double oracle = brute_force_three_atoms(f, atoms, xi.vec());
    if (!std::isfinite(oracle)) continue;
    ++w.probes;
    double gap = f(xi) - oracle;
    if (gap > w.oracle_gap) {
      w.oracle_gap = gap;
      w.f_value = f(xi);
      w.lp_gap = f(xi) - conv_hull_value(f, xi.vec(), sample).value;
      w.disagreement = std::fabs(w.lp_gap - w.oracle_gap);
    }
  }
  return w;
}

Outcome ac3b() {
  Timer timer;
  // reversed dip: F = 1 - 0.9 (1 - |xi . w|) = 0.1 + 0.9 |xi . w|
  auto reversed = Integrand::linear_dip(-0.9, basis_point(4, {1, 2}));
  auto r = gap_witness(reversed);
  // strictly positive means beyond the relative polyconvexity tolerance,
  // not rounding noise
  bool pass = r.oracle_gap > kPolyconvexTolerance * r.f_value && r.disagreement <= 1e-6;
  std::string detail = "reversed dip (a = -0.9, n = 4, k = 2): witness gap " + fmt(r.oracle_gap) + " (needs > " +
                       fmt(kPolyconvexTolerance * r.f_value) + ")" + " over " +
                       std::to_string(r.probes) + " probes, LP gap " + fmt(r.lp_gap) + ", |LP - oracle| = " +
                       fmt(r.disagreement);
  if (!pass)
    detail += "; on G(4,2) this F equals 0.1|xi| + 0.9|<xi, e1^e2>|, a gauge, so no decomposition beats it";
  return {pass, detail + ", " + fmt(timer.seconds()) + " s"};
}

Outcome ac3b_info() {
  auto dip = Integrand::linear_dip(0.9, basis_point(4, {1, 2}));
  auto d = gap_witness(dip);
  bool ok = d.oracle_gap > kPolyconvexTolerance * d.f_value && d.disagreement <= 1e-6;
  return {ok, "dip a = +0.9 on the same atoms: witness gap " + fmt(d.oracle_gap) + ", |LP - oracle| = " +
                  fmt(d.disagreement)};
}

// -- AC4 ---------------------------------------------------------------------

Outcome ac4() {
  auto area = Integrand::area(3, 2);
  auto dec = load_decomposition(data("vplus.dec"), 3);
  // exact: sum m_i = sqrt 2, lhs = sqrt 2 - 1 = 1 * (sum m_i - 1)
  SqrtSum lhs, rhs;
  lhs.add(1, 2);
  lhs.add(-1, 1);
  rhs.add(1, 2);
  rhs.add(-1, 1);
  bool exact_zero = lhs == rhs;
  auto at1 = certify_upc_instance(area, 1.0, dec);
  auto at12 = certify_upc_instance(area, 1.2, dec);
  double expect = -0.2 * (std::sqrt(2.0) - 1);
  double err = std::fabs(at12.margin - expect);
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    double m = certify_upc_instance(area, 0.05 * i, dec).margin;
    if (m > prev) monotone = false;
    prev = m;
  }
  bool pass = exact_zero && at1.margin == 0 && at1.holds && !at12.holds && err <= 1e-12 && monotone;
  return {pass, "margin at c = 1: " + fmt(at1.margin) + " (exact identity " + (exact_zero ? "holds" : "fails") +
                    "); at c = 1.2: " + fmt(at12.margin) + " vs -0.2(sqrt2 - 1), error " + fmt(err) +
                    "; monotone over c in [0, 2]: " + (monotone ? "yes" : "no")};
}

// -- AC5 ---------------------------------------------------------------------

Outcome ac5() {
  Timer timer;
  int bad = 0, cubes = 0;
  std::mt19937_64 rng(5005);
  for (int n = 1; n <= 5; ++n)
    for (int k = 1; k <= std::min(3, n); ++k) {
      auto idx = basis_indices(n, k);
      for (const auto& i : {idx.front(), idx.back()}) {
        ++cubes;
        auto f = exact_orthonormal_factors(KVectorQ::basis(i));
        auto cube = unit_cube_chain(*f);
        auto g = gaussian_measure(cube);
        if (!(mass_exact(cube) == SqrtSum(Rational(1))) || g.atoms.size() != 1) ++bad;
        if (k >= 2 && hull_groups(boundary(cube)).size() != static_cast<std::size_t>(2 * k)) ++bad;
        if (k == 1 && boundary(cube).size() != 2) ++bad;
      }
    }
  int chains = 0;
  for (int t = 0; t < 100; ++t) {
    int n = std::uniform_int_distribution<int>(2, 5)(rng);
    int k = std::uniform_int_distribution<int>(1, std::min(3, n))(rng);
    auto c = random_reduced_chain(n, k, 3, rng);
    ++chains;
    SqrtSum m = mass_exact(c);
    auto g = gaussian_measure(c);
    if (!is_reduced(c) || !(g.total_variation_exact() == m)) ++bad;
    if (energy(Integrand::area(n, k), c) != mass(c)) ++bad;
  }
  return {bad == 0, std::to_string(cubes) + " unit cubes, " + std::to_string(chains) + " reduced chains, " +
                        std::to_string(bad) + " failures, " + fmt(timer.seconds()) + " s"};
}

// -- AC6 ---------------------------------------------------------------------

Outcome ac6() {
  Timer timer;
  // reversed dip 0.1 + 0.9 |xi . w|: cancelling pairs near w-orthogonal planes
  // add mass cheaply, so random search finds UPC(0.5) violations reliably
  auto dip = Integrand::linear_dip(-0.9, basis_point(4, {1, 2}));
  int certs = 0, bad = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t max_l = 0;
  for (int i = 0; i < 20; ++i) {
    SearchOptions opt;
    opt.seed = 600 + i;
    opt.restarts = 4;
    opt.atoms = 64;
    auto res = search_upc_violation(dip, 0.5, 4, 2, opt);
    if (!res.violation) {
      ++bad;
      continue;
    }
    const auto& dec = res.best;
    double excess = dec.sum_m() - 1;
    double critical = res.verdict.lhs / excess;
    for (auto [c1, c2] : std::vector<std::pair<double, double>>{{1, 0.5}, {1, 0.9}, {2, 1}}) {
      double s = std::max(1.0, 2 * critical / c2);
      try {
        auto in = ReductionInput::make(dip, c1 * s, c2 * s, dec);
        auto mt = build_mu_tilde(in);
        auto cert = verify_ledger(in, mt);
        ++certs;
        double need = 0.5 * (in.c1 - in.c2) * (cert.sum_m - 1) - 1e-8;
        min_slack = std::min(min_slack, cert.margin - need);
        max_l = std::max(max_l, mt.l_set.size());
        if (!cert.valid || cert.margin < need || !mt.identity_exact || !(mt.zeta_norm < mt.epsilon) ||
            mt.l_set.size() > 6)
          ++bad;
      } catch (const Error& e) {
        std::cerr << "AC6 instance " << i << ": " << e.what() << "\n";
        ++bad;
      }
    }
  }
  double s = timer.seconds();
  return {bad == 0 && certs == 60 && s < 120,
          std::to_string(certs) + " certificates from 20 reversed-dip violations, " + std::to_string(bad) +
              " failures, min (margin - bound) = " + fmt(min_slack) + ", max |L_set| = " + std::to_string(max_l) +
              ", " + fmt(s) + " s"};
}

// -- AC7 ---------------------------------------------------------------------

Outcome ac7() {
  std::string detail;
  bool pass = true;
  KVectorD e1(2, 1);
  e1[0] = 1;
  GrassmannPoint e(e1);
  for (auto [r, p] : std::vector<std::pair<double, double>>{{2, 5}, {3, 6}, {1.5, 4.2}}) {
    auto c = homogenization_nonconvexity_check(r, p, e);
    bool ok = c.relative_error < 1e-4 && c.negative && c.closed_form < 0;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "(" + fmt(r) + ", " + fmt(p) + "): closed " + fmt(c.closed_form) + ", fd " + fmt(c.finite_difference) +
              ", rel " + fmt(c.relative_error);
  }
  return {pass, detail};
}

// -- AC8 ---------------------------------------------------------------------

std::string capture(const std::string& args, int& status) {
  std::string cmd = std::string(GAUGEFORGE_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  if (!p) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

Outcome ac8() {
  auto dir = std::filesystem::temp_directory_path() / "gaugeforge_acceptance";
  std::filesystem::create_directories(dir);
  auto cube = (dir / "cube.chain").string();
  std::vector<std::string> commands{
      "algebra --n 4 --vec '1,2 = 1; 1,3 = 2' --vec2 '3,4 = 1/2'",
      "approx --n 3 --vec '1,2 = 0.6; 1,3 = 0.8' --eps 1e-3 --unit",
      "witness --n 4 --vec '1,2 = 0.6; 1,3 = 0.8' --eps 1e-2",
      "hull --integrand " + data("area.ig") + " --n 3 --vec '1,2 = 0.6; 1,3 = 0.8' --atoms 64 --antipodal",
      "polyconvex --integrand " + data("rdip.ig") + " --atoms 32 --probes 8 --antipodal",
      "upc-certify --integrand " + data("area.ig") + " --dec " + data("vplus.dec") + " --c 1.2",
      "upc-search --integrand " + data("dip.ig") + " --c 0.5 --restarts 4 --atoms 32",
      "chain --n 3 --vec '1,2 = 1' --subdivide 1 --write-chain " + cube,
      "chain --chain " + data("tent.chain") + " --compare " + data("tent.chain"),
      "ellipticity --integrand " + data("area.ig") + " --chain " + data("tent.chain") + " --chain2 " + cube +
          " --c 0.9",
      "reduce --integrand " + data("dip.ig") + " --dec " + data("viol.dec") + " --c1 1 --c2 0.5",
      "demo-nonconvex --r 1.5 --p 4.2 --n 3",
  };
  int same = 0, bad = 0;
  std::string differing;
  for (const auto& c : commands) {
    std::string args = c + " --seed 11";
    int s1 = 0, s2 = 0;
    auto a = capture(args, s1), b = capture(args, s2);
    if (a == b && s1 == s2 && !a.empty()) ++same;
    else {
      ++bad;
      differing += " [" + c.substr(0, c.find(' ')) + "]";
    }
  }
  return {bad == 0, std::to_string(same) + "/" + std::to_string(commands.size()) +
                        " commands byte-identical across two runs" + (bad ? ";" + differing : "")};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3a", ac3a}, {"AC3b", ac3b}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7},   {"AC8", ac8},
  };
  std::string only = argc > 1 ? argv[1] : "";
  bool all = true;
  int ran = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && id != only && id.rfind(only, 0) != 0) continue;
    ++ran;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
    if (id == "AC3b") {
      auto info = ac3b_info();
      std::cout << "AC3b INFO " << info.detail << std::endl;
    }
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all ? 0 : 1;
}

// gaugeforge: command-line access to the library. One structured report
// per run on stdout (or --output); domain errors become error blocks with
// a nonzero exit status.

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaugeforge/io.hpp"
#include "gaugeforge/reduction.hpp"
#include "gaugeforge/report.hpp"

using namespace gaugeforge;

namespace {

struct Options {
  std::string input, input2, vec, vec2, frame;
  std::string integrand, dec, chain, chain2, compare, oracle_chain;
  std::string output, write_chain, write_dec;
  std::string c = "1", c1 = "1", c2 = "0.5";
  int n = 0, atoms = kDefaultSearchAtoms, restarts = kDefaultRestarts, probes = 0, subdivide = 0;
  double eps = 1e-3, tol = kPolyconvexTolerance, mass_cap = kDefaultMassCap, r = 2, p = 5;
  std::optional<double> sup;
  std::uint64_t seed = 0;
  bool antipodal = false, unit = false;
};

template <class S>
void put_kvector(Section& s, const std::string& key, const KVector<S>& a) {
  auto& sec = s.section(key);
  sec.set("n", a.n());
  sec.set("k", a.k());
  auto& c = sec.section("coords");
  bool any = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ScalarTraits<S>::is_zero(a[i])) continue;
    any = true;
    c.set(a.index(i).str(), a[i]);
  }
  if (!any) sec.set("zero", true);
}

void put_point(Section& s, const std::string& key, const GrassmannPoint& p) {
  if (p.exact()) put_kvector(s, key, *p.exact());
  else put_kvector(s, key, p.vec());
}

template <class S>
std::string csv(const std::vector<S>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<S, double>) out += format_double(v[i]);
    else out += v[i].get_str();
  }
  return out;
}

void put_tolerances(Section& s, const Options& o) {
  auto& t = s.section("tolerances");
  t.set("tau_unit", kUnitTolerance);
  t.set("tau_rank", kRankTolerance);
  t.set("tau_dec", kDecompositionTolerance);
  t.set("tau_margin", "1e-9 * (1 + |lhs|)");
  t.set("polyconvex_tol", o.tol);
  t.set("integrand_floor", kIntegrandFloor);
  t.set("atom_merge", kAtomTolerance);
  t.set("ledger_slack", kLedgerSlack);
  t.set("sup_safety_factor", kSupSafetyFactor);
  t.set("boundary_forms", kFormCount);
  t.set("boundary_form_degree", kFormDegree);
}

/// Every option of the subcommand with its resolved value.
void put_config(Section& s, CLI::App* sub) {
  auto& c = s.section("config");
  c.set("command", sub->get_name());
  for (const CLI::Option* o : sub->get_options()) {
    std::string name = o->get_name();
    if (name.empty() || o == sub->get_help_ptr()) continue;
    while (!name.empty() && name.front() == '-') name.erase(0, 1);
    std::string value;
    if (o->get_type_size() == 0) {
      value = o->count() ? "true" : "false";
    } else if (o->count()) {
      for (const auto& r : o->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = o->get_default_str();
      if (value.empty()) value = "unset";
    }
    c.set(name, value);
  }
}

// -- input helpers -----------------------------------------------------------

ParsedKVector read_kvector(const std::string& text, const std::string& path, const std::string& frame, int n,
                           const char* what) {
  if (n <= 0) throw ArgumentError("--n is required");
  int given = !text.empty() + !path.empty() + !frame.empty();
  if (given != 1) throw ArgumentError(std::string("give exactly one source for ") + what);
  if (!frame.empty()) {
    std::vector<VectorQ> rows;
    for (const auto& row : io_detail::split(frame, ';')) {
      VectorQ v;
      for (const auto& x : io_detail::split(row, ',')) v.push_back(parse_rational(x));
      if (static_cast<int>(v.size()) != n) throw ArgumentError("frame vector has wrong length");
      rows.push_back(std::move(v));
    }
    KVectorQ w = wedge_all<Rational>(n, rows);
    return {to_double(w), w};
  }
  return parse_kvector(path.empty() ? text : read_text_file(path), n);
}

GrassmannPoint read_point(const Options& o) {
  auto p = read_kvector(o.vec, o.input, o.frame, o.n, "the point");
  if (!o.frame.empty() && !(inner(*p.exact, *p.exact) == 1)) return GrassmannPoint::normalized(p.value);
  return to_grassmann_point(p);
}

Rational exact_flag(const std::string& s) { return parse_rational(s); }

// -- commands ----------------------------------------------------------------

int cmd_algebra(const Options& o, Report& rep) {
  auto a = read_kvector(o.vec, o.input, o.frame, o.n, "the first k-vector");
  auto& res = rep.section("result");
  res.set("exact", a.exact.has_value());
  if (a.exact) {
    const auto& q = *a.exact;
    put_kvector(res, "value", q);
    res.set("inner_self", inner(q, q));
    res.set("norm", norm(q));
    if (!q.is_zero()) {
      auto basis = associated_space(q);
      res.set("simple", static_cast<int>(basis.size()) == q.k());
      auto& as = res.section("associated_space");
      as.set("dimension", static_cast<int>(basis.size()));
      for (std::size_t i = 0; i < basis.size(); ++i) as.set("v" + std::to_string(i + 1), csv(basis[i]));
    } else {
      res.set("simple", true);
    }
    put_kvector(res, "hodge_star", hodge_star(q));
    put_kvector(res, "hodge_star_twice", hodge_star(hodge_star(q)));
  } else {
    const auto& d = a.value;
    put_kvector(res, "value", d);
    res.set("norm", norm(d));
    if (!d.is_zero()) {
      auto basis = associated_space(d);
      res.set("simple", static_cast<int>(basis.size()) == d.k());
      res.section("associated_space").set("dimension", static_cast<int>(basis.size()));
    }
    put_kvector(res, "hodge_star", hodge_star(d));
  }
  if (!o.vec2.empty() || !o.input2.empty()) {
    auto b = read_kvector(o.vec2, o.input2, "", o.n, "the second k-vector");
    auto& two = res.section("with_second");
    if (a.exact && b.exact) {
      put_kvector(two, "second", *b.exact);
      if (a.exact->k() == b.exact->k()) two.set("inner", inner(*a.exact, *b.exact));
      if (a.exact->k() + b.exact->k() <= o.n) put_kvector(two, "wedge", wedge(*a.exact, *b.exact));
    } else {
      put_kvector(two, "second", b.value);
      if (a.value.k() == b.value.k()) two.set("inner", inner(a.value, b.value));
      if (a.value.k() + b.value.k() <= o.n) put_kvector(two, "wedge", wedge(a.value, b.value));
    }
  }
  return 0;
}

void put_witness(Section& s, const QnkWitness& w) {
  auto& sec = s.section("witness");
  auto& f = sec.section("f");
  for (std::size_t i = 0; i < w.f.size(); ++i) f.set("row" + std::to_string(i + 1), csv(w.f[i]));
  sec.set("t", w.t);
  sec.set("scale_m", w.scale_m.get_str());
  sec.set("orientation_s", w.orientation_s);
  put_kvector(sec, "xi_f", w.xi_f());
  sec.set("residual_zero", w.residual_zero);
  sec.set("closed_form_match", w.closed_form_match);
  sec.set("kernel_match", w.kernel_match);
}

void put_factors(Section& s, const RationalSimpleVector& z) {
  auto& f = s.section("factors");
  for (std::size_t i = 0; i < z.factors().size(); ++i) f.set("v" + std::to_string(i + 1), csv(z.factors()[i]));
}

int cmd_approx(const Options& o, Report& rep) {
  GrassmannPoint eta = read_point(o);
  if (!(o.eps > 0)) throw ArgumentError("--eps must be positive");
  RationalSimpleVector z = o.unit ? rational_unit_approx(eta, o.eps) : rational_simple_approx(eta, o.eps);
  auto& res = rep.section("result");
  put_point(res, "eta", eta);
  put_kvector(res, "zeta", z.vec());
  put_factors(res, z);
  double err = distance(to_double(z.vec()), eta.vec());
  res.set("error", err);
  res.set("within_eps", err < o.eps);
  res.set("max_denominator", max_denominator(z.vec()).get_str());
  res.set("zeta_unit_exact", inner(z.vec(), z.vec()) == 1);
  put_witness(res, qnk_witness(z));
  return 0;
}

int cmd_witness(const Options& o, Report& rep) {
  auto a = read_kvector(o.vec, o.input, o.frame, o.n, "the k-vector");
  auto& res = rep.section("result");
  RationalSimpleVector z;
  if (a.exact) {
    z = factor_simple(*a.exact);
    res.set("source", "exact");
  } else {
    GrassmannPoint eta = GrassmannPoint::normalized(a.value);
    z = rational_simple_approx(eta, o.eps);
    res.set("source", "approximated");
    res.set("error", distance(to_double(z.vec()), eta.vec()));
  }
  put_kvector(res, "zeta", z.vec());
  put_factors(res, z);
  put_witness(res, qnk_witness(z));
  return 0;
}

GrassmannSample make_sample(const Integrand& f, const Options& o) {
  if (o.atoms <= 0) throw ArgumentError("--atoms must be positive");
  return o.antipodal ? GrassmannSample::antipodal(f.n(), f.k(), o.atoms, o.seed)
                     : GrassmannSample::uniform(f.n(), f.k(), o.atoms, o.seed);
}

void put_integrand(Section& s, const Integrand& f) {
  auto& sec = s.section("integrand");
  sec.set("kind", to_string(f.kind()));
  sec.set("n", f.n());
  sec.set("k", f.k());
  for (const auto& [k, v] : f.params()) sec.set("param." + k, v);
  if (f.lip()) sec.set("lip", *f.lip());
  sec.set("lip_estimated", f.lip_estimated());
  if (f.declared_sup()) sec.set("sup", *f.declared_sup());
  if (f.kind() == IntegrandKind::tabulated) {
    sec.set("table_size", static_cast<unsigned long>(f.table().size()));
    sec.set("clipped", f.clipped_count());
  }
}

void put_hull(Section& s, const HullResult<double>& h, const GrassmannSample& sample) {
  s.set("value", h.value);
  s.set("lp_iterations", h.lp_iterations);
  auto& sup = s.section("support");
  sup.set("size", static_cast<unsigned long>(h.support.size()));
  for (std::size_t i = 0; i < h.support.size(); ++i) {
    auto& a = sup.section("atom" + std::to_string(i + 1));
    a.set("index", static_cast<unsigned long>(h.support[i].first));
    a.set("mass", h.support[i].second);
    a.set("eta", format_kvector_inline(sample.points[h.support[i].first].vec()));
  }
}

int cmd_hull(const Options& o, Report& rep) {
  Integrand f = load_integrand(o.integrand);
  put_integrand(rep, f);
  Options po = o;
  po.n = f.n();
  auto xi = read_kvector(o.vec, o.input, o.frame, po.n, "the hull target");
  if (xi.value.k() != f.k()) throw ArgumentError("hull target has the wrong degree");
  auto sample = make_sample(f, o);
  auto& res = rep.section("result");
  res.set("sample_size", static_cast<unsigned long>(sample.size()));
  res.set("sample_scheme", to_string(sample.scheme));
  auto h = conv_hull_value(f, xi.value, sample);
  put_hull(res, h, sample);
  if (std::fabs(norm(xi.value) - 1.0) <= kUnitTolerance && is_simple(xi.value)) {
    double fx = f(xi.value);
    res.set("f_value", fx);
    res.set("gap", fx - h.value);
  }
  return 0;
}

int cmd_polyconvex(const Options& o, Report& rep) {
  Integrand f = load_integrand(o.integrand);
  put_integrand(rep, f);
  auto sample = make_sample(f, o);
  std::vector<GrassmannPoint> probes;
  if (o.probes > 0) probes = GrassmannSample::uniform(f.n(), f.k(), o.probes, o.seed + 1).points;
  auto pr = is_polyconvex_report(f, sample, o.tol, o.probes > 0 ? &probes : nullptr);
  auto& res = rep.section("result");
  res.set("sample_size", static_cast<unsigned long>(sample.size()));
  res.set("tested", static_cast<unsigned long>(pr.tested));
  res.set("max_gap", pr.max_gap);
  res.set("max_relative_gap", pr.max_relative_gap);
  res.set("violation", pr.violation);
  auto& w = res.section("witness");
  w.set("index", static_cast<unsigned long>(pr.witness));
  w.set("point", format_kvector_inline(pr.witness_point));
  w.set("f_value", pr.witness_value);
  put_hull(w, pr.witness_decomposition, sample);
  return 0;
}

void put_verdict(Section& s, const UPCVerdict& v) {
  s.set("c", v.c);
  s.set("sum_m", v.sum_m);
  s.set("lhs", v.lhs);
  s.set("rhs", v.rhs);
  s.set("margin", v.margin);
  s.set("tau_margin", v.tau_margin);
  s.set("residual", v.residual);
  s.set("exact", v.exact);
  if (v.exact) {
    s.set("lhs_exact", *v.lhs_exact);
    s.set("rhs_exact", *v.rhs_exact);
    s.set("margin_exact", *v.margin_exact);
  }
  s.set("holds", v.holds);
}

void put_decomposition(Section& s, const Decomposition& dec) {
  auto& sec = s.section("decomposition");
  sec.set("n", dec.n());
  sec.set("k", dec.k());
  sec.set("d", static_cast<unsigned long>(dec.d()));
  sec.set("eta0", format_point(dec.eta0));
  for (std::size_t i = 0; i < dec.atoms.size(); ++i) {
    auto& a = sec.section("atom" + std::to_string(i + 1));
    const auto& at = dec.atoms[i];
    if (at.m_exact) a.set("m", *at.m_exact);
    else a.set("m", at.m);
    a.set("eta", format_point(at.eta));
  }
}

int cmd_upc_certify(const Options& o, Report& rep) {
  Integrand f = load_integrand(o.integrand);
  put_integrand(rep, f);
  Decomposition dec = load_decomposition(o.dec, f.n());
  put_decomposition(rep, dec);
  auto v = certify_upc_instance(f, parse_double(o.c), dec, exact_flag(o.c));
  put_verdict(rep.section("result"), v);
  return 0;
}

int cmd_upc_search(const Options& o, Report& rep) {
  Integrand f = load_integrand(o.integrand);
  put_integrand(rep, f);
  SearchOptions so{o.restarts, o.atoms, o.seed, o.mass_cap};
  auto sr = search_upc_violation(f, parse_double(o.c), f.n(), f.k(), so);
  auto& res = rep.section("result");
  res.set("violation", sr.violation);
  res.set("best_restart", sr.best_restart);
  double worst = sr.restart_margins.empty() ? 0 : sr.restart_margins[0];
  for (double m : sr.restart_margins) worst = std::min(worst, m);
  res.set("best_lp_margin", worst);
  put_verdict(res.section("verdict"), sr.verdict);
  put_decomposition(res, sr.best);
  if (!o.write_dec.empty()) {
    std::ofstream out(o.write_dec, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + o.write_dec + "'");
    out << format_decomposition(sr.best);
  }
  return 0;
}

void put_gaussian(Section& s, const GaussianMeasure& g) {
  auto& sec = s.section("gaussian_measure");
  sec.set("atoms", static_cast<unsigned long>(g.atoms.size()));
  sec.set("reduced_input", g.reduced_input);
  sec.set("total_variation_exact", g.total_variation_exact().str());
  sec.set("total_variation", g.total_variation_exact().to_double());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    auto& a = sec.section("atom" + std::to_string(i + 1));
    a.set("direction", format_kvector_inline(g.atoms[i].direction));
    a.set("weight_exact", g.atoms[i].weight.str());
    a.set("weight", g.atoms[i].weight.to_double());
    a.set("point", format_point(g.atoms[i].point));
  }
}

void write_chain_file(const std::string& path, const PolyhedralChain& t) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << format_chain(t);
}

void put_comparison(Section& s, const std::string& key, const BoundaryComparison& b) {
  auto& sec = s.section(key);
  sec.set("equal", b.equal);
  sec.set("exact", b.exact);
  sec.set("downgraded", b.downgraded);
  sec.set("method", b.method);
  if (!b.exact) {
    sec.set("forms", b.forms);
    sec.set("degree", b.degree);
  }
}

int cmd_chain(const Options& o, Report& rep) {
  PolyhedralChain t;
  if (!o.chain.empty()) {
    if (!o.vec.empty() || !o.input.empty() || !o.frame.empty()) throw ArgumentError("give either --chain or a cube plane");
    t = load_chain(o.chain);
  } else {
    auto a = read_kvector(o.vec, o.input, o.frame, o.n, "the cube plane");
    if (!a.exact) throw ArgumentError("cube plane must be rational");
    auto f = exact_orthonormal_factors(*a.exact);
    if (!f) throw ArgumentError("cube plane has no exact orthonormal frame");
    t = unit_cube_chain(*f);
  }
  if (o.subdivide < 0) throw ArgumentError("--subdivide must be nonnegative");
  for (int i = 0; i < o.subdivide; ++i) t = barycentric_subdivision(t);
  write_chain_file(o.write_chain, t);

  auto& res = rep.section("result");
  res.set("n", t.n());
  res.set("k", t.k());
  res.set("terms", static_cast<unsigned long>(t.size()));
  PolyhedralChain nf = normal_form(t);
  res.set("normal_form_terms", static_cast<unsigned long>(nf.size()));
  res.set("reduced", t.k() >= 1 && is_reduced(nf));
  if (t.k() >= 1 && (t.k() <= 3 || is_reduced(nf))) {
    SqrtSum m = mass_exact(t);
    res.set("mass_exact", m.str());
    res.set("mass", mass(t));
    put_gaussian(res, gaussian_measure(t));
  }
  if (t.k() >= 1) {
    PolyhedralChain b = normal_form(boundary(t));
    auto& bs = res.section("boundary");
    bs.set("terms", static_cast<unsigned long>(b.size()));
    bs.set("hull_groups", static_cast<unsigned long>(hull_groups(b).size()));
    bs.set("boundary_of_boundary_zero", t.k() < 2 || normal_form(boundary(b)).empty());
    if (b.k() >= 1 && (b.k() <= 3 || is_reduced(b))) bs.set("mass_exact", mass_exact(b).str());
  }
  if (!o.compare.empty()) {
    PolyhedralChain u = load_chain(o.compare);
    put_comparison(res, "boundary_comparison", boundary_equal(t, u, o.seed));
  }
  return 0;
}

int cmd_ellipticity(const Options& o, Report& rep) {
  Integrand f = load_integrand(o.integrand);
  put_integrand(rep, f);
  PolyhedralChain s = load_chain(o.chain), d = load_chain(o.chain2);
  auto e = check_ellipticity_instance(f, parse_double(o.c), s, d);
  auto& res = rep.section("result");
  res.set("c", e.c);
  res.set("energy_s", e.energy_s);
  res.set("energy_d", e.energy_d);
  res.set("mass_s", e.mass_s);
  res.set("mass_d", e.mass_d);
  res.set("lhs", e.lhs);
  res.set("rhs", e.rhs);
  res.set("margin", e.margin);
  res.set("degenerate", e.degenerate);
  res.set("holds", e.holds);
  put_comparison(res, "boundary_comparison", e.boundary);
  return 0;
}

void put_mu_tilde(Section& s, const MuTilde& mt) {
  auto& sec = s.section("mu_tilde");
  sec.set("epsilon", mt.epsilon);
  sec.set("eta0_tilde", format_kvector_inline(mt.eta0_tilde.vec()));
  sec.set("eta0_tolerance", mt.eta0_tolerance);
  sec.set("eta0_error", mt.eta0_error);
  for (std::size_t i = 0; i < mt.atoms_tilde.size(); ++i) {
    auto& a = sec.section("atom" + std::to_string(i + 1));
    a.set("m_tilde", mt.atoms_tilde[i].first);
    a.set("eta_tilde", format_kvector_inline(mt.atoms_tilde[i].second.vec()));
    a.set("tolerance", mt.atom_tolerances[i]);
    a.set("error", mt.atom_errors[i]);
  }
  sec.set("zeta", format_kvector_inline(mt.zeta));
  sec.set("zeta_norm", mt.zeta_norm);
  std::string l;
  for (const auto& lam : mt.l_set) l += (l.empty() ? "" : " ") + lam.str();
  sec.set("l_set", l.empty() ? std::string("none") : l);
  sec.set("l_set_size", static_cast<unsigned long>(mt.l_set.size()));
  sec.set("sum_m_tilde", mt.sum_m_tilde);
  sec.set("sum_m_lambda", mt.sum_m_lambda);
  sec.set("identity_exact", mt.identity_exact);
  sec.set("rounding_note", "m_i replaced by its exact dyadic value; the difference is folded into zeta");
}

int cmd_reduce(const Options& o, Report& rep) {
  Integrand f = load_integrand(o.integrand);
  put_integrand(rep, f);
  Decomposition dec = load_decomposition(o.dec, f.n());
  put_decomposition(rep, dec);
  auto in = ReductionInput::make(f, parse_double(o.c1), parse_double(o.c2), dec, o.sup, o.seed);
  auto& inp = rep.section("input");
  inp.set("lip", in.lip);
  inp.set("sup", in.sup);
  inp.set("sup_estimated", in.sup_estimated);
  inp.set("c1", in.c1);
  inp.set("c2", in.c2);
  put_verdict(inp.section("violation_at_c2"), in.verdict);
  auto mt = build_mu_tilde(in);
  put_mu_tilde(rep, mt);
  auto tv = mu_tilde_tv(in, mt);
  auto& tvs = rep.section("tv_mu_tilde_mu");
  tvs.set("actual", tv.actual);
  tvs.set("bound", tv.bound);
  PolyhedralChain d_tilde = cube_at(mt);
  write_chain_file(o.write_chain, d_tilde);

  std::optional<PolyhedralChain> a;
  std::optional<AtomicGrassmannMeasure> gamma;
  if (!o.oracle_chain.empty()) {
    a = load_chain(o.oracle_chain);
    gamma = gaussian_measure(*a).to_atomic();
  }
  auto cert = verify_ledger(in, mt, gamma ? &*gamma : nullptr);
  auto& c = rep.section("certificate");
  c.set("epsilon", cert.epsilon);
  c.set("binomial", cert.binom);
  c.set("sqrt_binomial", cert.sqrt_binom);
  c.set("sum_m", cert.sum_m);
  c.set("est1_bound", cert.est1_bound);
  if (cert.est1_actual) c.set("est1_actual", *cert.est1_actual);
  if (cert.tv_gamma_mu) c.set("tv_gamma_mu", *cert.tv_gamma_mu);
  c.set("est2_actual", cert.est2_actual);
  c.set("est2_computed", cert.est2_computed);
  c.set("est2_cs", cert.est2_cs);
  c.set("est2_bound", cert.est2_bound);
  c.set("est3_actual", cert.est3_actual);
  c.set("est3_bound", cert.est3_bound);
  c.set("upper", cert.upper);
  c.set("upper_realized", cert.upper_realized);
  c.set("lower", cert.lower);
  c.set("margin", cert.margin);
  c.set("expected_margin", cert.expected_margin);
  c.set("zeta_norm", cert.zeta_norm);
  c.set("l_set_size", static_cast<unsigned long>(cert.l_set_size));
  c.set("sum_m_lambda", cert.sum_m_lambda);
  c.set("identity_exact", cert.identity_exact);
  auto& ch = c.section("checks");
  for (const auto& [name, ok] : cert.checks) ch.set(name, ok);
  if (cert.direct_margin) {
    auto& d = c.section("direct_aue");
    d.set("lhs", *cert.direct_lhs);
    d.set("rhs", *cert.direct_rhs);
    d.set("margin", *cert.direct_margin);
  }
  c.set("valid", cert.valid);
  if (a) {
    auto orep = verify_oracle_chain(*a, d_tilde, mt);
    auto& os = rep.section("oracle");
    put_comparison(os, "boundary", orep.boundary);
    os.set("tv", orep.tv);
    os.set("epsilon", orep.epsilon);
    os.set("boundary_holds", orep.boundary_holds);
    os.set("tv_holds", orep.tv_holds);
    os.set("both_hold", orep.both_hold());
  }
  return cert.valid ? 0 : exit_code_for("certificate-failure");
}

int cmd_demo_nonconvex(const Options& o, Report& rep) {
  int n = o.n > 0 ? o.n : 2;
  GrassmannPoint e(KVectorD::basis(n, {1}));
  auto chk = homogenization_nonconvexity_check(o.r, o.p, e);
  auto& res = rep.section("result");
  res.set("r", chk.r);
  res.set("p", chk.p);
  res.set("threshold", (1 + chk.r) * (1 + chk.r) / chk.r);
  res.set("closed_form", chk.closed_form);
  res.set("finite_difference", chk.finite_difference);
  res.set("relative_error", chk.relative_error);
  res.set("step", chk.step);
  res.set("negative", chk.negative);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaugeforge: exterior algebra, polyconvexity and polyhedral chains"};
  app.require_subcommand(1);
  Options o;

  auto point_opts = [&](CLI::App* s) {
    s->add_option("--n", o.n, "ambient dimension");
    s->add_option("--vec", o.vec, "k-vector terms, e.g. \"1,2 = 3/5; 3,4 = 4/5\"");
    s->add_option("--input", o.input, "file with k-vector terms");
    s->add_option("--frame", o.frame, "rational vectors \"a,b,c;d,e,f\" whose wedge is the input");
  };
  auto common = [&](CLI::App* s) {
    s->add_option("--output", o.output, "write the report here instead of stdout");
    s->add_option("--seed", o.seed, "random seed")->default_val(0);
  };
  std::vector<std::pair<CLI::App*, std::function<int(const Options&, Report&)>>> cmds;
  auto add = [&](const char* name, const char* help, std::function<int(const Options&, Report&)> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    common(s);
    cmds.emplace_back(s, std::move(fn));
    return s;
  };

  auto* algebra = add("algebra", "wedge, Hodge star, inner product, simplicity, associated space", cmd_algebra);
  point_opts(algebra);
  algebra->add_option("--vec2", o.vec2, "second k-vector terms");
  algebra->add_option("--input2", o.input2, "file with the second k-vector");

  auto* approx = add("approx", "rational simple approximation of a unit simple k-vector", cmd_approx);
  point_opts(approx);
  approx->add_option("--eps", o.eps, "approximation radius")->default_val(1e-3);
  approx->add_flag("--unit", o.unit, "return an exactly unit approximant");

  auto* witness = add("witness", "integer-kernel witness of a rational simple k-vector", cmd_witness);
  point_opts(witness);
  witness->add_option("--eps", o.eps, "approximation radius for decimal input")->default_val(1e-3);

  auto* hull = add("hull", "convex positively homogeneous hull value at a k-vector", cmd_hull);
  point_opts(hull);
  hull->add_option("--integrand", o.integrand, "integrand file")->required();
  hull->add_option("--atoms", o.atoms, "sample size")->default_val(kDefaultSearchAtoms);
  hull->add_flag("--antipodal", o.antipodal, "close the sample under xi -> -xi");

  auto* poly = add("polyconvex", "largest sampled polyconvexity gap", cmd_polyconvex);
  poly->add_option("--integrand", o.integrand, "integrand file")->required();
  poly->add_option("--atoms", o.atoms, "sample size")->default_val(kDefaultSearchAtoms);
  poly->add_option("--probes", o.probes, "independent probe points (0: the sample itself)")->default_val(0);
  poly->add_option("--tol", o.tol, "relative gap tolerance")->default_val(kPolyconvexTolerance);
  poly->add_flag("--antipodal", o.antipodal, "close the sample under xi -> -xi");

  auto* cert = add("upc-certify", "check the UPC(c) inequality on a decomposition", cmd_upc_certify);
  cert->add_option("--integrand", o.integrand, "integrand file")->required();
  cert->add_option("--dec", o.dec, "decomposition file")->required();
  cert->add_option("--c", o.c, "constant c")->default_val("1");

  auto* search = add("upc-search", "search for a UPC(c) violation", cmd_upc_search);
  search->add_option("--integrand", o.integrand, "integrand file")->required();
  search->add_option("--c", o.c, "constant c")->default_val("1");
  search->add_option("--restarts,--budget", o.restarts, "number of restarts")->default_val(kDefaultRestarts);
  search->add_option("--atoms", o.atoms, "atoms per restart")->default_val(kDefaultSearchAtoms);
  search->add_option("--mass-cap", o.mass_cap, "upper bound on sum m_i")->default_val(kDefaultMassCap);
  search->add_option("--write-dec", o.write_dec, "write the best decomposition here");

  auto* chain = add("chain", "mass, Gaussian measure, boundary and refinement of a chain", cmd_chain);
  point_opts(chain);
  chain->add_option("--chain", o.chain, "chain file (otherwise the unit cube on --vec/--frame)");
  chain->add_option("--subdivide", o.subdivide, "barycentric subdivisions to apply")->default_val(0);
  chain->add_option("--compare", o.compare, "chain file whose boundary is compared");
  chain->add_option("--write-chain", o.write_chain, "write the resulting chain here");

  auto* ell = add("ellipticity", "energy excess against mass excess for a test pair", cmd_ellipticity);
  ell->add_option("--integrand", o.integrand, "integrand file")->required();
  ell->add_option("--chain", o.chain, "chain S")->required();
  ell->add_option("--chain2", o.chain2, "unit cube chain D")->required();
  ell->add_option("--c", o.c, "constant c")->default_val("1");

  auto* red = add("reduce", "contradiction certificate from a UPC(c2) violation", cmd_reduce);
  red->add_option("--integrand", o.integrand, "integrand file")->required();
  red->add_option("--dec", o.dec, "decomposition violating UPC(c2)")->required();
  red->add_option("--c1", o.c1, "ellipticity constant c1")->default_val("1");
  red->add_option("--c2", o.c2, "polyconvexity constant c2")->default_val("0.5");
  red->add_option("--sup", o.sup, "upper bound for F (default: declared or sampled)");
  red->add_option("--oracle-chain", o.oracle_chain, "external chain A to check against mu-tilde");
  red->add_option("--write-chain", o.write_chain, "write the cube chain D-tilde here");

  auto* demo = add("demo-nonconvex", "second derivative of an homogenized convex function", cmd_demo_nonconvex);
  demo->add_option("--r", o.r, "offset r > 1")->default_val(2);
  demo->add_option("--p", o.p, "exponent p > (1+r)^2/r")->default_val(5);
  demo->add_option("--n", o.n, "ambient dimension")->default_val(2);

  Report rep;
  int status = 0;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    rep.set("status", "error");
    status = add_error_block(rep, ArgumentError(e.what()));
    std::cout << rep.str();
    return status;
  }

  for (auto& [sub, fn] : cmds) {
    if (!sub->parsed()) continue;
    rep.set("command", sub->get_name());
    put_config(rep, sub);
    put_tolerances(rep, o);
    Report body;
    try {
      status = fn(o, body);
      rep.set("status", status == 0 ? "ok" : "failed");
    } catch (const Error& e) {
      rep.set("status", "error");
      status = add_error_block(body, e);
    } catch (const std::exception& e) {
      rep.set("status", "error");
      status = add_error_block(body, InternalConsistencyError(e.what()));
    }
    rep.set("exit_code", status);
    std::string text = rep.str() + body.str();
    if (o.output.empty()) {
      std::cout << text;
      return status;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << o.output << "'\n";
      return exit_code_for("argument");
    }
    out << text;
    return status;
  }
  return 1;
}

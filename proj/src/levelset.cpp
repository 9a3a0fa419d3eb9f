#include "dq/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dq {

namespace {

struct AffinePiece {
  Interval dom;
  Rat m, q;  // x -> m x + q
};

Rat piece_slope(const PieceSpec& s) {
  return s.kind == PieceSpec::Kind::Constant ? Rat(0) : rat_from_double(s.slope);
}

Rat piece_offset(const PieceSpec& s) {
  if (s.kind == PieceSpec::Kind::Affine) return rat_from_double(s.intercept);
  if (s.value_exact) return *s.value_exact;
  double v = s.value.to_double();
  if (!std::isfinite(v))
    throw std::invalid_argument("levelset: piece value overflows doubles");
  return rat_from_double(v);
}

std::vector<AffinePiece> affine_pieces_on(const PiecewiseFunction& f,
                                          const IntervalUnion& A) {
  std::vector<AffinePiece> out;
  for (const auto& p : f.pieces()) {
    IntervalUnion clipped = A.intersect(p.dom);
    for (const auto& part : clipped.parts())
      out.push_back(AffinePiece{part, piece_slope(p.spec), piece_offset(p.spec)});
  }
  std::sort(out.begin(), out.end(),
            [](const AffinePiece& a, const AffinePiece& b) { return a.dom.lo < b.dom.lo; });
  return out;
}

using Vert = std::pair<Rat, Rat>;

std::vector<Vert> clip_halfplane(const std::vector<Vert>& poly, const Rat& A, const Rat& B,
                                 const Rat& C) {
  std::vector<Vert> out;
  const size_t n = poly.size();
  if (n == 0) return out;
  // explicit Rat return: gmpxx expression templates must not escape
  auto side = [&](const Vert& v) -> Rat { return A * v.first + B * v.second + C; };
  for (size_t k = 0; k < n; ++k) {
    const Vert& P = poly[k];
    const Vert& Q = poly[(k + 1) % n];
    Rat dP = side(P), dQ = side(Q);
    bool inP = dP >= 0, inQ = dQ >= 0;
    if (inP) out.push_back(P);
    if (inP != inQ) {
      Rat t = dP / (dP - dQ);
      out.emplace_back(P.first + t * (Q.first - P.first),
                       P.second + t * (Q.second - P.second));
    }
  }
  // drop consecutive duplicates from degenerate cuts
  std::vector<Vert> dedup;
  for (const auto& v : out) {
    if (dedup.empty() || dedup.back() != v) dedup.push_back(v);
  }
  if (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return dedup;
}

}  // namespace

ConvexCell clip_band_cell(const Interval& X, const Interval& Y, const Rat& mL,
                          const Rat& qL, const Rat& mR, const Rat& qR, const Rat& q_lo,
                          const Rat& q_hi) {
  std::vector<Vert> poly{{X.lo, Y.lo}, {X.hi, Y.lo}, {X.hi, Y.hi}, {X.lo, Y.hi}};
  // q_lo (y - x) <= (mR y + qR) - (mL x + qL)
  poly = clip_halfplane(poly, q_lo - mL, mR - q_lo, qR - qL);
  // (mR y + qR) - (mL x + qL) <= q_hi (y - x)
  poly = clip_halfplane(poly, mL - q_hi, q_hi - mR, qL - qR);
  ConvexCell cell;
  cell.verts = std::move(poly);
  return cell;
}

namespace {

// antiderivative in x of ln((m-1) x + q) along an affine edge y = m x + q
double edge_antideriv(const Rat& m, const Rat& q, const Rat& x) {
  if (m == 1) {
    if (q == 0)
      throw DiagonalContact("polygon edge lies on the diagonal; integral diverges");
    return to_double(x) * std::log(to_double(q));
  }
  double md = to_double(m) - 1.0;
  double h = md * to_double(x) + to_double(q);
  if (h <= 0) return 0.0;  // h -> 0 limit of h (ln h - 1) / (m-1)
  return h * (std::log(h) - 1.0) / md;
}

}  // namespace

double cell_log_kernel_integral(const ConvexCell& cell) {
  if (cell.empty()) return 0.0;
  for (const auto& v : cell.verts) {
    if (v.second < v.first)
      throw std::logic_error("cell_log_kernel_integral: vertex below the diagonal");
  }
  std::vector<Rat> xs;
  for (const auto& v : cell.verts) xs.push_back(v.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0;
  const size_t n = cell.verts.size();
  for (size_t s = 0; s + 1 < xs.size(); ++s) {
    const Rat& x0 = xs[s];
    const Rat& x1 = xs[s + 1];
    Rat xm = (x0 + x1) / 2;
    bool have_top = false, have_bot = false;
    Rat top_m, top_q, bot_m, bot_q, top_y, bot_y;
    for (size_t k = 0; k < n; ++k) {
      const Vert& P = cell.verts[k];
      const Vert& Q = cell.verts[(k + 1) % n];
      if (P.first == Q.first) continue;  // vertical edge
      const Rat& xlo = std::min(P.first, Q.first);
      const Rat& xhi = std::max(P.first, Q.first);
      if (xm < xlo || xm > xhi) continue;
      Rat m = (Q.second - P.second) / (Q.first - P.first);
      Rat q = P.second - m * P.first;
      Rat y = m * xm + q;
      if (!have_top || y > top_y) { top_m = m; top_q = q; top_y = y; have_top = true; }
      if (!have_bot || y < bot_y) { bot_m = m; bot_q = q; bot_y = y; have_bot = true; }
    }
    if (!have_top || !have_bot || top_y == bot_y) continue;
    total += edge_antideriv(top_m, top_q, x1) - edge_antideriv(top_m, top_q, x0);
    total -= edge_antideriv(bot_m, bot_q, x1) - edge_antideriv(bot_m, bot_q, x0);
  }
  return total;
}

double z_region_integral(const PiecewiseFunction& phi, const IntervalUnion& A,
                         const ZBand& band) {
  if (!(band.q_lo <= band.q_hi))
    throw std::invalid_argument("z_region_integral: band requires q_lo <= q_hi");
  const Rat qlo = rat_from_double(band.q_lo);
  const Rat qhi = rat_from_double(band.q_hi);
  auto pieces = affine_pieces_on(phi, A);
  for (const auto& p : pieces) {
    if (qlo <= p.m && p.m <= qhi)
      throw DiagonalContact("piece slope lies inside the band; diagonal contribution diverges");
  }
  double total = 0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      ConvexCell cell = clip_band_cell(pieces[i].dom, pieces[j].dom, pieces[i].m,
                                       pieces[i].q, pieces[j].m, pieces[j].q, qlo, qhi);
      total += cell_log_kernel_integral(cell);
    }
  }
  return total;
}

LiminfEstimate liminf_estimate(const PiecewiseFunction& phi, const IntervalUnion& A,
                               std::span<const double> delta_schedule) {
  if (delta_schedule.size() < 3)
    throw std::invalid_argument("liminf_estimate: schedule needs >= 3 points");
  for (size_t k = 1; k < delta_schedule.size(); ++k)
    if (!(delta_schedule[k] < delta_schedule[k - 1]))
      throw std::invalid_argument("liminf_estimate: schedule must be strictly decreasing");
  LiminfEstimate est;
  for (double d : delta_schedule) {
    double v = z_region_integral(phi, A, ZBand{0.0, d}) / d;
    est.trace.push_back({d, v});
  }
  size_t start = est.trace.size() * 2 / 3;
  double mn = std::numeric_limits<double>::infinity();
  for (size_t k = start; k < est.trace.size(); ++k) mn = std::min(mn, est.trace[k].value);
  est.surrogate = mn;
  return est;
}

Rat image_inner_measure(const PiecewiseFunction& phi, const IntervalUnion& A) {
  auto pieces = affine_pieces_on(phi, A);
  std::vector<Interval> images;
  for (const auto& p : pieces) {
    if (p.m == 0) continue;  // degenerate image, measure zero
    Rat a = p.m * p.dom.lo + p.q;
    Rat b = p.m * p.dom.hi + p.q;
    images.push_back(a < b ? Interval{a, b} : Interval{b, a});
  }
  if (images.empty()) return Rat(0);
  return IntervalUnion::from(std::move(images)).measure();
}

LocVsGlobReport loc_vs_glob_check(const PiecewiseFunction& phi, const IntervalUnion& A,
                                  std::span<const double> delta_schedule, double rel_tol) {
  auto pieces = affine_pieces_on(phi, A);
  Rat covered = 0;
  for (const auto& p : pieces) {
    Rat am = p.m < 0 ? Rat(-p.m) : p.m;
    if (am < 1)
      throw std::invalid_argument("loc_vs_glob_check: |slope| >= 1 required on A");
    covered += p.dom.length();
  }
  if (covered != A.measure())
    throw std::invalid_argument("loc_vs_glob_check: phi does not cover A");

  LocVsGlobReport rep;
  LiminfEstimate est = liminf_estimate(phi, A, delta_schedule);
  rep.trace = est.trace;
  rep.lhs = est.surrogate;
  rep.rhs = to_double(A.measure() - image_inner_measure(phi, A));
  rep.margin = rep.lhs - rep.rhs;
  rep.pass = rep.lhs >= rep.rhs - rel_tol * std::fabs(rep.rhs) - 1e-9;
  return rep;
}

std::vector<LevelPoint> level_set(const PiecewiseFunction& g, const IntervalUnion& K,
                                  const Rat& z) {
  std::vector<LevelPoint> out;
  for (const auto& p : g.pieces()) {
    Rat m = piece_slope(p.spec);
    if (m == 0) {
      if (!K.intersect(p.dom).empty())
        throw std::invalid_argument("level_set: zero slope on K");
      continue;
    }
    Rat q = piece_offset(p.spec);
    Rat x = (z - q) / m;
    if (x < p.dom.lo || x > p.dom.hi) continue;
    bool in_K = false;
    for (const auto& part : K.parts()) {
      if (part.lo <= x && x <= part.hi) { in_K = true; break; }  // closure of K
    }
    if (in_K) out.push_back(LevelPoint{x, m});
  }
  std::sort(out.begin(), out.end(),
            [](const LevelPoint& a, const LevelPoint& b) { return a.x < b.x; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const LevelPoint& a, const LevelPoint& b) { return a.x == b.x; }),
            out.end());
  return out;
}

Rat cumulative_value(const CumulativeDistribution& cd, const Rat& z) {
  Rat total = 0;
  for (const auto& p : cd.g.pieces()) {
    auto window = dq::intersect(p.dom, cd.I);
    if (!window) continue;
    IntervalUnion reach = cd.K.intersect(*window);
    if (reach.empty()) continue;
    Rat m = piece_slope(p.spec);
    if (m == 0) throw std::invalid_argument("cumulative_value: zero slope on K");
    Rat q = piece_offset(p.spec);
    Rat x_star = (z - q) / m;
    for (const auto& part : reach.parts()) {
      Rat lo = part.lo, hi = part.hi;
      if (m > 0) {
        hi = std::min(hi, x_star);
      } else {
        lo = std::max(lo, x_star);
      }
      if (lo < hi) total += hi - lo;
    }
  }
  return total;
}

std::vector<Rat> exceptional_values(const CumulativeDistribution& cd) {
  std::vector<Rat> out;
  auto add_images_at = [&](const Rat& x) {
    for (const auto& p : cd.g.pieces()) {
      if (p.dom.lo <= x && x <= p.dom.hi)
        out.push_back(piece_slope(p.spec) * x + piece_offset(p.spec));
    }
  };
  for (const auto& p : cd.g.pieces()) {
    add_images_at(p.dom.lo);
    add_images_at(p.dom.hi);
  }
  for (const auto& part : cd.K.parts()) {
    add_images_at(part.lo);
    add_images_at(part.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CumDerivReport cumulative_derivative(const CumulativeDistribution& cd, const Rat& z,
                                     std::span<const double> h_schedule) {
  auto exceptional = exceptional_values(cd);
  if (std::binary_search(exceptional.begin(), exceptional.end(), z))
    throw std::domain_error("cumulative_derivative: z is not a regular value");
  CumDerivReport rep;
  for (double h : h_schedule) {
    Rat hr = rat_from_double(h);
    Rat fd = (cumulative_value(cd, z + hr) - cumulative_value(cd, z - hr)) / (2 * hr);
    rep.fd_trace.emplace_back(h, to_double(fd));
  }
  rep.fd = rep.fd_trace.back().second;
  Rat formula = 0;
  for (const auto& pt : level_set(cd.g, cd.K, z)) {
    if (cd.I.lo < pt.x && pt.x < cd.I.hi) {
      Rat am = pt.slope < 0 ? Rat(-pt.slope) : pt.slope;
      formula += 1 / am;
    }
  }
  rep.formula = to_double(formula);
  rep.gap = std::fabs(rep.fd - rep.formula);
  return rep;
}

Rat p_of_z_exact(const PiecewiseFunction& g, const IntervalUnion& K, const Rat& z) {
  auto pts = level_set(g, K, z);
  if (pts.size() < 2) return Rat(0);
  Rat S = 0, S2 = 0;
  for (const auto& pt : pts) {
    Rat am = pt.slope < 0 ? Rat(-pt.slope) : pt.slope;
    Rat r = 1 / am;
    S += r;
    S2 += r * r;
  }
  return (S * S - S2) / 2;
}

double p_of_z(const PiecewiseFunction& g, const IntervalUnion& K, const Rat& z) {
  return to_double(p_of_z_exact(g, K, z));
}

Rat olimpico_margin_exact(std::span<const Rat> r) {
  if (r.size() < 2) throw std::invalid_argument("olimpico: needs m >= 2 entries");
  Rat S = 0, S2 = 0;
  for (const auto& v : r) {
    if (v < 0 || v > 1) throw std::invalid_argument("olimpico: entries must lie in [0,1]");
    S += v;
    S2 += v * v;
  }
  if (S < 1) throw std::invalid_argument("olimpico: requires sum >= 1");
  return (S * S - S2) / 2 - (S - 1);
}

double olimpico_check(std::span<const double> r) {
  std::vector<Rat> rr;
  rr.reserve(r.size());
  for (double v : r) rr.push_back(rat_from_double(v));
  return to_double(olimpico_margin_exact(rr));
}

GammaEstimate gamma_estimate(const PiecewiseFunction& u, const Interval& domain,
                             const Weight& w, double mu, double delta) {
  if (!(mu > delta && delta > 0))
    throw std::invalid_argument("gamma_estimate: requires mu > delta > 0");
  PiecewiseFunction v = u.restricted(domain);
  for (const auto& p : v.pieces()) {
    if (p.spec.kind != PieceSpec::Kind::Constant)
      throw std::invalid_argument("gamma_estimate: u must be piecewise constant");
  }
  const Rat qlo = rat_from_double(mu - delta);
  const Rat qhi = rat_from_double(mu);
  auto pieces = affine_pieces_on(v, IntervalUnion::single(v.domain()));

  GammaEstimate est;
  for (size_t i = 0; i < pieces.size(); ++i) {
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      Rat diff = pieces[j].q - pieces[i].q;
      if (diff <= 0) continue;  // positive band only sees upward jumps
      ConvexCell cell = clip_band_cell(pieces[i].dom, pieces[j].dom, Rat(0), pieces[i].q,
                                       Rat(0), pieces[j].q, qlo, qhi);
      if (cell.empty()) continue;
      double geom = cell_log_kernel_integral(cell);
      if (geom <= 0) continue;
      // quotient range over the cell: diff / (y - x) with t between the
      // vertex extremes, clipped to the band
      Rat tmin, tmax;
      bool first = true;
      for (const auto& vert : cell.verts) {
        Rat t = vert.second - vert.first;
        if (first || t < tmin) tmin = t;
        if (first || t > tmax) tmax = t;
        first = false;
      }
      double q_min = std::max(mu - delta, to_double(diff / tmax));
      double q_max = std::min(mu, to_double(diff / tmin));
      if (q_min > q_max) std::swap(q_min, q_max);
      auto [om_min, om_max] = w.range_log(std::log(q_min), std::log(q_max));
      double om_mid = w.eval(0.5 * (q_min + q_max));
      est.value += om_mid * geom;
      est.lower += std::exp(om_min.log_mag()) * geom;
      est.upper += std::exp(om_max.log_mag()) * geom;
      ++est.cells;
    }
  }
  est.value /= delta;
  est.lower /= delta;
  est.upper /= delta;
  return est;
}

namespace {

struct ConstantLayout {
  std::vector<AffinePiece> pieces;  // constant pieces as (m=0, q=value)
  Rat M;                            // sup |u|
};

ConstantLayout constant_layout(const PiecewiseFunction& u, const Interval& domain) {
  PiecewiseFunction v = u.restricted(domain);
  ConstantLayout lay;
  lay.M = 0;
  for (const auto& p : v.pieces()) {
    if (p.spec.kind != PieceSpec::Kind::Constant)
      throw std::invalid_argument("gamma bound: u must be piecewise constant");
    Rat val = piece_offset(p.spec);
    Rat av = val < 0 ? Rat(-val) : val;
    if (av > lay.M) lay.M = av;
    lay.pieces.push_back(AffinePiece{p.dom, Rat(0), val});
  }
  std::sort(lay.pieces.begin(), lay.pieces.end(),
            [](const AffinePiece& a, const AffinePiece& b) { return a.dom.lo < b.dom.lo; });
  if (lay.pieces.empty()) throw std::invalid_argument("gamma bound: u has no pieces");
  return lay;
}

// measure of S(eta) = {x in (a,a+eta): u > -J} cup {x in (b-eta,b): u < J}
Rat boundary_exception_measure(const ConstantLayout& lay, const Interval& domain,
                               const Rat& J, const Rat& eta) {
  Rat total = 0;
  Interval left{domain.lo, domain.lo + eta};
  Interval right{domain.hi - eta, domain.hi};
  for (const auto& p : lay.pieces) {
    if (p.q > -J) {
      if (auto iv = dq::intersect(p.dom, left)) total += iv->length();
    }
    if (p.q < J) {
      if (auto iv = dq::intersect(p.dom, right)) total += iv->length();
    }
  }
  return total;
}

// largest eta0 in (0, (b-a)/2] with L(S(eta)) <= eta J/(M+J) for all
// eta < eta0; L is piecewise linear with joints at piece boundaries
Rat compute_eta0(const ConstantLayout& lay, const Interval& domain, const Rat& J) {
  const Rat c = J / (lay.M + J);
  const Rat half = domain.length() / 2;
  std::vector<Rat> joints{half};
  for (const auto& p : lay.pieces) {
    for (const Rat& e : {p.dom.lo - domain.lo, p.dom.hi - domain.lo,
                         domain.hi - p.dom.lo, domain.hi - p.dom.hi}) {
      if (e > 0 && e < half) joints.push_back(e);
    }
  }
  std::sort(joints.begin(), joints.end());
  joints.erase(std::unique(joints.begin(), joints.end()), joints.end());

  Rat prev = 0;
  for (const Rat& eta : joints) {
    Rat L0 = boundary_exception_measure(lay, domain, J, prev);
    Rat L1 = boundary_exception_measure(lay, domain, J, eta);
    // affine on [prev, eta]: L(x) = L0 + sigma (x - prev)
    Rat f0 = L0 - c * prev;
    Rat f1 = L1 - c * eta;
    if (f1 > 0) {
      if (f0 >= 0) return prev;
      // crossing of L0 + sigma (x - prev) = c x
      Rat sigma = (L1 - L0) / (eta - prev);
      return (L0 - sigma * prev) / (c - sigma);
    }
    prev = eta;
  }
  return half;
}

}  // namespace

IntervalUnion contraction_domain(const PiecewiseFunction& u, const Interval& domain,
                                 double J, double mu) {
  ConstantLayout lay = constant_layout(u, domain);
  const Rat Jr = rat_from_double(J);
  const Rat eta = (lay.M + Jr) / rat_from_double(mu);
  Interval left{domain.lo, domain.lo + eta};
  Interval right{domain.hi - eta, domain.hi};
  std::vector<Interval> remove;
  for (const auto& p : lay.pieces) {
    if (p.q > -Jr) {
      if (auto iv = dq::intersect(p.dom, left)) remove.push_back(*iv);
    }
    if (p.q < Jr) {
      if (auto iv = dq::intersect(p.dom, right)) remove.push_back(*iv);
    }
  }
  // complement of the removed set inside the domain, built by sweeping
  IntervalUnion removed = remove.empty() ? IntervalUnion() : IntervalUnion::from(remove);
  std::vector<Interval> keep;
  Rat cursor = domain.lo;
  for (const auto& r : removed.parts()) {
    if (cursor < r.lo) keep.push_back(Interval{cursor, r.lo});
    cursor = std::max(cursor, r.hi);
  }
  if (cursor < domain.hi) keep.push_back(Interval{cursor, domain.hi});
  return IntervalUnion::from(std::move(keep));
}

GammaBoundReport gamma_lower_bound_check(const PiecewiseFunction& u, const Interval& domain,
                                         const Weight& w, std::span<const double> mu_list,
                                         double J, double delta) {
  if (!(J > 0)) throw std::invalid_argument("gamma bound: J > 0 required");
  ConstantLayout lay = constant_layout(u, domain);
  const Rat Jr = rat_from_double(J);
  // admissibility of J: u below -J at the left end, above +J at the right
  if (!(lay.pieces.front().q < -Jr && lay.pieces.back().q > Jr))
    throw std::invalid_argument("gamma bound: J exceeds the boundary jump amplitudes");

  GammaBoundReport rep;
  rep.J = J;
  rep.M = to_double(lay.M);
  Rat eta0 = compute_eta0(lay, domain, Jr);
  rep.eta0 = to_double(eta0);
  rep.mu0 = to_double((lay.M + Jr) / eta0);

  for (double mu : mu_list) {
    GammaBoundRow row;
    row.mu = mu;
    if (mu <= rep.mu0) {
      row.skipped = true;
      rep.rows.push_back(row);
      continue;
    }
    GammaEstimate est = gamma_estimate(u, domain, w, mu, delta);
    row.gamma_lower = est.lower;
    row.gamma_mid = est.value;
    row.gamma_upper = est.upper;
    row.bound = J * w.eval(mu) / (mu * mu);
    row.pass = row.gamma_lower >= row.bound - (0.02 * row.bound + 1e-12);
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json LocVsGlobReport::to_json() const {
  nlohmann::json j;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["margin"] = margin;
  j["pass"] = pass;
  auto arr = nlohmann::json::array();
  for (const auto& t : trace) arr.push_back({{"delta", t.delta}, {"value", t.value}});
  j["trace"] = arr;
  return j;
}

nlohmann::json GammaBoundReport::to_json() const {
  nlohmann::json j;
  j["M"] = M;
  j["J"] = J;
  j["eta0"] = eta0;
  j["mu0"] = mu0;
  j["pass"] = pass;
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"mu", r.mu},
                   {"gamma_lower", r.gamma_lower},
                   {"gamma_mid", r.gamma_mid},
                   {"gamma_upper", r.gamma_upper},
                   {"bound", r.bound},
                   {"skipped", r.skipped},
                   {"pass", r.pass}});
  }
  j["rows"] = arr;
  return j;
}

}  // namespace dq
